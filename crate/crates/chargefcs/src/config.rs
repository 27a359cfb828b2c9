//! Experiment configuration documents.

use std::fmt;
use std::path::{Path, PathBuf};

use chargefcs_core::analytic::default_lambda_grid;
use chargefcs_core::{ChemicalPotential, ModelParams};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EngineKind {
    SepMc,
    SepExact,
    CoupledMc,
    CoupledExact,
    MagnonDiscrete,
    MagnonHamiltonian,
    ReplicaCheck,
    QuantumCgf,
    QuantumFluct,
    Analytic,
}

impl EngineKind {
    pub const ALL: [EngineKind; 10] = [
        EngineKind::SepMc,
        EngineKind::SepExact,
        EngineKind::CoupledMc,
        EngineKind::CoupledExact,
        EngineKind::MagnonDiscrete,
        EngineKind::MagnonHamiltonian,
        EngineKind::ReplicaCheck,
        EngineKind::QuantumCgf,
        EngineKind::QuantumFluct,
        EngineKind::Analytic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EngineKind::SepMc => "sep-mc",
            EngineKind::SepExact => "sep-exact",
            EngineKind::CoupledMc => "coupled-mc",
            EngineKind::CoupledExact => "coupled-exact",
            EngineKind::MagnonDiscrete => "magnon-discrete",
            EngineKind::MagnonHamiltonian => "magnon-hamiltonian",
            EngineKind::ReplicaCheck => "replica-check",
            EngineKind::QuantumCgf => "quantum-cgf",
            EngineKind::QuantumFluct => "quantum-fluct",
            EngineKind::Analytic => "analytic",
        }
    }

    pub fn parse(s: &str) -> CliResult<Self> {
        EngineKind::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| CliError::config(format!("unknown engine `{s}`")))
    }

    /// Engines whose output depends on random draws.
    pub fn is_stochastic(self) -> bool {
        matches!(
            self,
            EngineKind::SepMc
                | EngineKind::CoupledMc
                | EngineKind::ReplicaCheck
                | EngineKind::QuantumCgf
                | EngineKind::QuantumFluct
        )
    }
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Chemical potential as it appears in JSON: a number, or `"inf"` / `"-inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mu(pub ChemicalPotential);

impl Mu {
    pub const INF: Mu = Mu(ChemicalPotential::PlusInfinity);

    pub fn label(self) -> String {
        match self.0 {
            ChemicalPotential::PlusInfinity => "inf".into(),
            ChemicalPotential::MinusInfinity => "-inf".into(),
            ChemicalPotential::Finite(m) => crate::table::fmt_f64(m),
        }
    }
}

impl Serialize for Mu {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            ChemicalPotential::Finite(m) => s.serialize_f64(m),
            ChemicalPotential::PlusInfinity => s.serialize_str("inf"),
            ChemicalPotential::MinusInfinity => s.serialize_str("-inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Mu {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        let mu = match Raw::deserialize(d)? {
            Raw::Num(m) => m,
            Raw::Str(s) => match s.as_str() {
                "inf" | "+inf" | "infinity" => f64::INFINITY,
                "-inf" | "-infinity" => f64::NEG_INFINITY,
                other => return Err(serde::de::Error::custom(format!("bad chemical potential `{other}`"))),
            },
        };
        ChemicalPotential::from_f64(mu).map(Mu).map_err(serde::de::Error::custom)
    }
}

fn default_l() -> usize {
    64
}
fn default_t() -> usize {
    16
}
fn default_d() -> f64 {
    2.0
}
fn default_chains() -> usize {
    1
}
fn default_mu() -> Mu {
    Mu::INF
}

/// Model parameters; see [`ModelParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    #[serde(default = "default_l")]
    pub l: usize,
    #[serde(default = "default_t")]
    pub t: usize,
    #[serde(default = "default_d")]
    pub d: f64,
    #[serde(default = "default_chains")]
    pub n_chains: usize,
    #[serde(default = "default_mu")]
    pub mu: Mu,
    #[serde(default)]
    pub seed: u64,
}

impl Default for ParamsSpec {
    fn default() -> Self {
        ParamsSpec {
            l: default_l(),
            t: default_t(),
            d: default_d(),
            n_chains: default_chains(),
            mu: default_mu(),
            seed: 0,
        }
    }
}

impl ParamsSpec {
    pub fn model(&self) -> ModelParams {
        ModelParams {
            l: self.l,
            t: self.t,
            d: self.d,
            n_chains: self.n_chains,
            mu: self.mu.0,
            seed: self.seed,
        }
    }
}

fn default_samples() -> u64 {
    100_000
}
fn default_bootstrap() -> usize {
    200
}
fn default_one() -> usize {
    1
}
fn default_circuits() -> usize {
    35
}
fn default_probes() -> usize {
    8
}

/// Engine options. Empty lists are filled in by [`ExperimentSpec::resolve`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default = "default_samples")]
    pub n_samples: u64,
    /// Default: 101 points on [-3, 3].
    #[serde(default)]
    pub lambda_grid: Vec<f64>,
    /// Default: `[params.t]`, or `1..=params.t` for the per-step engines.
    #[serde(default)]
    pub t_list: Vec<usize>,
    /// Default: `[params.d]`.
    #[serde(default)]
    pub d_list: Vec<f64>,
    #[serde(default = "default_bootstrap")]
    pub n_bootstrap: usize,
    /// Independent batches for the kurtosis proxy (`sep-mc`).
    #[serde(default = "default_one")]
    pub n_batches: usize,
    #[serde(default = "default_circuits")]
    pub n_circuits: usize,
    /// Random-phase probe vectors for the equilibrium trace above 12 sites.
    #[serde(default = "default_probes")]
    pub n_probes: usize,
    /// Overrides `a(d)` for the ladder and magnon engines.
    #[serde(default)]
    pub a: Option<f64>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            n_samples: default_samples(),
            lambda_grid: Vec::new(),
            t_list: Vec::new(),
            d_list: Vec::new(),
            n_bootstrap: default_bootstrap(),
            n_batches: 1,
            n_circuits: default_circuits(),
            n_probes: default_probes(),
            a: None,
        }
    }
}

/// A single run: engine, model, options and output location.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub engine: EngineKind,
    #[serde(default)]
    pub params: ParamsSpec,
    #[serde(default)]
    pub options: Options,
    /// Results CSV; relative paths are taken from the spec file's directory.
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn new(engine: EngineKind, params: ParamsSpec) -> Self {
        ExperimentSpec {
            engine,
            params,
            options: Options::default(),
            output: None,
        }
    }

    /// Fills defaults and checks engine/parameter compatibility.
    pub fn resolve(mut self) -> CliResult<Self> {
        use EngineKind::*;
        let o = &mut self.options;
        let p = &mut self.params;
        if o.lambda_grid.is_empty() {
            o.lambda_grid = match self.engine {
                QuantumCgf | QuantumFluct => chargefcs_core::analytic::uniform_grid(-2.0, 2.0, 21),
                _ => default_lambda_grid(),
            };
        }
        if o.t_list.is_empty() {
            o.t_list = match self.engine {
                CoupledExact | MagnonDiscrete | SepExact => (1..=p.t).collect(),
                _ => vec![p.t],
            };
        }
        if o.d_list.is_empty() {
            o.d_list = vec![p.d];
        }
        if matches!(self.engine, CoupledMc | CoupledExact) && p.n_chains == 1 {
            p.n_chains = 2;
        }
        if matches!(self.engine, QuantumCgf | QuantumFluct) {
            p.d = 1.0;
        }
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> CliResult<()> {
        use EngineKind::*;
        let o = &self.options;
        let p = &self.params;
        let model = p.model();
        let bad = |m: &str| Err(CliError::config(format!("{}: {m}", self.engine)));
        if o.t_list.iter().any(|&t| t == 0) && matches!(self.engine, MagnonHamiltonian | QuantumFluct) {
            return bad("t_list entries must be positive");
        }
        if o.lambda_grid.iter().any(|l| !l.is_finite()) {
            return bad("lambda_grid must be finite");
        }
        if o.d_list.iter().any(|&d| d.is_nan() || d <= 0.0) {
            return bad("d_list entries must be positive");
        }
        if self.engine != QuantumCgf && self.engine != QuantumFluct && self.engine != Analytic {
            model.validate()?;
        }
        match self.engine {
            SepMc | CoupledMc if o.n_samples < 2 => return bad("n_samples must be at least 2"),
            SepMc if o.n_batches == 0 || o.n_samples < 2 * o.n_batches as u64 => {
                return bad("need at least two samples per batch")
            }
            CoupledMc | CoupledExact if !(2..=3).contains(&p.n_chains) => return bad("n_chains must be 2 or 3"),
            ReplicaCheck if o.d_list.iter().any(|&d| d.fract() != 0.0 || d > 8.0) => {
                return bad("d_list entries must be integers between 1 and 8")
            }
            QuantumCgf | QuantumFluct => {
                if p.l > chargefcs_core::quantum::MAX_L {
                    return Err(chargefcs_core::Error::ResourceCap {
                        what: "statevector chain length",
                        requested: p.l as u64,
                        limit: chargefcs_core::quantum::MAX_L as u64,
                    }
                    .into());
                }
                if p.l < 2 || p.l % 2 != 0 {
                    return bad("l must be even and at least 2");
                }
                if o.n_circuits == 0 {
                    return bad("n_circuits must be positive");
                }
                let pure = p.mu == Mu::INF;
                let mixed = p.mu.0 == ChemicalPotential::ZERO;
                if !(pure || (mixed && self.engine == QuantumCgf)) {
                    return bad("initial state must be the domain wall (mu = inf) or, for quantum-cgf, equilibrium (mu = 0)");
                }
                if self.engine == QuantumFluct && o.n_circuits < 2 {
                    return bad("fluctuations need at least two circuits");
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Where the CSV goes for a spec read from `spec_path`.
    pub fn output_path(&self, spec_path: Option<&Path>) -> PathBuf {
        let name = self
            .output
            .clone()
            .unwrap_or_else(|| PathBuf::from(format!("{}.csv", self.engine)));
        match spec_path.and_then(Path::parent) {
            Some(dir) if name.is_relative() => dir.join(name),
            _ => name,
        }
    }
}

/// Reads a spec, or the spec embedded in a run manifest.
pub fn load_spec(path: &Path) -> CliResult<ExperimentSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let spec = match value.get("spec") {
        Some(inner) if value.get("outputs").is_some() => inner.clone(),
        _ => value,
    };
    serde_json::from_value(spec).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_spec_gets_defaults() {
        let s: ExperimentSpec = serde_json::from_str(r#"{"engine": "analytic"}"#).unwrap();
        let r = s.resolve().unwrap();
        assert_eq!(r.options.t_list, vec![16]);
        assert_eq!(r.options.lambda_grid.len(), 101);
        assert_eq!(r.params.mu, Mu::INF);
    }

    #[test]
    fn mu_round_trip() {
        for (text, mu) in [("\"inf\"", Mu::INF), ("0.1", Mu(ChemicalPotential::Finite(0.1)))] {
            let m: Mu = serde_json::from_str(text).unwrap();
            assert_eq!(m, mu);
            assert_eq!(serde_json::to_string(&m).unwrap(), text);
        }
        assert!(serde_json::from_str::<Mu>("\"big\"").is_err());
    }

    #[test]
    fn incompatible_specs_are_rejected() {
        let mut s = ExperimentSpec::new(EngineKind::QuantumCgf, ParamsSpec { l: 30, ..Default::default() });
        assert_eq!(s.clone().resolve().unwrap_err().exit_code(), 3);
        s.params.l = 8;
        s.params.mu = Mu(ChemicalPotential::Finite(2.0));
        assert_eq!(s.resolve().unwrap_err().exit_code(), 2);
        let s = ExperimentSpec::new(EngineKind::SepMc, ParamsSpec { l: 7, ..Default::default() });
        assert_eq!(s.resolve().unwrap_err().exit_code(), 2);
        assert!(serde_json::from_str::<ExperimentSpec>(r#"{"engine": "analytic", "bogus": 1}"#).is_err());
    }
}
