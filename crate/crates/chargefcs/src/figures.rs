//! Figure datasets at desk scale.
//!
//! | panel | engines | parameters |
//! |-------|---------|------------|
//! | `fig1b` | quantum-cgf | L = 16, 35 circuits, mu = inf, t in {4, 8, 12, 16}, 31 lambdas on [-3, 3] |
//! | `fig2a` | magnon-discrete, analytic | L = 160, t = 1..200, d in {1.5, 2, 3, 4}, mu in {0.1, 2, inf} |
//! | `fig2b` | coupled-exact (three chains), analytic | L = 6, t = 1..6, d in {1.5, 2, 3, 4}, mu = 0.1 |
//! | `fig2c` | sep-mc, analytic | L = 64, mu = 0, t in {4, 8, 16, 32, 64}, 2e5 samples in 20 batches |
//! | `figS1` | magnon-hamiltonian | L = 200, a = 0.05, t = 10, 20, ..., 200 |
//! | `figS2` | quantum-fluct | L = 16, 35 circuits, mu = inf, t in {4, 6, ..., 16}, 21 lambdas on [-2, 2] |
//!
//! Rows with `engine = analytic` are reference curves and rows with
//! `engine = guide` carry guide-line exponents (`guide_exponent`) or reference
//! levels (`reference_level`).

use std::path::{Path, PathBuf};
use std::time::Instant;

use chargefcs_core::analytic::{sep_cumulant, spinwave_dc3, uniform_grid};
use chargefcs_core::{a_of_d, ChemicalPotential};
use serde::Serialize;

use crate::config::{EngineKind, ExperimentSpec, Mu, ParamsSpec};
use crate::engines::execute;
use crate::error::{CliError, CliResult};
use crate::manifest::{build_manifest, manifest_path_for, Manifest};
use crate::parallel::Pool;
use crate::table::{Row, Table};

pub const FIGURES: [&str; 6] = ["fig1b", "fig2a", "fig2b", "fig2c", "figS1", "figS2"];

#[derive(Debug, Clone, Serialize)]
struct FigureSpec {
    figure: String,
    seed: u64,
    runs: Vec<ExperimentSpec>,
}

fn spec(engine: EngineKind, params: ParamsSpec, f: impl FnOnce(&mut ExperimentSpec)) -> CliResult<ExperimentSpec> {
    let mut s = ExperimentSpec::new(engine, params);
    f(&mut s);
    s.resolve()
}

fn finite(mu: f64) -> Mu {
    Mu(ChemicalPotential::Finite(mu))
}

fn guide(quantity: &str, value: f64) -> Row {
    Row::new("guide", quantity, value)
}

/// The specs behind a panel.
fn runs(name: &str, seed: u64) -> CliResult<Vec<ExperimentSpec>> {
    let p = |l, t, mu| ParamsSpec {
        l,
        t,
        mu,
        seed,
        ..Default::default()
    };
    let d_list = vec![1.5, 2.0, 3.0, 4.0];
    Ok(match name {
        "fig1b" => vec![spec(EngineKind::QuantumCgf, p(16, 16, Mu::INF), |s| {
            s.options.t_list = vec![4, 8, 12, 16];
            s.options.lambda_grid = uniform_grid(-3.0, 3.0, 31);
        })?],
        "fig2a" => [finite(0.1), finite(2.0), Mu::INF]
            .into_iter()
            .map(|mu| spec(EngineKind::MagnonDiscrete, p(160, 200, mu), |s| s.options.d_list = d_list.clone()))
            .collect::<CliResult<_>>()?,
        "fig2b" => vec![spec(EngineKind::CoupledExact, p(6, 6, finite(0.1)), |s| {
            s.params.n_chains = 3;
            s.options.d_list = d_list.clone();
        })?],
        "fig2c" => vec![spec(EngineKind::SepMc, p(64, 64, finite(0.0)), |s| {
            s.options.t_list = vec![4, 8, 16, 32, 64];
            s.options.n_samples = 200_000;
            s.options.n_batches = 20;
            s.options.lambda_grid = vec![0.0];
            s.options.n_bootstrap = 50;
        })?],
        "figS1" => vec![spec(EngineKind::MagnonHamiltonian, p(200, 200, Mu::INF), |s| {
            s.options.a = Some(0.05);
            s.options.t_list = (1..=20).map(|k| 10 * k).collect();
        })?],
        "figS2" => vec![spec(EngineKind::QuantumFluct, p(16, 16, Mu::INF), |s| {
            s.options.t_list = vec![4, 6, 8, 10, 12, 14, 16];
        })?],
        other => return Err(CliError::config(format!("unknown figure `{other}` (expected one of {FIGURES:?})"))),
    })
}

fn scaled_copies(table: &mut Table) {
    let mut extra = Vec::new();
    for r in &table.rows {
        let Some(t) = r.t.filter(|&t| t > 0) else { continue };
        if r.quantity.starts_with("chi") {
            let s = (t as f64).sqrt();
            let mut c = r.clone();
            c.quantity = r.quantity.replacen("chi", "chi_scaled", 1);
            c.value /= s;
            c.stderr = r.stderr.map(|e| e / s);
            extra.push(c);
        }
    }
    table.rows.extend(extra);
}

/// Builds the tidy table for one panel.
pub fn figure_table(name: &str, seed: u64, pool: &Pool) -> CliResult<(Table, serde_json::Value)> {
    let specs = runs(name, seed)?;
    let mut table = Table::new();
    for s in &specs {
        table.extend(execute(s, pool)?);
    }
    match name {
        "fig1b" => scaled_copies(&mut table),
        "fig2a" => {
            let mut extra = Vec::new();
            for r in table.select("delta_c2") {
                let mu = r.mu.expect("magnon rows carry mu").0;
                let t = r.t.expect("magnon rows carry t") as f64;
                let c2 = sep_cumulant(2, t, mu.left_density(), mu.right_density())?;
                let mut c = r.clone();
                c.quantity = "c2bar".into();
                c.value = c2 - r.value;
                extra.push(c);
                if r.d == Some(2.0) {
                    extra.push(Row::new("analytic", "c2", c2).mu(r.mu.unwrap()).t(t as usize));
                }
            }
            table.rows.extend(extra);
            table.push(guide("guide_exponent", -0.5));
        }
        "fig2b" => {
            let mut extra = Vec::new();
            for r in table.select("delta_c3") {
                let (t, d) = (r.t.unwrap() as f64, r.d.unwrap());
                let mu = r.mu.unwrap();
                let v = spinwave_dc3(mu.0, t, d)? / a_of_d(d)?;
                extra.push(Row::new("analytic", "spinwave_dc3_scaled", v).mu(mu).d(d).t(t as usize));
            }
            table.rows.extend(extra);
            table.push(guide("guide_exponent", -0.5));
        }
        "fig2c" => {
            let t_list = &specs[0].options.t_list;
            for &t in t_list {
                let k = chargefcs_core::analytic::kurtosis_prediction(t as f64)?;
                table.push(Row::new("analytic", "kurtosis_excess", k).mu(finite(0.0)).t(t));
                table.push(Row::new("analytic", "kurtosis_excess_scaled", k * (t as f64).sqrt()).mu(finite(0.0)).t(t));
            }
            table.rows.retain(|r| !r.quantity.starts_with("chi"));
            table.push(guide("guide_exponent", -0.5));
        }
        "figS1" => table.push(guide("reference_level", 1.0)),
        "figS2" => table.push(guide("guide_exponent", -2.0)),
        _ => {}
    }
    let meta = serde_json::to_value(FigureSpec {
        figure: name.into(),
        seed,
        runs: specs,
    })?;
    Ok((table, meta))
}

/// Writes `<out>/<name>.csv` and its manifest.
pub fn figure_dataset(name: &str, out: &Path, seed: u64, pool: &Pool) -> CliResult<(PathBuf, Manifest)> {
    let start = Instant::now();
    let (table, meta) = figure_table(name, seed, pool)?;
    let csv = out.join(format!("{name}.csv"));
    let bytes = table.write_csv(&csv)?;
    let manifest = build_manifest(&meta, [(format!("{name}.csv"), &table, bytes.as_slice())], pool, start)?;
    manifest.write(&manifest_path_for(&csv))?;
    Ok((csv, manifest))
}
