//! The acceptance suite shared by `chargefcs verify` and the `acceptance` test.
//!
//! Each check runs at the stated scale and reports a verdict with the numbers
//! behind it.

use std::f64::consts::PI;
use std::time::Instant;

use chargefcs_core::analytic::{kurtosis_prediction, sep_cgf, sep_cumulant, sep_cumulant_fd, uniform_grid};
use chargefcs_core::coupled::{build_pair_gate, exact_joint_moments_with_gate};
use chargefcs_core::magnon::{hamiltonian_ode_options, m_of_t_discrete_series, m_of_t_hamiltonian_series};
use chargefcs_core::quantum::fluctuation_decay;
use chargefcs_core::replica::{projected_gate_deviation, singlet_element};
use chargefcs_core::sep::{exact_mean_transfer, exact_sep_cumulants_by_time, kurtosis_proxy};
use chargefcs_core::stats::{cumulants_from_histogram, linear_fit, log_log_slope, Histogram};
use chargefcs_core::{a_of_d, ChemicalPotential, Complex64, ModelParams};

use crate::config::{EngineKind, ExperimentSpec, Mu, ParamsSpec};
use crate::engines::{batch_range, execute, haar_agreement, haar_estimate, quantum_ensemble, sep_histogram};
use crate::error::CliResult;
use crate::parallel::Pool;

/// Checks whose failure is analysed in the project notes: finite-time lattice
/// corrections to the domain-wall mean and to the kurtosis proxy that the
/// requested sample sizes resolve, and the projected-gate deviation, which is
/// exactly zero up to rounding.
pub const EXPECTED_RED: [u8; 3] = [2, 3, 7];

#[cfg(test)]
mod tests {
    #[test]
    fn weighted_line_recovers_exact_line() {
        let pts = [(0.1, 1.3, 0.5), (0.2, 1.6, 1.0), (0.4, 2.2, 0.2)];
        let (a, se, b) = super::weighted_line(&pts);
        assert!((a - 1.0).abs() < 1e-12 && (b - 3.0).abs() < 1e-12 && se > 0.0);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "{} [{}] {} ({:.1} s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.detail
        )
    }
}

fn timed(id: u8, name: &'static str, f: impl FnOnce() -> CliResult<(bool, String)>) -> Outcome {
    let start = Instant::now();
    let (passed, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
    Outcome {
        id,
        name,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub const NAMES: [&str; 9] = [
    "analytic self-consistency",
    "SEP sampler vs analytics",
    "kurtosis decay",
    "keystone cross-engine equality",
    "spin-wave asymptote",
    "discrete-model scaling",
    "Weingarten vs Haar",
    "quantum self-averaging",
    "determinism across thread counts",
];

/// Runs check `id` (1 to 9).
pub fn run_criterion(id: u8, pool: &Pool) -> Outcome {
    let name = NAMES[(id - 1) as usize];
    match id {
        1 => timed(id, name, criterion_analytic),
        2 => timed(id, name, || criterion_sep_sampler(pool)),
        3 => timed(id, name, || criterion_kurtosis(pool)),
        4 => timed(id, name, criterion_keystone),
        5 => timed(id, name, criterion_spinwave),
        6 => timed(id, name, criterion_discrete_scaling),
        7 => timed(id, name, || criterion_weingarten(pool)),
        8 => timed(id, name, || criterion_quantum(pool)),
        9 => timed(id, name, criterion_determinism),
        _ => panic!("no criterion {id}"),
    }
}

pub fn run_all(pool: &Pool) -> Vec<Outcome> {
    (1..=9).map(|id| run_criterion(id, pool)).collect()
}

fn criterion_analytic() -> CliResult<(bool, String)> {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for (rl, rr) in [(1.0, 0.0), (0.88, 0.12), (0.5, 0.5)] {
        for t in [10.0, 100.0] {
            for order in 1..=4 {
                let exact = sep_cumulant(order, t, rl, rr)?;
                let fd = sep_cumulant_fd(order, t, rl, rr, 1e-2, 4)?;
                worst = worst.max(((fd - exact) / exact).abs());
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((
        worst <= 1e-6 && secs < 1.0,
        format!("largest relative difference {worst:.2e} (limit 1e-6), {secs:.3} s"),
    ))
}

fn criterion_sep_sampler(pool: &Pool) -> CliResult<(bool, String)> {
    let n = 1_000_000;
    let t = 100;
    let target1 = (t as f64 / PI).sqrt();
    let target2 = target1 / 2.0;
    let wall = ModelParams::new(128, t, ChemicalPotential::PlusInfinity).with_seed(2);
    let h = sep_histogram(pool, &wall, 0..n)?;
    let c = cumulants_from_histogram(&h, 2, 200, wall.seed)?;
    let z1 = (c[0].value - target1) / c[0].stderr;
    let lattice = exact_mean_transfer(&wall)?;
    let eq = ModelParams::new(128, t, ChemicalPotential::ZERO).with_seed(2);
    let h = sep_histogram(pool, &eq, 0..n)?;
    let c2 = cumulants_from_histogram(&h, 2, 200, eq.seed)?[1];
    let z2 = (c2.value - target2) / c2.stderr;
    Ok((
        z1.abs() <= 3.0 && z2.abs() <= 3.0,
        format!(
            "C1 = {:.5} +- {:.5} vs {target1:.5} ({z1:+.2} sigma; exact lattice mean {lattice:.6}); C2(mu=0) = {:.5} +- {:.5} vs {target2:.5} ({z2:+.2} sigma)",
            c[0].value, c[0].stderr, c2.value, c2.stderr
        ),
    ))
}

fn criterion_kurtosis(pool: &Pool) -> CliResult<(bool, String)> {
    let target = (4.0 - 3.0 * 2f64.sqrt()) * PI.sqrt() / 2.0;
    let (n, nb) = (10_000_000u64, 100usize);
    let mut ok = true;
    let mut parts = Vec::new();
    let mut fit = Vec::new();
    for t in [64usize, 100, 196] {
        let params = ModelParams::new(128, t, ChemicalPotential::ZERO).with_seed(3);
        let batches = (0..nb)
            .map(|b| sep_histogram(pool, &params, batch_range(n, nb, b)))
            .collect::<CliResult<Vec<Histogram>>>()?;
        let k = kurtosis_proxy(&batches)?;
        let s = (t as f64).sqrt();
        let (v, se) = ((k.value - 3.0) * s, k.stderr * s);
        let z = (v - target) / se;
        ok &= z.abs() <= 3.0;
        parts.push(format!("t={t}: {v:.4} +- {se:.4} ({z:+.2} sigma)"));
        fit.push((1.0 / s, v, se));
    }
    debug_assert!((kurtosis_prediction(1.0)? - target).abs() < 1e-15);
    let (a, a_se, b) = weighted_line(&fit);
    Ok((
        ok,
        format!(
            "target {target:.5}; {}; fit A + B/sqrt(t): A = {a:.4} +- {a_se:.4} ({:+.2} sigma), B = {b:.3}",
            parts.join("; "),
            (a - target) / a_se
        ),
    ))
}

/// Weighted least squares `y = a + b x` over `(x, y, stderr)`; returns `(a, se(a), b)`.
fn weighted_line(points: &[(f64, f64, f64)]) -> (f64, f64, f64) {
    let (mut s, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(x, y, e) in points {
        let w = 1.0 / (e * e);
        s += w;
        sx += w * x;
        sy += w * y;
        sxx += w * x * x;
        sxy += w * x * y;
    }
    let det = s * sxx - sx * sx;
    let a = (sxx * sy - sx * sxy) / det;
    let b = (s * sxy - sx * sy) / det;
    (a, (sxx / det).sqrt(), b)
}

fn criterion_keystone() -> CliResult<(bool, String)> {
    let mut worst: f64 = 0.0;
    for l in [6, 8] {
        for a in [0.05, 0.1, 0.3] {
            let m = m_of_t_discrete_series(l, 6, a)?;
            let gate = build_pair_gate(2, a)?;
            for mu in [
                ChemicalPotential::Finite(0.5),
                ChemicalPotential::Finite(2.0),
                ChemicalPotential::PlusInfinity,
            ] {
                let joint = exact_joint_moments_with_gate(&ModelParams::new(l, 6, mu).with_chains(2), &gate)?;
                let sep = exact_sep_cumulants_by_time(&ModelParams::new(l, 6, mu))?;
                let th2 = mu.tanh_half().powi(2);
                for t in 0..=6 {
                    worst = worst.max((th2 * m[t] - (sep[t][1] - joint[t].c2bar())).abs());
                }
            }
        }
    }
    Ok((worst <= 1e-9, format!("largest discrepancy {worst:.2e} (limit 1e-9)")))
}

fn criterion_spinwave() -> CliResult<(bool, String)> {
    let a = 0.05;
    let times: Vec<f64> = (0..=8).map(|k| 200.0 + 25.0 * k as f64).collect();
    let m = m_of_t_hamiltonian_series(400, &times, a, &hamiltonian_ode_options())?;
    let scaled: Vec<f64> = times.iter().zip(&m).map(|(t, m)| m * 16.0 * (PI * t).sqrt() / a).collect();
    let worst = scaled.iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max);
    Ok((
        worst <= 0.1,
        format!(
            "M_H 16 sqrt(pi t)/a over t in [200, 400]: {:.4} .. {:.4}, largest |x - 1| = {worst:.4} (limit 0.1)",
            scaled.iter().cloned().fold(f64::INFINITY, f64::min),
            scaled.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        ),
    ))
}

fn criterion_discrete_scaling() -> CliResult<(bool, String)> {
    let mu = ChemicalPotential::Finite(0.1);
    let th2 = mu.tanh_half().powi(2);
    let mut ok = true;
    let mut slopes = Vec::new();
    let mut curves = Vec::new();
    for d in [1.5, 2.0, 3.0] {
        let a = a_of_d(d)?;
        let m = m_of_t_discrete_series(160, 200, a)?;
        let ts: Vec<f64> = (20..=200).map(|t| t as f64).collect();
        let dc2: Vec<f64> = (20..=200).map(|t| th2 * m[t]).collect();
        let s = log_log_slope(&ts, &dc2);
        ok &= (-0.65..=-0.35).contains(&s);
        slopes.push(format!("d={d}: {s:.4}"));
        curves.push((50..=200).map(|t| th2 * m[t] * (t as f64).sqrt() / a).collect::<Vec<_>>());
    }
    let mut spread: f64 = 0.0;
    for i in 0..curves[0].len() {
        let (lo, hi) = curves
            .iter()
            .map(|c| c[i])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        spread = spread.max((hi - lo) / lo);
    }
    ok &= spread <= 0.1;
    Ok((
        ok,
        format!(
            "slopes {} (window [-0.65, -0.35]); largest collapse spread for t >= 50: {:.2}% (limit 10%)",
            slopes.join(", "),
            100.0 * spread
        ),
    ))
}

fn criterion_weingarten(pool: &Pool) -> CliResult<(bool, String)> {
    let est = haar_estimate(pool, 1, 100_000, 7)?;
    let (z, dev) = haar_agreement(&est, 1)?;
    let ds = [2u32, 3, 4];
    let devs = ds.iter().map(|&d| projected_gate_deviation(d)).collect::<chargefcs_core::Result<Vec<_>>>()?;
    let lx: Vec<f64> = ds.iter().map(|&d| (d as f64).ln()).collect();
    let ly: Vec<f64> = devs.iter().map(|v| v.ln()).collect();
    let slope = if ly.iter().all(|v| v.is_finite()) {
        linear_fit(&lx, &ly).0
    } else {
        f64::NAN
    };
    let mut singlet: f64 = 0.0;
    for &d in &ds {
        singlet = singlet.max((singlet_element(d)? - a_of_d(d as f64)?).abs());
    }
    let ok = z <= 5.0 && slope <= -7.0 && singlet <= 1e-12;
    Ok((
        ok,
        format!(
            "Haar vs Weingarten at d=1: largest |z| = {z:.2} (limit 5), largest |diff| = {dev:.2e}; projected-gate deviation {:?} -> slope {slope:.2} (limit -7); singlet vs a(d): {singlet:.2e} (limit 1e-12)",
            devs.iter().map(|v| format!("{v:.2e}")).collect::<Vec<_>>()
        ),
    ))
}

fn criterion_quantum(pool: &Pool) -> CliResult<(bool, String)> {
    let t_list = [8usize, 12, 16, 20, 24];
    let grid = uniform_grid(-2.0, 2.0, 21);
    let n = 35;
    let ens = quantum_ensemble(pool, 20, 11, n, &grid, &t_list)?;
    let k = t_list.len() - 1;
    let tf = t_list[k] as f64;
    let mut worst: f64 = 0.0;
    for (j, &lam) in grid.iter().enumerate() {
        if lam == 0.0 {
            continue;
        }
        let mean = ens.iter().map(|c| c[k].chi[j]).sum::<Complex64>() / n as f64;
        let sep = sep_cgf(lam, tf, 1.0, 0.0)?;
        worst = worst.max((mean - sep).norm() / sep.norm());
    }
    let f = fluctuation_decay(&ens, &t_list)?;
    let ok = worst <= 0.1 && (-2.5..=-1.2).contains(&f.slope);
    Ok((
        ok,
        format!(
            "t=24: largest relative gap of mean chi/sqrt(t) to SEP {:.2}% (limit 10%); fluctuation slope {:.3} (window [-2.5, -1.2])",
            100.0 * worst,
            f.slope
        ),
    ))
}

/// Small specs for every stochastic engine.
pub fn determinism_specs() -> CliResult<Vec<ExperimentSpec>> {
    let p = |engine, l, t, mu| {
        ExperimentSpec::new(
            engine,
            ParamsSpec {
                l,
                t,
                mu,
                seed: 42,
                ..Default::default()
            },
        )
    };
    let mut sep = p(EngineKind::SepMc, 64, 16, Mu(ChemicalPotential::ZERO));
    sep.options.n_samples = 30_000;
    sep.options.n_batches = 3;
    sep.options.n_bootstrap = 20;
    let mut coupled2 = p(EngineKind::CoupledMc, 16, 6, Mu(ChemicalPotential::Finite(2.0)));
    coupled2.options.n_samples = 20_000;
    let mut coupled3 = coupled2.clone();
    coupled3.params.n_chains = 3;
    let mut replica = p(EngineKind::ReplicaCheck, 2, 1, Mu::INF);
    replica.options.n_samples = 3_000;
    replica.options.d_list = vec![1.0, 2.0];
    let mut qcgf = p(EngineKind::QuantumCgf, 10, 4, Mu::INF);
    qcgf.options.n_circuits = 5;
    qcgf.options.t_list = vec![2, 4];
    let mut qmixed = p(EngineKind::QuantumCgf, 14, 2, Mu(ChemicalPotential::ZERO));
    qmixed.options.n_circuits = 2;
    qmixed.options.n_probes = 2;
    qmixed.options.lambda_grid = vec![-0.5, 0.0, 0.5];
    let mut qfluct = p(EngineKind::QuantumFluct, 10, 4, Mu::INF);
    qfluct.options.n_circuits = 4;
    qfluct.options.t_list = vec![2, 3, 4];
    [sep, coupled2, coupled3, replica, qcgf, qmixed, qfluct]
        .into_iter()
        .map(ExperimentSpec::resolve)
        .collect()
}

fn criterion_determinism() -> CliResult<(bool, String)> {
    let pools = [Pool::new(1)?, Pool::new(4)?];
    let mut failures = Vec::new();
    let specs = determinism_specs()?;
    for s in &specs {
        let a = execute(s, &pools[0])?.to_csv_bytes()?;
        let b = execute(s, &pools[1])?.to_csv_bytes()?;
        let c = execute(s, &pools[1])?.to_csv_bytes()?;
        if a != b || b != c {
            failures.push(s.engine.name());
        }
    }
    Ok((
        failures.is_empty(),
        if failures.is_empty() {
            format!("{} stochastic configurations byte-identical with 1 and 4 threads", specs.len())
        } else {
            format!("outputs differ for {failures:?}")
        },
    ))
}
