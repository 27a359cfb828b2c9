//! Engine dispatch: a resolved [`ExperimentSpec`] becomes a tidy [`Table`].

use std::f64::consts::PI;
use std::ops::Range;

use chargefcs_core::analytic::{kurtosis_prediction, sep_cgf, sep_cumulant, spinwave_dc2, spinwave_dc3};
use chargefcs_core::coupled::{build_pair_gate, coupled_mc_range_with_gate, exact_joint_moments_with_gate, JointHistogram};
use chargefcs_core::magnon::{hamiltonian_ode_options, m_of_t_discrete_series, m_of_t_hamiltonian_series};
use chargefcs_core::quantum::{cgf_mixed_equilibrium, cgf_pure, domain_wall_sector, fluctuation_decay, CGFGrid, Circuit};
use chargefcs_core::replica::{
    averaged_gate_paired, haar_mc_range, projected_gate_deviation, singlet_element, HaarAccumulator, HaarEstimate,
};
use chargefcs_core::sep::{exact_sep_cgf_by_time, exact_sep_cumulants_by_time, kurtosis_proxy, run_sep_range};
use chargefcs_core::stats::{cumulants_from_histogram, log_unwrapped, mean_stderr, Histogram};
use chargefcs_core::{a_of_d, ChemicalPotential, Complex64, ModelParams};

use crate::config::{EngineKind, ExperimentSpec, Mu};
use crate::error::{CliError, CliResult};
use crate::parallel::{Pool, CHUNK};
use crate::table::{Row, Table};

/// Runs a resolved spec.
pub fn execute(spec: &ExperimentSpec, pool: &Pool) -> CliResult<Table> {
    match spec.engine {
        EngineKind::Analytic => analytic(spec),
        EngineKind::SepMc => sep_mc(spec, pool),
        EngineKind::SepExact => sep_exact(spec),
        EngineKind::CoupledMc => coupled_mc(spec, pool),
        EngineKind::CoupledExact => coupled_exact(spec),
        EngineKind::MagnonDiscrete => magnon_discrete(spec),
        EngineKind::MagnonHamiltonian => magnon_hamiltonian(spec, pool),
        EngineKind::ReplicaCheck => replica_check(spec, pool),
        EngineKind::QuantumCgf => quantum_cgf(spec, pool),
        EngineKind::QuantumFluct => quantum_fluct(spec, pool),
    }
}

fn max_t(spec: &ExperimentSpec) -> usize {
    spec.options.t_list.iter().copied().max().unwrap_or(0)
}

fn coupling(spec: &ExperimentSpec, d: f64) -> CliResult<f64> {
    match spec.options.a {
        Some(a) => Ok(a),
        None => Ok(a_of_d(d)?),
    }
}

/// `d` label for rows of engines that take an explicit coupling override.
fn d_label(spec: &ExperimentSpec, row: Row, d: f64) -> Row {
    if spec.options.a.is_some() {
        row
    } else {
        row.d(d)
    }
}

fn base(spec: &ExperimentSpec, quantity: &str, value: f64) -> Row {
    Row::new(spec.engine.name(), quantity, value).l(spec.params.l).mu(spec.params.mu)
}

fn densities(mu: ChemicalPotential) -> (f64, f64) {
    (mu.left_density(), mu.right_density())
}

fn push_chi(table: &mut Table, mk: impl Fn(&str, f64) -> Row, lambdas: &[f64], chi: &[Complex64], prefix: &str) {
    for (&lam, c) in lambdas.iter().zip(chi) {
        table.push(mk(&format!("{prefix}_re"), c.re).lambda(lam));
        table.push(mk(&format!("{prefix}_im"), c.im).lambda(lam));
    }
}

fn analytic(spec: &ExperimentSpec) -> CliResult<Table> {
    let (rl, rr) = densities(spec.params.mu.0);
    let mut table = Table::new();
    let row = |q: &str, v: f64| Row::new("analytic", q, v).mu(spec.params.mu);
    for &t in &spec.options.t_list {
        let tf = t as f64;
        if t == 0 {
            return Err(CliError::config("analytic: t must be positive"));
        }
        let chi = spec
            .options
            .lambda_grid
            .iter()
            .map(|&l| sep_cgf(l, tf, rl, rr))
            .collect::<chargefcs_core::Result<Vec<_>>>()?;
        push_chi(&mut table, |q, v| row(q, v).t(t), &spec.options.lambda_grid, &chi, "chi");
        for order in 1..=4 {
            table.push(row(&format!("c{order}"), sep_cumulant(order, tf, rl, rr)?).t(t));
        }
        if spec.params.mu.0 == ChemicalPotential::ZERO {
            table.push(row("kurtosis_excess", kurtosis_prediction(tf)?).t(t));
        }
        for &d in &spec.options.d_list {
            table.push(row("spinwave_dc2", spinwave_dc2(spec.params.mu.0, tf, d)?).t(t).d(d));
            if let ChemicalPotential::Finite(_) = spec.params.mu.0 {
                table.push(row("spinwave_dc3", spinwave_dc3(spec.params.mu.0, tf, d)?).t(t).d(d));
            }
        }
    }
    Ok(table)
}

/// SEP histogram of the trajectories in `range`, merged in chunk order.
pub fn sep_histogram(pool: &Pool, params: &ModelParams, range: Range<u64>) -> CliResult<Histogram> {
    let start = range.start;
    let parts = pool.map_chunks(range.end - start, CHUNK, |r| run_sep_range(params, r.start + start..r.end + start));
    let mut hist = Histogram::new();
    for p in parts {
        hist.merge(&p?);
    }
    Ok(hist)
}

/// Sample indices of batch `b` out of `nb` over `0..n`.
pub fn batch_range(n: u64, nb: usize, b: usize) -> Range<u64> {
    let nb = nb as u64;
    let b = b as u64;
    (n * b / nb)..(n * (b + 1) / nb)
}

fn sep_mc(spec: &ExperimentSpec, pool: &Pool) -> CliResult<Table> {
    let o = &spec.options;
    let mut table = Table::new();
    for &t in &o.t_list {
        let params = ModelParams { t, ..spec.params.model() };
        let batches = (0..o.n_batches)
            .map(|b| sep_histogram(pool, &params, batch_range(o.n_samples, o.n_batches, b)))
            .collect::<CliResult<Vec<_>>>()?;
        let mut hist = Histogram::new();
        for b in &batches {
            hist.merge(b);
        }
        let row = |q: &str, v: f64| base(spec, q, v).t(t);
        for c in cumulants_from_histogram(&hist, 4, o.n_bootstrap, params.seed)? {
            table.push(row(&format!("c{}", c.order), c.value).stderr(c.stderr));
        }
        let chi = log_unwrapped(&o.lambda_grid, &hist.empirical_cgf(&o.lambda_grid));
        push_chi(&mut table, row, &o.lambda_grid, &chi, "chi");
        if o.n_batches >= 2 {
            let k = kurtosis_proxy(&batches)?;
            let s = (t as f64).sqrt();
            table.push(row("kurtosis_proxy", k.value).stderr(k.stderr));
            table.push(row("kurtosis_excess_scaled", (k.value - 3.0) * s).stderr(k.stderr * s));
        }
    }
    Ok(table)
}

fn sep_exact(spec: &ExperimentSpec) -> CliResult<Table> {
    let o = &spec.options;
    let params = ModelParams { t: max_t(spec), ..spec.params.model() };
    let cumulants = exact_sep_cumulants_by_time(&params)?;
    let z_by_lambda = o
        .lambda_grid
        .iter()
        .map(|&l| exact_sep_cgf_by_time(&params, l))
        .collect::<chargefcs_core::Result<Vec<_>>>()?;
    let mut table = Table::new();
    for &t in &o.t_list {
        let row = |q: &str, v: f64| base(spec, q, v).t(t);
        for (k, c) in cumulants[t].iter().enumerate() {
            table.push(row(&format!("c{}", k + 1), *c));
        }
        let z: Vec<Complex64> = z_by_lambda.iter().map(|zs| zs[t]).collect();
        push_chi(&mut table, row, &o.lambda_grid, &log_unwrapped(&o.lambda_grid, &z), "chi");
    }
    Ok(table)
}

/// Joint ladder histogram over `0..n`, merged in chunk order.
pub fn coupled_histogram(pool: &Pool, params: &ModelParams, a: f64, n: u64) -> CliResult<JointHistogram> {
    let gate = build_pair_gate(params.n_chains, a)?;
    let parts = pool.map_chunks(n, CHUNK, |r| coupled_mc_range_with_gate(params, &gate, r));
    let mut hist = JointHistogram::new(params.n_chains);
    for p in parts {
        hist.merge(&p?);
    }
    Ok(hist)
}

fn coupled_mc(spec: &ExperimentSpec, pool: &Pool) -> CliResult<Table> {
    let o = &spec.options;
    let mut table = Table::new();
    for &d in &o.d_list {
        let a = coupling(spec, d)?;
        for &t in &o.t_list {
            let params = ModelParams { t, d, ..spec.params.model() };
            let h = coupled_histogram(pool, &params, a, o.n_samples)?;
            let row = |q: &str, v: f64| d_label(spec, base(spec, q, v).t(t), d);
            let m = h.marginal(0).moments()?;
            table.push(row("c1", m.mean));
            table.push(row("c2", m.mu2));
            if params.n_chains == 2 {
                let (c2bar, se) = mean_stderr(&h.samples_of(|q| 0.5 * (q[0] * q[0] + q[1] * q[1]) as f64 - (q[0] * q[1]) as f64));
                let (_, se_cov) = mean_stderr(&h.samples_of(|q| (q[0] * q[1]) as f64));
                let var = 0.5 * (h.marginal(0).moments()?.mu2 + h.marginal(1).moments()?.mu2);
                table.push(row("c2bar", c2bar).stderr(se));
                table.push(row("delta_c2", var - c2bar).stderr(se_cov));
            } else {
                let f = |q: &[i64; 3]| {
                    let (x, y, z) = (q[0] as f64, q[1] as f64, q[2] as f64);
                    x * x * x - 3.0 * x * x * y + 2.0 * x * y * z
                };
                let (c3bar, se) = mean_stderr(&h.samples_of(f));
                table.push(row("c3bar", c3bar).stderr(se));
                table.push(row("delta_c3", m.cumulant(3) - c3bar).stderr(se));
            }
        }
    }
    Ok(table)
}

fn coupled_exact(spec: &ExperimentSpec) -> CliResult<Table> {
    let o = &spec.options;
    let mut table = Table::new();
    for &d in &o.d_list {
        let a = coupling(spec, d)?;
        let params = ModelParams { t: max_t(spec), d, ..spec.params.model() };
        let gate = build_pair_gate(params.n_chains, a)?;
        let moments = exact_joint_moments_with_gate(&params, &gate)?;
        for &t in &o.t_list {
            let row = |q: &str, v: f64| d_label(spec, base(spec, q, v).t(t), d);
            let jm = &moments[t];
            let c = jm.marginal_cumulants(0);
            table.push(row("c1", c[0]));
            table.push(row("c2", c[1]));
            if params.n_chains == 2 {
                table.push(row("c2bar", jm.c2bar()));
                table.push(row("delta_c2", c[1] - jm.c2bar()));
            } else {
                table.push(row("c3bar", jm.c3bar()));
                table.push(row("delta_c3", c[2] - jm.c3bar()));
                table.push(row("delta_c3_scaled", (c[2] - jm.c3bar()) / a));
            }
        }
    }
    Ok(table)
}

fn magnon_discrete(spec: &ExperimentSpec) -> CliResult<Table> {
    let o = &spec.options;
    let th2 = spec.params.mu.0.tanh_half().powi(2);
    let mut table = Table::new();
    for &d in &o.d_list {
        let a = coupling(spec, d)?;
        let m = m_of_t_discrete_series(spec.params.l, max_t(spec), a)?;
        for &t in &o.t_list {
            let row = |q: &str, v: f64| d_label(spec, base(spec, q, v).t(t), d);
            table.push(row("m", m[t]));
            table.push(row("delta_c2", th2 * m[t]));
            table.push(row("delta_c2_scaled", th2 * m[t] * (t as f64).sqrt() / a));
        }
    }
    Ok(table)
}

fn magnon_hamiltonian(spec: &ExperimentSpec, pool: &Pool) -> CliResult<Table> {
    let o = &spec.options;
    let th2 = spec.params.mu.0.tanh_half().powi(2);
    let times: Vec<f64> = o.t_list.iter().map(|&t| t as f64).collect();
    let l = spec.params.l;
    let series = pool.try_map(o.d_list.clone(), |d| {
        let a = coupling(spec, d)?;
        Ok((d, a, m_of_t_hamiltonian_series(l, &times, a, &hamiltonian_ode_options())?))
    })?;
    let mut table = Table::new();
    for (d, a, m) in series {
        for (&t, &mt) in o.t_list.iter().zip(&m) {
            let row = |q: &str, v: f64| d_label(spec, base(spec, q, v).t(t), d);
            table.push(row("m", mt));
            table.push(row("m_scaled", mt * 16.0 * (PI * t as f64).sqrt() / a));
            table.push(row("delta_c2", th2 * mt));
        }
    }
    Ok(table)
}

/// Haar average of the paired elements over `n` draws, merged in chunk order.
pub fn haar_estimate(pool: &Pool, d: usize, n: u64, seed: u64) -> CliResult<HaarEstimate> {
    if n < 2 {
        return Err(CliError::config("replica-check: n_samples must be at least 2"));
    }
    let parts = pool.map_chunks(n, 256, |r| haar_mc_range(d, seed, r));
    let mut acc = HaarAccumulator::new();
    for p in &parts {
        acc.merge(p);
    }
    Ok(acc.finish())
}

/// Largest `|haar - weingarten| / stderr` and largest absolute difference.
/// Elements with zero spread count as infinitely many errors unless they agree to 1e-12.
pub fn haar_agreement(est: &HaarEstimate, d: u32) -> CliResult<(f64, f64)> {
    let wg = averaged_gate_paired(d)?;
    let (mut z, mut dev) = (0.0f64, 0.0f64);
    for (o, row) in wg.iter().enumerate() {
        for (i, &w) in row.iter().enumerate() {
            let diff = (est.mean[o][i] - w).abs();
            dev = dev.max(diff);
            let se = est.stderr[o][i];
            z = z.max(if se > 0.0 {
                diff / se
            } else if diff < 1e-12 {
                0.0
            } else {
                f64::INFINITY
            });
        }
    }
    Ok((z, dev))
}

fn replica_check(spec: &ExperimentSpec, pool: &Pool) -> CliResult<Table> {
    let o = &spec.options;
    let mut table = Table::new();
    for &df in &o.d_list {
        let d = df as u32;
        let row = |q: &str, v: f64| Row::new(spec.engine.name(), q, v).d(df);
        let est = haar_estimate(pool, d as usize, o.n_samples, spec.params.seed)?;
        let (z, dev) = haar_agreement(&est, d)?;
        table.push(row("haar_max_z", z));
        table.push(row("haar_max_abs_dev", dev));
        if d >= 2 {
            table.push(row("a", a_of_d(df)?));
            table.push(row("singlet_element", singlet_element(d)?));
            table.push(row("projected_gate_deviation", projected_gate_deviation(d)?));
        }
    }
    Ok(table)
}

/// Domain-wall CGFs of circuits `0..n` on `lambdas` at every time in `t_list`.
pub fn quantum_ensemble(
    pool: &Pool,
    l: usize,
    seed: u64,
    n: usize,
    lambdas: &[f64],
    t_list: &[usize],
) -> CliResult<Vec<Vec<CGFGrid>>> {
    let depth = t_list.iter().copied().max().unwrap_or(0);
    let (basis, _) = domain_wall_sector(l)?;
    pool.try_map((0..n as u64).collect(), |i| {
        let c = Circuit::sample(l, depth, seed, i)?;
        Ok(cgf_pure(&c, &basis, lambdas, t_list)?)
    })
}

fn mixed_ensemble(spec: &ExperimentSpec, pool: &Pool) -> CliResult<Vec<Vec<CGFGrid>>> {
    let o = &spec.options;
    let p = &spec.params;
    let depth = max_t(spec);
    pool.try_map((0..o.n_circuits as u64).collect(), |i| {
        let c = Circuit::sample(p.l, depth, p.seed, i)?;
        o.t_list
            .iter()
            .map(|&t| {
                let z = o
                    .lambda_grid
                    .iter()
                    .map(|&lam| cgf_mixed_equilibrium(&c, lam, t, o.n_probes).map(|m| m.z))
                    .collect::<chargefcs_core::Result<Vec<_>>>()?;
                Ok(CGFGrid {
                    t,
                    lambdas: o.lambda_grid.clone(),
                    chi: log_unwrapped(&o.lambda_grid, &z),
                    z,
                })
            })
            .collect()
    })
}

fn quantum_cgf(spec: &ExperimentSpec, pool: &Pool) -> CliResult<Table> {
    let o = &spec.options;
    let p = &spec.params;
    let ens = if p.mu == Mu::INF {
        quantum_ensemble(pool, p.l, p.seed, o.n_circuits, &o.lambda_grid, &o.t_list)?
    } else {
        mixed_ensemble(spec, pool)?
    };
    let (rl, rr) = densities(p.mu.0);
    let mut table = Table::new();
    for (k, &t) in o.t_list.iter().enumerate() {
        let row = |q: &str, v: f64| base(spec, q, v).t(t).d(1.0);
        for (i, grids) in ens.iter().enumerate() {
            push_chi(&mut table, |q, v| row(q, v).sample(i as u64), &o.lambda_grid, &grids[k].chi, "chi");
        }
        for (j, &lam) in o.lambda_grid.iter().enumerate() {
            let re: Vec<f64> = ens.iter().map(|g| g[k].chi[j].re).collect();
            let im: Vec<f64> = ens.iter().map(|g| g[k].chi[j].im).collect();
            let (mr, sr) = mean_stderr(&re);
            let (mi, si) = mean_stderr(&im);
            table.push(row("chi_mean_re", mr).lambda(lam).stderr(sr));
            table.push(row("chi_mean_im", mi).lambda(lam).stderr(si));
            if t > 0 {
                let s = sep_cgf(lam, t as f64, rl, rr)?;
                table.push(Row::new("analytic", "chi_sep_re", s.re).mu(p.mu).t(t).lambda(lam));
                table.push(Row::new("analytic", "chi_sep_im", s.im).mu(p.mu).t(t).lambda(lam));
            }
        }
    }
    Ok(table)
}

fn quantum_fluct(spec: &ExperimentSpec, pool: &Pool) -> CliResult<Table> {
    let o = &spec.options;
    let p = &spec.params;
    let ens = quantum_ensemble(pool, p.l, p.seed, o.n_circuits, &o.lambda_grid, &o.t_list)?;
    let f = fluctuation_decay(&ens, &o.t_list)?;
    let mut table = Table::new();
    for (k, &t) in o.t_list.iter().enumerate() {
        table.push(base(spec, "deviation", f.deviation[k]).t(t).d(1.0));
        table.push(base(spec, "spread", f.spread[k]).t(t).d(1.0));
    }
    table.push(base(spec, "slope", f.slope).d(1.0));
    Ok(table)
}

/// Quantities each engine emits, with a one-line meaning.
pub fn quantities(engine: EngineKind) -> &'static [(&'static str, &'static str)] {
    use EngineKind::*;
    match engine {
        Analytic => &[
            ("chi_re, chi_im", "SEP generating function log<e^{i lambda Q}> at (t, lambda)"),
            ("c1..c4", "SEP cumulants at t"),
            ("kurtosis_excess", "predicted excess kurtosis at half filling (mu = 0 only)"),
            ("spinwave_dc2", "variance reduction a tanh^2(mu/2) / (16 sqrt(pi t)) per d"),
            ("spinwave_dc3", "linear-response third-cumulant correction per d (finite mu)"),
        ],
        SepMc => &[
            ("c1..c4", "sample cumulants; stderr from the bootstrap"),
            ("chi_re, chi_im", "empirical generating function, phase unwrapped along lambda"),
            ("kurtosis_proxy", "mean(mu_4) / mean(mu_2^2) over batches; jackknife stderr (n_batches >= 2)"),
            ("kurtosis_excess_scaled", "(kurtosis_proxy - 3) sqrt(t)"),
        ],
        SepExact => &[
            ("c1..c4", "exact cumulants of the discrete-time process"),
            ("chi_re, chi_im", "exact generating function"),
        ],
        CoupledMc => &[
            ("c1, c2", "single-chain cumulants"),
            ("c2bar", "E[Q1^2] - E[Q1 Q2] (two chains)"),
            ("delta_c2", "single-chain variance minus c2bar (two chains)"),
            ("c3bar", "E[Q1^3] - 3E[Q1^2 Q2] + 2E[Q1 Q2 Q3] (three chains)"),
            ("delta_c3", "single-chain third cumulant minus c3bar (three chains)"),
        ],
        CoupledExact => &[
            ("c1, c2", "single-chain cumulants"),
            ("c2bar, delta_c2", "as for coupled-mc, exact (two chains)"),
            ("c3bar, delta_c3", "as for coupled-mc, exact (three chains)"),
            ("delta_c3_scaled", "delta_c3 / a (three chains)"),
        ],
        MagnonDiscrete => &[
            ("m", "two-magnon overlap M(t) of the discrete ladder"),
            ("delta_c2", "tanh^2(mu/2) M(t)"),
            ("delta_c2_scaled", "delta_c2 sqrt(t) / a"),
        ],
        MagnonHamiltonian => &[
            ("m", "two-magnon overlap M_H(t) of the continuous-time model"),
            ("m_scaled", "M_H(t) 16 sqrt(pi t) / a"),
            ("delta_c2", "tanh^2(mu/2) M_H(t)"),
        ],
        ReplicaCheck => &[
            ("haar_max_z", "largest |Haar - Weingarten| / stderr over the paired elements"),
            ("haar_max_abs_dev", "largest |Haar - Weingarten|"),
            ("a", "a(d) = 1 / (4 d^4 - 1) (d >= 2)"),
            ("singlet_element", "singlet diagonal element of the averaged gate (d >= 2)"),
            ("projected_gate_deviation", "max |averaged gate - identity-projected gate| (d >= 2)"),
        ],
        QuantumCgf => &[
            ("chi_re, chi_im", "per-circuit generating function; sample = circuit index"),
            ("chi_mean_re, chi_mean_im", "circuit mean with stderr"),
            ("chi_sep_re, chi_sep_im", "analytic SEP overlay (engine = analytic)"),
        ],
        QuantumFluct => &[
            ("deviation", "circuit mean of the lambda-integral of |chi - chi_SEP|^2 / t"),
            ("spread", "circuit mean of the lambda-integral of |chi - mean chi|^2 / t"),
            ("slope", "log-log slope of deviation against t"),
        ],
    }
}
