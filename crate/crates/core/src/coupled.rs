//! The interacting ladder of `n` exclusion chains that describes `n` replicas at
//! large qudit dimension.
//!
//! On a bond the chains are updated jointly by
//! `G = prod_a K_a + a(d) sum_{a<b} P_a P_b prod_{c != a,b} K_c`, where `K` is the
//! single-chain half-swap and `P = 1 - K` the projector onto the antisymmetric
//! window state. Every chain's marginal is exactly the exclusion-process gate.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use num_complex::Complex64;
use rand::Rng;

use crate::exact::{product_distribution, totals_by_time, window_delta, ComplexTilt, JetTilt, WindowGate};
use crate::jet::JetLayout;
use crate::params::ModelParams;
use crate::rng::{stream, EngineId};
use crate::sep::Parity;
use crate::state::{sample_initial_state, BitRow};
use crate::stats::{cumulants_from_raw, Histogram};
use crate::{Error, Result};

/// `K` on one chain's window code (bit 0: site `x`, bit 1: site `x + 1`).
const K: [[f64; 4]; 4] = [
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 0.5, 0.5, 0.0],
    [0.0, 0.5, 0.5, 0.0],
    [0.0, 0.0, 0.0, 1.0],
];
/// `P = 1 - K`.
const P: [[f64; 4]; 4] = [
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 0.5, -0.5, 0.0],
    [0.0, -0.5, 0.5, 0.0],
    [0.0, 0.0, 0.0, 0.0],
];

/// Stochastic two-site gate of the `n`-chain ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct PairGateTable {
    n_chains: usize,
    a: f64,
    /// `matrix[out][in]`, both window codes.
    matrix: Vec<Vec<f64>>,
    gate: WindowGate,
}

fn chain_code(code: usize, chain: usize) -> usize {
    (code >> (2 * chain)) & 3
}

/// Builds the gate for 1 to 3 chains (one chain gives the plain exclusion gate).
pub fn build_pair_gate(n_chains: usize, a: f64) -> Result<PairGateTable> {
    if !(1..=3).contains(&n_chains) {
        return Err(Error::invalid("n_chains", "must be 1, 2 or 3"));
    }
    if !(0.0..1.0).contains(&a) {
        return Err(Error::invalid("a", "coupling must lie in [0, 1)"));
    }
    let dim = 1usize << (2 * n_chains);
    let mut matrix = vec![vec![0.0; dim]; dim];
    for (out, row) in matrix.iter_mut().enumerate() {
        for (inp, entry) in row.iter_mut().enumerate() {
            let k = |c: usize| K[chain_code(out, c)][chain_code(inp, c)];
            let p = |c: usize| P[chain_code(out, c)][chain_code(inp, c)];
            let mut v: f64 = (0..n_chains).map(k).product();
            for x in 0..n_chains {
                for y in x + 1..n_chains {
                    let rest: f64 = (0..n_chains).filter(|&c| c != x && c != y).map(k).product();
                    v += a * p(x) * p(y) * rest;
                }
            }
            // Exact zeros stay zero; tiny negative roundoff cannot occur since the
            // nonzero entries are multiples of 1/2^n times (1 +- a) factors.
            *entry = v;
        }
    }
    let mut rows = vec![Vec::new(); dim];
    for (inp, r) in rows.iter_mut().enumerate() {
        for (out, m) in matrix.iter().enumerate() {
            let v = m[inp];
            if v < 0.0 {
                return Err(Error::invalid("a", "gate table has a negative entry"));
            }
            if v > 0.0 {
                r.push((out as u16, v));
            }
        }
    }
    Ok(PairGateTable {
        n_chains,
        a,
        matrix,
        gate: WindowGate::new(n_chains, rows)?,
    })
}

impl PairGateTable {
    pub fn n_chains(&self) -> usize {
        self.n_chains
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// Probability of `input -> output` (window codes).
    pub fn probability(&self, input: usize, output: usize) -> f64 {
        self.matrix[output][input]
    }

    pub fn window_gate(&self) -> &WindowGate {
        &self.gate
    }

    /// The single-chain transition matrix `[out][in]` seen by `chain`, obtained by
    /// summing out the other chains' outputs for a fixed input of theirs.
    pub fn marginal(&self, chain: usize, others_input: usize) -> [[f64; 4]; 4] {
        let mut m = [[0.0; 4]; 4];
        let dim = self.matrix.len();
        for ci in 0..4 {
            let mut inp = others_input & !(3 << (2 * chain));
            inp |= ci << (2 * chain);
            for out in 0..dim {
                m[chain_code(out, chain)][ci] += self.matrix[out][inp];
            }
        }
        m
    }
}

/// Joint histogram of per-chain transfers.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct JointHistogram {
    pub n_chains: usize,
    pub counts: BTreeMap<[i64; 3], u64>,
    pub n_samples: u64,
}

impl JointHistogram {
    pub fn new(n_chains: usize) -> Self {
        JointHistogram {
            n_chains,
            ..Default::default()
        }
    }

    pub fn add(&mut self, q: [i64; 3]) {
        *self.counts.entry(q).or_insert(0) += 1;
        self.n_samples += 1;
    }

    pub fn merge(&mut self, other: &JointHistogram) {
        for (k, v) in &other.counts {
            *self.counts.entry(*k).or_insert(0) += v;
        }
        self.n_samples += other.n_samples;
    }

    pub fn marginal(&self, chain: usize) -> Histogram {
        Histogram::from_counts(self.counts.iter().map(|(q, &c)| (q[chain], c)))
    }

    /// Sample mean of `prod_a Q_a^{e_a}`.
    pub fn raw_moment(&self, exps: [u8; 3]) -> f64 {
        let n = self.n_samples as f64;
        self.counts
            .iter()
            .map(|(q, &c)| {
                let v: f64 = (0..3).map(|a| (q[a] as f64).powi(exps[a] as i32)).product();
                v * c as f64
            })
            .sum::<f64>()
            / n
    }

    /// Per-sample values of `f(Q)`, each repeated by its count.
    pub fn samples_of(&self, f: impl Fn(&[i64; 3]) -> f64) -> Vec<f64> {
        self.counts
            .iter()
            .flat_map(|(q, &c)| core::iter::repeat_n(f(q), c as usize))
            .collect()
    }

    /// `<exp(i lambda . Q)>`.
    pub fn empirical_mgf(&self, lambdas: &[f64]) -> Complex64 {
        let n = self.n_samples as f64;
        self.counts
            .iter()
            .map(|(q, &c)| {
                let ph: f64 = lambdas.iter().zip(q).map(|(l, &x)| l * x as f64).sum();
                Complex64::from_polar(c as f64 / n, ph)
            })
            .sum()
    }

    /// Symmetrised estimate of `C2bar = E[Q1^2] - E[Q1 Q2]` over chain pairs.
    pub fn c2bar(&self) -> f64 {
        let s = [[2, 0, 0], [0, 2, 0]].map(|e| self.raw_moment(e));
        (s[0] + s[1]) / 2.0 - self.raw_moment([1, 1, 0])
    }
}

fn window_code(chains: &[BitRow], x: usize) -> usize {
    chains
        .iter()
        .enumerate()
        .map(|(a, r)| ((r.get(x) as usize) | ((r.get(x + 1) as usize) << 1)) << (2 * a))
        .sum()
}

fn write_window(chains: &mut [BitRow], x: usize, code: usize) {
    for (a, r) in chains.iter_mut().enumerate() {
        let c = chain_code(code, a);
        r.set(x, c & 1 == 1);
        r.set(x + 1, c & 2 == 2);
    }
}

/// One layer of the ladder; per-chain central transfers are added to `q`.
pub fn ladder_layer<R: Rng + ?Sized>(
    chains: &mut [BitRow],
    gate: &PairGateTable,
    parity: Parity,
    central: usize,
    rng: &mut R,
    q: &mut [i64; 3],
) {
    let l = chains[0].len();
    let start = match parity {
        Parity::Even => 0,
        Parity::Odd => 1,
    };
    for x in (start..l.saturating_sub(1)).step_by(2) {
        let code = window_code(chains, x);
        let row = gate.gate.row(code);
        if row.len() == 1 {
            continue;
        }
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut out = row[row.len() - 1].0 as usize;
        for &(o, p) in row {
            acc += p;
            if u < acc {
                out = o as usize;
                break;
            }
        }
        if out != code {
            write_window(chains, x, out);
            if x == central {
                for (a, qa) in q.iter_mut().enumerate().take(gate.n_chains) {
                    *qa += window_delta(code, out, a) as i64;
                }
            }
        }
    }
}

/// Per-chain transfers of trajectory `index`.
pub fn coupled_trajectory(params: &ModelParams, gate: &PairGateTable, index: u64) -> [i64; 3] {
    let mut rng = stream(params.seed, EngineId::CoupledMc, index);
    let mut chains: Vec<BitRow> = (0..params.n_chains)
        .map(|c| sample_initial_state(params, c, &mut rng))
        .collect();
    let central = params.central_site();
    let mut q = [0i64; 3];
    for _ in 0..params.t {
        ladder_layer(&mut chains, gate, Parity::Even, central, &mut rng, &mut q);
        ladder_layer(&mut chains, gate, Parity::Odd, central, &mut rng, &mut q);
    }
    q
}

fn gate_for(params: &ModelParams) -> Result<PairGateTable> {
    params.validate()?;
    build_pair_gate(params.n_chains, params.a()?)
}

/// Joint histogram of trajectories `range`, with the coupling `a(params.d)`.
pub fn coupled_mc_range(params: &ModelParams, range: Range<u64>) -> Result<JointHistogram> {
    let gate = gate_for(params)?;
    coupled_mc_range_with_gate(params, &gate, range)
}

/// As [`coupled_mc_range`] with an explicit gate (e.g. a coupling not of the form `a(d)`).
pub fn coupled_mc_range_with_gate(params: &ModelParams, gate: &PairGateTable, range: Range<u64>) -> Result<JointHistogram> {
    if gate.n_chains != params.n_chains {
        return Err(Error::invalid("n_chains", "gate and parameters disagree"));
    }
    let mut h = JointHistogram::new(params.n_chains);
    for i in range {
        h.add(coupled_trajectory(params, gate, i));
    }
    Ok(h)
}

/// `n_samples` trajectories, single-threaded.
pub fn coupled_mc_run(params: &ModelParams, n_samples: u64) -> Result<JointHistogram> {
    coupled_mc_range(params, 0..n_samples)
}

fn initial(params: &ModelParams) -> Result<Vec<f64>> {
    product_distribution(params.l, params.n_chains, |x| params.site_density(x))
}

/// `<exp(i sum_a lambda_a Q_a)>` after `0..=t` steps for an explicit gate.
pub fn exact_coupled_mgf_by_time(params: &ModelParams, gate: &PairGateTable, lambdas: &[f64]) -> Result<Vec<Complex64>> {
    params.validate()?;
    if lambdas.len() != params.n_chains || gate.n_chains != params.n_chains {
        return Err(Error::invalid("lambda", "need one counting field per chain"));
    }
    totals_by_time(
        &gate.gate,
        ComplexTilt::new(lambdas),
        params.l,
        params.central_site(),
        &initial(params)?,
        params.t,
    )
}

/// `Z(lambda) = <exp(i sum_a lambda_a Q_a)>` by exact tilted transfer.
pub fn exact_coupled_cgf(params: &ModelParams, lambdas: &[f64]) -> Result<Complex64> {
    let gate = gate_for(params)?;
    Ok(*exact_coupled_mgf_by_time(params, &gate, lambdas)?.last().expect("t + 1 entries"))
}

/// All joint raw moments of total degree at most four.
#[derive(Debug, Clone, PartialEq)]
pub struct JointMoments {
    pub n_chains: usize,
    pub raw: BTreeMap<[u8; 3], f64>,
}

impl JointMoments {
    pub fn raw(&self, exps: [u8; 3]) -> f64 {
        self.raw.get(&exps).copied().unwrap_or(f64::NAN)
    }

    /// `E[Q1^2] - E[Q1 Q2]`.
    pub fn c2bar(&self) -> f64 {
        self.raw([2, 0, 0]) - self.raw([1, 1, 0])
    }

    /// `E[Q^3] - 3 E[Q^2 Q'] + 2 E[Q Q' Q'']` (three chains).
    pub fn c3bar(&self) -> f64 {
        self.raw([3, 0, 0]) - 3.0 * self.raw([2, 1, 0]) + 2.0 * self.raw([1, 1, 1])
    }

    /// Cumulants of one chain's marginal.
    pub fn marginal_cumulants(&self, chain: usize) -> [f64; 4] {
        let raw = [1u8, 2, 3, 4].map(|k| {
            let mut e = [0u8; 3];
            e[chain] = k;
            self.raw(e)
        });
        cumulants_from_raw(raw)
    }
}

fn moments_from_jets<const J: usize>(params: &ModelParams, gate: &PairGateTable) -> Result<Vec<JointMoments>> {
    let tilt = JetTilt::<J>::new();
    let layout: JetLayout<J> = tilt.layout().clone();
    let jets = totals_by_time(
        &gate.gate,
        tilt,
        params.l,
        params.central_site(),
        &initial(params)?,
        params.t,
    )?;
    let n = params.n_chains;
    let mut monomials = Vec::new();
    for e0 in 0..=4u8 {
        for e1 in 0..=4 - e0 {
            for e2 in 0..=4 - e0 - e1 {
                let e = [e0, e1, e2];
                if e[n..].iter().all(|&v| v == 0) {
                    monomials.push(e);
                }
            }
        }
    }
    Ok(jets
        .iter()
        .map(|j| JointMoments {
            n_chains: n,
            raw: monomials.iter().map(|&e| (e, layout.raw_moment(j, e))).collect(),
        })
        .collect())
}

/// Exact joint moments after each of `0..=t` steps, for an explicit gate.
pub fn exact_joint_moments_with_gate(params: &ModelParams, gate: &PairGateTable) -> Result<Vec<JointMoments>> {
    params.validate()?;
    if gate.n_chains != params.n_chains {
        return Err(Error::invalid("n_chains", "gate and parameters disagree"));
    }
    match params.n_chains {
        1 => moments_from_jets::<5>(params, gate),
        2 => moments_from_jets::<15>(params, gate),
        _ => moments_from_jets::<35>(params, gate),
    }
}

/// Exact joint moments after each of `0..=t` steps with coupling `a(params.d)`.
pub fn exact_joint_moments(params: &ModelParams) -> Result<Vec<JointMoments>> {
    let gate = gate_for(params)?;
    exact_joint_moments_with_gate(params, &gate)
}

/// How `c2bar` obtains the joint statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoupledEngine {
    MonteCarlo { n_samples: u64 },
    Exact,
}

/// Circuit-averaged variance `E[Q1^2] - E[Q1 Q2]` of the two-chain ladder.
pub fn c2bar(params: &ModelParams, engine: CoupledEngine) -> Result<f64> {
    if params.n_chains != 2 {
        return Err(Error::invalid("n_chains", "the variance combination needs two chains"));
    }
    match engine {
        CoupledEngine::MonteCarlo { n_samples } => Ok(coupled_mc_run(params, n_samples)?.c2bar()),
        CoupledEngine::Exact => Ok(exact_joint_moments(params)?.last().expect("t + 1 entries").c2bar()),
    }
}

/// Third-cumulant combination of the three-chain ladder.
pub fn c3bar(params: &ModelParams, engine: CoupledEngine) -> Result<f64> {
    if params.n_chains != 3 {
        return Err(Error::invalid("n_chains", "the third-cumulant combination needs three chains"));
    }
    match engine {
        CoupledEngine::MonteCarlo { n_samples } => {
            let h = coupled_mc_run(params, n_samples)?;
            Ok(h.raw_moment([3, 0, 0]) - 3.0 * h.raw_moment([2, 1, 0]) + 2.0 * h.raw_moment([1, 1, 1]))
        }
        CoupledEngine::Exact => Ok(exact_joint_moments(params)?.last().expect("t + 1 entries").c3bar()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ChemicalPotential;
    use crate::sep::{exact_sep_cgf, exact_sep_cumulants_by_time};
    use proptest::prelude::*;

    fn code2(c1: usize, c2: usize) -> usize {
        c1 | (c2 << 2)
    }

    #[test]
    fn two_chain_coupled_sector() {
        let a = 0.2;
        let g = build_pair_gate(2, a).unwrap();
        let (p, r) = ((1.0 + a) / 4.0, (1.0 - a) / 4.0);
        // Aligned input |10>|10>.
        let inp = code2(1, 1);
        assert!((g.probability(inp, code2(1, 1)) - p).abs() < 1e-15);
        assert!((g.probability(inp, code2(2, 2)) - p).abs() < 1e-15);
        assert!((g.probability(inp, code2(1, 2)) - r).abs() < 1e-15);
        assert!((g.probability(inp, code2(2, 1)) - r).abs() < 1e-15);
        // Anti-aligned input.
        let inp = code2(1, 2);
        assert!((g.probability(inp, code2(1, 2)) - p).abs() < 1e-15);
        assert!((g.probability(inp, code2(1, 1)) - r).abs() < 1e-15);
        // Frozen sectors.
        for (c1, c2) in [(0, 0), (3, 3), (0, 3), (3, 0)] {
            assert_eq!(g.probability(code2(c1, c2), code2(c1, c2)), 1.0);
        }
        // One movable chain hops with probability 1/2.
        assert_eq!(g.probability(code2(1, 3), code2(2, 3)), 0.5);
        assert_eq!(g.probability(code2(0, 2), code2(0, 1)), 0.5);
    }

    #[test]
    fn decoupled_gate_is_product() {
        let g = build_pair_gate(2, 0.0).unwrap();
        for i in 0..16 {
            for o in 0..16 {
                let prod = K[o & 3][i & 3] * K[o >> 2][i >> 2];
                assert_eq!(g.probability(i, o), prod);
            }
        }
    }

    #[test]
    fn three_chain_entries() {
        let a = 0.3;
        let g = build_pair_gate(3, a).unwrap();
        let i = 1 | (1 << 2) | (1 << 4);
        for o in 0..64 {
            let v = g.probability(i, o);
            let movable = (0..3).all(|c| matches!(chain_code(o, c), 1 | 2));
            if movable {
                assert!(
                    (v - (1.0 + 3.0 * a) / 8.0).abs() < 1e-15 || (v - (1.0 - a) / 8.0).abs() < 1e-15,
                    "{o}: {v}"
                );
            } else {
                assert_eq!(v, 0.0);
            }
        }
        assert!(build_pair_gate(2, 1.0).is_err());
        assert!(build_pair_gate(4, 0.1).is_err());
    }

    proptest! {
        #[test]
        fn stochastic_with_sep_marginals(a in 0.0f64..0.999, n in 2usize..=3, others in 0usize..64) {
            let g = build_pair_gate(n, a).unwrap();
            let dim = 1usize << (2 * n);
            for inp in 0..dim {
                let s: f64 = (0..dim).map(|o| g.probability(inp, o)).sum();
                prop_assert!((s - 1.0).abs() < 1e-14);
                for o in 0..dim {
                    prop_assert!(g.probability(inp, o) >= 0.0);
                    // Per-chain window charge is conserved.
                    for c in 0..n {
                        let qi = chain_code(inp, c).count_ones();
                        let qo = chain_code(o, c).count_ones();
                        if g.probability(inp, o) > 0.0 {
                            prop_assert_eq!(qi, qo);
                        }
                    }
                }
            }
            for c in 0..n {
                let m = g.marginal(c, others % dim);
                for (x, y) in m.iter().flatten().zip(K.iter().flatten()) {
                    prop_assert!((x - y).abs() < 1e-14);
                }
            }
        }

        #[test]
        fn chain_permutation_and_reflection(a in 0.0f64..0.999) {
            let g = build_pair_gate(2, a).unwrap();
            let swap = |c: usize| (c >> 2) | ((c & 3) << 2);
            let reflect1 = |c: usize| match c { 1 => 2, 2 => 1, x => x };
            let reflect = |c: usize| reflect1(c & 3) | (reflect1(c >> 2) << 2);
            for i in 0..16 {
                for o in 0..16 {
                    prop_assert_eq!(g.probability(i, o), g.probability(swap(i), swap(o)));
                    prop_assert!((g.probability(i, o) - g.probability(reflect(i), reflect(o))).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn exact_factorises_without_coupling() {
        let params = ModelParams::new(6, 3, ChemicalPotential::Finite(0.7)).with_chains(2);
        let gate = build_pair_gate(2, 0.0).unwrap();
        let (l1, l2) = (0.4, -1.1);
        let z = *exact_coupled_mgf_by_time(&params, &gate, &[l1, l2]).unwrap().last().unwrap();
        let single = ModelParams::new(6, 3, ChemicalPotential::Finite(0.7));
        let z1 = exact_sep_cgf(&single, l1).unwrap();
        let z2 = exact_sep_cgf(&single, l2).unwrap();
        assert!((z - z1 * z2).norm() < 1e-14);
        let z0 = exact_coupled_cgf(&params.with_d(2.0), &[0.0, 0.0]).unwrap();
        assert!((z0 - 1.0).norm() < 1e-14);
    }

    #[test]
    fn exact_marginals_are_sep() {
        let params = ModelParams::new(6, 4, ChemicalPotential::Finite(2.0)).with_chains(2).with_d(1.2);
        let joint = exact_joint_moments(&params).unwrap();
        let sep = exact_sep_cumulants_by_time(&ModelParams::new(6, 4, ChemicalPotential::Finite(2.0))).unwrap();
        for (j, s) in joint.iter().zip(&sep) {
            let m = j.marginal_cumulants(1);
            for k in 0..4 {
                assert!((m[k] - s[k]).abs() < 1e-12);
            }
        }
        assert_eq!(joint[0].c2bar(), 0.0);
    }

    #[test]
    fn jets_agree_with_tilted_differences() {
        // Mixed second derivative of the complex tilt against E[Q1 Q2].
        let params = ModelParams::new(6, 3, ChemicalPotential::PlusInfinity).with_chains(2);
        let gate = build_pair_gate(2, 0.3).unwrap();
        let joint = exact_joint_moments_with_gate(&params, &gate).unwrap();
        let h = 1e-3;
        let z = |a: f64, b: f64| *exact_coupled_mgf_by_time(&params, &gate, &[a, b]).unwrap().last().unwrap();
        let mixed = (z(h, h) - z(h, -h) - z(-h, h) + z(-h, -h)) / (4.0 * h * h);
        assert!((-mixed.re - joint[3].raw([1, 1, 0])).abs() < 1e-5);
    }

    #[test]
    fn mc_matches_exact_joint_mgf() {
        let params = ModelParams::new(8, 6, ChemicalPotential::PlusInfinity)
            .with_chains(2)
            .with_seed(5);
        let a = 0.1;
        let gate = build_pair_gate(2, a).unwrap();
        let n = 20_000u64;
        let h = coupled_mc_range_with_gate(&params, &gate, 0..n).unwrap();
        for lam in [[0.5, -0.3], [1.0, 1.0], [-2.0, 0.7]] {
            let exact = *exact_coupled_mgf_by_time(&params, &gate, &lam).unwrap().last().unwrap();
            let emp = h.empirical_mgf(&lam);
            assert!((exact - emp).norm() < 5.0 / (n as f64).sqrt(), "{lam:?}: {exact} vs {emp}");
        }
    }

    #[test]
    fn uncoupled_chains_have_no_covariance() {
        let params = ModelParams::new(16, 10, ChemicalPotential::ZERO).with_chains(2).with_seed(9);
        let gate = build_pair_gate(2, 0.0).unwrap();
        let h = coupled_mc_range_with_gate(&params, &gate, 0..20_000).unwrap();
        let prod = h.samples_of(|q| q[0] as f64 * q[1] as f64);
        let (m, se) = crate::stats::mean_stderr(&prod);
        assert!(m.abs() < 4.0 * se, "{m} +- {se}");
    }

    #[test]
    fn engine_arguments_checked() {
        let p = ModelParams::new(6, 2, ChemicalPotential::ZERO);
        assert!(c2bar(&p, CoupledEngine::Exact).is_err());
        assert_eq!(c2bar(&p.with_chains(2).with_d(3.0), CoupledEngine::Exact).map(|_| ()), Ok(()));
        assert!(c3bar(&p.with_chains(2), CoupledEngine::Exact).is_err());
        let t0 = ModelParams::new(6, 0, ChemicalPotential::ZERO).with_chains(2);
        assert_eq!(c2bar(&t0, CoupledEngine::Exact).unwrap(), 0.0);
    }
}
