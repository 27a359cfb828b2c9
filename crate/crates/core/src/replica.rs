//! The two-replica circuit-averaged two-site gate.
//!
//! A site carries a charge qubit and a neutral qudit of dimension `d`. On two sites
//! the charge configuration `r` (bit 0: left site, bit 1: right site) selects a
//! subspace `S_r` of dimension `d^2`; total charge `Q = 0, 1, 2` has dimension
//! `d^2, 2 d^2, d^2`. A paired state `(r1, r2; sigma)` is the operator
//! `(Pi_{r1} (x) Pi_{r2}) sigma` with `sigma` the identity or the swap of the two
//! replicas, normalised by `d^{-4}`. The averaged gate acts on these by
//! `O -> (U (x) U) O (U (x) U)^dagger`.
//!
//! Matrix elements are evaluated from traces rather than from explicit vectors in
//! the `(2d)^8`-dimensional replica space.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use num_complex::Complex64;

use crate::coupled::build_pair_gate;
use crate::linalg::{haar_unitary, CMatrix};
use crate::params::a_of_d;
use crate::rng::{stream, EngineId};
use crate::{Error, Result};

/// Number of paired basis states: 16 charge configurations times two pairings.
pub const PAIRED_DIM: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pairing {
    Identity,
    Swap,
}

/// Index of `(r1, r2; pairing)` in the paired basis.
pub fn paired_index(r1: usize, r2: usize, pairing: Pairing) -> usize {
    r1 + 4 * r2 + if pairing == Pairing::Swap { 16 } else { 0 }
}

fn decode(i: usize) -> (usize, usize, Pairing) {
    let p = if i >= 16 { Pairing::Swap } else { Pairing::Identity };
    (i & 3, (i >> 2) & 3, p)
}

fn charge(r: usize) -> usize {
    r.count_ones() as usize
}

fn sector_dim(q: usize, d: f64) -> f64 {
    if q == 1 {
        2.0 * d * d
    } else {
        d * d
    }
}

/// `W_{sigma,tau}(Q1, Q2)` for real `d >= 1`. Off-diagonal weights are undefined
/// where `d_Q = 1` (that is, `d = 1` with `Q1 = Q2` in `{0, 2}`) and are rejected.
pub fn weingarten_weight(sigma: Pairing, tau: Pairing, q1: usize, q2: usize, d: f64) -> Result<f64> {
    if q1 > 2 || q2 > 2 {
        return Err(Error::invalid("Q", "sector charge must be 0, 1 or 2"));
    }
    if !(d >= 1.0) || !d.is_finite() {
        return Err(Error::invalid("d", "qudit dimension must be at least 1"));
    }
    let (d1, d2) = (sector_dim(q1, d), sector_dim(q2, d));
    let same = q1 == q2;
    if same && d1 == 1.0 {
        return Err(Error::invalid("d", "Weingarten weights are singular for a one-dimensional sector"));
    }
    Ok(if sigma == tau {
        1.0 / (d1 * d2 - if same { 1.0 } else { 0.0 })
    } else if same {
        -1.0 / (d1 * (d1 * d1 - 1.0))
    } else {
        0.0
    })
}

/// Weights used to assemble the operator. For a one-dimensional sector both
/// pairings give the same state, and the projector onto it needs the weights to
/// sum to one; we put the whole weight on `(identity, identity)`.
fn assembly_weight(sigma: Pairing, tau: Pairing, q1: usize, q2: usize, d: f64) -> f64 {
    if q1 == q2 && sector_dim(q1, d) == 1.0 {
        return if sigma == Pairing::Identity && tau == Pairing::Identity { 1.0 } else { 0.0 };
    }
    weingarten_weight(sigma, tau, q1, q2, d).expect("nonsingular sector")
}

/// `Tr[O_{(r1,r2;p)}^dagger O_{(Q1,Q2;s)}]` between a configuration state and a
/// sector state.
fn overlap(r1: usize, r2: usize, p: Pairing, q1: usize, q2: usize, s: Pairing, d: f64) -> f64 {
    if charge(r1) != q1 || charge(r2) != q2 {
        return 0.0;
    }
    let d2 = d * d;
    if p == s {
        d2 * d2
    } else if r1 == r2 {
        d2
    } else {
        0.0
    }
}

/// Dense 32 x 32 real matrix, `m[out][in]`.
pub type PairedMatrix = Vec<[f64; PAIRED_DIM]>;

fn paired_zeros() -> PairedMatrix {
    vec![[0.0; PAIRED_DIM]; PAIRED_DIM]
}

/// The averaged gate between normalised paired states, from the Weingarten
/// expansion `sum W_{sigma,tau}(Q) |Q; sigma><Q; tau|`.
pub fn averaged_gate_paired(d: u32) -> Result<PairedMatrix> {
    if d == 0 {
        return Err(Error::invalid("d", "qudit dimension must be a positive integer"));
    }
    Ok(averaged_gate_real(d as f64))
}

fn averaged_gate_real(d: f64) -> PairedMatrix {
    let norm = d.powi(4);
    let pairings = [Pairing::Identity, Pairing::Swap];
    let mut m = paired_zeros();
    for (o, row) in m.iter_mut().enumerate() {
        let (ro1, ro2, po) = decode(o);
        for (i, entry) in row.iter_mut().enumerate() {
            let (ri1, ri2, pi) = decode(i);
            // Replica charges are conserved by construction.
            let (q1, q2) = (charge(ro1), charge(ro2));
            if charge(ri1) != q1 || charge(ri2) != q2 {
                continue;
            }
            let mut acc = 0.0;
            for &s in &pairings {
                let left = overlap(ro1, ro2, po, q1, q2, s, d);
                if left == 0.0 {
                    continue;
                }
                for &t in &pairings {
                    let right = overlap(ri1, ri2, pi, q1, q2, t, d);
                    acc += assembly_weight(s, t, q1, q2, d) * left * right;
                }
            }
            *entry = acc / norm;
        }
    }
    m
}

/// Overlaps between normalised paired states (the basis is not orthogonal).
pub fn paired_gram(d: f64) -> PairedMatrix {
    let mut m = paired_zeros();
    for (o, row) in m.iter_mut().enumerate() {
        let (a1, a2, p) = decode(o);
        for (i, e) in row.iter_mut().enumerate() {
            let (b1, b2, q) = decode(i);
            *e = if p == q {
                if (a1, a2) == (b1, b2) { 1.0 } else { 0.0 }
            } else if a1 == a2 && b1 == b2 && a1 == b1 {
                1.0 / (d * d)
            } else {
                0.0
            };
        }
    }
    m
}

/// Running sums of sampled paired matrix elements.
#[derive(Debug, Clone, PartialEq)]
pub struct HaarAccumulator {
    pub sum: PairedMatrix,
    pub sum_sq: PairedMatrix,
    pub n: u64,
}

impl HaarAccumulator {
    pub fn new() -> Self {
        HaarAccumulator {
            sum: paired_zeros(),
            sum_sq: paired_zeros(),
            n: 0,
        }
    }

    pub fn merge(&mut self, other: &HaarAccumulator) {
        for (a, b) in self.sum.iter_mut().flatten().zip(other.sum.iter().flatten()) {
            *a += b;
        }
        for (a, b) in self.sum_sq.iter_mut().flatten().zip(other.sum_sq.iter().flatten()) {
            *a += b;
        }
        self.n += other.n;
    }

    pub fn finish(&self) -> HaarEstimate {
        let n = self.n as f64;
        let mut mean = paired_zeros();
        let mut stderr = paired_zeros();
        for o in 0..PAIRED_DIM {
            for i in 0..PAIRED_DIM {
                let m = self.sum[o][i] / n;
                let var = (self.sum_sq[o][i] / n - m * m).max(0.0) * n / (n - 1.0).max(1.0);
                mean[o][i] = m;
                stderr[o][i] = (var / n).sqrt();
            }
        }
        HaarEstimate {
            mean,
            stderr,
            n_samples: self.n,
        }
    }
}

impl Default for HaarAccumulator {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HaarEstimate {
    pub mean: PairedMatrix,
    pub stderr: PairedMatrix,
    pub n_samples: u64,
}

/// A U(1)-symmetric two-site unitary with Haar blocks on the charge sectors.
/// Basis index `r * d^2 + (qudit pair)`, so sector `Q = 1` spans `r = 1, 2`.
pub fn sample_block_unitary<R: rand::Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let b = d * d;
    let mut u = CMatrix::zeros(4 * b);
    for (start, dim) in [(0, b), (b, 2 * b), (3 * b, b)] {
        let block = haar_unitary(dim, rng);
        for i in 0..dim {
            for j in 0..dim {
                u.set(start + i, start + j, block.get(i, j));
            }
        }
    }
    u
}

/// Paired matrix elements of one unitary.
pub fn paired_elements(u: &CMatrix, d: usize) -> PairedMatrix {
    let b = d * d;
    let dim = 4 * b;
    // x[s] = U Pi_s U^dagger restricted to the charge sector of s.
    let mut x: Vec<CMatrix> = Vec::with_capacity(4);
    for s in 0..4 {
        let mut m = CMatrix::zeros(dim);
        for i in 0..dim {
            for k in 0..dim {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in s * b..(s + 1) * b {
                    acc += u.get(i, j) * u.get(k, j).conj();
                }
                m.set(i, k, acc);
            }
        }
        x.push(m);
    }
    // A(r, s) = Tr(Pi_r X_s).
    let mut tr = [[0.0f64; 4]; 4];
    for (r, row) in tr.iter_mut().enumerate() {
        for (s, e) in row.iter_mut().enumerate() {
            *e = (r * b..(r + 1) * b).map(|i| x[s].get(i, i).re).sum();
        }
    }
    let loop_trace = |r1: usize, s1: usize, r2: usize, s2: usize| -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in r1 * b..(r1 + 1) * b {
            for k in r2 * b..(r2 + 1) * b {
                acc += x[s1].get(i, k) * x[s2].get(k, i);
            }
        }
        acc.re
    };
    let norm = (b * b) as f64;
    let mut m = paired_zeros();
    for (o, row) in m.iter_mut().enumerate() {
        let (r1, r2, po) = decode(o);
        for (i, e) in row.iter_mut().enumerate() {
            let (s1, s2, pi) = decode(i);
            let v = if po == pi {
                tr[r1][s1] * tr[r2][s2]
            } else {
                loop_trace(r1, s1, r2, s2)
            };
            *e = v / norm;
        }
    }
    m
}

/// Accumulates the Haar draws with indices in `range`.
pub fn haar_mc_range(d: usize, seed: u64, range: Range<u64>) -> HaarAccumulator {
    let mut acc = HaarAccumulator::new();
    for idx in range {
        let mut rng = stream(seed, EngineId::HaarMc, idx);
        let u = sample_block_unitary(d, &mut rng);
        let m = paired_elements(&u, d);
        for o in 0..PAIRED_DIM {
            for i in 0..PAIRED_DIM {
                let v = m[o][i];
                acc.sum[o][i] += v;
                acc.sum_sq[o][i] += v * v;
            }
        }
        acc.n += 1;
    }
    acc
}

/// Element-wise Haar average over `n` draws with standard errors.
pub fn haar_mc_average(d: usize, n: u64, seed: u64) -> Result<HaarEstimate> {
    if d == 0 {
        return Err(Error::invalid("d", "qudit dimension must be a positive integer"));
    }
    if n < 2 {
        return Err(Error::invalid("n", "need at least two samples"));
    }
    Ok(haar_mc_range(d, seed, 0..n).finish())
}

/// Identity-pairing block of the averaged gate, `g[out][in]` over window codes
/// `r1 + 4 r2`.
pub fn projected_gate(d: u32) -> Result<[[f64; 16]; 16]> {
    let m = averaged_gate_paired(d)?;
    let mut g = [[0.0; 16]; 16];
    for (o, row) in g.iter_mut().enumerate() {
        for (i, e) in row.iter_mut().enumerate() {
            *e = m[o][i];
        }
    }
    Ok(g)
}

/// Max-norm distance between the identity block and `K (x) K + a(d) P (x) P`.
pub fn projected_gate_deviation(d: u32) -> Result<f64> {
    if d < 2 {
        return Err(Error::invalid("d", "integer d >= 2 required"));
    }
    let g = projected_gate(d)?;
    let table = build_pair_gate(2, a_of_d(d as f64)?)?;
    let mut worst: f64 = 0.0;
    for (o, row) in g.iter().enumerate() {
        for (i, &v) in row.iter().enumerate() {
            worst = worst.max((v - table.probability(i, o)).abs());
        }
    }
    Ok(worst)
}

/// `<v| G |v>` for the singlet `v = (|11> - |12> - |21> + |22>) / 2` of the
/// `(1,1)` sector (codes `1` = charge on the left site, `2` = on the right).
pub fn singlet_element(d: u32) -> Result<f64> {
    let g = projected_gate(d)?;
    let v = [(1usize, 1usize, 0.5), (1, 2, -0.5), (2, 1, -0.5), (2, 2, 0.5)];
    let mut acc = 0.0;
    for &(a1, a2, x) in &v {
        for &(b1, b2, y) in &v {
            acc += x * g[a1 + 4 * a2][b1 + 4 * b2] * y;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_examples() {
        for d in [1.5, 2.0, 3.0] {
            let w = weingarten_weight(Pairing::Identity, Pairing::Identity, 1, 1, d).unwrap();
            assert!((w - a_of_d(d).unwrap()).abs() < 1e-15);
            assert_eq!(weingarten_weight(Pairing::Identity, Pairing::Swap, 0, 1, d).unwrap(), 0.0);
        }
        let w = weingarten_weight(Pairing::Identity, Pairing::Identity, 0, 2, 2.0).unwrap();
        assert_eq!(w, 1.0 / 16.0);
        assert!(weingarten_weight(Pairing::Identity, Pairing::Swap, 0, 0, 1.0).is_err());
        assert!(weingarten_weight(Pairing::Identity, Pairing::Swap, 1, 1, 1.0).is_ok());
        assert!(weingarten_weight(Pairing::Identity, Pairing::Identity, 3, 1, 2.0).is_err());
    }

    #[test]
    fn frozen_identity_state_is_fixed() {
        // G|i> = |i> shows up as <o|G|i> = <o|i> in the non-orthogonal basis.
        for d in [1, 2, 3] {
            let m = averaged_gate_paired(d).unwrap();
            let gram = paired_gram(d as f64);
            for r in [0, 3] {
                let i = paired_index(r, r, Pairing::Identity);
                for o in 0..PAIRED_DIM {
                    let expect = gram[o][i];
                    assert!((m[o][i] - expect).abs() < 1e-14, "d={d} r={r} o={o}: {}", m[o][i]);
                }
            }
        }
    }

    #[test]
    fn structure_of_averaged_gate() {
        let m = averaged_gate_paired(2).unwrap();
        for o in 0..PAIRED_DIM {
            for i in 0..PAIRED_DIM {
                let (a1, a2, _) = decode(o);
                let (b1, b2, _) = decode(i);
                if charge(a1) != charge(b1) || charge(a2) != charge(b2) {
                    assert_eq!(m[o][i], 0.0);
                }
                assert!((m[o][i] - m[i][o]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn singlet_element_is_coupling() {
        for d in [2, 3, 4, 5] {
            let c = singlet_element(d).unwrap();
            assert!((c - a_of_d(d as f64).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_block_is_stochastic() {
        for d in [2, 3, 4] {
            let g = projected_gate(d).unwrap();
            for i in 0..16 {
                let s: f64 = (0..16).map(|o| g[o][i]).sum();
                assert!((s - 1.0).abs() < 1e-12);
                assert!((0..16).all(|o| g[o][i] >= 0.0));
            }
        }
    }

    #[test]
    fn coupling_correction_scales_as_d_to_minus_eight() {
        // a(d) - 1/(4 d^4) = 1/(4 d^4 (4 d^4 - 1)).
        let f = |d: f64| a_of_d(d).unwrap() - 1.0 / (4.0 * d.powi(4));
        let slope = (f(8.0) / f(4.0)).ln() / 2f64.ln();
        assert!((slope + 8.0).abs() < 0.01, "{slope}");
    }

    #[test]
    fn sampled_unitary_matches_weingarten_at_d1() {
        let est = haar_mc_average(1, 20_000, 4).unwrap();
        let w = averaged_gate_paired(1).unwrap();
        for o in 0..PAIRED_DIM {
            for i in 0..PAIRED_DIM {
                let diff = (est.mean[o][i] - w[o][i]).abs();
                assert!(diff <= 5.0 * est.stderr[o][i] + 1e-12, "({o},{i}): {} vs {}", est.mean[o][i], w[o][i]);
            }
        }
    }

    #[test]
    fn sampled_unitary_matches_weingarten_at_d2() {
        let est = haar_mc_average(2, 3_000, 8).unwrap();
        let w = averaged_gate_paired(2).unwrap();
        for o in 0..PAIRED_DIM {
            for i in 0..PAIRED_DIM {
                let diff = (est.mean[o][i] - w[o][i]).abs();
                assert!(diff <= 5.0 * est.stderr[o][i] + 1e-12, "({o},{i}): {} vs {}", est.mean[o][i], w[o][i]);
            }
        }
    }

    #[test]
    fn sampled_block_unitary_conserves_charge() {
        let mut rng = stream(3, EngineId::HaarMc, 0);
        let u = sample_block_unitary(2, &mut rng);
        assert!(u.unitarity_residual() < 1e-12);
        let q = |i: usize| charge(i / 4);
        for i in 0..16 {
            for j in 0..16 {
                if q(i) != q(j) {
                    assert_eq!(u.get(i, j), Complex64::new(0.0, 0.0));
                }
            }
        }
    }
}
