//! Exact tilted transfer for ladders of exclusion chains.
//!
//! A configuration of `n` chains on `L` sites is a bit string with chain `a`,
//! site `x` at bit `a * L + x`. A two-site gate acts on the window `(x, x + 1)` of
//! every chain at once; its input and output are window codes where chain `a`
//! contributes bits `2a` (site `x`) and `2a + 1` (site `x + 1`).
//!
//! The engine carries one weight per configuration. With [`ComplexTilt`] the
//! weights are probabilities dressed by `exp(i lambda . Q)`, so the final sum is
//! `<exp(i lambda . Q)>`. With [`JetTilt`] they are truncated series in a real
//! source `s`, and the final sum is the moment generating function up to fourth
//! order.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::jet::JetLayout;
use crate::{Error, Result};

/// Largest number of configurations (`2^(n L)`) accepted by the engine.
pub const MAX_CONFIGS: usize = 1 << 24;

/// Stochastic two-site gate on the window codes of `n_chains` chains.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowGate {
    n_chains: usize,
    rows: Vec<Vec<(u16, f64)>>,
}

impl WindowGate {
    /// `rows[c]` lists `(output code, probability)` for input code `c`.
    pub fn new(n_chains: usize, rows: Vec<Vec<(u16, f64)>>) -> Result<Self> {
        if !(1..=3).contains(&n_chains) {
            return Err(Error::invalid("n_chains", "must be 1, 2 or 3"));
        }
        if rows.len() != 1 << (2 * n_chains) {
            return Err(Error::invalid("rows", "need one row per window code"));
        }
        Ok(WindowGate { n_chains, rows })
    }

    /// The exclusion-process gate: swap the two sites with probability 1/2.
    pub fn sep() -> Self {
        WindowGate {
            n_chains: 1,
            rows: vec![
                vec![(0, 1.0)],
                vec![(1, 0.5), (2, 0.5)],
                vec![(2, 0.5), (1, 0.5)],
                vec![(3, 1.0)],
            ],
        }
    }

    pub fn n_chains(&self) -> usize {
        self.n_chains
    }

    pub fn row(&self, code: usize) -> &[(u16, f64)] {
        &self.rows[code]
    }

    pub fn rows(&self) -> &[Vec<(u16, f64)>] {
        &self.rows
    }
}

/// Charge moved left to right in chain `chain` by the window transition
/// `input -> output`.
pub fn window_delta(input: usize, output: usize, chain: usize) -> i8 {
    let i = (input >> (2 * chain)) & 3;
    let o = (output >> (2 * chain)) & 3;
    match (i, o) {
        (1, 2) => 1,
        (2, 1) => -1,
        _ => 0,
    }
}

/// Weight carried per configuration.
pub trait Tilt {
    type W: Clone;

    fn zero(&self) -> Self::W;
    /// Untilted weight `p`.
    fn scalar(&self, p: f64) -> Self::W;
    /// `dst += p * src`.
    fn add_scaled(&self, dst: &mut Self::W, src: &Self::W, p: f64);
    /// `dst += p * src * exp(source . deltas)`.
    fn add_tilted(&self, dst: &mut Self::W, src: &Self::W, p: f64, deltas: &[i8]);
}

/// Complex counting field, one `lambda` per chain.
#[derive(Debug, Clone)]
pub struct ComplexTilt {
    lambdas: Vec<f64>,
}

impl ComplexTilt {
    pub fn new(lambdas: &[f64]) -> Self {
        ComplexTilt {
            lambdas: lambdas.to_vec(),
        }
    }
}

impl Tilt for ComplexTilt {
    type W = Complex64;

    fn zero(&self) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }

    fn scalar(&self, p: f64) -> Complex64 {
        Complex64::new(p, 0.0)
    }

    #[inline]
    fn add_scaled(&self, dst: &mut Complex64, src: &Complex64, p: f64) {
        *dst += src * p;
    }

    #[inline]
    fn add_tilted(&self, dst: &mut Complex64, src: &Complex64, p: f64, deltas: &[i8]) {
        let phase: f64 = self
            .lambdas
            .iter()
            .zip(deltas)
            .map(|(l, &d)| l * d as f64)
            .sum();
        *dst += src * Complex64::from_polar(p, phase);
    }
}

/// Real moment jets of order four in `n` chains (`K` = 5, 15 or 35).
#[derive(Debug, Clone)]
pub struct JetTilt<const K: usize> {
    layout: JetLayout<K>,
    factors: Vec<[f64; K]>,
}

fn ternary_code(deltas: &[i8]) -> usize {
    deltas
        .iter()
        .fold(0, |acc, &d| 3 * acc + (d + 1) as usize)
}

impl<const K: usize> JetTilt<K> {
    pub fn new() -> Self {
        let layout = JetLayout::<K>::new();
        let n = layout.nvars();
        let mut factors = vec![[0.0; K]; 3usize.pow(n as u32)];
        let mut deltas = vec![0i8; n];
        for (code, f) in factors.iter_mut().enumerate() {
            let mut c = code;
            for slot in deltas.iter_mut().rev() {
                *slot = (c % 3) as i8 - 1;
                c /= 3;
            }
            *f = layout.exp_factor(&deltas);
        }
        JetTilt { layout, factors }
    }

    pub fn layout(&self) -> &JetLayout<K> {
        &self.layout
    }
}

impl<const K: usize> Default for JetTilt<K> {
    fn default() -> Self {
        Self::new()
    }
}

impl<const K: usize> Tilt for JetTilt<K> {
    type W = [f64; K];

    fn zero(&self) -> [f64; K] {
        [0.0; K]
    }

    fn scalar(&self, p: f64) -> [f64; K] {
        let mut w = [0.0; K];
        w[0] = p;
        w
    }

    #[inline]
    fn add_scaled(&self, dst: &mut [f64; K], src: &[f64; K], p: f64) {
        for (d, s) in dst.iter_mut().zip(src) {
            *d += p * s;
        }
    }

    #[inline]
    fn add_tilted(&self, dst: &mut [f64; K], src: &[f64; K], p: f64, deltas: &[i8]) {
        let f = &self.factors[ternary_code(deltas)];
        self.layout.mul_add(dst, src, f, p);
    }
}

/// Product-measure distribution over ladder configurations: chain `a`, site `x`
/// occupied with probability `density(x)`, independently.
pub fn product_distribution(l: usize, n_chains: usize, density: impl Fn(usize) -> f64) -> Result<Vec<f64>> {
    let bits = l * n_chains;
    if bits >= usize::BITS as usize || (1usize << bits) > MAX_CONFIGS {
        return Err(Error::ResourceCap {
            what: "exact transfer configurations",
            requested: if bits >= 64 { u64::MAX } else { 1u64 << bits },
            limit: MAX_CONFIGS as u64,
        });
    }
    let mut probs = vec![1.0f64];
    for _ in 0..n_chains {
        for x in 0..l {
            let r = density(x);
            let mut next = vec![0.0; probs.len() * 2];
            let (lo, hi) = next.split_at_mut(probs.len());
            for (i, &p) in probs.iter().enumerate() {
                lo[i] = p * (1.0 - r);
                hi[i] = p * r;
            }
            probs = next;
        }
    }
    // The loop above builds the index with the first site as the lowest bit.
    Ok(probs)
}

/// Brick-wall ladder evolution with a tilt attached to one bond.
pub struct Ladder<'g, T: Tilt> {
    gate: &'g WindowGate,
    tilt: T,
    l: usize,
    counting_site: usize,
    weights: Vec<T::W>,
    scratch: Vec<T::W>,
}

impl<'g, T: Tilt> Ladder<'g, T> {
    /// Starts from `initial` (one probability per configuration), counting at
    /// the bond `(counting_site, counting_site + 1)`.
    pub fn new(gate: &'g WindowGate, tilt: T, l: usize, counting_site: usize, initial: &[f64]) -> Result<Self> {
        if l < 2 || l % 2 != 0 {
            return Err(Error::invalid("l", "site count must be even and at least 2"));
        }
        if counting_site + 1 >= l {
            return Err(Error::invalid("counting_site", "bond must lie inside the chain"));
        }
        let bits = l * gate.n_chains();
        if initial.len() != 1usize << bits {
            return Err(Error::invalid("initial", "length must be 2^(n L)"));
        }
        let weights: Vec<T::W> = initial.iter().map(|&p| tilt.scalar(p)).collect();
        let scratch = vec![tilt.zero(); weights.len()];
        Ok(Ladder {
            gate,
            tilt,
            l,
            counting_site,
            weights,
            scratch,
        })
    }

    fn apply_window(&mut self, x: usize) {
        let n = self.gate.n_chains();
        let l = self.l;
        let counting = x == self.counting_site;
        let mut mask = 0usize;
        for a in 0..n {
            mask |= 3 << (a * l + x);
        }
        let zero = self.tilt.zero();
        self.scratch.iter_mut().for_each(|w| *w = zero.clone());
        let mut deltas = [0i8; 3];
        for (s, w) in self.weights.iter().enumerate() {
            let mut code = 0usize;
            for a in 0..n {
                code |= ((s >> (a * l + x)) & 3) << (2 * a);
            }
            let base = s & !mask;
            for &(out, p) in self.gate.row(code) {
                let out = out as usize;
                let mut target = base;
                for a in 0..n {
                    target |= ((out >> (2 * a)) & 3) << (a * l + x);
                }
                if counting && out != code {
                    for (a, d) in deltas.iter_mut().enumerate().take(n) {
                        *d = window_delta(code, out, a);
                    }
                    self.tilt.add_tilted(&mut self.scratch[target], w, p, &deltas[..n]);
                } else {
                    self.tilt.add_scaled(&mut self.scratch[target], w, p);
                }
            }
        }
        core::mem::swap(&mut self.weights, &mut self.scratch);
    }

    /// One time unit: even bonds, then odd bonds.
    pub fn step(&mut self) {
        for x in (0..self.l - 1).step_by(2) {
            self.apply_window(x);
        }
        for x in (1..self.l - 1).step_by(2) {
            self.apply_window(x);
        }
    }

    /// Sum of all weights.
    pub fn total(&self) -> T::W {
        let mut acc = self.tilt.zero();
        for w in &self.weights {
            self.tilt.add_scaled(&mut acc, w, 1.0);
        }
        acc
    }

    pub fn tilt(&self) -> &T {
        &self.tilt
    }
}

/// Totals after each of `t = 0, 1, ..., t_max` steps.
pub fn totals_by_time<T: Tilt>(
    gate: &WindowGate,
    tilt: T,
    l: usize,
    counting_site: usize,
    initial: &[f64],
    t_max: usize,
) -> Result<Vec<T::W>> {
    let mut ladder = Ladder::new(gate, tilt, l, counting_site, initial)?;
    let mut out = Vec::with_capacity(t_max + 1);
    out.push(ladder.total());
    for _ in 0..t_max {
        ladder.step();
        out.push(ladder.total());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn domain_wall(l: usize) -> Vec<f64> {
        product_distribution(l, 1, |x| if x < l / 2 { 1.0 } else { 0.0 }).unwrap()
    }

    #[test]
    fn single_gate_enumeration() {
        let gate = WindowGate::sep();
        let lam = 0.37;
        let z = totals_by_time(&gate, ComplexTilt::new(&[lam]), 2, 0, &domain_wall(2), 1).unwrap();
        let expect = (Complex64::new(1.0, 0.0) + Complex64::new(0.0, lam).exp()) * 0.5;
        assert!((z[1] - expect).norm() < 1e-15);
        assert!((z[0] - 1.0).norm() < 1e-15);
    }

    #[test]
    fn product_distribution_indexing() {
        let p = product_distribution(3, 1, |x| [1.0, 0.0, 1.0][x]).unwrap();
        assert_eq!(p[0b101], 1.0);
        assert_eq!(p.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn jets_match_complex_tilt() {
        // Mean and variance of the four-site domain wall after two steps, by jets
        // and by hand-rolled differences of the complex tilt.
        let gate = WindowGate::sep();
        let init = domain_wall(4);
        let jet = totals_by_time(&gate, JetTilt::<5>::new(), 4, 1, &init, 2).unwrap();
        let layout = JetLayout::<5>::new();
        let m1 = layout.raw_moment(&jet[2], [1, 0, 0]);
        let m2 = layout.raw_moment(&jet[2], [2, 0, 0]);
        let h = 1e-4;
        let zp = totals_by_time(&gate, ComplexTilt::new(&[h]), 4, 1, &init, 2).unwrap()[2];
        let zm = totals_by_time(&gate, ComplexTilt::new(&[-h]), 4, 1, &init, 2).unwrap()[2];
        let d1 = (zp - zm) / (2.0 * h);
        let d2 = (zp + zm - 2.0) / (h * h);
        assert!((d1.im - m1).abs() < 1e-7);
        assert!((-d2.re - m2).abs() < 1e-6);
        assert!((jet[2][0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn oversize_is_rejected() {
        assert!(matches!(
            product_distribution(13, 2, |_| 0.5),
            Err(Error::ResourceCap { .. })
        ));
    }
}
