//! Statevector simulation of charge-conserving qubit circuits with a counting
//! field on the central bond.
//!
//! Gates are written in the basis `|11>, |10>, |01>, |00>` of a bond `(j, j+1)`,
//! where the first label is site `j + 1` and the second site `j`. Thus `|01>` has
//! the charge on the left site and the amplitude `<10|U|01>` moves it to the right.
//! On the central bond that amplitude carries `e^{+i lambda/2}` and the reverse one
//! `e^{-i lambda/2}`, so `<phi(-lambda)|phi(lambda)>` weights every left-to-right
//! crossing by `e^{+i lambda}`.
//!
//! Amplitudes are stored for one charge sector only, indexed by the sorted list of
//! occupation bit masks (bit `x` = site `x`).

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::analytic::{central_weights, sep_cgf};
use crate::rng::{stream, substream, EngineId};
use crate::stats::{linear_fit, log_unwrapped, mean_stderr};
use crate::{Error, Result};

/// Largest chain accepted by the statevector engine.
pub const MAX_L: usize = 24;
/// Largest chain for which the equilibrium trace is summed exactly.
pub const EXACT_TRACE_MAX_L: usize = 12;

pub type Gate = [[Complex64; 4]; 4];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// The five random numbers of a charge-conserving two-qubit gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateParams {
    pub xi: f64,
    pub alpha: f64,
    pub psi: f64,
    pub chi_phase: f64,
    pub rho_phase: f64,
}

impl GateParams {
    /// `xi ~ U(0,1)`, phases `~ U(0, 2 pi)`.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let tau = 2.0 * PI;
        GateParams {
            xi: rng.gen::<f64>(),
            alpha: tau * rng.gen::<f64>(),
            psi: tau * rng.gen::<f64>(),
            chi_phase: tau * rng.gen::<f64>(),
            rho_phase: tau * rng.gen::<f64>(),
        }
    }

    pub fn matrix(&self) -> Gate {
        let s = self.xi.sqrt();
        let c = (1.0 - self.xi).sqrt();
        let e = |phase: f64, r: f64| Complex64::from_polar(r, phase);
        [
            [ONE, ZERO, ZERO, ZERO],
            [ZERO, e(self.alpha + self.psi, c), e(self.alpha + self.chi_phase, s), ZERO],
            [ZERO, -e(self.alpha - self.chi_phase, s), e(self.alpha - self.psi, c), ZERO],
            [ZERO, ZERO, ZERO, e(self.rho_phase, 1.0)],
        ]
    }
}

/// Draws one gate and returns it with its matrix.
pub fn sample_gate<R: Rng + ?Sized>(rng: &mut R) -> (GateParams, Gate) {
    let p = GateParams::sample(rng);
    (p, p.matrix())
}

/// The central-bond gate with counting phases.
pub fn counting_gate(gate: &Gate, lambda: f64) -> Gate {
    let mut g = *gate;
    g[1][2] *= Complex64::from_polar(1.0, lambda / 2.0);
    g[2][1] *= Complex64::from_polar(1.0, -lambda / 2.0);
    g
}

/// Max-norm of `U^dagger U - 1` for a 4 x 4 gate.
pub fn gate_unitarity_residual(g: &Gate) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = ZERO;
            for k in 0..4 {
                acc += g[k][i].conj() * g[k][j];
            }
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((acc - target).norm());
        }
    }
    worst
}

/// Gate parameters for every bond and layer of a brick-wall circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub l: usize,
    pub depth: usize,
    pub seed: u64,
    pub index: u64,
    /// Layer-major: step `s`, even layer then odd layer, bonds left to right.
    gates: Vec<GateParams>,
}

fn layer_bonds(l: usize, odd: bool) -> core::iter::StepBy<core::ops::Range<usize>> {
    ((odd as usize)..l.saturating_sub(1)).step_by(2)
}

impl Circuit {
    /// Circuit `index` of the ensemble with master seed `seed`.
    pub fn sample(l: usize, depth: usize, seed: u64, index: u64) -> Result<Self> {
        check_l(l)?;
        let mut rng = stream(seed, EngineId::QuantumCircuit, index);
        let per_step = layer_bonds(l, false).count() + layer_bonds(l, true).count();
        let gates = (0..depth * per_step).map(|_| GateParams::sample(&mut rng)).collect();
        Ok(Circuit {
            l,
            depth,
            seed,
            index,
            gates,
        })
    }

    /// Builds a circuit from explicit parameters (layer-major order).
    pub fn from_gates(l: usize, depth: usize, gates: Vec<GateParams>) -> Result<Self> {
        check_l(l)?;
        let per_step = layer_bonds(l, false).count() + layer_bonds(l, true).count();
        if gates.len() != depth * per_step {
            return Err(Error::invalid("gates", "one gate per bond and layer required"));
        }
        Ok(Circuit {
            l,
            depth,
            seed: 0,
            index: 0,
            gates,
        })
    }

    pub fn gates(&self) -> &[GateParams] {
        &self.gates
    }

    /// Lower site of the counting bond.
    pub fn central_site(&self) -> usize {
        self.l / 2 - 1
    }
}

fn check_l(l: usize) -> Result<()> {
    if l < 2 || l % 2 != 0 {
        return Err(Error::invalid("l", "site count must be even and at least 2"));
    }
    if l > MAX_L {
        return Err(Error::ResourceCap {
            what: "statevector chain length",
            requested: l as u64,
            limit: MAX_L as u64,
        });
    }
    Ok(())
}

/// Per-bond index lists of one charge sector.
#[derive(Debug, Clone)]
struct BondLists {
    /// `(left occupied, right occupied)` index pairs related by a hop.
    pairs: Vec<(u32, u32)>,
    /// States with both sites empty.
    empty: Vec<u32>,
}

/// Basis of the sector with `n` charges on `l` sites.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    pub l: usize,
    pub n: usize,
    states: Vec<u32>,
    bonds: Vec<BondLists>,
}

impl SectorBasis {
    pub fn new(l: usize, n: usize) -> Result<Self> {
        check_l(l)?;
        if n > l {
            return Err(Error::invalid("n", "more charges than sites"));
        }
        let states: Vec<u32> = (0u32..(1u32 << l)).filter(|s| s.count_ones() as usize == n).collect();
        let mut rank = vec![u32::MAX; 1usize << l];
        for (i, &s) in states.iter().enumerate() {
            rank[s as usize] = i as u32;
        }
        let bonds = (0..l - 1)
            .map(|x| {
                let mut pairs = Vec::new();
                let mut empty = Vec::new();
                for (i, &s) in states.iter().enumerate() {
                    let left = (s >> x) & 1;
                    let right = (s >> (x + 1)) & 1;
                    match (left, right) {
                        (1, 0) => {
                            let t = s ^ (0b11 << x);
                            pairs.push((i as u32, rank[t as usize]));
                        }
                        (0, 0) => empty.push(i as u32),
                        _ => {}
                    }
                }
                BondLists { pairs, empty }
            })
            .collect();
        Ok(SectorBasis { l, n, states, bonds })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, i: usize) -> u32 {
        self.states[i]
    }

    pub fn index_of(&self, mask: u32) -> Option<usize> {
        self.states.binary_search(&mask).ok()
    }

    /// Applies `g` on bond `(x, x+1)`.
    pub fn apply_gate(&self, psi: &mut [Complex64], x: usize, g: &Gate) {
        let lists = &self.bonds[x];
        // Index 1 is |10> (charge on the right site), index 2 is |01>.
        let (g11, g12, g21, g22) = (g[1][1], g[1][2], g[2][1], g[2][2]);
        for &(a, b) in &lists.pairs {
            let (a, b) = (a as usize, b as usize);
            let (pa, pb) = (psi[a], psi[b]);
            psi[b] = g11 * pb + g12 * pa;
            psi[a] = g21 * pb + g22 * pa;
        }
        let g33 = g[3][3];
        if g33 != ONE {
            for &e in &lists.empty {
                psi[e as usize] *= g33;
            }
        }
        // |11> picks up g[0][0] = 1.
    }
}

/// Evolves the pairs `(phi(lambda), phi(-lambda))` through the circuit and returns
/// `Z = <phi(-lambda)|phi(lambda)>` after each step listed in `t_list`.
fn evolve_pair(
    circuit: &Circuit,
    basis: &SectorBasis,
    lambda: f64,
    init: &[Complex64],
    t_list: &[usize],
) -> Vec<Complex64> {
    let l = circuit.l;
    let central = circuit.central_site();
    let mut plus = init.to_vec();
    let mut minus = init.to_vec();
    let mut out = vec![ZERO; t_list.len()];
    let overlap = |p: &[Complex64], m: &[Complex64]| -> Complex64 { m.iter().zip(p).map(|(a, b)| a.conj() * b).sum() };
    for (k, &t) in t_list.iter().enumerate() {
        if t == 0 {
            out[k] = overlap(&plus, &minus);
        }
    }
    let mut g = 0;
    for step in 1..=circuit.depth.min(t_list.iter().copied().max().unwrap_or(0)) {
        for odd in [false, true] {
            for x in layer_bonds(l, odd) {
                let m = circuit.gates[g].matrix();
                g += 1;
                if x == central {
                    basis.apply_gate(&mut plus, x, &counting_gate(&m, lambda));
                    basis.apply_gate(&mut minus, x, &counting_gate(&m, -lambda));
                } else {
                    basis.apply_gate(&mut plus, x, &m);
                    basis.apply_gate(&mut minus, x, &m);
                }
            }
        }
        for (k, &t) in t_list.iter().enumerate() {
            if t == step {
                out[k] = overlap(&plus, &minus);
            }
        }
    }
    out
}

/// Generating function values of one circuit at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct CGFGrid {
    pub t: usize,
    pub lambdas: Vec<f64>,
    pub z: Vec<Complex64>,
    /// `log z`, phase-unwrapped along the grid.
    pub chi: Vec<Complex64>,
}

/// Domain-wall basis and initial vector for `l` sites.
pub fn domain_wall_sector(l: usize) -> Result<(SectorBasis, Vec<Complex64>)> {
    let basis = SectorBasis::new(l, l / 2)?;
    let mask = (1u32 << (l / 2)) - 1;
    let mut init = vec![ZERO; basis.len()];
    init[basis.index_of(mask).expect("domain wall in its sector")] = ONE;
    Ok((basis, init))
}

fn check_times(circuit: &Circuit, t_list: &[usize]) -> Result<()> {
    if t_list.iter().any(|&t| t > circuit.depth) {
        return Err(Error::invalid("t", "time exceeds circuit depth"));
    }
    Ok(())
}

/// `Z(lambda, t)` for the domain wall at each `t` in `t_list`, for every
/// `lambda` in `lambdas`; `Z(-lambda)` is taken as `conj Z(lambda)`.
pub fn mgf_pure(circuit: &Circuit, basis: &SectorBasis, lambdas: &[f64], t_list: &[usize]) -> Result<Vec<Vec<Complex64>>> {
    check_times(circuit, t_list)?;
    if basis.l != circuit.l || basis.n != circuit.l / 2 {
        return Err(Error::invalid("basis", "must be the half-filled sector of the circuit"));
    }
    let mask = (1u32 << (circuit.l / 2)) - 1;
    let mut init = vec![ZERO; basis.len()];
    init[basis.index_of(mask).expect("domain wall in its sector")] = ONE;
    // z[t][lambda]
    let mut z = vec![vec![ZERO; lambdas.len()]; t_list.len()];
    let mut done: Vec<(f64, Vec<Complex64>)> = Vec::new();
    for (j, &lam) in lambdas.iter().enumerate() {
        let key = lam.abs();
        let vals = match done.iter().find(|(k, _)| *k == key) {
            Some((_, v)) => v.clone(),
            None => {
                let v = evolve_pair(circuit, basis, key, &init, t_list);
                done.push((key, v.clone()));
                v
            }
        };
        for (k, v) in vals.iter().enumerate() {
            z[k][j] = if lam < 0.0 { v.conj() } else { *v };
        }
    }
    Ok(z)
}

/// Per-circuit CGF grids (pure domain wall) at each time of `t_list`.
pub fn cgf_pure(circuit: &Circuit, basis: &SectorBasis, lambdas: &[f64], t_list: &[usize]) -> Result<Vec<CGFGrid>> {
    let z = mgf_pure(circuit, basis, lambdas, t_list)?;
    Ok(z.into_iter()
        .zip(t_list)
        .map(|(zs, &t)| CGFGrid {
            t,
            lambdas: lambdas.to_vec(),
            chi: log_unwrapped(lambdas, &zs),
            z: zs,
        })
        .collect())
}

/// Cumulants `C_1..C_4` of one circuit (domain wall) at each `t` from a `2k+1`
/// point stencil of step `h` on `log Z`.
pub fn pure_cumulants(circuit: &Circuit, basis: &SectorBasis, t_list: &[usize], h: f64, k: usize) -> Result<Vec<[f64; 4]>> {
    let lambdas: Vec<f64> = (0..=2 * k).map(|j| (j as f64 - k as f64) * h).collect();
    let grids = cgf_pure(circuit, basis, &lambdas, t_list)?;
    Ok(grids.iter().map(|g| stencil_cumulants(&g.chi, h, k)).collect())
}

/// Cumulants from `chi` sampled at `(j - k) h`, `j = 0..=2k`.
pub fn stencil_cumulants(chi: &[Complex64], h: f64, k: usize) -> [f64; 4] {
    let mut c = [0.0; 4];
    for (m, slot) in c.iter_mut().enumerate() {
        let order = m + 1;
        let w = central_weights(order, k);
        let d: f64 = w
            .iter()
            .zip(chi)
            .map(|(wj, x)| wj * if order % 2 == 0 { x.re } else { x.im })
            .sum::<f64>()
            / h.powi(order as i32);
        *slot = match order {
            1 | 4 => d,
            _ => -d,
        };
    }
    c
}

/// Equilibrium generating function with its standard error (zero when exact).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedEstimate {
    pub z: Complex64,
    pub stderr: f64,
    pub exact: bool,
}

/// `Z = 2^{-L} Tr[U^dagger(t, -lambda) U(t, lambda)]`: an exact sum over basis
/// states for `L <= 12`, otherwise `n_probes` random-phase vectors per sector.
pub fn cgf_mixed_equilibrium(circuit: &Circuit, lambda: f64, t: usize, n_probes: usize) -> Result<MixedEstimate> {
    check_times(circuit, &[t])?;
    let l = circuit.l;
    let scale = 0.5f64.powi(l as i32);
    if l <= EXACT_TRACE_MAX_L {
        let mut z = ZERO;
        for n in 0..=l {
            let basis = SectorBasis::new(l, n)?;
            let mut e = vec![ZERO; basis.len()];
            for i in 0..basis.len() {
                e.iter_mut().for_each(|v| *v = ZERO);
                e[i] = ONE;
                z += evolve_pair(circuit, &basis, lambda, &e, &[t])[0];
            }
        }
        return Ok(MixedEstimate {
            z: z * scale,
            stderr: 0.0,
            exact: true,
        });
    }
    if n_probes < 2 {
        return Err(Error::invalid("n_probes", "need at least two probe vectors"));
    }
    let bases = (0..=l).map(|n| SectorBasis::new(l, n)).collect::<Result<Vec<_>>>()?;
    let mut re = Vec::with_capacity(n_probes);
    let mut im = Vec::with_capacity(n_probes);
    for p in 0..n_probes {
        let mut rng = substream(circuit.seed, EngineId::QuantumTrace, circuit.index, p as u64);
        let mut z = ZERO;
        for basis in &bases {
            let v: Vec<Complex64> = (0..basis.len())
                .map(|_| Complex64::from_polar(1.0, 2.0 * PI * rng.gen::<f64>()))
                .collect();
            z += evolve_pair(circuit, basis, lambda, &v, &[t])[0];
        }
        re.push(z.re * scale);
        im.push(z.im * scale);
    }
    let (mr, sr) = mean_stderr(&re);
    let (mi, si) = mean_stderr(&im);
    Ok(MixedEstimate {
        z: Complex64::new(mr, mi),
        stderr: (sr * sr + si * si).sqrt(),
        exact: false,
    })
}

/// Circuit-to-circuit fluctuation measure at each time.
#[derive(Debug, Clone, PartialEq)]
pub struct FluctuationDecay {
    pub t: Vec<f64>,
    /// Circuit average of `int dlambda |chi - chi_SEP|^2 / t`.
    pub deviation: Vec<f64>,
    /// Circuit average of `int dlambda |chi - mean chi|^2 / t`.
    pub spread: Vec<f64>,
    /// Log-log slope of `deviation` against `t`.
    pub slope: f64,
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2).zip(y.windows(2)).map(|(a, b)| 0.5 * (a[1] - a[0]) * (b[0] + b[1])).sum()
}

/// `ensemble[c][k]` is circuit `c`'s CGF at time `t_list[k]` on a common grid; the
/// reference is the domain-wall SEP generating function.
pub fn fluctuation_decay(ensemble: &[Vec<CGFGrid>], t_list: &[usize]) -> Result<FluctuationDecay> {
    if ensemble.is_empty() {
        return Err(Error::EmptyInput("circuit ensemble"));
    }
    let n = ensemble.len() as f64;
    let mut dev = Vec::with_capacity(t_list.len());
    let mut spread = Vec::with_capacity(t_list.len());
    for (k, &t) in t_list.iter().enumerate() {
        let grid = &ensemble[0][k].lambdas;
        let tf = t as f64;
        let reference = grid
            .iter()
            .map(|&l| sep_cgf(l, tf, 1.0, 0.0))
            .collect::<Result<Vec<_>>>()?;
        let mut mean = vec![ZERO; grid.len()];
        for c in ensemble {
            if c[k].t != t || c[k].lambdas != *grid {
                return Err(Error::invalid("ensemble", "grids and times must agree"));
            }
            for (m, x) in mean.iter_mut().zip(&c[k].chi) {
                *m += x / n;
            }
        }
        let (mut d, mut s) = (0.0, 0.0);
        for c in ensemble {
            let yd: Vec<f64> = c[k].chi.iter().zip(&reference).map(|(a, b)| (a - b).norm_sqr()).collect();
            let ys: Vec<f64> = c[k].chi.iter().zip(&mean).map(|(a, b)| (a - b).norm_sqr()).collect();
            d += trapezoid(grid, &yd) / tf;
            s += trapezoid(grid, &ys) / tf;
        }
        dev.push(d / n);
        spread.push(s / n);
    }
    let ts: Vec<f64> = t_list.iter().map(|&t| t as f64).collect();
    let lx: Vec<f64> = ts.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = dev.iter().map(|v| v.ln()).collect();
    let slope = if ts.len() >= 2 { linear_fit(&lx, &ly).0 } else { f64::NAN };
    Ok(FluctuationDecay {
        t: ts,
        deviation: dev,
        spread,
        slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{ChemicalPotential, ModelParams};
    use crate::sep::exact_sep_cumulants_by_time;

    fn params_with(xi: f64) -> GateParams {
        GateParams {
            xi,
            alpha: 0.0,
            psi: 0.0,
            chi_phase: 0.0,
            rho_phase: 0.0,
        }
    }

    #[test]
    fn gate_examples() {
        let g = params_with(0.0).matrix();
        assert_eq!(g[1][2], ZERO);
        assert_eq!(g[2][1], ZERO);
        assert_eq!(g[1][1], ONE);
        let g = params_with(1.0).matrix();
        assert_eq!(g[1][1], ZERO);
        assert!((g[1][2] - ONE).norm() < 1e-15);
        assert!((g[2][1] + ONE).norm() < 1e-15);
        let mut rng = stream(1, EngineId::QuantumCircuit, 0);
        for _ in 0..100 {
            let (_, g) = sample_gate(&mut rng);
            assert!(gate_unitarity_residual(&g) < 1e-12);
            for lam in [0.3, -2.0] {
                assert!(gate_unitarity_residual(&counting_gate(&g, lam)) < 1e-12);
            }
            assert_eq!(counting_gate(&g, 0.0), g);
            let (a, b) = (counting_gate(&g, 0.7), counting_gate(&g, -0.7));
            assert!((a[1][2] / g[1][2] - (b[1][2] / g[1][2]).conj()).norm() < 1e-14);
        }
    }

    #[test]
    fn two_site_single_gate() {
        let p = GateParams {
            xi: 0.3,
            alpha: 1.0,
            psi: 2.0,
            chi_phase: 0.4,
            rho_phase: 5.0,
        };
        let circuit = Circuit::from_gates(2, 1, vec![p]).unwrap();
        let (basis, _) = domain_wall_sector(2).unwrap();
        let lam = 0.9;
        let z = mgf_pure(&circuit, &basis, &[lam, -lam, 0.0], &[1]).unwrap();
        let expect = Complex64::new(0.7, 0.0) + Complex64::from_polar(0.3, lam);
        assert!((z[0][0] - expect).norm() < 1e-14);
        assert!((z[0][1] - expect.conj()).norm() < 1e-14);
        assert!((z[0][2] - ONE).norm() < 1e-14);
    }

    #[test]
    fn norm_and_sector_structure() {
        let circuit = Circuit::sample(10, 12, 3, 0).unwrap();
        let (basis, init) = domain_wall_sector(10).unwrap();
        let z = evolve_pair(&circuit, &basis, 0.0, &init, &[12]);
        assert!((z[0] - ONE).norm() < 1e-12);
        // With lambda != 0 each vector stays normalised.
        let mut psi = init.clone();
        let mut g = 0;
        for _ in 0..12 {
            for odd in [false, true] {
                for x in layer_bonds(10, odd) {
                    let m = counting_gate(&circuit.gates[g].matrix(), 1.3);
                    g += 1;
                    basis.apply_gate(&mut psi, x, &m);
                }
            }
        }
        let norm: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_fcs_properties() {
        let circuit = Circuit::sample(8, 6, 5, 2).unwrap();
        let (basis, _) = domain_wall_sector(8).unwrap();
        let lams = [-2.5, -1.0, 0.0, 0.4, 1.0, 2.5];
        let z = mgf_pure(&circuit, &basis, &lams, &[2, 6]).unwrap();
        for row in &z {
            assert!((row[2] - ONE).norm() < 1e-12);
            assert!((row[1] - row[4].conj()).norm() < 1e-14);
            assert!(row.iter().all(|v| v.norm() <= 1.0 + 1e-12));
        }
        assert!(mgf_pure(&circuit, &basis, &lams, &[7]).is_err());
    }

    #[test]
    fn circuit_average_mean_is_sep() {
        // The single-replica average is exactly the exclusion process.
        let (l, t) = (8, 3);
        let (basis, _) = domain_wall_sector(l).unwrap();
        let c1: Vec<f64> = (0..150)
            .map(|i| {
                let c = Circuit::sample(l, t, 17, i).unwrap();
                pure_cumulants(&c, &basis, &[t], 1e-2, 4).unwrap()[0][0]
            })
            .collect();
        let (m, se) = mean_stderr(&c1);
        let sep = exact_sep_cumulants_by_time(&ModelParams::new(l, t, ChemicalPotential::PlusInfinity)).unwrap()[t][0];
        assert!((m - sep).abs() < 4.0 * se, "{m} +- {se} vs {sep}");
        assert!(m > 0.0);
    }

    #[test]
    fn mixed_trace_properties() {
        let circuit = Circuit::sample(6, 4, 9, 1).unwrap();
        let z0 = cgf_mixed_equilibrium(&circuit, 0.0, 4, 0).unwrap();
        assert!((z0.z - ONE).norm() < 1e-12);
        let a = cgf_mixed_equilibrium(&circuit, 0.8, 4, 0).unwrap();
        let b = cgf_mixed_equilibrium(&circuit, -0.8, 4, 0).unwrap();
        assert!((a.z - b.z.conj()).norm() < 1e-13);
        assert!(a.exact);
    }

    #[test]
    fn fluctuation_measure_of_identical_circuits() {
        let circuit = Circuit::sample(8, 4, 1, 0).unwrap();
        let (basis, _) = domain_wall_sector(8).unwrap();
        let grid = crate::analytic::uniform_grid(-2.0, 2.0, 11);
        let g = cgf_pure(&circuit, &basis, &grid, &[2, 4]).unwrap();
        let f = fluctuation_decay(&[g.clone(), g], &[2, 4]).unwrap();
        assert!(f.spread.iter().all(|&s| s < 1e-24));
        assert!(f.deviation.iter().all(|&d| d > 0.0));
    }

    #[test]
    fn caps() {
        assert!(matches!(Circuit::sample(26, 1, 0, 0), Err(Error::ResourceCap { .. })));
        assert!(Circuit::sample(7, 1, 0, 0).is_err());
    }
}
