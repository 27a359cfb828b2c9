//! Few-magnon propagation in the rotated basis.
//!
//! In the two-chain ladder the variance correction is carried by the sector with
//! one overturned spin per chain. Its amplitudes live on an `L x L` grid indexed by
//! the two magnon positions. On one window the two-chain gate restricted to this
//! sector is `K (x) K + a P (x) P`; since `P_w` kills a magnon outside window `w`, a
//! whole layer acts as `K_layer (x) K_layer + a sum_w P_w (x) P_w`.
//!
//! `M(t) = <r,r| T_2(t) - T_1(t) (x) T_1(t) |l,l>` is obtained by propagating the
//! difference `delta = T_2 |l,l> - T_1 (x) T_1 |l,l>` directly:
//! `delta' = C delta + a V (w (x) w)` with `w = T_1 |l>` and `C` the coupled layer,
//! so no large terms cancel.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::ode::{self, OdeOptions, OdeStats};
use crate::sep::Parity;
use crate::{Error, Result};

/// Amplitudes over the positions `(x1, x2)` of one magnon in each of two chains,
/// stored row-major (`x1 * L + x2`).
#[derive(Debug, Clone, PartialEq)]
pub struct MagnonVector2 {
    pub l: usize,
    pub amplitudes: Vec<f64>,
}

impl MagnonVector2 {
    pub fn zeros(l: usize) -> Self {
        MagnonVector2 {
            l,
            amplitudes: vec![0.0; l * l],
        }
    }

    /// `sum_{x1, x2 in half} |x1, x2>` for the left (`right = false`) or right half.
    pub fn half_indicator(l: usize, right: bool) -> Self {
        let mut v = Self::zeros(l);
        for x1 in 0..l {
            for x2 in 0..l {
                if (x1 >= l / 2) == right && (x2 >= l / 2) == right {
                    v.amplitudes[x1 * l + x2] = 1.0;
                }
            }
        }
        v
    }

    pub fn get(&self, x1: usize, x2: usize) -> f64 {
        self.amplitudes[x1 * self.l + x2]
    }

    /// Overlap with `|r, r>`.
    pub fn right_right_overlap(&self) -> f64 {
        right_right_sum(&self.amplitudes, self.l)
    }
}

fn right_right_sum(a: &[f64], l: usize) -> f64 {
    let h = l / 2;
    (h..l).map(|x1| a[x1 * l + h..x1 * l + l].iter().sum::<f64>()).sum()
}

fn window_starts(l: usize, parity: Parity) -> core::iter::StepBy<core::ops::Range<usize>> {
    let s = match parity {
        Parity::Even => 0,
        Parity::Odd => 1,
    };
    (s..l.saturating_sub(1)).step_by(2)
}

/// `K_layer` on a single-magnon vector.
fn k_layer_1(v: &mut [f64], parity: Parity) {
    for x in window_starts(v.len(), parity) {
        let m = 0.5 * (v[x] + v[x + 1]);
        v[x] = m;
        v[x + 1] = m;
    }
}

/// `K_layer (x) K_layer` in place.
fn k_layer_2(a: &mut [f64], l: usize, parity: Parity) {
    for row in a.chunks_exact_mut(l) {
        k_layer_1(row, parity);
    }
    for x in window_starts(l, parity) {
        let (lo, hi) = a.split_at_mut((x + 1) * l);
        let r0 = &mut lo[x * l..];
        let r1 = &mut hi[..l];
        for (p, q) in r0.iter_mut().zip(r1.iter_mut()) {
            let m = 0.5 * (*p + *q);
            *p = m;
            *q = m;
        }
    }
}

/// `<v_x | psi>` with `v_x = (|x,x> - |x,x+1> - |x+1,x> + |x+1,x+1>) / 2`.
#[inline]
fn singlet_overlap(a: &[f64], l: usize, x: usize) -> f64 {
    0.5 * (a[x * l + x] - a[x * l + x + 1] - a[(x + 1) * l + x] + a[(x + 1) * l + x + 1])
}

#[inline]
fn add_singlet(a: &mut [f64], l: usize, x: usize, c: f64) {
    let h = 0.5 * c;
    a[x * l + x] += h;
    a[x * l + x + 1] -= h;
    a[(x + 1) * l + x] -= h;
    a[(x + 1) * l + x + 1] += h;
}

/// One coupled layer `K (x) K + a sum_w P_w (x) P_w` (open boundaries).
pub fn layer_apply_two_magnon(vec: &MagnonVector2, parity: Parity, a: f64) -> MagnonVector2 {
    let l = vec.l;
    let mut out = vec.clone();
    let s: Vec<(usize, f64)> = window_starts(l, parity)
        .map(|x| (x, singlet_overlap(&vec.amplitudes, l, x)))
        .collect();
    k_layer_2(&mut out.amplitudes, l, parity);
    for (x, c) in s {
        add_singlet(&mut out.amplitudes, l, x, a * c);
    }
    out
}

/// Maximum time allowed by the diffusive boundary guard, `(L/2)^2 / 4`.
pub fn boundary_guard(l: usize) -> usize {
    (l / 2) * (l / 2) / 4
}

/// `M(s)` for `s = 0, ..., t_max` without the boundary guard.
pub fn m_of_t_discrete_series(l: usize, t_max: usize, a: f64) -> Result<Vec<f64>> {
    if l < 2 || l % 2 != 0 {
        return Err(Error::invalid("l", "site count must be even and at least 2"));
    }
    let mut w: Vec<f64> = (0..l).map(|x| if x < l / 2 { 1.0 } else { 0.0 }).collect();
    let mut delta = vec![0.0; l * l];
    let mut out = Vec::with_capacity(t_max + 1);
    out.push(0.0);
    let mut src = Vec::new();
    for _ in 0..t_max {
        for parity in [Parity::Even, Parity::Odd] {
            // Source a V (w (x) w) and coupled map on delta, both with the old w.
            src.clear();
            for x in window_starts(l, parity) {
                let dw = w[x] - w[x + 1];
                let s_delta = singlet_overlap(&delta, l, x);
                src.push((x, s_delta + 0.5 * dw * dw));
            }
            k_layer_2(&mut delta, l, parity);
            for &(x, c) in &src {
                add_singlet(&mut delta, l, x, a * c);
            }
            k_layer_1(&mut w, parity);
        }
        out.push(right_right_sum(&delta, l));
    }
    Ok(out)
}

/// `M(t)`, refusing times beyond the boundary guard `(L/2)^2 / 4`.
pub fn m_of_t_discrete(l: usize, t: usize, a: f64) -> Result<f64> {
    if t > boundary_guard(l) {
        return Err(Error::invalid("t", "beyond the boundary guard (L/2)^2/4"));
    }
    Ok(*m_of_t_discrete_series(l, t, a)?.last().expect("t + 1 entries"))
}

/// `H_1 = sum_j P_{j,j+1}` on one magnon: half the open-chain Laplacian.
fn h1_apply(v: &[f64], out: &mut [f64]) {
    let l = v.len();
    for x in 0..l {
        let mut acc = 0.0;
        if x > 0 {
            acc += 0.5 * (v[x] - v[x - 1]);
        }
        if x + 1 < l {
            acc += 0.5 * (v[x] - v[x + 1]);
        }
        out[x] = acc;
    }
}

/// Sparse `H_2 = H_1 (x) 1 + 1 (x) H_1 - a sum_x |v_x><v_x|` on the `L x L` grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianH2 {
    pub l: usize,
    pub a: f64,
    pub periodic: bool,
}

impl HamiltonianH2 {
    pub fn open(l: usize, a: f64) -> Self {
        HamiltonianH2 { l, a, periodic: false }
    }

    /// Ring variant (bond `(L-1, 0)` included), used for clean momenta.
    pub fn periodic(l: usize, a: f64) -> Self {
        HamiltonianH2 { l, a, periodic: true }
    }

    fn bonds(&self) -> usize {
        if self.periodic {
            self.l
        } else {
            self.l - 1
        }
    }

    /// `out = H psi` for a complex amplitude grid.
    pub fn apply_complex(&self, psi: &[Complex64], out: &mut [Complex64]) {
        let l = self.l;
        out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
        for j in 0..self.bonds() {
            let k = (j + 1) % l;
            for x in 0..l {
                // Chain 1 hop on bond (j, k) at fixed x2 = x, and chain 2 likewise.
                let (aj, ak) = (j * l + x, k * l + x);
                let d = 0.5 * (psi[aj] - psi[ak]);
                out[aj] += d;
                out[ak] -= d;
                let (bj, bk) = (x * l + j, x * l + k);
                let d = 0.5 * (psi[bj] - psi[bk]);
                out[bj] += d;
                out[bk] -= d;
            }
            let s = 0.5 * (psi[j * l + j] - psi[j * l + k] - psi[k * l + j] + psi[k * l + k]);
            let h = -0.5 * self.a * s;
            out[j * l + j] += h;
            out[j * l + k] -= h;
            out[k * l + j] -= h;
            out[k * l + k] += h;
        }
    }
}

/// `M_H(t) = <r,r| e^{-t H_2} - e^{-t H_1} (x) e^{-t H_1} |l,l>` at each of the
/// increasing times in `times`, by adaptive Runge-Kutta on `(w, delta)`.
pub fn m_of_t_hamiltonian_series(l: usize, times: &[f64], a: f64, opts: &OdeOptions) -> Result<Vec<f64>> {
    if l < 2 || l % 2 != 0 {
        return Err(Error::invalid("l", "site count must be even and at least 2"));
    }
    if times.windows(2).any(|w| w[1] < w[0]) || times.iter().any(|&t| !(t >= 0.0)) {
        return Err(Error::invalid("t", "times must be nonnegative and increasing"));
    }
    let n2 = l * l;
    // y = [w (L entries), delta (L^2 entries)].
    let mut y = vec![0.0; l + n2];
    for x in 0..l / 2 {
        y[x] = 1.0;
    }
    let mut hw = vec![0.0; l];
    let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| {
        let (w, delta) = y.split_at(l);
        let (dw, dd) = dy.split_at_mut(l);
        h1_apply(w, &mut hw);
        for (o, v) in dw.iter_mut().zip(&hw) {
            *o = -v;
        }
        // -(H_1 (x) 1 + 1 (x) H_1) delta.
        for x1 in 0..l {
            for x2 in 0..l {
                let c = delta[x1 * l + x2];
                let mut acc = 0.0;
                if x1 > 0 {
                    acc += c - delta[(x1 - 1) * l + x2];
                }
                if x1 + 1 < l {
                    acc += c - delta[(x1 + 1) * l + x2];
                }
                if x2 > 0 {
                    acc += c - delta[x1 * l + x2 - 1];
                }
                if x2 + 1 < l {
                    acc += c - delta[x1 * l + x2 + 1];
                }
                dd[x1 * l + x2] = -0.5 * acc;
            }
        }
        // + a V delta + a V (w (x) w).
        for x in 0..l - 1 {
            let dwx = w[x] - w[x + 1];
            let c = singlet_overlap(delta, l, x) + 0.5 * dwx * dwx;
            add_singlet(dd, l, x, a * c);
        }
    };
    let mut rhs = rhs;
    let mut out = Vec::with_capacity(times.len());
    let mut t = 0.0;
    let mut local = *opts;
    for &target in times {
        let stats: OdeStats = ode::integrate(&mut rhs, &mut y, t, target, &local)?;
        if target > t {
            local.h_init = stats.h_next;
        }
        t = target;
        out.push(right_right_sum(&y[l..], l));
    }
    Ok(out)
}

/// Tolerances used by [`m_of_t_hamiltonian`].
pub fn hamiltonian_ode_options() -> OdeOptions {
    OdeOptions {
        rtol: 1e-10,
        atol: 1e-12,
        ..Default::default()
    }
}

/// `M_H(t)` at one time.
pub fn m_of_t_hamiltonian(l: usize, t: f64, a: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::invalid("t", "time must be positive"));
    }
    Ok(m_of_t_hamiltonian_series(l, &[t], a, &hamiltonian_ode_options())?[0])
}

/// Which two-magnon plane-wave combination to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSymmetry {
    Antisymmetric,
    Symmetric,
}

/// Max-norm residual `|H psi - E psi|` on the ring for
/// `psi(x1, x2) = e^{i(k1 x1 + k2 x2)} -+ e^{i(k2 x1 + k1 x2)}`, `k = 2 pi m / L`,
/// `E = 2 - cos k1 - cos k2`.
pub fn pair_sector_residual(l: usize, a: f64, m1: usize, m2: usize, symmetry: PairSymmetry) -> f64 {
    let tau = 2.0 * core::f64::consts::PI;
    let k1 = tau * m1 as f64 / l as f64;
    let k2 = tau * m2 as f64 / l as f64;
    let sign = match symmetry {
        PairSymmetry::Antisymmetric => -1.0,
        PairSymmetry::Symmetric => 1.0,
    };
    let mut psi = vec![Complex64::new(0.0, 0.0); l * l];
    for x1 in 0..l {
        for x2 in 0..l {
            let (f1, f2) = (x1 as f64, x2 as f64);
            psi[x1 * l + x2] = Complex64::from_polar(1.0, k1 * f1 + k2 * f2)
                + Complex64::from_polar(sign, k2 * f1 + k1 * f2);
        }
    }
    let e = 2.0 - k1.cos() - k2.cos();
    let mut hpsi = vec![Complex64::new(0.0, 0.0); l * l];
    HamiltonianH2::periodic(l, a).apply_complex(&psi, &mut hpsi);
    hpsi.iter()
        .zip(&psi)
        .map(|(h, p)| (h - p * e).norm())
        .fold(0.0, f64::max)
}

/// Antisymmetric-sector residual for momentum indices `(m1, m2)`.
pub fn antisymmetric_sector_check(l: usize, a: f64, m1: usize, m2: usize) -> f64 {
    pair_sector_residual(l, a, m1, m2, PairSymmetry::Antisymmetric)
}
