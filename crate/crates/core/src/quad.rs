//! Adaptive Gauss-Kronrod (7/15) quadrature for complex-valued integrands.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

/// Integrates `f` over `[a, b]` split at the given interior breakpoints, bisecting
/// the worst segment until the summed error estimate meets
/// `max(abs_tol, rel_tol * |I|)`.
pub fn integrate<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_segments: usize,
) -> Result<(Complex64, f64)> {
    let mut edges: Vec<f64> = Vec::with_capacity(breakpoints.len() + 2);
    edges.push(a);
    edges.extend(breakpoints.iter().copied().filter(|&x| x > a && x < b));
    edges.push(b);
    edges.sort_by(|x, y| x.partial_cmp(y).unwrap_or(core::cmp::Ordering::Equal));
    let mut segments: Vec<(f64, f64, Complex64, f64)> = edges
        .windows(2)
        .map(|w| {
            let (v, e) = kronrod(&f, w[0], w[1]);
            (w[0], w[1], v, e)
        })
        .collect();
    loop {
        let total: Complex64 = segments.iter().map(|s| s.2).sum();
        let err: f64 = segments.iter().map(|s| s.3).sum();
        let target = abs_tol.max(rel_tol * total.norm());
        if err <= target {
            return Ok((total, err));
        }
        if segments.len() >= max_segments {
            return Err(Error::NonConvergence {
                what: "Gauss-Kronrod quadrature",
                achieved: err,
                target,
            });
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, s)| if s.3 > acc.1 { (i, s.3) } else { acc });
        let (lo, hi, _, _) = segments.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = kronrod(&f, lo, mid);
        let (v2, e2) = kronrod(&f, mid, hi);
        segments.push((lo, mid, v1, e1));
        segments.push((mid, hi, v2, e2));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_and_gaussian() {
        let (v, _) = integrate(|x| Complex64::new(x * x, x), 0.0, 3.0, &[], 1e-14, 1e-14, 100).unwrap();
        assert!((v - Complex64::new(9.0, 4.5)).norm() < 1e-12);
        let (g, _) = integrate(|x| Complex64::new((-x * x).exp(), 0.0), 0.0, 8.0, &[], 1e-15, 1e-14, 200).unwrap();
        assert!((g.re - core::f64::consts::PI.sqrt() / 2.0).abs() < 1e-13);
    }

    #[test]
    fn near_pole_resolved_by_subdivision() {
        // Integral of 1 / (x - (1 + i eps)) over [0, 2] = ln((1 - i eps)/(-1 - i eps)).
        let eps = 1e-4;
        let z0 = Complex64::new(1.0, eps);
        let (v, _) = integrate(|x| (Complex64::new(x, 0.0) - z0).inv(), 0.0, 2.0, &[], 1e-12, 1e-12, 4000).unwrap();
        let exact = (Complex64::new(2.0, 0.0) - z0).ln() - (-z0).ln();
        assert!((v - exact).norm() < 1e-10);
    }

    #[test]
    fn reports_failure() {
        let r = integrate(|x| Complex64::new(1.0 / x.abs().sqrt().max(1e-300), 0.0), -1.0, 1.0, &[], 1e-16, 0.0, 8);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }
}
