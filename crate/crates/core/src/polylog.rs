//! The polylogarithm `Li_{3/2}` on the cut plane `C \ [1, inf)`.

use num_complex::Complex64;

use crate::quad;
use crate::{Error, Result};

/// Radius inside which the defining power series is used.
pub const SERIES_RADIUS: f64 = 0.9;

const QUAD_ABS_TOL: f64 = 1e-14;
const QUAD_REL_TOL: f64 = 1e-13;

/// `sum_{n>=1} z^n / n^{3/2}`, valid for `|z| < 1`.
pub fn li32_series(z: Complex64) -> Result<Complex64> {
    if z.norm() >= 1.0 {
        return Err(Error::invalid("z", "series needs |z| < 1"));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut power = z;
    let mut n = 1.0f64;
    loop {
        let term = power / (n * n.sqrt());
        sum += term;
        if term.norm() <= 1e-18 * sum.norm().max(1e-300) || n > 20_000.0 {
            break;
        }
        power *= z;
        n += 1.0;
    }
    Ok(sum)
}

/// Bose-Einstein integral `z / Gamma(3/2) * int_0^inf u^{1/2} / (e^u - z) du`,
/// evaluated with `u = v^2` so the integrand is smooth at the origin.
pub fn li32_integral(z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 && z.re > 1.0 {
        return Err(Error::BranchCut { re: z.re, im: z.im });
    }
    let integrand = |v: f64| {
        let v2 = v * v;
        // e^{v^2} - z written with expm1 so that z = 1 stays finite at small v.
        let den = Complex64::new(v2.exp_m1() + (1.0 - z.re), -z.im);
        Complex64::new(2.0 * v2, 0.0) / den
    };
    // The integrand peaks where e^{v^2} = |z|.
    let mut breaks = [0.0f64; 3];
    let mut nb = 0;
    if z.norm() > 1.0 {
        let v0 = z.norm().ln().sqrt();
        breaks[0] = v0;
        breaks[1] = 0.5 * v0;
        breaks[2] = v0 + 0.5;
        nb = 3;
    }
    let (value, _) = quad::integrate(integrand, 0.0, 7.5, &breaks[..nb], QUAD_ABS_TOL, QUAD_REL_TOL, 20_000)?;
    let gamma_three_halves = core::f64::consts::PI.sqrt() / 2.0;
    Ok(z * value / gamma_three_halves)
}

/// `Li_{3/2}(z)`: power series for `|z| <= 0.9`, integral continuation otherwise.
pub fn li32(z: Complex64) -> Result<Complex64> {
    if z.norm() <= SERIES_RADIUS {
        li32_series(z)
    } else {
        li32_integral(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_three_halves_limit() {
        // Li_{3/2}(1) = zeta(3/2).
        let v = li32_integral(Complex64::new(1.0, 0.0)).unwrap();
        assert!((v.re - 2.612_375_348_685_488).abs() < 1e-10, "{v}");
    }

    #[test]
    fn negative_one() {
        // Li_{3/2}(-1) = -(1 - 2^{-1/2}) zeta(3/2).
        let exact = -(1.0 - 0.5f64.sqrt()) * 2.612_375_348_685_488;
        let v = li32_integral(Complex64::new(-1.0, 0.0)).unwrap();
        assert!((v.re - exact).abs() < 1e-11);
        assert!(v.im.abs() < 1e-14);
    }

    #[test]
    fn series_and_integral_agree_on_annulus() {
        for k in 0..48 {
            let arg = k as f64 * core::f64::consts::PI / 24.0;
            for r in [0.5, 0.7, 0.9] {
                let z = Complex64::from_polar(r, arg);
                let a = li32_series(z).unwrap();
                let b = li32_integral(z).unwrap();
                assert!((a - b).norm() < 1e-10, "z={z} series={a} integral={b}");
            }
        }
    }

    #[test]
    fn cut_is_rejected() {
        assert!(matches!(li32(Complex64::new(2.0, 0.0)), Err(Error::BranchCut { .. })));
        assert!(li32(Complex64::new(2.0, 1e-3)).is_ok());
    }
}
