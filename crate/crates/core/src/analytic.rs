//! Closed-form late-time predictions for the exclusion process and the
//! large-d corrections to it.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::jet::Series;
use crate::params::{a_of_d, ChemicalPotential};
use crate::polylog;
use crate::{Error, Result};

/// CGF evaluation is refused within this distance of `|lambda| = pi`, where the
/// domain-wall argument of the polylogarithm reaches its branch cut.
pub const LAMBDA_GUARD: f64 = 1e-3;

/// One sample of a cumulant generating function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CGFPoint {
    pub lambda: f64,
    pub chi: Complex64,
    pub t: f64,
}

/// `n` uniform points on `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// 101 points on `[-3, 3]`.
pub fn default_lambda_grid() -> Vec<f64> {
    uniform_grid(-3.0, 3.0, 101)
}

fn check_density(name: &'static str, rho: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::invalid(name, "density must lie in [0, 1]"));
    }
    Ok(())
}

/// `rho_L (e^{i l} - 1) + rho_R (e^{-i l} - 1) + rho_L rho_R (e^{i l} - 1)(e^{-i l} - 1)`.
pub fn omega(lambda: f64, rho_l: f64, rho_r: f64) -> Complex64 {
    let ep = Complex64::new(0.0, lambda).exp() - 1.0;
    let em = Complex64::new(0.0, -lambda).exp() - 1.0;
    ep * rho_l + em * rho_r + ep * em * (rho_l * rho_r)
}

fn f_from_li(li: Complex64) -> Complex64 {
    -li / PI.sqrt()
}

/// `F(omega) = -Li_{3/2}(-omega) / sqrt(pi)`, series inside `|omega| <= 0.9`.
pub fn sep_f(omega: Complex64) -> Result<Complex64> {
    polylog::li32(-omega).map(f_from_li)
}

/// `F` from its power series alone.
pub fn sep_f_series(omega: Complex64) -> Result<Complex64> {
    polylog::li32_series(-omega).map(f_from_li)
}

/// `F` from the integral continuation alone.
pub fn sep_f_continued(omega: Complex64) -> Result<Complex64> {
    polylog::li32_integral(-omega).map(f_from_li)
}

/// `chi(lambda) = sqrt(t) F(omega)`.
pub fn sep_cgf(lambda: f64, t: f64, rho_l: f64, rho_r: f64) -> Result<Complex64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::invalid("t", "time must be finite and nonnegative"));
    }
    check_density("rho_l", rho_l)?;
    check_density("rho_r", rho_r)?;
    if !(lambda.abs() <= PI - LAMBDA_GUARD) {
        return Err(Error::invalid("lambda", "outside the guard band |lambda| <= pi - 1e-3"));
    }
    Ok(sep_f(omega(lambda, rho_l, rho_r))? * t.sqrt())
}

/// `sep_cgf` on a grid.
pub fn sep_cgf_grid(lambdas: &[f64], t: f64, rho_l: f64, rho_r: f64) -> Result<Vec<CGFPoint>> {
    lambdas
        .iter()
        .map(|&lambda| {
            Ok(CGFPoint {
                lambda,
                chi: sep_cgf(lambda, t, rho_l, rho_r)?,
                t,
            })
        })
        .collect()
}

/// Taylor coefficients of `chi(lambda) / sqrt(t)` through `lambda^4`.
fn cgf_series(rho_l: f64, rho_r: f64) -> Series<5> {
    let ep = Series::<5>::expm1_i(1.0);
    let em = Series::<5>::expm1_i(-1.0);
    let w = ep
        .scale(rho_l.into())
        .add(&em.scale(rho_r.into()))
        .add(&ep.mul(&em).scale((rho_l * rho_r).into()));
    // omega has no constant term, so four powers suffice.
    let mut out = Series::<5>::zero();
    let mut power = w;
    for n in 1..=4 {
        let nf = n as f64;
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        let c = sign / (nf * nf.sqrt() * PI.sqrt());
        out = out.add(&power.scale(c.into()));
        power = power.mul(&w);
    }
    out
}

/// `C_m = (-i d/dlambda)^m chi` at zero, differentiated exactly.
pub fn sep_cumulant(order: usize, t: f64, rho_l: f64, rho_r: f64) -> Result<f64> {
    if !(1..=4).contains(&order) {
        return Err(Error::invalid("order", "cumulant order must be 1..=4"));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::invalid("t", "time must be finite and nonnegative"));
    }
    check_density("rho_l", rho_l)?;
    check_density("rho_r", rho_r)?;
    let s = cgf_series(rho_l, rho_r);
    let fact: f64 = (1..=order).map(|k| k as f64).product();
    let i_pow = Complex64::new(0.0, 1.0).powu(order as u32);
    Ok((s.0[order] * fact / i_pow).re * t.sqrt())
}

/// Central finite-difference weights for the `m`-th derivative on the points
/// `-k..=k` (times `h^{-m}`).
pub fn central_weights(m: usize, k: usize) -> Vec<f64> {
    let n = 2 * k + 1;
    // Solve sum_j w_j x_j^p = m! delta_{pm} for p < n.
    let mut a = alloc::vec![alloc::vec![0.0f64; n + 1]; n];
    for (p, row) in a.iter_mut().enumerate() {
        for j in 0..n {
            row[j] = (j as f64 - k as f64).powi(p as i32);
        }
        row[n] = if p == m {
            (1..=m).map(|x| x as f64).product()
        } else {
            0.0
        };
    }
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap())
            .unwrap();
        a.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                if f != 0.0 {
                    for c in col..=n {
                        a[r][c] -= f * a[col][c];
                    }
                }
            }
        }
    }
    (0..n).map(|j| a[j][n] / a[j][j]).collect()
}

/// Cumulant from central differences of `sep_cgf` with step `h`, using an
/// `(2k+1)`-point stencil. Even orders use the real part of the CGF and odd orders
/// the imaginary part.
pub fn sep_cumulant_fd(order: usize, t: f64, rho_l: f64, rho_r: f64, h: f64, k: usize) -> Result<f64> {
    if !(1..=4).contains(&order) {
        return Err(Error::invalid("order", "cumulant order must be 1..=4"));
    }
    let w = central_weights(order, k);
    let mut acc = 0.0;
    for (j, wj) in w.iter().enumerate() {
        let x = (j as f64 - k as f64) * h;
        let chi = sep_cgf(x, t, rho_l, rho_r)?;
        acc += wj * if order % 2 == 0 { chi.re } else { chi.im };
    }
    let deriv = acc / h.powi(order as i32);
    // (-i)^m chi^(m): m=1 -> Im, m=2 -> -Re, m=3 -> -Im, m=4 -> Re.
    Ok(match order {
        1 | 4 => deriv,
        _ => -deriv,
    })
}

/// Equilibrium excess kurtosis at half filling, `(4 - 3 sqrt 2) sqrt(pi) / (2 sqrt t)`.
pub fn kurtosis_prediction(t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::invalid("t", "time must be positive"));
    }
    Ok((4.0 - 3.0 * 2f64.sqrt()) * PI.sqrt() / (2.0 * t.sqrt()))
}

/// Softened-model variance reduction `a tanh^2(mu/2) / (16 sqrt(pi t))`.
pub fn spinwave_dc2(mu: ChemicalPotential, t: f64, d: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::invalid("t", "time must be positive"));
    }
    let th = mu.tanh_half();
    Ok(a_of_d(d)? * th * th / (16.0 * (PI * t).sqrt()))
}

/// Linear-response third-cumulant correction `3 a mu / (64 sqrt(pi t))`.
///
/// Only meaningful for `|mu| << 1`; infinite `mu` is rejected.
pub fn spinwave_dc3(mu: ChemicalPotential, t: f64, d: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::invalid("t", "time must be positive"));
    }
    let m = match mu {
        ChemicalPotential::Finite(m) => m,
        _ => return Err(Error::invalid("mu", "linear-response formula needs finite mu")),
    };
    Ok(3.0 * a_of_d(d)? * m / (64.0 * (PI * t).sqrt()))
}
