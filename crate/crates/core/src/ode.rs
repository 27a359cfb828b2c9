//! Adaptive Dormand-Prince 5(4) integration for large linear-ish systems.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// First trial step; reused from the previous call when chaining intervals.
    pub h_init: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-8,
            atol: 1e-8,
            h_init: 1e-2,
            h_max: f64::INFINITY,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    /// Step size proposed for continuing past the end point.
    pub h_next: f64,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
/// Stage coefficients; the last row holds the fifth-order weights.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth minus fourth order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates `dy/dt = f(t, y)` from `t0` to `t1` in place. The error norm is the
/// RMS of `err_i / (atol + rtol * max(|y_i|, |y_new_i|))`.
pub fn integrate<F>(mut f: F, y: &mut [f64], t0: f64, t1: f64, opts: &OdeOptions) -> Result<OdeStats>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y.len();
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    let mut stage = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    let mut t = t0;
    let mut h = opts.h_init.min(opts.h_max).min(t1 - t0).max(0.0);
    let mut stats = OdeStats {
        accepted: 0,
        rejected: 0,
        h_next: opts.h_init,
    };
    if t1 <= t0 {
        return Ok(stats);
    }
    f(t, y, &mut k[0]);
    while t < t1 {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::NonConvergence {
                what: "ODE step budget",
                achieved: t,
                target: t1,
            });
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for j in 0..s {
                    let a = A[s][j];
                    if a != 0.0 {
                        acc += h * a * k[j][i];
                    }
                }
                stage[i] = acc;
            }
            f(t + C[s] * h, &stage, &mut k[s]);
            if s == 6 {
                y_new.copy_from_slice(&stage);
            }
        }
        let mut err2 = 0.0;
        for i in 0..n {
            let mut e = 0.0;
            for s in 0..7 {
                if E[s] != 0.0 {
                    e += E[s] * k[s][i];
                }
            }
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            let r = h * e / sc;
            err2 += r * r;
        }
        let err = (err2 / n.max(1) as f64).sqrt();
        if !err.is_finite() {
            return Err(Error::NonConvergence {
                what: "ODE step (non-finite error)",
                achieved: err,
                target: 1.0,
            });
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        if err <= 1.0 {
            t = if last { t1 } else { t + h };
            y.copy_from_slice(&y_new);
            // First-same-as-last: the seventh stage is f at the new point.
            let (first, rest) = k.split_at_mut(6);
            first[0].copy_from_slice(&rest[0]);
            stats.accepted += 1;
            let proposed = (h * factor).min(opts.h_max);
            if !last {
                h = proposed;
            }
            stats.h_next = proposed;
        } else {
            stats.rejected += 1;
            h *= factor.min(1.0);
            if h < 1e-14 * t1.abs().max(1.0) {
                return Err(Error::NonConvergence {
                    what: "ODE step size underflow",
                    achieved: h,
                    target: 1e-14,
                });
            }
        }
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let mut y = [1.0, 2.0];
        let opts = OdeOptions {
            rtol: 1e-10,
            atol: 1e-12,
            ..Default::default()
        };
        integrate(|_, y, d| {
            d[0] = -y[0];
            d[1] = -3.0 * y[1];
        }, &mut y, 0.0, 2.0, &opts)
        .unwrap();
        assert!((y[0] - (-2.0f64).exp()).abs() < 1e-9);
        assert!((y[1] - 2.0 * (-6.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn harmonic_oscillator_with_forcing() {
        // y'' = -y + cos(2t), y(0) = 1, y'(0) = 0: y = (4 cos t - cos 2t) / 3.
        let mut y = [1.0, 0.0];
        let opts = OdeOptions {
            rtol: 1e-10,
            atol: 1e-12,
            ..Default::default()
        };
        integrate(|t, y, d| {
            d[0] = y[1];
            d[1] = -y[0] + (2.0 * t).cos();
        }, &mut y, 0.0, 5.0, &opts)
        .unwrap();
        let exact = (4.0 * 5f64.cos() - 10f64.cos()) / 3.0;
        assert!((y[0] - exact).abs() < 1e-8);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let mut y = [1.0];
        let opts = OdeOptions {
            max_steps: 3,
            h_init: 1e-3,
            ..Default::default()
        };
        assert!(integrate(|_, y, d| d[0] = -y[0], &mut y, 0.0, 10.0, &opts).is_err());
    }
}
