//! Histograms of integer charge transfers and their cumulants.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand_distr::{Binomial, Distribution};

use crate::rng::{stream, EngineId};
use crate::{Error, Result};

/// Number of bootstrap replicates used unless a caller asks otherwise.
pub const DEFAULT_BOOTSTRAP: usize = 200;

/// Occurrence counts of the transfer `Q`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Histogram {
    pub counts: BTreeMap<i64, u64>,
    pub n_samples: u64,
}

impl Histogram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_samples<I: IntoIterator<Item = i64>>(samples: I) -> Self {
        let mut h = Histogram::new();
        samples.into_iter().for_each(|q| h.add(q));
        h
    }

    pub fn from_counts<I: IntoIterator<Item = (i64, u64)>>(counts: I) -> Self {
        let mut h = Histogram::new();
        for (q, c) in counts {
            h.add_count(q, c);
        }
        h
    }

    #[inline]
    pub fn add(&mut self, q: i64) {
        self.add_count(q, 1);
    }

    pub fn add_count(&mut self, q: i64, count: u64) {
        if count > 0 {
            *self.counts.entry(q).or_insert(0) += count;
            self.n_samples += count;
        }
    }

    pub fn merge(&mut self, other: &Histogram) {
        for (&q, &c) in &other.counts {
            self.add_count(q, c);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.n_samples == 0
    }

    pub fn probability(&self, q: i64) -> f64 {
        self.counts.get(&q).copied().unwrap_or(0) as f64 / self.n_samples as f64
    }

    pub fn mean(&self) -> f64 {
        let n = self.n_samples as f64;
        self.counts.iter().map(|(&q, &c)| q as f64 * c as f64).sum::<f64>() / n
    }

    /// Mean and the central moments `mu_2, mu_3, mu_4` (population normalisation).
    pub fn moments(&self) -> Result<MomentSummary> {
        if self.is_empty() {
            return Err(Error::EmptyInput("histogram"));
        }
        Ok(moments_of(self.counts.iter().map(|(&q, &c)| (q, c as f64))))
    }

    /// Empirical `log <e^{i lambda Q}>`, with the phase unwrapped along `lambdas`
    /// when they are sorted.
    pub fn empirical_cgf(&self, lambdas: &[f64]) -> Vec<Complex64> {
        let n = self.n_samples as f64;
        let z: Vec<Complex64> = lambdas
            .iter()
            .map(|&lam| {
                self.counts
                    .iter()
                    .map(|(&q, &c)| Complex64::from_polar(c as f64 / n, lam * q as f64))
                    .sum()
            })
            .collect();
        log_unwrapped(lambdas, &z)
    }
}

/// Takes `log z_k` with the imaginary part made continuous along the grid,
/// anchored at the grid point closest to `lambda = 0` (where the log is taken on
/// the principal branch).
pub fn log_unwrapped(lambdas: &[f64], z: &[Complex64]) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = z.iter().map(|v| v.ln()).collect();
    if out.is_empty() {
        return out;
    }
    let anchor = lambdas
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap_or(core::cmp::Ordering::Equal))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let tau = 2.0 * core::f64::consts::PI;
    for i in anchor + 1..out.len() {
        let prev = out[i - 1].im;
        out[i].im += tau * ((prev - out[i].im) / tau).round();
    }
    for i in (0..anchor).rev() {
        let next = out[i + 1].im;
        out[i].im += tau * ((next - out[i].im) / tau).round();
    }
    out
}

/// Mean and central moments of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSummary {
    pub mean: f64,
    pub mu2: f64,
    pub mu3: f64,
    pub mu4: f64,
}

impl MomentSummary {
    pub fn cumulant(&self, order: usize) -> f64 {
        match order {
            1 => self.mean,
            2 => self.mu2,
            3 => self.mu3,
            4 => self.mu4 - 3.0 * self.mu2 * self.mu2,
            _ => f64::NAN,
        }
    }

    /// Numerator of the kurtosis proxy (fourth central moment).
    pub fn proxy_numerator(&self) -> f64 {
        self.mu4
    }

    /// Denominator of the kurtosis proxy (squared variance).
    pub fn proxy_denominator(&self) -> f64 {
        self.mu2 * self.mu2
    }
}

fn moments_of<I: Iterator<Item = (i64, f64)> + Clone>(weighted: I) -> MomentSummary {
    let (mut n, mut s) = (0.0, 0.0);
    for (q, w) in weighted.clone() {
        n += w;
        s += w * q as f64;
    }
    let mean = s / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for (q, w) in weighted {
        let d = q as f64 - mean;
        let d2 = d * d;
        m2 += w * d2;
        m3 += w * d2 * d;
        m4 += w * d2 * d2;
    }
    MomentSummary {
        mean,
        mu2: m2 / n,
        mu3: m3 / n,
        mu4: m4 / n,
    }
}

/// A sample cumulant with its bootstrap standard error and percentile interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CumulantEstimate {
    pub order: usize,
    pub value: f64,
    pub stderr: f64,
    /// 2.5 % and 97.5 % bootstrap percentiles (equal to `value` without resampling).
    pub interval: (f64, f64),
    pub n_samples: u64,
}

/// Sample cumulants of orders `1..=max_order` with `n_bootstrap` multinomial
/// resamples of the histogram for the errors. Replicate `b` draws from the
/// bootstrap stream `(seed, b)`.
pub fn cumulants_from_histogram(
    hist: &Histogram,
    max_order: usize,
    n_bootstrap: usize,
    seed: u64,
) -> Result<Vec<CumulantEstimate>> {
    if hist.is_empty() {
        return Err(Error::EmptyInput("histogram"));
    }
    if hist.n_samples < 2 {
        return Err(Error::invalid("histogram", "needs at least two samples"));
    }
    if !(1..=4).contains(&max_order) {
        return Err(Error::invalid("max_order", "cumulant order must be 1..=4"));
    }
    let point = hist.moments()?;
    let bins: Vec<(i64, u64)> = hist.counts.iter().map(|(&q, &c)| (q, c)).collect();
    let mut replicates: Vec<Vec<f64>> = (0..max_order).map(|_| Vec::with_capacity(n_bootstrap)).collect();
    let mut resampled = Vec::with_capacity(bins.len());
    for b in 0..n_bootstrap {
        let mut rng = stream(seed, EngineId::Bootstrap, b as u64);
        resampled.clear();
        let mut remaining = hist.n_samples;
        let mut mass_left = hist.n_samples;
        for &(q, c) in &bins {
            if remaining == 0 {
                break;
            }
            let k = if c >= mass_left {
                remaining
            } else {
                let p = c as f64 / mass_left as f64;
                Binomial::new(remaining, p).map(|d| d.sample(&mut rng)).unwrap_or(0)
            };
            mass_left -= c;
            remaining -= k;
            if k > 0 {
                resampled.push((q, k as f64));
            }
        }
        let m = moments_of(resampled.iter().copied());
        for (order, reps) in replicates.iter_mut().enumerate() {
            reps.push(m.cumulant(order + 1));
        }
    }
    Ok((1..=max_order)
        .map(|order| {
            let value = point.cumulant(order);
            let reps = &mut replicates[order - 1];
            let (stderr, interval) = if reps.len() >= 2 {
                let n = reps.len() as f64;
                let mean = reps.iter().sum::<f64>() / n;
                let var = reps.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (n - 1.0);
                reps.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
                (var.sqrt(), (percentile(reps, 0.025), percentile(reps, 0.975)))
            } else {
                (0.0, (value, value))
            };
            CumulantEstimate {
                order,
                value,
                stderr,
                interval,
                n_samples: hist.n_samples,
            }
        })
        .collect())
}

fn percentile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let w = pos - lo as f64;
    sorted[lo] * (1.0 - w) + sorted[hi] * w
}

/// Cumulants `C_1..C_4` from raw moments `E[Q], E[Q^2], E[Q^3], E[Q^4]`.
pub fn cumulants_from_raw(raw: [f64; 4]) -> [f64; 4] {
    let [m1, m2, m3, m4] = raw;
    let c2 = m2 - m1 * m1;
    let c3 = m3 - 3.0 * m2 * m1 + 2.0 * m1 * m1 * m1;
    let c4 = m4 - 4.0 * m3 * m1 - 3.0 * m2 * m2 + 12.0 * m2 * m1 * m1 - 6.0 * m1.powi(4);
    [m1, c2, c3, c4]
}

/// Mean and standard error of the mean.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Least-squares slope and intercept of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Slope of `log y` against `log x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn values(h: &Histogram) -> Vec<f64> {
        cumulants_from_histogram(h, 4, 0, 0)
            .unwrap()
            .iter()
            .map(|c| c.value)
            .collect()
    }

    #[test]
    fn point_mass() {
        let h = Histogram::from_counts([(3, 10)]);
        let c = values(&h);
        assert_eq!(c, [3.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn symmetric_two_point() {
        let h = Histogram::from_counts([(-1, 1), (1, 1)]);
        let c = values(&h);
        assert_abs_diff_eq!(c[0], 0.0);
        assert_abs_diff_eq!(c[1], 1.0);
        assert_abs_diff_eq!(c[2], 0.0);
        assert_abs_diff_eq!(c[3], -2.0);
    }

    #[test]
    fn bernoulli_half() {
        let h = Histogram::from_counts([(0, 2), (1, 2)]);
        let c = values(&h);
        assert_abs_diff_eq!(c[0], 0.5);
        assert_abs_diff_eq!(c[1], 0.25);
    }

    #[test]
    fn rejects_empty_and_tiny() {
        assert!(cumulants_from_histogram(&Histogram::new(), 2, 10, 0).is_err());
        assert!(cumulants_from_histogram(&Histogram::from_samples([1]), 2, 10, 0).is_err());
        assert!(Histogram::new().moments().is_err());
    }

    #[test]
    fn bootstrap_error_matches_clt() {
        // Binomial(40, 1/2) histogram built from exact weights; the standard error of
        // the mean is sqrt(10 / N).
        let n = 40u64;
        let total = 1u64 << 20;
        let mut h = Histogram::new();
        let mut binom = 1u64;
        for k in 0..=n {
            let count = (binom as f64 / (1u64 << 40) as f64 * total as f64).round() as u64;
            h.add_count(k as i64, count);
            binom = binom * (n - k) / (k + 1);
        }
        let c = cumulants_from_histogram(&h, 2, 200, 11).unwrap();
        let expected = (10.0 / h.n_samples as f64).sqrt();
        assert!((c[0].stderr / expected - 1.0).abs() < 0.2, "{} vs {}", c[0].stderr, expected);
        assert!(c[0].interval.0 < c[0].value && c[0].value < c[0].interval.1);
    }

    #[test]
    fn gaussian_like_histograms_have_vanishing_excess_kurtosis() {
        // Binomial(n, 1/2) has C4 / C2^2 = -2 / n, which vanishes as n grows.
        let mut last = f64::INFINITY;
        for n in [8u64, 32, 60] {
            let mut h = Histogram::new();
            let mut binom = 1u128;
            for k in 0..=n {
                h.add_count(k as i64, binom as u64);
                binom = binom * (n - k) as u128 / (k + 1) as u128;
            }
            let m = h.moments().unwrap();
            let ratio = m.cumulant(4) / (m.mu2 * m.mu2);
            assert_abs_diff_eq!(ratio, -2.0 / n as f64, epsilon = 1e-9);
            assert!(ratio.abs() < last);
            last = ratio.abs();
        }
    }

    #[test]
    fn raw_moments_to_cumulants() {
        // Fair coin on {-1, 1}.
        assert_eq!(cumulants_from_raw([0.0, 1.0, 0.0, 1.0]), [0.0, 1.0, 0.0, -2.0]);
        let h = Histogram::from_counts([(0, 3), (1, 1), (4, 2)]);
        let n = 6.0;
        let raw = [1, 2, 3, 4].map(|k| (1.0 + 2.0 * 4f64.powi(k)) / n);
        let c = cumulants_from_raw(raw);
        let m = h.moments().unwrap();
        for k in 1..=4 {
            assert_abs_diff_eq!(c[k - 1], m.cumulant(k), epsilon = 1e-12);
        }
    }

    #[test]
    fn empirical_cgf_is_unwrapped() {
        let h = Histogram::from_counts([(5, 1)]);
        // Steps of 0.1 keep the phase increments below pi.
        let lam: Vec<f64> = (-20..=20).map(|k| k as f64 * 0.1).collect();
        let chi = h.empirical_cgf(&lam);
        for (l, c) in lam.iter().zip(&chi) {
            assert_abs_diff_eq!(c.im, 5.0 * l, epsilon = 1e-12);
            assert_abs_diff_eq!(c.re, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn fits() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(-0.5)).collect();
        assert_abs_diff_eq!(log_log_slope(&x, &y), -0.5, epsilon = 1e-12);
        let (m, s) = mean_stderr(&[1.0, 2.0, 3.0]);
        assert_abs_diff_eq!(m, 2.0);
        assert_abs_diff_eq!(s, (1.0f64 / 3.0).sqrt(), epsilon = 1e-12);
    }
}
