//! Discrete-time brick-wall symmetric exclusion process.
//!
//! One time step applies the even bonds `(0,1), (2,3), ...` and then the odd bonds
//! `(1,2), (3,4), ...`; each bond exchanges its two sites with probability 1/2.
//! Layers are applied word-parallel on the packed occupancy bits.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use num_complex::Complex64;
use rand_core::RngCore;

use crate::analytic::CGFPoint;
use crate::exact::{product_distribution, totals_by_time, ComplexTilt, JetTilt, WindowGate};
use crate::jet::JetLayout;
use crate::params::ModelParams;
use crate::rng::{stream, EngineId};
use crate::state::{sample_initial_state, BitRow, TransferRecord};
use crate::stats::{cumulants_from_raw, Histogram};
use crate::{Error, Result};

/// Largest chain handled by the exact oracle.
pub const EXACT_MAX_L: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

/// Bit masks selecting the left site of every bond of one layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerMasks {
    pub even: Vec<u64>,
    pub odd: Vec<u64>,
}

impl LayerMasks {
    pub fn new(l: usize) -> Self {
        let words = l.div_ceil(64);
        let mut even = vec![0u64; words];
        let mut odd = vec![0u64; words];
        for x in 0..l.saturating_sub(1) {
            let m = if x % 2 == 0 { &mut even } else { &mut odd };
            m[x / 64] |= 1 << (x % 64);
        }
        LayerMasks { even, odd }
    }

    pub fn get(&self, parity: Parity) -> &[u64] {
        match parity {
            Parity::Even => &self.even,
            Parity::Odd => &self.odd,
        }
    }
}

/// Applies one layer in place: bond `(x, x+1)` with `x` in `mask` exchanges its
/// sites when the matching random bit is set. Returns the charge moved left to
/// right across the bond whose left site is `central`.
pub fn apply_layer<R: RngCore + ?Sized>(words: &mut [u64], mask: &[u64], central: usize, rng: &mut R) -> i64 {
    let n = words.len();
    let cw = central / 64;
    let cb = central % 64;
    let mut carry = 0u64;
    let mut moved = 0i64;
    for k in 0..n {
        let w = words[k];
        let next = if k + 1 < n { words[k + 1] } else { 0 };
        let d = if mask[k] != 0 {
            let y = (w >> 1) | (next << 63);
            (w ^ y) & mask[k] & rng.next_u64()
        } else {
            0
        };
        if k == cw && (d >> cb) & 1 == 1 {
            moved = if (w >> cb) & 1 == 1 { 1 } else { -1 };
        }
        words[k] = w ^ d ^ (d << 1) ^ carry;
        carry = d >> 63;
    }
    moved
}

/// One half-step on a single chain; the central-bond transfer is added to
/// `record.q_transfer[0]`.
pub fn brickwall_step<R: RngCore + ?Sized>(
    row: &mut BitRow,
    parity: Parity,
    masks: &LayerMasks,
    central: usize,
    rng: &mut R,
    record: &mut TransferRecord,
) {
    let q = apply_layer(row.words_mut(), masks.get(parity), central, rng);
    record.q_transfer[0] += q;
}

/// Evolves `row` for `t` full steps and returns the transfer.
pub fn evolve_row<R: RngCore + ?Sized>(row: &mut BitRow, t: usize, masks: &LayerMasks, central: usize, rng: &mut R) -> i64 {
    let mut q = 0;
    for _ in 0..t {
        q += apply_layer(row.words_mut(), &masks.even, central, rng);
        q += apply_layer(row.words_mut(), &masks.odd, central, rng);
    }
    q
}

/// Transfer of trajectory `index`, drawn from its own stream.
pub fn sep_trajectory(params: &ModelParams, masks: &LayerMasks, index: u64) -> i64 {
    let mut rng = stream(params.seed, EngineId::SepMc, index);
    let mut row = sample_initial_state(params, 0, &mut rng);
    evolve_row(&mut row, params.t, masks, params.central_site(), &mut rng)
}

/// Histogram of the trajectories with indices in `range`.
pub fn run_sep_range(params: &ModelParams, range: Range<u64>) -> Result<Histogram> {
    params.validate()?;
    let masks = LayerMasks::new(params.l);
    let mut hist = Histogram::new();
    for i in range {
        hist.add(sep_trajectory(params, &masks, i));
    }
    Ok(hist)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SepRunConfig {
    pub params: ModelParams,
    pub n_samples: u64,
    pub lambda_grid: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SepRunResult {
    pub histogram: Histogram,
    pub cgf: Option<Vec<CGFPoint>>,
}

/// Samples `n_samples` trajectories (indices `0..n_samples`) single-threaded.
pub fn run_sep_fcs(config: &SepRunConfig) -> Result<SepRunResult> {
    if config.n_samples == 0 {
        return Err(Error::invalid("n_samples", "need at least one sample"));
    }
    let histogram = run_sep_range(&config.params, 0..config.n_samples)?;
    Ok(finish_run(histogram, config))
}

/// Attaches the empirical CGF requested by `config`.
pub fn finish_run(histogram: Histogram, config: &SepRunConfig) -> SepRunResult {
    let t = config.params.t as f64;
    let cgf = config.lambda_grid.as_ref().map(|grid| {
        grid.iter()
            .zip(histogram.empirical_cgf(grid))
            .map(|(&lambda, chi)| CGFPoint { lambda, chi, t })
            .collect()
    });
    SepRunResult { histogram, cgf }
}

/// Kurtosis proxy `mean(mu_4) / mean(mu_2^2)` over an ensemble, with a jackknife
/// standard error (zero for a single member).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KurtosisProxy {
    pub value: f64,
    pub stderr: f64,
    pub n_members: usize,
}

pub fn kurtosis_proxy(ensemble: &[Histogram]) -> Result<KurtosisProxy> {
    if ensemble.is_empty() {
        return Err(Error::EmptyInput("kurtosis proxy ensemble"));
    }
    let parts = ensemble
        .iter()
        .map(|h| h.moments().map(|m| (m.proxy_numerator(), m.proxy_denominator())))
        .collect::<Result<Vec<_>>>()?;
    kurtosis_proxy_from_parts(&parts)
}

/// The proxy from per-member `(mu_4, mu_2^2)` pairs.
pub fn kurtosis_proxy_from_parts(parts: &[(f64, f64)]) -> Result<KurtosisProxy> {
    let n = parts.len();
    if n == 0 {
        return Err(Error::EmptyInput("kurtosis proxy ensemble"));
    }
    let num: f64 = parts.iter().map(|p| p.0).sum();
    let den: f64 = parts.iter().map(|p| p.1).sum();
    let value = num / den;
    let stderr = if n < 2 {
        0.0
    } else {
        let loo: Vec<f64> = parts.iter().map(|p| (num - p.0) / (den - p.1)).collect();
        let mean = loo.iter().sum::<f64>() / n as f64;
        let var: f64 = loo.iter().map(|v| (v - mean) * (v - mean)).sum();
        (var * (n - 1) as f64 / n as f64).sqrt()
    };
    Ok(KurtosisProxy {
        value,
        stderr,
        n_members: n,
    })
}

fn check_exact(params: &ModelParams) -> Result<()> {
    params.validate()?;
    if params.l > EXACT_MAX_L {
        return Err(Error::ResourceCap {
            what: "exact SEP chain length",
            requested: params.l as u64,
            limit: EXACT_MAX_L as u64,
        });
    }
    Ok(())
}

fn initial(params: &ModelParams) -> Result<Vec<f64>> {
    product_distribution(params.l, 1, |x| params.site_density(x))
}

/// `Z(lambda, s) = <exp(i lambda Q)>` after `s = 0, ..., t` steps.
pub fn exact_sep_cgf_by_time(params: &ModelParams, lambda: f64) -> Result<Vec<Complex64>> {
    check_exact(params)?;
    let gate = WindowGate::sep();
    totals_by_time(
        &gate,
        ComplexTilt::new(&[lambda]),
        params.l,
        params.central_site(),
        &initial(params)?,
        params.t,
    )
}

/// `Z(lambda, t) = <exp(i lambda Q)>` by tilted transfer over all `2^L` states.
pub fn exact_sep_cgf(params: &ModelParams, lambda: f64) -> Result<Complex64> {
    Ok(*exact_sep_cgf_by_time(params, lambda)?.last().expect("t + 1 entries"))
}

/// Exact cumulants `C_1..C_4` after each of `0..=t` steps.
pub fn exact_sep_cumulants_by_time(params: &ModelParams) -> Result<Vec<[f64; 4]>> {
    check_exact(params)?;
    let gate = WindowGate::sep();
    let layout = JetLayout::<5>::new();
    let jets = totals_by_time(
        &gate,
        JetTilt::<5>::new(),
        params.l,
        params.central_site(),
        &initial(params)?,
        params.t,
    )?;
    Ok(jets
        .iter()
        .map(|j| {
            let raw = [1u8, 2, 3, 4].map(|k| layout.raw_moment(j, [k, 0, 0]));
            cumulants_from_raw(raw)
        })
        .collect())
}

/// Exact mean transfer `C_1(t)` for any `L`: the mean density obeys the linear
/// layer map that replaces both sites of every active bond by their average.
pub fn exact_mean_transfer(params: &ModelParams) -> Result<f64> {
    params.validate()?;
    let l = params.l;
    let mut rho: Vec<f64> = (0..l).map(|x| params.site_density(x)).collect();
    let right0: f64 = rho[l / 2..].iter().sum();
    for _ in 0..params.t {
        for start in [0, 1] {
            for x in (start..l - 1).step_by(2) {
                let m = 0.5 * (rho[x] + rho[x + 1]);
                rho[x] = m;
                rho[x + 1] = m;
            }
        }
    }
    Ok(rho[l / 2..].iter().sum::<f64>() - right0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ChemicalPotential;
    use crate::stats::mean_stderr;
    use proptest::prelude::*;
    use rand_core::RngCore;

    /// Every random bit set: all bonds of the layer fire.
    struct AllOnes;
    impl RngCore for AllOnes {
        fn next_u32(&mut self) -> u32 {
            u32::MAX
        }
        fn next_u64(&mut self) -> u64 {
            u64::MAX
        }
        fn fill_bytes(&mut self, dest: &mut [u8]) {
            dest.fill(0xff);
        }
        fn try_fill_bytes(&mut self, dest: &mut [u8]) -> core::result::Result<(), rand_core::Error> {
            dest.fill(0xff);
            Ok(())
        }
    }

    fn bits(row: &BitRow) -> Vec<bool> {
        row.iter().collect()
    }

    #[test]
    fn forced_exchanges() {
        let masks = LayerMasks::new(4);
        let mut row = BitRow::domain_wall(4);
        let mut rec = TransferRecord::new(1);
        // Even layer: (1,1) and (0,0) pairs are inert.
        brickwall_step(&mut row, Parity::Even, &masks, 1, &mut AllOnes, &mut rec);
        assert_eq!(bits(&row), [true, true, false, false]);
        assert_eq!(rec.q_transfer[0], 0);
        // Odd layer: the central (1,0) pair swaps and counts +1.
        brickwall_step(&mut row, Parity::Odd, &masks, 1, &mut AllOnes, &mut rec);
        assert_eq!(bits(&row), [true, false, true, false]);
        assert_eq!(rec.q_transfer[0], 1);
        // A right-to-left move counts -1.
        let mut row = BitRow::from_bits(&[false, false, true, true]);
        let mut rec = TransferRecord::new(1);
        brickwall_step(&mut row, Parity::Odd, &masks, 1, &mut AllOnes, &mut rec);
        assert_eq!(bits(&row), [false, true, false, true]);
        assert_eq!(rec.q_transfer[0], -1);
    }

    #[test]
    fn word_boundary_exchange() {
        // Bond (63, 64) straddles two words.
        let l = 130;
        let masks = LayerMasks::new(l);
        let mut row = BitRow::zeros(l);
        row.set(63, true);
        let q = apply_layer(row.words_mut(), &masks.odd, 63, &mut AllOnes);
        assert_eq!(q, 1);
        assert!(!row.get(63) && row.get(64));
        assert_eq!(row.count_ones(), 1);
        // The last bond (128, 129) is even; site 129 has no odd partner.
        let mut row = BitRow::zeros(l);
        row.set(129, true);
        apply_layer(row.words_mut(), &masks.odd, 63, &mut AllOnes);
        assert!(row.get(129));
        apply_layer(row.words_mut(), &masks.even, 63, &mut AllOnes);
        assert!(row.get(128) && !row.get(129));
    }

    #[test]
    fn two_site_domain_wall() {
        let params = ModelParams::new(2, 1, ChemicalPotential::PlusInfinity).with_seed(3);
        let n = 20_000u64;
        let hist = run_sep_range(&params, 0..n).unwrap();
        assert_eq!(hist.counts.keys().copied().collect::<Vec<_>>(), [0, 1]);
        let p1 = hist.probability(1);
        assert!((p1 - 0.5).abs() < 4.0 * (0.25 / n as f64).sqrt());
        let lam = 0.8;
        let z = exact_sep_cgf(&params, lam).unwrap();
        let expect = (Complex64::new(1.0, 0.0) + Complex64::new(0.0, lam).exp()) * 0.5;
        assert!((z - expect).norm() < 1e-15);
    }

    #[test]
    fn zero_time_is_point_mass() {
        let params = ModelParams::new(16, 0, ChemicalPotential::ZERO);
        let hist = run_sep_range(&params, 0..100).unwrap();
        assert_eq!(hist.probability(0), 1.0);
    }

    #[test]
    fn exact_normalisation() {
        let params = ModelParams::new(8, 5, ChemicalPotential::Finite(2.0));
        for z in exact_sep_cgf_by_time(&params, 0.0).unwrap() {
            assert!((z - 1.0).norm() < 1e-13);
        }
        let big = ModelParams::new(16, 1, ChemicalPotential::ZERO);
        assert!(matches!(exact_sep_cgf(&big, 0.1), Err(Error::ResourceCap { .. })));
    }

    #[test]
    fn exact_cumulants_match_sampler() {
        let params = ModelParams::new(8, 4, ChemicalPotential::PlusInfinity).with_seed(11);
        let exact = exact_sep_cumulants_by_time(&params).unwrap()[4];
        let mean_only = exact_mean_transfer(&ModelParams { t: 4, ..params }).unwrap();
        assert!((mean_only - exact[0]).abs() < 1e-12);
        let hist = run_sep_range(&params, 0..40_000).unwrap();
        let samples: Vec<f64> = hist
            .counts
            .iter()
            .flat_map(|(&q, &c)| core::iter::repeat_n(q as f64, c as usize))
            .collect();
        let (mean, se) = mean_stderr(&samples);
        assert!((mean - exact[0]).abs() < 4.0 * se, "{mean} vs {}", exact[0]);
    }

    #[test]
    fn proxy_single_member_is_sample_kurtosis() {
        let h = Histogram::from_counts([(-2, 1), (0, 3), (1, 2), (5, 1)]);
        let m = h.moments().unwrap();
        let k = kurtosis_proxy(&[h]).unwrap();
        assert!((k.value - m.mu4 / (m.mu2 * m.mu2)).abs() < 1e-14);
        assert_eq!(k.stderr, 0.0);
        assert!(kurtosis_proxy(&[]).is_err());
    }

    #[test]
    fn proxy_of_gaussian_batches_is_three() {
        // Binomial(400, 1/2) batches: kurtosis 3 - 2/400.
        let hist = Histogram::from_counts((0..=400i64).map(|k| {
            let mut c = 1.0f64;
            for j in 0..k {
                c *= (400 - j) as f64 / (j + 1) as f64;
            }
            (k, (c * 2f64.powi(-400) * 1e12).round() as u64)
        }));
        let k = kurtosis_proxy(&[hist.clone(), hist]).unwrap();
        assert!((k.value - (3.0 - 2.0 / 400.0)).abs() < 1e-6, "{}", k.value);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn conservation_and_light_cone(seed in 0u64..1000, l in 1usize..50, t in 0usize..40, mu in -3.0f64..3.0) {
            let l = 2 * l;
            let params = ModelParams::new(l, t, ChemicalPotential::Finite(mu)).with_seed(seed);
            let masks = LayerMasks::new(l);
            let mut rng = stream(seed, EngineId::SepMc, 0);
            let mut row = sample_initial_state(&params, 0, &mut rng);
            let before = row.count_ones();
            let q = evolve_row(&mut row, t, &masks, params.central_site(), &mut rng);
            prop_assert_eq!(row.count_ones(), before);
            prop_assert!(q.unsigned_abs() as usize <= t);
            // Nothing beyond the last site.
            let tail = row.words().last().copied().unwrap_or(0);
            if l % 64 != 0 {
                prop_assert_eq!(tail >> (l % 64), 0);
            }
        }
    }
}
