//! Occupancy ladders and transfer counters.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::params::ModelParams;

/// Occupancy bits of one chain, packed 64 sites per word. Bits at positions `>= len`
/// are always zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitRow {
    words: Vec<u64>,
    len: usize,
}

impl BitRow {
    pub fn zeros(len: usize) -> Self {
        BitRow {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut row = BitRow::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            row.set(i, b);
        }
        row
    }

    /// Domain wall: the first `len / 2` sites occupied.
    pub fn domain_wall(len: usize) -> Self {
        let mut row = BitRow::zeros(len);
        for i in 0..len / 2 {
            row.set(i, true);
        }
        row
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let bit = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= bit;
        } else {
            self.words[i / 64] &= !bit;
        }
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    /// Packs the row into an integer (requires `len <= 64`).
    pub fn to_u64(&self) -> u64 {
        debug_assert!(self.len <= 64);
        self.words.first().copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }
}

/// `n_chains x L` occupancy bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LadderState {
    pub chains: Vec<BitRow>,
}

impl LadderState {
    pub fn n_chains(&self) -> usize {
        self.chains.len()
    }

    pub fn len(&self) -> usize {
        self.chains.first().map_or(0, BitRow::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn charges(&self) -> Vec<u32> {
        self.chains.iter().map(BitRow::count_ones).collect()
    }

    /// Samples every chain independently from the biased product measure.
    pub fn sample<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> Self {
        LadderState {
            chains: (0..params.n_chains)
                .map(|c| sample_initial_state(params, c, rng))
                .collect(),
        }
    }
}

/// Net number of charges moved left to right across the central bond, per chain.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TransferRecord {
    pub q_transfer: Vec<i64>,
}

impl TransferRecord {
    pub fn new(n_chains: usize) -> Self {
        TransferRecord {
            q_transfer: vec![0; n_chains],
        }
    }
}

/// Samples one chain of the initial state: left sites are occupied with
/// probability `rho(mu)`, right sites with `rho(-mu)`.
///
/// `chain_index` only labels the row; the randomness comes from `rng`, which the
/// caller derives per sample (and per chain) from the master seed.
pub fn sample_initial_state<R: Rng + ?Sized>(
    params: &ModelParams,
    chain_index: usize,
    rng: &mut R,
) -> BitRow {
    debug_assert!(chain_index < params.n_chains.max(1));
    let l = params.l;
    let half = l / 2;
    let mut row = BitRow::zeros(l);
    fill_half(&mut row, 0..half, params.mu.left_density(), rng);
    fill_half(&mut row, half..l, params.mu.right_density(), rng);
    row
}

fn fill_half<R: Rng + ?Sized>(
    row: &mut BitRow,
    sites: core::ops::Range<usize>,
    rho: f64,
    rng: &mut R,
) {
    if rho >= 1.0 {
        sites.for_each(|x| row.set(x, true));
    } else if rho <= 0.0 {
    } else if rho == 0.5 {
        let mut bits = 0u64;
        for (k, x) in sites.enumerate() {
            if k % 64 == 0 {
                bits = rng.next_u64();
            }
            row.set(x, (bits >> (k % 64)) & 1 == 1);
        }
    } else {
        for x in sites {
            row.set(x, rng.gen::<f64>() < rho);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ChemicalPotential;
    use crate::rng::{stream, EngineId};

    #[test]
    fn domain_wall_is_deterministic() {
        let p = ModelParams::new(10, 0, ChemicalPotential::PlusInfinity);
        for i in 0..20 {
            let row = sample_initial_state(&p, 0, &mut stream(1, EngineId::InitialState, i));
            assert_eq!(row, BitRow::domain_wall(10));
        }
        let p = ModelParams::new(6, 0, ChemicalPotential::MinusInfinity);
        let row = sample_initial_state(&p, 0, &mut stream(1, EngineId::InitialState, 0));
        assert_eq!(row.iter().collect::<Vec<_>>(), [false, false, false, true, true, true]);
    }

    #[test]
    fn bit_row_roundtrip() {
        let bits = [true, false, true, true, false, false, true, false];
        let row = BitRow::from_bits(&bits);
        assert_eq!(row.iter().collect::<Vec<_>>(), bits);
        assert_eq!(row.count_ones(), 4);
        assert_eq!(row.to_u64(), 0b0100_1101);
        let wide = BitRow::domain_wall(130);
        assert_eq!(wide.count_ones(), 65);
        assert!(wide.get(64) && !wide.get(65));
    }

    #[test]
    fn empirical_density_converges() {
        for (mu, l) in [(ChemicalPotential::Finite(2.0), 4), (ChemicalPotential::ZERO, 70)] {
            let p = ModelParams::new(l, 0, mu);
            let n = 100_000u64;
            let (mut left, mut right) = (0u64, 0u64);
            for i in 0..n {
                let row = sample_initial_state(&p, 0, &mut stream(3, EngineId::InitialState, i));
                left += row.get(0) as u64;
                right += row.get(l - 1) as u64;
            }
            let tol = 4.0 / (n as f64).sqrt();
            assert!((left as f64 / n as f64 - mu.left_density()).abs() < tol);
            assert!((right as f64 / n as f64 - mu.right_density()).abs() < tol);
        }
    }
}
