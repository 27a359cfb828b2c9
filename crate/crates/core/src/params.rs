//! Experiment parameters shared by every engine.


use crate::{Error, Result};

/// Chemical potential of the left half; the right half carries the opposite value.
///
/// The infinite values are explicit so that the domain wall `1…10…0` is sampled
/// deterministically rather than through a saturated float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChemicalPotential {
    Finite(f64),
    PlusInfinity,
    MinusInfinity,
}

impl ChemicalPotential {
    pub const ZERO: Self = ChemicalPotential::Finite(0.0);

    /// Parses a float, mapping `±inf` onto the explicit infinite variants.
    pub fn from_f64(mu: f64) -> Result<Self> {
        if mu.is_nan() {
            return Err(Error::invalid("mu", "must not be NaN"));
        }
        Ok(if mu == f64::INFINITY {
            ChemicalPotential::PlusInfinity
        } else if mu == f64::NEG_INFINITY {
            ChemicalPotential::MinusInfinity
        } else {
            ChemicalPotential::Finite(mu)
        })
    }

    pub fn to_f64(self) -> f64 {
        match self {
            ChemicalPotential::Finite(m) => m,
            ChemicalPotential::PlusInfinity => f64::INFINITY,
            ChemicalPotential::MinusInfinity => f64::NEG_INFINITY,
        }
    }

    pub fn negate(self) -> Self {
        match self {
            ChemicalPotential::Finite(m) => ChemicalPotential::Finite(-m),
            ChemicalPotential::PlusInfinity => ChemicalPotential::MinusInfinity,
            ChemicalPotential::MinusInfinity => ChemicalPotential::PlusInfinity,
        }
    }

    /// `tanh(mu / 2)`, saturating to `±1`.
    pub fn tanh_half(self) -> f64 {
        match self {
            ChemicalPotential::Finite(m) => (m / 2.0).tanh(),
            ChemicalPotential::PlusInfinity => 1.0,
            ChemicalPotential::MinusInfinity => -1.0,
        }
    }

    /// Density of the left half, `e^mu / (1 + e^mu)`.
    pub fn left_density(self) -> f64 {
        density_from_mu(self)
    }

    /// Density of the right half, evaluated at `-mu`.
    pub fn right_density(self) -> f64 {
        density_from_mu(self.negate())
    }
}

/// Inter-chain coupling `a(d) = 1 / (4 d^4 - 1)`.
pub fn a_of_d(d: f64) -> Result<f64> {
    if !(d >= 1.0) || !d.is_finite() {
        return Err(Error::invalid("d", "qudit dimension must be a finite real >= 1"));
    }
    let d2 = d * d;
    Ok(1.0 / (4.0 * d2 * d2 - 1.0))
}

/// Local density `e^mu / (1 + e^mu)`, written to stay finite for large `|mu|`.
pub fn density_from_mu(mu: ChemicalPotential) -> f64 {
    match mu {
        ChemicalPotential::PlusInfinity => 1.0,
        ChemicalPotential::MinusInfinity => 0.0,
        ChemicalPotential::Finite(m) => {
            if m >= 0.0 {
                1.0 / (1.0 + (-m).exp())
            } else {
                let e = m.exp();
                e / (1.0 + e)
            }
        }
    }
}

/// Single source of experiment configuration. Boundaries are always open.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Number of sites (even).
    pub l: usize,
    /// Number of brick-wall time steps (one even plus one odd layer each).
    pub t: usize,
    /// Qudit dimension; the stochastic engines accept non-integer values.
    pub d: f64,
    /// Number of replica chains, 1 to 3.
    pub n_chains: usize,
    pub mu: ChemicalPotential,
    pub seed: u64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            l: 64,
            t: 16,
            d: 2.0,
            n_chains: 1,
            mu: ChemicalPotential::PlusInfinity,
            seed: 0,
        }
    }
}

impl ModelParams {
    pub fn new(l: usize, t: usize, mu: ChemicalPotential) -> Self {
        ModelParams {
            l,
            t,
            mu,
            ..Default::default()
        }
    }

    pub fn with_chains(mut self, n_chains: usize) -> Self {
        self.n_chains = n_chains;
        self
    }

    pub fn with_d(mut self, d: f64) -> Self {
        self.d = d;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.l == 0 || self.l % 2 != 0 {
            return Err(Error::invalid("L", "site count must be even and positive"));
        }
        if !(1..=3).contains(&self.n_chains) {
            return Err(Error::invalid("n_chains", "replica count must be 1, 2 or 3"));
        }
        a_of_d(self.d)?;
        if let ChemicalPotential::Finite(m) = self.mu {
            if !m.is_finite() {
                return Err(Error::invalid("mu", "use the explicit infinite variants"));
            }
        }
        Ok(())
    }

    /// Coupling `a(d)` for these parameters.
    pub fn a(&self) -> Result<f64> {
        a_of_d(self.d)
    }

    /// Lower site (0-based) of the central bond; the bond joins `L/2 - 1` and `L/2`.
    pub fn central_site(&self) -> usize {
        self.l / 2 - 1
    }

    /// Occupation probability of site `x` in the biased product measure.
    pub fn site_density(&self, x: usize) -> f64 {
        if x < self.l / 2 {
            self.mu.left_density()
        } else {
            self.mu.right_density()
        }
    }
}
