//! Engines for the full counting statistics of charge transfer in U(1)-symmetric
//! random unitary circuits and in the classical stochastic models that describe
//! them at long times.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only the numerical
//! kernels. Every Monte Carlo routine draws from a per-sample stream derived from
//! `(master seed, engine, sample index)`, so callers may split sample ranges across
//! workers in any way and still obtain bit-identical results. Thread pools, file
//! formats and the command line live in the companion `chargefcs` crate.
//!
//! Module map:
//!
//! - [`params`], [`rng`], [`state`], [`stats`]: shared configuration, randomness,
//!   ladder states and histogram statistics.
//! - [`analytic`]: closed-form SEP generating function, kurtosis decay and the
//!   spin-wave corrections.
//! - [`sep`]: brick-wall exclusion process sampler, kurtosis proxy and an exact
//!   tilted transfer oracle.
//! - [`coupled`]: the interacting n-chain ladder (gate table, sampler, exact engine).
//! - [`magnon`]: few-magnon propagation for the variance correction.
//! - [`replica`]: Weingarten construction of the replicated two-site gate and its
//!   Haar Monte Carlo oracle.
//! - [`quantum`]: statevector simulation of charge-conserving circuits with a
//!   counting field.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analytic;
pub mod coupled;
mod error;
pub mod exact;
pub mod jet;
pub mod linalg;
pub mod magnon;
pub mod ode;
pub mod params;
pub mod polylog;
pub mod quad;
pub mod quantum;
pub mod replica;
pub mod rng;
pub mod sep;
pub mod state;
pub mod stats;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use params::{a_of_d, density_from_mu, ChemicalPotential, ModelParams};
