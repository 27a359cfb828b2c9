//! Small dense complex matrices and Haar-random unitaries.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        m
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    m.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        m
    }

    /// Max-norm of `U^dagger U - 1`.
    pub fn unitarity_residual(&self) -> f64 {
        let p = self.adjoint().mul(self);
        let id = Self::identity(self.n);
        p.data
            .iter()
            .zip(&id.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Haar-random `n x n` unitary: Gram-Schmidt on the columns of a complex Ginibre
/// matrix. Normalising each column against the previous ones is QR with a
/// positive diagonal in `R`, which is the phase fix that makes the law Haar.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let scale = core::f64::consts::FRAC_1_SQRT_2;
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex64::new(re * scale, im * scale)
                })
                .collect()
        })
        .collect();
    for j in 0..n {
        for k in 0..j {
            let (done, rest) = cols.split_at_mut(j);
            let q = &done[k];
            let v = &mut rest[0];
            let proj: Complex64 = q.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= proj * qi;
            }
        }
        let norm = cols[j].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        cols[j].iter_mut().for_each(|c| *c /= norm);
    }
    let mut m = CMatrix::zeros(n);
    for (j, col) in cols.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            m.set(i, j, v);
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, EngineId};

    #[test]
    fn haar_samples_are_unitary() {
        let mut rng = stream(1, EngineId::HaarMc, 0);
        for n in [1, 2, 5, 8] {
            let u = haar_unitary(n, &mut rng);
            assert!(u.unitarity_residual() < 1e-12);
        }
    }

    #[test]
    fn haar_second_moment() {
        // E|U_00|^2 = 1/n and E|U_00|^4 = 2/(n(n+1)).
        let n = 3;
        let samples = 40_000;
        let (mut m2, mut m4) = (0.0, 0.0);
        for i in 0..samples {
            let mut rng = stream(2, EngineId::HaarMc, i);
            let x = haar_unitary(n, &mut rng).get(0, 0).norm_sqr();
            m2 += x;
            m4 += x * x;
        }
        m2 /= samples as f64;
        m4 /= samples as f64;
        assert!((m2 - 1.0 / 3.0).abs() < 0.005, "{m2}");
        assert!((m4 - 2.0 / 12.0).abs() < 0.005, "{m4}");
    }
}
