//! Truncated power series.
//!
//! [`Series`] is a one-variable complex series used to differentiate closed-form
//! generating functions exactly. [`JetLayout`] describes real multivariate series
//! truncated at total degree four: a transfer-matrix engine that carries a jet per
//! state computes the moment generating function `E[exp(s . Q)]` and hence every
//! joint moment of the transfers up to fourth order without finite differences.

use alloc::vec::Vec;

use num_complex::Complex64;

/// Highest total degree kept in moment jets.
pub const JET_ORDER: usize = 4;

/// `sum_k c_k x^k` truncated after `N` coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Series<const N: usize>(pub [Complex64; N]);

impl<const N: usize> Series<N> {
    pub fn zero() -> Self {
        Series([Complex64::new(0.0, 0.0); N])
    }

    pub fn constant(c: Complex64) -> Self {
        let mut s = Self::zero();
        s.0[0] = c;
        s
    }

    /// `exp(i sign x) - 1`.
    pub fn expm1_i(sign: f64) -> Self {
        let mut s = Self::zero();
        let mut term = Complex64::new(1.0, 0.0);
        for k in 1..N {
            term = term * Complex64::new(0.0, sign) / k as f64;
            s.0[k] = term;
        }
        s
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut s = *self;
        s.0.iter_mut().for_each(|v| *v *= c);
        s
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut s = *self;
        s.0.iter_mut().zip(other.0.iter()).for_each(|(a, b)| *a += b);
        s
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut s = Self::zero();
        for i in 0..N {
            for j in 0..N - i {
                s.0[i + j] += self.0[i] * other.0[j];
            }
        }
        s
    }
}

/// Monomial bookkeeping for real jets in up to three variables.
#[derive(Debug, Clone)]
pub struct JetLayout<const K: usize> {
    nvars: usize,
    monomials: [[u8; 3]; K],
    products: Vec<(u8, u8, u8)>,
}

fn degree(m: &[u8; 3]) -> usize {
    m.iter().map(|&e| e as usize).sum()
}

fn factorial(n: u8) -> f64 {
    (1..=n as u32).map(f64::from).product()
}

impl<const K: usize> JetLayout<K> {
    /// Layout for `K` monomials of total degree at most four; `K` must be 5, 15
    /// or 35 (one, two or three variables).
    pub fn new() -> Self {
        let nvars = match K {
            5 => 1,
            15 => 2,
            35 => 3,
            _ => panic!("jet size {K} does not correspond to 1, 2 or 3 variables"),
        };
        let mut monomials = [[0u8; 3]; K];
        let mut n = 0;
        for deg in 0..=JET_ORDER as u8 {
            for e0 in (0..=deg).rev() {
                for e1 in (0..=deg - e0).rev() {
                    let e2 = deg - e0 - e1;
                    let m = [e0, e1, e2];
                    if m[nvars..].iter().any(|&e| e != 0) {
                        continue;
                    }
                    monomials[n] = m;
                    n += 1;
                }
            }
        }
        assert_eq!(n, K);
        let mut products = Vec::new();
        for (a, ma) in monomials.iter().enumerate() {
            for (b, mb) in monomials.iter().enumerate() {
                if degree(ma) + degree(mb) <= JET_ORDER {
                    let mc = [ma[0] + mb[0], ma[1] + mb[1], ma[2] + mb[2]];
                    let c = monomials.iter().position(|m| *m == mc).expect("closed under products");
                    products.push((a as u8, b as u8, c as u8));
                }
            }
        }
        JetLayout {
            nvars,
            monomials,
            products,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn index(&self, exponents: [u8; 3]) -> Option<usize> {
        self.monomials.iter().position(|m| *m == exponents)
    }

    /// Coefficients of `exp(sum_a s_a delta_a)`.
    pub fn exp_factor(&self, deltas: &[i8]) -> [f64; K] {
        let mut out = [0.0; K];
        for (k, m) in self.monomials.iter().enumerate() {
            let mut c = 1.0;
            for v in 0..self.nvars {
                let d = deltas.get(v).copied().unwrap_or(0) as f64;
                c *= d.powi(m[v] as i32) / factorial(m[v]);
            }
            out[k] = c;
        }
        out
    }

    /// `dst += p * (src * factor)`, truncated.
    #[inline]
    pub fn mul_add(&self, dst: &mut [f64; K], src: &[f64; K], factor: &[f64; K], p: f64) {
        for &(a, b, c) in &self.products {
            dst[c as usize] += p * src[a as usize] * factor[b as usize];
        }
    }

    /// `E[prod_a Q_a^{e_a}]` read off a jet normalised so that the constant term is
    /// the total probability.
    pub fn raw_moment(&self, jet: &[f64; K], exponents: [u8; 3]) -> f64 {
        let k = self.index(exponents).expect("moment order within the jet");
        jet[k] * exponents.iter().map(|&e| factorial(e)).product::<f64>()
    }
}

impl<const K: usize> Default for JetLayout<K> {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_sizes() {
        assert_eq!(JetLayout::<5>::new().nvars(), 1);
        assert_eq!(JetLayout::<15>::new().nvars(), 2);
        assert_eq!(JetLayout::<35>::new().nvars(), 3);
    }

    #[test]
    fn exponential_moments_of_a_point_mass() {
        // A single outcome Q = (2, -1): E[Q1^2 Q2] = -4.
        let layout = JetLayout::<15>::new();
        let mut one = [0.0; 15];
        one[0] = 1.0;
        let mut jet = [0.0; 15];
        layout.mul_add(&mut jet, &one, &layout.exp_factor(&[2, -1]), 1.0);
        assert!((layout.raw_moment(&jet, [2, 1, 0]) + 4.0).abs() < 1e-12);
        assert!((layout.raw_moment(&jet, [0, 4, 0]) - 1.0).abs() < 1e-12);
        assert!((layout.raw_moment(&jet, [0, 0, 0]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn series_exp_product() {
        // (e^{ix} - 1)(e^{-ix} - 1) = 2 - 2 cos x = x^2 - x^4/12 + ...
        let p = Series::<5>::expm1_i(1.0).mul(&Series::<5>::expm1_i(-1.0));
        assert!((p.0[2].re - 1.0).abs() < 1e-15);
        assert!((p.0[4].re + 1.0 / 12.0).abs() < 1e-15);
        assert!(p.0[3].norm() < 1e-15 && p.0[1].norm() < 1e-15);
    }
}
