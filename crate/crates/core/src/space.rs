//! Finite-dimensional weighted ℓ_p spaces and their duals.
//!
//! A space is fixed by its dimension `n`, an exponent `1 < p < ∞` and a
//! vector of strictly positive coordinate weights (a discrete measure).
//! The primal norm is `‖x‖_p = (Σ w_s |x_s|^p)^{1/p}`, the dual uses the
//! conjugate exponent `q` with the same weights, and the canonical pairing
//! is `⟨φ, x⟩ = Σ w_s φ_s x_s`. Under that pairing the weighted ℓ_q space is
//! exactly the dual of the weighted ℓ_p space.

use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::coverage::{touch, Op};
use crate::error::{Error, Result};

pub const MIN_EXPONENT: f64 = 1.1;
pub const MAX_EXPONENT: f64 = 10.0;

/// Points with norm at most `THETA_FACTOR * n` are treated as the origin.
pub const THETA_FACTOR: f64 = 1e-12;

macro_rules! point_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(Vec<f64>);

        impl $name {
            pub fn new(coords: Vec<f64>) -> Self {
                Self(coords)
            }

            pub fn zeros(n: usize) -> Self {
                Self(vec![0.0; n])
            }

            pub fn basis(n: usize, i: usize) -> Self {
                let mut v = vec![0.0; n];
                v[i] = 1.0;
                Self(v)
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }

            pub fn coords(&self) -> &[f64] {
                &self.0
            }

            pub fn into_coords(self) -> Vec<f64> {
                self.0
            }

            pub fn iter(&self) -> std::slice::Iter<'_, f64> {
                self.0.iter()
            }

            pub fn scale(&self, s: f64) -> Self {
                Self(self.0.iter().map(|v| v * s).collect())
            }

            /// `self + s * other`
            pub fn axpy(&self, s: f64, other: &Self) -> Self {
                Self(self.0.iter().zip(&other.0).map(|(a, b)| a + s * b).collect())
            }

            pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
                Self(self.0.iter().map(|&v| f(v)).collect())
            }

            /// Componentwise positive part; zero coordinates go to neither part.
            pub fn positive_part(&self) -> Self {
                self.map(|v| if v > 0.0 { v } else { 0.0 })
            }

            pub fn negative_part(&self) -> Self {
                self.map(|v| if v < 0.0 { v } else { 0.0 })
            }

            /// Largest absolute coordinate difference.
            pub fn max_abs_diff(&self, other: &Self) -> f64 {
                self.0
                    .iter()
                    .zip(&other.0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            }
        }

        impl Index<usize> for $name {
            type Output = f64;
            fn index(&self, i: usize) -> &f64 {
                &self.0[i]
            }
        }

        impl From<Vec<f64>> for $name {
            fn from(v: Vec<f64>) -> Self {
                Self(v)
            }
        }

        impl Add for &$name {
            type Output = $name;
            fn add(self, rhs: &$name) -> $name {
                $name(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
            }
        }

        impl Add for $name {
            type Output = $name;
            fn add(self, rhs: $name) -> $name {
                &self + &rhs
            }
        }

        impl Sub for &$name {
            type Output = $name;
            fn sub(self, rhs: &$name) -> $name {
                $name(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
            }
        }

        impl Sub for $name {
            type Output = $name;
            fn sub(self, rhs: $name) -> $name {
                &self - &rhs
            }
        }

        impl AddAssign<&$name> for $name {
            fn add_assign(&mut self, rhs: &$name) {
                self.0.iter_mut().zip(&rhs.0).for_each(|(a, b)| *a += b);
            }
        }

        impl SubAssign<&$name> for $name {
            fn sub_assign(&mut self, rhs: &$name) {
                self.0.iter_mut().zip(&rhs.0).for_each(|(a, b)| *a -= b);
            }
        }

        impl Mul<f64> for &$name {
            type Output = $name;
            fn mul(self, s: f64) -> $name {
                self.scale(s)
            }
        }

        impl Mul<f64> for $name {
            type Output = $name;
            fn mul(self, s: f64) -> $name {
                self.scale(s)
            }
        }

        impl Neg for &$name {
            type Output = $name;
            fn neg(self) -> $name {
                self.scale(-1.0)
            }
        }

        impl Neg for $name {
            type Output = $name;
            fn neg(self) -> $name {
                self.scale(-1.0)
            }
        }
    };
}

point_type!(
    /// An element of the primal space.
    Primal
);
point_type!(
    /// An element of the dual space (paired with [`Primal`] through the
    /// weighted canonical pairing).
    Dual
);

/// Weighted ℓ_p space of fixed dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSpace {
    n: usize,
    p: f64,
    q: f64,
    weights: Vec<f64>,
}

impl LpSpace {
    /// Plain ℓ_p with unit weights.
    pub fn new(n: usize, p: f64) -> Result<Self> {
        Self::with_weights(p, vec![1.0; n])
    }

    pub fn with_weights(p: f64, weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if !(MIN_EXPONENT..=MAX_EXPONENT).contains(&p) || !p.is_finite() {
            return Err(Error::InvalidExponent(p));
        }
        if let Some((index, &value)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w > 0.0))
        {
            return Err(Error::InvalidWeight { index, value });
        }
        let q = p / (p - 1.0);
        debug_assert!((1.0 / p + 1.0 / q - 1.0).abs() <= 1e-12);
        Ok(Self {
            n: weights.len(),
            p,
            q,
            weights,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Conjugate exponent, `1/p + 1/q = 1`.
    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn theta_threshold(&self) -> f64 {
        THETA_FACTOR * self.n as f64
    }

    /// Validated primal point.
    pub fn primal(&self, coords: Vec<f64>) -> Result<Primal> {
        self.check_coords(&coords)?;
        Ok(Primal(coords))
    }

    /// Validated dual point.
    pub fn dual(&self, coords: Vec<f64>) -> Result<Dual> {
        self.check_coords(&coords)?;
        Ok(Dual(coords))
    }

    fn check_coords(&self, coords: &[f64]) -> Result<()> {
        self.check_len(coords.len())?;
        match coords.iter().position(|c| !c.is_finite()) {
            Some(index) => Err(Error::NonFinite { index }),
            None => Ok(()),
        }
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: len,
            });
        }
        Ok(())
    }

    pub fn zero(&self) -> Primal {
        Primal::zeros(self.n)
    }

    pub fn zero_dual(&self) -> Dual {
        Dual::zeros(self.n)
    }

    pub fn norm(&self, x: &Primal) -> f64 {
        touch(Op::NormPrimal);
        self.raw_norm(&x.0)
    }

    pub fn dual_norm(&self, x: &Dual) -> f64 {
        touch(Op::NormDual);
        self.raw_dual_norm(&x.0)
    }

    pub(crate) fn raw_norm(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.n);
        weighted_norm(x, &self.weights, self.p)
    }

    pub(crate) fn raw_dual_norm(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.n);
        weighted_norm(x, &self.weights, self.q)
    }

    pub fn is_theta(&self, x: &Primal) -> bool {
        self.raw_norm(&x.0) <= self.theta_threshold()
    }

    pub fn is_theta_dual(&self, x: &Dual) -> bool {
        self.raw_dual_norm(&x.0) <= self.theta_threshold()
    }

    /// Canonical pairing `⟨x*, x⟩ = Σ w_s x*_s x_s`.
    pub fn pair(&self, xs: &Dual, x: &Primal) -> Result<f64> {
        touch(Op::Pair);
        self.check_len(xs.len())?;
        self.check_len(x.len())?;
        Ok(self.dot(xs, x))
    }

    /// Pairing without the length check; callers guarantee matching points.
    pub(crate) fn dot(&self, xs: &Dual, x: &Primal) -> f64 {
        debug_assert_eq!(xs.len(), x.len());
        self.weights
            .iter()
            .zip(xs.0.iter().zip(&x.0))
            .map(|(w, (a, b))| w * a * b)
            .sum()
    }

    /// Normalized duality mapping `J`, with `J(θ) = θ*`.
    pub fn duality_map(&self, x: &Primal) -> Dual {
        touch(Op::DualityMap);
        Dual(self.raw_duality(&x.0, self.p))
    }

    /// Inverse duality mapping `J*`, with `J*(θ*) = θ`.
    pub fn duality_map_inv(&self, xs: &Dual) -> Primal {
        touch(Op::DualityMapInv);
        Primal(self.raw_duality(&xs.0, self.q))
    }

    /// `|x_s|^{e-2} x_s / ‖x‖^{e-2}` written as `‖x‖ sign(x_s) (|x_s|/‖x‖)^{e-1}`.
    fn raw_duality(&self, x: &[f64], exponent: f64) -> Vec<f64> {
        let norm = weighted_norm(x, &self.weights, exponent);
        if norm <= self.theta_threshold() {
            return vec![0.0; x.len()];
        }
        x.iter()
            .map(|&v| {
                if v == 0.0 {
                    0.0
                } else {
                    norm * v.signum() * (v.abs() / norm).powf(exponent - 1.0)
                }
            })
            .collect()
    }

    /// Smoothness functional `Ψ(x, y) = ⟨J(x), y⟩ / ‖x‖`, the one-sided
    /// derivative of `t ↦ ‖x + t y‖` at `0⁺`.
    pub fn smoothness(&self, x: &Primal, y: &Primal) -> Result<f64> {
        touch(Op::Smoothness);
        self.check_len(x.len())?;
        self.check_len(y.len())?;
        let nx = self.raw_norm(&x.0);
        if nx <= self.theta_threshold() {
            return Err(Error::Degenerate("smoothness requires x ≠ θ"));
        }
        let jx = Dual(self.raw_duality(&x.0, self.p));
        Ok(self.dot(&jx, y) / nx)
    }
}

/// `(Σ w_s |x_s|^e)^{1/e}`, rescaled by the largest entry to avoid
/// overflow and underflow in the power sums.
fn weighted_norm(x: &[f64], w: &[f64], exponent: f64) -> f64 {
    let scale = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let sum: f64 = x
        .iter()
        .zip(w)
        .map(|(v, w)| w * (v.abs() / scale).powf(exponent))
        .sum();
    scale * sum.powf(1.0 / exponent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn l(p: f64, n: usize) -> LpSpace {
        LpSpace::new(n, p).unwrap()
    }

    #[test]
    fn euclidean_norm() {
        let s = l(2.0, 2);
        assert_relative_eq!(s.norm(&Primal::new(vec![3.0, 4.0])), 5.0, epsilon = 1e-15);
        assert_eq!(s.norm(&s.zero()), 0.0);
        assert_relative_eq!(s.dual_norm(&Dual::new(vec![3.0, 4.0])), 5.0, epsilon = 1e-15);
        assert_eq!(s.dual_norm(&s.zero_dual()), 0.0);
    }

    #[test]
    fn cube_norm_and_duality() {
        let s = l(3.0, 3);
        let x = Primal::new(vec![1.0, 1.0, 0.0]);
        let nx = s.norm(&x);
        assert_relative_eq!(nx, 2f64.powf(1.0 / 3.0), epsilon = 1e-15);
        assert_relative_eq!(nx, 1.259921, epsilon = 1e-6);

        let jx = s.duality_map(&x);
        let c = 2f64.powf(-1.0 / 3.0);
        assert_relative_eq!(jx[0], c, epsilon = 1e-15);
        assert_relative_eq!(jx[1], c, epsilon = 1e-15);
        assert_eq!(jx[2], 0.0);
        assert_relative_eq!(jx[0], 0.793701, epsilon = 1e-6);
        // ⟨J(x), x⟩ = ‖x‖² and ‖J(x)‖_q = ‖x‖_p
        assert_relative_eq!(s.pair(&jx, &x).unwrap(), 2f64.powf(2.0 / 3.0), epsilon = 1e-14);
        assert_relative_eq!(s.dual_norm(&jx), nx, epsilon = 1e-14);
    }

    #[test]
    fn weighted_pairing() {
        let s = LpSpace::with_weights(2.0, vec![2.0, 1.0]).unwrap();
        let v = s
            .pair(&Dual::new(vec![1.0, 1.0]), &Primal::new(vec![1.0, 3.0]))
            .unwrap();
        assert_eq!(v, 5.0);
        let e = s
            .pair(&Dual::new(vec![1.0, 0.0]), &Primal::new(vec![0.0, 1.0]))
            .unwrap();
        assert_eq!(e, 0.0);
    }

    #[test]
    fn pair_dimension_mismatch() {
        let s = l(2.0, 2);
        let err = s
            .pair(&Dual::new(vec![1.0]), &Primal::new(vec![1.0, 2.0]))
            .unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                expected: 2,
                found: 1
            }
        );
    }

    #[test]
    fn identity_when_hilbert() {
        let s = LpSpace::with_weights(2.0, vec![0.5, 3.0]).unwrap();
        let x = Primal::new(vec![3.0, 4.0]);
        assert_eq!(s.duality_map(&x).coords(), &[3.0, 4.0]);
        assert_eq!(
            s.duality_map_inv(&Dual::new(vec![3.0, 4.0])).coords(),
            &[3.0, 4.0]
        );
    }

    #[test]
    fn origin_conventions() {
        let s = l(3.0, 4);
        assert_eq!(s.duality_map(&s.zero()), s.zero_dual());
        assert_eq!(s.duality_map_inv(&s.zero_dual()), s.zero());
        assert!(matches!(
            s.smoothness(&s.zero(), &Primal::basis(4, 0)),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn smoothness_examples() {
        let s2 = l(2.0, 2);
        let v = s2
            .smoothness(&Primal::new(vec![1.0, 0.0]), &Primal::new(vec![0.0, 1.0]))
            .unwrap();
        assert_eq!(v, 0.0);

        let s3 = l(3.0, 3);
        let x = Primal::new(vec![1.0, 1.0, 0.0]);
        let y = Primal::new(vec![1.0, -1.0, 0.0]);
        assert_relative_eq!(s3.smoothness(&x, &y).unwrap(), 0.0, epsilon = 1e-15);
        assert_relative_eq!(s3.smoothness(&x, &x).unwrap(), s3.norm(&x), epsilon = 1e-14);
        // forward differences of the norm shrink toward Ψ = 0
        let nx = s3.norm(&x);
        let mut last = f64::INFINITY;
        for k in 2..=6 {
            let t = 10f64.powi(-k);
            let fd = (s3.norm(&x.axpy(t, &y)) - nx) / t;
            assert!(fd.abs() < last);
            last = fd.abs();
        }
        assert!(last < 1e-5);
    }

    #[test]
    fn validation() {
        assert_eq!(LpSpace::new(2, 0.9).unwrap_err(), Error::InvalidExponent(0.9));
        assert_eq!(LpSpace::new(2, 12.0).unwrap_err(), Error::InvalidExponent(12.0));
        assert_eq!(LpSpace::new(0, 2.0).unwrap_err(), Error::ZeroDimension);
        assert_eq!(
            LpSpace::with_weights(2.0, vec![1.0, 0.0]).unwrap_err(),
            Error::InvalidWeight {
                index: 1,
                value: 0.0
            }
        );
        let s = l(2.0, 2);
        assert_eq!(
            s.primal(vec![1.0, f64::NAN]).unwrap_err(),
            Error::NonFinite { index: 1 }
        );
        assert!(s.primal(vec![1.0]).is_err());
        let s = l(1.5, 2);
        assert!((1.0 / s.p() + 1.0 / s.q() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn norm_is_scale_safe() {
        let s = l(4.0, 2);
        let big = Primal::new(vec![1e300, 1e300]);
        assert_relative_eq!(s.norm(&big), 1e300 * 2f64.powf(0.25), max_relative = 1e-14);
        let tiny = Primal::new(vec![1e-300, 0.0]);
        assert_relative_eq!(s.norm(&tiny), 1e-300, max_relative = 1e-14);
    }
}
