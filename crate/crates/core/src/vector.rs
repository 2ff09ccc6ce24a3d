//! Dense real vectors and scalar interval clipping.
//!
//! Every iterate, gradient and momentum buffer in the crate is a [`Vector`].
//! Operations that combine two vectors check dimensions and return
//! [`GalaError::DimensionMismatch`] instead of panicking.

use std::fmt;
use std::ops::Index;

use crate::error::{GalaError, Result};

/// Flat container of `f64` entries with a fixed dimension.
#[derive(Clone, PartialEq, Default)]
pub struct Vector(Vec<f64>);

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl From<Vec<f64>> for Vector {
    fn from(v: Vec<f64>) -> Self {
        Vector(v)
    }
}

impl<const N: usize> From<[f64; N]> for Vector {
    fn from(v: [f64; N]) -> Self {
        Vector(v.to_vec())
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Vector {
    pub fn zeros(dim: usize) -> Self {
        Vector(vec![0.0; dim])
    }

    pub fn filled(dim: usize, value: f64) -> Self {
        Vector(vec![value; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(GalaError::DimensionMismatch {
                expected,
                got: self.dim(),
            })
        }
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// Errors with [`GalaError::NonFinite`] naming `what` if any entry is NaN or infinite.
    pub fn ensure_finite(&self, what: &'static str) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(GalaError::NonFinite { what })
        }
    }

    pub fn dot(&self, other: &Vector) -> Result<f64> {
        other.check_dim(self.dim())?;
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum())
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|a| a * a).sum()
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn norm_l1(&self) -> f64 {
        self.0.iter().map(|a| a.abs()).sum()
    }

    pub fn scaled(&self, s: f64) -> Vector {
        Vector(self.0.iter().map(|a| a * s).collect())
    }

    pub fn sub(&self, other: &Vector) -> Result<Vector> {
        other.check_dim(self.dim())?;
        Ok(Vector(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }

    pub fn add(&self, other: &Vector) -> Result<Vector> {
        other.check_dim(self.dim())?;
        Ok(Vector(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: f64, other: &Vector) -> Result<()> {
        other.check_dim(self.dim())?;
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += s * b;
        }
        Ok(())
    }

    /// Returns `self + s * other` as a new vector.
    pub fn plus_scaled(&self, s: f64, other: &Vector) -> Result<Vector> {
        let mut out = self.clone();
        out.axpy(s, other)?;
        Ok(out)
    }

    /// `self = keep * self + mix * other`, the exponential-moving-average update.
    pub fn blend(&mut self, keep: f64, mix: f64, other: &Vector) -> Result<()> {
        other.check_dim(self.dim())?;
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a = keep * *a + mix * b;
        }
        Ok(())
    }

    pub fn distance(&self, other: &Vector) -> Result<f64> {
        other.check_dim(self.dim())?;
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Vector {
        Vector(self.0.iter().map(|&a| f(a)).collect())
    }
}

/// Inner product `Σ a_i b_i`.
pub fn dot(a: &Vector, b: &Vector) -> Result<f64> {
    a.dot(b)
}

pub fn norm(a: &Vector) -> f64 {
    a.norm()
}

/// Closed scalar interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(GalaError::invalid("interval", "bounds must be finite"));
        }
        if lo > hi {
            return Err(GalaError::invalid(
                "interval",
                format!("lo {lo} exceeds hi {hi}"),
            ));
        }
        Ok(Interval { lo, hi })
    }

    /// `[0, hi]`, the learning-rate range.
    pub fn up_to(hi: f64) -> Result<Self> {
        Self::new(0.0, hi)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Unchecked clip for callers that already rejected NaN.
    pub(crate) fn clamp(&self, x: f64) -> f64 {
        x.max(self.lo).min(self.hi)
    }
}

/// `min(max(x, lo), hi)`; NaN input is an error.
pub fn clip_interval(x: f64, range: Interval) -> Result<f64> {
    if x.is_nan() {
        return Err(GalaError::invalid("x", "cannot clip NaN"));
    }
    Ok(range.clamp(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dot_examples() {
        assert_eq!(dot(&[1.0, 0.0].into(), &[0.0, 1.0].into()).unwrap(), 0.0);
        assert_eq!(dot(&[1.0, 1.0].into(), &[1.0, 1.0].into()).unwrap(), 2.0);
        assert_eq!(
            dot(&[1.0, 2.0, 3.0].into(), &[4.0, 5.0, 6.0].into()).unwrap(),
            32.0
        );
    }

    #[test]
    fn dot_dimension_mismatch() {
        let err = dot(&[1.0, 2.0].into(), &[1.0].into()).unwrap_err();
        assert!(matches!(
            err,
            GalaError::DimensionMismatch {
                expected: 2,
                got: 1
            }
        ));
    }

    #[test]
    fn norm_examples() {
        assert_eq!(norm(&Vector::zeros(3)), 0.0);
        assert_eq!(norm(&[3.0, 4.0].into()), 5.0);
        assert_eq!(norm(&Vector::filled(4, 1.0)), 2.0);
    }

    #[test]
    fn clip_examples() {
        let r = Interval::new(0.0, 0.1).unwrap();
        assert_eq!(clip_interval(0.5, r).unwrap(), 0.1);
        let unit = Interval::new(0.0, 1.0).unwrap();
        assert_eq!(clip_interval(-0.2, unit).unwrap(), 0.0);
        assert_eq!(clip_interval(0.05, unit).unwrap(), 0.05);
        assert!(clip_interval(f64::NAN, unit).is_err());
    }

    #[test]
    fn interval_rejects_bad_bounds() {
        assert!(Interval::new(1.0, 0.0).is_err());
        assert!(Interval::new(0.0, f64::INFINITY).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn ensure_finite_flags_nan() {
        let v: Vector = [1.0, f64::NAN].into();
        assert!(matches!(
            v.ensure_finite("x"),
            Err(GalaError::NonFinite { what: "x" })
        ));
    }

    fn vec_pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (1usize..16).prop_flat_map(|n| {
            (
                prop::collection::vec(-1e3f64..1e3, n),
                prop::collection::vec(-1e3f64..1e3, n),
            )
        })
    }

    proptest! {
        #[test]
        fn clip_is_idempotent(x in -1e6f64..1e6, lo in -10.0f64..10.0, width in 0.0f64..10.0) {
            let r = Interval::new(lo, lo + width).unwrap();
            let once = clip_interval(x, r).unwrap();
            prop_assert_eq!(clip_interval(once, r).unwrap(), once);
            prop_assert!(r.contains(once));
        }

        #[test]
        fn dot_symmetric_and_bilinear((a, b) in vec_pair(), s in -5.0f64..5.0) {
            let (a, b) = (Vector::from(a), Vector::from(b));
            let ab = a.dot(&b).unwrap();
            prop_assert_eq!(ab, b.dot(&a).unwrap());
            let scale = a.norm() * b.norm() * s.abs() + 1.0;
            let lhs = a.scaled(s).dot(&b).unwrap();
            prop_assert!((lhs - s * ab).abs() <= 1e-12 * scale);
            let sum = a.add(&b).unwrap();
            let lhs = sum.dot(&b).unwrap();
            let rhs = ab + b.norm_sq();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (sum.norm() * b.norm() + 1.0));
        }

        #[test]
        fn triangle_inequality((a, b) in vec_pair()) {
            let (a, b) = (Vector::from(a), Vector::from(b));
            let lhs = a.add(&b).unwrap().norm();
            prop_assert!(lhs <= a.norm() + b.norm() + 1e-12 * (a.norm() + b.norm()));
        }
    }

    #[test]
    fn triangle_inequality_ten_thousand_pairs() {
        use crate::rng::RngStream;
        let mut rng = RngStream::new(7, 0);
        for _ in 0..10_000 {
            let n = 1 + (rng.next_u64() % 32) as usize;
            let a = Vector::from((0..n).map(|_| rng.standard_normal()).collect::<Vec<_>>());
            let b = Vector::from((0..n).map(|_| rng.standard_normal()).collect::<Vec<_>>());
            let lhs = a.add(&b).unwrap().norm();
            assert!(lhs <= (a.norm() + b.norm()) * (1.0 + 1e-15));
        }
    }
}
