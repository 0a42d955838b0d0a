//! Affine transformations, points and affine functions in dimension `n`.
//!
//! A transformation `a = (C, P)` is a translation `C` plus an invertible
//! linear part `P`. It acts on the coordinates of a point by the inverse,
//! `V' = C' + P⁻¹V` with `C' = −P⁻¹C`, so that the pair `(C, P)` reads as
//! "the new frame, expressed in the old one". The linear lift
//!
//! ```text
//! lift(a) = | 1  0 |
//!           | C  P |
//! ```
//!
//! turns composition into matrix multiplication and is the representation
//! every higher-level transformation law in this crate reduces to.
//!
//! Dimension is a runtime value: the Galilean modules fix `n = 4`, while
//! tests exercise small `n` directly.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Linear parts with `|det P|` at or below this are rejected as singular.
pub const DET_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Error)]
pub enum AffineError {
    #[error("linear part must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("linear part is numerically singular (|det P| = {det:.3e})")]
    Singular { det: f64 },
}

/// A point of `n`-dimensional affine space, as components in some frame.
///
/// Components are relative to a frame chosen by the caller; this module
/// never interprets them physically.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinePoint {
    components: DVector<f64>,
}

impl AffinePoint {
    pub fn new(components: DVector<f64>) -> Self {
        Self { components }
    }

    pub fn from_slice(components: &[f64]) -> Self {
        Self::new(DVector::from_row_slice(components))
    }

    pub fn dimension(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &DVector<f64> {
        &self.components
    }
}

/// An invertible affine transformation `(C, P)` of `n`-dimensional space.
///
/// `P⁻¹` and `C' = −P⁻¹C` are computed once at construction; every
/// application reuses them.
#[derive(Debug, Clone)]
pub struct AffineTransformation {
    translation: DVector<f64>,
    linear: DMatrix<f64>,
    linear_inverse: DMatrix<f64>,
    inverse_translation: DVector<f64>,
}

impl AffineTransformation {
    /// Builds `(C, P)`, rejecting non-square or singular `P`.
    pub fn new(translation: DVector<f64>, linear: DMatrix<f64>) -> Result<Self, AffineError> {
        if linear.nrows() != linear.ncols() {
            return Err(AffineError::NotSquare {
                rows: linear.nrows(),
                cols: linear.ncols(),
            });
        }
        if translation.len() != linear.nrows() {
            return Err(AffineError::DimensionMismatch {
                expected: linear.nrows(),
                found: translation.len(),
            });
        }
        let det = linear.determinant();
        if !(det.abs() > DET_TOLERANCE) {
            return Err(AffineError::Singular { det });
        }
        let linear_inverse = linear
            .clone()
            .try_inverse()
            .ok_or(AffineError::Singular { det })?;
        let inverse_translation = -(&linear_inverse * &translation);
        Ok(Self {
            translation,
            linear,
            linear_inverse,
            inverse_translation,
        })
    }

    pub fn identity(dimension: usize) -> Self {
        Self {
            translation: DVector::zeros(dimension),
            linear: DMatrix::identity(dimension, dimension),
            linear_inverse: DMatrix::identity(dimension, dimension),
            inverse_translation: DVector::zeros(dimension),
        }
    }

    pub fn dimension(&self) -> usize {
        self.translation.len()
    }

    /// The translation `C`.
    pub fn translation(&self) -> &DVector<f64> {
        &self.translation
    }

    /// The linear part `P`.
    pub fn linear(&self) -> &DMatrix<f64> {
        &self.linear
    }

    /// Cached `P⁻¹`.
    pub fn linear_inverse(&self) -> &DMatrix<f64> {
        &self.linear_inverse
    }

    /// Cached `C' = −P⁻¹C`, the translation of the inverse transformation.
    pub fn inverse_translation(&self) -> &DVector<f64> {
        &self.inverse_translation
    }

    /// The `(n+1)×(n+1)` lift `[[1, 0], [C, P]]`.
    pub fn lift(&self) -> DMatrix<f64> {
        let n = self.dimension();
        let mut m = DMatrix::zeros(n + 1, n + 1);
        m[(0, 0)] = 1.0;
        m.view_mut((1, 0), (n, 1)).copy_from(&self.translation);
        m.view_mut((1, 1), (n, n)).copy_from(&self.linear);
        m
    }

    /// New coordinates of a point: `V' = C' + P⁻¹V`.
    pub fn apply(&self, point: &AffinePoint) -> Result<AffinePoint, AffineError> {
        if point.dimension() != self.dimension() {
            return Err(AffineError::DimensionMismatch {
                expected: self.dimension(),
                found: point.dimension(),
            });
        }
        Ok(AffinePoint::new(
            &self.inverse_translation + &self.linear_inverse * point.components(),
        ))
    }

    /// `compose(a, b)` has `lift = lift(a)·lift(b)`: apply `a` first, then `b`.
    ///
    /// Caches are composed directly, so no inverse is recomputed.
    pub fn compose(&self, other: &Self) -> Result<Self, AffineError> {
        if other.dimension() != self.dimension() {
            return Err(AffineError::DimensionMismatch {
                expected: self.dimension(),
                found: other.dimension(),
            });
        }
        let linear = &self.linear * &other.linear;
        let linear_inverse = &other.linear_inverse * &self.linear_inverse;
        let translation = &self.translation + &self.linear * &other.translation;
        let inverse_translation = -(&linear_inverse * &translation);
        Ok(Self {
            translation,
            linear,
            linear_inverse,
            inverse_translation,
        })
    }

    /// The inverse transformation `(C', P⁻¹)`; swaps the cached pairs.
    pub fn inverse(&self) -> Self {
        Self {
            translation: self.inverse_translation.clone(),
            linear: self.linear_inverse.clone(),
            linear_inverse: self.linear.clone(),
            inverse_translation: self.translation.clone(),
        }
    }
}

/// An affine function `ψ(V) = χ + Φ·V` (an affine form on points).
///
/// Under a transformation its components pick up the lift on the right:
/// `(χ' Φ') = (χ Φ)·lift(a)`, which makes `ψ'(V') = ψ(V)` an identity.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineFunction {
    constant: f64,
    covector: DVector<f64>,
}

impl AffineFunction {
    pub fn new(constant: f64, covector: DVector<f64>) -> Self {
        Self { constant, covector }
    }

    pub fn from_slice(constant: f64, covector: &[f64]) -> Self {
        Self::new(constant, DVector::from_row_slice(covector))
    }

    pub fn dimension(&self) -> usize {
        self.covector.len()
    }

    /// The constant term `χ`.
    pub fn constant(&self) -> f64 {
        self.constant
    }

    /// The linear coefficients `Φ`.
    pub fn covector(&self) -> &DVector<f64> {
        &self.covector
    }

    /// `ψ(V) = χ + Φ·V`.
    pub fn evaluate(&self, point: &AffinePoint) -> Result<f64, AffineError> {
        if point.dimension() != self.dimension() {
            return Err(AffineError::DimensionMismatch {
                expected: self.dimension(),
                found: point.dimension(),
            });
        }
        Ok(self.constant + self.covector.dot(point.components()))
    }

    /// Components in the new frame: `χ' = χ + Φ·C`, `Φ' = Φ·P`.
    pub fn transform(&self, a: &AffineTransformation) -> Result<Self, AffineError> {
        if a.dimension() != self.dimension() {
            return Err(AffineError::DimensionMismatch {
                expected: self.dimension(),
                found: a.dimension(),
            });
        }
        Ok(Self {
            constant: self.constant + self.covector.dot(a.translation()),
            covector: a.linear().transpose() * &self.covector,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Oracle: act through the full homogeneous lift, inverted as one
    /// (n+1)×(n+1) matrix. Independent of the blockwise P⁻¹ path.
    fn apply_via_lift_inverse(a: &AffineTransformation, v: &[f64]) -> DVector<f64> {
        let n = v.len();
        let lift_inv = a.lift().try_inverse().expect("oracle lift invertible");
        let mut homogeneous = DVector::zeros(n + 1);
        homogeneous[0] = 1.0;
        homogeneous
            .rows_mut(1, n)
            .copy_from(&DVector::from_row_slice(v));
        let image = lift_inv * homogeneous;
        image.rows(1, n).into_owned()
    }

    fn transformation(c: &[f64], p_rows: &[&[f64]]) -> AffineTransformation {
        let n = c.len();
        let p = DMatrix::from_fn(n, n, |i, j| p_rows[i][j]);
        AffineTransformation::new(DVector::from_row_slice(c), p).unwrap()
    }

    #[test]
    fn pure_translation_moves_components_opposite() {
        let a = transformation(&[1.0, 0.0], &[&[1.0, 0.0], &[0.0, 1.0]]);
        let v = AffinePoint::from_slice(&[3.0, 4.0]);
        let image = a.apply(&v).unwrap();
        let oracle = apply_via_lift_inverse(&a, &[3.0, 4.0]);
        assert_abs_diff_eq!(image.components(), &oracle, epsilon = 1e-14);
        assert_abs_diff_eq!(image.components()[0], 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(image.components()[1], 4.0, epsilon = 1e-15);
    }

    #[test]
    fn pure_scaling_divides_components() {
        let a = transformation(&[0.0, 0.0], &[&[2.0, 0.0], &[0.0, 2.0]]);
        let v = AffinePoint::from_slice(&[3.0, 4.0]);
        let image = a.apply(&v).unwrap();
        let oracle = apply_via_lift_inverse(&a, &[3.0, 4.0]);
        assert_abs_diff_eq!(image.components(), &oracle, epsilon = 1e-14);
        assert_abs_diff_eq!(image.components()[0], 1.5, epsilon = 1e-15);
        assert_abs_diff_eq!(image.components()[1], 2.0, epsilon = 1e-15);
    }

    #[test]
    fn identity_fixes_points() {
        let a = AffineTransformation::identity(3);
        let v = AffinePoint::from_slice(&[1.0, -2.0, 0.5]);
        assert_eq!(a.apply(&v).unwrap(), v);
    }

    #[test]
    fn lift_block_placement() {
        let a = transformation(&[2.0], &[&[3.0]]);
        let lift = a.lift();
        assert_eq!(lift[(0, 0)], 1.0);
        assert_eq!(lift[(0, 1)], 0.0);
        assert_eq!(lift[(1, 0)], 2.0);
        assert_eq!(lift[(1, 1)], 3.0);
    }

    #[test]
    fn singular_linear_part_is_rejected() {
        let p = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        let err = AffineTransformation::new(DVector::zeros(2), p).unwrap_err();
        assert!(matches!(err, AffineError::Singular { .. }));
    }

    #[test]
    fn non_square_linear_part_is_rejected() {
        let p = DMatrix::zeros(2, 3);
        let err = AffineTransformation::new(DVector::zeros(2), p).unwrap_err();
        assert!(matches!(err, AffineError::NotSquare { rows: 2, cols: 3 }));
    }

    #[test]
    fn apply_checks_dimension() {
        let a = AffineTransformation::identity(2);
        let v = AffinePoint::from_slice(&[1.0, 2.0, 3.0]);
        let err = a.apply(&v).unwrap_err();
        assert!(matches!(
            err,
            AffineError::DimensionMismatch {
                expected: 2,
                found: 3
            }
        ));
    }

    #[test]
    fn compose_matches_lift_product() {
        let a = transformation(&[1.0, -1.0], &[&[0.0, -1.0], &[1.0, 0.0]]);
        let b = transformation(&[0.5, 2.0], &[&[2.0, 1.0], &[0.0, 1.0]]);
        let c = a.compose(&b).unwrap();
        let oracle = a.lift() * b.lift();
        assert_abs_diff_eq!(c.lift(), oracle, epsilon = 1e-13);
        // consistency of the cached inverse pair
        assert_abs_diff_eq!(
            c.linear() * c.linear_inverse(),
            DMatrix::identity(2, 2),
            epsilon = 1e-13
        );
    }

    #[test]
    fn compose_checks_dimension() {
        let a = AffineTransformation::identity(2);
        let b = AffineTransformation::identity(3);
        assert!(matches!(
            a.compose(&b).unwrap_err(),
            AffineError::DimensionMismatch {
                expected: 2,
                found: 3
            }
        ));
    }

    #[test]
    fn inverse_matches_lift_inverse() {
        let a = transformation(&[1.0, 2.0], &[&[1.0, 1.0], &[0.0, 3.0]]);
        let inv = a.inverse();
        let oracle = a.lift().try_inverse().unwrap();
        assert_abs_diff_eq!(inv.lift(), oracle, epsilon = 1e-13);
        let round_trip = a.compose(&inv).unwrap();
        assert_abs_diff_eq!(round_trip.lift(), DMatrix::identity(3, 3), epsilon = 1e-13);
    }

    #[test]
    fn function_components_pick_up_translation() {
        let a = transformation(&[2.0, 0.0], &[&[1.0, 0.0], &[0.0, 1.0]]);
        let psi = AffineFunction::from_slice(1.0, &[1.0, 0.0]);
        let image = psi.transform(&a).unwrap();
        // oracle: row vector (χ Φ) times the lift
        let row = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 0.0]) * a.lift();
        assert_abs_diff_eq!(image.constant(), row[(0, 0)], epsilon = 1e-15);
        assert_abs_diff_eq!(image.constant(), 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(image.covector()[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(image.covector()[1], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn function_evaluation_is_frame_independent() {
        let a = transformation(&[1.0, -0.5], &[&[1.0, 2.0], &[0.0, -1.0]]);
        let psi = AffineFunction::from_slice(0.7, &[1.5, -2.0]);
        let v = AffinePoint::from_slice(&[0.3, 1.2]);
        let lhs = psi
            .transform(&a)
            .unwrap()
            .evaluate(&a.apply(&v).unwrap())
            .unwrap();
        let rhs = psi.evaluate(&v).unwrap();
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-13);
    }

    #[test]
    fn evaluate_is_constant_plus_dot() {
        let psi = AffineFunction::from_slice(2.0, &[1.0, -1.0, 0.5]);
        let v = AffinePoint::from_slice(&[1.0, 2.0, 4.0]);
        assert_abs_diff_eq!(psi.evaluate(&v).unwrap(), 3.0, epsilon = 1e-15);
    }

    #[test]
    fn evaluate_checks_dimension() {
        let psi = AffineFunction::from_slice(0.0, &[1.0, 2.0]);
        let v = AffinePoint::from_slice(&[1.0]);
        assert!(psi.evaluate(&v).is_err());
    }
}
