//! The Galilei group and its action on space-time events.
//!
//! A Galilean transformation is the dimension-4 affine transformation with
//! `C = (τ, k)` and linear part
//!
//! ```text
//! P = | 1  0 |        P⁻¹ = |  1    0  |
//!     | u  R |              | −Rᵀu  Rᵀ |
//! ```
//!
//! (clock offset `τ`, spatial translation `k`, boost `u`, rotation `R`).
//! Events transform by the inverse: `t' = t − τ`,
//! `r' = Rᵀ(r − u·t) + k'` with `k' = Rᵀ(u·τ − k)`. The group is
//! 10-dimensional; composition happens in closed form and agrees with the
//! product of the 5×5 lifts.

mod frame;

pub use frame::RigidFrameMotion;

use crate::affine::AffineTransformation;
use nalgebra::{DMatrix, DVector, Matrix3, Matrix4, Matrix5, Vector3};
use thiserror::Error;

/// Orthogonality and unit-determinant tolerance for rotation matrices.
pub const ROTATION_TOLERANCE: f64 = 1e-10;

/// Composition chains longer than this are re-orthonormalized.
const REORTHONORMALIZE_CHAIN: u32 = 100;

#[derive(Debug, Clone, Error)]
pub enum GalileiError {
    #[error("matrix is not a rotation (orthogonality error {orthogonality:.3e}, det = {det})")]
    NotARotation { orthogonality: f64, det: f64 },
}

/// The skew matrix `j(v)` with `j(v)·w = v × w`.
pub fn skew(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(
        0.0, -v.z, v.y, //
        v.z, 0.0, -v.x, //
        -v.y, v.x, 0.0,
    )
}

/// Extracts `v` from the skew part of `m`: the inverse of [`skew`] for
/// skew-symmetric input, the skew projection otherwise.
pub fn unskew(m: &Matrix3<f64>) -> Vector3<f64> {
    Vector3::new(
        0.5 * (m[(2, 1)] - m[(1, 2)]),
        0.5 * (m[(0, 2)] - m[(2, 0)]),
        0.5 * (m[(1, 0)] - m[(0, 1)]),
    )
}

/// Rodrigues' formula: the rotation by angle `‖v‖` about axis `v/‖v‖`.
///
/// `R = I + (sin θ/θ)·j(v) + ((1 − cos θ)/θ²)·j(v)²`, with series
/// coefficients below `θ = 1e-4` to avoid cancellation.
pub fn rotation_from_axis_angle(v: &Vector3<f64>) -> Matrix3<f64> {
    let theta = v.norm();
    let (a, b) = if theta < 1e-4 {
        let t2 = theta * theta;
        (1.0 - t2 / 6.0, 0.5 - t2 / 24.0)
    } else {
        (theta.sin() / theta, (1.0 - theta.cos()) / (theta * theta))
    };
    let j = skew(v);
    Matrix3::identity() + a * j + b * (j * j)
}

/// Nearest rotation in the polar sense: `U·diag(1, 1, det(UVᵀ))·Vᵀ` from
/// the SVD of `m`.
pub fn polar_rotation(m: &Matrix3<f64>) -> Matrix3<f64> {
    let svd = m.svd(true, true);
    let u = svd.u.expect("svd of 3x3 always yields u");
    let vt = svd.v_t.expect("svd of 3x3 always yields v_t");
    let d = (&u * &vt).determinant();
    let fix = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, d.signum()));
    u * fix * vt
}

fn rotation_defect(r: &Matrix3<f64>) -> (f64, f64) {
    let gram = r.transpose() * r - Matrix3::identity();
    (gram.abs().max(), r.determinant())
}

fn validate_rotation(r: &Matrix3<f64>) -> Result<(), GalileiError> {
    let (orthogonality, det) = rotation_defect(r);
    if orthogonality > ROTATION_TOLERANCE || (det - 1.0).abs() > ROTATION_TOLERANCE {
        return Err(GalileiError::NotARotation { orthogonality, det });
    }
    Ok(())
}

/// A space-time event: coordinates `(t, r)` in some Galilean frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub t: f64,
    pub r: Vector3<f64>,
}

impl Event {
    pub fn new(t: f64, r: Vector3<f64>) -> Self {
        Self { t, r }
    }
}

/// An element of the Galilei group: `(τ, k, u, R)`.
///
/// Stored on the direct side; the inverse-side parameters `(τ', k')` that
/// appear in the component transformation laws come from [`Self::inverse`].
#[derive(Debug, Clone)]
pub struct GalileanTransformation {
    tau: f64,
    k: Vector3<f64>,
    u: Vector3<f64>,
    rotation: Matrix3<f64>,
    chain: u32,
}

impl GalileanTransformation {
    pub fn new(
        tau: f64,
        k: Vector3<f64>,
        u: Vector3<f64>,
        rotation: Matrix3<f64>,
    ) -> Result<Self, GalileiError> {
        validate_rotation(&rotation)?;
        Ok(Self {
            tau,
            k,
            u,
            rotation,
            chain: 0,
        })
    }

    /// Builds from the inverse-side parameters `(τ', k')` together with the
    /// direct-side `u` and `R`: `τ = −τ'`, `k = u·τ − R·k'`.
    pub fn from_inverse_parts(
        tau_prime: f64,
        k_prime: Vector3<f64>,
        u: Vector3<f64>,
        rotation: Matrix3<f64>,
    ) -> Result<Self, GalileiError> {
        let tau = -tau_prime;
        let k = u * tau - rotation * k_prime;
        Self::new(tau, k, u, rotation)
    }

    pub fn identity() -> Self {
        Self {
            tau: 0.0,
            k: Vector3::zeros(),
            u: Vector3::zeros(),
            rotation: Matrix3::identity(),
            chain: 0,
        }
    }

    pub fn pure_clock_offset(tau: f64) -> Self {
        Self {
            tau,
            ..Self::identity()
        }
    }

    pub fn pure_translation(k: Vector3<f64>) -> Self {
        Self {
            k,
            ..Self::identity()
        }
    }

    pub fn pure_boost(u: Vector3<f64>) -> Self {
        Self {
            u,
            ..Self::identity()
        }
    }

    /// Pure rotation by `‖axis_angle‖` about `axis_angle`.
    pub fn pure_rotation(axis_angle: Vector3<f64>) -> Self {
        Self {
            rotation: rotation_from_axis_angle(&axis_angle),
            ..Self::identity()
        }
    }

    pub fn from_axis_angle_parts(
        tau: f64,
        k: Vector3<f64>,
        u: Vector3<f64>,
        axis_angle: Vector3<f64>,
    ) -> Self {
        Self {
            tau,
            k,
            u,
            rotation: rotation_from_axis_angle(&axis_angle),
            chain: 0,
        }
    }

    pub fn clock_offset(&self) -> f64 {
        self.tau
    }

    pub fn translation(&self) -> &Vector3<f64> {
        &self.k
    }

    pub fn boost(&self) -> &Vector3<f64> {
        &self.u
    }

    pub fn rotation(&self) -> &Matrix3<f64> {
        &self.rotation
    }

    /// Action on event coordinates: `t' = t − τ`, `r' = Rᵀ(r − u·t) + k'`.
    pub fn act(&self, event: &Event) -> Event {
        let rt = self.rotation.transpose();
        let k_prime = rt * (self.u * self.tau - self.k);
        Event {
            t: event.t - self.tau,
            r: rt * (event.r - self.u * event.t) + k_prime,
        }
    }

    /// `lift5(compose(a, b)) = lift5(a)·lift5(b)`: apply `a` first, then `b`.
    ///
    /// Closed form: `τ = τ_a + τ_b`, `k = k_a + u_a·τ_b + R_a·k_b`,
    /// `u = u_a + R_a·u_b`, `R = R_a·R_b`. Chains longer than 100
    /// compositions are re-orthonormalized by polar projection.
    pub fn compose(&self, other: &Self) -> Self {
        let mut rotation = self.rotation * other.rotation;
        let mut chain = self.chain.saturating_add(other.chain).saturating_add(1);
        if chain > REORTHONORMALIZE_CHAIN {
            rotation = polar_rotation(&rotation);
            chain = 0;
        }
        Self {
            tau: self.tau + other.tau,
            k: self.k + self.u * other.tau + self.rotation * other.k,
            u: self.u + self.rotation * other.u,
            rotation,
            chain,
        }
    }

    /// The group inverse: `(−τ, Rᵀ(u·τ − k), −Rᵀu, Rᵀ)`.
    pub fn inverse(&self) -> Self {
        let rt = self.rotation.transpose();
        Self {
            tau: -self.tau,
            k: rt * (self.u * self.tau - self.k),
            u: -(rt * self.u),
            rotation: rt,
            chain: self.chain,
        }
    }

    /// The 4×4 linear part `P = [[1, 0], [u, R]]`.
    pub fn linear_part(&self) -> Matrix4<f64> {
        let mut p = Matrix4::identity();
        p.fixed_view_mut::<3, 1>(1, 0).copy_from(&self.u);
        p.fixed_view_mut::<3, 3>(1, 1).copy_from(&self.rotation);
        p
    }

    /// The 5×5 lift `[[1, 0], [(τ, k), P]]`.
    pub fn lift5(&self) -> Matrix5<f64> {
        let mut m = Matrix5::identity();
        m[(1, 0)] = self.tau;
        m.fixed_view_mut::<3, 1>(2, 0).copy_from(&self.k);
        m.fixed_view_mut::<3, 1>(2, 1).copy_from(&self.u);
        m.fixed_view_mut::<3, 3>(2, 2).copy_from(&self.rotation);
        m
    }

    /// The same element as a dimension-4 affine transformation.
    pub fn to_affine(&self) -> AffineTransformation {
        let mut c = DVector::zeros(4);
        c[0] = self.tau;
        c.rows_mut(1, 3)
            .copy_from(&DVector::from_row_slice(self.k.as_slice()));
        let mut p = DMatrix::identity(4, 4);
        for i in 0..3 {
            p[(1 + i, 0)] = self.u[i];
            for j in 0..3 {
                p[(1 + i, 1 + j)] = self.rotation[(i, j)];
            }
        }
        AffineTransformation::new(c, p).expect("Galilean linear part has det = det R = 1")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::AffinePoint;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn act_via_lift5(a: &GalileanTransformation, event: &Event) -> Event {
        let inv = a.lift5().try_inverse().expect("lift invertible");
        let x = nalgebra::Vector5::new(1.0, event.t, event.r.x, event.r.y, event.r.z);
        let y = inv * x;
        assert_abs_diff_eq!(y[0], 1.0, epsilon = 1e-12);
        Event::new(y[1], Vector3::new(y[2], y[3], y[4]))
    }

    #[test]
    fn rodrigues_quarter_turn_about_z() {
        let r = rotation_from_axis_angle(&Vector3::new(0.0, 0.0, FRAC_PI_2));
        let expected = Matrix3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0);
        assert_abs_diff_eq!(r, expected, epsilon = 1e-15);
    }

    #[test]
    fn rodrigues_small_angle_matches_first_order() {
        let v = Vector3::new(1e-9, -2e-9, 0.5e-9);
        let r = rotation_from_axis_angle(&v);
        assert_abs_diff_eq!(r, Matrix3::identity() + skew(&v), epsilon = 1e-15);
    }

    #[test]
    fn skew_matches_cross_product() {
        let a = Vector3::new(1.0, -2.0, 3.0);
        let b = Vector3::new(0.5, 0.25, -1.0);
        assert_abs_diff_eq!(skew(&a) * b, a.cross(&b), epsilon = 1e-15);
        assert_abs_diff_eq!(unskew(&skew(&a)), a, epsilon = 1e-15);
    }

    #[test]
    fn non_orthogonal_matrix_is_rejected() {
        let mut bad = Matrix3::identity();
        bad[(0, 0)] = 1.0 + 1e-6;
        let err =
            GalileanTransformation::new(0.0, Vector3::zeros(), Vector3::zeros(), bad).unwrap_err();
        assert!(matches!(err, GalileiError::NotARotation { .. }));
    }

    #[test]
    fn inverse_parameters_closed_form() {
        let a = GalileanTransformation::new(
            2.0,
            Vector3::new(3.0, 0.0, 0.0),
            Vector3::new(1.0, 0.0, 0.0),
            Matrix3::identity(),
        )
        .unwrap();
        let inv = a.inverse();
        assert_abs_diff_eq!(inv.clock_offset(), -2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            inv.translation(),
            &Vector3::new(-1.0, 0.0, 0.0),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(inv.boost(), &Vector3::new(-1.0, 0.0, 0.0), epsilon = 1e-15);
        assert_abs_diff_eq!(inv.rotation(), &Matrix3::identity(), epsilon = 1e-15);
    }

    #[test]
    fn inverse_matches_lift_inverse() {
        let a = GalileanTransformation::from_axis_angle_parts(
            0.7,
            Vector3::new(1.0, -2.0, 0.5),
            Vector3::new(0.3, 0.1, -0.2),
            Vector3::new(0.4, -1.1, 0.6),
        );
        let oracle = a.lift5().try_inverse().unwrap();
        assert_abs_diff_eq!(a.inverse().lift5(), oracle, epsilon = 1e-13);
    }

    #[test]
    fn pure_boost_action() {
        let a = GalileanTransformation::pure_boost(Vector3::new(0.0, 1.0, 0.0));
        let image = a.act(&Event::new(2.0, Vector3::zeros()));
        assert_abs_diff_eq!(image.t, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(image.r, Vector3::new(0.0, -2.0, 0.0), epsilon = 1e-15);
    }

    #[test]
    fn clock_offset_shifts_time_by_inverse() {
        let a = GalileanTransformation::pure_clock_offset(1.0);
        let image = a.act(&Event::new(0.0, Vector3::new(1.0, 2.0, 3.0)));
        assert_abs_diff_eq!(image.t, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(image.r, Vector3::new(1.0, 2.0, 3.0), epsilon = 1e-15);
    }

    #[test]
    fn action_matches_homogeneous_representation() {
        let a = GalileanTransformation::from_axis_angle_parts(
            -0.4,
            Vector3::new(0.2, 1.0, -0.7),
            Vector3::new(1.1, -0.3, 0.5),
            Vector3::new(0.3, 0.9, -1.2),
        );
        let event = Event::new(1.7, Vector3::new(-0.6, 2.2, 0.9));
        let image = a.act(&event);
        let oracle = act_via_lift5(&a, &event);
        assert_abs_diff_eq!(image.t, oracle.t, epsilon = 1e-13);
        assert_abs_diff_eq!(image.r, oracle.r, epsilon = 1e-13);
    }

    #[test]
    fn action_matches_affine_embedding() {
        let a = GalileanTransformation::from_axis_angle_parts(
            0.9,
            Vector3::new(-1.0, 0.4, 0.2),
            Vector3::new(0.6, 0.6, -0.1),
            Vector3::new(-0.2, 0.5, 1.4),
        );
        let event = Event::new(-0.8, Vector3::new(1.5, -0.3, 0.7));
        let image = a.act(&event);
        let point = AffinePoint::from_slice(&[event.t, event.r.x, event.r.y, event.r.z]);
        let mapped = a.to_affine().apply(&point).unwrap();
        assert_abs_diff_eq!(image.t, mapped.components()[0], epsilon = 1e-13);
        for i in 0..3 {
            assert_abs_diff_eq!(image.r[i], mapped.components()[1 + i], epsilon = 1e-13);
        }
    }

    #[test]
    fn compose_boost_then_translation() {
        let a = GalileanTransformation::pure_boost(Vector3::new(1.0, 0.0, 0.0));
        let b = GalileanTransformation::pure_translation(Vector3::new(0.0, 1.0, 0.0));
        let c = a.compose(&b);
        assert_abs_diff_eq!(c.clock_offset(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            c.translation(),
            &Vector3::new(0.0, 1.0, 0.0),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(c.boost(), &Vector3::new(1.0, 0.0, 0.0), epsilon = 1e-15);
        assert_abs_diff_eq!(c.rotation(), &Matrix3::identity(), epsilon = 1e-15);
    }

    #[test]
    fn compose_matches_lift_product() {
        let a = GalileanTransformation::from_axis_angle_parts(
            0.3,
            Vector3::new(1.0, 0.0, -1.0),
            Vector3::new(0.2, 0.8, 0.0),
            Vector3::new(1.0, 0.2, -0.3),
        );
        let b = GalileanTransformation::from_axis_angle_parts(
            -1.1,
            Vector3::new(0.0, 2.0, 0.4),
            Vector3::new(-0.5, 0.1, 0.9),
            Vector3::new(-0.7, 1.3, 0.2),
        );
        assert_abs_diff_eq!(
            a.compose(&b).lift5(),
            a.lift5() * b.lift5(),
            epsilon = 1e-13
        );
    }

    #[test]
    fn two_quarter_turns_make_a_half_turn() {
        let q = GalileanTransformation::pure_rotation(Vector3::new(0.0, 0.0, FRAC_PI_2));
        let half = q.compose(&q);
        let expected = rotation_from_axis_angle(&Vector3::new(0.0, 0.0, PI));
        assert_abs_diff_eq!(half.rotation(), &expected, epsilon = 1e-15);
    }

    #[test]
    fn identity_lift_is_identity_matrix() {
        assert_abs_diff_eq!(
            GalileanTransformation::identity().lift5(),
            Matrix5::identity(),
            epsilon = 0.0
        );
    }

    #[test]
    fn from_inverse_parts_round_trips() {
        let rotation = rotation_from_axis_angle(&Vector3::new(0.2, -0.9, 0.5));
        let u = Vector3::new(0.4, 1.2, -0.6);
        let a = GalileanTransformation::from_inverse_parts(
            0.8,
            Vector3::new(-0.5, 0.3, 1.0),
            u,
            rotation,
        )
        .unwrap();
        let inv = a.inverse();
        assert_abs_diff_eq!(inv.clock_offset(), 0.8, epsilon = 1e-14);
        assert_abs_diff_eq!(
            inv.translation(),
            &Vector3::new(-0.5, 0.3, 1.0),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(a.boost(), &u, epsilon = 1e-15);
    }

    #[test]
    fn long_composition_chains_stay_orthogonal() {
        let step = GalileanTransformation::from_axis_angle_parts(
            0.01,
            Vector3::new(0.01, -0.02, 0.005),
            Vector3::new(0.003, 0.001, -0.002),
            Vector3::new(0.02, 0.03, -0.01),
        );
        let mut acc = GalileanTransformation::identity();
        for _ in 0..100_000 {
            acc = acc.compose(&step);
        }
        let (orthogonality, det) = rotation_defect(acc.rotation());
        assert!(
            orthogonality < 1e-12,
            "orthogonality error {orthogonality:.3e}"
        );
        assert!((det - 1.0).abs() < 1e-12, "det = {det}");
    }

    #[test]
    fn group_has_ten_independent_directions() {
        // tangents at the identity of the 10 canonical one-parameter
        // subgroups, by central differences on the lift
        let h = 1e-6;
        let subgroup: Vec<Box<dyn Fn(f64) -> GalileanTransformation>> = vec![
            Box::new(GalileanTransformation::pure_clock_offset),
            Box::new(|s| GalileanTransformation::pure_translation(Vector3::new(s, 0.0, 0.0))),
            Box::new(|s| GalileanTransformation::pure_translation(Vector3::new(0.0, s, 0.0))),
            Box::new(|s| GalileanTransformation::pure_translation(Vector3::new(0.0, 0.0, s))),
            Box::new(|s| GalileanTransformation::pure_boost(Vector3::new(s, 0.0, 0.0))),
            Box::new(|s| GalileanTransformation::pure_boost(Vector3::new(0.0, s, 0.0))),
            Box::new(|s| GalileanTransformation::pure_boost(Vector3::new(0.0, 0.0, s))),
            Box::new(|s| GalileanTransformation::pure_rotation(Vector3::new(s, 0.0, 0.0))),
            Box::new(|s| GalileanTransformation::pure_rotation(Vector3::new(0.0, s, 0.0))),
            Box::new(|s| GalileanTransformation::pure_rotation(Vector3::new(0.0, 0.0, s))),
        ];
        let mut tangents = DMatrix::zeros(10, 25);
        for (row, g) in subgroup.iter().enumerate() {
            let diff = (g(h).lift5() - g(-h).lift5()) / (2.0 * h);
            for (col, value) in diff.iter().enumerate() {
                tangents[(row, col)] = *value;
            }
        }
        assert_eq!(tangents.rank(1e-6), 10);
    }
}
