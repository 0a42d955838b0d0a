//! Free rigid bodies: Euler's equations from the torsor of a rigid mass
//! distribution.
//!
//! The material inertia `𝓙₀ = Σ mᵢ(‖sᵢ‖²·I − sᵢsᵢᵀ)` is computed once in
//! body axes. A free body spinning about its center of mass obeys
//!
//! ```text
//! q̇  = ½·q ⊗ (0, Ω')          (orientation quaternion, body frame)
//! Ω̇' = 𝓙₀⁻¹((𝓙₀Ω')×Ω')        (Euler's equations)
//! ```
//!
//! Its spatial spin `l₀ = R·𝓙₀Ω'` is constant, as are the kinetic form
//! `Ω'ᵀ𝓙₀Ω'` and `‖𝓙₀Ω'‖`; conservation of all three is what the
//! integrator is tested against. The orientation quaternion is
//! renormalized after every step.

use crate::connection::GalileanConnection;
use crate::galilei::RigidFrameMotion;
use nalgebra::{Matrix3, Quaternion, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum RigidBodyError {
    #[error("a rigid body needs at least one point mass")]
    EmptyBody,
    #[error("point mass {index} has non-positive mass {mass}")]
    NonPositiveMass { index: usize, mass: f64 },
    #[error("inertia matrix is not symmetric (max |J − Jᵀ| entry = {asymmetry:.3e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("inertia matrix is not positive definite; free rotation needs all principal moments positive")]
    DegenerateInertia,
    #[error("time step must be positive and finite, got {dt}")]
    InvalidTimeStep { dt: f64 },
    #[error("step count must be at least 1")]
    NoSteps,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointMass {
    pub mass: f64,
    pub position: Vector3<f64>,
}

/// A finite set of point masses rigidly attached to body axes.
#[derive(Debug, Clone, PartialEq)]
pub struct MassDistribution {
    points: Vec<PointMass>,
}

impl MassDistribution {
    pub fn new(points: Vec<PointMass>) -> Result<Self, RigidBodyError> {
        if points.is_empty() {
            return Err(RigidBodyError::EmptyBody);
        }
        for (index, point) in points.iter().enumerate() {
            if !(point.mass > 0.0 && point.mass.is_finite()) {
                return Err(RigidBodyError::NonPositiveMass {
                    index,
                    mass: point.mass,
                });
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[PointMass] {
        &self.points
    }

    pub fn total_mass(&self) -> f64 {
        self.points.iter().map(|p| p.mass).sum()
    }

    pub fn center_of_mass(&self) -> Vector3<f64> {
        self.points
            .iter()
            .map(|p| p.mass * p.position)
            .sum::<Vector3<f64>>()
            / self.total_mass()
    }

    /// The same body with positions measured from its center of mass.
    pub fn recenter(&self) -> Self {
        let com = self.center_of_mass();
        Self {
            points: self
                .points
                .iter()
                .map(|p| PointMass {
                    mass: p.mass,
                    position: p.position - com,
                })
                .collect(),
        }
    }

    /// Inertia about the origin of body axes,
    /// `𝓙₀ = Σ mᵢ(‖sᵢ‖²·I − sᵢsᵢᵀ)`. Recenter first to get the inertia
    /// about the center of mass.
    pub fn inertia(&self) -> InertiaMatrix {
        let mut j = Matrix3::zeros();
        for p in &self.points {
            j += p.mass
                * (p.position.norm_squared() * Matrix3::identity()
                    - p.position * p.position.transpose());
        }
        InertiaMatrix::from_matrix(j).expect("sum of symmetric terms is symmetric")
    }
}

/// A symmetric inertia matrix with its inverse cached when positive
/// definite. Degenerate bodies (collinear mass distributions) can be
/// represented but not freely rotated.
#[derive(Debug, Clone, PartialEq)]
pub struct InertiaMatrix {
    matrix: Matrix3<f64>,
    inverse: Option<Matrix3<f64>>,
}

impl InertiaMatrix {
    pub fn from_matrix(matrix: Matrix3<f64>) -> Result<Self, RigidBodyError> {
        let asymmetry = (matrix - matrix.transpose()).abs().max();
        if asymmetry > 1e-12 {
            return Err(RigidBodyError::NotSymmetric { asymmetry });
        }
        let inverse = nalgebra::linalg::Cholesky::new(matrix).map(|c| c.inverse());
        Ok(Self { matrix, inverse })
    }

    pub fn from_diagonal(moments: Vector3<f64>) -> Self {
        Self::from_matrix(Matrix3::from_diagonal(&moments))
            .expect("diagonal matrices are symmetric")
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.matrix
    }

    pub fn is_positive_definite(&self) -> bool {
        self.inverse.is_some()
    }

    fn inverse(&self) -> Result<&Matrix3<f64>, RigidBodyError> {
        self.inverse
            .as_ref()
            .ok_or(RigidBodyError::DegenerateInertia)
    }
}

/// Orientation and body-frame angular velocity of a rigid body.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidBodyState {
    pub t: f64,
    pub orientation: UnitQuaternion<f64>,
    pub omega_body: Vector3<f64>,
}

impl RigidBodyState {
    pub fn new(t: f64, orientation: UnitQuaternion<f64>, omega_body: Vector3<f64>) -> Self {
        Self {
            t,
            orientation,
            omega_body,
        }
    }

    pub fn rotation(&self) -> Matrix3<f64> {
        self.orientation.to_rotation_matrix().into_inner()
    }

    pub fn omega_spatial(&self) -> Vector3<f64> {
        self.rotation() * self.omega_body
    }
}

/// Spatial spin `l₀ = R·(𝓙₀Ω')`; constant for free motion.
pub fn spin_spatial(state: &RigidBodyState, inertia: &InertiaMatrix) -> Vector3<f64> {
    state.rotation() * (inertia.matrix() * state.omega_body)
}

/// The kinetic form `Ω'ᵀ𝓙₀Ω'` (twice the rotational kinetic energy).
pub fn kinetic_form(state: &RigidBodyState, inertia: &InertiaMatrix) -> f64 {
    state.omega_body.dot(&(inertia.matrix() * state.omega_body))
}

fn body_rates(
    j: &Matrix3<f64>,
    j_inv: &Matrix3<f64>,
    q: &Quaternion<f64>,
    w: &Vector3<f64>,
) -> (Quaternion<f64>, Vector3<f64>) {
    let q_dot = q * Quaternion::from_parts(0.0, *w) * 0.5;
    let jw = j * w;
    (q_dot, j_inv * jw.cross(w))
}

/// One RK4 step of the free Euler equations. Negative `dt` integrates
/// backwards. The returned orientation is renormalized.
pub fn euler_step(
    state: &RigidBodyState,
    inertia: &InertiaMatrix,
    dt: f64,
) -> Result<RigidBodyState, RigidBodyError> {
    let j_inv = inertia.inverse()?;
    let j = inertia.matrix();
    let q0 = *state.orientation.quaternion();
    let w0 = state.omega_body;
    let half = 0.5 * dt;
    let (kq1, kw1) = body_rates(j, j_inv, &q0, &w0);
    let (kq2, kw2) = body_rates(j, j_inv, &(q0 + kq1 * half), &(w0 + kw1 * half));
    let (kq3, kw3) = body_rates(j, j_inv, &(q0 + kq2 * half), &(w0 + kw2 * half));
    let (kq4, kw4) = body_rates(j, j_inv, &(q0 + kq3 * dt), &(w0 + kw3 * dt));
    let w6 = dt / 6.0;
    let q = q0 + (kq1 + kq2 * 2.0 + kq3 * 2.0 + kq4) * w6;
    Ok(RigidBodyState {
        t: state.t + dt,
        orientation: UnitQuaternion::from_quaternion(q),
        omega_body: w0 + (kw1 + 2.0 * kw2 + 2.0 * kw3 + kw4) * w6,
    })
}

/// Maximum observed drifts of the free-rotation invariants. The spin
/// drift is the absolute `‖l₀(t) − l₀(0)‖`; the kinetic form and
/// momentum norm drifts are relative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoinsotReport {
    pub spin_drift: f64,
    pub kinetic_form_drift: f64,
    pub momentum_norm_drift: f64,
    pub max_orthogonality_error: f64,
    pub samples: usize,
}

fn relative_drift(current: f64, initial: f64) -> f64 {
    let delta = (current - initial).abs();
    if initial.abs() > 1e-12 {
        delta / initial.abs()
    } else {
        delta
    }
}

/// Integrates free rotation for `config.steps` steps of `config.dt`,
/// recording every state and the drift of the Poinsot invariants.
pub fn simulate_free(
    initial: &RigidBodyState,
    inertia: &InertiaMatrix,
    config: &crate::dynamics::IntegratorConfig,
) -> Result<(Vec<RigidBodyState>, PoinsotReport), RigidBodyError> {
    if !(config.dt > 0.0 && config.dt.is_finite()) {
        return Err(RigidBodyError::InvalidTimeStep { dt: config.dt });
    }
    if config.steps == 0 {
        return Err(RigidBodyError::NoSteps);
    }
    let mut trajectory = Vec::with_capacity(config.steps + 1);
    trajectory.push(*initial);
    for _ in 0..config.steps {
        let next = euler_step(trajectory.last().unwrap(), inertia, config.dt)?;
        trajectory.push(next);
    }
    let spin0 = spin_spatial(initial, inertia);
    let kinetic0 = kinetic_form(initial, inertia);
    let momentum0 = (inertia.matrix() * initial.omega_body).norm();
    let mut report = PoinsotReport {
        spin_drift: 0.0,
        kinetic_form_drift: 0.0,
        momentum_norm_drift: 0.0,
        max_orthogonality_error: 0.0,
        samples: trajectory.len(),
    };
    for state in &trajectory {
        report.spin_drift = report
            .spin_drift
            .max((spin_spatial(state, inertia) - spin0).norm());
        report.kinetic_form_drift = report
            .kinetic_form_drift
            .max(relative_drift(kinetic_form(state, inertia), kinetic0));
        report.momentum_norm_drift = report.momentum_norm_drift.max(relative_drift(
            (inertia.matrix() * state.omega_body).norm(),
            momentum0,
        ));
        let r = state.rotation();
        report.max_orthogonality_error = report
            .max_orthogonality_error
            .max((r.transpose() * r - Matrix3::identity()).abs().max());
    }
    Ok((trajectory, report))
}

/// Consistency of a rigid frame motion with the comoving description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialConsistencyReport {
    /// Max `‖Rᵀϖ − Ω'_conn‖` between the frame's material angular
    /// velocity and the Coriolis field of the pulled-back flat connection.
    pub max_omega_discrepancy: f64,
    /// Max `‖l₀(t) − l₀(t₀)‖` of the spatial spin along the motion;
    /// small only when the motion is torque-free for this inertia.
    pub max_spin_discrepancy: f64,
    pub samples: usize,
}

/// Reads the material angular velocity of `frame` at the given times,
/// both directly (`Ω' = Rᵀϖ`) and as the Coriolis field of the flat
/// connection pulled back to the comoving frame, and tracks the spatial
/// spin `R·𝓙₀Ω'` along the motion.
pub fn material_from_spatial(
    frame: &RigidFrameMotion,
    inertia: &InertiaMatrix,
    times: &[f64],
) -> MaterialConsistencyReport {
    let comoving = GalileanConnection::zero().pullback(frame);
    let mut report = MaterialConsistencyReport {
        max_omega_discrepancy: 0.0,
        max_spin_discrepancy: 0.0,
        samples: times.len(),
    };
    let mut spin0 = None;
    for &t in times {
        let rot = frame.rotation_at(t);
        let omega_material = rot.transpose() * frame.angular_velocity(t);
        let omega_connection = comoving
            .coriolis_at(t + frame.clock_offset(), &Vector3::zeros())
            .expect("flat source fields are total");
        report.max_omega_discrepancy = report
            .max_omega_discrepancy
            .max((omega_material - omega_connection).norm());
        let spin = rot * (inertia.matrix() * omega_material);
        let reference = *spin0.get_or_insert(spin);
        report.max_spin_discrepancy = report.max_spin_discrepancy.max((spin - reference).norm());
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::IntegratorConfig;
    use approx::assert_abs_diff_eq;

    #[test]
    fn inertia_of_simple_bodies() {
        let single = MassDistribution::new(vec![PointMass {
            mass: 1.0,
            position: Vector3::x(),
        }])
        .unwrap();
        assert_abs_diff_eq!(
            *single.inertia().matrix(),
            Matrix3::from_diagonal(&Vector3::new(0.0, 1.0, 1.0)),
            epsilon = 0.0
        );

        let corners: Vec<PointMass> = (0..8)
            .map(|i| PointMass {
                mass: 1.0,
                position: Vector3::new(
                    if i & 1 == 0 { 1.0 } else { -1.0 },
                    if i & 2 == 0 { 1.0 } else { -1.0 },
                    if i & 4 == 0 { 1.0 } else { -1.0 },
                ),
            })
            .collect();
        let cube = MassDistribution::new(corners).unwrap();
        assert_abs_diff_eq!(
            *cube.inertia().matrix(),
            Matrix3::identity() * 16.0,
            epsilon = 0.0
        );
        assert!(cube.inertia().is_positive_definite());
    }

    #[test]
    fn center_of_mass_and_recenter() {
        let body = MassDistribution::new(vec![
            PointMass {
                mass: 1.0,
                position: Vector3::x(),
            },
            PointMass {
                mass: 3.0,
                position: -Vector3::x(),
            },
        ])
        .unwrap();
        assert_abs_diff_eq!(body.total_mass(), 4.0, epsilon = 0.0);
        assert_abs_diff_eq!(
            body.center_of_mass(),
            Vector3::new(-0.5, 0.0, 0.0),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            body.recenter().center_of_mass(),
            Vector3::zeros(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn degenerate_bodies_are_rejected_by_the_integrator() {
        let rod = MassDistribution::new(vec![
            PointMass {
                mass: 1.0,
                position: Vector3::z(),
            },
            PointMass {
                mass: 1.0,
                position: -Vector3::z(),
            },
        ])
        .unwrap();
        let inertia = rod.inertia();
        assert_abs_diff_eq!(
            *inertia.matrix(),
            Matrix3::from_diagonal(&Vector3::new(2.0, 2.0, 0.0)),
            epsilon = 0.0
        );
        assert!(!inertia.is_positive_definite());
        let state = RigidBodyState::new(0.0, UnitQuaternion::identity(), Vector3::x());
        assert!(matches!(
            euler_step(&state, &inertia, 1e-3),
            Err(RigidBodyError::DegenerateInertia)
        ));
    }

    #[test]
    fn construction_validation() {
        assert!(matches!(
            MassDistribution::new(vec![]),
            Err(RigidBodyError::EmptyBody)
        ));
        assert!(matches!(
            MassDistribution::new(vec![PointMass {
                mass: -1.0,
                position: Vector3::zeros()
            }]),
            Err(RigidBodyError::NonPositiveMass { index: 0, .. })
        ));
        let mut m = Matrix3::identity();
        m[(0, 1)] = 1e-6;
        assert!(matches!(
            InertiaMatrix::from_matrix(m),
            Err(RigidBodyError::NotSymmetric { .. })
        ));
    }

    #[test]
    fn symmetric_top_precesses_at_the_closed_form_rate() {
        let inertia = InertiaMatrix::from_diagonal(Vector3::new(1.0, 1.0, 2.0));
        let initial =
            RigidBodyState::new(0.0, UnitQuaternion::identity(), Vector3::new(1.0, 0.0, 1.0));
        let (trajectory, report) =
            simulate_free(&initial, &inertia, &IntegratorConfig::new(1e-3, 2000)).unwrap();
        let last = trajectory.last().unwrap();
        // Ω'(t) = (cos t, sin t, 1): precession rate (J₃−J₁)/J₁·Ω'₃ = 1
        let t = last.t;
        assert_abs_diff_eq!(
            last.omega_body,
            Vector3::new(t.cos(), t.sin(), 1.0),
            epsilon = 1e-9
        );
        let rate = last.omega_body.y.atan2(last.omega_body.x) / t;
        assert_abs_diff_eq!(rate, 1.0, epsilon = 1e-9);
        assert!(report.kinetic_form_drift < 1e-11);
    }

    #[test]
    fn spin_routes_agree() {
        // route A: spatial inertia tensor acting on the spatial angular
        // velocity; route B: rotated body momentum
        let inertia = InertiaMatrix::from_diagonal(Vector3::new(1.0, 2.0, 3.0));
        let orientation = UnitQuaternion::from_scaled_axis(Vector3::new(0.3, -0.8, 0.5));
        let state = RigidBodyState::new(0.0, orientation, Vector3::new(0.7, -0.4, 0.9));
        let r = state.rotation();
        let spatial_inertia = r * inertia.matrix() * r.transpose();
        let route_a = spatial_inertia * state.omega_spatial();
        let route_b = spin_spatial(&state, &inertia);
        assert_abs_diff_eq!(route_a, route_b, epsilon = 1e-12);
    }

    #[test]
    fn tumbling_keeps_the_poinsot_invariants() {
        let inertia = InertiaMatrix::from_diagonal(Vector3::new(1.0, 2.0, 3.0));
        // near the unstable middle axis so the motion genuinely tumbles
        let initial =
            RigidBodyState::new(0.0, UnitQuaternion::identity(), Vector3::new(0.3, 1.0, 0.2));
        let (_, report) =
            simulate_free(&initial, &inertia, &IntegratorConfig::new(1e-3, 5000)).unwrap();
        assert!(
            report.spin_drift < 1e-9,
            "spin drift {:.3e}",
            report.spin_drift
        );
        assert!(report.kinetic_form_drift < 1e-10);
        assert!(report.momentum_norm_drift < 1e-10);
        assert!(report.max_orthogonality_error < 1e-12);
    }

    #[test]
    fn aligned_spin_rotates_uniformly() {
        let inertia = InertiaMatrix::from_diagonal(Vector3::new(1.0, 2.0, 3.0));
        let omega0 = 2.0;
        let initial = RigidBodyState::new(
            0.0,
            UnitQuaternion::identity(),
            Vector3::new(0.0, 0.0, omega0),
        );
        let (trajectory, _) =
            simulate_free(&initial, &inertia, &IntegratorConfig::new(1e-3, 1000)).unwrap();
        let last = trajectory.last().unwrap();
        assert_abs_diff_eq!(
            last.omega_body,
            Vector3::new(0.0, 0.0, omega0),
            epsilon = 1e-12
        );
        let expected = UnitQuaternion::from_scaled_axis(Vector3::new(0.0, 0.0, omega0 * last.t));
        assert_abs_diff_eq!(
            last.rotation(),
            expected.to_rotation_matrix().into_inner(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn spherical_body_matches_a_resting_spinning_particle() {
        let inertia = InertiaMatrix::from_diagonal(Vector3::new(2.0, 2.0, 2.0));
        let omega = Vector3::new(0.3, -0.1, 0.4);
        let initial = RigidBodyState::new(0.0, UnitQuaternion::identity(), omega);
        let (trajectory, _) =
            simulate_free(&initial, &inertia, &IntegratorConfig::new(1e-2, 200)).unwrap();
        let particle = crate::dynamics::ParticleState::from_initial_conditions(
            1.0,
            Vector3::zeros(),
            Vector3::zeros(),
            inertia.matrix() * omega,
            0.0,
        )
        .unwrap();
        let out = crate::dynamics::simulate(
            &particle,
            &GalileanConnection::zero(),
            &IntegratorConfig::new(1e-2, 200),
        )
        .unwrap();
        for (body, point) in trajectory.iter().zip(out.trajectory.iter()) {
            assert_abs_diff_eq!(spin_spatial(body, &inertia), point.spin(), epsilon = 1e-12);
        }
    }

    #[test]
    fn steady_precession_frame_is_materially_consistent() {
        // torque-free symmetric top: R(t) = Rz(p·t)·Ry(θ)·Rz(s·t) with
        // s = p·cosθ·(J₁−J₃)/J₃ keeps the spatial spin constant
        let inertia = InertiaMatrix::from_diagonal(Vector3::new(1.0, 1.0, 2.0));
        let p = 0.8_f64;
        let theta = 0.6_f64;
        let s = p * theta.cos() * (1.0 - 2.0) / 2.0;
        let rot = move |t: f64| {
            crate::galilei::rotation_from_axis_angle(&Vector3::new(0.0, 0.0, p * t))
                * crate::galilei::rotation_from_axis_angle(&Vector3::new(0.0, theta, 0.0))
                * crate::galilei::rotation_from_axis_angle(&Vector3::new(0.0, 0.0, s * t))
        };
        let frame = RigidFrameMotion::from_closures(0.0, rot, |_: f64| Vector3::zeros()).unwrap();
        let times: Vec<f64> = (0..=30).map(|i| 0.1 * i as f64).collect();
        let report = material_from_spatial(&frame, &inertia, &times);
        assert!(report.max_omega_discrepancy < 1e-9);
        assert!(
            report.max_spin_discrepancy < 1e-8,
            "spin discrepancy {:.3e}",
            report.max_spin_discrepancy
        );
    }
}
