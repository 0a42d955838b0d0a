//! Scenario file schema and conversion into library objects.
//!
//! Scenarios are JSON objects with a `kind` tag. Unknown fields are
//! rejected so that typos surface as parse errors instead of silently
//! falling back to defaults.

use galtor::connection::GalileanConnection;
use galtor::dynamics::{GravitySource, IntegratorConfig, ParticleState};
use galtor::galilei::{GalileanTransformation, RigidFrameMotion};
use galtor::rigidbody::{InertiaMatrix, MassDistribution, PointMass, RigidBodyState};
use galtor::torsor::GalileanTorsor;
use nalgebra::{Matrix3, UnitQuaternion, Vector3};
use serde::Deserialize;

use crate::run::CliError;

fn v3(a: [f64; 3]) -> Vector3<f64> {
    Vector3::new(a[0], a[1], a[2])
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scenario {
    Particle(ParticleScenario),
    Rigidbody(RigidBodyScenario),
    TorsorTransform(TorsorTransformScenario),
    Covariance(CovarianceScenario),
}

impl Scenario {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Scenario::Particle(_) => "particle",
            Scenario::Rigidbody(_) => "rigidbody",
            Scenario::TorsorTransform(_) => "torsor_transform",
            Scenario::Covariance(_) => "covariance",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticleScenario {
    pub connection: ConnectionSpec,
    pub initial: InitialStateSpec,
    pub integrator: IntegratorSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RigidBodyScenario {
    /// Point masses in body axes; recentered before the inertia is taken.
    #[serde(default)]
    pub points: Option<Vec<PointSpec>>,
    /// Principal moments, as a shortcut for a diagonal inertia matrix.
    #[serde(default)]
    pub inertia_diag: Option<[f64; 3]>,
    /// Full symmetric inertia matrix, row by row.
    #[serde(default)]
    pub inertia: Option<[[f64; 3]; 3]>,
    pub initial: RigidInitialSpec,
    pub integrator: IntegratorSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorsorTransformScenario {
    pub torsor: TorsorSpec,
    /// Defaults to the identity transformation when omitted.
    #[serde(default)]
    pub transformation: Option<TransformationSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CovarianceScenario {
    pub connection: ConnectionSpec,
    pub initial: InitialStateSpec,
    pub frame: FrameSpec,
    pub integrator: IntegratorSpec,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialStateSpec {
    pub m: f64,
    pub r0: [f64; 3],
    pub v0: [f64; 3],
    /// Intrinsic spin at the start; defaults to zero.
    #[serde(default)]
    pub l0: [f64; 3],
    #[serde(default)]
    pub t0: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSpec {
    pub dt: f64,
    pub steps: usize,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Trajectory CSV file name inside the output directory.
    #[serde(default)]
    pub trajectory: Option<String>,
    /// Report JSON file name inside the output directory.
    #[serde(default)]
    pub report: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConnectionSpec {
    Zero,
    Uniform(UniformSpec),
    Newtonian(NewtonianSpec),
    RotatingFrame(RotatingFrameSpec),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniformSpec {
    pub g: [f64; 3],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewtonianSpec {
    pub sources: Vec<SourceSpec>,
    #[serde(default = "default_coupling")]
    pub k_g: f64,
}

fn default_coupling() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSpec {
    pub mass: f64,
    pub position: [f64; 3],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotatingFrameSpec {
    pub omega: [f64; 3],
    #[serde(default)]
    pub g: [f64; 3],
    #[serde(default)]
    pub origin: [f64; 3],
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FrameSpec {
    UniformRotation(UniformRotationSpec),
    UniformAcceleration(UniformAccelerationSpec),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniformRotationSpec {
    pub omega: [f64; 3],
    #[serde(default)]
    pub origin: [f64; 3],
    #[serde(default)]
    pub tau0: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniformAccelerationSpec {
    pub accel: [f64; 3],
    #[serde(default)]
    pub v0: [f64; 3],
    #[serde(default)]
    pub r0: [f64; 3],
    #[serde(default)]
    pub tau0: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorsorSpec {
    pub m: f64,
    #[serde(default)]
    pub p: [f64; 3],
    #[serde(default)]
    pub q: [f64; 3],
    #[serde(default)]
    pub l: [f64; 3],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformationSpec {
    #[serde(default)]
    pub tau: f64,
    #[serde(default)]
    pub k: [f64; 3],
    #[serde(default)]
    pub u: [f64; 3],
    #[serde(default)]
    pub axis_angle: [f64; 3],
}

impl ConnectionSpec {
    pub fn build(&self) -> GalileanConnection {
        match self {
            ConnectionSpec::Zero => GalileanConnection::zero(),
            ConnectionSpec::Uniform(s) => GalileanConnection::uniform(v3(s.g)),
            ConnectionSpec::Newtonian(s) => galtor::dynamics::newtonian_connection(
                s.sources
                    .iter()
                    .map(|src| GravitySource::fixed(src.mass, s.k_g, v3(src.position)))
                    .collect(),
            ),
            ConnectionSpec::RotatingFrame(s) => {
                GalileanConnection::rotating_frame(v3(s.omega), v3(s.g), v3(s.origin))
            }
        }
    }
}

impl FrameSpec {
    pub fn build(&self) -> RigidFrameMotion {
        match self {
            FrameSpec::UniformRotation(s) => {
                RigidFrameMotion::uniform_rotation(v3(s.omega), v3(s.origin))
                    .with_clock_offset(s.tau0)
            }
            FrameSpec::UniformAcceleration(s) => {
                RigidFrameMotion::uniform_acceleration(v3(s.accel), v3(s.v0), v3(s.r0))
                    .with_clock_offset(s.tau0)
            }
        }
    }
}

impl InitialStateSpec {
    pub fn build(&self) -> Result<ParticleState, CliError> {
        ParticleState::from_initial_conditions(
            self.m,
            v3(self.r0),
            v3(self.v0),
            v3(self.l0),
            self.t0,
        )
        .map_err(CliError::from)
    }
}

impl IntegratorSpec {
    pub fn build(&self) -> IntegratorConfig {
        IntegratorConfig::new(self.dt, self.steps)
    }
}

impl TorsorSpec {
    pub fn build(&self) -> GalileanTorsor {
        GalileanTorsor::new(self.m, v3(self.p), v3(self.q), v3(self.l))
    }
}

impl TransformationSpec {
    pub fn build(&self) -> GalileanTransformation {
        GalileanTransformation::from_axis_angle_parts(
            self.tau,
            v3(self.k),
            v3(self.u),
            v3(self.axis_angle),
        )
    }
}

impl RigidBodyScenario {
    /// Exactly one of `points`, `inertia_diag`, `inertia` must be given.
    pub fn build_inertia(&self) -> Result<InertiaMatrix, CliError> {
        let given = usize::from(self.points.is_some())
            + usize::from(self.inertia_diag.is_some())
            + usize::from(self.inertia.is_some());
        if given != 1 {
            return Err(CliError::Validation(format!(
                "rigidbody scenario needs exactly one of points, inertia_diag, inertia ({given} given)"
            )));
        }
        if let Some(points) = &self.points {
            let masses = points
                .iter()
                .map(|p| PointMass {
                    mass: p.mass,
                    position: v3(p.position),
                })
                .collect();
            return Ok(MassDistribution::new(masses)
                .map_err(CliError::from)?
                .recenter()
                .inertia());
        }
        if let Some(diag) = self.inertia_diag {
            return Ok(InertiaMatrix::from_diagonal(v3(diag)));
        }
        let rows = self.inertia.unwrap();
        let matrix = Matrix3::new(
            rows[0][0], rows[0][1], rows[0][2], rows[1][0], rows[1][1], rows[1][2], rows[2][0],
            rows[2][1], rows[2][2],
        );
        InertiaMatrix::from_matrix(matrix).map_err(CliError::from)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    pub mass: f64,
    pub position: [f64; 3],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RigidInitialSpec {
    /// Axis-angle orientation of the body at the start; identity when omitted.
    #[serde(default)]
    pub orientation: [f64; 3],
    pub omega_body: [f64; 3],
    #[serde(default)]
    pub t0: f64,
}

impl RigidInitialSpec {
    pub fn build(&self) -> RigidBodyState {
        RigidBodyState::new(
            self.t0,
            UnitQuaternion::from_scaled_axis(v3(self.orientation)),
            v3(self.omega_body),
        )
    }
}
