//! Galilean torsor mechanics.
//!
//! Classical mechanics phrased in affine language: instead of attaching
//! linear and angular momentum to a privileged origin, the dynamical
//! quantities of a particle or body are collected into a single affine
//! tensor, the *torsor* (mass `m`, linear momentum `p`, angular momentum
//! `l`, passage `q`). Torsors transform as skew-symmetric contravariant
//! affine 2-tensors under the Galilei group, which makes every change of
//! observer a matrix conjugation and every conservation statement a
//! frame-independent one.
//!
//! The crate is organised bottom-up:
//!
//! - [`affine`]: affine transformations, points and affine functions in
//!   arbitrary dimension, with the `(n+1)`-dimensional linear lift.
//! - [`galilei`]: the 10-parameter Galilei group acting on space-time
//!   events, plus time-dependent rigid frame motions and their Jacobians.
//! - [`torsor`]: the 10-component Galilean torsor, its 5×5 matrix
//!   representation, transformation laws, boost-invariant spin, and
//!   isotropy subgroups.
//! - [`connection`]: Galilean connections (gravity `g`, spinning `Ω`),
//!   covariant and affine-covariant derivatives of torsor components, and
//!   the pullback of a connection under a rigid frame motion.
//! - [`dynamics`]: free fall of massive particles (uniform, Newtonian or
//!   rotating-frame gravity) integrated with fixed-step RK4, conservation
//!   reports, and the covariance check between observers.
//! - [`rigidbody`]: free rigid bodies; inertia from point masses, Euler's
//!   equation in the body frame, quaternion attitude propagation, and
//!   Poinsot invariants.
//!
//! [`sample`] provides seeded random generators for group elements and
//! torsors; [`selftest`] runs the embedded oracle suite that cross-checks
//! component-wise laws against their matrix counterparts.
//!
//! # Conventions
//!
//! Transformations act on coordinates by the inverse: a transformation
//! `a = (C, P)` sends coordinates `X` to `X' = C' + P⁻¹X` with
//! `C' = −P⁻¹C`. Composition satisfies `lift(compose(a, b)) = lift(a)·lift(b)`,
//! so `compose(a, b)` means "apply `a` to the data, then `b`".
//! All quantities are `f64`; angles are radians; rotations are stored as
//! 3×3 matrices and validated to 1e-10.

pub mod affine;
pub mod connection;
pub mod dynamics;
pub mod galilei;
pub mod rigidbody;
pub mod sample;
pub mod selftest;
pub mod torsor;

pub use affine::{AffineError, AffineFunction, AffinePoint, AffineTransformation};
pub use connection::{
    AffinePart, AngularDerivative, ConnectionKind, Displacement, FieldError, GalileanConnection,
};
pub use dynamics::{
    ConservationReport, CovarianceReport, GravitySource, IntegratorConfig, ParticleState,
    SimulationError, SimulationOutcome, Termination,
};
pub use galilei::{Event, GalileanTransformation, GalileiError, RigidFrameMotion};
pub use rigidbody::{InertiaMatrix, MassDistribution, PointMass, RigidBodyError, RigidBodyState};
pub use torsor::{GalileanTorsor, TorsorError, TorsorInvariants};
