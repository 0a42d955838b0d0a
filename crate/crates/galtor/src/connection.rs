//! Galilean connections: gravitation and inertial effects as geometry.
//!
//! A Galilean connection is determined by two spatial fields on events,
//! a gravity field `g(t, r)` and a Coriolis field `Ω(t, r)`. Contracted
//! with a displacement `dX = (dt, dr)` it gives the 4×4 matrix
//!
//! ```text
//! ω(dX) = |      0            0     |
//!         | Ω×dr − g·dt    j(Ω)·dt  |
//! ```
//!
//! whose top row vanishes (time is absolute). Covariant derivatives of
//! torsor components follow from `∇T = dT + ω·T` for the linear part and
//! `∇J = dJ + ω·J + J·ωᵀ` for the angular part; the affine derivatives
//! add the affine part of the connection, taken with respect to the
//! spatial origin of the current frame.
//!
//! [`GalileanConnection::pullback`] rewrites the fields in a uniformly
//! moving, rotating or accelerating frame, producing the centrifugal,
//! Euler and frame-acceleration corrections from the frame motion alone.

use crate::galilei::{skew, Event, RigidFrameMotion};
use crate::torsor::GalileanTorsor;
use nalgebra::{Matrix4, Vector3, Vector4};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum FieldError {
    #[error("field is singular at gravity source {index}")]
    Singularity { index: usize },
    #[error("field value is not finite at t = {t}")]
    NonFinite { t: f64 },
}

type FieldFn = Arc<dyn Fn(f64, &Vector3<f64>) -> Result<Vector3<f64>, FieldError> + Send + Sync>;
type PotentialFn = Arc<dyn Fn(f64, &Vector3<f64>) -> Result<f64, FieldError> + Send + Sync>;

/// An infinitesimal displacement of events.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Displacement {
    pub dt: f64,
    pub dr: Vector3<f64>,
}

impl Displacement {
    pub fn new(dt: f64, dr: Vector3<f64>) -> Self {
        Self { dt, dr }
    }
}

/// The affine part of the connection contracted with a displacement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffinePart {
    pub time: f64,
    pub space: Vector3<f64>,
}

/// Covariant derivative of the angular components `(l, q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularDerivative {
    pub angular_momentum: Vector3<f64>,
    pub passage: Vector3<f64>,
}

/// How a connection was built; fields alone decide the physics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConnectionKind {
    Zero,
    Uniform,
    Newtonian,
    RotatingFrame,
    Custom,
}

#[derive(Clone)]
pub struct GalileanConnection {
    gravity: FieldFn,
    coriolis: FieldFn,
    /// Potential energy per unit mass with `g = −∇φ`, when one exists.
    /// Only meaningful for static fields.
    potential: Option<PotentialFn>,
    kind: ConnectionKind,
}

impl fmt::Debug for GalileanConnection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GalileanConnection")
            .field("kind", &self.kind)
            .field("has_potential", &self.potential.is_some())
            .finish()
    }
}

impl GalileanConnection {
    /// Flat connection: no gravity, no rotation.
    pub fn zero() -> Self {
        Self {
            gravity: Arc::new(|_, _| Ok(Vector3::zeros())),
            coriolis: Arc::new(|_, _| Ok(Vector3::zeros())),
            potential: Some(Arc::new(|_, _| Ok(0.0))),
            kind: ConnectionKind::Zero,
        }
    }

    /// Uniform gravity `g`, zero Coriolis field; potential `φ = −g·r`.
    pub fn uniform(g: Vector3<f64>) -> Self {
        Self {
            gravity: Arc::new(move |_, _| Ok(g)),
            coriolis: Arc::new(|_, _| Ok(Vector3::zeros())),
            potential: Some(Arc::new(move |_, r| Ok(-g.dot(r)))),
            kind: ConnectionKind::Uniform,
        }
    }

    /// Connection with caller-supplied gravity and Coriolis fields.
    pub fn from_fields<G, C>(gravity: G, coriolis: C) -> Self
    where
        G: Fn(f64, &Vector3<f64>) -> Result<Vector3<f64>, FieldError> + Send + Sync + 'static,
        C: Fn(f64, &Vector3<f64>) -> Result<Vector3<f64>, FieldError> + Send + Sync + 'static,
    {
        Self {
            gravity: Arc::new(gravity),
            coriolis: Arc::new(coriolis),
            potential: None,
            kind: ConnectionKind::Custom,
        }
    }

    /// Attaches a potential energy per unit mass (for conservation reports).
    pub fn with_potential<P>(mut self, potential: P) -> Self
    where
        P: Fn(f64, &Vector3<f64>) -> Result<f64, FieldError> + Send + Sync + 'static,
    {
        self.potential = Some(Arc::new(potential));
        self
    }

    pub(crate) fn with_kind(mut self, kind: ConnectionKind) -> Self {
        self.kind = kind;
        self
    }

    /// The connection seen by an observer rotating at constant `omega`
    /// about `origin` inside uniform gravity `g`.
    pub fn rotating_frame(omega: Vector3<f64>, g: Vector3<f64>, origin: Vector3<f64>) -> Self {
        Self::uniform(g)
            .pullback(&RigidFrameMotion::uniform_rotation(omega, origin))
            .with_kind(ConnectionKind::RotatingFrame)
    }

    pub fn kind(&self) -> ConnectionKind {
        self.kind
    }

    pub fn has_potential(&self) -> bool {
        self.potential.is_some()
    }

    pub fn gravity_at(&self, t: f64, r: &Vector3<f64>) -> Result<Vector3<f64>, FieldError> {
        (*self.gravity)(t, r)
    }

    pub fn coriolis_at(&self, t: f64, r: &Vector3<f64>) -> Result<Vector3<f64>, FieldError> {
        (*self.coriolis)(t, r)
    }

    /// Potential energy per unit mass, when the connection carries one.
    pub fn potential_at(&self, t: f64, r: &Vector3<f64>) -> Option<Result<f64, FieldError>> {
        self.potential.as_ref().map(|phi| (**phi)(t, r))
    }

    /// The matrix `ω(dX)` at an event; its top row is always zero.
    pub fn connection_matrix(
        &self,
        event: &Event,
        dx: &Displacement,
    ) -> Result<Matrix4<f64>, FieldError> {
        let omega = self.coriolis_at(event.t, &event.r)?;
        let g = self.gravity_at(event.t, &event.r)?;
        let w = omega.cross(&dx.dr) - g * dx.dt;
        let mut m = Matrix4::zeros();
        for i in 0..3 {
            m[(1 + i, 0)] = w[i];
        }
        m.fixed_view_mut::<3, 3>(1, 1)
            .copy_from(&(skew(&omega) * dx.dt));
        Ok(m)
    }

    /// Affine part with respect to the spatial origin of the current
    /// frame: `(dt, −Ω×r·dt)`.
    pub fn affine_part(&self, event: &Event, dx: &Displacement) -> Result<AffinePart, FieldError> {
        let omega = self.coriolis_at(event.t, &event.r)?;
        Ok(AffinePart {
            time: dx.dt,
            space: -omega.cross(&event.r) * dx.dt,
        })
    }

    /// `∇T = dT + ω(dX)·T` for the linear column `T = (m, p)`.
    pub fn covariant_derivative_linear(
        &self,
        t_column: &Vector4<f64>,
        dt_column: &Vector4<f64>,
        event: &Event,
        dx: &Displacement,
    ) -> Result<Vector4<f64>, FieldError> {
        Ok(dt_column + self.connection_matrix(event, dx)? * t_column)
    }

    /// Component form of `∇J = dJ + ω·J + J·ωᵀ`:
    ///
    /// ```text
    /// ∇l = dl + Ω×l·dt + q×(Ω×dr − g·dt)
    /// ∇q = dq + Ω×q·dt
    /// ```
    pub fn covariant_derivative_angular(
        &self,
        mu: &GalileanTorsor,
        dmu: &GalileanTorsor,
        event: &Event,
        dx: &Displacement,
    ) -> Result<AngularDerivative, FieldError> {
        let omega = self.coriolis_at(event.t, &event.r)?;
        let g = self.gravity_at(event.t, &event.r)?;
        let w = omega.cross(&dx.dr) - g * dx.dt;
        Ok(AngularDerivative {
            angular_momentum: dmu.angular_momentum
                + omega.cross(&mu.angular_momentum) * dx.dt
                + mu.passage.cross(&w),
            passage: dmu.passage + omega.cross(&mu.passage) * dx.dt,
        })
    }

    /// Affine covariant derivative of the angular components:
    /// `∇̃l = ∇l + α_r×p` and `∇̃q = ∇q + m·α_r − α_t·p` with
    /// `α = (α_t, α_r)` the affine part. Both vanish along free motion.
    pub fn affine_derivative_angular(
        &self,
        mu: &GalileanTorsor,
        dmu: &GalileanTorsor,
        event: &Event,
        dx: &Displacement,
    ) -> Result<AngularDerivative, FieldError> {
        let nabla = self.covariant_derivative_angular(mu, dmu, event, dx)?;
        let alpha = self.affine_part(event, dx)?;
        Ok(AngularDerivative {
            angular_momentum: nabla.angular_momentum + alpha.space.cross(&mu.momentum),
            passage: nabla.passage + mu.mass * alpha.space - alpha.time * mu.momentum,
        })
    }

    /// Fields of the same connection in the comoving coordinates of
    /// `frame`. With `x = r₀(t) + R(t)·s'`, `t = t' − τ₀` and transport
    /// velocity `u`:
    ///
    /// ```text
    /// Ω'(t', s') = Rᵀ(Ω + ϖ)
    /// g'(t', s') = Rᵀ[g − 2Ω×u − r̈₀ − ϖ̇×(x−r₀) − ϖ×(ϖ×(x−r₀))]
    /// ```
    ///
    /// For an inertial source this produces the frame-acceleration,
    /// Euler and centrifugal fields; the Coriolis force on a moving
    /// particle comes from the `Ω'` field in the dynamics.
    pub fn pullback(&self, frame: &RigidFrameMotion) -> Self {
        let source = self.clone();
        let motion = frame.clone();
        let gravity = move |tq: f64, sq: &Vector3<f64>| -> Result<Vector3<f64>, FieldError> {
            let t = tq - motion.clock_offset();
            let rot = motion.rotation_at(t);
            let origin = motion.origin_at(t);
            let x = origin + rot * sq;
            let rel = x - origin;
            let w = motion.angular_velocity(t);
            let u = motion.origin_velocity(t) + w.cross(&rel);
            let g_src = source.gravity_at(t, &x)?;
            let omega_src = source.coriolis_at(t, &x)?;
            Ok(rot.transpose()
                * (g_src
                    - 2.0 * omega_src.cross(&u)
                    - motion.origin_acceleration(t)
                    - motion.angular_acceleration(t).cross(&rel)
                    - w.cross(&w.cross(&rel))))
        };
        let source = self.clone();
        let motion = frame.clone();
        let coriolis = move |tq: f64, sq: &Vector3<f64>| -> Result<Vector3<f64>, FieldError> {
            let t = tq - motion.clock_offset();
            let rot = motion.rotation_at(t);
            let x = motion.origin_at(t) + rot * sq;
            let omega_src = source.coriolis_at(t, &x)?;
            Ok(rot.transpose() * (omega_src + motion.angular_velocity(t)))
        };
        Self {
            gravity: Arc::new(gravity),
            coriolis: Arc::new(coriolis),
            potential: None,
            kind: ConnectionKind::Custom,
        }
    }
}
