//! Time-dependent rigid frame motions.
//!
//! A rigid frame motion carries spatial coordinates to the coordinates of
//! a moving rigid observer: `r' = R(t)ᵀ(r − r₀(t))`, `t' = t + τ₀`. The
//! Poisson vector `ϖ(t)` (with `Ṙ = j(ϖ)R`) and the transport velocity
//! `u(t, r) = ϖ×(r − r₀) + ṙ₀` make the Jacobian of this map a Galilean
//! linear part at every event, which is what ties moving observers back to
//! the group.
//!
//! Rotation and origin are supplied as closures; analytic first and second
//! derivatives can be attached, with central finite differences as the
//! fallback (step `1e-6·max(1, |t|)` for first derivatives,
//! `1e-4·max(1, |t|)` for second derivatives, where the smaller step would
//! drown in roundoff).

use super::{
    rotation_from_axis_angle, skew, unskew, validate_rotation, Event, GalileanTransformation,
    GalileiError,
};
use nalgebra::{Matrix3, Vector3};
use std::sync::Arc;

type MatrixFn = Arc<dyn Fn(f64) -> Matrix3<f64> + Send + Sync>;
type VectorFn = Arc<dyn Fn(f64) -> Vector3<f64> + Send + Sync>;

fn fd1_step(t: f64) -> f64 {
    1e-6 * t.abs().max(1.0)
}

fn fd2_step(t: f64) -> f64 {
    1e-4 * t.abs().max(1.0)
}

/// A rigid observer motion `(τ₀, R(t), r₀(t))`.
#[derive(Clone)]
pub struct RigidFrameMotion {
    tau0: f64,
    rotation: MatrixFn,
    rotation_dot: Option<MatrixFn>,
    rotation_ddot: Option<MatrixFn>,
    origin: VectorFn,
    origin_dot: Option<VectorFn>,
    origin_ddot: Option<VectorFn>,
}

impl std::fmt::Debug for RigidFrameMotion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RigidFrameMotion")
            .field("tau0", &self.tau0)
            .field(
                "analytic_rotation_derivatives",
                &self.rotation_dot.is_some(),
            )
            .field("analytic_origin_derivatives", &self.origin_dot.is_some())
            .finish()
    }
}

impl RigidFrameMotion {
    /// The identity motion: fixed frame, no clock offset.
    pub fn static_frame() -> Self {
        Self {
            tau0: 0.0,
            rotation: Arc::new(|_| Matrix3::identity()),
            rotation_dot: Some(Arc::new(|_| Matrix3::zeros())),
            rotation_ddot: Some(Arc::new(|_| Matrix3::zeros())),
            origin: Arc::new(|_| Vector3::zeros()),
            origin_dot: Some(Arc::new(|_| Vector3::zeros())),
            origin_ddot: Some(Arc::new(|_| Vector3::zeros())),
        }
    }

    /// Rotation at constant rate `omega` about the fixed point `pivot`:
    /// `R(t) = exp(j(omega)·t)`, `r₀(t) = pivot`. Derivatives analytic.
    pub fn uniform_rotation(omega: Vector3<f64>, pivot: Vector3<f64>) -> Self {
        let jw = skew(&omega);
        let rot = move |t: f64| rotation_from_axis_angle(&(omega * t));
        Self {
            tau0: 0.0,
            rotation: Arc::new(rot),
            rotation_dot: Some(Arc::new(move |t| jw * rot(t))),
            rotation_ddot: Some(Arc::new(move |t| jw * jw * rot(t))),
            origin: Arc::new(move |_| pivot),
            origin_dot: Some(Arc::new(|_| Vector3::zeros())),
            origin_ddot: Some(Arc::new(|_| Vector3::zeros())),
        }
    }

    /// Non-rotating origin motion `r₀(t) = origin0 + velocity0·t + accel·t²/2`.
    pub fn uniform_acceleration(
        accel: Vector3<f64>,
        velocity0: Vector3<f64>,
        origin0: Vector3<f64>,
    ) -> Self {
        Self {
            tau0: 0.0,
            rotation: Arc::new(|_| Matrix3::identity()),
            rotation_dot: Some(Arc::new(|_| Matrix3::zeros())),
            rotation_ddot: Some(Arc::new(|_| Matrix3::zeros())),
            origin: Arc::new(move |t| origin0 + velocity0 * t + accel * (0.5 * t * t)),
            origin_dot: Some(Arc::new(move |t| velocity0 + accel * t)),
            origin_ddot: Some(Arc::new(move |_| accel)),
        }
    }

    /// Builds from rotation and origin closures; derivatives fall back to
    /// central finite differences unless attached afterwards. The rotation
    /// is validated at `t = 0`.
    pub fn from_closures<R, O>(tau0: f64, rotation: R, origin: O) -> Result<Self, GalileiError>
    where
        R: Fn(f64) -> Matrix3<f64> + Send + Sync + 'static,
        O: Fn(f64) -> Vector3<f64> + Send + Sync + 'static,
    {
        validate_rotation(&rotation(0.0))?;
        Ok(Self {
            tau0,
            rotation: Arc::new(rotation),
            rotation_dot: None,
            rotation_ddot: None,
            origin: Arc::new(origin),
            origin_dot: None,
            origin_ddot: None,
        })
    }

    pub fn with_rotation_derivatives<D, DD>(mut self, dot: D, ddot: DD) -> Self
    where
        D: Fn(f64) -> Matrix3<f64> + Send + Sync + 'static,
        DD: Fn(f64) -> Matrix3<f64> + Send + Sync + 'static,
    {
        self.rotation_dot = Some(Arc::new(dot));
        self.rotation_ddot = Some(Arc::new(ddot));
        self
    }

    pub fn with_origin_derivatives<D, DD>(mut self, dot: D, ddot: DD) -> Self
    where
        D: Fn(f64) -> Vector3<f64> + Send + Sync + 'static,
        DD: Fn(f64) -> Vector3<f64> + Send + Sync + 'static,
    {
        self.origin_dot = Some(Arc::new(dot));
        self.origin_ddot = Some(Arc::new(ddot));
        self
    }

    pub fn with_clock_offset(mut self, tau0: f64) -> Self {
        self.tau0 = tau0;
        self
    }

    pub fn clock_offset(&self) -> f64 {
        self.tau0
    }

    pub fn rotation_at(&self, t: f64) -> Matrix3<f64> {
        (self.rotation)(t)
    }

    pub fn origin_at(&self, t: f64) -> Vector3<f64> {
        (self.origin)(t)
    }

    /// Checks that `R(t)` is a rotation to the group tolerance.
    pub fn validate_at(&self, t: f64) -> Result<(), GalileiError> {
        validate_rotation(&self.rotation_at(t))
    }

    fn rotation_dot_at(&self, t: f64) -> Matrix3<f64> {
        match &self.rotation_dot {
            Some(f) => f(t),
            None => {
                let h = fd1_step(t);
                ((self.rotation)(t + h) - (self.rotation)(t - h)) / (2.0 * h)
            }
        }
    }

    fn rotation_ddot_at(&self, t: f64) -> Matrix3<f64> {
        match &self.rotation_ddot {
            Some(f) => f(t),
            None => {
                let h = fd2_step(t);
                ((self.rotation)(t + h) - 2.0 * (self.rotation)(t) + (self.rotation)(t - h))
                    / (h * h)
            }
        }
    }

    pub fn origin_velocity(&self, t: f64) -> Vector3<f64> {
        match &self.origin_dot {
            Some(f) => f(t),
            None => {
                let h = fd1_step(t);
                ((self.origin)(t + h) - (self.origin)(t - h)) / (2.0 * h)
            }
        }
    }

    pub fn origin_acceleration(&self, t: f64) -> Vector3<f64> {
        match &self.origin_ddot {
            Some(f) => f(t),
            None => {
                let h = fd2_step(t);
                ((self.origin)(t + h) - 2.0 * (self.origin)(t) + (self.origin)(t - h)) / (h * h)
            }
        }
    }

    /// The Poisson vector `ϖ(t)`: `Ṙ = j(ϖ)·R`.
    pub fn angular_velocity(&self, t: f64) -> Vector3<f64> {
        unskew(&(self.rotation_dot_at(t) * self.rotation_at(t).transpose()))
    }

    /// `ϖ̇(t)`, from `j(ϖ̇) = skew part of (R̈Rᵀ + ṘṘᵀ)`.
    pub fn angular_acceleration(&self, t: f64) -> Vector3<f64> {
        let r = self.rotation_at(t);
        let rd = self.rotation_dot_at(t);
        unskew(&(self.rotation_ddot_at(t) * r.transpose() + rd * rd.transpose()))
    }

    /// Velocity of the frame point currently at `r`:
    /// `u = ϖ×(r − r₀) + ṙ₀`.
    pub fn transport_velocity(&self, t: f64, r: &Vector3<f64>) -> Vector3<f64> {
        self.angular_velocity(t).cross(&(r - self.origin_at(t))) + self.origin_velocity(t)
    }

    /// Coordinates of an event in the moving frame.
    pub fn map_event(&self, event: &Event) -> Event {
        Event {
            t: event.t + self.tau0,
            r: self.rotation_at(event.t).transpose() * (event.r - self.origin_at(event.t)),
        }
    }

    /// The Galilean linear part of the coordinate map at `(t, r)`:
    /// boost `u = transport_velocity`, rotation `R(t)`, no translation.
    pub fn jacobian(
        &self,
        t: f64,
        r: &Vector3<f64>,
    ) -> Result<GalileanTransformation, GalileiError> {
        GalileanTransformation::new(
            0.0,
            Vector3::zeros(),
            self.transport_velocity(t, r),
            self.rotation_at(t),
        )
    }

    /// The Galilean transformation that carries torsor components between
    /// the two frames at the event `(t, r)`.
    ///
    /// Linear part as in [`Self::jacobian`]; the translation `k = r₀(t)`
    /// accounts for the moving component origin (the frame origin at the
    /// current time), matching the origin convention of the dynamics.
    pub fn torsor_transport(
        &self,
        t: f64,
        r: &Vector3<f64>,
    ) -> Result<GalileanTransformation, GalileiError> {
        GalileanTransformation::new(
            0.0,
            self.origin_at(t),
            self.transport_velocity(t, r),
            self.rotation_at(t),
        )
    }

    /// The inverse motion: maps moving-frame coordinates back. Derivatives
    /// are chained from this motion's accessors, so analytic data stays
    /// analytic.
    pub fn inverse(&self) -> Self {
        let tau0 = self.tau0;
        let f = self.clone();
        let rotation = Arc::new(move |s: f64| f.rotation_at(s - tau0).transpose());
        let f = self.clone();
        let rotation_dot = Arc::new(move |s: f64| f.rotation_dot_at(s - tau0).transpose());
        let f = self.clone();
        let rotation_ddot = Arc::new(move |s: f64| f.rotation_ddot_at(s - tau0).transpose());
        let f = self.clone();
        let origin = Arc::new(move |s: f64| {
            let t = s - tau0;
            -(f.rotation_at(t).transpose() * f.origin_at(t))
        });
        let f = self.clone();
        let origin_dot = Arc::new(move |s: f64| {
            let t = s - tau0;
            -(f.rotation_dot_at(t).transpose() * f.origin_at(t))
                - f.rotation_at(t).transpose() * f.origin_velocity(t)
        });
        let f = self.clone();
        let origin_ddot = Arc::new(move |s: f64| {
            let t = s - tau0;
            -(f.rotation_ddot_at(t).transpose() * f.origin_at(t))
                - 2.0 * (f.rotation_dot_at(t).transpose() * f.origin_velocity(t))
                - f.rotation_at(t).transpose() * f.origin_acceleration(t)
        });
        Self {
            tau0: -tau0,
            rotation,
            rotation_dot: Some(rotation_dot),
            rotation_ddot: Some(rotation_ddot),
            origin,
            origin_dot: Some(origin_dot),
            origin_ddot: Some(origin_ddot),
        }
    }
}
