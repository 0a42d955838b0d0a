//! Free fall of spinning point particles under a Galilean connection.
//!
//! The equation of motion is covariant constancy of the particle torsor
//! along its world line. In components, with `v = p/m` and the spin
//! `l₀ = l − q×p/m`:
//!
//! ```text
//! ṙ = p/m
//! ṗ = m·g − 2Ω×p
//! l̇ = r×ṗ − Ω×l₀
//! q̇ = p
//! ```
//!
//! and `m` is constant. The integrator is a classical fixed-step RK4.
//! `q = m·r` holds identically along solutions and is monitored, not
//! enforced. For the flat connection the ten quantities
//! `m, p, l, q − p·(t−t₀)` are constants of motion; conservation reports
//! track them together with `‖l₀‖` and, where a potential exists, the
//! energy `‖p‖²/2m + m·φ`.

use crate::connection::{ConnectionKind, FieldError, GalileanConnection};
use crate::galilei::{Event, GalileiError, RigidFrameMotion};
use crate::torsor::GalileanTorsor;
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// Radius around a gravity source below which the field is singular.
pub const SINGULARITY_RADIUS: f64 = 1e-9;

#[derive(Debug, Clone, Error)]
pub enum SimulationError {
    #[error("mass must be positive and finite, got {mass}")]
    InvalidMass { mass: f64 },
    #[error("time step must be positive and finite, got {dt}")]
    InvalidTimeStep { dt: f64 },
    #[error("step count must be at least 1")]
    NoSteps,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Frame(#[from] GalileiError),
}

/// A point source of Newtonian gravity with coupling constant `k_g`.
#[derive(Clone)]
pub struct GravitySource {
    pub mass: f64,
    pub coupling: f64,
    position: Arc<dyn Fn(f64) -> Vector3<f64> + Send + Sync>,
}

impl fmt::Debug for GravitySource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GravitySource")
            .field("mass", &self.mass)
            .field("coupling", &self.coupling)
            .finish()
    }
}

impl GravitySource {
    pub fn fixed(mass: f64, coupling: f64, position: Vector3<f64>) -> Self {
        Self {
            mass,
            coupling,
            position: Arc::new(move |_| position),
        }
    }

    pub fn moving<F>(mass: f64, coupling: f64, position: F) -> Self
    where
        F: Fn(f64) -> Vector3<f64> + Send + Sync + 'static,
    {
        Self {
            mass,
            coupling,
            position: Arc::new(position),
        }
    }

    pub fn position_at(&self, t: f64) -> Vector3<f64> {
        (*self.position)(t)
    }
}

/// Superposed inverse-square field `g = −Σ k_g·m'·(r−r')/‖r−r'‖³`.
pub fn newtonian_gravity(
    sources: &[GravitySource],
    t: f64,
    r: &Vector3<f64>,
) -> Result<Vector3<f64>, FieldError> {
    let mut g = Vector3::zeros();
    for (index, source) in sources.iter().enumerate() {
        let d = r - source.position_at(t);
        let dist = d.norm();
        if dist < SINGULARITY_RADIUS {
            return Err(FieldError::Singularity { index });
        }
        g -= source.coupling * source.mass / (dist * dist * dist) * d;
    }
    Ok(g)
}

/// Connection of a Newtonian point-source field, with its potential.
pub fn newtonian_connection(sources: Vec<GravitySource>) -> GalileanConnection {
    let field_sources = sources.clone();
    let potential_sources = sources;
    GalileanConnection::from_fields(
        move |t, r: &Vector3<f64>| newtonian_gravity(&field_sources, t, r),
        |_, _| Ok(Vector3::zeros()),
    )
    .with_potential(move |t, r: &Vector3<f64>| {
        let mut phi = 0.0;
        for (index, source) in potential_sources.iter().enumerate() {
            let dist = (r - source.position_at(t)).norm();
            if dist < SINGULARITY_RADIUS {
                return Err(FieldError::Singularity { index });
            }
            phi -= source.coupling * source.mass / dist;
        }
        Ok(phi)
    })
    .with_kind(ConnectionKind::Newtonian)
}

/// Instantaneous state of a spinning point particle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleState {
    pub t: f64,
    pub r: Vector3<f64>,
    /// Linear momentum `p = m·v`.
    pub p: Vector3<f64>,
    /// Angular momentum about the origin, `l = r×p + l₀`.
    pub l: Vector3<f64>,
    /// Mass moment `q`; equals `m·r` along trajectories.
    pub q: Vector3<f64>,
    pub mass: f64,
}

impl ParticleState {
    /// Builds a state with consistent torsor components from position,
    /// velocity and spin.
    pub fn from_initial_conditions(
        mass: f64,
        r0: Vector3<f64>,
        v0: Vector3<f64>,
        spin: Vector3<f64>,
        t0: f64,
    ) -> Result<Self, SimulationError> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(SimulationError::InvalidMass { mass });
        }
        let p = mass * v0;
        Ok(Self {
            t: t0,
            r: r0,
            p,
            l: spin + r0.cross(&p),
            q: mass * r0,
            mass,
        })
    }

    pub fn velocity(&self) -> Vector3<f64> {
        self.p / self.mass
    }

    pub fn event(&self) -> Event {
        Event::new(self.t, self.r)
    }

    pub fn torsor(&self) -> GalileanTorsor {
        GalileanTorsor::new(self.mass, self.p, self.q, self.l)
    }

    /// Boost-invariant spin `l₀ = l − q×p/m`.
    pub fn spin(&self) -> Vector3<f64> {
        self.l - self.q.cross(&self.p) / self.mass
    }
}

/// Total energy `‖p‖²/2m + m·φ` when the connection has a potential.
pub fn energy(
    state: &ParticleState,
    connection: &GalileanConnection,
) -> Option<Result<f64, FieldError>> {
    connection
        .potential_at(state.t, &state.r)
        .map(|phi| phi.map(|phi| state.p.norm_squared() / (2.0 * state.mass) + state.mass * phi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub steps: usize,
}

impl IntegratorConfig {
    pub fn new(dt: f64, steps: usize) -> Self {
        Self { dt, steps }
    }

    pub fn validate(&self) -> Result<(), SimulationError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(SimulationError::InvalidTimeStep { dt: self.dt });
        }
        if self.steps == 0 {
            return Err(SimulationError::NoSteps);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    /// The run stopped before `step` because a stage entered the
    /// singular radius of `source`.
    SingularityAt {
        step: usize,
        source: usize,
    },
}

/// Maximum observed drifts of the conserved quantities over a run.
/// Drifts are relative to the initial value when it exceeds 1e-12 in
/// magnitude, absolute otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    pub mass_drift: f64,
    pub spin_norm_drift: f64,
    /// Max `‖q − m·r‖` over the run.
    pub passage_consistency: f64,
    /// Max drift over the ten flat constants `m, p, l, q − p·(t−t₀)`;
    /// only reported for the flat connection.
    pub flat_invariants_drift: Option<f64>,
    /// Only reported when the connection carries a potential and that
    /// potential can be evaluated at every sampled state; if evaluation
    /// fails anywhere along the run (e.g. a sample inside a source's
    /// singular radius) the energy column is omitted rather than failing
    /// the simulation.
    pub energy_drift: Option<f64>,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOutcome {
    pub trajectory: Vec<ParticleState>,
    pub report: ConservationReport,
    pub termination: Termination,
}

#[derive(Clone, Copy)]
struct Rates {
    r: Vector3<f64>,
    p: Vector3<f64>,
    l: Vector3<f64>,
    q: Vector3<f64>,
}

fn rates(
    connection: &GalileanConnection,
    mass: f64,
    t: f64,
    r: &Vector3<f64>,
    p: &Vector3<f64>,
    l: &Vector3<f64>,
    q: &Vector3<f64>,
) -> Result<Rates, FieldError> {
    let g = connection.gravity_at(t, r)?;
    let omega = connection.coriolis_at(t, r)?;
    let p_dot = mass * g - 2.0 * omega.cross(p);
    let spin = l - q.cross(p) / mass;
    Ok(Rates {
        r: p / mass,
        p: p_dot,
        l: r.cross(&p_dot) - omega.cross(&spin),
        q: *p,
    })
}

/// One RK4 step. Negative `dt` integrates backwards.
pub fn step(
    state: &ParticleState,
    connection: &GalileanConnection,
    dt: f64,
) -> Result<ParticleState, SimulationError> {
    let m = state.mass;
    if !(m > 0.0 && m.is_finite()) {
        return Err(SimulationError::InvalidMass { mass: m });
    }
    let half = 0.5 * dt;
    let k1 = rates(
        connection, m, state.t, &state.r, &state.p, &state.l, &state.q,
    )?;
    let k2 = rates(
        connection,
        m,
        state.t + half,
        &(state.r + half * k1.r),
        &(state.p + half * k1.p),
        &(state.l + half * k1.l),
        &(state.q + half * k1.q),
    )?;
    let k3 = rates(
        connection,
        m,
        state.t + half,
        &(state.r + half * k2.r),
        &(state.p + half * k2.p),
        &(state.l + half * k2.l),
        &(state.q + half * k2.q),
    )?;
    let k4 = rates(
        connection,
        m,
        state.t + dt,
        &(state.r + dt * k3.r),
        &(state.p + dt * k3.p),
        &(state.l + dt * k3.l),
        &(state.q + dt * k3.q),
    )?;
    let w = dt / 6.0;
    Ok(ParticleState {
        t: state.t + dt,
        r: state.r + w * (k1.r + 2.0 * k2.r + 2.0 * k3.r + k4.r),
        p: state.p + w * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p),
        l: state.l + w * (k1.l + 2.0 * k2.l + 2.0 * k3.l + k4.l),
        q: state.q + w * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q),
        mass: m,
    })
}

fn drift(current: f64, initial: f64) -> f64 {
    let delta = (current - initial).abs();
    if initial.abs() > 1e-12 {
        delta / initial.abs()
    } else {
        delta
    }
}

fn flat_constants(state: &ParticleState, t0: f64) -> [f64; 10] {
    let c = state.q - state.p * (state.t - t0);
    [
        state.mass, state.p.x, state.p.y, state.p.z, state.l.x, state.l.y, state.l.z, c.x, c.y, c.z,
    ]
}

fn energy_drift(trajectory: &[ParticleState], connection: &GalileanConnection) -> Option<f64> {
    let e0 = match energy(&trajectory[0], connection)? {
        Ok(e) => e,
        Err(_) => return None,
    };
    let mut worst = 0.0_f64;
    for state in trajectory {
        match energy(state, connection) {
            Some(Ok(e)) => worst = worst.max(drift(e, e0)),
            _ => return None,
        }
    }
    Some(worst)
}

fn build_report(
    trajectory: &[ParticleState],
    connection: &GalileanConnection,
) -> ConservationReport {
    let first = &trajectory[0];
    let t0 = first.t;
    let spin_norm0 = first.spin().norm();
    let flat0 = (connection.kind() == ConnectionKind::Zero).then(|| flat_constants(first, t0));

    let mut report = ConservationReport {
        mass_drift: 0.0,
        spin_norm_drift: 0.0,
        passage_consistency: 0.0,
        flat_invariants_drift: flat0.map(|_| 0.0),
        energy_drift: energy_drift(trajectory, connection),
        samples: trajectory.len(),
    };
    for state in trajectory {
        report.mass_drift = report.mass_drift.max(drift(state.mass, first.mass));
        report.spin_norm_drift = report
            .spin_norm_drift
            .max(drift(state.spin().norm(), spin_norm0));
        report.passage_consistency = report
            .passage_consistency
            .max((state.q - state.mass * state.r).norm());
        if let Some(ref c0) = flat0 {
            let c = flat_constants(state, t0);
            let worst = c
                .iter()
                .zip(c0.iter())
                .map(|(a, b)| drift(*a, *b))
                .fold(0.0_f64, f64::max);
            let slot = report.flat_invariants_drift.as_mut().unwrap();
            *slot = slot.max(worst);
        }
    }
    report
}

/// Integrates `config.steps` RK4 steps, recording every state. A stage
/// entering a gravity source's singular radius truncates the run and is
/// reported in the termination, not as an error.
pub fn simulate(
    initial: &ParticleState,
    connection: &GalileanConnection,
    config: &IntegratorConfig,
) -> Result<SimulationOutcome, SimulationError> {
    config.validate()?;
    if !(initial.mass > 0.0 && initial.mass.is_finite()) {
        return Err(SimulationError::InvalidMass { mass: initial.mass });
    }
    let mut trajectory = Vec::with_capacity(config.steps + 1);
    trajectory.push(*initial);
    let mut termination = Termination::Completed;
    for index in 0..config.steps {
        match step(trajectory.last().unwrap(), connection, config.dt) {
            Ok(next) => trajectory.push(next),
            Err(SimulationError::Field(FieldError::Singularity { index: source })) => {
                termination = Termination::SingularityAt {
                    step: index,
                    source,
                };
                break;
            }
            Err(other) => return Err(other),
        }
    }
    let report = build_report(&trajectory, connection);
    Ok(SimulationOutcome {
        trajectory,
        report,
        termination,
    })
}

/// The same state seen by the comoving observer of `frame`: coordinates
/// through the event map, torsor components through the transport
/// element of the frame at that event. Preserves `q = m·r`.
pub fn to_frame(
    state: &ParticleState,
    frame: &RigidFrameMotion,
) -> Result<ParticleState, GalileiError> {
    let event = frame.map_event(&state.event());
    let transport = frame.torsor_transport(state.t, &state.r)?;
    let torsor = state.torsor().transform(&transport);
    Ok(ParticleState {
        t: event.t,
        r: event.r,
        p: torsor.momentum,
        l: torsor.angular_momentum,
        q: torsor.passage,
        mass: torsor.mass,
    })
}

/// Componentwise maxima of `‖mapped − recomputed‖` over the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceReport {
    pub max_discrepancy: f64,
    pub position: f64,
    pub momentum: f64,
    pub angular_momentum: f64,
    pub passage: f64,
    pub samples: usize,
}

/// Integrates the same motion twice: once in the source frame, once in
/// the comoving coordinates of `frame` under the pulled-back connection,
/// starting from the transformed initial state. Every sample of the
/// first run is mapped into the frame and compared with the second.
pub fn covariance_check(
    initial: &ParticleState,
    connection: &GalileanConnection,
    frame: &RigidFrameMotion,
    config: &IntegratorConfig,
) -> Result<CovarianceReport, SimulationError> {
    let direct = simulate(initial, connection, config)?;
    let mapped_initial = to_frame(initial, frame)?;
    let pulled = connection.pullback(frame);
    let comoving = simulate(&mapped_initial, &pulled, config)?;
    let samples = direct.trajectory.len().min(comoving.trajectory.len());
    let mut report = CovarianceReport {
        max_discrepancy: 0.0,
        position: 0.0,
        momentum: 0.0,
        angular_momentum: 0.0,
        passage: 0.0,
        samples,
    };
    for i in 0..samples {
        let mapped = to_frame(&direct.trajectory[i], frame)?;
        let other = &comoving.trajectory[i];
        report.position = report.position.max((mapped.r - other.r).norm());
        report.momentum = report.momentum.max((mapped.p - other.p).norm());
        report.angular_momentum = report.angular_momentum.max((mapped.l - other.l).norm());
        report.passage = report.passage.max((mapped.q - other.q).norm());
        report.max_discrepancy = report.max_discrepancy.max((mapped.t - other.t).abs());
    }
    report.max_discrepancy = report
        .max_discrepancy
        .max(report.position)
        .max(report.momentum)
        .max(report.angular_momentum)
        .max(report.passage);
    Ok(report)
}
