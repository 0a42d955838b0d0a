//! Numerical self checks runnable from the command line.
//!
//! Each check exercises one published guarantee against an independent
//! oracle (matrix conjugation, finite differences, closed forms) and
//! reports the worst error it saw next to a pinned tolerance. The whole
//! battery is deterministic in the seed.

use crate::connection::{Displacement, GalileanConnection};
use crate::dynamics::{covariance_check, simulate, IntegratorConfig, ParticleState};
use crate::galilei::{rotation_from_axis_angle, Event, RigidFrameMotion};
use crate::rigidbody::{simulate_free, InertiaMatrix, RigidBodyState};
use crate::sample;
use crate::torsor::transform_matrix;
use nalgebra::{Matrix4, Matrix5, UnitQuaternion, Vector3};
use rand::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub max_error: f64,
    pub tolerance: f64,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.max_error <= self.tolerance
    }
}

/// Runs the full battery; every check derives its data from `seed`.
pub fn run(seed: u64) -> Vec<CheckOutcome> {
    vec![
        transform_against_conjugation(seed),
        invariants_preserved(seed.wrapping_add(1)),
        stabilizer_fixes_torsors(seed.wrapping_add(2)),
        lift_is_a_homomorphism(seed.wrapping_add(3)),
        inverses_cancel(seed.wrapping_add(4)),
        flat_motion_constants(),
        parabola_endpoint(),
        derivative_routes_agree(seed.wrapping_add(5)),
        pullback_finite_difference(),
        rigid_body_invariants(),
        rotating_frame_covariance(),
    ]
}

fn max_entry(m: &Matrix5<f64>) -> f64 {
    m.abs().max()
}

fn transform_against_conjugation(seed: u64) -> CheckOutcome {
    let mut rng = sample::rng(seed);
    let mut worst = 0.0_f64;
    for _ in 0..200 {
        let mu = sample::torsor(&mut rng);
        let a = sample::galilean(&mut rng);
        let by_components = mu.transform(&a).to_matrix();
        let by_matrix = transform_matrix(&mu.to_matrix(), &a).expect("sample matrices are skew");
        worst = worst.max(max_entry(&(by_components - by_matrix)));
    }
    CheckOutcome {
        name: "torsor components match matrix conjugation",
        max_error: worst,
        tolerance: 1e-12,
    }
}

fn invariants_preserved(seed: u64) -> CheckOutcome {
    let mut rng = sample::rng(seed);
    let mut worst = 0.0_f64;
    for _ in 0..200 {
        let mu = sample::torsor(&mut rng);
        let a = sample::galilean(&mut rng);
        let before = mu.invariants().expect("sampled torsors are massive");
        let after = mu.transform(&a).invariants().expect("mass is preserved");
        worst = worst.max((after.mass - before.mass).abs() / before.mass);
        worst = worst.max((after.spin_norm - before.spin_norm).abs() / before.spin_norm.max(1.0));
        let rotated = a.rotation().transpose() * before.spin;
        worst = worst.max((after.spin - rotated).norm() / before.spin_norm.max(1.0));
    }
    CheckOutcome {
        name: "mass and spin are invariant",
        max_error: worst,
        tolerance: 1e-10,
    }
}

fn stabilizer_fixes_torsors(seed: u64) -> CheckOutcome {
    let mut rng = sample::rng(seed);
    let mut worst = 0.0_f64;
    let mut done = 0;
    while done < 50 {
        let mu = sample::torsor(&mut rng);
        if mu.has_zero_spin().unwrap() {
            continue;
        }
        let theta = rng.random_range(0.0..std::f64::consts::TAU);
        let tau_prime = rng.random_range(-1.0..1.0);
        let a = mu
            .stabilizer_element(theta, tau_prime, None)
            .expect("nonzero spin needs no axis");
        let image = mu.transform(&a);
        worst = worst.max(max_entry(&(image.to_matrix() - mu.to_matrix())));
        done += 1;
    }
    CheckOutcome {
        name: "stabilizer elements fix their torsor",
        max_error: worst,
        tolerance: 1e-10,
    }
}

fn lift_is_a_homomorphism(seed: u64) -> CheckOutcome {
    let mut rng = sample::rng(seed);
    let mut worst = 0.0_f64;
    for _ in 0..200 {
        let a = sample::galilean(&mut rng);
        let b = sample::galilean(&mut rng);
        worst = worst.max(max_entry(&(a.compose(&b).lift5() - a.lift5() * b.lift5())));
    }
    CheckOutcome {
        name: "lift turns composition into matrix product",
        max_error: worst,
        tolerance: 1e-12,
    }
}

fn inverses_cancel(seed: u64) -> CheckOutcome {
    let mut rng = sample::rng(seed);
    let mut worst = 0.0_f64;
    for _ in 0..200 {
        let a = sample::galilean(&mut rng);
        worst = worst.max(max_entry(
            &(a.compose(&a.inverse()).lift5() - Matrix5::identity()),
        ));
        worst = worst.max(max_entry(
            &(a.inverse().compose(&a).lift5() - Matrix5::identity()),
        ));
    }
    CheckOutcome {
        name: "inverses compose to the identity",
        max_error: worst,
        tolerance: 1e-12,
    }
}

fn flat_motion_constants() -> CheckOutcome {
    let initial = ParticleState::from_initial_conditions(
        2.0,
        Vector3::new(0.5, -0.25, 1.0),
        Vector3::new(0.125, 0.5, -0.75),
        Vector3::new(0.25, 0.0, 0.5),
        0.0,
    )
    .expect("mass is positive");
    let out = simulate(
        &initial,
        &GalileanConnection::zero(),
        &IntegratorConfig::new((2.0_f64).powi(-10), 1000),
    )
    .expect("flat fields are total");
    CheckOutcome {
        name: "flat motion keeps the ten constants",
        max_error: out.report.flat_invariants_drift.unwrap(),
        tolerance: 1e-12,
    }
}

fn parabola_endpoint() -> CheckOutcome {
    let initial = ParticleState::from_initial_conditions(
        1.0,
        Vector3::zeros(),
        Vector3::new(1.0, 0.0, 0.0),
        Vector3::zeros(),
        0.0,
    )
    .expect("mass is positive");
    let out = simulate(
        &initial,
        &GalileanConnection::uniform(Vector3::new(0.0, 0.0, -9.81)),
        &IntegratorConfig::new(1e-3, 1000),
    )
    .expect("uniform fields are total");
    let last = out.trajectory.last().unwrap();
    let err = (last.r - Vector3::new(1.0, 0.0, -4.905)).norm();
    CheckOutcome {
        name: "parabola lands on the closed form",
        max_error: err,
        tolerance: 1e-9,
    }
}

fn derivative_routes_agree(seed: u64) -> CheckOutcome {
    let mut rng = sample::rng(seed);
    let mut worst = 0.0_f64;
    for _ in 0..200 {
        let g = sample::vector(&mut rng, 2.0);
        let omega = sample::vector(&mut rng, 2.0);
        let conn = GalileanConnection::from_fields(move |_, _| Ok(g), move |_, _| Ok(omega));
        let mu = sample::torsor(&mut rng);
        let dmu = sample::torsor(&mut rng);
        let ev = sample::event(&mut rng);
        let dx = Displacement::new(rng.random_range(-0.1..0.1), sample::vector(&mut rng, 0.1));
        let tuple = conn
            .covariant_derivative_angular(&mu, &dmu, &ev, &dx)
            .expect("constant fields are total");
        let omega_m = conn.connection_matrix(&ev, &dx).unwrap();
        let j = mu.angular_matrix();
        let nabla_j = dmu.angular_matrix() + omega_m * j + j * omega_m.transpose();
        let q = Vector3::new(nabla_j[(1, 0)], nabla_j[(2, 0)], nabla_j[(3, 0)]);
        let l = crate::galilei::unskew(&(-nabla_j.fixed_view::<3, 3>(1, 1).into_owned()));
        worst = worst.max((tuple.passage - q).norm());
        worst = worst.max((tuple.angular_momentum - l).norm());
    }
    CheckOutcome {
        name: "tuple and matrix derivatives agree",
        max_error: worst,
        tolerance: 1e-12,
    }
}

fn pullback_finite_difference() -> CheckOutcome {
    let conn = GalileanConnection::from_fields(
        |_, r| Ok(Vector3::new(0.4 * r.z, -0.8, 0.3 * r.x)),
        |t, _| Ok(Vector3::new(0.2, 0.1 * t, -0.6)),
    );
    let frame = RigidFrameMotion::from_closures(
        0.1,
        |t: f64| rotation_from_axis_angle(&Vector3::new(0.4 * t, -0.2 * t, 0.3 * t * t)),
        |t: f64| Vector3::new(0.2 * t * t, 0.5 * t, -0.1 * t * t),
    )
    .expect("closure frame is a rotation at t = 0");
    let pulled = conn.pullback(&frame);

    let p_at = |tq: f64, sq: &Vector3<f64>| -> Matrix4<f64> {
        let t = tq - frame.clock_offset();
        let x = frame.origin_at(t) + frame.rotation_at(t) * sq;
        frame.jacobian(t, &x).unwrap().linear_part()
    };
    let mut worst = 0.0_f64;
    // Large enough that the frame Jacobian's own finite-difference noise
    // (~1e-10), divided by h, stays far below the 1e-5 tolerance.
    let h = 1e-4;
    for (tq, sq) in [
        (0.6, Vector3::new(0.3, -0.5, 0.8)),
        (1.1, Vector3::new(-0.2, 0.4, 0.1)),
        (-0.4, Vector3::new(0.7, 0.2, -0.6)),
    ] {
        let t = tq - frame.clock_offset();
        let x = frame.origin_at(t) + frame.rotation_at(t) * sq;
        let p = p_at(tq, &sq);
        let p_inv = p.try_inverse().unwrap();
        for (dtq, dsq) in [
            (1.0, Vector3::zeros()),
            (0.0, Vector3::x()),
            (0.0, Vector3::y()),
            (0.0, Vector3::z()),
        ] {
            let dp = (p_at(tq + h * dtq, &(sq + h * dsq)) - p_at(tq - h * dtq, &(sq - h * dsq)))
                / (2.0 * h);
            let dx_space = p.fixed_view::<3, 1>(1, 0).into_owned() * dtq
                + p.fixed_view::<3, 3>(1, 1).into_owned() * dsq;
            let oracle = p_inv
                * (conn
                    .connection_matrix(&Event::new(t, x), &Displacement::new(dtq, dx_space))
                    .unwrap()
                    * p
                    + dp);
            let got = pulled
                .connection_matrix(&Event::new(tq, sq), &Displacement::new(dtq, dsq))
                .unwrap();
            worst = worst.max((got - oracle).abs().max());
        }
    }
    CheckOutcome {
        name: "pullback matches finite differences",
        max_error: worst,
        tolerance: 1e-5,
    }
}

fn rigid_body_invariants() -> CheckOutcome {
    let inertia = InertiaMatrix::from_diagonal(Vector3::new(1.0, 2.0, 3.0));
    let initial = RigidBodyState::new(0.0, UnitQuaternion::identity(), Vector3::new(0.3, 1.0, 0.2));
    let (_, report) = simulate_free(&initial, &inertia, &IntegratorConfig::new(1e-3, 2000))
        .expect("inertia is positive definite");
    CheckOutcome {
        name: "free rigid body keeps its invariants",
        max_error: report
            .spin_drift
            .max(report.kinetic_form_drift)
            .max(report.momentum_norm_drift),
        tolerance: 1e-9,
    }
}

fn rotating_frame_covariance() -> CheckOutcome {
    let conn = GalileanConnection::uniform(Vector3::new(0.0, 0.0, -9.81));
    let initial = ParticleState::from_initial_conditions(
        1.0,
        Vector3::new(1.0, 0.0, 0.0),
        Vector3::new(0.2, 0.3, 0.0),
        Vector3::new(0.0, 0.0, 0.1),
        0.0,
    )
    .expect("mass is positive");
    let frame = RigidFrameMotion::uniform_rotation(Vector3::new(0.0, 0.0, 0.5), Vector3::zeros());
    let report = covariance_check(&initial, &conn, &frame, &IntegratorConfig::new(1e-3, 500))
        .expect("uniform fields are total");
    CheckOutcome {
        name: "covariance in a rotating frame",
        max_error: report.max_discrepancy,
        tolerance: 1e-6,
    }
}
