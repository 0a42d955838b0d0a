//! Subcommand execution: scenario loading, simulation dispatch, and the
//! CSV/JSON/stdout emitters. All float output is printed with 17
//! significant digits so files round-trip and reruns are byte-identical.

use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use galtor::dynamics::{self, Termination};
use galtor::galilei::{GalileanTransformation, GalileiError};
use galtor::rigidbody::{self, PoinsotReport, RigidBodyError, RigidBodyState};
use galtor::torsor::{GalileanTorsor, TorsorError};
use galtor::{ConservationReport, ParticleState, SimulationError};
use nalgebra::Vector3;
use serde::Serialize;

use crate::scenario::{IntegratorSpec, OutputSpec, Scenario};

/// Failures split by exit code: validation problems exit 1, numerical
/// failures (singularities, degenerate inertia, failed self checks) exit 2.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(msg) => write!(f, "{msg}"),
            CliError::Numerical(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<SimulationError> for CliError {
    fn from(err: SimulationError) -> Self {
        match err {
            SimulationError::Field(_) => CliError::Numerical(err.to_string()),
            _ => CliError::Validation(err.to_string()),
        }
    }
}

impl From<RigidBodyError> for CliError {
    fn from(err: RigidBodyError) -> Self {
        match err {
            RigidBodyError::DegenerateInertia => CliError::Numerical(err.to_string()),
            _ => CliError::Validation(err.to_string()),
        }
    }
}

impl From<TorsorError> for CliError {
    fn from(err: TorsorError) -> Self {
        CliError::Validation(err.to_string())
    }
}

impl From<GalileiError> for CliError {
    fn from(err: GalileiError) -> Self {
        CliError::Validation(err.to_string())
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = fs::read_to_string(path).map_err(|e| {
        CliError::Validation(format!("cannot read scenario {}: {e}", path.display()))
    })?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("invalid scenario {}: {e}", path.display())))
}

pub fn apply_overrides(spec: &mut IntegratorSpec, dt: Option<f64>, steps: Option<usize>) {
    if let Some(dt) = dt {
        spec.dt = dt;
    }
    if let Some(steps) = steps {
        spec.steps = steps;
    }
}

fn f17(x: f64) -> String {
    format!("{x:.16e}")
}

fn output_paths(out_dir: &Path, output: &OutputSpec) -> (PathBuf, PathBuf) {
    let trajectory = output.trajectory.as_deref().unwrap_or("trajectory.csv");
    let report = output.report.as_deref().unwrap_or("report.json");
    (out_dir.join(trajectory), out_dir.join(report))
}

fn write_text(path: &Path, content: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| {
                CliError::Validation(format!("cannot create {}: {e}", parent.display()))
            })?;
        }
    }
    let file = fs::File::create(path)
        .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))?;
    let mut writer = BufWriter::new(file);
    writer
        .write_all(content.as_bytes())
        .and_then(|_| writer.flush())
        .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))
}

fn particle_csv(trajectory: &[ParticleState]) -> String {
    let mut csv = String::from("t,rx,ry,rz,px,py,pz,lx,ly,lz,qx,qy,qz\n");
    for s in trajectory {
        let row = [
            s.t, s.r.x, s.r.y, s.r.z, s.p.x, s.p.y, s.p.z, s.l.x, s.l.y, s.l.z, s.q.x, s.q.y, s.q.z,
        ];
        let cells: Vec<String> = row.iter().map(|x| f17(*x)).collect();
        csv.push_str(&cells.join(","));
        csv.push('\n');
    }
    csv
}

fn rigidbody_csv(trajectory: &[RigidBodyState]) -> String {
    let mut csv = String::from("t,qw,qx,qy,qz,wx,wy,wz\n");
    for s in trajectory {
        let q = s.orientation.quaternion();
        let row = [
            s.t,
            q.w,
            q.i,
            q.j,
            q.k,
            s.omega_body.x,
            s.omega_body.y,
            s.omega_body.z,
        ];
        let cells: Vec<String> = row.iter().map(|x| f17(*x)).collect();
        csv.push_str(&cells.join(","));
        csv.push('\n');
    }
    csv
}

fn to_json_pretty<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}

#[derive(Serialize)]
struct ParticleRunReport<'a> {
    termination: &'a Termination,
    conservation: &'a ConservationReport,
}

pub fn simulate_particle(
    scenario: Scenario,
    out_dir: &Path,
    dt: Option<f64>,
    steps: Option<usize>,
) -> Result<(), CliError> {
    let Scenario::Particle(mut spec) = scenario else {
        return Err(CliError::Validation(format!(
            "scenario kind is {}, expected particle",
            scenario.kind_name()
        )));
    };
    apply_overrides(&mut spec.integrator, dt, steps);
    let connection = spec.connection.build();
    let initial = spec.initial.build()?;
    let outcome = dynamics::simulate(&initial, &connection, &spec.integrator.build())?;

    let (trajectory_path, report_path) = output_paths(out_dir, &spec.output);
    write_text(&trajectory_path, &particle_csv(&outcome.trajectory))?;
    write_text(
        &report_path,
        &to_json_pretty(&ParticleRunReport {
            termination: &outcome.termination,
            conservation: &outcome.report,
        }),
    )?;
    println!(
        "wrote {} ({} samples) and {}",
        trajectory_path.display(),
        outcome.trajectory.len(),
        report_path.display()
    );
    if let Termination::SingularityAt { step, source } = outcome.termination {
        return Err(CliError::Numerical(format!(
            "run truncated: singularity of source {source} at step {step}; outputs hold the completed part"
        )));
    }
    Ok(())
}

pub fn simulate_rigidbody(
    scenario: Scenario,
    out_dir: &Path,
    dt: Option<f64>,
    steps: Option<usize>,
) -> Result<(), CliError> {
    let Scenario::Rigidbody(mut spec) = scenario else {
        return Err(CliError::Validation(format!(
            "scenario kind is {}, expected rigidbody",
            scenario.kind_name()
        )));
    };
    apply_overrides(&mut spec.integrator, dt, steps);
    let inertia = spec.build_inertia()?;
    let initial = spec.initial.build();
    let (trajectory, report): (Vec<RigidBodyState>, PoinsotReport) =
        rigidbody::simulate_free(&initial, &inertia, &spec.integrator.build())?;

    let (trajectory_path, report_path) = output_paths(out_dir, &spec.output);
    write_text(&trajectory_path, &rigidbody_csv(&trajectory))?;
    write_text(&report_path, &to_json_pretty(&report))?;
    println!(
        "wrote {} ({} samples) and {}",
        trajectory_path.display(),
        trajectory.len(),
        report_path.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct TorsorJson {
    m: f64,
    p: [f64; 3],
    q: [f64; 3],
    l: [f64; 3],
}

impl TorsorJson {
    fn from_torsor(t: &GalileanTorsor) -> Self {
        let a = |v: &Vector3<f64>| [v.x, v.y, v.z];
        TorsorJson {
            m: t.mass,
            p: a(&t.momentum),
            q: a(&t.passage),
            l: a(&t.angular_momentum),
        }
    }
}

fn component_gap(a: &GalileanTorsor, b: &GalileanTorsor) -> f64 {
    let mut err: f64 = (a.mass - b.mass).abs();
    err = err.max((a.momentum - b.momentum).abs().max());
    err = err.max((a.passage - b.passage).abs().max());
    err = err.max((a.angular_momentum - b.angular_momentum).abs().max());
    err
}

pub fn transform_torsor(scenario: Scenario) -> Result<(), CliError> {
    let Scenario::TorsorTransform(spec) = scenario else {
        return Err(CliError::Validation(format!(
            "scenario kind is {}, expected torsor_transform",
            scenario.kind_name()
        )));
    };
    let mu = spec.torsor.build();
    let a = spec
        .transformation
        .as_ref()
        .map(|t| t.build())
        .unwrap_or_else(GalileanTransformation::identity);

    let by_components = mu.transform(&a);
    let matrix = galtor::torsor::transform_matrix(&mu.to_matrix(), &a)?;
    let by_matrix = GalileanTorsor::from_matrix(&matrix)?;

    let component_json =
        serde_json::to_string(&TorsorJson::from_torsor(&by_components)).expect("torsor serializes");
    let matrix_json =
        serde_json::to_string(&TorsorJson::from_torsor(&by_matrix)).expect("torsor serializes");
    println!("component_law {component_json}");
    println!("matrix_law {matrix_json}");
    println!(
        "max_discrepancy {}",
        f17(component_gap(&by_components, &by_matrix))
    );
    Ok(())
}

pub fn invariants(scenario: Scenario) -> Result<(), CliError> {
    let Scenario::TorsorTransform(spec) = scenario else {
        return Err(CliError::Validation(format!(
            "scenario kind is {}, expected torsor_transform (a torsor with optional transformation)",
            scenario.kind_name()
        )));
    };
    let mu = spec.torsor.build();
    let inv = mu.invariants()?;
    let dim = mu.isotropy_dimension()?;
    println!("m {}", f17(inv.mass));
    println!(
        "l0 {} {} {}",
        f17(inv.spin.x),
        f17(inv.spin.y),
        f17(inv.spin.z)
    );
    println!("l0_norm {}", f17(inv.spin_norm));
    println!("isotropy_dimension {dim}");
    Ok(())
}

pub fn check_covariance(
    scenario: Scenario,
    dt: Option<f64>,
    steps: Option<usize>,
) -> Result<(), CliError> {
    let Scenario::Covariance(mut spec) = scenario else {
        return Err(CliError::Validation(format!(
            "scenario kind is {}, expected covariance",
            scenario.kind_name()
        )));
    };
    apply_overrides(&mut spec.integrator, dt, steps);
    let connection = spec.connection.build();
    let initial = spec.initial.build()?;
    let frame = spec.frame.build();
    let report =
        dynamics::covariance_check(&initial, &connection, &frame, &spec.integrator.build())?;
    println!("max_discrepancy {}", f17(report.max_discrepancy));
    println!("position {}", f17(report.position));
    println!("momentum {}", f17(report.momentum));
    println!("angular_momentum {}", f17(report.angular_momentum));
    println!("passage {}", f17(report.passage));
    println!("samples {}", report.samples);
    Ok(())
}

pub fn self_test(seed: u64) -> Result<(), CliError> {
    let outcomes = galtor::selftest::run(seed);
    let mut failures = 0usize;
    for (index, check) in outcomes.iter().enumerate() {
        let status = if check.passed() { "PASS" } else { "FAIL" };
        println!(
            "check {:02} {} {} | max err {} (tol {})",
            index + 1,
            status,
            check.name,
            f17(check.max_error),
            f17(check.tolerance)
        );
        if !check.passed() {
            failures += 1;
        }
    }
    if failures > 0 {
        return Err(CliError::Numerical(format!(
            "{failures} of {} self checks failed",
            outcomes.len()
        )));
    }
    println!("all {} self checks passed", outcomes.len());
    Ok(())
}
