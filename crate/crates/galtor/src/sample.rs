//! Seeded sample data for tests and self checks.
//!
//! All generators draw from a caller-supplied RNG so that every check is
//! reproducible from a single seed.

use crate::affine::{AffineFunction, AffinePoint, AffineTransformation};
use crate::galilei::{rotation_from_axis_angle, Event, GalileanTransformation};
use crate::torsor::GalileanTorsor;
use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform components in `(-scale, scale)`.
pub fn vector(rng: &mut impl Rng, scale: f64) -> Vector3<f64> {
    Vector3::new(
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
    )
}

pub fn unit_vector(rng: &mut impl Rng) -> Vector3<f64> {
    loop {
        let v = vector(rng, 1.0);
        let n = v.norm();
        if n > 0.1 {
            return v / n;
        }
    }
}

pub fn rotation(rng: &mut impl Rng) -> Matrix3<f64> {
    rotation_from_axis_angle(&(unit_vector(rng) * rng.random_range(0.0..PI)))
}

pub fn galilean(rng: &mut impl Rng) -> GalileanTransformation {
    GalileanTransformation::new(
        rng.random_range(-2.0..2.0),
        vector(rng, 2.0),
        vector(rng, 2.0),
        rotation(rng),
    )
    .expect("axis-angle rotations are orthogonal")
}

/// Mass in `[0.5, 3)`, other components in `(-2, 2)`.
pub fn torsor(rng: &mut impl Rng) -> GalileanTorsor {
    GalileanTorsor::new(
        rng.random_range(0.5..3.0),
        vector(rng, 2.0),
        vector(rng, 2.0),
        vector(rng, 2.0),
    )
}

pub fn event(rng: &mut impl Rng) -> Event {
    Event::new(rng.random_range(-2.0..2.0), vector(rng, 2.0))
}

/// Invertible transformation; linear parts are redrawn until their
/// determinant is at least 0.1 in magnitude.
pub fn affine_transformation(rng: &mut impl Rng, dimension: usize) -> AffineTransformation {
    loop {
        let linear: DMatrix<f64> =
            DMatrix::from_fn(dimension, dimension, |_, _| rng.random_range(-1.0..1.0));
        if linear.determinant().abs() < 0.1 {
            continue;
        }
        let translation = DVector::from_fn(dimension, |_, _| rng.random_range(-2.0..2.0));
        return AffineTransformation::new(translation, linear)
            .expect("determinant was checked above");
    }
}

pub fn affine_function(rng: &mut impl Rng, dimension: usize) -> AffineFunction {
    AffineFunction::new(
        rng.random_range(-2.0..2.0),
        DVector::from_fn(dimension, |_, _| rng.random_range(-2.0..2.0)),
    )
}

pub fn affine_point(rng: &mut impl Rng, dimension: usize) -> AffinePoint {
    AffinePoint::new(DVector::from_fn(dimension, |_, _| {
        rng.random_range(-2.0..2.0)
    }))
}
