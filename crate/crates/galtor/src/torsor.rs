//! Galilean torsors: the affine tensor of a massive particle.
//!
//! A torsor collects mass `m`, linear momentum `p`, angular momentum `l`
//! and passage `q` (the mass moment) into one skew-symmetric contravariant
//! affine 2-tensor. Its 5×5 matrix in a Galilean frame is
//!
//! ```text
//! μ̃ = |  0   m   pᵀ    |
//!     | −m   0  −qᵀ    |
//!     | −p   q  −j(l)  |
//! ```
//!
//! and a change of observer `a` acts by conjugation with the lift,
//! `μ̃' = lift(a)⁻¹ · μ̃ · lift(a)⁻ᵀ`. The component law implemented by
//! [`GalileanTorsor::transform`] is the closed form of that conjugation;
//! the two routes are kept separate so they can check each other.
//!
//! The boost-invariant spin is `l₀ = l − (1/m)·q×p`; `m` and `‖l₀‖` are
//! the invariants of the group action, and the stabilizer of a torsor is
//! 2-dimensional when `l₀ ≠ 0` (rotations about `l₀` plus a matched clock
//! offset) and 4-dimensional when `l₀ = 0`.

use crate::affine::AffineFunction;
use crate::galilei::{rotation_from_axis_angle, skew, unskew, GalileanTransformation};
use nalgebra::{Matrix4, Matrix5, Vector3, Vector4, Vector5};
use thiserror::Error;

/// Maximum tolerated `|M + Mᵀ|` entry when reading a torsor matrix.
pub const SKEW_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Error)]
pub enum TorsorError {
    #[error("operation requires nonzero mass")]
    Massless,
    #[error("matrix is not skew-symmetric (max |M + Mᵀ| entry = {asymmetry:.3e})")]
    NotSkew { asymmetry: f64 },
    #[error("affine functions on events must have dimension 4, got {found}")]
    WrongDimension { found: usize },
    #[error("zero-spin torsor needs a caller-supplied rotation axis")]
    MissingAxis,
    #[error("rotation axis must be nonzero")]
    ZeroAxis,
}

/// The invariants of a torsor under the Galilei group.
#[derive(Debug, Clone, PartialEq)]
pub struct TorsorInvariants {
    pub mass: f64,
    /// Boost-invariant spin `l₀`; rotates as `l₀ ↦ Rᵀl₀`.
    pub spin: Vector3<f64>,
    pub spin_norm: f64,
}

/// Torsor of a massive particle: `(m, p, q, l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GalileanTorsor {
    pub mass: f64,
    pub momentum: Vector3<f64>,
    /// Mass moment `q`; `q = m·(r − v·t)` for free straight-line motion.
    pub passage: Vector3<f64>,
    pub angular_momentum: Vector3<f64>,
}

impl GalileanTorsor {
    pub fn new(
        mass: f64,
        momentum: Vector3<f64>,
        passage: Vector3<f64>,
        angular_momentum: Vector3<f64>,
    ) -> Self {
        Self {
            mass,
            momentum,
            passage,
            angular_momentum,
        }
    }

    /// Components of a particle at rest: only mass and spin.
    pub fn at_rest(mass: f64, spin: Vector3<f64>) -> Self {
        Self::new(mass, Vector3::zeros(), Vector3::zeros(), spin)
    }

    /// The linear 4-column `T = (m, p)`.
    pub fn linear_column(&self) -> Vector4<f64> {
        Vector4::new(self.mass, self.momentum.x, self.momentum.y, self.momentum.z)
    }

    /// The angular 4×4 block `J = [[0, −qᵀ], [q, −j(l)]]`.
    pub fn angular_matrix(&self) -> Matrix4<f64> {
        let mut j = Matrix4::zeros();
        for i in 0..3 {
            j[(0, 1 + i)] = -self.passage[i];
            j[(1 + i, 0)] = self.passage[i];
        }
        j.fixed_view_mut::<3, 3>(1, 1)
            .copy_from(&(-skew(&self.angular_momentum)));
        j
    }

    /// The full 5×5 skew matrix `μ̃`.
    pub fn to_matrix(&self) -> Matrix5<f64> {
        let mut m = Matrix5::zeros();
        m[(0, 1)] = self.mass;
        m[(1, 0)] = -self.mass;
        for i in 0..3 {
            m[(0, 2 + i)] = self.momentum[i];
            m[(2 + i, 0)] = -self.momentum[i];
            m[(1, 2 + i)] = -self.passage[i];
            m[(2 + i, 1)] = self.passage[i];
        }
        m.fixed_view_mut::<3, 3>(2, 2)
            .copy_from(&(-skew(&self.angular_momentum)));
        m
    }

    /// Reads components back from a torsor matrix, rejecting matrices that
    /// are not skew-symmetric to [`SKEW_TOLERANCE`].
    pub fn from_matrix(m: &Matrix5<f64>) -> Result<Self, TorsorError> {
        let asymmetry = (m + m.transpose()).abs().max();
        if asymmetry > SKEW_TOLERANCE {
            return Err(TorsorError::NotSkew { asymmetry });
        }
        let momentum = Vector3::new(m[(0, 2)], m[(0, 3)], m[(0, 4)]);
        let passage = Vector3::new(m[(2, 1)], m[(3, 1)], m[(4, 1)]);
        let spin_block = -m.fixed_view::<3, 3>(2, 2).into_owned();
        Ok(Self {
            mass: m[(0, 1)],
            momentum,
            passage,
            angular_momentum: unskew(&spin_block),
        })
    }

    /// Component transformation law under `a = (τ, k, u, R)`:
    ///
    /// ```text
    /// m' = m
    /// p' = Rᵀ(p − m·u)
    /// l' = Rᵀ(l + u×q) + k'×p'
    /// q' = Rᵀ(q − τ'(p − m·u)) + m·k'
    /// ```
    ///
    /// with `(τ', k')` the inverse-side parameters. Agrees with the matrix
    /// conjugation `lift(a)⁻¹·μ̃·lift(a)⁻ᵀ` to roundoff.
    pub fn transform(&self, a: &GalileanTransformation) -> Self {
        let inv = a.inverse();
        let rt = a.rotation().transpose();
        let tau_prime = inv.clock_offset();
        let k_prime = *inv.translation();
        let impulse = self.momentum - self.mass * a.boost();
        let momentum = rt * impulse;
        let angular_momentum = rt * (self.angular_momentum + a.boost().cross(&self.passage))
            + k_prime.cross(&momentum);
        let passage = rt * (self.passage - tau_prime * impulse) + self.mass * k_prime;
        Self {
            mass: self.mass,
            momentum,
            passage,
            angular_momentum,
        }
    }

    /// Evaluates the torsor on a pair of affine functions of events,
    /// through the matrix representation: `μ(ψ, ψ̂) = ψ̃·μ̃·ψ̂ᵀ`.
    pub fn evaluate(
        &self,
        psi: &AffineFunction,
        psi_hat: &AffineFunction,
    ) -> Result<f64, TorsorError> {
        let row = function_row(psi)?;
        let col = function_row(psi_hat)?;
        Ok(row.dot(&(self.to_matrix() * col)))
    }

    /// Boost-invariant spin `l₀ = l − (1/m)·q×p`.
    pub fn spin(&self) -> Result<Vector3<f64>, TorsorError> {
        if self.mass == 0.0 {
            return Err(TorsorError::Massless);
        }
        Ok(self.angular_momentum - self.passage.cross(&self.momentum) / self.mass)
    }

    pub fn invariants(&self) -> Result<TorsorInvariants, TorsorError> {
        let spin = self.spin()?;
        Ok(TorsorInvariants {
            mass: self.mass,
            spin,
            spin_norm: spin.norm(),
        })
    }

    /// Scale below which the spin counts as zero:
    /// `1e-12 · max(1, ‖l‖, ‖q‖·‖p‖/m)`.
    pub fn spin_zero_tolerance(&self) -> Result<f64, TorsorError> {
        if self.mass == 0.0 {
            return Err(TorsorError::Massless);
        }
        Ok(1e-12
            * 1.0_f64
                .max(self.angular_momentum.norm())
                .max(self.passage.norm() * self.momentum.norm() / self.mass.abs()))
    }

    pub fn has_zero_spin(&self) -> Result<bool, TorsorError> {
        Ok(self.spin()?.norm() <= self.spin_zero_tolerance()?)
    }

    /// An element of this torsor's stabilizer: rotation by `theta` about
    /// the spin axis (or `zero_spin_axis` when `l₀ = 0`), clock offset
    /// `−tau_prime`, and the matched boost `u = (p − R·p)/m` and
    /// translation `k' = (q − Rᵀq + τ'·p)/m`.
    pub fn stabilizer_element(
        &self,
        theta: f64,
        tau_prime: f64,
        zero_spin_axis: Option<Vector3<f64>>,
    ) -> Result<GalileanTransformation, TorsorError> {
        let spin = self.spin()?;
        let axis = if self.has_zero_spin()? {
            let axis = zero_spin_axis.ok_or(TorsorError::MissingAxis)?;
            if axis.norm() == 0.0 {
                return Err(TorsorError::ZeroAxis);
            }
            axis.normalize()
        } else {
            spin.normalize()
        };
        let rotation = rotation_from_axis_angle(&(axis * theta));
        let u = (self.momentum - rotation * self.momentum) / self.mass;
        let k_prime = (self.passage - rotation.transpose() * self.passage
            + tau_prime * self.momentum)
            / self.mass;
        Ok(
            GalileanTransformation::from_inverse_parts(tau_prime, k_prime, u, rotation)
                .expect("axis-angle rotation is orthogonal"),
        )
    }

    /// Dimension of the stabilizer subgroup: 2 when `l₀ ≠ 0`, 4 when
    /// `l₀ = 0` (to the scale-aware tolerance).
    pub fn isotropy_dimension(&self) -> Result<usize, TorsorError> {
        Ok(if self.has_zero_spin()? { 4 } else { 2 })
    }
}

fn function_row(psi: &AffineFunction) -> Result<Vector5<f64>, TorsorError> {
    if psi.dimension() != 4 {
        return Err(TorsorError::WrongDimension {
            found: psi.dimension(),
        });
    }
    let phi = psi.covector();
    Ok(Vector5::new(psi.constant(), phi[0], phi[1], phi[2], phi[3]))
}

/// Transforms a raw torsor matrix by conjugation with the lift:
/// `μ̃' = lift(a)⁻¹ · μ̃ · lift(a)⁻ᵀ`. Rejects non-skew input.
pub fn transform_matrix(
    mu: &Matrix5<f64>,
    a: &GalileanTransformation,
) -> Result<Matrix5<f64>, TorsorError> {
    let asymmetry = (mu + mu.transpose()).abs().max();
    if asymmetry > SKEW_TOLERANCE {
        return Err(TorsorError::NotSkew { asymmetry });
    }
    let lift_inv = a.inverse().lift5();
    Ok(lift_inv * mu * lift_inv.transpose())
}
