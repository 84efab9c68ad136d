//! Rotations in z-y-z Euler form.
//!
//! All rotations are active: `R(α, β, γ) = Rz(α)·Ry(β)·Rz(γ)`, so `Rz(γ)` acts
//! first. Composition goes through the 3×3 orthogonal matrix and re-extracts
//! Euler angles, which makes composed rotations exact as SO(3) elements but
//! loses the SU(2) sign for half-integer representations.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Mat3 = [[f64; 3]; 3];

/// `sin β` below this is treated as gimbal lock.
const GIMBAL_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rotation {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for Rotation {
    fn default() -> Self {
        Self::identity()
    }
}

impl Rotation {
    pub const fn identity() -> Self {
        Self { alpha: 0.0, beta: 0.0, gamma: 0.0 }
    }

    pub const fn euler(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { alpha, beta, gamma }
    }

    /// Like [`Rotation::euler`] but rejects non-finite angles.
    pub fn checked(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && gamma.is_finite()) {
            return Err(Error::Domain("Euler angles must be finite".into()));
        }
        Ok(Self::euler(alpha, beta, gamma))
    }

    pub const fn about_z(phi: f64) -> Self {
        Self::euler(phi, 0.0, 0.0)
    }

    pub const fn about_y(beta: f64) -> Self {
        Self::euler(0.0, beta, 0.0)
    }

    /// Rotation by `angle` about a unit `axis` (right-hand rule).
    pub fn from_axis_angle(axis: [f64; 3], angle: f64) -> Result<Self> {
        let norm = axis.iter().map(|a| a * a).sum::<f64>().sqrt();
        if !angle.is_finite() || axis.iter().any(|a| !a.is_finite()) {
            return Err(Error::Domain("axis and angle must be finite".into()));
        }
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("rotation axis has norm {norm}, expected 1")));
        }
        let [x, y, z] = axis;
        let (s, c) = angle.sin_cos();
        let t = 1.0 - c;
        let m = [
            [c + x * x * t, x * y * t - z * s, x * z * t + y * s],
            [y * x * t + z * s, c + y * y * t, y * z * t - x * s],
            [z * x * t - y * s, z * y * t + x * s, c + z * z * t],
        ];
        Ok(Self::from_matrix(&m))
    }

    /// Haar-distributed random rotation.
    pub fn haar<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let two_pi = std::f64::consts::TAU;
        let alpha = rng.random::<f64>() * two_pi;
        let gamma = rng.random::<f64>() * two_pi;
        let cos_beta = 2.0 * rng.random::<f64>() - 1.0;
        Self::euler(alpha, cos_beta.acos(), gamma)
    }

    pub fn inverse(&self) -> Self {
        Self::euler(-self.gamma, -self.beta, -self.alpha)
    }

    pub fn matrix(&self) -> Mat3 {
        mat_mul(&mat_mul(&rz(self.alpha), &ry(self.beta)), &rz(self.gamma))
    }

    /// Extracts z-y-z angles with `β ∈ [0, π]`; at gimbal lock `γ = 0`.
    pub fn from_matrix(m: &Mat3) -> Self {
        let sin_beta = (m[0][2] * m[0][2] + m[1][2] * m[1][2]).sqrt();
        let beta = sin_beta.atan2(m[2][2]);
        if sin_beta > GIMBAL_EPS {
            let alpha = m[1][2].atan2(m[0][2]);
            let gamma = m[2][1].atan2(-m[2][0]);
            Self::euler(alpha, beta, gamma)
        } else if m[2][2] > 0.0 {
            Self::euler(m[1][0].atan2(m[0][0]), 0.0, 0.0)
        } else {
            // Rz(α)·Ry(π) has first column (−cos α, −sin α, 0).
            Self::euler((-m[1][0]).atan2(-m[0][0]), std::f64::consts::PI, 0.0)
        }
    }

    /// `self ∘ other`: `other` acts first.
    pub fn compose(&self, other: &Rotation) -> Self {
        Self::from_matrix(&mat_mul(&self.matrix(), &other.matrix()))
    }
}

fn rz(phi: f64) -> Mat3 {
    let (s, c) = phi.sin_cos();
    [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
}

fn ry(beta: f64) -> Mat3 {
    let (s, c) = beta.sin_cos();
    [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]]
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn mat_apply(m: &Mat3, v: [f64; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (i, o) in out.iter_mut().enumerate() {
        *o = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2];
    }
    out
}
