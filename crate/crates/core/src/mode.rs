//! Momentum-space two-level problems shared by the free-fermion chains.
//!
//! Every mode carries a lab-frame Hamiltonian `h_z σ_z + h_x σ_x`. Bloch
//! vectors and operator coefficients are expressed either in that lab frame or
//! in the eigenframe where the Hamiltonian reads `ε σ̃_z`; the two are related
//! by a proper rotation about the y axis.

use std::f64::consts::FRAC_PI_2;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

/// Three-component real vector used for Bloch vectors and for the coefficients
/// of an operator on the Pauli basis.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Bloch {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Bloch {
    pub const ZERO: Bloch = Bloch { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub const fn along_z(z: f64) -> Self {
        Self { x: 0.0, y: 0.0, z }
    }

    pub fn dot(self, o: Bloch) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Bloch) -> Bloch {
        Bloch {
            x: self.y * o.z - self.z * o.y,
            y: self.z * o.x - self.x * o.z,
            z: self.x * o.y - self.y * o.x,
        }
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Rotates `self` by `angle` about the unit axis `axis` (Rodrigues).
    pub fn rotate(self, axis: Bloch, angle: f64) -> Bloch {
        let (s, c) = angle.sin_cos();
        let along = axis * axis.dot(self);
        along + (self - along) * c + axis.cross(self) * s
    }
}

impl Add for Bloch {
    type Output = Bloch;
    fn add(self, o: Bloch) -> Bloch {
        Bloch::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Bloch {
    type Output = Bloch;
    fn sub(self, o: Bloch) -> Bloch {
        Bloch::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Bloch {
    type Output = Bloch;
    fn mul(self, s: f64) -> Bloch {
        Bloch::new(self.x * s, self.y * s, self.z * s)
    }
}

/// One momentum-space two-level Hamiltonian `h_z σ_z^k + h_x σ_x^k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelMode {
    /// Wavenumber.
    pub k: f64,
    pub h_z: f64,
    pub h_x: f64,
    /// Positive eigenvalue, `sqrt(h_z² + h_x²)`.
    pub epsilon: f64,
    /// Mixing angle; `cos 2θ = -h_z/ε` and `sin 2θ = -h_x/ε`.
    pub theta: f64,
}

/// Mixing angle of the eigenvector rotation.
///
/// Agrees with `-atan[(1 + sqrt(1 + ζ²)) / ζ]`, `ζ = h_x/h_z`, whenever
/// `h_z > 0`, and continues it through `h_z = 0` via the two-argument
/// arctangent. The range is `(-π/2, 0]` for `h_x ≥ 0` and `(-π, -π/2)`
/// for `h_x < 0`.
pub fn mixing_angle(h_z: f64, h_x: f64) -> f64 {
    0.5 * h_x.atan2(h_z) - FRAC_PI_2
}

impl TwoLevelMode {
    pub fn new(k: f64, h_z: f64, h_x: f64) -> Self {
        Self {
            k,
            h_z,
            h_x,
            epsilon: h_z.hypot(h_x),
            theta: mixing_angle(h_z, h_x),
        }
    }

    pub fn cos2theta(&self) -> f64 {
        (2.0 * self.theta).cos()
    }

    pub fn sin2theta(&self) -> f64 {
        (2.0 * self.theta).sin()
    }

    /// Lab-frame field vector `(h_x, 0, h_z)`.
    pub fn field(&self) -> Bloch {
        Bloch::new(self.h_x, 0.0, self.h_z)
    }

    /// Re-expresses lab-frame coefficients on the eigenframe Pauli basis.
    ///
    /// `σ_z = -cos2θ σ̃_z + sin2θ σ̃_x` and `σ_x = -sin2θ σ̃_z - cos2θ σ̃_x`.
    pub fn to_eigenframe(&self, lab: Bloch) -> Bloch {
        let (c, s) = (self.cos2theta(), self.sin2theta());
        Bloch {
            x: lab.z * s - lab.x * c,
            y: lab.y,
            z: -lab.z * c - lab.x * s,
        }
    }

    /// Inverse of [`TwoLevelMode::to_eigenframe`].
    pub fn to_lab(&self, eigen: Bloch) -> Bloch {
        let (c, s) = (self.cos2theta(), self.sin2theta());
        Bloch {
            x: -eigen.x * c - eigen.z * s,
            y: eigen.y,
            z: eigen.x * s - eigen.z * c,
        }
    }
}
