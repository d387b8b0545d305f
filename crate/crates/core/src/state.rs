//! Qubit states as Bloch vectors and 2×2 density matrices.

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const STATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct BlochVector([f64; 3]);

impl BlochVector {
    pub fn new(v1: f64, v2: f64, v3: f64) -> Result<Self> {
        let v = [v1, v2, v3];
        if v.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidState(format!("non-finite Bloch vector {v:?}")));
        }
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1.0 + STATE_TOL {
            return Err(Error::InvalidState(format!("|v| = {norm} exceeds 1")));
        }
        Ok(Self(v))
    }

    pub fn origin() -> Self {
        Self([0.0; 3])
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Componentwise scaling by a Pauli-diagonal map's eigenvalues. The
    /// caller guarantees `|λ_i| <= 1`, which keeps the result in the ball.
    pub(crate) fn scaled(&self, lambda: [f64; 3]) -> Self {
        Self([
            lambda[0] * self.0[0],
            lambda[1] * self.0[1],
            lambda[2] * self.0[2],
        ])
    }

    /// `ρ = (I + v·σ) / 2`.
    pub fn to_density(&self) -> DensityMatrix {
        let [x, y, z] = self.0;
        let c = |re: f64, im: f64| Complex64::new(re, im);
        DensityMatrix(Matrix2::new(
            c(0.5 * (1.0 + z), 0.0),
            c(0.5 * x, -0.5 * y),
            c(0.5 * x, 0.5 * y),
            c(0.5 * (1.0 - z), 0.0),
        ))
    }

    /// Trace distance `½ |v_a - v_b|` between the corresponding qubit states.
    pub fn trace_distance(&self, other: &BlochVector) -> f64 {
        0.5 * self
            .0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

impl TryFrom<[f64; 3]> for BlochVector {
    type Error = Error;

    fn try_from(v: [f64; 3]) -> Result<Self> {
        Self::new(v[0], v[1], v[2])
    }
}

impl From<BlochVector> for [f64; 3] {
    fn from(v: BlochVector) -> Self {
        v.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Matrix2<Complex64>);

impl DensityMatrix {
    /// Validates hermiticity, unit trace and positivity.
    pub fn new(m: Matrix2<Complex64>) -> Result<Self> {
        let herm = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > STATE_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = m[(0, 0)].re + m[(1, 1)].re;
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let rho = Self(m);
        // Eigenvalues of a unit-trace qubit state are (1 ± |v|)/2.
        let r = rho.bloch_components();
        let norm = r.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1.0 + STATE_TOL {
            return Err(Error::InvalidState(format!(
                "not positive semidefinite (min eigenvalue {})",
                0.5 * (1.0 - norm)
            )));
        }
        Ok(rho)
    }

    pub fn matrix(&self) -> &Matrix2<Complex64> {
        &self.0
    }

    fn bloch_components(&self) -> [f64; 3] {
        let m = &self.0;
        [2.0 * m[(1, 0)].re, 2.0 * m[(1, 0)].im, m[(0, 0)].re - m[(1, 1)].re]
    }

    pub fn to_bloch(&self) -> BlochVector {
        let [x, y, z] = self.bloch_components();
        let norm = (x * x + y * y + z * z).sqrt();
        // Validated on construction; clip rounding above the unit sphere.
        let s = if norm > 1.0 { 1.0 / norm } else { 1.0 };
        BlochVector([x * s, y * s, z * s])
    }
}
