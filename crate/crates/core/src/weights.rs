use serde::{Deserialize, Serialize};
use std::fmt;

use crate::{Error, Result};

const SUM_TOL: f64 = 1e-12;

/// Convex weights `(x1, x2, x3)` of the three Pauli dephasing maps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct MixingWeights([f64; 3]);

impl MixingWeights {
    pub fn new(x1: f64, x2: f64, x3: f64) -> Result<Self> {
        let x = [x1, x2, x3];
        if x.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidWeights(format!(
                "weights must be finite and non-negative, got {x:?}"
            )));
        }
        let sum: f64 = x.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidWeights(format!("weights sum to {sum}, not 1")));
        }
        Ok(Self(x))
    }

    /// Simplex point from its first two coordinates; `x3 = 1 - x1 - x2`.
    pub fn from_x1_x2(x1: f64, x2: f64) -> Result<Self> {
        let mut x3 = 1.0 - x1 - x2;
        if x3.abs() < SUM_TOL {
            x3 = 0.0;
        }
        Self::new(x1, x2, x3)
    }

    /// The single Pauli map `E_axis` (axis in 1..=3).
    pub fn pure(axis: usize) -> Self {
        assert!((1..=3).contains(&axis), "axis must be 1, 2 or 3");
        let mut x = [0.0; 3];
        x[axis - 1] = 1.0;
        Self(x)
    }

    pub fn uniform() -> Self {
        Self([1.0 / 3.0; 3])
    }

    pub fn as_array(&self) -> [f64; 3] {
        self.0
    }

    /// `x_i` for `i` in 1..=3.
    pub fn get(&self, axis: usize) -> f64 {
        self.0[axis - 1]
    }
}

impl TryFrom<[f64; 3]> for MixingWeights {
    type Error = Error;

    fn try_from(x: [f64; 3]) -> Result<Self> {
        Self::new(x[0], x[1], x[2])
    }
}

impl From<MixingWeights> for [f64; 3] {
    fn from(w: MixingWeights) -> Self {
        w.0
    }
}

impl fmt::Display for MixingWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_simplex() {
        assert!(MixingWeights::new(0.2, 0.3, 0.5).is_ok());
        assert!(MixingWeights::new(0.2, 0.3, 0.6).is_err());
        assert!(MixingWeights::new(-0.1, 0.6, 0.5).is_err());
        assert!(MixingWeights::new(f64::NAN, 0.5, 0.5).is_err());
    }

    #[test]
    fn third_coordinate_is_derived() {
        let w = MixingWeights::from_x1_x2(0.1, 0.2).unwrap();
        assert!((w.get(3) - 0.7).abs() < 1e-15);
        let edge = MixingWeights::from_x1_x2(0.7, 0.3).unwrap();
        assert_eq!(edge.get(3), 0.0);
    }

    #[test]
    fn uniform_sums_to_one() {
        let w = MixingWeights::uniform();
        assert!((w.as_array().iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert_eq!(MixingWeights::pure(2).as_array(), [0.0, 1.0, 0.0]);
    }
}
