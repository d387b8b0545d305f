//! Dephasing of a qubit coupled to a single-qubit environment through
//! `H = (ω/2) σ₃ ⊗ σ₃ᴱ`, obtained by evolving the joint state and tracing
//! out the environment.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use serde::Serialize;

use crate::BlochVector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EnvDephasing {
    pub t: f64,
    /// Mixing probability after removing the unitary rotation about z.
    pub q: f64,
    pub lambda: f64,
    /// Rotation angle φ with coherence factor `c(t) = λ e^{iφ}`.
    pub rotation: f64,
}

pub struct EnvironmentModel {
    energies: [f64; 4],
    eigvecs: Matrix4<Complex64>,
    rho_env: Matrix2<Complex64>,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn pauli_z() -> Matrix2<Complex64> {
    Matrix2::new(c(1.0), c(0.0), c(0.0), c(-1.0))
}

/// Partial trace over the second tensor factor.
fn trace_out_env(rho: &Matrix4<Complex64>) -> Matrix2<Complex64> {
    Matrix2::from_fn(|i, j| rho[(2 * i, 2 * j)] + rho[(2 * i + 1, 2 * j + 1)])
}

impl EnvironmentModel {
    pub fn new(omega: f64, env: &BlochVector) -> Self {
        let z = pauli_z();
        let h: Matrix4<Complex64> = z.kronecker(&z) * c(0.5 * omega);
        let eig = h.symmetric_eigen();
        let energies = [
            eig.eigenvalues[0],
            eig.eigenvalues[1],
            eig.eigenvalues[2],
            eig.eigenvalues[3],
        ];
        Self {
            energies,
            eigvecs: eig.eigenvectors,
            rho_env: *env.to_density().matrix(),
        }
    }

    /// `exp(-iHt)` through the spectral decomposition of `H`.
    pub fn unitary(&self, t: f64) -> Matrix4<Complex64> {
        let phases = Matrix4::from_diagonal(&nalgebra::Vector4::from_fn(|k, _| {
            Complex64::from_polar(1.0, -self.energies[k] * t)
        }));
        self.eigvecs * phases * self.eigvecs.adjoint()
    }

    pub fn reduced_state(&self, system: &BlochVector, t: f64) -> Matrix2<Complex64> {
        let rho0 = system.to_density().matrix().kronecker(&self.rho_env);
        let u = self.unitary(t);
        trace_out_env(&(u * rho0 * u.adjoint()))
    }

    /// Bloch vector of the reduced system state.
    pub fn evolve(&self, system: &BlochVector, t: f64) -> [f64; 3] {
        let r = self.reduced_state(system, t);
        [2.0 * r[(1, 0)].re, 2.0 * r[(1, 0)].im, (r[(0, 0)] - r[(1, 1)]).re]
    }

    /// `c(t) = 2 ρ₀₁(t)` for the system prepared in `|+⟩`.
    pub fn coherence_factor(&self, t: f64) -> Complex64 {
        let plus = BlochVector::new(1.0, 0.0, 0.0).expect("unit vector");
        self.reduced_state(&plus, t)[(0, 1)] * 2.0
    }

    /// Splits `c(t) = λ e^{iφ}` with `λ(0) = 1` and `φ` continuous, tracking
    /// `φ` modulo π along `[0, t]` so that `λ` may change sign.
    pub fn dephasing(&self, omega: f64, t: f64) -> EnvDephasing {
        let steps = ((256.0 * omega.abs() * t).ceil() as usize).max(64);
        let mut phi = 0.0f64;
        let mut coh = Complex64::new(1.0, 0.0);
        for k in 1..=steps {
            let tk = t * k as f64 / steps as f64;
            coh = self.coherence_factor(tk);
            if coh.norm() > 0.0 {
                let mut d = (coh.arg() - phi).rem_euclid(std::f64::consts::PI);
                if d > std::f64::consts::FRAC_PI_2 {
                    d -= std::f64::consts::PI;
                }
                phi += d;
            }
        }
        let lambda = (coh * Complex64::from_polar(1.0, -phi)).re;
        EnvDephasing {
            t,
            q: 0.5 * (1.0 - lambda),
            lambda,
            rotation: phi,
        }
    }
}

/// Dephasing probability `q(t)` of the system when the environment starts
/// in the state with Bloch vector `env`.
pub fn reduced_dynamics_from_environment(omega: f64, env: &BlochVector, t: f64) -> f64 {
    EnvironmentModel::new(omega, env).dephasing(omega, t).q
}
