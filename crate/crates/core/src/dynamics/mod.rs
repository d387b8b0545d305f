//! Eigenvalues, canonical decay rates and state evolution of convex mixtures
//! of Pauli dephasing maps.
//!
//! For weights `x` and decoherence function `q(t)` the output map is Bloch
//! diagonal with `λ_i = 1 - 2(1 - x_i) q` and generator
//! `L ρ = Σ γ_i (σ_i ρ σ_i - ρ)`, where
//!
//! ```text
//! γ_i = (q̇/2) · ( -(1-x_i)/λ_i + Σ_{j≠i} (1-x_j)/λ_j )
//! ```
//!
//! so that `d ln|λ_i| / dt = -2 (γ_j + γ_k)`.

pub mod environment;
pub mod reconstruct;
mod singular;

pub use singular::{
    classify_map, singularity_times, Classification, SignFlip, SingularEvent, SingularKind,
    PINNED_TOL, PROBE_FRACTION, PROBE_SAMPLES, ROOT_TOL, SCAN_STEPS,
};

use serde::Serialize;

use crate::{BlochVector, DecoherenceProfile, MixingWeights};

/// `|λ|` below which an eigenvalue counts as vanished when evaluating rates.
pub const LAMBDA_ZERO_TOL: f64 = 1e-12;
/// `|q̇|` above which a vanished eigenvalue makes a rate divergent rather than indeterminate.
pub const QDOT_ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EigenvalueTriple {
    pub t: f64,
    pub lambda: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum RateStatus {
    Finite,
    /// A vanished eigenvalue with `q̇ ≠ 0`: the rate passes through a pole.
    Divergent,
    /// A vanished eigenvalue with `q̇ = 0`: the rate is `0/0` (fixed point).
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rate {
    /// Signed infinity when divergent, NaN when indeterminate.
    pub value: f64,
    pub status: RateStatus,
}

impl Rate {
    pub fn finite(&self) -> Option<f64> {
        (self.status == RateStatus::Finite).then_some(self.value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayRates {
    pub t: f64,
    pub rates: [Rate; 3],
}

impl DecayRates {
    /// `γ_i` for `i` in 1..=3.
    pub fn get(&self, i: usize) -> Rate {
        self.rates[i - 1]
    }

    pub fn all_finite(&self) -> Option<[f64; 3]> {
        Some([
            self.rates[0].finite()?,
            self.rates[1].finite()?,
            self.rates[2].finite()?,
        ])
    }
}

/// `λ_i = 1 - 2(1 - x_i) q` for a given `q`.
pub fn eigenvalues_from_q(w: &MixingWeights, q: f64) -> [f64; 3] {
    w.as_array().map(|x| 1.0 - 2.0 * (1.0 - x) * q)
}

pub fn map_eigenvalues(w: &MixingWeights, p: &DecoherenceProfile, t: f64) -> EigenvalueTriple {
    EigenvalueTriple {
        t,
        lambda: eigenvalues_from_q(w, p.q(t).0),
    }
}

/// Decay rates for given `q` and `q̇`.
///
/// Axes with equal weights have identical eigenvalue functions, so their
/// terms are combined before dividing: a pole shared by two axes entering
/// with opposite signs cancels exactly (e.g. `γ_1 ≡ 0` for pure `σ_3`
/// dephasing even at the singular point).
pub fn rates_from_q(w: &MixingWeights, q: f64, qdot: f64) -> [Rate; 3] {
    let a = w.as_array().map(|x| 1.0 - x);
    std::array::from_fn(|i| {
        // (1 - x, net sign) per distinct weight.
        let mut groups: Vec<(f64, f64)> = Vec::with_capacity(3);
        for (j, &aj) in a.iter().enumerate() {
            let sign = if j == i { -1.0 } else { 1.0 };
            match groups.iter_mut().find(|(ag, _)| (ag - aj).abs() <= 1e-15) {
                Some(g) => g.1 += sign,
                None => groups.push((aj, sign)),
            }
        }
        let mut sum = 0.0;
        let mut singular_sign = None;
        for (ag, coeff) in groups {
            if coeff == 0.0 || ag == 0.0 {
                continue;
            }
            let lambda = 1.0 - 2.0 * ag * q;
            if lambda.abs() < LAMBDA_ZERO_TOL {
                singular_sign = Some(coeff * qdot * if lambda < 0.0 { -1.0 } else { 1.0 });
            } else {
                sum += coeff * ag / lambda;
            }
        }
        match singular_sign {
            None => Rate {
                value: 0.5 * qdot * sum,
                status: RateStatus::Finite,
            },
            Some(s) if qdot.abs() > QDOT_ZERO_TOL => Rate {
                value: f64::INFINITY.copysign(s),
                status: RateStatus::Divergent,
            },
            Some(_) => Rate {
                value: f64::NAN,
                status: RateStatus::Indeterminate,
            },
        }
    })
}

pub fn decay_rates(w: &MixingWeights, p: &DecoherenceProfile, t: f64) -> DecayRates {
    let (q, qdot) = p.q(t);
    DecayRates {
        t,
        rates: rates_from_q(w, q, qdot),
    }
}

/// Evolves a Bloch vector: `v'_i = λ_i(t) v_i`.
pub fn apply_map(
    w: &MixingWeights,
    p: &DecoherenceProfile,
    t: f64,
    v: &BlochVector,
) -> BlochVector {
    v.scaled(map_eigenvalues(w, p, t).lambda)
}
