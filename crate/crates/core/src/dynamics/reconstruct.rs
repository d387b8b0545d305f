//! Rebuilding a decoherence function from a prescribed dephasing rate.
//!
//! For pure dephasing `q̇ = γ(t)(1 - 2q)`, `q(0) = 0`, i.e.
//! `λ(t) = exp(-2 ∫₀ᵗ γ)`. The integrated rate is advanced with an adaptive
//! Dormand-Prince stepper; a stall with `λ` already negligible means the
//! integral diverges and `λ` is pinned at zero from then on.

use serde::{Deserialize, Serialize};

use crate::numeric::ode::{self, Stall, Tolerances};
use crate::profile::TabulatedProfile;
use crate::{DecoherenceProfile, Error, Result};

/// `λ` below which a stalled integration is read as a divergent integral.
const PIN_LAMBDA: f64 = 1e-6;

/// A prescribed dephasing rate `γ(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum RateFunction {
    Constant { value: f64 },
    /// `ω tan(ωt) / 2`, the rate of `q = (1 - cos ωt)/2`.
    Tangent { omega: f64 },
    /// `scale · tan²(ωt)`: positive everywhere except its zeros.
    TangentSquared { omega: f64, scale: f64 },
    /// Piecewise-linear through the samples, held constant outside.
    Sampled { times: Vec<f64>, values: Vec<f64> },
}

impl RateFunction {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            RateFunction::Constant { value } => *value,
            RateFunction::Tangent { omega } => 0.5 * omega * (omega * t).tan(),
            RateFunction::TangentSquared { omega, scale } => {
                let tn = (omega * t).tan();
                scale * tn * tn
            }
            RateFunction::Sampled { times, values } => {
                let n = times.len();
                if n == 0 {
                    return 0.0;
                }
                if t <= times[0] {
                    return values[0];
                }
                if t >= times[n - 1] {
                    return values[n - 1];
                }
                let k = times.partition_point(|&x| x <= t) - 1;
                let s = (t - times[k]) / (times[k + 1] - times[k]);
                values[k] + s * (values[k + 1] - values[k])
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            RateFunction::Sampled { times, values } => {
                if times.len() != values.len() || times.is_empty() {
                    return Err(Error::InvalidGrid("sampled rate needs matching, non-empty columns".into()));
                }
                if times.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::InvalidGrid("sampled rate times must increase".into()));
                }
                Ok(())
            }
            RateFunction::Tangent { omega } | RateFunction::TangentSquared { omega, .. }
                if !(*omega > 0.0) =>
            {
                Err(Error::ParameterOutOfRange {
                    name: "omega",
                    value: *omega,
                    expected: "omega > 0",
                })
            }
            _ => Ok(()),
        }
    }
}

/// Facts about how faithfully a rate was realized by a legitimate profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RateValidity {
    /// `q` stayed inside `[0, 1]` (equivalently `|λ| <= 1`) on the grid.
    pub q_in_unit_interval: bool,
    /// Time from which the integrated rate diverged and `λ ≡ 0`.
    pub pinned_at: Option<f64>,
    pub integral_diverges: bool,
    /// After pinning the realized rate is `0/0`; the request is honoured
    /// only if it asks for nothing nonzero there.
    pub rate_realized: bool,
    /// First grid time past the pin where a nonzero rate was requested.
    pub first_unrealized: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub profile: DecoherenceProfile,
    pub validity: RateValidity,
}

/// Integrates an arbitrary rate closure on `steps` uniform intervals of `[0, horizon]`.
pub fn reconstruct_from_rate<F: Fn(f64) -> f64>(
    rate: F,
    horizon: f64,
    steps: usize,
) -> Result<Reconstruction> {
    if !(horizon > 0.0 && horizon.is_finite()) || steps < 2 {
        return Err(Error::InvalidGrid(format!(
            "need horizon > 0 and at least 2 steps (horizon {horizon}, steps {steps})"
        )));
    }
    let dt = horizon / steps as f64;
    let rhs = |t: f64, _y: f64| rate(t);
    let lambda_dot = |t: f64, lambda: f64| {
        let d = -2.0 * rate(t) * lambda;
        if d.is_finite() {
            d
        } else {
            0.0
        }
    };

    let mut times = vec![0.0];
    let mut lambda = vec![1.0];
    let mut slope = vec![lambda_dot(0.0, 1.0)];
    let mut y = 0.0;
    let mut h = dt;
    let mut pinned_at = None;

    for k in 0..steps {
        let t0 = k as f64 * dt;
        let t1 = if k + 1 == steps { horizon } else { (k + 1) as f64 * dt };
        match ode::advance(&rhs, t0, y, t1, h, Tolerances::default()) {
            Ok((y1, h_used)) => {
                y = y1;
                h = h_used.max(1e-6 * dt);
                let l = (-2.0 * y).exp();
                times.push(t1);
                lambda.push(l);
                slope.push(lambda_dot(t1, l));
            }
            Err(Stall::StepCollapse { t, y: ys }) | Err(Stall::NonFinite { t, y: ys }) => {
                let l = (-2.0 * ys).exp();
                if l >= PIN_LAMBDA {
                    return Err(Error::IntegrationFailure {
                        t,
                        reason: format!("step size collapsed with λ = {l:e} still finite"),
                    });
                }
                if t > *times.last().expect("non-empty") {
                    times.push(t);
                    lambda.push(l);
                    slope.push(lambda_dot(t, l));
                }
                pinned_at = Some(t);
                // λ stays at the fixed point for the rest of the grid.
                for kk in (k + 1)..=steps {
                    let tk = if kk == steps { horizon } else { kk as f64 * dt };
                    if tk > t {
                        times.push(tk);
                        lambda.push(0.0);
                        slope.push(0.0);
                    }
                }
                break;
            }
        }
    }

    let q_in_unit_interval = lambda.iter().all(|l| l.abs() <= 1.0 + 1e-12);
    let first_unrealized = pinned_at.and_then(|tp| {
        times
            .iter()
            .copied()
            .filter(|&t| t > tp)
            .find(|&t| {
                let g = rate(t);
                g.is_finite() && g.abs() > 1e-12
            })
    });
    let table = TabulatedProfile::new(times, lambda, slope, pinned_at)?;
    Ok(Reconstruction {
        profile: DecoherenceProfile::tabulated(table),
        validity: RateValidity {
            q_in_unit_interval,
            pinned_at,
            integral_diverges: pinned_at.is_some(),
            rate_realized: first_unrealized.is_none(),
            first_unrealized,
        },
    })
}

/// Solves `q̇ = γ(t)(1 - 2q)`, `q(0) = 0` on `[0, horizon]`.
pub fn profile_from_rate(
    rate: &RateFunction,
    horizon: f64,
    steps: usize,
) -> Result<Reconstruction> {
    rate.validate()?;
    reconstruct_from_rate(|t| rate.eval(t), horizon, steps)
}
