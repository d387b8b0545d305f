//! CP / P divisibility of Pauli mixtures and trace-distance trajectories.
//!
//! Verdicts are taken from the signs of the canonical rates on a time grid
//! and cross-checked against the intermediate propagators
//! `V(t_{k+1}, t_k) = E(t_{k+1}) E(t_k)^{-1}` between consecutive grid points.

use serde::Serialize;

use crate::dynamics::{decay_rates, map_eigenvalues, DecayRates};
use crate::{BlochVector, DecoherenceProfile, Error, MixingWeights, Result};

/// Below this `|λ_i(t_1)|` the propagator out of `t_1` is undefined.
pub const UNDEFINED_TOL: f64 = 1e-12;
/// Slack on "≥ 0" tests for rates and pair sums.
pub const SIGN_TOL: f64 = 1e-12;
/// Slack on the Choi-positivity conditions.
pub const CP_TOL: f64 = 1e-10;
pub const DEFAULT_GRID_POINTS: usize = 2048;
/// Sub-points inserted between grid points where a sign changes.
pub const REFINE_FACTOR: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct IntermediateMap {
    pub mu: [f64; 3],
    pub defined: bool,
}

/// Eigenvalues `μ_i = λ_i(t2) / λ_i(t1)` of the propagator from `t1` to `t2`.
pub fn intermediate_eigenvalues(
    w: &MixingWeights,
    p: &DecoherenceProfile,
    t1: f64,
    t2: f64,
) -> Result<IntermediateMap> {
    if !(0.0 <= t1 && t1 <= t2) {
        return Err(Error::InvalidGrid(format!("need 0 <= t1 <= t2, got {t1}, {t2}")));
    }
    let l1 = map_eigenvalues(w, p, t1).lambda;
    let l2 = map_eigenvalues(w, p, t2).lambda;
    if l1.iter().any(|l| l.abs() < UNDEFINED_TOL) {
        return Ok(IntermediateMap {
            mu: [f64::NAN; 3],
            defined: false,
        });
    }
    Ok(IntermediateMap {
        mu: std::array::from_fn(|i| l2[i] / l1[i]),
        defined: true,
    })
}

/// Complete positivity of the Pauli-diagonal map with eigenvalues `mu`:
/// the four Bell-basis Choi weights must be non-negative.
pub fn cp_check(mu: [f64; 3]) -> bool {
    if mu.iter().any(|m| !m.is_finite() || m.abs() > 1.0 + 1e-9) {
        return false;
    }
    let [a, b, c] = mu;
    [
        1.0 + a + b + c,
        1.0 + a - b - c,
        1.0 - a + b - c,
        1.0 - a - b + c,
    ]
    .iter()
    .all(|&v| v >= -CP_TOL)
}

/// Positivity of a unital Pauli-diagonal map: it must not stretch the Bloch ball.
pub fn positivity_check(mu: [f64; 3]) -> bool {
    mu.iter().all(|m| m.is_finite() && m.abs() <= 1.0 + CP_TOL)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "cpDivisible")]
    CpDivisible,
    #[serde(rename = "pDivisibleOnly")]
    PDivisibleOnly,
    #[serde(rename = "pIndivisible")]
    PIndivisible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum WitnessKind {
    /// A single rate `γ_i < 0`.
    Rate,
    /// `γ_j + γ_k < 0`; reported under the excluded index `i`.
    PairSum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Witness {
    pub t: f64,
    pub rate_index: usize,
    pub value: f64,
    pub kind: WitnessKind,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DivisibilityReport {
    pub verdict: Verdict,
    /// First violation per offending index, refined between grid points.
    pub witnesses: Vec<Witness>,
    /// Every defined consecutive propagator is CP.
    pub propagators_cp: bool,
    /// Every defined consecutive propagator is positive.
    pub propagators_positive: bool,
    /// Start times of consecutive propagators that fail the CP test.
    pub cp_violations: Vec<f64>,
}

/// `points` uniform samples of `[0, horizon]`.
pub fn uniform_grid(horizon: f64, points: usize) -> Vec<f64> {
    let n = points.max(2) - 1;
    (0..=n).map(|k| horizon * k as f64 / n as f64).collect()
}

fn check_sorted(grid: &[f64]) -> Result<()> {
    if grid.is_empty() || grid[0] < 0.0 || grid.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::InvalidGrid(
            "grid must be non-empty, non-negative and sorted".into(),
        ));
    }
    Ok(())
}

/// Propagator eigenvalues between consecutive points. Axes pinned at zero on
/// both ends are mapped by the identity (the state sits at a fixed point).
fn step_propagator(l1: [f64; 3], l2: [f64; 3]) -> Option<[f64; 3]> {
    let mut mu = [0.0; 3];
    for i in 0..3 {
        if l1[i].abs() < UNDEFINED_TOL {
            if l2[i].abs() < UNDEFINED_TOL {
                mu[i] = 1.0;
            } else {
                return None;
            }
        } else {
            mu[i] = l2[i] / l1[i];
        }
    }
    Some(mu)
}

fn rate_values(r: &DecayRates) -> [Option<f64>; 3] {
    [r.rates[0].finite(), r.rates[1].finite(), r.rates[2].finite()]
}

/// Per-index quantities whose negativity breaks CP (rates) or P (pair sums)
/// divisibility.
fn indicators(r: &DecayRates, kind: WitnessKind) -> [Option<f64>; 3] {
    let g = rate_values(r);
    match kind {
        WitnessKind::Rate => g,
        WitnessKind::PairSum => std::array::from_fn(|i| {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            Some(g[j]? + g[k]?)
        }),
    }
}

fn first_violation(
    w: &MixingWeights,
    p: &DecoherenceProfile,
    grid: &[f64],
    rates: &[DecayRates],
    kind: WitnessKind,
) -> Vec<Witness> {
    let mut found: [Option<Witness>; 3] = [None; 3];
    for (k, r) in rates.iter().enumerate() {
        let vals = indicators(r, kind);
        for i in 0..3 {
            if found[i].is_some() {
                continue;
            }
            let Some(v) = vals[i] else { continue };
            if v >= -SIGN_TOL {
                continue;
            }
            // Refine inside the preceding interval.
            let mut witness = Witness {
                t: grid[k],
                rate_index: i + 1,
                value: v,
                kind,
            };
            if k > 0 {
                let (a, b) = (grid[k - 1], grid[k]);
                for s in 1..REFINE_FACTOR {
                    let t = a + (b - a) * s as f64 / REFINE_FACTOR as f64;
                    if let Some(vs) = indicators(&decay_rates(w, p, t), kind)[i] {
                        if vs < -SIGN_TOL {
                            witness.t = t;
                            witness.value = vs;
                            break;
                        }
                    }
                }
            }
            found[i] = Some(witness);
        }
    }
    found.into_iter().flatten().collect()
}

/// CP / P divisibility of the mixture on a sorted grid.
///
/// CP divisible iff every finite rate is `≥ -1e-12`; P divisible iff every
/// pairwise sum is. A grid may start at a singular point (a segment after a
/// singularity), but an interior point whose outgoing propagator is
/// undefined is an error: split the grid there.
pub fn divisibility_verdict(
    w: &MixingWeights,
    p: &DecoherenceProfile,
    grid: &[f64],
) -> Result<DivisibilityReport> {
    check_sorted(grid)?;
    let lambdas: Vec<[f64; 3]> = grid.iter().map(|&t| map_eigenvalues(w, p, t).lambda).collect();
    let mut propagators_cp = true;
    let mut propagators_positive = true;
    let mut cp_violations = Vec::new();
    for k in 0..grid.len().saturating_sub(1) {
        match step_propagator(lambdas[k], lambdas[k + 1]) {
            Some(mu) => {
                if !cp_check(mu) {
                    propagators_cp = false;
                    cp_violations.push(grid[k]);
                }
                propagators_positive &= positivity_check(mu);
            }
            None if k == 0 => {}
            None => return Err(Error::SingularGrid { t: grid[k] }),
        }
    }

    let rates: Vec<DecayRates> = grid.iter().map(|&t| decay_rates(w, p, t)).collect();
    let pair_witnesses = first_violation(w, p, grid, &rates, WitnessKind::PairSum);
    let rate_witnesses = first_violation(w, p, grid, &rates, WitnessKind::Rate);
    let verdict = if !pair_witnesses.is_empty() {
        Verdict::PIndivisible
    } else if !rate_witnesses.is_empty() {
        Verdict::PDivisibleOnly
    } else {
        Verdict::CpDivisible
    };
    let mut witnesses = rate_witnesses;
    witnesses.extend(pair_witnesses);
    Ok(DivisibilityReport {
        verdict,
        witnesses,
        propagators_cp,
        propagators_positive,
        cp_violations,
    })
}

/// Trace distance `½ ‖Λ(t)(v_A - v_B)‖` between two evolved states.
pub fn trace_distance_series(
    w: &MixingWeights,
    p: &DecoherenceProfile,
    va: &BlochVector,
    vb: &BlochVector,
    grid: &[f64],
) -> Vec<f64> {
    let (a, b) = (va.components(), vb.components());
    grid.iter()
        .map(|&t| {
            let l = map_eigenvalues(w, p, t).lambda;
            0.5 * (0..3)
                .map(|i| (l[i] * (a[i] - b[i])).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .collect()
}
