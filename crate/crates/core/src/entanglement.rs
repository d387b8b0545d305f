//! Choi states of Pauli mixtures, their concurrence, and entanglement sudden
//! death / revival along a trajectory.

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::Serialize;

use crate::numeric::roots::bisect_predicate;
use crate::{DecoherenceProfile, Error, MixingWeights, Result};

/// Slack on the PPT eigenvalue test.
pub const PPT_TOL: f64 = 1e-12;
const TIME_TOL: f64 = 1e-13;

/// Weights of `|Φ⁺⟩` and of `(σ_i ⊗ 1)|Φ⁺⟩` for `i = 1, 2, 3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BellDiagonalState {
    pub p: [f64; 4],
}

impl BellDiagonalState {
    pub fn new(p: [f64; 4]) -> Result<Self> {
        if p.iter().any(|&x| !(x >= -1e-12)) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidState(format!("not a probability vector: {p:?}")));
        }
        Ok(Self { p })
    }

    /// Density matrix in the computational basis `|00⟩, |01⟩, |10⟩, |11⟩`.
    pub fn density_matrix(&self) -> Matrix4<Complex64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let c = |x: f64| Complex64::new(x, 0.0);
        let i = Complex64::i();
        // |Φ⁺⟩, σ₁: |Ψ⁺⟩, σ₂: i|Ψ⁻⟩ (phase irrelevant), σ₃: |Φ⁻⟩
        let bell = [
            [c(s), c(0.0), c(0.0), c(s)],
            [c(0.0), c(s), c(s), c(0.0)],
            [c(0.0), -i * s, i * s, c(0.0)],
            [c(s), c(0.0), c(0.0), c(-s)],
        ];
        let mut rho = Matrix4::zeros();
        for (w, v) in self.p.iter().zip(bell.iter()) {
            for r in 0..4 {
                for col in 0..4 {
                    rho[(r, col)] += v[r] * v[col].conj() * *w;
                }
            }
        }
        rho
    }
}

pub fn choi_bell_weights(
    w: &MixingWeights,
    p: &DecoherenceProfile,
    t: f64,
) -> Result<BellDiagonalState> {
    let q = p.q(t).0;
    if !(-1e-12..=1.0 + 1e-12).contains(&q) {
        return Err(Error::InvalidState(format!("q({t}) = {q} outside [0, 1]")));
    }
    let [x1, x2, x3] = w.as_array();
    Ok(BellDiagonalState {
        p: [1.0 - q, x1 * q, x2 * q, x3 * q],
    })
}

pub fn concurrence(b: &BellDiagonalState) -> f64 {
    let top = b.p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (2.0 * top - 1.0).max(0.0)
}

/// Partial transpose on the second qubit.
fn partial_transpose(rho: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    Matrix4::from_fn(|r, c| {
        let (a, b) = (r / 2, r % 2);
        let (ap, bp) = (c / 2, c % 2);
        rho[(2 * a + bp, 2 * ap + b)]
    })
}

/// Smallest eigenvalue of the partial transpose of the explicit 4×4 state.
pub fn ppt_min_eigenvalue(b: &BellDiagonalState) -> f64 {
    partial_transpose(&b.density_matrix())
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

pub fn is_ppt(b: &BellDiagonalState) -> bool {
    ppt_min_eigenvalue(b) >= -PPT_TOL
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EsdEvents {
    pub death: Option<f64>,
    pub revival: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConcurrencePoint {
    pub t: f64,
    pub q: f64,
    pub concurrence: f64,
}

pub fn concurrence_series(
    w: &MixingWeights,
    p: &DecoherenceProfile,
    grid: &[f64],
) -> Result<Vec<ConcurrencePoint>> {
    grid.iter()
        .map(|&t| {
            Ok(ConcurrencePoint {
                t,
                q: p.q(t).0,
                concurrence: concurrence(&choi_bell_weights(w, p, t)?),
            })
        })
        .collect()
}

fn dominant(b: &BellDiagonalState) -> usize {
    (0..4).fold(0, |best, k| if b.p[k] > b.p[best] { k } else { best })
}

/// Death and first revival of the Choi-state concurrence.
///
/// Concurrence vanishes exactly when the largest Bell weight reaches ½, so
/// the grid is scanned for a change of the dominant weight or of `C > 0` and
/// the crossing of ½ is bisected. A revival within the same grid interval
/// (the dominant weight swapped sides) is resolved the same way.
pub fn esd_events(w: &MixingWeights, p: &DecoherenceProfile, grid: &[f64]) -> Result<EsdEvents> {
    if grid.windows(2).any(|g| !(g[1] >= g[0])) {
        return Err(Error::InvalidGrid("grid must be sorted".into()));
    }
    let weights = |t: f64| choi_bell_weights(w, p, t);
    let weight_of = |k: usize, t: f64| weights(t).map(|b| b.p[k]).unwrap_or(f64::NAN);
    let mut events = EsdEvents {
        death: None,
        revival: None,
    };
    let Some(&t0) = grid.first() else {
        return Ok(events);
    };
    let mut prev = weights(t0)?;
    let mut prev_t = t0;
    for &t in &grid[1..] {
        let cur = weights(t)?;
        let (c_prev, c_cur) = (concurrence(&prev), concurrence(&cur));
        if events.death.is_none() {
            let (kp, kc) = (dominant(&prev), dominant(&cur));
            if c_prev > 0.0 && (c_cur == 0.0 || kp != kc) {
                let death = bisect_predicate(|s| weight_of(kp, s) <= 0.5, prev_t, t, TIME_TOL);
                events.death = Some(death);
                if c_cur > 0.0 {
                    events.revival = Some(bisect_predicate(
                        |s| weight_of(kc, s) > 0.5,
                        death,
                        t,
                        TIME_TOL,
                    ));
                    break;
                }
            }
        } else if c_cur > 0.0 {
            let k = dominant(&cur);
            events.revival = Some(bisect_predicate(|s| weight_of(k, s) > 0.5, prev_t, t, TIME_TOL));
            break;
        }
        prev = cur;
        prev_t = t;
    }
    Ok(events)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::PinnedShape;
    use std::f64::consts::PI;

    fn grid(h: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|k| h * k as f64 / n as f64).collect()
    }

    #[test]
    fn weights_examples() {
        let p = DecoherenceProfile::cosine(1.0).unwrap();
        let b = choi_bell_weights(&MixingWeights::pure(3), &p, 0.0).unwrap();
        assert_eq!(b.p, [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(concurrence(&b), 1.0);
        let half = choi_bell_weights(&MixingWeights::pure(3), &p, PI / 2.0).unwrap();
        assert!((half.p[0] - 0.5).abs() < 1e-15 && (half.p[3] - 0.5).abs() < 1e-15);
        assert!(concurrence(&half) < 1e-15 && is_ppt(&half));
        let full = choi_bell_weights(&MixingWeights::pure(3), &p, PI).unwrap();
        assert!((concurrence(&full) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn maximally_entangled_state_fails_ppt() {
        let b = BellDiagonalState::new([1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!((ppt_min_eigenvalue(&b) + 0.5).abs() < 1e-12);
        let rho = b.density_matrix();
        assert!((rho.trace().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ppt_eigenvalue_is_half_minus_max_weight() {
        let b = BellDiagonalState::new([0.1, 0.2, 0.6, 0.1]).unwrap();
        assert!((ppt_min_eigenvalue(&b) - (0.5 - 0.6)).abs() < 1e-12);
    }

    #[test]
    fn cosine_death_and_revival() {
        let omega = 2.0;
        let p = DecoherenceProfile::cosine(omega).unwrap();
        let e = esd_events(&MixingWeights::pure(3), &p, &grid(3.0, 300)).unwrap();
        let t_star = PI / (2.0 * omega);
        assert!((e.death.unwrap() - t_star).abs() < 1e-9);
        assert!(e.revival.unwrap() >= e.death.unwrap());
        assert!((e.revival.unwrap() - t_star).abs() < 1e-9);
    }

    #[test]
    fn pinned_death_without_revival() {
        let p = DecoherenceProfile::heaviside_pinned(1.0, PinnedShape::Linear).unwrap();
        let e = esd_events(&MixingWeights::pure(3), &p, &grid(4.0, 400)).unwrap();
        assert!((e.death.unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(e.revival, None);
    }

    #[test]
    fn semigroup_never_dies() {
        let p = DecoherenceProfile::exponential(2.0, 1.0).unwrap();
        let e = esd_events(&MixingWeights::pure(3), &p, &grid(30.0, 3000)).unwrap();
        assert_eq!(e, EsdEvents { death: None, revival: None });
    }
}
