//! Singular points (vanishing eigenvalues) and the Type I / Type II split.

use serde::Serialize;

use super::{decay_rates, eigenvalues_from_q};
use crate::numeric::roots::{bisect_predicate, brent};
use crate::profile::ProfileKind;
use crate::{DecoherenceProfile, Error, MixingWeights, Result};

/// Absolute tolerance on `λ_i = 0`.
pub const ROOT_TOL: f64 = 1e-10;
/// Grid pre-scan resolution over the horizon.
pub const SCAN_STEPS: usize = 4096;
/// Probe window after a vanishing, as a fraction of the horizon.
pub const PROBE_FRACTION: f64 = 0.05;
pub const PROBE_SAMPLES: usize = 64;
/// `|λ|` below which a vanished eigenvalue counts as staying pinned.
pub const PINNED_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SingularKind {
    /// Eigenvalues reach zero and stay (fixed point).
    TypeI,
    /// Eigenvalues cross zero and become nonzero again.
    TypeII,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SingularEvent {
    pub t_star: f64,
    /// Axes (1..=3) whose eigenvalue vanishes at `t_star`.
    pub axes: Vec<usize>,
    pub kind: SingularKind,
}

/// A rate turning negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SignFlip {
    pub rate_index: usize,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Classification {
    Invertible,
    TypeI { t_star: f64 },
    TypeII { t_star: f64, flip: Option<SignFlip> },
}

fn lambda_axis(p: &DecoherenceProfile, one_minus_x: f64, t: f64) -> f64 {
    1.0 - 2.0 * one_minus_x * p.q(t).0
}

/// Vanishing times of `λ = 1 - 2 a q(t)` on `[0, horizon]` for `a = 1 - x`.
fn roots_for_weight(p: &DecoherenceProfile, a: f64, horizon: f64) -> Vec<f64> {
    if a == 0.0 {
        return Vec::new();
    }
    if let ProfileKind::Exponential { m, j } = *p.kind() {
        // λ = 1 - 2a(1 - e^{-jt})/m vanishes once, iff 2a > m.
        let two_a = 2.0 * a;
        if two_a > m {
            let t = (two_a / (two_a - m)).ln() / j;
            if t <= horizon {
                return vec![t];
            }
        }
        return Vec::new();
    }

    let f = |t: f64| lambda_axis(p, a, t);
    let class = |v: f64| -> i8 {
        if v.abs() <= ROOT_TOL {
            0
        } else if v > 0.0 {
            1
        } else {
            -1
        }
    };
    let dt = horizon / SCAN_STEPS as f64;
    let mut roots = Vec::new();
    let mut prev_t = 0.0;
    let mut prev = class(f(0.0));
    for k in 1..=SCAN_STEPS {
        let t = k as f64 * dt;
        let cur = class(f(t));
        if prev != 0 && cur == 0 {
            // Touches zero: earliest time inside the tolerance band, or at
            // exact zero when the profile is pinned there.
            let band = if f(t) == 0.0 { 0.0 } else { ROOT_TOL };
            roots.push(bisect_predicate(|s| f(s).abs() <= band, prev_t, t, 1e-13));
        } else if prev != 0 && cur != 0 && prev != cur {
            if let Some(r) = brent(f, prev_t, t, 1e-14, 200) {
                roots.push(r);
            }
        }
        prev = cur;
        prev_t = t;
    }
    roots
}

fn probe_kind(
    w: &MixingWeights,
    p: &DecoherenceProfile,
    t_star: f64,
    axes: &[usize],
    window: f64,
) -> SingularKind {
    let stays = (1..=PROBE_SAMPLES).all(|k| {
        let t = t_star + window * k as f64 / PROBE_SAMPLES as f64;
        let l = eigenvalues_from_q(w, p.q(t).0);
        axes.iter().all(|&ax| l[ax - 1].abs() < PINNED_TOL)
    });
    if stays {
        SingularKind::TypeI
    } else {
        SingularKind::TypeII
    }
}

/// Times in `[0, horizon]` at which some eigenvalue of the mixture vanishes.
///
/// Exponential profiles use the closed form
/// `t* = ln[2(1-x_i) / (2(1-x_i) - m)] / j`; other families are pre-scanned
/// on [`SCAN_STEPS`] points and refined by Brent's method (sign changes) or
/// bisection (eigenvalues that touch zero and stay). Axes vanishing together
/// are merged into one event.
pub fn singularity_times(
    w: &MixingWeights,
    p: &DecoherenceProfile,
    horizon: f64,
) -> Result<Vec<SingularEvent>> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::Domain(format!("horizon must be positive, got {horizon}")));
    }
    let a = w.as_array().map(|x| 1.0 - x);
    let mut hits: Vec<(f64, usize)> = Vec::new();
    let mut done: Vec<(f64, Vec<f64>)> = Vec::new();
    for (i, &ai) in a.iter().enumerate() {
        // Equal weights share eigenvalue functions; solve once.
        let roots = match done.iter().find(|(ad, _)| *ad == ai) {
            Some((_, r)) => r.clone(),
            None => {
                let r = roots_for_weight(p, ai, horizon);
                done.push((ai, r.clone()));
                r
            }
        };
        hits.extend(roots.into_iter().map(|t| (t, i + 1)));
    }
    hits.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));

    let window = PROBE_FRACTION * horizon;
    let mut events: Vec<SingularEvent> = Vec::new();
    for (t, axis) in hits {
        match events.last_mut() {
            Some(e) if (t - e.t_star).abs() <= 1e-9 * t.max(1.0) => {
                if !e.axes.contains(&axis) {
                    e.axes.push(axis);
                }
            }
            _ => events.push(SingularEvent {
                t_star: t,
                axes: vec![axis],
                kind: SingularKind::TypeII,
            }),
        }
    }
    for e in &mut events {
        e.kind = probe_kind(w, p, e.t_star, &e.axes, window);
    }
    Ok(events)
}

/// First time after which rate `i` is negative, searched on `[0, t_end]`.
fn first_negative(w: &MixingWeights, p: &DecoherenceProfile, i: usize, t_end: f64) -> Option<f64> {
    let negative = |t: f64| matches!(decay_rates(w, p, t).get(i).finite(), Some(g) if g < 0.0);
    let dt = t_end / SCAN_STEPS as f64;
    let mut prev_t = 0.0;
    for k in 1..=SCAN_STEPS {
        let t = k as f64 * dt;
        if negative(t) {
            return Some(if negative(prev_t) {
                prev_t
            } else {
                bisect_predicate(negative, prev_t, t, 1e-13)
            });
        }
        prev_t = t;
    }
    None
}

/// Classifies the noninvertibility of the mixture over `[0, horizon]`.
///
/// Only the first singular event matters: if the vanished eigenvalues stay
/// below [`PINNED_TOL`] throughout the probe window after it, the map is
/// Type I; otherwise Type II, reported with the rate that is negative just
/// after the singularity and the time it turned negative.
pub fn classify_map(
    w: &MixingWeights,
    p: &DecoherenceProfile,
    horizon: f64,
) -> Result<Classification> {
    let events = singularity_times(w, p, horizon)?;
    let Some(first) = events.first() else {
        return Ok(Classification::Invertible);
    };
    let window = PROBE_FRACTION * horizon;
    if first.t_star > horizon - window {
        return Err(Error::HorizonTooShort {
            horizon,
            t_star: first.t_star,
        });
    }
    let t_star = first.t_star;
    match first.kind {
        SingularKind::TypeI => Ok(Classification::TypeI { t_star }),
        SingularKind::TypeII => {
            let after = (1..=PROBE_SAMPLES)
                .map(|k| t_star + window * k as f64 / PROBE_SAMPLES as f64)
                .find_map(|t| decay_rates(w, p, t).all_finite());
            let flip = after
                .and_then(|g| (1..=3).find(|&i| g[i - 1] < 0.0))
                .and_then(|i| {
                    first_negative(w, p, i, t_star + window).map(|t| SignFlip { rate_index: i, t })
                });
            Ok(Classification::TypeII { t_star, flip })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::PinnedShape;
    use std::f64::consts::PI;

    #[test]
    fn exponential_m1_pure_map_closed_form() {
        let p = DecoherenceProfile::exponential(1.0, 1.0).unwrap();
        let ev = singularity_times(&MixingWeights::pure(3), &p, 5.0).unwrap();
        assert_eq!(ev.len(), 1);
        assert!((ev[0].t_star - 2f64.ln()).abs() < 1e-15);
        assert_eq!(ev[0].axes, vec![1, 2]);
        assert_eq!(ev[0].kind, SingularKind::TypeII);
    }

    #[test]
    fn exponential_m2_never_singular() {
        let p = DecoherenceProfile::exponential(2.0, 1.0).unwrap();
        for w in [
            MixingWeights::pure(1),
            MixingWeights::uniform(),
            MixingWeights::new(0.0, 0.1, 0.9).unwrap(),
        ] {
            assert!(singularity_times(&w, &p, 100.0).unwrap().is_empty());
        }
    }

    #[test]
    fn cosine_singularities_at_odd_half_periods() {
        let omega = 2.0;
        let p = DecoherenceProfile::cosine(omega).unwrap();
        let ev = singularity_times(&MixingWeights::pure(3), &p, 6.0).unwrap();
        let expect: Vec<f64> = (0..4).map(|k| (2 * k + 1) as f64 * PI / (2.0 * omega)).collect();
        assert_eq!(ev.len(), expect.len());
        for (e, t) in ev.iter().zip(expect) {
            assert!((e.t_star - t).abs() < 1e-10);
            assert_eq!(e.axes, vec![1, 2]);
        }
    }

    #[test]
    fn heaviside_is_type_one() {
        let p = DecoherenceProfile::heaviside_pinned(1.0, PinnedShape::Sine).unwrap();
        let c = classify_map(&MixingWeights::pure(3), &p, 4.0).unwrap();
        match c {
            Classification::TypeI { t_star } => assert!((t_star - 1.0).abs() < 1e-7),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cosine_is_type_two_with_gamma3_flip() {
        let omega = 1.0;
        let p = DecoherenceProfile::cosine(omega).unwrap();
        match classify_map(&MixingWeights::pure(3), &p, 5.0).unwrap() {
            Classification::TypeII { t_star, flip } => {
                assert!((t_star - PI / 2.0).abs() < 1e-10);
                let flip = flip.unwrap();
                assert_eq!(flip.rate_index, 3);
                assert!((flip.t - t_star).abs() < 1e-6);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn exponential_m2_invertible() {
        let p = DecoherenceProfile::exponential(2.0, 1.0).unwrap();
        assert_eq!(
            classify_map(&MixingWeights::uniform(), &p, 10.0).unwrap(),
            Classification::Invertible
        );
    }

    #[test]
    fn horizon_too_short() {
        let p = DecoherenceProfile::cosine(1.0).unwrap();
        let err = classify_map(&MixingWeights::pure(3), &p, 1.6).unwrap_err();
        assert_eq!(err.kind(), "HorizonTooShort");
    }

    #[test]
    fn rtn_roots_found_by_scan() {
        // λ = e^{-αt}[cos ωαt + sin(ωαt)/ω] vanishes where tan(ωαt) = -ω.
        let (alpha, omega) = (1.0, 3.0);
        let p = DecoherenceProfile::rtn(alpha, omega).unwrap();
        let ev = singularity_times(&MixingWeights::pure(3), &p, 3.0).unwrap();
        let first = (PI - omega.atan()) / (omega * alpha);
        assert!((ev[0].t_star - first).abs() < 1e-10);
        assert_eq!(ev[0].kind, SingularKind::TypeII);
    }
}
