//! Memory kernels of pure dephasing maps.
//!
//! The coherence eigenvalue obeys `λ̇(t) = a λ(t) + ∫₀ᵗ g(t - τ) λ(τ) dτ`
//! with a local coefficient `a` (the weight of `δ(t)` in the scalar kernel
//! `κ`) and a regular part `g(t) = A e^{-bt}`. In the Laplace domain
//! `κ̂(s) = s - 1/λ̂(s)`. The dissipator form `κ·(σ₃ρσ₃ - ρ)` carries half
//! the magnitude with the opposite sign.

use num_complex::Complex64;
use serde::Serialize;

use crate::numeric::minimize::golden_section;
use crate::profile::ProfileKind;
use crate::{DecoherenceProfile, Error, Family, Result};

/// Closest approach of a Laplace abscissa to a pole or zero of `λ̂`.
pub const POLE_TOL: f64 = 1e-6;
/// Largest allowed `|a|·dt` in [`volterra_solve`].
pub const MAX_LOCAL_STIFFNESS: f64 = 0.1;
/// Fit residual below which a probe counts as exponential.
pub const SEMIGROUP_RESIDUAL: f64 = 1e-6;

/// `A e^{-b t}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExpKernel {
    pub amplitude: f64,
    pub decay: f64,
}

impl ExpKernel {
    pub fn at(&self, t: f64) -> f64 {
        if self.amplitude == 0.0 {
            0.0
        } else {
            self.amplitude * (-self.decay * t).exp()
        }
    }

    pub fn laplace(&self, s: f64) -> f64 {
        self.amplitude / (s + self.decay)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Locality {
    Local,
    Nonlocal,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct KernelSpec {
    pub local_coeff: f64,
    pub nonlocal: ExpKernel,
}

impl KernelSpec {
    pub fn nonlocal_at(&self, t: f64) -> f64 {
        self.nonlocal.at(t)
    }

    pub fn laplace(&self, s: f64) -> f64 {
        self.local_coeff + self.nonlocal.laplace(s)
    }

    /// Coefficients of the same kernel written against `σ₃ρσ₃ - ρ`:
    /// `(local, nonlocal amplitude)`.
    pub fn dissipator_coefficients(&self) -> (f64, f64) {
        (0.0 - 0.5 * self.local_coeff, 0.0 - 0.5 * self.nonlocal.amplitude)
    }

    pub fn locality(&self) -> Locality {
        match (self.local_coeff != 0.0, self.nonlocal.amplitude != 0.0) {
            (true, false) | (false, false) => Locality::Local,
            (false, true) => Locality::Nonlocal,
            (true, true) => Locality::Mixed,
        }
    }
}

pub fn analytic_kernel(p: &DecoherenceProfile) -> Result<KernelSpec> {
    let (local_coeff, amplitude, decay) = match *p.kind() {
        ProfileKind::Cosine { omega } => (0.0, -omega * omega, 0.0),
        ProfileKind::Exponential { m: n, j: c } => (
            -2.0 * c / n,
            2.0 * c * c * (n - 2.0) / (n * n),
            c * (n - 2.0) / n,
        ),
        ProfileKind::Rtn { alpha, omega } => (0.0, -alpha * alpha * (1.0 + omega * omega), 2.0 * alpha),
        ProfileKind::ModifiedRtn { alpha, omega } => (
            alpha * (omega - 1.0),
            -2.0 * alpha * alpha * omega * omega,
            alpha * (1.0 + omega),
        ),
        ProfileKind::HeavisidePinned { .. } => return Err(Error::UnsupportedFamily("heavisidePinned")),
        ProfileKind::TabulatedRate(_) => return Err(Error::UnsupportedFamily("tabulatedRate")),
    };
    Ok(KernelSpec {
        local_coeff,
        nonlocal: ExpKernel { amplitude, decay },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VolterraSolution {
    pub times: Vec<f64>,
    pub lambda: Vec<f64>,
}

/// Trapezoidal time stepping with trapezoidal convolution weights.
///
/// The scheme is implicit only through the `g(0) λ_{n+1}` end weight and the
/// local term, both linear, so each step is a scalar division.
pub fn volterra_solve(k: &KernelSpec, horizon: f64, dt: f64) -> Result<VolterraSolution> {
    if !(horizon > 0.0 && dt > 0.0 && dt <= horizon / 100.0 * (1.0 + 1e-12)) {
        return Err(Error::InvalidGrid(format!(
            "need 0 < dt <= horizon/100 (dt {dt}, horizon {horizon})"
        )));
    }
    if k.local_coeff.abs() * dt > MAX_LOCAL_STIFFNESS {
        return Err(Error::StepSizeTooLarge(dt));
    }
    let n = (horizon / dt).round() as usize;
    let h = horizon / n as f64;
    let g: Vec<f64> = (0..=n).map(|i| k.nonlocal_at(i as f64 * h)).collect();
    let a = k.local_coeff;
    let denom = 1.0 - 0.5 * h * a - 0.25 * h * h * g[0];

    let mut lambda = Vec::with_capacity(n + 1);
    lambda.push(1.0);
    let mut f_prev = a; // F_0 = a λ_0, the memory integral is empty
    for step in 0..n {
        let next = step + 1;
        // Trapezoidal memory sum at t_{n+1} without the λ_{n+1} end weight.
        let mut s = 0.5 * g[next] * lambda[0];
        for (j, l) in lambda.iter().enumerate().skip(1) {
            s += g[next - j] * l;
        }
        s *= h;
        let l_next = (lambda[step] + 0.5 * h * (f_prev + s)) / denom;
        f_prev = a * l_next + s + 0.5 * h * g[0] * l_next;
        lambda.push(l_next);
    }
    Ok(VolterraSolution {
        times: (0..=n).map(|i| i as f64 * h).collect(),
        lambda,
    })
}

/// Analytic `λ̂(s)` for the four kernel families.
pub fn laplace_lambda(p: &DecoherenceProfile, s: f64) -> Result<f64> {
    Ok(match *p.kind() {
        ProfileKind::Cosine { omega } => s / (s * s + omega * omega),
        ProfileKind::Exponential { m: n, j: c } => (1.0 - 2.0 / n) / s + (2.0 / n) / (s + c),
        ProfileKind::Rtn { alpha, omega } => {
            (s + 2.0 * alpha) / ((s + alpha).powi(2) + (omega * alpha).powi(2))
        }
        ProfileKind::ModifiedRtn { alpha, omega } => {
            (s + alpha * (1.0 + omega)) / ((s + alpha).powi(2) + (omega * alpha).powi(2))
        }
        ProfileKind::HeavisidePinned { .. } => return Err(Error::UnsupportedFamily("heavisidePinned")),
        ProfileKind::TabulatedRate(_) => return Err(Error::UnsupportedFamily("tabulatedRate")),
    })
}

/// Poles and zeros of `λ̂`; the zeros are the poles of `κ̂`.
pub fn laplace_singularities(p: &DecoherenceProfile) -> Result<Vec<Complex64>> {
    let re = |x: f64| Complex64::new(x, 0.0);
    Ok(match *p.kind() {
        ProfileKind::Cosine { omega } => vec![re(0.0), Complex64::new(0.0, omega), Complex64::new(0.0, -omega)],
        ProfileKind::Exponential { m: n, j: c } => vec![re(0.0), re(-c), re(-c * (n - 2.0) / n)],
        ProfileKind::Rtn { alpha, omega } => vec![
            Complex64::new(-alpha, omega * alpha),
            Complex64::new(-alpha, -omega * alpha),
            re(-2.0 * alpha),
        ],
        ProfileKind::ModifiedRtn { alpha, omega } => vec![
            Complex64::new(-alpha, omega * alpha),
            Complex64::new(-alpha, -omega * alpha),
            re(-alpha * (1.0 + omega)),
        ],
        ProfileKind::HeavisidePinned { .. } => return Err(Error::UnsupportedFamily("heavisidePinned")),
        ProfileKind::TabulatedRate(_) => return Err(Error::UnsupportedFamily("tabulatedRate")),
    })
}

/// `|κ̂(s) - (s - 1/λ̂(s))|` for each abscissa.
pub fn laplace_residual(p: &DecoherenceProfile, s_list: &[f64]) -> Result<Vec<f64>> {
    let k = analytic_kernel(p)?;
    let poles = laplace_singularities(p)?;
    s_list
        .iter()
        .map(|&s| {
            if let Some(z) = poles.iter().find(|z| (Complex64::new(s, 0.0) - **z).norm() < POLE_TOL) {
                return Err(Error::PoleProximity { s, pole: format!("{z}") });
            }
            Ok((k.laplace(s) - (s - 1.0 / laplace_lambda(p, s)?)).abs())
        })
        .collect()
}

/// `count` abscissae spread over three decades to the right of every
/// singularity, in units of the family's rate scale.
pub fn default_abscissae(p: &DecoherenceProfile, count: usize) -> Result<Vec<f64>> {
    let right = laplace_singularities(p)?
        .iter()
        .map(|z| z.re)
        .fold(0.0, f64::max);
    let scale = 1.0 / p.time_scale();
    Ok((0..count)
        .map(|k| right + scale * 10f64.powf(3.0 * k as f64 / (count.max(2) - 1) as f64))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct KernelReport {
    #[serde(flatten)]
    pub profile: ProfileKind,
    pub sup_error: f64,
    pub laplace_max_residual: f64,
    pub locality: Locality,
    pub kernel: KernelSpec,
}

/// Solves the kernel equation over five characteristic times and compares
/// with the analytic `λ`, then checks 16 Laplace abscissae.
pub fn verify_kernel(p: &DecoherenceProfile, dt: f64) -> Result<KernelReport> {
    let k = analytic_kernel(p)?;
    let sol = volterra_solve(&k, 5.0 * p.time_scale(), dt)?;
    let sup_error = sol
        .times
        .iter()
        .zip(&sol.lambda)
        .map(|(&t, &l)| (l - p.lambda(t).0).abs())
        .fold(0.0, f64::max);
    let residuals = laplace_residual(p, &default_abscissae(p, 16)?)?;
    Ok(KernelReport {
        profile: p.kind().clone(),
        sup_error,
        laplace_max_residual: residuals.into_iter().fold(0.0, f64::max),
        locality: k.locality(),
        kernel: k,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum LimitParam {
    Omega,
    M,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum LimitDirection {
    Zero,
    Infinity,
    To(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitSpec {
    pub param: LimitParam,
    pub direction: LimitDirection,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase", tag = "verdict")]
pub enum SemigroupVerdict {
    HasSemigroupLimit { rate: f64 },
    NoSemigroupLimit {
        #[serde(rename = "blockingTerm")]
        blocking_term: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LimitProbe {
    #[serde(flatten)]
    pub verdict: SemigroupVerdict,
    /// `(parameter value, best-fit rate, max residual)` along the limit.
    pub trail: Vec<(f64, f64, f64)>,
}

const PROBE_STEPS: i32 = 8;
const PROBE_GRID: usize = 201;

fn limit_values(direction: LimitDirection) -> Vec<f64> {
    (1..=PROBE_STEPS)
        .map(|k| {
            let e = 10f64.powi(-k);
            match direction {
                LimitDirection::Zero => e,
                LimitDirection::Infinity => 1.0 / e,
                LimitDirection::To(v) => v + e,
            }
        })
        .collect()
}

fn blocking_term(family: Family, limit: LimitSpec) -> Option<String> {
    match (family, limit.param, limit.direction) {
        (Family::Rtn, LimitParam::Omega, LimitDirection::Zero) => Some("sin(ωαt)/ω → αt".into()),
        (Family::Rtn, LimitParam::Omega, LimitDirection::Infinity) => Some("cos(ωαt)".into()),
        _ => None,
    }
}

/// Best single exponential `e^{-rt}` in least squares, and its sup residual.
fn exponential_fit(times: &[f64], values: &[f64], r_max: f64) -> (f64, f64) {
    let sse = |r: f64| {
        times
            .iter()
            .zip(values)
            .map(|(&t, &v)| (v - (-r * t).exp()).powi(2))
            .sum::<f64>()
    };
    let r = golden_section(sse, 0.0, r_max, 1e-13 * r_max);
    let residual = times
        .iter()
        .zip(values)
        .map(|(&t, &v)| (v - (-r * t).exp()).abs())
        .fold(0.0, f64::max);
    (r, residual)
}

/// Follows `template` along a one-parameter limit and tests whether `λ`
/// approaches a single exponential on a fixed grid of five time scales.
pub fn semigroup_limit_probe(template: &DecoherenceProfile, limit: LimitSpec) -> Result<LimitProbe> {
    let build = |v: f64| -> Result<DecoherenceProfile> {
        match (template.kind(), limit.param) {
            (ProfileKind::Rtn { alpha, .. }, LimitParam::Omega) => DecoherenceProfile::rtn(*alpha, v),
            (ProfileKind::ModifiedRtn { alpha, .. }, LimitParam::Omega) => {
                DecoherenceProfile::modified_rtn(*alpha, v)
            }
            (ProfileKind::Exponential { j, .. }, LimitParam::M) => DecoherenceProfile::exponential(v, *j),
            _ => Err(Error::UnsupportedFamily(template.family().name())),
        }
    };
    let tau = template.time_scale();
    let times: Vec<f64> = (0..PROBE_GRID)
        .map(|i| 5.0 * tau * i as f64 / (PROBE_GRID - 1) as f64)
        .collect();
    let mut trail = Vec::new();
    for v in limit_values(limit.direction) {
        let p = build(v)?;
        let values: Vec<f64> = times.iter().map(|&t| p.lambda(t).0).collect();
        let (r, res) = exponential_fit(&times, &values, 20.0 / tau);
        trail.push((v, r, res));
    }
    let &(_, rate, residual) = trail.last().expect("non-empty trail");
    let verdict = if residual < SEMIGROUP_RESIDUAL {
        SemigroupVerdict::HasSemigroupLimit { rate }
    } else {
        SemigroupVerdict::NoSemigroupLimit {
            blocking_term: blocking_term(template.family(), limit),
        }
    };
    Ok(LimitProbe { verdict, trail })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::PinnedShape;

    #[test]
    fn exponential_n2_is_pure_delta() {
        let c = 0.7;
        let k = analytic_kernel(&DecoherenceProfile::exponential(2.0, c).unwrap()).unwrap();
        assert_eq!(k.local_coeff, -c);
        assert_eq!(k.nonlocal_at(0.3), 0.0);
        assert_eq!(k.locality(), Locality::Local);
        let sol = volterra_solve(&k, 5.0, 1e-3).unwrap();
        for (t, l) in sol.times.iter().zip(&sol.lambda) {
            assert!((l - (-c * t).exp()).abs() < 1e-6);
        }
    }

    #[test]
    fn cosine_kernel_reproduces_cosine() {
        let omega = 1.3;
        let k = analytic_kernel(&DecoherenceProfile::cosine(omega).unwrap()).unwrap();
        assert_eq!(k.local_coeff, 0.0);
        assert_eq!(k.nonlocal_at(2.0), -omega * omega);
        let sol = volterra_solve(&k, 5.0, 1e-3).unwrap();
        for (t, l) in sol.times.iter().zip(&sol.lambda) {
            assert!((l - (omega * t).cos()).abs() < 1e-5);
        }
        assert_eq!(k.dissipator_coefficients().1, 0.5 * omega * omega);
    }

    #[test]
    fn rtn_kernel_is_nonlocal() {
        let k = analytic_kernel(&DecoherenceProfile::rtn(1.0, 2.0).unwrap()).unwrap();
        assert_eq!(k.local_coeff, 0.0);
        assert_eq!(k.locality(), Locality::Nonlocal);
    }

    #[test]
    fn modified_rtn_local_limit() {
        let alpha = 1.5;
        let k = analytic_kernel(&DecoherenceProfile::modified_rtn(alpha, 1e-9).unwrap()).unwrap();
        assert!((k.local_coeff + alpha).abs() < 1e-8);
        assert!(k.nonlocal.amplitude.abs() < 1e-15);
    }

    #[test]
    fn unsupported_families() {
        let p = DecoherenceProfile::heaviside_pinned(1.0, PinnedShape::Linear).unwrap();
        assert!(matches!(analytic_kernel(&p), Err(Error::UnsupportedFamily(_))));
    }

    #[test]
    fn stiffness_and_grid_checks() {
        let k = analytic_kernel(&DecoherenceProfile::exponential(2.0, 200.0).unwrap()).unwrap();
        assert!(matches!(volterra_solve(&k, 1.0, 1e-3), Err(Error::StepSizeTooLarge(_))));
        assert!(volterra_solve(&k, 1.0, 0.5).is_err());
    }

    #[test]
    fn laplace_pole_proximity() {
        let p = DecoherenceProfile::cosine(1.0).unwrap();
        assert!(matches!(laplace_residual(&p, &[1e-8]), Err(Error::PoleProximity { .. })));
        let r = laplace_residual(&p, &[0.5, 2.0, 30.0]).unwrap();
        assert!(r.iter().all(|&x| x < 1e-12));
    }

    #[test]
    fn modified_rtn_residual_at_ten_alpha() {
        let alpha = 0.8;
        let p = DecoherenceProfile::modified_rtn(alpha, 0.6).unwrap();
        assert!(laplace_residual(&p, &[10.0 * alpha]).unwrap()[0] < 1e-8);
    }

    #[test]
    fn limits() {
        let m = DecoherenceProfile::modified_rtn(1.0, 0.5).unwrap();
        let zero = LimitSpec { param: LimitParam::Omega, direction: LimitDirection::Zero };
        let probe = semigroup_limit_probe(&m, zero).unwrap();
        match probe.verdict {
            SemigroupVerdict::HasSemigroupLimit { rate } => assert!((rate - 1.0).abs() < 1e-6),
            v => panic!("{v:?}"),
        }
        let r = DecoherenceProfile::rtn(1.0, 0.5).unwrap();
        assert!(matches!(
            semigroup_limit_probe(&r, zero).unwrap().verdict,
            SemigroupVerdict::NoSemigroupLimit { blocking_term: Some(_) }
        ));
        let e = DecoherenceProfile::exponential(1.5, 1.0).unwrap();
        let to2 = LimitSpec { param: LimitParam::M, direction: LimitDirection::To(2.0) };
        assert!(matches!(
            semigroup_limit_probe(&e, to2).unwrap().verdict,
            SemigroupVerdict::HasSemigroupLimit { .. }
        ));
    }
}
