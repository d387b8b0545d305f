//! Decoherence-function families.
//!
//! A profile fixes the time dependence shared by the three Pauli dephasing
//! maps `E_i(ρ) = (1 - q) ρ + q σ_i ρ σ_i`. Some families are naturally
//! written as the mixing probability `q(t)`, others as the coherence
//! eigenvalue `λ(t) = 1 - 2 q(t)`; [`Semantics`] records which.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Family {
    Exponential,
    Cosine,
    HeavisidePinned,
    Rtn,
    ModifiedRtn,
    TabulatedRate,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Exponential => "exponential",
            Family::Cosine => "cosine",
            Family::HeavisidePinned => "heavisidePinned",
            Family::Rtn => "rtn",
            Family::ModifiedRtn => "modifiedRtn",
            Family::TabulatedRate => "tabulatedRate",
        }
    }
}

/// Whether a family's closed form gives `q(t)` or `λ(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Semantics {
    MixingProbability,
    MapEigenvalue,
}

/// Monotone ramp `f` with `f(0) = 0` and `f(t★) = 1/2` used before the pinning time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum PinnedShape {
    #[default]
    Linear,
    Quadratic,
    Sine,
}

impl PinnedShape {
    fn from_code(code: f64) -> Result<Self> {
        match code {
            0.0 => Ok(PinnedShape::Linear),
            1.0 => Ok(PinnedShape::Quadratic),
            2.0 => Ok(PinnedShape::Sine),
            _ => Err(Error::ParameterOutOfRange {
                name: "shape",
                value: code,
                expected: "0 (linear), 1 (quadratic) or 2 (sine)",
            }),
        }
    }

    fn eval(self, t: f64, t_star: f64) -> (f64, f64) {
        let s = t / t_star;
        match self {
            PinnedShape::Linear => (0.5 * s, 0.5 / t_star),
            PinnedShape::Quadratic => (0.5 * s * s, s / t_star),
            PinnedShape::Sine => {
                let arg = 0.5 * PI * s;
                (0.5 * arg.sin(), 0.25 * PI / t_star * arg.cos())
            }
        }
    }
}

/// `λ(t)` tabulated on a sorted grid together with `λ'(t)`; evaluated by
/// cubic Hermite interpolation. Produced by
/// [`profile_from_rate`](crate::dynamics::reconstruct::profile_from_rate).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", try_from = "RawTable")]
pub struct TabulatedProfile {
    times: Vec<f64>,
    lambda: Vec<f64>,
    lambda_dot: Vec<f64>,
    /// Time after which `λ ≡ 0` (divergent integrated rate), if any.
    #[serde(default)]
    pinned_at: Option<f64>,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct RawTable {
    times: Vec<f64>,
    lambda: Vec<f64>,
    lambda_dot: Vec<f64>,
    #[serde(default)]
    pinned_at: Option<f64>,
}

impl TryFrom<RawTable> for TabulatedProfile {
    type Error = Error;

    fn try_from(r: RawTable) -> Result<Self> {
        Self::new(r.times, r.lambda, r.lambda_dot, r.pinned_at)
    }
}

impl TabulatedProfile {
    pub fn new(
        times: Vec<f64>,
        lambda: Vec<f64>,
        lambda_dot: Vec<f64>,
        pinned_at: Option<f64>,
    ) -> Result<Self> {
        if times.len() < 2 || times.len() != lambda.len() || times.len() != lambda_dot.len() {
            return Err(Error::InvalidGrid(
                "tabulated profile needs at least two points and equal-length columns".into(),
            ));
        }
        if times[0] != 0.0 || times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidGrid(
                "tabulated times must start at 0 and increase strictly".into(),
            ));
        }
        if lambda.iter().chain(&lambda_dot).any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("tabulated values must be finite".into()));
        }
        Ok(Self {
            times,
            lambda,
            lambda_dot,
            pinned_at,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn lambda_values(&self) -> &[f64] {
        &self.lambda
    }

    pub fn pinned_at(&self) -> Option<f64> {
        self.pinned_at
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().expect("non-empty")
    }

    fn eval_lambda(&self, t: f64) -> (f64, f64) {
        if let Some(tp) = self.pinned_at {
            if t >= tp {
                return (0.0, 0.0);
            }
        }
        let n = self.times.len();
        if t >= self.times[n - 1] {
            // Hold the last value past the table.
            return (self.lambda[n - 1], 0.0);
        }
        let k = self.times.partition_point(|&x| x <= t).saturating_sub(1);
        let (t0, t1) = (self.times[k], self.times[k + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let (y0, y1) = (self.lambda[k], self.lambda[k + 1]);
        let (d0, d1) = (self.lambda_dot[k] * h, self.lambda_dot[k + 1] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        let value = (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * d0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * d1;
        let slope = ((6.0 * s2 - 6.0 * s) * y0
            + (3.0 * s2 - 4.0 * s + 1.0) * d0
            + (-6.0 * s2 + 6.0 * s) * y1
            + (3.0 * s2 - 2.0 * s) * d1)
            / h;
        (value, slope)
    }
}

/// Family parameters. Construct through [`DecoherenceProfile`] so ranges are checked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "camelCase")]
pub enum ProfileKind {
    /// `q(t) = (1 - e^{-jt}) / m`.
    Exponential { m: f64, j: f64 },
    /// `q(t) = (1 - cos ωt) / 2`.
    Cosine { omega: f64 },
    /// `q(t) = f(t)` for `t < t★`, `1/2` afterwards.
    #[serde(rename_all = "camelCase")]
    HeavisidePinned {
        t_star: f64,
        #[serde(default)]
        shape: PinnedShape,
    },
    /// `λ(t) = e^{-αt} [cos(ωαt) + sin(ωαt)/ω]`.
    Rtn { alpha: f64, omega: f64 },
    /// `λ(t) = e^{-αt} [cos(ωαt) + sin(ωαt)]`.
    ModifiedRtn { alpha: f64, omega: f64 },
    TabulatedRate(TabulatedProfile),
}

#[derive(Serialize, Deserialize)]
struct ProfileDocument {
    #[serde(flatten)]
    kind: ProfileKind,
    semantics: Semantics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileDocument", into = "ProfileDocument")]
pub struct DecoherenceProfile {
    kind: ProfileKind,
}

impl TryFrom<ProfileDocument> for DecoherenceProfile {
    type Error = Error;

    fn try_from(doc: ProfileDocument) -> Result<Self> {
        let profile = Self::from_kind(doc.kind)?;
        if profile.semantics() != doc.semantics {
            return Err(Error::Domain(format!(
                "family `{}` carries {:?} semantics, document says {:?}",
                profile.family().name(),
                profile.semantics(),
                doc.semantics
            )));
        }
        Ok(profile)
    }
}

impl From<DecoherenceProfile> for ProfileDocument {
    fn from(p: DecoherenceProfile) -> Self {
        let semantics = p.semantics();
        ProfileDocument {
            kind: p.kind,
            semantics,
        }
    }
}

fn check(name: &'static str, value: f64, ok: bool, expected: &'static str) -> Result<()> {
    if value.is_finite() && ok {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange {
            name,
            value,
            expected,
        })
    }
}

/// `sin(ω x) / ω`, continued to `x` at `ω = 0`.
fn sin_over(omega: f64, x: f64) -> f64 {
    if omega == 0.0 {
        x
    } else {
        (omega * x).sin() / omega
    }
}

impl DecoherenceProfile {
    /// Builds a profile from a flat parameter list.
    ///
    /// | family          | params                              |
    /// |-----------------|-------------------------------------|
    /// | Exponential     | `m, j`                              |
    /// | Cosine          | `ω`                                 |
    /// | HeavisidePinned | `t★` or `t★, shape` (0/1/2)         |
    /// | Rtn             | `α, ω`                              |
    /// | ModifiedRtn     | `α, ω`                              |
    ///
    /// Tabulated profiles come from
    /// [`profile_from_rate`](crate::dynamics::reconstruct::profile_from_rate).
    pub fn new(family: Family, params: &[f64]) -> Result<Self> {
        let arity = |expected: &'static str, ok: bool| {
            if ok {
                Ok(())
            } else {
                Err(Error::ParameterArity {
                    family: family.name(),
                    expected,
                    got: params.len(),
                })
            }
        };
        let kind = match family {
            Family::Exponential => {
                arity("2", params.len() == 2)?;
                ProfileKind::Exponential {
                    m: params[0],
                    j: params[1],
                }
            }
            Family::Cosine => {
                arity("1", params.len() == 1)?;
                ProfileKind::Cosine { omega: params[0] }
            }
            Family::HeavisidePinned => {
                arity("1 or 2", matches!(params.len(), 1 | 2))?;
                let shape = match params.get(1) {
                    Some(&code) => PinnedShape::from_code(code)?,
                    None => PinnedShape::Linear,
                };
                ProfileKind::HeavisidePinned {
                    t_star: params[0],
                    shape,
                }
            }
            Family::Rtn => {
                arity("2", params.len() == 2)?;
                ProfileKind::Rtn {
                    alpha: params[0],
                    omega: params[1],
                }
            }
            Family::ModifiedRtn => {
                arity("2", params.len() == 2)?;
                ProfileKind::ModifiedRtn {
                    alpha: params[0],
                    omega: params[1],
                }
            }
            Family::TabulatedRate => return Err(Error::UnsupportedFamily("tabulatedRate")),
        };
        Self::from_kind(kind)
    }

    pub fn exponential(m: f64, j: f64) -> Result<Self> {
        Self::from_kind(ProfileKind::Exponential { m, j })
    }

    pub fn cosine(omega: f64) -> Result<Self> {
        Self::from_kind(ProfileKind::Cosine { omega })
    }

    pub fn heaviside_pinned(t_star: f64, shape: PinnedShape) -> Result<Self> {
        Self::from_kind(ProfileKind::HeavisidePinned { t_star, shape })
    }

    pub fn rtn(alpha: f64, omega: f64) -> Result<Self> {
        Self::from_kind(ProfileKind::Rtn { alpha, omega })
    }

    pub fn modified_rtn(alpha: f64, omega: f64) -> Result<Self> {
        Self::from_kind(ProfileKind::ModifiedRtn { alpha, omega })
    }

    pub fn tabulated(table: TabulatedProfile) -> Self {
        Self {
            kind: ProfileKind::TabulatedRate(table),
        }
    }

    pub fn from_kind(kind: ProfileKind) -> Result<Self> {
        match &kind {
            ProfileKind::Exponential { m, j } => {
                check("m", *m, *m >= 1.0, "m >= 1")?;
                check("j", *j, *j > 0.0, "j > 0")?;
            }
            ProfileKind::Cosine { omega } => check("omega", *omega, *omega > 0.0, "omega > 0")?,
            ProfileKind::HeavisidePinned { t_star, .. } => {
                check("tstar", *t_star, *t_star > 0.0, "tstar > 0")?
            }
            ProfileKind::Rtn { alpha, omega } => {
                check("alpha", *alpha, *alpha >= 0.0, "alpha >= 0")?;
                check("omega", *omega, *omega >= 0.0, "omega >= 0")?;
            }
            ProfileKind::ModifiedRtn { alpha, omega } => {
                check("alpha", *alpha, *alpha >= 0.0, "alpha >= 0")?;
                // ω > 1 gives λ'(0) = α(ω - 1) > 0, i.e. |λ| > 1 right after t = 0.
                check(
                    "omega",
                    *omega,
                    (0.0..=1.0).contains(omega),
                    "0 <= omega <= 1 (|λ| <= 1)",
                )?;
            }
            ProfileKind::TabulatedRate(t) => {
                TabulatedProfile::new(
                    t.times.clone(),
                    t.lambda.clone(),
                    t.lambda_dot.clone(),
                    t.pinned_at,
                )?;
            }
        }
        Ok(Self { kind })
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    pub fn family(&self) -> Family {
        match self.kind {
            ProfileKind::Exponential { .. } => Family::Exponential,
            ProfileKind::Cosine { .. } => Family::Cosine,
            ProfileKind::HeavisidePinned { .. } => Family::HeavisidePinned,
            ProfileKind::Rtn { .. } => Family::Rtn,
            ProfileKind::ModifiedRtn { .. } => Family::ModifiedRtn,
            ProfileKind::TabulatedRate(_) => Family::TabulatedRate,
        }
    }

    pub fn semantics(&self) -> Semantics {
        match self.kind {
            ProfileKind::Rtn { .. } | ProfileKind::ModifiedRtn { .. } => Semantics::MapEigenvalue,
            _ => Semantics::MixingProbability,
        }
    }

    /// Time at which the profile is pinned to `q = 1/2`. Marks the δ term of
    /// the rate; the δ itself is never evaluated.
    pub fn pinning_time(&self) -> Option<f64> {
        match &self.kind {
            ProfileKind::HeavisidePinned { t_star, .. } => Some(*t_star),
            ProfileKind::TabulatedRate(t) => t.pinned_at,
            _ => None,
        }
    }

    /// A characteristic time of the family, used to size default grids.
    pub fn time_scale(&self) -> f64 {
        match &self.kind {
            ProfileKind::Exponential { j, .. } => 1.0 / j,
            ProfileKind::Cosine { omega } => 1.0 / omega,
            ProfileKind::HeavisidePinned { t_star, .. } => *t_star,
            ProfileKind::Rtn { alpha, .. } | ProfileKind::ModifiedRtn { alpha, .. } => {
                if *alpha > 0.0 {
                    1.0 / alpha
                } else {
                    1.0
                }
            }
            ProfileKind::TabulatedRate(t) => t.horizon(),
        }
    }

    /// Mixing probability `q(t)` and its derivative.
    pub fn q(&self, t: f64) -> (f64, f64) {
        match &self.kind {
            ProfileKind::Exponential { m, j } => {
                let e = (-j * t).exp();
                ((1.0 - e) / m, j * e / m)
            }
            ProfileKind::Cosine { omega } => {
                let (s, c) = (omega * t).sin_cos();
                (0.5 * (1.0 - c), 0.5 * omega * s)
            }
            ProfileKind::HeavisidePinned { t_star, shape } => {
                if t < *t_star {
                    shape.eval(t, *t_star)
                } else {
                    (0.5, 0.0)
                }
            }
            _ => {
                let (l, ld) = self.lambda(t);
                (0.5 * (1.0 - l), -0.5 * ld)
            }
        }
    }

    /// Coherence eigenvalue `λ(t) = 1 - 2q(t)` of a pure dephasing map and its derivative.
    pub fn lambda(&self, t: f64) -> (f64, f64) {
        match &self.kind {
            ProfileKind::Rtn { alpha, omega } => {
                let x = alpha * t;
                let e = (-x).exp();
                let c = (omega * x).cos();
                let so = sin_over(*omega, x);
                // λ' = -α (1 + ω²) e^{-αt} sin(ωαt)/ω
                (e * (c + so), -alpha * (1.0 + omega * omega) * e * so)
            }
            ProfileKind::ModifiedRtn { alpha, omega } => {
                let x = alpha * t;
                let e = (-x).exp();
                let (s, c) = (omega * x).sin_cos();
                (e * (c + s), alpha * e * ((omega - 1.0) * c - (omega + 1.0) * s))
            }
            ProfileKind::TabulatedRate(table) => table.eval_lambda(t),
            _ => {
                let (q, qd) = self.q(t);
                (1.0 - 2.0 * q, -2.0 * qd)
            }
        }
    }
}
