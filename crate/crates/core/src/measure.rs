//! Invertible, Markovian and non-Markovian regions of the Pauli simplex for
//! mixtures driven by the exponential family with parameter `m`.
//!
//! Points are parameterised by `(x1, x2)` with `x3 = 1 - x1 - x2`; the full
//! simplex has area ½ in that plane.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{eigenvalues_from_q, rates_from_q};
use crate::numeric::quadrature;
use crate::{Error, MixingWeights, Result};

pub const DEFAULT_TOL: f64 = 1e-6;
pub const MIN_MC_SAMPLES: usize = 10_000;
const MAX_SUBDIVISIONS: usize = 2000;
/// Samples per random stream. Each chunk owns stream `chunk index` of the
/// seed, so totals do not depend on how chunks are scheduled.
const MC_CHUNK: usize = 1 << 16;

fn check_m(m: f64) -> Result<()> {
    if m > 4.0 / 3.0 && m < 2.0 {
        Ok(())
    } else if m >= 2.0 {
        Err(Error::Domain(format!(
            "m = {m}: for m >= 2 every mixture is invertible"
        )))
    } else {
        Err(Error::Domain(format!(
            "m = {m}: for m <= 4/3 the output map is always noninvertible"
        )))
    }
}

/// Minimum weight `1 - m/2` each `x_i` must exceed for invertibility.
pub fn threshold(m: f64) -> f64 {
    1.0 - m / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct InvertibleRegion {
    pub threshold: f64,
    /// Area in the `(x1, x2)` plane.
    pub area: f64,
    /// Area relative to the whole simplex.
    pub relative_fraction: f64,
}

pub fn invertible_region(m: f64) -> Result<InvertibleRegion> {
    check_m(m)?;
    let d = 4.0 - 3.0 * m;
    Ok(InvertibleRegion {
        threshold: threshold(m),
        area: d * d / 8.0,
        relative_fraction: d * d / 4.0,
    })
}

/// Boundary of the region where `γ_2 < 0` at `q = 1/m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundaryCurve {
    pub m: f64,
    pub mu_plus: f64,
    pub mu_minus: f64,
    pub x2_range: [f64; 2],
}

impl BoundaryCurve {
    pub fn new(m: f64) -> Result<Self> {
        check_m(m)?;
        let r = (m * m + 1.0).sqrt();
        let mu_plus = r - m;
        Ok(Self {
            m,
            mu_plus,
            mu_minus: -r - m,
            x2_range: [threshold(m), mu_plus],
        })
    }

    fn eta_squared(&self, x2: f64) -> f64 {
        let m = self.m;
        (x2 - m + 1.0) * (x2 + m - 1.0) * (self.mu_plus - x2) * (self.mu_minus - x2)
    }

    fn contains(&self, x2: f64) -> bool {
        x2 >= self.x2_range[0] && x2 <= self.x2_range[1]
    }

    /// `η(m, x2)`, clamped at zero against rounding inside the range.
    pub fn eta(&self, x2: f64) -> Result<f64> {
        if !self.contains(x2) {
            return Err(Error::Domain(format!(
                "x2 = {x2} outside [{}, {}]",
                self.x2_range[0], self.x2_range[1]
            )));
        }
        Ok(self.eta_squared(x2).max(0.0).sqrt())
    }

    pub fn x1_bounds(&self, x2: f64) -> Result<(f64, f64)> {
        let half_width = 0.5 * self.eta(x2)? / (x2 + self.m - 1.0);
        let mid = 0.5 * (1.0 - x2);
        Ok((mid - half_width, mid + half_width))
    }

    /// `x1⁺ - x1⁻`, zero outside the range.
    fn width(&self, x2: f64) -> f64 {
        if !self.contains(x2) {
            return 0.0;
        }
        self.eta_squared(x2).max(0.0).sqrt() / (x2 + self.m - 1.0)
    }
}

pub fn x1_bounds(m: f64, x2: f64) -> Result<(f64, f64)> {
    BoundaryCurve::new(m)?.x1_bounds(x2)
}

/// Fraction of invertible mixtures with a negative rate.
///
/// By symmetry the three regions `γ_i < 0` have equal area, so three times
/// the area under `x1⁺ - x1⁻` is divided by the invertible area. `tol` is
/// the absolute tolerance on the fraction.
pub fn nonmarkov_fraction(m: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::ParameterOutOfRange {
            name: "tol",
            value: tol,
            expected: "tol > 0",
        });
    }
    let curve = BoundaryCurve::new(m)?;
    let area = invertible_region(m)?.area;
    let scale = 3.0 / area;
    let [lo, hi] = curve.x2_range;
    let r = quadrature::integrate_sqrt_endpoints(|x2| curve.width(x2), lo, hi, tol / scale, MAX_SUBDIVISIONS)?;
    Ok(scale * r.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: usize,
    pub hits: u64,
}

fn check_samples(n: usize) -> Result<()> {
    if n < MIN_MC_SAMPLES {
        return Err(Error::ParameterOutOfRange {
            name: "samples",
            value: n as f64,
            expected: "samples >= 10000",
        });
    }
    Ok(())
}

/// Uniform point of the unit right triangle `u, v >= 0`, `u + v <= 1`.
fn unit_triangle(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let u: f64 = rng.random();
    let v: f64 = rng.random();
    if u + v > 1.0 {
        (1.0 - u, 1.0 - v)
    } else {
        (u, v)
    }
}

/// Counts hits of `pred` over `n` uniform triangle samples, streams split by chunk.
fn count_hits<P>(n: usize, seed: u64, pred: P) -> u64
where
    P: Fn(f64, f64) -> bool + Sync,
{
    let chunks = n.div_ceil(MC_CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = MC_CHUNK.min(n - c * MC_CHUNK);
            (0..len)
                .filter(|_| {
                    let (u, v) = unit_triangle(&mut rng);
                    pred(u, v)
                })
                .count() as u64
        })
        .sum()
}

fn has_negative_rate(m: f64, x: [f64; 3]) -> Option<usize> {
    let w = MixingWeights::new(x[0], x[1], x[2]).ok()?;
    rates_from_q(&w, 1.0 / m, 1.0)
        .iter()
        .position(|r| r.finite().is_some_and(|g| g < 0.0))
        .map(|i| i + 1)
}

/// Monte Carlo estimate of [`nonmarkov_fraction`] from uniform samples of
/// the invertible sub-triangle.
pub fn nonmarkov_fraction_mc(m: f64, n: usize, seed: u64) -> Result<McEstimate> {
    check_m(m)?;
    check_samples(n)?;
    let tau = threshold(m);
    let side = 1.0 - 3.0 * tau;
    let hits = count_hits(n, seed, |u, v| {
        let x1 = tau + side * u;
        let x2 = tau + side * v;
        has_negative_rate(m, [x1, x2, (1.0 - x1 - x2).max(0.0)]).is_some()
    });
    let p = hits as f64 / n as f64;
    Ok(McEstimate {
        estimate: p,
        stderr: (p * (1.0 - p) / n as f64).sqrt(),
        samples: n,
        hits,
    })
}

/// Monte Carlo estimate of the invertible area from uniform samples of the
/// whole simplex.
pub fn invertible_area_mc(m: f64, n: usize, seed: u64) -> Result<McEstimate> {
    check_m(m)?;
    check_samples(n)?;
    let tau = threshold(m);
    let hits = count_hits(n, seed, |x1, x2| x1 > tau && x2 > tau && 1.0 - x1 - x2 > tau);
    let p = hits as f64 / n as f64;
    Ok(McEstimate {
        estimate: 0.5 * p,
        stderr: 0.5 * (p * (1.0 - p) / n as f64).sqrt(),
        samples: n,
        hits,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionLabel {
    NoninvertibleOutput,
    MarkovianInvertible,
    /// Index (1..=3) of the negative rate.
    NonMarkovian(usize),
}

impl RegionLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegionLabel::NoninvertibleOutput => "noninvertible",
            RegionLabel::MarkovianInvertible => "markovian",
            RegionLabel::NonMarkovian(1) => "nonmarkovian_g1",
            RegionLabel::NonMarkovian(2) => "nonmarkovian_g2",
            RegionLabel::NonMarkovian(_) => "nonmarkovian_g3",
        }
    }
}

impl Serialize for RegionLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

pub fn classify_mixture(m: f64, x1: f64, x2: f64) -> Result<RegionLabel> {
    check_m(m)?;
    let w = MixingWeights::from_x1_x2(x1, x2)?;
    let tau = threshold(m);
    if w.as_array().iter().any(|&x| x < tau) {
        return Ok(RegionLabel::NoninvertibleOutput);
    }
    Ok(match has_negative_rate(m, w.as_array()) {
        Some(i) => RegionLabel::NonMarkovian(i),
        None => RegionLabel::MarkovianInvertible,
    })
}

/// Debug scan: which rates turn negative anywhere on `q ∈ [0, 1/m)`.
/// The sign of `q̇` is irrelevant for the exponential family (`q̇ > 0`).
pub fn negative_rates_on_scan(m: f64, w: &MixingWeights, samples: usize) -> [bool; 3] {
    let mut neg = [false; 3];
    for k in 0..samples {
        let q = k as f64 / samples as f64 / m;
        if eigenvalues_from_q(w, q).iter().any(|l| *l <= 0.0) {
            break;
        }
        for (i, r) in rates_from_q(w, q, 1.0).iter().enumerate() {
            neg[i] |= r.finite().is_some_and(|g| g < 0.0);
        }
    }
    neg
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub m: f64,
    pub fraction_nonmarkovian: f64,
}

pub fn sweep_fraction(m_grid: &[f64], tol: f64) -> Result<Vec<SweepRow>> {
    m_grid
        .iter()
        .map(|&m| {
            Ok(SweepRow {
                m,
                fraction_nonmarkovian: nonmarkov_fraction(m, tol)?,
            })
        })
        .collect()
}

/// `count` equally spaced values strictly inside `(4/3, 2)`.
pub fn default_m_grid(count: usize) -> Vec<f64> {
    let (lo, hi) = (4.0 / 3.0, 2.0);
    (1..=count)
        .map(|k| lo + (hi - lo) * k as f64 / (count + 1) as f64)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RasterCell {
    pub x1: f64,
    pub x2: f64,
    pub label: RegionLabel,
}

/// Labels the centroids of the `resolution²` triangles of the regular
/// subdivision of the simplex.
pub fn simplex_raster(m: f64, resolution: usize) -> Result<Vec<RasterCell>> {
    check_m(m)?;
    if resolution < 16 {
        return Err(Error::ParameterOutOfRange {
            name: "resolution",
            value: resolution as f64,
            expected: "resolution >= 16",
        });
    }
    let n = resolution as f64;
    let mut centroids = Vec::with_capacity(resolution * resolution);
    for j in 0..resolution {
        for i in 0..resolution - j {
            centroids.push(((i as f64 + 1.0 / 3.0) / n, (j as f64 + 1.0 / 3.0) / n));
            if i + j + 2 <= resolution {
                centroids.push(((i as f64 + 2.0 / 3.0) / n, (j as f64 + 2.0 / 3.0) / n));
            }
        }
    }
    centroids
        .into_iter()
        .map(|(x1, x2)| {
            Ok(RasterCell {
                x1,
                x2,
                label: classify_mixture(m, x1, x2)?,
            })
        })
        .collect()
}
