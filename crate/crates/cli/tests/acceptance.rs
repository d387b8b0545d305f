//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::f64::consts::FRAC_PI_2;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use paulidyn::divisibility::{divisibility_verdict, trace_distance_series, uniform_grid, Verdict};
use paulidyn::dynamics::environment::{reduced_dynamics_from_environment, EnvironmentModel};
use paulidyn::dynamics::{
    classify_map, decay_rates, map_eigenvalues, rates_from_q, singularity_times, Classification,
    RateStatus,
};
use paulidyn::entanglement::esd_events;
use paulidyn::kernel::{
    analytic_kernel, semigroup_limit_probe, verify_kernel, volterra_solve, LimitDirection,
    LimitParam, LimitSpec, Locality, SemigroupVerdict,
};
use paulidyn::measure::{
    default_m_grid, invertible_area_mc, invertible_region, nonmarkov_fraction,
    nonmarkov_fraction_mc, sweep_fraction, x1_bounds,
};
use paulidyn::{BlochVector, DecoherenceProfile, MixingWeights, PinnedShape};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn paulidyn(args: &[&str], threads: Option<&str>) -> Vec<u8> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_paulidyn"));
    cmd.args(args);
    if let Some(n) = threads {
        cmd.env("PAULIDYN_THREADS", n);
    }
    let out = cmd.output().expect("binary runs");
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn random_bloch(rng: &mut ChaCha8Rng) -> BlochVector {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        if v.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            return BlochVector::new(v[0], v[1], v[2]).unwrap();
        }
    }
}

fn random_weights(rng: &mut ChaCha8Rng) -> MixingWeights {
    let (u, v): (f64, f64) = (rng.random(), rng.random());
    let (u, v) = if u + v > 1.0 { (1.0 - u, 1.0 - v) } else { (u, v) };
    MixingWeights::from_x1_x2(u, v).unwrap()
}

fn golden_value() -> Outcome {
    let start = Instant::now();
    let out = paulidyn(&["measure", "nonmarkov", "--m", "5/3", "--tol", "1e-6"], None);
    let secs = start.elapsed().as_secs_f64();
    let v: Value = serde_json::from_slice(&out).map_err(|e| e.to_string())?;
    let f = v["fractionNonmarkovian"].as_f64().ok_or("missing field")?;
    check(
        (f - 0.826203).abs() <= 5e-4 && secs < 2.0,
        format!("F = {f}, |F - 0.826203| = {:.2e}, {secs:.3} s", (f - 0.826203).abs()),
    )
}

fn invertible_area() -> Outcome {
    let area = invertible_region(5.0 / 3.0).map_err(|e| e.to_string())?.area;
    let mc = invertible_area_mc(5.0 / 3.0, 1_000_000, 0).map_err(|e| e.to_string())?;
    check(
        area == 0.125 && (mc.estimate - area).abs() <= 1e-3,
        format!("area = {area}, MC = {} (diff {:.2e})", mc.estimate, (mc.estimate - area).abs()),
    )
}

fn quadrature_vs_mc() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for m in [1.40, 5.0 / 3.0, 1.90] {
        let q = nonmarkov_fraction(m, 1e-8).map_err(|e| e.to_string())?;
        let mc = nonmarkov_fraction_mc(m, 1_000_000, 0).map_err(|e| e.to_string())?;
        let z = (q - mc.estimate).abs() / mc.stderr;
        ok &= z <= 3.0;
        parts.push(format!("m={m:.4}: {z:.2} se"));
    }
    check(ok, parts.join(", "))
}

fn boundary_roots() -> Outcome {
    let mut worst: f64 = 0.0;
    for m in [1.5, 5.0 / 3.0, 1.9] {
        let tau = 1.0 - m / 2.0;
        let top = (m * m + 1.0f64).sqrt() - m;
        for k in 0..50 {
            let x2 = tau + (k as f64 + 0.5) / 50.0 * (top - tau);
            let (lo, hi) = x1_bounds(m, x2).map_err(|e| e.to_string())?;
            for x1 in [lo, hi] {
                let w = MixingWeights::from_x1_x2(x1, x2).map_err(|e| e.to_string())?;
                let g2 = rates_from_q(&w, 1.0 / m, 1.0)[1].value;
                worst = worst.max(g2.abs());
            }
        }
    }
    check(worst <= 1e-9, format!("max |γ₂| at the bounds = {worst:.2e}"))
}

fn rate_structure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let (mut accepted, mut drawn) = (0, 0);
    let (mut pair_min, mut multi_neg, mut worst_rel) = (f64::INFINITY, 0, 0.0f64);
    while accepted < 10_000 {
        drawn += 1;
        let m = rng.random_range(1.0..4.0);
        let j = rng.random_range(0.1..3.0);
        let w = random_weights(&mut rng);
        let p = DecoherenceProfile::exponential(m, j).unwrap();
        let t = rng.random_range(1e-3 / j..8.0 / j);
        let lam = |t: f64| map_eigenvalues(&w, &p, t).lambda;
        // Sampled times stay before the first singular point.
        if lam(t).iter().any(|&l| l <= 1e-3) {
            continue;
        }
        // Step well inside the local scale |λ / λ'| of the fastest axis.
        let qdot = p.q(t).1;
        let scale = w
            .as_array()
            .iter()
            .zip(lam(t))
            .map(|(x, l)| l / (2.0 * (1.0 - x) * qdot).abs().max(1e-300))
            .fold(1.0 / j, f64::min);
        let h = (1e-2 * scale).min(0.4 * t);
        if (-2..=2).any(|k| lam(t + k as f64 * h).iter().any(|&l| l <= 0.0)) {
            continue;
        }
        accepted += 1;
        let g = decay_rates(&w, &p, t).all_finite().unwrap();
        for i in 0..3 {
            pair_min = pair_min.min(g[i] + g[(i + 1) % 3]);
        }
        if g.iter().filter(|&&x| x < 0.0).count() > 1 {
            multi_neg += 1;
        }
        for i in 0..3 {
            let ln = |k: f64| lam(t + k * h)[i].ln();
            let fd = (ln(-2.0) - 8.0 * ln(-1.0) + 8.0 * ln(1.0) - ln(2.0)) / (12.0 * h);
            let exact = -2.0 * (g[(i + 1) % 3] + g[(i + 2) % 3]);
            let err = (fd - exact).abs() / (exact.abs() + 1e-9);
            worst_rel = worst_rel.max(err);
        }
    }
    check(
        pair_min >= -1e-12 && multi_neg == 0 && worst_rel <= 1e-6,
        format!(
            "{accepted} of {drawn} samples; min pair sum {pair_min:.2e}, \
             multiple negatives {multi_neg}, max relative log-derivative error {worst_rel:.2e}"
        ),
    )
}

fn classification() -> Outcome {
    let w = MixingWeights::pure(3);
    let hv = DecoherenceProfile::heaviside_pinned(1.0, PinnedShape::Linear).unwrap();
    let hv_class = classify_map(&w, &hv, 3.0).map_err(|e| e.to_string())?;
    let type1 = matches!(hv_class, Classification::TypeI { t_star } if (t_star - 1.0).abs() < 1e-9);
    let verdict = divisibility_verdict(&w, &hv, &uniform_grid(3.0, 2048))
        .map_err(|e| e.to_string())?
        .verdict;
    let indeterminate = (1..=20).all(|k| {
        decay_rates(&w, &hv, 1.0 + 0.1 * k as f64).get(3).status == RateStatus::Indeterminate
    });

    let cos = DecoherenceProfile::cosine(1.0).unwrap();
    let (t2, flip_ok) = match classify_map(&w, &cos, 5.0).map_err(|e| e.to_string())? {
        Classification::TypeII { t_star, flip: Some(f) } => {
            (t_star, (f.t - FRAC_PI_2).abs() <= 1e-6 && f.rate_index == 3)
        }
        _ => (f64::NAN, false),
    };
    let type2 = (t2 - FRAC_PI_2).abs() <= 1e-6 && flip_ok;
    check(
        type1 && verdict == Verdict::CpDivisible && indeterminate && type2,
        format!(
            "pinned: TypeI {type1}, verdict {verdict:?}, γ₃ indeterminate after t★ {indeterminate}; \
             cosine: TypeII with flip at π/2 {type2} (t* - π/2 = {:.1e})",
            t2 - FRAC_PI_2
        ),
    )
}

fn kernel_suite() -> Outcome {
    let profiles = [
        DecoherenceProfile::cosine(1.0).unwrap(),
        DecoherenceProfile::exponential(5.0 / 3.0, 1.0).unwrap(),
        DecoherenceProfile::exponential(3.0, 0.7).unwrap(),
        DecoherenceProfile::rtn(1.0, 2.0).unwrap(),
        DecoherenceProfile::modified_rtn(1.0, 0.5).unwrap(),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for p in &profiles {
        let r = verify_kernel(p, 1e-3).map_err(|e| e.to_string())?;
        ok &= r.sup_error <= 1e-4 && r.laplace_max_residual <= 1e-8;
        parts.push(format!(
            "{}: sup {:.1e} laplace {:.1e}",
            p.family().name(),
            r.sup_error,
            r.laplace_max_residual
        ));
    }
    let c = 0.8;
    let p2 = DecoherenceProfile::exponential(2.0, c).unwrap();
    let k = analytic_kernel(&p2).map_err(|e| e.to_string())?;
    let sol = volterra_solve(&k, 5.0 / c, 1e-3).map_err(|e| e.to_string())?;
    let err = sol
        .times
        .iter()
        .zip(&sol.lambda)
        .map(|(&t, &l)| (l - (-c * t).exp()).abs().max((p2.lambda(t).0 - (-c * t).exp()).abs()))
        .fold(0.0, f64::max);
    let local = k.locality() == Locality::Local && k.nonlocal.amplitude == 0.0;
    ok &= local && err <= 1e-4;
    parts.push(format!("n=2: local {local}, |λ - e^(-ct)| ≤ {err:.1e}"));
    check(ok, parts.join("; "))
}

fn semigroup_limits() -> Outcome {
    let probe = |p: DecoherenceProfile, direction| {
        semigroup_limit_probe(&p, LimitSpec { param: LimitParam::Omega, direction })
            .map(|r| r.verdict)
            .map_err(|e| e.to_string())
    };
    let mod_zero = probe(DecoherenceProfile::modified_rtn(1.0, 0.5).unwrap(), LimitDirection::Zero)?;
    let rtn_zero = probe(DecoherenceProfile::rtn(1.0, 1.0).unwrap(), LimitDirection::Zero)?;
    let rtn_inf = probe(DecoherenceProfile::rtn(1.0, 1.0).unwrap(), LimitDirection::Infinity)?;
    check(
        matches!(mod_zero, SemigroupVerdict::HasSemigroupLimit { .. })
            && matches!(rtn_zero, SemigroupVerdict::NoSemigroupLimit { .. })
            && matches!(rtn_inf, SemigroupVerdict::NoSemigroupLimit { .. }),
        format!("modified RTN ω→0: {mod_zero:?}; RTN ω→0: {rtn_zero:?}; RTN ω→∞: {rtn_inf:?}"),
    )
}

fn environment() -> Outcome {
    let omega = 1.3;
    let plus = BlochVector::new(1.0, 0.0, 0.0).unwrap();
    let cos_err = (0..100)
        .map(|k| {
            let t = 0.1 * k as f64;
            (reduced_dynamics_from_environment(omega, &plus, t) - 0.5 * (1.0 - (omega * t).cos())).abs()
        })
        .fold(0.0, f64::max);

    let zero = BlochVector::new(0.0, 0.0, 1.0).unwrap();
    let model = EnvironmentModel::new(omega, &zero);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut drift: f64 = 0.0;
    for _ in 0..20 {
        let (a, b) = (random_bloch(&mut rng), random_bloch(&mut rng));
        let d0 = a.trace_distance(&b);
        for k in 0..100 {
            let t = 0.1 * k as f64;
            let (va, vb) = (model.evolve(&a, t), model.evolve(&b, t));
            let d = 0.5 * (0..3).map(|i| (va[i] - vb[i]).powi(2)).sum::<f64>().sqrt();
            drift = drift.max((d - d0).abs());
        }
    }
    check(
        cos_err <= 1e-10 && drift <= 1e-12,
        format!("|+⟩ env: max |q - ½(1-cos ωt)| = {cos_err:.1e}; |0⟩ env: max distance drift = {drift:.1e}"),
    )
}

/// Largest trace-distance increase on the grid (0 when monotone).
fn max_increase(series: &[f64]) -> f64 {
    series.windows(2).map(|s| s[1] - s[0]).fold(0.0, f64::max)
}

fn blp_and_esd() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut pairs, mut worst) = (0, 0.0f64);
    while pairs < 100 {
        let m = rng.random_range(1.0..4.0);
        let j = rng.random_range(0.1..3.0);
        let w = random_weights(&mut rng);
        let p = DecoherenceProfile::exponential(m, j).unwrap();
        let horizon = 10.0 / j;
        if !singularity_times(&w, &p, horizon).unwrap().is_empty() {
            continue;
        }
        pairs += 1;
        let (a, b) = (random_bloch(&mut rng), random_bloch(&mut rng));
        let series = trace_distance_series(&w, &p, &a, &b, &uniform_grid(horizon, 400));
        worst = worst.max(max_increase(&series));
    }

    let w = MixingWeights::pure(3);
    let grid = uniform_grid(4.0, 4001);
    let dt = grid[1];
    let cos = DecoherenceProfile::cosine(1.0).unwrap();
    let hv = DecoherenceProfile::heaviside_pinned(1.0, PinnedShape::Linear).unwrap();
    let mut esd_ok = true;
    let mut parts = vec![format!("{pairs} invertible pairs, max increase {worst:.1e}")];
    for (name, p, want_revival) in [("cosine", &cos, true), ("pinned", &hv, false)] {
        let first = singularity_times(&w, p, 4.0).unwrap()[0].t_star;
        let ev = esd_events(&w, p, &grid).map_err(|e| e.to_string())?;
        let death_ok = ev.death.is_some_and(|d| (d - first).abs() <= dt);
        esd_ok &= death_ok && ev.revival.is_some() == want_revival;
        parts.push(format!("{name}: death {:?} vs t* {first:.6}, revival {:?}", ev.death, ev.revival));
    }
    check(worst <= 0.0 && esd_ok, parts.join("; "))
}

/// The literal all-mixtures BLP reading, reported but not scored.
fn blp_all_mixtures_note() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut increasing = 0;
    for _ in 0..100 {
        let m = rng.random_range(1.0..4.0);
        let j = rng.random_range(0.1..3.0);
        let w = random_weights(&mut rng);
        let p = DecoherenceProfile::exponential(m, j).unwrap();
        let (a, b) = (random_bloch(&mut rng), random_bloch(&mut rng));
        let series = trace_distance_series(&w, &p, &a, &b, &uniform_grid(10.0 / j, 400));
        if max_increase(&series) > 1e-12 {
            increasing += 1;
        }
    }
    format!("{increasing} of 100 unrestricted mixtures (noninvertible included) show an increase")
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("paulidyn-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let series = dir.join("series.csv");
    let series = series.to_str().unwrap();
    let runs: Vec<Vec<&str>> = vec![
        vec!["measure", "mc", "--m", "5/3", "--samples", "1000000", "--seed", "0"],
        vec!["measure", "mc", "--m", "1.9", "--samples", "300000", "--seed", "7", "--area"],
        vec!["measure", "nonmarkov", "--m", "1.4"],
        vec!["sweep", "--points", "5"],
        vec!["raster", "--m", "5/3", "--resolution", "32"],
        vec!["divisibility", "--family", "exponential", "--m", "5/3", "--weights", "0.3,0.2,0.5"],
        vec!["rates", "--family", "rtn", "--alpha", "0.5", "--omega", "2", "--format", "json"],
        vec!["kernel", "verify", "--family", "cosine"],
    ];
    let mut mismatched = Vec::new();
    for args in &runs {
        let a = paulidyn(args, None);
        let b = paulidyn(args, Some("1"));
        let c = paulidyn(args, Some("3"));
        if a != b || a != c {
            mismatched.push(args.join(" "));
        }
    }
    let esd = ["esd", "--family", "cosine", "--horizon", "4", "--series", series];
    let first = (paulidyn(&esd, None), std::fs::read(series).map_err(|e| e.to_string())?);
    let second = (paulidyn(&esd, Some("2")), std::fs::read(series).map_err(|e| e.to_string())?);
    if first != second {
        mismatched.push(esd.join(" "));
    }
    let _ = std::fs::remove_dir_all(&dir);
    check(
        mismatched.is_empty(),
        format!("{} commands run three times each; mismatches: {mismatched:?}", runs.len() + 1),
    )
}

fn sweep_continuity() -> Outcome {
    let mut grid = default_m_grid(20);
    grid.push(5.0 / 3.0);
    grid.sort_by(f64::total_cmp);
    let rows = sweep_fraction(&grid, 1e-6).map_err(|e| e.to_string())?;
    let f: Vec<f64> = rows.iter().map(|r| r.fraction_nonmarkovian).collect();
    let in_range = f.iter().all(|&x| x.is_finite() && x > 0.0 && x < 1.0);
    let max_jump = f.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
    // Midpoints must sit between their neighbours, up to a small curvature allowance.
    let mut worst_mid: f64 = 0.0;
    for (a, b) in rows.iter().zip(&rows[1..]) {
        let mid = nonmarkov_fraction(0.5 * (a.m + b.m), 1e-6).map_err(|e| e.to_string())?;
        let (lo, hi) = (
            a.fraction_nonmarkovian.min(b.fraction_nonmarkovian),
            a.fraction_nonmarkovian.max(b.fraction_nonmarkovian),
        );
        worst_mid = worst_mid.max((lo - mid).max(mid - hi).max(0.0));
    }
    check(
        in_range && max_jump <= 0.02 && worst_mid <= 1e-4,
        format!(
            "{} points, range [{:.6}, {:.6}], max step {max_jump:.4}, max midpoint excursion {worst_mid:.1e}",
            f.len(),
            f[0],
            f[f.len() - 1]
        ),
    )
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("golden non-Markovian fraction at m = 5/3", golden_value),
        ("invertible area at m = 5/3 and its MC estimate", invertible_area),
        ("quadrature vs Monte Carlo within 3 standard errors", quadrature_vs_mc),
        ("γ₂ vanishes on the region boundary", boundary_roots),
        ("rate structure over 10⁴ random samples", rate_structure),
        ("Type I / Type II classification", classification),
        ("memory kernel suite", kernel_suite),
        ("semigroup limits", semigroup_limits),
        ("microscopic environment model", environment),
        ("trace distance and entanglement sudden death", blp_and_esd),
        ("deterministic artifacts", determinism),
        ("sweep continuity on (4/3, 2)", sweep_continuity),
    ];
    let mut failures = 0;
    for (n, (name, run)) in criteria.into_iter().enumerate() {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS [{}] {name}: {detail}", n + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL [{}] {name}: {detail}", n + 1);
            }
        }
        if n + 1 == 10 {
            println!("INFO [10] {}", blp_all_mixtures_note());
        }
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
