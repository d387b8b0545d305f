use std::fs;
use std::path::Path;

use serde_json::json;

use paulidyn::divisibility::{divisibility_verdict, trace_distance_series, uniform_grid};
use paulidyn::dynamics::environment::EnvironmentModel;
use paulidyn::dynamics::reconstruct::{profile_from_rate, RateFunction};
use paulidyn::dynamics::{classify_map, decay_rates, map_eigenvalues, singularity_times, Classification};
use paulidyn::entanglement::{concurrence_series, esd_events};
use paulidyn::kernel::{
    analytic_kernel, default_abscissae, laplace_residual, semigroup_limit_probe, verify_kernel,
    LimitDirection, LimitParam, LimitSpec,
};
use paulidyn::measure::{
    default_m_grid, invertible_area_mc, invertible_region, nonmarkov_fraction,
    nonmarkov_fraction_mc, simplex_raster, sweep_fraction,
};
use paulidyn::{BlochVector, DecoherenceProfile, MixingWeights, PinnedShape};

use crate::args::*;
use crate::output::{emit, Artifact, Table};
use crate::CliError;

const DEFAULT_STEPS: usize = 200;
const DEFAULT_DIVISIBILITY_POINTS: usize = 2048;

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn build_profile(a: &ProfileArgs) -> Result<DecoherenceProfile, CliError> {
    if let Some(path) = &a.profile {
        return read_json(path);
    }
    let family = a
        .family
        .ok_or_else(|| CliError::Usage("one of --family or --profile is required".into()))?;
    let shape = match a.shape {
        ShapeArg::Linear => PinnedShape::Linear,
        ShapeArg::Quadratic => PinnedShape::Quadratic,
        ShapeArg::Sine => PinnedShape::Sine,
    };
    Ok(match family {
        FamilyArg::Exponential => {
            let m = a
                .m
                .ok_or_else(|| CliError::Usage("--family exponential needs --m".into()))?;
            DecoherenceProfile::exponential(m, a.j)?
        }
        FamilyArg::Cosine => DecoherenceProfile::cosine(a.omega)?,
        FamilyArg::HeavisidePinned => DecoherenceProfile::heaviside_pinned(a.tstar, shape)?,
        FamilyArg::Rtn => DecoherenceProfile::rtn(a.alpha, a.omega)?,
        FamilyArg::ModifiedRtn => DecoherenceProfile::modified_rtn(a.alpha, a.omega)?,
    })
}

struct Trajectory {
    weights: MixingWeights,
    profile: DecoherenceProfile,
    horizon: f64,
}

impl Trajectory {
    fn new(a: &TrajectoryArgs, default_horizon_scales: f64) -> Result<Self, CliError> {
        let profile = build_profile(&a.profile)?;
        let [x1, x2, x3] = a.weights;
        Ok(Self {
            weights: MixingWeights::new(x1, x2, x3)?,
            horizon: a.horizon.unwrap_or(default_horizon_scales * profile.time_scale()),
            profile,
        })
    }

    fn grid(&self, steps: Option<usize>) -> Vec<f64> {
        uniform_grid(self.horizon, steps.unwrap_or(DEFAULT_STEPS) + 1)
    }
}

fn finish(artifact: Artifact, output: &OutputArgs) -> Result<(), CliError> {
    let text = artifact.render(output.format)?;
    emit(&text, output.out.as_deref())
}

pub fn run(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Rates(a) => {
            let tr = Trajectory::new(&a, 5.0)?;
            let mut t = Table::new(vec!["t", "gamma1", "gamma2", "gamma3"]);
            for time in tr.grid(a.steps) {
                let r = decay_rates(&tr.weights, &tr.profile, time);
                t.push(vec![time.into(), r.rates[0].value.into(), r.rates[1].value.into(), r.rates[2].value.into()]);
            }
            finish(Artifact::Table(t), &a.output)
        }
        Command::Eigenvalues(a) => {
            let tr = Trajectory::new(&a, 5.0)?;
            let mut t = Table::new(vec!["t", "lambda1", "lambda2", "lambda3"]);
            for time in tr.grid(a.steps) {
                let [l1, l2, l3] = map_eigenvalues(&tr.weights, &tr.profile, time).lambda;
                t.push(vec![time.into(), l1.into(), l2.into(), l3.into()]);
            }
            finish(Artifact::Table(t), &a.output)
        }
        Command::Classify(a) => {
            let tr = Trajectory::new(&a, 10.0)?;
            let value = match classify_map(&tr.weights, &tr.profile, tr.horizon)? {
                Classification::Invertible => json!({ "type": "invertible" }),
                Classification::TypeI { t_star } => json!({ "type": "I", "tstar": t_star }),
                Classification::TypeII { t_star, flip } => {
                    json!({ "type": "II", "tstar": t_star, "flip": flip })
                }
            };
            finish(Artifact::Json(value), &a.output)
        }
        Command::Singularities(a) => {
            let tr = Trajectory::new(&a, 10.0)?;
            let events = singularity_times(&tr.weights, &tr.profile, tr.horizon)?;
            if a.output.format == Some(Format::Csv) {
                let mut t = Table::new(vec!["t_star", "axes", "kind"]);
                for e in &events {
                    let axes: Vec<String> = e.axes.iter().map(usize::to_string).collect();
                    t.push(vec![e.t_star.into(), axes.join(";").into(), format!("{:?}", e.kind).into()]);
                }
                return finish(Artifact::Table(t), &a.output);
            }
            finish(Artifact::json(&events)?, &a.output)
        }
        Command::Divisibility(a) => {
            let tr = Trajectory::new(&a, 10.0)?;
            let grid = uniform_grid(tr.horizon, a.steps.unwrap_or(DEFAULT_DIVISIBILITY_POINTS));
            let report = divisibility_verdict(&tr.weights, &tr.profile, &grid)?;
            finish(Artifact::json(&report)?, &a.output)
        }
        Command::Blp(a) => {
            let tr = Trajectory::new(&a.trajectory, 5.0)?;
            let va = BlochVector::new(a.va[0], a.va[1], a.va[2])?;
            let vb = BlochVector::new(a.vb[0], a.vb[1], a.vb[2])?;
            let grid = tr.grid(a.trajectory.steps);
            let d = trace_distance_series(&tr.weights, &tr.profile, &va, &vb, &grid);
            let mut t = Table::new(vec!["t", "trace_distance"]);
            for (time, dk) in grid.iter().zip(d) {
                t.push(vec![(*time).into(), dk.into()]);
            }
            finish(Artifact::Table(t), &a.trajectory.output)
        }
        Command::Measure { command } => measure(command),
        Command::Sweep(a) => {
            let grid = if a.m_values.is_empty() {
                default_m_grid(a.points)
            } else {
                a.m_values.clone()
            };
            let mut t = Table::new(vec!["m", "fraction_nonmarkovian"]);
            for row in sweep_fraction(&grid, a.tol)? {
                t.push(vec![row.m.into(), row.fraction_nonmarkovian.into()]);
            }
            finish(Artifact::Table(t), &a.output)
        }
        Command::Raster(a) => {
            let mut t = Table::new(vec!["x1", "x2", "label"]);
            for c in simplex_raster(a.m, a.resolution)? {
                t.push(vec![c.x1.into(), c.x2.into(), c.label.as_str().into()]);
            }
            finish(Artifact::Table(t), &a.output)
        }
        Command::Kernel { command } => kernel(command),
        Command::Esd(a) => {
            let tr = Trajectory::new(&a.trajectory, 5.0)?;
            let grid = tr.grid(a.trajectory.steps);
            if let Some(path) = &a.series {
                let mut t = Table::new(vec!["t", "q", "concurrence"]);
                for pt in concurrence_series(&tr.weights, &tr.profile, &grid)? {
                    t.push(vec![pt.t.into(), pt.q.into(), pt.concurrence.into()]);
                }
                emit(&t.to_csv()?, Some(path))?;
            }
            let events = esd_events(&tr.weights, &tr.profile, &grid)?;
            finish(Artifact::json(&events)?, &a.trajectory.output)
        }
        Command::EnvDerive(a) => {
            let env = BlochVector::new(a.env[0], a.env[1], a.env[2])?;
            let model = EnvironmentModel::new(a.omega, &env);
            let mut t = Table::new(vec!["t", "q", "lambda", "rotation"]);
            for time in uniform_grid(a.horizon, a.steps + 1) {
                let d = model.dephasing(a.omega, time);
                t.push(vec![d.t.into(), d.q.into(), d.lambda.into(), d.rotation.into()]);
            }
            finish(Artifact::Table(t), &a.output)
        }
        Command::Rate2profile(a) => {
            let rate = match (&a.rate, a.rate_kind) {
                (Some(path), _) => read_json::<RateFunction>(path)?,
                (None, Some(RateKindArg::Constant)) => RateFunction::Constant { value: a.value },
                (None, Some(RateKindArg::Tangent)) => RateFunction::Tangent { omega: a.omega },
                (None, Some(RateKindArg::TangentSquared)) => RateFunction::TangentSquared {
                    omega: a.omega,
                    scale: a.scale,
                },
                (None, None) => return Err(CliError::Usage("--rate-kind or --rate is required".into())),
            };
            let r = profile_from_rate(&rate, a.horizon, a.steps)?;
            let mut doc = serde_json::to_value(&r.profile)?;
            doc.as_object_mut()
                .expect("profile serializes to an object")
                .insert("validity".into(), serde_json::to_value(&r.validity)?);
            finish(Artifact::Json(doc), &a.output)
        }
    }
}

fn measure(cmd: MeasureCommand) -> Result<(), CliError> {
    match cmd {
        MeasureCommand::Invertible { m, output } => finish(Artifact::json(&invertible_region(m)?)?, &output),
        MeasureCommand::Nonmarkov { m, tol, output } => {
            let f = nonmarkov_fraction(m, tol)?;
            finish(Artifact::Json(json!({ "m": m, "fractionNonmarkovian": f, "tol": tol })), &output)
        }
        MeasureCommand::Mc { m, samples, seed, area, output } => {
            let est = if area {
                invertible_area_mc(m, samples, seed)?
            } else {
                nonmarkov_fraction_mc(m, samples, seed)?
            };
            let mut v = serde_json::to_value(est)?;
            v["m"] = json!(m);
            v["seed"] = json!(seed);
            v["target"] = json!(if area { "invertibleArea" } else { "fractionNonmarkovian" });
            finish(Artifact::Json(v), &output)
        }
    }
}

fn kernel(cmd: KernelCommand) -> Result<(), CliError> {
    match cmd {
        KernelCommand::Show { profile, output } => {
            let p = build_profile(&profile)?;
            let k = analytic_kernel(&p)?;
            let (local, nonlocal) = k.dissipator_coefficients();
            let mut v = serde_json::to_value(p.kind())?;
            let obj = v.as_object_mut().expect("profile kind is an object");
            obj.insert("localCoeff".into(), json!(k.local_coeff));
            obj.insert("nonlocal".into(), serde_json::to_value(k.nonlocal)?);
            obj.insert(
                "dissipator".into(),
                json!({ "local": local, "nonlocalAmplitude": nonlocal, "nonlocalDecay": k.nonlocal.decay }),
            );
            obj.insert("locality".into(), serde_json::to_value(k.locality())?);
            finish(Artifact::Json(v), &output)
        }
        KernelCommand::Verify { profile, dt, output } => {
            let p = build_profile(&profile)?;
            finish(Artifact::json(&verify_kernel(&p, dt)?)?, &output)
        }
        KernelCommand::Laplace { profile, s, output } => {
            let p = build_profile(&profile)?;
            let s = if s.is_empty() { default_abscissae(&p, 16)? } else { s };
            let res = laplace_residual(&p, &s)?;
            let mut t = Table::new(vec!["s", "residual"]);
            for (sk, r) in s.iter().zip(res) {
                t.push(vec![(*sk).into(), r.into()]);
            }
            finish(Artifact::Table(t), &output)
        }
        KernelCommand::Limit { profile, param, direction, output } => {
            let p = build_profile(&profile)?;
            let direction = match direction.to_ascii_lowercase().as_str() {
                "zero" | "0" => LimitDirection::Zero,
                "infinity" | "inf" => LimitDirection::Infinity,
                other => LimitDirection::To(parse_real(other).map_err(CliError::Usage)?),
            };
            let param = match param {
                LimitParamArg::Omega => LimitParam::Omega,
                LimitParamArg::M => LimitParam::M,
            };
            let probe = semigroup_limit_probe(&p, LimitSpec { param, direction })?;
            let mut v = serde_json::to_value(&probe)?;
            v["family"] = json!(p.family().name());
            finish(Artifact::Json(v), &output)
        }
    }
}
