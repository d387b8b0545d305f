use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Parses a real number, also accepting a fraction such as `5/3`.
pub fn parse_real(s: &str) -> Result<f64, String> {
    let parse = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}"));
    match s.split_once('/') {
        Some((num, den)) => Ok(parse(num)? / parse(den)?),
        None => parse(s),
    }
}

fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<f64> = s.split(',').map(parse_real).collect::<Result<_, _>>()?;
    parts
        .try_into()
        .map_err(|_| format!("expected three comma-separated numbers, got `{s}`"))
}

#[derive(Parser, Debug)]
#[command(name = "paulidyn", version, about = "Dynamics, divisibility and memory kernels of Pauli dephasing mixtures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Canonical decay rates on a time grid.
    Rates(TrajectoryArgs),
    /// Map eigenvalues on a time grid.
    Eigenvalues(TrajectoryArgs),
    /// Type I / Type II classification of the first singularity.
    Classify(TrajectoryArgs),
    /// All singular points up to the horizon.
    Singularities(TrajectoryArgs),
    /// CP / P divisibility verdict with witnesses.
    Divisibility(TrajectoryArgs),
    /// Trace distance between two evolved states.
    Blp(BlpArgs),
    /// Invertible and non-Markovian regions of the simplex.
    Measure {
        #[command(subcommand)]
        command: MeasureCommand,
    },
    /// Non-Markovian fraction across m.
    Sweep(SweepArgs),
    /// Region labels on a triangular raster of the simplex.
    Raster(RasterArgs),
    /// Memory kernels.
    Kernel {
        #[command(subcommand)]
        command: KernelCommand,
    },
    /// Entanglement sudden death and revival of the Choi state.
    Esd(EsdArgs),
    /// Dephasing derived from a qubit environment.
    EnvDerive(EnvArgs),
    /// Decoherence profile from a prescribed dephasing rate.
    Rate2profile(RateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Exponential,
    Cosine,
    HeavisidePinned,
    Rtn,
    ModifiedRtn,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ShapeArg {
    Linear,
    Quadratic,
    Sine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct ProfileArgs {
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    /// Profile document (JSON) instead of --family.
    #[arg(long, conflicts_with = "family")]
    pub profile: Option<PathBuf>,
    #[arg(long, value_parser = parse_real)]
    pub m: Option<f64>,
    #[arg(long, value_parser = parse_real, default_value = "1")]
    pub j: f64,
    #[arg(long, value_parser = parse_real, default_value = "1")]
    pub omega: f64,
    #[arg(long, value_parser = parse_real, default_value = "1")]
    pub alpha: f64,
    #[arg(long, value_parser = parse_real, default_value = "1")]
    pub tstar: f64,
    #[arg(long, value_enum, default_value = "linear")]
    pub shape: ShapeArg,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args, Debug, Clone)]
pub struct TrajectoryArgs {
    #[command(flatten)]
    pub profile: ProfileArgs,
    /// Mixing weights x1,x2,x3.
    #[arg(long, value_parser = parse_triple, default_value = "0,0,1")]
    pub weights: [f64; 3],
    #[arg(long, value_parser = parse_real)]
    pub horizon: Option<f64>,
    /// Grid intervals (grid points for `divisibility`).
    #[arg(long)]
    pub steps: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct BlpArgs {
    #[command(flatten)]
    pub trajectory: TrajectoryArgs,
    #[arg(long, value_parser = parse_triple, default_value = "1,0,0", allow_hyphen_values = true)]
    pub va: [f64; 3],
    #[arg(long, value_parser = parse_triple, default_value = "-1,0,0", allow_hyphen_values = true)]
    pub vb: [f64; 3],
}

#[derive(Subcommand, Debug)]
pub enum MeasureCommand {
    /// Invertible sub-triangle of the exponential family.
    Invertible {
        #[arg(long, value_parser = parse_real)]
        m: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Non-Markovian fraction by quadrature.
    Nonmarkov {
        #[arg(long, value_parser = parse_real)]
        m: f64,
        #[arg(long, value_parser = parse_real, default_value = "1e-6")]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte Carlo estimate of the non-Markovian fraction or invertible area.
    Mc {
        #[arg(long, value_parser = parse_real)]
        m: f64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Estimate the invertible area instead of the fraction.
        #[arg(long)]
        area: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    /// Explicit m values; defaults to `--points` values spread over (4/3, 2).
    #[arg(long = "m-values", value_delimiter = ',', value_parser = parse_real)]
    pub m_values: Vec<f64>,
    #[arg(long, default_value_t = 20)]
    pub points: usize,
    #[arg(long, value_parser = parse_real, default_value = "1e-6")]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct RasterArgs {
    #[arg(long, value_parser = parse_real)]
    pub m: f64,
    #[arg(long, default_value_t = 64)]
    pub resolution: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Subcommand, Debug)]
pub enum KernelCommand {
    /// Analytic kernel of a pure dephasing profile.
    Show {
        #[command(flatten)]
        profile: ProfileArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Volterra reconstruction and Laplace check.
    Verify {
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long, value_parser = parse_real, default_value = "1e-3")]
        dt: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Laplace-domain residuals at given abscissae.
    Laplace {
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long, value_delimiter = ',', value_parser = parse_real)]
        s: Vec<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Probe a parametric limit for a semigroup.
    Limit {
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long, value_enum)]
        param: LimitParamArg,
        /// `zero`, `infinity` or a finite target value.
        #[arg(long)]
        direction: String,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LimitParamArg {
    Omega,
    M,
}

#[derive(Args, Debug, Clone)]
pub struct EsdArgs {
    #[command(flatten)]
    pub trajectory: TrajectoryArgs,
    /// Also write the concurrence series (CSV `t,q,concurrence`).
    #[arg(long)]
    pub series: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct EnvArgs {
    #[arg(long, value_parser = parse_real, default_value = "1")]
    pub omega: f64,
    /// Bloch vector of the environment's initial state.
    #[arg(long, value_parser = parse_triple, default_value = "1,0,0", allow_hyphen_values = true)]
    pub env: [f64; 3],
    #[arg(long, value_parser = parse_real, default_value = "10")]
    pub horizon: f64,
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RateKindArg {
    Constant,
    Tangent,
    TangentSquared,
}

#[derive(Args, Debug, Clone)]
pub struct RateArgs {
    #[arg(long = "rate-kind", value_enum, required_unless_present = "rate")]
    pub rate_kind: Option<RateKindArg>,
    /// Rate function document (JSON) instead of --rate-kind.
    #[arg(long, conflicts_with = "rate_kind")]
    pub rate: Option<PathBuf>,
    #[arg(long, value_parser = parse_real, default_value = "1")]
    pub value: f64,
    #[arg(long, value_parser = parse_real, default_value = "1")]
    pub omega: f64,
    #[arg(long, value_parser = parse_real, default_value = "1")]
    pub scale: f64,
    #[arg(long, value_parser = parse_real, default_value = "5")]
    pub horizon: f64,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}
