use clap::{Args, Parser, Subcommand, ValueEnum};

/// Mixed moments E[X^m Y^r Z^s] of the 2x2 matrix-variate Beta distribution.
#[derive(Debug, Parser)]
#[command(name = "matbeta", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one moment in closed form.
    Moment(MomentArgs),
    /// Evaluate moments over a grid of exponents.
    Table(TableArgs),
    /// Cross-check the engines against each other and the numerical oracles.
    Verify(VerifyArgs),
    /// Draw random matrices and print (x, y, z).
    Sample(SampleArgs),
    /// Decay of the projection-block moments as the dimension grows.
    Asymptotics(AsymptoticsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TextFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct ShapeArgs {
    /// p/q or decimal, > 1/2.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: String,
    /// p/q or decimal, > 1/2.
    #[arg(long, allow_hyphen_values = true)]
    pub beta: String,
}

#[derive(Debug, Clone, Args)]
pub struct MomentArgs {
    #[command(flatten)]
    pub shape: ShapeArgs,
    /// Power of X.
    #[arg(long, default_value_t = 0)]
    pub m: u32,
    /// Power of Y.
    #[arg(long, default_value_t = 0)]
    pub r: u32,
    /// Power of Z.
    #[arg(long, default_value_t = 0)]
    pub z: u32,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    #[arg(long, value_enum, default_value_t = TextFormat::Text)]
    pub format: TextFormat,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    #[command(flatten)]
    pub shape: ShapeArgs,
    /// Powers of X: comma list of n, a..b or a..b:step.
    #[arg(long, default_value = "0")]
    pub m: String,
    /// Powers of Y, same syntax.
    #[arg(long, default_value = "0")]
    pub r: String,
    /// Powers of Z, same syntax.
    #[arg(long, default_value = "0")]
    pub z: String,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    pub format: TableFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Exact,
    Quadrature,
    Montecarlo,
    All,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    /// Largest power of X and Y. Defaults: exact 6, quadrature 3, montecarlo 2.
    #[arg(long)]
    pub max_order: Option<u32>,
    /// Largest t in Z^(2t). Defaults: exact --max-order, quadrature 2, montecarlo 1.
    #[arg(long)]
    pub max_t: Option<u32>,
    /// Restrict to one parameter pair (both --alpha and --beta required).
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    /// Monte Carlo draws per estimate.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    /// Draws for the marginal-law KS test.
    #[arg(long, default_value_t = 100_000)]
    pub ks_samples: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Frame for the projection sampler; defaults to n = 2(alpha + beta), k = 2 alpha.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Quadrature cells per axis.
    #[arg(long, default_value_t = 64)]
    pub cells: u32,
    /// Gauss-Legendre points per cell and axis.
    #[arg(long, default_value_t = 2)]
    pub points: u32,
    /// Absolute tolerance floor for quadrature checks.
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
    /// Monte Carlo acceptance threshold in standard errors.
    #[arg(long, default_value_t = 5.0)]
    pub sigmas: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SamplerKind {
    Wishart,
    Stiefel,
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    #[arg(long, value_enum)]
    pub sampler: SamplerKind,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    /// Ambient dimension of the frame.
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of frame columns.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    pub count: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    pub format: TableFormat,
}

#[derive(Debug, Clone, Args)]
pub struct AsymptoticsArgs {
    /// Power of the diagonal entry.
    #[arg(long, default_value_t = 0)]
    pub m: u32,
    /// Half the power of the off-diagonal entry.
    #[arg(long, default_value_t = 1)]
    pub t: u32,
    /// k / n as p/q.
    #[arg(long, default_value = "1/2", allow_hyphen_values = true)]
    pub ratio: String,
    #[arg(long, default_value_t = 40)]
    pub n_min: u64,
    #[arg(long, default_value_t = 1280)]
    pub n_max: u64,
    #[arg(long, value_enum, default_value_t = TextFormat::Text)]
    pub format: TextFormat,
}
