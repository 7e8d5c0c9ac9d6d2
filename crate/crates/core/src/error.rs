use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("alpha and beta must both exceed 1/2 (got alpha = {alpha}, beta = {beta})")]
    InvalidParams { alpha: String, beta: String },

    #[error(
        "closed-form mixed moment requires m >= r (got m = {m}, r = {r}); swap the exponents first"
    )]
    ExponentOrder { m: u32, r: u32 },

    #[error("Z-reduction step requires t >= 1")]
    ZeroReductionStep,

    #[error("log multivariate gamma requires a > 1/2 (got {0})")]
    MultigammaDomain(f64),

    #[error("quadrature oracle requires alpha, beta >= 2 (got alpha = {alpha}, beta = {beta})")]
    QuadratureParams { alpha: f64, beta: f64 },

    #[error("invalid quadrature spec: {0}")]
    InvalidQuadratureSpec(String),

    #[error("Wishart degrees of freedom must exceed 1 (got {0})")]
    WishartDof(f64),

    #[error("Stiefel block needs k >= 2 and n - k >= 2 (got n = {n}, k = {k})")]
    StiefelDims { n: usize, k: usize },

    #[error("sampler produced no valid draw after {0} attempts")]
    SamplerExhausted(u32),

    #[error("Monte Carlo estimate needs at least 2 samples (got {0})")]
    TooFewSamples(u64),

    #[error("invalid decay study: {0}")]
    InvalidStudy(String),

    #[error("decay fit needs at least 3 rows with positive values: {0}")]
    InvalidFit(String),
}
