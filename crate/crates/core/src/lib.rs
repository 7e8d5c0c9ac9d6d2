//! Mixed moments `E[X^m Y^r Z^s]` of the 2x2 matrix-variate Beta distribution
//! `B(alpha, beta; I_2)`, where `W = [[X, Z], [Z, Y]]` has density
//! proportional to `det(W)^(alpha-3/2) det(I-W)^(beta-3/2)` on `0 < W < I`.
//!
//! Two analytic engines compute every moment:
//!
//! * [`closed_form`] evaluates the finite product/sum formulas directly;
//! * [`recursion`] chains the determinant shift identities and never looks
//!   at those formulas.
//!
//! Both are generic over [`Scalar`], so in [`Rational`] mode their outputs
//! can be compared bit for bit. Two numerical oracles check them
//! independently: tensor Gauss-Legendre quadrature of the density
//! ([`quadrature`]) and Monte Carlo sampling ([`sampling`]) by a Wishart
//! ratio and by Haar-random projections. [`asymptotics`] studies the decay
//! of the projection-block moments as the ambient dimension grows.

pub mod asymptotics;
pub mod closed_form;
pub mod combinatorics;
pub mod density;
pub mod error;
pub mod quadrature;
pub mod recursion;
pub mod sampling;
pub mod scalar;
pub mod stats;
pub mod types;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};
pub use types::{in_domain, BetaParams, EstimateMethod, MomentEstimate, MomentIndex, Sym2Matrix};

/// Exact-arithmetic parameters.
pub type ExactParams = BetaParams<Rational>;
/// Double-precision parameters.
pub type FloatParams = BetaParams<f64>;
/// Single-precision parameters.
pub type F32Params = BetaParams<f32>;
