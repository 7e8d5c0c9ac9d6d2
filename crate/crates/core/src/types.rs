//! Domain types shared by the engines, the oracles and the CLI.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Parameters `(alpha, beta)` of `B(alpha, beta; I_2)`, both strictly above 1/2.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaParams<S> {
    alpha: S,
    beta: S,
}

impl<S: Scalar> BetaParams<S> {
    pub fn new(alpha: S, beta: S) -> Result<Self> {
        // `>` is false for NaN, so NaN parameters are rejected too.
        if alpha > S::half() && beta > S::half() {
            Ok(Self { alpha, beta })
        } else {
            Err(Error::InvalidParams {
                alpha: format!("{alpha:?}"),
                beta: format!("{beta:?}"),
            })
        }
    }

    pub fn alpha(&self) -> &S {
        &self.alpha
    }

    pub fn beta(&self) -> &S {
        &self.beta
    }

    /// `alpha + beta`
    pub fn total(&self) -> S {
        self.alpha.clone() + self.beta.clone()
    }

    /// `(alpha + k, beta)`; stays valid because alpha only grows.
    pub fn shift_alpha(&self, k: u32) -> Self {
        Self {
            alpha: self.alpha.clone() + S::from_i64(i64::from(k)),
            beta: self.beta.clone(),
        }
    }

    /// `(alpha, beta + k)`
    pub fn shift_beta(&self, k: u32) -> Self {
        Self {
            alpha: self.alpha.clone(),
            beta: self.beta.clone() + S::from_i64(i64::from(k)),
        }
    }

    /// `(beta, alpha)`, the law of `I - W`.
    pub fn swapped(&self) -> Self {
        Self {
            alpha: self.beta.clone(),
            beta: self.alpha.clone(),
        }
    }

    pub fn to_f64(&self) -> BetaParams<f64> {
        BetaParams {
            alpha: self.alpha.as_f64(),
            beta: self.beta.as_f64(),
        }
    }
}

/// Exponents of the monomial `X^m Y^r Z^z_pow`.
///
/// The raw Z exponent is stored so odd powers stay representable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MomentIndex {
    pub m: u32,
    pub r: u32,
    pub z_pow: u32,
}

impl MomentIndex {
    pub const fn new(m: u32, r: u32, z_pow: u32) -> Self {
        Self { m, r, z_pow }
    }

    /// `z_pow / 2`, defined only for even powers.
    pub fn t(&self) -> Option<u32> {
        self.z_pow.is_multiple_of(2).then_some(self.z_pow / 2)
    }

    /// Same monomial with X and Y exchanged.
    pub fn swapped(&self) -> Self {
        Self::new(self.r, self.m, self.z_pow)
    }

    /// Evaluates the monomial at a point.
    pub fn eval(&self, w: &Sym2Matrix<f64>) -> f64 {
        w.x.powi(self.m as i32) * w.y.powi(self.r as i32) * w.z.powi(self.z_pow as i32)
    }

    /// All indices with `m <= max_m`, `r <= max_r`, `z_pow <= max_z`, in
    /// lexicographic `(m, r, z_pow)` order.
    pub fn grid(max_m: u32, max_r: u32, max_z: u32) -> Vec<Self> {
        let mut out = Vec::new();
        for m in 0..=max_m {
            for r in 0..=max_r {
                for z in 0..=max_z {
                    out.push(Self::new(m, r, z));
                }
            }
        }
        out
    }
}

impl fmt::Display for MomentIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X^{} Y^{} Z^{}", self.m, self.r, self.z_pow)
    }
}

/// Symmetric 2x2 matrix `[[x, z], [z, y]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sym2Matrix<T = f64> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> Sym2Matrix<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    /// `det(w) = xy - z^2`
    pub fn det(&self) -> T {
        self.x.clone() * self.y.clone() - self.z.clone() * self.z.clone()
    }

    /// `det(I - w) = (1-x)(1-y) - z^2`
    pub fn det_complement(&self) -> T {
        (T::one() - self.x.clone()) * (T::one() - self.y.clone()) - self.z.clone() * self.z.clone()
    }

    /// `I - w`
    pub fn complement(&self) -> Self {
        Self::new(
            T::one() - self.x.clone(),
            T::one() - self.y.clone(),
            -self.z.clone(),
        )
    }

    /// Leading-minor test for `w` positive definite.
    pub fn is_positive_definite(&self) -> bool {
        self.x > T::zero() && self.det() > T::zero()
    }

    /// True iff both `w` and `I - w` are positive definite.
    pub fn in_domain(&self) -> bool {
        self.is_positive_definite() && self.complement().is_positive_definite()
    }
}

/// Free-function form of [`Sym2Matrix::in_domain`].
pub fn in_domain<T: Scalar>(w: &Sym2Matrix<T>) -> bool {
    w.in_domain()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateMethod {
    MonteCarlo,
    Quadrature,
}

impl fmt::Display for EstimateMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EstimateMethod::MonteCarlo => "monte_carlo",
            EstimateMethod::Quadrature => "quadrature",
        })
    }
}

/// A numerically estimated moment with its error bar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEstimate {
    pub value: f64,
    /// Standard error for Monte Carlo, grid-refinement discrepancy for quadrature.
    pub std_error: f64,
    pub n_samples_or_cells: u64,
    pub method: EstimateMethod,
}

impl MomentEstimate {
    /// Number of error bars separating the estimate from `target`.
    ///
    /// Infinite when the error bar is zero and the values differ.
    pub fn z_score(&self, target: f64) -> f64 {
        let diff = (self.value - target).abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / self.std_error
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use proptest::prelude::*;

    #[test]
    fn params_reject_half_and_below() {
        assert!(BetaParams::new(0.5, 1.0).is_err());
        assert!(BetaParams::new(1.0, 0.5).is_err());
        assert!(BetaParams::new(f64::NAN, 1.0).is_err());
        assert!(BetaParams::new(0.51, 0.51).is_ok());
        let half = Rational::from_ratio(1, 2);
        assert!(BetaParams::new(half.clone(), Rational::from_i64(2)).is_err());
        let p = BetaParams::new(Rational::from_ratio(3, 4), Rational::from_ratio(7, 2)).unwrap();
        assert_eq!(p.total(), Rational::from_ratio(17, 4));
        assert_eq!(p.shift_alpha(2).alpha(), &Rational::from_ratio(11, 4));
        assert_eq!(p.shift_beta(1).beta(), &Rational::from_ratio(9, 2));
        assert_eq!(p.swapped().alpha(), &Rational::from_ratio(7, 2));
    }

    #[test]
    fn moment_index_t() {
        assert_eq!(MomentIndex::new(1, 2, 4).t(), Some(2));
        assert_eq!(MomentIndex::new(1, 2, 3).t(), None);
        assert_eq!(MomentIndex::grid(1, 1, 2).len(), 12);
        assert!(MomentIndex::grid(2, 0, 0)
            .iter()
            .all(|i| i.r == 0 && i.z_pow == 0));
    }

    #[test]
    fn domain_examples() {
        assert!(in_domain(&Sym2Matrix::new(0.5, 0.5, 0.0)));
        assert!(!in_domain(&Sym2Matrix::new(0.5, 0.5, 0.6)));
        assert!(!in_domain(&Sym2Matrix::new(1.2, 0.5, 0.0)));
        // PD but I - w is not: z^2 = 0.09 > (1-x)(1-y) = 0.01
        assert!(!in_domain(&Sym2Matrix::new(0.9, 0.9, 0.3)));
        // boundary is excluded
        assert!(!in_domain(&Sym2Matrix::new(0.5, 0.5, 0.5)));
    }

    #[test]
    fn domain_works_in_exact_arithmetic() {
        let w = Sym2Matrix::new(
            Rational::half(),
            Rational::half(),
            Rational::from_ratio(1, 3),
        );
        assert_eq!(w.det(), Rational::from_ratio(5, 36));
        assert_eq!(w.det_complement(), Rational::from_ratio(5, 36));
        assert!(w.in_domain());
        let edge = Sym2Matrix::new(Rational::half(), Rational::half(), Rational::half());
        assert!(!edge.in_domain());
    }

    #[test]
    fn z_score() {
        let e = MomentEstimate {
            value: 1.0,
            std_error: 0.0,
            n_samples_or_cells: 10,
            method: EstimateMethod::MonteCarlo,
        };
        assert_eq!(e.z_score(1.0), 0.0);
        assert!(e.z_score(0.9).is_infinite());
    }

    proptest! {
        #[test]
        fn domain_symmetries(x in -0.2f64..1.2, y in -0.2f64..1.2, z in -0.7f64..0.7) {
            let w = Sym2Matrix::new(x, y, z);
            let inside = w.in_domain();
            prop_assert_eq!(inside, Sym2Matrix::new(y, x, z).in_domain());
            prop_assert_eq!(inside, Sym2Matrix::new(x, y, -z).in_domain());
            if inside {
                prop_assert!(Sym2Matrix::new(1.0 - x, 1.0 - y, z).in_domain());
                prop_assert!(x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0);
                prop_assert!(z * z < (x * y).min((1.0 - x) * (1.0 - y)));
                prop_assert!(z * z < 0.25);
            }
        }
    }
}
