//! Decay of `E[S11^m S12^{2t}]` for the top-left block of `S = Q Q^T`,
//! `Q` an `n x k` Haar frame, as `n -> infinity` with `k / n = r` fixed.
//!
//! The block has law `B(k/2, (n-k)/2; I_2)`, so every value here is an exact
//! evaluation of [`crate::closed_form::moment_xz`]. Taking the factor-wise
//! limit of that formula with `alpha = r n / 2`, `beta = (1-r) n / 2` gives
//!
//! ```text
//! E[S11^m S12^{2t}] ~ (2t-1)!! (1-r)^t r^(t+m) n^(-t)
//! ```
//!
//! A different constant, `(2t-1)!!/2^t * r^t (1-t)^(t+m)`, also circulates for
//! this limit. It is reported next to the numerical limit for comparison; it
//! vanishes at `t = 1` and is negative for `t >= 2` with `t + m` odd, so it
//! cannot be the leading coefficient.

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::closed_form::moment_xz;
use crate::combinatorics::odd_double_factorial;
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};
use crate::types::BetaParams;

#[derive(Debug, Clone, PartialEq)]
pub struct DecayStudy {
    pub m: u32,
    pub t: u32,
    pub ratio: Rational,
    pub n_values: Vec<u64>,
}

impl DecayStudy {
    pub fn new(m: u32, t: u32, ratio: Rational, n_values: Vec<u64>) -> Result<Self> {
        if !(ratio.is_positive() && ratio < Rational::one()) {
            return Err(Error::InvalidStudy(format!(
                "ratio {ratio} must lie in (0, 1)"
            )));
        }
        if n_values.is_empty() {
            return Err(Error::InvalidStudy("no n values".into()));
        }
        if n_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidStudy(
                "n values must be strictly increasing".into(),
            ));
        }
        let study = Self {
            m,
            t,
            ratio,
            n_values,
        };
        for &n in &study.n_values {
            study.frame_size(n)?;
        }
        Ok(study)
    }

    /// `n = n_min, 2 n_min, 4 n_min, ...` up to `n_max`.
    pub fn doubling(m: u32, t: u32, ratio: Rational, n_min: u64, n_max: u64) -> Result<Self> {
        if n_min == 0 || n_min > n_max {
            return Err(Error::InvalidStudy(format!(
                "need 0 < n_min <= n_max (got {n_min}, {n_max})"
            )));
        }
        let mut n_values = Vec::new();
        let mut n = n_min;
        while n <= n_max {
            n_values.push(n);
            n = match n.checked_mul(2) {
                Some(next) => next,
                None => break,
            };
        }
        Self::new(m, t, ratio, n_values)
    }

    /// `k = r n`, required to be an even integer with `k >= 2`, `n - k >= 2`.
    pub fn frame_size(&self, n: u64) -> Result<u64> {
        let k = self.ratio.clone() * Rational::from_u128(u128::from(n));
        if !k.is_integer() {
            return Err(Error::InvalidStudy(format!(
                "ratio * n = {k} is not an integer at n = {n}"
            )));
        }
        let k = k.to_integer().to_u64().expect("0 < k < n");
        if !k.is_multiple_of(2) {
            return Err(Error::InvalidStudy(format!("k = {k} is odd at n = {n}")));
        }
        if k < 2 || n < k + 2 {
            return Err(Error::InvalidStudy(format!(
                "need k >= 2 and n - k >= 2 (got n = {n}, k = {k})"
            )));
        }
        Ok(k)
    }

    /// `B(k/2, (n-k)/2)` in exact arithmetic.
    pub fn params_at(&self, n: u64) -> Result<BetaParams<Rational>> {
        let k = self.frame_size(n)?;
        let half = |v: u64| Rational::from_ratio(v as i64, 2);
        BetaParams::new(half(k), half(n - k))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayRow {
    pub n: u64,
    pub k: u64,
    pub value: Rational,
}

pub fn decay_table(study: &DecayStudy) -> Result<Vec<DecayRow>> {
    study
        .n_values
        .iter()
        .map(|&n| {
            let params = study.params_at(n)?;
            Ok(DecayRow {
                n,
                k: study.frame_size(n)?,
                value: moment_xz(&params, study.m, study.t),
            })
        })
        .collect()
}

/// Least-squares slope of `ln(value)` against `ln(n)`.
pub fn fit_decay_exponent(table: &[DecayRow]) -> Result<f64> {
    if table.len() < 3 {
        return Err(Error::InvalidFit(format!("got {} rows", table.len())));
    }
    let mut points = Vec::with_capacity(table.len());
    for row in table {
        if !row.value.is_positive() {
            return Err(Error::InvalidFit(format!(
                "value {} at n = {}",
                row.value, row.n
            )));
        }
        points.push(((row.n as f64).ln(), row.value.as_f64().ln()));
    }
    let len = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / len;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / len;
    let sxy: f64 = points
        .iter()
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mean_x).powi(2)).sum();
    Ok(sxy / sxx)
}

fn scaled(row: &DecayRow, t: u32) -> Rational {
    let n = Rational::from_u128(u128::from(row.n));
    (0..t).fold(row.value.clone(), |acc, _| acc * n.clone())
}

/// Richardson extrapolation of `value * n^t` from the two largest `n`,
/// assuming `value * n^t = C + D / n + O(n^-2)`.
pub fn extrapolated_coefficient(table: &[DecayRow], t: u32) -> Result<Rational> {
    match table {
        [] => Err(Error::InvalidFit("empty table".into())),
        [only] => Ok(scaled(only, t)),
        [.., lo, hi] => {
            let (n_lo, n_hi) = (
                Rational::from_u128(u128::from(lo.n)),
                Rational::from_u128(u128::from(hi.n)),
            );
            let (c_lo, c_hi) = (scaled(lo, t), scaled(hi, t));
            Ok((n_hi.clone() * c_hi - n_lo.clone() * c_lo) / (n_hi - n_lo))
        }
    }
}

/// Numerically determined `C` in `E ~ C n^-t`.
pub fn leading_coefficient_empirical(study: &DecayStudy) -> Result<f64> {
    let table = decay_table(study)?;
    Ok(extrapolated_coefficient(&table, study.t)?.as_f64())
}

fn rational_pow(base: &Rational, exp: u32) -> Rational {
    (0..exp).fold(Rational::one(), |acc, _| acc * base.clone())
}

/// `(2t-1)!! (1-r)^t r^(t+m)`, the factor-wise limit of the closed form.
pub fn analytic_coefficient(m: u32, t: u32, ratio: &Rational) -> Rational {
    let one = Rational::one();
    odd_double_factorial::<Rational>(t)
        * rational_pow(&(one - ratio.clone()), t)
        * rational_pow(ratio, t + m)
}

/// `(2t-1)!!/2^t * r^t (1-t)^(t+m)`, the alternative constant quoted for
/// this limit; kept only for side-by-side reporting.
pub fn quoted_coefficient(m: u32, t: u32, ratio: &Rational) -> Rational {
    let one_minus_t = Rational::one() - Rational::from_i64(i64::from(t));
    odd_double_factorial::<Rational>(t) / rational_pow(&Rational::from_i64(2), t)
        * rational_pow(ratio, t)
        * rational_pow(&one_minus_t, t + m)
}

/// Everything [`leading_coefficient_empirical`] knows, side by side.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientReport {
    pub table: Vec<DecayRow>,
    pub slope: Option<f64>,
    /// `value * n^t` at the largest `n`, no extrapolation.
    pub scaled_at_largest: f64,
    pub empirical: f64,
    pub analytic: Rational,
    pub quoted: Rational,
}

impl CoefficientReport {
    /// `|empirical / analytic - 1|`; infinite if the analytic limit is 0.
    pub fn relative_gap(&self) -> f64 {
        let analytic = self.analytic.as_f64();
        if analytic == 0.0 {
            f64::INFINITY
        } else {
            (self.empirical / analytic - 1.0).abs()
        }
    }

    /// Whether the quoted constant agrees with the empirical limit to `tol`.
    pub fn quoted_matches(&self, tol: f64) -> bool {
        let quoted = self.quoted.as_f64();
        if quoted.is_zero() {
            return self.empirical.abs() <= tol;
        }
        (self.empirical / quoted - 1.0).abs() <= tol
    }
}

pub fn coefficient_report(study: &DecayStudy) -> Result<CoefficientReport> {
    let table = decay_table(study)?;
    let slope = if table.len() >= 3 {
        Some(fit_decay_exponent(&table)?)
    } else {
        None
    };
    let largest = table.last().expect("study has n values");
    Ok(CoefficientReport {
        scaled_at_largest: scaled(largest, study.t).as_f64(),
        empirical: extrapolated_coefficient(&table, study.t)?.as_f64(),
        analytic: analytic_coefficient(study.m, study.t, &study.ratio),
        quoted: quoted_coefficient(study.m, study.t, &study.ratio),
        slope,
        table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn study(m: u32, t: u32) -> DecayStudy {
        DecayStudy::doubling(m, t, q(1, 2), 40, 1280).unwrap()
    }

    #[test]
    fn study_validation() {
        assert_eq!(study(0, 1).n_values, vec![40, 80, 160, 320, 640, 1280]);
        assert!(DecayStudy::new(0, 1, q(1, 2), vec![40, 40]).is_err());
        assert!(DecayStudy::new(0, 1, q(1, 1), vec![40]).is_err());
        assert!(DecayStudy::new(0, 1, q(0, 1), vec![40]).is_err());
        // k = 3 is odd
        assert!(DecayStudy::new(0, 1, q(1, 2), vec![6]).is_err());
        // k = 10/3 is not an integer
        assert!(DecayStudy::new(0, 1, q(1, 3), vec![10]).is_err());
        // n - k = 0
        assert!(DecayStudy::new(0, 1, q(1, 2), vec![2]).is_err());
        assert!(DecayStudy::doubling(0, 1, q(1, 2), 100, 50).is_err());
        assert!(DecayStudy::new(0, 1, q(1, 2), vec![8]).is_ok());
    }

    #[test]
    fn table_examples() {
        let s = DecayStudy::new(0, 1, q(1, 2), vec![8, 16]).unwrap();
        let rows = decay_table(&s).unwrap();
        assert_eq!(rows[0].value, q(1, 35));
        assert_eq!(rows[0].k, 4);
        for row in decay_table(&study(0, 0)).unwrap() {
            assert_eq!(row.value, q(1, 1));
        }
        for row in decay_table(&study(1, 0)).unwrap() {
            assert_eq!(row.value, q(1, 2));
        }
    }

    #[test]
    fn slope_examples() {
        let s1 = fit_decay_exponent(&decay_table(&study(0, 1)).unwrap()).unwrap();
        assert!((s1 + 1.0).abs() < 0.05, "{s1}");
        let s2 = fit_decay_exponent(&decay_table(&study(0, 2)).unwrap()).unwrap();
        assert!((s2 + 2.0).abs() < 0.1, "{s2}");
        let flat: Vec<DecayRow> = [10, 20, 40]
            .iter()
            .map(|&n| DecayRow {
                n,
                k: 2,
                value: q(3, 7),
            })
            .collect();
        assert!(fit_decay_exponent(&flat).unwrap().abs() < 1e-15);
        assert!(fit_decay_exponent(&flat[..2]).is_err());
        let mut bad = flat.clone();
        bad[1].value = q(0, 1);
        assert!(fit_decay_exponent(&bad).is_err());
    }

    #[test]
    fn coefficient_examples() {
        let r = coefficient_report(&study(0, 1)).unwrap();
        assert_eq!(r.analytic, q(1, 4));
        assert!((r.empirical - 0.25).abs() < 0.02 * 0.25);
        assert!((r.scaled_at_largest - 0.25).abs() < 0.02 * 0.25);
        assert_eq!(r.quoted, q(0, 1));
        assert!(!r.quoted_matches(0.02));

        let r = coefficient_report(&study(1, 1)).unwrap();
        assert_eq!(r.analytic, q(1, 8));
        assert!(r.relative_gap() < 0.02);
        assert!((leading_coefficient_empirical(&study(1, 1)).unwrap() - 0.125).abs() < 0.0025);
    }

    #[test]
    fn coefficient_consistency_grid() {
        for m in 0..=2 {
            for t in 0..=2 {
                let r = coefficient_report(&study(m, t)).unwrap();
                assert!(r.relative_gap() < 0.02, "m={m} t={t}: {r:?}");
            }
        }
    }

    #[test]
    fn ratio_sweep_peaks_inside() {
        for t in 1..=2 {
            let coeffs: Vec<f64> = (1..16)
                .map(|j| {
                    let s = DecayStudy::new(1, t, q(j, 16), vec![320, 640, 1280, 2560]).unwrap();
                    leading_coefficient_empirical(&s).unwrap()
                })
                .collect();
            let (arg, max) =
                coeffs
                    .iter()
                    .enumerate()
                    .fold((0, f64::MIN), |b, (i, &c)| if c > b.1 { (i, c) } else { b });
            assert!(arg > 0 && arg < coeffs.len() - 1);
            assert!(coeffs[..=arg].windows(2).all(|w| w[0] < w[1]), "{coeffs:?}");
            assert!(coeffs[arg..].windows(2).all(|w| w[0] > w[1]), "{coeffs:?}");

            for j in [1, 127] {
                let s = DecayStudy::new(1, t, q(j, 128), vec![2560, 5120, 10240]).unwrap();
                let c = leading_coefficient_empirical(&s).unwrap();
                assert!(c > 0.0 && c < 0.1 * max, "t={t} r={j}/128: {c} vs {max}");
            }
        }
    }
}
