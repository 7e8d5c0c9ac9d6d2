//! Density of `B(alpha, beta; I_2)` and its normalizing constant.
//!
//! The density on `{w : 0 < w < I}` is
//!
//! ```text
//! p(w) = det(w)^(alpha - 3/2) * det(I - w)^(beta - 3/2) / B_2(alpha, beta)
//! B_2(a, b) = G_2(a) G_2(b) / G_2(a + b),   G_2(a) = sqrt(pi) G(a) G(a - 1/2)
//! ```
//!
//! `alpha` is attached to `det(w)`: that is the assignment under which
//! `E[X] = alpha / (alpha + beta)` and multiplying by `det(w)` shifts alpha.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::types::{BetaParams, Sym2Matrix};

/// Arguments below this are shifted up with `G(x) = G(x+1) / x` before the
/// asymptotic series is applied.
const STIRLING_CUTOFF: f64 = 15.0;

/// `B_{2k} / (2k (2k-1))` for k = 1..=8.
const STIRLING_COEFFS: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// `ln G(x)` for `x > 0`.
///
/// Stirling series with eight Bernoulli terms at `x >= 15`; the truncation
/// error there is below `|B_18| / (306 x^17) < 1e-20`. Smaller arguments are
/// shifted up by the recurrence, accumulating the product in one log.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0, "ln_gamma needs a positive argument");
    let mut shift = 1.0;
    let mut z = x;
    while z < STIRLING_CUTOFF {
        shift *= z;
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut pow = inv;
    for c in STIRLING_COEFFS {
        series += c * pow;
        pow *= inv2;
    }
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series - shift.ln()
}

/// `ln G_2(a) = ln(pi)/2 + ln G(a) + ln G(a - 1/2)`, for `a > 1/2`.
pub fn log_multigamma2(a: f64) -> Result<f64> {
    if a.is_nan() || a <= 0.5 {
        return Err(Error::MultigammaDomain(a));
    }
    Ok(0.5 * PI.ln() + ln_gamma(a) + ln_gamma(a - 0.5))
}

/// `ln B_2(alpha, beta)`
pub fn log_beta2(p: &BetaParams<f64>) -> Result<f64> {
    Ok(log_multigamma2(*p.alpha())? + log_multigamma2(*p.beta())? - log_multigamma2(p.total())?)
}

/// Unnormalized density `det(w)^(alpha-3/2) det(I-w)^(beta-3/2)`, 0 off the domain.
pub fn unnormalized_density(p: &BetaParams<f64>, w: &Sym2Matrix<f64>) -> f64 {
    if !w.in_domain() {
        return 0.0;
    }
    w.det().powf(p.alpha() - 1.5) * w.det_complement().powf(p.beta() - 1.5)
}

/// Normalized density; 0 outside `0 < w < I`.
pub fn density(p: &BetaParams<f64>, w: &Sym2Matrix<f64>) -> f64 {
    let u = unnormalized_density(p, w);
    if u == 0.0 {
        return 0.0;
    }
    let log_norm = log_beta2(p).expect("params validated > 1/2");
    u * (-log_norm).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(a: f64, b: f64) -> BetaParams<f64> {
        BetaParams::new(a, b).unwrap()
    }

    #[test]
    fn ln_gamma_known_values() {
        assert_relative_eq!(ln_gamma(0.5), 0.5 * PI.ln(), max_relative = 1e-14);
        assert!(ln_gamma(1.0).abs() < 1e-14);
        assert!(ln_gamma(2.0).abs() < 1e-14);
        let mut fact = 1.0f64;
        for n in 2..30u32 {
            fact *= f64::from(n - 1);
            assert_relative_eq!(
                ln_gamma(f64::from(n)),
                fact.ln(),
                epsilon = 1e-14,
                max_relative = 1e-14
            );
        }
        // G(3/2) = sqrt(pi)/2
        assert_relative_eq!(ln_gamma(1.5), (PI.sqrt() / 2.0).ln(), max_relative = 1e-13);
    }

    #[test]
    fn ln_gamma_matches_reference_over_range() {
        let mut x = 0.5;
        while x < 1.0e4 {
            let reference = statrs::function::gamma::ln_gamma(x);
            let ours = ln_gamma(x);
            let scale = reference.abs().max(1.0);
            assert!(
                (ours - reference).abs() <= 1e-13 * scale,
                "x = {x}: {ours} vs {reference}"
            );
            x *= 1.037;
        }
    }

    #[test]
    fn multigamma_examples() {
        assert_relative_eq!(
            log_multigamma2(2.0).unwrap(),
            (PI / 2.0).ln(),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            log_multigamma2(1.5).unwrap(),
            (PI / 2.0).ln(),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            log_multigamma2(4.0).unwrap(),
            (45.0 * PI / 4.0).ln(),
            max_relative = 1e-14
        );
        assert_eq!(log_multigamma2(0.5), Err(Error::MultigammaDomain(0.5)));
        assert!(log_multigamma2(f64::NAN).is_err());
    }

    #[test]
    fn beta2_examples() {
        let b22 = log_beta2(&params(2.0, 2.0)).unwrap();
        assert_relative_eq!(b22, (PI / 45.0).ln(), max_relative = 1e-14);
        assert_relative_eq!(b22.exp(), 0.069_813_170_079_773_18, max_relative = 1e-13);
        assert_relative_eq!(
            log_beta2(&params(2.5, 0.75)).unwrap(),
            log_beta2(&params(0.75, 2.5)).unwrap(),
            max_relative = 1e-15
        );
        let b23 = log_beta2(&params(2.0, 3.0)).unwrap();
        let direct = log_multigamma2(2.0).unwrap() + log_multigamma2(3.0).unwrap()
            - log_multigamma2(5.0).unwrap();
        assert_eq!(b23, direct);
    }

    #[test]
    fn density_examples() {
        let mid = Sym2Matrix::new(0.5, 0.5, 0.0);
        let p = params(1.5, 1.5);
        let uniform = (-log_beta2(&p).unwrap()).exp();
        assert_relative_eq!(density(&p, &mid), uniform, max_relative = 1e-15);
        assert_relative_eq!(
            density(&p, &Sym2Matrix::new(0.2, 0.7, 0.1)),
            uniform,
            max_relative = 1e-15
        );

        assert_eq!(
            density(&params(2.0, 2.0), &Sym2Matrix::new(0.5, 0.5, 0.6)),
            0.0
        );
        assert_relative_eq!(
            density(&params(2.0, 2.0), &mid),
            45.0 / (4.0 * PI),
            max_relative = 1e-13
        );
    }

    #[test]
    fn alpha_weights_det_w() {
        // At w = diag(0.8, 0.8), det(w) = 0.64 > det(I - w) = 0.04, so raising
        // alpha must increase the unnormalized density there.
        let w = Sym2Matrix::new(0.8, 0.8, 0.0);
        let low = unnormalized_density(&params(2.0, 2.0), &w);
        let high = unnormalized_density(&params(3.0, 2.0), &w);
        assert_relative_eq!(high / low, 0.64, max_relative = 1e-14);
    }
}
