//! Closed-form mixed moments of `B(alpha, beta; I_2)`.
//!
//! All three formulas are finite products and sums of rising factorials.
//! Ratios of rising factorials are multiplied out factor by factor
//! (`(a+i)/(b+i)`) instead of forming numerator and denominator separately,
//! so float evaluation does not overflow for large exponents while exact
//! evaluation is unaffected.

use crate::combinatorics::{binomial, odd_double_factorial};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::types::{BetaParams, MomentIndex};

/// `prod_{i<n} (a+i)/(b+i)`
fn rising_ratio<S: Scalar>(a: &S, b: &S, n: u32) -> S {
    let mut acc = S::one();
    let (mut num, mut den) = (a.clone(), b.clone());
    for _ in 0..n {
        acc = acc * num.clone() / den.clone();
        num = num + S::one();
        den = den + S::one();
    }
    acc
}

/// `(2t-1)!! / 2^t`, evaluated as `prod_{j=1..t} (j - 1/2)`.
fn half_odd_double_factorial<S: Scalar>(t: u32) -> S {
    (1..=i64::from(t)).fold(S::one(), |acc, j| acc * S::from_ratio(2 * j - 1, 2))
}

fn int<S: Scalar>(n: u32) -> S {
    S::from_i64(i64::from(n))
}

/// `pochhammer(alpha, t+m) / pochhammer(alpha+beta, 2t+m)`
fn alpha_over_total<S: Scalar>(p: &BetaParams<S>, m: u32, t: u32) -> S {
    let total = p.total();
    let mut acc = rising_ratio(p.alpha(), &total, t + m);
    let mut den = total + int(t + m);
    for _ in 0..t {
        acc = acc / den.clone();
        den = den + S::one();
    }
    acc
}

/// `E[X^m] = prod_{i<m} (alpha+i)/(alpha+beta+i)`; X is marginally Beta(alpha, beta).
pub fn moment_marginal<S: Scalar>(p: &BetaParams<S>, m: u32) -> S {
    rising_ratio(p.alpha(), &p.total(), m)
}

/// `E[X^m Z^{2t}]`:
///
/// ```text
/// (2t-1)!!/2^t * prod_{i<t} (beta+i)/(alpha+beta-1/2+i)
///              * (alpha)_{t+m} / (alpha+beta)_{2t+m}
/// ```
pub fn moment_xz<S: Scalar>(p: &BetaParams<S>, m: u32, t: u32) -> S {
    let shifted_total = p.total() - S::half();
    half_odd_double_factorial::<S>(t)
        * rising_ratio(p.beta(), &shifted_total, t)
        * alpha_over_total(p, m, t)
}

/// `E[X^m Y^r Z^{2t}]` for `m >= r`.
///
/// ```text
/// (2t-1)!!/2^t * (beta)_t / (alpha+beta-1/2)_{t+r} * (alpha)_{t+m} / (alpha+beta)_{2t+m}
///   * sum_{i=0..r} C(r,i)/2^i * prod_{j=1..i} (2t-1+2j)
///       * (alpha-1/2)_{r-i} * (beta+t)_i / (alpha+beta+2t+m)_i
/// ```
///
/// Every product is read as acting on the whole parenthesised factor.
/// Callers with `m < r` must swap the exponents first (see [`moment`]).
pub fn moment_mixed<S: Scalar>(p: &BetaParams<S>, m: u32, r: u32, t: u32) -> Result<S> {
    if m < r {
        return Err(Error::ExponentOrder { m, r });
    }
    let half = S::half();
    let shifted_total = p.total() - half.clone();
    let prefactor = half_odd_double_factorial::<S>(t)
        * rising_ratio(p.beta(), &shifted_total, t)
        * alpha_over_total(p, m, t);

    // The remaining 1/(alpha+beta-1/2+t)_r of the prefactor is spread over
    // each term: (alpha-1/2)_{r-i} takes the first r-i factors and the odd
    // product prod_{j=1..i} (t-1/2+j) the last i.
    let alpha_half = p.alpha().clone() - half.clone();
    let base = shifted_total + int(t);
    let beta_t = p.beta().clone() + int(t);
    let total_2tm = p.total() + int(2 * t + m);
    let mut sum = S::zero();
    for i in 0..=r {
        // C(r,i)/2^i * prod_{j=1..i} (2t-1+2j) = C(r,i) * prod_{j=1..i} (t-1/2+j)
        let odd = (1..=i).fold(S::one(), |acc, j| {
            acc * (int::<S>(t + j) - half.clone()) / (base.clone() + int(r - i + j - 1))
        });
        let term = S::from_u128(binomial(r, i))
            * rising_ratio(&alpha_half, &base, r - i)
            * odd
            * rising_ratio(&beta_t, &total_2tm, i);
        sum = sum + term;
    }
    Ok(prefactor * sum)
}

/// `E[X^m Y^r Z^s]` for any index.
///
/// Odd `s` gives 0 (the law is invariant under `Z -> -Z`); otherwise the
/// exponents are ordered so the larger one is passed to [`moment_mixed`]
/// as `m` (the law is invariant under `X <-> Y`).
pub fn moment<S: Scalar>(p: &BetaParams<S>, idx: MomentIndex) -> S {
    let Some(t) = idx.t() else {
        return S::zero();
    };
    let (hi, lo) = if idx.m >= idx.r {
        (idx.m, idx.r)
    } else {
        (idx.r, idx.m)
    };
    moment_mixed(p, hi, lo, t).expect("exponents ordered above")
}

/// `(2t-1)!! / 2^t`, the Gaussian-like prefactor shared by the Z moments.
pub fn z_prefactor<S: Scalar>(t: u32) -> S {
    let two_pow = (0..t).fold(S::one(), |acc, _| acc * S::from_i64(2));
    odd_double_factorial::<S>(t) / two_pow
}
