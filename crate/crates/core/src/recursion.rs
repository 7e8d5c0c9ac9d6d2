//! Moments from shift identities alone.
//!
//! With `A = det(W) = XY - Z^2` and `B = det(I - W) = 1 - X - Y + A`,
//! multiplying the integrand by `A` (resp. `B`) is the same as moving to
//! `(alpha+1, beta)` (resp. `(alpha, beta+1)`) up to a ratio of normalizing
//! constants:
//!
//! ```text
//! E_{a,b}[A f] = a(a-1/2) / ((a+b)(a+b-1/2)) * E_{a+1,b}[f]
//! E_{a,b}[B f] = b(b-1/2) / ((a+b)(a+b-1/2)) * E_{a,b+1}[f]
//! ```
//!
//! This module evaluates every moment by chaining those factors, never
//! touching the closed forms in [`crate::closed_form`], so the two engines
//! can be checked against each other exactly.

use crate::combinatorics::binomial;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::types::{BetaParams, MomentIndex};

/// A multiplicative factor together with the parameters it moves to.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftFactor<S> {
    pub value: S,
    pub shifted_params: BetaParams<S>,
}

fn shift_denominator<S: Scalar>(p: &BetaParams<S>) -> S {
    let total = p.total();
    total.clone() * (total - S::half())
}

/// Factor for `E[A f]`; moves to `(alpha+1, beta)`.
pub fn lemma_factor_a<S: Scalar>(p: &BetaParams<S>) -> ShiftFactor<S> {
    let a = p.alpha().clone();
    ShiftFactor {
        value: a.clone() * (a - S::half()) / shift_denominator(p),
        shifted_params: p.shift_alpha(1),
    }
}

/// Factor for `E[B f]`; moves to `(alpha, beta+1)`.
pub fn lemma_factor_b<S: Scalar>(p: &BetaParams<S>) -> ShiftFactor<S> {
    let b = p.beta().clone();
    ShiftFactor {
        value: b.clone() * (b - S::half()) / shift_denominator(p),
        shifted_params: p.shift_beta(1),
    }
}

/// `E[X]` from taking expectations of `B = 1 - X - Y + A` with `E[X] = E[Y]`:
/// `E[B] = 1 - 2 E[X] + E[A]`.
pub fn marginal_mean_via_lemma<S: Scalar>(p: &BetaParams<S>) -> S {
    let a = lemma_factor_a(p).value;
    let b = lemma_factor_b(p).value;
    (S::one() + a - b) / S::from_i64(2)
}

/// `E[X^m]` as `E_{a,b}[X] * E_{a+1,b}[X] * ... * E_{a+m-1,b}[X]`, each mean
/// coming from [`marginal_mean_via_lemma`].
pub fn marginal_recursive<S: Scalar>(p: &BetaParams<S>, m: u32) -> S {
    (0..m).fold(S::one(), |acc, i| {
        acc * marginal_mean_via_lemma(&p.shift_alpha(i))
    })
}

/// The factor `c` in `E[Z^{2t} X^m] = c * E[Z^{2t-2} X^{m+1}]`:
///
/// ```text
/// c = (t - 1/2)(beta + t - 1) / ((alpha + beta + t - 3/2)(alpha + beta + 2t + m - 1))
/// ```
pub fn reduce_z_step<S: Scalar>(p: &BetaParams<S>, m: u32, t: u32) -> Result<S> {
    if t == 0 {
        return Err(Error::ZeroReductionStep);
    }
    let t_s = S::from_i64(i64::from(t));
    let m_s = S::from_i64(i64::from(m));
    let one = S::one();
    let num = (t_s.clone() - S::half()) * (p.beta().clone() + t_s.clone() - one.clone());
    let den = (p.total() + t_s.clone() - S::from_ratio(3, 2))
        * (p.total() + t_s.clone() + t_s + m_s - one);
    Ok(num / den)
}

/// `E[X^m Z^{2t}]` by `t` reduction steps `(m, t) -> (m+1, t-1)` followed by
/// the marginal moment.
pub fn moment_xz_recursive<S: Scalar>(p: &BetaParams<S>, m: u32, t: u32) -> S {
    let mut acc = S::one();
    let mut power = m;
    for step in (1..=t).rev() {
        acc = acc * reduce_z_step(p, power, step).expect("step >= 1");
        power += 1;
    }
    acc * marginal_recursive(p, power)
}

/// `E[A^k f]` reduces to `prod_{j<k} factor_A(alpha+j, beta) * E_{alpha+k,beta}[f]`.
/// Returns that product and the final parameters.
fn a_power_chain<S: Scalar>(p: &BetaParams<S>, k: u32) -> ShiftFactor<S> {
    let mut value = S::one();
    let mut current = p.clone();
    for _ in 0..k {
        let step = lemma_factor_a(&current);
        value = value * step.value;
        current = step.shifted_params;
    }
    ShiftFactor {
        value,
        shifted_params: current,
    }
}

/// `E[X^m Y^r Z^{2t}]` for `m >= r`, by expanding `X^m Y^r = X^{m-r} (A + Z^2)^r`
/// binomially and reducing each `A^{r-i}` with the A-shift:
///
/// ```text
/// sum_{i=0..r} C(r,i) * E[A^{r-i} X^{m-r} Z^{2(t+i)}]
/// ```
pub fn moment_mixed_recursive<S: Scalar>(p: &BetaParams<S>, m: u32, r: u32, t: u32) -> Result<S> {
    if m < r {
        return Err(Error::ExponentOrder { m, r });
    }
    let mut sum = S::zero();
    for i in 0..=r {
        let chain = a_power_chain(p, r - i);
        let residual = moment_xz_recursive(&chain.shifted_params, m - r, t + i);
        sum = sum + S::from_u128(binomial(r, i)) * chain.value * residual;
    }
    Ok(sum)
}

/// Index dispatcher mirroring [`crate::closed_form::moment`].
pub fn moment_recursive<S: Scalar>(p: &BetaParams<S>, idx: MomentIndex) -> S {
    let Some(t) = idx.t() else {
        return S::zero();
    };
    let (hi, lo) = if idx.m >= idx.r {
        (idx.m, idx.r)
    } else {
        (idx.r, idx.m)
    };
    moment_mixed_recursive(p, hi, lo, t).expect("exponents ordered above")
}
