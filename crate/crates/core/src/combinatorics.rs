//! Rising factorials, odd double factorials and binomials.

use crate::scalar::Scalar;

/// Rising factorial `a (a+1) ... (a+n-1)`; the empty product is 1.
pub fn pochhammer<S: Scalar>(a: &S, n: u32) -> S {
    let mut acc = S::one();
    let mut term = a.clone();
    for _ in 0..n {
        acc = acc * term.clone();
        term = term + S::one();
    }
    acc
}

/// `(2t-1)!! = 1 * 3 * ... * (2t-1)`, with `(-1)!! = 1`.
pub fn odd_double_factorial<S: Scalar>(t: u32) -> S {
    (1..=i64::from(t)).fold(S::one(), |acc, j| acc * S::from_i64(2 * j - 1))
}

/// `C(n, k)` by the multiplicative recurrence `C(n, i+1) = C(n, i) (n-i) / (i+1)`,
/// which stays integral at every step.
///
/// Panics on overflow of `u128`, which needs `n` well beyond 100.
pub fn binomial(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c
            .checked_mul(u128::from(n - i))
            .expect("binomial coefficient overflows u128")
            / u128::from(i + 1);
    }
    c
}
