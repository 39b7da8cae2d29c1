//! Confluent hypergeometric and Laguerre functions.

use crate::error::{PsqmError, Result};
use crate::scalar::{rat, Rational};

/// Term cap for non-terminating Kummer series.
pub const KUMMER_TERM_CAP: usize = 500;

fn nonpositive_integer(x: f64) -> Option<u64> {
    (x <= 0.0 && x == x.round() && x > -(u32::MAX as f64)).then(|| (-x) as u64)
}

/// Kummer's function `M(α, γ, z) = Σ (α)_k / ((γ)_k k!) z^k`.
///
/// For `α = −n` the series is a polynomial of degree `n` and is summed exactly.
/// Otherwise terms are added until one drops below `1e−16` of the partial sum.
pub fn kummer_m(alpha: f64, gamma: f64, z: f64) -> Result<f64> {
    if !(alpha.is_finite() && gamma.is_finite() && z.is_finite()) {
        return Err(PsqmError::InvalidParameter(
            "kummer_m arguments must be finite".into(),
        ));
    }
    let terminating = nonpositive_integer(alpha);
    if let Some(m) = nonpositive_integer(gamma) {
        // (γ)_k vanishes from k = m + 1 on
        if terminating.is_none_or(|n| n > m) {
            return Err(PsqmError::InvalidParameter(format!(
                "gamma = {gamma} is a nonpositive integer"
            )));
        }
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    if let Some(n) = terminating {
        for k in 0..n {
            let k = k as f64;
            term *= (alpha + k) / ((gamma + k) * (k + 1.0)) * z;
            sum += term;
        }
        return Ok(sum);
    }
    for k in 0..KUMMER_TERM_CAP {
        let k = k as f64;
        term *= (alpha + k) / ((gamma + k) * (k + 1.0)) * z;
        sum += term;
        if !sum.is_finite() {
            return Err(PsqmError::InvalidParameter(format!(
                "kummer_m({alpha}, {gamma}, {z}) overflows"
            )));
        }
        if term.abs() < 1e-16 * sum.abs() {
            return Ok(sum);
        }
    }
    Err(PsqmError::TermCap(KUMMER_TERM_CAP))
}

/// Exact coefficients `c_k` of `M(−n, γ, z) = Σ_{k≤n} c_k z^k` for integer `γ > 0`.
pub fn kummer_coefficients(n: u32, gamma: u32) -> Vec<Rational> {
    assert!(gamma > 0, "gamma must be positive");
    let mut c = rat(1, 1);
    let mut out = vec![c.clone()];
    for k in 0..n as i64 {
        c *= rat(k - n as i64, (gamma as i64 + k) * (k + 1));
        out.push(c.clone());
    }
    out
}

/// Laguerre polynomial `L_n(x)` by the three-term recurrence.
pub fn laguerre(n: u32, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 1.0 - x);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}
