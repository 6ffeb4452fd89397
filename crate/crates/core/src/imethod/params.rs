//! Closed-form parameter arithmetic: `λ(N)`, the predicted increment, the
//! choice of `N` and `ε`, and the growth exponent.
//!
//! The `0±` exponent adjustments of the asymptotic statements are set to 0
//! everywhere.

use serde::{Deserialize, Serialize};

use crate::dynamics::SubInterval;
use crate::{Error, Result};

/// Regularity threshold `13/18` below which the parameter scan diverges.
pub const S_THRESHOLD: f64 = 13.0 / 18.0;

/// Largest dyadic exponent tried by the scans (`N < 2⁶⁴`).
pub const MAX_DYADIC_EXPONENT: i32 = 63;

pub const CONVENTION_NOTE: &str = "0+ and 0- exponent adjustments are taken as 0 in every bound";

/// `2(1−s)/(2s−1)`, the exponent of `N` in `λ`.
pub fn lambda_exponent(s: f64) -> f64 {
    2.0 * (1.0 - s) / (2.0 * s - 1.0)
}

/// `λ = C₀·N^{2(1−s)/(2s−1)}`.
pub fn lambda_of(c0: f64, cutoff: f64, s: f64) -> f64 {
    c0 * cutoff.powf(lambda_exponent(s))
}

/// `max(max(1,ε)^{1/2}/N, max(1,ε)^{5/2}/N²)`.
pub fn predicted_increment(epsilon: f64, cutoff: f64) -> f64 {
    let e = epsilon.max(1.0);
    (e.sqrt() / cutoff).max(e.powf(2.5) / (cutoff * cutoff))
}

/// `(28s−18)/(18s−13)` on `(13/18, 1]`.
pub fn growth_exponent(s: f64) -> Result<f64> {
    if !(s > S_THRESHOLD && s <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "growth exponent needs 13/18 < s <= 1, got s = {s}; the exponent has a pole at s = 13/18 ≈ 0.722"
        )));
    }
    Ok((28.0 * s - 18.0) / (18.0 * s - 13.0))
}

/// `ε = N^{1/2}` clamped below at 1; the flag records the clamp.
pub fn optimal_epsilon(cutoff: f64) -> (f64, bool) {
    let e = cutoff.sqrt();
    if e < 1.0 {
        (1.0, true)
    } else {
        (e, false)
    }
}

/// Selected `s`, `N`, `λ`, `C₀`, `ε`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterChoice {
    pub s: f64,
    pub cutoff: f64,
    pub lambda: f64,
    pub c0: f64,
    pub epsilon: f64,
    /// `ε` was raised to 1 from `N^{1/2} < 1`.
    pub epsilon_clamped: bool,
}

impl ParameterChoice {
    /// `λ` is derived from `C₀` and `N`; `ε = None` selects `N^{1/2}`.
    pub fn new(s: f64, cutoff: f64, c0: f64, epsilon: Option<f64>) -> Result<Self> {
        if !(s > 0.5 && s < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "regularity s = {s} must lie in the open interval (1/2, 1)"
            )));
        }
        if !(cutoff >= 1.0 && cutoff.is_finite()) {
            return Err(Error::InvalidParameter(format!("cutoff N = {cutoff} must be >= 1")));
        }
        if !(c0 > 0.0 && c0.is_finite()) {
            return Err(Error::InvalidParameter(format!("C0 = {c0} must be positive")));
        }
        let (epsilon, epsilon_clamped) = match epsilon {
            Some(e) if e > 0.0 && e.is_finite() => (e, false),
            Some(e) => {
                return Err(Error::InvalidParameter(format!("epsilon = {e} must be positive")))
            }
            None => optimal_epsilon(cutoff),
        };
        Ok(Self {
            s,
            cutoff,
            lambda: lambda_of(c0, cutoff, s),
            c0,
            epsilon,
            epsilon_clamped,
        })
    }
}

/// `log₂` of the three terms of `C·max(1/N, λT/N^{5/4}, 1/N^{3/4})`.
fn condition_log2(safety: f64, c0: f64, s: f64, k: i32, t: f64) -> f64 {
    let k = k as f64;
    let log_lambda = c0.log2() + lambda_exponent(s) * k;
    safety.log2() + (-k).max(log_lambda + t.log2() - 1.25 * k).max(-0.75 * k)
}

/// Smallest dyadic `N` with `C·max(1/N, λT/N^{5/4}, 1/N^{3/4}) ≤ 1/2`, where
/// `λ = C₀(N)·N^{2(1−s)/(2s−1)}` and `c0_at(N)` supplies `C₀` (fixed or
/// calibrated per `N`). The returned choice carries `ε = N^{1/2}`.
pub fn choose_n<F>(s: f64, horizon: f64, safety: f64, mut c0_at: F) -> Result<ParameterChoice>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(s > S_THRESHOLD && s < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "choosing N needs 13/18 < s < 1, got s = {s}: below 13/18 the term λT/N^(5/4) grows with N, so no cutoff satisfies the condition"
        )));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidParameter(format!("horizon T = {horizon} must be positive")));
    }
    if !(safety > 0.0 && safety.is_finite()) {
        return Err(Error::InvalidParameter(format!("safety constant C = {safety} must be positive")));
    }
    for k in 0..=MAX_DYADIC_EXPONENT {
        let cutoff = (k as f64).exp2();
        let c0 = c0_at(cutoff)?;
        if condition_log2(safety, c0, s, k, horizon) <= -1.0 {
            return ParameterChoice::new(s, cutoff, c0, None);
        }
    }
    Err(Error::Search(format!(
        "no dyadic N below 2^64 satisfies the cutoff condition for s = {s}, T = {horizon}, C = {safety}"
    )))
}

/// `⌈span/ε⌉` consecutive intervals of length `ε` (the last one shorter),
/// with `ε` snapped to a whole number of snapshot spacings.
pub fn partition(span: f64, epsilon: f64, spacing: f64) -> Result<Vec<SubInterval>> {
    if !(span > 0.0 && span.is_finite()) {
        return Err(Error::InvalidParameter(format!("time span {span} must be positive")));
    }
    if !(spacing > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "epsilon {epsilon} and spacing {spacing} must be positive"
        )));
    }
    let strides = (epsilon / spacing).round();
    if strides < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "epsilon = {epsilon} is below one snapshot spacing {spacing}"
        )));
    }
    let total = (span / spacing).round() as usize;
    let per = (strides as usize).min(total.max(1));
    let count = total.div_ceil(per).max(1);
    (0..count)
        .map(|i| {
            let a = (i * per) as f64 * spacing;
            let b = if i + 1 == count {
                span
            } else {
                ((i + 1) * per) as f64 * spacing
            };
            SubInterval::new(a, b)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_at_three_quarters_is_linear_in_n() {
        assert_eq!(lambda_exponent(0.75), 1.0);
        assert_eq!(lambda_of(1.0, 64.0, 0.75), 64.0);
        assert_eq!(lambda_of(2.5, 16.0, 0.75), 40.0);
    }

    #[test]
    fn predicted_increment_branches() {
        assert_eq!(predicted_increment(0.3, 16.0), 1.0 / 16.0);
        assert_eq!(predicted_increment(1.0, 64.0), 1.0 / 64.0);
        // ε = N^{1/2}: both branches equal N^{-3/4}
        let n: f64 = 256.0;
        let e = n.sqrt();
        assert_eq!(e.sqrt() / n, e.powf(2.5) / (n * n));
        assert_eq!(predicted_increment(e, n), n.powf(-0.75));
        assert_eq!(predicted_increment(e, n) / e, n.powf(-1.25));
        assert!(predicted_increment(4.0, 2f64.powi(40)) < 1e-11);
    }

    #[test]
    fn growth_exponent_values() {
        assert_eq!(growth_exponent(0.75).unwrap(), 6.0);
        assert_eq!(growth_exponent(1.0).unwrap(), 2.0);
        assert!(growth_exponent(S_THRESHOLD).is_err());
        assert!(growth_exponent(0.7).is_err());
    }

    #[test]
    fn worked_example_selects_sixteen() {
        let c = choose_n(0.75, 1.0, 1.0, |_| Ok(1.0)).unwrap();
        assert_eq!(c.cutoff, 16.0);
        assert_eq!(c.lambda, 16.0);
        assert_eq!(c.epsilon, 4.0);
        assert!(!c.epsilon_clamped);
        // larger horizon never selects a smaller N
        let mut last = 0.0;
        for t in [0.5, 1.0, 2.0, 8.0, 100.0] {
            let n = choose_n(0.8, t, 1.0, |_| Ok(1.0)).unwrap().cutoff;
            assert!(n >= last);
            last = n;
        }
        assert!(choose_n(0.7, 1.0, 1.0, |_| Ok(1.0)).is_err());
    }

    #[test]
    fn partition_lengths() {
        let p = partition(10.0, 3.0, 1.0).unwrap();
        let lens: Vec<f64> = p.iter().map(|j| j.length()).collect();
        assert_eq!(lens, vec![3.0, 3.0, 3.0, 1.0]);
        assert_eq!(partition(2.0, 2.0, 0.25).unwrap().len(), 1);
        let p = partition(1.0, 0.3, 0.125).unwrap();
        assert_eq!(p.first().unwrap().a, 0.0);
        assert_eq!(p.last().unwrap().b, 1.0);
        for w in p.windows(2) {
            assert_eq!(w[0].b, w[1].a);
        }
        assert!(partition(1.0, 0.01, 0.125).is_err());
    }

    #[test]
    fn clamp_flag() {
        assert_eq!(optimal_epsilon(1.0), (1.0, false));
        let c = ParameterChoice::new(0.75, 16.0, 1.0, Some(0.5)).unwrap();
        assert_eq!(c.epsilon, 0.5);
    }
}
