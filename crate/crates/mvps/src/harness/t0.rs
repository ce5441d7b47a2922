//! The split-time selection rule and its defining relation.
//!
//! The field bound at exponent k + 3 splits the time integral at an
//! intermediate t0 chosen so that the small-time and large-time contributions
//! balance: (t0/t)^(2-3/d) (1 + mu_k)^(3(l+3)/(k+3)^2) = 1, where mu_k is the
//! running sup of M_k and l is coupled to (k, d) through (k+3)/d' = (l+3)/3
//! with d' the conjugate of d.

use crate::error::{MvpsError, Result};

/// Conjugate exponent d' = d/(d-1).
pub fn conjugate(d: f64) -> f64 {
    d / (d - 1.0)
}

/// The auxiliary moment order l defined by (k+3)/d' = (l+3)/3.
pub fn derived_l(k: f64, d: f64) -> f64 {
    3.0 * (k + 3.0) / conjugate(d) - 3.0
}

/// Split time t0 = t (1+mu_k)^(-3(l+3)/((k+3)^2 (2-3/d))).
///
/// Requires d > 3/2 so the exponent 2 - 3/d is positive; then 0 < t0 <= t
/// with equality exactly when mu_k = 0.
pub fn select_t0(t: f64, mu_k: f64, k: f64, d: f64) -> Result<f64> {
    if !(d > 1.5) {
        return Err(MvpsError::InvalidExponent(format!(
            "t0 rule needs d > 3/2 (so 2 - 3/d > 0), got d = {d}"
        )));
    }
    if !(t > 0.0) {
        return Err(MvpsError::NonPositiveDuration(t));
    }
    if !(mu_k >= 0.0) {
        return Err(MvpsError::InvalidExponent(format!(
            "running moment sup must be nonnegative, got {mu_k}"
        )));
    }
    let l = derived_l(k, d);
    let expo = 3.0 * (l + 3.0) / ((k + 3.0).powi(2) * (2.0 - 3.0 / d));
    Ok(t * (1.0 + mu_k).powf(-expo))
}

/// Residual of the defining relation: (t0/t)^(2-3/d) (1+mu)^(3(l+3)/(k+3)^2),
/// which equals 1 for the t0 returned by `select_t0`.
pub fn t0_residual(t0: f64, t: f64, mu_k: f64, k: f64, d: f64) -> f64 {
    let l = derived_l(k, d);
    (t0 / t).powf(2.0 - 3.0 / d) * (1.0 + mu_k).powf(3.0 * (l + 3.0) / (k + 3.0).powi(2))
}
