//! Per-window envelope fit for the doubly exponential moment bound.
//!
//! On each window I_p = [p T, (p+1) T] the quantity y(t) = 1 + mu_k(t) obeys
//! y(t) <= exp(C T e^(C tau)) y(p T)^(e^(C tau)), tau = t - p T, for some
//! finite C; a blow-up of the moment would leave no finite C.  The fit finds
//! the least such C by bisection (the envelope is monotone in C).

use crate::ensemble::MomentSeries;
use crate::error::{MvpsError, Result};
use crate::harness::report::EstimateReport;

/// Least fitted constant for one window, plus the samples it covered.
#[derive(Debug, Clone)]
pub struct GronwallFit {
    pub window: usize,
    pub c: f64,
    pub samples: usize,
    pub y_start: f64,
    pub y_max: f64,
    /// false when no C below the cap makes the envelope hold
    pub bounded: bool,
}

pub const C_CAP: f64 = 100.0;
pub const C_TOL: f64 = 1e-3;

fn envelope(c: f64, tau: f64, t_window: f64, y_start: f64) -> f64 {
    let growth = (c * tau).exp();
    (c * t_window * growth).exp() * y_start.powf(growth)
}

fn window_holds(c: f64, t_window: f64, samples: &[(f64, f64)], y_start: f64) -> bool {
    samples
        .iter()
        .all(|&(tau, y)| y <= envelope(c, tau, t_window, y_start) * (1.0 + 1e-12))
}

/// Least C >= 0 with the envelope above all (tau, y) samples in one window.
pub fn fit_window(t_window: f64, y_start: f64, samples: &[(f64, f64)]) -> (f64, bool) {
    if window_holds(0.0, t_window, samples, y_start) {
        return (0.0, true);
    }
    if !window_holds(C_CAP, t_window, samples, y_start) {
        return (C_CAP, false);
    }
    let (mut lo, mut hi) = (0.0f64, C_CAP);
    while hi - lo > C_TOL {
        let mid = 0.5 * (lo + hi);
        if window_holds(mid, t_window, samples, y_start) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (hi, true)
}

/// Fit the envelope constant on each full window of length `t_window` covered
/// by the series, for the moment of exponent `k`.
pub fn fit_gronwall_envelope(
    series: &MomentSeries,
    k: f64,
    t_window: f64,
) -> Result<Vec<GronwallFit>> {
    let column = series
        .moment_column(k)
        .ok_or_else(|| MvpsError::MissingHistory(format!("moment exponent {k} not in series")))?;
    // y(t) = 1 + running sup of M_k
    let mut y = Vec::with_capacity(column.len());
    let mut sup = 0.0f64;
    for &(t, m) in &column {
        if !m.is_finite() {
            return Err(MvpsError::NonFinite(format!("M_{k} not finite at t = {t}")));
        }
        sup = sup.max(m);
        y.push((t, 1.0 + sup));
    }
    let t_end = y.last().map(|&(t, _)| t).unwrap_or(0.0);
    let windows = (t_end / t_window + 1e-9).floor() as usize;
    if windows == 0 {
        return Err(MvpsError::MissingHistory(format!(
            "series ends at t = {t_end}, before one full window of {t_window}"
        )));
    }
    let mut fits = Vec::new();
    for p in 0..windows {
        let (w0, w1) = (p as f64 * t_window, (p + 1) as f64 * t_window);
        let in_window: Vec<(f64, f64)> = y
            .iter()
            .filter(|&&(t, _)| t >= w0 - 1e-12 && t <= w1 + 1e-12)
            .map(|&(t, yy)| (t - w0, yy))
            .collect();
        if in_window.is_empty() {
            return Err(MvpsError::MissingHistory(format!("window {p} has no samples")));
        }
        let y_start = in_window[0].1;
        let (c, bounded) = fit_window(t_window, y_start, &in_window);
        fits.push(GronwallFit {
            window: p,
            c,
            samples: in_window.len(),
            y_start,
            y_max: in_window.iter().fold(0.0f64, |a, &(_, yy)| a.max(yy)),
            bounded,
        });
    }
    Ok(fits)
}

/// Summarize the window fits as a pass/fail report.
pub fn gronwall_report(fits: &[GronwallFit], k: f64) -> EstimateReport {
    let mut report = EstimateReport::new(&format!("gronwall envelope k = {k}"));
    for fit in fits {
        report.record(&format!("window_{}_C", fit.window), fit.c);
        report.record(&format!("window_{}_ymax", fit.window), fit.y_max);
        report.require(&format!("window_{}_bounded", fit.window), fit.bounded);
    }
    report
}
