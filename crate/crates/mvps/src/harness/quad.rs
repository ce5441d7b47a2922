//! Adaptive Simpson quadrature for the time-split integrals.

/// Adaptive Simpson on [a, b] with absolute tolerance `tol`.
/// The integrand must be finite on the closed interval.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let c = 0.5 * (a + b);
    let (fa, fb, fc) = (f(a), f(b), f(c));
    let whole = simpson(a, b, fa, fc, fb);
    recurse(f, a, b, fa, fb, fc, whole, tol, 40)
}

fn simpson(a: f64, b: f64, fa: f64, fc: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fc + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    fc: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let c = 0.5 * (a + b);
    let (dl, dr) = (0.5 * (a + c), 0.5 * (c + b));
    let (fdl, fdr) = (f(dl), f(dr));
    let left = simpson(a, c, fa, fdl, fc);
    let right = simpson(c, b, fc, fdr, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        recurse(f, a, c, fa, fc, fdl, left, 0.5 * tol, depth - 1)
            + recurse(f, c, b, fc, fb, fdr, right, 0.5 * tol, depth - 1)
    }
}
