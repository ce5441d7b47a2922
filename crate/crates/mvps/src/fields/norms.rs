//! Discrete L^p and weak-L^q norms with the grid cell measure.

use crate::ensemble::ParticleEnsemble;
use crate::error::{MvpsError, Result};
use crate::fields::{ScalarField, VectorField};

/// (sum |m_i|^p h^3)^(1/p) over cell magnitudes; p = infinity returns the max.
fn lp_of_magnitudes(mags: impl Iterator<Item = f64>, cell_vol: f64, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(MvpsError::InvalidExponent(format!("L^p norm needs p >= 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(mags.fold(0.0f64, f64::max));
    }
    let sum: f64 = mags.map(|m| m.powf(p)).sum();
    Ok((sum * cell_vol).powf(1.0 / p))
}

pub fn lp_norm(field: &ScalarField, p: f64) -> Result<f64> {
    lp_of_magnitudes(field.values.iter().map(|v| v.abs()), field.grid.cell_volume(), p)
}

pub fn lp_norm_vector(field: &VectorField, p: f64) -> Result<f64> {
    lp_of_magnitudes(field.values.iter().map(|v| v.norm()), field.grid.cell_volume(), p)
}

/// Weak L^q norm sup_{|A| finite} |A|^(-1/q') Int_A |f|, computed exactly on
/// the grid.
///
/// Among all cell sets of a fixed measure the superlevel set maximizes the
/// integral, so scanning prefixes of the cells sorted by |value| descending
/// attains the supremum.
pub fn weak_lq_norm(field: &ScalarField, q: f64) -> Result<f64> {
    if !(q > 1.0) {
        return Err(MvpsError::InvalidExponent(format!("weak norm needs q > 1, got {q}")));
    }
    let qp = q / (q - 1.0);
    let h3 = field.grid.cell_volume();
    let mut mags: Vec<f64> = field.values.iter().map(|v| v.abs()).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut best: f64 = 0.0;
    let mut partial = 0.0;
    for (count, m) in mags.iter().enumerate() {
        partial += m * h3;
        let measure = (count + 1) as f64 * h3;
        best = best.max(measure.powf(-1.0 / qp) * partial);
    }
    Ok(best)
}

/// Weak L^q norm of the cellwise magnitude |E|.
pub fn weak_lq_norm_vector(field: &VectorField, q: f64) -> Result<f64> {
    let mags = ScalarField {
        grid: field.grid,
        values: field.values.iter().map(|v| v.norm()).collect(),
    };
    weak_lq_norm(&mags, q)
}

/// Total energy: kinetic part of the ensemble plus field energy
/// (1/2) Int |E|^2 dx.
pub fn energy(ensemble: &ParticleEnsemble, e: &VectorField) -> f64 {
    let kinetic: f64 = ensemble
        .velocities
        .iter()
        .zip(ensemble.weights.iter())
        .map(|(v, w)| 0.5 * w * v.norm_sq())
        .sum();
    let field: f64 =
        0.5 * e.values.iter().map(|v| v.norm_sq()).sum::<f64>() * e.grid.cell_volume();
    kinetic + field
}
