//! Verification harness: quantitative checks of the a priori estimates that
//! drive the moment-propagation argument, run against the simulator and
//! against closed-form model problems.

pub mod bounded_density;
pub mod decay;
pub mod field_estimates;
pub mod gronwall;
pub mod interpolation;
pub mod kinematics_props;
pub mod quad;
pub mod report;
pub mod representation;
pub mod smalltime;
pub mod stability;
pub mod t0;

pub use bounded_density::{envelope_horizon, envelope_integral, verify_bounded_density};
pub use decay::{DecayMonitor, DecayProfile};
pub use field_estimates::{
    compare_fitted_constants, fit_field_constant, grad_k3_weak_norm, poisson_gaussian_error,
    verify_field_estimates, verify_poisson_convergence, verify_weak_young,
};
pub use gronwall::{fit_gronwall_envelope, gronwall_report, GronwallFit};
pub use kinematics_props::{
    rk45_flow, verify_flow_against_ode, verify_flow_identities, verify_jacobian_formula,
    verify_kinematics, verify_zero_field_continuity,
};
pub use interpolation::{
    verify_moment_interpolation, verify_product_weak_bound, verify_singular_operator_probe,
    PhaseTrial,
};
pub use report::EstimateReport;
pub use representation::{verify_representation, FrozenFieldProblem};
pub use smalltime::{
    large_time_integral, small_time_integral, verify_large_time_log, verify_small_time_bound,
};
pub use stability::{fit_log_lipschitz, paired_runs, verify_stability_envelope};
pub use t0::{derived_l, select_t0, t0_residual};

/// Determinant of a 6x6 matrix by Gaussian elimination with partial pivoting.
/// Used by the phase-space volume checks on finite-difference Jacobians.
pub fn det6(m: &[[f64; 6]; 6]) -> f64 {
    let mut a = *m;
    let mut det = 1.0;
    for col in 0..6 {
        let mut piv = col;
        for row in col + 1..6 {
            if a[row][col].abs() > a[piv][col].abs() {
                piv = row;
            }
        }
        if a[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det *= a[col][col];
        for row in col + 1..6 {
            let f = a[row][col] / a[col][col];
            for k in col..6 {
                a[row][k] -= f * a[col][k];
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det6_identity_and_scaling() {
        let mut id = [[0.0; 6]; 6];
        for i in 0..6 {
            id[i][i] = 1.0;
        }
        assert_eq!(det6(&id), 1.0);
        let mut d = id;
        for i in 0..6 {
            d[i][i] = (i + 1) as f64;
        }
        assert!((det6(&d) - 720.0).abs() < 1e-12);
    }

    #[test]
    fn det6_permutation_sign() {
        let mut p = [[0.0; 6]; 6];
        for i in 0..6 {
            p[i][i] = 1.0;
        }
        p.swap(0, 1);
        assert_eq!(det6(&p), -1.0);
    }
}
