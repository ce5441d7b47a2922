//! Exact closed-form characteristic flows for the magnetized Vlasov equation.
//!
//! Velocities rotate about the magnetic axis (axis 3) at the cyclotron
//! frequency `omega` while the axial component drifts freely.  Everything in
//! this module is a pure function; the unmagnetized system (`omega = 0`) is a
//! first-class branch, recovered continuously through the Taylor-series paths
//! of the trigonometric factors.

use serde::{Deserialize, Serialize};

use crate::error::{MvpsError, Result};
use crate::vec3::Vec3;

/// Below this value of |omega * dt| the factors sin(w d)/w and (1-cos(w d))/w
/// are evaluated by a 4-term Taylor series; direct evaluation loses digits.
const CANCELLATION_THRESHOLD: f64 = 1e-4;

/// Relative width of the guard band around the singular times 2*pi*k/omega.
const SINGULAR_GUARD: f64 = 1e-8;

/// Uniform axial magnetic field B = (0, 0, omega).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MagneticConfig {
    omega: f64,
}

impl MagneticConfig {
    pub fn new(omega: f64) -> Result<Self> {
        if !(omega >= 0.0) {
            return Err(MvpsError::NegativeOmega(omega));
        }
        Ok(MagneticConfig { omega })
    }

    pub fn unmagnetized() -> Self {
        MagneticConfig { omega: 0.0 }
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Safe window length T_w = pi/omega; `None` when omega = 0.
    pub fn t_omega(&self) -> Option<f64> {
        if self.omega > 0.0 {
            Some(std::f64::consts::PI / self.omega)
        } else {
            None
        }
    }

    /// Gyro-period 2*pi/omega; `None` when omega = 0.
    pub fn period(&self) -> Option<f64> {
        self.t_omega().map(|t| 2.0 * t)
    }

    /// True when `s` lies within the guard band of a singular time 2*pi*k/omega.
    pub fn near_singular_time(&self, s: f64) -> bool {
        match self.period() {
            None => false,
            Some(p) => {
                let frac = (s / p).round();
                (s - frac * p).abs() < SINGULAR_GUARD * p && frac >= 1.0
            }
        }
    }

    fn guard_singular(&self, s: f64) -> Result<()> {
        if self.near_singular_time(s) {
            Err(MvpsError::SingularTime { s, omega: self.omega })
        } else {
            Ok(())
        }
    }
}

/// A point (x, v) of phase space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub x: Vec3,
    pub v: Vec3,
}

impl PhasePoint {
    pub fn new(x: Vec3, v: Vec3) -> Self {
        PhasePoint { x, v }
    }
}

/// Result of transporting a phase point along the exact characteristics.
pub type FlowResult = PhasePoint;

/// sin(omega * d) / omega, continuous through omega -> 0 (limit d).
pub fn sinc_factor(omega: f64, d: f64) -> f64 {
    let u = omega * d;
    if u.abs() < CANCELLATION_THRESHOLD {
        let a = u * u;
        d * (1.0 - a / 6.0 + a * a / 120.0 - a * a * a / 5040.0)
    } else {
        u.sin() / omega
    }
}

/// (1 - cos(omega * d)) / omega, continuous through omega -> 0 (limit 0).
pub fn versin_factor(omega: f64, d: f64) -> f64 {
    let u = omega * d;
    if u.abs() < CANCELLATION_THRESHOLD {
        let a = u * u;
        omega * d * d * (0.5 - a / 24.0 + a * a / 720.0 - a * a * a / 40320.0)
    } else {
        (1.0 - u.cos()) / omega
    }
}

/// 2(1 - cos u)/u^2, the normalized versine; -> 1 as u -> 0.
pub fn versin_ratio(u: f64) -> f64 {
    if u.abs() < CANCELLATION_THRESHOLD {
        let a = u * u;
        1.0 - a / 12.0 + a * a / 360.0 - a * a * a / 20160.0
    } else {
        2.0 * (1.0 - u.cos()) / (u * u)
    }
}

/// Exact characteristic flow (X(s; t, x, v), V(s; t, x, v)).
///
/// Works for any ordering of `s` and `t`; the map is the free gyration about
/// the magnetic axis composed with the axial drift, and degenerates to the
/// straight-line drift when omega = 0.
pub fn flow(t: f64, s: f64, p: PhasePoint, mag: &MagneticConfig) -> FlowResult {
    let omega = mag.omega();
    let d = s - t;
    let (x, v) = (p.x, p.v);
    let (sn, cs) = {
        let u = omega * d;
        (u.sin(), u.cos())
    };
    let sf = sinc_factor(omega, d); // sin(w d)/w
    let vf = versin_factor(omega, d); // (1 - cos(w d))/w
    let vv = Vec3::new(v.x * cs + v.y * sn, -v.x * sn + v.y * cs, v.z);
    let xx = Vec3::new(
        x.x + v.x * sf + v.y * vf,
        x.y - v.x * vf + v.y * sf,
        x.z + v.z * d,
    );
    PhasePoint::new(xx, vv)
}

/// The backward position map X*(s, x, v) of the rotation change of variables.
///
/// For omega = 0 this is x - s v.
pub fn xstar(s: f64, x: Vec3, v: Vec3, mag: &MagneticConfig) -> Vec3 {
    let omega = mag.omega();
    let sf = sinc_factor(omega, s);
    let vf = versin_factor(omega, s);
    Vec3::new(x.x - v.x * sf - v.y * vf, x.y + v.x * vf - v.y * sf, x.z - v.z * s)
}

/// Pure rotation of a velocity about axis 3 by the angle omega * (s - t).
pub fn rotate_velocity(s: f64, t: f64, v: Vec3, mag: &MagneticConfig) -> Vec3 {
    let u = mag.omega() * (s - t);
    let (sn, cs) = (u.sin(), u.cos());
    Vec3::new(v.x * cs + v.y * sn, -v.x * sn + v.y * cs, v.z)
}

/// The kernel H_t(s, .) of the representation formula, applied to a field
/// sample `e`.  The omega -> 0 limit is (s - t) * e.
pub fn kernel_h(t: f64, s: f64, e: Vec3, mag: &MagneticConfig) -> Vec3 {
    let omega = mag.omega();
    let d = s - t;
    let sf = sinc_factor(omega, d);
    let vf = versin_factor(omega, d);
    Vec3::new(sf * e.x - vf * e.y, vf * e.x + sf * e.y, d * e.z)
}

/// The kernel D(t, s, .) of the time-reversed change of variables, applied to
/// a field sample `e`.  Coincides with `kernel_h` under s -> t - s.
pub fn kernel_d(_t: f64, s: f64, e: Vec3, mag: &MagneticConfig) -> Vec3 {
    let omega = mag.omega();
    let sf = sinc_factor(omega, s);
    let vf = versin_factor(omega, s);
    Vec3::new(-sf * e.x - vf * e.y, vf * e.x - sf * e.y, -s * e.z)
}

/// |det| of the Jacobian of the change of variables v -> X*(s, x, v),
/// i.e. 2 s (1 - cos(omega s)) / omega^2; s^3 in the unmagnetized limit.
pub fn jacobian_psi_abs(s: f64, mag: &MagneticConfig) -> Result<f64> {
    if !(s > 0.0) {
        return Err(MvpsError::NonPositiveDuration(s));
    }
    // 2 s (1 - cos(w s)) / w^2 = s^3 * versin_ratio(w s)
    Ok(s * s * s * versin_ratio(mag.omega() * s))
}

/// Amplification factor (sqrt(2)/s) * (w^2 s^2 / (2 (1 - cos(w s))))^(2/3)
/// governing the blow-up of the field estimate at the cyclotron periods.
pub fn singular_amplification(s: f64, mag: &MagneticConfig) -> Result<f64> {
    if !(s > 0.0) {
        return Err(MvpsError::NonPositiveDuration(s));
    }
    mag.guard_singular(s)?;
    let ratio = versin_ratio(mag.omega() * s);
    if ratio <= 0.0 {
        return Err(MvpsError::SingularTime { s, omega: mag.omega() });
    }
    Ok(std::f64::consts::SQRT_2 / s * ratio.powf(-2.0 / 3.0))
}

/// The small-time integrand zeta(s) = s * (1 / (s (1 - cos(w s))))^(1/d);
/// unmagnetized fallback s^(1 - 3/d).
pub fn zeta(s: f64, mag: &MagneticConfig, d: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(MvpsError::NonPositiveDuration(s));
    }
    if !(d > 1.5 && d <= 15.0 / 4.0) {
        return Err(MvpsError::InvalidExponent(format!(
            "zeta exponent d must lie in (3/2, 15/4], got {d}"
        )));
    }
    let omega = mag.omega();
    if omega == 0.0 {
        return Ok(s.powf(1.0 - 3.0 / d));
    }
    mag.guard_singular(s)?;
    let one_minus_cos = 0.5 * versin_ratio(omega * s) * (omega * s) * (omega * s);
    if one_minus_cos <= 0.0 {
        return Err(MvpsError::SingularTime { s, omega });
    }
    Ok(s * (1.0 / (s * one_minus_cos)).powf(1.0 / d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::PI;

    fn mag(omega: f64) -> MagneticConfig {
        MagneticConfig::new(omega).unwrap()
    }

    #[test]
    fn flow_identity_at_equal_times() {
        let p = PhasePoint::new(Vec3::new(1.0, -2.0, 0.5), Vec3::new(0.3, 0.1, -4.0));
        for omega in [0.0, 0.7, 13.0] {
            let r = flow(2.5, 2.5, p, &mag(omega));
            assert_eq!(r.x, p.x);
            assert_eq!(r.v, p.v);
        }
    }

    #[test]
    fn flow_unmagnetized_drift() {
        let p = PhasePoint::new(Vec3::ZERO, Vec3::new(1.0, 2.0, 3.0));
        let r = flow(0.0, 2.0, p, &MagneticConfig::unmagnetized());
        assert_eq!(r.x, Vec3::new(2.0, 4.0, 6.0));
        assert_eq!(r.v, Vec3::new(1.0, 2.0, 3.0));
    }

    #[test]
    fn flow_quarter_turn() {
        let p = PhasePoint::new(Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0));
        let r = flow(0.0, PI / 2.0, p, &mag(1.0));
        assert_abs_diff_eq!(r.v.x, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.v.y, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.x.x, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.x.y, -1.0, epsilon = 1e-15);
        assert_eq!(r.x.z, 0.0);
    }

    #[test]
    fn xstar_examples() {
        let m = mag(1.0);
        assert_eq!(xstar(0.0, Vec3::new(1.0, 2.0, 3.0), Vec3::new(9.0, 9.0, 9.0), &m), Vec3::new(1.0, 2.0, 3.0));
        let r = xstar(3.0, Vec3::ZERO, Vec3::new(1.0, 1.0, 1.0), &MagneticConfig::unmagnetized());
        assert_eq!(r, Vec3::new(-3.0, -3.0, -3.0));
        let r = xstar(PI, Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0), &m);
        assert_abs_diff_eq!(r.x, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.y, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn rotation_preserves_norm_and_half_turn() {
        let m = mag(1.0);
        let v = Vec3::new(1.0, 0.0, 5.0);
        let r = rotate_velocity(PI, 0.0, v, &m);
        assert_abs_diff_eq!(r.x, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.y, 0.0, epsilon = 1e-15);
        assert_eq!(r.z, 5.0);
        let w = Vec3::new(0.3, -1.7, 2.2);
        assert_relative_eq!(rotate_velocity(0.41, 0.13, w, &m).norm(), w.norm(), max_relative = 1e-14);
    }

    #[test]
    fn kernel_h_examples() {
        let m = mag(1.0);
        let e = Vec3::new(3.0, -2.0, 7.0);
        assert_eq!(kernel_h(1.5, 1.5, e, &m), Vec3::ZERO);
        // omega -> 0 at s = 0 gives -t * e
        let h = kernel_h(2.0, 0.0, e, &MagneticConfig::unmagnetized());
        assert_eq!(h, -2.0 * e);
        // omega (s - t) = pi
        let h = kernel_h(0.0, PI, e, &m);
        assert_abs_diff_eq!(h.x, 2.0 * e.y * -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(h.y, 2.0 * e.x, epsilon = 1e-14);
        assert_abs_diff_eq!(h.z, PI * e.z, epsilon = 1e-14);
    }

    #[test]
    fn kernel_d_examples() {
        let m = mag(1.0);
        assert_eq!(kernel_d(0.3, 0.0, Vec3::new(1.0, 2.0, 3.0), &m), Vec3::ZERO);
        let d = kernel_d(0.0, PI, Vec3::new(1.0, 0.0, 0.0), &m);
        assert_abs_diff_eq!(d.x, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.y, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.z, 0.0, epsilon = 1e-15);
        // omega -> 0 limit is -s e
        let e = Vec3::new(0.4, -0.8, 1.2);
        let d0 = kernel_d(0.0, 1.7, e, &MagneticConfig::unmagnetized());
        assert_relative_eq!(d0.x, -1.7 * e.x, max_relative = 1e-14);
        assert_relative_eq!(d0.y, -1.7 * e.y, max_relative = 1e-14);
        assert_relative_eq!(d0.z, -1.7 * e.z, max_relative = 1e-14);
    }

    #[test]
    fn jacobian_examples() {
        // omega -> 0 limit s^3
        assert_relative_eq!(jacobian_psi_abs(2.0, &MagneticConfig::unmagnetized()).unwrap(), 8.0);
        // singular time: cos(2 pi) = 1
        let j = jacobian_psi_abs(2.0 * PI, &mag(1.0)).unwrap();
        assert_abs_diff_eq!(j, 0.0, epsilon = 1e-13);
        // omega = 2, s = pi/2 -> pi/2
        assert_relative_eq!(jacobian_psi_abs(PI / 2.0, &mag(2.0)).unwrap(), PI / 2.0, max_relative = 1e-14);
    }

    #[test]
    fn jacobian_rejects_nonpositive_duration() {
        assert!(jacobian_psi_abs(0.0, &mag(1.0)).is_err());
        assert!(jacobian_psi_abs(-1.0, &mag(1.0)).is_err());
    }

    #[test]
    fn amplification_examples() {
        // omega -> 0: sqrt(2)/s
        let s = 0.37;
        assert_relative_eq!(
            singular_amplification(s, &MagneticConfig::unmagnetized()).unwrap(),
            std::f64::consts::SQRT_2 / s
        );
        // omega s = pi
        let a = singular_amplification(PI, &mag(1.0)).unwrap();
        let expected = (PI * PI / 4.0).powf(2.0 / 3.0) * std::f64::consts::SQRT_2 / PI;
        assert_relative_eq!(a, expected, max_relative = 1e-13);
        // approaching the singular time the factor blows up
        let near = singular_amplification(2.0 * PI - 1e-6, &mag(1.0)).unwrap();
        assert!(near >= 1e6 * a, "near = {near}, at pi = {a}");
    }

    #[test]
    fn amplification_rejects_singular_time() {
        assert!(matches!(
            singular_amplification(2.0 * PI, &mag(1.0)),
            Err(MvpsError::SingularTime { .. })
        ));
    }

    #[test]
    fn zeta_examples() {
        // unmagnetized: s^(1 - 3/d)
        assert_relative_eq!(zeta(8.0, &MagneticConfig::unmagnetized(), 3.0).unwrap(), 1.0);
        // omega = 1, d = 3, s = pi
        let z = zeta(PI, &mag(1.0), 3.0).unwrap();
        assert_relative_eq!(z, PI * (1.0 / (PI * 2.0)).powf(1.0 / 3.0), max_relative = 1e-13);
        // small-s behaviour ~ s^(1 - 3/d) (2/w^2)^(1/d) * (1 + O(s^2))
        let d = 2.0;
        let s = 1e-5;
        let z = zeta(s, &mag(1.0), d).unwrap();
        let lead = s.powf(1.0 - 3.0 / d) * (2.0f64).powf(1.0 / d);
        assert_relative_eq!(z, lead, max_relative = 1e-8);
    }

    #[test]
    fn zeta_rejects_bad_exponent() {
        assert!(zeta(1.0, &mag(1.0), 1.5).is_err());
        assert!(zeta(1.0, &mag(1.0), 4.0).is_err());
    }

    #[test]
    fn t_omega_relation() {
        assert_eq!(mag(2.0).t_omega(), Some(PI / 2.0));
        assert_eq!(MagneticConfig::unmagnetized().t_omega(), None);
        assert!(MagneticConfig::new(-1.0).is_err());
    }

    #[test]
    fn versine_ratio_bounded_on_window() {
        // s -> (s^2/(1 - cos s))^(1/d) bounded on (0, pi], sup at s = pi.
        for &d in &[2.0, 3.0, 3.5, 3.75] {
            let at_pi = (PI * PI / 2.0).powf(1.0 / d);
            let mut sup: f64 = 0.0;
            for i in 1..=4000 {
                let s = PI * i as f64 / 4000.0;
                let val = (s * s / (1.0 - s.cos())).powf(1.0 / d);
                sup = sup.max(val);
            }
            assert!(sup <= at_pi * (1.0 + 1e-12), "sup {sup} exceeds value at pi {at_pi}");
        }
    }
}
