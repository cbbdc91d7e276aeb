//! Jacobi–Poisson kernels: the spectral series, the double-integral representation,
//! their derivatives, and the norms used for vector-valued kernels.

pub mod bnorm;
pub mod bundle;
pub mod dk;
pub mod series;

pub use bnorm::{bnorm, log_time_rule, BNorm, TGrid};
pub use bundle::{EvalConfig, FamilyJets, LocationEvaluator, LocationJets, Pattern, Regime};
pub use dk::{poisson_kernel_dk, poisson_kernel_dk_auto, DkLocation};
pub use series::{
    kernel_derivative, poisson_kernel_series, poisson_kernel_series_truncated, series_term,
    symmetrized_kernel, tilde_kernel_series, ThetaOp,
};

use crate::error::{domain, Result};
use crate::jacobi::JacobiParams;

/// A point (t, θ, φ) at which a kernel is evaluated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelPoint {
    pub t: f64,
    pub theta: f64,
    pub phi: f64,
}

impl KernelPoint {
    pub fn new(t: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return domain(format!("kernel time must be positive, got {t}"));
        }
        Ok(Self { t, theta, phi })
    }
}

/// Integration variables (u, v) of dΠ_α(u) dΠ_β(v).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PiNode {
    pub u: f64,
    pub v: f64,
}

/// Products of half-angle sines and cosines that q and its derivatives are built from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QGeometry {
    /// sin(θ/2) sin(φ/2)
    pub ss: f64,
    /// cos(θ/2) cos(φ/2)
    pub cc: f64,
    /// cos(θ/2) sin(φ/2)
    pub cs: f64,
    /// sin(θ/2) cos(φ/2)
    pub sc: f64,
    /// 1 − cos((θ−φ)/2) = 2 sin²((θ−φ)/4), the minimum of q.
    pub q0: f64,
}

impl QGeometry {
    pub fn new(theta: f64, phi: f64) -> Self {
        let (st, ct) = (0.5 * theta).sin_cos();
        let (sp, cp) = (0.5 * phi).sin_cos();
        let h = (0.25 * (theta - phi)).sin();
        Self {
            ss: st * sp,
            cc: ct * cp,
            cs: ct * sp,
            sc: st * cp,
            q0: 2.0 * h * h,
        }
    }

    /// q written through x = 1 − u, y = 1 − v: q₀ + x sin sin + y cos cos (no cancellation).
    pub fn q_xy(&self, x: f64, y: f64) -> f64 {
        self.q0 + x * self.ss + y * self.cc
    }

    /// ∂q/∂θ.
    pub fn q_theta(&self, u: f64, v: f64) -> f64 {
        0.5 * (-u * self.cs + v * self.sc)
    }

    /// ∂q/∂φ.
    pub fn q_phi(&self, u: f64, v: f64) -> f64 {
        0.5 * (-u * self.sc + v * self.cs)
    }

    /// ∂²q/∂θ² = (1 − q)/4.
    pub fn q_theta_theta(&self, u: f64, v: f64) -> f64 {
        0.25 * (u * self.ss + v * self.cc)
    }

    /// ∂²q/∂θ∂φ.
    pub fn q_theta_phi(&self, u: f64, v: f64) -> f64 {
        -0.25 * (u * self.cc + v * self.ss)
    }
}

/// q(θ, φ, u, v) = 1 − u sin(θ/2) sin(φ/2) − v cos(θ/2) cos(φ/2).
pub fn q_fn(theta: f64, phi: f64, u: f64, v: f64) -> f64 {
    let g = QGeometry::new(theta, phi);
    g.q_xy(1.0 - u, 1.0 - v)
}

/// E(t) = cosh(t/2) − 1 = 2 sinh²(t/4), free of cancellation at small t.
pub fn e_of_t(t: f64) -> f64 {
    let s = (0.25 * t).sinh();
    2.0 * s * s
}

/// Ψ(t, q) = sinh(t/2)/(cosh(t/2) − 1 + q)^{α+β+2}, evaluated in logarithms for t > 1
/// so that it decays to 0 instead of overflowing.
pub fn psi(params: &JacobiParams<f64>, t: f64, q: f64) -> Result<f64> {
    if !(t > 0.0) || !(q >= 0.0) {
        return domain(format!("Ψ needs t > 0 and q ≥ 0, got t = {t}, q = {q}"));
    }
    let p = params.alpha + params.beta + 2.0;
    if t <= 1.0 {
        return Ok((0.5 * t).sinh() / (e_of_t(t) + q).powf(p));
    }
    // sinh(t/2) = e^{t/2}(1 − e^{−t})/2 and cosh(t/2) − 1 + q = e^{t/2}(1 + 2(q−1)e^{−t/2} + e^{−t})/2
    let et = (-t).exp();
    let eh = (-0.5 * t).exp();
    let ln = (1.0 - p) * (0.5 * t - std::f64::consts::LN_2) + (-et).ln_1p()
        - p * (2.0 * (q - 1.0) * eh + et).ln_1p();
    Ok(ln.exp())
}

/// The DK normalization 2^{−α−β−2}/μ⁺(0, π).
pub fn dk_constant(params: &JacobiParams<f64>) -> f64 {
    2f64.powf(-params.alpha - params.beta - 2.0) / crate::jacobi::total_mass_exact(params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn q_examples() {
        assert!(q_fn(0.7, 0.7, 1.0, 1.0).abs() < 1e-16);
        assert!((q_fn(PI / 2.0, PI / 2.0, 0.0, 0.0) - 1.0).abs() < 1e-15);
        let (th, ph) = (0.4f64, 2.2f64);
        let lower = 1.0 - (0.5 * (th - ph)).cos();
        for &u in &[-1.0, -0.3, 0.5, 1.0] {
            for &v in &[-1.0, 0.2, 1.0] {
                assert!(q_fn(th, ph, u, v) >= lower - 1e-15);
            }
        }
    }

    #[test]
    fn q_derivatives_match_differences() {
        let (th, ph, u, v) = (0.9, 2.1, 0.3, -0.6);
        let h = 1e-5;
        let g = QGeometry::new(th, ph);
        let fd = (q_fn(th + h, ph, u, v) - q_fn(th - h, ph, u, v)) / (2.0 * h);
        assert!((g.q_theta(u, v) - fd).abs() < 1e-9);
        let fd = (q_fn(th, ph + h, u, v) - q_fn(th, ph - h, u, v)) / (2.0 * h);
        assert!((g.q_phi(u, v) - fd).abs() < 1e-9);
        let fd =
            (q_fn(th + h, ph, u, v) - 2.0 * q_fn(th, ph, u, v) + q_fn(th - h, ph, u, v)) / (h * h);
        assert!((g.q_theta_theta(u, v) - fd).abs() < 1e-5);
        let gp = QGeometry::new(th, ph + h);
        let gm = QGeometry::new(th, ph - h);
        let fd = (gp.q_theta(u, v) - gm.q_theta(u, v)) / (2.0 * h);
        assert!((g.q_theta_phi(u, v) - fd).abs() < 1e-9);
    }

    #[test]
    fn psi_forms_agree_and_saturate() {
        let p = JacobiParams::new(0.5, 2.0).unwrap();
        for &q in &[0.0, 0.3, 1.7] {
            let t: f64 = 1.0 + 1e-12;
            let direct = (0.5 * t).sinh() / ((0.5 * t).cosh() - 1.0 + q).powf(4.5);
            assert!((psi(&p, t, q).unwrap() / direct - 1.0).abs() < 1e-12);
            let t: f64 = 20.0;
            let direct = (0.5 * t).sinh() / ((0.5 * t).cosh() - 1.0 + q).powf(4.5);
            assert!((psi(&p, t, q).unwrap() / direct - 1.0).abs() < 1e-12);
        }
        let v = psi(&p, 2000.0, 0.5).unwrap();
        assert!(v >= 0.0 && v.is_finite());
        assert!(psi(&p, 0.1, 0.2).unwrap() > 0.0);
    }
}
