//! Measurements that are reported but not asserted.

use super::WeightSpec;
use crate::basis::{phi_table, synthesize_at, SymmetrizedCoeffs};
use crate::error::{domain, Result};
use crate::jacobi::JacobiParams;
use crate::kernels::{poisson_kernel_series, KernelPoint};
use crate::quadrature::mu_plus_rule;

/// −d/dt ln|H_t(θ, φ) − H_∞(θ, φ)| between t₁ < t₂, where H_∞ is the zero-rate mode Φ₀(θ)Φ₀(φ) in
/// the critical case α + β = −1 and 0 otherwise.
pub fn decay_log_slope(
    params: &JacobiParams<f64>,
    theta: f64,
    phi: f64,
    t1: f64,
    t2: f64,
) -> Result<f64> {
    if !(t1 > 0.0 && t2 > t1) {
        return domain("decay slope needs 0 < t1 < t2");
    }
    let limit = if params.is_critical() {
        phi_table(params, 0, theta)[0] * phi_table(params, 0, phi)[0]
    } else {
        0.0
    };
    let h = |t| -> Result<f64> {
        Ok(poisson_kernel_series(params, &KernelPoint::new(t, theta, phi)?)? - limit)
    };
    Ok(-((h(t2)?.abs()).ln() - (h(t1)?.abs()).ln()) / (t2 - t1))
}

/// ‖Tf‖/‖f‖ in L^p(w dμ) on (−π, π) from full coefficient vectors; the weight is absorbed into a
/// Gauss–Jacobi rule for the exponents (α + r/2, β + s/2), mirrored to negative angles.
pub fn weighted_lp_ratio(
    f: &SymmetrizedCoeffs<f64>,
    tf: &SymmetrizedCoeffs<f64>,
    weight: &WeightSpec,
    nodes: usize,
) -> Result<f64> {
    let p = f.params;
    let shifted = JacobiParams::new(p.alpha + 0.5 * weight.r, p.beta + 0.5 * weight.s)?;
    let rule = mu_plus_rule(&shifted, nodes)?;
    let norm = |c: &SymmetrizedCoeffs<f64>| -> f64 {
        let s: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&t, &w)| {
                w * (synthesize_at(c, t).abs().powf(weight.p)
                    + synthesize_at(c, -t).abs().powf(weight.p))
            })
            .sum();
        s.powf(1.0 / weight.p)
    };
    let den = norm(f);
    if den == 0.0 {
        return domain("the input function vanishes");
    }
    Ok(norm(tf) / den)
}
