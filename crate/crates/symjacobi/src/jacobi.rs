//! Jacobi polynomials, their trigonometric normalization and the Jacobi operator.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::scalar::{idx, lit, Real};
use crate::special::{beta, ln_gamma};

/// Endpoint clamp used by trigonometric evaluations.
pub const ENDPOINT_EPS: f64 = 1e-12;

/// Type parameters (α, β).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobiParams<T> {
    pub alpha: T,
    pub beta: T,
}

/// Mode index, its bracket ⟨n⟩ = ⌊(n+1)/2⌋ and the eigenvalue λ_⟨n⟩.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectrumEntry<T> {
    pub n: usize,
    pub bracket_n: usize,
    pub lambda: T,
}

impl<T: Real> JacobiParams<T> {
    /// Validated constructor: α, β > −1.
    pub fn new(alpha: T, beta: T) -> Result<Self> {
        if !(alpha > -T::one() && beta > -T::one()) || !alpha.is_finite() || !beta.is_finite() {
            return domain(format!(
                "type parameters must exceed -1, got ({alpha}, {beta})"
            ));
        }
        Ok(Self { alpha, beta })
    }

    /// α, β ≥ −1/2, the range where the double-integral kernel formula holds.
    pub fn kernel_valid(&self) -> bool {
        let h = lit::<T>(-0.5);
        self.alpha >= h && self.beta >= h
    }

    /// α + β + 1 = 0 (up to 1e-12), in which case λ₀ = 0.
    pub fn is_critical(&self) -> bool {
        (self.alpha + self.beta + T::one()).abs() < lit(1e-12)
    }

    /// (α + 1, β + 1).
    pub fn shifted(&self) -> Self {
        Self {
            alpha: self.alpha + T::one(),
            beta: self.beta + T::one(),
        }
    }

    /// α + β + 1, forced to exactly zero in the critical case.
    pub fn sigma(&self) -> T {
        if self.is_critical() {
            T::zero()
        } else {
            self.alpha + self.beta + T::one()
        }
    }

    /// √λ_n = |n + (α+β+1)/2|.
    pub fn rate(&self, n: usize) -> T {
        (idx::<T>(n) + self.sigma() * lit(0.5)).abs()
    }

    /// λ_n = (n + (α+β+1)/2)².
    pub fn lambda(&self, n: usize) -> T {
        let r = self.rate(n);
        r * r
    }

    /// λ_n − λ₀ = n (n + α + β + 1), computed without cancellation.
    pub fn lambda_gap(&self, n: usize) -> T {
        let nn = idx::<T>(n);
        nn * (nn + self.sigma())
    }
}

impl JacobiParams<f64> {
    /// Shorthand for `JacobiParams::new` on `f64`.
    pub fn of(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(alpha, beta)
    }
}

/// Spectrum entry of the symmetrized system at index n.
pub fn spectrum<T: Real>(params: &JacobiParams<T>, n: usize) -> SpectrumEntry<T> {
    let bracket_n = n.div_ceil(2);
    SpectrumEntry {
        n,
        bracket_n,
        lambda: params.lambda(bracket_n),
    }
}

/// P_n^{α,β}(x) by the three-term recurrence.
pub fn eval_jacobi<T: Real>(params: &JacobiParams<T>, n: usize, x: T) -> Result<T> {
    if !(x >= -T::one() && x <= T::one()) {
        return domain(format!("x = {x} outside [-1, 1]"));
    }
    Ok(eval_jacobi_unchecked(params.alpha, params.beta, n, x))
}

pub(crate) fn eval_jacobi_unchecked<T: Real>(a: T, b: T, n: usize, x: T) -> T {
    let one = T::one();
    let two = lit::<T>(2.0);
    let p0 = one;
    if n == 0 {
        return p0;
    }
    let p1 = (a + one) + (a + b + two) * (x - one) / two;
    let (mut pm, mut p) = (p0, p1);
    for k in 2..=n {
        let k = idx::<T>(k);
        let s = two * k + a + b;
        let c1 = two * k * (k + a + b) * (s - two);
        let c2 = (s - one) * (s * (s - two) * x + a * a - b * b);
        let c3 = two * (k + a - one) * (k + b - one) * s;
        let next = (c2 * p - c3 * pm) / c1;
        pm = p;
        p = next;
    }
    p
}

/// Normalizing factor c_n making c_n P_n(cos θ) orthonormal in L²(dμ⁺).
pub fn norm_const<T: Real>(params: &JacobiParams<T>, n: usize) -> T {
    let (a, b) = (params.alpha, params.beta);
    let one = T::one();
    let nn = idx::<T>(n);
    // (2n+a+b+1) Γ(n+a+b+1) becomes Γ(a+b+2) at n = 0, covering a+b = −1.
    let head = if n == 0 {
        ln_gamma(a + b + lit(2.0))
    } else {
        (lit::<T>(2.0) * nn + a + b + one).ln() + ln_gamma(nn + a + b + one)
    };
    let log_sq = head + ln_gamma(nn + one) - ln_gamma(nn + a + one) - ln_gamma(nn + b + one);
    (log_sq * lit(0.5)).exp()
}

fn clamp_theta<T: Real>(theta: T) -> T {
    let eps = lit::<T>(ENDPOINT_EPS);
    let pi = T::PI();
    let s = theta.signum();
    let a = theta.abs();
    s * a.max(eps).min(pi - eps)
}

/// 𝒫_n(θ) = c_n P_n(cos θ).
pub fn eval_trig_poly<T: Real>(params: &JacobiParams<T>, n: usize, theta: T) -> T {
    let x = clamp_theta(theta).cos();
    norm_const(params, n) * eval_jacobi_unchecked(params.alpha, params.beta, n, x)
}

/// d𝒫_n/dθ = −½ √(n(n+α+β+1)) sin θ 𝒫_{n−1}^{α+1,β+1}(θ).
pub fn eval_trig_poly_deriv<T: Real>(params: &JacobiParams<T>, n: usize, theta: T) -> T {
    if n == 0 {
        return T::zero();
    }
    let th = clamp_theta(theta);
    -lit::<T>(0.5)
        * params.lambda_gap(n).sqrt()
        * th.sin()
        * eval_trig_poly(&params.shifted(), n - 1, th)
}

/// Recurrence coefficients of the orthonormal family in x = cos θ:
/// x 𝒫_n = a_{n+1} 𝒫_{n+1} + b_n 𝒫_n + a_n 𝒫_{n−1}.
pub fn recurrence_coeffs<T: Real>(params: &JacobiParams<T>, n: usize) -> (T, T) {
    let (a, b) = (params.alpha, params.beta);
    let one = T::one();
    let two = lit::<T>(2.0);
    let nn = idx::<T>(n);
    let diag = if n == 0 {
        (b - a) / (a + b + two)
    } else {
        let s = two * nn + a + b;
        (b * b - a * a) / (s * (s + two))
    };
    let off_sq = if n == 0 {
        T::zero()
    } else if n == 1 {
        lit::<T>(4.0) * (one + a) * (one + b) / ((a + b + two).powi(2) * (a + b + lit(3.0)))
    } else {
        let s = two * nn + a + b;
        lit::<T>(4.0) * nn * (nn + a) * (nn + b) * (nn + a + b) / (s * s * (s + one) * (s - one))
    };
    (diag, off_sq.sqrt())
}

/// Table [𝒫_0(θ), …, 𝒫_{n_max}(θ)] by the orthonormal recurrence.
pub fn trig_poly_table<T: Real>(params: &JacobiParams<T>, n_max: usize, theta: T) -> Vec<T> {
    let x = clamp_theta(theta).cos();
    let mut out = Vec::with_capacity(n_max + 1);
    let p0 = total_mass_exact(params).sqrt().recip();
    out.push(p0);
    if n_max == 0 {
        return out;
    }
    let (b0, _) = recurrence_coeffs(params, 0);
    let (_, a1) = recurrence_coeffs(params, 1);
    out.push((x - b0) * p0 / a1);
    let mut a_prev = a1;
    for n in 1..n_max {
        let (bn, _) = recurrence_coeffs(params, n);
        let (_, an1) = recurrence_coeffs(params, n + 1);
        let next = ((x - bn) * out[n] - a_prev * out[n - 1]) / an1;
        out.push(next);
        a_prev = an1;
    }
    out
}

/// Tables of 𝒫_n, d𝒫_n/dθ and d²𝒫_n/dθ² for n ≤ n_max.
pub struct TrigDerivTable<T> {
    pub value: Vec<T>,
    pub d1: Vec<T>,
    pub d2: Vec<T>,
}

/// Values and first two θ-derivatives of the orthonormal family at θ.
pub fn trig_poly_deriv_table<T: Real>(
    params: &JacobiParams<T>,
    n_max: usize,
    theta: T,
) -> TrigDerivTable<T> {
    let th = clamp_theta(theta);
    let value = trig_poly_table(params, n_max, th);
    let shifted = if n_max > 0 {
        trig_poly_table(&params.shifted(), n_max - 1, th)
    } else {
        Vec::new()
    };
    let (s, c) = (th.sin(), th.cos());
    let lam0_coef = params.alpha - params.beta + params.sigma() * c;
    let half = lit::<T>(0.5);
    let mut d1 = vec![T::zero(); n_max + 1];
    let mut d2 = vec![T::zero(); n_max + 1];
    for n in 1..=n_max {
        let g = params.lambda_gap(n);
        let k = -half * g.sqrt() * shifted[n - 1];
        d1[n] = k * s;
        // 𝒫'' = −A 𝒫' − (λ_n − λ₀) 𝒫 with A sinθ = α−β+(α+β+1)cosθ
        d2[n] = -lam0_coef * k - g * value[n];
    }
    TrigDerivTable { value, d1, d2 }
}

/// μ⁺(0, π) = B(α+1, β+1).
pub fn total_mass_exact<T: Real>(params: &JacobiParams<T>) -> T {
    beta(params.alpha + T::one(), params.beta + T::one())
}

/// μ⁺(0, π) by Gauss–Jacobi quadrature of the density.
pub fn total_mass(params: &JacobiParams<f64>) -> Result<f64> {
    let rule = crate::quadrature::mu_plus_rule(params, 64)?;
    Ok(rule.weights.iter().sum())
}

/// 𝒥 applied to samples on the uniform grid θ_j = θ₀ + j h by central differences.
/// Returns values at the interior points j = 1..len−2.
pub fn jacobi_operator_apply_pointwise(
    params: &JacobiParams<f64>,
    theta0: f64,
    h: f64,
    values: &[f64],
) -> Result<Vec<f64>> {
    if values.len() < 5 {
        return domain("grid too coarse: at least 5 points required");
    }
    if theta0 <= 0.0 || theta0 + h * (values.len() - 1) as f64 >= std::f64::consts::PI {
        return domain("grid must lie inside (0, π)");
    }
    let lam0 = params.lambda(0);
    let out = (1..values.len() - 1)
        .map(|j| {
            let th = theta0 + h * j as f64;
            let d2 = (values[j + 1] - 2.0 * values[j] + values[j - 1]) / (h * h);
            let d1 = (values[j + 1] - values[j - 1]) / (2.0 * h);
            let a = (params.alpha - params.beta + params.sigma() * th.cos()) / th.sin();
            -d2 - a * d1 + lam0 * values[j]
        })
        .collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn p(a: f64, b: f64) -> JacobiParams<f64> {
        JacobiParams::new(a, b).unwrap()
    }

    #[test]
    fn low_degree_closed_forms() {
        let q = p(0.0, 0.0);
        assert_eq!(eval_jacobi(&q, 0, 0.3).unwrap(), 1.0);
        assert_eq!(eval_jacobi(&q, 1, 1.0).unwrap(), 1.0);
        // Legendre P_3(x) = (5x³ − 3x)/2
        let x = 0.41;
        assert!((eval_jacobi(&q, 3, x).unwrap() - (5.0 * x * x * x - 3.0 * x) / 2.0).abs() < 1e-15);
        assert!(eval_jacobi(&q, 2, 1.5).is_err());
    }

    #[test]
    fn rodrigues_oracle_degree_five() {
        // P_n^{a,b}(x) = Σ_k C(n+a, n−k) C(n+b, k) ((x−1)/2)^k ((x+1)/2)^{n−k}
        let (a, b, n, x) = (0.5f64, -0.5f64, 5usize, 0.7f64);
        let gbin = |z: f64, k: usize| crate::special::binom(z, k);
        let mut s = 0.0;
        for k in 0..=n {
            s += gbin(n as f64 + a, n - k)
                * gbin(n as f64 + b, k)
                * ((x - 1.0) / 2.0).powi(k as i32)
                * ((x + 1.0) / 2.0).powi((n - k) as i32);
        }
        let v = eval_jacobi(&p(a, b), n, x).unwrap();
        assert!((v - s).abs() < 1e-13, "{v} vs {s}");
    }

    #[test]
    fn chebyshev_normalization() {
        let q = p(-0.5, -0.5);
        assert!((norm_const(&q, 0) - 1.0 / PI.sqrt()).abs() < 1e-14);
        for &th in &[0.2, 1.0, 2.9] {
            let v = eval_trig_poly(&q, 3, th);
            assert!((v - (2.0 / PI).sqrt() * (3.0 * th).cos()).abs() < 1e-13);
        }
    }

    #[test]
    fn orthonormal_table_matches_normalized_recurrence() {
        for &(a, b) in &[(0.5, 2.0), (-0.5, -0.5), (3.0, -0.5), (-0.8, 0.3)] {
            let q = p(a, b);
            let table = trig_poly_table(&q, 40, 1.1);
            for n in 0..=40 {
                let direct = eval_trig_poly(&q, n, 1.1);
                assert!(
                    (table[n] - direct).abs() < 1e-11 * direct.abs().max(1.0),
                    "({a},{b}) n={n}"
                );
            }
        }
    }

    #[test]
    fn spectrum_examples() {
        let s = spectrum(&p(0.0, 0.0), 2);
        assert_eq!((s.bracket_n, s.lambda), (1, 2.25));
        assert_eq!(spectrum(&p(-0.5, -0.5), 0).lambda, 0.0);
        let s = spectrum(&p(-0.5, -0.5), 5);
        assert_eq!((s.bracket_n, s.lambda), (3, 9.0));
    }

    #[test]
    fn derivative_table_matches_rule_and_ode() {
        let q = p(0.5, 2.0);
        let th = 0.9;
        let t = trig_poly_deriv_table(&q, 12, th);
        let h = 1e-4;
        for n in 0..=12 {
            assert!(
                (t.d1[n] - eval_trig_poly_deriv(&q, n, th)).abs() < 1e-12 * (1.0 + t.d1[n].abs())
            );
            let fd = (eval_trig_poly(&q, n, th + h) - 2.0 * eval_trig_poly(&q, n, th)
                + eval_trig_poly(&q, n, th - h))
                / (h * h);
            assert!((t.d2[n] - fd).abs() < 1e-5 * (1.0 + fd.abs()), "n={n}");
        }
    }

    #[test]
    fn constant_under_jacobi_operator() {
        let q = p(0.5, 2.0);
        let vals = vec![1.0; 9];
        let out = jacobi_operator_apply_pointwise(&q, 0.5, 0.1, &vals).unwrap();
        for v in out {
            assert!((v - q.lambda(0)).abs() < 1e-12);
        }
        assert!(jacobi_operator_apply_pointwise(&q, 0.5, 0.1, &[1.0; 4]).is_err());
    }

    #[test]
    fn total_mass_examples() {
        assert!((total_mass(&p(-0.5, -0.5)).unwrap() - PI).abs() < 1e-12);
        assert!((total_mass(&p(0.5, 0.5)).unwrap() - PI / 8.0).abs() < 1e-12);
        for &(a, b) in &[(0.5, 2.0), (3.0, -0.5), (-0.7, 1.3)] {
            let q = p(a, b);
            let exact = crate::special::gamma(a + 1.0) * crate::special::gamma(b + 1.0)
                / crate::special::gamma(a + b + 2.0);
            assert!((total_mass(&q).unwrap() / exact - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn validation() {
        assert!(JacobiParams::new(-1.0, 0.0).is_err());
        assert!(p(-0.5, -0.5).is_critical());
        assert!(p(-0.5, -0.5).kernel_valid());
        assert!(!p(-0.6, 0.0).kernel_valid());
    }
}
