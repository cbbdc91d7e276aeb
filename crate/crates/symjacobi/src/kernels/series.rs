//! Spectral series for H_t, H̃_t, the symmetrized kernel and their derivatives.

use crate::basis::{gap_root, phi_table};
use crate::error::{Error, Result};
use crate::jacobi::{trig_poly_deriv_table, JacobiParams};

use super::KernelPoint;

/// Hard cap on the number of series terms.
pub const N_CAP: usize = 4096;
/// A term block is accepted once the tail bound falls below this fraction of Σ|terms|.
const REL_TAIL: f64 = 1e-15;
const CHECK_EVERY: usize = 8;

/// Heuristic bound for |𝒫_n(θ)|:
/// 2 min((n+1)^{a}, sin(θ/2)^{−a}) min((n+1)^{b}, cos(θ/2)^{−b}) with a = (α+1/2)⁺, b = (β+1/2)⁺.
pub fn envelope(params: &JacobiParams<f64>, theta: f64, n: usize) -> f64 {
    let ea = (params.alpha + 0.5).max(0.0);
    let eb = (params.beta + 0.5).max(0.0);
    let n1 = (n + 1) as f64;
    let s = (0.5 * theta).sin().abs().max(1e-300);
    let c = (0.5 * theta).cos().abs().max(1e-300);
    2.0 * n1.powf(ea).min(s.powf(-ea)) * n1.powf(eb).min(c.powf(-eb))
}

/// Forward summation of Σₙ (−rₙ)^j e^{−t rₙ} c_{n,q} for several quantities q at once,
/// stopping on an envelope-based tail bound.
#[derive(Clone, Debug)]
pub struct SeriesEngine {
    rates: Vec<f64>,
    coeffs: Vec<f64>,
    env: Vec<f64>,
    orders: Vec<u32>,
    nq: usize,
    /// polynomial degree of the envelope growth, used to delay the first tail check
    growth: f64,
}

impl SeriesEngine {
    /// `coeffs[n * nq + q]`, `env[n]` bounds |c_{n,q}|/(rₙ+1)^{orders[q]}.
    pub fn new(
        rates: Vec<f64>,
        coeffs: Vec<f64>,
        env: Vec<f64>,
        orders: Vec<u32>,
        growth: f64,
    ) -> Self {
        let nq = orders.len();
        debug_assert_eq!(coeffs.len(), rates.len() * nq);
        Self {
            rates,
            coeffs,
            env,
            orders,
            nq,
            growth,
        }
    }

    pub fn len(&self) -> usize {
        self.rates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }

    /// Values indexed `[q * jets + j]`.
    pub fn eval(&self, t: f64, jets: usize) -> Result<Vec<f64>> {
        let nq = self.nq;
        let mut acc = vec![0.0; nq * jets];
        let mut abs = vec![0.0; nq * jets];
        let margin = 1.0 / (-(-0.5 * t).exp_m1());
        let max_order = self.orders.iter().copied().max().unwrap_or(0) as f64 + jets as f64;
        let n_min = ((2.0 * (self.growth + max_order) / t).ceil() as usize).max(16);
        let len = self.rates.len();
        let mut worst = f64::INFINITY;
        for n in 0..len {
            let r = self.rates[n];
            let e = (-t * r).exp();
            let row = &self.coeffs[n * nq..(n + 1) * nq];
            for (q, &c) in row.iter().enumerate() {
                let mut v = c * e;
                for j in 0..jets {
                    acc[q * jets + j] += v;
                    abs[q * jets + j] += v.abs();
                    v *= -r;
                }
            }
            if n >= n_min && (n + 1) % CHECK_EVERY == 0 {
                let base = self.env[n] * e * margin;
                worst = 0.0;
                let mut done = true;
                for q in 0..nq {
                    let mut tail = base * (r + 1.0).powi(self.orders[q] as i32);
                    for j in 0..jets {
                        let scale = abs[q * jets + j];
                        if tail > REL_TAIL * scale && tail > 1e-300 {
                            done = false;
                            worst = worst.max(tail / scale.max(1e-300));
                        }
                        tail *= r + 1.0;
                    }
                }
                if done {
                    return Ok(acc);
                }
            }
        }
        Err(Error::Convergence {
            what: format!("kernel series at t = {t:.3e}"),
            tail: worst,
            n_max: len,
        })
    }
}

fn rates(params: &JacobiParams<f64>, shift: usize, n: usize) -> Vec<f64> {
    (0..n).map(|k| params.rate(k + shift)).collect()
}

/// Initial table length for a series at time t.
fn initial_len(t: f64, growth: f64) -> usize {
    let guess = (45.0 + 2.0 * growth) / t + 32.0;
    (guess.min(N_CAP as f64) as usize).max(64)
}

/// Runs `build(n)` on a growing table until the sum converges or the cap is hit.
fn grow<F>(t: f64, growth: f64, jets: usize, build: F) -> Result<Vec<f64>>
where
    F: Fn(usize) -> SeriesEngine,
{
    let mut n = initial_len(t, growth);
    loop {
        match build(n).eval(t, jets) {
            Err(Error::Convergence { .. }) if n < N_CAP => n = (2 * n).min(N_CAP),
            other => return other,
        }
    }
}

fn growth_of(params: &JacobiParams<f64>) -> f64 {
    2.0 * ((params.alpha + 0.5).max(0.0) + (params.beta + 0.5).max(0.0))
}

/// Derivative orders of a series term ½ Σ (−rₙ)^M e^{−t rₙ} 𝒫ₙ^{(a)}(θ) 𝒫ₙ^{(b)}(φ).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeriesSpec {
    pub t_order: usize,
    pub theta_deriv: usize,
    pub phi_deriv: usize,
}

/// ∂_t^M ∂_θ^a ∂_φ^b H_t(θ, φ) by the series (a, b ≤ 2).
pub fn series_term(
    params: &JacobiParams<f64>,
    point: &KernelPoint,
    spec: SeriesSpec,
) -> Result<f64> {
    if spec.theta_deriv > 2 || spec.phi_deriv > 2 {
        return crate::error::domain("θ/φ derivative orders above 2 are not tabulated");
    }
    let g = growth_of(params);
    let order = (spec.theta_deriv + spec.phi_deriv) as u32;
    let v = grow(point.t, g + order as f64, spec.t_order + 1, |n| {
        let a = trig_poly_deriv_table(params, n - 1, point.theta);
        let b = trig_poly_deriv_table(params, n - 1, point.phi);
        let pick = |tab: &crate::jacobi::TrigDerivTable<f64>, d: usize| match d {
            0 => tab.value.clone(),
            1 => tab.d1.clone(),
            _ => tab.d2.clone(),
        };
        let (fa, fb) = (pick(&a, spec.theta_deriv), pick(&b, spec.phi_deriv));
        let coeffs = (0..n).map(|k| 0.5 * fa[k] * fb[k]).collect();
        let env = (0..n)
            .map(|k| envelope(params, point.theta, k) * envelope(params, point.phi, k))
            .collect();
        SeriesEngine::new(rates(params, 0, n), coeffs, env, vec![order], g)
    })?;
    Ok(v[spec.t_order])
}

/// H_t(θ, φ) = ½ Σ e^{−t√λₙ} 𝒫ₙ(θ) 𝒫ₙ(φ), truncated automatically.
pub fn poisson_kernel_series(params: &JacobiParams<f64>, point: &KernelPoint) -> Result<f64> {
    series_term(
        params,
        point,
        SeriesSpec {
            t_order: 0,
            theta_deriv: 0,
            phi_deriv: 0,
        },
    )
}

/// H_t with the series cut after n_max (inclusive).
pub fn poisson_kernel_series_truncated(
    params: &JacobiParams<f64>,
    point: &KernelPoint,
    n_max: usize,
) -> f64 {
    let a = crate::jacobi::trig_poly_table(params, n_max, point.theta);
    let b = crate::jacobi::trig_poly_table(params, n_max, point.phi);
    (0..=n_max)
        .map(|n| 0.5 * (-point.t * params.rate(n)).exp() * a[n] * b[n])
        .sum()
}

/// H̃_t(θ, φ) = Σ_m e^{−t√λ_{m+1}} Φ_{2m+1}(θ) Φ_{2m+1}(φ) through the odd-indexed Φ.
pub fn tilde_kernel_series(params: &JacobiParams<f64>, point: &KernelPoint) -> Result<f64> {
    let shifted = params.shifted();
    let g = growth_of(&shifted);
    let v = grow(point.t, g, 1, |n| {
        let a = phi_table(params, 2 * n - 1, point.theta);
        let b = phi_table(params, 2 * n - 1, point.phi);
        let coeffs = (0..n).map(|m| a[2 * m + 1] * b[2 * m + 1]).collect();
        let env = (0..n)
            .map(|m| envelope(&shifted, point.theta, m) * envelope(&shifted, point.phi, m))
            .collect();
        SeriesEngine::new(rates(params, 1, n), coeffs, env, vec![0], g)
    })?;
    Ok(v[0])
}

/// ℍ_t(θ, φ) = Σₙ e^{−t√λ_⟨n⟩} Φₙ(θ) Φₙ(φ) on (−π, π)².
pub fn symmetrized_kernel(params: &JacobiParams<f64>, point: &KernelPoint) -> Result<f64> {
    let shifted = params.shifted();
    let g = growth_of(&shifted);
    let v = grow(point.t, g, 1, |n| {
        let a = phi_table(params, 2 * n - 1, point.theta);
        let b = phi_table(params, 2 * n - 1, point.phi);
        // pair Φ_{2k} with Φ_{2k−1} so both share the rate √λ_k
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            let mut c = a[2 * k] * b[2 * k];
            if k >= 1 {
                c += a[2 * k - 1] * b[2 * k - 1];
            }
            coeffs.push(c);
        }
        let env = (0..n)
            .map(|k| {
                envelope(params, point.theta, k) * envelope(params, point.phi, k)
                    + envelope(&shifted, point.theta, k) * envelope(&shifted, point.phi, k)
            })
            .collect();
        SeriesEngine::new(rates(params, 0, n), coeffs, env, vec![0], g)
    })?;
    Ok(v[0])
}

/// The θ-operator applied to the kernel in `kernel_derivative`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaOp {
    /// ∂_t^M H_t.
    None,
    /// ∂_t^M δ_N^even H_t.
    DeltaEvenN(usize),
    /// ∂_t^M δ_N^odd H̃_t; `DeltaOddN(0)` is ∂_t^M H̃_t.
    DeltaOddN(usize),
}

/// ∂_t^M δ_N H_t (or H̃_t) by term-wise differentiation of the series, using
/// δ_N^even Φ_{2k} = (−s_k)^N Φ_{2k−Ñ} and δ_N^odd Φ_{2m+1} = (−s_{m+1})^N Φ_{2m+1+Ñ}.
pub fn kernel_derivative(
    params: &JacobiParams<f64>,
    point: &KernelPoint,
    t_order: usize,
    op: ThetaOp,
) -> Result<f64> {
    let (odd, order) = match op {
        ThetaOp::None => (false, 0),
        ThetaOp::DeltaEvenN(n) => (false, n),
        ThetaOp::DeltaOddN(n) => (true, n),
    };
    let nt = order % 2;
    let fam = if odd { params.shifted() } else { *params };
    let g = growth_of(&params.shifted()) + order as f64;
    let v = grow(point.t, g, t_order + 1, |n| {
        let a = phi_table(params, 2 * n + 1, point.theta);
        let b = phi_table(params, 2 * n + 1, point.phi);
        let mut coeffs = Vec::with_capacity(n);
        let mut env = Vec::with_capacity(n);
        for k in 0..n {
            let (src, gap) = if odd {
                (2 * k + 1, gap_root(params, k + 1))
            } else {
                (2 * k, gap_root(params, k))
            };
            let target = if odd { src + nt } else { src.wrapping_sub(nt) };
            let factor = (-gap).powi(order as i32);
            let c = if target > 2 * n + 1 || (order > 0 && factor == 0.0) {
                0.0
            } else {
                factor * a[target] * b[src]
            };
            coeffs.push(c);
            env.push(
                envelope(&fam, point.theta, k)
                    * envelope(&fam, point.phi, k)
                    * (1.0 + gap).powi(order as i32),
            );
        }
        SeriesEngine::new(rates(params, odd as usize, n), coeffs, env, vec![0], g)
    })?;
    Ok(v[t_order])
}
