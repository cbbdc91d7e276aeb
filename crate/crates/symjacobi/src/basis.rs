//! The symmetrized orthonormal system Φₙ on (−π, π), the difference-differential
//! operator D, the first-order pieces δ and δ*, and parity splitting.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::jacobi::{eval_trig_poly, trig_poly_table, JacobiParams};
use crate::quadrature::{default_mu_nodes, mu_plus_rule};
use crate::scalar::{lit, wide, Real};

/// Φₙ(θ): 𝒫_k(θ)/√2 for n = 2k, and sin θ 𝒫_k^{α+1,β+1}(θ)/(2√2) for n = 2k+1.
pub fn eval_phi<T: Real>(params: &JacobiParams<T>, n: usize, theta: T) -> T {
    let k = n / 2;
    if n.is_multiple_of(2) {
        eval_trig_poly(params, k, theta) / T::SQRT_2()
    } else {
        theta.sin() * eval_trig_poly(&params.shifted(), k, theta) / (lit::<T>(2.0) * T::SQRT_2())
    }
}

/// [Φ₀(θ), …, Φ_{n_max}(θ)] from the two orthonormal recurrences.
pub fn phi_table<T: Real>(params: &JacobiParams<T>, n_max: usize, theta: T) -> Vec<T> {
    let even = trig_poly_table(params, n_max / 2, theta);
    let odd = if n_max >= 1 {
        trig_poly_table(&params.shifted(), (n_max - 1) / 2, theta)
    } else {
        Vec::new()
    };
    let odd_scale = theta.sin() / (lit::<T>(2.0) * T::SQRT_2());
    (0..=n_max)
        .map(|n| {
            if n % 2 == 0 {
                even[n / 2] / T::SQRT_2()
            } else {
                odd[n / 2] * odd_scale
            }
        })
        .collect()
}

/// s_k = √(λ_k − λ₀).
pub fn gap_root<T: Real>(params: &JacobiParams<T>, k: usize) -> T {
    params.lambda_gap(k).sqrt()
}

/// Coefficients ⟨f, Φₙ⟩_{dμ} for n ≤ n_max.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymmetrizedCoeffs<T> {
    pub params: JacobiParams<T>,
    pub coeffs: Vec<T>,
    pub n_max: usize,
}

impl<T: Real> SymmetrizedCoeffs<T> {
    pub fn new(params: JacobiParams<T>, coeffs: Vec<T>) -> Self {
        let n_max = coeffs.len().saturating_sub(1);
        Self {
            params,
            coeffs,
            n_max,
        }
    }

    pub fn zeros(params: JacobiParams<T>, n_max: usize) -> Self {
        Self::new(params, vec![T::zero(); n_max + 1])
    }

    /// Unit coefficient at mode n.
    pub fn mode(params: JacobiParams<T>, n: usize, n_max: usize) -> Self {
        let mut c = Self::zeros(params, n_max.max(n));
        c.coeffs[n] = T::one();
        c
    }

    /// Σ cₙ², the squared L²(dμ) norm of the synthesized function.
    pub fn norm_sq(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |a, &c| a + c * c)
    }

    /// Pointwise combination a·self + b·other (lengths padded with zeros).
    pub fn combine(&self, a: T, other: &Self, b: T) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[T], i: usize| v.get(i).copied().unwrap_or(T::zero());
        let coeffs = (0..len)
            .map(|i| a * get(&self.coeffs, i) + b * get(&other.coeffs, i))
            .collect();
        Self::new(self.params, coeffs)
    }

    /// Even-index part (coefficients of the even part of f).
    pub fn even_part(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, &c)| if n % 2 == 0 { c } else { T::zero() })
            .collect();
        Self::new(self.params, coeffs)
    }

    /// Odd-index part.
    pub fn odd_part(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, &c)| if n % 2 == 1 { c } else { T::zero() })
            .collect();
        Self::new(self.params, coeffs)
    }

    /// CSV with an `index,value` header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("index,value\n");
        for (n, c) in self.coeffs.iter().enumerate() {
            let _ = writeln!(s, "{n},{:.17e}", wide(*c));
        }
        s
    }
}

/// ⟨f, Φₙ⟩_{dμ}, n ≤ n_max, with a dμ⁺ rule of `nodes` points on each half-line.
pub fn analyze_with_nodes<T: Real>(
    params: &JacobiParams<T>,
    f: impl Fn(T) -> T,
    n_max: usize,
    nodes: usize,
) -> Result<SymmetrizedCoeffs<T>> {
    if 2 * n_max > nodes {
        return Err(Error::Accuracy(format!(
            "n_max = {n_max} exceeds the resolution of a {nodes}-node rule"
        )));
    }
    let rule = mu_plus_rule(params, nodes)?;
    let mut coeffs = vec![T::zero(); n_max + 1];
    for (&th, &w) in rule.nodes.iter().zip(&rule.weights) {
        let (fp, fm) = (f(th), f(-th));
        let even = (fp + fm) * w;
        let odd = (fp - fm) * w;
        for (n, phi) in phi_table(params, n_max, th).into_iter().enumerate() {
            coeffs[n] = coeffs[n] + if n % 2 == 0 { even * phi } else { odd * phi };
        }
    }
    Ok(SymmetrizedCoeffs::new(*params, coeffs))
}

/// ⟨f, Φₙ⟩_{dμ} with a rule large enough for modes up to n_max.
pub fn analyze<T: Real>(
    params: &JacobiParams<T>,
    f: impl Fn(T) -> T,
    n_max: usize,
) -> Result<SymmetrizedCoeffs<T>> {
    let base = default_mu_nodes(&JacobiParams {
        alpha: wide(params.alpha),
        beta: wide(params.beta),
    });
    analyze_with_nodes(params, f, n_max, base.max(2 * n_max))
}

/// Σ cₙ Φₙ(θ) at each θ.
pub fn synthesize<T: Real>(coeffs: &SymmetrizedCoeffs<T>, thetas: &[T]) -> Vec<T> {
    thetas.iter().map(|&th| synthesize_at(coeffs, th)).collect()
}

pub fn synthesize_at<T: Real>(coeffs: &SymmetrizedCoeffs<T>, theta: T) -> T {
    phi_table(&coeffs.params, coeffs.n_max, theta)
        .into_iter()
        .zip(&coeffs.coeffs)
        .fold(T::zero(), |a, (p, &c)| a + p * c)
}

/// D^ℓ Φₙ = σ s_⟨n⟩^ℓ Φ_{n − (−1)ⁿ ℓ̃}: returns the target index and the factor σ s^ℓ,
/// or `None` when the image vanishes.
///
/// The signs follow from DΦ_{2k} = −s_k Φ_{2k−1} and DΦ_{2k−1} = s_k Φ_{2k}; the table is
/// indexed by ℓ mod 4.
pub fn d_power_coeff<T: Real>(
    params: &JacobiParams<T>,
    n: usize,
    ell: usize,
) -> Option<(usize, T)> {
    const EVEN_SIGNS: [i8; 4] = [1, -1, -1, 1];
    const ODD_SIGNS: [i8; 4] = [1, 1, -1, -1];
    let s = gap_root(params, n.div_ceil(2));
    if ell == 0 {
        return Some((n, T::one()));
    }
    if s == T::zero() {
        return None;
    }
    let odd_order = ell % 2 == 1;
    let (target, sign) = if n.is_multiple_of(2) {
        (
            if odd_order { n.checked_sub(1)? } else { n },
            EVEN_SIGNS[ell % 4],
        )
    } else {
        (if odd_order { n + 1 } else { n }, ODD_SIGNS[ell % 4])
    };
    let mag = s.powi(ell as i32);
    Some((target, if sign > 0 { mag } else { -mag }))
}

/// Coefficients of D^ℓ f.
pub fn d_apply_spectral<T: Real>(
    coeffs: &SymmetrizedCoeffs<T>,
    ell: usize,
) -> SymmetrizedCoeffs<T> {
    let len = coeffs.coeffs.len() + ell % 2;
    let mut out = vec![T::zero(); len];
    for (n, &c) in coeffs.coeffs.iter().enumerate() {
        if let Some((m, k)) = d_power_coeff(&coeffs.params, n, ell) {
            out[m] = out[m] + k * c;
        }
    }
    SymmetrizedCoeffs::new(coeffs.params, out)
}

/// Parity class of functions on (0, π) that δ_N acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Parity {
    Even,
    Odd,
}

/// δ_N^even Φ_{2n} = (−s_n)^N Φ_{2n−Ñ} and δ_N^odd Φ_{2n+1} = (−s_{n+1})^N Φ_{2n+1+Ñ},
/// where Ñ = N mod 2. Argument `n` is the Φ index; returns target index and factor.
pub fn delta_n_coeff<T: Real>(
    params: &JacobiParams<T>,
    n: usize,
    order: usize,
    parity: Parity,
) -> Option<(usize, T)> {
    let odd_order = order % 2;
    match parity {
        Parity::Even => {
            if n % 2 == 1 {
                return None;
            }
            let s = gap_root(params, n / 2);
            if order == 0 {
                return Some((n, T::one()));
            }
            if s == T::zero() {
                return None;
            }
            Some((n.checked_sub(odd_order)?, (-s).powi(order as i32)))
        }
        Parity::Odd => {
            if n.is_multiple_of(2) {
                return None;
            }
            let s = gap_root(params, n / 2 + 1);
            Some((n + odd_order, (-s).powi(order as i32)))
        }
    }
}

/// Sign σ with D^N f = σ δ_N f on the given parity class:
/// (−1)^{⌊N/2⌋} on even functions and (−1)^{⌈N/2⌉} on odd ones.
pub fn d_to_delta_sign(order: usize, parity: Parity) -> i8 {
    let k = match parity {
        Parity::Even => order / 2,
        Parity::Odd => order.div_ceil(2),
    };
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Samples on the uniform grid θ_j = θ₀ + j h.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFn<T> {
    pub theta0: T,
    pub h: T,
    pub values: Vec<T>,
}

impl<T: Real> GridFn<T> {
    pub fn theta(&self, j: usize) -> T {
        self.theta0 + self.h * lit(j as f64)
    }

    pub fn thetas(&self) -> Vec<T> {
        (0..self.values.len()).map(|j| self.theta(j)).collect()
    }

    /// Samples of f on (θ₀, θ₀ + (n−1)h).
    pub fn sample(theta0: T, h: T, n: usize, f: impl Fn(T) -> T) -> Self {
        let values = (0..n).map(|j| f(theta0 + h * lit(j as f64))).collect();
        Self { theta0, h, values }
    }

    /// 2m samples at θ_j = −L + (j + 1/2) h with h = L/m; symmetric about 0, avoiding 0.
    pub fn symmetric(half_width: T, m: usize, f: impl Fn(T) -> T) -> Self {
        let h = half_width / lit(m as f64);
        Self::sample(-half_width + h * lit(0.5), h, 2 * m, f)
    }

    fn is_symmetric(&self) -> bool {
        let last = self.theta(self.values.len() - 1);
        (self.theta0 + last).abs() <= self.h * lit(1e-9)
    }

    /// Drops the first and last sample.
    fn interior(&self, values: Vec<T>) -> Self {
        Self {
            theta0: self.theta0 + self.h,
            h: self.h,
            values,
        }
    }
}

fn central_first<T: Real>(g: &GridFn<T>, j: usize) -> T {
    (g.values[j + 1] - g.values[j - 1]) / (lit::<T>(2.0) * g.h)
}

/// A(θ) = (α − β + (α+β+1) cos θ)/sin θ.
pub fn drift<T: Real>(params: &JacobiParams<T>, theta: T) -> T {
    (params.alpha - params.beta + params.sigma() * theta.cos()) / theta.sin()
}

fn require_points<T>(g: &GridFn<T>) -> Result<()> {
    if g.values.len() < 5 {
        return domain("grid too coarse: at least 5 points required");
    }
    Ok(())
}

/// Df = f′ + A f_odd on a grid symmetric about 0 (central differences, interior points).
pub fn d_apply_pointwise<T: Real>(params: &JacobiParams<T>, f: &GridFn<T>) -> Result<GridFn<T>> {
    require_points(f)?;
    if !f.is_symmetric() {
        return domain("D needs a grid symmetric about 0");
    }
    let n = f.values.len();
    let half = lit::<T>(0.5);
    let out = (1..n - 1)
        .map(|j| {
            let odd = (f.values[j] - f.values[n - 1 - j]) * half;
            central_first(f, j) + drift(params, f.theta(j)) * odd
        })
        .collect();
    Ok(f.interior(out))
}

/// 𝕁f = −D²f + λ₀ f on a symmetric grid.
pub fn symmetrized_operator_pointwise<T: Real>(
    params: &JacobiParams<T>,
    f: &GridFn<T>,
) -> Result<GridFn<T>> {
    let d2 = d_apply_pointwise(params, &d_apply_pointwise(params, f)?)?;
    let lam0 = params.lambda(0);
    let values = d2
        .values
        .iter()
        .enumerate()
        .map(|(j, &v)| -v + lam0 * f.values[j + 2])
        .collect();
    Ok(GridFn { values, ..d2 })
}

/// δf = f′ (central differences, interior points).
pub fn delta_apply<T: Real>(f: &GridFn<T>) -> Result<GridFn<T>> {
    require_points(f)?;
    let out = (1..f.values.len() - 1)
        .map(|j| central_first(f, j))
        .collect();
    Ok(f.interior(out))
}

/// δ*f = −f′ − (α+1/2) cot(θ/2) f + (β+1/2) tan(θ/2) f.
pub fn delta_star_apply<T: Real>(params: &JacobiParams<T>, f: &GridFn<T>) -> Result<GridFn<T>> {
    require_points(f)?;
    let out = (1..f.values.len() - 1)
        .map(|j| -central_first(f, j) - drift(params, f.theta(j)) * f.values[j])
        .collect();
    Ok(f.interior(out))
}

/// δ_N on the parity class: δ_N^even = ⋯δ*δ (starting with δ), δ_N^odd = ⋯δδ* (starting with δ*).
pub fn delta_n_apply<T: Real>(
    params: &JacobiParams<T>,
    f: &GridFn<T>,
    order: usize,
    parity: Parity,
) -> Result<GridFn<T>> {
    let mut g = f.clone();
    for step in 0..order {
        let plain = (step % 2 == 0) == (parity == Parity::Even);
        g = if plain {
            delta_apply(&g)?
        } else {
            delta_star_apply(params, &g)?
        };
    }
    Ok(g)
}

/// Even and odd parts of a function on (−π, π), stored on the positive half.
#[derive(Clone, Debug, PartialEq)]
pub struct ParityParts<T> {
    pub even_part: GridFn<T>,
    pub odd_part: GridFn<T>,
}

/// Splits samples on a symmetric grid into parts on its positive half.
pub fn parity_split<T: Real>(f: &GridFn<T>) -> Result<ParityParts<T>> {
    let n = f.values.len();
    if n < 2 || !f.is_symmetric() {
        return domain("parity split needs a grid symmetric about 0");
    }
    let half = lit::<T>(0.5);
    let start = n / 2;
    let mut even = Vec::with_capacity(n - start);
    let mut odd = Vec::with_capacity(n - start);
    for j in start..n {
        let (p, m) = (f.values[j], f.values[n - 1 - j]);
        even.push((p + m) * half);
        odd.push((p - m) * half);
    }
    let theta0 = f.theta(start);
    Ok(ParityParts {
        even_part: GridFn {
            theta0,
            h: f.h,
            values: even,
        },
        odd_part: GridFn {
            theta0,
            h: f.h,
            values: odd,
        },
    })
}

impl<T: Real> ParityParts<T> {
    /// f(θ) = f_even(|θ|) + sign(θ) f_odd(|θ|) on the mirrored grid.
    pub fn reconstruct(&self) -> GridFn<T> {
        let m = self.even_part.values.len();
        let mut values = Vec::with_capacity(2 * m);
        for j in (0..m).rev() {
            values.push(self.even_part.values[j] - self.odd_part.values[j]);
        }
        for j in 0..m {
            values.push(self.even_part.values[j] + self.odd_part.values[j]);
        }
        GridFn {
            theta0: -self.even_part.theta(m - 1),
            h: self.even_part.h,
            values,
        }
    }
}

/// ⟨Φₙ, Φₘ⟩_{dμ} over (−π, π) using a dμ⁺ rule on the positive half.
pub fn phi_norm_check(params: &JacobiParams<f64>, n: usize, m: usize, nodes: usize) -> Result<f64> {
    let rule = mu_plus_rule(params, nodes)?;
    // the two halves contribute equally for matching parity, and cancel otherwise
    let half = rule.integrate(|t| eval_phi(params, n, t) * eval_phi(params, m, t));
    Ok(if (n + m).is_multiple_of(2) {
        2.0 * half
    } else {
        0.0
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn p(a: f64, b: f64) -> JacobiParams<f64> {
        JacobiParams::new(a, b).unwrap()
    }

    #[test]
    fn phi0_chebyshev_constant() {
        let q = p(-0.5, -0.5);
        assert!((eval_phi(&q, 0, 0.7) - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn table_matches_pointwise() {
        let q = p(0.5, 2.0);
        let t = phi_table(&q, 17, -1.3);
        for (n, v) in t.iter().enumerate() {
            assert!((v - eval_phi(&q, n, -1.3)).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn odd_phi_is_normalized_derivative() {
        // Φ_{2k−1} = −(λ_k − λ₀)^{-1/2} 𝒫_k′/√2
        let q = p(0.3, -0.2);
        for k in 1..6 {
            let d = crate::jacobi::eval_trig_poly_deriv(&q, k, 0.9);
            let expect = -d / (gap_root(&q, k) * 2f64.sqrt());
            assert!((eval_phi(&q, 2 * k - 1, 0.9) - expect).abs() < 1e-13);
        }
    }

    #[test]
    fn orthonormal_small() {
        let q = p(0.5, 2.0);
        for n in 0..8 {
            for m in 0..8 {
                let v = phi_norm_check(&q, n, m, 64).unwrap();
                let d = if n == m { 1.0 } else { 0.0 };
                assert!((v - d).abs() < 1e-12, "{n},{m}: {v}");
            }
        }
    }

    #[test]
    fn single_d_steps() {
        let q = p(0.5, 2.0);
        assert_eq!(d_power_coeff(&q, 0, 1), None);
        let (t, k) = d_power_coeff(&q, 2, 1).unwrap();
        assert_eq!(t, 1);
        assert!((k + gap_root(&q, 1)).abs() < 1e-15);
        let (t, k) = d_power_coeff(&q, 3, 1).unwrap();
        assert_eq!(t, 4);
        assert!((k - gap_root(&q, 2)).abs() < 1e-15);
        // ℓ = 2 multiplies by −(λ_⟨n⟩ − λ₀)
        for n in 1..9 {
            let (t, k) = d_power_coeff(&q, n, 2).unwrap();
            assert_eq!(t, n);
            assert!((k + q.lambda_gap(n.div_ceil(2))).abs() < 1e-12);
        }
    }

    #[test]
    fn d_sign_table_composes() {
        let q = p(0.2, 0.7);
        for n in 1..10 {
            for ell in 1..6 {
                let (t1, k1) = d_power_coeff(&q, n, ell).unwrap();
                let (t2, k2) = d_power_coeff(&q, t1, 1).unwrap();
                let (t, k) = d_power_coeff(&q, n, ell + 1).unwrap();
                assert_eq!(t, t2);
                assert!((k - k1 * k2).abs() < 1e-9 * k.abs());
            }
        }
    }

    #[test]
    fn delta_matches_d_up_to_sign() {
        let q = p(0.2, 0.7);
        for n in 0..10 {
            let parity = if n % 2 == 0 {
                Parity::Even
            } else {
                Parity::Odd
            };
            for order in 1..6 {
                let a = d_power_coeff(&q, n, order);
                let b = delta_n_coeff(&q, n, order, parity);
                match (a, b) {
                    (None, None) => {}
                    (Some((ta, ka)), Some((tb, kb))) => {
                        assert_eq!(ta, tb);
                        let s = d_to_delta_sign(order, parity) as f64;
                        assert!((ka - s * kb).abs() < 1e-9 * ka.abs());
                    }
                    other => panic!("mismatch {other:?} at n={n}, order={order}"),
                }
            }
        }
    }

    #[test]
    fn parity_round_trip() {
        let g = GridFn::symmetric(3.0, 20, |t: f64| t.sin() + t.cos() * 0.3 + t * t * t);
        let parts = parity_split(&g).unwrap();
        let back = parts.reconstruct();
        assert!((back.theta0 - g.theta0).abs() < 1e-14);
        for (a, b) in back.values.iter().zip(&g.values) {
            assert!((a - b).abs() <= 4.0 * f64::EPSILON * b.abs().max(1.0));
        }
        assert!(parity_split(&GridFn::sample(0.1, 0.1, 6, |t: f64| t)).is_err());
    }

    #[test]
    fn d_pointwise_constant_and_even() {
        let q = p(0.5, 2.0);
        let g = GridFn::symmetric(2.5, 40, |_| 3.0f64);
        assert!(d_apply_pointwise(&q, &g)
            .unwrap()
            .values
            .iter()
            .all(|v| v.abs() < 1e-12));
        let g = GridFn::sample(0.1, 0.1, 8, |t: f64| t);
        assert!(d_apply_pointwise(&q, &g).is_err());
    }

    #[test]
    fn delta_star_on_constants() {
        let q = p(0.5, 2.0);
        let g = GridFn::sample(0.5, 0.01, 7, |_| 1.0f64);
        let out = delta_star_apply(&q, &g).unwrap();
        for (j, v) in out.values.iter().enumerate() {
            let th = out.theta(j);
            let expect = -(q.alpha + 0.5) / (th / 2.0).tan() + (q.beta + 0.5) * (th / 2.0).tan();
            assert!((v - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn analyze_rejects_underresolved() {
        let q = p(0.0, 0.0);
        assert!(matches!(
            analyze_with_nodes(&q, |_| 1.0, 40, 64),
            Err(Error::Accuracy(_))
        ));
    }
}
