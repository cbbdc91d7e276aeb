//! Gauss rules for dμ⁺ on (0, π), for dΠ_α on [−1, 1], composite Gauss–Legendre
//! helpers and exact ball measures.

use std::fmt::Write as _;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{domain, Error, Result};
use crate::jacobi::{recurrence_coeffs, JacobiParams};
use crate::scalar::{lit, wide, Real};
use crate::special::{beta, gamma};

/// Which measure a rule integrates against.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MeasureTag<T> {
    /// (1−x)^a (1+x)^b dx on [−1, 1].
    Jacobi { a: T, b: T },
    /// dμ⁺_{α,β} on (0, π).
    MuPlus(JacobiParams<T>),
    /// The probability measure dΠ_α on [−1, 1].
    Pi(T),
    /// Lebesgue measure in t.
    LebesgueT,
}

/// Nodes and positive weights.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
    pub measure_tag: MeasureTag<T>,
}

impl<T: Real> QuadratureRule<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Σ wᵢ f(xᵢ).
    pub fn integrate(&self, mut f: impl FnMut(T) -> T) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (&x, &w)| acc + w * f(x))
    }

    pub fn mass(&self) -> T {
        self.weights.iter().fold(T::zero(), |a, &w| a + w)
    }

    /// CSV with a `node,weight` header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("node,weight\n");
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let _ = writeln!(s, "{:.17e},{:.17e}", wide(*x), wide(*w));
        }
        s
    }
}

/// The probability measure dΠ_α: a density for α > −1/2, two atoms at α = −1/2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PiKind {
    Density,
    Atoms,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PiMeasure {
    pub alpha: f64,
    pub kind: PiKind,
}

impl PiMeasure {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha >= -0.5) {
            return domain(format!("Π_α requires α ≥ -1/2, got {alpha}"));
        }
        let kind = if alpha == -0.5 {
            PiKind::Atoms
        } else {
            PiKind::Density
        };
        Ok(Self { alpha, kind })
    }

    /// Normalizing constant of (1 − u²)^{α−1/2} du.
    pub fn density_norm(&self) -> f64 {
        gamma(self.alpha + 1.0) / (std::f64::consts::PI.sqrt() * gamma(self.alpha + 0.5))
    }
}

/// Orthonormal polynomial value and derivative of degree n at x, plus Σ_{k<n} p_k².
fn orthonormal_eval(p: &JacobiParams<f64>, mass: f64, n: usize, x: f64) -> (f64, f64, f64) {
    let mut pm = 0.0;
    let mut dpm = 0.0;
    let mut pc = mass.sqrt().recip();
    let mut dpc = 0.0;
    let mut sum = 0.0;
    let mut a_k = 0.0;
    for k in 0..n {
        sum += pc * pc;
        let (bk, _) = recurrence_coeffs(p, k);
        let (_, ak1) = recurrence_coeffs(p, k + 1);
        let pn = ((x - bk) * pc - a_k * pm) / ak1;
        let dpn = (pc + (x - bk) * dpc - a_k * dpm) / ak1;
        pm = pc;
        dpm = dpc;
        pc = pn;
        dpc = dpn;
        a_k = ak1;
    }
    (pc, dpc, sum)
}

fn gauss_jacobi_f64(a: f64, b: f64, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return domain("quadrature needs at least one node");
    }
    if !(a > -1.0 && b > -1.0) {
        return domain(format!(
            "Gauss–Jacobi exponents must exceed -1, got ({a}, {b})"
        ));
    }
    let p = JacobiParams { alpha: a, beta: b };
    let mass = 2f64.powf(a + b + 1.0) * beta(a + 1.0, b + 1.0);
    let mut m = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        m[(k, k)] = recurrence_coeffs(&p, k).0;
        if k + 1 < n {
            let off = recurrence_coeffs(&p, k + 1).1;
            m[(k, k + 1)] = off;
            m[(k + 1, k)] = off;
        }
    }
    let eig = SymmetricEigen::try_new(m, 1e-15, 10_000)
        .ok_or_else(|| Error::Internal(format!("tridiagonal eigen-solver failed for n = {n}")))?;
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    nodes.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut weights = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let (pv, dp, _) = orthonormal_eval(&p, mass, n, *x);
            if dp == 0.0 {
                break;
            }
            let step = pv / dp;
            *x = (*x - step).clamp(-1.0, 1.0);
            if step.abs() < 1e-17 {
                break;
            }
        }
        let (_, _, s) = orthonormal_eval(&p, mass, n, *x);
        weights.push(s.recip());
    }
    for w in 1..n {
        if !(nodes[w] > nodes[w - 1]) {
            return Err(Error::Internal(format!(
                "coalescing Gauss–Jacobi nodes for n = {n}"
            )));
        }
    }
    Ok((nodes, weights))
}

/// Gauss–Jacobi rule for (1−x)^a (1+x)^b on [−1, 1], exact to degree 2n − 1.
pub fn gauss_jacobi_rule<T: Real>(a: T, b: T, n_nodes: usize) -> Result<QuadratureRule<T>> {
    let (x, w) = gauss_jacobi_f64(wide(a), wide(b), n_nodes)?;
    Ok(QuadratureRule {
        nodes: x.into_iter().map(lit).collect(),
        weights: w.into_iter().map(lit).collect(),
        measure_tag: MeasureTag::Jacobi { a, b },
    })
}

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    gauss_jacobi_f64(0.0, 0.0, n).expect("Legendre rule is well posed")
}

/// Rule for dμ⁺_{α,β}(θ) = sin^{2α+1}(θ/2) cos^{2β+1}(θ/2) dθ via x = cos θ.
pub fn mu_plus_rule<T: Real>(
    params: &JacobiParams<T>,
    n_nodes: usize,
) -> Result<QuadratureRule<T>> {
    let (a, b) = (wide(params.alpha), wide(params.beta));
    let (x, w) = gauss_jacobi_f64(a, b, n_nodes)?;
    let scale = 2f64.powf(-a - b - 1.0);
    let (nodes, weights) = x
        .iter()
        .zip(&w)
        .rev()
        .map(|(&x, &w)| (lit::<T>(x.acos()), lit::<T>(w * scale)))
        .unzip();
    Ok(QuadratureRule {
        nodes,
        weights,
        measure_tag: MeasureTag::MuPlus(*params),
    })
}

/// Default node count for dμ⁺ (doubled when α + β > 6).
pub fn default_mu_nodes(params: &JacobiParams<f64>) -> usize {
    if params.alpha + params.beta > 6.0 {
        128
    } else {
        64
    }
}

/// Rule for dΠ_α; the two atoms at ±1 when α = −1/2.
pub fn pi_rule(alpha: f64, n_nodes: usize) -> Result<QuadratureRule<f64>> {
    let m = PiMeasure::new(alpha)?;
    match m.kind {
        PiKind::Atoms => Ok(QuadratureRule {
            nodes: vec![-1.0, 1.0],
            weights: vec![0.5, 0.5],
            measure_tag: MeasureTag::Pi(alpha),
        }),
        PiKind::Density => {
            let (x, w) = gauss_jacobi_f64(alpha - 0.5, alpha - 0.5, n_nodes)?;
            let c = m.density_norm();
            Ok(QuadratureRule {
                nodes: x,
                weights: w.into_iter().map(|w| w * c).collect(),
                measure_tag: MeasureTag::Pi(alpha),
            })
        }
    }
}

/// dΠ_α resolved near u = 1 by panels in x = 1 − u with edges 0, h₀, 3h₀, 7h₀, … up to 1,
/// followed by [1, 2]. Panels touching an endpoint carry the Jacobi weight exactly.
/// Nodes are returned in u, decreasing.
pub fn graded_pi_rule(alpha: f64, h0: f64, per_panel: usize) -> Result<QuadratureRule<f64>> {
    let mut r = graded_pi_rule_x(alpha, h0, per_panel)?;
    r.nodes.iter_mut().for_each(|x| *x = 1.0 - *x);
    Ok(r)
}

/// As [`graded_pi_rule`] but with nodes in x = 1 − u (increasing), which keeps full
/// relative precision close to u = 1.
pub fn graded_pi_rule_x(alpha: f64, h0: f64, per_panel: usize) -> Result<QuadratureRule<f64>> {
    let m = PiMeasure::new(alpha)?;
    if m.kind == PiKind::Atoms {
        return Ok(QuadratureRule {
            nodes: vec![0.0, 2.0],
            weights: vec![0.5, 0.5],
            measure_tag: MeasureTag::Pi(alpha),
        });
    }
    if !(h0 > 0.0) {
        return domain("graded rule needs a positive first panel");
    }
    let e = alpha - 0.5;
    let c = m.density_norm();
    let (gl_x, gl_w) = gauss_legendre(per_panel);
    let (lj_x, lj_w) = gauss_jacobi_f64(0.0, e, per_panel)?;
    let (rj_x, rj_w) = gauss_jacobi_f64(e, 0.0, per_panel)?;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    // density in x: (x (2 − x))^e
    let mut lo = 0.0;
    let mut width = h0.min(1.0);
    loop {
        let hi = (lo + width).min(1.0);
        let half = 0.5 * (hi - lo);
        if lo == 0.0 {
            // x^e on [0, hi]: x = half (1 + v), weight (1+v)^e half^{e+1}
            let s = half.powf(e + 1.0);
            for (&v, &w) in lj_x.iter().zip(&lj_w) {
                let x = half * (1.0 + v);
                nodes.push(x);
                weights.push(c * w * s * (2.0 - x).powf(e));
            }
        } else {
            for (&v, &w) in gl_x.iter().zip(&gl_w) {
                let x = lo + half * (1.0 + v);
                nodes.push(x);
                weights.push(c * w * half * (x * (2.0 - x)).powf(e));
            }
        }
        if hi >= 1.0 {
            break;
        }
        lo = hi;
        width *= 2.0;
    }
    // [1, 2]: (2 − x)^e with x = 1.5 + 0.5 v, 2 − x = 0.5 (1 − v)
    let s = 0.5f64.powf(e + 1.0);
    for (&v, &w) in rj_x.iter().zip(&rj_w) {
        let x = 1.5 + 0.5 * v;
        nodes.push(x);
        weights.push(c * w * s * x.powf(e));
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        measure_tag: MeasureTag::Pi(alpha),
    })
}

/// Composite Gauss–Legendre rule over consecutive breakpoints.
pub fn composite_gauss_legendre(breaks: &[f64], per_panel: usize) -> QuadratureRule<f64> {
    let (gx, gw) = gauss_legendre(per_panel);
    let mut nodes = Vec::with_capacity(breaks.len().saturating_sub(1) * per_panel);
    let mut weights = Vec::with_capacity(nodes.capacity());
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if b <= a {
            continue;
        }
        let half = 0.5 * (b - a);
        for (&v, &w) in gx.iter().zip(&gw) {
            nodes.push(a + half * (1.0 + v));
            weights.push(w * half);
        }
    }
    QuadratureRule {
        nodes,
        weights,
        measure_tag: MeasureTag::LebesgueT,
    }
}

/// Incomplete Beta integral ∫ s^α (1−s)^β ds over [y0, y1] ⊂ [0, 1], stable for short intervals.
pub fn beta_interval(alpha: f64, beta_: f64, y0: f64, y1: f64) -> f64 {
    if y1 <= y0 {
        return 0.0;
    }
    if y1 <= 0.5 {
        lower_piece(alpha, beta_, y0, y1)
    } else if y0 >= 0.5 {
        lower_piece(beta_, alpha, 1.0 - y1, 1.0 - y0)
    } else {
        lower_piece(alpha, beta_, y0, 0.5) + lower_piece(beta_, alpha, 1.0 - y1, 0.5)
    }
}

const BALL_NODES: usize = 24;

/// ∫_{y0}^{y1} s^a (1−s)^b ds with 0 ≤ y0 < y1 ≤ 1/2.
fn lower_piece(a: f64, b: f64, y0: f64, y1: f64) -> f64 {
    let len = y1 - y0;
    let f = |s: f64| s.powf(a) * (1.0 - s).powf(b);
    let direct = |lo: f64, hi: f64| -> f64 {
        let (x, w) = gauss_legendre(BALL_NODES);
        let h = 0.5 * (hi - lo);
        x.iter()
            .zip(&w)
            .map(|(&v, &w)| w * h * f(lo + h * (1.0 + v)))
            .sum()
    };
    if y0 >= len {
        direct(y0, y1)
    } else if a > -1.0 {
        lower_cdf(a, b, y1) - lower_cdf(a, b, y0)
    } else if y0 == 0.0 {
        f64::INFINITY
    } else {
        // non-integrable at 0: geometric pieces, each at least its own length away from 0
        let mut acc = 0.0;
        let mut lo = y0;
        while lo < y1 {
            let hi = (2.0 * lo).min(y1);
            acc += direct(lo, hi);
            lo = hi;
        }
        acc
    }
}

/// ∫_0^y s^a (1−s)^b ds for y ≤ 1/2.
fn lower_cdf(a: f64, b: f64, y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    let (x, w) = gauss_jacobi_f64(0.0, a, BALL_NODES).expect("valid exponents");
    let h = 0.5 * y;
    let scale = h.powf(a + 1.0);
    x.iter()
        .zip(&w)
        .map(|(&v, &w)| w * scale * (1.0 - h * (1.0 + v)).powf(b))
        .sum()
}

/// μ⁺ of the interval (θ₀, θ₁) ∩ (0, π).
pub fn mu_plus_interval(params: &JacobiParams<f64>, theta0: f64, theta1: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let lo = theta0.max(0.0);
    let hi = theta1.min(pi);
    if hi <= lo {
        return 0.0;
    }
    let y = |t: f64| {
        let s = (0.5 * t).sin();
        s * s
    };
    // dμ⁺ = y^α (1−y)^β dy after y = sin²(θ/2)
    let y0 = if lo == 0.0 { 0.0 } else { y(lo) };
    let y1 = if hi == pi { 1.0 } else { y(hi) };
    beta_interval(params.alpha, params.beta, y0, y1)
}

/// Exact μ⁺(B(θ, |θ − φ|)).
pub fn ball_measure(params: &JacobiParams<f64>, theta: f64, phi: f64) -> Result<f64> {
    if theta == phi {
        return domain("zero-radius ball: θ = φ");
    }
    let r = (theta - phi).abs();
    Ok(mu_plus_interval(params, theta - r, theta + r))
}

/// The comparable size r (θ+φ)^{2α+1} (2π−θ−φ)^{2β+1} of the ball B(θ, |θ−φ|).
pub fn ball_measure_comparable(params: &JacobiParams<f64>, theta: f64, phi: f64) -> f64 {
    let pi = std::f64::consts::PI;
    (theta - phi).abs()
        * (theta + phi).powf(2.0 * params.alpha + 1.0)
        * (2.0 * pi - theta - phi).powf(2.0 * params.beta + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn legendre_small_rules() {
        let r = gauss_jacobi_rule(0.0f64, 0.0, 1).unwrap();
        assert!(r.nodes[0].abs() < 1e-15 && (r.weights[0] - 2.0).abs() < 1e-14);
        let r = gauss_jacobi_rule(0.0f64, 0.0, 2).unwrap();
        let n = 1.0 / 3f64.sqrt();
        assert!((r.nodes[0] + n).abs() < 1e-15 && (r.nodes[1] - n).abs() < 1e-15);
        assert!((r.weights[0] - 1.0).abs() < 1e-14 && (r.weights[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn second_moment_exactness() {
        let r = gauss_jacobi_rule(0.5f64, 0.5, 8).unwrap();
        // ∫ x² √(1−x²) dx = π/8
        assert!((r.integrate(|x| x * x) - PI / 8.0).abs() < 1e-13);
    }

    #[test]
    fn large_rules_are_accurate() {
        for &(a, b) in &[(0.0, 0.0), (-0.5, 1.5), (2.5, -0.3)] {
            let r = gauss_jacobi_rule::<f64>(a, b, 512).unwrap();
            let mass = 2f64.powf(a + b + 1.0) * beta(a + 1.0, b + 1.0);
            assert!((r.mass() / mass - 1.0).abs() < 1e-12, "({a},{b})");
            assert!(r.weights.iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn mu_plus_orthonormality() {
        let p = JacobiParams::new(0.5f64, 2.0).unwrap();
        let r = mu_plus_rule(&p, 64).unwrap();
        let v = |n, th| crate::jacobi::eval_trig_poly(&p, n, th);
        assert!((r.integrate(|t| v(2, t) * v(2, t)) - 1.0).abs() < 1e-12);
        assert!(r.integrate(|t| v(2, t) * v(5, t)).abs() < 1e-12);
        let flat = mu_plus_rule(&JacobiParams::new(-0.5, -0.5).unwrap(), 16).unwrap();
        assert!((flat.mass() - PI).abs() < 1e-13);
        assert!(flat.nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn pi_rule_cases() {
        let r = pi_rule(-0.5, 7).unwrap();
        assert_eq!(r.nodes, vec![-1.0, 1.0]);
        assert_eq!(r.weights, vec![0.5, 0.5]);
        assert!((pi_rule(0.5, 10).unwrap().mass() - 1.0).abs() < 1e-13);
        for &a in &[-0.4, -0.45, -0.49, 0.0, 1.5] {
            let r = pi_rule(a, 48).unwrap();
            assert!((r.integrate(|u| u * u) - 1.0 / (2.0 * a + 2.0)).abs() < 1e-12);
        }
        assert!(pi_rule(-0.6, 4).is_err());
    }

    #[test]
    fn graded_rule_matches_moments() {
        for &a in &[-0.3, 0.0, 0.5, 2.0] {
            let r = graded_pi_rule(a, 1e-4, 10).unwrap();
            assert!((r.mass() - 1.0).abs() < 1e-12, "{a}");
            assert!((r.integrate(|u| u * u) - 1.0 / (2.0 * a + 2.0)).abs() < 1e-12);
            // a peak of width 1e-3 at u = 1 against a much finer reference rule
            let peak = |u: f64| (1.0 - u + 1e-3).powi(-2);
            let got = graded_pi_rule(a, 1e-3, 10).unwrap().integrate(peak);
            let reference = graded_pi_rule(a, 1e-5, 30).unwrap().integrate(peak);
            assert!(
                (got / reference - 1.0).abs() < 1e-10,
                "{a}: {got} vs {reference}"
            );
        }
    }

    #[test]
    fn ball_measure_flat_and_total() {
        let flat = JacobiParams::new(-0.5, -0.5).unwrap();
        for &(t, f) in &[(0.3f64, 1.0f64), (2.0, 2.5), (1.0, 1.0 + 1e-7)] {
            let r: f64 = (t - f).abs();
            let expect = (t + r).min(PI) - (t - r).max(0.0);
            let got = ball_measure(&flat, t, f).unwrap();
            assert!((got - expect).abs() < 1e-14, "{t},{f}: {got} vs {expect}");
        }
        let p = JacobiParams::new(0.5, 2.0).unwrap();
        assert!(
            (mu_plus_interval(&p, 0.0, PI) / crate::jacobi::total_mass_exact(&p) - 1.0).abs()
                < 1e-13
        );
        assert!(ball_measure(&p, 1.0, 1.0).is_err());
        // additivity across the midpoint split
        let a = mu_plus_interval(&p, 0.4, 1.9);
        let b = mu_plus_interval(&p, 0.4, 1.2) + mu_plus_interval(&p, 1.2, 1.9);
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let r = gauss_jacobi_rule(0.0f64, 0.0, 3).unwrap();
        let csv = r.to_csv();
        assert!(csv.starts_with("node,weight\n"));
        assert_eq!(csv.lines().count(), 4);
    }
}
