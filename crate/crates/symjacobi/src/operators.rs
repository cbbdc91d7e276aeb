//! Spectral operators on coefficient vectors: the Poisson semigroup, its maximal function,
//! Riesz transforms, mixed square functions and Laplace-type multipliers, both on (−π, π)
//! and restricted to one parity class on (0, π).
//!
//! Full coefficient vectors hold ⟨f, Φₙ⟩_{dμ}. Restricted vectors hold ⟨f, Φₙ⟩_{dμ⁺} for a
//! function on (0, π) of one parity class; such a function equals 2 Σ cₙ Φₙ there and has
//! ‖f‖²_{L²(dμ⁺)} = 2 Σ cₙ².

use serde::Serialize;

use crate::basis::{
    analyze, d_power_coeff, d_to_delta_sign, delta_n_coeff, phi_table, Parity, SymmetrizedCoeffs,
};
use crate::error::{domain, Error, Result};
use crate::jacobi::JacobiParams;
use crate::quadrature::{gauss_legendre, mu_plus_rule};
use crate::special::gamma;

/// Which form of an operator is applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ParityTarget {
    FullSymmetrized,
    RestrictedEven,
    RestrictedOdd,
}

impl ParityTarget {
    fn parity(self) -> Option<Parity> {
        match self {
            ParityTarget::FullSymmetrized => None,
            ParityTarget::RestrictedEven => Some(Parity::Even),
            ParityTarget::RestrictedOdd => Some(Parity::Odd),
        }
    }
}

/// Bounded profile φ of a Laplace-type multiplier m(z) = ∫ z e^{−tz} φ(t) dt.
#[derive(Clone, Debug, PartialEq)]
pub enum Profile {
    Constant(f64),
    /// φ(t) = sign(sin t)
    SignSin,
    /// Piecewise-linear interpolation of samples (t increasing), constant beyond the ends.
    Samples {
        t: Vec<f64>,
        values: Vec<f64>,
    },
}

impl Profile {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Profile::Constant(c) => *c,
            Profile::SignSin => {
                let s = t.sin();
                if s > 0.0 {
                    1.0
                } else if s < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
            Profile::Samples { t: ts, values } => {
                let k = ts.partition_point(|&x| x <= t);
                if k == 0 {
                    values[0]
                } else if k == ts.len() {
                    values[ts.len() - 1]
                } else {
                    let (a, b) = (ts[k - 1], ts[k]);
                    let w = (t - a) / (b - a);
                    values[k - 1] * (1.0 - w) + values[k] * w
                }
            }
        }
    }

    /// Points in (0, t_max) where φ may fail to be smooth.
    fn breakpoints(&self, t_max: f64) -> Vec<f64> {
        match self {
            Profile::Constant(_) => Vec::new(),
            Profile::SignSin => {
                let mut v = Vec::new();
                let mut k = 1.0;
                while k * std::f64::consts::PI < t_max {
                    v.push(k * std::f64::consts::PI);
                    k += 1.0;
                }
                v
            }
            Profile::Samples { t, .. } => t
                .iter()
                .copied()
                .filter(|&x| x > 0.0 && x < t_max)
                .collect(),
        }
    }
}

/// Profile or measure defining a spectral multiplier.
#[derive(Clone, Debug, PartialEq)]
pub enum MultiplierSpec {
    /// m(z) = ∫ z e^{−tz} φ(t) dt with declared bound ‖φ‖_∞ ≤ sup_bound.
    LaplaceType { profile: Profile, sup_bound: f64 },
    /// m(z) = Σ c_j e^{−t_j z} for atoms (t_j, c_j).
    LaplaceStieltjes { atoms: Vec<(f64, f64)> },
}

impl MultiplierSpec {
    pub fn laplace(profile: Profile, sup_bound: f64) -> Result<Self> {
        let spec = MultiplierSpec::LaplaceType { profile, sup_bound };
        spec.validate()?;
        Ok(spec)
    }

    pub fn stieltjes(atoms: Vec<(f64, f64)>) -> Result<Self> {
        let spec = MultiplierSpec::LaplaceStieltjes { atoms };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MultiplierSpec::LaplaceType { profile, sup_bound } => {
                if !sup_bound.is_finite() || *sup_bound < 0.0 {
                    return domain("profile bound must be finite and non-negative");
                }
                let over = match profile {
                    Profile::Constant(c) => c.abs() > *sup_bound,
                    Profile::SignSin => *sup_bound < 1.0,
                    Profile::Samples { t, values } => {
                        if t.len() != values.len() || t.is_empty() {
                            return domain(
                                "profile samples need matching, non-empty t and value lists",
                            );
                        }
                        if t.windows(2).any(|w| w[1] <= w[0]) {
                            return domain("profile sample times must increase");
                        }
                        values
                            .iter()
                            .any(|v| !v.is_finite() || v.abs() > *sup_bound)
                    }
                };
                if over {
                    return domain("profile exceeds its declared bound");
                }
                Ok(())
            }
            MultiplierSpec::LaplaceStieltjes { atoms } => {
                if atoms
                    .iter()
                    .any(|&(t, c)| !(t > 0.0) || !t.is_finite() || !c.is_finite())
                {
                    return domain("atoms need finite t_j > 0 and finite weights");
                }
                Ok(())
            }
        }
    }

    /// m(z). For Laplace type, composite Gauss–Legendre in s = t z over [0, 40] with
    /// breakpoints at the profile's kinks, checked against a doubled rule; m(0) = 0.
    pub fn eval(&self, z: f64) -> Result<f64> {
        match self {
            MultiplierSpec::LaplaceStieltjes { atoms } => {
                Ok(atoms.iter().map(|&(t, c)| c * (-t * z).exp()).sum())
            }
            MultiplierSpec::LaplaceType { profile, .. } => {
                if z == 0.0 {
                    return Ok(0.0);
                }
                let coarse = laplace_quadrature(profile, z, 10);
                let fine = laplace_quadrature(profile, z, 20);
                if (coarse - fine).abs() > 1e-8 * fine.abs().max(1.0) {
                    return Err(Error::Accuracy(format!(
                        "Laplace multiplier at z = {z} changed by {:.2e} on refinement",
                        (coarse - fine).abs()
                    )));
                }
                Ok(fine)
            }
        }
    }
}

const LAPLACE_S_MAX: f64 = 40.0;

fn laplace_quadrature(profile: &Profile, z: f64, per_panel: usize) -> f64 {
    let mut edges = vec![0.0];
    let kinks: Vec<f64> = profile
        .breakpoints(LAPLACE_S_MAX / z)
        .into_iter()
        .map(|t| t * z)
        .collect();
    let mut k = 0;
    let mut x = 0.0;
    while x < LAPLACE_S_MAX {
        let next = (x + 1.0).min(LAPLACE_S_MAX);
        while k < kinks.len() && kinks[k] < next {
            if kinks[k] > x {
                edges.push(kinks[k]);
            }
            k += 1;
        }
        edges.push(next);
        x = next;
    }
    let (gx, gw) = gauss_legendre(per_panel);
    let mut acc = 0.0;
    for pair in edges.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let h = 0.5 * (b - a);
        for (&v, &w) in gx.iter().zip(&gw) {
            let s = a + h * (1.0 + v);
            acc += w * h * (-s).exp() * profile.eval(s / z);
        }
    }
    acc
}

/// Atoms (t_j, c_j) with Σ c_j e^{−t_j z} ≈ z^{−σ}: trapezoid rule for
/// ∫ e^{−t z} t^{σ−1} dt / Γ(σ) in u = ln t over [−40, 5] with step 0.2.
pub fn fractional_power_atoms(sigma: f64) -> Result<Vec<(f64, f64)>> {
    if !(sigma > 0.0) {
        return domain("fractional power needs σ > 0");
    }
    let h = 0.2;
    let n = (45.0 / h) as usize;
    let g = gamma(sigma);
    Ok((0..=n)
        .map(|i| {
            let u = -40.0 + h * i as f64;
            let w = if i == 0 || i == n { 0.5 * h } else { h };
            (u.exp(), w * (sigma * u).exp() / g)
        })
        .collect())
}

/// Operator selector used by the CLI and the parity-reduction check.
#[derive(Clone, Debug, PartialEq)]
pub enum OperatorKind {
    Semigroup(f64),
    Maximal(Vec<f64>),
    Riesz(usize),
    SquareFn { m: usize, n: usize },
    Multiplier(MultiplierSpec),
}

fn check_parity(coeffs: &SymmetrizedCoeffs<f64>, target: ParityTarget) -> SymmetrizedCoeffs<f64> {
    match target {
        ParityTarget::FullSymmetrized => coeffs.clone(),
        ParityTarget::RestrictedEven => coeffs.even_part(),
        ParityTarget::RestrictedOdd => coeffs.odd_part(),
    }
}

/// Multiplies coefficient n by e^{−t√λ_⟨n⟩}.
pub fn semigroup_apply(coeffs: &SymmetrizedCoeffs<f64>, t: f64) -> Result<SymmetrizedCoeffs<f64>> {
    if !(t >= 0.0) {
        return domain("semigroup time must be non-negative");
    }
    let p = coeffs.params;
    let out = coeffs
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, &c)| c * (-t * p.rate(n.div_ceil(2))).exp())
        .collect();
    Ok(SymmetrizedCoeffs::new(p, out))
}

/// sup over t ∈ {0} ∪ grid of |ℍ_t f(θ)| at each θ.
pub fn maximal_apply(coeffs: &SymmetrizedCoeffs<f64>, thetas: &[f64], t_grid: &[f64]) -> Vec<f64> {
    let p = coeffs.params;
    let rates: Vec<f64> = (0..coeffs.coeffs.len())
        .map(|n| p.rate(n.div_ceil(2)))
        .collect();
    let mut ts = vec![0.0];
    ts.extend_from_slice(t_grid);
    thetas
        .iter()
        .map(|&th| {
            let phi = phi_table(&p, coeffs.n_max, th);
            let a: Vec<f64> = phi.iter().zip(&coeffs.coeffs).map(|(x, c)| x * c).collect();
            ts.iter()
                .map(|&t| {
                    a.iter()
                        .zip(&rates)
                        .map(|(&x, &r)| x * (-t * r).exp())
                        .sum::<f64>()
                        .abs()
                })
                .fold(0.0, f64::max)
        })
        .collect()
}

/// Riesz transform of order N.
///
/// Full form: D^N 𝕁^{−N/2} on (−π, π). Restricted forms: (R_N)⁺ f = Σ λ_k^{−N/2} e_k (−s_k)^N Φ_{2k−Ñ}
/// and the odd analogue with λ_{m+1}; outputs are restricted inner products.
/// Modes with λ = 0 are dropped.
pub fn riesz_apply(
    coeffs: &SymmetrizedCoeffs<f64>,
    order: usize,
    target: ParityTarget,
) -> Result<SymmetrizedCoeffs<f64>> {
    if order == 0 {
        return domain("Riesz order must be at least 1");
    }
    let p = coeffs.params;
    let mut out = vec![0.0; coeffs.coeffs.len() + 1];
    for (n, &c) in check_parity(coeffs, target).coeffs.iter().enumerate() {
        let lam = p.lambda(n.div_ceil(2));
        if lam == 0.0 || c == 0.0 {
            continue;
        }
        let scale = lam.powf(-0.5 * order as f64);
        let image = match target.parity() {
            None => d_power_coeff(&p, n, order),
            Some(par) => delta_n_coeff(&p, n, order, par).map(|(m, k)| (m, 0.5 * k)),
        };
        if let Some((m, k)) = image {
            out[m] += scale * k * c;
        }
    }
    Ok(SymmetrizedCoeffs::new(p, out))
}

/// Time-profile of ∂_t^M δ_N ℍ_t f(θ) as Σ_k A_k e^{−t r_k}: returns (A_k, r_k).
fn gfun_profile(
    coeffs: &SymmetrizedCoeffs<f64>,
    m: usize,
    order: usize,
    target: ParityTarget,
    theta: f64,
) -> Vec<(f64, f64)> {
    let p = coeffs.params;
    let phi = phi_table(&p, coeffs.n_max + 1, theta);
    let mut out = Vec::new();
    for (n, &c) in check_parity(coeffs, target).coeffs.iter().enumerate() {
        let r = p.rate(n.div_ceil(2));
        if c == 0.0 || r == 0.0 {
            continue;
        }
        let image = match target.parity() {
            None => d_power_coeff(&p, n, order),
            // H_t f = Σ e^{−t r} c Φ on (0, π) carries the restricted inner product directly
            Some(par) => delta_n_coeff(&p, n, order, par),
        };
        if let Some((target_idx, k)) = image {
            let a = (-r).powi(m as i32) * k * c * phi[target_idx];
            if a != 0.0 {
                out.push((a, r));
            }
        }
    }
    out
}

/// ∫₀^∞ |Σ A_k e^{−t r_k}|² t^{K−1} dt = Σ A_k A_l Γ(K)/(r_k + r_l)^K.
fn gram_norm_sq(profile: &[(f64, f64)], k: usize) -> f64 {
    let g = gamma(k as f64);
    let mut acc = 0.0;
    for &(a, r) in profile {
        for &(b, s) in profile {
            acc += a * b * g / (r + s).powi(k as i32);
        }
    }
    acc
}

/// Mixed square function ‖∂_t^M δ_N ℍ_t f(θ)‖_{L²(t^{2M+2N−1} dt)} at each θ, in closed form.
pub fn gfun_apply(
    coeffs: &SymmetrizedCoeffs<f64>,
    m: usize,
    order: usize,
    target: ParityTarget,
    thetas: &[f64],
) -> Result<Vec<f64>> {
    if m + order == 0 {
        return domain("square function needs M + N > 0");
    }
    let k = 2 * (m + order);
    Ok(thetas
        .iter()
        .map(|&th| {
            gram_norm_sq(&gfun_profile(coeffs, m, order, target, th), k)
                .max(0.0)
                .sqrt()
        })
        .collect())
}

/// The same square function by a trapezoid rule in ln t (independent of the closed form).
pub fn gfun_apply_quadrature(
    coeffs: &SymmetrizedCoeffs<f64>,
    m: usize,
    order: usize,
    target: ParityTarget,
    thetas: &[f64],
) -> Result<Vec<f64>> {
    if m + order == 0 {
        return domain("square function needs M + N > 0");
    }
    let k = (2 * (m + order)) as f64;
    let h = 0.05;
    Ok(thetas
        .iter()
        .map(|&th| {
            let prof = gfun_profile(coeffs, m, order, target, th);
            let mut acc = 0.0;
            let mut u: f64 = -30.0;
            while u <= 6.0 {
                let t = u.exp();
                let v: f64 = prof.iter().map(|&(a, r)| a * (-t * r).exp()).sum();
                acc += h * v * v * t.powf(k);
                u += h;
            }
            acc.sqrt()
        })
        .collect())
}

/// ‖square function‖² in L²(dμ⁺) (restricted) or L²(dμ) (full), exactly from coefficients.
pub fn gfun_norm_sq(
    coeffs: &SymmetrizedCoeffs<f64>,
    m: usize,
    order: usize,
    target: ParityTarget,
) -> Result<f64> {
    if m + order == 0 {
        return domain("square function needs M + N > 0");
    }
    let p = coeffs.params;
    let k = 2 * (m + order);
    let g = gamma(k as f64);
    // Φ images of distinct modes are orthogonal, so only diagonal Gram terms survive.
    let half = if target == ParityTarget::FullSymmetrized {
        1.0
    } else {
        0.5
    };
    let mut acc = 0.0;
    for (n, &c) in check_parity(coeffs, target).coeffs.iter().enumerate() {
        let r = p.rate(n.div_ceil(2));
        if c == 0.0 || r == 0.0 {
            continue;
        }
        let image = match target.parity() {
            None => d_power_coeff(&p, n, order),
            Some(par) => delta_n_coeff(&p, n, order, par),
        };
        if let Some((_, kk)) = image {
            let a = r.powi(m as i32) * kk * c;
            acc += half * a * a * g / (2.0 * r).powi(k as i32);
        }
    }
    Ok(acc)
}

/// ‖f‖² of a coefficient vector in the convention of `target`.
pub fn norm_sq(coeffs: &SymmetrizedCoeffs<f64>, target: ParityTarget) -> f64 {
    match target {
        ParityTarget::FullSymmetrized => coeffs.norm_sq(),
        _ => 2.0 * check_parity(coeffs, target).norm_sq(),
    }
}

/// Multiplies coefficient n by m(√λ_⟨n⟩).
pub fn multiplier_apply(
    coeffs: &SymmetrizedCoeffs<f64>,
    spec: &MultiplierSpec,
    target: ParityTarget,
) -> Result<SymmetrizedCoeffs<f64>> {
    spec.validate()?;
    let p = coeffs.params;
    let src = check_parity(coeffs, target);
    let mut out = Vec::with_capacity(src.coeffs.len());
    for (n, &c) in src.coeffs.iter().enumerate() {
        out.push(if c == 0.0 {
            0.0
        } else {
            c * spec.eval(p.rate(n.div_ceil(2)))?
        });
    }
    Ok(SymmetrizedCoeffs::new(p, out))
}

/// Restricted inner products ⟨g, Φₙ⟩_{dμ⁺} of a function on (0, π), for the modes of one parity.
pub fn analyze_restricted(
    params: &JacobiParams<f64>,
    g: impl Fn(f64) -> f64,
    parity: Parity,
    n_max: usize,
) -> Result<SymmetrizedCoeffs<f64>> {
    let nodes = crate::quadrature::default_mu_nodes(params).max(2 * n_max);
    let rule = mu_plus_rule(params, nodes)?;
    let mut c = vec![0.0; n_max + 1];
    for (&th, &w) in rule.nodes.iter().zip(&rule.weights) {
        let gv = g(th) * w;
        for (n, ph) in phi_table(params, n_max, th).into_iter().enumerate() {
            if (n % 2 == 0) == (parity == Parity::Even) {
                c[n] += gv * ph;
            }
        }
    }
    Ok(SymmetrizedCoeffs::new(*params, c))
}

/// 2 Σ cₙ Φₙ(θ), the function on (0, π) with restricted inner products c.
pub fn synthesize_restricted(coeffs: &SymmetrizedCoeffs<f64>, theta: f64) -> f64 {
    2.0 * crate::basis::synthesize_at(coeffs, theta)
}

/// Outcome of computing a full operator directly and through its parity pieces.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Reduction {
    pub direct: Vec<f64>,
    pub via_parts: Vec<f64>,
    pub discrepancy: f64,
}

/// Computes the full symmetrized operator on f both directly and through the restricted even
/// and odd operators, using ⟨f_even, Φ_{2n}⟩_{dμ} = 2⟨f_even⁺, Φ_{2n}⟩_{dμ⁺} and the signs
/// D^N = (−1)^{⌊N/2⌋} δ_N^even, D^N = (−1)^{⌈N/2⌉} δ_N^odd on the two parity classes.
/// Coefficient-valued operators return coefficients; square and maximal functions return
/// values on `thetas`.
pub fn reduce_symmetrized(
    params: &JacobiParams<f64>,
    op: &OperatorKind,
    f: impl Fn(f64) -> f64,
    n_max: usize,
    thetas: &[f64],
) -> Result<Reduction> {
    let full = analyze(params, &f, n_max)?;
    let even = analyze_restricted(params, |t| 0.5 * (f(t) + f(-t)), Parity::Even, n_max)?;
    let odd = analyze_restricted(params, |t| 0.5 * (f(t) - f(-t)), Parity::Odd, n_max)?;
    let lift = |c: &SymmetrizedCoeffs<f64>, factor: f64| -> Vec<f64> {
        c.coeffs.iter().map(|x| factor * x).collect()
    };
    let add = |a: Vec<f64>, b: Vec<f64>| -> Vec<f64> {
        let n = a.len().max(b.len());
        (0..n)
            .map(|i| a.get(i).copied().unwrap_or(0.0) + b.get(i).copied().unwrap_or(0.0))
            .collect()
    };
    let (direct, via_parts) = match op {
        OperatorKind::Semigroup(t) => {
            let d = semigroup_apply(&full, *t)?;
            let e = semigroup_apply(&even, *t)?;
            let o = semigroup_apply(&odd, *t)?;
            (d.coeffs, add(lift(&e, 2.0), lift(&o, 2.0)))
        }
        OperatorKind::Multiplier(spec) => {
            let d = multiplier_apply(&full, spec, ParityTarget::FullSymmetrized)?;
            let e = multiplier_apply(&even, spec, ParityTarget::RestrictedEven)?;
            let o = multiplier_apply(&odd, spec, ParityTarget::RestrictedOdd)?;
            (d.coeffs, add(lift(&e, 2.0), lift(&o, 2.0)))
        }
        OperatorKind::Riesz(order) => {
            let d = riesz_apply(&full, *order, ParityTarget::FullSymmetrized)?;
            let e = riesz_apply(&even, *order, ParityTarget::RestrictedEven)?;
            let o = riesz_apply(&odd, *order, ParityTarget::RestrictedOdd)?;
            let se = d_to_delta_sign(*order, Parity::Even) as f64;
            let so = d_to_delta_sign(*order, Parity::Odd) as f64;
            // restricted outputs are inner products over (0, π): full coefficients are 4σ times them
            (d.coeffs, add(lift(&e, 4.0 * se), lift(&o, 4.0 * so)))
        }
        OperatorKind::SquareFn { m, n } => {
            let k = 2 * (m + n);
            let se = d_to_delta_sign(*n, Parity::Even) as f64;
            let so = d_to_delta_sign(*n, Parity::Odd) as f64;
            let mut direct = Vec::new();
            let mut via = Vec::new();
            for &th in thetas {
                let d = gfun_profile(&full, *m, *n, ParityTarget::FullSymmetrized, th);
                direct.push(gram_norm_sq(&d, k).max(0.0).sqrt());
                let at = th.abs();
                let sgn = if th < 0.0 { -1.0 } else { 1.0 };
                let mut parts = Vec::new();
                for (coef, sign, par) in [
                    (&even, se, ParityTarget::RestrictedEven),
                    (&odd, so, ParityTarget::RestrictedOdd),
                ] {
                    for (a, r) in gfun_profile(coef, *m, *n, par, at) {
                        // the image of a class with parity n + N is reflected as an even/odd function
                        let reflect = if th < 0.0 && parity_of_image(par, *n) {
                            sgn
                        } else {
                            1.0
                        };
                        parts.push((2.0 * sign * reflect * a, r));
                    }
                }
                via.push(gram_norm_sq(&parts, k).max(0.0).sqrt());
            }
            (direct, via)
        }
        OperatorKind::Maximal(ts) => {
            let direct = maximal_apply(&full, thetas, ts);
            let e = SymmetrizedCoeffs::new(*params, lift(&even, 2.0));
            let o = SymmetrizedCoeffs::new(*params, lift(&odd, 2.0));
            let via = maximal_apply(&e.combine(1.0, &o, 1.0), thetas, ts);
            (direct, via)
        }
    };
    let discrepancy = direct
        .iter()
        .zip(&via_parts)
        .map(|(a, b)| (a - b).abs())
        .chain(direct.iter().skip(via_parts.len()).map(|a| a.abs()))
        .chain(via_parts.iter().skip(direct.len()).map(|b| b.abs()))
        .fold(0.0, f64::max);
    Ok(Reduction {
        direct,
        via_parts,
        discrepancy,
    })
}

/// Whether δ_N maps the class to odd functions (n + N odd in Φ index terms).
fn parity_of_image(target: ParityTarget, order: usize) -> bool {
    let start_odd = target == ParityTarget::RestrictedOdd;
    start_odd ^ (order % 2 == 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(a: f64, b: f64) -> JacobiParams<f64> {
        JacobiParams::new(a, b).unwrap()
    }

    #[test]
    fn semigroup_identity_and_law() {
        let q = p(0.5, 2.0);
        let c = SymmetrizedCoeffs::new(q, vec![1.0, -0.5, 0.25, 2.0, 0.1]);
        assert_eq!(semigroup_apply(&c, 0.0).unwrap(), c);
        let a = semigroup_apply(&semigroup_apply(&c, 0.3).unwrap(), 0.4).unwrap();
        let b = semigroup_apply(&c, 0.7).unwrap();
        for (x, y) in a.coeffs.iter().zip(&b.coeffs) {
            assert!((x - y).abs() < 1e-15);
        }
        assert!(semigroup_apply(&c, -1.0).is_err());
    }

    #[test]
    fn riesz_even_mode_even_order() {
        let q = p(0.0, 0.0);
        for n in 1..5 {
            let c = SymmetrizedCoeffs::mode(q, 2 * n, 10);
            let out = riesz_apply(&c, 2, ParityTarget::FullSymmetrized).unwrap();
            let expect = -q.lambda_gap(n) / q.lambda(n);
            assert!((out.coeffs[2 * n] - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn riesz_critical_zero_mode_vanishes() {
        let q = p(-0.5, -0.5);
        let c = SymmetrizedCoeffs::mode(q, 0, 4);
        let out = riesz_apply(&c, 1, ParityTarget::FullSymmetrized).unwrap();
        assert!(out.coeffs.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn multiplier_profiles() {
        let one = MultiplierSpec::laplace(Profile::Constant(1.0), 1.0).unwrap();
        for &z in &[0.3, 1.0, 7.5] {
            assert!((one.eval(z).unwrap() - 1.0).abs() < 1e-12);
        }
        assert_eq!(one.eval(0.0).unwrap(), 0.0);
        let osc = MultiplierSpec::laplace(Profile::SignSin, 1.0).unwrap();
        // ∫ z e^{−tz} sign(sin t) dt = tanh(πz/2)
        for &z in &[0.5, 1.0, 3.0] {
            let expect = (std::f64::consts::PI * z / 2.0).tanh();
            assert!((osc.eval(z).unwrap() - expect).abs() < 1e-10, "{z}");
        }
        assert!(MultiplierSpec::laplace(Profile::Constant(2.0), 1.0).is_err());
        assert!(MultiplierSpec::stieltjes(vec![(0.0, 1.0)]).is_err());
    }

    #[test]
    fn fractional_power() {
        let atoms = fractional_power_atoms(0.5).unwrap();
        let m = MultiplierSpec::stieltjes(atoms).unwrap();
        for &z in &[1.0f64, 2.0, 5.0] {
            assert!((m.eval(z).unwrap() - z.powf(-0.5)).abs() < 1e-6);
        }
    }

    #[test]
    fn gfun_closed_form_matches_quadrature() {
        let q = p(0.5, 2.0);
        let c = SymmetrizedCoeffs::new(q, vec![0.3, 0.0, -0.7, 0.0, 0.2, 0.0, 0.5]);
        let th = [0.4, 1.3, 2.7];
        for (m, n) in [(1, 0), (0, 1), (1, 1), (2, 1)] {
            let a = gfun_apply(&c, m, n, ParityTarget::RestrictedEven, &th).unwrap();
            let b = gfun_apply_quadrature(&c, m, n, ParityTarget::RestrictedEven, &th).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!(
                    (x - y).abs() < 1e-8 * x.abs().max(1e-12),
                    "({m},{n}) {x} vs {y}"
                );
            }
        }
    }

    #[test]
    fn parity_reduction_all_kinds() {
        let q = p(0.5, 2.0);
        let f = |t: f64| (1.0 + 0.3 * t.cos()).recip() + 0.4 * t.sin() * (0.5 * t).cos() + 0.2 * t;
        let thetas = [-2.5, -0.7, 0.3, 1.9];
        let ops = vec![
            OperatorKind::Semigroup(0.4),
            OperatorKind::Maximal(vec![0.1, 0.5, 2.0]),
            OperatorKind::Riesz(1),
            OperatorKind::Riesz(2),
            OperatorKind::Riesz(3),
            OperatorKind::SquareFn { m: 1, n: 0 },
            OperatorKind::SquareFn { m: 0, n: 1 },
            OperatorKind::SquareFn { m: 1, n: 1 },
            OperatorKind::SquareFn { m: 0, n: 2 },
            OperatorKind::Multiplier(MultiplierSpec::laplace(Profile::SignSin, 1.0).unwrap()),
        ];
        for op in &ops {
            let r = reduce_symmetrized(&q, op, f, 24, &thetas).unwrap();
            let scale = r.direct.iter().fold(0.0f64, |a, b| a.max(b.abs()));
            assert!(
                r.discrepancy < 1e-10 * scale.max(1.0),
                "{op:?}: {}",
                r.discrepancy
            );
        }
    }
}
