//! The double-integral representation
//! H_t(θ, φ) = c sinh(t/2) ∬ (cosh(t/2) − 1 + q)^{−α−β−2} dΠ_α(u) dΠ_β(v)
//! and its θ-, φ- and t-derivatives.

use crate::error::{domain, Error, Result};
use crate::jacobi::JacobiParams;
use crate::quadrature::{graded_pi_rule_x, QuadratureRule};
use crate::special::binom;

use super::bundle::{FamilyJets, Pattern, JETS};
use super::{dk_constant, e_of_t, KernelPoint, QGeometry};

/// Tensor quadrature of the double integral with user-supplied Π rules (nodes in u).
/// Fails with an accuracy error when the peak of the integrand near u = v = 1 is narrower
/// than the gap between 1 and the outermost node.
pub fn poisson_kernel_dk(
    params: &JacobiParams<f64>,
    point: &KernelPoint,
    rule_u: &QuadratureRule<f64>,
    rule_v: &QuadratureRule<f64>,
) -> Result<f64> {
    if !params.kernel_valid() {
        return domain("the double-integral formula needs α, β ≥ -1/2");
    }
    let g = QGeometry::new(point.theta, point.phi);
    let e = e_of_t(point.t);
    let s = params.alpha + params.beta + 2.0;
    let check = |rule: &QuadratureRule<f64>, scale: f64, which: &str| -> Result<()> {
        let top = rule.nodes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let gap = 1.0 - top;
        let width = (e + g.q0) / scale.max(1e-300);
        if gap > width {
            return Err(Error::Accuracy(format!(
                "{which}-rule gap {gap:.2e} at the endpoint exceeds the kernel peak width {width:.2e}"
            )));
        }
        Ok(())
    };
    check(rule_u, g.ss, "u")?;
    check(rule_v, g.cc, "v")?;
    let mut acc = 0.0;
    for (&u, &wu) in rule_u.nodes.iter().zip(&rule_u.weights) {
        for (&v, &wv) in rule_v.nodes.iter().zip(&rule_v.weights) {
            acc += wu * wv * (e + g.q_xy(1.0 - u, 1.0 - v)).powf(-s);
        }
    }
    Ok(dk_constant(params) * (0.5 * point.t).sinh() * acc)
}

/// The double integral on Π rules graded to the peak at this (t, θ, φ).
pub fn poisson_kernel_dk_auto(params: &JacobiParams<f64>, point: &KernelPoint) -> Result<f64> {
    let loc = DkLocation::new(params, point.theta, point.phi, 10, e_of_t(point.t), false)?;
    Ok(loc.jets(point.t).get(Pattern::Value, 0))
}

/// Number of g-weights: 1, q_θ, q_θ², q_θθ, q_φ, q_θ q_φ, q_θφ.
const NG: usize = 7;
/// T[g](s + k, E) is needed for k ≤ 4 (pattern shift ≤ 2, jet order ≤ 2).
const NK: usize = 5;
/// Terms kept in the small-E expansion (E/q ≤ 1/8 makes these ample).
const KMAX: usize = 44;
/// The small-E expansion is used while E ≤ q₀ · MOMENT_RATIO.
pub const MOMENT_RATIO: f64 = 0.125;

/// ∂_θ^a ∂_φ^b (E + q)^{−s} = Σ coef · g · (E + q)^{−s−shift}.
fn pattern_terms(p: Pattern) -> &'static [(usize, usize, i8)] {
    // (g index, shift, order of the falling factorial of −s)
    match p {
        Pattern::Value => &[(0, 0, 0)],
        Pattern::Theta => &[(1, 1, 1)],
        Pattern::Phi => &[(4, 1, 1)],
        Pattern::ThetaTheta => &[(2, 2, 2), (3, 1, 1)],
        Pattern::ThetaPhi => &[(5, 2, 2), (6, 1, 1)],
    }
}

fn coef(s: f64, falling_order: i8) -> f64 {
    match falling_order {
        0 => 1.0,
        1 => -s,
        _ => s * (s + 1.0),
    }
}

/// Quadrature state for one (θ, φ): graded tensor nodes, g-weights and scaled moments.
#[derive(Clone, Debug)]
pub struct DkLocation {
    s: f64,
    c: f64,
    q0: f64,
    ng: usize,
    w: Vec<f64>,
    q: Vec<f64>,
    g: Vec<f64>,
    /// m̂[g][j] = Σ w g q^{−s} (q₀/q)^j
    moments: Vec<f64>,
}

impl DkLocation {
    /// `e_floor` bounds E(t) from below over the times that will be requested; the graded
    /// rules resolve peaks of width (q₀ + e_floor)/sin sin. With `grads`, all five
    /// derivative patterns are available; otherwise only the value and ∂_θ.
    pub fn new(
        params: &JacobiParams<f64>,
        theta: f64,
        phi: f64,
        per_panel: usize,
        e_floor: f64,
        grads: bool,
    ) -> Result<Self> {
        if !params.kernel_valid() {
            return domain("the double-integral formula needs α, β ≥ -1/2");
        }
        let geo = QGeometry::new(theta, phi);
        let peak = geo.q0 + e_floor;
        if !(peak > 0.0) {
            return domain("double integral on the diagonal needs t > 0");
        }
        let rx = graded_pi_rule_x(params.alpha, peak / geo.ss.max(1e-300), per_panel)?;
        let ry = graded_pi_rule_x(params.beta, peak / geo.cc.max(1e-300), per_panel)?;
        let ng = if grads { NG } else { 2 };
        let n = rx.len() * ry.len();
        let mut w = Vec::with_capacity(n);
        let mut q = Vec::with_capacity(n);
        let mut g = Vec::with_capacity(n * ng);
        for (&x, &wx) in rx.nodes.iter().zip(&rx.weights) {
            let u = 1.0 - x;
            for (&y, &wy) in ry.nodes.iter().zip(&ry.weights) {
                let v = 1.0 - y;
                w.push(wx * wy);
                q.push(geo.q_xy(x, y));
                let qt = geo.q_theta(u, v);
                g.push(1.0);
                g.push(qt);
                if grads {
                    let qp = geo.q_phi(u, v);
                    g.push(qt * qt);
                    g.push(geo.q_theta_theta(u, v));
                    g.push(qp);
                    g.push(qt * qp);
                    g.push(geo.q_theta_phi(u, v));
                }
            }
        }
        let s = params.alpha + params.beta + 2.0;
        let mut loc = Self {
            s,
            c: dk_constant(params),
            q0: geo.q0,
            ng,
            w,
            q,
            g,
            moments: Vec::new(),
        };
        if geo.q0 > 0.0 {
            loc.build_moments();
        }
        Ok(loc)
    }

    /// Number of tensor nodes.
    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn has_gradients(&self) -> bool {
        self.ng == NG
    }

    /// Upper end of E for the small-E expansion.
    pub fn moment_limit(&self) -> f64 {
        self.q0 * MOMENT_RATIO
    }

    fn build_moments(&mut self) {
        let nj = NK + KMAX;
        let ng = self.ng;
        let mut m = vec![0.0; ng * nj];
        for i in 0..self.w.len() {
            let q = self.q[i];
            let r = self.q0 / q;
            let mut base = self.w[i] * q.powf(-self.s);
            let gi = &self.g[i * ng..(i + 1) * ng];
            for j in 0..nj {
                for (k, &gv) in gi.iter().enumerate() {
                    m[k * nj + j] += gv * base;
                }
                base *= r;
                if base == 0.0 {
                    break;
                }
            }
        }
        self.moments = m;
    }

    /// T[g](s + k, E) = Σ w g (E + q)^{−s−k}, indexed [g * NK + k].
    fn t_values(&self, e: f64) -> Vec<f64> {
        let ng = self.ng;
        let mut out = vec![0.0; ng * NK];
        if !self.moments.is_empty() && e <= self.moment_limit() {
            let nj = NK + KMAX;
            let ratio = e / self.q0;
            for k in 0..NK {
                let sigma = self.s + k as f64;
                let scale = self.q0.powi(-(k as i32));
                for gi in 0..ng {
                    let m = &self.moments[gi * nj..(gi + 1) * nj];
                    let mut sum = 0.0;
                    let mut pw = 1.0;
                    for i in 0..KMAX {
                        let term = binom(-sigma, i) * pw * m[k + i];
                        sum += term;
                        if term.abs() <= 1e-17 * sum.abs() {
                            break;
                        }
                        pw *= ratio;
                    }
                    out[gi * NK + k] = sum * scale;
                }
            }
            return out;
        }
        let mut pw = [0.0; NK];
        for i in 0..self.w.len() {
            let a = e + self.q[i];
            let inv = 1.0 / a;
            pw[0] = self.w[i] * a.powf(-self.s);
            for k in 1..NK {
                pw[k] = pw[k - 1] * inv;
            }
            let gi = &self.g[i * ng..(i + 1) * ng];
            for (gk, &gv) in gi.iter().enumerate() {
                let o = &mut out[gk * NK..(gk + 1) * NK];
                for k in 0..NK {
                    o[k] += gv * pw[k];
                }
            }
        }
        out
    }

    /// Values and first two t-derivatives of every available pattern of H_t at time t.
    pub fn jets(&self, t: f64) -> FamilyJets {
        let e = e_of_t(t);
        let tv = self.t_values(e);
        let (sh, ch) = ((0.5 * t).sinh(), (0.5 * t).cosh());
        let e1 = 0.5 * sh;
        let e2 = 0.125 * ch;
        let shj = [sh, 0.5 * ch, 0.125 * sh];
        let mut out = FamilyJets::default();
        let patterns: &[Pattern] = if self.has_gradients() {
            &Pattern::ALL
        } else {
            &Pattern::VECTOR
        };
        for &p in patterns {
            let mut j = [0.0; JETS];
            for &(gi, shift, fo) in pattern_terms(p) {
                let cf = coef(self.s, fo);
                let sigma = self.s + shift as f64;
                let tg = &tv[gi * NK..(gi + 1) * NK];
                j[0] += cf * tg[shift];
                j[1] += cf * (-sigma) * e1 * tg[shift + 1];
                j[2] += cf
                    * (-sigma * e2 * tg[shift + 1]
                        + 0.5 * sigma * (sigma + 1.0) * e1 * e1 * tg[shift + 2]);
            }
            let f0 = shj[0] * j[0];
            let f1 = shj[1] * j[0] + shj[0] * j[1];
            let f2 = 2.0 * (shj[2] * j[0] + shj[1] * j[1] + shj[0] * j[2]);
            out.set(p, [self.c * f0, self.c * f1, self.c * f2]);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::series::{poisson_kernel_series, series_term, SeriesSpec};
    use crate::quadrature::pi_rule;

    fn p(a: f64, b: f64) -> JacobiParams<f64> {
        JacobiParams::new(a, b).unwrap()
    }

    #[test]
    fn atoms_reduce_to_four_terms() {
        let q = p(-0.5, -0.5);
        let pt = KernelPoint::new(0.3, 0.5, 1.5).unwrap();
        let ru = pi_rule(-0.5, 1).unwrap();
        let v = poisson_kernel_dk(&q, &pt, &ru, &ru).unwrap();
        let mut acc = 0.0;
        for &u in &[-1.0, 1.0] {
            for &w in &[-1.0, 1.0] {
                acc += 0.25 / ((0.15f64).cosh() - 1.0 + super::super::q_fn(0.5, 1.5, u, w));
            }
        }
        let expect = dk_constant(&q) * (0.15f64).sinh() * acc;
        assert!((v - expect).abs() < 1e-15);
    }

    #[test]
    fn default_rules_flag_underresolution() {
        let q = p(0.5, 2.0);
        let ru = pi_rule(0.5, 48).unwrap();
        let rv = pi_rule(2.0, 48).unwrap();
        let near = KernelPoint::new(1e-3, 1.0, 1.0005).unwrap();
        assert!(matches!(
            poisson_kernel_dk(&q, &near, &ru, &rv),
            Err(Error::Accuracy(_))
        ));
        let far = KernelPoint::new(1.0, 0.5, 2.5).unwrap();
        let v = poisson_kernel_dk(&q, &far, &ru, &rv).unwrap();
        let s = poisson_kernel_series(&q, &far).unwrap();
        assert!((v / s - 1.0).abs() < 1e-10);
    }

    #[test]
    fn graded_route_matches_series_with_derivatives() {
        for &(a, b) in &[(0.0, 0.0), (0.5, 2.0), (-0.5, 1.0)] {
            let q = p(a, b);
            let (th, ph) = (0.7, 1.1);
            let loc = DkLocation::new(&q, th, ph, 10, 0.0, true).unwrap();
            for &t in &[0.02, 0.2, 1.5] {
                let jets = loc.jets(t);
                let pt = KernelPoint::new(t, th, ph).unwrap();
                for (pat, (da, db)) in [
                    (Pattern::Value, (0, 0)),
                    (Pattern::Theta, (1, 0)),
                    (Pattern::Phi, (0, 1)),
                    (Pattern::ThetaTheta, (2, 0)),
                    (Pattern::ThetaPhi, (1, 1)),
                ] {
                    for m in 0..JETS {
                        let spec = SeriesSpec {
                            t_order: m,
                            theta_deriv: da,
                            phi_deriv: db,
                        };
                        let s = series_term(&q, &pt, spec).unwrap();
                        let d = jets.get(pat, m);
                        assert!(
                            (d - s).abs() < 1e-8 * s.abs().max(1e-3),
                            "({a},{b}) t={t} {pat:?} m={m}: {d} vs {s}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn moment_and_direct_regimes_agree_at_the_switch() {
        let q = p(0.5, 2.0);
        let loc = DkLocation::new(&q, 1.0, 1.02, 10, 0.0, true).unwrap();
        let e = loc.moment_limit();
        let below = loc.t_values(e * (1.0 - 1e-12));
        let above = loc.t_values(e * (1.0 + 1e-12));
        for (x, y) in below.iter().zip(&above) {
            assert!((x - y).abs() < 1e-9 * x.abs().max(1e-300), "{x} vs {y}");
        }
    }
}
