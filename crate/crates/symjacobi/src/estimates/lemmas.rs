//! Samplers for the auxiliary inequalities behind the kernel estimates, and the two
//! inequalities that hold with constant exactly 1.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{ladder_maxima, EstimateId, EstimateReport, LadderReport, OffDiagonalGrid, Thresholds};
use crate::error::{domain, Result};
use crate::jacobi::JacobiParams;
use crate::kernels::QGeometry;
use crate::quadrature::{ball_measure, graded_pi_rule_x};

const PI: f64 = std::f64::consts::PI;

/// Exponents of the generalized bridge inequality. With `second`, the q-power carries an
/// extra ½ and the quotient an extra factor |θ − φ|.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct L43Exponents {
    pub gamma1: f64,
    pub gamma2: f64,
    pub kappa: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub second: bool,
}

impl L43Exponents {
    pub const PLAIN: Self = Self {
        gamma1: 0.0,
        gamma2: 0.0,
        kappa: 0.0,
        kappa1: 0.0,
        kappa2: 0.0,
        second: false,
    };
}

/// Which auxiliary inequality to sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum LemmaKind {
    /// ∬ dΠ_α dΠ_β q^{−α−β−3/2} · μ⁺(B)
    Bridge1,
    /// ∬ dΠ_α dΠ_β q^{−α−β−2} · |θ − φ| μ⁺(B)
    Bridge2,
    L43Star(L43Exponents),
    /// max(|∂_θ q|, |∂_φ q|)/√q at random (θ, φ, u, v)
    Trig,
    /// q(θ, φ, u, v)/q(θ̃, φ, u, v) and its inverse, also with φ moved, when |θ − φ| > 2|θ − θ̃|
    Comp,
    /// sinh(t/2) q^{α+β+4} / (cosh(t/2) − 1 + q)^{α+β+9/2}
    Asympt,
}

impl LemmaKind {
    pub fn id(&self) -> EstimateId {
        match self {
            LemmaKind::Bridge1 => EstimateId::Bridge1,
            LemmaKind::Bridge2 => EstimateId::Bridge2,
            LemmaKind::L43Star(_) => EstimateId::L43Star,
            LemmaKind::Trig => EstimateId::Trig,
            LemmaKind::Comp => EstimateId::Comp,
            LemmaKind::Asympt => EstimateId::Asympt,
        }
    }
}

/// ∬ q(θ, φ, u, v)^{−σ} dΠ_a(u) dΠ_b(v) with rules graded towards the peak at u = v = 1.
pub fn pi_power_integral(
    a: f64,
    b: f64,
    theta: f64,
    phi: f64,
    sigma: f64,
    per_panel: usize,
) -> Result<f64> {
    let geo = QGeometry::new(theta, phi);
    if !(geo.q0 > 0.0) {
        return domain("the q-integral is infinite on the diagonal");
    }
    let rx = graded_pi_rule_x(a, geo.q0 / geo.ss.max(1e-300), per_panel)?;
    let ry = graded_pi_rule_x(b, geo.q0 / geo.cc.max(1e-300), per_panel)?;
    let mut acc = 0.0;
    for (&x, &wx) in rx.nodes.iter().zip(&rx.weights) {
        let mut row = 0.0;
        for (&y, &wy) in ry.nodes.iter().zip(&ry.weights) {
            row += wy * geo.q_xy(x, y).powf(-sigma);
        }
        acc += wx * row;
    }
    Ok(acc)
}

fn l43_quotient(params: &JacobiParams<f64>, e: &L43Exponents, theta: f64, phi: f64) -> Result<f64> {
    let (a, b) = (params.alpha, params.beta);
    let shift = e.gamma1 + e.gamma2 + e.kappa;
    let sigma = a + b + if e.second { 2.0 } else { 1.5 } + shift;
    let integral = pi_power_integral(
        a + e.gamma1 + e.kappa + e.kappa1,
        b + e.gamma2 + e.kappa + e.kappa2,
        theta,
        phi,
        sigma,
        10,
    )?;
    let pre = ((0.5 * theta).sin() + (0.5 * phi).sin()).powf(2.0 * e.gamma1)
        * ((0.5 * theta).cos() + (0.5 * phi).cos()).powf(2.0 * e.gamma2);
    let d = if e.second { (theta - phi).abs() } else { 1.0 };
    Ok(pre * integral * d * ball_measure(params, theta, phi)?)
}

const TRIG_BASE: usize = 12_500;

fn trig_samples(seed: u64, n: usize) -> Vec<[f64; 4]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            [
                rng.gen::<f64>() * PI,
                rng.gen::<f64>() * PI,
                rng.gen_range(-1.0..=1.0),
                rng.gen_range(-1.0..=1.0),
            ]
        })
        .collect()
}

fn asympt_value(params: &JacobiParams<f64>, t: f64, q: f64) -> f64 {
    let s = params.alpha + params.beta + 4.0;
    let e = 2.0 * (0.25 * t).sinh().powi(2);
    let ln = (0.5 * t).sinh().ln() + s * q.ln() - (s + 0.5) * (e + q).ln();
    ln.exp()
}

/// Ladder of empirical suprema for one auxiliary inequality. Grid-based kinds use the nested
/// off-diagonal grid; `Trig` uses the first 12 500 · 2^ℓ draws of a seeded stream at level ℓ;
/// `Asympt` uses nested logarithmic grids in t ∈ [1e−6, 100] and q ∈ [1e−10, 2].
pub fn lemma_ladder(
    params: &JacobiParams<f64>,
    which: LemmaKind,
    levels: usize,
    seed: u64,
) -> Result<LadderReport> {
    if !params.kernel_valid() {
        return domain("the auxiliary inequalities need α, β ≥ -1/2");
    }
    if levels == 0 {
        return domain("a ladder needs at least one level");
    }
    let finest = levels - 1;
    let (values, level_of, points): (Vec<f64>, Vec<usize>, Vec<Vec<f64>>) = match which {
        LemmaKind::Bridge1 | LemmaKind::Bridge2 | LemmaKind::L43Star(_) => {
            let e = match which {
                LemmaKind::Bridge1 => L43Exponents::PLAIN,
                LemmaKind::Bridge2 => L43Exponents {
                    second: true,
                    ..L43Exponents::PLAIN
                },
                LemmaKind::L43Star(e) => e,
                _ => unreachable!(),
            };
            let grid = OffDiagonalGrid::new(levels)?;
            let vals = grid
                .points
                .par_iter()
                .map(|&(t, p)| {
                    l43_quotient(params, &e, t, p)
                        .map_err(|err| err.at(format!("(θ, φ) = ({t}, {p})")))
                })
                .collect::<Result<Vec<_>>>()?;
            (
                vals,
                grid.level_of.clone(),
                grid.points.iter().map(|&(a, b)| vec![a, b]).collect(),
            )
        }
        LemmaKind::Comp => {
            let grid = OffDiagonalGrid::new(levels)?;
            let uv = [-1.0, 0.0, 1.0];
            let vals = grid
                .points
                .iter()
                .map(|&(t, p)| {
                    let mut best: f64 = 0.0;
                    for c in [-0.49, -0.25, 0.25, 0.49] {
                        // moved θ and moved φ, each by c |θ − φ| towards or away from the other
                        for (a, b, a2, b2) in
                            [(t, p, t + c * (p - t), p), (t, p, t, p + c * (t - p))]
                        {
                            if !(a2 > 0.0 && a2 < PI && b2 > 0.0 && b2 < PI) {
                                continue;
                            }
                            let (g, g2) = (QGeometry::new(a, b), QGeometry::new(a2, b2));
                            for &u in &uv {
                                for &v in &uv {
                                    let (q, q2) =
                                        (g.q_xy(1.0 - u, 1.0 - v), g2.q_xy(1.0 - u, 1.0 - v));
                                    best = best.max(q / q2).max(q2 / q);
                                }
                            }
                        }
                    }
                    best
                })
                .collect();
            (
                vals,
                grid.level_of.clone(),
                grid.points.iter().map(|&(a, b)| vec![a, b]).collect(),
            )
        }
        LemmaKind::Trig => {
            let n = TRIG_BASE << finest;
            let samples = trig_samples(seed, n);
            let vals = samples
                .iter()
                .map(|s| {
                    let g = QGeometry::new(s[0], s[1]);
                    let q = g.q_xy(1.0 - s[2], 1.0 - s[3]);
                    g.q_theta(s[2], s[3]).abs().max(g.q_phi(s[2], s[3]).abs()) / q.sqrt()
                })
                .collect();
            let lv = (0..n)
                .map(|i| (0..=finest).find(|&l| i < TRIG_BASE << l).unwrap())
                .collect();
            (vals, lv, samples.iter().map(|s| s.to_vec()).collect())
        }
        LemmaKind::Asympt => {
            let m = 8 << finest;
            let mut vals = Vec::new();
            let mut lv = Vec::new();
            let mut pts = Vec::new();
            let coarse = |i: usize| {
                (0..=finest)
                    .find(|&l| i.is_multiple_of(1 << (finest - l)))
                    .unwrap()
            };
            for i in 0..=m {
                let t = 1e-6 * (1e8f64).powf(i as f64 / m as f64);
                for j in 0..=m {
                    let q = 1e-10 * (2e10f64).powf(j as f64 / m as f64);
                    vals.push(asympt_value(params, t, q));
                    lv.push(coarse(i).max(coarse(j)));
                    pts.push(vec![t, q]);
                }
            }
            (vals, lv, pts)
        }
    };
    let reports = ladder_maxima(which.id(), &values, &level_of, &points, levels);
    let th = Thresholds::default();
    let sups: Vec<f64> = reports.iter().map(|r| r.empirical_sup).collect();
    Ok(LadderReport {
        estimate_id: which.id(),
        kernel: format!("{which:?}"),
        alpha: params.alpha,
        beta: params.beta,
        verdict: th.classify(&sups),
        levels: reports,
        thresholds: th,
        recheck: None,
        notes: vec!["estimate holds empirically when the ladder is stable".into()],
    })
}

/// Finest-level report of [`lemma_ladder`] with `grid_level + 1` levels and seed 0.
pub fn lemma_samplers(
    params: &JacobiParams<f64>,
    which: LemmaKind,
    grid_level: usize,
) -> Result<EstimateReport> {
    let mut r = lemma_ladder(params, which, grid_level + 1, 0)?;
    Ok(r.levels.pop().expect("at least one level"))
}

/// Quotients of the two elementary inequalities with constant 1:
/// (a) |θ − φ| φ(π − φ)/[(θ + φ)²(2π − θ − φ)²] and
/// (b) θ̃ φ (π − θ̃)(π − φ)/[(θ + φ)²(2π − θ − φ)²] for 2|θ − θ̃| ≤ |θ − φ| (θ̃ defaults to θ).
pub fn lemma_estimates_exact(theta: f64, phi: f64, theta_tilde: Option<f64>) -> Result<(f64, f64)> {
    let inside = |x: f64| x > 0.0 && x < PI;
    if !inside(theta) || !inside(phi) {
        return domain("θ and φ must lie in (0, π)");
    }
    let tt = theta_tilde.unwrap_or(theta);
    if !inside(tt) {
        return domain("θ̃ must lie in (0, π)");
    }
    if 2.0 * (theta - tt).abs() > (theta - phi).abs() {
        return domain("(b) needs 2|θ − θ̃| ≤ |θ − φ|");
    }
    let den = (theta + phi).powi(2) * (2.0 * PI - theta - phi).powi(2);
    let a = (theta - phi).abs() * phi * (PI - phi) / den;
    let b = tt * phi * (PI - tt) * (PI - phi) / den;
    Ok((a, b))
}

/// Maxima of the exact-lemma quotients over random admissible samples, in both role orders.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactLemmaReport {
    pub samples: usize,
    pub seed: u64,
    pub max_a: f64,
    pub max_b: f64,
    pub max_a_swapped: f64,
    pub max_b_swapped: f64,
    pub argmax_a: Vec<f64>,
    pub argmax_b: Vec<f64>,
    pub bound: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Draws θ, φ half uniformly and half clustered within 10^{−6} of the endpoints, and θ̃ (and
/// φ̃ for the swapped roles) uniformly in the admissible window.
pub fn sample_exact_lemmas(samples: usize, seed: u64) -> Result<ExactLemmaReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let angle = |rng: &mut ChaCha8Rng| -> f64 {
        loop {
            let x = if rng.gen::<bool>() {
                rng.gen::<f64>()
            } else {
                let e = 10f64.powf(-6.0 * rng.gen::<f64>());
                if rng.gen::<bool>() {
                    e
                } else {
                    1.0 - e
                }
            };
            let th = PI * x;
            if th > 0.0 && th < PI {
                return th;
            }
        }
    };
    let mut r = ExactLemmaReport {
        samples,
        seed,
        max_a: 0.0,
        max_b: 0.0,
        max_a_swapped: 0.0,
        max_b_swapped: 0.0,
        argmax_a: vec![],
        argmax_b: vec![],
        bound: 1.0,
        tolerance: 1e-12,
        passed: false,
    };
    let mut drawn = 0;
    while drawn < samples {
        let th = angle(&mut rng);
        let ph = angle(&mut rng);
        let half = 0.5 * (th - ph).abs();
        let tt = th + half * rng.gen_range(-1.0..=1.0);
        let pt = ph + half * rng.gen_range(-1.0..=1.0);
        if !(tt > 0.0 && tt < PI && pt > 0.0 && pt < PI) || th == ph {
            continue;
        }
        drawn += 1;
        let (a, b) = lemma_estimates_exact(th, ph, Some(tt))?;
        let (a2, b2) = lemma_estimates_exact(ph, th, Some(pt))?;
        if a > r.max_a {
            r.max_a = a;
            r.argmax_a = vec![th, ph];
        }
        if b > r.max_b {
            r.max_b = b;
            r.argmax_b = vec![th, tt, ph];
        }
        r.max_a_swapped = r.max_a_swapped.max(a2);
        r.max_b_swapped = r.max_b_swapped.max(b2);
    }
    let lim = r.bound + r.tolerance;
    r.passed = r.max_a <= lim && r.max_b <= lim && r.max_a_swapped <= lim && r.max_b_swapped <= lim;
    Ok(r)
}
