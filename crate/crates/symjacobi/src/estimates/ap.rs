//! Empirical A_p constants of double-power weights |sin(θ/2)|^r (cos(θ/2))^s with respect to
//! dμ on (−π, π), over dyadic intervals.

use serde::Serialize;

use super::{Thresholds, Verdict};
use crate::error::{domain, Result};
use crate::jacobi::JacobiParams;
use crate::quadrature::beta_interval;

const PI: f64 = std::f64::consts::PI;

/// w(θ) = |sin(θ/2)|^r (cos(θ/2))^s and the exponent p ≥ 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WeightSpec {
    pub r: f64,
    pub s: f64,
    pub p: f64,
}

impl WeightSpec {
    pub fn new(r: f64, s: f64, p: f64) -> Result<Self> {
        if !r.is_finite() || !s.is_finite() || !(p >= 1.0) || !p.is_finite() {
            return domain("weight needs finite r, s and finite p ≥ 1");
        }
        Ok(Self { r, s, p })
    }

    pub fn eval(&self, theta: f64) -> f64 {
        (0.5 * theta).sin().abs().powf(self.r) * (0.5 * theta).cos().powf(self.s)
    }
}

/// Membership of a double-power weight in A_p for dμ: for p > 1,
/// −(2α+2) < r < (2α+2)(p−1) and −(2β+2) < s < (2β+2)(p−1); for p = 1,
/// −(2α+2) < r ≤ 0 and −(2β+2) < s ≤ 0.
pub fn double_power_in_ap(params: &JacobiParams<f64>, w: &WeightSpec) -> bool {
    let (ka, kb) = (2.0 * params.alpha + 2.0, 2.0 * params.beta + 2.0);
    if w.p == 1.0 {
        -ka < w.r && w.r <= 0.0 && -kb < w.s && w.s <= 0.0
    } else {
        -ka < w.r && w.r < ka * (w.p - 1.0) && -kb < w.s && w.s < kb * (w.p - 1.0)
    }
}

/// ∫ y^a (1−y)^b over a cell; a cell touching a non-integrable endpoint contributes only its
/// part beyond the cell, i.e. nothing, so the resolution acts as a truncation there.
fn cell(a: f64, b: f64, y0: f64, y1: f64) -> f64 {
    if (y0 == 0.0 && a <= -1.0) || (y1 == 1.0 && b <= -1.0) {
        return 0.0;
    }
    beta_interval(a, b, y0, y1)
}

/// max over dyadic subintervals I of (−π, π) with |I| ≥ 2π/2^n of
/// [avg_I w][avg_I w^{−p′/p}]^{p/p′} (p > 1) or [avg_I w] ess sup_I w^{−1} (p = 1), with averages
/// taken against dμ. In y = sin²(θ/2), w dμ⁺ = y^{α+r/2}(1−y)^{β+s/2} dy, so every finest cell is
/// an incomplete Beta integral; coarser intervals sum them pairwise.
/// Returns the constant and the maximizing interval.
pub fn ap_constant(
    weight: &WeightSpec,
    params: &JacobiParams<f64>,
    n_intervals: usize,
) -> Result<(f64, (f64, f64))> {
    if n_intervals == 0 || n_intervals > 24 {
        return domain("n_intervals must lie in 1..=24");
    }
    let (a, b) = (params.alpha, params.beta);
    let half = 1usize << (n_intervals - 1);
    let h = PI / half as f64;
    let y = |t: f64| (0.5 * t).sin().powi(2);
    let q = if weight.p > 1.0 {
        1.0 / (weight.p - 1.0)
    } else {
        0.0
    };
    // cells of (0, π), index k covers [k h, (k+1) h]
    let mut m = Vec::with_capacity(half);
    let mut wv = Vec::with_capacity(half);
    let mut vv = Vec::with_capacity(half);
    for k in 0..half {
        let y0 = if k == 0 { 0.0 } else { y(k as f64 * h) };
        let y1 = if k + 1 == half {
            1.0
        } else {
            y((k + 1) as f64 * h)
        };
        m.push(cell(a, b, y0, y1));
        wv.push(cell(a + 0.5 * weight.r, b + 0.5 * weight.s, y0, y1));
        vv.push(if weight.p > 1.0 {
            cell(a - 0.5 * weight.r * q, b - 0.5 * weight.s * q, y0, y1)
        } else {
            0.0
        });
    }
    // cells of (−π, π) left to right, mirrored by evenness; coarser intervals are pairwise
    // sums of finer ones, which keeps tiny end cells free of prefix-sum cancellation
    let full = 2 * half;
    let mirror = |j: usize| if j >= half { j - half } else { half - 1 - j };
    let mut level: Vec<[f64; 3]> = (0..full)
        .map(|j| [m[mirror(j)], wv[mirror(j)], vv[mirror(j)]])
        .collect();
    let mut best = f64::NEG_INFINITY;
    let mut arg = (-PI, PI);
    for scale in (0..=n_intervals).rev() {
        let width = full >> scale;
        for (i, &[mu, sw, sv]) in level.iter().enumerate() {
            let (lo, hi) = (i * width, (i + 1) * width);
            let avg_w = sw / mu;
            let second = if weight.p > 1.0 {
                (sv / mu).powf(weight.p - 1.0)
            } else {
                inv_weight_sup(weight, -PI + lo as f64 * h, -PI + hi as f64 * h)
            };
            let val = avg_w * second;
            if val > best {
                best = val;
                arg = (-PI + lo as f64 * h, -PI + hi as f64 * h);
            }
        }
        if scale > 0 {
            level = level
                .chunks(2)
                .map(|c| [c[0][0] + c[1][0], c[0][1] + c[1][1], c[0][2] + c[1][2]])
                .collect();
        }
    }
    Ok((best, arg))
}

/// sup of 1/w over [t0, t1] ⊂ [−π, π]: endpoints, the interior critical point
/// tan²(θ/2) = r/s, and +∞ when a singular endpoint is touched.
fn inv_weight_sup(w: &WeightSpec, t0: f64, t1: f64) -> f64 {
    let (lo, hi) = if t0 <= 0.0 && t1 >= 0.0 {
        (0.0, t0.abs().max(t1.abs()))
    } else {
        (t0.abs().min(t1.abs()), t0.abs().max(t1.abs()))
    };
    if (lo == 0.0 && w.r > 0.0) || (hi >= PI && w.s > 0.0) {
        return f64::INFINITY;
    }
    let g = |t: f64| 1.0 / w.eval(t);
    let mut best = g(lo.max(1e-300)).max(g(hi.min(PI - 1e-15)));
    if w.r * w.s > 0.0 {
        let c = 2.0 * (w.r / w.s).sqrt().atan();
        if c > lo && c < hi {
            best = best.max(g(c));
        }
    }
    best
}

/// One ladder rung.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApLevel {
    pub level: usize,
    pub n_intervals: usize,
    pub constant: f64,
    pub argmax_interval: (f64, f64),
}

/// A_p ladder with the exact membership classification for comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApReport {
    pub weight: WeightSpec,
    pub alpha: f64,
    pub beta: f64,
    pub levels: Vec<ApLevel>,
    pub verdict: Verdict,
    /// "finite" when the ladder settles, "infinite" when it diverges.
    pub classification: String,
    pub in_class: bool,
    pub agrees: bool,
    pub thresholds: Thresholds,
}

/// Finest scale 2π/2^{4(ℓ+1)} at level ℓ, so a non-integrable w^{−p′/p} ∝ y^{−1−ε} near an
/// endpoint grows by 16^{2ε} per level.
pub fn ap_ladder(
    weight: &WeightSpec,
    params: &JacobiParams<f64>,
    levels: usize,
) -> Result<ApReport> {
    if levels == 0 || levels > 6 {
        return domain("A_p ladder needs between 1 and 6 levels");
    }
    let mut out = Vec::new();
    for level in 0..levels {
        let n = 4 * (level + 1);
        let (constant, argmax_interval) = ap_constant(weight, params, n)?;
        out.push(ApLevel {
            level,
            n_intervals: n,
            constant,
            argmax_interval,
        });
    }
    let th = Thresholds::default();
    let sups: Vec<f64> = out.iter().map(|l| l.constant).collect();
    let verdict = th.classify(&sups);
    let in_class = double_power_in_ap(params, weight);
    let agrees = matches!(
        (verdict, in_class),
        (Verdict::Stable, true) | (Verdict::Diverging, false)
    );
    Ok(ApReport {
        weight: *weight,
        alpha: params.alpha,
        beta: params.beta,
        levels: out,
        classification: if verdict == Verdict::Diverging {
            "infinite"
        } else {
            "finite"
        }
        .into(),
        verdict,
        in_class,
        agrees,
        thresholds: th,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_weight_is_one_at_every_scale() {
        let q = JacobiParams::new(0.5, -0.25).unwrap();
        let w = WeightSpec::new(0.0, 0.0, 2.0).unwrap();
        for n in [2, 6, 10] {
            assert_eq!(ap_constant(&w, &q, n).unwrap().0, 1.0);
        }
    }

    #[test]
    fn membership_ranges() {
        let q = JacobiParams::new(0.0, 0.0).unwrap();
        assert!(double_power_in_ap(
            &q,
            &WeightSpec::new(1.0, -1.0, 2.0).unwrap()
        ));
        assert!(!double_power_in_ap(
            &q,
            &WeightSpec::new(2.5, 0.0, 2.0).unwrap()
        ));
        assert!(double_power_in_ap(
            &q,
            &WeightSpec::new(-1.0, -0.5, 1.0).unwrap()
        ));
        assert!(!double_power_in_ap(
            &q,
            &WeightSpec::new(0.5, 0.0, 1.0).unwrap()
        ));
    }

    #[test]
    fn one_weight_p1_has_unit_constant() {
        let q = JacobiParams::new(0.0, 0.0).unwrap();
        let w = WeightSpec::new(0.0, 0.0, 1.0).unwrap();
        assert!((ap_constant(&w, &q, 8).unwrap().0 - 1.0).abs() < 1e-12);
    }
}
