//! Nested off-diagonal sample grids for (θ, φ) ∈ (0, π)², θ ≠ φ.

use serde::Serialize;

use crate::error::{domain, Result};

/// Sampled angles stay this far from 0 and π.
pub const EDGE: f64 = 1e-3;
/// Smallest sampled separation |θ − φ|; closer approach is excluded.
pub const D_MIN: f64 = 1e-3;
/// Separations below this are sampled by the near-diagonal family.
pub const D_STRIP: f64 = 0.05;
/// Where the angle map switches from geometric to uniform spacing.
const GRADE_SWITCH: f64 = 0.25;
const TENSOR_BASE: usize = 8;
const STRIP_THETA_BASE: usize = 4;
const STRIP_D_BASE: usize = 2;

/// Map [0, 1] → [EDGE, π − EDGE]: geometric spacing from each end up to `GRADE_SWITCH`
/// away from it, uniform in between, continuously differentiable.
#[derive(Clone, Copy, Debug)]
struct AngleMap {
    /// fraction of the half-interval spent on the geometric part
    u_switch: f64,
    rate: f64,
}

impl AngleMap {
    fn new() -> Self {
        // on the half [0, ½] ↦ [EDGE, π/2]: θ = EDGE e^{2 rate u} for u ≤ u_s, then linear with
        // matching slope; u_s solves ln(c/EDGE) c (1 − 2u_s)/(2u_s) = π/2 − c for c = GRADE_SWITCH
        let c = GRADE_SWITCH;
        let l = (c / EDGE).ln();
        let target = std::f64::consts::FRAC_PI_2 - c;
        // l c (1 − x)/x = target with x = 2u_s
        let x = l * c / (target + l * c);
        Self {
            u_switch: 0.5 * x,
            rate: l / x,
        }
    }

    fn half(&self, u: f64) -> f64 {
        let us = self.u_switch;
        if u <= us {
            EDGE * (2.0 * self.rate * u).exp()
        } else {
            GRADE_SWITCH + GRADE_SWITCH * 2.0 * self.rate * (u - us)
        }
    }

    fn at(&self, s: f64) -> f64 {
        if s <= 0.5 {
            self.half(s)
        } else {
            std::f64::consts::PI - self.half(1.0 - s)
        }
    }
}

/// Two nested families of points. The tensor family pairs every two angles of a boundary-graded
/// grid with |θ − φ| ≥ `D_STRIP`; the strip family places φ = θ ± d with d geometric on
/// [`D_MIN`, `D_STRIP`). Level ℓ doubles every resolution of level ℓ − 1 and contains it; the
/// extreme angles and separations are present at every level.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OffDiagonalGrid {
    pub levels: usize,
    pub points: Vec<(f64, f64)>,
    /// Coarsest level containing each point.
    pub level_of: Vec<usize>,
    pub exclusion_radius: f64,
}

fn coarsest_level(i: usize, finest: usize) -> usize {
    (0..=finest)
        .find(|&l| i.is_multiple_of(1 << (finest - l)))
        .unwrap_or(finest)
}

impl OffDiagonalGrid {
    /// Grid with levels 0..levels (so `levels` ≥ 1).
    pub fn new(levels: usize) -> Result<Self> {
        if levels == 0 || levels > 8 {
            return domain("grid needs between 1 and 8 levels");
        }
        let finest = levels - 1;
        let map = AngleMap::new();
        let pi = std::f64::consts::PI;
        let inside = |x: f64| (EDGE..=pi - EDGE).contains(&x);
        let mut points = Vec::new();
        let mut level_of = Vec::new();

        let n = TENSOR_BASE << finest;
        let angles: Vec<f64> = (0..=n).map(|i| map.at(i as f64 / n as f64)).collect();
        for i in 0..=n {
            for j in 0..=n {
                if (angles[i] - angles[j]).abs() >= D_STRIP {
                    points.push((angles[i], angles[j]));
                    level_of.push(coarsest_level(i, finest).max(coarsest_level(j, finest)));
                }
            }
        }

        let n = STRIP_THETA_BASE << finest;
        let m = STRIP_D_BASE << finest;
        for i in 0..=n {
            let theta = map.at(i as f64 / n as f64);
            let li = coarsest_level(i, finest);
            for j in 0..m {
                let d = D_MIN * (D_STRIP / D_MIN).powf(j as f64 / m as f64);
                let lj = coarsest_level(j, finest);
                for sign in [1.0, -1.0] {
                    let phi = theta + sign * d;
                    if inside(phi) {
                        points.push((theta, phi));
                        level_of.push(li.max(lj));
                    }
                }
            }
        }
        Ok(Self {
            levels,
            points,
            level_of,
            exclusion_radius: D_MIN,
        })
    }

    pub fn count_at(&self, level: usize) -> usize {
        self.level_of.iter().filter(|&&l| l <= level).count()
    }
}
