//! Empirical checks of kernel estimates on refinement ladders.
//!
//! An estimate "holds empirically" when the supremum of its normalized quotient over nested
//! grids stops growing: the relative increase between the last two levels stays below
//! `Thresholds::stable_growth`. Grids are nested, so the supremum is non-decreasing in the level.

pub mod ap;
pub mod grid;
pub mod lemmas;
pub mod monitor;
pub mod standard;

use serde::Serialize;

pub use ap::{ap_constant, ap_ladder, double_power_in_ap, ApReport, WeightSpec};
pub use grid::OffDiagonalGrid;
pub use lemmas::{
    lemma_estimates_exact, lemma_ladder, lemma_samplers, sample_exact_lemmas, ExactLemmaReport,
    L43Exponents, LemmaKind,
};
pub use monitor::{decay_log_slope, weighted_lp_ratio};
pub use standard::{
    check_gradient, check_growth, check_smoothness, estimate_values, run_standard,
    standard_kernel_table, KernelId, StandardConfig, StockProfile,
};

/// Which inequality a report measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum EstimateId {
    Growth,
    Gradient,
    SmoothTheta,
    SmoothPhi,
    Bridge1,
    Bridge2,
    L43Star,
    Trig,
    Comp,
    EstimatesA,
    EstimatesB,
    Asympt,
}

/// Ladder classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Stable,
    Diverging,
    Inconclusive,
}

/// Thresholds that turn a ladder into a verdict; echoed in every report.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Thresholds {
    /// Stable: relative increase between the last two levels below this.
    pub stable_growth: f64,
    /// Diverging: every one of the last `diverging_steps` steps grows by more than this factor.
    pub diverging_factor: f64,
    pub diverging_steps: usize,
    /// Increases below this absolute amount count as no growth.
    pub absolute_floor: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            stable_growth: 0.05,
            diverging_factor: 2.0,
            diverging_steps: 3,
            absolute_floor: 1e-6,
        }
    }
}

impl Thresholds {
    pub fn classify(&self, sups: &[f64]) -> Verdict {
        let n = sups.len();
        if sups.iter().any(|s| s.is_infinite()) && sups.last().is_some_and(|s| s.is_infinite()) {
            return Verdict::Diverging;
        }
        if n > self.diverging_steps {
            let tail = &sups[n - self.diverging_steps - 1..];
            if tail
                .windows(2)
                .all(|w| w[1] > self.diverging_factor * w[0] && w[1] - w[0] > self.absolute_floor)
            {
                return Verdict::Diverging;
            }
        }
        if n >= 2 {
            let (a, b) = (sups[n - 2], sups[n - 1]);
            if b - a <= self.absolute_floor || b - a < self.stable_growth * a.abs() {
                return Verdict::Stable;
            }
        }
        Verdict::Inconclusive
    }
}

/// One level of a ladder.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateReport {
    pub estimate_id: EstimateId,
    pub grid_level: usize,
    pub empirical_sup: f64,
    pub sample_count: usize,
    /// (θ, φ) or, for samplers over more variables, the full sample.
    pub argmax_point: Vec<f64>,
}

/// Re-evaluation of the finest-level argmax at doubled quadrature resolution; passes when
/// |value − value_fine| ≤ tolerance · max(|value_fine|, 1).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Recheck {
    pub value: f64,
    pub value_fine: f64,
    pub rel_diff: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// All levels of one estimate for one kernel, with its verdict.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LadderReport {
    pub estimate_id: EstimateId,
    pub kernel: String,
    pub alpha: f64,
    pub beta: f64,
    pub levels: Vec<EstimateReport>,
    pub verdict: Verdict,
    pub thresholds: Thresholds,
    pub recheck: Option<Recheck>,
    pub notes: Vec<String>,
}

impl LadderReport {
    pub fn sups(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.empirical_sup).collect()
    }

    /// Whether the supremum never decreases along the ladder.
    pub fn monotone(&self) -> bool {
        self.levels
            .windows(2)
            .all(|w| w[1].empirical_sup >= w[0].empirical_sup)
    }
}

/// Per-level maxima of per-sample values, where `level_of[i]` is the coarsest level containing
/// sample i. Ties keep the first sample, so the reduction is deterministic.
pub(crate) fn ladder_maxima(
    id: EstimateId,
    values: &[f64],
    level_of: &[usize],
    points: &[Vec<f64>],
    levels: usize,
) -> Vec<EstimateReport> {
    (0..levels)
        .map(|lvl| {
            let mut best = f64::NEG_INFINITY;
            let mut arg = 0;
            let mut count = 0;
            for (i, (&v, &l)) in values.iter().zip(level_of).enumerate() {
                if l > lvl {
                    continue;
                }
                count += 1;
                if v > best || (v.is_nan() && !best.is_nan()) {
                    best = v;
                    arg = i;
                }
            }
            EstimateReport {
                estimate_id: id,
                grid_level: lvl,
                empirical_sup: best,
                sample_count: count,
                argmax_point: points.get(arg).cloned().unwrap_or_default(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification() {
        let t = Thresholds::default();
        assert_eq!(t.classify(&[1.0, 1.2, 1.3, 1.31]), Verdict::Stable);
        assert_eq!(t.classify(&[1.0, 3.0, 7.0, 15.0]), Verdict::Diverging);
        assert_eq!(t.classify(&[1.0, 1.5, 1.8, 2.0]), Verdict::Inconclusive);
        assert_eq!(t.classify(&[0.0, 0.0, 1e-12, 2e-12]), Verdict::Stable);
        assert_eq!(t.classify(&[1.0, f64::INFINITY]), Verdict::Diverging);
    }

    #[test]
    fn maxima_are_nested() {
        let vals = [1.0, 5.0, 3.0, 7.0];
        let lv = [0, 1, 0, 2];
        let pts: Vec<Vec<f64>> = (0..4).map(|i| vec![i as f64]).collect();
        let r = ladder_maxima(EstimateId::Growth, &vals, &lv, &pts, 3);
        assert_eq!(
            r.iter().map(|x| x.empirical_sup).collect::<Vec<_>>(),
            vec![3.0, 5.0, 7.0]
        );
        assert_eq!(
            r.iter().map(|x| x.sample_count).collect::<Vec<_>>(),
            vec![2, 3, 4]
        );
        assert_eq!(r[2].argmax_point, vec![3.0]);
    }
}
