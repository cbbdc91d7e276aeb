//! Norms in t: the supremum over a t-grid and weighted L²(t^{2M+2N−1} dt).

use crate::error::{domain, Error, Result};
use crate::quadrature::{gauss_legendre, MeasureTag, QuadratureRule};

/// Sampling grid for a supremum over t.
#[derive(Clone, Debug, PartialEq)]
pub enum TGrid {
    LogSpaced {
        t_min: f64,
        t_max: f64,
        per_decade: usize,
    },
    Nodes(Vec<f64>),
}

impl TGrid {
    /// 200 points per decade over [1e-4, 50].
    pub fn default_sup() -> Self {
        TGrid::LogSpaced {
            t_min: 1e-4,
            t_max: 50.0,
            per_decade: 200,
        }
    }

    pub fn points(&self) -> Vec<f64> {
        match self {
            TGrid::Nodes(v) => v.clone(),
            TGrid::LogSpaced {
                t_min,
                t_max,
                per_decade,
            } => {
                let decades = (t_max / t_min).log10();
                let n = (decades * *per_decade as f64).ceil() as usize;
                (0..=n)
                    .map(|i| t_min * 10f64.powf(decades * i as f64 / n as f64))
                    .collect()
            }
        }
    }
}

/// The norm a vector-valued kernel is measured in.
#[derive(Clone, Debug, PartialEq)]
pub enum BNorm {
    SupOverT(TGrid),
    /// L²(t^{2M+2N−1} dt) by the given rule in t.
    L2TWeighted {
        m: usize,
        n: usize,
        rule: QuadratureRule<f64>,
    },
}

/// Composite Gauss–Legendre in ln t over [t_min, t_max] with panels of at most `width` in ln t;
/// weights include the Jacobian t.
pub fn log_time_rule(t_min: f64, t_max: f64, width: f64, per_panel: usize) -> QuadratureRule<f64> {
    let (a, b) = (t_min.ln(), t_max.ln());
    let panels = ((b - a) / width).ceil().max(1.0) as usize;
    let h = (b - a) / panels as f64;
    let (gx, gw) = gauss_legendre(per_panel);
    let mut nodes = Vec::with_capacity(panels * per_panel);
    let mut weights = Vec::with_capacity(panels * per_panel);
    for k in 0..panels {
        let lo = a + h * k as f64;
        for (&x, &w) in gx.iter().zip(&gw) {
            let t = (lo + 0.5 * h * (1.0 + x)).exp();
            nodes.push(t);
            weights.push(0.5 * h * w * t);
        }
    }
    QuadratureRule {
        nodes,
        weights,
        measure_tag: MeasureTag::LebesgueT,
    }
}

impl BNorm {
    /// Weighted L² norm on [1e-8, T], T chosen so that e^{−2T r} T^{2M+2N−1} is negligible,
    /// where r is the slowest decay rate present.
    pub fn l2_default(m: usize, n: usize, slowest_rate: f64) -> Result<Self> {
        if m + n == 0 {
            return domain("the weighted L² norm needs M + N > 0");
        }
        if !(slowest_rate > 0.0) {
            return domain("the weighted L² norm needs a positive decay rate");
        }
        let k = (2 * m + 2 * n - 1) as f64;
        let mut t = 1.0;
        while (-2.0 * t * slowest_rate + k * t.ln()).exp() * t > 1e-18 {
            t *= 1.25;
        }
        Ok(BNorm::L2TWeighted {
            m,
            n,
            rule: log_time_rule(1e-8, t, std::f64::consts::LN_10 / 4.0, 8),
        })
    }
}

/// ‖f‖ in the chosen norm; non-finite samples are reported with their t.
pub fn bnorm(f: impl Fn(f64) -> f64, spec: &BNorm) -> Result<f64> {
    let finite = |t: f64, v: f64| {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite(format!("t = {t:e}")))
        }
    };
    match spec {
        BNorm::SupOverT(grid) => {
            let mut best = 0.0f64;
            for t in grid.points() {
                best = best.max(finite(t, f(t))?.abs());
            }
            Ok(best)
        }
        BNorm::L2TWeighted { m, n, rule } => {
            let k = (2 * m + 2 * n) as i32 - 1;
            let mut acc = 0.0;
            for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
                let v = finite(t, f(t))?;
                acc += w * v * v * t.powi(k);
            }
            Ok(acc.sqrt())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sup_of_constant() {
        assert_eq!(
            bnorm(|_| -2.5, &BNorm::SupOverT(TGrid::default_sup())).unwrap(),
            2.5
        );
    }

    #[test]
    fn gamma_integral() {
        let spec = BNorm::l2_default(1, 0, 1.0).unwrap();
        let v = bnorm(|t: f64| (-t).exp(), &spec).unwrap();
        assert!((v * v - 0.25).abs() < 1e-12);
    }

    #[test]
    fn refinement_is_stable() {
        let f = |t: f64| t * (-t).exp() / (1.0 + t * t);
        let coarse = bnorm(
            f,
            &BNorm::L2TWeighted {
                m: 0,
                n: 1,
                rule: log_time_rule(1e-8, 60.0, 1.0, 8),
            },
        )
        .unwrap();
        let fine = bnorm(
            f,
            &BNorm::L2TWeighted {
                m: 0,
                n: 1,
                rule: log_time_rule(1e-8, 60.0, 0.5, 8),
            },
        )
        .unwrap();
        assert!((coarse / fine - 1.0).abs() < 0.005);
    }

    #[test]
    fn non_finite_is_named() {
        let e = bnorm(
            |t| if t > 1.0 { f64::NAN } else { 1.0 },
            &BNorm::SupOverT(TGrid::default_sup()),
        );
        assert!(matches!(e, Err(Error::NonFinite(_))));
    }
}
