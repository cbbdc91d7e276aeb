//! Per-location evaluation of H_t and H^{α+1,β+1}_t together with their derivatives,
//! switching between the small-time moment expansion, direct double-integral quadrature
//! and the spectral series.

use crate::error::{Error, Result};
use crate::jacobi::{trig_poly_deriv_table, JacobiParams};

use super::dk::DkLocation;
use super::e_of_t;
use super::series::{envelope, SeriesEngine, N_CAP};

/// Number of t-derivatives carried (orders 0, 1, 2).
pub const JETS: usize = 3;

/// θ/φ derivative pattern of a kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pattern {
    Value,
    Theta,
    Phi,
    ThetaTheta,
    ThetaPhi,
}

impl Pattern {
    pub const ALL: [Pattern; 5] = [
        Pattern::Value,
        Pattern::Theta,
        Pattern::Phi,
        Pattern::ThetaTheta,
        Pattern::ThetaPhi,
    ];
    /// The patterns vector-valued kernels need.
    pub const VECTOR: [Pattern; 2] = [Pattern::Value, Pattern::Theta];

    pub fn orders(self) -> (usize, usize) {
        match self {
            Pattern::Value => (0, 0),
            Pattern::Theta => (1, 0),
            Pattern::Phi => (0, 1),
            Pattern::ThetaTheta => (2, 0),
            Pattern::ThetaPhi => (1, 1),
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// ∂_t^j ∂_θ^a ∂_φ^b of one kernel family at a single (t, θ, φ).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FamilyJets {
    v: [[f64; JETS]; 5],
}

impl FamilyJets {
    pub fn get(&self, p: Pattern, j: usize) -> f64 {
        self.v[p.index()][j]
    }

    pub fn set(&mut self, p: Pattern, jets: [f64; JETS]) {
        self.v[p.index()] = jets;
    }

    pub fn jets(&self, p: Pattern) -> [f64; JETS] {
        self.v[p.index()]
    }
}

/// Which evaluation route produced a value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Moments,
    Direct,
    Series,
}

/// Tuning knobs of a location evaluator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalConfig {
    /// Gauss nodes per graded Π panel.
    pub dk_per_panel: usize,
    /// Smallest time at which the series is attempted.
    pub t_series_min: f64,
    /// All five derivative patterns, or only value and ∂_θ.
    pub gradients: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            dk_per_panel: 10,
            t_series_min: 0.013,
            gradients: true,
        }
    }
}

/// Series state for one family at one (θ, φ).
#[derive(Clone, Debug)]
struct SeriesLocation {
    engine: SeriesEngine,
    patterns: Vec<Pattern>,
}

impl SeriesLocation {
    fn new(
        params: &JacobiParams<f64>,
        theta: f64,
        phi: f64,
        patterns: &[Pattern],
        len: usize,
    ) -> Self {
        let a = trig_poly_deriv_table(params, len - 1, theta);
        let b = trig_poly_deriv_table(params, len - 1, phi);
        let pick = |t: &crate::jacobi::TrigDerivTable<f64>, n: usize, d: usize| match d {
            0 => t.value[n],
            1 => t.d1[n],
            _ => t.d2[n],
        };
        let nq = patterns.len();
        let mut coeffs = Vec::with_capacity(len * nq);
        let mut env = Vec::with_capacity(len);
        let mut rates = Vec::with_capacity(len);
        for n in 0..len {
            for p in patterns {
                let (da, db) = p.orders();
                coeffs.push(0.5 * pick(&a, n, da) * pick(&b, n, db));
            }
            env.push(envelope(params, theta, n) * envelope(params, phi, n));
            rates.push(params.rate(n));
        }
        let orders = patterns
            .iter()
            .map(|p| (p.orders().0 + p.orders().1) as u32)
            .collect();
        let growth = 2.0 * ((params.alpha + 0.5).max(0.0) + (params.beta + 0.5).max(0.0));
        Self {
            engine: SeriesEngine::new(rates, coeffs, env, orders, growth),
            patterns: patterns.to_vec(),
        }
    }

    fn eval(&self, t: f64) -> Result<FamilyJets> {
        let v = self.engine.eval(t, JETS)?;
        let mut out = FamilyJets::default();
        for (q, &p) in self.patterns.iter().enumerate() {
            out.set(p, [v[q * JETS], v[q * JETS + 1], v[q * JETS + 2]]);
        }
        Ok(out)
    }
}

/// One kernel family (fixed type parameters) at one (θ, φ).
#[derive(Clone, Debug)]
pub struct FamilyEvaluator {
    dk: Option<DkLocation>,
    series: SeriesLocation,
    t_series: f64,
}

impl FamilyEvaluator {
    pub fn new(params: &JacobiParams<f64>, theta: f64, phi: f64, cfg: &EvalConfig) -> Result<Self> {
        let d = (theta - phi).abs();
        let t_series = cfg.t_series_min.max(0.5 * d.min(2.0));
        let patterns: &[Pattern] = if cfg.gradients {
            &Pattern::ALL
        } else {
            &Pattern::VECTOR
        };
        let growth = 2.0 * ((params.alpha + 0.5).max(0.0) + (params.beta + 0.5).max(0.0)) + 4.0;
        let len = (((60.0 + 2.0 * growth) / t_series) as usize + 64).min(N_CAP);
        let dk = if params.kernel_valid() {
            Some(DkLocation::new(
                params,
                theta,
                phi,
                cfg.dk_per_panel,
                0.0,
                cfg.gradients,
            )?)
        } else {
            None
        };
        Ok(Self {
            dk,
            series: SeriesLocation::new(params, theta, phi, patterns, len),
            t_series,
        })
    }

    pub fn t_series(&self) -> f64 {
        self.t_series
    }

    pub fn eval(&self, t: f64) -> Result<(FamilyJets, Regime)> {
        if t >= self.t_series || self.dk.is_none() {
            match self.series.eval(t) {
                Ok(v) => return Ok((v, Regime::Series)),
                Err(Error::Convergence { .. }) if self.dk.is_some() => {}
                Err(e) => return Err(e),
            }
        }
        let dk = self.dk.as_ref().expect("checked above");
        let regime = if e_of_t(t) <= dk.moment_limit() {
            Regime::Moments
        } else {
            Regime::Direct
        };
        Ok((dk.jets(t), regime))
    }
}

/// H and H^{α+1,β+1} (the latter builds H̃ = ¼ sin θ sin φ H^{α+1,β+1}) at one (θ, φ).
#[derive(Clone, Debug)]
pub struct LocationEvaluator {
    pub theta: f64,
    pub phi: f64,
    base: FamilyEvaluator,
    shifted: FamilyEvaluator,
}

/// Jets of both families at one time.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LocationJets {
    pub h: FamilyJets,
    pub h_shifted: FamilyJets,
}

impl LocationEvaluator {
    pub fn new(params: &JacobiParams<f64>, theta: f64, phi: f64, cfg: &EvalConfig) -> Result<Self> {
        Ok(Self {
            theta,
            phi,
            base: FamilyEvaluator::new(params, theta, phi, cfg)?,
            shifted: FamilyEvaluator::new(&params.shifted(), theta, phi, cfg)?,
        })
    }

    pub fn eval(&self, t: f64) -> Result<LocationJets> {
        Ok(LocationJets {
            h: self.base.eval(t)?.0,
            h_shifted: self.shifted.eval(t)?.0,
        })
    }

    /// Routes used for the two families at time t.
    pub fn regimes(&self, t: f64) -> Result<(Regime, Regime)> {
        Ok((self.base.eval(t)?.1, self.shifted.eval(t)?.1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::series::{series_term, SeriesSpec};
    use crate::kernels::KernelPoint;

    #[test]
    fn all_regimes_match_series() {
        let q = JacobiParams::new(0.5, 2.0).unwrap();
        let (th, ph) = (1.2, 1.25);
        let ev = LocationEvaluator::new(&q, th, ph, &EvalConfig::default()).unwrap();
        let mut seen = Vec::new();
        for &t in &[0.003, 0.02, 0.05, 0.5, 4.0] {
            let (r, _) = ev.regimes(t).unwrap();
            seen.push(r);
            let jets = ev.eval(t).unwrap().h;
            if t < 0.015 {
                continue; // series too slow to serve as the oracle here
            }
            let pt = KernelPoint::new(t, th, ph).unwrap();
            for p in Pattern::ALL {
                let (a, b) = p.orders();
                for j in 0..JETS {
                    let s = series_term(
                        &q,
                        &pt,
                        SeriesSpec {
                            t_order: j,
                            theta_deriv: a,
                            phi_deriv: b,
                        },
                    )
                    .unwrap();
                    let v = jets.get(p, j);
                    assert!(
                        (v - s).abs() < 1e-8 * s.abs().max(1.0),
                        "t={t} {p:?} j={j}: {v} vs {s}"
                    );
                }
            }
        }
        assert!(seen.contains(&Regime::Moments));
        assert!(seen.contains(&Regime::Direct));
        assert!(seen.contains(&Regime::Series));
    }
}
