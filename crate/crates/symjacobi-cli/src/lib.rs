//! Command implementations behind the `symjacobi` binary. Each command returns its output as a
//! string so that tests can compare it byte for byte; the binary only parses flags and writes.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;
use symjacobi::basis::{analyze_with_nodes, phi_table, synthesize_at, Parity, SymmetrizedCoeffs};
use symjacobi::estimates::{ap_ladder, ApReport, WeightSpec};
use symjacobi::jacobi::JacobiParams;
use symjacobi::kernels::{
    poisson_kernel_dk_auto, poisson_kernel_series, symmetrized_kernel, tilde_kernel_series,
    KernelPoint,
};
use symjacobi::operators::{
    analyze_restricted, fractional_power_atoms, gfun_apply, maximal_apply, multiplier_apply,
    riesz_apply, semigroup_apply, synthesize_restricted, MultiplierSpec, ParityTarget, Profile,
};
use symjacobi::quadrature::{default_mu_nodes, mu_plus_rule};
use symjacobi::verify::{run_suite, Suite, VerifyConfig, VerifyReport};

/// Settings shared by every subcommand.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub alpha: f64,
    pub beta: f64,
    pub n_max: usize,
    /// Grid points for CSV output and, for the operator command, the analysis rule size.
    pub nodes: usize,
    pub level: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            alpha: 0.0,
            beta: 0.0,
            n_max: 16,
            nodes: 32,
            level: 3,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn params(&self) -> Result<JacobiParams<f64>> {
        Ok(JacobiParams::new(self.alpha, self.beta)?)
    }
}

/// Midpoint grid of `n` angles on (−π, π), symmetric under θ ↦ −θ.
pub fn symmetric_grid(n: usize) -> Vec<f64> {
    let h = 2.0 * PI / n as f64;
    (0..n).map(|j| -PI + (j as f64 + 0.5) * h).collect()
}

/// Midpoint grid of `n` angles on (0, π).
pub fn half_grid(n: usize) -> Vec<f64> {
    let h = PI / n as f64;
    (0..n).map(|j| (j as f64 + 0.5) * h).collect()
}

fn echo(cfg: &RunConfig) -> String {
    format!(
        "# alpha={} beta={} n_max={}\n",
        cfg.alpha, cfg.beta, cfg.n_max
    )
}

/// Rows (n, θ, Φₙ(θ)) for n ≤ n_max on the symmetric grid of `nodes` angles.
pub fn cmd_basis(cfg: &RunConfig) -> Result<String> {
    let params = cfg.params()?;
    if cfg.nodes == 0 {
        bail!("--nodes must be positive");
    }
    let thetas = symmetric_grid(cfg.nodes);
    let tables: Vec<Vec<f64>> = thetas
        .par_iter()
        .map(|&t| phi_table(&params, cfg.n_max, t))
        .collect();
    let mut out = echo(cfg);
    out.push_str("n,theta,phi\n");
    for n in 0..=cfg.n_max {
        for (t, table) in thetas.iter().zip(&tables) {
            writeln!(out, "{n},{t:.17e},{:.17e}", table[n])?;
        }
    }
    Ok(out)
}

/// How the even kernel H (and H̃ through the shifted parameters) is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Series,
    Dk,
    Both,
}

impl FromStr for Route {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "series" => Route::Series,
            "dk" => Route::Dk,
            "both" => Route::Both,
            _ => bail!("unknown route '{s}', expected series|dk|both"),
        })
    }
}

impl Route {
    fn name(self) -> &'static str {
        match self {
            Route::Series => "series",
            Route::Dk => "dk",
            Route::Both => "both",
        }
    }
}

/// H and H̃ at one point by the double-integral representation, which takes angles in (0, π):
/// H is even in each angle and H̃ = ¼ sin θ sin φ H^{(α+1, β+1)}.
fn kernels_dk(params: &JacobiParams<f64>, p: &KernelPoint) -> symjacobi::Result<(f64, f64)> {
    let q = KernelPoint::new(p.t, p.theta.abs(), p.phi.abs())?;
    let h = poisson_kernel_dk_auto(params, &q)?;
    let ht = 0.25 * p.theta.sin() * p.phi.sin() * poisson_kernel_dk_auto(&params.shifted(), &q)?;
    Ok((h, ht))
}

fn kernels_series(
    params: &JacobiParams<f64>,
    p: &KernelPoint,
) -> symjacobi::Result<(f64, f64, f64)> {
    Ok((
        poisson_kernel_series(params, p)?,
        tilde_kernel_series(params, p)?,
        symmetrized_kernel(params, p)?,
    ))
}

/// Kernel grid over all pairs of the symmetric grid at time t.
///
/// Columns: t, θ, φ, H, H̃, ℍ, mass_H = ∫ H_t(θ, ·) dμ⁺ (which equals e^{−t(α+β+1)/2}/2), route,
/// rel_diff (series vs double integral for `both`, else empty) and status (`ok` or the error of
/// that row, whose numeric fields are then NaN).
pub fn cmd_kernel(cfg: &RunConfig, t: f64, route: Route) -> Result<String> {
    let params = cfg.params()?;
    KernelPoint::new(t, 0.0, 0.0)?;
    if cfg.nodes == 0 {
        bail!("--nodes must be positive");
    }
    if route != Route::Series && !params.kernel_valid() {
        bail!("the double-integral route needs alpha, beta >= -1/2");
    }
    let thetas = symmetric_grid(cfg.nodes);
    let rule = mu_plus_rule(&params, default_mu_nodes(&params).max(200))?;
    let masses: Vec<symjacobi::Result<f64>> = thetas
        .par_iter()
        .map(|&th| {
            let mut acc = 0.0;
            for (&ph, &w) in rule.nodes.iter().zip(&rule.weights) {
                acc += w * poisson_kernel_series(&params, &KernelPoint::new(t, th, ph)?)?;
            }
            Ok(acc)
        })
        .collect();
    let pairs: Vec<(usize, f64, f64)> = thetas
        .iter()
        .enumerate()
        .flat_map(|(i, &a)| thetas.iter().map(move |&b| (i, a, b)))
        .collect();
    let rows: Vec<String> = pairs
        .par_iter()
        .map(|&(i, th, ph)| {
            let row = || -> symjacobi::Result<(f64, f64, f64, f64, Option<f64>)> {
                let p = KernelPoint::new(t, th, ph)?;
                let mass = masses[i].clone()?;
                Ok(match route {
                    Route::Series => {
                        let (h, ht, hs) = kernels_series(&params, &p)?;
                        (h, ht, hs, mass, None)
                    }
                    Route::Dk => {
                        let (h, ht) = kernels_dk(&params, &p)?;
                        (h, ht, h + ht, mass, None)
                    }
                    Route::Both => {
                        let (h, ht, hs) = kernels_series(&params, &p)?;
                        let (hd, htd) = kernels_dk(&params, &p)?;
                        let rel = ((h - hd).abs() / h.abs()).max((hs - hd - htd).abs() / hs.abs());
                        (h, ht, hs, mass, Some(rel))
                    }
                })
            };
            let name = route.name();
            match row() {
                Ok((h, ht, hs, mass, rel)) => {
                    let rel = rel.map(|r| format!("{r:.6e}")).unwrap_or_default();
                    format!("{t},{th:.17e},{ph:.17e},{h:.17e},{ht:.17e},{hs:.17e},{mass:.17e},{name},{rel},ok\n")
                }
                Err(e) => {
                    let msg = e.to_string().replace([',', '\n'], ";");
                    format!("{t},{th:.17e},{ph:.17e},NaN,NaN,NaN,NaN,{name},,{msg}\n")
                }
            }
        })
        .collect();
    let mut out = echo(cfg);
    out.push_str("t,theta,phi,H,H_tilde,H_sym,mass_H,route,rel_diff,status\n");
    out.extend(rows);
    Ok(out)
}

/// Operator selected by `--op`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpName {
    Semigroup,
    Maximal,
    Riesz,
    Gfun,
    Multiplier,
}

impl FromStr for OpName {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "semigroup" => OpName::Semigroup,
            "maximal" => OpName::Maximal,
            "riesz" => OpName::Riesz,
            "gfun" => OpName::Gfun,
            "multiplier" => OpName::Multiplier,
            _ => bail!("unknown operator '{s}', expected semigroup|maximal|riesz|gfun|multiplier"),
        })
    }
}

/// Parses `full`, `even` or `odd`.
pub fn parse_parity(s: &str) -> Result<ParityTarget> {
    Ok(match s {
        "full" => ParityTarget::FullSymmetrized,
        "even" => ParityTarget::RestrictedEven,
        "odd" => ParityTarget::RestrictedOdd,
        _ => bail!("unknown parity '{s}', expected full|even|odd"),
    })
}

/// Operator settings beyond the shared configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorArgs {
    pub op: OpName,
    /// Order N of δ_N / D^N for Riesz transforms and square functions.
    pub order: usize,
    /// Number M of t-derivatives in square functions.
    pub m: usize,
    /// Semigroup time.
    pub t: f64,
    pub parity: ParityTarget,
    /// Multiplier profile φ for m(z) = ∫ z e^{−tz} φ(t) dt: `one` or `sign-sin`.
    pub profile: String,
    /// Atoms (t, weight) of a Laplace–Stieltjes multiplier; overrides `profile` when non-empty.
    pub atoms: Vec<(f64, f64)>,
    /// Use the atoms representing z^{−1/2}.
    pub inverse_sqrt: bool,
}

impl Default for OperatorArgs {
    fn default() -> Self {
        Self {
            op: OpName::Semigroup,
            order: 1,
            m: 0,
            t: 1.0,
            parity: ParityTarget::FullSymmetrized,
            profile: "one".into(),
            atoms: Vec::new(),
            inverse_sqrt: false,
        }
    }
}

/// Parses `t:w,t:w,...`.
pub fn parse_atoms(s: &str) -> Result<Vec<(f64, f64)>> {
    s.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|pair| {
            let (t, w) = pair
                .split_once(':')
                .ok_or_else(|| anyhow!("atom '{pair}' is not of the form t:w"))?;
            Ok((t.trim().parse()?, w.trim().parse()?))
        })
        .collect()
}

/// Input read from a CSV file: coefficients (`index,value`) or samples (`theta,value`).
#[derive(Clone, Debug, PartialEq)]
pub enum OperatorInput {
    Coefficients(Vec<f64>),
    Samples(Vec<(f64, f64)>),
}

/// Parses an input CSV; lines starting with `#` are ignored.
pub fn parse_input(text: &str) -> Result<OperatorInput> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        if rec.len() != 2 {
            bail!("expected two columns, found {}", rec.len());
        }
        rows.push((rec[0].parse::<f64>()?, rec[1].parse::<f64>()?));
    }
    match header.first().map(String::as_str) {
        Some("index") | Some("n") => {
            let mut c = vec![0.0; rows.iter().map(|r| r.0 as usize + 1).max().unwrap_or(0)];
            for (i, v) in rows {
                if i < 0.0 || i.fract() != 0.0 {
                    bail!("coefficient index {i} is not a non-negative integer");
                }
                c[i as usize] = v;
            }
            Ok(OperatorInput::Coefficients(c))
        }
        Some("theta") => {
            if rows.len() < 2 {
                bail!("need at least two samples");
            }
            rows.sort_by(|a, b| a.0.total_cmp(&b.0));
            Ok(OperatorInput::Samples(rows))
        }
        _ => bail!("input header must start with 'index' or 'theta'"),
    }
}

fn interpolate(samples: &[(f64, f64)], x: f64) -> f64 {
    let i = samples.partition_point(|s| s.0 < x);
    if i == 0 {
        return samples[0].1;
    }
    if i == samples.len() {
        return samples[i - 1].1;
    }
    let ((x0, y0), (x1, y1)) = (samples[i - 1], samples[i]);
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// Coefficients of the input in the convention of `parity`: ⟨f, Φₙ⟩_{dμ} for the full form and
/// restricted inner products ⟨f, Φₙ⟩_{dμ⁺} of one parity otherwise. Samples are interpolated
/// linearly before analysis.
fn input_coeffs(
    params: &JacobiParams<f64>,
    input: &OperatorInput,
    parity: ParityTarget,
    cfg: &RunConfig,
) -> Result<SymmetrizedCoeffs<f64>> {
    Ok(match input {
        OperatorInput::Coefficients(c) => {
            let mut c = c.clone();
            c.resize(c.len().max(cfg.n_max + 1), 0.0);
            SymmetrizedCoeffs::new(*params, c)
        }
        OperatorInput::Samples(s) => {
            let f = |x: f64| interpolate(s, x);
            match parity {
                ParityTarget::FullSymmetrized => {
                    analyze_with_nodes(params, f, cfg.n_max, cfg.nodes.max(2 * cfg.n_max))?
                }
                ParityTarget::RestrictedEven => {
                    analyze_restricted(params, f, Parity::Even, cfg.n_max)?
                }
                ParityTarget::RestrictedOdd => {
                    analyze_restricted(params, f, Parity::Odd, cfg.n_max)?
                }
            }
        }
    })
}

/// Fixed log grid of 64 times on [1e−3, 1e2] for the maximal function.
pub fn maximal_t_grid() -> Vec<f64> {
    (0..64)
        .map(|j| 10f64.powf(-3.0 + 5.0 * j as f64 / 63.0))
        .collect()
}

/// Applies an operator. Coefficient-valued operators (semigroup, riesz, multiplier) emit
/// `index,value`; square and maximal functions emit `theta,value` on a midpoint grid of `nodes`
/// angles, over (−π, π) for the full form and (0, π) for a restricted one. The semigroup also
/// accepts restricted inputs, which it maps within their class.
pub fn cmd_operator(cfg: &RunConfig, args: &OperatorArgs, input: &OperatorInput) -> Result<String> {
    let params = cfg.params()?;
    let f = input_coeffs(&params, input, args.parity, cfg)?;
    let mut out = echo(cfg);
    let coeff_csv = |c: SymmetrizedCoeffs<f64>, out: &mut String| -> Result<()> {
        out.push_str("index,value\n");
        for (n, v) in c.coeffs.iter().enumerate() {
            writeln!(out, "{n},{v:.17e}")?;
        }
        Ok(())
    };
    let thetas = match args.parity {
        ParityTarget::FullSymmetrized => symmetric_grid(cfg.nodes),
        _ => half_grid(cfg.nodes),
    };
    let value_csv = |v: Vec<f64>, out: &mut String| -> Result<()> {
        out.push_str("theta,value\n");
        for (t, x) in thetas.iter().zip(v) {
            writeln!(out, "{t:.17e},{x:.17e}")?;
        }
        Ok(())
    };
    let restrict = |c: &SymmetrizedCoeffs<f64>| match args.parity {
        ParityTarget::FullSymmetrized => c.clone(),
        ParityTarget::RestrictedEven => c.even_part(),
        ParityTarget::RestrictedOdd => c.odd_part(),
    };
    match args.op {
        OpName::Semigroup => coeff_csv(semigroup_apply(&restrict(&f), args.t)?, &mut out)?,
        OpName::Riesz => coeff_csv(riesz_apply(&f, args.order, args.parity)?, &mut out)?,
        OpName::Multiplier => {
            let spec = if args.inverse_sqrt {
                MultiplierSpec::stieltjes(fractional_power_atoms(0.5)?)?
            } else if !args.atoms.is_empty() {
                MultiplierSpec::stieltjes(args.atoms.clone())?
            } else {
                let profile = match args.profile.as_str() {
                    "one" => Profile::Constant(1.0),
                    "sign-sin" => Profile::SignSin,
                    p => bail!("unknown profile '{p}', expected one|sign-sin"),
                };
                MultiplierSpec::laplace(profile, 1.0)?
            };
            coeff_csv(multiplier_apply(&f, &spec, args.parity)?, &mut out)?
        }
        OpName::Gfun => value_csv(
            gfun_apply(&f, args.m, args.order, args.parity, &thetas)?,
            &mut out,
        )?,
        OpName::Maximal => {
            let g = restrict(&f);
            let v = match args.parity {
                ParityTarget::FullSymmetrized => maximal_apply(&g, &thetas, &maximal_t_grid()),
                _ => {
                    let mut two = g.clone();
                    two.coeffs.iter_mut().for_each(|c| *c *= 2.0);
                    maximal_apply(&two, &thetas, &maximal_t_grid())
                }
            };
            value_csv(v, &mut out)?
        }
    }
    Ok(out)
}

/// Values of a coefficient vector on the grid used by `cmd_operator`.
pub fn synthesize_on_grid(
    c: &SymmetrizedCoeffs<f64>,
    parity: ParityTarget,
    nodes: usize,
) -> Vec<(f64, f64)> {
    match parity {
        ParityTarget::FullSymmetrized => symmetric_grid(nodes)
            .into_iter()
            .map(|t| (t, synthesize_at(c, t)))
            .collect(),
        _ => half_grid(nodes)
            .into_iter()
            .map(|t| (t, synthesize_restricted(c, t)))
            .collect(),
    }
}

/// Runs a verification suite.
pub fn cmd_verify(cfg: &RunConfig, suite: Suite) -> Result<VerifyReport> {
    let vcfg = VerifyConfig {
        alpha: cfg.alpha,
        beta: cfg.beta,
        n_max: cfg.n_max,
        nodes: None,
        level: cfg.level,
        seed: cfg.seed,
    };
    run_suite(suite, &vcfg).with_context(|| {
        format!(
            "verify suite {suite} at alpha={} beta={}",
            cfg.alpha, cfg.beta
        )
    })
}

/// A_p ladder of the weight |sin(θ/2)|^r |cos(θ/2)|^s over levels 0..=level.
pub fn cmd_ap_check(cfg: &RunConfig, r: f64, s: f64, p: f64) -> Result<ApReport> {
    let params = cfg.params()?;
    let w = WeightSpec::new(r, s, p)?;
    Ok(ap_ladder(&w, &params, cfg.level + 1)?)
}

/// Pretty JSON with a trailing newline and the schema version of verification reports.
pub fn ap_report_json(report: &ApReport) -> String {
    let value = serde_json::json!({
        "schema_version": symjacobi::verify::SCHEMA_VERSION,
        "report": report,
    });
    let mut s = serde_json::to_string_pretty(&value).expect("serializable report");
    s.push('\n');
    s
}

/// Caps rayon's global pool at SYMJACOBI_THREADS when that is a positive integer.
pub fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("SYMJACOBI_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .with_context(|| format!("SYMJACOBI_THREADS='{v}' is not an integer"))?;
        if n == 0 {
            bail!("SYMJACOBI_THREADS must be positive");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .ok();
    }
    Ok(())
}
