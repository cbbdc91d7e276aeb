use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use symjacobi::jacobi::JacobiParams;
use symjacobi::verify::Suite;
use symjacobi_cli::{
    ap_report_json, cmd_ap_check, cmd_basis, cmd_kernel, cmd_operator, cmd_verify, init_threads,
    parse_atoms, parse_input, parse_parity, OpName, OperatorArgs, Route, RunConfig,
};

/// Symmetrized Jacobi expansions: basis tables, kernels, operators and verification suites.
#[derive(Parser, Debug)]
#[command(name = "symjacobi", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    #[arg(
        long,
        global = true,
        default_value_t = 0.0,
        allow_negative_numbers = true
    )]
    alpha: f64,
    #[arg(
        long,
        global = true,
        default_value_t = 0.0,
        allow_negative_numbers = true
    )]
    beta: f64,
    /// Highest basis index.
    #[arg(long = "nmax", global = true, default_value_t = 16)]
    n_max: usize,
    /// Grid points for CSV output, or quadrature nodes when analysing samples.
    #[arg(long, global = true, default_value_t = 32)]
    nodes: usize,
    /// Finest ladder level (ladders run over 0..=level).
    #[arg(long, global = true, default_value_t = 3)]
    level: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Table of Φₙ(θ) on a symmetric grid.
    Basis,
    /// H, H̃ and ℍ on a symmetric grid of (θ, φ).
    Kernel {
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value = "series", value_parser = clap::value_parser!(Route))]
        route: Route,
    },
    /// Applies an operator to coefficients or samples read from CSV.
    Operator {
        #[arg(long, value_parser = clap::value_parser!(OpName))]
        op: OpName,
        #[arg(long = "N", default_value_t = 1)]
        order: usize,
        #[arg(long = "M", default_value_t = 0)]
        m: usize,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value = "full", value_parser = parse_parity)]
        parity: symjacobi::operators::ParityTarget,
        /// CSV with header `index,value` (coefficients) or `theta,value` (samples).
        #[arg(long)]
        input: PathBuf,
        /// Same as --out.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Multiplier profile: one | sign-sin.
        #[arg(long, default_value = "one")]
        profile: String,
        /// Laplace–Stieltjes atoms `t:w,t:w`.
        #[arg(long, value_parser = parse_atoms)]
        atoms: Option<Vec<(f64, f64)>>,
        /// Multiplier z^(-1/2).
        #[arg(long)]
        inverse_sqrt: bool,
    },
    /// Runs a verification suite and writes its JSON report.
    Verify {
        #[arg(long, default_value = "all", value_parser = clap::value_parser!(Suite))]
        suite: Suite,
        /// Same as --out.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// A_p ladder of |sin(θ/2)|^r |cos(θ/2)|^s.
    ApCheck {
        #[arg(long, allow_negative_numbers = true)]
        r: f64,
        #[arg(long, allow_negative_numbers = true)]
        s: f64,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
    },
}

fn write(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let c = &cli.common;
    let cfg = RunConfig {
        alpha: c.alpha,
        beta: c.beta,
        n_max: c.n_max,
        nodes: c.nodes,
        level: c.level,
        seed: c.seed,
    };
    match cli.command {
        Command::Basis => write(c.out.as_ref(), &cmd_basis(&cfg)?)?,
        Command::Kernel { t, route } => write(c.out.as_ref(), &cmd_kernel(&cfg, t, route)?)?,
        Command::Operator {
            op,
            order,
            m,
            t,
            parity,
            input,
            output,
            profile,
            atoms,
            inverse_sqrt,
        } => {
            let text = std::fs::read_to_string(&input)
                .with_context(|| format!("reading {}", input.display()))?;
            let data =
                parse_input(&text).with_context(|| format!("parsing {}", input.display()))?;
            let args = OperatorArgs {
                op,
                order,
                m,
                t,
                parity,
                profile,
                atoms: atoms.unwrap_or_default(),
                inverse_sqrt,
            };
            write(
                output.as_ref().or(c.out.as_ref()),
                &cmd_operator(&cfg, &args, &data)?,
            )?
        }
        Command::Verify { suite, report } => {
            let r = cmd_verify(&cfg, suite)?;
            write(report.as_ref().or(c.out.as_ref()), &r.to_json())?;
            for f in r.failures() {
                eprintln!("FAIL {f}");
            }
            return Ok(r.passed);
        }
        Command::ApCheck { r, s, p } => {
            let rep = cmd_ap_check(&cfg, r, s, p)?;
            write(c.out.as_ref(), &ap_report_json(&rep))?;
            eprintln!("verdict {:?}, membership {}", rep.verdict, rep.in_class);
            return Ok(rep.agrees);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = JacobiParams::new(cli.common.alpha, cli.common.beta) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if let Err(e) = init_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
