//! Command-line front end: analyze instances end to end, tabulate bound
//! curves as CSV, export catalog instances, and replay the regression or
//! randomized property suites.
//!
//! Exit codes: 0 success, 1 property violation, 2 input error,
//! 3 degenerate instance.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cournot::catalog::{self, RandomFamily};
use cournot::efficiency;
use cournot::model::MarketInstance;
use cournot::solver::{self, SolveError, SolverConfig};

const EXIT_VIOLATION: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_DEGENERATE: u8 = 3;

/// Oligopoly outcomes and efficiency bounds.
#[derive(Parser)]
#[command(name = "cournot", version, about)]
struct RunConfig {
    /// Override the residual tolerance (also settable via COURNOT_TOL).
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance end to end and emit the JSON analysis report.
    Analyze {
        /// Path to the instance JSON.
        #[arg(long)]
        instance: PathBuf,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate one of the bound curves as CSV.
    Sweep {
        /// Which curve: the affine bound g, the curvature bound f, or the
        /// joint-profit bound (with f as a second column for comparison).
        #[arg(long, value_enum)]
        curve: Curve,
        /// First parameter value.
        #[arg(long)]
        from: f64,
        /// Last parameter value (inclusive up to rounding).
        #[arg(long)]
        to: f64,
        /// Parameter increment; must be positive.
        #[arg(long)]
        step: f64,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Catalog of ready-made instances.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Replay the regression catalog or a seeded random property suite.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Base seed for the random suite.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Number of random instances.
        #[arg(long, default_value_t = 500)]
        count: usize,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// Write one catalog instance as JSON.
    Export {
        /// Entry name (ex1, ex2, ex3, ex4, ex8, log, power, shifted_power).
        #[arg(long)]
        name: String,
        /// Supplier count for the fringe family (default 10).
        #[arg(long)]
        n: Option<usize>,
        /// Slope parameter for the concave duopoly (default 10).
        #[arg(long)]
        m: Option<u32>,
        /// Output path.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Curve {
    /// Affine-demand bound g over [1/2, 1).
    G,
    /// Curvature bound f over [1, to].
    F,
    /// Joint-profit bound 3/(3+x) over [1, to], with f alongside.
    Mono,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    /// Replay every catalog entry against the solvers.
    PaperExamples,
    /// Seeded random instances checked against every bound invariant.
    Random,
}

fn main() -> ExitCode {
    let run = RunConfig::parse();
    let mut cfg = solver::config_from_env();
    if let Some(tol) = run.tol {
        if !(tol.is_finite() && tol > 0.0) {
            eprintln!("error: --tol must be a positive finite number, got {tol}");
            return ExitCode::from(EXIT_INPUT);
        }
        cfg.residual_tol = tol;
    }
    match run.command {
        Command::Analyze { instance, out } => cmd_analyze(&instance, out.as_deref(), &cfg),
        Command::Sweep { curve, from, to, step, out } => cmd_sweep(curve, from, to, step, &out),
        Command::Catalog { action: CatalogAction::Export { name, n, m, out } } => {
            cmd_export(&name, n, m, &out)
        }
        Command::Verify { suite, seed, count } => cmd_verify(suite, seed, count, &cfg),
    }
}

fn input_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_INPUT)
}

fn write_out(out: Option<&Path>, content: &str) -> Result<(), ExitCode> {
    match out {
        Some(path) => fs::write(path, content)
            .map_err(|e| input_error(format_args!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

fn cmd_analyze(instance: &Path, out: Option<&Path>, cfg: &SolverConfig) -> ExitCode {
    let text = match fs::read_to_string(instance) {
        Ok(t) => t,
        Err(e) => return input_error(format_args!("cannot read {}: {e}", instance.display())),
    };
    let inst = match MarketInstance::from_json(&text) {
        Ok(i) => i,
        Err(e) => return input_error(format_args!("invalid instance: {e}")),
    };
    match efficiency::analyze(&inst, cfg) {
        Ok(report) => {
            let json = serde_json::to_string_pretty(&report).expect("report serializes");
            if write_out(out, &json).is_err() {
                return ExitCode::from(EXIT_INPUT);
            }
            ExitCode::SUCCESS
        }
        Err(e @ SolveError::Degenerate) => {
            eprintln!("{e}");
            ExitCode::from(EXIT_DEGENERATE)
        }
        Err(e) => input_error(e),
    }
}

fn cmd_sweep(curve: Curve, from: f64, to: f64, step: f64, out: &Path) -> ExitCode {
    if !(step > 0.0 && step.is_finite()) {
        return input_error(format_args!("step must be positive, got {step}"));
    }
    if !from.is_finite() || !to.is_finite() || from > to {
        return input_error(format_args!("empty sweep range [{from}, {to}]"));
    }
    match curve {
        Curve::G => {
            if from < 0.5 - 1e-12 || to >= 1.0 {
                return input_error(format_args!(
                    "the affine bound is defined on [1/2, 1); got [{from}, {to}]"
                ));
            }
        }
        Curve::F | Curve::Mono => {
            if from < 1.0 - 1e-12 {
                return input_error(format_args!(
                    "the curvature bounds are defined on [1, inf); got from={from}"
                ));
            }
        }
    }
    let mut csv = String::new();
    match curve {
        Curve::G | Curve::F => csv.push_str("param,value\n"),
        Curve::Mono => csv.push_str("param,value,value2\n"),
    }
    let count = ((to - from) / step + 1e-9).floor() as u64;
    for i in 0..=count {
        let param = from + i as f64 * step;
        match curve {
            Curve::G => {
                let v = efficiency::bound_g(param);
                writeln!(csv, "{param:.16e},{v:.16e}").unwrap();
            }
            Curve::F => {
                let v = efficiency::bound_f(param).expect("domain checked above");
                writeln!(csv, "{param:.16e},{v:.16e}").unwrap();
            }
            Curve::Mono => {
                let m = efficiency::bound_mono(param).expect("domain checked above");
                let f = efficiency::bound_f(param).expect("domain checked above");
                writeln!(csv, "{param:.16e},{m:.16e},{f:.16e}").unwrap();
            }
        }
    }
    if write_out(Some(out), &csv).is_err() {
        return ExitCode::from(EXIT_INPUT);
    }
    ExitCode::SUCCESS
}

fn cmd_export(name: &str, n: Option<usize>, m: Option<u32>, out: &Path) -> ExitCode {
    let entry = match catalog::by_name(name, n, m) {
        Ok(e) => e,
        Err(e) => {
            return input_error(format_args!(
                "{e} (known names: {})",
                catalog::NAMES.join(", ")
            ))
        }
    };
    if write_out(Some(out), &entry.instance.to_json()).is_err() {
        return ExitCode::from(EXIT_INPUT);
    }
    ExitCode::SUCCESS
}

fn fail_with_instance(inst: &MarketInstance, violations: &[String]) -> ExitCode {
    for v in violations {
        eprintln!("violation: {v}");
    }
    eprintln!("offending instance (replay with `analyze --instance`):");
    eprintln!("{}", inst.to_json());
    ExitCode::from(EXIT_VIOLATION)
}

fn cmd_verify(suite: Suite, seed: u64, count: usize, cfg: &SolverConfig) -> ExitCode {
    let mut min_margin: Option<f64> = None;
    let mut fold = |m: Option<f64>| {
        if let Some(m) = m {
            min_margin = Some(min_margin.map_or(m, |v| v.min(m)));
        }
    };
    let mut instances = 0usize;
    let mut equilibria = 0usize;
    let mut monopolies = 0usize;

    match suite {
        Suite::PaperExamples => {
            for entry in catalog::regression_entries() {
                instances += 1;
                if let Err(msg) = catalog::replay(&entry, cfg) {
                    return fail_with_instance(&entry.instance, &[msg]);
                }
                let rep = efficiency::check_bound_invariants(&entry.instance, cfg);
                if !rep.ok() {
                    return fail_with_instance(&entry.instance, &rep.violations);
                }
                equilibria += rep.equilibria;
                monopolies += rep.monopoly_checked as usize;
                fold(rep.min_margin);
            }
        }
        Suite::Random => {
            for i in 0..count {
                let family = RandomFamily::ALL[i % RandomFamily::ALL.len()];
                let inst = catalog::random_instance(seed.wrapping_add(i as u64), family, 1..=6);
                instances += 1;
                let rep = efficiency::check_bound_invariants(&inst, cfg);
                if !rep.ok() {
                    return fail_with_instance(&inst, &rep.violations);
                }
                equilibria += rep.equilibria;
                monopolies += rep.monopoly_checked as usize;
                fold(rep.min_margin);
            }
        }
    }

    println!(
        "checked {instances} instances ({equilibria} verified equilibria, {monopolies} monopoly outputs): 0 violations"
    );
    match min_margin {
        Some(m) => println!("min observed margin (gamma - bound): {m:.6e}"),
        None => println!("min observed margin (gamma - bound): n/a (no bound applied)"),
    }
    ExitCode::SUCCESS
}
