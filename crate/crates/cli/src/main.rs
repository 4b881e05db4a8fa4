use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fracsample::oracle::{validate, CheckKind};
use fracsample::scenario::Scenario;

mod sweep;

use sweep::{write_csv, Status, SweepRequest, SweepVar, UsageError};

const EXIT_USAGE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;

/// Rate-distortion sweeps for computing functions of two partially sampled
/// correlated sources.
#[derive(Parser, Debug)]
#[command(name = "fracsample", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a solver over a range of one variable and write CSV.
    Sweep(SweepArgs),
    /// Compare solvers against brute-force oracles for one scenario.
    Validate {
        #[arg(long, value_parser = parse_scenario)]
        scenario: Scenario,
    },
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// gaussian-identity, gaussian-sum, binary-xor, binary-and, multihop or worstcase.
    #[arg(long, value_parser = parse_scenario)]
    scenario: Scenario,
    /// Fraction of samples of the first source that may be measured.
    #[arg(long)]
    theta1: f64,
    /// Fraction of samples of the second source that may be measured.
    #[arg(long)]
    theta2: f64,
    /// Correlation of the Gaussian pair.
    #[arg(long, allow_negative_numbers = true, conflicts_with = "p")]
    rho: Option<f64>,
    /// Crossover probability of the binary pair.
    #[arg(long)]
    p: Option<f64>,
    /// Variable to sweep over `from + i * step` up to `to`.
    #[arg(long, value_enum)]
    sweep: SweepArg,
    #[arg(long)]
    from: f64,
    #[arg(long)]
    to: f64,
    #[arg(long)]
    step: f64,
    /// First-hop rate (multihop).
    #[arg(long)]
    r1: Option<f64>,
    /// Worst-case weight held fixed in a worstcase rate sweep.
    #[arg(long)]
    mu: Option<f64>,
    /// Rate held fixed in a worstcase mu sweep.
    #[arg(long)]
    rate: Option<f64>,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SweepArg {
    Rate,
    Distortion,
    R2,
    Mu,
}

impl From<SweepArg> for SweepVar {
    fn from(s: SweepArg) -> Self {
        match s {
            SweepArg::Rate => SweepVar::Rate,
            SweepArg::Distortion => SweepVar::Distortion,
            SweepArg::R2 => SweepVar::R2,
            SweepArg::Mu => SweepVar::Mu,
        }
    }
}

fn parse_scenario(s: &str) -> Result<Scenario, String> {
    s.parse::<Scenario>().map_err(|e| e.to_string())
}

impl SweepArgs {
    fn request(&self) -> SweepRequest {
        SweepRequest {
            scenario: self.scenario,
            theta1: self.theta1,
            theta2: self.theta2,
            rho: self.rho,
            p: self.p,
            sweep: self.sweep.into(),
            from: self.from,
            to: self.to,
            step: self.step,
            r1: self.r1,
            mu: self.mu,
            rate: self.rate,
        }
    }
}

fn run_sweep(args: &SweepArgs) -> Result<(), UsageError> {
    let request = args.request();
    let rows = request.run()?;
    let infeasible = rows.iter().filter(|r| r.status == Status::Infeasible).count();
    let io_err = |e: csv::Error| UsageError(format!("writing CSV: {e}"));
    match &args.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
            write_csv(&request, &rows, BufWriter::new(file)).map_err(io_err)?;
            println!(
                "{}: wrote {} rows ({} infeasible) to {}",
                request.scenario,
                rows.len(),
                infeasible,
                path.display()
            );
        }
        None => {
            write_csv(&request, &rows, io::stdout().lock()).map_err(io_err)?;
            eprintln!("{}: {} rows ({} infeasible)", request.scenario, rows.len(), infeasible);
        }
    }
    Ok(())
}

fn run_validate(scenario: Scenario) -> Result<bool, UsageError> {
    let report = validate(scenario)?;
    let mut out = io::stdout().lock();
    for c in &report.checks {
        let kind = match c.kind {
            CheckKind::Oracle => "oracle",
            CheckKind::Anchor => "anchor",
        };
        let _ = writeln!(
            out,
            "{} {kind} {}: solver {:.9} reference {:.9} deviation {:.3e} (tol {:.0e})",
            if c.passed() { "ok  " } else { "FAIL" },
            c.name,
            c.solver,
            c.oracle,
            c.deviation(),
            c.tolerance
        );
    }
    let verdict = if report.passed() { "PASS" } else { "FAIL" };
    let _ = writeln!(out, "{scenario}: max deviation {:.3e} over {} checks: {verdict}", report.max_deviation(), report.checks.len());
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.to_string();
            let first = rendered.lines().next().unwrap_or("invalid arguments");
            eprintln!("{first}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let outcome = match &cli.command {
        Command::Sweep(args) => run_sweep(args).map(|()| ExitCode::SUCCESS),
        Command::Validate { scenario } => {
            run_validate(*scenario).map(|ok| if ok { ExitCode::SUCCESS } else { ExitCode::from(EXIT_VALIDATION) })
        }
    };
    outcome.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(EXIT_USAGE)
    })
}
