use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use shiftkern::scenario::{run_scenario, Check, Scenario, ScenarioReport};
use shiftkern::subspace::kernel_subspace;
use shiftkern::suite::verify_catalogue;
use shiftkern::theorems::perturbed_operator;
use shiftkern::{Error, Subspace};

#[derive(Parser)]
#[command(
    name = "shiftkern",
    version,
    about = "Kernels of finite-rank perturbations of Toeplitz operators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Override the scenario truncation N.
    #[arg(long, global = true)]
    truncation: Option<usize>,
    /// Write the JSON report to this path.
    #[arg(long, global = true, value_name = "PATH")]
    json_out: Option<PathBuf>,
    /// Override the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Re-run at 2N and compare kernel and defect dimensions (default).
    #[arg(long, global = true, overrides_with = "no_stabilize")]
    stabilize: bool,
    #[arg(long, global = true, overrides_with = "stabilize")]
    no_stabilize: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check listed in a scenario file.
    Run { file: PathBuf },
    /// Run the built-in verification catalogue.
    VerifyPaper,
    /// Defect and witness checks for a scenario.
    Defect { file: PathBuf },
    /// Kernel of the perturbed operator for a scenario, with its frame.
    Kernel { file: PathBuf },
}

#[derive(Serialize)]
struct KernelDump<'a> {
    report: &'a ScenarioReport,
    subspace: Subspace,
}

enum Failure {
    Verification,
    Input(Error),
    Numerical(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e)
        } else {
            Failure::Numerical(e)
        }
    }
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<(), Failure> {
    if let Some(path) = path {
        let text = serde_json::to_string_pretty(value).map_err(Error::from)?;
        std::fs::write(path, text + "\n").map_err(Error::from)?;
    }
    Ok(())
}

fn load(cli: &Cli, file: &Path, checks: Option<Vec<Check>>) -> Result<Scenario, Failure> {
    let mut s = Scenario::load(file)?;
    if let Some(n) = cli.truncation {
        s.truncation = n;
    }
    if let Some(seed) = cli.seed {
        s.seed = seed;
    }
    if let Some(c) = checks {
        s.checks = c;
    }
    Ok(s)
}

fn print_scenario(r: &ScenarioReport) {
    println!("scenario {} ({} symbol, rank {})", r.id, r.symbol, r.rank);
    println!("  truncation {} / inner {}", r.truncation, r.inner_truncation);
    let k = &r.kernel;
    println!(
        "  kernel dim {} (codim {}, spill {}), max |R f| {:.2e}{}",
        k.dim,
        k.codim,
        k.spill,
        k.max_residual,
        if k.degenerate { ", degenerate" } else { "" }
    );
    if let Some(d) = &r.defect {
        println!(
            "  defect {} (bound {}), residual outside F {:.2e}, witness residual {:.2e}",
            d.defect.defect_dim,
            d.theorem_f_dim,
            d.defect.max_residual_outside_f,
            d.witness.max_membership().max(d.witness.max_w_in_f())
        );
    }
    if let Some(rep) = &r.representation {
        println!(
            "  representation branch {:?}: reverse {:.2e}, forward {:.2e}",
            rep.branch, rep.reverse_max_residual, rep.forward_max_residual
        );
        for s in &rep.systems {
            println!(
                "    {:<12} {:?} k-dim {:>4} reverse {:.2e} forward {:.2e} closure {:.2e} {}",
                s.name,
                s.origin,
                s.k_dim,
                s.reverse_max_residual,
                s.forward_max_residual,
                s.closure_max_violation,
                if s.pass { "PASS" } else { "FAIL" }
            );
        }
        for note in &rep.notes {
            println!("  note: {note}");
        }
    }
    if let Some(st) = &r.stabilization {
        println!(
            "  stabilization N={} vs 2N={}: kernel {} / {}, {}",
            st.truncation,
            st.doubled,
            st.at_n.kernel,
            st.at_2n.kernel,
            if st.stable { "stable" } else { "CHANGED" }
        );
    }
    for f in &r.failures {
        eprintln!("failed: {f}");
    }
    println!("verdict: {}", if r.pass { "PASS" } else { "FAIL" });
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    let stabilize = !cli.no_stabilize;
    let json_out = cli.json_out.as_deref();
    let pass = match &cli.command {
        Command::VerifyPaper => {
            if cli.truncation.is_some() || cli.seed.is_some() {
                eprintln!("note: the catalogue fixes its own truncations and seeds");
            }
            let report = verify_catalogue()?;
            print!("{}", report.table());
            for row in report.failures() {
                eprintln!("failed: {} [{}]: {}", row.id, row.anchor, row.detail);
            }
            write_json(json_out, &report)?;
            report.pass
        }
        Command::Run { file } => {
            let s = load(cli, file, None)?;
            let report = run_scenario(&s, stabilize)?;
            print_scenario(&report);
            write_json(json_out, &report)?;
            report.pass
        }
        Command::Defect { file } => {
            let s = load(cli, file, Some(vec![Check::Kernel, Check::Defect, Check::Witness]))?;
            let report = run_scenario(&s, stabilize)?;
            print_scenario(&report);
            write_json(json_out, &report)?;
            report.pass
        }
        Command::Kernel { file } => {
            let s = load(cli, file, Some(vec![Check::Kernel]))?;
            let report = run_scenario(&s, stabilize)?;
            print_scenario(&report);
            let n = s.truncation;
            let r = perturbed_operator(&s.symbol, &s.perturbation.resized(n), n)?;
            let subspace = kernel_subspace(&r, s.tolerances.rank)?;
            write_json(
                json_out,
                &KernelDump {
                    report: &report,
                    subspace,
                },
            )?;
            report.pass
        }
    };
    if pass {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Numerical(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
