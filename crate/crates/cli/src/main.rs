//! Terminal front end.  Every subcommand prints one JSON document (stdout or
//! `--out`) and signals through the exit code: 0 all checks passed, 2 a
//! verification failed, 1 usage or engine error.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stable_hhh_core::cli::{
    cmd_compute, cmd_e_ring, cmd_mf_simplify, cmd_series_expand, cmd_verify_homology,
    cmd_verify_identities, CliError, CommandOutput, RunConfig,
};

#[derive(Parser)]
#[command(name = "stable-hhh", version, about = "Exact stable link-homology computations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed presentation, Poincaré series, and dimension table for one twist.
    Compute(CommonArgs),
    /// The flag-matrix model ring and its reduced relations.
    ERing(CommonArgs),
    /// Matrix-factorization operations.
    #[command(subcommand)]
    Mf(MfCommand),
    /// Shorthand for `mf simplify`.
    MfSimplify(CommonArgs),
    /// Independent cross-checks.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Shorthand for `verify identities`.
    VerifyIdentities(CommonArgs),
    /// Shorthand for `verify homology`.
    VerifyHomology(CommonArgs),
    /// Expand the closed Poincaré series over a degree window.
    SeriesExpand(CommonArgs),
}

#[derive(Subcommand)]
enum MfCommand {
    /// Record the exact row-move simplification of the twisted factorization.
    Simplify(CommonArgs),
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Polynomial identity suite at one rank.
    Identities(CommonArgs),
    /// Chain-level homology against the closed series and the closed table.
    Homology(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Rank of the family (number of strands).
    #[arg(short, long)]
    n: u8,
    /// Permutation twist in cycle notation, e.g. "(1 2 3)".
    #[arg(long, conflicts_with = "cycle_type")]
    perm: Option<String>,
    /// Cycle type instead of an explicit permutation, e.g. 2,1.
    #[arg(long, value_delimiter = ',')]
    cycle_type: Option<Vec<u8>>,
    /// q-degree window as MIN:MAX, e.g. -16:16.
    #[arg(long, value_parser = parse_q_window, allow_hyphen_values = true)]
    q_window: Option<(i32, i32)>,
    /// Top homological degree to compute.
    #[arg(long)]
    t_max: Option<i32>,
    /// Top exterior degree to compute.
    #[arg(long)]
    a_max: Option<i32>,
    /// Worker threads for the chain-level engine (default: STABLE_HHH_JOBS, then all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Cap on S-pair reductions before a basis computation aborts.
    #[arg(long)]
    spair_budget: Option<usize>,
    /// Write the JSON document here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_q_window(s: &str) -> Result<(i32, i32), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| "expected MIN:MAX, e.g. -16:16".to_string())?;
    let lo: i32 = a.trim().parse().map_err(|_| format!("bad integer {a:?}"))?;
    let hi: i32 = b.trim().parse().map_err(|_| format!("bad integer {b:?}"))?;
    if lo > hi {
        return Err(format!("empty window {lo}:{hi}"));
    }
    Ok((lo, hi))
}

fn build_config(a: &CommonArgs) -> RunConfig {
    let mut cfg = RunConfig::new(a.n);
    cfg.perm = a.perm.clone();
    cfg.cycle_type = a.cycle_type.clone();
    cfg.q_window = a.q_window;
    cfg.t_max = a.t_max;
    cfg.a_max = a.a_max;
    cfg.jobs = a
        .jobs
        .or_else(|| std::env::var("STABLE_HHH_JOBS").ok().and_then(|s| s.parse().ok()))
        .unwrap_or(0);
    if let Some(b) = a.spair_budget {
        cfg.spair_budget = b;
    }
    cfg
}

fn emit(out: &Option<PathBuf>, result: &CommandOutput) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(&result.document).expect("document serializes");
    let write_result = match out {
        Some(path) => std::fs::File::create(path).and_then(|mut f| writeln!(f, "{text}")),
        None => writeln!(std::io::stdout().lock(), "{text}"),
    };
    match write_result {
        // A closed read end (e.g. piping into `head`) is not an error.
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => other,
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let (args, result) = match &cli.command {
        Command::Compute(a) => (a, cmd_compute(&build_config(a))?),
        Command::ERing(a) => (a, cmd_e_ring(&build_config(a))?),
        Command::Mf(MfCommand::Simplify(a)) | Command::MfSimplify(a) => {
            (a, cmd_mf_simplify(&build_config(a))?)
        }
        Command::Verify(VerifyCommand::Identities(a)) | Command::VerifyIdentities(a) => {
            (a, cmd_verify_identities(&build_config(a))?)
        }
        Command::Verify(VerifyCommand::Homology(a)) | Command::VerifyHomology(a) => {
            (a, cmd_verify_homology(&build_config(a))?)
        }
        Command::SeriesExpand(a) => (a, cmd_series_expand(&build_config(a))?),
    };
    emit(&args.out, &result).map_err(|e| CliError::Usage(format!("cannot write output: {e}")))?;
    Ok(result.passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Treat help/version as success, anything else as a usage error.
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed; see the emitted document");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
