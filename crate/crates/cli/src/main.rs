use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use skewtorus_cli::{parse_error_report, parse_spec, run, Options};

#[derive(Parser)]
#[command(name = "skewtorus", version, about = "Torus dynamics and skew-ring primitivity reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every query in a problem file (`-` reads stdin).
    Analyze(AnalyzeArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    file: PathBuf,
    /// Compact JSON (default).
    #[arg(long, conflicts_with = "pretty")]
    json: bool,
    /// Indented JSON.
    #[arg(long)]
    pretty: bool,
    /// Re-check every certificate and fail on mismatch.
    #[arg(long)]
    verify: bool,
    /// Level for periodicPoints and oracle queries that omit one.
    #[arg(long, value_name = "N")]
    level: Option<u64>,
    #[arg(long, value_name = "B")]
    prime_budget: Option<u64>,
    /// Echoed in the report; searches are ordered, so results do not depend on it.
    #[arg(long, value_name = "S")]
    seed: Option<u64>,
    /// Add wall-clock timings (makes the report nondeterministic).
    #[arg(long)]
    timings: bool,
}

fn emit(v: &serde_json::Value, pretty: bool) {
    let s = if pretty {
        serde_json::to_string_pretty(v)
    } else {
        serde_json::to_string(v)
    };
    let mut out = std::io::stdout().lock();
    // a closed pipe (`| head`) is not an error worth reporting
    let _ = writeln!(out, "{}", s.expect("report serializes"));
}

fn main() -> ExitCode {
    let Command::Analyze(args) = Cli::parse().command;
    let text = if args.file.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map(|_| s)
    } else {
        std::fs::read_to_string(&args.file)
    };
    let text = match text {
        Ok(t) => t,
        Err(e) => {
            eprintln!("skewtorus: cannot read {}: {e}", args.file.display());
            return ExitCode::from(2);
        }
    };
    let spec = match parse_spec(&text) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("skewtorus: {}:{e}", args.file.display());
            emit(&parse_error_report(&e), args.pretty);
            return ExitCode::from(2);
        }
    };
    let opts = Options {
        verify: args.verify,
        level: args.level,
        prime_budget: args.prime_budget,
        seed: args.seed,
        timings: args.timings,
    };
    let out = run(&spec, &opts);
    emit(&out.report, args.pretty);
    for f in &out.verification_failures {
        eprintln!("skewtorus: verification failed: {f}");
    }
    ExitCode::from(out.exit_code as u8)
}
