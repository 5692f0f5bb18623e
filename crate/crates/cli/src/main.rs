//! `nids` — rule checking, capture scanning, cost benchmarking, and
//! synthetic capture generation.
//!
//! Exit codes: 0 success, 2 usage/parse error, 3 I/O error (1 is reserved).

mod commands;
mod genspec;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "nids", version, about = "Signature-based network intrusion detection engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a rules file and report rule, skip, and partition counts
    Check {
        /// Rules file path
        #[arg(long)]
        rules: PathBuf,
        /// Variable binding, repeatable (e.g. --var HOME_NET=10.0.0.0/8)
        #[arg(long = "var", value_name = "NAME=VALUE")]
        vars: Vec<String>,
    },
    /// Inspect a capture against a ruleset and write an alert file
    Scan(ScanArgs),
    /// Write a cumulative work-counter CSV for a capture
    Bench(BenchArgs),
    /// Generate a deterministic synthetic capture from a JSON spec
    Gen {
        /// Generator spec (JSON)
        #[arg(long)]
        spec: PathBuf,
        /// RNG seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output capture path
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct ScanArgs {
    /// Rules file path
    #[arg(long)]
    rules: PathBuf,
    /// Capture file path
    #[arg(long)]
    pcap: PathBuf,
    /// Alert file to write
    #[arg(long)]
    out: PathBuf,
    /// Variable binding, repeatable
    #[arg(long = "var", value_name = "NAME=VALUE")]
    vars: Vec<String>,
}

#[derive(Args)]
struct BenchArgs {
    /// Rules file path
    #[arg(long)]
    rules: PathBuf,
    /// Capture file path
    #[arg(long)]
    pcap: PathBuf,
    /// CSV file to write
    #[arg(long)]
    out: PathBuf,
    /// Variable binding, repeatable
    #[arg(long = "var", value_name = "NAME=VALUE")]
    vars: Vec<String>,
    /// Packets between cumulative samples
    #[arg(long, default_value_t = 1000)]
    interval: u64,
    /// What to measure
    #[arg(long, value_enum, default_value = "engine")]
    algo: AlgoChoice,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgoChoice {
    /// Full detection engine over the compiled ruleset
    Engine,
    /// Multi-pattern automaton vs per-pattern Boyer-Moore vs naive scan
    Compare,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Check { rules, vars } => commands::cmd_check(rules, vars),
        Command::Scan(a) => commands::cmd_scan(&a.rules, &a.pcap, &a.out, &a.vars),
        Command::Bench(a) => commands::cmd_bench(
            &a.rules,
            &a.pcap,
            &a.out,
            &a.vars,
            a.interval,
            a.algo == AlgoChoice::Compare,
        ),
        Command::Gen { spec, seed, out } => commands::cmd_gen(spec, *seed, out),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(e.exit_code())
        }
    }
}
