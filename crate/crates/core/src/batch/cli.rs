//! Command-line arguments and the top-level driver behind the `bpb-lab` binary.

use std::io::Read;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use super::{exit_code, parse_input, parse_reports, reports_to_csv, run_parsed, verify_report, RunOptions};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Certify point corrections and search for counterexamples from a JSON problem file.
#[derive(Clone, Debug, Parser)]
#[command(name = "bpb-lab", version, about)]
pub struct Args {
    /// Problem file (or report file with `--verify`); `-` reads standard input.
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,
    /// Re-verify the certificates and witnesses in a report file.
    #[arg(long)]
    pub verify: bool,
    /// Seed for every problem, overriding seeds in the file.
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
    /// Maximum number of problems run concurrently (0 = one per core).
    #[arg(long, value_name = "N", default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Search iterations for every problem, overriding budgets in the file.
    #[arg(long, value_name = "ITERS")]
    pub budget: Option<usize>,
}

/// Captured result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

fn malformed(msg: String) -> Outcome {
    Outcome { stdout: String::new(), stderr: format!("error: {msg}\n"), code: 1 }
}

/// Run the tool on already-read input text.
pub fn execute(args: &Args, text: &str) -> Outcome {
    if args.verify {
        let reports = match parse_reports(text) {
            Ok(r) => r,
            Err(e) => return malformed(e),
        };
        let outcomes: Vec<_> = reports.iter().map(verify_report).collect();
        let code = if outcomes.iter().all(|o| o.verified) { 0 } else { 2 };
        let stdout = serde_json::to_string_pretty(&outcomes).expect("outcomes serialize") + "\n";
        return Outcome { stdout, stderr: String::new(), code };
    }
    let parsed = match parse_input(text) {
        Ok(p) => p,
        Err(e) => return malformed(e),
    };
    let opts = RunOptions { jobs: args.jobs, seed: args.seed, budget: args.budget };
    let reports = match run_parsed(&parsed, &opts) {
        Ok(r) => r,
        Err(e) => return malformed(e),
    };
    let stdout = match args.format {
        Format::Csv => reports_to_csv(&reports),
        Format::Json if parsed.single => serde_json::to_string_pretty(&reports[0]).expect("report serializes") + "\n",
        Format::Json => serde_json::to_string_pretty(&reports).expect("reports serialize") + "\n",
    };
    Outcome { stdout, stderr: String::new(), code: exit_code(&reports) }
}

/// Parse the process arguments, read the input and return the exit code.
pub fn main() -> i32 {
    let args = Args::parse();
    let text = if args.input.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map(|_| s)
    } else {
        std::fs::read_to_string(&args.input)
    };
    let out = match text {
        Ok(t) => execute(&args, &t),
        Err(e) => malformed(format!("{}: {e}", args.input.display())),
    };
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    out.code
}
