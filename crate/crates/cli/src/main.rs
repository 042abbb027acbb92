//! `unitrace` command-line front end.

mod commands;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use unitrace::Error;

use crate::output::{Format, Rendered};

#[derive(Parser, Debug)]
#[command(name = "unitrace", version, about = "Exact and Monte Carlo computations for finite subgroups of U(d)")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write output to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Seed for all random streams.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
enum Command {
    /// Exact character distribution and tails.
    CharDist(CharDistArgs),
    /// Monte Carlo estimate of E sup_g |tr(u π(g))|.
    Ez(EzArgs),
    /// Covering-number brackets and entropy integrals.
    Entropy(EntropyArgs),
    /// ψ₂ norm of the character.
    Psi2(Psi2Args),
    /// Supremum of |tr(u π(g))| for a given matrix u.
    Sup(SupArgs),
    /// Run a verification suite; exits 1 if any check fails.
    Verify(VerifyArgs),
    /// Enumerate a group from generators and report its abelian structure.
    Jordan(JordanArgs),
}

#[derive(Args, Debug, Serialize)]
struct CharDistArgs {
    /// Group, e.g. hyperoct:12, sym:8, diag-sign:16, q8 or enum:FILE.
    #[arg(long)]
    group: String,
    /// Also report P(χ > k).
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    tail: Option<i64>,
}

#[derive(Args, Debug, Serialize)]
struct EzArgs {
    #[arg(long)]
    group: String,
    #[arg(long, default_value_t = unitrace::supopt::DEFAULT_SAMPLES)]
    samples: usize,
    /// Phase grid size; defaults to a dimension-dependent value.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    angles: Option<usize>,
    /// gaussian or haar.
    #[arg(long, default_value = "gaussian")]
    randomization: String,
}

#[derive(Args, Debug, Serialize)]
struct EntropyArgs {
    #[arg(long)]
    group: String,
    #[arg(long, default_value_t = 1.0 / 64.0)]
    eps_min: f64,
    #[arg(long, default_value_t = 2.0)]
    eps_max: f64,
    #[arg(long, default_value_t = 64)]
    eps_points: usize,
    /// delta2, delta-inf or scaled-frobenius.
    #[arg(long, default_value = "delta2")]
    metric: String,
    /// Largest group order that is enumerated for greedy covers.
    #[arg(long, default_value_t = unitrace::entropy::DEFAULT_BUDGET)]
    budget: usize,
}

#[derive(Args, Debug, Serialize)]
struct Psi2Args {
    #[arg(long)]
    group: String,
    /// Largest moment order 2n used for the moment-ratio equivalent.
    #[arg(long, default_value_t = 128)]
    moments: u32,
    /// Sample count for groups without an exact character law.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
}

#[derive(Args, Debug, Serialize)]
struct SupArgs {
    #[arg(long)]
    group: String,
    /// JSON file {"d": .., "matrix": [[re, im], ...]} (row-major).
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    angles: Option<usize>,
    /// Also maximise by enumerating the group and compare.
    #[arg(long)]
    exhaustive: bool,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    /// hyperoct-core, growth or empty.
    #[arg(long, default_value = "hyperoct-core")]
    suite: String,
    /// JSON suite config; fields not given come from the suite preset.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    config: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    angles: Option<usize>,
    /// Comma-separated dimensions.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    dims: Option<Vec<usize>>,
    /// Comma-separated group families or group strings.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    groups: Option<Vec<String>>,
}

#[derive(Args, Debug, Serialize)]
struct JordanArgs {
    /// JSON file {"d": .., "tol": .., "generators": [[[re, im], ...], ...]}.
    #[arg(long)]
    generators: PathBuf,
    /// Largest group order enumerated before giving up.
    #[arg(long, default_value_t = unitrace::io::DEFAULT_CLOSURE_CAP)]
    cap: usize,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Compute(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Compute(e) => match e {
                Error::Numeric { .. } | Error::Precision(_) | Error::CapExceeded { .. } => 3,
                _ => 2,
            },
            Failure::Io(_) => 2,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Usage(_) => "usage",
            Failure::Compute(e) => e.kind(),
            Failure::Io(_) => "io",
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) | Failure::Io(m) => m.clone(),
            Failure::Compute(e) => e.to_string(),
        }
    }
}

fn report_failure(f: &Failure) -> ExitCode {
    let body = serde_json::json!({
        "error": { "kind": f.kind(), "message": f.message(), "exit_code": f.exit_code() }
    });
    eprintln!("{body}");
    ExitCode::from(f.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            return report_failure(&Failure::Usage(e.to_string().trim_end().to_string()));
        }
    };
    let start = Instant::now();
    match run(&cli) {
        Ok(code) => {
            eprintln!("wall time: {:.3} s", start.elapsed().as_secs_f64());
            code
        }
        Err(f) => report_failure(&f),
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
    }
    let seed = cli.seed.unwrap_or(commands::DEFAULT_SEED);
    let Rendered { result, table, pass } = match &cli.command {
        Command::CharDist(a) => commands::char_dist(a)?,
        Command::Ez(a) => commands::ez(a, seed)?,
        Command::Entropy(a) => commands::entropy(a)?,
        Command::Psi2(a) => commands::psi2(a, seed)?,
        Command::Sup(a) => commands::sup(a)?,
        Command::Verify(a) => commands::verify(a, cli.seed)?,
        Command::Jordan(a) => commands::jordan(a)?,
    };
    // the suite config may carry its own seed
    let seed = result.get("seed").and_then(|s| s.as_u64()).unwrap_or(seed);
    let header = output::Header::new(&cli.command, cli.format, seed);
    let text = output::render(&header, &result, table.as_ref(), cli.format)?;
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::Io(e.to_string()))?;
        }
    }
    Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
