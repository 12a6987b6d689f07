use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bestworst_cli::{run_check, run_construct, run_mc, run_sweep, Family};

/// Exact equilibrium toolkit for spatial electoral competition under
/// best-worst voting rules.
///
/// Exit codes: 0 = equilibrium / all checks pass, 1 = not an equilibrium
/// or an oracle mismatch, 2 = bad input or infeasible request.
#[derive(Parser)]
#[command(name = "bestworst", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify a profile document: `{"c":"1/2","m":4,"positions":[...]}`.
    Check {
        /// Input file; stdin when omitted or `-`.
        input: Option<PathBuf>,
        /// Write the certificate here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Construct an equilibrium family member and re-certify it.
    Construct {
        /// Negative-vote weight, as a rational like `1/2`.
        #[arg(long)]
        c: String,
        /// Number of candidates.
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum)]
        family: Family,
        /// Dispersion parameter for the `family` constructor.
        #[arg(long)]
        epsilon: Option<String>,
        /// Occupied-position count for `max_dispersed` (default `m - 2`).
        #[arg(long)]
        q: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate a family across weights as CSV (one row per `c`).
    Sweep {
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum)]
        family: Family,
        /// Comma-separated weights, e.g. `0,1/4,1/2,3/4`.
        #[arg(long = "c-list", value_delimiter = ',', required = true)]
        c_list: Vec<String>,
        #[arg(long)]
        epsilon: Option<String>,
        #[arg(long)]
        q: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate exact scores against a sampled electorate.
    Mc {
        /// Input file; stdin when omitted or `-`.
        input: Option<PathBuf>,
        /// Number of sampled voters.
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also report the exact grid-search deviation maximum.
        #[arg(long = "grid-step")]
        grid_step: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read_input(path: Option<&PathBuf>) -> anyhow::Result<String> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            Ok(fs::read_to_string(p).map_err(|e| anyhow::anyhow!("cannot read {p:?}: {e}"))?)
        }
        _ => {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf)?;
            Ok(buf)
        }
    }
}

fn write_output(out: Option<&PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run() -> anyhow::Result<u8> {
    let cli = Cli::parse();
    match cli.command {
        Command::Check { input, out } => {
            let doc = read_input(input.as_ref())?;
            let (json, exit) = run_check(&doc)?;
            write_output(out.as_ref(), &(json + "\n"))?;
            Ok(exit)
        }
        Command::Construct {
            c,
            m,
            family,
            epsilon,
            q,
            out,
        } => {
            let json = run_construct(&c, m, family, epsilon.as_deref(), q)?;
            write_output(out.as_ref(), &(json + "\n"))?;
            Ok(0)
        }
        Command::Sweep {
            m,
            family,
            c_list,
            epsilon,
            q,
            out,
        } => {
            let csv = run_sweep(m, family, &c_list, epsilon.as_deref(), q)?;
            write_output(out.as_ref(), &csv)?;
            Ok(0)
        }
        Command::Mc {
            input,
            n,
            seed,
            grid_step,
            out,
        } => {
            let doc = read_input(input.as_ref())?;
            let (json, exit) = run_mc(&doc, n, seed, grid_step.as_deref())?;
            write_output(out.as_ref(), &(json + "\n"))?;
            Ok(exit)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
