use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cmpadic::experiments::{
    run_prop_approximate, run_rigidity_scan, run_selftest, run_sieve, run_warmup_2adic,
    ExperimentConfig, OutputFormat,
};

#[derive(Parser)]
#[command(
    name = "cmpadic",
    version,
    about = "Reproducible experiments on CM points and p-adic distances"
)]
struct Cli {
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Working p-adic precision in digits.
    #[arg(long, global = true, default_value_t = 20)]
    precision: u32,
    /// Disk cache for Hilbert class polynomials.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Newton polygons of H_{-d} at p for d = 3x^2 + 4p^{2n+1}, n = 1..nmax.
    Prop12 {
        #[arg(long, default_value_t = 5)]
        p: u64,
        #[arg(long, default_value_t = 2)]
        nmax: u32,
    },
    /// 2-adic valuations of singular moduli of discriminant -(3x^2 + 2^{n+2}).
    Warmup2 {
        #[arg(long, value_delimiter = ',', default_value = "1,3")]
        n: Vec<u32>,
    },
    /// Valuations of Phi_N over pairs of ordinary CM points.
    Rigidity {
        #[arg(long, default_value_t = 5)]
        p: u64,
        #[arg(long, default_value_t = 500)]
        dcap: u64,
        #[arg(long, value_delimiter = ',', default_value = "1,2")]
        levels: Vec<u32>,
    },
    /// Square-free values of 3x^2 + 4p^{2n+1} up to y.
    Sieve {
        #[arg(long, default_value_t = 5)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, default_value_t = 1_000_000)]
        y: u64,
    },
    /// Fast deterministic checks of every module.
    Selftest {
        /// Directory with replacement phi_N.txt tables.
        #[arg(long)]
        phi_dir: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut cfg = ExperimentConfig {
        seed: cli.seed,
        precision: cli.precision,
        cache_dir: cli.cache_dir.clone(),
        ..Default::default()
    };
    let report = match cli.command {
        Command::Prop12 { p, nmax } => run_prop_approximate(p, nmax, &cfg),
        Command::Warmup2 { n } => run_warmup_2adic(&n, 100_000, &cfg),
        Command::Rigidity { p, dcap, levels } => run_rigidity_scan(p, dcap, &levels, &cfg),
        Command::Sieve { p, n, y } => run_sieve(p, n, y, &cfg),
        Command::Selftest { phi_dir } => {
            cfg.phi_dir = phi_dir;
            run_selftest(&cfg)
        }
    };
    let report = match report {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let format = match cli.format {
        Format::Json => OutputFormat::Json,
        Format::Csv => OutputFormat::Csv,
    };
    let written = match &cli.out {
        Some(path) => std::fs::File::create(path)
            .map_err(cmpadic::Error::from)
            .and_then(|mut f| report.write_to(&mut f, format)),
        None => report.write_to(&mut std::io::stdout().lock(), format),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let _ = std::io::stdout().flush();
    if report.has_failures() {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
