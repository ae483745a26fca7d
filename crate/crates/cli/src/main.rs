//! `qpip`: run protocol experiments, exact oracles and the classical demos from config files.

mod commands;
mod config;
mod error;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qpip::mathcore::CodeParams;

use config::ExperimentConfig;
use error::CliError;

#[derive(Parser)]
#[command(name = "qpip", version, about = "Quantum-prover interactive proof simulator")]
struct Cli {
    /// Experiment configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the number of trials.
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Worker threads for trials.
    #[arg(long, global = true)]
    parallelism: Option<usize>,
    /// Write the report here instead of stdout or `output.report`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write the final joint state of trial 0 as JSON.
    #[arg(long, global = true)]
    dump_state: Option<PathBuf>,
    /// Include key material of trial 0 in the report.
    #[arg(long, global = true)]
    log_keys: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo protocol runs paired with exact oracle values.
    Run,
    /// Exact enumerations.
    Oracle {
        #[command(subcommand)]
        which: OracleCommand,
    },
    /// Vary one parameter and emit CSV.
    Sweep,
    /// Graph (non-)isomorphism interactive proof.
    GiDemo,
    /// Check a claimed prime factorization.
    FactorVerify {
        #[arg(long)]
        n: u64,
        #[arg(long, value_delimiter = ',')]
        factors: Vec<u64>,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Size and closure certificate of the two-qubit Clifford group.
    CliffordTable,
    /// Key-averaged rejection probability of a fixed Pauli attack on one block.
    Detection {
        /// `"XZ"` for the Clifford scheme, `"l:n,…"` for the polynomial scheme.
        #[arg(long)]
        attack: String,
        #[arg(long, default_value = "clifford")]
        scheme: String,
        #[arg(long, default_value_t = 5)]
        q: u64,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, default_value_t = 3)]
        m: usize,
        /// Logical basis value held by the block.
        #[arg(long, default_value_t = 0)]
        logical: u64,
    },
    /// Every signed codeword encoding a logical value.
    CodeEnum {
        #[arg(long, default_value_t = 5)]
        q: u64,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        a: u64,
        /// Sign key as `1,-1,1`; all `+1` by default.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        signs: Option<Vec<i8>>,
    },
}

fn load(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let path = cli.config.as_ref().ok_or_else(|| CliError::Config("--config is required".into()))?;
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = cli.trials {
        cfg.trials = trials;
    }
    if let Some(p) = cli.parallelism {
        cfg.parallelism = p;
    }
    if let Some(path) = &cli.dump_state {
        cfg.output.dump_state = Some(path.clone());
    }
    cfg.log_keys |= cli.log_keys;
    Ok(cfg)
}

fn code_params(q: u64, d: usize, m: usize) -> Result<CodeParams, CliError> {
    CodeParams::new(q, d, m).map_err(|e| CliError::Config(e.to_string()))
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Run => commands::run(&load(cli)?, out),
        Command::Sweep => commands::sweep(&load(cli)?, out),
        Command::GiDemo => commands::gi_demo(&load(cli)?, out),
        Command::FactorVerify { n, factors } => commands::factor_verify(*n, factors),
        Command::Oracle { which } => match which {
            OracleCommand::CliffordTable => commands::oracle_clifford_table(),
            OracleCommand::Detection { attack, scheme, q, d, m, logical } => match scheme.as_str() {
                "clifford" => commands::oracle_detection(attack, None),
                "polynomial" => commands::oracle_detection(attack, Some((code_params(*q, *d, *m)?, *logical))),
                other => Err(CliError::Config(format!("--scheme {other:?}: expected clifford or polynomial"))),
            },
            OracleCommand::CodeEnum { q, d, m, a, signs } => {
                commands::oracle_code_enum(code_params(*q, *d, *m)?, *a, signs.clone())
            }
        },
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qpip: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
