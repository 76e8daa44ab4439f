//! Command-line front end: validate configs, run single experiments or
//! sweeps, emit CSV/JSON artifacts.
//!
//! Exit codes: 0 on success, 2 on configuration/validation errors (stderr
//! names the failing field), 1 on runtime errors.

use clap::{Parser, Subcommand};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use sbe_core::config::{load_experiment, load_sweep, ConfigError};
use sbe_core::env::make_instance;
use sbe_core::harness::{
    lemma_checks, prepare_basis, run_experiment, sweep, write_epoch_jsonl, write_ledger_csv,
    write_sweep_csv, write_trace_csv, RunOptions,
};

/// Environment variable overriding the output directory (flag still wins).
const OUT_DIR_ENV: &str = "SBE_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "sbe",
    about = "Corrupted stochastic linear optimization experiments",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for sweep grids.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Output directory (overrides the config and SBE_OUT_DIR).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Added to every seed in the config.
    #[arg(long, global = true, default_value_t = 0)]
    seed_offset: u64,
    /// Emit a confidence-bound report per sweep cell.
    #[arg(long, global = true)]
    check_lemmas: bool,
    /// Write per-cell trace CSVs during sweeps.
    #[arg(long, global = true)]
    traces: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one experiment config across its seed list.
    Run { config: PathBuf },
    /// Execute a sweep grid config.
    Sweep { config: PathBuf },
}

enum CliError {
    Validation(String),
    Runtime(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Runtime(m) => m,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn main() {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {}", e.message());
            std::process::exit(e.code());
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Run { config } => cmd_run(&cli, config),
        Command::Sweep { config } => cmd_sweep(&cli, config),
    }
}

fn resolve_out_dir(cli: &Cli, config_dir: &Option<PathBuf>) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .or_else(|| config_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(File::create(path)?))
}

fn cmd_run(cli: &Cli, config_path: &Path) -> Result<(), CliError> {
    let mut cfg = load_experiment(config_path)?;
    cfg.seeds.iter_mut().for_each(|s| *s += cli.seed_offset);
    let out_dir = resolve_out_dir(cli, &cfg.output_dir);
    std::fs::create_dir_all(&out_dir)?;

    // Instance and basis are configuration products: failures here are
    // validation errors, not runtime ones.
    let instance =
        make_instance(&cfg.instance).map_err(|e| CliError::Validation(format!("instance: {e}")))?;
    let basis = prepare_basis(&instance, cfg.algorithm.mode)
        .map_err(|e| CliError::Validation(format!("geometry: {e}")))?;

    let geometry_path = out_dir.join("geometry.json");
    let geometry = serde_json::json!({
        "center": basis.origin_shift,
        "axes": basis.axes,
        "kappa": basis.kappa,
    });
    let mut w = create(&geometry_path)?;
    writeln!(
        w,
        "{}",
        serde_json::to_string_pretty(&geometry).map_err(io_err)?
    )?;

    let algo = &cfg.algorithm.name;
    for &seed in &cfg.seeds {
        let options = RunOptions {
            record_trace: cfg.record_trace,
            max_steps: None,
            check_lemmas: false,
        };
        let output = run_experiment(
            &instance,
            basis.clone(),
            &cfg.algorithm,
            &cfg.corruption,
            cfg.horizon,
            seed,
            &options,
        )
        .map_err(|e| CliError::Runtime(e.to_string()))?;

        if cfg.record_trace {
            let mut w = create(&out_dir.join(format!("run_{algo}_seed{seed}.csv")))?;
            write_trace_csv(&mut w, &output.trace)?;
        }
        let mut w = create(&out_dir.join(format!("ledger_{algo}_seed{seed}.csv")))?;
        write_ledger_csv(&mut w, &output.ledger)?;
        let mut w = create(&out_dir.join(format!("epochs_{algo}_seed{seed}.jsonl")))?;
        write_epoch_jsonl(&mut w, &output.epoch_records)?;

        let shifted = basis.shifted_vertices(&instance.polytope);
        let report = lemma_checks(
            &output.epoch_records,
            &basis,
            &shifted,
            &instance.theta,
            instance.delta,
            Some(&output.ledger),
        )
        .map_err(|e| CliError::Runtime(e.to_string()))?;
        let mut w = create(&out_dir.join(format!("lemmas_{algo}_seed{seed}.json")))?;
        writeln!(
            w,
            "{}",
            serde_json::to_string_pretty(&report).map_err(io_err)?
        )?;
    }
    Ok(())
}

fn cmd_sweep(cli: &Cli, config_path: &Path) -> Result<(), CliError> {
    let mut cfg = load_sweep(config_path)?;
    cfg.seeds.iter_mut().for_each(|s| *s += cli.seed_offset);
    cfg.record_traces |= cli.traces;
    cfg.check_lemmas |= cli.check_lemmas;
    let out_dir = resolve_out_dir(cli, &cfg.output_dir);
    std::fs::create_dir_all(&out_dir)?;

    let result = sweep(&cfg, cli.jobs).map_err(|e| CliError::Runtime(e.to_string()))?;

    let mut w = create(&out_dir.join("sweep_summary.csv"))?;
    write_sweep_csv(&mut w, &result.summary_rows())?;
    let mut w = create(&out_dir.join("sweep_aggregates.json"))?;
    writeln!(
        w,
        "{}",
        serde_json::to_string_pretty(&result.aggregates).map_err(io_err)?
    )?;

    for run in &result.runs {
        let Some(output) = &run.output else { continue };
        let tag = format!(
            "C{}_d{}_{}_seed{}",
            run.cell.budget, run.cell.d, run.cell.algorithm, run.cell.seed
        );
        if cfg.record_traces {
            let mut w = create(&out_dir.join(format!("cell_{tag}.csv")))?;
            write_trace_csv(&mut w, &output.trace)?;
        }
        if cfg.check_lemmas {
            if let Some(report) = &output.lemma_report {
                let mut w = create(&out_dir.join(format!("lemmas_{tag}.json")))?;
                writeln!(
                    w,
                    "{}",
                    serde_json::to_string_pretty(report).map_err(io_err)?
                )?;
            }
        }
    }
    Ok(())
}

fn io_err(e: serde_json::Error) -> std::io::Error {
    std::io::Error::other(e)
}
