use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use beamshare_core::cli::report::read_report;
use beamshare_core::cli::sweep::{expand_values, run_sweep, write_sweep_aggregates, write_sweep_rows};
use beamshare_core::cli::{parse_config, ScenarioConfig, SchemeOverride};
use beamshare_core::sim::{run_scenario, summary_csv_record, SUMMARY_CSV_HEADER};
use beamshare_core::{Error, Result};

#[derive(Parser)]
#[command(name = "beamshare", version, about = "Slot-level simulator for beamformed spectrum sharing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write per-slot and summary CSV files.
    Run {
        config: PathBuf,
        /// Run only this seed instead of the configured list.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
        /// auto, off, omni, mrt, zf2 or zf4.
        #[arg(long)]
        scheme: Option<SchemeOverride>,
    },
    /// Run a scenario once per value of a parameter.
    Sweep {
        config: PathBuf,
        /// Dotted config path, e.g. `mac.offered_load`, or
        /// `grid.secondary_receiver` for grid location ids.
        #[arg(long)]
        param: String,
        /// Comma-separated TOML values; `free` with `grid.secondary_receiver`
        /// sweeps every free grid location.
        #[arg(long)]
        values: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
        #[arg(long)]
        scheme: Option<SchemeOverride>,
    },
    /// Summarize a summary or sweep CSV by scheme.
    Report {
        csv: PathBuf,
        /// Also write a gnuplot data file here.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
}

fn load(config: &Path, seed: Option<u64>, scheme: Option<SchemeOverride>) -> Result<ScenarioConfig> {
    let mut cfg = parse_config(config)?;
    if let Some(s) = seed {
        cfg.run.seeds = vec![s];
    }
    if let Some(s) = scheme {
        cfg.run.scheme = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn prepare(out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))
}

fn run(cfg: &ScenarioConfig, out_dir: &Path) -> Result<()> {
    prepare(out_dir)?;
    let scheme = cfg.run.scheme.to_string();
    let summary_path = out_dir.join("summary.csv");
    let mut summary = csv::Writer::from_writer(create(&summary_path)?);
    summary.write_record(SUMMARY_CSV_HEADER)?;
    for &seed in &cfg.run.seeds {
        let slots = create(&out_dir.join(format!("slots_seed{seed}.csv")))?;
        let m = run_scenario(cfg, seed, Some(slots))?;
        println!(
            "seed {seed}: primary {:.2}/s, secondary {:.2}/s, jain {}",
            m.primary_throughput(),
            m.secondary_throughput(),
            m.jain_index.map_or_else(|| "n/a".to_string(), |j| format!("{j:.4}"))
        );
        summary.write_record(summary_csv_record(&scheme, &m))?;
    }
    summary.flush().map_err(|e| Error::io(&summary_path, e))?;
    println!("wrote {}", summary_path.display());
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, seed, out_dir, scheme } => run(&load(&config, seed, scheme)?, &out_dir),
        Command::Sweep { config, param, values, seed, out_dir, scheme } => {
            let cfg = load(&config, seed, scheme)?;
            let result = run_sweep(&cfg, &param, &expand_values(&cfg, &param, &values))?;
            prepare(&out_dir)?;
            write_sweep_rows(&result, create(&out_dir.join("sweep.csv"))?)?;
            write_sweep_aggregates(&result, create(&out_dir.join("sweep_summary.csv"))?)?;
            for a in &result.aggregates {
                println!(
                    "{param}={}: runs {}, aggregate {:.2} ± {:.2}/s",
                    a.value, a.runs, a.aggregate.mean, a.aggregate.std
                );
            }
            Ok(())
        }
        Command::Report { csv, plot } => {
            let report = read_report(&csv)?;
            print!("{}", report.table());
            if let Some(p) = plot {
                fs::write(&p, report.gnuplot_data()).map_err(|e| Error::io(&p, e))?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
