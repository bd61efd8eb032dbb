use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use polisim::config::{load_config, Config, CONFIG_ENV};
use polisim::runner::{self, BatchPlan, SweepPlan};
use polisim::scheduler::{NullRecorder, Recorder, DAYS_PER_MONTH, MONTHS_PER_YEAR};
use polisim::{Design, Error, Result};

#[derive(Parser)]
#[command(name = "polisim", version, about = "Agent-based spatial economy simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Config file of `key = value` lines (falls back to $POLISIM_CONFIG).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for batches and sweeps (outputs do not depend on it).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Suppress per-year progress lines.
    #[arg(long, short, global = true)]
    quiet: bool,
    /// Parameter overrides, e.g. `tax_consumption=0.1`.
    #[arg(global = true)]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// One run of the configured design.
    Run {
        #[command(flatten)]
        common: Common,
        /// Also write every sale to transactions.csv.
        #[arg(long)]
        transactions: bool,
        /// Also write the final world, one CSV per entity, to world/.
        #[arg(long)]
        dump_world: bool,
    },
    /// Independent runs for each design.
    Batch {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        runs: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [1, 4, 7])]
        designs: Vec<u32>,
    },
    /// The ten standard values of one parameter, same seed for every cell.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', default_values_t = [1, 4, 7])]
        designs: Vec<u32>,
    },
    /// Recompute summary.csv from the run files in DIR.
    Summarize { dir: PathBuf },
}

fn config(common: &Common) -> Result<Config> {
    let file = common.config.clone().or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    let mut overrides = common.overrides.clone();
    if let Some(seed) = common.seed {
        overrides.push(format!("seed={seed}"));
    }
    if let Some(out) = &common.out {
        overrides.push(format!("output_dir={}", out.display()));
    }
    load_config(file.as_deref(), &overrides)
}

fn designs(codes: &[u32]) -> Result<Vec<Design>> {
    let mut out = codes.iter().map(|&c| Design::from_count(c)).collect::<Result<Vec<_>>>()?;
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn jobs(common: &Common) -> usize {
    common.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { common, transactions, dump_world } => {
            let cfg = config(&common)?;
            let dir = cfg.sim.output_dir.clone();
            let design = cfg.sim.num_regions;
            runner::prepare_output_dir(&dir)?;
            std::fs::write(dir.join("meta.txt"), runner::meta_text(&cfg, &[design], &[]))
                .map_err(|e| Error::Io { path: dir.join("meta.txt"), source: e })?;

            let mut progress: Box<dyn Recorder> = if common.quiet {
                Box::new(NullRecorder)
            } else {
                Box::new(runner::YearProgress {
                    label: format!("design {design}"),
                    years: cfg.sim.num_days / (DAYS_PER_MONTH * MONTHS_PER_YEAR),
                })
            };
            let (world, series) = if transactions {
                let path = dir.join("transactions.csv");
                let mut log = runner::transactions_file(&path)?;
                let res = runner::simulate(&cfg, design, 0, &mut runner::Both(progress.as_mut(), &mut log))?;
                log.finish().map_err(|e| Error::Io { path, source: e })?;
                res
            } else {
                runner::simulate(&cfg, design, 0, progress.as_mut())?
            };
            runner::write_run(&dir, design, 0, &series)?;
            if let Some(f) = runner::final_state(design, &series) {
                let rows = polisim::stats::summarize(&[f]);
                std::fs::write(dir.join("summary.csv"), runner::summary_csv(&rows))
                    .map_err(|e| Error::Io { path: dir.join("summary.csv"), source: e })?;
            }
            if dump_world {
                runner::dump_world(&world, &dir.join("world"))?;
            }
            println!("wrote {}", dir.display());
        }
        Command::Batch { common, runs, designs: d } => {
            let cfg = config(&common)?;
            let plan = BatchPlan { designs: designs(&d)?, runs, jobs: jobs(&common), progress: !common.quiet };
            runner::run_batch(&cfg, &plan)?;
            println!("wrote {}", cfg.sim.output_dir.display());
        }
        Command::Sweep { common, param, designs: d } => {
            let cfg = config(&common)?;
            let plan = SweepPlan::standard(&param, designs(&d)?, cfg.sim.seed)?;
            let dir = runner::run_sweep(&cfg, &plan, jobs(&common))?;
            println!("wrote {}", dir.display());
        }
        Command::Summarize { dir } => {
            let rows = runner::summarize_dir(&dir)?;
            print!("{}", runner::summary_csv(&rows));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
