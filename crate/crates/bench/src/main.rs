use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gsdca::data::write_libsvm;
use gsdca_bench::config::{load_config, ExperimentConfig, ProblemSource, SolverName, OUT_DIR_ENV};
use gsdca_bench::plot::plot_svg;
use gsdca_bench::presets::{preset, PRESETS};
use gsdca_bench::problem::{build_instance, load_data};
use gsdca_bench::runner::{run_experiment, RunStatus};
use gsdca_bench::tune::tune_rate;
use gsdca_bench::{Error, Result};

#[derive(Parser)]
#[command(
    name = "gsdca-bench",
    version,
    about = "Solver comparisons for regularized ERM"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Source {
    /// JSON experiment config (a run manifest also works)
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Named preset, see `gsdca-bench presets`
    #[arg(long)]
    preset: Option<String>,
}

impl Source {
    fn load(&self) -> Result<ExperimentConfig> {
        match (&self.config, &self.preset) {
            (Some(path), _) => load_config(path),
            (None, Some(name)) => preset(name),
            (None, None) => Err(Error::Config("pass --config or --preset".into())),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment: one CSV per solver and seed, a manifest and a chart
    Run {
        #[command(flatten)]
        source: Source,
        /// Output directory (default: config, then $GSDCA_OUT_DIR/<name>, then gsdca-out/<name>)
        #[arg(long, env = OUT_DIR_ENV)]
        out: Option<PathBuf>,
        /// Use this single solver seed
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Grid-search the step of one solver and print the result as JSON
    Tune {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        solver: SolverName,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Render trace CSVs as a log-scale SVG chart
    Plot {
        /// Trace CSVs, or directories containing them
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "objective gap")]
        title: String,
    },
    /// Write the configured dataset in LIBSVM format
    Gen {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        out: PathBuf,
        /// Override the generator seed
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List the built-in presets
    Presets,
}

fn csvs_in(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(p)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "csv"))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    Ok(files)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { source, out, seed } => {
            let mut cfg = source.load()?;
            if let Some(s) = seed {
                cfg = cfg.with_seed(s);
            }
            let dir = match &out {
                Some(p) => p.clone(),
                None => cfg.resolve_output_dir(None),
            };
            let summary = run_experiment(&cfg, &dir)?;
            for r in &summary.manifest.runs {
                match r.status {
                    RunStatus::Ok => println!(
                        "{:<10} seed {:<4} step {:<12.6e} final objective {:.12e}{}",
                        r.solver.as_str(),
                        r.seed,
                        r.step,
                        r.final_objective.unwrap_or(f64::NAN),
                        r.final_gap
                            .map(|g| format!("  gap {g:.3e}"))
                            .unwrap_or_default()
                    ),
                    _ => println!(
                        "{:<10} seed {:<4} {:?}: {}",
                        r.solver.as_str(),
                        r.seed,
                        r.status,
                        r.message.as_deref().unwrap_or("")
                    ),
                }
            }
            if summary.manifest.reference.is_some() && !summary.csv_files.is_empty() {
                plot_svg(&summary.csv_files, &dir.join("convergence.svg"), &cfg.name)?;
            }
            println!("wrote {}", dir.display());
        }
        Command::Tune {
            source,
            solver,
            seed,
        } => {
            let cfg = source.load()?;
            let inst = build_instance(&cfg)?;
            let inner = cfg
                .solvers
                .iter()
                .find(|s| s.kind == solver)
                .and_then(|s| s.inner_len);
            let outcome = tune_rate(
                &inst,
                solver,
                inner,
                cfg.epochs,
                seed.unwrap_or(cfg.seeds[0]),
            )?;
            println!("{}", serde_json::to_string_pretty(&outcome)?);
        }
        Command::Plot { inputs, out, title } => {
            let files = csvs_in(&inputs)?;
            plot_svg(&files, &out, &title)?;
            println!("wrote {}", out.display());
        }
        Command::Gen { source, out, seed } => {
            let mut cfg = source.load()?;
            if let (Some(s), ProblemSource::Synthetic(sc)) = (seed, &mut cfg.problem) {
                sc.seed = s;
            }
            let loaded = load_data(&cfg)?;
            let (data, w_star) = (loaded.data, loaded.w_star);
            write_dataset(&data, &out)?;
            if let Some(w) = w_star {
                let side = out.with_extension("wstar.json");
                std::fs::write(&side, serde_json::to_string(&w)?)?;
                println!("wrote {} and {}", out.display(), side.display());
            } else {
                println!("wrote {}", out.display());
            }
        }
        Command::Presets => {
            for (name, desc) in PRESETS {
                println!("{name:<20} {desc}");
            }
        }
    }
    Ok(())
}

fn write_dataset(data: &gsdca::Dataset, out: &Path) -> Result<()> {
    let file = std::fs::File::create(out).map_err(|source| Error::File {
        path: out.to_path_buf(),
        source,
    })?;
    write_libsvm(data, std::io::BufWriter::new(file))?;
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
