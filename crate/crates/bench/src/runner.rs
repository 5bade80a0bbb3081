//! Experiment execution: reference, step resolution, solver runs, outputs.

use std::path::{Path, PathBuf};
use std::time::Instant;

use gsdca::diagnostics::{compute_reference_with, Reference, ReferenceOptions};
use gsdca::linalg;
use gsdca::splitting::Mode;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, SolverName, StepChoice, StepRule};
use crate::output::write_trace_file;
use crate::problem::{build_instance, Instance};
use crate::solve::{run_solver, theory_step};
use crate::tune::{tune_rate, TuneOutcome};
use crate::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    /// The config with every step replaced by its resolved value; feeding it
    /// back to `run` reproduces the CSVs.
    pub resolved_config: ExperimentConfig,
    pub problem: ProblemSummary,
    pub reference: Option<ReferenceSummary>,
    pub tuning: Vec<TuneOutcome>,
    pub runs: Vec<RunRecord>,
    pub elapsed_secs: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProblemSummary {
    pub n: usize,
    pub p: usize,
    pub nnz: usize,
    pub lambda: f64,
    pub lambda_tilde: f64,
    pub mode: &'static str,
    pub n_components: usize,
    pub mu: f64,
    pub correction: f64,
    pub mean_smoothness: f64,
    pub sdca_theory_step: f64,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReferenceSummary {
    pub objective: f64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub nonzeros: usize,
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunRecord {
    pub solver: SolverName,
    pub seed: u64,
    pub step: f64,
    pub status: RunStatus,
    pub message: Option<String>,
    pub file: Option<String>,
    pub final_objective: Option<f64>,
    pub final_gap: Option<f64>,
    /// `||w − w*||₂` for generated problems.
    pub estimation_error: Option<f64>,
    pub elapsed_secs: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    Diverged,
    Failed,
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub manifest: Manifest,
    pub csv_files: Vec<PathBuf>,
}

pub fn csv_name(solver: SolverName, seed: u64) -> String {
    format!("{}_seed{seed}.csv", solver.as_str())
}

pub fn reference_for(inst: &Instance, cfg: &ExperimentConfig) -> Result<Option<Reference<f64>>> {
    if !cfg.reference.enabled {
        return Ok(None);
    }
    let opts = ReferenceOptions {
        tol: cfg.reference.tol,
        max_iter: cfg.reference.max_iter,
        strict: cfg.reference.strict,
    };
    Ok(Some(compute_reference_with(&inst.split, &opts)?))
}

/// Resolves `theory` and `tune` steps; returns the steps and tuning records.
pub fn resolve_steps(
    inst: &Instance,
    cfg: &ExperimentConfig,
) -> Result<(Vec<f64>, Vec<TuneOutcome>)> {
    let mut steps = Vec::with_capacity(cfg.solvers.len());
    let mut tuning = Vec::new();
    for s in &cfg.solvers {
        let step = match s.step {
            StepChoice::Value(v) => v,
            StepChoice::Rule(StepRule::Theory) => theory_step(inst, s.kind),
            StepChoice::Rule(StepRule::Tune) => {
                let t = tune_rate(inst, s.kind, s.inner_len, cfg.epochs, cfg.seeds[0])?;
                let chosen = t.chosen;
                tuning.push(t);
                chosen
            }
        };
        steps.push(step);
    }
    Ok((steps, tuning))
}

pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunSummary> {
    let start = Instant::now();
    let inst = build_instance(cfg)?;
    let reference = reference_for(&inst, cfg)?;
    let (steps, tuning) = resolve_steps(&inst, cfg)?;
    std::fs::create_dir_all(out_dir).map_err(|source| Error::File {
        path: out_dir.to_path_buf(),
        source,
    })?;

    let jobs: Vec<(usize, u64)> = (0..cfg.solvers.len())
        .flat_map(|k| cfg.seeds.iter().map(move |&s| (k, s)))
        .collect();
    let runs: Vec<Result<RunRecord>> = jobs
        .par_iter()
        .map(|&(k, seed)| {
            let solver = &cfg.solvers[k];
            let t0 = Instant::now();
            let result = run_solver(
                &inst,
                solver.kind,
                steps[k],
                solver.inner_len,
                cfg.epochs,
                seed,
                reference.as_ref(),
                cfg.potentials,
            );
            let mut rec = RunRecord {
                solver: solver.kind,
                seed,
                step: steps[k],
                status: RunStatus::Ok,
                message: None,
                file: None,
                final_objective: None,
                final_gap: None,
                estimation_error: None,
                elapsed_secs: 0.0,
            };
            match result {
                Ok(run) => {
                    let name = csv_name(solver.kind, seed);
                    write_trace_file(&run.trace, &out_dir.join(&name))?;
                    let last = run.trace.last().expect("trace has epoch 0");
                    rec.file = Some(name);
                    rec.final_objective = Some(last.objective);
                    rec.final_gap = last.gap;
                    rec.estimation_error = inst.w_star.as_ref().map(|ws| linalg::dist(&run.w, ws));
                }
                Err(Error::Core(e @ gsdca::Error::Diverged { .. })) => {
                    rec.status = RunStatus::Diverged;
                    rec.message = Some(e.to_string());
                }
                Err(Error::Core(e)) => {
                    rec.status = RunStatus::Failed;
                    rec.message = Some(e.to_string());
                }
                Err(e) => return Err(e),
            }
            rec.elapsed_secs = t0.elapsed().as_secs_f64();
            Ok(rec)
        })
        .collect();
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;

    let mut resolved_config = cfg.clone();
    for (s, &step) in resolved_config.solvers.iter_mut().zip(&steps) {
        s.step = StepChoice::Value(step);
    }
    if !cfg.sum_scaled {
        resolved_config.lambda = crate::config::LambdaChoice::Value(inst.lambda);
    }
    resolved_config.output_dir = None;

    let sp = &inst.split;
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        resolved_config,
        problem: ProblemSummary {
            n: inst.spec.n(),
            p: inst.spec.p(),
            nnz: inst.spec.data().nnz(),
            lambda: inst.lambda,
            lambda_tilde: sp.lambda_tilde(),
            mode: match sp.mode() {
                Mode::Split => "split",
                Mode::Direct => "direct",
            },
            n_components: sp.n_components(),
            mu: sp.mu(),
            correction: inst.spec.loss.correction(),
            mean_smoothness: sp.mean_loss_smoothness(),
            sdca_theory_step: sp.step(),
            warnings: sp.warnings().to_vec(),
        },
        reference: reference.as_ref().map(|r| ReferenceSummary {
            objective: r.objective,
            residual: r.residual,
            iterations: r.iterations,
            converged: r.residual <= cfg.reference.tol,
            nonzeros: r.w.iter().filter(|&&x| x != 0.0).count(),
            note: inst.spec.is_nonconvex().then(|| {
                "nonconvex objective: the reference is the stationary point reached by Prox-GD from zero, not a certified global optimum".into()
            }),
        }),
        tuning,
        runs,
        elapsed_secs: start.elapsed().as_secs_f64(),
    };
    let path = out_dir.join(MANIFEST_FILE);
    std::fs::write(&path, serde_json::to_string_pretty(&manifest)?)
        .map_err(|source| Error::File { path, source })?;
    let csv_files = manifest
        .runs
        .iter()
        .filter_map(|r| r.file.as_ref().map(|f| out_dir.join(f)))
        .collect();
    Ok(RunSummary {
        out_dir: out_dir.to_path_buf(),
        manifest,
        csv_files,
    })
}
