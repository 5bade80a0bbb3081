//! Uniform entry point over SDCA and the baselines.

use gsdca::baselines::{run_baseline, BaselineConfig, SolverKind};
use gsdca::diagnostics::Reference;
use gsdca::sdca::{self, RunConfig};
use gsdca::trace::Trace;

use crate::config::SolverName;
use crate::problem::Instance;
use crate::Result;

#[derive(Clone, Debug)]
pub struct SolverRun {
    pub w: Vec<f64>,
    pub trace: Trace<f64>,
}

fn baseline_kind(name: SolverName) -> Option<SolverKind> {
    Some(match name {
        SolverName::Sdca => return None,
        SolverName::ProxGd => SolverKind::ProxGd,
        SolverName::ProxSgd => SolverKind::ProxSgd,
        SolverName::Rda => SolverKind::Rda,
        SolverName::ProxSvrg => SolverKind::ProxSvrg,
        SolverName::Saga => SolverKind::Saga,
        SolverName::ProxSag => SolverKind::ProxSag,
    })
}

/// Default step parameter for each solver.
///
/// SDCA uses the largest step covered by its convergence guarantee; Prox-GD
/// `1/L` with `L` the gradient Lipschitz constant; the stochastic methods use
/// the usual fractions of `1/L_max`.
pub fn theory_step(inst: &Instance, name: SolverName) -> f64 {
    let l_max = inst
        .spec
        .smoothness()
        .into_iter()
        .fold(inst.spec.loss.correction(), f64::max)
        .max(f64::MIN_POSITIVE);
    match name {
        SolverName::Sdca => inst.split.step(),
        SolverName::ProxGd => {
            1.0 / inst
                .spec
                .smooth_lipschitz()
                .max(inst.spec.loss.correction())
        }
        SolverName::ProxSgd => 1.0 / l_max,
        SolverName::Rda => l_max,
        SolverName::ProxSvrg => 1.0 / (4.0 * l_max),
        SolverName::Saga => 1.0 / (3.0 * l_max),
        SolverName::ProxSag => 1.0 / (16.0 * l_max),
    }
}

#[allow(clippy::too_many_arguments)]
pub fn run_solver(
    inst: &Instance,
    name: SolverName,
    step: f64,
    inner_len: Option<usize>,
    epochs: usize,
    seed: u64,
    reference: Option<&Reference<f64>>,
    potentials: bool,
) -> Result<SolverRun> {
    match baseline_kind(name) {
        None => {
            let sp = inst.split.clone().with_step(step)?;
            let mut cfg = RunConfig::new(epochs, seed);
            cfg.potentials = potentials && reference.is_some();
            let out = sdca::run(&sp, &cfg, reference)?;
            Ok(SolverRun {
                w: out.w,
                trace: out.trace,
            })
        }
        Some(kind) => {
            let mut cfg = BaselineConfig::new(kind, step, epochs, seed);
            cfg.inner_len = inner_len;
            let out = run_baseline(&inst.spec, &cfg, reference.map(|r| r.objective))?;
            Ok(SolverRun {
                w: out.w,
                trace: out.trace,
            })
        }
    }
}
