//! Learning-rate grid search.

use gsdca::baselines::step_grid;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::SolverName;
use crate::problem::Instance;
use crate::solve::run_solver;
use crate::{Error, Result};

/// Candidate steps: `{2/2^k : k = 0..12}` for constant-rate solvers, powers
/// of ten from `1e-4` to `1e2` for the `η₀` of Prox-SGD and the `β₀` of RDA.
pub fn grid_for(name: SolverName) -> Vec<f64> {
    if name.has_constant_rate() {
        step_grid()
    } else {
        (-4..=2).map(|k| 10f64.powi(k)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridPoint {
    pub step: f64,
    /// `None` when the run diverged.
    pub final_objective: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TuneOutcome {
    pub solver: SolverName,
    pub chosen: f64,
    pub grid: Vec<GridPoint>,
}

/// Relative objective difference under which two grid points count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Runs every grid point for `epochs` epochs with `seed` and keeps the one
/// with the smallest final objective; ties go to the smaller step.
pub fn tune_rate(
    inst: &Instance,
    name: SolverName,
    inner_len: Option<usize>,
    epochs: usize,
    seed: u64,
) -> Result<TuneOutcome> {
    let grid = grid_for(name);
    let points: Vec<GridPoint> = grid
        .par_iter()
        .map(|&step| {
            let final_objective =
                run_solver(inst, name, step, inner_len, epochs, seed, None, false)
                    .ok()
                    .and_then(|r| r.trace.last().map(|rec| rec.objective))
                    .filter(|f| f.is_finite());
            GridPoint {
                step,
                final_objective,
            }
        })
        .collect();
    let chosen = select(&points).ok_or_else(|| Error::Tuning {
        solver: name.as_str().into(),
    })?;
    Ok(TuneOutcome {
        solver: name,
        chosen,
        grid: points,
    })
}

fn select(points: &[GridPoint]) -> Option<f64> {
    let best = points
        .iter()
        .filter_map(|p| p.final_objective)
        .fold(f64::INFINITY, f64::min);
    if !best.is_finite() {
        return None;
    }
    let tol = TIE_TOLERANCE * best.abs().max(1.0);
    points
        .iter()
        .filter(|p| p.final_objective.is_some_and(|f| f - best <= tol))
        .map(|p| p.step)
        .fold(None, |m: Option<f64>, s| Some(m.map_or(s, |m| m.min(s))))
}
