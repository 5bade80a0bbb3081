//! Generalized dual-free stochastic dual coordinate ascent (SDCA) for
//! regularized empirical risk minimization that is not strongly convex, or
//! not convex at all.
//!
//! The crate covers the whole pipeline:
//!
//! - [`data`]: datasets (dense or sparse rows), LIBSVM I/O, column normalization.
//! - [`losses`]: per-sample smooth losses (squared, logistic, generic GLM).
//! - [`regularizers`]: ℓ1, group-ℓ1,2, SCAD and the convexified SCAD term, with
//!   exact proximal operators.
//! - [`splitting`]: rewrites `f + λg` as `(1/N)Σφ_i + λ̃g̃` with a concave
//!   quadratic component so that `g̃` is 1-strongly convex.
//! - [`sdca`]: the solver itself.
//! - [`baselines`]: Prox-GD, Prox-SGD, RDA, Prox-SVRG, SAGA and Prox-SAG.
//! - [`diagnostics`]: reference solutions, potentials, conjugates and rate fits.
//! - [`datagen`]: synthetic designs (equicorrelated Gaussian, group, corrupted).
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`). The root
//! re-exports `f64` aliases for the common case.

pub mod baselines;
pub mod data;
pub mod datagen;
pub mod diagnostics;
mod error;
pub mod linalg;
pub mod losses;
pub mod regularizers;
pub mod rng;
mod scalar;
pub mod sdca;
pub mod splitting;
pub mod trace;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// `f64` dataset.
pub type Dataset = data::Dataset<f64>;
/// `f64` sparse row.
pub type SparseRow = data::SparseRow<f64>;
/// `f64` loss model.
pub type LossModel = losses::LossModel<f64>;
/// `f64` penalty.
pub type Penalty = regularizers::Penalty<f64>;
/// `f64` SCAD regularizer.
pub type NonconvexReg = regularizers::NonconvexReg<f64>;
/// `f64` problem specification.
pub type ProblemSpec = splitting::ProblemSpec<f64>;
/// `f64` split problem.
pub type SplitProblem = splitting::SplitProblem<f64>;
/// `f64` solver state.
pub type SdcaState = sdca::SdcaState<f64>;
/// `f64` convergence trace.
pub type Trace = trace::Trace<f64>;
/// `f64` reference solution.
pub type Reference = diagnostics::Reference<f64>;
