//! Turns a config into a problem instance.

use std::sync::Arc;

use gsdca::data::{normalize_columns, read_libsvm_file, Dataset};
use gsdca::datagen::generate;
use gsdca::losses::LossModel;
use gsdca::regularizers::{ConvexReg, GroupPartition, NonconvexReg, Penalty};
use gsdca::splitting::{
    recommend_lambda, split, split_direct, LambdaModel, ProblemSpec, SplitProblem,
};

use crate::config::{
    ExperimentConfig, LambdaChoice, LossChoice, ModeChoice, PenaltyChoice, ProblemSource,
};
use crate::{Error, Result};

/// A built problem together with generator metadata.
#[derive(Clone, Debug)]
pub struct Instance {
    pub spec: ProblemSpec<f64>,
    pub split: SplitProblem<f64>,
    pub lambda: f64,
    pub w_star: Option<Vec<f64>>,
}

/// The design together with what the generator knows about it.
#[derive(Clone, Debug)]
pub struct LoadedData {
    pub data: Dataset<f64>,
    pub w_star: Option<Vec<f64>>,
    /// Corruption variance of the generator (0 for files).
    pub gamma: f64,
    /// Noise level used by the `auto` λ rule.
    pub sigma: f64,
}

pub fn load_data(cfg: &ExperimentConfig) -> Result<LoadedData> {
    match &cfg.problem {
        ProblemSource::Synthetic(s) => {
            let g = generate::<f64>(&s.to_spec())?;
            let data = if s.normalize {
                normalize_columns(&g.data).0
            } else {
                g.data
            };
            Ok(LoadedData {
                data,
                w_star: Some(g.w_star),
                gamma: g.gamma,
                sigma: s.sigma,
            })
        }
        ProblemSource::File {
            path,
            dim,
            normalize,
        } => {
            let d = read_libsvm_file::<f64>(path, *dim)?;
            let d = if *normalize {
                normalize_columns(&d).0
            } else {
                d
            };
            Ok(LoadedData {
                data: d,
                w_star: None,
                gamma: 0.0,
                sigma: 1.0,
            })
        }
    }
}

fn groups(size: usize, p: usize) -> Result<ConvexReg> {
    Ok(ConvexReg::Group(GroupPartition::contiguous(p, size)?))
}

pub fn resolve_lambda(cfg: &ExperimentConfig, n: usize, p: usize, sigma: f64) -> Result<f64> {
    let lambda = match cfg.lambda {
        LambdaChoice::Value(l) if cfg.sum_scaled => l / n as f64,
        LambdaChoice::Value(l) => l,
        LambdaChoice::Rule(_) => {
            let model = match cfg.penalty {
                PenaltyChoice::L1 | PenaltyChoice::ElasticL1 => LambdaModel::Lasso { sigma, p, n },
                PenaltyChoice::Group { group_size }
                | PenaltyChoice::ElasticGroup { group_size } => LambdaModel::Group {
                    sigma,
                    group_size,
                    n_groups: p / group_size.max(1),
                    n,
                },
                PenaltyChoice::Scad { .. } => LambdaModel::Scad { sigma, p, n },
            };
            recommend_lambda(model)
        }
    };
    if !(lambda > 0.0) {
        return Err(Error::Config(format!(
            "resolved lambda {lambda} is not positive"
        )));
    }
    Ok(lambda)
}

pub fn build_instance(cfg: &ExperimentConfig) -> Result<Instance> {
    cfg.validate()?;
    let LoadedData {
        data,
        w_star,
        gamma: gen_gamma,
        sigma,
    } = load_data(cfg)?;
    let (n, p) = (data.n(), data.p());
    let lambda = resolve_lambda(cfg, n, p, sigma)?;
    let penalty = match cfg.penalty {
        PenaltyChoice::L1 => Penalty::Convex(ConvexReg::L1),
        PenaltyChoice::Group { group_size } => Penalty::Convex(groups(group_size, p)?),
        PenaltyChoice::Scad { zeta } => Penalty::Scad(NonconvexReg::scad(lambda, zeta)?),
        PenaltyChoice::ElasticL1 => Penalty::Elastic(ConvexReg::L1),
        PenaltyChoice::ElasticGroup { group_size } => Penalty::Elastic(groups(group_size, p)?),
    };
    let base = match cfg.loss {
        LossChoice::Squared => LossModel::squared(),
        LossChoice::Logistic => LossModel::logistic(),
    };
    let gamma = cfg.correction.unwrap_or(gen_gamma);
    let loss = if gamma > 0.0 {
        base.with_correction(gamma)?
    } else {
        base
    };
    let mut spec = ProblemSpec::new(Arc::new(data), loss, penalty, lambda)?;
    if let Some(rho) = cfg.radius {
        spec = spec.with_radius(rho)?;
    }
    let split = match cfg.mode {
        ModeChoice::Split => {
            let lt = cfg
                .lambda_tilde
                .ok_or_else(|| Error::Config("split mode needs lambda_tilde".into()))?;
            let lt = if cfg.sum_scaled { lt / n as f64 } else { lt };
            split(&spec, lt)?
        }
        ModeChoice::Direct => split_direct(&spec)?,
    };
    Ok(Instance {
        spec,
        split,
        lambda,
        w_star,
    })
}
