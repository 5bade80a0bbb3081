//! Named experiment definitions.
//!
//! `*-desk` presets are scaled to run in seconds; the others follow the
//! full-size synthetic and real-data settings and take much longer.
//! Real-data presets expect LIBSVM files under `data/`.

use crate::config::{
    ExperimentConfig, FamilyConfig, LambdaChoice, LambdaRule, LossChoice, ModeChoice,
    PenaltyChoice, ProblemSource, ReferencePolicy, SolverName, SolverSpec, StepChoice, StepRule,
    SynthConfig,
};
use crate::{Error, Result};

pub const PRESETS: [(&str, &str); 16] = [
    ("lasso-desk", "Lasso, n=400 p=800 s=20 b=0, λ from the noise bound, λ̃=0.25; SDCA at its theory step and Prox-GD"),
    ("lasso-desk-b01", "as lasso-desk with equicorrelation b=0.1"),
    ("lasso-desk-compare", "lasso-desk with SDCA, Prox-SVRG, SAGA and Prox-GD, steps tuned on the grid"),
    ("group-desk", "group Lasso, n=400 m=10 N_G=80 s_G=8, λ from the noise bound, λ̃=0.1; SDCA, Prox-SVRG, SAGA, Prox-GD tuned"),
    ("scad-desk", "SCAD, n=400 p=500 s=15 ζ=3.7 x~N(0,2I), λ=0.05, λ̃=0.1; SDCA and Prox-GD"),
    ("corrected-desk", "corrected Lasso, n=400 p=500 s=15 γ=0.05, λ=0.05, λ̃=0.1; SDCA and Prox-GD"),
    ("elastic-desk", "½||w||²+||w||₁ solved directly (no split), n=200 p=100, λ=0.2; SDCA at its theory step"),
    ("lasso-full", "Lasso, n=2500 p=5000 s=50 b=0, λ=0.05, λ̃=0.25; all six solvers"),
    ("lasso-full-b04", "Lasso, n=2500 p=5000 s=100 b=0.4, λ=0.05, λ̃=0.25; all six solvers"),
    ("group-full", "group Lasso, n=2500 m=10 N_G=500 s_G=10 b=0, λ from the noise bound, λ̃=0.1; all six solvers"),
    ("corrected-full", "corrected Lasso, n=2500 p=3000 s=50 γ=0.05, λ=0.05, λ̃=0.1; all six solvers"),
    ("scad-full", "SCAD, n=2500 p=5000 s=50 ζ=3.7, λ=0.05, λ̃=0.1; five solvers (RDA has no SCAD variant)"),
    ("scad-full-b", "SCAD, n=3000 p=2500 s=30 ζ=4.5, λ=0.05, λ̃=0.1; five solvers"),
    ("rcv1-logistic", "ℓ1 logistic regression on data/rcv1_train.binary(.gz), sum-scaled λ=2e-5, λ̃=0.002"),
    ("sido0-logistic", "ℓ1 logistic regression on data/sido0.libsvm(.gz), sum-scaled λ=1e-4, λ̃=0.001"),
    ("ijcnn1-lasso", "Lasso on data/ijcnn1(.gz), sum-scaled λ=0.02, λ̃=0.1"),
];

fn synth(family: FamilyConfig, n: usize, p: usize, s: usize, b: f64) -> ProblemSource {
    ProblemSource::Synthetic(SynthConfig {
        family,
        n,
        p,
        s,
        b,
        sigma: 1.0,
        seed: 1,
        normalize: false,
    })
}

fn solvers(list: &[(SolverName, StepChoice)]) -> Vec<SolverSpec> {
    list.iter().map(|&(k, s)| SolverSpec::new(k, s)).collect()
}

const THEORY: StepChoice = StepChoice::Rule(StepRule::Theory);
const TUNE: StepChoice = StepChoice::Rule(StepRule::Tune);

fn all_six(scad: bool) -> Vec<SolverSpec> {
    let mut v = vec![
        (SolverName::Sdca, TUNE),
        (SolverName::ProxSvrg, TUNE),
        (SolverName::Saga, TUNE),
        (SolverName::ProxSag, TUNE),
        (SolverName::ProxGd, TUNE),
        (SolverName::ProxSgd, TUNE),
    ];
    if !scad {
        v.push((SolverName::Rda, TUNE));
    }
    solvers(&v)
}

fn base(
    name: &str,
    problem: ProblemSource,
    penalty: PenaltyChoice,
    lambda: LambdaChoice,
    lambda_tilde: f64,
) -> ExperimentConfig {
    ExperimentConfig {
        name: name.into(),
        description: PRESETS.iter().find(|p| p.0 == name).map(|p| p.1.to_owned()),
        problem,
        loss: LossChoice::Squared,
        penalty,
        lambda,
        lambda_tilde: Some(lambda_tilde),
        mode: ModeChoice::Split,
        sum_scaled: false,
        correction: None,
        radius: None,
        solvers: Vec::new(),
        epochs: 300,
        seeds: vec![1],
        reference: ReferencePolicy::default(),
        potentials: false,
        output_dir: None,
    }
}

fn file(path: &str) -> ProblemSource {
    ProblemSource::File {
        path: path.into(),
        dim: None,
        normalize: false,
    }
}

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let auto = LambdaChoice::Rule(LambdaRule::Auto);
    let lasso = FamilyConfig::Lasso;
    let cfg = match name {
        "lasso-desk" | "lasso-desk-b01" | "lasso-desk-compare" => {
            let b = if name == "lasso-desk-b01" { 0.1 } else { 0.0 };
            let mut c = base(
                name,
                synth(lasso, 400, 800, 20, b),
                PenaltyChoice::L1,
                auto,
                0.25,
            );
            c.solvers = if name == "lasso-desk-compare" {
                solvers(&[
                    (SolverName::Sdca, TUNE),
                    (SolverName::ProxSvrg, TUNE),
                    (SolverName::Saga, TUNE),
                    (SolverName::ProxGd, THEORY),
                ])
            } else {
                solvers(&[(SolverName::Sdca, THEORY), (SolverName::ProxGd, THEORY)])
            };
            c
        }
        "group-desk" => {
            let fam = FamilyConfig::Group {
                group_size: 10,
                active_groups: 8,
            };
            let mut c = base(
                name,
                synth(fam, 400, 800, 0, 0.0),
                PenaltyChoice::Group { group_size: 10 },
                auto,
                0.1,
            );
            c.solvers = solvers(&[
                (SolverName::Sdca, TUNE),
                (SolverName::ProxSvrg, TUNE),
                (SolverName::Saga, TUNE),
                (SolverName::ProxGd, THEORY),
            ]);
            c
        }
        "scad-desk" => {
            let mut c = base(
                name,
                synth(FamilyConfig::Scad, 400, 500, 15, 0.0),
                PenaltyChoice::Scad { zeta: 3.7 },
                LambdaChoice::Value(0.05),
                0.1,
            );
            c.solvers = solvers(&[(SolverName::Sdca, TUNE), (SolverName::ProxGd, THEORY)]);
            c.epochs = 500;
            c
        }
        "corrected-desk" => {
            let fam = FamilyConfig::Corrected { gamma: 0.05 };
            let mut c = base(
                name,
                synth(fam, 400, 500, 15, 0.0),
                PenaltyChoice::L1,
                LambdaChoice::Value(0.05),
                0.1,
            );
            c.solvers = solvers(&[(SolverName::Sdca, TUNE), (SolverName::ProxGd, THEORY)]);
            c.epochs = 500;
            c
        }
        "elastic-desk" => {
            let mut c = base(
                name,
                synth(lasso, 200, 100, 10, 0.0),
                PenaltyChoice::ElasticL1,
                LambdaChoice::Value(0.2),
                0.2,
            );
            c.mode = ModeChoice::Direct;
            c.lambda_tilde = None;
            c.solvers = solvers(&[(SolverName::Sdca, THEORY), (SolverName::ProxGd, THEORY)]);
            c
        }
        "lasso-full" | "lasso-full-b04" => {
            let (s, b) = if name == "lasso-full" {
                (50, 0.0)
            } else {
                (100, 0.4)
            };
            let mut c = base(
                name,
                synth(lasso, 2500, 5000, s, b),
                PenaltyChoice::L1,
                LambdaChoice::Value(0.05),
                0.25,
            );
            c.solvers = all_six(false);
            c.epochs = 100;
            c
        }
        "group-full" => {
            let fam = FamilyConfig::Group {
                group_size: 10,
                active_groups: 10,
            };
            let mut c = base(
                name,
                synth(fam, 2500, 5000, 0, 0.0),
                PenaltyChoice::Group { group_size: 10 },
                auto,
                0.1,
            );
            c.solvers = all_six(false);
            c.epochs = 100;
            c
        }
        "corrected-full" => {
            let fam = FamilyConfig::Corrected { gamma: 0.05 };
            let mut c = base(
                name,
                synth(fam, 2500, 3000, 50, 0.0),
                PenaltyChoice::L1,
                LambdaChoice::Value(0.05),
                0.1,
            );
            c.solvers = all_six(false);
            c.epochs = 100;
            c
        }
        "scad-full" | "scad-full-b" => {
            let (n, p, s, zeta) = if name == "scad-full" {
                (2500, 5000, 50, 3.7)
            } else {
                (3000, 2500, 30, 4.5)
            };
            let mut c = base(
                name,
                synth(FamilyConfig::Scad, n, p, s, 0.0),
                PenaltyChoice::Scad { zeta },
                LambdaChoice::Value(0.05),
                0.1,
            );
            c.solvers = all_six(true);
            c.epochs = 100;
            c
        }
        "rcv1-logistic" | "sido0-logistic" => {
            let (path, lambda, lt) = if name == "rcv1-logistic" {
                ("data/rcv1_train.binary.gz", 2e-5, 0.002)
            } else {
                ("data/sido0.libsvm.gz", 1e-4, 0.001)
            };
            let mut c = base(
                name,
                file(path),
                PenaltyChoice::L1,
                LambdaChoice::Value(lambda),
                lt,
            );
            c.loss = LossChoice::Logistic;
            c.sum_scaled = true;
            c.solvers = all_six(false);
            c.epochs = 100;
            c
        }
        "ijcnn1-lasso" => {
            let mut c = base(
                name,
                file("data/ijcnn1.gz"),
                PenaltyChoice::L1,
                LambdaChoice::Value(0.02),
                0.1,
            );
            c.sum_scaled = true;
            c.solvers = all_six(false);
            c.epochs = 100;
            c
        }
        _ => return Err(Error::UnknownPreset(name.into())),
    };
    Ok(cfg)
}
