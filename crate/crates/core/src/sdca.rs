//! Dual-free SDCA on a [`SplitProblem`].
//!
//! Each pseudo-dual `a_i` of a loss component stays in `span{x_i}` and is
//! stored as a scalar `α_i`; the augmentation slot is a dense vector.

use std::time::Instant;

use crate::diagnostics::{self, Reference};
use crate::rng::CounterRng;
use crate::splitting::SplitProblem;
use crate::trace::{EpochRecord, Trace};
use crate::{linalg, Error, Result, Scalar};

/// Starting pseudo-duals.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum InitPolicy<T> {
    /// `a_i = 0`, hence `v = 0`.
    #[default]
    Zero,
    /// `a_i = −∇φ_i(w0)`.
    Gradient(Vec<T>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdcaState<T> {
    alpha: Vec<T>,
    aug: Vec<T>,
    v: Vec<T>,
    w: Vec<T>,
    t: u64,
    rng: CounterRng,
}

impl<T: Scalar> SdcaState<T> {
    pub fn init(sp: &SplitProblem<T>, policy: &InitPolicy<T>, seed: u64) -> Result<Self> {
        let n = sp.n_samples();
        let p = sp.data().p();
        let aug_len = if sp.has_augmentation() { p } else { 0 };
        let (alpha, aug) = match policy {
            InitPolicy::Zero => (vec![T::zero(); n], vec![T::zero(); aug_len]),
            InitPolicy::Gradient(w0) => {
                if w0.len() != p {
                    return Err(Error::Invalid(format!(
                        "initial point has dimension {}, expected {p}",
                        w0.len()
                    )));
                }
                let alpha = (0..n).map(|i| -sp.component_coeff(i, w0)).collect();
                let k = sp.aug_coeff();
                let aug = if aug_len > 0 {
                    w0.iter().map(|&x| -k * x).collect()
                } else {
                    Vec::new()
                };
                (alpha, aug)
            }
        };
        let v = aggregate(sp, &alpha, &aug);
        let w = sp.composite().prox(&v)?;
        Ok(Self {
            alpha,
            aug,
            v,
            w,
            t: 0,
            rng: CounterRng::new(seed),
        })
    }

    /// Scalar coefficients `α_i` (`a_i = α_i·x_i`).
    pub fn alpha(&self) -> &[T] {
        &self.alpha
    }

    /// Pseudo-dual of the augmentation slot (empty in direct mode).
    pub fn aug(&self) -> &[T] {
        &self.aug
    }

    pub fn v(&self) -> &[T] {
        &self.v
    }

    pub fn w(&self) -> &[T] {
        &self.w
    }

    /// Steps taken so far.
    pub fn iterations(&self) -> u64 {
        self.t
    }

    /// Dense `a_i` for any slot.
    pub fn dual(&self, sp: &SplitProblem<T>, i: usize) -> Vec<T> {
        if i < sp.n_samples() {
            let mut out = vec![T::zero(); self.w.len()];
            sp.data().row(i).axpy_into(self.alpha[i], &mut out);
            out
        } else {
            self.aug.clone()
        }
    }

    /// One stochastic update.
    pub fn step(&mut self, sp: &SplitProblem<T>) -> Result<()> {
        let i = sp.sampler().sample(&mut self.rng);
        let big_n = T::from_usize_lossy(sp.n_components());
        let eta_i = sp.step() / (sp.probs()[i] * big_n);
        let beta = eta_i * sp.lambda_tilde() * big_n;
        let composite = sp.composite();
        if i < sp.n_samples() {
            let row = sp.data().row(i);
            let c = sp.component_coeff_at(i, row.dot(&self.w));
            let r = c + self.alpha[i];
            self.alpha[i] -= beta * r;
            row.axpy_into(-eta_i * r, &mut self.v);
            match row.support() {
                Some(coords) if composite.is_local() => {
                    composite.prox_coords(&self.v, coords, &mut self.w)
                }
                _ => composite.prox_into(&self.v, &mut self.w)?,
            }
        } else {
            let k = sp.aug_coeff();
            for ((a, v), &w) in self.aug.iter_mut().zip(self.v.iter_mut()).zip(&self.w) {
                let r = k * w + *a;
                *a -= beta * r;
                *v -= eta_i * r;
            }
            composite.prox_into(&self.v, &mut self.w)?;
        }
        self.t += 1;
        Ok(())
    }

    /// `max_j |v_j − (1/(λ̃N))Σ_i a_{i,j}|`.
    pub fn invariant_residual(&self, sp: &SplitProblem<T>) -> T {
        let agg = aggregate(sp, &self.alpha, &self.aug);
        self.v
            .iter()
            .zip(&agg)
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }

    /// Whether the aggregate identity holds within `1e-9·(1 + ||v||)`.
    pub fn invariant_holds(&self, sp: &SplitProblem<T>) -> bool {
        self.invariant_residual(sp) <= T::lit(1e-9) * (T::one() + linalg::norm(&self.v))
    }

    pub fn is_finite(&self) -> bool {
        linalg::all_finite(&self.v)
            && linalg::all_finite(&self.w)
            && linalg::all_finite(&self.alpha)
    }
}

/// `(1/(λ̃N))(Σ α_i x_i + aug)`.
pub(crate) fn aggregate<T: Scalar>(sp: &SplitProblem<T>, alpha: &[T], aug: &[T]) -> Vec<T> {
    let mut v = sp.data().combine(alpha);
    for (vj, &a) in v.iter_mut().zip(aug) {
        *vj += a;
    }
    let s = T::one() / (sp.lambda_tilde() * T::from_usize_lossy(sp.n_components()));
    linalg::scale(s, &mut v);
    v
}

/// Solver options.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig<T> {
    /// Maximum number of epochs (`N` steps each); must be at least 1.
    pub epochs: usize,
    pub seed: u64,
    pub init: InitPolicy<T>,
    /// Stop once `F(w) − F̂` drops to this level (needs a reference).
    pub gap_tol: Option<T>,
    /// Record `A_t`, `B_t`, `C_t` (needs a reference).
    pub potentials: bool,
}

impl<T: Scalar> RunConfig<T> {
    pub fn new(epochs: usize, seed: u64) -> Self {
        Self {
            epochs,
            seed,
            init: InitPolicy::Zero,
            gap_tol: None,
            potentials: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOutput<T> {
    pub w: Vec<T>,
    pub trace: Trace<T>,
    pub state: SdcaState<T>,
}

pub fn run<T: Scalar>(
    sp: &SplitProblem<T>,
    cfg: &RunConfig<T>,
    reference: Option<&Reference<T>>,
) -> Result<RunOutput<T>> {
    run_with(sp, cfg, reference, |_, _| {})
}

/// Like [`run`], calling `on_epoch` after every recorded epoch (including epoch 0).
pub fn run_with<T: Scalar>(
    sp: &SplitProblem<T>,
    cfg: &RunConfig<T>,
    reference: Option<&Reference<T>>,
    mut on_epoch: impl FnMut(&SdcaState<T>, &EpochRecord<T>),
) -> Result<RunOutput<T>> {
    if cfg.epochs == 0 {
        return Err(Error::Invalid("epochs must be at least 1".into()));
    }
    if (cfg.gap_tol.is_some() || cfg.potentials) && reference.is_none() {
        return Err(Error::Misuse(
            "gap tolerance and potentials need a reference".into(),
        ));
    }
    let start = Instant::now();
    let mut state = SdcaState::init(sp, &cfg.init, cfg.seed)?;
    let mut trace = Trace::new();
    let steps = sp.n_components();
    for epoch in 0..=cfg.epochs {
        if epoch > 0 {
            for _ in 0..steps {
                state.step(sp)?;
            }
        }
        let objective = sp.objective(&state.w);
        if !state.is_finite() || !objective.is_finite() {
            return Err(Error::Diverged {
                last_finite_epoch: epoch.saturating_sub(1),
            });
        }
        let gap = reference.map(|r| objective - r.objective);
        let potentials = match (cfg.potentials, reference) {
            (true, Some(r)) => Some(diagnostics::potentials(sp, &state, r)?),
            _ => None,
        };
        let record = EpochRecord {
            epoch,
            objective,
            gap,
            potentials,
            elapsed_secs: start.elapsed().as_secs_f64(),
        };
        on_epoch(&state, &record);
        trace.push(record)?;
        if let (Some(tol), Some(g)) = (cfg.gap_tol, gap) {
            if g <= tol {
                break;
            }
        }
    }
    Ok(RunOutput {
        w: state.w.clone(),
        trace,
        state,
    })
}
