//! Comparison solvers on the original objective `(1/n)Σf_i + penalty`.
//!
//! Stochastic methods sample uniformly. A trace record is taken every `n`
//! component-gradient evaluations; a full gradient costs `n`.

use std::time::Instant;

use crate::rng::CounterRng;
use crate::splitting::ProblemSpec;
use crate::trace::{EpochRecord, Trace};
use crate::{linalg, Error, Result, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SolverKind {
    ProxGd,
    /// Step `η₀/√k`.
    ProxSgd,
    /// Regularized dual averaging with `β_k = β₀√k`.
    Rda,
    ProxSvrg,
    Saga,
    ProxSag,
}

impl SolverKind {
    pub const ALL: [SolverKind; 6] = [
        SolverKind::ProxGd,
        SolverKind::ProxSgd,
        SolverKind::Rda,
        SolverKind::ProxSvrg,
        SolverKind::Saga,
        SolverKind::ProxSag,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::ProxGd => "prox-gd",
            SolverKind::ProxSgd => "prox-sgd",
            SolverKind::Rda => "rda",
            SolverKind::ProxSvrg => "prox-svrg",
            SolverKind::Saga => "saga",
            SolverKind::ProxSag => "prox-sag",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BaselineConfig<T> {
    pub kind: SolverKind,
    /// Fixed `η` (GD, SVRG, SAGA, SAG), `η₀` (SGD) or `β₀` (RDA).
    pub step: T,
    /// Inner loop length of SVRG; `None` means `2n`.
    pub inner_len: Option<usize>,
    pub epochs: usize,
    pub seed: u64,
}

impl<T: Scalar> BaselineConfig<T> {
    pub fn new(kind: SolverKind, step: T, epochs: usize, seed: u64) -> Self {
        Self {
            kind,
            step,
            inner_len: None,
            epochs,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > T::zero()) || !self.step.is_finite() {
            return Err(Error::Invalid(format!(
                "step parameter must be positive, got {}",
                self.step
            )));
        }
        if self.inner_len == Some(0) {
            return Err(Error::Invalid(
                "inner loop length must be at least 1".into(),
            ));
        }
        if self.epochs == 0 {
            return Err(Error::Invalid("epochs must be at least 1".into()));
        }
        Ok(())
    }
}

/// The tuning grid `{2/2^k : k = 0..12}`.
pub fn step_grid<T: Scalar>() -> Vec<T> {
    (0..=12)
        .map(|k| T::lit(2.0 / f64::from(1u32 << k)))
        .collect()
}

/// `||w − prox(w − step·∇f(w))||₂`.
pub fn stationarity_residual<T: Scalar>(spec: &ProblemSpec<T>, w: &[T], step: T) -> Result<T> {
    spec.stationarity_residual(w, step)
}

#[derive(Clone, Debug)]
pub struct BaselineOutput<T> {
    pub w: Vec<T>,
    pub trace: Trace<T>,
}

/// Runs one baseline; `f_hat` fills the gap column.
pub fn run_baseline<T: Scalar>(
    spec: &ProblemSpec<T>,
    cfg: &BaselineConfig<T>,
    f_hat: Option<T>,
) -> Result<BaselineOutput<T>> {
    cfg.validate()?;
    match cfg.kind {
        SolverKind::ProxGd => prox_gd_run(spec, cfg, f_hat),
        SolverKind::ProxSgd => prox_sgd_run(spec, cfg, f_hat),
        SolverKind::Rda => rda_run(spec, cfg, f_hat),
        SolverKind::ProxSvrg => prox_svrg_run(spec, cfg, f_hat),
        SolverKind::Saga => saga_run(spec, cfg, f_hat),
        SolverKind::ProxSag => prox_sag_run(spec, cfg, f_hat),
    }
}

/// Counts component evaluations and records at every multiple of `n`.
struct Recorder<'a, T> {
    spec: &'a ProblemSpec<T>,
    f_hat: Option<T>,
    n: usize,
    evals: usize,
    target_epochs: usize,
    trace: Trace<T>,
    start: Instant,
}

impl<'a, T: Scalar> Recorder<'a, T> {
    fn new(spec: &'a ProblemSpec<T>, f_hat: Option<T>, epochs: usize, w0: &[T]) -> Result<Self> {
        let mut r = Self {
            spec,
            f_hat,
            n: spec.n(),
            evals: 0,
            target_epochs: epochs,
            trace: Trace::new(),
            start: Instant::now(),
        };
        r.record(0, w0)?;
        Ok(r)
    }

    fn record(&mut self, epoch: usize, w: &[T]) -> Result<()> {
        let objective = self.spec.objective(w);
        if !objective.is_finite() || !linalg::all_finite(w) {
            return Err(Error::Diverged {
                last_finite_epoch: epoch.saturating_sub(1),
            });
        }
        self.trace.push(EpochRecord {
            epoch,
            objective,
            gap: self.f_hat.map(|f| objective - f),
            potentials: None,
            elapsed_secs: self.start.elapsed().as_secs_f64(),
        })
    }

    /// Adds `k` evaluations; records if an epoch boundary was reached.
    fn tick(&mut self, k: usize, w: &[T]) -> Result<()> {
        let before = self.evals / self.n;
        self.evals += k;
        let after = self.evals / self.n;
        if after > before && before < self.target_epochs {
            self.record(after.min(self.target_epochs), w)?;
        }
        Ok(())
    }

    fn done(&self) -> bool {
        self.evals / self.n >= self.target_epochs
    }
}

/// `w ← prox(w − η∇f(w), η)`; one pass per iteration.
pub fn prox_gd_run<T: Scalar>(
    spec: &ProblemSpec<T>,
    cfg: &BaselineConfig<T>,
    f_hat: Option<T>,
) -> Result<BaselineOutput<T>> {
    cfg.validate()?;
    let p = spec.p();
    let eta = cfg.step;
    let mut w = vec![T::zero(); p];
    let mut u = vec![T::zero(); p];
    let mut rec = Recorder::new(spec, f_hat, cfg.epochs, &w)?;
    while !rec.done() {
        let g = spec.smooth_gradient(&w);
        for ((uj, &wj), &gj) in u.iter_mut().zip(&w).zip(&g) {
            *uj = wj - eta * gj;
        }
        spec.prox_step_into(&u, eta, &mut w)?;
        rec.tick(rec.n, &w)?;
    }
    Ok(BaselineOutput {
        w,
        trace: rec.trace,
    })
}

/// Stochastic gradient of the smooth part: `c_i(w)x_i − γw`, written into `g`.
fn stochastic_gradient<T: Scalar>(spec: &ProblemSpec<T>, i: usize, w: &[T], g: &mut [T]) {
    let gamma = spec.loss.correction();
    for (gj, &wj) in g.iter_mut().zip(w) {
        *gj = -gamma * wj;
    }
    let c = spec.loss.grad_coeff(spec.data(), i, w);
    spec.data().row(i).axpy_into(c, g);
}

pub fn prox_sgd_run<T: Scalar>(
    spec: &ProblemSpec<T>,
    cfg: &BaselineConfig<T>,
    f_hat: Option<T>,
) -> Result<BaselineOutput<T>> {
    cfg.validate()?;
    let p = spec.p();
    let mut rng = CounterRng::new(cfg.seed);
    let mut w = vec![T::zero(); p];
    let mut g = vec![T::zero(); p];
    let mut u = vec![T::zero(); p];
    let mut rec = Recorder::new(spec, f_hat, cfg.epochs, &w)?;
    let mut k = 0usize;
    while !rec.done() {
        k += 1;
        let eta = cfg.step / T::from_usize_lossy(k).sqrt();
        let i = rng.below(spec.n());
        stochastic_gradient(spec, i, &w, &mut g);
        for ((uj, &wj), &gj) in u.iter_mut().zip(&w).zip(&g) {
            *uj = wj - eta * gj;
        }
        spec.prox_step_into(&u, eta, &mut w)?;
        rec.tick(1, &w)?;
    }
    Ok(BaselineOutput {
        w,
        trace: rec.trace,
    })
}

/// `w_{k+1} = argmin ⟨ḡ_k, w⟩ + penalty(w) + (β_k/(2k))||w||²`.
pub fn rda_run<T: Scalar>(
    spec: &ProblemSpec<T>,
    cfg: &BaselineConfig<T>,
    f_hat: Option<T>,
) -> Result<BaselineOutput<T>> {
    cfg.validate()?;
    if !spec.penalty.is_convex() {
        return Err(Error::Unsupported(
            "RDA is only implemented for convex penalties (ℓ1, group, elastic)".into(),
        ));
    }
    let p = spec.p();
    let mut rng = CounterRng::new(cfg.seed);
    let mut w = vec![T::zero(); p];
    let mut g = vec![T::zero(); p];
    let mut gbar = vec![T::zero(); p];
    let mut u = vec![T::zero(); p];
    let mut rec = Recorder::new(spec, f_hat, cfg.epochs, &w)?;
    let mut k = 0usize;
    while !rec.done() {
        k += 1;
        let kk = T::from_usize_lossy(k);
        let i = rng.below(spec.n());
        stochastic_gradient(spec, i, &w, &mut g);
        for (b, &gj) in gbar.iter_mut().zip(&g) {
            *b += (gj - *b) / kk;
        }
        let t = kk / (cfg.step * kk.sqrt());
        for (uj, &b) in u.iter_mut().zip(&gbar) {
            *uj = -t * b;
        }
        spec.prox_step_into(&u, t, &mut w)?;
        rec.tick(1, &w)?;
    }
    Ok(BaselineOutput {
        w,
        trace: rec.trace,
    })
}

/// Snapshot = last inner iterate; the full gradient costs one pass.
pub fn prox_svrg_run<T: Scalar>(
    spec: &ProblemSpec<T>,
    cfg: &BaselineConfig<T>,
    f_hat: Option<T>,
) -> Result<BaselineOutput<T>> {
    cfg.validate()?;
    let p = spec.p();
    let n = spec.n();
    let d = spec.data();
    let m = cfg.inner_len.unwrap_or(2 * n);
    let eta = cfg.step;
    let gamma = spec.loss.correction();
    let mut rng = CounterRng::new(cfg.seed);
    let mut w = vec![T::zero(); p];
    let mut u = vec![T::zero(); p];
    let mut rec = Recorder::new(spec, f_hat, cfg.epochs, &w)?;
    'outer: while !rec.done() {
        let snapshot = w.clone();
        let snap_coeffs: Vec<T> = (0..n)
            .map(|i| spec.loss.grad_coeff(d, i, &snapshot))
            .collect();
        let inv_n = T::one() / T::from_usize_lossy(n);
        let scaled: Vec<T> = snap_coeffs.iter().map(|&c| c * inv_n).collect();
        let mu = d.combine(&scaled);
        rec.tick(n, &w)?;
        for _ in 0..m {
            if rec.done() {
                break 'outer;
            }
            let i = rng.below(n);
            let row = d.row(i);
            let diff = spec.loss.grad_coeff(d, i, &w) - snap_coeffs[i];
            for ((uj, &wj), &mj) in u.iter_mut().zip(&w).zip(&mu) {
                *uj = wj - eta * (mj - gamma * wj);
            }
            row.axpy_into(-eta * diff, &mut u);
            spec.prox_step_into(&u, eta, &mut w)?;
            rec.tick(1, &w)?;
        }
    }
    Ok(BaselineOutput {
        w,
        trace: rec.trace,
    })
}

/// SAGA with a zero-initialized table of scalar gradient coefficients.
pub fn saga_run<T: Scalar>(
    spec: &ProblemSpec<T>,
    cfg: &BaselineConfig<T>,
    f_hat: Option<T>,
) -> Result<BaselineOutput<T>> {
    let (w, trace, _) = saga_like(spec, cfg, f_hat, false)?;
    Ok(BaselineOutput { w, trace })
}

/// Proximal SAG: the averaged table (after refreshing the sampled entry) is the search direction.
pub fn prox_sag_run<T: Scalar>(
    spec: &ProblemSpec<T>,
    cfg: &BaselineConfig<T>,
    f_hat: Option<T>,
) -> Result<BaselineOutput<T>> {
    let (w, trace, _) = saga_like(spec, cfg, f_hat, true)?;
    Ok(BaselineOutput { w, trace })
}

/// SAGA run that also returns the final gradient-coefficient table.
pub fn saga_run_with_table<T: Scalar>(
    spec: &ProblemSpec<T>,
    cfg: &BaselineConfig<T>,
    f_hat: Option<T>,
) -> Result<(BaselineOutput<T>, Vec<T>)> {
    let (w, trace, table) = saga_like(spec, cfg, f_hat, false)?;
    Ok((BaselineOutput { w, trace }, table))
}

fn saga_like<T: Scalar>(
    spec: &ProblemSpec<T>,
    cfg: &BaselineConfig<T>,
    f_hat: Option<T>,
    sag: bool,
) -> Result<(Vec<T>, Trace<T>, Vec<T>)> {
    cfg.validate()?;
    let p = spec.p();
    let n = spec.n();
    let d = spec.data();
    let nn = T::from_usize_lossy(n);
    let eta = cfg.step;
    let gamma = spec.loss.correction();
    let mut rng = CounterRng::new(cfg.seed);
    let mut table = vec![T::zero(); n];
    // (1/n)Σ table_i x_i
    let mut avg = vec![T::zero(); p];
    let mut w = vec![T::zero(); p];
    let mut u = vec![T::zero(); p];
    let mut rec = Recorder::new(spec, f_hat, cfg.epochs, &w)?;
    while !rec.done() {
        let i = rng.below(n);
        let row = d.row(i);
        let c = spec.loss.grad_coeff(d, i, &w);
        let delta = c - table[i];
        for ((uj, &wj), &aj) in u.iter_mut().zip(&w).zip(&avg) {
            *uj = wj - eta * (aj - gamma * wj);
        }
        if sag {
            row.axpy_into(-eta * delta / nn, &mut u);
        } else {
            row.axpy_into(-eta * delta, &mut u);
        }
        row.axpy_into(delta / nn, &mut avg);
        table[i] = c;
        spec.prox_step_into(&u, eta, &mut w)?;
        rec.tick(1, &w)?;
    }
    Ok((w, rec.trace, table))
}
