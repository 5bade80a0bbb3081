//! Reference solutions, potentials and empirical rate fits.

use crate::sdca::{aggregate, SdcaState};
use crate::splitting::{Composite, ProblemSpec, SplitProblem};
use crate::trace::Potentials;
use crate::{linalg, Error, Result, Scalar};

/// High-accuracy solution `ŵ` with its pseudo-duals `â_j = −∇φ_j(ŵ)` and
/// `v̂ = (1/(λ̃N))Σâ_j`. For nonconvex problems `ŵ` is the stationary point
/// reached by Prox-GD from zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Reference<T> {
    pub w: Vec<T>,
    pub v: Vec<T>,
    /// Scalar pseudo-duals of the loss components.
    pub alpha: Vec<T>,
    /// Pseudo-dual of the augmentation slot (empty in direct mode).
    pub aug: Vec<T>,
    /// `F(ŵ)`
    pub objective: T,
    /// `g̃*(v̂)`
    pub conjugate: T,
    /// Prox-gradient stationarity residual at `ŵ`.
    pub residual: T,
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReferenceOptions<T> {
    pub tol: T,
    pub max_iter: usize,
    /// Fail with [`Error::ReferenceQuality`] when `tol` is not reached.
    pub strict: bool,
}

impl<T: Scalar> Default for ReferenceOptions<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(1e-12),
            max_iter: 1_000_000,
            strict: true,
        }
    }
}

/// Prox-GD with step `1/L` until the stationarity residual is at most `1e-12`.
pub fn compute_reference<T: Scalar>(sp: &SplitProblem<T>) -> Result<Reference<T>> {
    compute_reference_with(sp, &ReferenceOptions::default())
}

pub fn compute_reference_with<T: Scalar>(
    sp: &SplitProblem<T>,
    opts: &ReferenceOptions<T>,
) -> Result<Reference<T>> {
    let spec = sp.spec();
    let (w, residual, iterations) = prox_gd_to_stationarity(spec, opts.tol, opts.max_iter)?;
    if opts.strict && !(residual <= opts.tol) {
        return Err(Error::ReferenceQuality {
            achieved: residual.to_f64_lossy(),
            target: opts.tol.to_f64_lossy(),
        });
    }
    reference_at(sp, w, residual, iterations)
}

/// Assembles the reference quantities at a given `ŵ`.
pub fn reference_at<T: Scalar>(
    sp: &SplitProblem<T>,
    w: Vec<T>,
    residual: T,
    iterations: usize,
) -> Result<Reference<T>> {
    let alpha: Vec<T> = (0..sp.n_samples())
        .map(|i| -sp.component_coeff(i, &w))
        .collect();
    let aug: Vec<T> = if sp.has_augmentation() {
        let k = sp.aug_coeff();
        w.iter().map(|&x| -k * x).collect()
    } else {
        Vec::new()
    };
    let v = aggregate(sp, &alpha, &aug);
    let conjugate = sp.composite().conjugate(&v)?;
    Ok(Reference {
        objective: sp.objective(&w),
        w,
        v,
        alpha,
        aug,
        conjugate,
        residual,
        iterations,
    })
}

/// Runs Prox-GD with step `1/L` from zero. Returns `(w, residual, iterations)`.
pub fn prox_gd_to_stationarity<T: Scalar>(
    spec: &ProblemSpec<T>,
    tol: T,
    max_iter: usize,
) -> Result<(Vec<T>, T, usize)> {
    let lip = spec
        .smooth_lipschitz()
        .max(spec.loss.correction() * T::lit(1.01));
    if !(lip > T::zero()) {
        return Err(Error::Invalid(
            "smooth part has zero curvature; no finite step".into(),
        ));
    }
    let step = T::one() / lip;
    let p = spec.p();
    let mut w = vec![T::zero(); p];
    let mut u = vec![T::zero(); p];
    let mut next = vec![T::zero(); p];
    for it in 0..max_iter {
        let g = spec.smooth_gradient(&w);
        for ((uj, &wj), &gj) in u.iter_mut().zip(&w).zip(&g) {
            *uj = wj - step * gj;
        }
        spec.prox_step_into(&u, step, &mut next)?;
        let residual = linalg::dist(&w, &next);
        std::mem::swap(&mut w, &mut next);
        if !residual.is_finite() {
            return Err(Error::Diverged {
                last_finite_epoch: it,
            });
        }
        if residual <= tol {
            // Residual measured at the previous iterate; report it at the returned one.
            let r = spec.stationarity_residual(&w, step)?;
            if r <= tol {
                return Ok((w, r, it + 1));
            }
        }
    }
    let r = spec.stationarity_residual(&w, step)?;
    Ok((w, r, max_iter))
}

/// `g̃*(v) = ⟨w̄, v⟩ − g̃(w̄)` with `w̄ = ∇g̃*(v)`.
pub fn conjugate_value<T: Scalar>(g: &Composite<T>, v: &[T]) -> Result<T> {
    g.conjugate(v)
}

/// `A = Σ_j (1/Q_j)||a_j − â_j||²`, `B = 2(g̃*(v) − ⟨ŵ, v − v̂⟩ − g̃*(v̂))`,
/// `C = (η/N²)A + (λ̃/2)B`.
pub fn potentials<T: Scalar>(
    sp: &SplitProblem<T>,
    state: &SdcaState<T>,
    r: &Reference<T>,
) -> Result<Potentials<T>> {
    potentials_from(sp, state.alpha(), state.aug(), state.v(), r)
}

pub fn potentials_from<T: Scalar>(
    sp: &SplitProblem<T>,
    alpha: &[T],
    aug: &[T],
    v: &[T],
    r: &Reference<T>,
) -> Result<Potentials<T>> {
    let q = sp.probs();
    let d = sp.data();
    let mut a = T::zero();
    for i in 0..sp.n_samples() {
        let diff = alpha[i] - r.alpha[i];
        a += diff * diff * d.row(i).sq_norm() / q[i];
    }
    if sp.has_augmentation() {
        let dist2: T = aug
            .iter()
            .zip(&r.aug)
            .map(|(&x, &y)| (x - y) * (x - y))
            .sum();
        a += dist2 / q[sp.n_samples()];
    }
    let conj = sp.composite().conjugate(v)?;
    let cross: T =
        r.w.iter()
            .zip(v.iter().zip(&r.v))
            .map(|(&w, (&x, &y))| w * (x - y))
            .sum();
    let b = T::lit(2.0) * (conj - cross - r.conjugate);
    let big_n = T::from_usize_lossy(sp.n_components());
    let c = sp.step() / (big_n * big_n) * a + sp.lambda_tilde() / T::lit(2.0) * b;
    Ok(Potentials { a, b, c })
}

pub fn objective_gap<T: Scalar>(spec: &ProblemSpec<T>, w: &[T], r: &Reference<T>) -> T {
    spec.objective(w) - r.objective
}

/// Default fitting floor `max(1e-12, 3·residual)`.
pub fn default_floor<T: Scalar>(r: &Reference<T>) -> T {
    T::lit(1e-12).max(T::lit(3.0) * r.residual)
}

/// Least-squares fit of `ln(value)` against epoch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateFit {
    /// `exp(slope)`: contraction factor per epoch.
    pub rate: f64,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
    /// `log10(max/min)` of the fitted values.
    pub decades: f64,
}

const MIN_FIT_POINTS: usize = 5;

/// Fits over all points with `value > floor`.
pub fn fit_linear_rate<T: Scalar>(epochs: &[usize], values: &[T], floor: T) -> Result<RateFit> {
    fit_linear_rate_window(epochs, values, floor, T::infinity())
}

/// Fits over the points with `lo < value ≤ hi`.
pub fn fit_linear_rate_window<T: Scalar>(
    epochs: &[usize],
    values: &[T],
    lo: T,
    hi: T,
) -> Result<RateFit> {
    assert_eq!(
        epochs.len(),
        values.len(),
        "epochs and values differ in length"
    );
    let pts: Vec<(f64, f64)> = epochs
        .iter()
        .zip(values)
        .filter(|(_, &v)| v > lo && v <= hi && v > T::zero() && v.is_finite())
        .map(|(&e, &v)| (e as f64, v.to_f64_lossy().ln()))
        .collect();
    fit_log_points(&pts)
}

fn fit_log_points(pts: &[(f64, f64)]) -> Result<RateFit> {
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData(format!(
            "{} points in the fitting window, need at least {MIN_FIT_POINTS}",
            pts.len()
        )));
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all points share one epoch".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let r_squared = if syy <= f64::EPSILON * m * (1.0 + my * my) {
        1.0
    } else {
        1.0 - sse / syy
    };
    let (ymin, ymax) = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| {
            (a.min(p.1), b.max(p.1))
        });
    Ok(RateFit {
        rate: slope.exp(),
        slope,
        intercept,
        r_squared,
        points: pts.len(),
        decades: (ymax - ymin) / std::f64::consts::LN_10,
    })
}
