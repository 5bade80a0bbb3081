//! Problem specifications and their split reformulation.
//!
//! `F(w) = (1/n)Σf_i(w) + λg(w)` is rewritten as
//! `(1/N)Σφ_i(w) + λ̃·g̃(w)` with `N = n + 1`, `φ_i = ((n+1)/n)f_i`, a concave
//! augmentation `φ_{n+1}(w) = −((λ̃+μ)(n+1)/2)||w||²` and the 1-strongly convex
//! `g̃(w) = ½||w||² + (λ/λ̃)R(w)`. In direct mode (already strongly convex
//! `g`) the problem is used as is with `N = n`.

use std::sync::Arc;

use crate::data::Dataset;
use crate::losses::{full_objective, LossModel};
use crate::regularizers::{
    constrained_prox, dlambda_prox_scalar, ConvexReg, NonconvexReg, Penalty,
};
use crate::rng::DiscreteSampler;
use crate::{linalg, Error, Result, Scalar};

/// One regularized ERM instance.
#[derive(Clone, Debug)]
pub struct ProblemSpec<T> {
    pub loss: LossModel<T>,
    pub penalty: Penalty<T>,
    lambda: T,
    radius: T,
    data: Arc<Dataset<T>>,
}

impl<T: Scalar> ProblemSpec<T> {
    pub fn new(
        data: Arc<Dataset<T>>,
        loss: LossModel<T>,
        penalty: Penalty<T>,
        lambda: T,
    ) -> Result<Self> {
        if !(lambda > T::zero()) || !lambda.is_finite() {
            return Err(Error::Invalid(format!(
                "λ must be positive and finite, got {lambda}"
            )));
        }
        if data.n() == 0 {
            return Err(Error::Invalid("dataset has no samples".into()));
        }
        if let Penalty::Scad(r) = &penalty {
            if (r.lambda() - lambda).abs() > T::lit(1e-12) * lambda {
                return Err(Error::Invalid(format!(
                    "SCAD level {} differs from problem λ {lambda}",
                    r.lambda()
                )));
            }
        }
        if let Penalty::Convex(ConvexReg::Group(part)) | Penalty::Elastic(ConvexReg::Group(part)) =
            &penalty
        {
            if part.dim() != data.p() {
                return Err(Error::Invalid(format!(
                    "group partition covers {} features, dataset has {}",
                    part.dim(),
                    data.p()
                )));
            }
        }
        Ok(Self {
            loss,
            penalty,
            lambda,
            radius: T::infinity(),
            data,
        })
    }

    /// Restricts the domain to `{R(w) ≤ rho}`; `∞` (the default) disables it.
    pub fn with_radius(mut self, rho: T) -> Result<Self> {
        if !(rho > T::zero()) {
            return Err(Error::Invalid(format!(
                "radius must be positive, got {rho}"
            )));
        }
        self.radius = rho;
        Ok(self)
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn data(&self) -> &Dataset<T> {
        &self.data
    }

    pub fn data_arc(&self) -> &Arc<Dataset<T>> {
        &self.data
    }

    pub fn n(&self) -> usize {
        self.data.n()
    }

    pub fn p(&self) -> usize {
        self.data.p()
    }

    /// True for SCAD penalties and corrected losses.
    pub fn is_nonconvex(&self) -> bool {
        !self.penalty.is_convex() || self.loss.correction() > T::zero()
    }

    pub fn objective(&self, w: &[T]) -> T {
        full_objective(&self.loss, &self.data, w, &self.penalty, self.lambda)
    }

    /// Gradient of the smooth part `(1/n)Σf_i − (γ_ς/2)||·||²`.
    pub fn smooth_gradient(&self, w: &[T]) -> Vec<T> {
        self.loss.smooth_gradient(&self.data, w)
    }

    /// `argmin_w ½||w − u||² + step·penalty(w)` (within the radius).
    pub fn prox_step_into(&self, u: &[T], step: T, out: &mut [T]) -> Result<()> {
        self.penalty
            .prox_step_into(u, step, self.lambda, self.radius, out)
    }

    pub fn prox_step(&self, u: &[T], step: T) -> Result<Vec<T>> {
        let mut out = vec![T::zero(); u.len()];
        self.prox_step_into(u, step, &mut out)?;
        Ok(out)
    }

    /// `||w − prox_step(w − step·∇f(w), step)||₂`, zero exactly at stationary points.
    pub fn stationarity_residual(&self, w: &[T], step: T) -> Result<T> {
        let g = self.smooth_gradient(w);
        let u: Vec<T> = w.iter().zip(&g).map(|(&wi, &gi)| wi - step * gi).collect();
        let next = self.prox_step(&u, step)?;
        Ok(linalg::dist(w, &next))
    }

    pub fn smoothness(&self) -> Vec<T> {
        self.loss.smoothness_all(&self.data)
    }

    /// `L̄ = (1/n)Σ L_i`
    pub fn mean_smoothness(&self) -> T {
        let l = self.smoothness();
        l.iter().copied().sum::<T>() / T::from_usize_lossy(l.len())
    }

    /// Upper estimate of the Lipschitz constant of the smooth gradient:
    /// curvature bound times the top eigenvalue of `XᵀX/n` (power iteration,
    /// inflated by 1% to absorb its underestimate).
    pub fn smooth_lipschitz(&self) -> T {
        self.loss.curvature_bound() * top_gram_eigenvalue(&self.data) * T::lit(1.01)
    }
}

/// Largest eigenvalue of `XᵀX/n` by power iteration from a fixed start.
pub fn top_gram_eigenvalue<T: Scalar>(d: &Dataset<T>) -> T {
    let p = d.p();
    if p == 0 || d.n() == 0 {
        return T::zero();
    }
    let inv_n = T::one() / T::from_usize_lossy(d.n());
    // Slightly non-uniform start so it is not orthogonal to structured eigenvectors.
    let mut x: Vec<T> = (0..p)
        .map(|j| T::one() + T::lit(0.01) * T::from_usize_lossy(j % 7))
        .collect();
    let nx = linalg::norm(&x);
    linalg::scale(T::one() / nx, &mut x);
    let mut estimate = T::zero();
    for _ in 0..500 {
        let margins = d.margins(&x);
        let scaled: Vec<T> = margins.iter().map(|&m| m * inv_n).collect();
        let mut y = d.combine(&scaled);
        let ny = linalg::norm(&y);
        if ny.is_zero() {
            return T::zero();
        }
        let prev = estimate;
        estimate = ny;
        linalg::scale(T::one() / ny, &mut y);
        x = y;
        if (estimate - prev).abs() <= T::lit(1e-9) * estimate {
            break;
        }
    }
    estimate
}

/// Base term `R` of the composite `g̃(w) = (s/2)||w||² + κ·R(w)`.
#[derive(Clone, Debug, PartialEq)]
pub enum BaseReg<T> {
    Convex(ConvexReg),
    /// Convexified SCAD `d_λ`.
    Dlambda(NonconvexReg<T>),
}

impl<T: Scalar> BaseReg<T> {
    pub fn value(&self, w: &[T]) -> T {
        match self {
            BaseReg::Convex(g) => g.value(w),
            BaseReg::Dlambda(r) => r.dlambda_value(w),
        }
    }

    fn prox_into(&self, v: &[T], c: T, out: &mut [T]) {
        match self {
            BaseReg::Convex(g) => g.prox_into(v, c, out),
            BaseReg::Dlambda(r) => {
                for (o, &x) in out.iter_mut().zip(v) {
                    *o = dlambda_prox_scalar(x, c, r.lambda(), r.zeta());
                }
            }
        }
    }

    /// Weight at which the prox of `v` is exactly zero.
    fn zero_threshold(&self, v: &[T]) -> T {
        match self {
            BaseReg::Convex(g) => g.dual_norm(v),
            // d_λ has slope 1 at 0⁺.
            BaseReg::Dlambda(_) => linalg::max_abs(v),
        }
    }
}

/// The strongly convex composite `g̃(w) = (s/2)||w||² + κ·R(w)` on `{R(w) ≤ ρ}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Composite<T> {
    pub base: BaseReg<T>,
    /// κ
    pub weight: T,
    /// s ≥ 1
    pub quad: T,
    pub radius: T,
}

impl<T: Scalar> Composite<T> {
    pub fn value(&self, w: &[T]) -> T {
        self.quad * linalg::sq_norm(w) / T::lit(2.0) + self.weight * self.base.value(w)
    }

    /// `w = argmax_w ⟨w, v⟩ − g̃(w) = prox_{(κ/s)R}(v/s)`, i.e. `∇g̃*(v)`.
    pub fn prox_into(&self, v: &[T], out: &mut [T]) -> Result<()> {
        let c = self.weight / self.quad;
        if self.quad == T::one() {
            self.prox_scaled(v, c, out)
        } else {
            let scaled: Vec<T> = v.iter().map(|&x| x / self.quad).collect();
            self.prox_scaled(&scaled, c, out)
        }
    }

    pub fn prox(&self, v: &[T]) -> Result<Vec<T>> {
        let mut out = vec![T::zero(); v.len()];
        self.prox_into(v, &mut out)?;
        Ok(out)
    }

    fn prox_scaled(&self, u: &[T], c: T, out: &mut [T]) -> Result<()> {
        if self.radius.is_infinite() {
            self.base.prox_into(u, c, out);
            Ok(())
        } else {
            constrained_prox(
                u,
                c,
                self.radius,
                self.base.zero_threshold(u),
                |x, t, o| self.base.prox_into(x, t, o),
                |w| self.base.value(w),
                out,
            )
        }
    }

    /// True when a change of `v` on some coordinates only affects `w` there
    /// (or on their groups).
    pub fn is_local(&self) -> bool {
        self.radius.is_infinite()
    }

    /// Recomputes `out` on the coordinates (groups) in `coords`. Requires [`is_local`](Self::is_local).
    pub fn prox_coords(&self, v: &[T], coords: &[usize], out: &mut [T]) {
        debug_assert!(self.is_local());
        let c = self.weight / self.quad;
        let s = self.quad;
        match &self.base {
            BaseReg::Convex(ConvexReg::L1) => {
                for &j in coords {
                    out[j] = crate::regularizers::soft_threshold(v[j] / s, c);
                }
            }
            BaseReg::Convex(g @ ConvexReg::Group(_)) => {
                if s == T::one() {
                    g.prox_coords(v, c, coords, out);
                } else {
                    let scaled: Vec<T> = v.iter().map(|&x| x / s).collect();
                    g.prox_coords(&scaled, c, coords, out);
                }
            }
            BaseReg::Dlambda(r) => {
                for &j in coords {
                    out[j] = dlambda_prox_scalar(v[j] / s, c, r.lambda(), r.zeta());
                }
            }
        }
    }

    /// `g̃*(v) = ⟨w̄, v⟩ − g̃(w̄)` with `w̄ = ∇g̃*(v)`.
    pub fn conjugate(&self, v: &[T]) -> Result<T> {
        let w = self.prox(v)?;
        Ok(linalg::dot(&w, v) - self.value(&w))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// `N = n + 1` with the concave augmentation component.
    Split,
    /// `N = n`, the original problem with a 1-strongly convex `g`.
    Direct,
}

/// The reformulated problem consumed by the SDCA solver.
#[derive(Clone, Debug)]
pub struct SplitProblem<T> {
    spec: ProblemSpec<T>,
    mode: Mode,
    n_components: usize,
    loss_scale: T,
    lambda_tilde: T,
    mu: T,
    composite: Composite<T>,
    smoothness: Vec<T>,
    probs: Vec<T>,
    sampler: DiscreteSampler,
    step: T,
    mean_loss_smoothness: T,
    warnings: Vec<String>,
}

/// `Q_i = (L̃_i + L̄)/(2N·L̄)`. All-zero input yields the uniform distribution
/// together with a warning.
pub fn sampling_distribution<T: Scalar>(smoothness: &[T]) -> (Vec<T>, Option<String>) {
    let n = smoothness.len();
    assert!(n > 0, "empty smoothness list");
    assert!(
        smoothness.iter().all(|&l| l >= T::zero()),
        "smoothness must be nonnegative"
    );
    let nn = T::from_usize_lossy(n);
    let mean = smoothness.iter().copied().sum::<T>() / nn;
    if mean.is_zero() {
        return (
            vec![T::one() / nn; n],
            Some("all smoothness constants are zero; using uniform sampling".into()),
        );
    }
    let denom = T::lit(2.0) * nn * mean;
    (
        smoothness.iter().map(|&l| (l + mean) / denom).collect(),
        None,
    )
}

/// Largest step with the convergence guarantee of the split method:
/// `min{1/(16(λ̃ + L̄)), 1/(4λ̃N)}`. `λ̃` is floored at `1e-12`.
pub fn max_step_size<T: Scalar>(lambda_tilde: T, mean_smoothness: T, n_components: usize) -> T {
    let lt = lambda_tilde.max(T::lit(1e-12));
    let a = T::one() / (T::lit(16.0) * (lt + mean_smoothness));
    let b = T::one() / (T::lit(4.0) * lt * T::from_usize_lossy(n_components));
    a.min(b)
}

/// Step bound for direct mode with convex losses: `min{1/(4L̄), 1/(4λn)}`.
pub fn direct_max_step_size<T: Scalar>(lambda: T, mean_smoothness: T, n: usize) -> T {
    let a = T::one() / (T::lit(4.0) * mean_smoothness);
    let b = T::one() / (T::lit(4.0) * lambda * T::from_usize_lossy(n));
    a.min(b)
}

/// Model family for [`recommend_lambda`]. `ln` is the natural logarithm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LambdaModel<T> {
    /// `6σ√(ln p / n)`
    Lasso { sigma: T, p: usize, n: usize },
    /// `4σ(√(m/n) + √(ln N_G / n))`
    Group {
        sigma: T,
        group_size: usize,
        n_groups: usize,
        n: usize,
    },
    /// `12σ√(ln p / n)`
    Scad { sigma: T, p: usize, n: usize },
}

/// Noise-driven lower bound on λ for each model family.
///
/// The radius-dependent branch of the bounds carries an unspecified universal
/// constant and is not included.
pub fn recommend_lambda<T: Scalar>(model: LambdaModel<T>) -> T {
    let f = T::from_usize_lossy;
    match model {
        LambdaModel::Lasso { sigma, p, n } => T::lit(6.0) * sigma * (f(p).ln() / f(n)).sqrt(),
        LambdaModel::Group {
            sigma,
            group_size,
            n_groups,
            n,
        } => {
            T::lit(4.0) * sigma * ((f(group_size) / f(n)).sqrt() + (f(n_groups).ln() / f(n)).sqrt())
        }
        LambdaModel::Scad { sigma, p, n } => T::lit(12.0) * sigma * (f(p).ln() / f(n)).sqrt(),
    }
}

fn check_lambda_tilde<T: Scalar>(lt: T) -> Result<()> {
    if !(lt > T::zero()) || !lt.is_finite() {
        return Err(Error::Invalid(format!(
            "λ̃ must be positive and finite, got {lt}"
        )));
    }
    Ok(())
}

/// Split for convex problems (ℓ1, group, elastic). Corrected losses must use
/// [`split_nonconvex`].
pub fn split_convex<T: Scalar>(spec: &ProblemSpec<T>, lambda_tilde: T) -> Result<SplitProblem<T>> {
    check_lambda_tilde(lambda_tilde)?;
    if spec.loss.correction() > T::zero() {
        return Err(Error::Misuse(
            "corrected loss (γ_ς > 0) is nonconvex; use split_nonconvex".into(),
        ));
    }
    if !spec.penalty.is_convex() {
        return Err(Error::Misuse(
            "SCAD penalty is nonconvex; use split_nonconvex".into(),
        ));
    }
    build_split(spec, lambda_tilde, T::zero())
}

/// Split for SCAD penalties and corrected losses. The augmentation strength is
/// `μ = μ_SCAD + γ_ς`.
pub fn split_nonconvex<T: Scalar>(
    spec: &ProblemSpec<T>,
    lambda_tilde: T,
) -> Result<SplitProblem<T>> {
    check_lambda_tilde(lambda_tilde)?;
    let reg_mu = match &spec.penalty {
        Penalty::Scad(r) => r.mu(),
        _ => T::zero(),
    };
    let mu = reg_mu + spec.loss.correction();
    let mut sp = build_split(spec, lambda_tilde, mu)?;
    let proxy = curvature_proxy(spec);
    if mu + lambda_tilde >= proxy {
        sp.warnings.push(format!(
            "augmentation μ + λ̃ = {} is not below the curvature proxy {} (mean diagonal of the loss Hessian bound); linear convergence is not expected",
            (mu + lambda_tilde).to_f64_lossy(),
            proxy.to_f64_lossy()
        ));
    }
    Ok(sp)
}

/// Convex or nonconvex split, whichever the spec needs.
pub fn split<T: Scalar>(spec: &ProblemSpec<T>, lambda_tilde: T) -> Result<SplitProblem<T>> {
    if spec.is_nonconvex() {
        split_nonconvex(spec, lambda_tilde)
    } else {
        split_convex(spec, lambda_tilde)
    }
}

/// Direct mode: requires the elastic penalty `λ(½||w||² + g(w))` and a convex loss.
pub fn split_direct<T: Scalar>(spec: &ProblemSpec<T>) -> Result<SplitProblem<T>> {
    let Penalty::Elastic(g) = &spec.penalty else {
        return Err(Error::Misuse(
            "direct mode needs a 1-strongly convex regularizer (elastic penalty)".into(),
        ));
    };
    if spec.loss.correction() > T::zero() {
        return Err(Error::Misuse(
            "direct mode does not support corrected losses".into(),
        ));
    }
    let n = spec.n();
    let smoothness = spec.smoothness();
    let mean = smoothness.iter().copied().sum::<T>() / T::from_usize_lossy(n);
    let (probs, warning) = sampling_distribution(&smoothness);
    let composite = Composite {
        base: BaseReg::Convex(g.clone()),
        weight: T::one(),
        quad: T::one(),
        radius: spec.radius(),
    };
    Ok(SplitProblem {
        spec: spec.clone(),
        mode: Mode::Direct,
        n_components: n,
        loss_scale: T::one(),
        lambda_tilde: spec.lambda(),
        mu: T::zero(),
        composite,
        sampler: DiscreteSampler::new(probs.iter().map(|q| q.to_f64_lossy())),
        probs,
        step: direct_max_step_size(spec.lambda(), mean, n),
        mean_loss_smoothness: mean,
        smoothness,
        warnings: warning.into_iter().collect(),
    })
}

fn curvature_proxy<T: Scalar>(spec: &ProblemSpec<T>) -> T {
    let d = spec.data();
    let total: T = d.column_sq_norms().into_iter().sum();
    spec.loss.curvature_bound() * total
        / (T::from_usize_lossy(d.n()) * T::from_usize_lossy(d.p().max(1)))
}

fn build_split<T: Scalar>(
    spec: &ProblemSpec<T>,
    lambda_tilde: T,
    mu: T,
) -> Result<SplitProblem<T>> {
    let n = spec.n();
    let nn = T::from_usize_lossy(n);
    let big_n = n + 1;
    let scale = T::from_usize_lossy(big_n) / nn;
    let kappa = spec.lambda() / lambda_tilde;
    let (base, quad) = match &spec.penalty {
        Penalty::Convex(g) => (BaseReg::Convex(g.clone()), T::one()),
        Penalty::Elastic(g) => (BaseReg::Convex(g.clone()), T::one() + kappa),
        Penalty::Scad(r) => (BaseReg::Dlambda(*r), T::one()),
    };
    let loss_l = spec.smoothness();
    let mean = loss_l.iter().copied().sum::<T>() / nn;
    let mut smoothness: Vec<T> = loss_l.iter().map(|&l| scale * l).collect();
    smoothness.push((lambda_tilde + mu) * T::from_usize_lossy(big_n));
    let (probs, warning) = sampling_distribution(&smoothness);
    Ok(SplitProblem {
        spec: spec.clone(),
        mode: Mode::Split,
        n_components: big_n,
        loss_scale: scale,
        lambda_tilde,
        mu,
        composite: Composite {
            base,
            weight: kappa,
            quad,
            radius: spec.radius(),
        },
        sampler: DiscreteSampler::new(probs.iter().map(|q| q.to_f64_lossy())),
        probs,
        step: max_step_size(lambda_tilde, mean, big_n),
        mean_loss_smoothness: mean,
        smoothness,
        warnings: warning.into_iter().collect(),
    })
}

impl<T: Scalar> SplitProblem<T> {
    /// Overrides the step size `η`.
    pub fn with_step(mut self, step: T) -> Result<Self> {
        if !(step > T::zero()) || !step.is_finite() {
            return Err(Error::Invalid(format!(
                "step must be positive and finite, got {step}"
            )));
        }
        self.step = step;
        Ok(self)
    }

    pub fn spec(&self) -> &ProblemSpec<T> {
        &self.spec
    }

    pub fn data(&self) -> &Dataset<T> {
        self.spec.data()
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// N
    pub fn n_components(&self) -> usize {
        self.n_components
    }

    /// Number of loss components (`n`); the augmentation slot, if any, has index `n`.
    pub fn n_samples(&self) -> usize {
        self.spec.n()
    }

    pub fn has_augmentation(&self) -> bool {
        self.mode == Mode::Split
    }

    /// Factor `(n+1)/n` (split) or `1` (direct) applied to each loss.
    pub fn loss_scale(&self) -> T {
        self.loss_scale
    }

    /// λ̃ (equals λ in direct mode).
    pub fn lambda_tilde(&self) -> T {
        self.lambda_tilde
    }

    pub fn mu(&self) -> T {
        self.mu
    }

    pub fn composite(&self) -> &Composite<T> {
        &self.composite
    }

    /// L̃_i for every component.
    pub fn smoothness(&self) -> &[T] {
        &self.smoothness
    }

    /// `L̄` of the original losses.
    pub fn mean_loss_smoothness(&self) -> T {
        self.mean_loss_smoothness
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn sampler(&self) -> &DiscreteSampler {
        &self.sampler
    }

    /// η
    pub fn step(&self) -> T {
        self.step
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// `∇φ_i(w) = coeff·x_i` for loss components `i < n`.
    #[inline]
    pub fn component_coeff_at(&self, i: usize, margin: T) -> T {
        self.loss_scale * self.spec.loss.deriv_at(margin, self.spec.data().label(i))
    }

    pub fn component_coeff(&self, i: usize, w: &[T]) -> T {
        self.component_coeff_at(i, self.data().row(i).dot(w))
    }

    /// `∇φ_N(w) = aug_coeff·w` for the augmentation slot.
    pub fn aug_coeff(&self) -> T {
        -(self.lambda_tilde + self.mu) * T::from_usize_lossy(self.n_components)
    }

    /// `φ_i(w)` for any component index.
    pub fn component_value(&self, i: usize, w: &[T]) -> T {
        if i < self.n_samples() {
            self.loss_scale * self.spec.loss.loss_value(self.data(), i, w)
        } else {
            self.aug_coeff() * linalg::sq_norm(w) / T::lit(2.0)
        }
    }

    /// `(1/N)Σφ_i(w) + λ̃·g̃(w)` evaluated term by term.
    pub fn split_objective(&self, w: &[T]) -> T {
        let total: T = (0..self.n_components)
            .map(|i| self.component_value(i, w))
            .sum();
        total / T::from_usize_lossy(self.n_components) + self.lambda_tilde * self.composite.value(w)
    }

    /// Original objective `F(w)`.
    pub fn objective(&self, w: &[T]) -> T {
        self.spec.objective(w)
    }
}
