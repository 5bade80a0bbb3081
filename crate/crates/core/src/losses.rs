//! Per-sample smooth convex losses `f_i(w) = ψ(x_iᵀw, y_i)`.
//!
//! Every loss here depends on `w` only through the margin `x_iᵀw`, so
//! `∇f_i(w) = c·x_i` for a scalar coefficient `c`. Solvers exploit this to
//! store per-sample gradients as scalars.

use std::fmt;
use std::sync::Arc;

use crate::data::Dataset;
use crate::regularizers::Penalty;
use crate::{linalg, Error, Result, Scalar};

type ScalarFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Generalized linear model loss `Φ(xᵀw) − y·xᵀw` with user-supplied `Φ, Φ′, Φ″`.
#[derive(Clone)]
pub struct GlmLoss<T> {
    phi: ScalarFn<T>,
    dphi: ScalarFn<T>,
    d2phi: ScalarFn<T>,
    curvature_bound: T,
}

impl<T: Scalar> GlmLoss<T> {
    /// Lower end of the curvature probe grid.
    pub const PROBE_MIN: f64 = -50.0;
    /// Upper end of the curvature probe grid.
    pub const PROBE_MAX: f64 = 50.0;
    /// Number of equally spaced probe points.
    pub const PROBE_POINTS: usize = 10_001;

    /// Validates convexity (`Φ″ ≥ 0` on the probe grid) and records `sup Φ″`
    /// over the grid as the curvature bound used for smoothness constants.
    pub fn new(
        phi: impl Fn(T) -> T + Send + Sync + 'static,
        dphi: impl Fn(T) -> T + Send + Sync + 'static,
        d2phi: impl Fn(T) -> T + Send + Sync + 'static,
    ) -> Result<Self> {
        let step = (Self::PROBE_MAX - Self::PROBE_MIN) / (Self::PROBE_POINTS - 1) as f64;
        let mut sup = T::zero();
        for k in 0..Self::PROBE_POINTS {
            let t = T::lit(Self::PROBE_MIN + k as f64 * step);
            let h = d2phi(t);
            if !h.is_finite() || h < T::zero() {
                return Err(Error::Invalid(format!(
                    "GLM link is not convex: Φ''({t}) = {h}"
                )));
            }
            sup = sup.max(h);
        }
        Ok(Self {
            phi: Arc::new(phi),
            dphi: Arc::new(dphi),
            d2phi: Arc::new(d2phi),
            curvature_bound: sup,
        })
    }

    pub fn curvature_bound(&self) -> T {
        self.curvature_bound
    }

    pub fn second_derivative(&self, t: T) -> T {
        (self.d2phi)(t)
    }
}

impl<T: fmt::Debug> fmt::Debug for GlmLoss<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GlmLoss")
            .field("curvature_bound", &self.curvature_bound)
            .finish_non_exhaustive()
    }
}

#[derive(Clone, Debug)]
pub enum LossKind<T> {
    /// `½(y − xᵀw)²`
    Squared,
    /// `log(1 + exp(−y·xᵀw))`, labels in `{−1, +1}`.
    Logistic,
    Glm(GlmLoss<T>),
}

/// `log(1 + e^z)` without overflow.
#[inline]
pub fn softplus<T: Scalar>(z: T) -> T {
    z.max(T::zero()) + (-z.abs()).exp().ln_1p()
}

/// `1 / (1 + e^{−z})` without overflow.
#[inline]
pub fn sigmoid<T: Scalar>(z: T) -> T {
    if z >= T::zero() {
        T::one() / (T::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (T::one() + e)
    }
}

/// Loss family plus the optional corrected-Lasso strength `γ_ς ≥ 0`.
///
/// The correction `−(γ_ς/2)||w||²` is not part of the per-sample values; it
/// enters only through [`full_objective`] and the smooth-part helpers.
#[derive(Clone, Debug)]
pub struct LossModel<T> {
    pub kind: LossKind<T>,
    correction: T,
}

impl<T: Scalar> LossModel<T> {
    pub fn new(kind: LossKind<T>) -> Self {
        Self {
            kind,
            correction: T::zero(),
        }
    }

    pub fn squared() -> Self {
        Self::new(LossKind::Squared)
    }

    pub fn logistic() -> Self {
        Self::new(LossKind::Logistic)
    }

    pub fn with_correction(mut self, gamma: T) -> Result<Self> {
        if !(gamma >= T::zero()) || !gamma.is_finite() {
            return Err(Error::Invalid(format!(
                "correction must be finite and >= 0, got {gamma}"
            )));
        }
        self.correction = gamma;
        Ok(self)
    }

    pub fn correction(&self) -> T {
        self.correction
    }

    /// Loss as a function of the margin `m = xᵀw`.
    #[inline]
    pub fn value_at(&self, margin: T, y: T) -> T {
        match &self.kind {
            LossKind::Squared => {
                let r = y - margin;
                r * r / T::lit(2.0)
            }
            LossKind::Logistic => softplus(-y * margin),
            LossKind::Glm(g) => (g.phi)(margin) - y * margin,
        }
    }

    /// Derivative with respect to the margin.
    #[inline]
    pub fn deriv_at(&self, margin: T, y: T) -> T {
        match &self.kind {
            LossKind::Squared => margin - y,
            LossKind::Logistic => -y * sigmoid(-y * margin),
            LossKind::Glm(g) => (g.dphi)(margin) - y,
        }
    }

    /// Upper bound on the second derivative with respect to the margin.
    pub fn curvature_bound(&self) -> T {
        match &self.kind {
            LossKind::Squared => T::one(),
            LossKind::Logistic => T::lit(0.25),
            LossKind::Glm(g) => g.curvature_bound,
        }
    }

    pub fn loss_value(&self, d: &Dataset<T>, i: usize, w: &[T]) -> T {
        self.value_at(d.row(i).dot(w), d.label(i))
    }

    /// Scalar `c` with `∇f_i(w) = c·x_i`.
    pub fn grad_coeff(&self, d: &Dataset<T>, i: usize, w: &[T]) -> T {
        self.deriv_at(d.row(i).dot(w), d.label(i))
    }

    /// Smoothness constant `L_i` of `f_i`.
    pub fn smoothness(&self, d: &Dataset<T>, i: usize) -> T {
        self.curvature_bound() * d.row(i).sq_norm()
    }

    pub fn smoothness_all(&self, d: &Dataset<T>) -> Vec<T> {
        (0..d.n()).map(|i| self.smoothness(d, i)).collect()
    }

    /// `(1/n)Σf_i(w) − (γ_ς/2)||w||²`
    pub fn smooth_value(&self, d: &Dataset<T>, w: &[T]) -> T {
        let n = T::from_usize_lossy(d.n().max(1));
        let total = d
            .rows()
            .zip(d.labels())
            .fold(T::zero(), |acc, (r, &y)| acc + self.value_at(r.dot(w), y));
        total / n - self.correction * linalg::sq_norm(w) / T::lit(2.0)
    }

    /// Gradient of [`smooth_value`](Self::smooth_value).
    pub fn smooth_gradient(&self, d: &Dataset<T>, w: &[T]) -> Vec<T> {
        let inv_n = T::one() / T::from_usize_lossy(d.n().max(1));
        let coeffs: Vec<T> = d
            .rows()
            .zip(d.labels())
            .map(|(r, &y)| self.deriv_at(r.dot(w), y) * inv_n)
            .collect();
        let mut g = d.combine(&coeffs);
        if !self.correction.is_zero() {
            linalg::axpy(-self.correction, w, &mut g);
        }
        g
    }
}

/// `F(w) = (1/n)Σf_i(w) − (γ_ς/2)||w||² + penalty(w)`.
///
/// For SCAD the penalty is `Σ SCAD(w_j)` (level inside the regularizer), not `λ·g(w)`.
pub fn full_objective<T: Scalar>(
    loss: &LossModel<T>,
    d: &Dataset<T>,
    w: &[T],
    penalty: &Penalty<T>,
    lambda: T,
) -> T {
    loss.smooth_value(d, w) + penalty.value(w, lambda)
}
