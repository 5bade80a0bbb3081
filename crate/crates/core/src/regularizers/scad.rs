//! SCAD and its convexified form.

use crate::{Error, Result, Scalar};

/// SCAD penalty at level `lambda` with shape `zeta > 2`:
///
/// ```text
/// λ|t|                                  |t| ≤ λ
/// −(t² − 2ζλ|t| + λ²) / (2(ζ − 1))      λ < |t| ≤ ζλ
/// (ζ + 1)λ² / 2                         |t| > ζλ
/// ```
pub fn scad_value<T: Scalar>(t: T, lambda: T, zeta: T) -> T {
    let a = t.abs();
    let two = T::lit(2.0);
    if a <= lambda {
        lambda * a
    } else if a <= zeta * lambda {
        -(a * a - two * zeta * lambda * a + lambda * lambda) / (two * (zeta - T::one()))
    } else {
        (zeta + T::one()) * lambda * lambda / two
    }
}

/// `d_λ(t) = (SCAD(t) + μt²/2)/λ` with `μ = 1/(ζ − 1)`; convex, and `≥ |t|`.
pub fn dlambda_scalar<T: Scalar>(t: T, lambda: T, zeta: T) -> T {
    let mu = T::one() / (zeta - T::one());
    (scad_value(t, lambda, zeta) + mu * t * t / T::lit(2.0)) / lambda
}

/// Picks the candidate with the smallest objective; candidates must be sorted
/// by increasing magnitude so ties resolve toward zero.
fn argmin_sorted<T: Scalar>(cands: &[T], obj: impl Fn(T) -> T) -> T {
    let mut best = cands[0];
    let mut best_val = obj(best);
    for &w in &cands[1..] {
        let val = obj(w);
        if val < best_val {
            best = w;
            best_val = val;
        }
    }
    best
}

fn clamp<T: Scalar>(x: T, lo: T, hi: T) -> T {
    x.max(lo).min(hi)
}

/// `argmin_w ½(w − v)² + c·d_λ(w)`.
///
/// `d_λ` is linear on `[λ, ζλ]` and quadratic on the two outer pieces, so the
/// minimizer is one of four closed-form candidates (zero and the clamped
/// stationary point of each piece).
pub fn dlambda_prox_scalar<T: Scalar>(v: T, c: T, lambda: T, zeta: T) -> T {
    debug_assert!(c >= T::zero());
    let a = v.abs();
    let one = T::one();
    let zm1 = zeta - one;
    let mu = one / zm1;
    let zl = zeta * lambda;
    let mut cands = [
        T::zero(),
        clamp((a - c) / (one + c * mu / lambda), T::zero(), lambda),
        clamp(a - c * zeta / zm1, lambda, zl),
        ((a / (one + c / (zm1 * lambda))).max(zl)),
    ];
    cands.sort_by(|x, y| x.partial_cmp(y).expect("finite candidates"));
    let half = T::lit(0.5);
    let w = argmin_sorted(&cands, |w| {
        half * (w - a) * (w - a) + c * dlambda_scalar(w, lambda, zeta)
    });
    if v < T::zero() {
        -w
    } else {
        w
    }
}

/// A global minimizer of `½(w − v)² + c·SCAD(w)`, ties broken toward smaller `|w|`.
///
/// For `c ≥ ζ − 1` the objective is nonconvex on the middle piece and both of
/// its endpoints become candidates alongside the stationary points.
pub fn scad_prox_scalar<T: Scalar>(v: T, c: T, lambda: T, zeta: T) -> T {
    debug_assert!(c >= T::zero());
    let a = v.abs();
    let one = T::one();
    let zm1 = zeta - one;
    let zl = zeta * lambda;
    let curvature = zm1 - c;
    let middle = if curvature > T::zero() {
        clamp((a * zm1 - c * zl) / curvature, lambda, zl)
    } else {
        lambda
    };
    let mut cands = [
        T::zero(),
        clamp(a - c * lambda, T::zero(), lambda),
        lambda,
        middle,
        zl,
        a.max(zl),
    ];
    cands.sort_by(|x, y| x.partial_cmp(y).expect("finite candidates"));
    let half = T::lit(0.5);
    let w = argmin_sorted(&cands, |w| {
        half * (w - a) * (w - a) + c * scad_value(w, lambda, zeta)
    });
    if v < T::zero() {
        -w
    } else {
        w
    }
}

/// SCAD regularizer with its weak-convexity modulus `μ = 1/(ζ − 1)` and `L_d = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NonconvexReg<T> {
    lambda: T,
    zeta: T,
}

impl<T: Scalar> NonconvexReg<T> {
    pub fn scad(lambda: T, zeta: T) -> Result<Self> {
        if !(lambda > T::zero()) || !lambda.is_finite() {
            return Err(Error::Invalid(format!(
                "SCAD level must be positive, got {lambda}"
            )));
        }
        if !(zeta > T::lit(2.0)) || !zeta.is_finite() {
            return Err(Error::Invalid(format!(
                "SCAD shape must exceed 2, got {zeta}"
            )));
        }
        Ok(Self { lambda, zeta })
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn zeta(&self) -> T {
        self.zeta
    }

    pub fn mu(&self) -> T {
        T::one() / (self.zeta - T::one())
    }

    pub fn l_d(&self) -> T {
        T::one()
    }

    /// `Σ_j SCAD(w_j)`
    pub fn value(&self, w: &[T]) -> T {
        w.iter()
            .fold(T::zero(), |a, &t| a + scad_value(t, self.lambda, self.zeta))
    }

    /// `Σ_j d_λ(w_j)`
    pub fn dlambda_value(&self, w: &[T]) -> T {
        w.iter().fold(T::zero(), |a, &t| {
            a + dlambda_scalar(t, self.lambda, self.zeta)
        })
    }

    pub fn dlambda_prox(&self, v: &[T], c: T) -> Vec<T> {
        v.iter()
            .map(|&x| dlambda_prox_scalar(x, c, self.lambda, self.zeta))
            .collect()
    }

    pub fn scad_prox(&self, v: &[T], c: T) -> Vec<T> {
        v.iter()
            .map(|&x| scad_prox_scalar(x, c, self.lambda, self.zeta))
            .collect()
    }

    /// Checks the separable-penalty assumptions numerically on `grid`.
    pub fn validate_assumptions(&self, grid: &[T]) -> super::AssumptionReport {
        let (l, z) = (self.lambda, self.zeta);
        super::validate_penalty(
            |t| scad_value(t, l, z),
            l,
            self.mu(),
            grid,
            Some(self.l_d()),
        )
    }
}
