//! Regularizers and their proximal operators.
//!
//! Convex norms ([`ConvexReg`]: ℓ1 and non-overlapping group ℓ1,2) and the
//! SCAD penalty ([`NonconvexReg`]) with its convexified counterpart
//! `d_λ(t) = (SCAD(t) + μt²/2)/λ`. All scalar math is per coordinate (or per
//! block), so a proximal step restricted to the coordinates a sparse update
//! touched costs O(nnz).

mod assumptions;
mod scad;

pub use assumptions::{validate_penalty, AssumptionReport};
pub use scad::{dlambda_prox_scalar, dlambda_scalar, scad_prox_scalar, scad_value, NonconvexReg};

use crate::{linalg, Error, Result, Scalar};

/// Disjoint groups covering `0..p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPartition {
    groups: Vec<Vec<usize>>,
    group_of: Vec<usize>,
}

impl GroupPartition {
    pub fn new(groups: Vec<Vec<usize>>, p: usize) -> Result<Self> {
        let mut group_of = vec![usize::MAX; p];
        for (g, members) in groups.iter().enumerate() {
            if members.is_empty() {
                return Err(Error::Invalid(format!("group {g} is empty")));
            }
            for &j in members {
                if j >= p {
                    return Err(Error::Invalid(format!(
                        "group {g} has index {j} >= p = {p}"
                    )));
                }
                if group_of[j] != usize::MAX {
                    return Err(Error::Invalid(format!("index {j} appears in two groups")));
                }
                group_of[j] = g;
            }
        }
        if let Some(j) = group_of.iter().position(|&g| g == usize::MAX) {
            return Err(Error::Invalid(format!(
                "index {j} is not covered by any group"
            )));
        }
        Ok(Self { groups, group_of })
    }

    /// Consecutive groups of `size` features; `p` must be a multiple of `size`.
    pub fn contiguous(p: usize, size: usize) -> Result<Self> {
        if size == 0 || !p.is_multiple_of(size) {
            return Err(Error::Invalid(format!(
                "p = {p} is not a multiple of group size {size}"
            )));
        }
        let groups = (0..p / size)
            .map(|g| (g * size..(g + 1) * size).collect())
            .collect();
        Self::new(groups, p)
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.group_of.len()
    }

    pub fn group_of(&self, j: usize) -> usize {
        self.group_of[j]
    }

    fn block_norm<T: Scalar>(&self, g: usize, u: &[T]) -> T {
        self.groups[g]
            .iter()
            .fold(T::zero(), |a, &j| a + u[j] * u[j])
            .sqrt()
    }

    fn shrink_block<T: Scalar>(&self, g: usize, v: &[T], c: T, out: &mut [T]) {
        let norm = self.block_norm(g, v);
        let factor = if norm <= c {
            T::zero()
        } else {
            T::one() - c / norm
        };
        for &j in &self.groups[g] {
            out[j] = v[j] * factor;
        }
    }
}

#[inline]
pub fn soft_threshold<T: Scalar>(v: T, c: T) -> T {
    if v > c {
        v - c
    } else if v < -c {
        v + c
    } else {
        T::zero()
    }
}

/// Convex regularizer `g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConvexReg {
    L1,
    Group(GroupPartition),
}

impl ConvexReg {
    /// ℓ1: `Σ|w_j|`; group: `Σ_g ||w_g||₂`.
    pub fn value<T: Scalar>(&self, w: &[T]) -> T {
        match self {
            ConvexReg::L1 => w.iter().fold(T::zero(), |a, &x| a + x.abs()),
            ConvexReg::Group(part) => {
                check_dim(part, w.len());
                (0..part.len()).fold(T::zero(), |a, g| a + part.block_norm(g, w))
            }
        }
    }

    /// Dual norm: ℓ∞ for ℓ1, max block ℓ2 norm for the group norm.
    pub fn dual_norm<T: Scalar>(&self, u: &[T]) -> T {
        match self {
            ConvexReg::L1 => linalg::max_abs(u),
            ConvexReg::Group(part) => {
                check_dim(part, u.len());
                (0..part.len()).fold(T::zero(), |m, g| m.max(part.block_norm(g, u)))
            }
        }
    }

    /// `argmin_w ½||w − v||² + c·g(w)`.
    pub fn prox<T: Scalar>(&self, v: &[T], c: T) -> Vec<T> {
        let mut out = vec![T::zero(); v.len()];
        self.prox_into(v, c, &mut out);
        out
    }

    pub fn prox_into<T: Scalar>(&self, v: &[T], c: T, out: &mut [T]) {
        assert!(c >= T::zero(), "prox weight must be nonnegative");
        assert_eq!(v.len(), out.len(), "dimension mismatch");
        match self {
            ConvexReg::L1 => {
                for (o, &x) in out.iter_mut().zip(v) {
                    *o = soft_threshold(x, c);
                }
            }
            ConvexReg::Group(part) => {
                check_dim(part, v.len());
                for g in 0..part.len() {
                    part.shrink_block(g, v, c, out);
                }
            }
        }
    }

    /// Recomputes `out` only where `coords` (or their groups) can have changed.
    pub fn prox_coords<T: Scalar>(&self, v: &[T], c: T, coords: &[usize], out: &mut [T]) {
        match self {
            ConvexReg::L1 => {
                for &j in coords {
                    out[j] = soft_threshold(v[j], c);
                }
            }
            ConvexReg::Group(part) => {
                // Coordinates arrive sorted, so repeated groups are usually adjacent.
                let mut last = usize::MAX;
                for &j in coords {
                    let g = part.group_of(j);
                    if g != last {
                        part.shrink_block(g, v, c, out);
                        last = g;
                    }
                }
            }
        }
    }

    /// `argmin_w ½||w − v||² + c·g(w)` subject to `g(w) ≤ rho`.
    ///
    /// The constraint is handled through its multiplier `θ ≥ 0`: the result is
    /// the plain prox at threshold `c + θ`, with `θ` found by bisection.
    pub fn prox_constrained<T: Scalar>(&self, v: &[T], c: T, rho: T) -> Result<Vec<T>> {
        let mut out = vec![T::zero(); v.len()];
        self.prox_constrained_into(v, c, rho, &mut out)?;
        Ok(out)
    }

    pub fn prox_constrained_into<T: Scalar>(
        &self,
        v: &[T],
        c: T,
        rho: T,
        out: &mut [T],
    ) -> Result<()> {
        constrained_prox(
            v,
            c,
            rho,
            self.dual_norm(v),
            |u, t, o| self.prox_into(u, t, o),
            |w| self.value(w),
            out,
        )
    }
}

fn check_dim(part: &GroupPartition, len: usize) {
    assert_eq!(part.dim(), len, "dimension mismatch with group partition");
}

pub(crate) const BISECTION_MAX_ITER: usize = 200;

/// Shared dual bisection for radius constraints on a convex `R`.
///
/// `zero_threshold` is a weight at which `prox(v, ·)` is exactly zero.
pub(crate) fn constrained_prox<T: Scalar>(
    v: &[T],
    c: T,
    rho: T,
    zero_threshold: T,
    prox: impl Fn(&[T], T, &mut [T]),
    value: impl Fn(&[T]) -> T,
    out: &mut [T],
) -> Result<()> {
    assert!(rho > T::zero(), "radius must be positive");
    prox(v, c, out);
    if rho.is_infinite() || value(out) <= rho {
        return Ok(());
    }
    let mut lo = T::zero();
    let mut hi = (zero_threshold - c).max(T::zero());
    let tol = T::lit(1e-10).max(T::lit(4.0) * T::epsilon() * (c + hi));
    let mut iterations = 0;
    while hi - lo > tol {
        if iterations == BISECTION_MAX_ITER {
            prox(v, c + hi, out);
            return Err(Error::Bisection {
                iterations,
                residual: (hi - lo).to_f64_lossy(),
            });
        }
        let mid = lo + (hi - lo) / T::lit(2.0);
        prox(v, c + mid, out);
        if value(out) <= rho {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    prox(v, c + hi, out);
    Ok(())
}

/// The penalty term of the original objective.
#[derive(Clone, Debug, PartialEq)]
pub enum Penalty<T> {
    /// `λ·g(w)`
    Convex(ConvexReg),
    /// `λ·(½||w||² + g(w))`, a 1-strongly convex composite.
    Elastic(ConvexReg),
    /// `Σ_j SCAD_{λ,ζ}(w_j)`; the level λ lives inside the regularizer.
    Scad(NonconvexReg<T>),
}

impl<T: Scalar> Penalty<T> {
    pub fn l1() -> Self {
        Penalty::Convex(ConvexReg::L1)
    }

    pub fn is_convex(&self) -> bool {
        !matches!(self, Penalty::Scad(_))
    }

    /// Penalty contribution to the objective at level `lambda`.
    pub fn value(&self, w: &[T], lambda: T) -> T {
        match self {
            Penalty::Convex(g) => lambda * g.value(w),
            Penalty::Elastic(g) => lambda * (linalg::sq_norm(w) / T::lit(2.0) + g.value(w)),
            Penalty::Scad(r) => r.value(w),
        }
    }

    /// `argmin_w ½||w − u||² + step·penalty(w)`, with the radius constraint on
    /// the norm part when `rho` is finite (not supported for SCAD).
    pub fn prox_step_into(&self, u: &[T], step: T, lambda: T, rho: T, out: &mut [T]) -> Result<()> {
        match self {
            Penalty::Convex(g) => g.prox_constrained_into(u, step * lambda, rho, out),
            Penalty::Elastic(g) => {
                let s = T::one() + step * lambda;
                let scaled: Vec<T> = u.iter().map(|&x| x / s).collect();
                g.prox_constrained_into(&scaled, step * lambda / s, rho, out)
            }
            Penalty::Scad(r) => {
                if rho.is_finite() {
                    return Err(Error::Unsupported(
                        "radius constraint with the nonconvex SCAD prox".into(),
                    ));
                }
                for (o, &x) in out.iter_mut().zip(u) {
                    *o = scad_prox_scalar(x, step, r.lambda(), r.zeta());
                }
                Ok(())
            }
        }
    }

    pub fn prox_step(&self, u: &[T], step: T, lambda: T, rho: T) -> Result<Vec<T>> {
        let mut out = vec![T::zero(); u.len()];
        self.prox_step_into(u, step, lambda, rho, &mut out)?;
        Ok(out)
    }
}
