use crate::Scalar;

/// Outcome of the numerical assumption checks on a separable penalty `d(t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AssumptionReport {
    /// `d(0) = 0` and `d(t) = d(−t)` on the grid.
    pub zero_and_symmetric: bool,
    /// `d` nondecreasing on `t ≥ 0`.
    pub nondecreasing: bool,
    /// `d(t)/t` nonincreasing on `t > 0`.
    pub ratio_nonincreasing: bool,
    /// Right derivative at `0⁺` by forward difference.
    pub limit_slope: f64,
    /// `limit_slope / λ`.
    pub l_d: f64,
    /// `limit_slope` finite and positive, and equal to `λ·L_d` when `L_d` is given.
    pub limit_slope_ok: bool,
    /// `(d(t) + μt²/2)/λ` convex on the symmetrized grid.
    pub dlambda_convex: bool,
    pub mu: f64,
}

impl AssumptionReport {
    pub fn all_pass(&self) -> bool {
        self.zero_and_symmetric
            && self.nondecreasing
            && self.ratio_nonincreasing
            && self.limit_slope_ok
            && self.dlambda_convex
    }
}

/// Evaluates the separable-penalty assumptions for `d` on a sorted grid of
/// positive points. Failures are reported, never raised.
pub fn validate_penalty<T: Scalar>(
    d: impl Fn(T) -> T,
    lambda: T,
    mu: T,
    grid: &[T],
    expected_l_d: Option<T>,
) -> AssumptionReport {
    let scale = grid
        .iter()
        .map(|&t| d(t).abs())
        .fold(T::one(), |m, x| m.max(x));
    let tol = T::lit(1e3) * T::epsilon() * scale;

    let zero_and_symmetric =
        d(T::zero()) == T::zero() && grid.iter().all(|&t| (d(t) - d(-t)).abs() <= tol);

    let mut prev_t = T::zero();
    let mut prev = d(T::zero());
    let mut nondecreasing = true;
    for &t in grid {
        let cur = d(t);
        if t <= prev_t || cur < prev - tol {
            nondecreasing = false;
        }
        prev_t = t;
        prev = cur;
    }

    let ratio_nonincreasing = grid.windows(2).all(|w| {
        let (r0, r1) = (d(w[0]) / w[0], d(w[1]) / w[1]);
        r1 <= r0 + tol / w[0].min(w[1]).max(T::epsilon())
    });

    let h = T::lit(1e-8).max(T::epsilon().sqrt());
    let slope = (d(h) - d(T::zero())) / h;
    let l_d = slope / lambda;
    let limit_slope_ok = slope.is_finite()
        && slope > T::lit(100.0) * h
        && expected_l_d
            .is_none_or(|e| (slope - lambda * e).abs() <= T::lit(1e-6).max(T::lit(10.0) * h));

    let convexified = |t: T| (d(t) + mu * t * t / T::lit(2.0)) / lambda;
    let mut pts: Vec<T> = grid.iter().rev().map(|&t| -t).collect();
    pts.push(T::zero());
    pts.extend_from_slice(grid);
    let slopes: Vec<T> = pts
        .windows(2)
        .map(|w| (convexified(w[1]) - convexified(w[0])) / (w[1] - w[0]))
        .collect();
    let ctol = T::lit(1e-6).max(T::lit(1e4) * T::epsilon()) * (T::one() + scale / lambda);
    let dlambda_convex = slopes.windows(2).all(|s| s[1] >= s[0] - ctol);

    AssumptionReport {
        zero_and_symmetric,
        nondecreasing,
        ratio_nonincreasing,
        limit_slope: slope.to_f64_lossy(),
        l_d: l_d.to_f64_lossy(),
        limit_slope_ok,
        dlambda_convex,
        mu: mu.to_f64_lossy(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regularizers::{scad_value, NonconvexReg};

    fn grid() -> Vec<f64> {
        (1..=2000).map(|k| k as f64 * 1e-3).collect()
    }

    #[test]
    fn scad_passes() {
        let r = NonconvexReg::scad(0.05, 3.7).unwrap();
        let rep = r.validate_assumptions(&grid());
        assert!(rep.all_pass(), "{rep:?}");
        assert!((rep.l_d - 1.0).abs() < 1e-6);
        assert!((rep.mu - 1.0 / 2.7).abs() < 1e-15);
        assert!((rep.limit_slope - 0.05).abs() < 1e-6);
    }

    #[test]
    fn asymmetric_fails_symmetry() {
        let rep = validate_penalty(
            |t: f64| {
                if t >= 0.0 {
                    scad_value(t, 0.05, 3.7)
                } else {
                    2.0 * scad_value(t, 0.05, 3.7)
                }
            },
            0.05,
            1.0 / 2.7,
            &grid(),
            None,
        );
        assert!(!rep.zero_and_symmetric);
        assert!(!rep.all_pass());
    }

    #[test]
    fn too_small_mu_fails_convexity() {
        let rep = validate_penalty(
            |t: f64| scad_value(t, 0.05, 3.7),
            0.05,
            0.1,
            &grid(),
            Some(1.0),
        );
        assert!(!rep.dlambda_convex);
        assert!(rep.nondecreasing && rep.zero_and_symmetric && rep.ratio_nonincreasing);
    }

    #[test]
    fn squared_penalty_fails_ratio() {
        let rep = validate_penalty(|t: f64| t * t, 1.0, 0.0, &grid(), None);
        assert!(!rep.ratio_nonincreasing);
        assert!(!rep.limit_slope_ok);
    }
}
