//! Brute-force minimizers used as independent references for the proximal operators.

/// Grid spacing of the scalar oracles.
pub const GRID_STEP: f64 = 1e-4;

/// Minimizes `f` on `[lo, hi]`: exhaustive grid with spacing `h`, then
/// ternary search on the two cells around the best grid point. `diff(a, b)`
/// must return `f(a) − f(b)`; passing a cancellation-free form lets the
/// refinement resolve the minimizer well below `√ε`.
pub fn grid_argmin(
    f: impl Fn(f64) -> f64,
    diff: impl Fn(f64, f64) -> f64,
    lo: f64,
    hi: f64,
    h: f64,
) -> f64 {
    if hi <= lo {
        return lo;
    }
    let steps = ((hi - lo) / h).ceil() as usize;
    let mut best = lo;
    let mut best_val = f(lo);
    for k in 1..=steps {
        let t = (lo + k as f64 * h).min(hi);
        let val = f(t);
        if val < best_val {
            best = t;
            best_val = val;
        }
    }
    let (mut a, mut b) = ((best - h).max(lo), (best + h).min(hi));
    for _ in 0..200 {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if diff(m1, m2) <= 0.0 {
            b = m2;
        } else {
            a = m1;
        }
    }
    let refined = 0.5 * (a + b);
    if diff(refined, best) <= 0.0 {
        refined
    } else {
        best
    }
}

/// `argmin_w ½(w − v)² + c·pen(w)` for a penalty that is even and
/// nondecreasing in `|w|`, so the minimizer lies between 0 and `v`.
pub fn scalar_prox(v: f64, c: f64, pen: impl Fn(f64) -> f64) -> f64 {
    let obj = |w: f64| 0.5 * (w - v) * (w - v) + c * pen(w);
    let diff = |a: f64, b: f64| 0.5 * (a - b) * (a + b - 2.0 * v) + c * (pen(a) - pen(b));
    grid_argmin(obj, diff, v.min(0.0), v.max(0.0), GRID_STEP)
}

/// `argmin_w ½||w − v||² + c·||w||₂` on one block. The minimizer is a
/// nonnegative multiple of `v`, which reduces the search to its length.
pub fn block_prox(v: &[f64], c: f64) -> Vec<f64> {
    let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if r == 0.0 {
        return vec![0.0; v.len()];
    }
    let obj = |t: f64| 0.5 * (t - r) * (t - r) + c * t;
    let diff = |a: f64, b: f64| (a - b) * (0.5 * (a + b) - r + c);
    let t = grid_argmin(obj, diff, 0.0, r, GRID_STEP);
    v.iter().map(|x| x * t / r).collect()
}

/// Whether `w` is the oracle's minimizer: within `tol` of it, or at least as
/// good in objective (the oracle found a different global minimizer).
pub fn agrees(w: f64, oracle: f64, obj: impl Fn(f64) -> f64, tol: f64) -> bool {
    (w - oracle).abs() <= tol || obj(w) <= obj(oracle) + 1e-12
}

/// Three-piece SCAD written out independently of the library.
pub fn scad(t: f64, lambda: f64, zeta: f64) -> f64 {
    let a = t.abs();
    if a <= lambda {
        lambda * a
    } else if a <= zeta * lambda {
        (2.0 * zeta * lambda * a - a * a - lambda * lambda) / (2.0 * (zeta - 1.0))
    } else {
        0.5 * (zeta + 1.0) * lambda * lambda
    }
}

/// `(SCAD(t) + t²/(2(ζ − 1)))/λ`
pub fn dlambda(t: f64, lambda: f64, zeta: f64) -> f64 {
    (scad(t, lambda, zeta) + t * t / (2.0 * (zeta - 1.0))) / lambda
}
