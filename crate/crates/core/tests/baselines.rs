mod common;

use std::sync::Arc;

use gsdca::baselines::{run_baseline, saga_run_with_table, BaselineConfig, SolverKind};
use gsdca::data::Dataset;
use gsdca::diagnostics::{compute_reference, prox_gd_to_stationarity};
use gsdca::losses::LossModel;
use gsdca::regularizers::{ConvexReg, GroupPartition, NonconvexReg, Penalty};
use gsdca::rng::CounterRng;
use gsdca::sdca::{run, RunConfig};
use gsdca::splitting::{split, ProblemSpec};

fn lasso(d: Dataset<f64>, lambda: f64) -> ProblemSpec<f64> {
    ProblemSpec::new(Arc::new(d), LossModel::squared(), Penalty::l1(), lambda).unwrap()
}

fn cfg(kind: SolverKind, step: f64, epochs: usize, seed: u64) -> BaselineConfig<f64> {
    BaselineConfig::new(kind, step, epochs, seed)
}

/// SAGA (or SAG) with a table of dense gradient vectors, squared loss plus
/// optional correction, drawing samples exactly as the library does.
fn dense_saga(spec: &ProblemSpec<f64>, eta: f64, steps: usize, seed: u64, sag: bool) -> Vec<f64> {
    let d = spec.data();
    let (n, p) = (d.n(), d.p());
    let gamma = spec.loss.correction();
    let rows: Vec<Vec<f64>> = (0..n).map(|i| d.row(i).to_dense()).collect();
    let mut table = vec![vec![0.0; p]; n];
    let mut w = vec![0.0; p];
    let mut rng = CounterRng::new(seed);
    for _ in 0..steps {
        let i = rng.below(n);
        let r = common::dense_dot(&rows[i], &w) - d.label(i);
        let g: Vec<f64> = rows[i].iter().map(|x| r * x).collect();
        let avg_old: Vec<f64> = (0..p)
            .map(|j| table.iter().map(|t| t[j]).sum::<f64>() / n as f64)
            .collect();
        let dir: Vec<f64> = if sag {
            (0..p)
                .map(|j| avg_old[j] + (g[j] - table[i][j]) / n as f64)
                .collect()
        } else {
            (0..p).map(|j| g[j] - table[i][j] + avg_old[j]).collect()
        };
        let u: Vec<f64> = (0..p)
            .map(|j| w[j] - eta * (dir[j] - gamma * w[j]))
            .collect();
        table[i] = g;
        w = spec.prox_step(&u, eta).unwrap();
    }
    w
}

#[test]
fn saga_and_sag_match_dense_tables() {
    let d = common::sparse_regression(25, 10, 0.3, 1);
    let specs = [
        lasso(d.clone(), 0.05),
        ProblemSpec::new(
            Arc::new(d.clone()),
            LossModel::squared().with_correction(0.05).unwrap(),
            Penalty::l1(),
            0.05,
        )
        .unwrap(),
        ProblemSpec::new(
            Arc::new(d),
            LossModel::squared(),
            Penalty::Scad(NonconvexReg::scad(0.1, 3.7).unwrap()),
            0.1,
        )
        .unwrap(),
    ];
    for spec in &specs {
        for (kind, sag) in [(SolverKind::Saga, false), (SolverKind::ProxSag, true)] {
            let out = run_baseline(spec, &cfg(kind, 0.01, 8, 3), None).unwrap();
            let want = dense_saga(spec, 0.01, 8 * 25, 3, sag);
            assert!(
                common::dist(&out.w, &want) <= 1e-10,
                "{kind:?} {:?}",
                spec.penalty
            );
        }
    }
}

#[test]
fn svrg_with_unit_inner_loop_is_gradient_descent() {
    let d = Dataset::from_dense_rows(vec![vec![1.5, -0.5, 2.0]], vec![1.0]).unwrap();
    let spec = lasso(d, 0.1);
    let eta = 0.1;
    let gd = run_baseline(&spec, &cfg(SolverKind::ProxGd, eta, 20, 0), None).unwrap();
    let mut c = cfg(SolverKind::ProxSvrg, eta, 40, 0);
    c.inner_len = Some(1);
    let svrg = run_baseline(&spec, &c, None).unwrap();
    // Each outer loop is a full pass for the snapshot plus one inner pass.
    let (g, s) = (gd.trace.objectives(), svrg.trace.objectives());
    for k in 0..=20 {
        assert!(
            (g[k] - s[2 * k]).abs() <= 1e-10,
            "pass {k}: {} vs {}",
            g[k],
            s[2 * k]
        );
    }
    assert!(common::dist(&gd.w, &svrg.w) <= 1e-10);
}

#[test]
fn saga_table_converges_to_gradients_at_optimum() {
    let spec = lasso(common::dense_regression(30, 8, 2), 0.05);
    let (w_hat, _, _) = prox_gd_to_stationarity(&spec, 1e-12, 1_000_000).unwrap();
    let lmax = spec.smoothness().into_iter().fold(0.0, f64::max);
    let (out, table) = saga_run_with_table(
        &spec,
        &cfg(SolverKind::Saga, 1.0 / (3.0 * lmax), 400, 5),
        None,
    )
    .unwrap();
    assert!(common::dist(&out.w, &w_hat) <= 1e-8);
    for (i, &t) in table.iter().enumerate() {
        let c = spec.loss.grad_coeff(spec.data(), i, &w_hat);
        assert!((t - c).abs() <= 1e-6, "sample {i}: {t} vs {c}");
    }
}

#[test]
fn gd_one_dimensional_closed_form() {
    // F(w) = ½(3 − 2w)² + 0.5|w| has minimizer soft(6, 0.5)/4.
    let d = Dataset::from_dense_rows(vec![vec![2.0]], vec![3.0]).unwrap();
    let out = run_baseline(
        &lasso(d, 0.5),
        &cfg(SolverKind::ProxGd, 0.125, 200, 0),
        None,
    )
    .unwrap();
    assert!((out.w[0] - 5.5 / 4.0).abs() <= 1e-10);
    // Zero data: the start is stationary.
    let z = Dataset::from_dense_rows(vec![vec![1.0, 1.0]], vec![0.0]).unwrap();
    let out = run_baseline(&lasso(z, 0.5), &cfg(SolverKind::ProxGd, 0.1, 3, 0), None).unwrap();
    assert_eq!(out.w, vec![0.0, 0.0]);
}

fn solve_all(
    spec: &ProblemSpec<f64>,
    lt: f64,
    sdca_step: f64,
    epochs: usize,
) -> Vec<(&'static str, Vec<f64>)> {
    let lmax = spec.smoothness().into_iter().fold(0.0, f64::max);
    let lip = spec.smooth_lipschitz();
    let sp = split(spec, lt).unwrap().with_step(sdca_step).unwrap();
    vec![
        (
            "sdca",
            run(&sp, &RunConfig::new(epochs, 1), None).unwrap().w,
        ),
        (
            "gd",
            run_baseline(
                spec,
                &cfg(SolverKind::ProxGd, 1.0 / lip, epochs * 4, 1),
                None,
            )
            .unwrap()
            .w,
        ),
        (
            "svrg",
            run_baseline(
                spec,
                &cfg(SolverKind::ProxSvrg, 1.0 / (4.0 * lmax), epochs, 1),
                None,
            )
            .unwrap()
            .w,
        ),
        (
            "saga",
            run_baseline(
                spec,
                &cfg(SolverKind::Saga, 1.0 / (3.0 * lmax), epochs, 1),
                None,
            )
            .unwrap()
            .w,
        ),
    ]
}

#[test]
fn convex_solvers_agree() {
    let d = common::dense_regression(60, 20, 3);
    let group = ConvexReg::Group(GroupPartition::contiguous(20, 4).unwrap());
    let specs = [
        lasso(d.clone(), 0.05),
        ProblemSpec::new(
            Arc::new(d),
            LossModel::squared(),
            Penalty::Convex(group),
            0.1,
        )
        .unwrap(),
    ];
    for spec in &specs {
        let sols = solve_all(spec, 0.25, 0.01, 300);
        for (a, wa) in &sols {
            for (b, wb) in &sols {
                assert!(
                    common::dist(wa, wb) <= 1e-5,
                    "{a} vs {b}: {}",
                    common::dist(wa, wb)
                );
            }
        }
    }
}

#[test]
fn nonconvex_solvers_reach_stationarity() {
    let d = common::dense_regression(80, 20, 4);
    let scad = ProblemSpec::new(
        Arc::new(d.clone()),
        LossModel::squared(),
        Penalty::Scad(NonconvexReg::scad(0.1, 3.7).unwrap()),
        0.1,
    )
    .unwrap();
    let corrected = ProblemSpec::new(
        Arc::new(d),
        LossModel::squared().with_correction(0.05).unwrap(),
        Penalty::l1(),
        0.05,
    )
    .unwrap();
    for spec in [&scad, &corrected] {
        let step = 1.0 / spec.smooth_lipschitz();
        for (name, w) in solve_all(spec, 0.1, 0.005, 400) {
            let r = spec.stationarity_residual(&w, step).unwrap();
            assert!(r <= 1e-6, "{name} {:?}: residual {r}", spec.penalty);
        }
        let sag = run_baseline(spec, &cfg(SolverKind::ProxSag, 0.01, 600, 2), None).unwrap();
        assert!(spec.stationarity_residual(&sag.w, step).unwrap() <= 1e-6);
    }
}

#[test]
fn sublinear_solvers_make_progress() {
    let spec = lasso(common::dense_regression(50, 10, 5), 0.05);
    let f0 = spec.objective(&[0.0; 10]);
    let (w_hat, _, _) = prox_gd_to_stationarity(&spec, 1e-12, 1_000_000).unwrap();
    let f_hat = spec.objective(&w_hat);
    for (kind, step) in [(SolverKind::ProxSgd, 0.05), (SolverKind::Rda, 10.0)] {
        let out = run_baseline(&spec, &cfg(kind, step, 50, 1), Some(f_hat)).unwrap();
        let gap = out.trace.last().unwrap().gap.unwrap();
        assert!(
            gap >= -1e-12 && gap < 5e-2 * (f0 - f_hat),
            "{kind:?}: {gap} of {}",
            f0 - f_hat
        );
    }
}

#[test]
fn baselines_are_deterministic_and_count_passes() {
    let spec = lasso(common::sparse_regression(40, 12, 0.3, 6), 0.05);
    for kind in SolverKind::ALL {
        let step = if kind == SolverKind::Rda { 10.0 } else { 0.01 };
        let c = cfg(kind, step, 7, 11);
        let a = run_baseline(&spec, &c, None).unwrap();
        let b = run_baseline(&spec, &c, None).unwrap();
        assert_eq!(a.w, b.w, "{kind:?}");
        assert_eq!(a.trace.objectives(), b.trace.objectives());
        assert_eq!(a.trace.epochs(), (0..=7).collect::<Vec<_>>(), "{kind:?}");
    }
}

#[test]
fn reference_matches_gd_reference_of_split() {
    let spec = lasso(common::dense_regression(30, 6, 7), 0.05);
    let sp = split(&spec, 0.25).unwrap();
    let r = compute_reference(&sp).unwrap();
    let out = run_baseline(
        &spec,
        &cfg(SolverKind::ProxGd, 1.0 / spec.smooth_lipschitz(), 2000, 0),
        None,
    )
    .unwrap();
    assert!(common::dist(&out.w, &r.w) <= 1e-9);
}
