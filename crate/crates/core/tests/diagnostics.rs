mod common;

use std::sync::Arc;

use gsdca::data::Dataset;
use gsdca::diagnostics::{
    compute_reference, conjugate_value, fit_linear_rate, potentials, potentials_from, Reference,
};
use gsdca::losses::LossModel;
use gsdca::regularizers::{soft_threshold, ConvexReg, GroupPartition, NonconvexReg, Penalty};
use gsdca::rng::CounterRng;
use gsdca::sdca::{run_with, RunConfig};
use gsdca::splitting::{split, split_direct, BaseReg, Composite, ProblemSpec, SplitProblem};
use gsdca::Error;
use rand::Rng;

fn specs(d: &Arc<Dataset<f64>>) -> Vec<(ProblemSpec<f64>, f64)> {
    let group = ConvexReg::Group(GroupPartition::contiguous(d.p(), 2).unwrap());
    vec![
        (
            ProblemSpec::new(d.clone(), LossModel::squared(), Penalty::l1(), 0.05).unwrap(),
            0.25,
        ),
        (
            ProblemSpec::new(d.clone(), LossModel::squared(), Penalty::Convex(group), 0.1).unwrap(),
            0.1,
        ),
        (
            ProblemSpec::new(
                d.clone(),
                LossModel::squared(),
                Penalty::Elastic(ConvexReg::L1),
                0.1,
            )
            .unwrap(),
            0.2,
        ),
        (
            ProblemSpec::new(
                d.clone(),
                LossModel::squared().with_correction(0.05).unwrap(),
                Penalty::l1(),
                0.05,
            )
            .unwrap(),
            0.1,
        ),
        (
            ProblemSpec::new(
                d.clone(),
                LossModel::squared(),
                Penalty::Scad(NonconvexReg::scad(0.05, 3.7).unwrap()),
                0.05,
            )
            .unwrap(),
            0.1,
        ),
    ]
}

fn sylvester_hadamard(k: u32) -> Vec<Vec<f64>> {
    let mut h = vec![vec![1.0]];
    for _ in 0..k {
        let m = h.len();
        let mut next = vec![vec![0.0; 2 * m]; 2 * m];
        for i in 0..m {
            for j in 0..m {
                next[i][j] = h[i][j];
                next[i][j + m] = h[i][j];
                next[i + m][j] = h[i][j];
                next[i + m][j + m] = -h[i][j];
            }
        }
        h = next;
    }
    h
}

#[test]
fn orthogonal_design_has_soft_threshold_solution() {
    // Columns of an 8×8 Hadamard matrix satisfy XᵀX = nI.
    let h = sylvester_hadamard(3);
    let rows: Vec<Vec<f64>> = h.iter().map(|r| r[..6].to_vec()).collect();
    let mut rng = CounterRng::new(1);
    let y = common::normal_vec(&mut rng, 8, 1.0);
    let d = Arc::new(Dataset::from_dense_rows(rows.clone(), y.clone()).unwrap());
    let lambda = 0.3;
    let spec = ProblemSpec::new(d, LossModel::squared(), Penalty::l1(), lambda).unwrap();
    let r = compute_reference(&split(&spec, 0.25).unwrap()).unwrap();
    for j in 0..6 {
        let corr = (0..8).map(|i| rows[i][j] * y[i]).sum::<f64>() / 8.0;
        let want = soft_threshold(corr, lambda);
        assert!(
            (r.w[j] - want).abs() <= 1e-10,
            "coordinate {j}: {} vs {want}",
            r.w[j]
        );
    }
}

fn check_reference(sp: &SplitProblem<f64>, r: &Reference<f64>) {
    let n = sp.n_samples();
    let mut agg = sp.data().combine(&r.alpha);
    for (a, &b) in agg.iter_mut().zip(&r.aug) {
        *a += b;
    }
    let s = 1.0 / (sp.lambda_tilde() * sp.n_components() as f64);
    for (a, &v) in agg.iter().zip(&r.v) {
        assert!((a * s - v).abs() <= 1e-9);
    }
    assert!(common::dist(&sp.composite().prox(&r.v).unwrap(), &r.w) <= 1e-6);
    for i in 0..n {
        assert!(
            (r.alpha[i] + sp.component_coeff(i, &r.w)).abs() <= 1e-12 * (1.0 + r.alpha[i].abs())
        );
    }
}

#[test]
fn reference_invariants_hold() {
    let d = Arc::new(common::dense_regression(40, 10, 2));
    for (spec, lt) in specs(&d) {
        let sp = split(&spec, lt).unwrap();
        let r = compute_reference(&sp).unwrap();
        assert!(r.residual <= 1e-12);
        check_reference(&sp, &r);
    }
    let spec = ProblemSpec::new(
        d,
        LossModel::squared(),
        Penalty::Elastic(ConvexReg::L1),
        0.1,
    )
    .unwrap();
    let sp = split_direct(&spec).unwrap();
    let r = compute_reference(&sp).unwrap();
    assert!(r.aug.is_empty());
    check_reference(&sp, &r);
}

#[test]
fn reference_does_not_depend_on_sample_order() {
    let d = common::dense_regression(40, 10, 3);
    let perm: Vec<usize> = (0..40).map(|i| (i * 17) % 40).collect();
    let rows: Vec<Vec<f64>> = perm.iter().map(|&i| d.row(i).to_dense()).collect();
    let labels: Vec<f64> = perm.iter().map(|&i| d.label(i)).collect();
    let shuffled = Arc::new(Dataset::from_dense_rows(rows, labels).unwrap());
    let d = Arc::new(d);
    for ((a, lt), (b, _)) in specs(&d).into_iter().zip(specs(&shuffled)).take(3) {
        let ra = compute_reference(&split(&a, lt).unwrap()).unwrap();
        let rb = compute_reference(&split(&b, lt).unwrap()).unwrap();
        assert!(common::dist(&ra.w, &rb.w) <= 1e-9);
    }
}

#[test]
fn conjugate_properties() {
    let mut rng = CounterRng::new(4);
    let quad_only = Composite {
        base: BaseReg::Convex(ConvexReg::L1),
        weight: 0.0,
        quad: 1.0,
        radius: f64::INFINITY,
    };
    for _ in 0..100 {
        let v = common::normal_vec(&mut rng, 5, 2.0);
        let half = 0.5 * common::dense_dot(&v, &v);
        assert!((conjugate_value(&quad_only, &v).unwrap() - half).abs() <= 1e-12 * (1.0 + half));
    }
    let composites = [
        Composite {
            base: BaseReg::Convex(ConvexReg::L1),
            weight: 0.4,
            quad: 1.0,
            radius: f64::INFINITY,
        },
        Composite {
            base: BaseReg::Convex(ConvexReg::L1),
            weight: 0.4,
            quad: 1.0,
            radius: 1.5,
        },
        Composite {
            base: BaseReg::Convex(ConvexReg::Group(GroupPartition::contiguous(5, 1).unwrap())),
            weight: 2.0,
            quad: 3.0,
            radius: f64::INFINITY,
        },
        Composite {
            base: BaseReg::Dlambda(NonconvexReg::scad(0.1, 3.7).unwrap()),
            weight: 0.5,
            quad: 1.0,
            radius: f64::INFINITY,
        },
    ];
    for g in &composites {
        for _ in 0..200 {
            let v = common::normal_vec(&mut rng, 5, 2.0);
            let mut w = common::normal_vec(&mut rng, 5, 1.0);
            if g.radius.is_finite() {
                let r = ConvexReg::L1.value(&w);
                if r > g.radius {
                    w.iter_mut().for_each(|x| *x *= g.radius / r);
                }
            }
            let lhs = g.value(&w) + conjugate_value(g, &v).unwrap();
            assert!(lhs >= common::dense_dot(&w, &v) - 1e-10, "{g:?}");
        }
    }
}

#[test]
fn fenchel_young_is_tight_at_the_optimal_pair() {
    let d = Arc::new(common::dense_regression(40, 10, 5));
    for (spec, lt) in specs(&d) {
        let sp = split(&spec, lt).unwrap();
        let r = compute_reference(&sp).unwrap();
        let g = sp.composite();
        let slack =
            g.value(&r.w) + conjugate_value(g, &r.v).unwrap() - common::dense_dot(&r.w, &r.v);
        assert!(slack.abs() <= 1e-8, "{:?}: {slack}", spec.penalty);
    }
}

#[test]
fn potentials_vanish_at_the_reference() {
    let d = Arc::new(common::sparse_regression(40, 10, 0.3, 6));
    for (spec, lt) in specs(&d) {
        let sp = split(&spec, lt).unwrap();
        let r = compute_reference(&sp).unwrap();
        let p = potentials_from(&sp, &r.alpha, &r.aug, &r.v, &r).unwrap();
        assert!(
            p.a.abs() <= 1e-9 && p.b.abs() <= 1e-9 && p.c.abs() <= 1e-9,
            "{p:?}"
        );
    }
}

#[test]
fn potentials_along_trajectories() {
    let d = Arc::new(common::sparse_regression(40, 10, 0.3, 7));
    for (spec, lt) in specs(&d) {
        let sp = split(&spec, lt).unwrap().with_step(2e-3).unwrap();
        let r = compute_reference(&sp).unwrap();
        // Pseudo-duals â_j = −∇φ_j(ŵ) written out densely.
        let n = sp.n_samples();
        let scale = (n as f64 + 1.0) / n as f64;
        let a_hat: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let x = sp.data().row(i).to_dense();
                let c = common::dense_dot(&x, &r.w) - sp.data().label(i);
                x.iter().map(|xj| -scale * c * xj).collect()
            })
            .chain(std::iter::once(
                r.w.iter()
                    .map(|w| (sp.lambda_tilde() + sp.mu()) * (n as f64 + 1.0) * w)
                    .collect(),
            ))
            .collect();
        run_with(&sp, &RunConfig::new(30, 1), Some(&r), |state, _| {
            let p = potentials(&sp, state, &r).unwrap();
            let dw = common::dist(state.w(), &r.w);
            assert!(p.b >= dw * dw - 1e-8, "B {} < {}", p.b, dw * dw);
            let dense_a: f64 = (0..sp.n_components())
                .map(|j| {
                    let a = state.dual(&sp, j);
                    common::dist(&a, &a_hat[j]).powi(2) / sp.probs()[j]
                })
                .sum();
            assert!(
                (p.a - dense_a).abs() <= 1e-10 * (1.0 + dense_a),
                "{} vs {dense_a}",
                p.a
            );
        })
        .unwrap();
    }
}

#[test]
fn rate_fits() {
    let epochs: Vec<usize> = (0..60).collect();
    let exact: Vec<f64> = epochs.iter().map(|&t| 0.9f64.powi(t as i32)).collect();
    let f = fit_linear_rate(&epochs, &exact, 1e-12).unwrap();
    assert!((f.rate - 0.9).abs() <= 1e-9 && (f.r_squared - 1.0).abs() <= 1e-9);

    let constant = vec![0.5; 60];
    let f = fit_linear_rate(&epochs, &constant, 1e-12).unwrap();
    assert!((f.rate - 1.0).abs() <= 1e-12);

    let mut rng = CounterRng::new(8);
    for _ in 0..50 {
        let noisy: Vec<f64> = exact
            .iter()
            .map(|&g| g * (1.0 + 0.05 * rng.random_range(-1.0..1.0)))
            .collect();
        let f = fit_linear_rate(&epochs, &noisy, 1e-12).unwrap();
        assert!((f.rate - 0.9).abs() <= 0.02, "{}", f.rate);
    }

    let short = vec![1.0, 0.5, 0.25, 1e-20, 1e-20, 1e-20];
    assert!(matches!(
        fit_linear_rate(&(0..6).collect::<Vec<_>>(), &short, 1e-12),
        Err(Error::InsufficientData(_))
    ));
}
