mod common;

use common::oracles::{self, agrees};
use gsdca::regularizers::{
    dlambda_prox_scalar, dlambda_scalar, scad_prox_scalar, scad_value, ConvexReg, GroupPartition,
    NonconvexReg,
};
use gsdca::rng::CounterRng;
use proptest::prelude::*;
use rand::Rng;

const CASES: usize = 2_000;

fn scad_params(rng: &mut CounterRng) -> (f64, f64, f64, f64) {
    let lambda = rng.random_range(0.05..0.5);
    let zeta = rng.random_range(2.5..5.0);
    let c = rng.random_range(0.0..3.0);
    let v = rng.random_range(-3.0..3.0);
    (v, c, lambda, zeta)
}

#[test]
fn value_examples() {
    assert_eq!(ConvexReg::L1.value(&[1.0, -2.0, 0.0]), 3.0);
    let g = ConvexReg::Group(GroupPartition::new(vec![vec![0, 1], vec![2]], 3).unwrap());
    assert_eq!(g.value(&[3.0, 4.0, 5.0]), 10.0);
    assert_eq!(g.value(&[0.0f64; 3]), 0.0);
    assert_eq!(ConvexReg::L1.dual_norm(&[1.0, -3.0, 2.0]), 3.0);
    assert_eq!(ConvexReg::L1.dual_norm(&[0.0f64; 3]), 0.0);
}

#[test]
fn l1_prox_example_matches_oracle() {
    let out = ConvexReg::L1.prox(&[3.0, -0.5, 1.0], 1.0);
    assert_eq!(out, vec![2.0, 0.0, 0.0]);
    for (&v, &w) in [3.0, -0.5, 1.0].iter().zip(&out) {
        let o = oracles::scalar_prox(v, 1.0, f64::abs);
        assert!((o - w).abs() < 1e-8, "{v}: {w} vs {o}");
    }
    assert_eq!(ConvexReg::L1.prox(&[3.0, -0.5], 0.0), vec![3.0, -0.5]);
}

#[test]
fn l1_prox_matches_scalar_oracle() {
    let mut rng = CounterRng::new(11);
    for _ in 0..CASES {
        let v: f64 = rng.random_range(-3.0..3.0);
        let c: f64 = rng.random_range(0.0..2.0);
        let w = ConvexReg::L1.prox(&[v], c)[0];
        let o = oracles::scalar_prox(v, c, f64::abs);
        let obj = |t: f64| 0.5 * (t - v) * (t - v) + c * t.abs();
        assert!(agrees(w, o, obj, 1e-6), "v={v} c={c}: {w} vs {o}");
    }
}

#[test]
fn group_prox_matches_block_oracle() {
    let mut rng = CounterRng::new(12);
    let part = GroupPartition::new(vec![vec![0, 3], vec![1, 4, 5], vec![2]], 6).unwrap();
    let g = ConvexReg::Group(part.clone());
    for _ in 0..CASES / 4 {
        let v: Vec<f64> = (0..6).map(|_| rng.random_range(-2.0..2.0)).collect();
        let c: f64 = rng.random_range(0.0..3.0);
        let w = g.prox(&v, c);
        for block in part.groups() {
            let vb: Vec<f64> = block.iter().map(|&j| v[j]).collect();
            let wb: Vec<f64> = block.iter().map(|&j| w[j]).collect();
            let o = oracles::block_prox(&vb, c);
            assert!(
                common::dist(&wb, &o) <= 1e-6,
                "block {block:?}: {wb:?} vs {o:?}"
            );
        }
    }
}

#[test]
fn small_group_is_zeroed() {
    let g = ConvexReg::Group(GroupPartition::contiguous(4, 2).unwrap());
    let w = g.prox(&[0.3f64, 0.4, 3.0, 4.0], 0.5);
    assert_eq!(&w[..2], &[0.0, 0.0]);
    assert!((w[2] - 2.7).abs() < 1e-12 && (w[3] - 3.6).abs() < 1e-12);
}

#[test]
fn scad_prox_matches_scalar_oracle() {
    let mut rng = CounterRng::new(13);
    for _ in 0..CASES {
        let (v, c, lambda, zeta) = scad_params(&mut rng);
        let w = scad_prox_scalar(v, c, lambda, zeta);
        let o = oracles::scalar_prox(v, c, |t| oracles::scad(t, lambda, zeta));
        let obj = |t: f64| 0.5 * (t - v) * (t - v) + c * oracles::scad(t, lambda, zeta);
        assert!(
            agrees(w, o, obj, 1e-6),
            "v={v} c={c} λ={lambda} ζ={zeta}: {w} vs {o}"
        );
    }
}

#[test]
fn dlambda_prox_matches_scalar_oracle() {
    let mut rng = CounterRng::new(14);
    for _ in 0..CASES {
        let (v, c, lambda, zeta) = scad_params(&mut rng);
        let w = dlambda_prox_scalar(v, c, lambda, zeta);
        let o = oracles::scalar_prox(v, c, |t| oracles::dlambda(t, lambda, zeta));
        assert!(
            (w - o).abs() <= 1e-6,
            "v={v} c={c} λ={lambda} ζ={zeta}: {w} vs {o}"
        );
    }
}

#[test]
fn scad_value_matches_independent_formula() {
    let mut rng = CounterRng::new(15);
    for _ in 0..1000 {
        let (t, _, lambda, zeta) = scad_params(&mut rng);
        assert!((scad_value(t, lambda, zeta) - oracles::scad(t, lambda, zeta)).abs() < 1e-14);
        assert!(
            (dlambda_scalar(t, lambda, zeta) - oracles::dlambda(t, lambda, zeta)).abs() < 1e-12
        );
    }
    assert!((scad_value(1.0f64, 0.05, 3.7) - 0.005875).abs() < 1e-15);
}

#[test]
fn constrained_example() {
    let w = ConvexReg::L1
        .prox_constrained(&[10.0, 0.0], 1.0, 2.0)
        .unwrap();
    // Brute force over the raised threshold: the smallest t with ||soft(v, t)||₁ ≤ 2.
    let mut t = 1.0;
    while (10.0f64 - t).max(0.0) > 2.0 {
        t += 1e-7;
    }
    assert!((w[0] - (10.0 - t)).abs() < 1e-6 && w[1] == 0.0, "{w:?}");
    let free = ConvexReg::L1.prox(&[1.0, -0.5], 0.1);
    assert_eq!(
        ConvexReg::L1
            .prox_constrained(&[1.0, -0.5], 0.1, 10.0)
            .unwrap(),
        free
    );
    assert_eq!(
        ConvexReg::L1
            .prox_constrained(&[1.0, -0.5], 0.1, f64::INFINITY)
            .unwrap(),
        free
    );
}

#[test]
fn assumption_report_for_scad() {
    let grid: Vec<f64> = (1..=4000).map(|k| k as f64 * 5e-4).collect();
    let rep = NonconvexReg::scad(0.05, 3.7)
        .unwrap()
        .validate_assumptions(&grid);
    assert!(rep.all_pass(), "{rep:?}");
    assert!((rep.l_d - 1.0).abs() < 1e-6);
    assert!((rep.mu - 1.0 / 2.7).abs() < 1e-15);
    assert!((rep.limit_slope - 0.05).abs() < 1e-6);
}

fn objective(reg: &ConvexReg, v: &[f64], c: f64, w: &[f64]) -> f64 {
    0.5 * common::dist(w, v).powi(2) + c * reg.value(w)
}

fn regs() -> Vec<ConvexReg> {
    vec![
        ConvexReg::L1,
        ConvexReg::Group(GroupPartition::contiguous(6, 2).unwrap()),
        ConvexReg::Group(GroupPartition::contiguous(6, 3).unwrap()),
    ]
}

fn vec6() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0..5.0f64, 6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn prox_beats_perturbations(v in vec6(), c in 0.0..3.0f64, seed in any::<u64>()) {
        let mut rng = CounterRng::new(seed);
        for reg in regs() {
            let w = reg.prox(&v, c);
            let f = objective(&reg, &v, c, &w);
            for _ in 0..100 {
                let scale = 10f64.powi(rng.random_range(-6..1));
                let z: Vec<f64> = w.iter().map(|&x| x + scale * common::normal(&mut rng)).collect();
                prop_assert!(f <= objective(&reg, &v, c, &z) + 1e-10);
            }
        }
    }

    #[test]
    fn scalar_nonconvex_prox_beats_perturbations(v in -3.0..3.0f64, c in 0.0..3.0f64, seed in any::<u64>()) {
        let mut rng = CounterRng::new(seed);
        let (lambda, zeta) = (0.3, 3.7);
        let w_s = scad_prox_scalar(v, c, lambda, zeta);
        let w_d = dlambda_prox_scalar(v, c, lambda, zeta);
        let hs = |t: f64| 0.5 * (t - v) * (t - v) + c * scad_value(t, lambda, zeta);
        let hd = |t: f64| 0.5 * (t - v) * (t - v) + c * dlambda_scalar(t, lambda, zeta);
        for _ in 0..100 {
            let z = rng.random_range(-4.0..4.0);
            prop_assert!(hs(w_s) <= hs(z) + 1e-10);
            prop_assert!(hd(w_d) <= hd(z) + 1e-10);
        }
    }

    #[test]
    fn convex_prox_is_nonexpansive(v1 in vec6(), v2 in vec6(), c in 0.0..3.0f64) {
        for reg in regs() {
            let d = common::dist(&reg.prox(&v1, c), &reg.prox(&v2, c));
            prop_assert!(d <= common::dist(&v1, &v2) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn constrained_prox_is_feasible(v in vec6(), c in 0.0..1.0f64, rho in 0.01..5.0f64) {
        for reg in regs() {
            let w = reg.prox_constrained(&v, c, rho).unwrap();
            prop_assert!(reg.value(&w) <= rho * (1.0 + 1e-9));
            // Optimal among feasible shrinkages of the unconstrained prox.
            let f = objective(&reg, &v, c, &w);
            for k in 1..=20 {
                let t = k as f64 / 20.0;
                let z: Vec<f64> = reg.prox(&v, c).iter().map(|&x| x * t).collect();
                if reg.value(&z) <= rho {
                    prop_assert!(f <= objective(&reg, &v, c, &z) + 1e-9);
                }
            }
        }
    }

    #[test]
    fn holder_inequality(u in vec6(), w in vec6()) {
        for reg in regs() {
            let lhs = common::dense_dot(&u, &w).abs();
            prop_assert!(lhs <= reg.dual_norm(&u) * reg.value(&w) * (1.0 + 1e-12) + 1e-300);
        }
    }

    #[test]
    fn dlambda_midpoint_convex(a in -2.0..2.0f64, b in -2.0..2.0f64, lambda in 0.05..1.0f64, zeta in 2.1..6.0f64) {
        let mid = dlambda_scalar(0.5 * (a + b), lambda, zeta);
        let avg = 0.5 * (dlambda_scalar(a, lambda, zeta) + dlambda_scalar(b, lambda, zeta));
        prop_assert!(mid <= avg + 1e-12);
    }

    #[test]
    fn scad_prox_is_odd(v in -5.0..5.0f64, c in 0.0..5.0f64) {
        prop_assert_eq!(scad_prox_scalar(-v, c, 0.2, 3.7), -scad_prox_scalar(v, c, 0.2, 3.7));
        prop_assert_eq!(dlambda_prox_scalar(-v, c, 0.2, 3.7), -dlambda_prox_scalar(v, c, 0.2, 3.7));
    }
}
