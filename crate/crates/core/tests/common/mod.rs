#![allow(dead_code)]

pub mod oracles;

use std::sync::Arc;

use gsdca::data::{Dataset, SparseRow};
use gsdca::rng::CounterRng;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn normal(rng: &mut CounterRng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn normal_vec(rng: &mut CounterRng, len: usize, scale: f64) -> Vec<f64> {
    (0..len).map(|_| scale * normal(rng)).collect()
}

/// Gaussian rows with a planted linear model plus unit noise.
pub fn dense_regression(n: usize, p: usize, seed: u64) -> Dataset<f64> {
    let mut rng = CounterRng::new(seed);
    let truth: Vec<f64> = (0..p).map(|j| if j % 4 == 0 { 1.0 } else { 0.0 }).collect();
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let x = normal_vec(&mut rng, p, 1.0);
        let y = x.iter().zip(&truth).map(|(a, b)| a * b).sum::<f64>() + normal(&mut rng);
        rows.push(x);
        labels.push(y);
    }
    Dataset::from_dense_rows(rows, labels).unwrap()
}

/// ±1 labels from a noisy linear score; for logistic problems.
pub fn dense_classification(n: usize, p: usize, seed: u64) -> Dataset<f64> {
    let d = dense_regression(n, p, seed);
    let labels = d
        .labels()
        .iter()
        .map(|&y| if y >= 0.0 { 1.0 } else { -1.0 })
        .collect();
    let rows = (0..d.n()).map(|i| d.row(i).to_dense()).collect();
    Dataset::from_dense_rows(rows, labels).unwrap()
}

/// Sparse rows with roughly `density·p` Gaussian entries each (at least one).
pub fn sparse_regression(n: usize, p: usize, density: f64, seed: u64) -> Dataset<f64> {
    let mut rng = CounterRng::new(seed);
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let mut idx = Vec::new();
        let mut val = Vec::new();
        for j in 0..p {
            if rng.random::<f64>() < density {
                idx.push(j);
                val.push(normal(&mut rng));
            }
        }
        if idx.is_empty() {
            idx.push(rng.random_range(0..p));
            val.push(1.0);
        }
        labels.push(val.iter().sum::<f64>() + 0.5 * normal(&mut rng));
        rows.push(SparseRow::new(idx, val, p).unwrap());
    }
    Dataset::from_sparse_rows(rows, labels, p).unwrap()
}

pub fn arc(d: Dataset<f64>) -> Arc<Dataset<f64>> {
    Arc::new(d)
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn dense_dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
