//! Synthetic regression designs with sparse ground truth.
//!
//! Every row draws from its own RNG stream, so a dataset depends only on the
//! spec and the seed.

use rand::seq::index;
use rand_distr::{Distribution, StandardNormal};

use crate::data::Dataset;
use crate::regularizers::GroupPartition;
use crate::rng::CounterRng;
use crate::{linalg, Error, Result, Scalar};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Family {
    /// Equicorrelated Gaussian design, `±1` entries on `s` coordinates.
    Lasso,
    /// Equicorrelated Gaussian design, `active_groups` contiguous groups of
    /// size `group_size` with Uniform[−1, 1] entries.
    Group {
        group_size: usize,
        active_groups: usize,
    },
    /// `x ~ N(0, I)`; the observed rows are `z = x + ς`, `ς ~ N(0, γI)`.
    Corrected { gamma: f64 },
    /// `x ~ N(0, 2I)`, `±1` entries on `s` coordinates.
    Scad,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SynthSpec {
    pub family: Family,
    pub n: usize,
    pub p: usize,
    /// Support size (unused for the group family).
    pub s: usize,
    /// Equicorrelation `b` (lasso and group families).
    pub b: f64,
    /// Noise standard deviation.
    pub sigma: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn new(family: Family, n: usize, p: usize, s: usize, seed: u64) -> Self {
        Self {
            family,
            n,
            p,
            s,
            b: 0.0,
            sigma: 1.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.p == 0 {
            return Err(Error::Invalid("n and p must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.b) {
            return Err(Error::Invalid(format!(
                "equicorrelation must lie in [0, 1), got {}",
                self.b
            )));
        }
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(Error::Invalid(format!(
                "σ must be nonnegative, got {}",
                self.sigma
            )));
        }
        match self.family {
            Family::Group {
                group_size,
                active_groups,
            } => {
                if group_size == 0 || !self.p.is_multiple_of(group_size) {
                    return Err(Error::Invalid(format!(
                        "group size {group_size} must divide p = {}",
                        self.p
                    )));
                }
                if active_groups > self.p / group_size {
                    return Err(Error::Invalid(format!(
                        "{active_groups} active groups exceed the {} available",
                        self.p / group_size
                    )));
                }
            }
            Family::Corrected { gamma } => {
                if !(gamma >= 0.0) || !gamma.is_finite() {
                    return Err(Error::Invalid(format!(
                        "corruption variance must be nonnegative, got {gamma}"
                    )));
                }
                self.check_support()?;
            }
            Family::Lasso | Family::Scad => self.check_support()?,
        }
        Ok(())
    }

    fn check_support(&self) -> Result<()> {
        if self.s > self.p {
            return Err(Error::Invalid(format!(
                "support size {} exceeds p = {}",
                self.s, self.p
            )));
        }
        Ok(())
    }
}

/// Generated data with its ground truth.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthData<T> {
    pub data: Dataset<T>,
    pub w_star: Vec<T>,
    /// Corruption variance `γ_ς` to use as loss correction (0 unless corrected).
    pub gamma: T,
    /// Partition for the group family.
    pub groups: Option<GroupPartition>,
}

/// Dispatches on the family.
pub fn generate<T: Scalar>(spec: &SynthSpec) -> Result<SynthData<T>> {
    match spec.family {
        Family::Lasso => gen_lasso(spec),
        Family::Group { .. } => gen_group(spec),
        Family::Corrected { .. } => gen_corrected(spec),
        Family::Scad => gen_scad(spec),
    }
}

const TRUTH_STREAM: u64 = 0;
const ROW_STREAM_BASE: u64 = 1;

fn normal(rng: &mut CounterRng) -> f64 {
    StandardNormal.sample(rng)
}

fn wrong_family(expected: &str, got: Family) -> Error {
    Error::Misuse(format!("{expected} generator called with {got:?}"))
}

/// `±1` entries on `s` uniformly chosen coordinates.
fn sparse_signs(spec: &SynthSpec) -> Vec<f64> {
    let mut rng = CounterRng::new(spec.seed).stream(TRUTH_STREAM);
    let mut w = vec![0.0; spec.p];
    let mut support = index::sample(&mut rng, spec.p, spec.s).into_vec();
    support.sort_unstable();
    for j in support {
        w[j] = if rng.below(2) == 0 { 1.0 } else { -1.0 };
    }
    w
}

/// Rows `x = scale·(√(1−b)·g + √b·z·1)` and responses `xᵀw* + σξ`. With
/// positive `corruption` the stored row is `x + ς`, drawn after `y`.
fn build<T: Scalar>(
    spec: &SynthSpec,
    w_star: Vec<f64>,
    scale: f64,
    corruption: f64,
    gamma: T,
    groups: Option<GroupPartition>,
) -> Result<SynthData<T>> {
    let root = CounterRng::new(spec.seed);
    let p = spec.p;
    let a = (1.0 - spec.b).sqrt();
    let c = spec.b.sqrt();
    let noise_sd = corruption.sqrt();
    let mut values = Vec::with_capacity(spec.n * p);
    let mut labels = Vec::with_capacity(spec.n);
    let mut x = vec![0.0; p];
    for i in 0..spec.n {
        let mut rng = root.stream(ROW_STREAM_BASE + i as u64);
        let z = normal(&mut rng);
        for xj in x.iter_mut() {
            *xj = scale * (a * normal(&mut rng) + c * z);
        }
        let y = linalg::dot(&x, &w_star) + spec.sigma * normal(&mut rng);
        if corruption > 0.0 {
            for xj in x.iter_mut() {
                *xj += noise_sd * normal(&mut rng);
            }
        }
        values.extend(x.iter().map(|&v| T::lit(v)));
        labels.push(T::lit(y));
    }
    Ok(SynthData {
        data: Dataset::dense(p, values, labels)?,
        w_star: w_star.into_iter().map(T::lit).collect(),
        gamma,
        groups,
    })
}

pub fn gen_lasso<T: Scalar>(spec: &SynthSpec) -> Result<SynthData<T>> {
    if spec.family != Family::Lasso {
        return Err(wrong_family("lasso", spec.family));
    }
    spec.validate()?;
    build(spec, sparse_signs(spec), 1.0, 0.0, T::zero(), None)
}

pub fn gen_group<T: Scalar>(spec: &SynthSpec) -> Result<SynthData<T>> {
    let Family::Group {
        group_size,
        active_groups,
    } = spec.family
    else {
        return Err(wrong_family("group", spec.family));
    };
    spec.validate()?;
    let n_groups = spec.p / group_size;
    let mut rng = CounterRng::new(spec.seed).stream(TRUTH_STREAM);
    let mut active = index::sample(&mut rng, n_groups, active_groups).into_vec();
    active.sort_unstable();
    let mut w = vec![0.0; spec.p];
    for g in active {
        for wj in &mut w[g * group_size..(g + 1) * group_size] {
            *wj = 2.0 * rng.uniform() - 1.0;
        }
    }
    let part = GroupPartition::contiguous(spec.p, group_size)?;
    build(spec, w, 1.0, 0.0, T::zero(), Some(part))
}

pub fn gen_corrected<T: Scalar>(spec: &SynthSpec) -> Result<SynthData<T>> {
    let Family::Corrected { gamma } = spec.family else {
        return Err(wrong_family("corrected", spec.family));
    };
    spec.validate()?;
    let plain = SynthSpec { b: 0.0, ..*spec };
    build(&plain, sparse_signs(spec), 1.0, gamma, T::lit(gamma), None)
}

pub fn gen_scad<T: Scalar>(spec: &SynthSpec) -> Result<SynthData<T>> {
    if spec.family != Family::Scad {
        return Err(wrong_family("scad", spec.family));
    }
    spec.validate()?;
    let plain = SynthSpec { b: 0.0, ..*spec };
    build(
        &plain,
        sparse_signs(spec),
        std::f64::consts::SQRT_2,
        0.0,
        T::zero(),
        None,
    )
}

/// `Γ̂w = (1/n)Σ(z_iᵀw)z_i − γw`.
pub fn gamma_hat_apply<T: Scalar>(d: &Dataset<T>, w: &[T], gamma: T) -> Vec<T> {
    let inv_n = T::one() / T::from_usize_lossy(d.n());
    let m: Vec<T> = d.margins(w).into_iter().map(|x| x * inv_n).collect();
    let mut out = d.combine(&m);
    linalg::axpy(-gamma, w, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_empty_support_gives_zero_labels() {
        let mut s = SynthSpec::new(Family::Lasso, 20, 5, 0, 3);
        s.sigma = 0.0;
        let d: SynthData<f64> = gen_lasso(&s).unwrap();
        assert!(d.data.labels().iter().all(|&y| y == 0.0));
    }

    #[test]
    fn support_is_exact() {
        let s = SynthSpec::new(Family::Lasso, 5, 50, 7, 11);
        let d: SynthData<f64> = gen_lasso(&s).unwrap();
        assert_eq!(d.w_star.iter().filter(|&&x| x != 0.0).count(), 7);
        assert!(d.w_star.iter().all(|&x| x == 0.0 || x.abs() == 1.0));
    }

    #[test]
    fn validation() {
        let mut s = SynthSpec::new(Family::Lasso, 5, 5, 6, 0);
        assert!(s.validate().is_err());
        s.s = 2;
        s.b = 1.0;
        assert!(s.validate().is_err());
        let g = SynthSpec::new(
            Family::Group {
                group_size: 3,
                active_groups: 1,
            },
            5,
            10,
            0,
            0,
        );
        assert!(g.validate().is_err());
        assert!(matches!(
            gen_scad::<f64>(&SynthSpec::new(Family::Lasso, 5, 5, 1, 0)),
            Err(Error::Misuse(_))
        ));
    }
}
