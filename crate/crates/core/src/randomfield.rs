//! Single-site distributions and reproducible sampling of the random field.
//!
//! Every value `V(x, ω)` is a pure function of `(spec, seed, trial, x)`: a
//! keyed hash of the seed, the trial index and the coordinates of `x` gives
//! a 53-bit uniform, which is then pushed through the inverse CDF of the
//! single-site measure. There is no generator state, so the result does not
//! depend on the order in which points are visited or on how many threads
//! visit them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WEIGHT_SUM_TOL: f64 = 1e-12;

/// The common distribution of the i.i.d. single-site potential.
///
/// Only bounded supports are admitted, so every moment is finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistributionSpec {
    /// Value `hi` with probability `p`, `lo` otherwise.
    Bernoulli {
        #[serde(default = "half")]
        p: f64,
        #[serde(default)]
        lo: f64,
        #[serde(default = "one")]
        hi: f64,
    },
    Uniform {
        lo: f64,
        hi: f64,
    },
    Finite {
        values: Vec<f64>,
        weights: Vec<f64>,
    },
}

fn half() -> f64 {
    0.5
}

fn one() -> f64 {
    1.0
}

impl Default for DistributionSpec {
    fn default() -> Self {
        DistributionSpec::Bernoulli { p: 0.5, lo: 0.0, hi: 1.0 }
    }
}

/// The clause of the single-site hypothesis a distribution fails.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Violation {
    #[error("single-point support")]
    SinglePointSupport,
    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("weights sum to {0}, not 1")]
    WeightSum(f64),
    #[error("negative weight {0}")]
    NegativeWeight(f64),
    #[error("{values} values but {weights} weights")]
    LengthMismatch { values: usize, weights: usize },
    #[error("empty support")]
    EmptySupport,
    #[error("non-finite support point or bound")]
    Unbounded,
    #[error("uniform bounds reversed: lo={lo} > hi={hi}")]
    ReversedBounds { lo: f64, hi: f64 },
}

impl DistributionSpec {
    /// A point mass at `c`. Fails [`validate`]; used only by diagnostics
    /// that need a deterministic potential.
    pub fn point_mass(c: f64) -> Self {
        DistributionSpec::Finite { values: vec![c], weights: vec![1.0] }
    }

    /// Smallest and largest point of the support.
    pub fn support_bounds(&self) -> (f64, f64) {
        match self {
            DistributionSpec::Bernoulli { lo, hi, .. } | DistributionSpec::Uniform { lo, hi } => {
                (lo.min(*hi), lo.max(*hi))
            }
            DistributionSpec::Finite { values, .. } => {
                values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)))
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            DistributionSpec::Bernoulli { p, lo, hi } => (1.0 - p) * lo + p * hi,
            DistributionSpec::Uniform { lo, hi } => 0.5 * (lo + hi),
            DistributionSpec::Finite { values, weights } => values.iter().zip(weights).map(|(v, w)| v * w).sum(),
        }
    }

    /// `P(V <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            DistributionSpec::Bernoulli { p, lo, hi } => {
                let mut acc = 0.0;
                if *lo <= x {
                    acc += 1.0 - p;
                }
                if *hi <= x {
                    acc += p;
                }
                acc
            }
            DistributionSpec::Uniform { lo, hi } => {
                if x < *lo {
                    0.0
                } else if x >= *hi {
                    1.0
                } else {
                    (x - lo) / (hi - lo)
                }
            }
            DistributionSpec::Finite { values, weights } => {
                values.iter().zip(weights).filter(|(v, _)| **v <= x).map(|(_, w)| w).sum()
            }
        }
    }

    /// Inverse CDF applied to `u ∈ [0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        match self {
            DistributionSpec::Bernoulli { p, lo, hi } => {
                if u < *p {
                    *hi
                } else {
                    *lo
                }
            }
            DistributionSpec::Uniform { lo, hi } => lo + u * (hi - lo),
            DistributionSpec::Finite { values, weights } => {
                let mut acc = 0.0;
                for (v, w) in values.iter().zip(weights) {
                    acc += w;
                    if u < acc {
                        return *v;
                    }
                }
                // u falls in the rounding gap below 1.0
                *values.last().expect("validated finite spec has values")
            }
        }
    }
}

/// Check the single-site hypothesis: a proper probability measure whose
/// support is bounded and has at least two points.
pub fn validate(spec: &DistributionSpec) -> Result<(), Violation> {
    match spec {
        DistributionSpec::Bernoulli { p, lo, hi } => {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Violation::Unbounded);
            }
            if !(0.0..=1.0).contains(p) {
                return Err(Violation::ProbabilityOutOfRange(*p));
            }
            if *p == 0.0 || *p == 1.0 || lo == hi {
                return Err(Violation::SinglePointSupport);
            }
        }
        DistributionSpec::Uniform { lo, hi } => {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Violation::Unbounded);
            }
            if lo > hi {
                return Err(Violation::ReversedBounds { lo: *lo, hi: *hi });
            }
            if lo == hi {
                return Err(Violation::SinglePointSupport);
            }
        }
        DistributionSpec::Finite { values, weights } => {
            if values.len() != weights.len() {
                return Err(Violation::LengthMismatch { values: values.len(), weights: weights.len() });
            }
            if values.is_empty() {
                return Err(Violation::EmptySupport);
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Violation::Unbounded);
            }
            if let Some(w) = weights.iter().find(|w| !(**w >= 0.0)) {
                return Err(Violation::NegativeWeight(*w));
            }
            let total: f64 = weights.iter().sum();
            if (total - 1.0).abs() > WEIGHT_SUM_TOL {
                return Err(Violation::WeightSum(total));
            }
            let mut support: Vec<f64> =
                values.iter().zip(weights).filter(|(_, w)| **w > 0.0).map(|(v, _)| *v).collect();
            support.sort_by(f64::total_cmp);
            support.dedup();
            if support.len() < 2 {
                return Err(Violation::SinglePointSupport);
            }
        }
    }
    Ok(())
}

/// One realization of the field restricted to a finite region of `Z^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    values: BTreeMap<Vec<i64>, f64>,
}

impl FieldSample {
    /// Build a sample from explicit values (tests, fixed potentials).
    pub fn from_values(values: impl IntoIterator<Item = (Vec<i64>, f64)>) -> Self {
        Self { values: values.into_iter().collect() }
    }

    /// The same constant at every point of `region`.
    pub fn constant<'a>(region: impl IntoIterator<Item = &'a [i64]>, c: f64) -> Self {
        Self::from_values(region.into_iter().map(|p| (p.to_vec(), c)))
    }

    pub fn get(&self, point: &[i64]) -> Option<f64> {
        self.values.get(point).copied()
    }

    /// Like [`get`](Self::get) but reports an uncovered point as an error.
    pub fn value(&self, point: &[i64]) -> Result<f64> {
        self.get(point).ok_or_else(|| Error::Coverage(point.to_vec()))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn region(&self) -> impl Iterator<Item = &[i64]> {
        self.values.keys().map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[i64], f64)> {
        self.values.iter().map(|(k, v)| (k.as_slice(), *v))
    }

    /// Add `c` to every value.
    pub fn shifted(&self, c: f64) -> Self {
        Self::from_values(self.values.iter().map(|(k, v)| (k.clone(), v + c)))
    }
}

/// Sample `V` on `region` for the given `(seed, trial)`.
pub fn sample_field<'a>(
    spec: &DistributionSpec,
    region: impl IntoIterator<Item = &'a [i64]>,
    seed: u64,
    trial: u64,
) -> Result<FieldSample> {
    validate(spec)?;
    Ok(sample_field_unchecked(spec, region, seed, trial))
}

/// [`sample_field`] without the distribution check. Diagnostics only.
pub fn sample_field_unchecked<'a>(
    spec: &DistributionSpec,
    region: impl IntoIterator<Item = &'a [i64]>,
    seed: u64,
    trial: u64,
) -> FieldSample {
    FieldSample::from_values(region.into_iter().map(|p| (p.to_vec(), draw(spec, seed, trial, p))))
}

/// The value of the field at one point.
pub fn draw(spec: &DistributionSpec, seed: u64, trial: u64, point: &[i64]) -> f64 {
    spec.quantile(unit_uniform(point_key(seed, trial, point)))
}

/// SplitMix64 finalizer.
#[inline]
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// Keyed hash of `(seed, trial, point)`.
pub(crate) fn point_key(seed: u64, trial: u64, point: &[i64]) -> u64 {
    let mut h = mix64(seed.wrapping_add(GOLDEN));
    h = mix64(h ^ trial.wrapping_mul(GOLDEN).wrapping_add(0x632b_e59b_d9b4_e019));
    h = mix64(h ^ point.len() as u64);
    for &c in point {
        h = mix64(h.wrapping_add(GOLDEN) ^ c as u64);
    }
    h
}

/// Top 53 bits as a double in `[0, 1)`.
#[inline]
pub(crate) fn unit_uniform(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
