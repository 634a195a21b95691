//! Monte Carlo oracle.
//!
//! Pairs are drawn by conditional inversion of the copula and mapped through
//! the marginal quantile functions. The sample is split into fixed chunks of
//! [`CHUNK_SIZE`] pairs; chunk `i` draws from ChaCha8 stream `i` of the seed,
//! so the batch does not depend on how many threads produced it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::aggregate::AggregateExpPortfolio;
use crate::copula::FgmCopula;
use crate::error::{domain, Error, Result};
use crate::extremes::BivariatePortfolio;
use crate::marginals::{Alpha, Marginal};
use crate::measure::{Measure, Target};

pub const CHUNK_SIZE: usize = 1 << 16;

/// Minimum number of exceedances for an empirical CTE.
pub const MIN_TAIL_COUNT: usize = 30;

/// Anything that can be sampled as a pair of marginals under an FGM copula.
pub trait PairModel {
    fn marginal_pair(&self) -> (Marginal, Marginal);
    fn pair_copula(&self) -> FgmCopula;
}

impl PairModel for BivariatePortfolio {
    fn marginal_pair(&self) -> (Marginal, Marginal) {
        (self.m1(), self.m2())
    }
    fn pair_copula(&self) -> FgmCopula {
        self.copula()
    }
}

impl PairModel for AggregateExpPortfolio {
    fn marginal_pair(&self) -> (Marginal, Marginal) {
        (self.m1().into(), self.m2().into())
    }
    fn pair_copula(&self) -> FgmCopula {
        self.copula()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    x1: Vec<f64>,
    x2: Vec<f64>,
    seed: u64,
}

impl SampleBatch {
    pub fn len(&self) -> usize {
        self.x1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x1.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn x1(&self) -> &[f64] {
        &self.x1
    }

    pub fn x2(&self) -> &[f64] {
        &self.x2
    }

    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.x1.iter().copied().zip(self.x2.iter().copied())
    }

    pub fn project(&self, target: Target) -> Vec<f64> {
        self.pairs().map(|(a, b)| target.apply(a, b)).collect()
    }

    pub fn sorted(&self, target: Target) -> SortedSample {
        SortedSample::from_finite(self.project(target))
    }
}

fn sample_chunk(m1: &Marginal, m2: &Marginal, c: &FgmCopula, seed: u64, chunk: usize, len: usize) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    (0..len)
        .map(|_| {
            let u: f64 = rng.random();
            let w: f64 = rng.random();
            let v = c.conditional_quantile_unchecked(w, u);
            (m1.quantile(u), m2.quantile(v))
        })
        .collect()
}

fn chunk_lengths(n: usize) -> impl Iterator<Item = (usize, usize)> {
    let chunks = n.div_ceil(CHUNK_SIZE);
    (0..chunks).map(move |i| (i, CHUNK_SIZE.min(n - i * CHUNK_SIZE)))
}

fn assemble(chunks: Vec<Vec<(f64, f64)>>, n: usize, seed: u64) -> SampleBatch {
    let mut x1 = Vec::with_capacity(n);
    let mut x2 = Vec::with_capacity(n);
    for (a, b) in chunks.into_iter().flatten() {
        x1.push(a);
        x2.push(b);
    }
    SampleBatch { x1, x2, seed }
}

/// Draws `n` pairs on the current thread.
pub fn sample_pairs_sequential<P: PairModel + ?Sized>(model: &P, n: usize, seed: u64) -> Result<SampleBatch> {
    if n == 0 {
        return Err(domain("sample size must be positive"));
    }
    let (m1, m2) = model.marginal_pair();
    let c = model.pair_copula();
    let chunks = chunk_lengths(n)
        .map(|(i, len)| sample_chunk(&m1, &m2, &c, seed, i, len))
        .collect();
    Ok(assemble(chunks, n, seed))
}

/// Draws `n` pairs, in parallel when the `parallel` feature is on. The result
/// is identical to [`sample_pairs_sequential`] with the same seed.
pub fn sample_pairs<P: PairModel + ?Sized>(model: &P, n: usize, seed: u64) -> Result<SampleBatch> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        if n == 0 {
            return Err(domain("sample size must be positive"));
        }
        let (m1, m2) = model.marginal_pair();
        let c = model.pair_copula();
        let chunks = chunk_lengths(n)
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|(i, len)| sample_chunk(&m1, &m2, &c, seed, i, len))
            .collect();
        Ok(assemble(chunks, n, seed))
    }
    #[cfg(not(feature = "parallel"))]
    sample_pairs_sequential(model, n, seed)
}

/// A Monte Carlo point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithError {
    pub estimate: f64,
    pub std_error: f64,
    pub n: usize,
}

impl EstimateWithError {
    /// Distance from `value` in standard errors; infinite when the error is
    /// zero and the values differ.
    pub fn z_score(&self, value: f64) -> f64 {
        let d = (self.estimate - value).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.std_error
        }
    }
}

/// Ascending sample of a scalar loss.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedSample(Vec<f64>);

impl SortedSample {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(domain("empty sample"));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(domain("sample contains NaN"));
        }
        values.sort_unstable_by(f64::total_cmp);
        Ok(Self(values))
    }

    fn from_finite(mut values: Vec<f64>) -> Self {
        values.sort_unstable_by(f64::total_cmp);
        Self(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// Empirical CDF at `x`: the fraction of values `≤ x`.
    pub fn ecdf(&self, x: f64) -> f64 {
        self.0.partition_point(|v| *v <= x) as f64 / self.0.len() as f64
    }
}

/// 1-based order statistic index `⌈level · n⌉`, guarded against `0.95 · 100`
/// landing a hair above an integer.
fn order_index(level: f64, n: usize) -> usize {
    let raw = level * n as f64;
    let nearest = raw.round();
    let k = if (raw - nearest).abs() <= 1e-9 * raw.max(1.0) {
        nearest
    } else {
        raw.ceil()
    };
    (k as usize).clamp(1, n)
}

fn quantile_at(sample: &SortedSample, level: f64) -> EstimateWithError {
    let xs = &sample.0;
    let n = xs.len();
    let k = order_index(level, n);
    let point = xs[k - 1];
    // Sparsity estimate from a symmetric spacing of about sqrt(n) order statistics.
    let m = ((n as f64).sqrt() as usize).max(1);
    let lo = k.saturating_sub(m).max(1);
    let hi = (k + m).min(n);
    let spacing = xs[hi - 1] - xs[lo - 1];
    let std_error = if spacing > 0.0 && hi > lo {
        let density = (hi - lo) as f64 / n as f64 / spacing;
        (level * (1.0 - level) / n as f64).sqrt() / density
    } else {
        0.0
    };
    EstimateWithError {
        estimate: point,
        std_error,
        n,
    }
}

pub fn empirical_var(sample: &SortedSample, alpha: Alpha) -> EstimateWithError {
    quantile_at(sample, alpha.value())
}

pub fn empirical_mot(sample: &SortedSample, alpha: Alpha) -> EstimateWithError {
    quantile_at(sample, alpha.median_of_tail_level())
}

/// Mean of the values strictly above the empirical VaR.
///
/// The standard error includes the contribution of the estimated threshold:
/// `Var = (s² + α (CTE − VaR)²) / count`, with `s²` the variance of the
/// exceedances.
pub fn empirical_cte(sample: &SortedSample, alpha: Alpha) -> Result<EstimateWithError> {
    let xs = &sample.0;
    let var = xs[order_index(alpha.value(), xs.len()) - 1];
    let tail = &xs[xs.partition_point(|v| *v <= var)..];
    let count = tail.len();
    if count < MIN_TAIL_COUNT {
        return Err(Error::LowTailCount {
            count,
            required: MIN_TAIL_COUNT,
        });
    }
    let mean = tail.iter().sum::<f64>() / count as f64;
    let s2 = tail.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
    let std_error = ((s2 + alpha.value() * (mean - var).powi(2)) / count as f64).sqrt();
    Ok(EstimateWithError {
        estimate: mean,
        std_error,
        n: xs.len(),
    })
}

pub fn empirical_measure(sample: &SortedSample, measure: Measure, alpha: Alpha) -> Result<EstimateWithError> {
    match measure {
        Measure::Var => Ok(empirical_var(sample, alpha)),
        Measure::Cte => empirical_cte(sample, alpha),
        Measure::Mot => Ok(empirical_mot(sample, alpha)),
    }
}
