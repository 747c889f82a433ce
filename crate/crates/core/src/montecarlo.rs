//! Seeded batches and the statistics computed from them.
//!
//! A batch of `count` draws is cut into blocks of [`BLOCK_SIZE`]; block `i`
//! reads substream `i` of the seed. Blocks are generated independently and
//! concatenated in index order, so the result does not depend on how many
//! workers produced it.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::{right_angle_of, sample_stick_once, sample_stick_twice, ModelKind, Sampler};
use crate::rng::{substream, BLOCK_SIZE};
use crate::triangle::BranchChoice;

/// Seed used by the verification suite and as the default for statistics
/// commands.
pub const DEFAULT_SEED: u64 = 1729;

/// How blocks are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Execution {
    Sequential,
    /// `workers = 0` uses the global pool.
    Parallel {
        workers: usize,
    },
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel { workers: 0 }
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// `Some(1)` is sequential, anything else parallel.
    pub fn from_workers(workers: Option<usize>) -> Self {
        match workers {
            Some(1) => Execution::Sequential,
            Some(w) => Execution::Parallel { workers: w },
            None => Execution::default(),
        }
    }
}

/// Row-major table of draws.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleBatch {
    pub model: ModelKind,
    pub seed: u64,
    /// Draws attempted.
    pub count: usize,
    /// Rows kept; equals `count` except for rejection models.
    pub accepted: usize,
    pub columns: Vec<String>,
    pub values: Vec<f64>,
}

impl SampleBatch {
    pub fn width(&self) -> usize {
        self.columns.len()
    }

    pub fn len(&self) -> usize {
        self.accepted
    }

    pub fn is_empty(&self) -> bool {
        self.accepted == 0
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let w = self.width();
        &self.values[i * w..(i + 1) * w]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.width())
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::UnknownColumn {
                name: name.to_string(),
                available: self.columns.join(", "),
            })
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let j = self.column_index(name)?;
        Ok(self.rows().map(|r| r[j]).collect())
    }

    /// Fraction of attempted draws that were kept.
    pub fn acceptance(&self) -> f64 {
        self.accepted as f64 / self.count as f64
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BatchOptions {
    pub sampler: Sampler,
    pub execution: Execution,
}

pub fn run_batch(model: ModelKind, seed: u64, count: usize) -> Result<SampleBatch> {
    run_batch_with(model, seed, count, &BatchOptions::default())
}

pub fn run_batch_with(model: ModelKind, seed: u64, count: usize, opts: &BatchOptions) -> Result<SampleBatch> {
    if count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    let blocks = count.div_ceil(BLOCK_SIZE);
    let make = |i: usize| {
        let n = BLOCK_SIZE.min(count - i * BLOCK_SIZE);
        generate_block(model, &opts.sampler, seed, i as u64, n)
    };
    let parts: Vec<(Vec<f64>, usize)> = match opts.execution {
        Execution::Sequential => (0..blocks).map(make).collect(),
        Execution::Parallel { workers } => parallel_blocks(blocks, workers, &make)?,
    };
    let width = model.columns().len();
    let mut values = Vec::with_capacity(parts.iter().map(|p| p.0.len()).sum());
    let mut accepted = 0;
    for (v, k) in parts {
        values.extend_from_slice(&v);
        accepted += k;
    }
    debug_assert_eq!(values.len(), accepted * width);
    Ok(SampleBatch {
        model,
        seed,
        count,
        accepted,
        columns: model.columns().iter().map(|c| c.to_string()).collect(),
        values,
    })
}

#[cfg(feature = "parallel")]
fn parallel_blocks<F>(blocks: usize, workers: usize, make: &F) -> Result<Vec<(Vec<f64>, usize)>>
where
    F: Fn(usize) -> (Vec<f64>, usize) + Sync,
{
    use rayon::prelude::*;
    let run = || (0..blocks).into_par_iter().map(make).collect();
    if workers == 0 {
        return Ok(run());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(run))
}

#[cfg(not(feature = "parallel"))]
fn parallel_blocks<F>(blocks: usize, _workers: usize, make: &F) -> Result<Vec<(Vec<f64>, usize)>>
where
    F: Fn(usize) -> (Vec<f64>, usize) + Sync,
{
    Ok((0..blocks).map(make).collect())
}

fn generate_block(model: ModelKind, sampler: &Sampler, seed: u64, index: u64, n: usize) -> (Vec<f64>, usize) {
    let mut rng = substream(seed, index);
    let mut out = Vec::with_capacity(n * model.columns().len());
    let mut kept = 0;
    for _ in 0..n {
        match model {
            ModelKind::Right => {
                let t = sampler.right(&mut rng);
                out.extend_from_slice(&[t.a, t.b, t.c, right_angle_of(&t)]);
            }
            ModelKind::Isosceles => {
                let (t, r) = sampler.isosceles(&mut rng);
                out.extend_from_slice(&[t.a, t.b, t.c, r]);
            }
            ModelKind::Arbitrary => {
                let d = sampler.arbitrary(&mut rng);
                let branch = match d.branch {
                    BranchChoice::Minus => -1.0,
                    BranchChoice::Plus => 1.0,
                };
                let folded = if d.folded { 1.0 } else { 0.0 };
                out.extend_from_slice(&[d.triangle.a, d.triangle.b, d.triangle.c, branch, folded]);
            }
            ModelKind::StickTwice => match sample_stick_twice(&mut rng) {
                Some(area) => out.push(area),
                None => continue,
            },
            ModelKind::StickOnce => out.push(sample_stick_once(&mut rng)),
        }
        kept += 1;
    }
    (out, kept)
}

/// Sample mean with its standard error `s/√n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

impl Estimate {
    /// `|value − target| ≤ k·se`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.se
    }

    /// Distance from `target` in standard errors.
    pub fn z(&self, target: f64) -> f64 {
        (self.value - target) / self.se
    }
}

/// Mean and standard error of a sample.
pub fn mean_estimate(xs: &[f64]) -> Result<Estimate> {
    if xs.len() < 2 {
        return Err(Error::InsufficientSamples(format!(
            "need at least 2 values, got {}",
            xs.len()
        )));
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let ss: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum();
    Ok(Estimate {
        value: mean,
        se: (ss / (n - 1.0)).sqrt() / n.sqrt(),
    })
}

/// `E(x^k)` estimates for each order; `k = 0` is exactly `(1, 0)`.
pub fn sample_moments(xs: &[f64], orders: &[u32]) -> Result<Vec<Estimate>> {
    if orders.is_empty() {
        return Err(Error::InvalidArgument("no moment orders requested".into()));
    }
    orders
        .iter()
        .map(|&k| {
            if k == 0 {
                return Ok(Estimate { value: 1.0, se: 0.0 });
            }
            let powered: Vec<f64> = xs.iter().map(|x| x.powi(k as i32)).collect();
            mean_estimate(&powered)
        })
        .collect()
}

pub fn empirical_moments(batch: &SampleBatch, column: &str, orders: &[u32]) -> Result<Vec<Estimate>> {
    sample_moments(&batch.column(column)?, orders)
}

/// Pearson correlation, clamped to `[−1, 1]`.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::InvalidArgument(format!(
            "length mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::InsufficientSamples(format!(
            "need at least 2 pairs, got {}",
            x.len()
        )));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance("correlation of a constant column".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

pub fn empirical_correlation(batch: &SampleBatch, col1: &str, col2: &str) -> Result<f64> {
    pearson(&batch.column(col1)?, &batch.column(col2)?)
}

/// Fraction of values satisfying `pred`, with the binomial standard error.
pub fn proportion(xs: &[f64], pred: impl Fn(f64) -> bool) -> Result<Estimate> {
    if xs.is_empty() {
        return Err(Error::InsufficientSamples("empty sample".into()));
    }
    let n = xs.len() as f64;
    let p = xs.iter().filter(|&&x| pred(x)).count() as f64 / n;
    Ok(Estimate {
        value: p,
        se: (p * (1.0 - p) / n).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn batch_shape() {
        let b = run_batch(ModelKind::Arbitrary, 3, 10_000).unwrap();
        assert_eq!(b.len(), 10_000);
        assert_eq!(b.values.len(), 50_000);
        assert_eq!(b.row(7).len(), 5);
        assert!(b.column("gamma").is_err());
        let s = run_batch(ModelKind::StickTwice, 3, 10_000).unwrap();
        assert!(s.accepted < s.count && s.values.len() == s.accepted);
        assert!(run_batch(ModelKind::Right, 3, 0).is_err());
    }

    #[test]
    fn execution_does_not_change_output() {
        for model in ModelKind::ALL {
            let n = 3 * BLOCK_SIZE + 17;
            let seq = run_batch_with(
                model,
                11,
                n,
                &BatchOptions {
                    execution: Execution::Sequential,
                    ..Default::default()
                },
            )
            .unwrap();
            for workers in [0, 2, 4] {
                let par = run_batch_with(
                    model,
                    11,
                    n,
                    &BatchOptions {
                        execution: Execution::Parallel { workers },
                        ..Default::default()
                    },
                )
                .unwrap();
                assert_eq!(seq, par, "{model} with {workers} workers");
            }
        }
    }

    #[test]
    fn prefix_stability() {
        let long = run_batch(ModelKind::Right, 5, 2 * BLOCK_SIZE).unwrap();
        let short = run_batch(ModelKind::Right, 5, BLOCK_SIZE + 3).unwrap();
        assert_eq!(&long.values[..short.values.len()], &short.values[..]);
    }

    #[test]
    fn moments_and_errors() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let m = sample_moments(&xs, &[0, 1, 2]).unwrap();
        assert_eq!(m[0], Estimate { value: 1.0, se: 0.0 });
        assert_eq!(m[1].value, 2.5);
        assert_eq!(m[2].value, 7.5);
        assert!((m[1].se - (5.0f64 / 3.0).sqrt() / 2.0).abs() < 1e-15);
        assert!(sample_moments(&xs, &[]).is_err());
        assert!(mean_estimate(&[1.0]).is_err());
    }

    #[test]
    fn correlation_edges() {
        let x = [1.0, 2.0, 4.0, 8.0];
        assert_eq!(pearson(&x, &x).unwrap(), 1.0);
        let neg: Vec<f64> = x.iter().map(|v| -3.0 * v).collect();
        assert_eq!(pearson(&x, &neg).unwrap(), -1.0);
        assert!(matches!(pearson(&x, &[2.0; 4]), Err(Error::ZeroVariance(_))));
        assert!(pearson(&x, &x[..3]).is_err());
    }

    #[test]
    fn proportion_of_coin() {
        let b = run_batch(ModelKind::Arbitrary, 2, 40_000).unwrap();
        let p = proportion(&b.column("branch").unwrap(), |v| v > 0.0).unwrap();
        assert!(p.within(0.5, 4.0), "{p:?}");
    }
}
