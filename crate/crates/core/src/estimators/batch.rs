//! Fixed-layout batching. Sample `i` always draws from substream `i` of the
//! seed and batches cover contiguous index ranges, so results do not depend
//! on how many threads evaluate them.

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::sampling::{SampleStream, Seed};

/// Number of batches used for batch-means and jackknife errors.
pub const BATCHES: usize = 64;

/// Smallest sample count accepted by the estimators.
pub const MIN_SAMPLES: u64 = 1000;

pub(crate) fn check_n(n: u64) -> Result<()> {
    if n < MIN_SAMPLES {
        return Err(invalid(format!(
            "need at least {MIN_SAMPLES} samples, got {n}"
        )));
    }
    Ok(())
}

/// Index range of batch `b` out of `n` samples.
pub(crate) fn range(n: u64, b: usize) -> std::ops::Range<u64> {
    let lo = n * b as u64 / BATCHES as u64;
    let hi = n * (b as u64 + 1) / BATCHES as u64;
    lo..hi
}

/// Folds `f` over every sample of each batch, batches in parallel.
/// Returns the accumulator and sample count of each batch, in batch order.
pub(crate) fn run<A, F>(n: u64, seed: Seed, f: F) -> Result<Vec<(A, u64)>>
where
    A: Default + Send,
    F: Fn(&mut A, &mut SampleStream) -> Result<()> + Sync,
{
    (0..BATCHES)
        .into_par_iter()
        .map(|b| {
            let r = range(n, b);
            let count = r.end - r.start;
            let mut acc = A::default();
            for i in r {
                let mut stream = SampleStream::new(seed.substream(i));
                f(&mut acc, &mut stream)?;
            }
            Ok((acc, count))
        })
        .collect()
}

/// Overall mean and batch-means standard error of per-batch sums.
pub(crate) fn mean_stderr(batches: &[(f64, u64)]) -> (f64, f64) {
    let n: u64 = batches.iter().map(|b| b.1).sum();
    let mean = batches.iter().map(|b| b.0).sum::<f64>() / n as f64;
    let used: Vec<f64> = batches
        .iter()
        .filter(|b| b.1 > 0)
        .map(|b| b.0 / b.1 as f64)
        .collect();
    let k = used.len() as f64;
    if k < 2.0 {
        return (mean, f64::NAN);
    }
    let ss: f64 = used.iter().map(|m| (m - mean) * (m - mean)).sum();
    (mean, (ss / (k * (k - 1.0))).sqrt())
}

/// Jackknife standard error from leave-one-batch-out replicates.
pub(crate) fn jackknife_stderr(replicates: &[f64]) -> f64 {
    let k = replicates.len() as f64;
    let m = replicates.iter().sum::<f64>() / k;
    ((k - 1.0) / k * replicates.iter().map(|r| (r - m) * (r - m)).sum::<f64>()).sqrt()
}
