//! Wall-clock comparison of the evaluation methods over a sweep of grid sizes.

use std::time::{Duration, Instant};

use crate::error::Result;
use crate::estimate::Method;
use crate::grid::SampleMatrix;
use crate::linalg::BandwidthMatrix;
use crate::pipeline::{EstimateConfig, Prepared};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub sizes: Vec<usize>,
    pub support: Vec<usize>,
    pub method: Method,
    /// Best of the repeats, evaluation stage only (binning and kernel weights excluded).
    pub elapsed: Duration,
}

/// Times each method on the same prepared grid for every entry of `sizes`.
/// `base` supplies tau, extension and the support policy.
pub fn bench_sweep<T: Scalar>(
    data: &SampleMatrix<T>,
    h: &BandwidthMatrix<T>,
    base: &EstimateConfig<T>,
    sizes: &[Vec<usize>],
    methods: &[Method],
    repeats: usize,
) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::with_capacity(sizes.len() * methods.len());
    for grid_sizes in sizes {
        let config = EstimateConfig {
            sizes: grid_sizes.clone(),
            ..base.clone()
        };
        let prepared = Prepared::new(data, h, &config)?;
        for &method in methods {
            let mut best = Duration::MAX;
            for _ in 0..repeats.max(1) {
                let start = Instant::now();
                let out = prepared.run(method, data, h)?;
                best = best.min(start.elapsed());
                std::hint::black_box(out);
            }
            rows.push(BenchRow {
                sizes: grid_sizes.clone(),
                support: prepared.kernel.support().to_vec(),
                method,
                elapsed: best,
            });
        }
    }
    Ok(rows)
}
