//! Normal-scale bandwidth default.

use fastkde::{BandwidthMatrix, SampleMatrix};
use ndarray::Array2;

use crate::error::BandwidthError;

/// Smallest admissible ratio of the covariance's extreme eigenvalues.
const MIN_EIGEN_RATIO: f64 = 1e-12;

/// Unbiased sample covariance.
pub fn sample_covariance(data: &SampleMatrix<f64>) -> Array2<f64> {
    let points = data.points();
    let n = data.n() as f64;
    let mean = points.sum_axis(ndarray::Axis(0)) / n;
    let centered = &points - &mean;
    centered.t().dot(&centered) / (n - 1.0)
}

/// `H = n^{−2/(d+4)} · Σ̂`, the normal-scale rule. A convenience default for
/// roughly Gaussian data, not an optimal selector.
pub fn rule_of_thumb_bandwidth(data: &SampleMatrix<f64>) -> Result<BandwidthMatrix<f64>, BandwidthError> {
    let n = data.n();
    if n < 2 {
        return Err(BandwidthError::DegenerateCovariance { n, ratio: 0.0 });
    }
    let d = data.dim() as f64;
    let sigma = sample_covariance(data);
    let degenerate = |ratio| BandwidthError::DegenerateCovariance { n, ratio };
    let cov = BandwidthMatrix::new(sigma.view()).map_err(|_| degenerate(0.0))?;
    let eig = cov.eigenvalues();
    let ratio = eig[0] / eig[eig.len() - 1];
    if !(ratio > MIN_EIGEN_RATIO) {
        return Err(degenerate(ratio));
    }
    let scale = (n as f64).powf(-2.0 / (d + 4.0));
    cov.scaled(scale).map_err(|_| degenerate(ratio))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_is_degenerate() {
        let s = SampleMatrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        assert!(matches!(
            rule_of_thumb_bandwidth(&s),
            Err(BandwidthError::DegenerateCovariance { n: 1, .. })
        ));
    }

    #[test]
    fn collinear_columns_are_degenerate() {
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64, 3.0 * i as f64 - 1.0]).collect();
        let s = SampleMatrix::from_rows(&rows).unwrap();
        assert!(matches!(
            rule_of_thumb_bandwidth(&s),
            Err(BandwidthError::DegenerateCovariance { .. })
        ));
    }

    #[test]
    fn scales_covariance() {
        let rows: Vec<Vec<f64>> = vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![0.0, 2.0], vec![2.0, 2.0]];
        let s = SampleMatrix::from_rows(&rows).unwrap();
        let h = rule_of_thumb_bandwidth(&s).unwrap();
        let c = 4f64.powf(-1.0 / 3.0) * 4.0 / 3.0;
        assert!((h.entries()[[0, 0]] - c).abs() < 1e-14);
        assert!(h.entries()[[0, 1]].abs() < 1e-14);
    }
}
