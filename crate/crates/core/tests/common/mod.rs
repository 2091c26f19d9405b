//! Shared fixtures and brute-force oracles for the integration tests. Nothing
//! here calls into the FFT or Cholesky paths it is used to check.

#![allow(dead_code)]

use fastkde::{BandwidthMatrix, SampleMatrix};
use ndarray::{Array2, ArrayD, IxDyn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn next_index(idx: &mut [usize], shape: &[usize]) {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < shape[k] {
            return;
        }
        idx[k] = 0;
    }
}

pub fn all_indices(shape: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = shape.iter().product();
    let mut idx = vec![0; shape.len()];
    let mut out = Vec::with_capacity(total);
    for _ in 0..total {
        out.push(idx.clone());
        next_index(&mut idx, shape);
    }
    out
}

/// `s[p] = Σ_q a[q]·b[(p − q) mod P]` by explicit double loop.
pub fn brute_circular(a: &ArrayD<f64>, b: &ArrayD<f64>) -> ArrayD<f64> {
    let shape = a.shape().to_vec();
    let indices = all_indices(&shape);
    let mut out = ArrayD::zeros(IxDyn(&shape));
    let mut diff = vec![0usize; shape.len()];
    for p in &indices {
        let mut acc = 0.0;
        for q in &indices {
            for k in 0..shape.len() {
                diff[k] = (p[k] + shape[k] - q[k]) % shape[k];
            }
            acc += a[IxDyn(q)] * b[IxDyn(&diff)];
        }
        out[IxDyn(p)] = acc;
    }
    out
}

/// Gauss–Jordan inverse and determinant with partial pivoting.
pub fn inverse_and_det(m: &Array2<f64>) -> (Array2<f64>, f64) {
    let n = m.nrows();
    let mut a = m.clone();
    let mut inv = Array2::<f64>::eye(n);
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| a[[i, c]].abs().partial_cmp(&a[[j, c]].abs()).unwrap())
            .unwrap();
        if p != c {
            for k in 0..n {
                a.swap([p, k], [c, k]);
                inv.swap([p, k], [c, k]);
            }
            det = -det;
        }
        let piv = a[[c, c]];
        det *= piv;
        for k in 0..n {
            a[[c, k]] /= piv;
            inv[[c, k]] /= piv;
        }
        for r in 0..n {
            if r != c {
                let f = a[[r, c]];
                for k in 0..n {
                    a[[r, k]] -= f * a[[c, k]];
                    inv[[r, k]] -= f * inv[[c, k]];
                }
            }
        }
    }
    (inv, det)
}

/// Gaussian density with covariance `h`, via the explicit inverse.
pub fn explicit_gaussian(u: &[f64], h: &Array2<f64>) -> f64 {
    let d = u.len();
    let (inv, det) = inverse_and_det(h);
    let mut q = 0.0;
    for i in 0..d {
        for j in 0..d {
            q += u[i] * inv[[i, j]] * u[j];
        }
    }
    (-0.5 * q).exp() / ((2.0 * std::f64::consts::PI).powi(d as i32) * det).sqrt()
}

/// Independent double-loop naive estimator.
pub fn explicit_naive(data: &Array2<f64>, h: &Array2<f64>, x: &Array2<f64>) -> Vec<f64> {
    let d = h.nrows();
    let (inv, det) = inverse_and_det(h);
    let norm = 1.0 / ((2.0 * std::f64::consts::PI).powi(d as i32) * det).sqrt() / data.nrows() as f64;
    x.rows()
        .into_iter()
        .map(|xr| {
            let mut f = 0.0;
            for xi in data.rows() {
                let u: Vec<f64> = (0..d).map(|k| xr[k] - xi[k]).collect();
                let mut q = 0.0;
                for i in 0..d {
                    for j in 0..d {
                        q += u[i] * inv[[i, j]] * u[j];
                    }
                }
                f += (-0.5 * q).exp();
            }
            f * norm
        })
        .collect()
}

/// Random correlation matrix with off-diagonal magnitudes up to `max_rho`,
/// drawn by rejection until positive definite.
pub fn random_correlation(rng: &mut impl Rng, d: usize, max_rho: f64) -> Array2<f64> {
    loop {
        let mut r = Array2::<f64>::eye(d);
        for i in 0..d {
            for j in (i + 1)..d {
                let rho = rng.random_range(-max_rho..=max_rho);
                r[[i, j]] = rho;
                r[[j, i]] = rho;
            }
        }
        if BandwidthMatrix::new(r.view()).is_ok() {
            return r;
        }
    }
}

/// `diag(s) · R · diag(s)`.
pub fn scale_correlation(r: &Array2<f64>, sd: &[f64]) -> Array2<f64> {
    Array2::from_shape_fn(r.dim(), |(i, j)| r[[i, j]] * sd[i] * sd[j])
}

/// `n` draws from `N(mean, cov)` using an explicit lower factor computed here.
pub fn gaussian_sample(rng: &mut impl Rng, n: usize, mean: &[f64], cov: &Array2<f64>) -> Array2<f64> {
    let d = mean.len();
    let mut l = Array2::<f64>::zeros((d, d));
    for i in 0..d {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[[i, k]] * l[[j, k]]).sum();
            l[[i, j]] = if i == j {
                (cov[[i, i]] - s).sqrt()
            } else {
                (cov[[i, j]] - s) / l[[j, j]]
            };
        }
    }
    let mut out = Array2::zeros((n, d));
    for mut row in out.rows_mut() {
        let z: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        for i in 0..d {
            row[i] = mean[i] + (0..=i).map(|k| l[[i, k]] * z[k]).sum::<f64>();
        }
    }
    out
}

pub fn max_abs(a: &ArrayD<f64>) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn max_abs_diff(a: &ArrayD<f64>, b: &ArrayD<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// One randomized estimation problem for the equivalence trials.
pub struct Trial {
    pub d: usize,
    pub sizes: Vec<usize>,
    pub data: SampleMatrix<f64>,
    pub h: BandwidthMatrix<f64>,
    pub max_rho: f64,
}

/// Deterministic trial `t`: `d = 1 + t mod 3`, `M_k ∈ [8, 64]`, `n ∈ [10, 2000]`,
/// correlated Gaussian data and an independent random SPD bandwidth whose
/// correlations reach up to 0.95 in magnitude, scaled like a normal-scale rule.
pub fn trial(t: usize) -> Trial {
    let mut rng = rng(0x5eed_0000 + t as u64);
    let d = 1 + t % 3;
    let sizes: Vec<usize> = (0..d).map(|_| rng.random_range(8..=64)).collect();
    let n = rng.random_range(10..=2000);

    let data_sd: Vec<f64> = (0..d).map(|_| rng.random_range(0.5..2.0)).collect();
    let data_cov = scale_correlation(&random_correlation(&mut rng, d, 0.9), &data_sd);
    let mean: Vec<f64> = (0..d).map(|_| rng.random_range(-3.0..3.0)).collect();
    let data = SampleMatrix::new(gaussian_sample(&mut rng, n, &mean, &data_cov)).unwrap();

    let shrink = (n as f64).powf(-1.0 / (d as f64 + 4.0));
    let h_sd: Vec<f64> = data_sd
        .iter()
        .map(|s| s * shrink * rng.random_range(0.5..1.5))
        .collect();
    let h_corr = random_correlation(&mut rng, d, 0.95);
    let max_rho = (0..d)
        .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
        .fold(0.0f64, |m, (i, j)| m.max(h_corr[[i, j]].abs()));
    let h = BandwidthMatrix::new(scale_correlation(&h_corr, &h_sd).view()).unwrap();
    Trial {
        d,
        sizes,
        data,
        h,
        max_rho,
    }
}
