//! Scaled multivariate normal kernel, its lattice weights and effective support.

use ndarray::{ArrayD, IxDyn};

use crate::error::{KdeError, Result};
use crate::grid::{increment, GridSpec};
use crate::linalg::BandwidthMatrix;
use crate::scalar::Scalar;

/// Truncation factor for the effective support; calibrated for the 2-D normal kernel.
pub const DEFAULT_TAU: f64 = 3.7;

/// `K_H(u) = (2π)^{-d/2} |H|^{-1/2} exp(-½ uᵀH⁻¹u)`.
pub fn gaussian_kernel<T: Scalar>(u: &[T], h: &BandwidthMatrix<T>) -> Result<T> {
    if u.len() != h.dim() {
        return Err(KdeError::DimensionMismatch {
            expected: h.dim(),
            found: u.len(),
        });
    }
    Ok(kernel_unchecked(u, h, normalizer(h)))
}

#[inline]
pub(crate) fn normalizer<T: Scalar>(h: &BandwidthMatrix<T>) -> T {
    let d = T::from_usize_lossy(h.dim());
    (T::TAU()).powf(-d / T::lit(2.0)) / h.det().sqrt()
}

#[inline]
pub(crate) fn kernel_unchecked<T: Scalar>(u: &[T], h: &BandwidthMatrix<T>, norm: T) -> T {
    norm * (-h.quadratic_form(u) / T::lit(2.0)).exp()
}

/// `L_k = min(M_k − 1, ⌈τ·√λ_max / δ_k⌉)`, floored at 1.
pub fn effective_support<T: Scalar>(h: &BandwidthMatrix<T>, grid: &GridSpec<T>, tau: T) -> Vec<usize> {
    let reach = tau * h.lambda_max().abs().sqrt();
    grid.sizes()
        .iter()
        .zip(grid.binwidths())
        .map(|(&m, &delta)| {
            let raw = (reach / delta).ceil();
            let cap = m - 1;
            let l = if raw >= T::from_usize_lossy(cap) {
                cap
            } else {
                raw.to_usize().unwrap_or(cap)
            };
            l.clamp(1, cap)
        })
        .collect()
}

/// `L_k = M_k − 1` in every dimension: no truncation.
pub fn full_support<T: Scalar>(grid: &GridSpec<T>) -> Vec<usize> {
    grid.sizes().iter().map(|m| m - 1).collect()
}

/// Kernel evaluated on lattice offsets `l ∈ [−L_1, L_1] × … × [−L_d, L_d]`,
/// scaled by `1/n`. Stored with offset `l` at array index `l + L`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelWeights<T: Scalar> {
    support: Vec<usize>,
    values: ArrayD<T>,
}

impl<T: Scalar> KernelWeights<T> {
    /// Wraps an arbitrary odd-shaped array centred on offset zero.
    pub fn from_array(values: ArrayD<T>) -> Result<Self> {
        let support = values
            .shape()
            .iter()
            .enumerate()
            .map(|(k, &len)| {
                if len % 2 == 1 && len >= 3 {
                    Ok(len / 2)
                } else {
                    Err(KdeError::BadSupport {
                        dim: k,
                        support: len / 2,
                        size: len,
                    })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { support, values })
    }

    pub fn dim(&self) -> usize {
        self.support.len()
    }

    /// Per-dimension half-widths `L_k`.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn values(&self) -> &ArrayD<T> {
        &self.values
    }

    /// Weight at signed lattice offset `l`, or `None` outside the support box.
    pub fn at(&self, offset: &[isize]) -> Option<T> {
        let idx = offset
            .iter()
            .zip(&self.support)
            .map(|(&l, &half)| {
                let i = l + half as isize;
                (0..=2 * half as isize).contains(&i).then_some(i as usize)
            })
            .collect::<Option<Vec<_>>>()?;
        Some(self.values[IxDyn(&idx)])
    }
}

/// `k_l = (1/n)·K_H(δ_1 l_1, …, δ_d l_d)` over the support box `L`.
pub fn kernel_weights<T: Scalar>(
    grid: &GridSpec<T>,
    h: &BandwidthMatrix<T>,
    support: &[usize],
    n: usize,
) -> Result<KernelWeights<T>> {
    let d = grid.dim();
    if h.dim() != d {
        return Err(KdeError::DimensionMismatch {
            expected: d,
            found: h.dim(),
        });
    }
    if support.len() != d {
        return Err(KdeError::DimensionMismatch {
            expected: d,
            found: support.len(),
        });
    }
    for (k, (&l, &m)) in support.iter().zip(grid.sizes()).enumerate() {
        if l < 1 || l > m - 1 {
            return Err(KdeError::BadSupport {
                dim: k,
                support: l,
                size: m,
            });
        }
    }
    if n == 0 {
        return Err(KdeError::EmptySample);
    }

    let shape: Vec<usize> = support.iter().map(|l| 2 * l + 1).collect();
    let norm = normalizer(h) / T::from_usize_lossy(n);
    let mut values = ArrayD::<T>::zeros(IxDyn(&shape));
    let mut idx = vec![0usize; d];
    let mut u = vec![T::zero(); d];
    for v in values.iter_mut() {
        for k in 0..d {
            let l = idx[k] as f64 - support[k] as f64;
            u[k] = T::lit(l) * grid.binwidths()[k];
        }
        *v = kernel_unchecked(&u, h, norm);
        increment(&mut idx, &shape);
    }
    Ok(KernelWeights {
        support: support.to_vec(),
        values,
    })
}
