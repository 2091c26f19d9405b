//! Equally spaced evaluation grids and multivariate linear binning.

use ndarray::{Array2, ArrayD, ArrayView2, IxDyn};

use crate::error::{KdeError, Result};
use crate::linalg::BandwidthMatrix;
use crate::scalar::Scalar;

/// `n × d` sample of finite points.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix<T: Scalar> {
    points: Array2<T>,
}

impl<T: Scalar> SampleMatrix<T> {
    pub fn new(points: Array2<T>) -> Result<Self> {
        if points.nrows() == 0 || points.ncols() == 0 {
            return Err(KdeError::EmptySample);
        }
        if points.iter().any(|v| !v.is_finite()) {
            return Err(KdeError::InvalidParameter("sample contains non-finite values".into()));
        }
        Ok(Self { points })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let d = rows.first().map(Vec::len).ok_or(KdeError::EmptySample)?;
        if let Some(bad) = rows.iter().find(|r| r.len() != d) {
            return Err(KdeError::DimensionMismatch {
                expected: d,
                found: bad.len(),
            });
        }
        let flat = rows.iter().flatten().copied().collect();
        Self::new(Array2::from_shape_vec((rows.len(), d), flat).expect("row lengths checked"))
    }

    pub fn n(&self) -> usize {
        self.points.nrows()
    }

    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    pub fn points(&self) -> ArrayView2<'_, T> {
        self.points.view()
    }

    pub fn row(&self, i: usize) -> ndarray::ArrayView1<'_, T> {
        self.points.row(i)
    }

    pub fn into_inner(self) -> Array2<T> {
        self.points
    }
}

/// Per-dimension equally spaced grid `lower_k + j·δ_k`, `j = 0..M_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec<T: Scalar> {
    lower: Vec<T>,
    upper: Vec<T>,
    sizes: Vec<usize>,
    binwidths: Vec<T>,
}

impl<T: Scalar> GridSpec<T> {
    pub fn new(lower: Vec<T>, upper: Vec<T>, sizes: Vec<usize>) -> Result<Self> {
        let d = sizes.len();
        for (len, what) in [(lower.len(), "lower"), (upper.len(), "upper")] {
            if len != d {
                return Err(KdeError::InvalidParameter(format!(
                    "{what} has {len} entries, grid has {d} dimensions"
                )));
            }
        }
        check_sizes(&sizes)?;
        for k in 0..d {
            if !(lower[k].is_finite() && upper[k].is_finite()) || !(upper[k] > lower[k]) {
                return Err(KdeError::DegenerateRange { dim: k });
            }
        }
        let binwidths = (0..d)
            .map(|k| (upper[k] - lower[k]) / T::from_usize_lossy(sizes[k] - 1))
            .collect();
        Ok(Self {
            lower,
            upper,
            sizes,
            binwidths,
        })
    }

    pub fn dim(&self) -> usize {
        self.sizes.len()
    }

    pub fn lower(&self) -> &[T] {
        &self.lower
    }

    pub fn upper(&self) -> &[T] {
        &self.upper
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn binwidths(&self) -> &[T] {
        &self.binwidths
    }

    /// Total node count `∏ M_k`.
    pub fn len(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coordinate of node `j` (0-based) in dimension `k`.
    pub fn node(&self, k: usize, j: usize) -> T {
        self.lower[k] + T::from_usize_lossy(j) * self.binwidths[k]
    }

    pub fn axis(&self, k: usize) -> Vec<T> {
        (0..self.sizes[k]).map(|j| self.node(k, j)).collect()
    }

    /// Volume of one grid cell, `∏ δ_k`.
    pub fn cell_volume(&self) -> T {
        self.binwidths.iter().fold(T::one(), |acc, &d| acc * d)
    }

    /// Every node as a `∏M_k × d` matrix in row-major (C) order.
    pub fn nodes(&self) -> SampleMatrix<T> {
        let d = self.dim();
        let axes: Vec<Vec<T>> = (0..d).map(|k| self.axis(k)).collect();
        let mut pts = Array2::zeros((self.len(), d));
        let mut idx = vec![0usize; d];
        for mut row in pts.rows_mut() {
            for k in 0..d {
                row[k] = axes[k][idx[k]];
            }
            increment(&mut idx, &self.sizes);
        }
        SampleMatrix { points: pts }
    }
}

fn check_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.is_empty() {
        return Err(KdeError::InvalidParameter("grid needs at least one dimension".into()));
    }
    match sizes.iter().position(|&m| m < 2) {
        Some(k) => Err(KdeError::BadGridSize {
            dim: k,
            size: sizes[k],
        }),
        None => Ok(()),
    }
}

/// Row-major multi-index increment; wraps to all zeros after the last index.
pub(crate) fn increment(idx: &mut [usize], shape: &[usize]) {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < shape[k] {
            return;
        }
        idx[k] = 0;
    }
}

/// Grid spanning the sample's bounding box widened by `extension_k` on each side.
pub fn make_grid<T: Scalar>(
    data: &SampleMatrix<T>,
    sizes: &[usize],
    extension: &[T],
) -> Result<GridSpec<T>> {
    let d = data.dim();
    if sizes.len() != d {
        return Err(KdeError::DimensionMismatch {
            expected: d,
            found: sizes.len(),
        });
    }
    if extension.len() != d {
        return Err(KdeError::DimensionMismatch {
            expected: d,
            found: extension.len(),
        });
    }
    check_sizes(sizes)?;
    let mut lower = Vec::with_capacity(d);
    let mut upper = Vec::with_capacity(d);
    for (k, col) in data.points().columns().into_iter().enumerate() {
        if !(extension[k] >= T::zero()) {
            return Err(KdeError::InvalidParameter(format!(
                "extension in dimension {k} must be non-negative"
            )));
        }
        let lo = col.iter().fold(T::infinity(), |m, &v| m.min(v));
        let hi = col.iter().fold(T::neg_infinity(), |m, &v| m.max(v));
        if lo == hi && extension[k] == T::zero() {
            return Err(KdeError::DegenerateRange { dim: k });
        }
        lower.push(lo - extension[k]);
        upper.push(hi + extension[k]);
    }
    GridSpec::new(lower, upper, sizes.to_vec())
}

/// `tau·sqrt(H_kk)` per dimension: keeps the kernel mass of edge samples on the grid.
pub fn default_extension<T: Scalar>(h: &BandwidthMatrix<T>, tau: T) -> Vec<T> {
    (0..h.dim()).map(|k| tau * h.entries()[[k, k]].sqrt()).collect()
}

/// Binned sample weights on a grid; sums to `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCounts<T: Scalar> {
    values: ArrayD<T>,
    total: usize,
    clamped: usize,
}

impl<T: Scalar> GridCounts<T> {
    /// Wraps an existing count array. Values must be non-negative.
    pub fn from_array(values: ArrayD<T>, total: usize) -> Result<Self> {
        if values.iter().any(|v| !(*v >= T::zero())) {
            return Err(KdeError::InvalidParameter("grid counts must be non-negative".into()));
        }
        Ok(Self {
            values,
            total,
            clamped: 0,
        })
    }

    pub fn values(&self) -> &ArrayD<T> {
        &self.values
    }

    pub fn shape(&self) -> &[usize] {
        self.values.shape()
    }

    /// Sample size `n` the counts were built from.
    pub fn total(&self) -> usize {
        self.total
    }

    /// Number of samples that fell outside the grid and were clamped to its boundary.
    pub fn clamped(&self) -> usize {
        self.clamped
    }

    pub fn sum(&self) -> T {
        self.values.iter().fold(T::zero(), |s, &v| s + v)
    }
}

/// Distributes each sample's unit weight multilinearly over the `2^d` corners
/// of its enclosing cell. Samples outside the grid are clamped onto its boundary.
pub fn linear_binning<T: Scalar>(data: &SampleMatrix<T>, grid: &GridSpec<T>) -> Result<GridCounts<T>> {
    let d = grid.dim();
    if data.dim() != d {
        return Err(KdeError::DimensionMismatch {
            expected: d,
            found: data.dim(),
        });
    }
    let sizes = grid.sizes();
    let mut strides = vec![1usize; d];
    for k in (0..d.saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * sizes[k + 1];
    }

    let mut values = ArrayD::<T>::zeros(IxDyn(sizes));
    let flat = values.as_slice_mut().expect("fresh array is contiguous");
    let mut base = vec![0usize; d];
    let mut frac = vec![T::zero(); d];
    let mut clamped = 0usize;

    for point in data.points().rows() {
        let mut outside = false;
        for k in 0..d {
            let last = T::from_usize_lossy(sizes[k] - 1);
            let mut pos = (point[k] - grid.lower()[k]) / grid.binwidths()[k];
            if pos < T::zero() {
                pos = T::zero();
                outside = true;
            } else if pos > last {
                pos = last;
                outside = true;
            }
            let cell = pos.floor().to_usize().unwrap_or(0).min(sizes[k] - 2);
            base[k] = cell;
            frac[k] = pos - T::from_usize_lossy(cell);
        }
        if outside {
            clamped += 1;
        }
        for corner in 0..(1usize << d) {
            let mut w = T::one();
            let mut offset = 0usize;
            for k in 0..d {
                let upper = (corner >> (d - 1 - k)) & 1 == 1;
                w *= if upper { frac[k] } else { T::one() - frac[k] };
                offset += (base[k] + usize::from(upper)) * strides[k];
            }
            if w != T::zero() {
                flat[offset] += w;
            }
        }
    }

    Ok(GridCounts {
        values,
        total: data.n(),
        clamped,
    })
}
