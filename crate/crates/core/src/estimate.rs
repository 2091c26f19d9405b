//! Density evaluation pipelines: exact naive sum, direct binned convolution,
//! and the two FFT embeddings (wrap-around and zero-padded).

use std::fmt;
use std::str::FromStr;

use ndarray::{ArrayD, IxDyn, Slice};

use crate::error::{KdeError, Result};
use crate::fft::{choose_pad_sizes, circular_convolve, PaddedArray};
use crate::grid::{increment, GridCounts, GridSpec, SampleMatrix};
use crate::kernel::{kernel_unchecked, normalizer, KernelWeights};
use crate::linalg::BandwidthMatrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Naive,
    BinnedDirect,
    FftWand,
    FftCorrected,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Naive,
        Method::BinnedDirect,
        Method::FftWand,
        Method::FftCorrected,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Naive => "naive",
            Method::BinnedDirect => "binned-direct",
            Method::FftWand => "fft-wand",
            Method::FftCorrected => "fft-corrected",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = KdeError;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| KdeError::InvalidParameter(format!("unknown method `{s}`")))
    }
}

/// How the kernel and count arrays are laid out on the padded lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Embedding {
    /// Wrap-around ordering of the non-negative kernel quadrant. Only exact
    /// for axis-aligned (diagonal) bandwidth matrices.
    Wand,
    /// Full kernel block at the origin, counts offset by `L`; zero padding only.
    Corrected,
}

impl Embedding {
    /// Start of the `M`-shaped output window inside the padded convolution.
    /// Frozen from the delta calibration in [`calibrate_extraction_offset`].
    pub fn extraction_offset(self, support: &[usize]) -> Vec<usize> {
        match self {
            Embedding::Wand => vec![0; support.len()],
            Embedding::Corrected => support.iter().map(|l| 2 * l).collect(),
        }
    }

    pub fn method(self) -> Method {
        match self {
            Embedding::Wand => Method::FftWand,
            Embedding::Corrected => Method::FftCorrected,
        }
    }
}

/// Density estimates at every node of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid<T: Scalar> {
    pub grid: GridSpec<T>,
    pub values: ArrayD<T>,
    pub method: Method,
    /// Kernel half-widths used by the binned methods; `None` for the naive sum.
    pub support: Option<Vec<usize>>,
}

impl<T: Scalar> DensityGrid<T> {
    /// `∏δ_k · Σ f̃`: the estimate's mass captured on the grid.
    pub fn mass(&self) -> T {
        self.grid.cell_volume() * self.values.iter().fold(T::zero(), |s, &v| s + v)
    }

    pub fn max_value(&self) -> T {
        self.values.iter().fold(T::zero(), |m, &v| m.max(v))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        if self.values.shape() != other.values.shape() {
            return Err(KdeError::ShapeMismatch {
                left: self.values.shape().to_vec(),
                right: other.values.shape().to_vec(),
            });
        }
        Ok(self
            .values
            .iter()
            .zip(other.values.iter())
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs())))
    }
}

/// Exact `f̂(x) = (1/n) Σ_i K_H(x − X_i)` at each evaluation point.
pub fn naive_kde<T: Scalar>(
    data: &SampleMatrix<T>,
    h: &BandwidthMatrix<T>,
    eval_points: &SampleMatrix<T>,
) -> Result<Vec<T>> {
    let d = h.dim();
    for found in [data.dim(), eval_points.dim()] {
        if found != d {
            return Err(KdeError::DimensionMismatch { expected: d, found });
        }
    }
    let norm = normalizer(h) / T::from_usize_lossy(data.n());
    let mut diff = vec![T::zero(); d];
    Ok(eval_points
        .points()
        .rows()
        .into_iter()
        .map(|x| {
            let mut acc = T::zero();
            for xi in data.points().rows() {
                for k in 0..d {
                    diff[k] = x[k] - xi[k];
                }
                acc += kernel_unchecked(&diff, h, norm);
            }
            acc
        })
        .collect())
}

/// [`naive_kde`] evaluated at every node of `grid`.
pub fn naive_kde_on_grid<T: Scalar>(
    data: &SampleMatrix<T>,
    h: &BandwidthMatrix<T>,
    grid: &GridSpec<T>,
) -> Result<DensityGrid<T>> {
    let values = naive_kde(data, h, &grid.nodes())?;
    Ok(DensityGrid {
        grid: grid.clone(),
        values: ArrayD::from_shape_vec(IxDyn(grid.sizes()), values).expect("one value per node"),
        method: Method::Naive,
        support: None,
    })
}

fn check_shapes<T: Scalar>(grid: &GridSpec<T>, counts: &GridCounts<T>, kw: &KernelWeights<T>) -> Result<()> {
    if counts.shape() != grid.sizes() {
        return Err(KdeError::ShapeMismatch {
            left: counts.shape().to_vec(),
            right: grid.sizes().to_vec(),
        });
    }
    if kw.dim() != grid.dim() {
        return Err(KdeError::ShapeMismatch {
            left: kw.values().shape().to_vec(),
            right: grid.sizes().to_vec(),
        });
    }
    Ok(())
}

fn row_major_strides(shape: &[usize]) -> Vec<usize> {
    let mut strides = vec![1usize; shape.len()];
    for k in (0..shape.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * shape[k + 1];
    }
    strides
}

struct DirectSum<'a, T> {
    counts: &'a [T],
    /// Kernel reversed along every axis, so that `c_{j−l}` and `k_l` are both
    /// read in increasing memory order.
    flipped: &'a [T],
    sizes: &'a [usize],
    support: &'a [usize],
    count_strides: Vec<usize>,
    kernel_strides: Vec<usize>,
}

impl<T: Scalar> DirectSum<'_, T> {
    /// `Σ_l c_{j−l} k_l` over offsets `l` in the support box with `j − l` on the grid.
    fn at(&self, j: &[usize], dim: usize, c_off: usize, k_off: usize) -> T {
        let half = self.support[dim];
        let jk = j[dim];
        // Source nodes i = j − l with |l| ≤ L and 0 ≤ i < M; the flipped kernel
        // holds k_l at position L − l = i + L − j.
        let first = jk.saturating_sub(half);
        let last = (jk + half).min(self.sizes[dim] - 1);
        let k_first = first + half - jk;
        if dim + 1 == j.len() {
            let c = &self.counts[c_off + first..=c_off + last];
            let k = &self.flipped[k_off + k_first..k_off + k_first + c.len()];
            dot(c, k)
        } else {
            let (cs, ks) = (self.count_strides[dim], self.kernel_strides[dim]);
            (0..=last - first).fold(T::zero(), |acc, t| {
                acc + self.at(j, dim + 1, c_off + (first + t) * cs, k_off + (k_first + t) * ks)
            })
        }
    }
}

#[inline]
fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut acc = [T::zero(); 4];
    let (a4, b4) = (a.chunks_exact(4), b.chunks_exact(4));
    let (ra, rb) = (a4.remainder(), b4.remainder());
    for (x, y) in a4.zip(b4) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let mut tail = T::zero();
    for (x, y) in ra.iter().zip(rb) {
        tail += *x * *y;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Truncated convolution `f̃_j = Σ_{|l_k| ≤ L_k} c_{j−l} k_l` summed directly,
/// with `c` taken as zero off the grid.
pub fn binned_kde_direct<T: Scalar>(
    grid: &GridSpec<T>,
    counts: &GridCounts<T>,
    kw: &KernelWeights<T>,
) -> Result<DensityGrid<T>> {
    check_shapes(grid, counts, kw)?;
    let sizes = grid.sizes();
    let counts_std = counts.values().as_standard_layout();
    let mut flipped = kw.values().view();
    for axis in 0..flipped.ndim() {
        flipped.invert_axis(ndarray::Axis(axis));
    }
    let flipped = flipped.as_standard_layout();
    let sum = DirectSum {
        counts: counts_std.as_slice().expect("standard layout"),
        flipped: flipped.as_slice().expect("standard layout"),
        sizes,
        support: kw.support(),
        count_strides: row_major_strides(sizes),
        kernel_strides: row_major_strides(kw.values().shape()),
    };
    let mut values = ArrayD::<T>::zeros(IxDyn(sizes));
    let mut j = vec![0usize; sizes.len()];
    for v in values.iter_mut() {
        *v = sum.at(&j, 0, 0, 0);
        increment(&mut j, sizes);
    }
    Ok(DensityGrid {
        grid: grid.clone(),
        values,
        method: Method::BinnedDirect,
        support: Some(kw.support().to_vec()),
    })
}

fn check_padding(sizes: &[usize], support: &[usize], padded: &[usize]) -> Result<()> {
    let ok = padded.len() == sizes.len()
        && sizes
            .iter()
            .zip(support)
            .zip(padded)
            .all(|((&m, &l), &p)| p >= m + 2 * l);
    if ok {
        Ok(())
    } else {
        Err(KdeError::ShapeMismatch {
            left: padded.to_vec(),
            right: sizes.iter().zip(support).map(|(m, l)| m + 2 * l).collect(),
        })
    }
}

/// Wrap-around embedding: the `l ≥ 0` kernel quadrant sits at the origin and
/// is mirrored onto the far edges, so `k_l` is read back as `k_{|l|}`. Counts
/// occupy the origin corner.
///
/// Exact only when `k_l = k_{|l|}` componentwise, i.e. for diagonal `H`. Kept
/// as a reference for that failure mode.
pub fn embed_wand<T: Scalar>(
    kw: &KernelWeights<T>,
    counts: &GridCounts<T>,
    padded: &[usize],
) -> Result<(PaddedArray<T>, PaddedArray<T>)> {
    let support = kw.support();
    if counts.shape().len() != support.len() {
        return Err(KdeError::ShapeMismatch {
            left: counts.shape().to_vec(),
            right: kw.values().shape().to_vec(),
        });
    }
    check_padding(counts.shape(), support, padded)?;
    let d = support.len();

    let mut kernel = PaddedArray::zeros(padded);
    let mut idx = vec![0usize; d];
    let mut src = vec![0usize; d];
    for v in kernel.values_mut().iter_mut() {
        let mut inside = true;
        for k in 0..d {
            let (p, half, len) = (idx[k], support[k], padded[k]);
            let mirrored = if p <= half {
                p
            } else if p >= len - half {
                len - p
            } else {
                inside = false;
                break;
            };
            src[k] = mirrored + half;
        }
        if inside {
            *v = kw.values()[IxDyn(&src)];
        }
        increment(&mut idx, padded);
    }

    let mut padded_counts = PaddedArray::zeros(padded);
    place(padded_counts.values_mut(), counts.values(), &vec![0; d]);
    Ok((kernel, padded_counts))
}

/// Zero-padded embedding: the full kernel block `k_{−L..L}` verbatim at the
/// origin, counts starting at offset `L_k` in every dimension.
pub fn embed_corrected<T: Scalar>(
    kw: &KernelWeights<T>,
    counts: &GridCounts<T>,
    padded: &[usize],
) -> Result<(PaddedArray<T>, PaddedArray<T>)> {
    let support = kw.support();
    if counts.shape().len() != support.len() {
        return Err(KdeError::ShapeMismatch {
            left: counts.shape().to_vec(),
            right: kw.values().shape().to_vec(),
        });
    }
    check_padding(counts.shape(), support, padded)?;
    let d = support.len();

    let mut kernel = PaddedArray::zeros(padded);
    place(kernel.values_mut(), kw.values(), &vec![0; d]);
    let mut padded_counts = PaddedArray::zeros(padded);
    place(padded_counts.values_mut(), counts.values(), support);
    Ok((kernel, padded_counts))
}

fn place<T: Scalar>(dst: &mut ArrayD<T>, src: &ArrayD<T>, offset: &[usize]) {
    let mut view = dst.view_mut();
    for (k, (&off, &len)) in offset.iter().zip(src.shape()).enumerate() {
        view.slice_axis_inplace(ndarray::Axis(k), Slice::from(off..off + len));
    }
    view.assign(src);
}

/// Copies the `sizes`-shaped window starting at `offset` out of `s`, clamping
/// round-off negatives to zero. Negatives beyond `1e-12·max|s|` are an error.
pub fn extract<T: Scalar>(s: &PaddedArray<T>, sizes: &[usize], offset: &[usize]) -> Result<ArrayD<T>> {
    let padded = s.shape();
    let fits = padded.len() == sizes.len()
        && offset.len() == sizes.len()
        && (0..sizes.len()).all(|k| offset[k] + sizes[k] <= padded[k]);
    if !fits {
        return Err(KdeError::WindowOutOfRange {
            offset: offset.to_vec(),
            size: sizes.to_vec(),
            padded: padded.to_vec(),
        });
    }
    let mut view = s.values().view();
    for (k, (&off, &len)) in offset.iter().zip(sizes).enumerate() {
        view.slice_axis_inplace(ndarray::Axis(k), Slice::from(off..off + len));
    }
    let scale = view.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let floor = view.iter().fold(T::zero(), |m, &v| m.min(v));
    let gate = T::roundoff_gate(1e-12, 100.0) * scale;
    if -floor > gate {
        return Err(KdeError::NumericalResidue {
            context: "negative density after convolution",
            residue: (-floor).to_f64().unwrap_or(f64::NAN),
            gate: gate.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(view.mapv(|v| v.max(T::zero())))
}

/// Binned estimate through padding, circular convolution and window extraction.
pub fn binned_kde_fft<T: Scalar>(
    grid: &GridSpec<T>,
    counts: &GridCounts<T>,
    kw: &KernelWeights<T>,
    embedding: Embedding,
) -> Result<DensityGrid<T>> {
    check_shapes(grid, counts, kw)?;
    let sizes = grid.sizes();
    let support = kw.support();
    let padded = choose_pad_sizes(sizes, support);
    let (kernel, padded_counts) = match embedding {
        Embedding::Wand => embed_wand(kw, counts, &padded)?,
        Embedding::Corrected => embed_corrected(kw, counts, &padded)?,
    };
    let s = circular_convolve(&padded_counts, &kernel)?;
    let values = extract(&s, sizes, &embedding.extraction_offset(support))?;
    Ok(DensityGrid {
        grid: grid.clone(),
        values,
        method: embedding.method(),
        support: Some(support.to_vec()),
    })
}

/// Locates the output window of an embedding empirically: a unit count at an
/// interior node is convolved through the FFT path and every candidate window
/// is compared against [`binned_kde_direct`]. Returns the unique matching offset.
pub fn calibrate_extraction_offset<T: Scalar>(
    embedding: Embedding,
    grid: &GridSpec<T>,
    kw: &KernelWeights<T>,
) -> Option<Vec<usize>> {
    let sizes = grid.sizes();
    let d = sizes.len();
    let mut delta = ArrayD::<T>::zeros(IxDyn(sizes));
    let node: Vec<usize> = sizes.iter().map(|m| m / 2).collect();
    delta[IxDyn(&node)] = T::one();
    let counts = GridCounts::from_array(delta, 1).ok()?;
    let reference = binned_kde_direct(grid, &counts, kw).ok()?;

    let padded = choose_pad_sizes(sizes, kw.support());
    let (kernel, padded_counts) = match embedding {
        Embedding::Wand => embed_wand(kw, &counts, &padded).ok()?,
        Embedding::Corrected => embed_corrected(kw, &counts, &padded).ok()?,
    };
    let s = circular_convolve(&padded_counts, &kernel).ok()?;
    let tol = T::roundoff_gate(1e-10, 1e4) * reference.max_value();

    let span: Vec<usize> = (0..d).map(|k| padded[k] - sizes[k] + 1).collect();
    let mut offset = vec![0usize; d];
    let mut found = None;
    for _ in 0..span.iter().product::<usize>() {
        let mut view = s.values().view();
        for k in 0..d {
            view.slice_axis_inplace(ndarray::Axis(k), Slice::from(offset[k]..offset[k] + sizes[k]));
        }
        let matches = view
            .iter()
            .zip(reference.values.iter())
            .all(|(a, b)| (*a - *b).abs() <= tol);
        if matches {
            if found.is_some() {
                return None;
            }
            found = Some(offset.clone());
        }
        increment(&mut offset, &span);
    }
    found
}
