//! d-dimensional FFT and the circular-convolution contract built on it.

use ndarray::{ArrayD, Axis, IxDyn};
use num_complex::Complex;
use realfft::RealFftPlanner;
use rustfft::{FftDirection, FftPlanner};

use crate::error::{KdeError, Result};
use crate::scalar::Scalar;

/// Real array on a padded (power-of-two) lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct PaddedArray<T: Scalar> {
    values: ArrayD<T>,
}

impl<T: Scalar> PaddedArray<T> {
    pub fn zeros(shape: &[usize]) -> Self {
        Self {
            values: ArrayD::zeros(IxDyn(shape)),
        }
    }

    pub fn from_array(values: ArrayD<T>) -> Self {
        Self { values }
    }

    pub fn shape(&self) -> &[usize] {
        self.values.shape()
    }

    pub fn values(&self) -> &ArrayD<T> {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut ArrayD<T> {
        &mut self.values
    }

    pub fn into_inner(self) -> ArrayD<T> {
        self.values
    }
}

/// `P_k` = smallest power of two `≥ M_k + 2·L_k`.
pub fn choose_pad_sizes(sizes: &[usize], support: &[usize]) -> Vec<usize> {
    sizes
        .iter()
        .zip(support)
        .map(|(&m, &l)| (m + 2 * l).next_power_of_two())
        .collect()
}

/// In-place DFT along axes `0..axes`. Unnormalized in both directions.
fn transform_leading_axes<T: Scalar>(
    data: &mut ArrayD<Complex<T>>,
    axes: usize,
    direction: FftDirection,
    planner: &mut FftPlanner<T>,
) {
    let shape = data.shape().to_vec();
    for (axis, &len) in shape.iter().enumerate().take(axes) {
        if len <= 1 {
            continue;
        }
        let fft = planner.plan_fft(len, direction);
        let mut line = vec![Complex::default(); len];
        let mut scratch = vec![Complex::default(); fft.get_inplace_scratch_len()];
        for mut lane in data.lanes_mut(Axis(axis)) {
            if let Some(slice) = lane.as_slice_mut() {
                fft.process_with_scratch(slice, &mut scratch);
                continue;
            }
            for (dst, src) in line.iter_mut().zip(lane.iter()) {
                *dst = *src;
            }
            fft.process_with_scratch(&mut line, &mut scratch);
            for (dst, src) in lane.iter_mut().zip(&line) {
                *dst = *src;
            }
        }
    }
}

/// Circular convolution `s[p] = Σ_q a[q]·b[(p − q) mod P]` via the convolution
/// theorem. The `1/∏P_k` normalization is applied here, and the imaginary
/// residue discarded by the complex-to-real inverse is checked against `1e-9·max|s|`.
pub fn circular_convolve<T: Scalar>(a: &PaddedArray<T>, b: &PaddedArray<T>) -> Result<PaddedArray<T>> {
    if a.shape() != b.shape() {
        return Err(KdeError::ShapeMismatch {
            left: a.shape().to_vec(),
            right: b.shape().to_vec(),
        });
    }
    let total: usize = a.shape().iter().product();
    if total == 0 {
        return Ok(a.clone());
    }
    if a.shape().is_empty() {
        return Ok(PaddedArray {
            values: &a.values * &b.values,
        });
    }

    // Real-to-complex along the last axis keeps only the `P/2 + 1`
    // non-redundant bins; the remaining axes use full complex transforms.
    let last = a.shape().len() - 1;
    let p_last = a.shape()[last];
    let mut spec_shape = a.shape().to_vec();
    spec_shape[last] = p_last / 2 + 1;

    let mut planner = FftPlanner::new();
    let mut real_planner = RealFftPlanner::<T>::new();
    let r2c = real_planner.plan_fft_forward(p_last);
    let c2r = real_planner.plan_fft_inverse(p_last);

    let forward = |x: &ArrayD<T>| {
        let mut spec = ArrayD::<Complex<T>>::zeros(IxDyn(&spec_shape));
        let mut line = r2c.make_input_vec();
        let mut scratch = r2c.make_scratch_vec();
        for (src, mut dst) in x.lanes(Axis(last)).into_iter().zip(spec.lanes_mut(Axis(last))) {
            for (l, v) in line.iter_mut().zip(src.iter()) {
                *l = *v;
            }
            let out = dst.as_slice_mut().expect("last axis is contiguous");
            r2c.process_with_scratch(&mut line, out, &mut scratch)
                .expect("buffer lengths come from the plan");
        }
        spec
    };
    let mut fa = forward(&a.values);
    let mut fb = forward(&b.values);
    transform_leading_axes(&mut fa, last, FftDirection::Forward, &mut planner);
    transform_leading_axes(&mut fb, last, FftDirection::Forward, &mut planner);
    fa.zip_mut_with(&fb, |x, y| *x *= *y);
    drop(fb);
    transform_leading_axes(&mut fa, last, FftDirection::Inverse, &mut planner);

    // The DC and (for even P) Nyquist bins of each last-axis lane must be real
    // for the inverse to be a real signal; their imaginary parts are the
    // residue the complex-to-real step discards.
    let scale = T::one() / T::from_usize_lossy(total);
    let mut values = ArrayD::<T>::zeros(IxDyn(a.shape()));
    let mut line = c2r.make_output_vec();
    let mut scratch = c2r.make_scratch_vec();
    let mut max_imag = T::zero();
    let mut max_real = T::zero();
    let nyquist = if p_last.is_multiple_of(2) { Some(p_last / 2) } else { None };
    for (mut src, mut dst) in fa.lanes_mut(Axis(last)).into_iter().zip(values.lanes_mut(Axis(last))) {
        let bins = src.as_slice_mut().expect("last axis is contiguous");
        max_imag = max_imag.max(bins[0].im.abs());
        if let Some(k) = nyquist {
            max_imag = max_imag.max(bins[k].im.abs());
        }
        // A nonzero DC/Nyquist imaginary part is reported as an error but the
        // transform is still carried out; the gate below decides acceptance.
        match c2r.process_with_scratch(bins, &mut line, &mut scratch) {
            Ok(()) | Err(realfft::FftError::InputValues(..)) => {}
            Err(e) => unreachable!("buffer lengths come from the plan: {e}"),
        }
        for (d, v) in dst.iter_mut().zip(&line) {
            let re = *v * scale;
            max_real = max_real.max(re.abs());
            *d = re;
        }
    }
    let max_imag = max_imag * scale;

    // Round-off floor for inputs whose convolution cancels to ~0.
    let abs_sum = |x: &ArrayD<T>| x.iter().fold(T::zero(), |s, v| s + v.abs());
    let magnitude = abs_sum(&a.values) * abs_sum(&b.values) / T::from_usize_lossy(total).sqrt();
    let gate = T::roundoff_gate(1e-9, 1e4);
    let bound = gate * max_real.max(magnitude * T::epsilon());
    if max_imag > bound {
        return Err(KdeError::NumericalResidue {
            context: "imaginary part of inverse transform",
            residue: max_imag.to_f64().unwrap_or(f64::NAN),
            gate: bound.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(PaddedArray { values })
}
