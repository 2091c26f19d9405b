//! Small dense symmetric-matrix utilities: SPD validation, Cholesky factor,
//! Jacobi eigendecomposition and the symmetric inverse square root.

use ndarray::{Array2, ArrayView2};

use crate::error::{KdeError, Result};
use crate::scalar::Scalar;

const MAX_JACOBI_SWEEPS: usize = 64;

/// Validated symmetric positive-definite bandwidth matrix with cached factors.
#[derive(Debug, Clone, PartialEq)]
pub struct BandwidthMatrix<T: Scalar> {
    entries: Array2<T>,
    cholesky: Array2<T>,
    inv_sqrt: Array2<T>,
    eigenvalues: Vec<T>,
    det: T,
    lambda_max: T,
}

impl<T: Scalar> BandwidthMatrix<T> {
    /// Validates `matrix` and builds all derived factors. Asymmetric input is
    /// rejected, never symmetrized.
    pub fn new(matrix: ArrayView2<'_, T>) -> Result<Self> {
        validate_spd(matrix)
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let d = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != d) {
            return Err(KdeError::NotSquare {
                rows: d,
                cols: bad.len(),
            });
        }
        let flat: Vec<T> = rows.iter().flatten().copied().collect();
        let m = Array2::from_shape_vec((d, d), flat).expect("square shape checked above");
        validate_spd(m.view())
    }

    pub fn identity(dim: usize) -> Self {
        validate_spd(Array2::eye(dim).view()).expect("identity is SPD")
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &Array2<T> {
        &self.entries
    }

    /// Symmetric `H^{-1/2}`.
    pub fn inv_sqrt(&self) -> &Array2<T> {
        &self.inv_sqrt
    }

    /// Lower-triangular Cholesky factor `L` with `L Lᵀ = H`.
    pub fn cholesky(&self) -> &Array2<T> {
        &self.cholesky
    }

    pub fn det(&self) -> T {
        self.det
    }

    pub fn lambda_max(&self) -> T {
        self.lambda_max
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    /// `uᵀ H⁻¹ u`, computed by forward substitution against the Cholesky factor.
    pub fn quadratic_form(&self, u: &[T]) -> T {
        debug_assert_eq!(u.len(), self.dim());
        let d = self.dim();
        let mut y = [T::zero(); 8];
        let mut heap;
        let y: &mut [T] = if d <= y.len() {
            &mut y[..d]
        } else {
            heap = vec![T::zero(); d];
            &mut heap
        };
        let mut acc = T::zero();
        for i in 0..d {
            let mut s = u[i];
            for (j, &yj) in y[..i].iter().enumerate() {
                s -= self.cholesky[[i, j]] * yj;
            }
            y[i] = s / self.cholesky[[i, i]];
            acc += y[i] * y[i];
        }
        acc
    }

    /// The constrained counterpart: same diagonal, off-diagonal entries zeroed.
    pub fn diagonal_part(&self) -> Self {
        let d = self.dim();
        let diag = Array2::from_shape_fn((d, d), |(i, j)| {
            if i == j {
                self.entries[[i, i]]
            } else {
                T::zero()
            }
        });
        validate_spd(diag.view()).expect("positive diagonal of an SPD matrix is SPD")
    }

    pub fn is_diagonal(&self) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| i == j || self.entries[[i, j]] == T::zero()))
    }

    /// `c·H` for `c > 0`.
    pub fn scaled(&self, c: T) -> Result<Self> {
        validate_spd(self.entries.mapv(|v| v * c).view())
    }
}

/// Checks that `matrix` is square, finite, symmetric to within `1e-12` of its
/// largest entry, and positive definite, then returns it with its factors.
pub fn validate_spd<T: Scalar>(matrix: ArrayView2<'_, T>) -> Result<BandwidthMatrix<T>> {
    let (rows, cols) = matrix.dim();
    if rows != cols || rows == 0 {
        return Err(KdeError::NotSquare { rows, cols });
    }
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(KdeError::NonFinite);
    }

    let scale = matrix.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let mut asymmetry = T::zero();
    for i in 0..rows {
        for j in (i + 1)..rows {
            asymmetry = asymmetry.max((matrix[[i, j]] - matrix[[j, i]]).abs());
        }
    }
    if asymmetry > T::roundoff_gate(1e-12, 4.0) * scale {
        return Err(KdeError::NotSymmetric {
            asymmetry: asymmetry.to_f64().unwrap_or(f64::NAN),
        });
    }

    let entries = matrix.to_owned();
    let cholesky = cholesky_lower(&entries)?;
    let (eigenvalues, vectors) = symmetric_eigen(&entries);
    if let Some((idx, &ev)) = eigenvalues.iter().enumerate().find(|(_, ev)| **ev <= T::zero()) {
        return Err(KdeError::NotPositiveDefinite {
            pivot: idx,
            value: ev.to_f64().unwrap_or(f64::NAN),
        });
    }

    let det = (0..rows).fold(T::one(), |acc, i| acc * cholesky[[i, i]] * cholesky[[i, i]]);
    let lambda_max = eigenvalues[rows - 1];
    let inv_sqrt = spectral_map(&eigenvalues, &vectors, |ev| T::one() / ev.sqrt());

    Ok(BandwidthMatrix {
        entries,
        cholesky,
        inv_sqrt,
        eigenvalues,
        det,
        lambda_max,
    })
}

/// Symmetric inverse square root `V Λ^{-1/2} Vᵀ` of an SPD matrix.
pub fn matrix_inv_sqrt<T: Scalar>(h: ArrayView2<'_, T>) -> Result<Array2<T>> {
    validate_spd(h).map(|bw| bw.inv_sqrt)
}

fn cholesky_lower<T: Scalar>(a: &Array2<T>) -> Result<Array2<T>> {
    let n = a.nrows();
    let mut l = Array2::<T>::zeros((n, n));
    for j in 0..n {
        let mut pivot = a[[j, j]];
        for k in 0..j {
            pivot -= l[[j, k]] * l[[j, k]];
        }
        if !(pivot > T::zero()) {
            return Err(KdeError::NotPositiveDefinite {
                pivot: j,
                value: pivot.to_f64().unwrap_or(f64::NAN),
            });
        }
        let diag = pivot.sqrt();
        l[[j, j]] = diag;
        for i in (j + 1)..n {
            let mut s = a[[i, j]];
            for k in 0..j {
                s -= l[[i, k]] * l[[j, k]];
            }
            l[[i, j]] = s / diag;
        }
    }
    Ok(l)
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns eigenvalues
/// in ascending order and the matching eigenvectors as columns.
pub fn symmetric_eigen<T: Scalar>(a: &Array2<T>) -> (Vec<T>, Array2<T>) {
    let n = a.nrows();
    let mut m = a.clone();
    // Work on the symmetric part so tiny input asymmetry cannot stall convergence.
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = (m[[i, j]] + m[[j, i]]) * T::lit(0.5);
            m[[i, j]] = avg;
            m[[j, i]] = avg;
        }
    }
    let mut v = Array2::<T>::eye(n);
    let total: T = m.iter().fold(T::zero(), |s, x| s + *x * *x);
    let tiny = T::epsilon() * T::epsilon() * total;

    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut off = T::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[[i, j]] * m[[i, j]];
            }
        }
        if off <= tiny {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[[p, q]];
                if apq == T::zero() {
                    continue;
                }
                let theta = (m[[q, q]] - m[[p, p]]) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[[k, p]], m[[k, q]]);
                    m[[k, p]] = c * mkp - s * mkq;
                    m[[k, q]] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[[p, k]], m[[q, k]]);
                    m[[p, k]] = c * mpk - s * mqk;
                    m[[q, k]] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[[k, p]], v[[k, q]]);
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[[i, i]].partial_cmp(&m[[j, j]]).expect("finite eigenvalues"));
    let values = order.iter().map(|&i| m[[i, i]]).collect();
    let vectors = Array2::from_shape_fn((n, n), |(r, c)| v[[r, order[c]]]);
    (values, vectors)
}

/// `V f(Λ) Vᵀ`, symmetrized.
fn spectral_map<T: Scalar>(values: &[T], vectors: &Array2<T>, f: impl Fn(T) -> T) -> Array2<T> {
    let n = values.len();
    let fv: Vec<T> = values.iter().map(|&ev| f(ev)).collect();
    let mut out = Array2::<T>::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let mut s = T::zero();
            for k in 0..n {
                s += vectors[[i, k]] * fv[k] * vectors[[j, k]];
            }
            out[[i, j]] = s;
            out[[j, i]] = s;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;

    fn max_abs_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
        a.iter().zip(b.iter()).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    #[test]
    fn identity_factors() {
        let h = validate_spd(Array2::<f64>::eye(2).view()).unwrap();
        assert_eq!(h.det(), 1.0);
        assert_eq!(h.lambda_max(), 1.0);
        assert!(max_abs_diff(h.inv_sqrt(), &Array2::eye(2)) < 1e-15);
    }

    #[test]
    fn correlated_2x2() {
        let h: BandwidthMatrix<f64> = validate_spd(array![[1.0, 0.5], [0.5, 1.0]].view()).unwrap();
        assert!((h.det() - 0.75).abs() < 1e-14);
        assert!((h.lambda_max() - 1.5).abs() < 1e-14);
        assert!((h.eigenvalues()[0] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn indefinite_rejected() {
        let err = validate_spd(array![[1.0, 2.0], [2.0, 1.0]].view()).unwrap_err();
        assert!(matches!(err, KdeError::NotPositiveDefinite { .. }));
    }

    #[test]
    fn asymmetric_rejected() {
        let err = validate_spd(array![[1.0, 0.5], [0.4, 1.0]].view()).unwrap_err();
        assert!(matches!(err, KdeError::NotSymmetric { .. }));
        // Rounding-level asymmetry is accepted.
        validate_spd(array![[1.0, 0.5], [0.5 + 1e-14, 1.0]].view()).unwrap();
    }

    #[test]
    fn non_square_rejected() {
        let m = Array2::<f64>::zeros((2, 3));
        assert_eq!(
            validate_spd(m.view()).unwrap_err(),
            KdeError::NotSquare { rows: 2, cols: 3 }
        );
        assert!(BandwidthMatrix::<f64>::from_rows(&[vec![1.0, 0.0], vec![0.0]]).is_err());
    }

    #[test]
    fn non_finite_rejected() {
        let m = array![[1.0, f64::NAN], [f64::NAN, 1.0]];
        assert_eq!(validate_spd(m.view()).unwrap_err(), KdeError::NonFinite);
    }

    #[test]
    fn inv_sqrt_diagonal() {
        let r = matrix_inv_sqrt(array![[4.0, 0.0], [0.0, 9.0]].view()).unwrap();
        assert!(max_abs_diff(&r, &array![[0.5, 0.0], [0.0, 1.0 / 3.0]]) < 1e-15);
    }

    #[test]
    fn inv_sqrt_by_multiplication() {
        let h = array![[2.0, 1.0], [1.0, 2.0]];
        let r = matrix_inv_sqrt(h.view()).unwrap();
        let prod = r.dot(&r).dot(&h);
        assert!(max_abs_diff(&prod, &Array2::eye(2)) < 1e-10);
    }

    #[test]
    fn quadratic_form_matches_explicit_inverse() {
        let h = BandwidthMatrix::<f64>::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        // H^{-1} = [[2,-1],[-1,2]]/3
        let u = [1.0, -2.0];
        let expected = (2.0 * 1.0 + 2.0 * 4.0 - 2.0 * 1.0 * -2.0 * 1.0) / 3.0;
        assert!((h.quadratic_form(&u) - expected).abs() < 1e-14);
    }

    #[test]
    fn diagonal_part_drops_correlation() {
        let h = BandwidthMatrix::from_rows(&[vec![2.0, 0.9], vec![0.9, 1.0]]).unwrap();
        let d = h.diagonal_part();
        assert!(d.is_diagonal());
        assert!(!h.is_diagonal());
        assert_eq!(d.entries()[[0, 0]], 2.0);
        assert_eq!(d.entries()[[1, 1]], 1.0);
    }

    #[test]
    fn single_precision_works() {
        let h = validate_spd(array![[1.0f32, 0.5], [0.5, 1.0]].view()).unwrap();
        assert!((h.lambda_max() - 1.5).abs() < 1e-6);
    }

    fn spd_strategy() -> impl Strategy<Value = Array2<f64>> {
        (1usize..=5).prop_flat_map(|d| {
            prop::collection::vec(-1.0f64..1.0, d * d).prop_map(move |raw| {
                let a = Array2::from_shape_vec((d, d), raw).unwrap();
                a.dot(&a.t()) + Array2::<f64>::eye(d) * 0.1
            })
        })
    }

    proptest! {
        #[test]
        fn inv_sqrt_whitens(h in spd_strategy()) {
            let bw = validate_spd(h.view()).unwrap();
            let r = bw.inv_sqrt();
            let d = bw.dim();
            prop_assert!(max_abs_diff(r, &r.t().to_owned()) == 0.0);
            let w = r.dot(&h).dot(r);
            prop_assert!(max_abs_diff(&w, &Array2::eye(d)) < 1e-10);
        }

        #[test]
        fn det_is_eigen_product(h in spd_strategy()) {
            let bw = validate_spd(h.view()).unwrap();
            let prod: f64 = bw.eigenvalues().iter().product();
            prop_assert!((prod - bw.det()).abs() <= 1e-10 * bw.det());
        }

        #[test]
        fn lambda_max_scales_linearly(h in spd_strategy(), c in 0.01f64..100.0) {
            let bw = validate_spd(h.view()).unwrap();
            let scaled = bw.scaled(c).unwrap();
            prop_assert!((scaled.lambda_max() - c * bw.lambda_max()).abs() <= 1e-12 * c * bw.lambda_max());
        }

        #[test]
        fn eigenvectors_reconstruct(h in spd_strategy()) {
            let (vals, vecs) = symmetric_eigen(&h);
            let lam = Array2::from_diag(&ndarray::Array1::from(vals));
            let back = vecs.dot(&lam).dot(&vecs.t());
            let scale = h.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            prop_assert!(max_abs_diff(&back, &h) < 1e-12 * scale.max(1.0));
        }
    }
}
