//! Thin wrappers over nalgebra's dense factorizations.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, Schur, SVD};
use num_complex::Complex64;
#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;
pub type CVector = DVector<Complex64>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("QR iteration did not converge for a {dim}x{dim} matrix")]
    EigenFailure { dim: usize },
    #[error("matrix is singular to working precision")]
    Singular,
}

/// Iteration budget per matrix row for the Francis QR sweep.
const QR_ITERS_PER_ROW: usize = 100;

/// All eigenvalues of a real matrix from its real Schur form.
///
/// Eigenvalues that are real come out with an exactly zero imaginary part,
/// conjugate pairs come from 2×2 blocks.
pub fn real_eigenvalues(a: RMatrix) -> Result<Vec<Complex64>, LinalgError> {
    let dim = a.nrows();
    if dim == 0 {
        return Ok(Vec::new());
    }
    let schur = Schur::try_new(a, f64::EPSILON, QR_ITERS_PER_ROW * dim.max(10))
        .ok_or(LinalgError::EigenFailure { dim })?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// All eigenvalues of a complex matrix.
pub fn complex_eigenvalues(m: CMatrix) -> Result<Vec<Complex64>, LinalgError> {
    let dim = m.nrows();
    if dim == 0 {
        return Ok(Vec::new());
    }
    let schur = Schur::try_new(m, f64::EPSILON, QR_ITERS_PER_ROW * dim.max(10))
        .ok_or(LinalgError::EigenFailure { dim })?;
    let (_, t) = schur.unpack();
    Ok((0..dim).map(|i| t[(i, i)]).collect())
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    SVD::new(m.clone(), false, false)
        .singular_values
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

pub fn real_spectral_norm(m: &RMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    SVD::new(m.clone(), false, false)
        .singular_values
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Ratio of the smallest to the largest singular value.
pub fn inverse_condition(m: &RMatrix) -> f64 {
    let sv = SVD::new(m.clone(), false, false).singular_values;
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if max == 0.0 {
        0.0
    } else {
        min / max
    }
}

pub fn inverse(m: CMatrix) -> Result<CMatrix, LinalgError> {
    m.lu().try_inverse().ok_or(LinalgError::Singular)
}

pub fn solve_real(m: RMatrix, rhs: &DVector<f64>) -> Result<DVector<f64>, LinalgError> {
    m.lu().solve(rhs).ok_or(LinalgError::Singular)
}

/// Orthonormalizes the columns of `m` (thin QR, Q factor).
pub fn orthonormalize(m: CMatrix) -> CMatrix {
    m.qr().q()
}

/// Embeds a real matrix as a complex one.
pub fn complexify(m: &RMatrix) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Householder reflector `H = I - 2 v v^T / v^T v` with `H x = ∓‖x‖ e_0`.
///
/// Returns `None` for a zero vector.
pub fn householder_to_first_axis(x: &DVector<f64>) -> Option<RMatrix> {
    let norm = x.norm();
    if norm == 0.0 {
        return None;
    }
    let mut v = x.clone();
    let alpha = if x[0] >= 0.0 { -norm } else { norm };
    v[0] -= alpha;
    let vv = v.dot(&v);
    if vv == 0.0 {
        return Some(RMatrix::identity(x.len(), x.len()));
    }
    Some(RMatrix::identity(x.len(), x.len()) - (&v * v.transpose()) * (2.0 / vv))
}

/// Orthogonal `Q` whose leading `r` columns span the columns of `basis` (n×r).
pub fn orthogonal_completion(basis: &RMatrix) -> RMatrix {
    let n = basis.nrows();
    let r = basis.ncols();
    let mut ext = RMatrix::zeros(n, n + r);
    ext.columns_mut(0, r).copy_from(basis);
    ext.columns_mut(r, n).fill_with_identity();
    ext.qr().q()
}

/// Inverse-iteration steps per refinement.
const REFINE_STEPS: usize = 3;

/// Polishes an eigenvalue estimate `mu0` of the real matrix `a`.
///
/// Right and left vectors come from inverse iteration with shift `mu0`; the
/// result is their two-sided Rayleigh quotient, so a real estimate stays
/// real. Returns `None` when the shifted matrix is exactly singular or the
/// eigenvalue is defective to working precision.
pub fn refine_eigenvalue(a: &RMatrix, mu0: Complex64) -> Option<Complex64> {
    let n = a.nrows();
    let start = |j: usize| 1.0 + (j as f64 * 0.618_033_988_749_894_8).fract();
    if mu0.im == 0.0 {
        let shift = mu0.re + 1e-12 * mu0.re.abs().max(1.0);
        let lu = (a - RMatrix::identity(n, n) * shift).lu();
        let lut = (a.transpose() - RMatrix::identity(n, n) * shift).lu();
        let mut x = DVector::from_fn(n, |j, _| start(j));
        let mut y = x.clone();
        for _ in 0..REFINE_STEPS {
            x = lu.solve(&x)?;
            x /= x.amax();
            y = lut.solve(&y)?;
            y /= y.amax();
        }
        let den = y.dot(&x);
        let ax = a * &x;
        let num = y.dot(&ax);
        if den.abs() <= f64::EPSILON * y.norm() * x.norm() {
            return None;
        }
        Some(Complex64::new(num / den, 0.0))
    } else {
        let ac = complexify(a);
        let eye = CMatrix::identity(n, n);
        let shift = mu0 * (1.0 + 1e-12);
        let lu = (&ac - &eye * shift).lu();
        let lut = (ac.transpose() - &eye * shift).lu();
        let mut x = CVector::from_fn(n, |j, _| Complex64::new(start(j), 0.0));
        let mut y = x.clone();
        for _ in 0..REFINE_STEPS {
            x = lu.solve(&x)?;
            let s = x.iter().fold(0.0_f64, |m, v| m.max(v.norm()));
            x /= Complex64::new(s, 0.0);
            y = lut.solve(&y)?;
            let s = y.iter().fold(0.0_f64, |m, v| m.max(v.norm()));
            y /= Complex64::new(s, 0.0);
        }
        let den = y.transpose() * &x;
        let num = y.transpose() * (&ac * &x);
        if den[(0, 0)].norm() <= f64::EPSILON * y.norm() * x.norm() {
            return None;
        }
        Some(num[(0, 0)] / den[(0, 0)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn real_eigenvalues_of_rotation_and_diagonal() {
        let a = RMatrix::from_row_slice(3, 3, &[0.0, -2.0, 0.0, 2.0, 0.0, 0.0, 0.0, 0.0, 5.0]);
        let mut ev = real_eigenvalues(a).unwrap();
        ev.sort_by(|x, y| x.im.partial_cmp(&y.im).unwrap());
        assert_abs_diff_eq!(ev[0].im, -2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ev[2].im, 2.0, epsilon = 1e-14);
        assert_eq!(ev[1], Complex64::new(5.0, 0.0));
    }

    #[test]
    fn complex_eigenvalues_of_triangular() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 1.0),
                Complex64::new(3.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, -2.0),
            ],
        );
        let mut ev = complex_eigenvalues(m).unwrap();
        ev.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap());
        assert_abs_diff_eq!(ev[0].im, -2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ev[1].re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn householder_maps_to_axis() {
        let x = DVector::from_vec(alloc::vec![3.0, 4.0, 0.0, -12.0]);
        let h = householder_to_first_axis(&x).unwrap();
        let y = &h * &x;
        assert_abs_diff_eq!(y[0].abs(), 13.0, epsilon = 1e-13);
        for i in 1..4 {
            assert_abs_diff_eq!(y[i], 0.0, epsilon = 1e-13);
        }
        assert_abs_diff_eq!((&h * &h - RMatrix::identity(4, 4)).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn completion_spans_basis() {
        let b = RMatrix::from_row_slice(4, 2, &[1.0, 0.0, 1.0, 1.0, 0.0, 2.0, 0.0, 0.0]);
        let q = orthogonal_completion(&b);
        assert_abs_diff_eq!((q.transpose() * &q - RMatrix::identity(4, 4)).norm(), 0.0, epsilon = 1e-14);
        // Columns 2.. are orthogonal to the basis.
        assert_abs_diff_eq!((b.transpose() * q.columns(2, 2)).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn refinement_recovers_eigenvalues() {
        // Upper triangular: eigenvalues on the diagonal.
        let a = RMatrix::from_row_slice(3, 3, &[2.0, 1.0, 3.0, 0.0, -1.0, 5.0, 0.0, 0.0, 7.0]);
        let mu = refine_eigenvalue(&a, Complex64::new(-1.0 + 1e-6, 0.0)).unwrap();
        assert_eq!(mu.im, 0.0);
        assert_abs_diff_eq!(mu.re, -1.0, epsilon = 1e-14);
        let rot = RMatrix::from_row_slice(2, 2, &[1.0, -2.0, 2.0, 1.0]);
        let mu = refine_eigenvalue(&rot, Complex64::new(1.0, 2.0 + 1e-7)).unwrap();
        assert_abs_diff_eq!((mu - Complex64::new(1.0, 2.0)).norm(), 0.0, epsilon = 1e-14);
    }
}
