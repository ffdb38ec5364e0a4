//! Small dense linear-algebra helpers shared by the estimators and the
//! deterministic-equivalent solvers.

use crate::{Error, Result};
use nalgebra::{ComplexField, DMatrix};

/// Scalar constraint shared by all numeric helpers: real field is `f64`.
pub trait Field: ComplexField<RealField = f64> {}
impl<T: ComplexField<RealField = f64>> Field for T {}

/// `tr(A B)` without forming the product: sum over `A[i,j] * B[j,i]`.
pub fn trace_prod<T: Field>(a: &DMatrix<T>, b: &DMatrix<T>) -> T {
    debug_assert_eq!(a.ncols(), b.nrows());
    debug_assert_eq!(b.ncols(), a.nrows());
    let mut acc = T::zero();
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            acc += a[(i, j)].clone() * b[(j, i)].clone();
        }
    }
    acc
}

/// Hermitian transpose (plain transpose for real scalars).
pub fn adjoint<T: Field>(a: &DMatrix<T>) -> DMatrix<T> {
    a.adjoint()
}

/// Solve `A X = B` for Hermitian positive-definite `A`, falling back to LU
/// when the Cholesky factorization fails marginally.
pub fn solve_hpd<T: Field>(a: &DMatrix<T>, b: &DMatrix<T>) -> Result<DMatrix<T>> {
    if a.nrows() != a.ncols() || a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "solve_hpd: A is {}x{}, B is {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    if let Some(chol) = a.clone().cholesky() {
        return Ok(chol.solve(b));
    }
    a.clone()
        .lu()
        .solve(b)
        .ok_or_else(|| Error::Singular("solve_hpd: Cholesky and LU both failed".into()))
}

/// Inverse of a Hermitian positive-definite matrix.
pub fn inv_hpd<T: Field>(a: &DMatrix<T>) -> Result<DMatrix<T>> {
    let eye = DMatrix::<T>::identity(a.nrows(), a.ncols());
    solve_hpd(a, &eye)
}

/// Hermitian symmetrization `(A + A^H) / 2`; cleans up round-off drift on
/// matrices that are Hermitian by construction.
pub fn symmetrize<T: Field>(a: &DMatrix<T>) -> DMatrix<T> {
    (a + a.adjoint()) * T::from_real(0.5)
}

/// Relative Frobenius distance `|A - B|_F / |B|_F` (absolute when `B = 0`).
pub fn rel_frobenius<T: Field>(a: &DMatrix<T>, b: &DMatrix<T>) -> f64 {
    let diff: f64 = (a - b).norm();
    let scale: f64 = b.norm();
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}
