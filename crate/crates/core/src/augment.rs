//! Complex ↔ augmented-real algebra.
//!
//! A complex matrix `M = M_R + j M_I` maps to the real block matrix
//!
//! ```text
//!     aug(M) = [ M_R  -M_I ]
//!              [ M_I   M_R ]
//! ```
//!
//! acting on stacked `[Re x; Im x]` vectors. The map is a ring homomorphism
//! (`aug(AB) = aug(A) aug(B)`, `aug(A^H) = aug(A)^T`), which is what lets the
//! widely-linear receiver treat conjugate coupling as ordinary real algebra.

use crate::{C64, CMat, RMat, RVec};
use nalgebra::DVector;

/// Real augmentation of a complex matrix: `p x q` becomes `2p x 2q`.
pub fn augment(m: &CMat) -> RMat {
    let (p, q) = (m.nrows(), m.ncols());
    let mut out = RMat::zeros(2 * p, 2 * q);
    for j in 0..q {
        for i in 0..p {
            let z = m[(i, j)];
            out[(i, j)] = z.re;
            out[(i, j + q)] = -z.im;
            out[(i + p, j)] = z.im;
            out[(i + p, j + q)] = z.re;
        }
    }
    out
}

/// Stack a complex vector as `[Re x; Im x]`.
pub fn stack(v: &DVector<C64>) -> RVec {
    let n = v.len();
    RVec::from_fn(2 * n, |i, _| if i < n { v[i].re } else { v[i - n].im })
}

/// Rebuild a complex vector from its `[Re; Im]` stack.
pub fn unstack(v: &RVec) -> DVector<C64> {
    let n = v.len() / 2;
    DVector::from_fn(n, |i, _| C64::new(v[i], v[i + n]))
}

/// Read a complex matrix back out of an exactly augmented real matrix.
pub fn complex_from_augmented(m: &RMat) -> CMat {
    let (p, q) = (m.nrows() / 2, m.ncols() / 2);
    CMat::from_fn(p, q, |i, j| C64::new(m[(i, j)], m[(i + p, j)]))
}

/// The 0/1 matrix that reorders per-antenna `[I; Q]` pairs into the stacked
/// `[all I; all Q]` layout: ones at `(2n-1, n)` and `(2n, n+N)` in 1-based
/// indexing. Orthogonal by construction.
pub fn permutation_matrix(n: usize) -> RMat {
    let mut p = RMat::zeros(2 * n, 2 * n);
    for k in 0..n {
        p[(2 * k, k)] = 1.0;
        p[(2 * k + 1, k + n)] = 1.0;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rel_frobenius;
    use crate::rng::{complex_gaussian_matrix, substream, Domain};

    #[test]
    fn scalar_one_and_j() {
        let one = CMat::from_element(1, 1, C64::new(1.0, 0.0));
        assert_eq!(augment(&one), RMat::identity(2, 2));
        let j = CMat::from_element(1, 1, C64::new(0.0, 1.0));
        let expect = RMat::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        assert_eq!(augment(&j), expect);
    }

    #[test]
    fn ring_homomorphism_on_random_inputs() {
        let mut rng = substream(3, Domain::Test, 0, 0);
        let a = complex_gaussian_matrix(&mut rng, 3, 3);
        let b = complex_gaussian_matrix(&mut rng, 3, 3);
        assert!(rel_frobenius(&augment(&(&a + &b)), &(augment(&a) + augment(&b))) < 1e-12);
        assert!(rel_frobenius(&augment(&(&a * &b)), &(augment(&a) * augment(&b))) < 1e-12);
        assert!(rel_frobenius(&augment(&a.adjoint()), &augment(&a).transpose()) < 1e-12);
    }

    #[test]
    fn augment_round_trip() {
        let mut rng = substream(4, Domain::Test, 0, 0);
        let a = complex_gaussian_matrix(&mut rng, 4, 2);
        let back = complex_from_augmented(&augment(&a));
        assert!(rel_frobenius(&back, &a) < 1e-15);
    }

    #[test]
    fn permutation_matches_enumeration() {
        assert_eq!(permutation_matrix(1), RMat::identity(2, 2));
        let p = permutation_matrix(2);
        let mut expect = RMat::zeros(4, 4);
        expect[(0, 0)] = 1.0;
        expect[(2, 1)] = 1.0;
        expect[(1, 2)] = 1.0;
        expect[(3, 3)] = 1.0;
        assert_eq!(p, expect);
    }

    #[test]
    fn permutation_is_orthogonal_with_single_ones() {
        for n in [1usize, 2, 5, 8] {
            let p = permutation_matrix(n);
            assert!(rel_frobenius(&(&p * p.transpose()), &RMat::identity(2 * n, 2 * n)) < 1e-15);
            for r in 0..2 * n {
                assert_eq!(p.row(r).iter().filter(|&&x| x == 1.0).count(), 1);
                assert_eq!(p.column(r).iter().filter(|&&x| x == 1.0).count(), 1);
                assert!(p.row(r).iter().all(|&x| x == 0.0 || x == 1.0));
            }
        }
    }

    #[test]
    fn stack_matches_augmented_action() {
        // aug(M) [Re z; Im z] must equal the stack of M z.
        let mut rng = substream(5, Domain::Test, 0, 0);
        let m = complex_gaussian_matrix(&mut rng, 4, 4);
        let z = crate::rng::complex_gaussian_vector(&mut rng, 4);
        let lhs = augment(&m) * stack(&z);
        let rhs = stack(&(&m * &z));
        assert!((lhs - rhs).norm() < 1e-12);
    }
}
