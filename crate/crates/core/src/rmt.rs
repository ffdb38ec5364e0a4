//! Deterministic equivalents of random-matrix resolvents.
//!
//! For a random Gram matrix `G G^H` whose columns are independent Gaussians
//! with covariances `delta_k / n`, trace functionals of the resolvent
//! `(G G^H + B + alpha I)^{-1}` concentrate around `(1/n) tr(A T)` with
//!
//! ```text
//!     T = ( (1/n) sum_k delta_k / (1 + d_k) + B + alpha I )^{-1},
//!     d_k = (1/n) tr(delta_k T),
//! ```
//!
//! and two-resolvent functionals `(G G^H + ...)^{-1} C (G G^H + ...)^{-1}`
//! concentrate around `(1/n) tr(A T')` with a linear-system correction.
//! Both solvers are generic over real and complex scalars; the asymptotic
//! SINR machinery uses the complex form at size `N` and the real form at
//! size `2N`.

use crate::linalg::trace_prod;
use crate::{Error, Result};
use nalgebra::{ComplexField, DMatrix, DVector};

const FP_TOL: f64 = 1e-10;
const FP_MAX_ITER: usize = 10_000;

/// Scalar type usable by the solvers: `f64` or `Complex<f64>`.
pub trait Field: ComplexField<RealField = f64> {}
impl<T: ComplexField<RealField = f64>> Field for T {}

fn scalar<T: Field>(x: f64) -> T {
    T::from_real(x)
}

fn to_f64<T: Field>(x: &T) -> f64 {
    x.clone().real()
}

fn abs_f64<T: Field>(x: &T) -> f64 {
    x.clone().abs()
}

/// Converged one-resolvent fixed point.
#[derive(Debug, Clone)]
pub struct FixedPointSolution<T: Field> {
    /// Per-column deterministic equivalents `d_k >= 0`.
    pub delta: Vec<f64>,
    /// The resolvent equivalent `T`.
    pub t: DMatrix<T>,
    pub iterations: usize,
    /// Final relative change of the iteration.
    pub residual: f64,
}

fn assemble_t<T: Field>(
    deltas: &[DMatrix<T>],
    b: &DMatrix<T>,
    alpha: f64,
    d: &[f64],
) -> Result<DMatrix<T>> {
    let n = b.nrows();
    let mut m = b.clone();
    for i in 0..n {
        m[(i, i)] += scalar::<T>(alpha);
    }
    let inv_n = 1.0 / n as f64;
    for (k, dk) in deltas.iter().enumerate() {
        m += dk * scalar::<T>(inv_n / (1.0 + d[k]));
    }
    crate::linalg::inv_hpd(&m)
}

/// Solve the one-resolvent fixed point by damped iteration from `d = 1`.
///
/// `deltas` and `b` are Hermitian PSD and `alpha > 0`; the scale `n` is the
/// matrix dimension (columns of the modeled Gram matrix have covariance
/// `delta_k / n`).
pub fn resolvent_equivalent<T: Field>(
    deltas: &[DMatrix<T>],
    b: &DMatrix<T>,
    alpha: f64,
) -> Result<FixedPointSolution<T>> {
    if alpha <= 0.0 {
        return Err(Error::InvalidArgument("alpha must be positive".into()));
    }
    let n = b.nrows();
    if deltas.iter().any(|d| d.nrows() != n || d.ncols() != n) {
        return Err(Error::DimensionMismatch("delta_k must match B".into()));
    }
    let k = deltas.len();
    let mut d = vec![1.0; k];
    if k == 0 {
        let t = assemble_t(deltas, b, alpha, &d)?;
        return Ok(FixedPointSolution { delta: d, t, iterations: 0, residual: 0.0 });
    }
    let inv_n = 1.0 / n as f64;
    let mut damping = 1.0;
    let mut last_residual = f64::INFINITY;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    for it in 0..FP_MAX_ITER {
        iterations = it + 1;
        let t = assemble_t(deltas, b, alpha, &d)?;
        let mut next = vec![0.0; k];
        for (i, dk) in deltas.iter().enumerate() {
            let val = to_f64(&trace_prod(dk, &t)) * inv_n;
            if !val.is_finite() || val < -1e-9 {
                return Err(Error::Singular(format!("fixed point produced d = {val}")));
            }
            next[i] = (1.0 - damping) * d[i] + damping * val.max(0.0);
        }
        residual = d
            .iter()
            .zip(next.iter())
            .map(|(&a, &b)| (a - b).abs() / b.abs().max(1.0))
            .fold(0.0, f64::max);
        d = next;
        if residual < FP_TOL {
            break;
        }
        // Oscillation guard: if the residual stopped shrinking, damp.
        if it > 16 && residual > last_residual && damping > 0.49 {
            damping = 0.5;
        }
        last_residual = residual;
    }
    if residual >= FP_TOL {
        return Err(Error::NonConvergence { residual, iterations });
    }
    let t = assemble_t(deltas, b, alpha, &d)?;
    Ok(FixedPointSolution { delta: d, t, iterations, residual })
}

/// Precomputed pieces for repeated two-resolvent corrections over one
/// converged fixed point: the `K x K` coupling system is factored once and
/// reused for every weighting matrix `C`.
pub struct TwoResolventContext<'a, T: Field> {
    fp: &'a FixedPointSolution<T>,
    deltas: &'a [DMatrix<T>],
    /// `t delta_k t` per column.
    propagated: Vec<DMatrix<T>>,
    y: DMatrix<T>,
    /// LU factors of `I - Y`.
    system: Option<nalgebra::LU<T, nalgebra::Dyn, nalgebra::Dyn>>,
    /// Row-sum norm of `Y`; an upper bound witness for its spectral radius.
    pub coupling_norm: f64,
}

/// Two-resolvent deterministic equivalent for one weighting matrix.
#[derive(Debug, Clone)]
pub struct TPrimeSolution<T: Field> {
    pub t_prime: DMatrix<T>,
    pub delta_prime: DVector<T>,
    /// Residual of `(I - Y) delta' = x`.
    pub system_residual: f64,
}

impl<'a, T: Field> TwoResolventContext<'a, T> {
    pub fn new(fp: &'a FixedPointSolution<T>, deltas: &'a [DMatrix<T>]) -> Result<Self> {
        let n = fp.t.nrows() as f64;
        let k = deltas.len();
        let propagated: Vec<DMatrix<T>> = deltas.iter().map(|d| &fp.t * d * &fp.t).collect();
        if k == 0 {
            return Ok(TwoResolventContext {
                fp,
                deltas,
                propagated,
                y: DMatrix::zeros(0, 0),
                system: None,
                coupling_norm: 0.0,
            });
        }
        let mut y = DMatrix::<T>::zeros(k, k);
        for q in 0..k {
            let wq = 1.0 / (n * (1.0 + fp.delta[q]).powi(2));
            for i in 0..k {
                let tr = trace_prod(&deltas[i], &propagated[q]);
                y[(i, q)] = tr * scalar::<T>(wq / n);
            }
        }
        let coupling_norm = (0..k)
            .map(|i| (0..k).map(|j| abs_f64(&y[(i, j)])).sum::<f64>())
            .fold(0.0, f64::max);
        let mut iy = DMatrix::<T>::identity(k, k);
        iy -= &y;
        let lu = iy.lu();
        Ok(TwoResolventContext { fp, deltas, propagated, y, system: Some(lu), coupling_norm })
    }

    /// Solve for the weighting matrix `c`, returning `T'` such that
    /// `(1/n) tr(A resolvent C resolvent) ~ (1/n) tr(A T')`.
    pub fn solve(&self, c: &DMatrix<T>) -> Result<TPrimeSolution<T>> {
        let n = self.fp.t.nrows() as f64;
        let k = self.deltas.len();
        let tct = &self.fp.t * c * &self.fp.t;
        if k == 0 {
            return Ok(TPrimeSolution {
                t_prime: tct,
                delta_prime: DVector::zeros(0),
                system_residual: 0.0,
            });
        }
        let mut x = DVector::<T>::zeros(k);
        for i in 0..k {
            x[i] = trace_prod(&self.deltas[i], &tct) * scalar::<T>(1.0 / n);
        }
        let lu = self.system.as_ref().expect("system present when k > 0");
        let delta_prime = lu
            .solve(&x)
            .ok_or_else(|| Error::Singular("(I - Y) is singular".into()))?;
        let recon = &self.y * &delta_prime;
        let mut resid = 0.0f64;
        for i in 0..k {
            let err = delta_prime[i].clone() - recon[i].clone() - x[i].clone();
            let scale = abs_f64(&x[i]).max(1.0);
            resid = resid.max(abs_f64(&err) / scale);
        }
        let mut t_prime = tct;
        for q in 0..k {
            let w = to_f64(&delta_prime[q]) / (n * (1.0 + self.fp.delta[q]).powi(2));
            t_prime += &self.propagated[q] * scalar::<T>(w);
        }
        Ok(TPrimeSolution { t_prime, delta_prime, system_residual: resid })
    }
}

/// One-shot convenience wrapper around [`TwoResolventContext`].
pub fn two_resolvent_equivalent<T: Field>(
    fp: &FixedPointSolution<T>,
    deltas: &[DMatrix<T>],
    c: &DMatrix<T>,
) -> Result<TPrimeSolution<T>> {
    TwoResolventContext::new(fp, deltas)?.solve(c)
}
