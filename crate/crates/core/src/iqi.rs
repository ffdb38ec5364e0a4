//! Transceiver I/Q imbalance model.
//!
//! A direct-conversion mixer with amplitude mismatch `eps` and phase
//! mismatch `theta` maps a baseband signal `x` to
//!
//! ```text
//!     y = direct * x + image * conj(x),
//!     direct = cos(theta/2) + j eps sin(theta/2),
//!     image  = eps cos(theta/2) - j sin(theta/2),
//! ```
//!
//! so a balanced branch has `direct = 1`, `image = 0`. On stacked
//! `[Re; Im]` coordinates the same branch is the real 2x2 matrix
//!
//! ```text
//!     [ Re(direct+image)   Im(image-direct) ]
//!     [ Im(direct+image)   Re(direct-image) ]
//! ```
//!
//! UTs carry one branch each; a BS carries one branch per antenna, assembled
//! into a `2N x 2N` mixing matrix on the stacked receive vector.

use crate::augment::permutation_matrix;
use crate::{C64, CMat, Error, RMat, Result};
use nalgebra::{DVector, Matrix2};
use rand::Rng;

/// Branch coefficients for given mismatches.
fn branch_gains(eps: f64, theta: f64) -> (C64, C64) {
    let (s, c) = (theta / 2.0).sin_cos();
    (C64::new(c, eps * s), C64::new(eps * c, -s))
}

/// 2x2 real mixing matrix of one branch.
fn branch_matrix(direct: C64, image: C64) -> Matrix2<f64> {
    Matrix2::new(
        (direct + image).re,
        (image - direct).im,
        (direct + image).im,
        (direct - image).re,
    )
}

/// I/Q imbalance of a single user terminal.
#[derive(Debug, Clone)]
pub struct UtIqi {
    /// Amplitude mismatch (unitless).
    pub eps: f64,
    /// Phase mismatch (radians).
    pub theta: f64,
    /// Gain on the transmitted symbol.
    pub direct: C64,
    /// Gain on the symbol's complex conjugate.
    pub image: C64,
    /// Real 2x2 mixing matrix acting on `[Re d; Im d]`.
    pub mixing: Matrix2<f64>,
}

impl UtIqi {
    /// `direct + image`, the coefficient seen by a real-valued pilot.
    pub fn pilot_gain(&self) -> C64 {
        self.direct + self.image
    }

    /// Squared Frobenius norm of the mixing matrix; equals `2 (1 + eps^2)`.
    pub fn mixing_energy(&self) -> f64 {
        self.mixing.norm_squared()
    }

    /// Squared norms of the two mixing columns (weights of the real and
    /// imaginary symbol parts after the mixer).
    pub fn column_energies(&self) -> (f64, f64) {
        let m = &self.mixing;
        (
            m[(0, 0)] * m[(0, 0)] + m[(1, 0)] * m[(1, 0)],
            m[(0, 1)] * m[(0, 1)] + m[(1, 1)] * m[(1, 1)],
        )
    }
}

/// Build the derived UT imbalance quantities from raw mismatches.
pub fn build_ut_iqi(eps: f64, theta: f64) -> Result<UtIqi> {
    if !eps.is_finite() || !theta.is_finite() {
        return Err(Error::InvalidArgument("IQI mismatches must be finite".into()));
    }
    if eps < 0.0 {
        return Err(Error::InvalidArgument(format!("amplitude mismatch must be >= 0, got {eps}")));
    }
    if theta.abs() >= std::f64::consts::PI {
        return Err(Error::InvalidArgument(format!("|theta| must be < pi, got {theta}")));
    }
    let (direct, image) = branch_gains(eps, theta);
    Ok(UtIqi { eps, theta, direct, image, mixing: branch_matrix(direct, image) })
}

/// I/Q imbalance of one base station (one branch per antenna).
#[derive(Debug, Clone)]
pub struct BsIqi {
    /// Per-antenna amplitude mismatches.
    pub eps: DVector<f64>,
    /// Per-antenna phase mismatches (radians).
    pub theta: DVector<f64>,
    /// Diagonal of the gain on the incoming signal.
    pub direct: DVector<C64>,
    /// Diagonal of the gain on its conjugate.
    pub image: DVector<C64>,
    /// `2N x 2N` real mixing matrix on the stacked receive vector.
    pub aug: RMat,
}

impl BsIqi {
    pub fn n_antennas(&self) -> usize {
        self.direct.len()
    }

    /// True when every branch is balanced.
    pub fn is_ideal(&self) -> bool {
        self.eps.iter().all(|&e| e == 0.0) && self.theta.iter().all(|&t| t == 0.0)
    }

    /// `direct ⊙ x + image ⊙ conj(x)`, column by column.
    pub fn apply_complex(&self, x: &CMat) -> CMat {
        let mut out = CMat::zeros(x.nrows(), x.ncols());
        for j in 0..x.ncols() {
            for i in 0..x.nrows() {
                let z = x[(i, j)];
                out[(i, j)] = self.direct[i] * z + self.image[i] * z.conj();
            }
        }
        out
    }

    /// Apply the stacked mixing matrix without materializing it: rows `i`
    /// and `i + N` of the input are mixed by the 2x2 branch matrix.
    pub fn apply_aug(&self, x: &RMat) -> RMat {
        let n = self.n_antennas();
        debug_assert_eq!(x.nrows(), 2 * n);
        let mut out = RMat::zeros(x.nrows(), x.ncols());
        for j in 0..x.ncols() {
            for i in 0..n {
                let a = branch_matrix(self.direct[i], self.image[i]);
                let (xr, xi) = (x[(i, j)], x[(i + n, j)]);
                out[(i, j)] = a[(0, 0)] * xr + a[(0, 1)] * xi;
                out[(i + n, j)] = a[(1, 0)] * xr + a[(1, 1)] * xi;
            }
        }
        out
    }

    /// Apply the transposed stacked mixing matrix.
    pub fn apply_aug_transpose(&self, x: &RMat) -> RMat {
        let n = self.n_antennas();
        debug_assert_eq!(x.nrows(), 2 * n);
        let mut out = RMat::zeros(x.nrows(), x.ncols());
        for j in 0..x.ncols() {
            for i in 0..n {
                let a = branch_matrix(self.direct[i], self.image[i]);
                let (xr, xi) = (x[(i, j)], x[(i + n, j)]);
                out[(i, j)] = a[(0, 0)] * xr + a[(1, 0)] * xi;
                out[(i + n, j)] = a[(0, 1)] * xr + a[(1, 1)] * xi;
            }
        }
        out
    }

    /// Diagonal matrices for the complex-model algebra.
    pub fn direct_diag(&self) -> CMat {
        CMat::from_diagonal(&self.direct)
    }

    pub fn image_diag(&self) -> CMat {
        CMat::from_diagonal(&self.image)
    }

    /// `Psi_A Psi_A^H + Psi_B Psi_B^H` as a diagonal (real entries).
    pub fn gain_power_diag(&self) -> DVector<f64> {
        DVector::from_fn(self.n_antennas(), |i, _| {
            self.direct[i].norm_sqr() + self.image[i].norm_sqr()
        })
    }

    /// `aug * aug^T` for the augmented noise statistics.
    pub fn aug_gram(&self) -> RMat {
        &self.aug * self.aug.transpose()
    }
}

/// Build the derived BS imbalance quantities from per-antenna mismatches.
pub fn build_bs_iqi(eps: &[f64], theta: &[f64]) -> Result<BsIqi> {
    if eps.len() != theta.len() {
        return Err(Error::DimensionMismatch(format!(
            "BS IQI vectors differ in length: {} vs {}",
            eps.len(),
            theta.len()
        )));
    }
    if eps.is_empty() {
        return Err(Error::InvalidArgument("BS needs at least one antenna".into()));
    }
    let n = eps.len();
    let mut direct = DVector::from_element(n, C64::new(0.0, 0.0));
    let mut image = direct.clone();
    for i in 0..n {
        if !eps[i].is_finite() || !theta[i].is_finite() || eps[i] < 0.0 {
            return Err(Error::InvalidArgument(format!("bad mismatch at branch {i}")));
        }
        let (d, im) = branch_gains(eps[i], theta[i]);
        direct[i] = d;
        image[i] = im;
    }

    // The per-branch 2x2 blocks act on interleaved (I_n, Q_n) pairs; the
    // permutation carries stacked [all I; all Q] coordinates to interleaved
    // ones and back: aug = P^T blockdiag(A_1..A_N) P.
    let p = permutation_matrix(n);
    let mut blocks = RMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        let a = branch_matrix(direct[i], image[i]);
        blocks[(2 * i, 2 * i)] = a[(0, 0)];
        blocks[(2 * i, 2 * i + 1)] = a[(0, 1)];
        blocks[(2 * i + 1, 2 * i)] = a[(1, 0)];
        blocks[(2 * i + 1, 2 * i + 1)] = a[(1, 1)];
    }
    let aug = p.transpose() * blocks * &p;

    Ok(BsIqi {
        eps: DVector::from_column_slice(eps),
        theta: DVector::from_column_slice(theta),
        direct,
        image,
        aug,
    })
}

/// Identity (no-IQI) BS of `n` antennas.
pub fn ideal_bs(n: usize) -> BsIqi {
    build_bs_iqi(&vec![0.0; n], &vec![0.0; n]).expect("zero mismatches are valid")
}

/// Identity (no-IQI) UT.
pub fn ideal_ut() -> UtIqi {
    build_ut_iqi(0.0, 0.0).expect("zero mismatches are valid")
}

/// Where IQI is present in a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IqiMode {
    None,
    BsOnly,
    UtOnly,
    Both,
}

impl IqiMode {
    pub fn bs_impaired(self) -> bool {
        matches!(self, IqiMode::BsOnly | IqiMode::Both)
    }
    pub fn ut_impaired(self) -> bool {
        matches!(self, IqiMode::UtOnly | IqiMode::Both)
    }
}

impl std::fmt::Display for IqiMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            IqiMode::None => "none",
            IqiMode::BsOnly => "bs_only",
            IqiMode::UtOnly => "ut_only",
            IqiMode::Both => "both",
        };
        f.write_str(s)
    }
}

/// How mismatch values are produced.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MismatchDraw {
    /// Same value everywhere.
    Fixed { value: f64 },
    /// Independent uniform draws in `[lo, hi]`.
    Uniform { lo: f64, hi: f64 },
}

impl MismatchDraw {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            MismatchDraw::Fixed { value } => value,
            MismatchDraw::Uniform { lo, hi } => {
                if lo == hi {
                    lo
                } else {
                    rng.gen_range(lo..=hi)
                }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            MismatchDraw::Fixed { value } if value.is_finite() => Ok(()),
            MismatchDraw::Uniform { lo, hi } if lo.is_finite() && hi.is_finite() && lo <= hi => Ok(()),
            _ => Err(Error::InvalidArgument("mismatch draw range must be finite and ordered".into())),
        }
    }
}
