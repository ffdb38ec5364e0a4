//! MMSE channel estimators for both receive chains.
//!
//! The IQU (IQI-unaware) estimator works on the complex model and targets
//! the partial equivalent channel `g = xi_A Psi_A h` (the only component a
//! strictly linear estimator can represent); the IQA estimator works on the
//! augmented model and targets the full equivalent channel
//! `g_aug = Psi_aug h_aug Xi`, conjugate coupling included.
//!
//! Both estimators are deterministic functions of the second-order
//! statistics, applied per UT to the per-pilot observation scaled by
//! `1/sqrt(rho_tr)`:
//!
//! ```text
//!     g_hat     = omega     * y / sqrt(rho_tr)
//!     g_aug_hat = omega_aug * y_aug / sqrt(rho_tr)
//! ```

use crate::covariance::CovarianceProfile;
use crate::iqi::{BsIqi, UtIqi};
use crate::linalg::solve_hpd;
use crate::{C64, CMat, CVec, RMat, Result};
use nalgebra::DVector;

/// `diag(d) * M * diag(d)^H` for a diagonal given by `d`.
fn sandwich_diag(d: &DVector<C64>, m: &CMat) -> CMat {
    CMat::from_fn(m.nrows(), m.ncols(), |i, j| d[i] * m[(i, j)] * d[j].conj())
}

/// Entrywise complex conjugate.
fn conj_mat(m: &CMat) -> CMat {
    m.map(|z| z.conj())
}

/// Estimates produced for the serving cell of one trial.
#[derive(Debug, Clone)]
pub struct EstimatedChannels {
    /// IQU path: `N x K`, column `k` is the complex estimate of UT `k`.
    pub g_hat: CMat,
    /// IQA path: `2N x 2K`, columns `k` and `k + K` belong to UT `k`.
    pub g_aug_hat: RMat,
}

/// Per-UT IQU-MMSE estimator matrices.
///
/// With contamination the whitening sum runs over all cells; without it the
/// serving cell is alone in the training phase.
pub fn iqu_omega(
    profile: &CovarianceProfile,
    bs: &BsIqi,
    uts: &[Vec<UtIqi>],
    rho_tr: f64,
    contaminated: bool,
) -> Result<Vec<CMat>> {
    let n = profile.n_antennas;
    let cells: Vec<usize> = if contaminated { (0..profile.n_cells).collect() } else { vec![0] };
    let noise_diag = bs.gain_power_diag();
    let mut out = Vec::with_capacity(profile.n_uts);
    for k in 0..profile.n_uts {
        let mut q = CMat::zeros(n, n);
        for &l in &cells {
            let s = uts[l][k].pilot_gain();
            let w = s.norm_sqr();
            q += sandwich_diag(&bs.direct, &profile.link(l, k).r) * C64::new(w, 0.0);
            q += sandwich_diag(&bs.image, &conj_mat(&profile.link(l, k).r)) * C64::new(w, 0.0);
        }
        for i in 0..n {
            q[(i, i)] += C64::new(noise_diag[i] / rho_tr, 0.0);
        }
        let num = sandwich_diag(&bs.direct, &profile.link(0, k).r)
            * (uts[0][k].direct * uts[0][k].pilot_gain().conj());
        // omega = num * q^{-1}; q is Hermitian so omega = (q^{-1} num^H)^H.
        let solved = solve_hpd(&q, &num.adjoint())?;
        out.push(solved.adjoint());
    }
    Ok(out)
}

/// IQU-MMSE estimate of one UT from its training observation.
pub fn iqu_estimate(y: &CVec, omega: &CMat, rho_tr: f64) -> CVec {
    omega * (y / C64::new(rho_tr.sqrt(), 0.0))
}

/// Per-UT IQA-WLMMSE estimator matrices on the augmented model.
///
/// The signal weights are the mixing-matrix energies `|Xi|_F^2` of the
/// co-pilot UTs; the noise term is `(1/rho_tr) aug aug^T`, which pairs with
/// the half-power-per-part convention of the stacked model (an ideal system
/// yields the classical `rho/(1+rho)` shrinkage).
pub fn iqa_omega(
    profile: &CovarianceProfile,
    bs: &BsIqi,
    uts: &[Vec<UtIqi>],
    rho_tr: f64,
    contaminated: bool,
) -> Result<Vec<RMat>> {
    let cells: Vec<usize> = if contaminated { (0..profile.n_cells).collect() } else { vec![0] };
    let noise = bs.aug_gram() / rho_tr;
    let mut out = Vec::with_capacity(profile.n_uts);
    for k in 0..profile.n_uts {
        let mut q = noise.clone();
        for &l in &cells {
            let w = 0.5 * uts[l][k].mixing_energy();
            q += bs.sandwich_aug(&profile.link(l, k).r_aug()) * w;
        }
        let num = bs.sandwich_aug(&profile.link(0, k).r_aug()) * (0.5 * uts[0][k].mixing_energy());
        let solved = solve_hpd(&q, &num.transpose())?;
        out.push(solved.transpose());
    }
    Ok(out)
}

/// IQA-WLMMSE estimate of one UT: both augmented columns.
pub fn iqa_estimate(y_aug: &RMat, omega_aug: &RMat, rho_tr: f64) -> RMat {
    omega_aug * (y_aug / rho_tr.sqrt())
}

/// Run both estimators over all UTs of the serving cell.
pub fn estimate_all(
    y: &CMat,
    y_aug: &[RMat],
    omega: &[CMat],
    omega_aug: &[RMat],
    rho_tr: f64,
) -> EstimatedChannels {
    let n = y.nrows();
    let k_uts = y.ncols();
    let mut g_hat = CMat::zeros(n, k_uts);
    let mut g_aug_hat = RMat::zeros(2 * n, 2 * k_uts);
    for k in 0..k_uts {
        g_hat.set_column(k, &iqu_estimate(&y.column(k).into_owned(), &omega[k], rho_tr));
        let pair = iqa_estimate(&y_aug[k], &omega_aug[k], rho_tr);
        g_aug_hat.column_mut(k).copy_from(&pair.column(0));
        g_aug_hat.column_mut(k + k_uts).copy_from(&pair.column(1));
    }
    EstimatedChannels { g_hat, g_aug_hat }
}

/// Analytic second-order statistics of the complex training observation,
/// used by tests and by the estimator identity `phi_gy = omega * phi_yy`.
pub fn iqu_phi_matrices(
    profile: &CovarianceProfile,
    bs: &BsIqi,
    uts: &[Vec<UtIqi>],
    rho_tr: f64,
    k: usize,
    contaminated: bool,
) -> (CMat, CMat) {
    let n = profile.n_antennas;
    let cells: Vec<usize> = if contaminated { (0..profile.n_cells).collect() } else { vec![0] };
    let mut phi_yy = CMat::zeros(n, n);
    for &l in &cells {
        let w = uts[l][k].pilot_gain().norm_sqr() * rho_tr;
        phi_yy += sandwich_diag(&bs.direct, &profile.link(l, k).r) * C64::new(w, 0.0);
        phi_yy += sandwich_diag(&bs.image, &conj_mat(&profile.link(l, k).r)) * C64::new(w, 0.0);
    }
    let noise = bs.gain_power_diag();
    for i in 0..n {
        phi_yy[(i, i)] += C64::new(noise[i], 0.0);
    }
    let phi_gy = sandwich_diag(&bs.direct, &profile.link(0, k).r)
        * (uts[0][k].direct * uts[0][k].pilot_gain().conj() * C64::new(rho_tr.sqrt(), 0.0));
    (phi_gy, phi_yy)
}

/// Analytic second-order statistics of the augmented training observation
/// (per pilot column): signal, co-pilot, and noise parts of `phi_yy_aug`,
/// plus the cross-correlation with the equivalent channel pair.
pub fn iqa_phi_matrices(
    profile: &CovarianceProfile,
    bs: &BsIqi,
    uts: &[Vec<UtIqi>],
    rho_tr: f64,
    k: usize,
    contaminated: bool,
) -> (RMat, RMat) {
    let cells: Vec<usize> = if contaminated { (0..profile.n_cells).collect() } else { vec![0] };
    let mut phi_yy = bs.aug_gram();
    for &l in &cells {
        let w = 0.5 * uts[l][k].mixing_energy() * rho_tr;
        phi_yy += bs.sandwich_aug(&profile.link(l, k).r_aug()) * w;
    }
    let phi_gy =
        bs.sandwich_aug(&profile.link(0, k).r_aug()) * (0.5 * uts[0][k].mixing_energy() * rho_tr.sqrt());
    (phi_gy, phi_yy)
}

impl BsIqi {
    /// `aug * M * aug^T` using the structured per-antenna apply.
    pub fn sandwich_aug(&self, m: &RMat) -> RMat {
        self.apply_aug(&self.apply_aug(m).transpose()).transpose()
    }
}
