//! Large-system (deterministic-equivalent) SINR predictions.
//!
//! The per-UT SINRs of both receive chains converge, as the array grows,
//! to deterministic values built from the channel statistics alone. The
//! machinery is shared: a one-resolvent fixed point gives the coherent
//! couplings, and two-resolvent corrections give the interference and
//! noise quadratic forms. The complex chain works at size `N`; the
//! augmented chain works at size `2N` with one fixed-point unknown per
//! real column (2K coupled unknowns solved jointly).
//!
//! Each chain is parameterized by an estimate model describing what the
//! receiver's channel estimates are statistically coupled to: the
//! estimated-CSI models mirror the MMSE estimators (with or without
//! pilot contamination); the perfect-CSI models set the estimate equal
//! to the equivalent channel the receiver targets.

use crate::covariance::CovarianceProfile;
use crate::estimation::{iqa_omega, iqu_omega};
use crate::iqi::{BsIqi, UtIqi};
use crate::linalg::trace_prod;
use crate::rmt::{resolvent_equivalent, TwoResolventContext};
use crate::{C64, CMat, Error, RMat, Result};
use nalgebra::Matrix2;

/// Asymptotic per-UT power components for the serving cell.
#[derive(Debug, Clone)]
pub struct AsymptoticSinr {
    pub s0: Vec<f64>,
    pub i0: Vec<f64>,
    pub z0: Vec<f64>,
    /// Fixed-point iterations and final residual, for run diagnostics.
    pub iterations: usize,
    pub residual: f64,
}

impl AsymptoticSinr {
    pub fn sinr0(&self) -> Vec<f64> {
        self.s0
            .iter()
            .zip(self.i0.iter().zip(self.z0.iter()))
            .map(|(&s, (&i, &z))| {
                let den = i + z;
                if den > 0.0 {
                    (s / den).max(0.0)
                } else {
                    0.0
                }
            })
            .collect()
    }

    pub fn sum_rate0(&self) -> f64 {
        asymptotic_sum_rate(self)
    }
}

/// `sum_k log2(1 + SINR_k)` over the asymptotic components.
pub fn asymptotic_sum_rate(asy: &AsymptoticSinr) -> f64 {
    asy.sinr0().iter().map(|&g| (1.0 + g).log2()).sum()
}

/// How the receiver's channel estimates were produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CsiModel {
    /// MMSE estimation from the training phase.
    Estimated { rho_tr: f64, contaminated: bool },
    /// The receiver knows the equivalent channel it targets exactly.
    Perfect,
}

// ---------------------------------------------------------------------------
// IQU chain (complex model, size N)
// ---------------------------------------------------------------------------

/// Statistical description of the IQU estimates: per UT `q`,
/// `g_hat_q = a_mat_q (sum_l a[l][q] h_{l,q}) + b_mat_q (sum_l b[l][q] conj h_{l,q}) + noise`.
struct IquModel {
    a_mat: Vec<CMat>,
    b_mat: Vec<CMat>,
    a_coef: Vec<Vec<C64>>,
    b_coef: Vec<Vec<C64>>,
    noise_cov: Vec<CMat>,
}

fn diag_from(v: &nalgebra::DVector<C64>) -> CMat {
    CMat::from_diagonal(v)
}

fn build_iqu_model(
    profile: &CovarianceProfile,
    bs: &BsIqi,
    uts: &[Vec<UtIqi>],
    csi: CsiModel,
) -> Result<IquModel> {
    let n = profile.n_antennas;
    let k_uts = profile.n_uts;
    let cells = profile.n_cells;
    match csi {
        CsiModel::Estimated { rho_tr, contaminated } => {
            let omegas = iqu_omega(profile, bs, uts, rho_tr, contaminated)?;
            let psi_a = diag_from(&bs.direct);
            let psi_b = diag_from(&bs.image);
            let mut a_mat = Vec::with_capacity(k_uts);
            let mut b_mat = Vec::with_capacity(k_uts);
            let mut noise_cov = Vec::with_capacity(k_uts);
            for q in 0..k_uts {
                let a = &omegas[q] * &psi_a;
                let b = &omegas[q] * &psi_b;
                let nc = (&a * a.adjoint() + &b * b.adjoint()) / C64::new(rho_tr, 0.0);
                a_mat.push(a);
                b_mat.push(b);
                noise_cov.push(nc);
            }
            let mut a_coef = vec![vec![C64::new(0.0, 0.0); k_uts]; cells];
            let mut b_coef = a_coef.clone();
            for l in 0..cells {
                if !contaminated && l != 0 {
                    continue;
                }
                for q in 0..k_uts {
                    let s = uts[l][q].pilot_gain();
                    a_coef[l][q] = s;
                    b_coef[l][q] = s.conj();
                }
            }
            Ok(IquModel { a_mat, b_mat, a_coef, b_coef, noise_cov })
        }
        CsiModel::Perfect => {
            // g_hat = xi_A Psi_A h on the serving link only, noise free.
            let psi_a = diag_from(&bs.direct);
            let a_mat = (0..k_uts).map(|q| &psi_a * uts[0][q].direct).collect();
            let b_mat = vec![CMat::zeros(n, n); k_uts];
            let mut a_coef = vec![vec![C64::new(0.0, 0.0); k_uts]; cells];
            for q in 0..k_uts {
                a_coef[0][q] = C64::new(1.0, 0.0);
            }
            let b_coef = vec![vec![C64::new(0.0, 0.0); k_uts]; cells];
            let noise_cov = vec![CMat::zeros(n, n); k_uts];
            Ok(IquModel { a_mat, b_mat, a_coef, b_coef, noise_cov })
        }
    }
}

/// Estimate covariance `E{g_hat g_hat^H}` per UT under the given model.
fn iqu_theta_from_model(profile: &CovarianceProfile, model: &IquModel) -> Vec<CMat> {
    (0..profile.n_uts)
        .map(|q| {
            let mut th = model.noise_cov[q].clone();
            for l in 0..profile.n_cells {
                let wa = model.a_coef[l][q].norm_sqr();
                if wa > 0.0 {
                    th += &model.a_mat[q]
                        * &profile.link(l, q).r
                        * model.a_mat[q].adjoint()
                        * C64::new(wa, 0.0);
                }
                let wb = model.b_coef[l][q].norm_sqr();
                if wb > 0.0 {
                    let rc = profile.link(l, q).r.map(|z| z.conj());
                    th += &model.b_mat[q] * rc * model.b_mat[q].adjoint() * C64::new(wb, 0.0);
                }
            }
            crate::linalg::symmetrize(&th)
        })
        .collect()
}

/// `E{g_hat g_hat^H}` of the IQU-MMSE estimator. The cell sum carries the
/// co-pilot UTs' own squared pilot gains.
pub fn theta_iqu(
    profile: &CovarianceProfile,
    bs: &BsIqi,
    uts: &[Vec<UtIqi>],
    rho_tr: f64,
    contaminated: bool,
) -> Result<Vec<CMat>> {
    let model = build_iqu_model(profile, bs, uts, CsiModel::Estimated { rho_tr, contaminated })?;
    Ok(iqu_theta_from_model(profile, &model))
}

/// Variant of [`theta_iqu`] that reuses the serving UT's pilot gain for
/// every cell of the contamination sum; kept only to quantify how far that
/// reading drifts from the empirical estimate covariance.
pub fn theta_iqu_serving_gain_variant(
    profile: &CovarianceProfile,
    bs: &BsIqi,
    uts: &[Vec<UtIqi>],
    rho_tr: f64,
    contaminated: bool,
) -> Result<Vec<CMat>> {
    let mut model = build_iqu_model(profile, bs, uts, CsiModel::Estimated { rho_tr, contaminated })?;
    for q in 0..profile.n_uts {
        let own = uts[0][q].pilot_gain();
        for l in 0..profile.n_cells {
            if model.a_coef[l][q].norm_sqr() > 0.0 {
                model.a_coef[l][q] = own;
                model.b_coef[l][q] = own.conj();
            }
        }
    }
    Ok(iqu_theta_from_model(profile, &model))
}

/// Asymptotic SINR of the IQU-MMSE receiver.
pub fn iqu_asymptotic_sinr(
    profile: &CovarianceProfile,
    bs: &BsIqi,
    uts: &[Vec<UtIqi>],
    rho_ul: f64,
    csi: CsiModel,
) -> Result<AsymptoticSinr> {
    let n = profile.n_antennas;
    let nf = n as f64;
    let k_uts = profile.n_uts;
    let cells = profile.n_cells;
    let model = build_iqu_model(profile, bs, uts, csi)?;
    let thetas = iqu_theta_from_model(profile, &model);

    let fp = resolvent_equivalent(&thetas, &CMat::zeros(n, n), 1.0 / (nf * rho_ul))?;
    let gamma = &fp.t;
    let ctx = TwoResolventContext::new(&fp, &thetas)?;

    let psi_a = diag_from(&bs.direct);
    let psi_b = diag_from(&bs.image);
    let gp_a = ctx.solve(&(&psi_a * psi_a.adjoint()))?.t_prime;
    let gp_b = ctx.solve(&(&psi_b * psi_b.adjoint()))?.t_prime;

    // Link covariances seen through each BS branch gain.
    let m_a: Vec<Vec<CMat>> = (0..cells)
        .map(|l| {
            (0..k_uts)
                .map(|q| &psi_a * &profile.link(l, q).r * psi_a.adjoint())
                .collect()
        })
        .collect();
    let m_b: Vec<Vec<CMat>> = (0..cells)
        .map(|l| {
            (0..k_uts)
                .map(|q| {
                    let rc = profile.link(l, q).r.map(|z| z.conj());
                    &psi_b * rc * psi_b.adjoint()
                })
                .collect()
        })
        .collect();

    // lambda^A_{l,q} = conj(a_{l,q}) tr(M^A_{l,q} A_q^H Gamma) / N, and the
    // conjugate-branch analog with (B, conj R).
    let ga: Vec<CMat> = (0..k_uts).map(|q| model.a_mat[q].adjoint() * gamma).collect();
    let gb: Vec<CMat> = (0..k_uts).map(|q| model.b_mat[q].adjoint() * gamma).collect();
    let mut lam_a = vec![vec![C64::new(0.0, 0.0); k_uts]; cells];
    let mut lam_b = lam_a.clone();
    for l in 0..cells {
        for q in 0..k_uts {
            if model.a_coef[l][q].norm_sqr() > 0.0 {
                lam_a[l][q] =
                    model.a_coef[l][q].conj() * trace_prod(&m_a[l][q], &ga[q]) / C64::new(nf, 0.0);
            }
            if model.b_coef[l][q].norm_sqr() > 0.0 {
                lam_b[l][q] =
                    model.b_coef[l][q].conj() * trace_prod(&m_b[l][q], &gb[q]) / C64::new(nf, 0.0);
            }
        }
    }

    // Left factors of the estimate/interferer cross terms.
    let p_a: Vec<Vec<CMat>> = (0..cells)
        .map(|l| {
            (0..k_uts)
                .map(|q| &model.a_mat[q] * &profile.link(l, q).r * psi_a.adjoint())
                .collect()
        })
        .collect();
    let p_b: Vec<Vec<CMat>> = (0..cells)
        .map(|l| {
            (0..k_uts)
                .map(|q| {
                    let rc = profile.link(l, q).r.map(|z| z.conj());
                    &model.b_mat[q] * rc * psi_b.adjoint()
                })
                .collect()
        })
        .collect();

    let inv_n2 = 1.0 / (nf * nf);
    let mut s0 = vec![0.0; k_uts];
    let mut i0 = vec![0.0; k_uts];
    let mut z0 = vec![0.0; k_uts];
    for k in 0..k_uts {
        let den = (1.0 + fp.delta[k]).powi(2);
        let ut = &uts[0][k];
        s0[k] = rho_ul
            * ((ut.direct * lam_a[0][k]).norm_sqr() + (ut.image.conj() * lam_b[0][k]).norm_sqr())
            / den;

        // Self-image: the UT's own conjugate coefficient.
        let mut interf =
            (ut.image * lam_a[0][k]).norm_sqr() + (ut.direct.conj() * lam_b[0][k]).norm_sqr();

        let gpk = ctx.solve(&thetas[k])?.t_prime;
        for q in 0..k_uts {
            if q == k {
                continue;
            }
            let dq = fp.delta[q];
            let kappa = trace_prod(&thetas[q], &gpk).re * inv_n2;
            for l in 0..cells {
                let zeta_a = trace_prod(&m_a[l][q], &gpk).re * inv_n2;
                let zeta_b = trace_prod(&m_b[l][q], &gpk).re * inv_n2;
                let phi_a = model.a_coef[l][q] * trace_prod(&p_a[l][q], &gpk) * inv_n2;
                let phi_b = model.b_coef[l][q] * trace_prod(&p_b[l][q], &gpk) * inv_n2;
                let rho_a = zeta_a + lam_a[l][q].norm_sqr() * kappa / (1.0 + dq).powi(2)
                    - 2.0 * (lam_a[l][q] * phi_a).re / (1.0 + dq);
                let rho_b = zeta_b + lam_b[l][q].norm_sqr() * kappa / (1.0 + dq).powi(2)
                    - 2.0 * (lam_b[l][q] * phi_b).re / (1.0 + dq);
                let w = uts[l][q].direct.norm_sqr() + uts[l][q].image.norm_sqr();
                interf += w * (rho_a + rho_b);
            }
        }
        // Coherent pilot contamination from co-pilot UTs in other cells.
        for l in 1..cells {
            let w = uts[l][k].direct.norm_sqr() + uts[l][k].image.norm_sqr();
            interf += w * (lam_a[l][k].norm_sqr() + lam_b[l][k].norm_sqr());
        }
        i0[k] = rho_ul * interf / den;
        z0[k] = (trace_prod(&thetas[k], &gp_a).re + trace_prod(&thetas[k], &gp_b).re) * inv_n2 / den;
    }
    Ok(AsymptoticSinr { s0, i0, z0, iterations: fp.iterations, residual: fp.residual })
}

// ---------------------------------------------------------------------------
// IQA chain (augmented model, size 2N)
// ---------------------------------------------------------------------------

/// Statistical description of the IQA estimates: per UT `q`,
/// `[g_hat_q g_hat_{q+K}] = a_mat_q (sum_l H_aug_{l,q} coef[l][q]) + noise`.
struct IqaModel {
    a_mat: Vec<RMat>,
    coef: Vec<Vec<Matrix2<f64>>>,
    noise_cov: Vec<RMat>,
    /// `E{noise_col1 noise_col0^T}` per UT: the two estimate columns share
    /// one complex noise draw, which couples them when the BS mixing is
    /// impaired. Zero under perfect CSI.
    noise_cross: Vec<RMat>,
}

fn build_iqa_model(
    profile: &CovarianceProfile,
    bs: &BsIqi,
    uts: &[Vec<UtIqi>],
    csi: CsiModel,
) -> Result<IqaModel> {
    let n2 = 2 * profile.n_antennas;
    let k_uts = profile.n_uts;
    let cells = profile.n_cells;
    match csi {
        CsiModel::Estimated { rho_tr, contaminated } => {
            let omegas = iqa_omega(profile, bs, uts, rho_tr, contaminated)?;
            let mut a_mat = Vec::with_capacity(k_uts);
            let mut noise_cov = Vec::with_capacity(k_uts);
            let mut noise_cross = Vec::with_capacity(k_uts);
            for q in 0..k_uts {
                // Omega_aug Psi_aug: right-multiplication by the BS mixing.
                let a = bs.apply_aug_transpose(&omegas[q].transpose()).transpose();
                noise_cov.push(&a * a.transpose() / (2.0 * rho_tr));
                noise_cross.push(&a * j_times(&a.transpose()) / (2.0 * rho_tr));
                a_mat.push(a);
            }
            let mut coef = vec![vec![Matrix2::zeros(); k_uts]; cells];
            for l in 0..cells {
                if !contaminated && l != 0 {
                    continue;
                }
                for q in 0..k_uts {
                    coef[l][q] = uts[l][q].mixing;
                }
            }
            Ok(IqaModel { a_mat, coef, noise_cov, noise_cross })
        }
        CsiModel::Perfect => {
            let a_mat = vec![bs.aug.clone(); k_uts];
            let mut coef = vec![vec![Matrix2::zeros(); k_uts]; cells];
            for q in 0..k_uts {
                coef[0][q] = uts[0][q].mixing;
            }
            let noise_cov = vec![RMat::zeros(n2, n2); k_uts];
            let noise_cross = noise_cov.clone();
            Ok(IqaModel { a_mat, coef, noise_cov, noise_cross })
        }
    }
}

/// `J M` for `J = aug(jI)`: top rows become minus the bottom rows.
fn j_times(m: &RMat) -> RMat {
    let n = m.nrows() / 2;
    let mut out = RMat::zeros(m.nrows(), m.ncols());
    for j in 0..m.ncols() {
        for i in 0..n {
            out[(i, j)] = -m[(i + n, j)];
            out[(i + n, j)] = m[(i, j)];
        }
    }
    out
}

/// Asymptotic SINR of the IQA-WLMMSE receiver.
///
/// The 2K fixed-point unknowns (one per augmented column) are solved
/// jointly. Useful and self-image powers are rebuilt from the full 2x2
/// coherent coupling of each UT's own column pair, so the split matches
/// the simulator's complex-symbol bookkeeping exactly in the no-IQI limit.
pub fn iqa_asymptotic_sinr(
    profile: &CovarianceProfile,
    bs: &BsIqi,
    uts: &[Vec<UtIqi>],
    rho_ul: f64,
    csi: CsiModel,
) -> Result<AsymptoticSinr> {
    let n = profile.n_antennas;
    let n2f = (2 * n) as f64;
    let k_uts = profile.n_uts;
    let cells = profile.n_cells;
    let model = build_iqa_model(profile, bs, uts, csi)?;

    let r_aug: Vec<Vec<RMat>> = (0..cells)
        .map(|l| (0..k_uts).map(|q| profile.link(l, q).r_aug()).collect())
        .collect();
    // Psi R Psi^T (interferer covariance through the BS mixing).
    let s_psi: Vec<Vec<RMat>> = (0..cells)
        .map(|l| (0..k_uts).map(|q| bs.sandwich_aug(&r_aug[l][q])).collect())
        .collect();

    let col_w = |m: &Matrix2<f64>, c: usize| m[(0, c)] * m[(0, c)] + m[(1, c)] * m[(1, c)];

    // Phi^1 per augmented column; index q is (column 0, UT q), index
    // q + K is (column 1, UT q).
    let mut phi1: Vec<RMat> = Vec::with_capacity(2 * k_uts);
    for c in 0..2 {
        for q in 0..k_uts {
            let mut acc = model.noise_cov[q].clone();
            for l in 0..cells {
                let w = 0.5 * col_w(&model.coef[l][q], c);
                if w > 0.0 {
                    acc += &model.a_mat[q] * &r_aug[l][q] * model.a_mat[q].transpose() * w;
                }
            }
            phi1.push(crate::linalg::symmetrize(&acc));
        }
    }
    let fp = resolvent_equivalent(&phi1, &RMat::zeros(2 * n, 2 * n), 1.0 / (n2f * rho_ul))?;
    let gamma = &fp.t;
    let ctx = TwoResolventContext::new(&fp, &phi1)?;
    let gp_noise = ctx.solve(&bs.aug_gram())?.t_prime;

    // Coherent-coupling trace seeds: W_q = A_q^T Gamma Psi_aug, paired with
    // tr(R W) and tr(J R W) per link.
    let gamma_psi = bs.apply_aug_transpose(&gamma.transpose()).transpose();
    let w_mats: Vec<RMat> = (0..k_uts)
        .map(|q| model.a_mat[q].transpose() * &gamma_psi)
        .collect();
    let mut tr_r = vec![vec![0.0; k_uts]; cells];
    let mut tr_jr = vec![vec![0.0; k_uts]; cells];
    for l in 0..cells {
        for q in 0..k_uts {
            tr_r[l][q] = trace_prod(&r_aug[l][q], &w_mats[q]);
            tr_jr[l][q] = trace_prod(&j_times(&r_aug[l][q]), &w_mats[q]);
        }
    }

    // coupling of output column r to the channel column c of the co-pilot
    // UT in cell l: the true-channel mixing pairs with the estimate-model
    // mixing; the skew part carries the improper (I/Q cross) component.
    let coupling = |l: usize, q: usize, r: usize, c: usize| -> f64 {
        let truth = &uts[l][q].mixing;
        let est = &model.coef[l][q];
        let dot = truth[(0, c)] * est[(0, r)] + truth[(1, c)] * est[(1, r)];
        let skew = truth[(0, c)] * est[(1, r)] - truth[(1, c)] * est[(0, r)];
        0.5 * (dot * tr_r[l][q] - skew * tr_jr[l][q]) / n2f
    };

    // Left factors for the phi corrections: A_q R Psi^T and A_q J R Psi^T.
    let mut p_mat = vec![vec![RMat::zeros(0, 0); k_uts]; cells];
    let mut pj_mat = vec![vec![RMat::zeros(0, 0); k_uts]; cells];
    for l in 0..cells {
        for q in 0..k_uts {
            let r_psi_t = bs.apply_aug(&r_aug[l][q].transpose()).transpose();
            p_mat[l][q] = &model.a_mat[q] * &r_psi_t;
            pj_mat[l][q] = &model.a_mat[q] * j_times(&r_psi_t);
        }
    }

    let inv_4n2 = 1.0 / (n2f * n2f);
    let mut s0 = vec![0.0; k_uts];
    let mut i0 = vec![0.0; k_uts];
    let mut z0 = vec![0.0; k_uts];

    for k in 0..k_uts {
        let d_re = fp.delta[k];
        let d_im = fp.delta[k + k_uts];
        // The UT's two estimate columns are removed jointly: the coherent
        // couplings mix through the 2x2 estimate Gram, whose off-diagonal
        // (the improper cross-correlation of the estimate pair) is what a
        // widely-linear filter exploits to cancel its own image.
        let w2 = model.a_mat[k].transpose() * gamma * &model.a_mat[k];
        let mut qbar = Matrix2::new(d_re, 0.0, 0.0, d_im);
        for (r, cp) in [(0usize, 1usize), (1usize, 0usize)] {
            let mut acc = 0.0;
            for l in 0..cells {
                let em = &model.coef[l][k];
                // E{(H xi^{m,cp})(H xi^{m,r})^T} against W2.
                let dot = em[(0, cp)] * em[(0, r)] + em[(1, cp)] * em[(1, r)];
                let skew = em[(0, cp)] * em[(1, r)] - em[(1, cp)] * em[(0, r)];
                if dot != 0.0 || skew != 0.0 {
                    let tr_rw = trace_prod(&r_aug[l][k], &w2);
                    let tr_jrw = trace_prod(&j_times(&r_aug[l][k]), &w2);
                    acc += 0.5 * (dot * tr_rw - skew * tr_jrw);
                }
            }
            // Shared training noise couples the pair as well.
            let ncross = if (r, cp) == (0, 1) {
                trace_prod(&model.noise_cross[k], gamma)
            } else {
                trace_prod(&model.noise_cross[k].transpose(), gamma)
            };
            qbar[(r, cp)] = (acc + ncross) / n2f;
        }
        let mix = (Matrix2::identity() + qbar)
            .try_inverse()
            .ok_or_else(|| Error::Singular("own-pair coupling Gram".into()))?;

        // Own-pair coherent coupling after the joint removal.
        let cbar0 =
            Matrix2::new(coupling(0, k, 0, 0), coupling(0, k, 0, 1), coupling(0, k, 1, 0), coupling(0, k, 1, 1));
        let u_own = mix * cbar0;
        let (a_bar, b_bar) = (u_own[(0, 0)], u_own[(0, 1)]);
        let (c_bar, d_bar) = (u_own[(1, 0)], u_own[(1, 1)]);
        s0[k] = 0.25 * rho_ul * ((a_bar + d_bar).powi(2) + (c_bar - b_bar).powi(2));
        let mut interf = 0.25 * rho_ul * ((a_bar - d_bar).powi(2) + (c_bar + b_bar).powi(2));

        // Coherent pilot contamination: both columns of co-pilot UTs in
        // other cells couple into both outputs through the same mixing.
        for l in 1..cells {
            let cbar = Matrix2::new(
                coupling(l, k, 0, 0),
                coupling(l, k, 0, 1),
                coupling(l, k, 1, 0),
                coupling(l, k, 1, 1),
            );
            let u_l = mix * cbar;
            for c in 0..2 {
                interf += 0.5 * rho_ul * (u_l[(0, c)].powi(2) + u_l[(1, c)].powi(2));
            }
        }

        // Suppressed interference through the two-resolvent machinery: per
        // output, every column of every other UT. An interferer couples
        // into the filter through BOTH of its estimate columns, so the
        // suppression corrections run over the column pair (the augmented
        // counterpart of removing one complex filter direction).
        for (out_idx, d_out) in [(k, d_re), (k + k_uts, d_im)] {
            let gpk = ctx.solve(&phi1[out_idx])?.t_prime;
            let den_out = (1.0 + d_out).powi(2);
            let mut acc = 0.0;
            for l in 0..cells {
                for q in 0..k_uts {
                    if q == k {
                        continue; // own pair and contamination handled above
                    }
                    let tr_s = trace_prod(&s_psi[l][q], &gpk);
                    let tr_p = trace_prod(&p_mat[l][q], &gpk);
                    let tr_pj = trace_prod(&pj_mat[l][q], &gpk);
                    let kappa: [f64; 2] = [
                        trace_prod(&phi1[q], &gpk) * inv_4n2,
                        trace_prod(&phi1[q + k_uts], &gpk) * inv_4n2,
                    ];
                    for c in 0..2 {
                        let w_true = 0.5 * col_w(&uts[l][q].mixing, c);
                        acc += w_true * tr_s * inv_4n2;
                        for cp in 0..2 {
                            let lam = coupling(l, q, cp, c);
                            if lam == 0.0 {
                                continue;
                            }
                            let dq = fp.delta[cp * k_uts + q];
                            let truth = &uts[l][q].mixing;
                            let est = &model.coef[l][q];
                            let dot = est[(0, cp)] * truth[(0, c)] + est[(1, cp)] * truth[(1, c)];
                            let skew = est[(0, cp)] * truth[(1, c)] - est[(1, cp)] * truth[(0, c)];
                            let phi = 0.5 * (dot * tr_p - skew * tr_pj) * inv_4n2;
                            acc += lam * lam * kappa[cp] / (1.0 + dq).powi(2)
                                - 2.0 * lam * phi / (1.0 + dq);
                        }
                    }
                }
            }
            interf += 0.5 * rho_ul * acc / den_out;
            z0[k] += 0.5 * trace_prod(&phi1[out_idx], &gp_noise) * inv_4n2 / den_out;
        }
        i0[k] = interf;
    }
    Ok(AsymptoticSinr { s0, i0, z0, iterations: fp.iterations, residual: fp.residual })
}

// ---------------------------------------------------------------------------
// Closed-form single-cell limits
// ---------------------------------------------------------------------------

/// Closed-form asymptotic SINRs and loss ratios for the single-cell,
/// i.i.d.-channel, perfect-CSI regime.
#[derive(Debug, Clone, PartialEq)]
pub enum ClosedForm {
    /// Ideal system: `N rho`.
    NoIqi { n: usize, rho_ul: f64 },
    /// IQU receiver, IQI only at the BS (per-branch mismatches).
    IquBs { n: usize, k: usize, rho_ul: f64, eps: Vec<f64>, theta: Vec<f64> },
    /// IQU receiver, identical BS branches.
    IquBsIdentical { n: usize, k: usize, rho_ul: f64, eps: f64, theta: f64 },
    /// SINR loss of IQU vs the ideal system.
    IquLoss { k: usize, rho_ul: f64, eps: f64, theta: f64 },
    /// IQU receiver, IQI only at the UTs.
    IquUt { n: usize, rho_ul: f64, eps: f64, theta: f64 },
    /// IQA receiver, IQI only at the BS (per-branch mismatches).
    IqaBs { n: usize, rho_ul: f64, eps: Vec<f64>, theta: Vec<f64> },
    /// IQA receiver, identical BS branches.
    IqaBsIdentical { n: usize, rho_ul: f64, eps: f64, theta: f64 },
    /// IQA/IQU SINR ratio with BS-only IQI.
    IqaLossBs { k: usize, rho_ul: f64, eps: f64, theta: f64 },
    /// IQA receiver, IQI only at the UTs.
    IqaUt { n: usize, rho_ul: f64, eps: f64, theta: f64 },
    /// IQA/IQU SINR ratio with UT-only IQI.
    IqaLossUt { n: usize, rho_ul: f64, eps: f64, theta: f64 },
}

/// Evaluate a closed form.
pub fn closed_form_sinr(kind: &ClosedForm) -> Result<f64> {
    let val = match kind {
        ClosedForm::NoIqi { n, rho_ul } => *n as f64 * rho_ul,
        ClosedForm::IquBs { n, k, rho_ul, eps, theta } => {
            if eps.len() != *n || theta.len() != *n {
                return Err(Error::DimensionMismatch("need one mismatch per branch".into()));
            }
            let nf = *n as f64;
            let mu = 1.0
                + eps
                    .iter()
                    .zip(theta.iter())
                    .map(|(&e, &t)| (e * e - 1.0) * (t / 2.0).sin().powi(2))
                    .sum::<f64>()
                    / nf;
            let mu_p = eps
                .iter()
                .zip(theta.iter())
                .map(|(&e, &t)| (1.0 + (e * e - 1.0) * (t / 2.0).sin().powi(2)).powi(2))
                .sum::<f64>()
                / nf;
            let mu_pp = eps
                .iter()
                .zip(theta.iter())
                .map(|(&e, &t)| e * e + 0.25 * t.sin().powi(2))
                .sum::<f64>()
                / nf;
            nf * rho_ul * mu * mu / (*k as f64 * rho_ul * mu_pp + mu_p)
        }
        ClosedForm::IquBsIdentical { n, k, rho_ul, eps, theta } => {
            *n as f64 * rho_ul / (*k as f64 * rho_ul * (eps * eps + theta * theta / 4.0) + 1.0)
        }
        ClosedForm::IquLoss { k, rho_ul, eps, theta } => {
            *k as f64 * rho_ul * (eps * eps + theta * theta / 4.0) + 1.0
        }
        ClosedForm::IquUt { n, rho_ul, eps, theta } => {
            let nf = *n as f64;
            nf * rho_ul / (nf * rho_ul * (eps * eps + theta * theta / 4.0) + 1.0)
        }
        ClosedForm::IqaBs { n, rho_ul, eps, theta } => {
            if eps.len() != *n || theta.len() != *n {
                return Err(Error::DimensionMismatch("need one mismatch per branch".into()));
            }
            let nf = *n as f64;
            let num = 1.0 + eps.iter().map(|&e| e * e).sum::<f64>() / nf;
            let den = 1.0
                + eps
                    .iter()
                    .zip(theta.iter())
                    .map(|(&e, &t)| (6.0 - 2.0 * t.sin().powi(2)) * e * e + t.sin().powi(2))
                    .sum::<f64>()
                    / nf;
            nf * rho_ul * num * num / den
        }
        ClosedForm::IqaBsIdentical { n, rho_ul, eps, theta } => {
            let s2 = theta.sin().powi(2);
            *n as f64 * rho_ul * (1.0 + eps * eps).powi(2) / (1.0 + (6.0 - 2.0 * s2) * eps * eps + s2)
        }
        ClosedForm::IqaLossBs { k, rho_ul, eps, theta } => {
            let s2 = theta.sin().powi(2);
            (1.0 + eps * eps).powi(2) * (*k as f64 * rho_ul * (eps * eps + theta * theta / 4.0) + 1.0)
                / (1.0 + (6.0 - 2.0 * s2) * eps * eps + s2)
        }
        ClosedForm::IqaUt { n, rho_ul, eps, theta } => {
            let nf = *n as f64;
            let front = nf * rho_ul * (1.0 + 2.0 * eps * eps * (1.0 - 2.0 * theta.cos().powi(2)))
                / (2.0 * (1.0 + eps * eps));
            front * ut_bracket(nf, *rho_ul, *eps)
        }
        ClosedForm::IqaLossUt { n, rho_ul, eps, theta } => {
            let nf = *n as f64;
            let front = nf * rho_ul * (eps * eps + theta * theta / 4.0) / (2.0 * (1.0 + eps * eps));
            front * ut_bracket(nf, *rho_ul, *eps)
        }
    };
    Ok(val)
}

fn ut_bracket(n: f64, rho: f64, eps: f64) -> f64 {
    let up = n * rho * (1.0 + 2.0 * eps);
    let dn = n * rho * (1.0 - 2.0 * eps);
    (up / (1.0 + up)).powi(2) + (dn / (1.0 + dn)).powi(2)
}
