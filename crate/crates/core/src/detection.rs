//! Receive filtering, symbol decisions, and the exact per-realization SINR
//! decomposition.
//!
//! Conditioned on a channel realization, the decision variable of UT `k` is
//! a linear function of every cell's symbols, their conjugates, and the
//! noise. Taking expectations over unit-variance proper symbols and noise
//! in closed form splits the output power into
//!
//! * `S`: the coefficient of UT `k`'s own symbol `d`,
//! * `I`: everything aligned with other symbols and with conjugates
//!   (including the UT's own conjugate self-image, which a strictly linear
//!   receiver cannot cancel),
//! * `Z`: the filtered noise power.
//!
//! The budget `S + I + Z` equals the total conditional output variance
//! exactly, which is the correctness anchor for the split.

use crate::augment::augment;
use crate::channel::ChannelRealization;
use crate::estimation::EstimatedChannels;
use crate::iqi::{BsIqi, UtIqi};
use crate::linalg::solve_hpd;
use crate::rng::{complex_gaussian_matrix, complex_gaussian_vector};
use crate::{C64, CMat, CVec, RMat, Result, RVec};
use rand::Rng;

/// MMSE receive filters for both chains, rows indexed by UT.
#[derive(Debug, Clone)]
pub struct ReceiveFilters {
    /// IQU rows: `K x N` complex.
    pub u: CMat,
    /// IQA rows: `2K x 2N` real; rows `k` and `k + K` feed the real and
    /// imaginary parts of UT `k`'s decision.
    pub u_aug: RMat,
}

/// `u_k = g_hat_k^H (G G^H + I/rho)^{-1}`, all rows at once.
pub fn iqu_filter(g_hat: &CMat, rho_ul: f64) -> Result<CMat> {
    let n = g_hat.nrows();
    let mut a = g_hat * g_hat.adjoint();
    for i in 0..n {
        a[(i, i)] += C64::new(1.0 / rho_ul, 0.0);
    }
    Ok(solve_hpd(&a, g_hat)?.adjoint())
}

/// Augmented filter rows `G_aug^T (G_aug G_aug^T + I/rho)^{-1}`.
pub fn iqa_filter(g_aug_hat: &RMat, rho_ul: f64) -> Result<RMat> {
    let n2 = g_aug_hat.nrows();
    let mut a = g_aug_hat * g_aug_hat.transpose();
    for i in 0..n2 {
        a[(i, i)] += 1.0 / rho_ul;
    }
    Ok(solve_hpd(&a, g_aug_hat)?.transpose())
}

/// Uplink payload draw shared by both receive chains: per-cell symbols and
/// one complex noise vector.
#[derive(Debug, Clone)]
pub struct Payload {
    /// `d[l]` holds cell `l`'s K unit-variance symbols.
    pub d: Vec<CVec>,
    pub z: CVec,
}

pub fn draw_payload<R: Rng + ?Sized>(rng: &mut R, n_cells: usize, n_uts: usize, n_antennas: usize) -> Payload {
    let d = (0..n_cells).map(|_| complex_gaussian_vector(rng, n_uts)).collect();
    let z = complex_gaussian_vector(rng, n_antennas);
    Payload { d, z }
}

/// Received vector of the complex model for one payload.
pub fn rx_data_complex(
    channels: &ChannelRealization,
    bs: &BsIqi,
    uts: &[Vec<UtIqi>],
    rho_ul: f64,
    payload: &Payload,
) -> CVec {
    let n = channels.n_antennas;
    let amp = rho_ul.sqrt();
    let mut pre = payload.z.clone();
    for l in 0..channels.n_cells {
        let h = channels.cell(l);
        for k in 0..channels.n_uts {
            let ut = &uts[l][k];
            let s = payload.d[l][k];
            let coef = (ut.direct * s + ut.image * s.conj()) * amp;
            pre.zip_apply(&h.column(k), |acc, hv| *acc += hv * coef);
        }
    }
    let out = bs.apply_complex(&CMat::from_column_slice(n, 1, pre.as_slice()));
    out.column(0).into_owned()
}

/// Received vector of the augmented model for the same payload.
pub fn rx_data_augmented(
    channels: &ChannelRealization,
    bs: &BsIqi,
    uts: &[Vec<UtIqi>],
    rho_ul: f64,
    payload: &Payload,
) -> RVec {
    let n = channels.n_antennas;
    let amp = rho_ul.sqrt();
    let mut pre = crate::augment::stack(&payload.z);
    for l in 0..channels.n_cells {
        for k in 0..channels.n_uts {
            let ut = &uts[l][k];
            let h_aug = channels.column_aug(l, k);
            let s = payload.d[l][k];
            let dv = nalgebra::Vector2::new(s.re, s.im);
            let mixed = ut.mixing * dv * amp;
            let contrib = h_aug * RVec::from_column_slice(&[mixed[0], mixed[1]]);
            pre += contrib;
        }
    }
    let out = bs.apply_aug(&RMat::from_column_slice(2 * n, 1, pre.as_slice()));
    out.column(0).into_owned()
}

/// IQU decision variables, normalized so an unbiased detector returns the
/// symbol itself as SNR grows.
pub fn detect_iqu(u: &CMat, received: &CVec, rho_ul: f64) -> CVec {
    (u * received) / C64::new(rho_ul.sqrt(), 0.0)
}

/// IQA decision variables: real output row `k` plus `j` times row `k + K`.
pub fn detect_iqa(u_aug: &RMat, received_aug: &RVec, rho_ul: f64) -> CVec {
    let k_uts = u_aug.nrows() / 2;
    let raw = (u_aug * received_aug) / rho_ul.sqrt();
    CVec::from_fn(k_uts, |k, _| C64::new(raw[k], raw[k + k_uts]))
}

/// Which receive chain a decomposition belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReceiverChain {
    Iqu,
    Iqa,
}

/// Exact conditional signal/interference/noise powers per UT.
#[derive(Debug, Clone)]
pub struct SinrBreakdown {
    pub s: Vec<f64>,
    pub i: Vec<f64>,
    pub z: Vec<f64>,
}

impl SinrBreakdown {
    pub fn sinr(&self) -> Vec<f64> {
        self.s
            .iter()
            .zip(self.i.iter().zip(self.z.iter()))
            .map(|(&s, (&i, &z))| if i + z > 0.0 { s / (i + z) } else { 0.0 })
            .collect()
    }

    /// `sum_k log2(1 + SINR_k)`.
    pub fn sum_rate(&self) -> f64 {
        self.sinr().iter().map(|&g| (1.0 + g).log2()).sum()
    }

    /// Total conditional output variance per UT (for the budget check).
    pub fn total(&self) -> Vec<f64> {
        self.s
            .iter()
            .zip(self.i.iter().zip(self.z.iter()))
            .map(|(&s, (&i, &z))| s + i + z)
            .collect()
    }
}

/// Closed-form conditional SINR decomposition for the IQU chain.
///
/// The useful term is the coefficient of `d_k` through both the direct and
/// the conjugate path; the coefficient of `conj(d_k)` is self-image and
/// counts as interference.
pub fn sinr_components_iqu(
    channels: &ChannelRealization,
    u: &CMat,
    bs: &BsIqi,
    uts: &[Vec<UtIqi>],
    rho_ul: f64,
) -> SinrBreakdown {
    let k_uts = channels.n_uts;
    // Column scaling: (U Psi_A)[k, i] = U[k, i] psi_A[i].
    let mut u_a = u.clone();
    let mut u_b = u.clone();
    for i in 0..channels.n_antennas {
        let (da, db) = (bs.direct[i], bs.image[i]);
        for k in 0..k_uts {
            u_a[(k, i)] = u[(k, i)] * da;
            u_b[(k, i)] = u[(k, i)] * db;
        }
    }
    let mut s = vec![0.0; k_uts];
    let mut i_pow = vec![0.0; k_uts];
    for l in 0..channels.n_cells {
        let h = channels.cell(l);
        let h_conj = h.map(|z| z.conj());
        let pa = &u_a * h; // K x K
        let pb = &u_b * &h_conj;
        for q in 0..k_uts {
            let ut = &uts[l][q];
            for k in 0..k_uts {
                // coefficient of d_{l,q} and of conj(d_{l,q}) at output k
                let direct = pa[(k, q)] * ut.direct + pb[(k, q)] * ut.image.conj();
                let image = pa[(k, q)] * ut.image + pb[(k, q)] * ut.direct.conj();
                let p = rho_ul * (direct.norm_sqr() + image.norm_sqr());
                if l == 0 && q == k {
                    s[k] = rho_ul * direct.norm_sqr();
                    i_pow[k] += rho_ul * image.norm_sqr();
                } else {
                    i_pow[k] += p;
                }
            }
        }
    }
    let z = (0..k_uts)
        .map(|k| u_a.row(k).norm_squared() + u_b.row(k).norm_squared())
        .collect();
    SinrBreakdown { s, i: i_pow, z }
}

/// Closed-form conditional SINR decomposition for the IQA chain.
///
/// Per source symbol the complex coefficient pair `(alpha, beta)` of
/// `(d, conj(d))` is reassembled from the four real couplings; `S` is
/// `|alpha|^2` of the UT's own symbol, everything else lands in `I`.
pub fn sinr_components_iqa(
    channels: &ChannelRealization,
    u_aug: &RMat,
    bs: &BsIqi,
    uts: &[Vec<UtIqi>],
    rho_ul: f64,
) -> SinrBreakdown {
    let k_uts = channels.n_uts;
    let n = channels.n_antennas;
    // W = U_aug * Psi_aug, via the structured apply on the transpose.
    let w = bs.apply_aug(&u_aug.transpose()).transpose();
    let mut s = vec![0.0; k_uts];
    let mut i_pow = vec![0.0; k_uts];
    for l in 0..channels.n_cells {
        // V = H_aug Xi_aug assembled UT by UT: columns q and q+K are
        // augment(h_q) * mixing_q.
        let mut v = RMat::zeros(2 * n, 2 * k_uts);
        for q in 0..k_uts {
            let block = channels.column_aug(l, q)
                * RMat::from_fn(2, 2, |a, b| uts[l][q].mixing[(a, b)]);
            v.column_mut(q).copy_from(&block.column(0));
            v.column_mut(q + k_uts).copy_from(&block.column(1));
        }
        let m = &w * &v; // 2K x 2K real couplings
        for q in 0..k_uts {
            for k in 0..k_uts {
                let (a11, a12) = (m[(k, q)], m[(k, q + k_uts)]);
                let (a21, a22) = (m[(k + k_uts, q)], m[(k + k_uts, q + k_uts)]);
                // alpha, beta: coefficients of d and conj(d); symbol parts
                // carry half the power each, absorbed by the 1/4 weights.
                let alpha = 0.25 * ((a11 + a22).powi(2) + (a21 - a12).powi(2));
                let beta = 0.25 * ((a11 - a22).powi(2) + (a21 + a12).powi(2));
                if l == 0 && q == k {
                    s[k] = rho_ul * alpha;
                    i_pow[k] += rho_ul * beta;
                } else {
                    i_pow[k] += rho_ul * (alpha + beta);
                }
            }
        }
    }
    let z = (0..k_uts)
        .map(|k| 0.5 * (w.row(k).norm_squared() + w.row(k + k_uts).norm_squared()))
        .collect();
    SinrBreakdown { s, i: i_pow, z }
}

/// Empirical conditional output variance of each decision variable over
/// many payload draws; the Monte-Carlo oracle for the budget identity.
pub fn empirical_output_variance<R: Rng + ?Sized>(
    channels: &ChannelRealization,
    filters: &ReceiveFilters,
    bs: &BsIqi,
    uts: &[Vec<UtIqi>],
    rho_ul: f64,
    chain: ReceiverChain,
    draws: usize,
    rng: &mut R,
) -> Vec<f64> {
    let k_uts = channels.n_uts;
    let mut acc = vec![0.0; k_uts];
    for _ in 0..draws {
        let payload = draw_payload(rng, channels.n_cells, k_uts, channels.n_antennas);
        let decided = match chain {
            ReceiverChain::Iqu => {
                let r = rx_data_complex(channels, bs, uts, rho_ul, &payload);
                (&filters.u * r) * C64::new(1.0, 0.0)
            }
            ReceiverChain::Iqa => {
                let r = rx_data_augmented(channels, bs, uts, rho_ul, &payload);
                let raw = &filters.u_aug * r;
                CVec::from_fn(k_uts, |k, _| C64::new(raw[k], raw[k + k_uts]))
            }
        };
        for k in 0..k_uts {
            acc[k] += decided[k].norm_sqr();
        }
    }
    acc.iter().map(|&a| a / draws as f64).collect()
}

/// Perfect-CSI estimates for an ideal (no-IQI) system: the true channels.
pub fn perfect_csi_estimates(channels: &ChannelRealization) -> EstimatedChannels {
    EstimatedChannels {
        g_hat: channels.cell(0).clone(),
        g_aug_hat: augment(channels.cell(0)),
    }
}

/// Draw payload noise only (used by tests that need fixed symbols).
pub fn draw_noise_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize, cols: usize) -> CMat {
    complex_gaussian_matrix(rng, n, cols)
}
