//! Training phase: pilot sequences and the post-correlation observations.
//!
//! All cells reuse the same `K` orthonormal real pilots, so after the BS
//! correlates its receive block with pilot `k` it sees the superposition of
//! every cell's `k`th UT (pilot contamination) plus one effective noise
//! vector per pilot:
//!
//! ```text
//!     y_k = Psi_A ( sum_l sqrt(rho_tr) h_{l,k} (xi_A + xi_B)_{l,k} + w_k )
//!         + Psi_B ( sum_l sqrt(rho_tr) conj(h_{l,k}) conj(xi_A + xi_B)_{l,k} + conj(w_k) ).
//! ```
//!
//! The augmented observation is the stacked-real version of the same
//! physical quantity, so both receive chains can be fed from one noise
//! draw and compared sample by sample.

use crate::augment::augment;
use crate::channel::ChannelRealization;
use crate::iqi::{BsIqi, UtIqi};
use crate::rng::complex_gaussian_matrix;
use crate::{CMat, Error, RMat, Result};
use rand::Rng;

/// Orthonormal real training sequences, one column per UT.
#[derive(Debug, Clone)]
pub struct TrainingSet {
    /// `T x K`, columns orthonormal.
    pub x: RMat,
}

impl TrainingSet {
    /// Augmented `2T x 2` pilot of UT `k` (real pilots: zero imaginary part).
    pub fn x_aug(&self, k: usize) -> RMat {
        let col = self.x.column(k);
        let t = col.len();
        let mut out = RMat::zeros(2 * t, 2);
        for i in 0..t {
            out[(i, 0)] = col[i];
            out[(i + t, 1)] = col[i];
        }
        out
    }
}

/// Build `K` orthonormal real pilots of length `T >= K` from the DCT-II
/// basis (exactly orthonormal for every `T`).
pub fn gen_training(n_uts: usize, length: usize) -> Result<TrainingSet> {
    if length < n_uts {
        return Err(Error::InvalidArgument(format!(
            "training length {length} shorter than UT count {n_uts}"
        )));
    }
    let t = length as f64;
    let x = RMat::from_fn(length, n_uts, |row, col| {
        let w = if col == 0 { (1.0 / t).sqrt() } else { (2.0 / t).sqrt() };
        w * (std::f64::consts::PI * (row as f64 + 0.5) * col as f64 / t).cos()
    });
    Ok(TrainingSet { x })
}

/// Effective training noise after pilot correlation: column `k` is the
/// CN(0, I) vector seen on pilot `k`. Columns are independent because the
/// pilots are orthonormal.
pub fn draw_training_noise<R: Rng + ?Sized>(rng: &mut R, n_antennas: usize, n_uts: usize) -> CMat {
    complex_gaussian_matrix(rng, n_antennas, n_uts)
}

/// Complex-model training observations, one column per UT. `noise = None`
/// is the test-only noiseless switch.
pub fn rx_training_complex(
    channels: &ChannelRealization,
    bs: &BsIqi,
    uts: &[Vec<UtIqi>],
    rho_tr: f64,
    noise: Option<&CMat>,
) -> CMat {
    let (n, k_uts) = (channels.n_antennas, channels.n_uts);
    let amp = rho_tr.sqrt();
    let mut pre = CMat::zeros(n, k_uts);
    for l in 0..channels.n_cells {
        let h = channels.cell(l);
        for k in 0..k_uts {
            let s = uts[l][k].pilot_gain() * amp;
            pre.column_mut(k).zip_apply(&h.column(k), |acc, hv| *acc += hv * s);
        }
    }
    if let Some(w) = noise {
        pre += w;
    }
    bs.apply_complex(&pre)
}

/// Augmented-model training observations, one `2N x 2` block per UT.
/// Passing the same `noise` as [`rx_training_complex`] pairs the two models
/// on a single physical realization.
pub fn rx_training_augmented(
    channels: &ChannelRealization,
    bs: &BsIqi,
    uts: &[Vec<UtIqi>],
    rho_tr: f64,
    noise: Option<&CMat>,
) -> Vec<RMat> {
    let (n, k_uts) = (channels.n_antennas, channels.n_uts);
    let amp = rho_tr.sqrt();
    let mut out = Vec::with_capacity(k_uts);
    for k in 0..k_uts {
        let mut pre = RMat::zeros(2 * n, 2);
        for l in 0..channels.n_cells {
            let h_aug = channels.column_aug(l, k);
            let mix = uts[l][k].mixing * amp;
            // 2N x 2 times 2 x 2
            pre += h_aug * RMat::from_fn(2, 2, |i, j| mix[(i, j)]);
        }
        if let Some(w) = noise {
            let w_col = CMat::from_column_slice(n, 1, w.column(k).as_slice());
            pre += augment(&w_col);
        }
        out.push(bs.apply_aug(&pre));
    }
    out
}
