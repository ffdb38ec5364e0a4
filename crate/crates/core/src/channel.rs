//! Per-trial channel realizations for one BS.

use crate::augment::augment;
use crate::covariance::CovarianceProfile;
use crate::rng::complex_gaussian_vector;
use crate::{CMat, RMat};
use rand::Rng;

/// Channels from every UT in every cell to one BS, drawn for one trial.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    pub n_antennas: usize,
    pub n_cells: usize,
    pub n_uts: usize,
    /// `h[l]` is the `N x K` matrix of cell `l`'s UT channels.
    h: Vec<CMat>,
}

impl ChannelRealization {
    /// Channel matrix of cell `l`.
    pub fn cell(&self, l: usize) -> &CMat {
        &self.h[l]
    }

    /// Mutable access for tests and world restrictions.
    pub fn cell_mut(&mut self, l: usize) -> &mut CMat {
        &mut self.h[l]
    }

    /// Channel vector of UT `k` in cell `l`.
    pub fn column(&self, l: usize, k: usize) -> nalgebra::DVectorView<'_, crate::C64> {
        self.h[l].column(k)
    }

    /// Augmented `2N x 2K` view of cell `l`, built on demand.
    pub fn cell_aug(&self, l: usize) -> RMat {
        augment(&self.h[l])
    }

    /// Augmented `2N x 2` channel of one UT.
    pub fn column_aug(&self, l: usize, k: usize) -> RMat {
        augment(&CMat::from_column_slice(
            self.n_antennas,
            1,
            self.h[l].column(k).as_slice(),
        ))
    }

    /// Zero all cells except the serving one; models a training phase with
    /// no co-pilot transmissions.
    pub fn zero_other_cells(&mut self) {
        for l in 1..self.n_cells {
            self.h[l].fill(crate::C64::new(0.0, 0.0));
        }
    }
}

/// Draw `h = sqrt_r * v` with `v ~ CN(0, I)` for every link.
pub fn draw_channel<R: Rng + ?Sized>(profile: &CovarianceProfile, rng: &mut R) -> ChannelRealization {
    let n = profile.n_antennas;
    let mut h = Vec::with_capacity(profile.n_cells);
    for l in 0..profile.n_cells {
        let mut m = CMat::zeros(n, profile.n_uts);
        for k in 0..profile.n_uts {
            let v = complex_gaussian_vector(rng, n);
            m.set_column(k, &(&profile.link(l, k).sqrt_r * v));
        }
        h.push(m);
    }
    ChannelRealization {
        n_antennas: n,
        n_cells: profile.n_cells,
        n_uts: profile.n_uts,
        h,
    }
}
