//! Channel covariance profiles for the receive side of one BS.
//!
//! Per link the channel is `h = sqrt_r * v` with `v ~ CN(0, I)`, so the
//! covariance is `R = sqrt_r sqrt_r^H`. The built-in model is a uniform
//! linear array with `M` resolvable directions and distance-based path
//! loss on the square root:
//!
//! ```text
//!     sqrt_r = c^(-3/2) [ B  0_{N x (N-M)} ],
//!     B[:, m] = b(phi_m),   phi_m = -pi/2 + m pi / M  (m = 0..M-1),
//!     b(phi)[n] = exp(-2 pi j gamma n sin(phi) / lambda) / sqrt(M),
//! ```
//!
//! which gives `tr(R) = c^-3 N` exactly. Rank-deficient profiles (M < N)
//! mimic physically constrained arrays.

use crate::augment::augment;
use crate::{C64, CMat, Error, RMat, Result};

/// Square root and covariance of one BS-to-UT link.
#[derive(Debug, Clone)]
pub struct LinkCovariance {
    /// `sqrt_r`, the matrix applied to the white innovation vector.
    pub sqrt_r: CMat,
    /// `R = sqrt_r sqrt_r^H`.
    pub r: CMat,
}

impl LinkCovariance {
    pub fn from_sqrt(sqrt_r: CMat) -> Self {
        let r = &sqrt_r * sqrt_r.adjoint();
        LinkCovariance { sqrt_r, r }
    }

    /// Augmented covariance `aug(R)`.
    pub fn r_aug(&self) -> RMat {
        augment(&self.r)
    }
}

/// All receive covariances seen by one BS: links to the `K` UTs of each of
/// the `L` cells.
#[derive(Debug, Clone)]
pub struct CovarianceProfile {
    pub n_antennas: usize,
    pub n_cells: usize,
    pub n_uts: usize,
    links: Vec<LinkCovariance>,
}

impl CovarianceProfile {
    pub fn new(n_cells: usize, n_uts: usize, links: Vec<LinkCovariance>) -> Result<Self> {
        if links.len() != n_cells * n_uts || links.is_empty() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} links, got {}",
                n_cells * n_uts,
                links.len()
            )));
        }
        let n = links[0].r.nrows();
        if links.iter().any(|l| l.r.nrows() != n || l.r.ncols() != n) {
            return Err(Error::DimensionMismatch("inconsistent link dimensions".into()));
        }
        Ok(CovarianceProfile { n_antennas: n, n_cells, n_uts, links })
    }

    pub fn link(&self, cell: usize, ut: usize) -> &LinkCovariance {
        &self.links[cell * self.n_uts + ut]
    }

    /// Identity covariances on every link (i.i.d. Rayleigh), for tests and
    /// the single-cell closed-form comparisons.
    pub fn iid(n_antennas: usize, n_cells: usize, n_uts: usize) -> Self {
        let link = LinkCovariance::from_sqrt(CMat::identity(n_antennas, n_antennas));
        CovarianceProfile {
            n_antennas,
            n_cells,
            n_uts,
            links: vec![link; n_cells * n_uts],
        }
    }
}

/// Steering-vector Gram matrix `B B^H` shared by every link of a ULA.
fn ula_gram(n: usize, m: usize, spacing_over_lambda: f64) -> CMat {
    let mut b = CMat::zeros(n, m);
    let scale = 1.0 / (m as f64).sqrt();
    for col in 0..m {
        let phi = -std::f64::consts::FRAC_PI_2 + col as f64 * std::f64::consts::PI / m as f64;
        let phase_step = -std::f64::consts::TAU * spacing_over_lambda * phi.sin();
        for row in 0..n {
            let arg = phase_step * row as f64;
            b[(row, col)] = C64::new(arg.cos() * scale, arg.sin() * scale);
        }
    }
    &b * b.adjoint()
}

/// One ULA link: `sqrt_r = c^(-3/2) [B | 0]`.
pub fn ula_covariance(
    distance: f64,
    n_antennas: usize,
    n_directions: usize,
    spacing_over_lambda: f64,
) -> Result<LinkCovariance> {
    if distance <= 0.0 || !distance.is_finite() {
        return Err(Error::InvalidArgument(format!("distance must be positive, got {distance}")));
    }
    if n_directions == 0 || n_directions > n_antennas {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= M <= N, got M = {n_directions}, N = {n_antennas}"
        )));
    }
    let scale = distance.powf(-1.5);
    let m_cols = n_directions;
    let mut sqrt_r = CMat::zeros(n_antennas, n_antennas);
    let mut b = CMat::zeros(n_antennas, m_cols);
    let col_scale = 1.0 / (m_cols as f64).sqrt();
    for col in 0..m_cols {
        let phi = -std::f64::consts::FRAC_PI_2 + col as f64 * std::f64::consts::PI / m_cols as f64;
        let phase_step = -std::f64::consts::TAU * spacing_over_lambda * phi.sin();
        for row in 0..n_antennas {
            let arg = phase_step * row as f64;
            b[(row, col)] = C64::new(arg.cos(), arg.sin()) * col_scale;
        }
    }
    sqrt_r.view_mut((0, 0), (n_antennas, m_cols)).copy_from(&(b * C64::new(scale, 0.0)));
    Ok(LinkCovariance::from_sqrt(sqrt_r))
}

/// ULA profile for every link of a topology, as seen by one BS.
pub fn ula_profile(
    topology: &crate::topology::Topology,
    bs: usize,
    n_antennas: usize,
    n_directions: usize,
    spacing_over_lambda: f64,
) -> Result<CovarianceProfile> {
    if n_directions == 0 || n_directions > n_antennas {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= M <= N, got M = {n_directions}, N = {n_antennas}"
        )));
    }
    // One shared Gram matrix; links differ only by the path-loss scale.
    let gram = ula_gram(n_antennas, n_directions, spacing_over_lambda);
    let mut b_cols = CMat::zeros(n_antennas, n_antennas);
    {
        let scale = 1.0 / (n_directions as f64).sqrt();
        for col in 0..n_directions {
            let phi = -std::f64::consts::FRAC_PI_2 + col as f64 * std::f64::consts::PI / n_directions as f64;
            let phase_step = -std::f64::consts::TAU * spacing_over_lambda * phi.sin();
            for row in 0..n_antennas {
                let arg = phase_step * row as f64;
                b_cols[(row, col)] = C64::new(arg.cos() * scale, arg.sin() * scale);
            }
        }
    }
    let mut links = Vec::with_capacity(topology.n_cells * topology.n_uts);
    for l in 0..topology.n_cells {
        for k in 0..topology.n_uts {
            let c = topology.distance(bs, l, k);
            let loss = c.powf(-1.5);
            let sqrt_r = &b_cols * C64::new(loss, 0.0);
            let r = &gram * C64::new(loss * loss, 0.0);
            links.push(LinkCovariance { sqrt_r, r });
        }
    }
    CovarianceProfile::new(topology.n_cells, topology.n_uts, links)
}

/// Default number of resolvable directions: `N/2`, at least one.
pub fn default_directions(n_antennas: usize) -> usize {
    (n_antennas / 2).max(1)
}
