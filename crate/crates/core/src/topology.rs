//! Cell geometry: hexagonal layout with ring-placed user terminals.
//!
//! The layout is one center cell plus, for `L = 7`, its six hexagonal
//! neighbors with unit cell radius, so neighbor BSs sit at distance
//! `sqrt(3)` from the center. Each cell serves `K` UTs placed uniformly
//! on a circle of radius `ut_ring_radius` around its own BS.

use crate::rng::{substream, Domain};
use crate::{Error, Result};
use rand::Rng;

/// Distances between every BS and every UT.
#[derive(Debug, Clone)]
pub struct Topology {
    pub n_cells: usize,
    pub n_uts: usize,
    pub cell_radius: f64,
    pub ut_ring_radius: f64,
    /// BS positions, one per cell.
    pub bs_xy: Vec<(f64, f64)>,
    /// UT positions indexed `[cell][ut]`.
    pub ut_xy: Vec<Vec<(f64, f64)>>,
    /// `distance[i][l][k]`: BS `i` to the `k`th UT of cell `l`.
    distance: Vec<Vec<Vec<f64>>>,
}

impl Topology {
    pub fn distance(&self, bs: usize, cell: usize, ut: usize) -> f64 {
        self.distance[bs][cell][ut]
    }
}

/// Build the `L in {1, 7}` hexagonal layout with seeded UT placement.
pub fn hex_topology(n_cells: usize, n_uts: usize, seed: u64) -> Result<Topology> {
    if n_cells != 1 && n_cells != 7 {
        return Err(Error::InvalidArgument(format!(
            "hex layout supports 1 or 7 cells, got {n_cells}"
        )));
    }
    if n_uts == 0 {
        return Err(Error::InvalidArgument("need at least one UT per cell".into()));
    }
    let cell_radius = 1.0;
    let ut_ring_radius = 2.0 / 3.0;

    let mut bs_xy = vec![(0.0, 0.0)];
    if n_cells == 7 {
        let spacing = 3.0f64.sqrt() * cell_radius;
        for m in 0..6 {
            let ang = std::f64::consts::FRAC_PI_6 + m as f64 * std::f64::consts::FRAC_PI_3;
            bs_xy.push((spacing * ang.cos(), spacing * ang.sin()));
        }
    }

    let mut rng = substream(seed, Domain::Topology, 0, 0);
    let mut ut_xy = Vec::with_capacity(n_cells);
    for l in 0..n_cells {
        let (cx, cy) = bs_xy[l];
        let uts: Vec<(f64, f64)> = (0..n_uts)
            .map(|_| {
                let ang: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                (cx + ut_ring_radius * ang.cos(), cy + ut_ring_radius * ang.sin())
            })
            .collect();
        ut_xy.push(uts);
    }

    let distance: Vec<Vec<Vec<f64>>> = (0..n_cells)
        .map(|i| {
            (0..n_cells)
                .map(|l| {
                    (0..n_uts)
                        .map(|k| {
                            if i == l {
                                // UTs sit exactly on the serving ring.
                                ut_ring_radius
                            } else {
                                let (bx, by) = bs_xy[i];
                                let (ux, uy) = ut_xy[l][k];
                                ((bx - ux).powi(2) + (by - uy).powi(2)).sqrt()
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    Ok(Topology { n_cells, n_uts, cell_radius, ut_ring_radius, bs_xy, ut_xy, distance })
}
