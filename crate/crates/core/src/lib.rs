//! Uplink multi-cell massive MIMO simulation with transceiver I/Q imbalance.
//!
//! The library models an uplink system of `L` cells, each with one BS of `N`
//! antennas and `K` single-antenna user terminals, where both the BS RF
//! branches and the UT transmitters suffer amplitude/phase I/Q mismatch.
//! It provides two receive chains end to end:
//!
//! * the conventional IQI-unaware MMSE chain (`IQU`): complex-valued MMSE
//!   channel estimation under pilot contamination followed by MMSE detection;
//! * the IQI-aware widely-linear chain (`IQA`): estimation and detection on
//!   the augmented real-valued signal model, which processes real and
//!   imaginary parts separately and thereby absorbs the conjugate coupling
//!   that IQI introduces.
//!
//! Besides trial-by-trial Monte-Carlo evaluation of ergodic sum rates, the
//! crate implements the matching large-system (deterministic-equivalent)
//! SINR predictions for both chains, built on a reusable fixed-point
//! resolvent solver, plus the closed-form single-cell limits used for
//! sanity checks and quick design studies.

pub mod asymptotics;
pub mod augment;
pub mod channel;
pub mod covariance;
pub mod detection;
pub mod error;
pub mod estimation;
pub mod iqi;
pub mod linalg;
pub mod montecarlo;
pub mod report;
pub mod rmt;
pub mod rng;
pub mod scenario;
pub mod topology;
pub mod training;

pub use error::{Error, Result};

/// Complex scalar used throughout (re-exported from nalgebra to keep one
/// `num-complex` version in play).
pub type C64 = nalgebra::Complex<f64>;

/// Dense complex matrix.
pub type CMat = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVec = nalgebra::DVector<C64>;
/// Dense real matrix.
pub type RMat = nalgebra::DMatrix<f64>;
/// Dense real column vector.
pub type RVec = nalgebra::DVector<f64>;
