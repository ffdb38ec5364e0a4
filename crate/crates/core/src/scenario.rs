//! Scenario configuration, figure presets, and per-point instantiation.
//!
//! A [`ScenarioConfig`] is the full, serializable description of an
//! experiment point or sweep; [`ScenarioInstance`] is the materialized
//! world for one sweep point: topology, covariances, and the mismatch
//! draws shared by every receiver under comparison.

use crate::covariance::{default_directions, ula_profile, CovarianceProfile};
use crate::iqi::{build_bs_iqi, build_ut_iqi, ideal_bs, BsIqi, IqiMode, MismatchDraw, UtIqi};
use crate::rng::{substream, Domain};
use crate::topology::hex_topology;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Receive chains that can be evaluated at a sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReceiverKind {
    /// Widely-linear MMSE on the augmented model, IQI as configured.
    IqaWlmmse,
    /// Conventional MMSE on the complex model, IQI as configured.
    IquMmse,
    /// Conventional MMSE in an ideal system without IQI (estimation errors
    /// and contamination still apply).
    MmseNoIqi,
    /// Conventional MMSE with perfect CSI in an ideal system.
    MmsePerfectCsi,
}

impl ReceiverKind {
    pub const ALL: [ReceiverKind; 4] = [
        ReceiverKind::IqaWlmmse,
        ReceiverKind::IquMmse,
        ReceiverKind::MmseNoIqi,
        ReceiverKind::MmsePerfectCsi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReceiverKind::IqaWlmmse => "iqa_wlmmse",
            ReceiverKind::IquMmse => "iqu_mmse",
            ReceiverKind::MmseNoIqi => "mmse_no_iqi",
            ReceiverKind::MmsePerfectCsi => "mmse_perfect_csi",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "iqa_wlmmse" | "iqa" => Ok(ReceiverKind::IqaWlmmse),
            "iqu_mmse" | "iqu" => Ok(ReceiverKind::IquMmse),
            "mmse_no_iqi" | "no_iqi" => Ok(ReceiverKind::MmseNoIqi),
            "mmse_perfect_csi" | "perfect_csi" => Ok(ReceiverKind::MmsePerfectCsi),
            other => Err(Error::Config(format!("unknown receiver `{other}`"))),
        }
    }

    /// Receivers that ignore the configured impairments live in an ideal
    /// (zero-IQI) world.
    pub fn sees_iqi(self) -> bool {
        matches!(self, ReceiverKind::IqaWlmmse | ReceiverKind::IquMmse)
    }
}

impl std::fmt::Display for ReceiverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// The quantity a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    /// Number of BS antennas.
    NAntennas,
    /// Amplitude mismatch applied everywhere (fixed value per point).
    Eps,
    /// Phase mismatch in degrees applied everywhere (fixed value per point).
    ThetaDeg,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::NAntennas => "n_antennas",
            SweepVariable::Eps => "eps",
            SweepVariable::ThetaDeg => "theta_deg",
        }
    }
}

/// Full experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Preset label, for provenance only.
    pub scenario: String,
    pub n_antennas: usize,
    pub n_uts: usize,
    pub n_cells: usize,
    pub rho_ul_db: f64,
    pub rho_tr_db: f64,
    pub iqi_mode: IqiMode,
    /// IQI modes to compare side by side (defaults to `[iqi_mode]`).
    #[serde(default)]
    pub iqi_mode_list: Vec<IqiMode>,
    pub eps_draw: MismatchDraw,
    /// Phase mismatch draw, in degrees.
    pub theta_deg_draw: MismatchDraw,
    pub contamination: bool,
    pub trials: usize,
    pub seed: u64,
    /// Sweep axis and values.
    pub sweep: SweepVariable,
    pub sweep_values: Vec<f64>,
    pub receivers: Vec<ReceiverKind>,
    /// Resolvable directions of the ULA model (defaults to `N/2`).
    pub n_directions: Option<usize>,
    pub spacing_over_lambda: f64,
    /// Redraw mismatches at every sweep point instead of sharing one draw
    /// stream across the sweep.
    #[serde(default)]
    pub redraw_iqi_per_point: bool,
    /// Skip the deterministic-equivalent predictions.
    #[serde(default)]
    pub no_asymptotics: bool,
}

impl ScenarioConfig {
    pub fn rho_ul(&self) -> f64 {
        10f64.powf(self.rho_ul_db / 10.0)
    }

    pub fn rho_tr(&self) -> f64 {
        10f64.powf(self.rho_tr_db / 10.0)
    }

    pub fn modes(&self) -> Vec<IqiMode> {
        if self.iqi_mode_list.is_empty() {
            vec![self.iqi_mode]
        } else {
            self.iqi_mode_list.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_antennas == 0 || self.n_uts == 0 {
            return Err(Error::Config("antenna and UT counts must be positive".into()));
        }
        if self.n_cells != 1 && self.n_cells != 7 {
            return Err(Error::Config("cell count must be 1 or 7".into()));
        }
        if !self.rho_ul_db.is_finite() || !self.rho_tr_db.is_finite() {
            return Err(Error::Config("SNRs must be finite".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("need at least one trial".into()));
        }
        if self.sweep_values.is_empty() {
            return Err(Error::Config("sweep needs at least one value".into()));
        }
        if self.receivers.is_empty() {
            return Err(Error::Config("need at least one receiver".into()));
        }
        self.eps_draw.validate()?;
        self.theta_deg_draw.validate()?;
        if let Some(m) = self.n_directions {
            if m == 0 {
                return Err(Error::Config("n_directions must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Named figure presets at desk scale.
pub fn preset(name: &str) -> Result<ScenarioConfig> {
    let base = ScenarioConfig {
        scenario: name.to_string(),
        n_antennas: 100,
        n_uts: 10,
        n_cells: 7,
        rho_ul_db: 15.0,
        rho_tr_db: 10.0,
        iqi_mode: IqiMode::Both,
        iqi_mode_list: vec![],
        eps_draw: MismatchDraw::Uniform { lo: 0.15, hi: 0.2 },
        theta_deg_draw: MismatchDraw::Uniform { lo: 1.0, hi: 2.0 },
        contamination: true,
        trials: 100,
        seed: 1,
        sweep: SweepVariable::NAntennas,
        sweep_values: vec![],
        receivers: vec![
            ReceiverKind::IqaWlmmse,
            ReceiverKind::IquMmse,
            ReceiverKind::MmseNoIqi,
            ReceiverKind::MmsePerfectCsi,
        ],
        n_directions: None,
        spacing_over_lambda: 0.5,
        redraw_iqi_per_point: false,
        no_asymptotics: false,
    };
    match name {
        "fig1" => {
            Ok(ScenarioConfig { sweep_values: vec![32.0, 48.0, 64.0, 80.0, 96.0, 128.0], ..base })
        }
        "fig2" => Ok(ScenarioConfig {
            contamination: false,
            iqi_mode_list: vec![IqiMode::BsOnly, IqiMode::UtOnly, IqiMode::Both],
            sweep_values: vec![32.0, 48.0, 64.0, 80.0, 96.0, 128.0],
            receivers: vec![ReceiverKind::IqaWlmmse, ReceiverKind::IquMmse, ReceiverKind::MmseNoIqi],
            ..base
        }),
        "fig3" => Ok(ScenarioConfig {
            sweep: SweepVariable::Eps,
            sweep_values: vec![0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3],
            theta_deg_draw: MismatchDraw::Fixed { value: 2.0 },
            eps_draw: MismatchDraw::Fixed { value: 0.0 },
            receivers: vec![ReceiverKind::IqaWlmmse, ReceiverKind::IquMmse, ReceiverKind::MmseNoIqi],
            ..base
        }),
        "fig4" => Ok(ScenarioConfig {
            sweep: SweepVariable::ThetaDeg,
            sweep_values: vec![0.0, 1.0, 2.0, 4.0, 6.0, 8.0, 10.0],
            eps_draw: MismatchDraw::Fixed { value: 0.02 },
            theta_deg_draw: MismatchDraw::Fixed { value: 0.0 },
            receivers: vec![ReceiverKind::IqaWlmmse, ReceiverKind::IquMmse, ReceiverKind::MmseNoIqi],
            ..base
        }),
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}

/// One sweep point resolved to concrete parameter values.
#[derive(Debug, Clone, Copy)]
pub struct PointParams {
    pub n_antennas: usize,
    pub eps_draw: MismatchDraw,
    pub theta_deg_draw: MismatchDraw,
}

/// Resolve the parameters of sweep point `idx`.
pub fn point_params(config: &ScenarioConfig, idx: usize) -> PointParams {
    let value = config.sweep_values[idx];
    match config.sweep {
        SweepVariable::NAntennas => PointParams {
            n_antennas: value.round() as usize,
            eps_draw: config.eps_draw,
            theta_deg_draw: config.theta_deg_draw,
        },
        SweepVariable::Eps => PointParams {
            n_antennas: config.n_antennas,
            eps_draw: MismatchDraw::Fixed { value },
            theta_deg_draw: config.theta_deg_draw,
        },
        SweepVariable::ThetaDeg => PointParams {
            n_antennas: config.n_antennas,
            eps_draw: config.eps_draw,
            theta_deg_draw: MismatchDraw::Fixed { value },
        },
    }
}

/// Materialized world for one sweep point and one IQI mode: everything the
/// trial loop and the asymptotics share.
pub struct ScenarioInstance {
    pub profile: CovarianceProfile,
    pub bs: BsIqi,
    pub uts: Vec<Vec<UtIqi>>,
    /// Zero-IQI twins for receivers that live in an ideal world.
    pub bs_ideal: BsIqi,
    pub uts_ideal: Vec<Vec<UtIqi>>,
    pub rho_ul: f64,
    pub rho_tr: f64,
    pub contamination: bool,
}

/// Build the world for sweep point `idx` under `mode`.
///
/// Topology is drawn once per seed (UT angles fixed across the sweep for
/// comparability); mismatch draws come from a stream keyed by the seed
/// alone, so an antenna-count sweep reuses the same per-branch values as a
/// prefix, and every receiver at the point sees identical hardware.
pub fn instantiate(config: &ScenarioConfig, idx: usize, mode: IqiMode) -> Result<ScenarioInstance> {
    config.validate()?;
    let params = point_params(config, idx);
    let n = params.n_antennas;
    let k_uts = config.n_uts;
    let cells = config.n_cells;

    let topo = hex_topology(cells, k_uts, config.seed)?;
    let m = config.n_directions.unwrap_or_else(|| default_directions(n));
    let profile = ula_profile(&topo, 0, n, m.min(n), config.spacing_over_lambda)?;

    let point_key = if config.redraw_iqi_per_point { idx as u64 } else { 0 };
    let mut rng = substream(config.seed, Domain::Iqi, point_key, 0);

    // BS branches first, then UTs cell by cell, so the draw order is a
    // stable prefix across antenna-count sweeps.
    let mut bs_eps = Vec::with_capacity(n);
    let mut bs_theta = Vec::with_capacity(n);
    for _ in 0..n {
        let e = params.eps_draw.sample(&mut rng);
        let t = params.theta_deg_draw.sample(&mut rng).to_radians();
        bs_eps.push(e);
        bs_theta.push(t);
    }
    let mut uts = Vec::with_capacity(cells);
    for _ in 0..cells {
        let mut row = Vec::with_capacity(k_uts);
        for _ in 0..k_uts {
            let e = params.eps_draw.sample(&mut rng);
            let t = params.theta_deg_draw.sample(&mut rng).to_radians();
            row.push(build_ut_iqi(e, t)?);
        }
        uts.push(row);
    }

    let bs = if mode.bs_impaired() { build_bs_iqi(&bs_eps, &bs_theta)? } else { ideal_bs(n) };
    if !mode.ut_impaired() {
        for row in uts.iter_mut() {
            for u in row.iter_mut() {
                *u = build_ut_iqi(0.0, 0.0)?;
            }
        }
    }

    let uts_ideal = vec![vec![build_ut_iqi(0.0, 0.0)?; k_uts]; cells];
    Ok(ScenarioInstance {
        profile,
        bs,
        uts,
        bs_ideal: ideal_bs(n),
        uts_ideal,
        rho_ul: config.rho_ul(),
        rho_tr: config.rho_tr(),
        contamination: config.contamination,
    })
}

impl ScenarioInstance {
    /// The (BS, UT) impairments a given receiver's world carries.
    pub fn world_for(&self, receiver: ReceiverKind) -> (&BsIqi, &Vec<Vec<UtIqi>>) {
        if receiver.sees_iqi() {
            (&self.bs, &self.uts)
        } else {
            (&self.bs_ideal, &self.uts_ideal)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_pin_the_figure_parameters() {
        let f1 = preset("fig1").unwrap();
        assert_eq!(f1.rho_ul_db, 15.0);
        assert_eq!(f1.rho_tr_db, 10.0);
        assert!(f1.contamination);
        assert_eq!(f1.n_uts, 10);
        assert_eq!(f1.eps_draw, MismatchDraw::Uniform { lo: 0.15, hi: 0.2 });

        let f2 = preset("fig2").unwrap();
        assert!(!f2.contamination);
        assert_eq!(f2.modes(), vec![IqiMode::BsOnly, IqiMode::UtOnly, IqiMode::Both]);

        let f3 = preset("fig3").unwrap();
        assert_eq!(f3.sweep, SweepVariable::Eps);
        assert_eq!(f3.theta_deg_draw, MismatchDraw::Fixed { value: 2.0 });
        assert_eq!(f3.n_antennas, 100);

        let f4 = preset("fig4").unwrap();
        assert_eq!(f4.sweep, SweepVariable::ThetaDeg);
        assert_eq!(f4.eps_draw, MismatchDraw::Fixed { value: 0.02 });

        assert!(preset("bogus").is_err());
    }

    #[test]
    fn instantiation_is_deterministic() {
        let cfg = preset("fig1").unwrap();
        let a = instantiate(&cfg, 1, IqiMode::Both).unwrap();
        let b = instantiate(&cfg, 1, IqiMode::Both).unwrap();
        assert_eq!(a.bs.eps, b.bs.eps);
        assert_eq!(a.uts[3][2].eps, b.uts[3][2].eps);
    }

    #[test]
    fn modes_share_the_same_draws() {
        let cfg = preset("fig2").unwrap();
        let both = instantiate(&cfg, 0, IqiMode::Both).unwrap();
        let bs_only = instantiate(&cfg, 0, IqiMode::BsOnly).unwrap();
        let ut_only = instantiate(&cfg, 0, IqiMode::UtOnly).unwrap();
        assert_eq!(both.bs.eps, bs_only.bs.eps);
        assert_eq!(both.uts[2][1].eps, ut_only.uts[2][1].eps);
        assert!(ut_only.bs.is_ideal());
        assert_eq!(bs_only.uts[2][1].eps, 0.0);
    }

    #[test]
    fn antenna_sweep_draws_are_prefix_stable() {
        let cfg = preset("fig1").unwrap();
        let small = instantiate(&cfg, 0, IqiMode::Both).unwrap(); // N = 32
        let large = instantiate(&cfg, 5, IqiMode::Both).unwrap(); // N = 128
        for i in 0..small.bs.eps.len() {
            assert_eq!(small.bs.eps[i], large.bs.eps[i]);
        }
    }

    #[test]
    fn mismatch_values_stay_in_the_configured_range() {
        let cfg = preset("fig1").unwrap();
        let inst = instantiate(&cfg, 2, IqiMode::Both).unwrap();
        for &e in inst.bs.eps.iter() {
            assert!((0.15..=0.2).contains(&e));
        }
        for &t in inst.bs.theta.iter() {
            let deg = t.to_degrees();
            assert!((1.0..=2.0).contains(&deg));
        }
    }

    #[test]
    fn eps_sweep_fixes_the_value_everywhere() {
        let cfg = preset("fig3").unwrap();
        let inst = instantiate(&cfg, 4, IqiMode::Both).unwrap(); // eps = 0.2
        assert!(inst.bs.eps.iter().all(|&e| e == 0.2));
        assert!(inst.uts.iter().flatten().all(|u| u.eps == 0.2));
        let theta = inst.uts[0][0].theta.to_degrees();
        assert!((theta - 2.0).abs() < 1e-12);
    }

    #[test]
    fn validation_rejects_bad_configs() {
        let mut cfg = preset("fig1").unwrap();
        cfg.trials = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = preset("fig1").unwrap();
        cfg.n_cells = 3;
        assert!(cfg.validate().is_err());
    }
}
