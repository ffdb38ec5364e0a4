//! Monte-Carlo experiment orchestration.
//!
//! A sweep point runs `trials` channel realizations for each requested
//! receiver. All random draws are addressed by `(seed, point, trial)` and
//! never by receiver, so compared receivers see identical channels, noise,
//! and hardware (common random numbers). Trials aggregate with compensated
//! summation in trial order, making results independent of scheduling.

use crate::asymptotics::{iqu_asymptotic_sinr, iqa_asymptotic_sinr, CsiModel};
use crate::channel::draw_channel;
use crate::detection::{
    iqa_filter, iqu_filter, perfect_csi_estimates, sinr_components_iqa, sinr_components_iqu,
};
use crate::estimation::{estimate_all, iqa_omega, iqu_omega};
use crate::iqi::IqiMode;
use crate::rng::{substream, Domain};
use crate::scenario::{instantiate, point_params, ReceiverKind, ScenarioConfig, ScenarioInstance};
use crate::training::{draw_training_noise, rx_training_augmented, rx_training_complex};
use crate::Result;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// One (sweep value, IQI mode, receiver) result.
#[derive(Debug, Clone)]
pub struct ResultRow {
    pub scenario: String,
    pub receiver: ReceiverKind,
    pub iqi_mode: IqiMode,
    pub sweep_var: &'static str,
    pub sweep_value: f64,
    pub n_antennas: usize,
    pub n_uts: usize,
    pub n_cells: usize,
    pub rho_ul_db: f64,
    pub rho_tr_db: f64,
    pub trials: usize,
    pub mc_sum_rate: f64,
    pub mc_stderr: f64,
    /// Deterministic-equivalent prediction, when requested.
    pub asy_sum_rate: Option<f64>,
    pub seed: u64,
    /// Set when `trials == 1` (no spread estimate possible).
    pub degenerate_stderr: bool,
}

/// Kahan-compensated sum, so aggregation order never shifts results.
fn compensated_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for &v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = compensated_sum(values) / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let sq: Vec<f64> = values.iter().map(|&v| (v - mean) * (v - mean)).collect();
    let var = compensated_sum(&sq) / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Simulated sum rate of one receiver on one trial's draws.
fn trial_sum_rate(
    inst: &ScenarioInstance,
    receiver: ReceiverKind,
    omegas: &PointOperators,
    seed: u64,
    point: u64,
    trial: u64,
) -> Result<f64> {
    let (bs, uts) = inst.world_for(receiver);
    let profile = &inst.profile;
    let n = profile.n_antennas;
    let k_uts = profile.n_uts;

    let mut ch_rng = substream(seed, Domain::Channel, point, trial);
    let channels = draw_channel(profile, &mut ch_rng);
    let mut tn_rng = substream(seed, Domain::TrainingNoise, point, trial);
    let w = draw_training_noise(&mut tn_rng, n, k_uts);

    let breakdown = match receiver {
        ReceiverKind::MmsePerfectCsi => {
            let est = perfect_csi_estimates(&channels);
            let u = iqu_filter(&est.g_hat, inst.rho_ul)?;
            sinr_components_iqu(&channels, &u, bs, uts, inst.rho_ul)
        }
        _ => {
            // Without pilot reuse the training phase hears only the serving
            // cell; the data phase still hears everyone.
            let training_channels = if inst.contamination {
                None
            } else {
                let mut only = channels.clone();
                only.zero_other_cells();
                Some(only)
            };
            let tch = training_channels.as_ref().unwrap_or(&channels);
            match receiver {
                ReceiverKind::IqaWlmmse => {
                    let ya = rx_training_augmented(tch, bs, uts, inst.rho_tr, Some(&w));
                    let y = rx_training_complex(tch, bs, uts, inst.rho_tr, Some(&w));
                    let est = estimate_all(
                        &y,
                        &ya,
                        omegas.iqu_for(receiver),
                        omegas.iqa_for(receiver),
                        inst.rho_tr,
                    );
                    let u_aug = iqa_filter(&est.g_aug_hat, inst.rho_ul)?;
                    sinr_components_iqa(&channels, &u_aug, bs, uts, inst.rho_ul)
                }
                _ => {
                    let y = rx_training_complex(tch, bs, uts, inst.rho_tr, Some(&w));
                    let mut g_hat = crate::CMat::zeros(n, k_uts);
                    let omega = omegas.iqu_for(receiver);
                    for k in 0..k_uts {
                        g_hat.set_column(
                            k,
                            &crate::estimation::iqu_estimate(
                                &y.column(k).into_owned(),
                                &omega[k],
                                inst.rho_tr,
                            ),
                        );
                    }
                    let u = iqu_filter(&g_hat, inst.rho_ul)?;
                    sinr_components_iqu(&channels, &u, bs, uts, inst.rho_ul)
                }
            }
        }
    };
    Ok(breakdown.sum_rate())
}

/// Estimator operators shared by all trials of a point (deterministic).
struct PointOperators {
    iqu_impaired: Vec<crate::CMat>,
    iqu_ideal: Vec<crate::CMat>,
    iqa_impaired: Vec<crate::RMat>,
}

impl PointOperators {
    fn build(inst: &ScenarioInstance) -> Result<Self> {
        Ok(PointOperators {
            iqu_impaired: iqu_omega(
                &inst.profile,
                &inst.bs,
                &inst.uts,
                inst.rho_tr,
                inst.contamination,
            )?,
            iqu_ideal: iqu_omega(
                &inst.profile,
                &inst.bs_ideal,
                &inst.uts_ideal,
                inst.rho_tr,
                inst.contamination,
            )?,
            iqa_impaired: iqa_omega(
                &inst.profile,
                &inst.bs,
                &inst.uts,
                inst.rho_tr,
                inst.contamination,
            )?,
        })
    }

    fn iqu_for(&self, receiver: ReceiverKind) -> &Vec<crate::CMat> {
        if receiver.sees_iqi() {
            &self.iqu_impaired
        } else {
            &self.iqu_ideal
        }
    }

    fn iqa_for(&self, _receiver: ReceiverKind) -> &Vec<crate::RMat> {
        &self.iqa_impaired
    }
}

/// Deterministic-equivalent sum rate matching one receiver's chain.
fn asymptotic_for(inst: &ScenarioInstance, receiver: ReceiverKind) -> Result<f64> {
    let (bs, uts) = inst.world_for(receiver);
    let csi = match receiver {
        ReceiverKind::MmsePerfectCsi => CsiModel::Perfect,
        _ => CsiModel::Estimated { rho_tr: inst.rho_tr, contaminated: inst.contamination },
    };
    let asy = match receiver {
        ReceiverKind::IqaWlmmse => iqa_asymptotic_sinr(&inst.profile, bs, uts, inst.rho_ul, csi)?,
        _ => iqu_asymptotic_sinr(&inst.profile, bs, uts, inst.rho_ul, csi)?,
    };
    Ok(asy.sum_rate0())
}

/// Per-trial ergodic sum rates of one receiver at one sweep point: the raw
/// samples behind a [`ResultRow`], in trial order.
pub fn trial_rates(
    config: &ScenarioConfig,
    point: usize,
    mode: IqiMode,
    receiver: ReceiverKind,
) -> Result<Vec<f64>> {
    let inst = instantiate(config, point, mode)?;
    let operators = PointOperators::build(&inst)?;
    let trials = config.trials;

    #[cfg(feature = "parallel")]
    let rates: Result<Vec<f64>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| trial_sum_rate(&inst, receiver, &operators, config.seed, point as u64, t))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let rates: Result<Vec<f64>> = (0..trials as u64)
        .map(|t| trial_sum_rate(&inst, receiver, &operators, config.seed, point as u64, t))
        .collect();
    rates
}

/// Run one (point, mode, receiver) cell of a sweep.
pub fn run_point(
    config: &ScenarioConfig,
    point: usize,
    mode: IqiMode,
    receiver: ReceiverKind,
) -> Result<ResultRow> {
    let rates = trial_rates(config, point, mode, receiver)?;
    let inst = instantiate(config, point, mode)?;
    let trials = config.trials;
    let (mean, stderr) = mean_and_stderr(&rates);
    let asy = if config.no_asymptotics { None } else { Some(asymptotic_for(&inst, receiver)?) };
    let params = point_params(config, point);
    Ok(ResultRow {
        scenario: config.scenario.clone(),
        receiver,
        iqi_mode: mode,
        sweep_var: config.sweep.name(),
        sweep_value: config.sweep_values[point],
        n_antennas: params.n_antennas,
        n_uts: config.n_uts,
        n_cells: config.n_cells,
        rho_ul_db: config.rho_ul_db,
        rho_tr_db: config.rho_tr_db,
        trials,
        mc_sum_rate: mean,
        mc_stderr: stderr,
        asy_sum_rate: asy,
        seed: config.seed,
        degenerate_stderr: trials < 2,
    })
}

/// Run the whole sweep: one row per (value, mode, receiver), sorted by
/// (sweep value, mode, receiver name).
pub fn run_sweep(config: &ScenarioConfig) -> Result<Vec<ResultRow>> {
    config.validate()?;
    let mut rows = Vec::new();
    for point in 0..config.sweep_values.len() {
        for mode in config.modes() {
            for &receiver in &config.receivers {
                rows.push(run_point(config, point, mode, receiver)?);
            }
        }
    }
    rows.sort_by(|a, b| {
        a.sweep_value
            .partial_cmp(&b.sweep_value)
            .unwrap()
            .then_with(|| a.iqi_mode.to_string().cmp(&b.iqi_mode.to_string()))
            .then_with(|| a.receiver.name().cmp(b.receiver.name()))
    });
    Ok(rows)
}
