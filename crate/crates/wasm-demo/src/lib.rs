//! Browser bindings for interactive sum-rate exploration.
//!
//! Three operations are exposed to the page, all JSON in / JSON out:
//!
//! * [`asymptotic_sweep`] — deterministic-equivalent sum-rate curves over
//!   an antenna-count list for the four receivers (fast enough to rerun on
//!   every slider change);
//! * [`monte_carlo_point`] — trial-by-trial simulated rates at one point,
//!   for overlaying dots on the curves;
//! * [`closed_form_losses`] — the single-cell closed-form SINRs and loss
//!   ratios as functions of the mismatch magnitudes.

use iqmimo::asymptotics::{closed_form_sinr, iqu_asymptotic_sinr, iqa_asymptotic_sinr, ClosedForm, CsiModel};
use iqmimo::iqi::{IqiMode, MismatchDraw};
use iqmimo::montecarlo::trial_rates;
use iqmimo::scenario::{preset, ReceiverKind, SweepVariable};
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

#[derive(Deserialize)]
struct SweepRequest {
    n_values: Vec<usize>,
    n_uts: usize,
    n_cells: usize,
    rho_ul_db: f64,
    rho_tr_db: f64,
    eps: f64,
    theta_deg: f64,
    contamination: bool,
    #[serde(default)]
    seed: Option<u64>,
}

#[derive(Serialize)]
struct Curve {
    receiver: String,
    rates: Vec<f64>,
}

#[derive(Serialize)]
struct SweepResponse {
    n_values: Vec<usize>,
    curves: Vec<Curve>,
}

fn base_config(req: &SweepRequest) -> iqmimo::Result<iqmimo::scenario::ScenarioConfig> {
    let mut cfg = preset("fig1")?;
    cfg.n_uts = req.n_uts.max(1);
    cfg.n_cells = if req.n_cells >= 7 { 7 } else { 1 };
    cfg.rho_ul_db = req.rho_ul_db;
    cfg.rho_tr_db = req.rho_tr_db;
    cfg.eps_draw = MismatchDraw::Fixed { value: req.eps };
    cfg.theta_deg_draw = MismatchDraw::Fixed { value: req.theta_deg };
    cfg.contamination = req.contamination;
    cfg.sweep = SweepVariable::NAntennas;
    cfg.sweep_values = req.n_values.iter().map(|&n| n as f64).collect();
    if let Some(s) = req.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn sweep_impl(json: &str) -> Result<String, String> {
    let req: SweepRequest = serde_json::from_str(json).map_err(|e| e.to_string())?;
    if req.n_values.is_empty() || req.n_values.iter().any(|&n| n == 0 || n > 256) {
        return Err("antenna counts must lie in 1..=256".into());
    }
    let cfg = base_config(&req).map_err(|e| e.to_string())?;
    let mut curves: Vec<Curve> = ReceiverKind::ALL
        .iter()
        .map(|r| Curve { receiver: r.name().to_string(), rates: Vec::new() })
        .collect();
    for point in 0..cfg.sweep_values.len() {
        let inst =
            iqmimo::scenario::instantiate(&cfg, point, IqiMode::Both).map_err(|e| e.to_string())?;
        for (slot, &receiver) in ReceiverKind::ALL.iter().enumerate() {
            let (bs, uts) = inst.world_for(receiver);
            let csi = match receiver {
                ReceiverKind::MmsePerfectCsi => CsiModel::Perfect,
                _ => CsiModel::Estimated { rho_tr: inst.rho_tr, contaminated: inst.contamination },
            };
            let asy = match receiver {
                ReceiverKind::IqaWlmmse => iqa_asymptotic_sinr(&inst.profile, bs, uts, inst.rho_ul, csi),
                _ => iqu_asymptotic_sinr(&inst.profile, bs, uts, inst.rho_ul, csi),
            }
            .map_err(|e| e.to_string())?;
            curves[slot].rates.push(asy.sum_rate0());
        }
    }
    serde_json::to_string(&SweepResponse { n_values: req.n_values, curves })
        .map_err(|e| e.to_string())
}

/// Deterministic-equivalent sum rates over an antenna-count sweep.
#[wasm_bindgen]
pub fn asymptotic_sweep(json: &str) -> Result<String, JsValue> {
    sweep_impl(json).map_err(|e| JsValue::from_str(&e))
}

#[derive(Deserialize)]
struct PointRequest {
    n_antennas: usize,
    trials: usize,
    receiver: String,
    #[serde(flatten)]
    sweep: SweepRequest,
}

#[derive(Serialize)]
struct PointResponse {
    receiver: String,
    mean: f64,
    stderr: f64,
    rates: Vec<f64>,
}

fn point_impl(json: &str) -> Result<String, String> {
    let req: PointRequest = serde_json::from_str(json).map_err(|e| e.to_string())?;
    if req.n_antennas == 0 || req.n_antennas > 128 {
        return Err("antenna count must lie in 1..=128".into());
    }
    let mut cfg = base_config(&req.sweep).map_err(|e| e.to_string())?;
    cfg.trials = req.trials.clamp(1, 200);
    cfg.sweep_values = vec![req.n_antennas as f64];
    cfg.no_asymptotics = true;
    let receiver = ReceiverKind::parse(&req.receiver).map_err(|e| e.to_string())?;
    let rates = trial_rates(&cfg, 0, IqiMode::Both, receiver).map_err(|e| e.to_string())?;
    let mean = rates.iter().sum::<f64>() / rates.len() as f64;
    let var = if rates.len() > 1 {
        rates.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (rates.len() - 1) as f64
    } else {
        0.0
    };
    let stderr = (var / rates.len() as f64).sqrt();
    serde_json::to_string(&PointResponse { receiver: receiver.name().into(), mean, stderr, rates })
        .map_err(|e| e.to_string())
}

/// Monte-Carlo rates at a single point (for overlay markers).
#[wasm_bindgen]
pub fn monte_carlo_point(json: &str) -> Result<String, JsValue> {
    point_impl(json).map_err(|e| JsValue::from_str(&e))
}

#[derive(Deserialize)]
struct LossRequest {
    n_antennas: usize,
    n_uts: usize,
    rho_ul_db: f64,
    /// Sweep variable values (mismatch amplitude or phase degrees).
    values: Vec<f64>,
    /// "eps" or "theta_deg".
    variable: String,
    /// The fixed other mismatch.
    fixed: f64,
}

#[derive(Serialize)]
struct LossResponse {
    values: Vec<f64>,
    iqu_bs_sinr_db: Vec<f64>,
    iqa_bs_sinr_db: Vec<f64>,
    iqu_ut_sinr_db: Vec<f64>,
    iqa_ut_sinr_db: Vec<f64>,
    no_iqi_sinr_db: f64,
}

fn losses_impl(json: &str) -> Result<String, String> {
    let req: LossRequest = serde_json::from_str(json).map_err(|e| e.to_string())?;
    let rho = 10f64.powf(req.rho_ul_db / 10.0);
    let (n, k) = (req.n_antennas.max(1), req.n_uts.max(1));
    let mut out = LossResponse {
        values: req.values.clone(),
        iqu_bs_sinr_db: Vec::new(),
        iqa_bs_sinr_db: Vec::new(),
        iqu_ut_sinr_db: Vec::new(),
        iqa_ut_sinr_db: Vec::new(),
        no_iqi_sinr_db: 10.0
            * closed_form_sinr(&ClosedForm::NoIqi { n, rho_ul: rho })
                .map_err(|e| e.to_string())?
                .log10(),
    };
    for &v in &req.values {
        let (eps, theta) = match req.variable.as_str() {
            "eps" => (v, req.fixed.to_radians()),
            "theta_deg" => (req.fixed, v.to_radians()),
            other => return Err(format!("unknown variable `{other}`")),
        };
        let db = |x: f64| 10.0 * x.max(1e-12).log10();
        out.iqu_bs_sinr_db.push(db(closed_form_sinr(&ClosedForm::IquBsIdentical {
            n,
            k,
            rho_ul: rho,
            eps,
            theta,
        })
        .map_err(|e| e.to_string())?));
        out.iqa_bs_sinr_db.push(db(closed_form_sinr(&ClosedForm::IqaBsIdentical {
            n,
            rho_ul: rho,
            eps,
            theta,
        })
        .map_err(|e| e.to_string())?));
        out.iqu_ut_sinr_db.push(db(closed_form_sinr(&ClosedForm::IquUt {
            n,
            rho_ul: rho,
            eps,
            theta,
        })
        .map_err(|e| e.to_string())?));
        out.iqa_ut_sinr_db.push(db(closed_form_sinr(&ClosedForm::IqaUt {
            n,
            rho_ul: rho,
            eps,
            theta,
        })
        .map_err(|e| e.to_string())?));
    }
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

/// Closed-form single-cell SINRs versus mismatch magnitude.
#[wasm_bindgen]
pub fn closed_form_losses(json: &str) -> Result<String, JsValue> {
    losses_impl(json).map_err(|e| JsValue::from_str(&e))
}
