//! Result tables and run manifests.
//!
//! Results go to CSV with one row per (sweep value, IQI mode, receiver),
//! numbers printed with nine significant digits so reruns are byte
//! comparable. The manifest captures the fully resolved configuration in
//! the same format the `--config` flag accepts, plus timing and solver
//! diagnostics, so a run can be reproduced from its outputs alone.

use crate::montecarlo::ResultRow;

/// Fixed CSV column order.
pub const CSV_HEADER: [&str; 15] = [
    "scenario",
    "receiver",
    "iqi_mode",
    "sweep_var",
    "sweep_value",
    "n_antennas",
    "n_uts",
    "n_cells",
    "rho_ul_db",
    "rho_tr_db",
    "trials",
    "mc_sum_rate",
    "mc_stderr",
    "asy_sum_rate",
    "seed",
];

/// Nine-significant-digit rendering used for every numeric column.
pub fn fmt_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    format!("{v:.8e}")
}

/// Render rows as CSV lines (header included).
pub fn csv_lines(rows: &[ResultRow]) -> Vec<String> {
    let mut out = Vec::with_capacity(rows.len() + 1);
    out.push(CSV_HEADER.join(","));
    for r in rows {
        out.push(
            [
                r.scenario.clone(),
                r.receiver.name().to_string(),
                r.iqi_mode.to_string(),
                r.sweep_var.to_string(),
                fmt_sig(r.sweep_value),
                r.n_antennas.to_string(),
                r.n_uts.to_string(),
                r.n_cells.to_string(),
                fmt_sig(r.rho_ul_db),
                fmt_sig(r.rho_tr_db),
                r.trials.to_string(),
                fmt_sig(r.mc_sum_rate),
                fmt_sig(r.mc_stderr),
                r.asy_sum_rate.map(fmt_sig).unwrap_or_default(),
                r.seed.to_string(),
            ]
            .join(","),
        );
    }
    out
}
