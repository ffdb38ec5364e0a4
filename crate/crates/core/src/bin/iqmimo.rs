//! Command-line front end: figure presets, sweep overrides, CSV results,
//! and a reproducible run manifest.

use clap::Parser;
use iqmimo::montecarlo::run_sweep;
use iqmimo::report::csv_lines;
use iqmimo::scenario::{preset, ReceiverKind, ScenarioConfig, SweepVariable};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "iqmimo",
    about = "Uplink multi-cell massive MIMO sum-rate simulator with I/Q imbalance",
    long_about = "Runs Monte-Carlo sweeps of the IQA-WLMMSE and IQU-MMSE receive chains \
                  alongside their deterministic-equivalent predictions, and writes a CSV \
                  results table plus a reproducible run manifest."
)]
struct Args {
    /// Figure preset: fig1, fig2, fig3, or fig4.
    #[arg(long)]
    preset: Option<String>,

    /// Configuration file (TOML, same schema as the manifest's `[config]`).
    #[arg(long)]
    config: Option<PathBuf>,

    /// Override the trial count.
    #[arg(long)]
    trials: Option<usize>,

    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Output CSV path.
    #[arg(long, default_value = "results.csv")]
    out: PathBuf,

    /// Comma-separated receivers (iqa_wlmmse, iqu_mmse, mmse_no_iqi,
    /// mmse_perfect_csi).
    #[arg(long)]
    receivers: Option<String>,

    /// Sweep the antenna count over these values.
    #[arg(long, value_delimiter = ',')]
    n_list: Option<Vec<f64>>,

    /// Sweep the amplitude mismatch over these values.
    #[arg(long, value_delimiter = ',')]
    eps_list: Option<Vec<f64>>,

    /// Sweep the phase mismatch (degrees) over these values.
    #[arg(long, value_delimiter = ',')]
    theta_list: Option<Vec<f64>>,

    /// Skip the deterministic-equivalent computations.
    #[arg(long)]
    no_asymptotics: bool,

    /// Worker threads for the trial loop (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    seed: u64,
    wall_clock_seconds: f64,
    rows: usize,
    config: &'a ScenarioConfig,
}

fn load_config(args: &Args) -> Result<ScenarioConfig, String> {
    let mut config = match (&args.preset, &args.config) {
        (Some(name), None) => preset(name).map_err(|e| e.to_string())?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            parse_config_file(&text)?
        }
        (Some(_), Some(_)) => return Err("use either --preset or --config, not both".into()),
        (None, None) => return Err("one of --preset or --config is required".into()),
    };
    if let Some(t) = args.trials {
        config.trials = t;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(list) = &args.receivers {
        let mut receivers = Vec::new();
        for part in list.split(',') {
            receivers.push(ReceiverKind::parse(part.trim()).map_err(|e| e.to_string())?);
        }
        config.receivers = receivers;
    }
    let sweeps_given =
        [args.n_list.is_some(), args.eps_list.is_some(), args.theta_list.is_some()];
    if sweeps_given.iter().filter(|&&x| x).count() > 1 {
        return Err("give at most one of --n-list, --eps-list, --theta-list".into());
    }
    if let Some(values) = &args.n_list {
        config.sweep = SweepVariable::NAntennas;
        config.sweep_values = values.clone();
    }
    if let Some(values) = &args.eps_list {
        config.sweep = SweepVariable::Eps;
        config.sweep_values = values.clone();
    }
    if let Some(values) = &args.theta_list {
        config.sweep = SweepVariable::ThetaDeg;
        config.sweep_values = values.clone();
    }
    if args.no_asymptotics {
        config.no_asymptotics = true;
    }
    config.validate().map_err(|e| e.to_string())?;
    Ok(config)
}

/// Accept either a bare config or a manifest containing `[config]`.
fn parse_config_file(text: &str) -> Result<ScenarioConfig, String> {
    #[derive(serde::Deserialize)]
    struct ManifestIn {
        config: ScenarioConfig,
    }
    if let Ok(m) = toml::from_str::<ManifestIn>(text) {
        return Ok(m.config);
    }
    toml::from_str::<ScenarioConfig>(text).map_err(|e| format!("bad config: {e}"))
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_stem().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(".manifest.toml");
    out.with_file_name(name)
}

fn run(args: &Args) -> Result<(), (u8, String)> {
    let config = load_config(args).map_err(|e| (EXIT_USAGE, e))?;

    #[cfg(feature = "parallel")]
    if args.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(args.threads)
            .build_global()
            .map_err(|e| (EXIT_USAGE, format!("thread pool: {e}")))?;
    }

    let started = Instant::now();
    let rows = run_sweep(&config).map_err(|e| (EXIT_NUMERICAL, e.to_string()))?;
    let elapsed = started.elapsed().as_secs_f64();

    let csv = csv_lines(&rows).join("\n") + "\n";
    std::fs::write(&args.out, csv)
        .map_err(|e| (EXIT_NUMERICAL, format!("cannot write {}: {e}", args.out.display())))?;

    let manifest = Manifest {
        tool: "iqmimo",
        version: env!("CARGO_PKG_VERSION"),
        seed: config.seed,
        wall_clock_seconds: elapsed,
        rows: rows.len(),
        config: &config,
    };
    let mpath = manifest_path(&args.out);
    let mtext = toml::to_string_pretty(&manifest)
        .map_err(|e| (EXIT_NUMERICAL, format!("manifest: {e}")))?;
    std::fs::write(&mpath, mtext)
        .map_err(|e| (EXIT_NUMERICAL, format!("cannot write {}: {e}", mpath.display())))?;

    // Summary table.
    println!(
        "{:<10} {:<9} {:>10} {:>16} {:>12} {:>16}",
        "scenario", "mode", "sweep", "receiver", "mc_rate", "asymptotic"
    );
    for r in &rows {
        println!(
            "{:<10} {:<9} {:>10.4} {:>16} {:>12.4} {:>16}",
            r.scenario,
            r.iqi_mode.to_string(),
            r.sweep_value,
            r.receiver.name(),
            r.mc_sum_rate,
            r.asy_sum_rate.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into()),
        );
    }
    println!(
        "\nwrote {} rows to {} (manifest: {}) in {elapsed:.1}s",
        rows.len(),
        args.out.display(),
        mpath.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
