use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hmsched::experiment::{
    self, calibrate, output, run_experiment, run_sweep, validate_power, write_run_reports,
    write_sweep, CalibrationResult, ExperimentConfig, SweepAxis, SweepOutcome,
};
use hmsched::{Error, GridSpacing, Policy};

#[derive(Parser)]
#[command(
    name = "hmsched",
    version,
    about = "Max-weight scheduling with hierarchical modulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One simulation per (policy, seed) at the configured load.
    Run(Common),
    /// Total arrival rate sweep (stability frontier per policy).
    SweepArrival(SweepArgs),
    /// Transmit power sweep at fixed load.
    SweepPower(SweepArgs),
    /// Compare the closed-form power split against a grid search.
    ValidatePower(ValidateArgs),
    /// Fit mean_gain so MWUM sits on the edge of stability at the anchor load.
    Calibrate(Common),
}

#[derive(Args)]
struct Common {
    /// TOML experiment file; defaults are used when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Replaces the seed list with a single seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    horizon: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated: mwum, mwhm, mwdm, lmwdm.
    #[arg(long, value_delimiter = ',')]
    policy: Vec<Policy>,
    /// Field override, e.g. `--set phy.total_power_w=4`. Repeatable.
    #[arg(long = "set", value_name = "PATH=VALUE", value_parser = parse_override)]
    overrides: Vec<(String, String)>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Calibrate mean_gain before sweeping.
    #[arg(long)]
    calibrate: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Grid {
    Uniform,
    Geometric,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long, default_value_t = 10_000)]
    count: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1e-4)]
    tolerance: f64,
    #[arg(long, default_value_t = 10_000)]
    grid_points: usize,
    #[arg(long, value_enum, default_value_t = Grid::Geometric)]
    grid: Grid,
}

fn parse_override(s: &str) -> Result<(String, String), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected PATH=VALUE, got `{s}`"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

fn toml_string(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

enum Failure {
    Validation(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. } | Error::Parse { .. } | Error::Io { .. } => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Validation(other.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn load(common: &Common) -> Result<ExperimentConfig, Failure> {
    let mut ov = Vec::new();
    if let Some(s) = common.seed {
        ov.push(("seeds".into(), format!("[{s}]")));
    }
    if let Some(h) = common.horizon {
        ov.push(("horizon_slots".into(), h.to_string()));
    }
    if let Some(o) = &common.out {
        ov.push(("out_dir".into(), toml_string(&o.to_string_lossy())));
    }
    if !common.policy.is_empty() {
        let names: Vec<String> = common
            .policy
            .iter()
            .map(|p| toml_string(p.name()))
            .collect();
        ov.push(("policies".into(), format!("[{}]", names.join(", "))));
    }
    ov.extend(common.overrides.iter().cloned());
    let cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path, &ov)?,
        None => ExperimentConfig::from_toml_str("", &ov)?,
    };
    Ok(cfg)
}

fn write_config(cfg: &ExperimentConfig) -> CmdResult {
    output::write_atomic(
        &cfg.out_dir.join("config.toml"),
        cfg.to_toml_string().as_bytes(),
    )?;
    Ok(())
}

fn print_written(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn cmd_run(common: &Common) -> CmdResult {
    let cfg = load(common)?;
    let reports = run_experiment(&cfg)?;
    println!("load_pkts_per_slot policy seed mean_total_backlog_pkts delay_slots verdict");
    for r in &reports {
        println!(
            "{:.3} {} {} {:.6e} {} {}",
            r.offered_load_pkts_per_slot,
            r.config.policy,
            r.seed,
            r.mean_total_backlog_pkts,
            r.delay_slots
                .map_or("-".to_string(), |d| format!("{d:.6e}")),
            r.stability.verdict
        );
    }
    write_config(&cfg)?;
    print_written(&write_run_reports(&reports, &cfg.out_dir)?);
    Ok(())
}

fn report_calibration(cal: &CalibrationResult, dir: &Path) -> CmdResult {
    for s in &cal.steps {
        println!("mean_gain {:.9e} slope {:.6e}", s.mean_gain, s.slope);
    }
    println!(
        "calibrated mean_gain {:.9e} (target slope {:.4e} at {} pkts/slot{})",
        cal.mean_gain,
        cal.target_slope,
        cal.anchor_load_pkts,
        if cal.bracketed { "" } else { ", not bracketed" }
    );
    let path = dir.join("calibration.json");
    output::write_json(&path, cal)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_calibrate(common: &Common) -> CmdResult {
    let cfg = load(common)?;
    let cal = calibrate(&cfg)?;
    report_calibration(&cal, &cfg.out_dir)
}

fn print_sweep(out: &SweepOutcome) {
    for ps in &out.summary.policies {
        for p in &ps.points {
            println!(
                "{} {:.4} backlog {:.6e} [{:.4e}, {:.4e}] {}",
                ps.policy,
                p.key,
                p.backlog_pkts.mean,
                p.backlog_pkts.min,
                p.backlog_pkts.max,
                p.verdict
            );
        }
        match ps.frontier {
            Some(f) => println!("{} frontier {f}", ps.policy),
            None => println!("{} frontier none", ps.policy),
        }
    }
    if let (Some(g), Some(m)) = (out.summary.frontier_gap_pkts, out.summary.frontier_gap_mbps) {
        println!("frontier gap mwdm - mwum: {g} pkts/slot ({m:.4} Mbit/s)");
    }
}

fn cmd_sweep(args: &SweepArgs, arrival: bool) -> CmdResult {
    let mut cfg = load(&args.common)?;
    match (&cfg.sweep, arrival) {
        (None, true) => {
            cfg.sweep = Some(SweepAxis::ArrivalTotal((27..=34).map(f64::from).collect()))
        }
        (None, false) => cfg.sweep = Some(SweepAxis::PowerW((3..=10).map(f64::from).collect())),
        (Some(SweepAxis::ArrivalTotal(_)), true) | (Some(SweepAxis::PowerW(_)), false) => {}
        (Some(axis), _) => {
            return Err(Failure::Usage(format!(
                "invalid config field `sweep`: axis `{}` does not match this subcommand",
                axis.name()
            )))
        }
    }
    cfg.validate()?;
    if args.calibrate {
        let cal = calibrate(&cfg)?;
        report_calibration(&cal, &cfg.out_dir)?;
        cfg = cal.apply(&cfg);
    }
    let out = run_sweep(&cfg)?;
    print_sweep(&out);
    write_config(&cfg)?;
    print_written(&write_sweep(&out, &cfg.out_dir)?);
    Ok(())
}

fn cmd_validate(a: &ValidateArgs) -> CmdResult {
    let spacing = match a.grid {
        Grid::Uniform => GridSpacing::Uniform,
        Grid::Geometric => GridSpacing::Geometric,
    };
    let report = validate_power(a.count, a.seed, a.grid_points, spacing, a.tolerance)?;
    println!(
        "instances {} seed {} grid {} points {} tolerance {:e}",
        report.count,
        report.seed,
        report.grid_points,
        match a.grid {
            Grid::Uniform => "uniform",
            Grid::Geometric => "geometric",
        },
        report.tolerance
    );
    println!("worst relative gap {:.6e}", report.worst_gap());
    if let Some(w) = &report.worst {
        println!("worst instance {}", describe(w));
    }
    if report.passed() {
        println!("pass");
        Ok(())
    } else {
        for f in &report.failures {
            println!("FAIL {}", describe(f));
        }
        Err(Failure::Validation(format!(
            "{} of {} instances beyond tolerance",
            report.failures.len(),
            report.count
        )))
    }
}

fn describe(g: &experiment::GapRecord) -> String {
    let i = &g.instance;
    format!(
        "#{} q_n={:.17e} q_m={:.17e} h_n={:.17e} h_m={:.17e} closed={:.17e} grid={:.17e} gap={:.6e}",
        g.index, i.q_n, i.q_m, i.h_n, i.h_m, g.closed_form_weight, g.grid_weight, g.gap
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(c) => cmd_run(c),
        Command::SweepArrival(a) => cmd_sweep(a, true),
        Command::SweepPower(a) => cmd_sweep(a, false),
        Command::ValidatePower(a) => cmd_validate(a),
        Command::Calibrate(c) => cmd_calibrate(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
