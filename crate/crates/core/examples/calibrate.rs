//! Fit the mean channel gain so MWUM is marginally stable at the anchor load.

use hmsched::experiment::{calibrate, CalibrationConfig, ExperimentConfig};

fn main() -> hmsched::Result<()> {
    let cfg = ExperimentConfig {
        calibration: CalibrationConfig {
            horizon_slots: Some(20_000),
            iterations: 4,
            seeds: vec![1],
            ..CalibrationConfig::default()
        },
        ..ExperimentConfig::default()
    };
    let result = calibrate(&cfg)?;
    for s in &result.steps {
        println!("mean_gain {:.4e} -> slope {:+.4e}", s.mean_gain, s.slope);
    }
    println!(
        "mean_gain {:.4e} (bracketed: {}, target slope {:.4e})",
        result.mean_gain, result.bracketed, result.target_slope
    );
    Ok(())
}
