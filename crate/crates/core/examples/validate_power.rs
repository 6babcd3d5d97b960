//! Closed-form power split against brute-force grid search on random pairs.

use hmsched::experiment::validate_power;
use hmsched::GridSpacing;

fn main() -> hmsched::Result<()> {
    for spacing in [GridSpacing::Geometric, GridSpacing::Uniform] {
        let report = validate_power(2_000, 1, 10_000, spacing, 1e-4)?;
        println!(
            "{spacing:?}: worst gap {:.3e}, {} of {} beyond {:e}",
            report.worst_gap(),
            report.failures.len(),
            report.count,
            report.tolerance
        );
    }
    Ok(())
}
