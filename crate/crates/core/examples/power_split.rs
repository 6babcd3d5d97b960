//! Optimal base/incremental power split for one user pair.

use hmsched::phy::{grid_power_oracle_with, optimal_power_split, rate_uniform};
use hmsched::{GridSpacing, PhyParams};

fn main() -> hmsched::Result<()> {
    let params = PhyParams::default();
    // weak user n with a long queue, strong user m with a shorter one
    let (q_n, q_m, h_n, h_m) = (9.0e5, 6.0e5, 7.0e-3, 6.6e-2);

    let best = optimal_power_split(q_n, q_m, h_n, h_m, &params)?;
    println!("mode           {:?}", best.mode);
    println!("base power     {:.6e} W", best.split.base_power_w);
    println!("incr power     {:.6e} W", best.split.incremental_power_w);
    println!(
        "rates          {:.2} / {:.2} bits",
        best.rate_base, best.rate_incremental
    );
    println!("pair weight    {:.9e}", best.weight);

    let um_n = q_n * rate_uniform(h_n, &params)?;
    let um_m = q_m * rate_uniform(h_m, &params)?;
    println!("uniform best   {:.9e}", um_n.max(um_m));

    let grid = grid_power_oracle_with(q_n, q_m, h_n, h_m, &params, 10_000, GridSpacing::Geometric)?;
    println!("grid search    {:.9e}", grid.weight);
    Ok(())
}
