//! One scheduling decision under each policy for the same queues and gains.

use hmsched::{ChannelProcess, FadingConfig, PhyParams, Policy};

fn main() -> hmsched::Result<()> {
    let params = PhyParams::default();
    let mut channel = ChannelProcess::new(FadingConfig {
        n_users: 6,
        gain_spread_db: 10.0,
        master_seed: 3,
        ..FadingConfig::default()
    })?;
    let h = channel.step();
    let q = [1.1e5, 1.2e5, 9.0e4, 1.0e5, 1.3e5, 9.5e4];

    for policy in Policy::ALL {
        let d = policy.decide(&q, h.as_slice(), &params)?;
        println!(
            "{:<6} {:?} {:?} weight {:.6e} pairs evaluated {}",
            policy.name(),
            d.mode,
            d.served,
            d.weight,
            d.pair_evaluations
        );
    }
    Ok(())
}
