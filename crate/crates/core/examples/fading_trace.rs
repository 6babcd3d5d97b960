//! Generate a short Jakes fading trace, save it as CSV and replay it.

use hmsched::fading::{ChannelTrace, GainSource};
use hmsched::{ChannelProcess, FadingConfig};

fn main() -> hmsched::Result<()> {
    let config = FadingConfig {
        n_users: 4,
        master_seed: 7,
        ..FadingConfig::default()
    };
    let mut process = ChannelProcess::new(config)?;
    println!("doppler (Hz): {:?}", process.doppler_hz());

    let trace = ChannelTrace::record(&mut process, 5_000);
    let n = trace.n_users();
    let mut mean = vec![0.0; n];
    for row in trace.rows() {
        for (m, h) in mean.iter_mut().zip(row) {
            *m += h / trace.len() as f64;
        }
    }
    println!("empirical mean gain per user: {mean:?}");

    let mut csv = Vec::new();
    trace.write_csv(&mut csv)?;
    let back = ChannelTrace::read_csv(csv.as_slice())?;
    let mut replay = back.replay();
    let mut first = vec![0.0; replay.n_users()];
    replay.next_gains(&mut first);
    println!("first replayed slot: {first:?}");
    println!("csv bytes: {}", csv.len());
    Ok(())
}
