//! Load a run file, simulate it and print the summary.
//!
//! `cargo run --example config_run -- configs/coil_g.cfg`

use coilgun::config::RunConfig;
use coilgun::dynamics::launch;

fn main() -> coilgun::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/configs/coil_g.cfg").into());
    let config = RunConfig::load(&path)?;
    let result = launch(&config.launch_setup()?)?;
    print!("{}", result.summary());
    Ok(())
}
