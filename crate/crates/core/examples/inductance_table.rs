//! Estimated inductance and resistance of every preset against the bench values.

use coilgun::winding::{catalog, digitize, estimate_electrical, TubeSpec, WireSpec};

fn main() -> coilgun::Result<()> {
    let wire = WireSpec::default();
    println!("{:<22} {:>6} {:>9} {:>9} {:>8} {:>8}", "preset", "loops", "est_uH", "meas_uH", "est_ohm", "meas_ohm");
    for info in catalog() {
        let stack = digitize(&info.profile, &wire, &TubeSpec::default())?;
        let est = estimate_electrical(&stack, &wire)?;
        println!(
            "{:<22} {:>6} {:>9.1} {:>9.1} {:>8.3} {:>8.3}",
            info.name,
            stack.len(),
            est.inductance * 1e6,
            info.measured.inductance * 1e6,
            est.resistance,
            info.measured.resistance
        );
    }
    Ok(())
}
