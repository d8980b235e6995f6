//! Axial field of the single-coil preset at 50 A, with the long-solenoid limit for comparison.

use coilgun::magnetostatics::{sample_field, MU_0};
use coilgun::winding::{digitize, preset, TubeSpec, WireSpec};

fn main() -> coilgun::Result<()> {
    let wire = WireSpec::default();
    let stack = digitize(&preset("single")?, &wire, &TubeSpec::default())?;
    let current = 50.0;
    let samples = sample_field(&stack, current, -0.02, 0.376, 0.008)?;
    println!("{:>8} {:>12} {:>14}", "x_mm", "B_T", "dB/dx_T_per_m");
    for s in &samples {
        println!("{:>8.1} {:>12.6} {:>14.4}", s.x * 1e3, s.b, s.db_dx);
    }
    let limit = MU_0 * current / wire.pitch;
    println!("long-solenoid limit: {limit:.6} T");
    Ok(())
}
