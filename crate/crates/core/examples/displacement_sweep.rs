//! Exit velocity against starting offset for the double-layer coil.

use coilgun::circuit::{Capacitor, Circuit, SolverSettings};
use coilgun::dynamics::{LaunchSetup, Projectile};
use coilgun::pulse::PulseSchedule;
use coilgun::sweep::{displacement_grid_mm, sweep_displacement, Objective};
use coilgun::winding::{digitize, preset, preset_info, TubeSpec, WireSpec};

fn main() -> coilgun::Result<()> {
    let tube = TubeSpec::default();
    let setup = LaunchSetup {
        stack: digitize(&preset("double")?, &WireSpec::default(), &tube)?,
        circuit: Circuit::new(preset_info("double")?.measured, Capacitor::default()),
        schedule: PulseSchedule::parse("F10 B5 R10")?,
        projectile: Projectile::n52(),
        tube_length: tube.length,
        x0: 0.0,
        settings: SolverSettings::default(),
    };
    let result = sweep_displacement(&setup, &displacement_grid_mm(0.0, 30.0, 2.0)?, true)?;
    print!("{}", result.to_csv());
    let best = result.argmax(Objective::Velocity).expect("non-empty");
    println!("best offset {} mm: {:.3} m/s", best.label, best.exit_velocity);
    Ok(())
}
