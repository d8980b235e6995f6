//! Forward-only drive against forward, buffer, reverse for a permanent magnet.

use coilgun::circuit::{Capacitor, Circuit, SolverSettings};
use coilgun::dynamics::{launch, LaunchSetup, Projectile};
use coilgun::pulse::PulseSchedule;
use coilgun::winding::{digitize, preset, preset_info, TubeSpec, WireSpec};

fn main() -> coilgun::Result<()> {
    let tube = TubeSpec::default();
    let base = LaunchSetup {
        stack: digitize(&preset("single")?, &WireSpec::default(), &tube)?,
        circuit: Circuit::new(preset_info("single")?.measured, Capacitor::default()),
        schedule: PulseSchedule::parse("F10")?,
        projectile: Projectile::n52(),
        tube_length: tube.length,
        x0: 6e-3,
        settings: SolverSettings::default(),
    };
    for text in ["F20", "F35", "F50", "F30 B10 R30", "F20 B5 R20"] {
        let r = launch(&base.with_schedule(PulseSchedule::parse(text)?))?;
        println!("{text:<14} exit {:>7.3} m/s  efficiency {:.4}", r.exit_velocity, r.efficiency);
    }
    Ok(())
}
