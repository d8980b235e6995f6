//! A ferrite slug under a long forward pulse: it accelerates into the coil and is
//! pulled back once it passes the centre.

use coilgun::circuit::{Capacitor, Circuit, SolverSettings};
use coilgun::dynamics::{launch, LaunchSetup, Projectile};
use coilgun::pulse::PulseSchedule;
use coilgun::winding::{digitize, preset, preset_info, TubeSpec, WireSpec};

fn main() -> coilgun::Result<()> {
    let tube = TubeSpec::default();
    let stack = digitize(&preset("single")?, &WireSpec::default(), &tube)?;
    let setup = LaunchSetup {
        stack,
        circuit: Circuit::new(preset_info("single")?.measured, Capacitor::default()),
        schedule: PulseSchedule::parse("F50")?,
        projectile: Projectile::ferrite(),
        tube_length: tube.length,
        x0: 6e-3,
        settings: SolverSettings::default(),
    };
    let r = launch(&setup)?;
    let peak = r.kinematics.iter().max_by(|a, b| a.v.total_cmp(&b.v)).expect("samples");
    println!("peak {:.4} m/s at {:.0} ms, x = {:.1} mm", peak.v, peak.t * 1e3, peak.x * 1e3);
    for k in r.kinematics.iter().filter(|k| k.t > peak.t && k.t <= 0.05) {
        println!("  {:>3.0} ms  x {:>6.1} mm  v {:.5} m/s  F {:+.4} N", k.t * 1e3, k.x * 1e3, k.v, k.force);
    }
    println!("exit velocity {:.4} m/s", r.exit_velocity);
    Ok(())
}
