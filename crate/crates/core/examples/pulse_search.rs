//! Exhaustive and coordinate-descent searches over a three-slot template.

use coilgun::circuit::{Capacitor, Circuit, SolverSettings};
use coilgun::dynamics::{LaunchSetup, Projectile};
use coilgun::pulse::{PulseSchedule, PulseTemplate};
use coilgun::sweep::{search_pulses, Objective, PulseSearch, Strategy};
use coilgun::winding::{digitize, preset, preset_info, TubeSpec, WireSpec};

fn main() -> coilgun::Result<()> {
    let tube = TubeSpec::default();
    let setup = LaunchSetup {
        stack: digitize(&preset("single")?, &WireSpec::default(), &tube)?,
        circuit: Circuit::new(preset_info("single")?.measured, Capacitor::default()),
        schedule: PulseSchedule::parse("F1")?,
        projectile: Projectile::n52(),
        tube_length: tube.length,
        x0: 8e-3,
        settings: SolverSettings::default(),
    };
    let grids = vec![vec![5, 10, 15, 20], vec![1, 3, 5], vec![5, 10, 15, 20]];
    let search = PulseSearch::new(PulseTemplate::parse("F? B? R?")?, grids)?;
    for strategy in [Strategy::Exhaustive, Strategy::CoordinateDescent] {
        let s = search.clone().with_strategy(strategy);
        let r = search_pulses(&setup, &s, Objective::Velocity, true)?;
        let best = r.argmax(Objective::Velocity).expect("non-empty");
        println!(
            "{strategy:?}: {} of {} planned runs, best {} at {:.3} m/s",
            r.points.len(),
            s.planned_runs(),
            best.label,
            best.exit_velocity
        );
    }
    Ok(())
}
