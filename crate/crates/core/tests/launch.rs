use coilgun::circuit::{Capacitor, Circuit, SolverSettings};
use coilgun::dynamics::{launch, LaunchSetup, Projectile};
use coilgun::pulse::{PulseSchedule, PulseTemplate};
use coilgun::sweep::{search_pulses, sweep_displacement, Objective, PulseSearch, Strategy, SweepInput};
use coilgun::winding::{digitize, preset, preset_info, TubeSpec, WireSpec};
use coilgun::Error;

fn setup(coil: &str, projectile: Projectile, schedule: &str, x0_mm: f64) -> LaunchSetup {
    let info = preset_info(coil).unwrap();
    LaunchSetup {
        stack: digitize(&preset(coil).unwrap(), &WireSpec::default(), &TubeSpec::default()).unwrap(),
        circuit: Circuit::new(info.measured, Capacitor::default()),
        schedule: PulseSchedule::parse(schedule).unwrap(),
        projectile,
        tube_length: TubeSpec::default().length,
        x0: x0_mm * 1e-3,
        settings: SolverSettings::default(),
    }
}

#[test]
fn halving_the_step_barely_moves_exit_velocity() {
    for (coil, p, s, x0) in [
        ("single", Projectile::n52(), "F10 B10 R10", 8.0),
        ("dual-9-5-1-5-9", Projectile::n52(), "F5 B5 R5 B10 F5 B5 R4", 8.0),
        ("single", Projectile::ferrite(), "F50", 6.0),
    ] {
        let base = setup(coil, p, s, x0);
        let fine = LaunchSetup { settings: SolverSettings { dt_internal: 2.5e-6, ..base.settings }, ..base.clone() };
        let (a, b) = (launch(&base).unwrap(), launch(&fine).unwrap());
        assert!(a.exit_velocity > 0.0, "{coil}");
        let rel = (a.exit_velocity - b.exit_velocity).abs() / b.exit_velocity;
        assert!(rel < 1e-4, "{coil}: {rel}");
    }
}

#[test]
fn suckback_sign_structure_at_constant_current() {
    let stack = digitize(&preset("single").unwrap(), &WireSpec::default(), &TubeSpec::default()).unwrap();
    let loops = stack.loops();
    let centre = 0.5 * (loops[0].x + loops[loops.len() - 1].x);
    let magnet = Projectile::n52();
    for dx in [-0.15, -0.05, -0.01] {
        let before = coilgun::magnetostatics::b_superpose(&stack, 50.0, centre + dx);
        let after = coilgun::magnetostatics::b_superpose(&stack, 50.0, centre - dx);
        assert!(coilgun::dynamics::force(&magnet, &before) > 0.0);
        assert!(coilgun::dynamics::force(&magnet, &after) < 0.0);
    }
}

#[test]
fn one_point_sweep_is_its_own_argmax() {
    let s = setup("single", Projectile::n52(), "F10", 0.0);
    let r = sweep_displacement(&s, &[6.0], false).unwrap();
    assert_eq!(r.points.len(), 1);
    assert_eq!(r.argmax(Objective::Velocity).unwrap().input, SweepInput::DisplacementMm(6.0));
    assert!(matches!(sweep_displacement(&s, &[], false), Err(Error::Config { .. })));
}

#[test]
fn exhaustive_search_matches_brute_force() {
    let base = setup("double", Projectile::n52(), "F5", 6.0);
    let search = PulseSearch::new(PulseTemplate::parse("F? B? R?").unwrap(), vec![vec![5, 10, 15]; 3]).unwrap();
    let result = search_pulses(&base, &search, Objective::Velocity, false).unwrap();
    assert_eq!(result.points.len(), 27);

    let mut best = (f64::NEG_INFINITY, String::new());
    for a in [5, 10, 15] {
        for b in [5, 10, 15] {
            for c in [5, 10, 15] {
                let s = format!("F{a} B{b} R{c}");
                let r = launch(&base.with_schedule(PulseSchedule::parse(&s).unwrap())).unwrap();
                if r.exit_velocity > best.0 {
                    best = (r.exit_velocity, s);
                }
            }
        }
    }
    let top = result.argmax(Objective::Velocity).unwrap();
    assert_eq!(top.label, best.1);
    assert_eq!(top.exit_velocity, best.0);
    let eff = result.argmax(Objective::Efficiency).unwrap();
    assert!(result.points.contains(eff));

    let parallel = search_pulses(&base, &search, Objective::Velocity, true).unwrap();
    assert_eq!(parallel, result);
    assert_eq!(parallel.to_csv(), result.to_csv());
}

#[test]
fn single_slot_single_value_is_one_run() {
    let base = setup("single", Projectile::n52(), "F5", 8.0);
    let search = PulseSearch::new(PulseTemplate::parse("F?").unwrap(), vec![vec![10]]).unwrap();
    let r = search_pulses(&base, &search, Objective::Efficiency, false).unwrap();
    assert_eq!(r.points.len(), 1);
    assert_eq!(r.points[0].label, "F10");
}

#[test]
fn budget_is_enforced_before_running() {
    let base = setup("single", Projectile::n52(), "F5", 8.0);
    let search = PulseSearch::new(PulseTemplate::parse("F? B? R?").unwrap(), vec![(1..=50).collect(); 3])
        .unwrap();
    assert!(matches!(
        search_pulses(&base, &search, Objective::Velocity, false),
        Err(Error::Budget { runs: 125_000, budget: 100_000 })
    ));
}

#[test]
fn coordinate_descent_is_deterministic_and_stays_on_the_grid() {
    let base = setup("single", Projectile::n52(), "F5", 8.0);
    let grids = vec![vec![10, 20, 30], vec![1, 5], vec![10, 20]];
    let search = PulseSearch::new(PulseTemplate::parse("F? B? R?").unwrap(), grids.clone())
        .unwrap()
        .with_strategy(Strategy::CoordinateDescent);
    let a = search_pulses(&base, &search, Objective::Velocity, false).unwrap();
    let b = search_pulses(&base, &search, Objective::Velocity, true).unwrap();
    assert_eq!(a, b);
    assert!(a.points.len() as u64 <= search.planned_runs());
    for p in &a.points {
        let SweepInput::Durations(d) = &p.input else { panic!("durations") };
        for (v, g) in d.iter().zip(&grids) {
            assert!(g.contains(v));
        }
    }
    let exhaustive = search_pulses(&base, &search.clone().with_strategy(Strategy::Exhaustive), Objective::Velocity, false).unwrap();
    let best_cd = a.argmax(Objective::Velocity).unwrap().exit_velocity;
    assert!(best_cd <= exhaustive.argmax(Objective::Velocity).unwrap().exit_velocity);
}
