//! Projectile magnetization, axial force and the coupled launch integration.
//!
//! The projectile is a point dipole on the axis. Its potential energy is
//! `U = -m B`, so the axial force is `F = m dB/dx`, with `B` and `dB/dx` the
//! coil's quasi-static field scaled by the instantaneous coil current. The
//! circuit drives the projectile but does not see it (no motional EMF).

use crate::circuit::{advance, fmt_ms, Circuit, CircuitParams, CurrentTrace, Drive, EnergyLedger, SolverSettings, TimeGrid, TraceSample, CircuitState};
use crate::error::{Error, Result};
use crate::magnetostatics::{unit_field, FieldSample, MU_0};
use crate::pulse::{BridgeState, PulseSchedule};
use crate::winding::LoopStack;

/// Mass of the N52 magnet payload.
pub const N52_MASS: f64 = 6.06e-3;
/// Bulk sintered NdFeB density used to infer the magnet volume.
pub const NDFEB_DENSITY: f64 = 7500.0;
/// N52 remanence.
pub const N52_REMANENCE: f64 = 1.45;
/// Mass of the ferrite rod payload.
pub const FERRITE_MASS: f64 = 3.73e-3;
/// Sintered MnZn ferrite density.
pub const FERRITE_DENSITY: f64 = 4800.0;
/// Ferrite saturation polarization, `mu0 Ms`.
pub const FERRITE_SATURATION_POLARIZATION: f64 = 0.49;
/// Induced moment per tesla of applied field for the ferrite rod (shape-limited susceptibility).
pub const FERRITE_COUPLING: f64 = 15.0;

/// Moment of a uniformly magnetized body, `J V / mu0` with `V = mass / density`
/// and `J` the remanent or saturation polarization.
pub fn remanent_moment(mass: f64, density: f64, remanence: f64) -> f64 {
    remanence * (mass / density) / MU_0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DipoleModel {
    /// Fixed moment. Positive moments point along the Forward field, so a
    /// Forward pulse attracts the magnet into the coil.
    Permanent { moment: f64 },
    /// Moment proportional to the applied field, clamped at saturation.
    Induced { coupling: f64, saturation: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projectile {
    pub mass: f64,
    pub model: DipoleModel,
    /// Distance from centre to either end; the projectile has left the tube
    /// once its centre is this far past the tube end.
    pub half_length: f64,
    /// Constant kinetic friction force opposing motion.
    pub friction: f64,
}

impl Projectile {
    /// 6.06 g N52 magnet, moment from mass, bulk density and remanence.
    pub fn n52() -> Self {
        Self {
            mass: N52_MASS,
            model: DipoleModel::Permanent {
                moment: remanent_moment(N52_MASS, NDFEB_DENSITY, N52_REMANENCE),
            },
            half_length: 12.7e-3,
            friction: 0.0,
        }
    }

    /// 3.73 g ferrite rod.
    pub fn ferrite() -> Self {
        Self {
            mass: FERRITE_MASS,
            model: DipoleModel::Induced {
                coupling: FERRITE_COUPLING,
                saturation: remanent_moment(FERRITE_MASS, FERRITE_DENSITY, FERRITE_SATURATION_POLARIZATION),
            },
            half_length: 12.25e-3,
            friction: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass.is_finite() && self.mass > 0.0) {
            return Err(Error::config("projectile.mass_g", "must be positive"));
        }
        if !(self.half_length.is_finite() && self.half_length >= 0.0) {
            return Err(Error::config("projectile.half_length_mm", "must be non-negative"));
        }
        if !(self.friction.is_finite() && self.friction >= 0.0) {
            return Err(Error::config("projectile.friction_n", "must be non-negative"));
        }
        match self.model {
            DipoleModel::Permanent { moment } if !moment.is_finite() => {
                Err(Error::config("projectile.moment_am2", "must be finite"))
            }
            DipoleModel::Induced { coupling, saturation }
                if !(coupling.is_finite() && coupling >= 0.0 && saturation.is_finite() && saturation >= 0.0) =>
            {
                Err(Error::config("projectile.coupling", "coupling and saturation must be non-negative"))
            }
            _ => Ok(()),
        }
    }
}

/// Signed dipole moment of the projectile in an axial field `b`.
#[inline]
pub fn dipole_moment(p: &Projectile, b: f64) -> f64 {
    match p.model {
        DipoleModel::Permanent { moment } => moment,
        DipoleModel::Induced { coupling, saturation } => (coupling * b).clamp(-saturation, saturation),
    }
}

/// Axial force on the projectile at a field sample.
#[inline]
pub fn force(p: &Projectile, sample: &FieldSample) -> f64 {
    dipole_moment(p, sample.b) * sample.db_dx
}

/// Exit kinetic energy over capacitor energy spent.
pub fn efficiency(mass: f64, v: f64, capacitance: f64, v_i: f64, v_f: f64) -> Result<f64> {
    if v == 0.0 {
        return Ok(0.0);
    }
    if !(v_i > v_f) {
        return Err(Error::Audit(format!(
            "capacitor ended at {v_f} V from {v_i} V yet the projectile moves at {v} m/s"
        )));
    }
    let kinetic = 0.5 * mass * v * v;
    Ok(kinetic / (0.5 * capacitance * v_i * v_i - 0.5 * capacitance * v_f * v_f))
}

/// Everything needed for one launch.
#[derive(Debug, Clone)]
pub struct LaunchSetup {
    /// Field source.
    pub stack: LoopStack,
    /// Electrical network; its coil parameters need not come from `stack`.
    pub circuit: Circuit,
    pub schedule: PulseSchedule,
    pub projectile: Projectile,
    pub tube_length: f64,
    /// Distance from the projectile centre back to the coil's near edge,
    /// positive when the projectile starts outside the winding.
    pub x0: f64,
    pub settings: SolverSettings,
}

impl LaunchSetup {
    pub fn start_position(&self) -> f64 {
        self.stack.near_edge().unwrap_or(0.0) - self.x0
    }

    pub fn exit_position(&self) -> f64 {
        self.tube_length + self.projectile.half_length
    }

    pub fn with_schedule(&self, schedule: PulseSchedule) -> Self {
        Self {
            schedule,
            ..self.clone()
        }
    }

    pub fn with_x0(&self, x0: f64) -> Self {
        Self { x0, ..self.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicSample {
    pub t: f64,
    pub x: f64,
    pub v: f64,
    pub force: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    /// Speed leaving the tube; zero when stalled.
    pub exit_velocity: f64,
    /// The projectile never left the tube moving forward.
    pub stalled: bool,
    pub exit_time: Option<f64>,
    /// Velocity when the integration stopped.
    pub final_velocity: f64,
    pub v_i: f64,
    pub v_f: f64,
    pub efficiency: f64,
    pub mass: f64,
    pub capacitance: f64,
    pub trace: CurrentTrace,
    pub kinematics: Vec<KinematicSample>,
}

impl SimResult {
    pub fn kinetic_energy(&self) -> f64 {
        0.5 * self.mass * self.exit_velocity * self.exit_velocity
    }

    pub fn capacitor_energy_drop(&self) -> f64 {
        0.5 * self.capacitance * (self.v_i * self.v_i - self.v_f * self.v_f)
    }

    /// Highest logged velocity.
    pub fn peak_velocity(&self) -> f64 {
        self.kinematics.iter().map(|k| k.v).fold(f64::NEG_INFINITY, f64::max)
    }

    /// `t_ms,x_mm,v_mps,F_N`
    pub fn kinematics_csv(&self) -> String {
        let mut out = String::from("t_ms,x_mm,v_mps,F_N\n");
        for k in &self.kinematics {
            out.push_str(&format!(
                "{},{:.9e},{:.9e},{:.9e}\n",
                fmt_ms(k.t),
                k.x * 1e3,
                k.v,
                k.force
            ));
        }
        out
    }

    /// `key = value` lines.
    pub fn summary(&self) -> String {
        let exit_time = self
            .exit_time
            .map(|t| format!("{:.6}", t * 1e3))
            .unwrap_or_else(|| "none".to_string());
        format!(
            "exit_velocity_mps = {:.6}\nstalled = {}\nexit_time_ms = {}\nfinal_velocity_mps = {:.6}\n\
             v_i = {:.6}\nv_f = {:.6}\nefficiency = {:.6e}\nkinetic_energy_j = {:.6e}\n\
             capacitor_energy_drop_j = {:.6e}\npeak_current_a = {:.6}\n",
            self.exit_velocity,
            self.stalled,
            exit_time,
            self.final_velocity,
            self.v_i,
            self.v_f,
            self.efficiency,
            self.kinetic_energy(),
            self.capacitor_energy_drop(),
            self.trace.peak_current(),
        )
    }
}

// Coupled state: [I, v_cap, E_resistive, E_diode, x, velocity].
type Coupled = [f64; 6];

struct Model<'a> {
    stack: &'a LoopStack,
    circuit: CircuitParams,
    projectile: Projectile,
}

impl Model<'_> {
    fn force_at(&self, x: f64, current: f64) -> f64 {
        if current == 0.0 {
            return 0.0;
        }
        force(&self.projectile, &unit_field(self.stack, x).scaled(current))
    }

    fn acceleration(&self, x: f64, v: f64, current: f64) -> f64 {
        let drag = if v == 0.0 { 0.0 } else { self.projectile.friction * v.signum() };
        (self.force_at(x, current) - drag) / self.projectile.mass
    }

    fn rates(&self, y: &Coupled, drive: Drive) -> Coupled {
        let [di, dv, de, dd] = self.circuit.rates(y[0], y[1], drive);
        [di, dv, de, dd, y[5], self.acceleration(y[4], y[5], y[0])]
    }
}

/// Co-integrates the circuit and the projectile from rest.
pub fn launch(setup: &LaunchSetup) -> Result<SimResult> {
    setup.projectile.validate()?;
    setup.circuit.capacitor.validate()?;
    if !(setup.x0.is_finite() && setup.tube_length.is_finite() && setup.tube_length > 0.0) {
        return Err(Error::config("x0_mm", "initial displacement and tube length must be finite"));
    }
    let grid = TimeGrid::new(&setup.settings)?;
    let mut circuit = setup.circuit;
    circuit.diode_drop = setup.settings.diode_drop;
    let model = Model {
        stack: &setup.stack,
        circuit: circuit.params(),
        projectile: setup.projectile,
    };
    let exit_x = setup.exit_position();
    let x_start = setup.start_position();
    if x_start >= exit_x {
        return Err(Error::config("x0_mm", "projectile starts beyond the tube exit"));
    }

    let mut y: Coupled = [0.0, setup.circuit.capacitor.voltage, 0.0, 0.0, x_start, 0.0];
    let mut k: u64 = 0;
    let mut samples = vec![TraceSample { t: 0.0, i_coil: 0.0, v_cap: y[1], polarity: setup.schedule.polarity_at(0.0) }];
    let mut kinematics = vec![KinematicSample { t: 0.0, x: x_start, v: 0.0, force: 0.0 }];
    let mut exit: Option<(f64, f64)> = None;

    let mut rates_coupled = |s: &Coupled, d: Drive| model.rates(s, d);
    let circuit_params = model.circuit;
    let mut rates_circuit_only = |s: &Coupled, d: Drive| {
        let [di, dv, de, dd] = circuit_params.rates(s[0], s[1], d);
        [di, dv, de, dd, 0.0, 0.0]
    };

    // Drive the schedule, then let any flyback current run out.
    let total_steps = setup.schedule.total_ms() as u64 * grid.steps_per_ms;
    let trailing_limit = total_steps + (1.0 / grid.h) as u64;
    let mut states = setup.schedule.segments().iter().flat_map(|s| {
        std::iter::repeat_n(s.state, (s.duration_ms as u64 * grid.steps_per_ms) as usize)
    });
    loop {
        let bridge = match states.next() {
            Some(b) => b,
            None if y[0] != 0.0 => BridgeState::Buffer,
            None => break,
        };
        if k >= trailing_limit {
            return Err(Error::Domain("flyback current did not decay after the schedule".into()));
        }
        let prev = y;
        y = if exit.is_none() {
            advance(&y, grid.h, bridge, &mut rates_coupled)
        } else {
            advance(&y, grid.h, bridge, &mut rates_circuit_only)
        };
        k += 1;
        let t = grid.time(k);

        if exit.is_none() && y[4] >= exit_x {
            let theta = (exit_x - prev[4]) / (y[4] - prev[4]);
            let v_exit = prev[5] + theta * (y[5] - prev[5]);
            let t_exit = grid.time(k - 1) + theta * grid.h;
            exit = Some((t_exit, v_exit));
            kinematics.push(KinematicSample { t: t_exit, x: exit_x, v: v_exit, force: model.force_at(exit_x, y[0]) });
        }
        if k.is_multiple_of(grid.log_stride) {
            let next = if k < total_steps { setup.schedule.polarity_at(t) } else { BridgeState::Buffer };
            samples.push(TraceSample { t, i_coil: y[0], v_cap: y[1], polarity: next });
            if exit.is_none() {
                kinematics.push(KinematicSample { t, x: y[4], v: y[5], force: model.force_at(y[4], y[0]) });
            }
        }
    }
    let t_circuit_end = grid.time(k);

    // Current is gone; only friction can still act.
    let mut final_velocity = exit.map(|e| e.1).unwrap_or(y[5]);
    if exit.is_none() {
        if setup.projectile.friction == 0.0 {
            if y[5] > 0.0 {
                let t_exit = t_circuit_end + (exit_x - y[4]) / y[5];
                exit = Some((t_exit, y[5]));
                kinematics.push(KinematicSample { t: t_exit, x: exit_x, v: y[5], force: 0.0 });
            }
        } else {
            let (mut x, mut v, mut t) = (y[4], y[5], t_circuit_end);
            let decel = setup.projectile.friction / setup.projectile.mass;
            if v > 0.0 {
                let stop_distance = v * v / (2.0 * decel);
                if x + stop_distance >= exit_x {
                    let v_exit = (v * v - 2.0 * decel * (exit_x - x)).sqrt();
                    t += (v - v_exit) / decel;
                    exit = Some((t, v_exit));
                    kinematics.push(KinematicSample { t, x: exit_x, v: v_exit, force: 0.0 });
                } else {
                    t += v / decel;
                    x += stop_distance;
                    v = 0.0;
                    kinematics.push(KinematicSample { t, x, v, force: 0.0 });
                }
            }
            final_velocity = exit.map(|e| e.1).unwrap_or(v);
        }
    }

    let v_i = setup.circuit.capacitor.voltage;
    let v_f = y[1];
    let (exit_velocity, stalled, exit_time) = match exit {
        Some((t, v)) if v > 0.0 => (v, false, Some(t)),
        _ => (0.0, true, None),
    };
    let eta = efficiency(setup.projectile.mass, exit_velocity, setup.circuit.capacitor.capacitance, v_i, v_f)?;

    let trace = CurrentTrace {
        samples,
        v_initial: v_i,
        final_state: CircuitState { t: t_circuit_end, v_cap: v_f, i_coil: y[0], polarity: BridgeState::Buffer },
        dissipated: EnergyLedger { resistive: y[2], diode: y[3] },
        inductance: setup.circuit.coil.inductance,
        capacitance: setup.circuit.capacitor.capacitance,
    };
    Ok(SimResult {
        exit_velocity,
        stalled,
        exit_time,
        final_velocity,
        v_i,
        v_f,
        efficiency: eta,
        mass: setup.projectile.mass,
        capacitance: setup.circuit.capacitor.capacitance,
        trace,
        kinematics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Capacitor;
    use crate::magnetostatics::b_superpose;
    use crate::winding::{digitize, preset, CoilElectrical, TubeSpec, WireSpec};

    fn single_stack() -> LoopStack {
        digitize(&preset("single").unwrap(), &WireSpec::default(), &TubeSpec::default()).unwrap()
    }

    fn setup(projectile: Projectile, schedule: &str, x0: f64) -> LaunchSetup {
        LaunchSetup {
            stack: single_stack(),
            circuit: Circuit::new(CoilElectrical::new(34.2e-6, 0.5).unwrap(), Capacitor::default()),
            schedule: PulseSchedule::parse(schedule).unwrap(),
            projectile,
            tube_length: TubeSpec::default().length,
            x0,
            settings: SolverSettings::default(),
        }
    }

    #[test]
    fn n52_default_moment() {
        let m = remanent_moment(N52_MASS, NDFEB_DENSITY, N52_REMANENCE);
        assert!((m - 0.932).abs() < 5e-4, "{m}");
    }

    #[test]
    fn moments() {
        let ferrite = Projectile {
            model: DipoleModel::Induced { coupling: 0.5, saturation: 0.3 },
            ..Projectile::ferrite()
        };
        assert_eq!(dipole_moment(&ferrite, 0.0), 0.0);
        assert_eq!(dipole_moment(&ferrite, 1.0), 0.3);
        assert_eq!(dipole_moment(&ferrite, -1.0), -0.3);
        assert_eq!(dipole_moment(&ferrite, 0.2), 0.1);
        let magnet = Projectile::n52();
        assert_eq!(dipole_moment(&magnet, -3.0), dipole_moment(&magnet, 5.0));
    }

    #[test]
    fn no_force_at_symmetric_centre() {
        let stack = single_stack();
        let loops = stack.loops();
        let s = b_superpose(&stack, 80.0, 0.5 * (loops[0].x + loops[loops.len() - 1].x));
        assert!(force(&Projectile::n52(), &s).abs() < 1e-9);
        assert!(force(&Projectile::ferrite(), &s).abs() < 1e-9);
    }

    #[test]
    fn current_parity_of_force() {
        let stack = single_stack();
        for &x in &[-0.01, 0.002, 0.05, 0.34, 0.36] {
            let plus = b_superpose(&stack, 60.0, x);
            let minus = b_superpose(&stack, -60.0, x);
            let f = Projectile::ferrite();
            assert_eq!(force(&f, &plus), force(&f, &minus));
            let m = Projectile::n52();
            assert_eq!(force(&m, &plus), -force(&m, &minus));
        }
    }

    #[test]
    fn efficiency_examples() {
        assert_eq!(efficiency(1.0, 0.0, 0.12, 45.0, 45.0).unwrap(), 0.0);
        let eta = efficiency(6.06e-3, 11.76, 0.12, 45.0, 37.36).unwrap();
        assert!((eta - 0.0111).abs() < 5e-5, "{eta}");
        let doubled = efficiency(12.12e-3, 11.76, 0.12, 45.0, 37.36).unwrap();
        assert!((doubled - 2.0 * eta).abs() < 1e-15);
        assert!(matches!(efficiency(1e-3, 1.0, 0.12, 40.0, 41.0), Err(Error::Audit(_))));
    }

    #[test]
    fn zero_moment_stalls() {
        let p = Projectile { model: DipoleModel::Permanent { moment: 0.0 }, ..Projectile::n52() };
        let r = launch(&setup(p, "F10", 0.01)).unwrap();
        assert!(r.stalled);
        assert_eq!(r.exit_velocity, 0.0);
        assert_eq!(r.efficiency, 0.0);
    }

    #[test]
    fn magnet_is_pulled_in_by_forward_pulse() {
        let r = launch(&setup(Projectile::n52(), "F20", 0.01)).unwrap();
        assert!(!r.stalled);
        assert!(r.exit_velocity > 1.0, "{}", r.exit_velocity);
        assert!(r.kinetic_energy() <= r.capacitor_energy_drop());
        assert!((0.0..1.0).contains(&r.efficiency));
        let audit = r.trace.energy_audit();
        assert!(audit.relative_imbalance() < 1e-6);
    }

    #[test]
    fn flipped_schedule_repels_magnet_first() {
        let f = launch(&setup(Projectile::n52(), "F10", 0.01)).unwrap();
        let r = launch(&setup(Projectile::n52(), "R10", 0.01)).unwrap();
        let first = |res: &SimResult| res.kinematics.iter().find(|k| k.force != 0.0).unwrap().force;
        assert!(first(&f) > 0.0);
        assert!(first(&r) < 0.0);
        assert!(r.stalled);
    }

    #[test]
    fn induced_trajectory_ignores_polarity() {
        let f = launch(&setup(Projectile::ferrite(), "F15 B5 R5", 0.01)).unwrap();
        let r = launch(&setup(Projectile::ferrite(), "R15 B5 F5", 0.01)).unwrap();
        assert_eq!(f.kinematics, r.kinematics);
        assert_eq!(f.exit_velocity, r.exit_velocity);
    }

    #[test]
    fn friction_can_stop_a_coasting_projectile() {
        let mut p = Projectile::n52();
        p.friction = 0.5;
        let r = launch(&setup(p, "F10", 0.01)).unwrap();
        assert!(r.stalled);
        assert_eq!(r.final_velocity, 0.0);
    }

    #[test]
    fn start_beyond_exit_is_rejected() {
        assert!(launch(&setup(Projectile::n52(), "F10", -0.5)).is_err());
    }

    #[test]
    fn kinematics_csv_header() {
        let r = launch(&setup(Projectile::n52(), "F3", 0.01)).unwrap();
        assert!(r.kinematics_csv().starts_with("t_ms,x_mm,v_mps,F_N\n0,-1.000000000e1,0.000000000e0,0.000000000e0\n"));
    }
}
