//! Capacitor discharge into the coil through the H-bridge.
//!
//! While the bridge drives the coil (polarity `σ = ±1`):
//!
//! ```text
//! L dI/dt = σ v − R I        C dv/dt = −σ I
//! ```
//!
//! With the bridge open, a non-zero coil current free-wheels through the
//! flyback diodes back into the capacitor:
//!
//! ```text
//! L dI/dt = −sign(I) (v + V_d) − R I        C dv/dt = |I|
//! ```
//!
//! and once it reaches zero the coil is left open. The integrator is classic
//! RK4 on a step that divides one millisecond exactly, so every segment
//! boundary of a schedule falls on a step boundary.

use crate::error::{Error, Result};
use crate::pulse::{BridgeState, PulseSchedule};
use crate::winding::CoilElectrical;

/// Largest internal step accepted; the coil's L/R is around 60 µs.
pub const MAX_DT_INTERNAL: f64 = 10e-6;

// Give up on a trailing flyback that has not finished after this long.
const MAX_TRAILING_TIME: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Capacitor {
    pub capacitance: f64,
    /// Initial charge voltage.
    pub voltage: f64,
    /// Optional equivalent series resistance, added to the coil resistance.
    pub esr: f64,
}

impl Capacitor {
    pub fn new(capacitance: f64, voltage: f64) -> Result<Self> {
        let cap = Self {
            capacitance,
            voltage,
            esr: 0.0,
        };
        cap.validate()?;
        Ok(cap)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.capacitance.is_finite() && self.capacitance > 0.0) {
            return Err(Error::config("capacitor.capacitance_f", "must be positive"));
        }
        if !self.voltage.is_finite() {
            return Err(Error::config("capacitor.v_i", "must be finite"));
        }
        if !(self.esr.is_finite() && self.esr >= 0.0) {
            return Err(Error::config("capacitor.esr_ohm", "must be non-negative"));
        }
        Ok(())
    }

    pub fn energy_at(&self, v: f64) -> f64 {
        0.5 * self.capacitance * v * v
    }
}

impl Default for Capacitor {
    fn default() -> Self {
        Self {
            capacitance: 0.12,
            voltage: 45.0,
            esr: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitState {
    pub t: f64,
    pub v_cap: f64,
    pub i_coil: f64,
    pub polarity: BridgeState,
}

impl CircuitState {
    pub fn at_rest(cap: &Capacitor) -> Self {
        Self {
            t: 0.0,
            v_cap: cap.voltage,
            i_coil: 0.0,
            polarity: BridgeState::Buffer,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    /// Requested RK4 step; the step actually used is the largest divisor of
    /// one millisecond not exceeding it.
    pub dt_internal: f64,
    /// Spacing of logged samples. Must be a whole number of internal steps.
    pub log_cadence: f64,
    /// Forward drop of each flyback diode.
    pub diode_drop: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            dt_internal: 5e-6,
            log_cadence: 1e-3,
            diode_drop: 0.0,
        }
    }
}

/// Checks that the settings give a usable step and logging stride.
pub fn validate_settings(settings: &SolverSettings) -> Result<()> {
    TimeGrid::new(settings).map(|_| ())
}

/// Step size and logging stride derived from [`SolverSettings`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct TimeGrid {
    pub steps_per_ms: u64,
    pub h: f64,
    pub log_stride: u64,
}

impl TimeGrid {
    pub fn new(settings: &SolverSettings) -> Result<Self> {
        let dt = settings.dt_internal;
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::config("solver.dt_internal_us", "must be positive"));
        }
        if dt > MAX_DT_INTERNAL * (1.0 + 1e-12) {
            return Err(Error::config(
                "solver.dt_internal_us",
                format!("must not exceed {} µs", MAX_DT_INTERNAL * 1e6),
            ));
        }
        let steps_per_ms = (1e-3 / dt - 1e-9).ceil().max(1.0) as u64;
        let h = 1e-3 / steps_per_ms as f64;
        let cadence = settings.log_cadence;
        if !(cadence.is_finite() && cadence > 0.0) {
            return Err(Error::config("solver.log_cadence_ms", "must be positive"));
        }
        let stride = (cadence / h).round();
        if stride < 1.0 || (stride * h - cadence).abs() > 1e-9 * cadence {
            return Err(Error::config(
                "solver.log_cadence_ms",
                format!("must be a whole multiple of the {:.4} µs internal step", h * 1e6),
            ));
        }
        if !(settings.diode_drop.is_finite() && settings.diode_drop >= 0.0) {
            return Err(Error::config("circuit.diode_drop_v", "must be non-negative"));
        }
        Ok(Self {
            steps_per_ms,
            h,
            log_stride: stride as u64,
        })
    }

    pub fn time(&self, k: u64) -> f64 {
        k as f64 / (self.steps_per_ms as f64 * 1000.0)
    }
}

/// How the coil is connected during one integration step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Drive {
    /// Bridge closed with polarity `σ`.
    Driven(f64),
    /// Bridge open, current of sign `s` flowing through the flyback diodes.
    Flyback(f64),
    /// Bridge open, no current.
    Open,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct CircuitParams {
    pub inductance: f64,
    pub resistance: f64,
    pub capacitance: f64,
    pub diode_drop: f64,
}

impl CircuitParams {
    pub fn new(coil: &CoilElectrical, cap: &Capacitor, diode_drop: f64) -> Self {
        Self {
            inductance: coil.inductance,
            resistance: coil.resistance + cap.esr,
            capacitance: cap.capacitance,
            diode_drop,
        }
    }

    /// `[dI, dv, dE_resistive, dE_diode]` per second.
    #[inline]
    pub fn rates(&self, i: f64, v: f64, drive: Drive) -> [f64; 4] {
        let heat = self.resistance * i * i;
        match drive {
            Drive::Driven(sigma) => [
                (sigma * v - self.resistance * i) / self.inductance,
                -(sigma * i) / self.capacitance,
                heat,
                0.0,
            ],
            Drive::Flyback(s) => [
                (-s * (v + self.diode_drop) - self.resistance * i) / self.inductance,
                s * i / self.capacitance,
                heat,
                self.diode_drop * s * i,
            ],
            Drive::Open => [0.0; 4],
        }
    }
}

pub(crate) fn rk4<const N: usize>(
    y: &[f64; N],
    h: f64,
    f: &mut impl FnMut(&[f64; N]) -> [f64; N],
) -> [f64; N] {
    let shift = |base: &[f64; N], k: &[f64; N], s: f64| {
        let mut out = *base;
        for (o, d) in out.iter_mut().zip(k) {
            *o += s * d;
        }
        out
    };
    let k1 = f(y);
    let k2 = f(&shift(y, &k1, 0.5 * h));
    let k3 = f(&shift(y, &k2, 0.5 * h));
    let k4 = f(&shift(y, &k3, h));
    let mut out = *y;
    for n in 0..N {
        out[n] += h / 6.0 * (k1[n] + 2.0 * k2[n] + 2.0 * k3[n] + k4[n]);
    }
    out
}

/// Advances `y` (whose component 0 is the coil current) by `h` with the bridge
/// held in `bridge`. A flyback current that would cross zero inside the step
/// is stopped at the crossing and the rest of the step is taken open-circuit.
pub(crate) fn advance<const N: usize>(
    y: &[f64; N],
    h: f64,
    bridge: BridgeState,
    rates: &mut impl FnMut(&[f64; N], Drive) -> [f64; N],
) -> [f64; N] {
    let drive = match bridge {
        BridgeState::Forward => Drive::Driven(1.0),
        BridgeState::Reverse => Drive::Driven(-1.0),
        BridgeState::Buffer if y[0] == 0.0 => Drive::Open,
        BridgeState::Buffer => Drive::Flyback(y[0].signum()),
    };
    let full = rk4(y, h, &mut |s| rates(s, drive));
    let Drive::Flyback(s) = drive else {
        return full;
    };
    if s * full[0] > 0.0 {
        return full;
    }
    let theta = (y[0] / (y[0] - full[0])).clamp(0.0, 1.0);
    let mut part = rk4(y, theta * h, &mut |s| rates(s, drive));
    part[0] = 0.0;
    rk4(&part, (1.0 - theta) * h, &mut |s| rates(s, Drive::Open))
}

/// One sample of the logged current pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSample {
    pub t: f64,
    pub i_coil: f64,
    pub v_cap: f64,
    pub polarity: BridgeState,
}

/// Energy dissipated along the way.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyLedger {
    pub resistive: f64,
    pub diode: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurrentTrace {
    pub samples: Vec<TraceSample>,
    pub v_initial: f64,
    pub final_state: CircuitState,
    pub dissipated: EnergyLedger,
    pub inductance: f64,
    pub capacitance: f64,
}

/// Where the capacitor's energy went.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyAudit {
    pub capacitor_drop: f64,
    pub resistive: f64,
    pub diode: f64,
    /// Energy still in the coil's field at the end of the trace.
    pub coil_stored: f64,
}

impl EnergyAudit {
    pub fn accounted(&self) -> f64 {
        self.resistive + self.diode + self.coil_stored
    }

    /// |drop − accounted| / drop.
    pub fn relative_imbalance(&self) -> f64 {
        (self.capacitor_drop - self.accounted()).abs() / self.capacitor_drop.abs()
    }
}

impl CurrentTrace {
    pub fn v_final(&self) -> f64 {
        self.final_state.v_cap
    }

    pub fn peak_current(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.i_coil.abs())
            .fold(0.0, f64::max)
    }

    pub fn energy_audit(&self) -> EnergyAudit {
        let e = |v: f64| 0.5 * self.capacitance * v * v;
        let i = self.final_state.i_coil;
        EnergyAudit {
            capacitor_drop: e(self.v_initial) - e(self.final_state.v_cap),
            resistive: self.dissipated.resistive,
            diode: self.dissipated.diode,
            coil_stored: 0.5 * self.inductance * i * i,
        }
    }

    /// `t_ms,i_A,vcap_V,polarity`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t_ms,i_A,vcap_V,polarity\n");
        for s in &self.samples {
            out.push_str(&format!(
                "{},{:.9e},{:.9e},{}\n",
                fmt_ms(s.t),
                s.i_coil,
                s.v_cap,
                s.polarity.polarity()
            ));
        }
        out
    }
}

/// Milliseconds with trailing binary noise removed.
pub(crate) fn fmt_ms(t: f64) -> String {
    let ms = (t * 1e3 * 1e6).round() / 1e6;
    format!("{ms}")
}

/// The capacitor/coil/bridge network.
#[derive(Debug, Clone, Copy)]
pub struct Circuit {
    pub coil: CoilElectrical,
    pub capacitor: Capacitor,
    pub diode_drop: f64,
}

impl Circuit {
    pub fn new(coil: CoilElectrical, capacitor: Capacitor) -> Self {
        Self {
            coil,
            capacitor,
            diode_drop: 0.0,
        }
    }

    pub(crate) fn params(&self) -> CircuitParams {
        CircuitParams::new(&self.coil, &self.capacitor, self.diode_drop)
    }

    /// One RK4 step of length `dt` with the bridge in `polarity`.
    pub fn step(&self, state: &CircuitState, polarity: BridgeState, dt: f64) -> Result<CircuitState> {
        if !(dt > 0.0) {
            return Err(Error::config("dt", "step must be positive"));
        }
        let p = self.params();
        let y = [state.i_coil, state.v_cap, 0.0, 0.0];
        let out = advance(&y, dt, polarity, &mut |s, d| p.rates(s[0], s[1], d));
        Ok(CircuitState {
            t: state.t + dt,
            v_cap: out[1],
            i_coil: out[0],
            polarity,
        })
    }

    /// Integrates from rest through `schedule` and the trailing flyback.
    pub fn run(&self, schedule: &PulseSchedule, settings: &SolverSettings) -> Result<CurrentTrace> {
        self.capacitor.validate()?;
        let grid = TimeGrid::new(settings)?;
        let p = CircuitParams::new(&self.coil, &self.capacitor, settings.diode_drop);
        let mut rates = |s: &[f64; 4], d: Drive| p.rates(s[0], s[1], d);

        let mut y = [0.0, self.capacitor.voltage, 0.0, 0.0];
        let mut k: u64 = 0;
        let mut samples = vec![TraceSample {
            t: 0.0,
            i_coil: 0.0,
            v_cap: y[1],
            polarity: schedule.polarity_at(0.0),
        }];
        let log = |k: u64, y: &[f64; 4], state: BridgeState, samples: &mut Vec<TraceSample>| {
            if k.is_multiple_of(grid.log_stride) {
                samples.push(TraceSample {
                    t: grid.time(k),
                    i_coil: y[0],
                    v_cap: y[1],
                    polarity: state,
                });
            }
        };

        for seg in schedule.segments() {
            for _ in 0..seg.duration_ms as u64 * grid.steps_per_ms {
                y = advance(&y, grid.h, seg.state, &mut rates);
                k += 1;
                let next = schedule.polarity_at(grid.time(k));
                log(k, &y, next, &mut samples);
            }
        }
        let end_k = k;
        let limit = end_k + (MAX_TRAILING_TIME / grid.h) as u64;
        while y[0] != 0.0 {
            if k >= limit {
                return Err(Error::Domain(
                    "flyback current did not decay after the schedule".into(),
                ));
            }
            y = advance(&y, grid.h, BridgeState::Buffer, &mut rates);
            k += 1;
            log(k, &y, BridgeState::Buffer, &mut samples);
        }

        Ok(CurrentTrace {
            samples,
            v_initial: self.capacitor.voltage,
            final_state: CircuitState {
                t: grid.time(k),
                v_cap: y[1],
                i_coil: y[0],
                polarity: BridgeState::Buffer,
            },
            dissipated: EnergyLedger {
                resistive: y[2],
                diode: y[3],
            },
            inductance: self.coil.inductance,
            capacitance: self.capacitor.capacitance,
        })
    }
}

pub fn step(
    state: &CircuitState,
    coil: &CoilElectrical,
    cap: &Capacitor,
    polarity: BridgeState,
    dt: f64,
) -> Result<CircuitState> {
    Circuit::new(*coil, *cap).step(state, polarity, dt)
}

pub fn run_circuit(
    coil: &CoilElectrical,
    cap: &Capacitor,
    schedule: &PulseSchedule,
    dt_internal: f64,
    log_cadence: f64,
) -> Result<CurrentTrace> {
    let settings = SolverSettings {
        dt_internal,
        log_cadence,
        ..SolverSettings::default()
    };
    Circuit::new(*coil, *cap).run(schedule, &settings)
}
