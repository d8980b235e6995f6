//! Run configuration files.
//!
//! One TOML file describes one launch: coil, wire, tube, capacitor,
//! projectile, schedule and initial displacement, plus an optional sweep
//! block. Files use mm, ms, µs, µH and g; everything is SI after loading.
//!
//! The coil's electrical values come from, in order of precedence, an explicit
//! `[coil.electrical]` override, the preset's measured values, or the
//! inductance estimate of the winding. The winding always drives the field.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::circuit::{Capacitor, Circuit, SolverSettings};
use crate::dynamics::{remanent_moment, DipoleModel, LaunchSetup, Projectile, N52_MASS, N52_REMANENCE, NDFEB_DENSITY};
use crate::error::{Error, Result};
use crate::pulse::{PulseSchedule, PulseTemplate};
use crate::sweep::{displacement_grid_mm, Objective, PulseSearch, Strategy, DEFAULT_BUDGET};
use crate::winding::{digitize, estimate_electrical, preset_info, CoilElectrical, LoopStack, Section, TubeSpec, WindingProfile, WireSpec};

const REQUIRED: &str = "coil, projectile, schedule, x0_mm";

#[derive(Debug, Clone, PartialEq)]
pub enum CoilSource {
    Preset(String),
    Profile(WindingProfile),
    /// No winding: the circuit runs but the projectile feels no field.
    ElectricalOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoilConfig {
    pub source: CoilSource,
    pub electrical: Option<CoilElectrical>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepVariable {
    /// Inclusive displacement range in mm.
    Displacement { min_mm: f64, max_mm: f64, step_mm: f64 },
    PulseGrid { template: PulseTemplate, grids: Vec<Vec<u32>> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub variable: SweepVariable,
    pub objective: Objective,
    pub strategy: Strategy,
    pub budget: u64,
    pub parallel: bool,
}

impl SweepConfig {
    pub fn displacement_grid(&self) -> Result<Vec<f64>> {
        match &self.variable {
            SweepVariable::Displacement { min_mm, max_mm, step_mm } => displacement_grid_mm(*min_mm, *max_mm, *step_mm),
            SweepVariable::PulseGrid { .. } => Err(Error::config("sweep.variable", "not a displacement sweep")),
        }
    }

    pub fn pulse_search(&self) -> Result<PulseSearch> {
        match &self.variable {
            SweepVariable::PulseGrid { template, grids } => Ok(PulseSearch::new(template.clone(), grids.clone())?
                .with_strategy(self.strategy)
                .with_budget(self.budget)),
            SweepVariable::Displacement { .. } => Err(Error::config("sweep.variable", "not a pulse grid")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub coil: CoilConfig,
    pub wire: WireSpec,
    pub tube: TubeSpec,
    pub capacitor: Capacitor,
    pub projectile: Projectile,
    pub schedule: PulseSchedule,
    /// Projectile centre to the coil's near edge, positive outside (m).
    pub x0: f64,
    pub solver: SolverSettings,
    pub sweep: Option<SweepConfig>,
}

impl RunConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::config(toml_field(&e), e.message().to_string()))?;
        raw.resolve()
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(&RawConfig::from(self)).expect("config serializes")
    }

    pub fn profile(&self) -> Result<Option<WindingProfile>> {
        match &self.coil.source {
            CoilSource::Preset(name) => Ok(Some(preset_info(name)?.profile)),
            CoilSource::Profile(p) => Ok(Some(p.clone())),
            CoilSource::ElectricalOnly => Ok(None),
        }
    }

    pub fn stack(&self) -> Result<LoopStack> {
        match self.profile()? {
            Some(p) => digitize(&p, &self.wire, &self.tube),
            None => Ok(LoopStack::default()),
        }
    }

    /// Inductance and resistance driving the circuit.
    pub fn electrical(&self) -> Result<CoilElectrical> {
        if let Some(e) = self.coil.electrical {
            return Ok(e);
        }
        match &self.coil.source {
            CoilSource::Preset(name) => Ok(preset_info(name)?.measured),
            _ => estimate_electrical(&self.stack()?, &self.wire),
        }
    }

    pub fn circuit(&self) -> Result<Circuit> {
        let mut c = Circuit::new(self.electrical()?, self.capacitor);
        c.diode_drop = self.solver.diode_drop;
        Ok(c)
    }

    pub fn launch_setup(&self) -> Result<LaunchSetup> {
        Ok(LaunchSetup {
            stack: self.stack()?,
            circuit: self.circuit()?,
            schedule: self.schedule.clone(),
            projectile: self.projectile,
            tube_length: self.tube.length,
            x0: self.x0,
            settings: self.solver,
        })
    }
}

fn toml_field(e: &toml::de::Error) -> String {
    let msg = e.message();
    for key in ["missing field `", "unknown field `"] {
        if let Some(rest) = msg.split(key).nth(1) {
            if let Some(name) = rest.split('`').next() {
                return name.to_string();
            }
        }
    }
    "config".to_string()
}

// Twelve significant digits, so unit conversions do not leak binary noise into files.
fn tidy(x: f64) -> f64 {
    format!("{x:.11e}").parse().expect("float round-trips")
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    schedule: Option<String>,
    x0_mm: Option<f64>,
    coil: Option<RawCoil>,
    #[serde(default)]
    wire: RawWire,
    #[serde(default)]
    tube: RawTube,
    #[serde(default)]
    capacitor: RawCapacitor,
    projectile: Option<RawProjectile>,
    #[serde(default)]
    circuit: RawCircuit,
    #[serde(default)]
    solver: RawSolver,
    sweep: Option<RawSweep>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoil {
    preset: Option<String>,
    profile: Option<RawProfile>,
    electrical: Option<RawElectrical>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    name: String,
    sections: Vec<RawSection>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSection {
    length_mm: f64,
    layers: u32,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawElectrical {
    inductance_uh: f64,
    resistance_ohm: f64,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWire {
    bare_diameter_mm: Option<f64>,
    pitch_mm: Option<f64>,
    resistance_ohm_per_m: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTube {
    length_mm: Option<f64>,
    outer_radius_mm: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCapacitor {
    capacitance_f: Option<f64>,
    v_i: Option<f64>,
    esr_ohm: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProjectile {
    kind: Option<String>,
    mass_g: Option<f64>,
    moment_am2: Option<f64>,
    orientation: Option<i8>,
    coupling_am2_per_t: Option<f64>,
    saturation_am2: Option<f64>,
    half_length_mm: Option<f64>,
    friction_n: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCircuit {
    diode_drop_v: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    dt_internal_us: Option<f64>,
    log_cadence_ms: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    variable: Option<String>,
    min_mm: Option<f64>,
    max_mm: Option<f64>,
    step_mm: Option<f64>,
    template: Option<String>,
    grids: Option<Vec<Vec<u32>>>,
    objective: Option<String>,
    strategy: Option<String>,
    budget: Option<u64>,
    parallel: Option<bool>,
}

fn need<T>(value: Option<T>, field: &str) -> Result<T> {
    value.ok_or_else(|| Error::config(field, "required"))
}

impl RawConfig {
    fn resolve(self) -> Result<RunConfig> {
        let missing: Vec<&str> = [
            ("coil", self.coil.is_none()),
            ("projectile", self.projectile.is_none()),
            ("schedule", self.schedule.is_none()),
            ("x0_mm", self.x0_mm.is_none()),
        ]
        .iter()
        .filter(|(_, m)| *m)
        .map(|(n, _)| *n)
        .collect();
        if !missing.is_empty() {
            return Err(Error::config(
                missing.join(", "),
                format!("missing required field(s); a run needs {REQUIRED}"),
            ));
        }

        let wire_default = WireSpec::default();
        let wire = WireSpec {
            bare_diameter: self.wire.bare_diameter_mm.map_or(wire_default.bare_diameter, |v| v * 1e-3),
            pitch: self.wire.pitch_mm.map_or(wire_default.pitch, |v| v * 1e-3),
            resistance_per_length: self.wire.resistance_ohm_per_m.unwrap_or(wire_default.resistance_per_length),
        };
        wire.validate()?;
        let tube_default = TubeSpec::default();
        let tube = TubeSpec {
            length: self.tube.length_mm.map_or(tube_default.length, |v| v * 1e-3),
            outer_radius: self.tube.outer_radius_mm.map_or(tube_default.outer_radius, |v| v * 1e-3),
        };
        tube.validate()?;

        let cap_default = Capacitor::default();
        let capacitor = Capacitor {
            capacitance: self.capacitor.capacitance_f.unwrap_or(cap_default.capacitance),
            voltage: self.capacitor.v_i.unwrap_or(cap_default.voltage),
            esr: self.capacitor.esr_ohm.unwrap_or(cap_default.esr),
        };
        capacitor.validate()?;

        let coil = resolve_coil(self.coil.expect("checked"))?;
        let projectile = resolve_projectile(self.projectile.expect("checked"))?;

        let schedule_text = self.schedule.expect("checked");
        let schedule = PulseSchedule::parse(&schedule_text).map_err(|e| Error::config("schedule", e.to_string()))?;
        let x0_mm = self.x0_mm.expect("checked");
        if !x0_mm.is_finite() {
            return Err(Error::config("x0_mm", "must be finite"));
        }

        let solver_default = SolverSettings::default();
        let solver = SolverSettings {
            dt_internal: self.solver.dt_internal_us.map_or(solver_default.dt_internal, |v| v * 1e-6),
            log_cadence: self.solver.log_cadence_ms.map_or(solver_default.log_cadence, |v| v * 1e-3),
            diode_drop: self.circuit.diode_drop_v.unwrap_or(solver_default.diode_drop),
        };
        crate::circuit::validate_settings(&solver)?;

        let sweep = self.sweep.map(resolve_sweep).transpose()?;

        let config = RunConfig {
            coil,
            wire,
            tube,
            capacitor,
            projectile,
            schedule,
            x0: x0_mm * 1e-3,
            solver,
            sweep,
        };
        // Surface geometry problems at load time.
        config.stack()?;
        Ok(config)
    }
}

fn resolve_coil(raw: RawCoil) -> Result<CoilConfig> {
    let electrical = raw
        .electrical
        .map(|e| {
            CoilElectrical::new(e.inductance_uh * 1e-6, e.resistance_ohm)
                .map_err(|err| Error::config("coil.electrical", err.to_string()))
        })
        .transpose()?;
    let source = match (raw.preset, raw.profile) {
        (Some(_), Some(_)) => return Err(Error::config("coil", "give either preset or profile, not both")),
        (Some(name), None) => {
            let info = preset_info(&name)?;
            CoilSource::Preset(info.name.to_string())
        }
        (None, Some(p)) => CoilSource::Profile(WindingProfile::new(
            p.name,
            p.sections.iter().map(|s| Section::new(s.length_mm * 1e-3, s.layers)).collect(),
        )?),
        (None, None) if electrical.is_some() => CoilSource::ElectricalOnly,
        (None, None) => return Err(Error::config("coil", "needs a preset, a profile or electrical values")),
    };
    Ok(CoilConfig { source, electrical })
}

fn resolve_projectile(raw: RawProjectile) -> Result<Projectile> {
    let kind = need(raw.kind, "projectile.kind")?;
    let (base, model) = match kind.as_str() {
        "permanent" => {
            let base = Projectile::n52();
            let orientation = raw.orientation.unwrap_or(1);
            if orientation != 1 && orientation != -1 {
                return Err(Error::config("projectile.orientation", "must be 1 (attract first) or -1"));
            }
            if raw.coupling_am2_per_t.is_some() || raw.saturation_am2.is_some() {
                return Err(Error::config("projectile", "coupling and saturation apply to induced projectiles only"));
            }
            let mass = raw.mass_g.map_or(N52_MASS, |g| g * 1e-3);
            let moment = raw
                .moment_am2
                .unwrap_or_else(|| remanent_moment(mass, NDFEB_DENSITY, N52_REMANENCE));
            if !(moment >= 0.0) {
                return Err(Error::config("projectile.moment_am2", "must be non-negative; use orientation to flip"));
            }
            (base, DipoleModel::Permanent { moment: orientation as f64 * moment })
        }
        "induced" => {
            let base = Projectile::ferrite();
            if raw.moment_am2.is_some() || raw.orientation.is_some() {
                return Err(Error::config("projectile", "moment and orientation apply to permanent projectiles only"));
            }
            let DipoleModel::Induced { coupling, saturation } = base.model else {
                unreachable!("ferrite is induced")
            };
            (
                base,
                DipoleModel::Induced {
                    coupling: raw.coupling_am2_per_t.unwrap_or(coupling),
                    saturation: raw.saturation_am2.unwrap_or(saturation),
                },
            )
        }
        other => {
            return Err(Error::config("projectile.kind", format!("expected permanent or induced, got {other:?}")));
        }
    };
    let p = Projectile {
        mass: raw.mass_g.map_or(base.mass, |g| g * 1e-3),
        model,
        half_length: raw.half_length_mm.map_or(base.half_length, |v| v * 1e-3),
        friction: raw.friction_n.unwrap_or(base.friction),
    };
    p.validate()?;
    Ok(p)
}

fn resolve_sweep(raw: RawSweep) -> Result<SweepConfig> {
    let variable = match need(raw.variable, "sweep.variable")?.as_str() {
        "displacement" => {
            let v = SweepVariable::Displacement {
                min_mm: need(raw.min_mm, "sweep.min_mm")?,
                max_mm: need(raw.max_mm, "sweep.max_mm")?,
                step_mm: need(raw.step_mm, "sweep.step_mm")?,
            };
            if let SweepVariable::Displacement { min_mm, max_mm, step_mm } = v {
                displacement_grid_mm(min_mm, max_mm, step_mm)?;
            }
            v
        }
        "pulse_grid" => {
            let template = PulseTemplate::parse(&need(raw.template, "sweep.template")?)
                .map_err(|e| Error::config("sweep.template", e.to_string()))?;
            let grids = need(raw.grids, "sweep.grids")?;
            PulseSearch::new(template.clone(), grids.clone())?;
            SweepVariable::PulseGrid { template, grids }
        }
        other => {
            return Err(Error::config("sweep.variable", format!("expected displacement or pulse_grid, got {other:?}")));
        }
    };
    Ok(SweepConfig {
        variable,
        objective: raw.objective.as_deref().unwrap_or("velocity").parse()?,
        strategy: raw.strategy.as_deref().unwrap_or("exhaustive").parse()?,
        budget: raw.budget.unwrap_or(DEFAULT_BUDGET),
        parallel: raw.parallel.unwrap_or(false),
    })
}

impl From<&RunConfig> for RawConfig {
    fn from(c: &RunConfig) -> Self {
        let (preset, profile) = match &c.coil.source {
            CoilSource::Preset(name) => (Some(name.clone()), None),
            CoilSource::Profile(p) => (
                None,
                Some(RawProfile {
                    name: p.name.clone(),
                    sections: p
                        .sections
                        .iter()
                        .map(|s| RawSection { length_mm: tidy(s.length * 1e3), layers: s.layers })
                        .collect(),
                }),
            ),
            CoilSource::ElectricalOnly => (None, None),
        };
        let p = &c.projectile;
        let mut projectile = RawProjectile {
            mass_g: Some(tidy(p.mass * 1e3)),
            half_length_mm: Some(tidy(p.half_length * 1e3)),
            friction_n: Some(tidy(p.friction)),
            ..RawProjectile::default()
        };
        match p.model {
            DipoleModel::Permanent { moment } => {
                projectile.kind = Some("permanent".into());
                projectile.moment_am2 = Some(tidy(moment.abs()));
                projectile.orientation = Some(if moment < 0.0 { -1 } else { 1 });
            }
            DipoleModel::Induced { coupling, saturation } => {
                projectile.kind = Some("induced".into());
                projectile.coupling_am2_per_t = Some(tidy(coupling));
                projectile.saturation_am2 = Some(tidy(saturation));
            }
        }
        RawConfig {
            schedule: Some(c.schedule.to_string()),
            x0_mm: Some(tidy(c.x0 * 1e3)),
            coil: Some(RawCoil {
                preset,
                profile,
                electrical: c.coil.electrical.map(|e| RawElectrical {
                    inductance_uh: tidy(e.inductance * 1e6),
                    resistance_ohm: tidy(e.resistance),
                }),
            }),
            wire: RawWire {
                bare_diameter_mm: Some(tidy(c.wire.bare_diameter * 1e3)),
                pitch_mm: Some(tidy(c.wire.pitch * 1e3)),
                resistance_ohm_per_m: Some(tidy(c.wire.resistance_per_length)),
            },
            tube: RawTube {
                length_mm: Some(tidy(c.tube.length * 1e3)),
                outer_radius_mm: Some(tidy(c.tube.outer_radius * 1e3)),
            },
            capacitor: RawCapacitor {
                capacitance_f: Some(tidy(c.capacitor.capacitance)),
                v_i: Some(tidy(c.capacitor.voltage)),
                esr_ohm: Some(tidy(c.capacitor.esr)),
            },
            projectile: Some(projectile),
            circuit: RawCircuit { diode_drop_v: Some(tidy(c.solver.diode_drop)) },
            solver: RawSolver {
                dt_internal_us: Some(tidy(c.solver.dt_internal * 1e6)),
                log_cadence_ms: Some(tidy(c.solver.log_cadence * 1e3)),
            },
            sweep: c.sweep.as_ref().map(|s| {
                let mut raw = RawSweep {
                    objective: Some(s.objective.name().into()),
                    strategy: Some(
                        match s.strategy {
                            Strategy::Exhaustive => "exhaustive",
                            Strategy::CoordinateDescent => "coordinate-descent",
                        }
                        .into(),
                    ),
                    budget: Some(s.budget),
                    parallel: Some(s.parallel),
                    ..RawSweep::default()
                };
                match &s.variable {
                    SweepVariable::Displacement { min_mm, max_mm, step_mm } => {
                        raw.variable = Some("displacement".into());
                        raw.min_mm = Some(*min_mm);
                        raw.max_mm = Some(*max_mm);
                        raw.step_mm = Some(*step_mm);
                    }
                    SweepVariable::PulseGrid { template, grids } => {
                        raw.variable = Some("pulse_grid".into());
                        raw.template = Some(template.to_string());
                        raw.grids = Some(grids.clone());
                    }
                }
                raw
            }),
        }
    }
}
