//! Coil winding profiles and their digitization into coaxial current loops.
//!
//! A [`WindingProfile`] lists axial sections, each with a layer count. Sections
//! are laid end to end starting at the tube entrance (`x = 0`). Digitizing a
//! profile places one [`CurrentLoop`] per turn: within a section the turn
//! centres sit at `start + (j + 1/2) * pitch` for every `j` whose centre still
//! falls inside the section, and layer `k` sits at radius
//! `tube.outer_radius + bare_diameter / 2 + k * bare_diameter`.

mod inductance;
mod presets;

pub use inductance::{estimate_electrical, mutual_inductance, self_inductance};
pub use presets::{catalog, preset, preset_info, PresetInfo, PRESET_NAMES};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 22 AWG bare copper diameter, 0.0256 in.
pub const AWG22_BARE_DIAMETER: f64 = 0.0256 * 0.0254;
/// Axial turn spacing used for digitization (wire width including enamel).
pub const DEFAULT_PITCH: f64 = 0.68e-3;
/// 22 AWG copper at 20 °C, 16.14 Ω per 1000 ft.
pub const AWG22_RESISTANCE_PER_M: f64 = 0.05296;
/// 14-inch former.
pub const DEFAULT_TUBE_LENGTH: f64 = 14.0 * 0.0254;
/// Former outer diameter 7.9 mm.
pub const DEFAULT_TUBE_OUTER_RADIUS: f64 = 7.9e-3 / 2.0;

const LENGTH_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WireSpec {
    pub bare_diameter: f64,
    /// Axial centre-to-centre spacing of adjacent turns.
    pub pitch: f64,
    pub resistance_per_length: f64,
}

impl WireSpec {
    pub fn new(bare_diameter: f64, pitch: f64, resistance_per_length: f64) -> Result<Self> {
        let wire = Self {
            bare_diameter,
            pitch,
            resistance_per_length,
        };
        wire.validate()?;
        Ok(wire)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bare_diameter.is_finite() && self.bare_diameter > 0.0) {
            return Err(Error::Geometry("wire bare diameter must be positive".into()));
        }
        if !(self.pitch.is_finite() && self.pitch >= self.bare_diameter) {
            return Err(Error::Geometry(
                "wire pitch must be at least the bare diameter".into(),
            ));
        }
        if !(self.resistance_per_length.is_finite() && self.resistance_per_length > 0.0) {
            return Err(Error::Geometry(
                "wire resistance per length must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Radius of the wire conductor, used by the self-inductance term.
    pub fn conductor_radius(&self) -> f64 {
        0.5 * self.bare_diameter
    }
}

impl Default for WireSpec {
    fn default() -> Self {
        Self {
            bare_diameter: AWG22_BARE_DIAMETER,
            pitch: DEFAULT_PITCH,
            resistance_per_length: AWG22_RESISTANCE_PER_M,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubeSpec {
    pub length: f64,
    pub outer_radius: f64,
}

impl TubeSpec {
    pub fn new(length: f64, outer_radius: f64) -> Result<Self> {
        let tube = Self {
            length,
            outer_radius,
        };
        tube.validate()?;
        Ok(tube)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(Error::Geometry("tube length must be positive".into()));
        }
        if !(self.outer_radius.is_finite() && self.outer_radius > 0.0) {
            return Err(Error::Geometry("tube outer radius must be positive".into()));
        }
        if self.length <= self.outer_radius {
            return Err(Error::Geometry(
                "tube length must exceed its outer radius".into(),
            ));
        }
        Ok(())
    }

    /// Radius of the innermost winding layer for a given wire.
    pub fn innermost_winding_radius(&self, wire: &WireSpec) -> f64 {
        self.outer_radius + 0.5 * wire.bare_diameter
    }
}

impl Default for TubeSpec {
    fn default() -> Self {
        Self {
            length: DEFAULT_TUBE_LENGTH,
            outer_radius: DEFAULT_TUBE_OUTER_RADIUS,
        }
    }
}

/// One axial section of a profile. `layers == 0` is a gap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Section {
    /// Axial extent in metres.
    pub length: f64,
    pub layers: u32,
}

impl Section {
    pub fn new(length: f64, layers: u32) -> Self {
        Self { length, layers }
    }

    pub fn gap(length: f64) -> Self {
        Self { length, layers: 0 }
    }

    /// Turns per layer that fit in this section at the given pitch.
    pub fn turns_per_layer(&self, pitch: f64) -> usize {
        // centres at (j + 1/2) * pitch must satisfy (j + 1/2) * pitch <= length
        let q = self.length / pitch;
        (q + 0.5 + 1e-9).floor().max(0.0) as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileDoc", into = "ProfileDoc")]
pub struct WindingProfile {
    pub name: String,
    pub sections: Vec<Section>,
}

impl WindingProfile {
    pub fn new(name: impl Into<String>, sections: Vec<Section>) -> Result<Self> {
        let profile = Self {
            name: name.into(),
            sections,
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sections.is_empty() {
            return Err(Error::Geometry(format!(
                "profile `{}` has no sections",
                self.name
            )));
        }
        for (i, s) in self.sections.iter().enumerate() {
            if !(s.length.is_finite() && s.length > 0.0) {
                return Err(Error::Geometry(format!(
                    "profile `{}` section {} has non-positive length",
                    self.name,
                    i + 1
                )));
            }
        }
        Ok(())
    }

    pub fn total_length(&self) -> f64 {
        self.sections.iter().map(|s| s.length).sum()
    }

    pub fn has_windings(&self) -> bool {
        self.sections.iter().any(|s| s.layers > 0)
    }

    /// Parses the structured-text profile format (`name`, `sections[{length_mm, layers}]`).
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config("profile", e.message().to_string()))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("profile serializes")
    }
}

/// On-disk form of a profile, lengths in millimetres.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileDoc {
    name: String,
    sections: Vec<SectionDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SectionDoc {
    length_mm: f64,
    layers: u32,
}

impl TryFrom<ProfileDoc> for WindingProfile {
    type Error = Error;

    fn try_from(doc: ProfileDoc) -> Result<Self> {
        let sections = doc
            .sections
            .into_iter()
            .map(|s| Section::new(s.length_mm * 1e-3, s.layers))
            .collect();
        WindingProfile::new(doc.name, sections)
    }
}

impl From<WindingProfile> for ProfileDoc {
    fn from(p: WindingProfile) -> Self {
        ProfileDoc {
            name: p.name,
            sections: p
                .sections
                .into_iter()
                .map(|s| SectionDoc {
                    length_mm: round_mm(s.length * 1e3),
                    layers: s.layers,
                })
                .collect(),
        }
    }
}

// Strip binary noise from the m -> mm conversion so files stay readable.
fn round_mm(mm: f64) -> f64 {
    (mm * 1e9).round() / 1e9
}

/// A single circular current loop coaxial with the tube.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurrentLoop {
    /// Axial position of the loop plane.
    pub x: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LoopStack {
    loops: Vec<CurrentLoop>,
    extent: Option<(f64, f64)>,
}

impl LoopStack {
    /// Builds a stack from arbitrary loops, sorted by `(x, radius)`.
    /// The wound extent is taken as the span of loop positions.
    pub fn from_loops(mut loops: Vec<CurrentLoop>) -> Self {
        sort_loops(&mut loops);
        let extent = match (loops.first(), loops.last()) {
            (Some(a), Some(b)) => Some((a.x, b.x)),
            _ => None,
        };
        Self { loops, extent }
    }

    pub fn loops(&self) -> &[CurrentLoop] {
        &self.loops
    }

    pub fn len(&self) -> usize {
        self.loops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.loops.is_empty()
    }

    /// Axial span `(start, end)` of the wound sections, `None` for an empty stack.
    pub fn extent(&self) -> Option<(f64, f64)> {
        self.extent
    }

    /// Near (entrance-side) edge of the winding.
    pub fn near_edge(&self) -> Option<f64> {
        self.extent.map(|e| e.0)
    }

    /// Total conductor length, the sum of loop circumferences.
    pub fn wire_length(&self) -> f64 {
        self.loops
            .iter()
            .map(|l| std::f64::consts::TAU * l.radius)
            .sum()
    }

    /// Same stack shifted by `dx` along the axis.
    pub fn shifted(&self, dx: f64) -> Self {
        Self {
            loops: self
                .loops
                .iter()
                .map(|l| CurrentLoop {
                    x: l.x + dx,
                    radius: l.radius,
                })
                .collect(),
            extent: self.extent.map(|(a, b)| (a + dx, b + dx)),
        }
    }

    /// Mirror image about the centre of the wound extent.
    pub fn mirrored(&self) -> Self {
        let Some((a, b)) = self.extent else {
            return self.clone();
        };
        let mut loops: Vec<_> = self
            .loops
            .iter()
            .map(|l| CurrentLoop {
                x: a + b - l.x,
                radius: l.radius,
            })
            .collect();
        sort_loops(&mut loops);
        Self {
            loops,
            extent: self.extent,
        }
    }

    /// Union of two stacks.
    pub fn merged(&self, other: &LoopStack) -> Self {
        let mut loops = self.loops.clone();
        loops.extend_from_slice(&other.loops);
        sort_loops(&mut loops);
        let extent = match (self.extent, other.extent) {
            (Some((a0, a1)), Some((b0, b1))) => Some((a0.min(b0), a1.max(b1))),
            (e, None) | (None, e) => e,
        };
        Self { loops, extent }
    }

    /// `x_mm,r_mm` listing in stack order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x_mm,r_mm\n");
        for l in &self.loops {
            out.push_str(&format!("{},{}\n", l.x * 1e3, l.radius * 1e3));
        }
        out
    }
}

fn sort_loops(loops: &mut [CurrentLoop]) {
    loops.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.radius.total_cmp(&b.radius)));
}

/// Lumped series model of a coil.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoilElectrical {
    pub inductance: f64,
    pub resistance: f64,
}

impl CoilElectrical {
    pub fn new(inductance: f64, resistance: f64) -> Result<Self> {
        if !(inductance.is_finite() && inductance > 0.0) {
            return Err(Error::Domain("coil inductance must be positive".into()));
        }
        if !(resistance.is_finite() && resistance > 0.0) {
            return Err(Error::Domain("coil resistance must be positive".into()));
        }
        Ok(Self {
            inductance,
            resistance,
        })
    }

    /// Current rise time constant L/R.
    pub fn time_constant(&self) -> f64 {
        self.inductance / self.resistance
    }
}

/// Places one loop per turn of `profile` on `tube`.
pub fn digitize(profile: &WindingProfile, wire: &WireSpec, tube: &TubeSpec) -> Result<LoopStack> {
    profile.validate()?;
    wire.validate()?;
    tube.validate()?;

    let total = profile.total_length();
    if total > tube.length * (1.0 + LENGTH_TOL) + LENGTH_TOL {
        return Err(Error::Geometry(format!(
            "profile `{}` spans {:.3} mm but the tube is {:.3} mm",
            profile.name,
            total * 1e3,
            tube.length * 1e3
        )));
    }

    let r0 = tube.innermost_winding_radius(wire);
    let step = wire.bare_diameter;
    let mut loops = Vec::new();
    let mut extent: Option<(f64, f64)> = None;
    let mut start = 0.0;
    for section in &profile.sections {
        if section.layers > 0 {
            let end = start + section.length;
            extent = Some(match extent {
                Some((a, _)) => (a, end),
                None => (start, end),
            });
            for j in 0..section.turns_per_layer(wire.pitch) {
                let x = start + (j as f64 + 0.5) * wire.pitch;
                for k in 0..section.layers {
                    loops.push(CurrentLoop {
                        x,
                        radius: r0 + k as f64 * step,
                    });
                }
            }
        }
        start += section.length;
    }
    sort_loops(&mut loops);
    Ok(LoopStack { loops, extent })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_count(profile: &WindingProfile, pitch: f64) -> usize {
        // Walk candidate centres one pitch at a time and keep those inside each section.
        let mut count = 0;
        for s in &profile.sections {
            let mut j = 0usize;
            loop {
                let c = (j as f64 + 0.5) * pitch;
                if c > s.length * (1.0 + 1e-9) {
                    break;
                }
                count += s.layers as usize;
                j += 1;
            }
        }
        count
    }

    #[test]
    fn full_tube_single_layer_has_523_loops() {
        let profile = WindingProfile::new("single", vec![Section::new(0.3556, 1)]).unwrap();
        let stack = digitize(&profile, &WireSpec::default(), &TubeSpec::default()).unwrap();
        assert_eq!(stack.len(), 523);
        let last = stack.loops().last().unwrap();
        assert!(last.x <= 0.3556);
    }

    #[test]
    fn gap_only_profile_is_empty() {
        let profile = WindingProfile::new("gap", vec![Section::gap(0.1)]).unwrap();
        let stack = digitize(&profile, &WireSpec::default(), &TubeSpec::default()).unwrap();
        assert!(stack.is_empty());
        assert_eq!(stack.extent(), None);
    }

    #[test]
    fn two_layers_over_ten_pitches() {
        let wire = WireSpec::default();
        let profile =
            WindingProfile::new("two", vec![Section::new(10.0 * wire.pitch, 2)]).unwrap();
        let stack = digitize(&profile, &wire, &TubeSpec::default()).unwrap();
        assert_eq!(stack.len(), 20);
        assert_eq!(stack.len(), brute_force_count(&profile, wire.pitch));
        let r0 = TubeSpec::default().innermost_winding_radius(&wire);
        let inner = stack.loops().iter().filter(|l| l.radius == r0).count();
        let outer = stack
            .loops()
            .iter()
            .filter(|l| l.radius == r0 + wire.bare_diameter)
            .count();
        assert_eq!((inner, outer), (10, 10));
    }

    #[test]
    fn loops_sorted_by_position_then_radius() {
        let profile = preset("t-shape").unwrap();
        let stack = digitize(&profile, &WireSpec::default(), &TubeSpec::default()).unwrap();
        for w in stack.loops().windows(2) {
            assert!(w[0].x < w[1].x || (w[0].x == w[1].x && w[0].radius < w[1].radius));
        }
    }

    #[test]
    fn profile_longer_than_tube_is_rejected() {
        let profile = WindingProfile::new("long", vec![Section::new(0.4, 1)]).unwrap();
        let err = digitize(&profile, &WireSpec::default(), &TubeSpec::default()).unwrap_err();
        assert!(matches!(err, Error::Geometry(_)));
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(WireSpec::new(0.65e-3, 0.6e-3, 0.05).is_err());
        assert!(WireSpec::new(0.0, 0.6e-3, 0.05).is_err());
        assert!(TubeSpec::new(0.003, 0.004).is_err());
        assert!(WindingProfile::new("empty", vec![]).is_err());
        assert!(CoilElectrical::new(0.0, 1.0).is_err());
    }

    #[test]
    fn wire_length_is_sum_of_circumferences() {
        let wire = WireSpec::default();
        let profile = WindingProfile::new("p", vec![Section::new(0.01, 3)]).unwrap();
        let stack = digitize(&profile, &wire, &TubeSpec::default()).unwrap();
        let r0 = TubeSpec::default().innermost_winding_radius(&wire);
        let per_turn: f64 = (0..3)
            .map(|k| std::f64::consts::TAU * (r0 + k as f64 * wire.bare_diameter))
            .sum();
        let turns = profile.sections[0].turns_per_layer(wire.pitch) as f64;
        assert!((stack.wire_length() - turns * per_turn).abs() < 1e-12);
    }

    #[test]
    fn profile_toml_round_trip() {
        let text = "name = \"custom\"\n\n[[sections]]\nlength_mm = 20.4\nlayers = 9\n\n[[sections]]\nlength_mm = 5.0\nlayers = 0\n";
        let p = WindingProfile::from_toml_str(text).unwrap();
        assert_eq!(p.sections.len(), 2);
        assert!((p.sections[0].length - 0.0204).abs() < 1e-15);
        assert_eq!(p.to_toml_string(), text);
    }

    #[test]
    fn profile_rejects_unknown_keys() {
        let text = "name = \"x\"\nsections = [{ length_mm = 1.0, layers = 1, turns = 3 }]\n";
        assert!(WindingProfile::from_toml_str(text).is_err());
    }

    proptest::proptest! {
        #[test]
        fn count_matches_enumeration(
            sections in proptest::collection::vec((0.5f64..40.0, 0u32..6), 1..6)
        ) {
            let sections: Vec<Section> =
                sections.into_iter().map(|(mm, n)| Section::new(mm * 1e-3, n)).collect();
            let profile = WindingProfile::new("p", sections).unwrap();
            let wire = WireSpec::default();
            let stack = digitize(&profile, &wire, &TubeSpec::default()).unwrap();
            proptest::prop_assert_eq!(stack.len(), brute_force_count(&profile, wire.pitch));
            let again = digitize(&profile, &wire, &TubeSpec::default()).unwrap();
            proptest::prop_assert_eq!(stack.to_csv(), again.to_csv());
        }
    }
}
