//! The six characterized coils, as winding profiles on the 14-inch former.
//!
//! Only the single-layer coil is fully dimensioned by construction (one layer
//! over the whole tube). The others are sized so their conductor length is
//! close to the 10 m of wire each coil was wound from; section lengths are
//! whole multiples of the default pitch. Each preset records its assumption.

use super::{CoilElectrical, Section, WindingProfile, DEFAULT_PITCH, DEFAULT_TUBE_LENGTH};
use crate::error::{Error, Result};

pub const PRESET_NAMES: [&str; 6] = [
    "single",
    "double",
    "dual-9-5-1-5-9",
    "exponential",
    "t-shape",
    "linear-accelerator",
];

#[derive(Debug, Clone)]
pub struct PresetInfo {
    pub name: &'static str,
    pub title: &'static str,
    pub profile: WindingProfile,
    /// Geometry assumptions behind the section lengths.
    pub assumption: &'static str,
    /// Bench-measured inductance and resistance of the wound coil.
    pub measured: CoilElectrical,
}

fn turns(n: u32) -> f64 {
    n as f64 * DEFAULT_PITCH
}

fn measured(inductance_uh: f64, resistance_ohm: f64) -> CoilElectrical {
    CoilElectrical {
        inductance: inductance_uh * 1e-6,
        resistance: resistance_ohm,
    }
}

fn build(name: &'static str) -> Option<PresetInfo> {
    let info = match name {
        "single" => PresetInfo {
            name,
            title: "Single-Layer Coil",
            profile: profile(name, vec![Section::new(DEFAULT_TUBE_LENGTH, 1)]),
            assumption: "one layer over the full 355.6 mm tube (523 turns, about 14 m of wire)",
            measured: measured(34.2, 0.5),
        },
        "double" => PresetInfo {
            name,
            title: "Double-Layer Coil",
            profile: profile(name, vec![Section::new(turns(173), 2)]),
            assumption: "two layers of 173 turns (117.64 mm) from the entrance, about 10.0 m of wire",
            measured: measured(61.9, 0.6),
        },
        "dual-9-5-1-5-9" => {
            let group = [9, 5, 1, 1, 5, 9].map(|n| Section::new(turns(4), n));
            let mut sections = group.to_vec();
            sections.push(Section::gap(turns(24)));
            sections.extend_from_slice(&group);
            PresetInfo {
                name,
                title: "Dual 9-5-1-5-9 Coil (Coil G)",
                profile: profile(name, sections),
                assumption: "two 16.32 mm groups of six 2.72 mm (4-turn) sections with 9,5,1,1,5,9 layers, \
                             separated by a 16.32 mm gap; about 9.5 m of wire",
                measured: measured(94.9, 0.6),
            }
        }
        "exponential" => PresetInfo {
            name,
            title: "Exponential Coil (Coil S)",
            profile: profile(
                name,
                [8, 6, 4, 3, 2, 1]
                    .iter()
                    .map(|&n| Section::new(turns(12), n))
                    .collect(),
            ),
            assumption: "stepped approximation with 8,6,4,3,2,1 layers over six equal 8.16 mm (12-turn) \
                         sections; about 10.3 m of wire",
            measured: measured(127.6, 0.7),
        },
        "t-shape" => PresetInfo {
            name,
            title: "T-Shaped Coil (Coil T)",
            profile: profile(
                name,
                vec![
                    Section::new(turns(3), 30),
                    Section::new(turns(11), 4),
                    Section::new(turns(2), 1),
                ],
            ),
            assumption: "30, 4 and 1 layers over 2.04, 7.48 and 1.36 mm (3, 11, 2 turns), keeping a \
                         20:70:10 axial split at about 9.3 m of wire",
            measured: measured(147.4, 0.6),
        },
        "linear-accelerator" => {
            let gap = (DEFAULT_TUBE_LENGTH - 5.0 * turns(35)) / 4.0;
            let mut sections = Vec::new();
            for i in 0..5 {
                sections.push(Section::new(turns(35), 2));
                if i < 4 {
                    sections.push(Section::gap(gap));
                }
            }
            PresetInfo {
                name,
                title: "Linear Accelerator Coil",
                profile: profile(name, sections),
                assumption: "five equal double-layer sections of 35 turns (23.8 mm) with four equal \
                             59.15 mm gaps filling the tube; about 10.1 m of wire",
                measured: measured(49.5, 0.7),
            }
        }
        _ => return None,
    };
    Some(info)
}

fn profile(name: &str, sections: Vec<Section>) -> WindingProfile {
    WindingProfile::new(name, sections).expect("preset profiles are valid")
}

pub fn preset_info(name: &str) -> Result<PresetInfo> {
    let key = name.trim().to_ascii_lowercase();
    PRESET_NAMES
        .iter()
        .find(|&&n| n == key)
        .and_then(|&n| build(n))
        .ok_or_else(|| Error::UnknownPreset(name.to_string()))
}

pub fn preset(name: &str) -> Result<WindingProfile> {
    preset_info(name).map(|p| p.profile)
}

pub fn catalog() -> Vec<PresetInfo> {
    PRESET_NAMES.iter().filter_map(|n| build(n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::winding::{digitize, TubeSpec, WireSpec};

    #[test]
    fn single_spans_the_tube() {
        let p = preset("single").unwrap();
        assert_eq!(p.sections.len(), 1);
        assert_eq!(p.sections[0].layers, 1);
        assert_eq!(p.sections[0].length, DEFAULT_TUBE_LENGTH);
    }

    #[test]
    fn dual_has_mirrored_groups_and_gap() {
        let p = preset("dual-9-5-1-5-9").unwrap();
        let layers: Vec<u32> = p.sections.iter().map(|s| s.layers).collect();
        assert_eq!(layers, vec![9, 5, 1, 1, 5, 9, 0, 9, 5, 1, 1, 5, 9]);
    }

    #[test]
    fn t_shape_layers() {
        let layers: Vec<u32> = preset("t-shape")
            .unwrap()
            .sections
            .iter()
            .map(|s| s.layers)
            .collect();
        assert_eq!(layers, vec![30, 4, 1]);
    }

    #[test]
    fn linear_accelerator_fills_tube() {
        let p = preset("linear-accelerator").unwrap();
        assert_eq!(p.sections.len(), 9);
        assert!((p.total_length() - DEFAULT_TUBE_LENGTH).abs() < 1e-12);
        assert_eq!(p.sections.iter().filter(|s| s.layers == 2).count(), 5);
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(preset("spiral"), Err(Error::UnknownPreset(_))));
        assert!(preset(" Single ").is_ok());
    }

    #[test]
    fn all_presets_fit_default_tube() {
        for info in catalog() {
            let stack = digitize(&info.profile, &WireSpec::default(), &TubeSpec::default()).unwrap();
            assert!(!stack.is_empty(), "{}", info.name);
            if info.name != "single" {
                let wire = stack.wire_length();
                assert!((9.0..10.5).contains(&wire), "{}: {wire} m", info.name);
            }
        }
    }
}
