use std::path::Path;

use coilgun::config::{CoilSource, RunConfig};
use coilgun::winding::{catalog, WindingProfile};

fn manifest(rel: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

#[test]
fn preset_files_match_catalog() {
    for info in catalog() {
        let path = manifest(&format!("presets/{}.toml", info.name));
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, info.profile.to_toml_string(), "{}", info.name);
        assert_eq!(WindingProfile::from_toml_str(&text).unwrap().sections.len(), info.profile.sections.len());
    }
}

#[test]
fn coil_g_config_loads() {
    let c = RunConfig::load(manifest("configs/coil_g.cfg")).unwrap();
    assert_eq!(c.schedule.to_string(), "F5 B5 R5 B10 F5 B5 R4");
    assert_eq!(c.coil.source, CoilSource::Preset("dual-9-5-1-5-9".into()));
    let e = c.electrical().unwrap();
    assert!((e.inductance - 94.9e-6).abs() < 1e-15);
    assert_eq!(e.resistance, 0.6);
    let once = c.to_toml_string();
    assert_eq!(RunConfig::from_toml_str(&once).unwrap().to_toml_string(), once);
}
