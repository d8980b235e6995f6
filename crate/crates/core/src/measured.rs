//! Current-sensor logs: one `t_ms,sensor_V` row per millisecond.

use std::fmt::Write as _;
use std::path::Path;

use crate::circuit::CurrentTrace;
use crate::error::{Error, Result};
use crate::pulse::BridgeState;

/// Hall sensor sensitivity.
pub const SENSOR_VOLTS_PER_AMP: f64 = 0.03;
/// Currents at or below this magnitude count as no drive.
pub const DEFAULT_DEAD_ZONE_A: f64 = 1.0;

const HEADER: [&str; 2] = ["t_ms", "sensor_V"];

#[derive(Debug, Clone, PartialEq)]
pub struct MeasuredLog {
    pub t_ms: Vec<i64>,
    pub sensor_v: Vec<f64>,
}

impl MeasuredLog {
    pub fn current(&self, row: usize) -> f64 {
        self.sensor_v[row] / SENSOR_VOLTS_PER_AMP
    }

    pub fn currents(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.current(k)).collect()
    }

    pub fn len(&self) -> usize {
        self.t_ms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_ms.is_empty()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Row numbers in errors count the header as row 1.
    pub fn parse(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let headers = reader.headers().map_err(|e| Error::Ingest { row: 1, message: e.to_string() })?;
        if headers.iter().collect::<Vec<_>>() != HEADER {
            return Err(Error::Ingest {
                row: 1,
                message: format!("expected header `{}`", HEADER.join(",")),
            });
        }
        let mut log = MeasuredLog { t_ms: Vec::new(), sensor_v: Vec::new() };
        for (k, record) in reader.records().enumerate() {
            let row = k + 2;
            let record = record.map_err(|e| Error::Ingest { row, message: e.to_string() })?;
            let field = |i: usize| record.get(i).unwrap_or("");
            let t: i64 = field(0).parse().map_err(|_| Error::Ingest {
                row,
                message: format!("t_ms {:?} is not an integer", field(0)),
            })?;
            let v: f64 = field(1)
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| Error::Ingest { row, message: format!("sensor_V {:?} is not a number", field(1)) })?;
            if let Some(&prev) = log.t_ms.last() {
                if t <= prev {
                    return Err(Error::Ingest { row, message: format!("time {t} ms does not increase after {prev} ms") });
                }
                if t != prev + 1 {
                    return Err(Error::Ingest { row, message: format!("missing rows between {prev} ms and {t} ms") });
                }
            }
            log.t_ms.push(t);
            log.sensor_v.push(v);
        }
        if log.is_empty() {
            return Err(Error::Ingest { row: 2, message: "no data rows".into() });
        }
        Ok(log)
    }
}

/// Log rows of a simulated trace, as the sensor would have written them.
/// The trace must be logged at a whole-millisecond cadence.
pub fn synthesize_log(trace: &CurrentTrace) -> String {
    let mut out = format!("{}\n", HEADER.join(","));
    for s in &trace.samples {
        let t_ms = (s.t * 1e3).round() as i64;
        writeln!(out, "{t_ms},{:.9e}", s.i_coil * SENSOR_VOLTS_PER_AMP).expect("string write");
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectedSegment {
    pub state: BridgeState,
    pub start_ms: i64,
    pub end_ms: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogReport {
    pub rows: usize,
    pub duration_s: f64,
    /// Signed `∫ I dt`.
    pub charge: f64,
    /// `∫ |I| dt`.
    pub absolute_charge: f64,
    /// `∫ I² R dt` for the given coil resistance.
    pub resistive_energy: f64,
    pub peak_current: f64,
    /// Runs of positive, negative or dead-zone current. A flyback tail stays in
    /// the drive segment it follows because its current keeps the same sign.
    pub segments: Vec<DetectedSegment>,
}

impl LogReport {
    /// Segments as pulse notation, e.g. `F12 B3 R10`.
    pub fn inferred_schedule(&self) -> String {
        self.segments
            .iter()
            .map(|s| format!("{}{}", s.state.letter(), s.end_ms - s.start_ms))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn summary(&self) -> String {
        format!(
            "rows = {}\nduration_ms = {:.0}\ncharge_c = {:.6e}\nabsolute_charge_c = {:.6e}\n\
             resistive_energy_j = {:.6e}\npeak_current_a = {:.6}\ninferred_schedule = \"{}\"\n",
            self.rows,
            self.duration_s * 1e3,
            self.charge,
            self.absolute_charge,
            self.resistive_energy,
            self.peak_current,
            self.inferred_schedule()
        )
    }
}

/// Trapezoidal integrals over the 1 ms rows and sign-run segmentation.
pub fn analyze(log: &MeasuredLog, resistance: f64, dead_zone: f64) -> Result<LogReport> {
    if !(resistance.is_finite() && resistance >= 0.0) {
        return Err(Error::config("resistance_ohm", "must be non-negative"));
    }
    if !(dead_zone.is_finite() && dead_zone >= 0.0) {
        return Err(Error::config("dead_zone_a", "must be non-negative"));
    }
    let i = log.currents();
    let h = 1e-3;
    let (mut charge, mut abs_charge, mut energy) = (0.0, 0.0, 0.0);
    for w in i.windows(2) {
        charge += 0.5 * h * (w[0] + w[1]);
        abs_charge += 0.5 * h * (w[0].abs() + w[1].abs());
        energy += 0.5 * h * resistance * (w[0] * w[0] + w[1] * w[1]);
    }
    let classify = |current: f64| {
        if current > dead_zone {
            BridgeState::Forward
        } else if current < -dead_zone {
            BridgeState::Reverse
        } else {
            BridgeState::Buffer
        }
    };
    let mut segments: Vec<DetectedSegment> = Vec::new();
    // Row k stands for the millisecond [t_k, t_k + 1).
    for (k, &current) in i.iter().enumerate() {
        let state = classify(current);
        let t = log.t_ms[k];
        match segments.last_mut() {
            Some(seg) if seg.state == state => seg.end_ms = t + 1,
            _ => segments.push(DetectedSegment { state, start_ms: t, end_ms: t + 1 }),
        }
    }
    Ok(LogReport {
        rows: log.len(),
        duration_s: (log.len() - 1) as f64 * h,
        charge,
        absolute_charge: abs_charge,
        resistive_energy: energy,
        peak_current: i.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        segments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn log_text(rows: &[(i64, f64)]) -> String {
        let mut s = String::from("t_ms,sensor_V\n");
        for (t, v) in rows {
            s.push_str(&format!("{t},{v}\n"));
        }
        s
    }

    #[test]
    fn constant_sensor_voltage() {
        let rows: Vec<(i64, f64)> = (0..10).map(|t| (t, 1.5)).collect();
        let log = MeasuredLog::parse(&log_text(&rows)).unwrap();
        for k in 0..10 {
            assert!((log.current(k) - 50.0).abs() < 1e-12);
        }
        let r = analyze(&log, 0.5, DEFAULT_DEAD_ZONE_A).unwrap();
        assert!((r.charge - 0.45).abs() < 1e-12);
        assert!((r.resistive_energy - 50.0 * 50.0 * 0.5 * 9e-3).abs() < 1e-9);
        assert_eq!(r.inferred_schedule(), "F10");
    }

    #[test]
    fn empty_data_is_an_error() {
        assert!(matches!(MeasuredLog::parse("t_ms,sensor_V\n"), Err(Error::Ingest { .. })));
        assert!(matches!(MeasuredLog::parse(""), Err(Error::Ingest { row: 1, .. })));
    }

    #[test]
    fn cadence_errors_carry_row_numbers() {
        let gap = log_text(&[(0, 0.1), (1, 0.2), (3, 0.3)]);
        assert!(matches!(MeasuredLog::parse(&gap), Err(Error::Ingest { row: 4, .. })));
        let back = log_text(&[(0, 0.1), (1, 0.2), (1, 0.3)]);
        assert!(matches!(MeasuredLog::parse(&back), Err(Error::Ingest { row: 4, .. })));
        let frac = "t_ms,sensor_V\n0,0.1\n1.5,0.2\n";
        assert!(matches!(MeasuredLog::parse(frac), Err(Error::Ingest { row: 3, .. })));
        assert!(MeasuredLog::parse("time,volts\n0,1\n").is_err());
    }

    #[test]
    fn segments_follow_sign_runs() {
        let mut rows = Vec::new();
        for t in 0..5 {
            rows.push((t, 1.2));
        }
        for t in 5..7 {
            rows.push((t, 0.0));
        }
        for t in 7..10 {
            rows.push((t, -0.9));
        }
        let r = analyze(&MeasuredLog::parse(&log_text(&rows)).unwrap(), 0.5, DEFAULT_DEAD_ZONE_A).unwrap();
        assert_eq!(r.inferred_schedule(), "F5 B2 R3");
        assert_eq!(r.segments[2], DetectedSegment { state: BridgeState::Reverse, start_ms: 7, end_ms: 10 });
        assert!((r.peak_current - 40.0).abs() < 1e-12);
    }
}
