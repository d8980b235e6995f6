//! Forward/Buffer/Reverse pulse schedules and the H-bridge they drive.
//!
//! A schedule is written as whitespace-separated tokens such as
//! `F5 B5 R5 B10 F5 B5 R4`: a state letter followed by a duration in whole
//! milliseconds. Segments are left-closed and right-open in time.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Longest schedule accepted unless a caller asks otherwise.
pub const DEFAULT_MAX_SCHEDULE_MS: u32 = 200;

/// Bridge conduction state. The discriminant is the coil polarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BridgeState {
    /// SSR1 and SSR2 closed, current driven forward.
    Forward,
    /// All switches open; any coil current free-wheels through the flyback diodes.
    Buffer,
    /// SSR3 and SSR4 closed, current driven in reverse.
    Reverse,
}

impl BridgeState {
    pub fn polarity(self) -> i8 {
        match self {
            BridgeState::Forward => 1,
            BridgeState::Buffer => 0,
            BridgeState::Reverse => -1,
        }
    }

    pub fn letter(self) -> char {
        match self {
            BridgeState::Forward => 'F',
            BridgeState::Buffer => 'B',
            BridgeState::Reverse => 'R',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'F' => Some(BridgeState::Forward),
            'B' => Some(BridgeState::Buffer),
            'R' => Some(BridgeState::Reverse),
            _ => None,
        }
    }

    /// The state with the opposite drive direction.
    pub fn flipped(self) -> Self {
        match self {
            BridgeState::Forward => BridgeState::Reverse,
            BridgeState::Buffer => BridgeState::Buffer,
            BridgeState::Reverse => BridgeState::Forward,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PulseSegment {
    pub state: BridgeState,
    pub duration_ms: u32,
}

impl PulseSegment {
    pub fn new(state: BridgeState, duration_ms: u32) -> Self {
        Self { state, duration_ms }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PulseSchedule {
    segments: Vec<PulseSegment>,
}

impl PulseSchedule {
    pub fn new(segments: Vec<PulseSegment>) -> Result<Self> {
        Self::with_max(segments, DEFAULT_MAX_SCHEDULE_MS)
    }

    pub fn with_max(segments: Vec<PulseSegment>, max_total_ms: u32) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::config("schedule", "schedule has no segments"));
        }
        if let Some(i) = segments.iter().position(|s| s.duration_ms == 0) {
            return Err(Error::config(
                "schedule",
                format!("segment {} has zero duration", i + 1),
            ));
        }
        let total: u64 = segments.iter().map(|s| s.duration_ms as u64).sum();
        if total > max_total_ms as u64 {
            return Err(Error::config(
                "schedule",
                format!("total duration {total} ms exceeds the {max_total_ms} ms limit"),
            ));
        }
        Ok(Self { segments })
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse_with_max(text, DEFAULT_MAX_SCHEDULE_MS)
    }

    pub fn segments(&self) -> &[PulseSegment] {
        &self.segments
    }

    pub fn total_ms(&self) -> u32 {
        self.segments.iter().map(|s| s.duration_ms).sum()
    }

    /// End of the last segment in seconds.
    pub fn total_seconds(&self) -> f64 {
        self.total_ms() as f64 / 1000.0
    }

    /// Bridge state at time `t` (seconds from the start of the schedule).
    /// Times past the end, and negative times, are all-off.
    pub fn polarity_at(&self, t: f64) -> BridgeState {
        if !(t >= 0.0) {
            return BridgeState::Buffer;
        }
        let mut end_ms = 0u32;
        for seg in &self.segments {
            end_ms += seg.duration_ms;
            if t < end_ms as f64 / 1000.0 {
                return seg.state;
            }
        }
        BridgeState::Buffer
    }

    /// `(start_s, end_s, state)` for every segment.
    pub fn intervals(&self) -> Vec<(f64, f64, BridgeState)> {
        let mut start_ms = 0u32;
        self.segments
            .iter()
            .map(|s| {
                let a = start_ms;
                start_ms += s.duration_ms;
                (a as f64 / 1000.0, start_ms as f64 / 1000.0, s.state)
            })
            .collect()
    }

    /// Same timing with Forward and Reverse exchanged.
    pub fn flipped(&self) -> Self {
        Self {
            segments: self
                .segments
                .iter()
                .map(|s| PulseSegment::new(s.state.flipped(), s.duration_ms))
                .collect(),
        }
    }
}

impl fmt::Display for PulseSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.segments.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}{}", s.state.letter(), s.duration_ms)?;
        }
        Ok(())
    }
}

impl FromStr for PulseSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

fn parse_token(index: usize, token: &str) -> Result<(BridgeState, &str)> {
    let mut chars = token.chars();
    let first = chars.next().expect("tokens are non-empty");
    let state = BridgeState::from_letter(first)
        .ok_or_else(|| Error::parse(index, format!("unknown segment letter `{first}` in `{token}`")))?;
    Ok((state, chars.as_str()))
}

fn parse_duration(index: usize, token: &str, digits: &str) -> Result<u32> {
    if digits.is_empty() {
        return Err(Error::parse(index, format!("missing duration in `{token}`")));
    }
    if digits.starts_with('-') {
        return Err(Error::parse(index, format!("negative duration in `{token}`")));
    }
    if !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::parse(index, format!("trailing characters in `{token}`")));
    }
    let ms: u32 = digits
        .parse()
        .map_err(|_| Error::parse(index, format!("duration out of range in `{token}`")))?;
    if ms == 0 {
        return Err(Error::parse(index, format!("zero duration in `{token}`")));
    }
    Ok(ms)
}

pub fn parse_with_max(text: &str, max_total_ms: u32) -> Result<PulseSchedule> {
    let mut segments = Vec::new();
    let mut total: u64 = 0;
    for (i, token) in text.split_whitespace().enumerate() {
        let index = i + 1;
        let (state, digits) = parse_token(index, token)?;
        let duration_ms = parse_duration(index, token, digits)?;
        total += duration_ms as u64;
        if total > max_total_ms as u64 {
            return Err(Error::parse(
                index,
                format!("schedule exceeds the {max_total_ms} ms limit"),
            ));
        }
        segments.push(PulseSegment::new(state, duration_ms));
    }
    if segments.is_empty() {
        return Err(Error::parse(0, "empty schedule"));
    }
    Ok(PulseSchedule { segments })
}

/// Canonical spelling of a schedule: uppercase letters, single spaces.
pub fn canonicalize(text: &str) -> Result<String> {
    PulseSchedule::parse(text).map(|s| s.to_string())
}

/// Magnitude of the inductive voltage `L dI/dt` when `delta_i` amps are
/// switched in `dt` seconds.
pub fn back_emf_estimate(inductance: f64, delta_i: f64, dt: f64) -> Result<f64> {
    if !(dt > 0.0) {
        return Err(Error::Domain("switching time must be positive".into()));
    }
    Ok((inductance * delta_i / dt).abs())
}

/// A schedule shape with open duration slots, written like `F? B? R?`.
/// Fixed durations may be mixed in (`F5 B? R5`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PulseTemplate {
    slots: Vec<(BridgeState, Option<u32>)>,
}

impl PulseTemplate {
    pub fn parse(text: &str) -> Result<Self> {
        let mut slots = Vec::new();
        for (i, token) in text.split_whitespace().enumerate() {
            let index = i + 1;
            let (state, rest) = parse_token(index, token)?;
            if rest == "?" {
                slots.push((state, None));
            } else {
                slots.push((state, Some(parse_duration(index, token, rest)?)));
            }
        }
        if slots.is_empty() {
            return Err(Error::parse(0, "empty template"));
        }
        Ok(Self { slots })
    }

    /// Number of open slots.
    pub fn open_slots(&self) -> usize {
        self.slots.iter().filter(|s| s.1.is_none()).count()
    }

    /// Fills the open slots in order.
    pub fn fill(&self, values: &[u32]) -> Result<PulseSchedule> {
        if values.len() != self.open_slots() {
            return Err(Error::config(
                "template",
                format!(
                    "template has {} open slots but {} values were given",
                    self.open_slots(),
                    values.len()
                ),
            ));
        }
        let mut it = values.iter();
        let segments = self
            .slots
            .iter()
            .map(|&(state, fixed)| {
                PulseSegment::new(state, fixed.unwrap_or_else(|| *it.next().unwrap()))
            })
            .collect();
        PulseSchedule::new(segments)
    }
}

impl fmt::Display for PulseTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (state, fixed)) in self.slots.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match fixed {
                Some(ms) => write!(f, "{}{}", state.letter(), ms)?,
                None => write!(f, "{}?", state.letter())?,
            }
        }
        Ok(())
    }
}
