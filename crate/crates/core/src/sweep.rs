//! Initial-displacement sweeps and pulse-schedule grid search.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::dynamics::{launch, LaunchSetup, SimResult};
use crate::error::{Error, Result};
use crate::pulse::PulseTemplate;

/// Largest number of launches a pulse search may request.
pub const DEFAULT_BUDGET: u64 = 100_000;

pub const GENERATED_BY: &str = concat!("coilgun ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Velocity,
    Efficiency,
}

impl Objective {
    pub fn name(self) -> &'static str {
        match self {
            Objective::Velocity => "velocity",
            Objective::Efficiency => "efficiency",
        }
    }

    pub fn score(self, p: &SweepPoint) -> f64 {
        match self {
            Objective::Velocity => p.exit_velocity,
            Objective::Efficiency => p.efficiency,
        }
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "velocity" => Ok(Objective::Velocity),
            "efficiency" => Ok(Objective::Efficiency),
            other => Err(Error::config("objective", format!("expected velocity or efficiency, got {other:?}"))),
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    #[default]
    Exhaustive,
    /// Start from the smallest value of every slot, then sweep one slot at a
    /// time over its grid keeping the best value, in slot order, once.
    CoordinateDescent,
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exhaustive" => Ok(Strategy::Exhaustive),
            "coordinate-descent" | "coordinate" => Ok(Strategy::CoordinateDescent),
            other => Err(Error::config("strategy", format!("expected exhaustive or coordinate-descent, got {other:?}"))),
        }
    }
}

/// Sweep input value. Ordering is the tie-break order.
#[derive(Debug, Clone, PartialEq, PartialOrd)]
pub enum SweepInput {
    DisplacementMm(f64),
    Durations(Vec<u32>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub input: SweepInput,
    /// Text written in the `input` column.
    pub label: String,
    pub exit_velocity: f64,
    pub efficiency: f64,
    pub stalled: bool,
}

impl SweepPoint {
    fn from_result(input: SweepInput, label: String, r: &SimResult) -> Self {
        Self {
            input,
            label,
            exit_velocity: r.exit_velocity,
            efficiency: r.efficiency,
            stalled: r.stalled,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Name of the swept variable.
    pub variable: String,
    /// Sorted by input.
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    fn new(variable: impl Into<String>, mut points: Vec<SweepPoint>) -> Self {
        points.sort_by(|a, b| a.input.partial_cmp(&b.input).expect("finite inputs"));
        Self {
            variable: variable.into(),
            points,
        }
    }

    /// Best point; the smallest input wins a tie.
    pub fn argmax(&self, objective: Objective) -> Option<&SweepPoint> {
        let mut best: Option<&SweepPoint> = None;
        for p in &self.points {
            if best.is_none_or(|b| objective.score(p) > objective.score(b)) {
                best = Some(p);
            }
        }
        best
    }

    pub fn argmax_index(&self, objective: Objective) -> Option<usize> {
        let best = self.argmax(objective)?;
        self.points.iter().position(|p| std::ptr::eq(p, best))
    }

    /// `input,velocity_mps,efficiency` rows followed by `#`-prefixed summary lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("input,velocity_mps,efficiency\n");
        for p in &self.points {
            out.push_str(&format!("{},{:.9e},{:.9e}\n", p.label, p.exit_velocity, p.efficiency));
        }
        out.push_str(&self.summary().lines().map(|l| format!("# {l}\n")).collect::<String>());
        out
    }

    pub fn summary(&self) -> String {
        let mut out = format!("generated_by = {GENERATED_BY}\nvariable = {}\npoints = {}\n", self.variable, self.points.len());
        for objective in [Objective::Velocity, Objective::Efficiency] {
            if let Some(p) = self.argmax(objective) {
                out.push_str(&format!(
                    "best_{} = {} (velocity_mps {:.6}, efficiency {:.6e})\n",
                    objective, p.label, p.exit_velocity, p.efficiency
                ));
            }
        }
        out
    }
}

/// Inclusive grid `from, from + step, ..., to` in millimetres.
pub fn displacement_grid_mm(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !(from.is_finite() && to.is_finite() && step.is_finite()) {
        return Err(Error::config("sweep", "range must be finite"));
    }
    if from > to {
        return Err(Error::config("sweep.min_mm", "must not exceed max_mm"));
    }
    if from < to && step <= 0.0 {
        return Err(Error::config("sweep.step_mm", "must be positive"));
    }
    if from == to {
        return Ok(vec![from]);
    }
    let n = ((to - from) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| from + k as f64 * step).collect())
}

fn evaluate<T, F>(items: &[T], parallel: bool, f: F) -> Result<Vec<SweepPoint>>
where
    T: Sync,
    F: Fn(&T) -> Result<SweepPoint> + Sync + Send,
{
    if parallel {
        items.par_iter().map(&f).collect()
    } else {
        items.iter().map(&f).collect()
    }
}

/// One launch per displacement (mm).
pub fn sweep_displacement(setup: &LaunchSetup, grid_mm: &[f64], parallel: bool) -> Result<SweepResult> {
    if grid_mm.is_empty() {
        return Err(Error::config("sweep", "displacement grid is empty"));
    }
    if grid_mm.iter().any(|x| !x.is_finite()) {
        return Err(Error::config("sweep", "displacements must be finite"));
    }
    let points = evaluate(grid_mm, parallel, |&x_mm| {
        let r = launch(&setup.with_x0(x_mm * 1e-3))?;
        Ok(SweepPoint::from_result(SweepInput::DisplacementMm(x_mm), format!("{x_mm}"), &r))
    })?;
    Ok(SweepResult::new("x0_mm", points))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseSearch {
    pub template: PulseTemplate,
    /// Candidate durations (ms) per open slot.
    pub grids: Vec<Vec<u32>>,
    pub strategy: Strategy,
    pub budget: u64,
}

impl PulseSearch {
    pub fn new(template: PulseTemplate, grids: Vec<Vec<u32>>) -> Result<Self> {
        if grids.len() != template.open_slots() {
            return Err(Error::config(
                "sweep.grids",
                format!("template has {} open slots but {} grids were given", template.open_slots(), grids.len()),
            ));
        }
        let grids: Vec<Vec<u32>> = grids
            .into_iter()
            .map(|mut g| {
                g.sort_unstable();
                g.dedup();
                g
            })
            .collect();
        if grids.iter().any(|g| g.is_empty()) {
            return Err(Error::config("sweep.grids", "every slot needs at least one duration"));
        }
        Ok(Self {
            template,
            grids,
            strategy: Strategy::Exhaustive,
            budget: DEFAULT_BUDGET,
        })
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    /// Launches the chosen strategy needs at most.
    pub fn planned_runs(&self) -> u64 {
        match self.strategy {
            Strategy::Exhaustive => self.grids.iter().fold(1u64, |acc, g| acc.saturating_mul(g.len() as u64)),
            Strategy::CoordinateDescent => 1 + self.grids.iter().map(|g| g.len() as u64 - 1).sum::<u64>(),
        }
    }

    /// Every slot combination, lexicographic.
    pub fn combinations(&self) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new()];
        for g in &self.grids {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    g.iter().map(move |&v| {
                        let mut next = prefix.clone();
                        next.push(v);
                        next
                    })
                })
                .collect();
        }
        out
    }
}

fn run_pulse(setup: &LaunchSetup, search: &PulseSearch, values: &[u32]) -> Result<SweepPoint> {
    let schedule = search.template.fill(values)?;
    let label = schedule.to_string();
    let r = launch(&setup.with_schedule(schedule))?;
    Ok(SweepPoint::from_result(SweepInput::Durations(values.to_vec()), label, &r))
}

/// Evaluates pulse schedules drawn from the template grids.
pub fn search_pulses(setup: &LaunchSetup, search: &PulseSearch, objective: Objective, parallel: bool) -> Result<SweepResult> {
    let runs = search.planned_runs();
    if runs > search.budget {
        return Err(Error::Budget { runs, budget: search.budget });
    }
    let variable = format!("schedule {}", search.template);
    match search.strategy {
        Strategy::Exhaustive => {
            let combos = search.combinations();
            let points = evaluate(&combos, parallel, |c| run_pulse(setup, search, c))?;
            Ok(SweepResult::new(variable, points))
        }
        Strategy::CoordinateDescent => {
            let mut seen: BTreeMap<Vec<u32>, SweepPoint> = BTreeMap::new();
            let mut current: Vec<u32> = search.grids.iter().map(|g| g[0]).collect();
            let start = run_pulse(setup, search, &current)?;
            seen.insert(current.clone(), start);
            for slot in 0..search.grids.len() {
                let candidates: Vec<Vec<u32>> = search.grids[slot]
                    .iter()
                    .map(|&v| {
                        let mut c = current.clone();
                        c[slot] = v;
                        c
                    })
                    .filter(|c| !seen.contains_key(c))
                    .collect();
                for p in evaluate(&candidates, parallel, |c| run_pulse(setup, search, c))? {
                    if let SweepInput::Durations(d) = &p.input {
                        seen.insert(d.clone(), p);
                    }
                }
                // Best along this slot's line; the smallest value wins a tie.
                let line = search.grids[slot].iter().map(|&v| {
                    let mut c = current.clone();
                    c[slot] = v;
                    c
                });
                let mut best: Option<(Vec<u32>, f64)> = None;
                for c in line {
                    let score = objective.score(&seen[&c]);
                    if best.as_ref().is_none_or(|(_, s)| score > *s) {
                        best = Some((c, score));
                    }
                }
                current = best.expect("grid is non-empty").0;
            }
            Ok(SweepResult::new(variable, seen.into_values().collect()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(input: SweepInput, v: f64, eta: f64) -> SweepPoint {
        SweepPoint {
            label: format!("{input:?}"),
            input,
            exit_velocity: v,
            efficiency: eta,
            stalled: v == 0.0,
        }
    }

    #[test]
    fn grid_is_inclusive() {
        let g = displacement_grid_mm(0.0, 60.0, 2.0).unwrap();
        assert_eq!(g.len(), 31);
        assert_eq!(g[30], 60.0);
        assert_eq!(displacement_grid_mm(5.0, 5.0, 0.0).unwrap(), vec![5.0]);
        assert!(displacement_grid_mm(10.0, 0.0, 1.0).is_err());
        assert!(displacement_grid_mm(0.0, 10.0, 0.0).is_err());
    }

    #[test]
    fn ties_go_to_smallest_input() {
        let r = SweepResult::new(
            "x0_mm",
            vec![
                point(SweepInput::DisplacementMm(4.0), 2.0, 0.1),
                point(SweepInput::DisplacementMm(2.0), 2.0, 0.3),
                point(SweepInput::DisplacementMm(0.0), 1.0, 0.3),
            ],
        );
        assert_eq!(r.argmax(Objective::Velocity).unwrap().input, SweepInput::DisplacementMm(2.0));
        assert_eq!(r.argmax(Objective::Efficiency).unwrap().input, SweepInput::DisplacementMm(0.0));
        assert_eq!(r.argmax_index(Objective::Velocity), Some(1));
    }

    #[test]
    fn lexicographic_ties_for_durations() {
        let r = SweepResult::new(
            "schedule",
            vec![
                point(SweepInput::Durations(vec![10, 5]), 3.0, 0.0),
                point(SweepInput::Durations(vec![5, 10]), 3.0, 0.0),
            ],
        );
        assert_eq!(r.argmax(Objective::Velocity).unwrap().input, SweepInput::Durations(vec![5, 10]));
    }

    #[test]
    fn csv_has_summary() {
        let r = SweepResult::new("x0_mm", vec![point(SweepInput::DisplacementMm(1.5), 2.0, 0.25)]);
        let csv = r.to_csv();
        assert!(csv.starts_with("input,velocity_mps,efficiency\n"));
        assert!(csv.contains("# generated_by = coilgun 0.1.0\n"));
        assert!(csv.lines().nth(1).unwrap().starts_with("DisplacementMm(1.5),2.000000000e0,2.500000000e-1"));
    }

    #[test]
    fn combinations_are_lexicographic() {
        let s = PulseSearch::new(PulseTemplate::parse("F? B2 R?").unwrap(), vec![vec![10, 5], vec![1, 2, 3]]).unwrap();
        let c = s.combinations();
        assert_eq!(c.len(), 6);
        assert_eq!(c[0], vec![5, 1]);
        assert_eq!(c[5], vec![10, 3]);
        assert_eq!(s.planned_runs(), 6);
        assert_eq!(s.with_strategy(Strategy::CoordinateDescent).planned_runs(), 4);
    }

    #[test]
    fn slot_count_mismatch() {
        assert!(PulseSearch::new(PulseTemplate::parse("F?").unwrap(), vec![vec![1], vec![2]]).is_err());
        assert!(PulseSearch::new(PulseTemplate::parse("F?").unwrap(), vec![vec![]]).is_err());
    }

    #[test]
    fn objective_parsing() {
        assert_eq!("Velocity".parse::<Objective>().unwrap(), Objective::Velocity);
        assert!("speed".parse::<Objective>().is_err());
        assert_eq!("coordinate-descent".parse::<Strategy>().unwrap(), Strategy::CoordinateDescent);
    }
}
