//! Lumped inductance and resistance of a digitized coil.
//!
//! Inductance is the sum of every loop's self-inductance plus the mutual
//! inductance of every coaxial loop pair (Maxwell's filament formula).

use super::{CoilElectrical, LoopStack, WireSpec};
use crate::elliptic::ellipke;
use crate::error::{Error, Result};
use crate::magnetostatics::MU_0;

/// Self-inductance of a thin circular loop of radius `r` made of wire with
/// conductor radius `a`: `mu0 r (ln(8r/a) - 2)`.
pub fn self_inductance(r: f64, a: f64) -> f64 {
    MU_0 * r * ((8.0 * r / a).ln() - 2.0)
}

/// Mutual inductance of two coaxial filament loops with radii `r1`, `r2`
/// whose planes are `dx` apart.
pub fn mutual_inductance(r1: f64, r2: f64, dx: f64) -> f64 {
    let sum = r1 + r2;
    let m = 4.0 * r1 * r2 / (sum * sum + dx * dx);
    let (k_int, e_int) = ellipke(m);
    let k = m.sqrt();
    MU_0 * (r1 * r2).sqrt() * ((2.0 - m) * k_int - 2.0 * e_int) / k
}

pub fn estimate_electrical(stack: &LoopStack, wire: &WireSpec) -> Result<CoilElectrical> {
    if stack.is_empty() {
        return Err(Error::Domain(
            "cannot estimate electrical parameters of an empty loop stack".into(),
        ));
    }
    wire.validate()?;
    let a = wire.conductor_radius();
    let loops = stack.loops();

    let self_sum: f64 = loops.iter().map(|l| self_inductance(l.radius, a)).sum();
    let mut mutual_sum = 0.0;
    for (i, li) in loops.iter().enumerate() {
        for lj in &loops[i + 1..] {
            mutual_sum += mutual_inductance(li.radius, lj.radius, lj.x - li.x);
        }
    }

    CoilElectrical::new(
        self_sum + 2.0 * mutual_sum,
        stack.wire_length() * wire.resistance_per_length,
    )
}
