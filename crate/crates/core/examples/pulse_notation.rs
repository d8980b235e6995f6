//! Parsing, canonicalizing and flipping drive schedules.

use coilgun::pulse::{canonicalize, PulseSchedule, PulseTemplate};

fn main() -> coilgun::Result<()> {
    let s = PulseSchedule::parse("F5 B5 R5 B10 F5 B5 R4")?;
    println!("total {} ms", s.total_ms());
    for (start, end, state) in s.intervals() {
        println!("  {:>5.1} .. {:>5.1} ms  {:?}", start * 1e3, end * 1e3, state);
    }
    println!("flipped: {}", s.flipped());
    println!("canonical: {}", canonicalize("f3 F2  b1 B4 r10")?);

    let template = PulseTemplate::parse("F? B5 R?")?;
    println!("{} open slots, filled: {}", template.open_slots(), template.fill(&[12, 8])?);

    for bad in ["F0", "X5", "F5B", ""] {
        match PulseSchedule::parse(bad) {
            Ok(s) => println!("{bad:?} -> {s}"),
            Err(e) => println!("{bad:?} -> {e}"),
        }
    }
    Ok(())
}
