//! Round trip from a simulated trace through the sensor log format and back.

use coilgun::circuit::{Capacitor, Circuit, SolverSettings};
use coilgun::measured::{analyze, synthesize_log, MeasuredLog, DEFAULT_DEAD_ZONE_A};
use coilgun::pulse::PulseSchedule;
use coilgun::winding::preset_info;

fn main() -> coilgun::Result<()> {
    let coil = preset_info("double")?.measured;
    let trace = Circuit::new(coil, Capacitor::default())
        .run(&PulseSchedule::parse("F20 B5 R10")?, &SolverSettings::default())?;
    let text = synthesize_log(&trace);
    let log = MeasuredLog::parse(&text)?;
    let report = analyze(&log, coil.resistance, DEFAULT_DEAD_ZONE_A)?;
    print!("{}", report.summary());
    println!("simulated resistive energy {:.6e} J", trace.dissipated.resistive);

    match MeasuredLog::parse("t_ms,sensor_V\n0,0.1\n1,0.2\n3,0.3\n") {
        Ok(_) => unreachable!("gap accepted"),
        Err(e) => println!("gapped log rejected: {e}"),
    }
    Ok(())
}
