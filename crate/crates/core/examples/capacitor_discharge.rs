//! Coil current for a forward pulse followed by buffer, with the energy audit.

use coilgun::circuit::{Capacitor, Circuit, SolverSettings};
use coilgun::pulse::PulseSchedule;
use coilgun::winding::preset_info;

fn main() -> coilgun::Result<()> {
    let coil = preset_info("single")?.measured;
    let circuit = Circuit::new(coil, Capacitor::default());
    let trace = circuit.run(&PulseSchedule::parse("F10 B5 R5")?, &SolverSettings::default())?;
    for s in &trace.samples {
        println!("{:>4.0} ms  {:>8.3} A  {:>7.3} V  {:?}", s.t * 1e3, s.i_coil, s.v_cap, s.polarity);
    }
    let audit = trace.energy_audit();
    println!("peak current {:.2} A, final voltage {:.3} V", trace.peak_current(), trace.v_final());
    println!(
        "capacitor drop {:.4} J = resistive {:.4} + diode {:.4} + stored {:.2e} (imbalance {:.2e})",
        audit.capacitor_drop,
        audit.resistive,
        audit.diode,
        audit.coil_stored,
        audit.relative_imbalance()
    );
    Ok(())
}
