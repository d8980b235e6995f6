//! On-axis axial field of coaxial loops and of continuous layered windings.
//!
//! Every function here evaluates the axial component on the coil axis only;
//! the radial component vanishes there. Positions are absolute axial
//! coordinates, so the closed forms are evaluated at `x` by translating the
//! winding's left edge from `left_edge` to `left_edge - x`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::winding::LoopStack;

/// Vacuum permeability, 4π×10⁻⁷ H/m.
pub const MU_0: f64 = 4.0e-7 * PI;

/// Axial field and its axial gradient at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub x: f64,
    pub b: f64,
    pub db_dx: f64,
}

impl FieldSample {
    pub fn scaled(self, factor: f64) -> Self {
        Self {
            x: self.x,
            b: self.b * factor,
            db_dx: self.db_dx * factor,
        }
    }
}

/// Field of one loop of radius `radius` carrying `current`, at axial
/// distance `offset` from the loop plane.
#[inline]
pub fn b_loop(current: f64, radius: f64, offset: f64) -> f64 {
    let s = offset * offset + radius * radius;
    MU_0 * current * radius * radius / (2.0 * s * s.sqrt())
}

/// Axial derivative of [`b_loop`] with respect to the observation point.
#[inline]
pub fn db_loop_dx(current: f64, radius: f64, offset: f64) -> f64 {
    let s = offset * offset + radius * radius;
    -1.5 * MU_0 * current * radius * radius * offset / (s * s * s.sqrt())
}

/// Field and gradient of the whole stack at `x`, per ampere.
pub fn unit_field(stack: &LoopStack, x: f64) -> FieldSample {
    let (mut b, mut g) = (0.0, 0.0);
    for l in stack.loops() {
        let dx = x - l.x;
        let r2 = l.radius * l.radius;
        let s = dx * dx + r2;
        let inv = 1.0 / (s * s.sqrt());
        b += r2 * inv;
        g += r2 * dx * inv / s;
    }
    FieldSample {
        x,
        b: 0.5 * MU_0 * b,
        db_dx: -1.5 * MU_0 * g,
    }
}

/// Superposed field of every loop in `stack`, each carrying `current`.
pub fn b_superpose(stack: &LoopStack, current: f64, x: f64) -> FieldSample {
    unit_field(stack, x).scaled(current)
}

/// Continuous single layer (or a pair of layers).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerGeometry {
    /// Turns per layer.
    pub turns: f64,
    /// Axial length of the winding.
    pub length: f64,
    /// Axial position of the winding's left edge.
    pub left_edge: f64,
    /// Radius of the (inner) layer.
    pub radius: f64,
    /// Radial increment to the second layer.
    pub layer_step: f64,
}

impl LayerGeometry {
    fn validate(&self) -> Result<()> {
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(Error::Domain("layer length must be positive".into()));
        }
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::Domain("layer radius must be positive".into()));
        }
        if !(self.layer_step.is_finite() && self.layer_step >= 0.0) {
            return Err(Error::Domain("layer step must be non-negative".into()));
        }
        Ok(())
    }
}

/// Uniform winding filling the annulus between two radii.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultilayerGeometry {
    /// Total turns across all layers.
    pub turns: f64,
    pub length: f64,
    pub left_edge: f64,
    pub inner_radius: f64,
    pub outer_radius: f64,
}

// (a + L)/sqrt((a + L)^2 + R^2) - a/sqrt(a^2 + R^2)
fn edge_bracket(a: f64, length: f64, radius: f64) -> f64 {
    let far = a + length;
    far / far.hypot(radius) - a / a.hypot(radius)
}

/// Closed-form field of one continuous layer at `x`.
pub fn b_single_layer(g: &LayerGeometry, current: f64, x: f64) -> Result<f64> {
    g.validate()?;
    Ok(single_layer_unchecked(g.turns, g.length, g.left_edge - x, g.radius) * current)
}

fn single_layer_unchecked(turns: f64, length: f64, a: f64, radius: f64) -> f64 {
    MU_0 * turns / (2.0 * length) * edge_bracket(a, length, radius)
}

/// Closed-form field of two layers at radii `radius` and `radius + layer_step`.
pub fn b_double_layer(g: &LayerGeometry, current: f64, x: f64) -> Result<f64> {
    g.validate()?;
    let a = g.left_edge - x;
    let inner = single_layer_unchecked(g.turns, g.length, a, g.radius);
    let outer = single_layer_unchecked(g.turns, g.length, a, g.radius + g.layer_step);
    Ok((inner + outer) * current)
}

/// Logarithmic closed form for a uniform multilayer winding.
pub fn b_multilayer(g: &MultilayerGeometry, current: f64, x: f64) -> Result<f64> {
    if !(g.length.is_finite() && g.length > 0.0) {
        return Err(Error::Domain("winding length must be positive".into()));
    }
    if !(g.inner_radius.is_finite() && g.inner_radius > 0.0) {
        return Err(Error::Domain("inner radius must be positive".into()));
    }
    if !(g.outer_radius.is_finite() && g.outer_radius > g.inner_radius) {
        return Err(Error::Domain(
            "outer radius must exceed inner radius".into(),
        ));
    }
    let (ro, ri) = (g.outer_radius, g.inner_radius);
    // z ln((sqrt(z^2 + Ro^2) + Ro) / (sqrt(z^2 + Ri^2) + Ri)) is the radial
    // antiderivative of z / sqrt(z^2 + R^2) between Ri and Ro.
    let term = |z: f64| z * ((z.hypot(ro) + ro) / (z.hypot(ri) + ri)).ln();
    let a = g.left_edge - x;
    let bracket = term(a + g.length) - term(a);
    Ok(MU_0 * g.turns * current / (2.0 * g.length * (ro - ri)) * bracket)
}

/// Samples the stack's field on `[from, to]` every `step` (inclusive of both ends
/// when `to - from` is a whole number of steps).
pub fn sample_field(stack: &LoopStack, current: f64, from: f64, to: f64, step: f64) -> Result<Vec<FieldSample>> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::config("grid", "field grid step must be positive"));
    }
    if !(from.is_finite() && to.is_finite() && to >= from) {
        return Err(Error::config("grid", "field grid range must satisfy from <= to"));
    }
    let n = ((to - from) / step + 1e-9).floor() as usize;
    Ok((0..=n)
        .map(|k| b_superpose(stack, current, from + k as f64 * step))
        .collect())
}

/// `x_mm,B_T,dBdx_T_per_m`
pub fn field_csv(samples: &[FieldSample]) -> String {
    let mut out = String::from("x_mm,B_T,dBdx_T_per_m\n");
    for s in samples {
        out.push_str(&format!("{:.6},{:.9e},{:.9e}\n", s.x * 1e3, s.b, s.db_dx));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::winding::{digitize, preset, CurrentLoop, TubeSpec, WireSpec};
    use std::f64::consts::TAU;

    // Direct Biot–Savart line integral around a loop in the x = 0 plane,
    // axial component at (offset, 0, 0).
    fn biot_savart_axial(current: f64, radius: f64, offset: f64) -> f64 {
        let n = 4096;
        let h = TAU / n as f64;
        let mut bx = 0.0;
        for i in 0..n {
            let t = (i as f64 + 0.5) * h;
            let (s, c) = t.sin_cos();
            // source point (0, R cos t, R sin t), dl = (0, -R sin t, R cos t) h
            let dl = [0.0, -radius * s * h, radius * c * h];
            let rvec = [offset, -radius * c, -radius * s];
            let r3 = (rvec[0] * rvec[0] + rvec[1] * rvec[1] + rvec[2] * rvec[2]).powf(1.5);
            // x component of dl × r
            bx += (dl[1] * rvec[2] - dl[2] * rvec[1]) / r3;
        }
        MU_0 * current / (4.0 * PI) * bx
    }

    #[test]
    fn loop_centre_matches_biot_savart() {
        let r = 5e-3;
        let b = b_loop(1.0, r, 0.0);
        assert!((b - 1.2566e-4).abs() < 1e-8);
        assert!((b - MU_0 / (2.0 * r)).abs() < 1e-18);
        for &x in &[0.0, 1e-3, -4e-3, 2e-2] {
            let oracle = biot_savart_axial(1.0, r, x);
            assert!(((b_loop(1.0, r, x) - oracle) / oracle).abs() < 1e-10, "x = {x}");
        }
    }

    #[test]
    fn loop_far_field_is_dipole() {
        let r = 5e-3;
        let x = 10.0 * r;
        let dipole = MU_0 * r * r / (2.0 * x * x * x);
        let rel = (b_loop(1.0, r, x) - dipole).abs() / dipole;
        assert!(rel < 0.015, "{rel}");
        assert!((rel - (1.0 - 1.01f64.powf(-1.5))).abs() < 1e-12);
    }

    #[test]
    fn loop_zero_current_and_parity() {
        assert_eq!(b_loop(0.0, 5e-3, 1e-3), 0.0);
        assert_eq!(b_loop(2.0, 5e-3, 3e-3), b_loop(2.0, 5e-3, -3e-3));
        assert_eq!(b_loop(-2.0, 5e-3, 3e-3), -b_loop(2.0, 5e-3, 3e-3));
        assert_eq!(db_loop_dx(2.0, 5e-3, 0.0), 0.0);
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let stack = digitize(&preset("dual-9-5-1-5-9").unwrap(), &WireSpec::default(), &TubeSpec::default()).unwrap();
        let h = 1e-6;
        let b = |x: f64| b_superpose(&stack, 1.0, x).b;
        for i in 0..60 {
            let x = -0.01 + i as f64 * 1.13e-3;
            let g = b_superpose(&stack, 1.0, x).db_dx;
            let fd = (8.0 * (b(x + h) - b(x - h)) - (b(x + 2.0 * h) - b(x - 2.0 * h))) / (12.0 * h);
            assert!((g - fd).abs() <= 1e-4 * g.abs().max(fd.abs()) + 1e-9, "x = {x}: {g} vs {fd}");
        }
    }

    #[test]
    fn single_loop_stack_equals_loop() {
        let stack = LoopStack::from_loops(vec![CurrentLoop { x: 0.01, radius: 4e-3 }]);
        let s = b_superpose(&stack, 3.0, 0.017);
        assert!((s.b - b_loop(3.0, 4e-3, 0.007)).abs() <= 1e-15 * s.b);
        assert!((s.db_dx - db_loop_dx(3.0, 4e-3, 0.007)).abs() <= 1e-15 * s.db_dx.abs());
    }

    #[test]
    fn symmetric_stack_centre_has_no_gradient() {
        let stack = digitize(&preset("single").unwrap(), &WireSpec::default(), &TubeSpec::default()).unwrap();
        let loops = stack.loops();
        let c = 0.5 * (loops[0].x + loops[loops.len() - 1].x);
        let s = b_superpose(&stack, 1.0, c);
        assert!(s.db_dx.abs() < 1e-12, "{}", s.db_dx);
    }

    #[test]
    fn long_single_layer_centre() {
        let g = LayerGeometry { turns: 523.0, length: 0.3556, left_edge: 0.0, radius: 4.275e-3, layer_step: 0.0 };
        let b = b_single_layer(&g, 1.0, 0.1778).unwrap();
        let limit = MU_0 * 523.0 / 0.3556;
        assert!((b - limit).abs() / limit < 0.01);
        assert_eq!(b_single_layer(&g, 0.0, 0.1).unwrap(), 0.0);
    }

    #[test]
    fn double_layer_is_two_singles() {
        let g = LayerGeometry { turns: 100.0, length: 0.05, left_edge: 0.01, radius: 4.3e-3, layer_step: 0.65e-3 };
        let outer = LayerGeometry { radius: g.radius + g.layer_step, ..g };
        for &x in &[-0.02, 0.0, 0.012, 0.035, 0.09] {
            let d = b_double_layer(&g, 2.0, x).unwrap();
            let s = b_single_layer(&g, 2.0, x).unwrap() + b_single_layer(&outer, 2.0, x).unwrap();
            assert!((d - s).abs() <= 1e-15 * d.abs());
            let coincident = LayerGeometry { layer_step: 0.0, ..g };
            assert_eq!(b_double_layer(&coincident, 2.0, x).unwrap(), 2.0 * b_single_layer(&g, 2.0, x).unwrap());
        }
    }

    #[test]
    fn multilayer_domain_errors() {
        let g = MultilayerGeometry { turns: 10.0, length: 0.05, left_edge: 0.0, inner_radius: 5e-3, outer_radius: 5e-3 };
        assert!(matches!(b_multilayer(&g, 1.0, 0.0), Err(Error::Domain(_))));
        let ok = MultilayerGeometry { outer_radius: 8e-3, ..g };
        assert_eq!(b_multilayer(&ok, 0.0, 0.02).unwrap(), 0.0);
    }

    #[test]
    fn multilayer_thin_limit() {
        let ri = 5e-3;
        let g = MultilayerGeometry { turns: 200.0, length: 0.08, left_edge: 0.0, inner_radius: ri, outer_radius: ri * (1.0 + 1e-5) };
        let single = LayerGeometry { turns: 200.0, length: 0.08, left_edge: 0.0, radius: ri, layer_step: 0.0 };
        for &x in &[-0.03, 0.0, 0.02, 0.04, 0.1] {
            let m = b_multilayer(&g, 1.0, x).unwrap();
            let s = b_single_layer(&single, 1.0, x).unwrap();
            assert!(((m - s) / s).abs() < 1e-4, "x = {x}");
        }
    }

    #[test]
    fn sample_grid_is_inclusive() {
        let stack = LoopStack::from_loops(vec![CurrentLoop { x: 0.0, radius: 4e-3 }]);
        let samples = sample_field(&stack, 1.0, 0.0, 1e-3, 1e-4).unwrap();
        assert_eq!(samples.len(), 11);
        assert!(sample_field(&stack, 1.0, 0.0, 1e-3, 0.0).is_err());
    }

    proptest::proptest! {
        #[test]
        fn field_is_linear_in_current(i in -100.0f64..100.0, x in -0.05f64..0.4) {
            let stack = digitize(&preset("exponential").unwrap(), &WireSpec::default(), &TubeSpec::default()).unwrap();
            let one = b_superpose(&stack, 1.0, x);
            let s = b_superpose(&stack, i, x);
            proptest::prop_assert_eq!(s.b, one.b * i);
            proptest::prop_assert_eq!(s.db_dx, one.db_dx * i);
        }

        #[test]
        fn mirror_parity(delta in 0.0f64..0.1) {
            let stack = digitize(&preset("dual-9-5-1-5-9").unwrap(), &WireSpec::default(), &TubeSpec::default()).unwrap();
            let (a, b) = stack.extent().unwrap();
            let c = 0.5 * (a + b);
            let p = b_superpose(&stack, 1.0, c + delta);
            let m = b_superpose(&stack, 1.0, c - delta);
            let scale = b_superpose(&stack, 1.0, c).b.abs() + p.b.abs();
            proptest::prop_assert!((p.b - m.b).abs() <= 1e-12 * scale);
            let gscale = p.db_dx.abs().max(1e-6);
            proptest::prop_assert!((p.db_dx + m.db_dx).abs() <= 1e-9 * gscale);
        }
    }
}
