//! Complete elliptic integrals by the arithmetic-geometric mean.
//!
//! Both functions take the parameter `m = k²` with `0 <= m < 1`.

use std::f64::consts::FRAC_PI_2;

const AGM_TOL: f64 = 1e-16;
const AGM_MAX_ITER: usize = 64;

/// Complete elliptic integral of the first kind, K(m).
pub fn ellipk(m: f64) -> f64 {
    debug_assert!((0.0..1.0).contains(&m), "ellipk parameter out of range: {m}");
    let (mut a, mut b) = (1.0_f64, (1.0 - m).sqrt());
    for _ in 0..AGM_MAX_ITER {
        if (a - b).abs() <= AGM_TOL * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    FRAC_PI_2 / a
}

/// Complete elliptic integrals of both kinds, (K(m), E(m)).
///
/// E is recovered from the same AGM sequence as K using
/// `E = K (1 - sum_n 2^(n-1) c_n^2)` with `c_0^2 = m`.
pub fn ellipke(m: f64) -> (f64, f64) {
    debug_assert!((0.0..1.0).contains(&m), "ellipke parameter out of range: {m}");
    let (mut a, mut b) = (1.0_f64, (1.0 - m).sqrt());
    let mut sum = 0.5 * m;
    let mut weight = 0.5;
    for _ in 0..AGM_MAX_ITER {
        if (a - b).abs() <= AGM_TOL * a {
            break;
        }
        let c = 0.5 * (a - b);
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
        weight *= 2.0;
        sum += weight * c * c;
    }
    let k = FRAC_PI_2 / a;
    (k, k * (1.0 - sum))
}
