//! Complete elliptic integrals and the ellipse perimeter by the
//! arithmetic-geometric mean.

use std::f64::consts::PI;

use crate::error::{domain, Result};

const AGM_MAX_ITER: usize = 64;
const AGM_REL_TOL: f64 = 1e-15;

/// Runs the AGM on `(a, b)` and returns `(M(a, b), Σ 2^(n-1) c_n²)` where
/// `c_0² = a² - b²` and `c_{n+1} = (a_n - b_n)/2`.
fn agm_with_defect(a: f64, b: f64) -> (f64, f64) {
    let mut a = a;
    let mut b = b;
    let mut defect = 0.5 * (a * a - b * b);
    let mut weight = 0.5;
    for _ in 0..AGM_MAX_ITER {
        if (a - b).abs() <= AGM_REL_TOL * a {
            break;
        }
        let c = 0.5 * (a - b);
        let next_a = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next_a;
        weight *= 2.0;
        defect += weight * c * c;
    }
    (0.5 * (a + b), defect)
}

/// Complete elliptic integral of the first kind `K(m)`, parameter `m = k²`.
pub fn ellipk(m: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&m) {
        return Err(domain(format!("ellipk needs 0 <= m < 1, got {m}")));
    }
    let (mean, _) = agm_with_defect(1.0, (1.0 - m).sqrt());
    Ok(PI / (2.0 * mean))
}

/// Complete elliptic integral of the second kind `E(m)`, parameter `m = k²`.
pub fn ellipe(m: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&m) {
        return Err(domain(format!("ellipe needs 0 <= m <= 1, got {m}")));
    }
    if m == 1.0 {
        return Ok(1.0);
    }
    let (mean, defect) = agm_with_defect(1.0, (1.0 - m).sqrt());
    Ok(PI / (2.0 * mean) * (1.0 - defect))
}

/// Perimeter of the ellipse with semiaxes `a` and `b`.
pub fn ellipse_perimeter(a: f64, b: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) || a < 0.0 || b < 0.0 {
        return Err(domain(format!("ellipse semiaxes must be finite and >= 0, got ({a}, {b})")));
    }
    let (major, minor) = if a >= b { (a, b) } else { (b, a) };
    if major == 0.0 {
        return Ok(0.0);
    }
    if minor == 0.0 {
        return Ok(4.0 * major);
    }
    let (mean, defect) = agm_with_defect(major, minor);
    Ok(2.0 * PI * (major * major - defect) / mean)
}
