//! Blume-Capel splitting points on the unit circle.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::free_energy::{blume_capel_f, PhaseLabel};

/// `Re f_+ - Re f_0` at `z = e^(i theta)` (equal to `Re f_- - Re f_0` there).
pub fn blume_capel_delta(coupling: f64, lambda: f64, theta: f64) -> f64 {
    let z = Complex64::from_polar(1.0, theta);
    let p = blume_capel_f(coupling, lambda, 2, z, PhaseLabel::Plus).map(|e| e.f.re);
    let o = blume_capel_f(coupling, lambda, 2, z, PhaseLabel::Zero).map(|e| e.f.re);
    match (p, o) {
        (Ok(p), Ok(o)) => p - o,
        _ => f64::NAN,
    }
}

/// `lambda_c^-` and `lambda_c^+`, the ends of the bifurcation range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlumeCapelCriticals {
    pub coupling: f64,
    pub lambda_minus: f64,
    pub lambda_plus: f64,
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Walks away from 0 in steps of `e^(-4J)` until `f` changes sign, then bisects.
fn root_from_origin<F: Fn(f64) -> f64>(f: F, direction: f64, scale: f64) -> Option<f64> {
    let f0 = f(0.0);
    let mut prev = 0.0;
    for k in 1..=400 {
        let x = direction * scale * k as f64;
        let fx = f(x);
        if !fx.is_finite() {
            return None;
        }
        if (fx > 0.0) != (f0 > 0.0) || fx == 0.0 {
            return Some(bisect(&f, prev, x));
        }
        prev = x;
    }
    None
}

/// Solves `Delta(theta = pi; lambda) = 0` and `Delta(theta = 0; lambda) = 0`
/// with the full truncated free energies.
pub fn blume_capel_criticals(coupling: f64) -> Result<BlumeCapelCriticals> {
    if !(coupling > 0.0 && coupling.is_finite()) {
        return Err(Error::InvalidModel(format!(
            "J must be positive, got {coupling}"
        )));
    }
    let eps = (-4.0 * coupling).exp();
    let minus = root_from_origin(|l| blume_capel_delta(coupling, l, PI), -1.0, eps)
        .ok_or_else(|| Error::Divergence("no lambda_c^- found".into()))?;
    let plus = root_from_origin(|l| blume_capel_delta(coupling, l, 0.0), 1.0, eps)
        .ok_or_else(|| Error::Divergence("no lambda_c^+ found".into()))?;
    Ok(BlumeCapelCriticals {
        coupling,
        lambda_minus: minus,
        lambda_plus: plus,
    })
}

impl BlumeCapelCriticals {
    /// Angle of the splitting points `e^(+-i theta_c)`; `None` outside
    /// `[lambda_c^-, lambda_c^+]`.
    pub fn theta_c(&self, lambda: f64) -> Option<f64> {
        if lambda < self.lambda_minus || lambda > self.lambda_plus {
            return None;
        }
        let d = |th: f64| blume_capel_delta(self.coupling, lambda, th);
        let (d0, dpi) = (d(0.0), d(PI));
        if d0 <= 0.0 {
            return Some(0.0);
        }
        if dpi >= 0.0 {
            return Some(PI);
        }
        Some(bisect(d, 0.0, PI))
    }
}
