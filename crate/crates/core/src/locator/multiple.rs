//! Points where three phases coexist.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::CoexistenceCurve;
use crate::error::{Error, Result};
use crate::free_energy::{PhaseLabel, PhaseModel, PhasePair};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplePoint {
    pub z: Complex64,
    pub phases: Vec<PhaseLabel>,
    /// `c_delta * L^-(d-1)`; zeros inside are not predicted.
    pub exclusion_radius: f64,
}

const RESIDUAL: f64 = 1e-10;
const MAX_STEPS: usize = 50;

/// 2D Newton for `Re f_eff` equal across the three `phases`, from `seed`.
pub fn find_multiple_points(
    model: &PhaseModel,
    phases: [PhaseLabel; 3],
    seed: Complex64,
    c_delta: f64,
) -> Result<MultiplePoint> {
    let p1 = PhasePair(phases[0], phases[1]);
    let p2 = PhasePair(phases[0], phases[2]);
    let (l1, l2) = (model.level(p1), model.level(p2));
    let mut z = seed;
    for _ in 0..MAX_STEPS {
        let (f1, d1) = model.difference(p1, z)?;
        let (f2, d2) = model.difference(p2, z)?;
        let (g1, g2) = (f1.re - l1, f2.re - l2);
        if g1.abs().max(g2.abs()) <= RESIDUAL {
            let mut ph = phases.to_vec();
            ph.sort();
            return Ok(MultiplePoint {
                z,
                phases: ph,
                exclusion_radius: c_delta * model.side().powf(-(model.spec.d as f64 - 1.0)),
            });
        }
        // d Re G / dx = Re G', d Re G / dy = -Im G'
        let (a, b, c, d) = (d1.re, -d1.im, d2.re, -d2.im);
        let det = a * d - b * c;
        if !(det.abs() > 0.0) {
            return Err(Error::Divergence(format!("singular Jacobian at {z}")));
        }
        let dx = (d * g1 - b * g2) / det;
        let dy = (a * g2 - c * g1) / det;
        z -= Complex64::new(dx, dy);
        if !(z.re.is_finite() && z.im.is_finite()) || z.norm() == 0.0 {
            return Err(Error::Divergence(format!(
                "multiple-point Newton left the plane from {seed}"
            )));
        }
    }
    Err(Error::Divergence(format!(
        "multiple-point Newton from {seed} did not converge in {MAX_STEPS} steps"
    )))
}

/// Multiple points met along traced curves: for each third phase, sign
/// changes of its `Re f_eff` gap along a curve seed a Newton solve.
/// Results are deduplicated and sorted by angle.
pub fn detect_multiple_points(
    model: &PhaseModel,
    curves: &[CoexistenceCurve],
    c_delta: f64,
) -> Vec<MultiplePoint> {
    let mut found: Vec<MultiplePoint> = Vec::new();
    for c in curves {
        for &third in model.phases().iter().filter(|&&p| !c.pair.contains(p)) {
            let gap = |z: Complex64| -> Option<f64> {
                let a = model.effective(c.pair.0, z).ok()?;
                let t = model.effective(third, z).ok()?;
                Some(t.f_eff.re - a.f_eff.re)
            };
            let gaps: Vec<Option<f64>> = c.points.iter().map(|p| gap(p.z)).collect();
            for (i, w) in gaps.windows(2).enumerate() {
                let (Some(a), Some(b)) = (w[0], w[1]) else {
                    continue;
                };
                if a * b > 0.0 || (a == 0.0 && b == 0.0) {
                    continue;
                }
                let t = if a == b { 0.5 } else { a / (a - b) };
                let seed = c.points[i].z + (c.points[i + 1].z - c.points[i].z) * t;
                if let Ok(mp) =
                    find_multiple_points(model, [c.pair.0, c.pair.1, third], seed, c_delta)
                {
                    if found.iter().all(|f| (f.z - mp.z).norm() > 1e-7) {
                        found.push(mp);
                    }
                }
            }
        }
    }
    found.sort_by(|a, b| {
        a.z.arg()
            .total_cmp(&b.z.arg())
            .then(a.z.norm().total_cmp(&b.z.norm()))
    });
    found
}
