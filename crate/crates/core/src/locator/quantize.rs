//! Phase quantization `V Im(f_a - f_b) = pi (mod 2 pi)` along traced curves,
//! and the zero density `(V / 2 pi) |F'|`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CoexistenceCurve, MultiplePoint};
use crate::error::Result;
use crate::free_energy::{PhaseModel, PhasePair};
use crate::roots::Zero;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exclusion {
    Unstable,
    NearMultiplePoint,
}

/// A quantization crossing that was not kept as a zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExcludedCrossing {
    pub z: Complex64,
    pub pair: PhasePair,
    pub index: i64,
    pub reason: Exclusion,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Quantized {
    pub zeros: Vec<Zero>,
    pub excluded: Vec<ExcludedCrossing>,
}

/// Crossings of `pi + 2 pi k` by the unwrapped phase, located by linear
/// interpolation between neighbouring curve points.
///
/// Each segment owns the half-open phase interval `(p_n, p_n+1]`, so a
/// closed curve of winding `2 pi N` yields exactly `N` crossings. A crossing
/// is kept only if both bracketing points are stable and it lies outside
/// every exclusion disk. Residuals of the interpolated zeros are left at 0.
pub fn quantize_zeros(curve: &CoexistenceCurve, multiple_points: &[MultiplePoint]) -> Quantized {
    let mut out = Quantized::default();
    for w in curve.points.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let (lo, hi) = if a.phase_accum <= b.phase_accum {
            (a.phase_accum, b.phase_accum)
        } else {
            (b.phase_accum, a.phase_accum)
        };
        let k_min = ((lo - PI) / (2.0 * PI)).floor() as i64 + 1;
        let k_max = ((hi - PI) / (2.0 * PI)).floor() as i64;
        for k in k_min..=k_max {
            let target = PI + 2.0 * PI * k as f64;
            let t = (target - a.phase_accum) / (b.phase_accum - a.phase_accum);
            let z = a.z + (b.z - a.z) * t;
            let reason = if !(a.stable && b.stable) {
                Some(Exclusion::Unstable)
            } else if multiple_points
                .iter()
                .any(|m| (m.z - z).norm() < m.exclusion_radius)
            {
                Some(Exclusion::NearMultiplePoint)
            } else {
                None
            };
            match reason {
                Some(reason) => out.excluded.push(ExcludedCrossing {
                    z,
                    pair: curve.pair,
                    index: k,
                    reason,
                }),
                None => out.zeros.push(Zero {
                    z,
                    residual: 0.0,
                    pair: Some(curve.pair),
                    index: Some(k),
                }),
            }
        }
    }
    out
}

/// Zeros per unit arc length near `z` on the curve of `pair`.
pub fn zero_density(model: &PhaseModel, pair: PhasePair, z: Complex64) -> Result<f64> {
    let (_, df) = model.difference(pair, z)?;
    Ok(model.volume / (2.0 * PI) * df.norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityRow {
    pub arc_length: f64,
    pub density: f64,
    /// Trapezoidal integral of the density from the first point.
    pub cumulative: f64,
}

pub fn density_profile(model: &PhaseModel, curve: &CoexistenceCurve) -> Result<Vec<DensityRow>> {
    let mut rows: Vec<DensityRow> = Vec::with_capacity(curve.points.len());
    for p in &curve.points {
        let density = zero_density(model, curve.pair, p.z)?;
        let cumulative = match rows.last() {
            Some(prev) => {
                prev.cumulative + 0.5 * (prev.density + density) * (p.arc_length - prev.arc_length)
            }
            None => 0.0,
        };
        rows.push(DensityRow {
            arc_length: p.arc_length,
            density,
            cumulative,
        });
    }
    Ok(rows)
}
