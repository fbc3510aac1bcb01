//! From free energies to zero positions: coexistence curves, phase
//! quantization, zero density and multiple points.

mod critical;
mod multiple;
mod predict;
mod quantize;
mod refine;
mod trace;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::free_energy::PhasePair;
use crate::io::fmt_f64;
use crate::model::ModelKind;

pub use critical::{blume_capel_criticals, blume_capel_delta, BlumeCapelCriticals};
pub use multiple::{detect_multiple_points, find_multiple_points, MultiplePoint};
pub use predict::{predict, symmetrize, to_u_plane, PredictOptions, Prediction};
pub use quantize::{
    density_profile, quantize_zeros, zero_density, DensityRow, ExcludedCrossing, Exclusion,
    Quantized,
};
pub use refine::refine_two_term;
pub use trace::{seed_scan, trace_curve, trace_pair, SeedGrid};

/// Annulus `r_min <= |z| <= r_max` inside which curves are traced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceWindow {
    pub r_min: f64,
    pub r_max: f64,
}

impl Default for TraceWindow {
    fn default() -> Self {
        Self {
            r_min: 0.05,
            r_max: 20.0,
        }
    }
}

impl TraceWindow {
    pub fn new(r_min: f64, r_max: f64) -> Self {
        Self { r_min, r_max }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        let r = z.norm();
        r >= self.r_min && r <= self.r_max
    }

    /// Window that keeps the truncated expansions away from their spurious
    /// far-field level sets.
    pub fn for_model(kind: ModelKind) -> Self {
        match kind {
            ModelKind::Ising => Self::default(),
            ModelKind::BlumeCapel => Self::new(0.5, 2.0),
            ModelKind::Potts => Self::new(0.3, 3.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceOptions {
    pub window: TraceWindow,
    pub ds_init: f64,
    pub ds_max: f64,
    /// Below this the tracer gives up and returns the partial curve.
    pub ds_min: f64,
    /// Curve residual `|Re F - level|` every point must reach.
    pub tau_curve: f64,
    pub max_corrector: usize,
    pub max_points: usize,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            window: TraceWindow::default(),
            ds_init: 1e-3,
            ds_max: 1e-2,
            ds_min: 1e-12,
            tau_curve: 1e-10,
            max_corrector: 10,
            max_points: 2_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub z: Complex64,
    /// `V Im(f_a - f_b)`, unwrapped along the curve.
    pub phase_accum: f64,
    /// Both phases of the pair lie strictly below every other phase.
    pub stable: bool,
    pub arc_length: f64,
}

/// A traced solution set of `Re(f_a - f_b) = (1/V) ln(q_a/q_b)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoexistenceCurve {
    pub pair: PhasePair,
    pub level: f64,
    pub volume: f64,
    pub points: Vec<CurvePoint>,
    /// The last point repeats the first (with phase advanced by the winding).
    pub closed: bool,
    /// Why tracing stopped early, if it did.
    pub diagnostic: Option<String>,
}

impl CoexistenceCurve {
    /// Total phase change from first to last point.
    pub fn winding(&self) -> f64 {
        match (self.points.first(), self.points.last()) {
            (Some(a), Some(b)) => b.phase_accum - a.phase_accum,
            _ => 0.0,
        }
    }

    pub fn all_stable(&self) -> bool {
        self.points.iter().all(|p| p.stable)
    }

    pub fn any_stable(&self) -> bool {
        self.points.iter().any(|p| p.stable)
    }

    pub fn length(&self) -> f64 {
        self.points.last().map(|p| p.arc_length).unwrap_or(0.0)
    }

    /// Distance from `z` to the polyline through the points.
    pub fn distance_to(&self, z: Complex64) -> f64 {
        match self.points.len() {
            0 => f64::INFINITY,
            1 => (self.points[0].z - z).norm(),
            _ => self
                .points
                .windows(2)
                .map(|w| segment_distance(z, w[0].z, w[1].z))
                .fold(f64::INFINITY, f64::min),
        }
    }
}

pub(crate) fn segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a) * ab.conj()).re / len2;
    (p - (a + ab * t.clamp(0.0, 1.0))).norm()
}

pub const CURVES_HEADER: &str = "pair,index,re,im,phase_accum,stable";

pub fn curves_to_csv(curves: &[CoexistenceCurve]) -> String {
    let mut out = String::from(CURVES_HEADER);
    out.push('\n');
    for c in curves {
        for (i, p) in c.points.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                c.pair,
                i,
                fmt_f64(p.z.re),
                fmt_f64(p.z.im),
                fmt_f64(p.phase_accum),
                p.stable
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_distance_cases() {
        let a = Complex64::new(0.0, 0.0);
        let b = Complex64::new(1.0, 0.0);
        assert_eq!(segment_distance(Complex64::new(0.5, 2.0), a, b), 2.0);
        assert_eq!(segment_distance(Complex64::new(-3.0, 4.0), a, b), 5.0);
        assert_eq!(segment_distance(Complex64::new(0.2, 0.0), a, a), 0.2);
    }

    #[test]
    fn window_membership() {
        let w = TraceWindow::default();
        assert!(w.contains(Complex64::new(1.0, 0.0)));
        assert!(!w.contains(Complex64::new(0.01, 0.0)));
        assert!(!w.contains(Complex64::new(0.0, 25.0)));
    }
}
