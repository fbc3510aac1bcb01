//! Seeds, curves, multiple points and quantized zeros in one pass.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{
    detect_multiple_points, quantize_zeros, refine_two_term, trace_pair, CoexistenceCurve,
    ExcludedCrossing, MultiplePoint, SeedGrid, TraceOptions,
};
use crate::error::Result;
use crate::free_energy::{PhaseLabel, PhaseModel, PhasePair};
use crate::model::ModelKind;
use crate::roots::{Source, Variable, Zero, ZeroSet};

#[derive(Debug, Clone, Copy)]
pub struct PredictOptions {
    pub trace: TraceOptions,
    pub grid: SeedGrid,
    /// Exclusion radius constant: disks of radius `c_delta L^-(d-1)`.
    pub c_delta: f64,
    /// Polish interpolated crossings on the two-term model.
    pub refine: bool,
    /// Tolerance for the exact-symmetry step.
    pub symmetry_tol: f64,
}

impl PredictOptions {
    pub fn for_model(kind: ModelKind) -> Self {
        Self {
            trace: TraceOptions {
                window: super::TraceWindow::for_model(kind),
                ..TraceOptions::default()
            },
            grid: SeedGrid::default(),
            c_delta: 1.0,
            refine: true,
            symmetry_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Prediction {
    pub model: PhaseModel,
    pub curves: Vec<CoexistenceCurve>,
    pub multiple_points: Vec<MultiplePoint>,
    /// In `u = z^2` for Ising, `z` otherwise.
    pub zeros: ZeroSet,
    pub excluded: Vec<ExcludedCrossing>,
    /// Crossings whose two-term refinement failed; they keep the interpolated position.
    pub refine_failures: usize,
    pub trusted: bool,
}

impl Prediction {
    pub fn excluded_near_multiple_points(&self) -> usize {
        self.excluded
            .iter()
            .filter(|e| e.reason == super::Exclusion::NearMultiplePoint)
            .count()
    }
}

pub fn predict(model: &PhaseModel, opts: &PredictOptions) -> Result<Prediction> {
    let per_pair: Vec<Vec<CoexistenceCurve>> = model
        .pairs()
        .par_iter()
        .map(|&p| trace_pair(model, p, opts.grid, &opts.trace))
        .collect::<Result<_>>()?;
    let curves: Vec<CoexistenceCurve> = per_pair.into_iter().flatten().collect();
    let multiple_points = detect_multiple_points(model, &curves, opts.c_delta);

    let mut zeros = Vec::new();
    let mut excluded = Vec::new();
    for c in &curves {
        let q = quantize_zeros(c, &multiple_points);
        zeros.extend(q.zeros);
        excluded.extend(q.excluded);
    }

    let mut refine_failures = 0;
    if opts.refine {
        let refined: Vec<Option<(Complex64, f64)>> = zeros
            .par_iter()
            .map(|z: &Zero| match (z.pair, z.index) {
                (Some(p), Some(k)) => refine_two_term(model, p, z.z, k).ok(),
                _ => None,
            })
            .collect();
        for (z, r) in zeros.iter_mut().zip(refined) {
            match r {
                Some((w, res)) => {
                    z.z = w;
                    z.residual = res;
                }
                None => refine_failures += 1,
            }
        }
    }

    let inversion = matches!(model.spec.kind, ModelKind::Ising | ModelKind::BlumeCapel);
    let zeros = symmetrize(zeros, inversion, opts.symmetry_tol);
    let mut set = ZeroSet::new(Variable::Z, Source::Predicted, zeros);
    if model.spec.kind == ModelKind::Ising {
        set = to_u_plane(&set);
    }
    set.sort_by_angle();
    Ok(Prediction {
        model: model.clone(),
        curves,
        multiple_points,
        zeros: set,
        excluded,
        refine_failures,
        trusted: model.trusted(),
    })
}

fn mirror_pair(p: PhasePair) -> PhasePair {
    let flip = |l: PhaseLabel| match l {
        PhaseLabel::Plus => PhaseLabel::Minus,
        PhaseLabel::Minus => PhaseLabel::Plus,
        other => other,
    };
    let (a, b) = (flip(p.0), flip(p.1));
    if a <= b {
        PhasePair(a, b)
    } else {
        PhasePair(b, a)
    }
}

/// Makes a predicted set exactly closed under conjugation and, with
/// `inversion`, under `z -> 1/conj(z)`.
///
/// The upper half plane (and, with inversion, the closed exterior of the
/// unit circle) is taken as the representative part; zeros within `tol` of
/// the real axis or the unit circle are snapped onto it.
pub fn symmetrize(zeros: Vec<Zero>, inversion: bool, tol: f64) -> Vec<Zero> {
    let mut half: Vec<Zero> = Vec::with_capacity(zeros.len());
    for mut z in zeros {
        let t = tol * z.z.norm().max(1.0);
        if z.z.im > t {
            half.push(z);
        } else if z.z.im.abs() <= t {
            z.z = Complex64::new(z.z.re, 0.0);
            half.push(z);
        }
    }
    let mut conj: Vec<Zero> = Vec::with_capacity(2 * half.len());
    for z in half {
        if z.z.im != 0.0 {
            let mut c = z.clone();
            c.z = z.z.conj();
            c.index = z.index.map(|k| -k - 1);
            conj.push(c);
        }
        conj.push(z);
    }
    if !inversion {
        return conj;
    }
    let mut out = Vec::with_capacity(conj.len());
    for mut z in conj {
        let r = z.z.norm();
        if (r - 1.0).abs() <= tol {
            z.z /= r;
            out.push(z);
        } else if r > 1.0 {
            let mut m = z.clone();
            m.z = z.z / (r * r);
            m.pair = z.pair.map(mirror_pair);
            // f_mirror(1/conj z) = conj f(z): the phase changes sign
            m.index = z.index.map(|k| -k - 1);
            out.push(z);
            out.push(m);
        }
    }
    out
}

/// Maps an Ising `z`-plane set to `u = z^2`, keeping one of each `+-z` pair
/// (the one with `arg z` in `(-pi/2, pi/2]`).
pub fn to_u_plane(set: &ZeroSet) -> ZeroSet {
    let eps = 1e-9;
    let zeros = set
        .zeros
        .iter()
        .filter(|z| {
            let a = z.z.arg();
            a > -FRAC_PI_2 + eps && a <= FRAC_PI_2 + eps
        })
        .map(|z| {
            let mut u = z.clone();
            u.z = z.z * z.z;
            u
        })
        .collect();
    ZeroSet::new(Variable::U, set.source, zeros)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero(re: f64, im: f64) -> Zero {
        Zero {
            z: Complex64::new(re, im),
            residual: 0.0,
            pair: None,
            index: Some(0),
        }
    }

    #[test]
    fn symmetrize_closes_under_both_maps() {
        let raw = vec![
            zero(1.2, 0.3),
            zero(1.2, -0.30001),
            zero(0.5, 1e-12),
            zero(0.6, 0.8 + 1e-11),
            zero(0.3, 0.2),
        ];
        let s = symmetrize(raw, true, 1e-9);
        let pts: Vec<Complex64> = s.iter().map(|z| z.z).collect();
        for p in &pts {
            assert!(pts.iter().any(|q| *q == p.conj()));
            let inv = 1.0 / p.conj();
            assert!(pts.iter().any(|q| (q - inv).norm() <= 1e-15 * inv.norm()));
        }
        // 1.2+0.3i and its conjugate, both mirrored; the snapped circle pair
        assert_eq!(pts.len(), 6);
    }

    #[test]
    fn u_plane_keeps_one_of_each_pair() {
        let zs = ZeroSet::new(
            Variable::Z,
            Source::Predicted,
            vec![
                zero(0.0, 1.0),
                zero(0.0, -1.0),
                zero(0.6, 0.8),
                zero(-0.6, -0.8),
            ],
        );
        let u = to_u_plane(&zs);
        assert_eq!(u.len(), 2);
        assert_eq!(u.variable, Variable::U);
    }
}
