//! Predictor-corrector continuation of `g(z) = Re F(z) - level = 0`, `F = f_a - f_b`.
//!
//! The gradient of `g` in the plane is `conj(F')`, so `i conj(F') / |F'|` is
//! the unit tangent along which `Im F` increases at rate `|F'|`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{segment_distance, CoexistenceCurve, CurvePoint, TraceOptions};
use crate::error::{Error, Result};
use crate::free_energy::{PhaseModel, PhasePair};

const SEED_RESIDUAL: f64 = 1e-6;
const MIN_GRADIENT: f64 = 1e-14;

#[derive(Debug, Clone, Copy)]
struct Node {
    z: Complex64,
    df: Complex64,
    phase: f64,
}

impl Node {
    fn tangent(&self) -> Complex64 {
        Complex64::i() * self.df.conj() / self.df.norm()
    }
}

enum Ending {
    Closed,
    LeftWindow,
    Underflow,
    TooManyPoints,
}

struct Tracer<'a> {
    model: &'a PhaseModel,
    pair: PhasePair,
    level: f64,
    opts: &'a TraceOptions,
}

impl Tracer<'_> {
    /// Newton along the gradient; `None` if it does not reach `tau_curve`.
    fn correct(
        &self,
        mut z: Complex64,
    ) -> Result<Option<(Complex64, Complex64, Complex64, usize)>> {
        for it in 0..=self.opts.max_corrector {
            let (f, df) = self.model.difference(self.pair, z)?;
            let mag = df.norm();
            if !(mag >= MIN_GRADIENT) {
                return Err(Error::DegenerateGradient { z, magnitude: mag });
            }
            let g = f.re - self.level;
            if g.abs() <= self.opts.tau_curve {
                return Ok(Some((z, f, df, it)));
            }
            if it == self.opts.max_corrector {
                break;
            }
            z -= df.conj() * (g / (mag * mag));
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Ok(None);
            }
        }
        Ok(None)
    }

    /// `V Im F(z)` shifted by the multiple of `2 pi` closest to `estimate`.
    fn unwrap(&self, f: Complex64, estimate: f64) -> f64 {
        let raw = self.model.volume * f.im;
        raw + 2.0 * PI * ((estimate - raw) / (2.0 * PI)).round()
    }

    fn march(&self, start: Node, dir: f64, seed: Complex64) -> Result<(Vec<Node>, Ending)> {
        let v = self.model.volume;
        let mut out = Vec::new();
        let mut cur = start;
        let mut ds = self.opts.ds_init;
        let mut left_seed = false;
        loop {
            if out.len() >= self.opts.max_points {
                return Ok((out, Ending::TooManyPoints));
            }
            if ds < self.opts.ds_min {
                return Ok((out, Ending::Underflow));
            }
            let t = cur.tangent() * dir;
            let predicted = cur.z + t * ds;
            let corrected = match self.correct(predicted) {
                Ok(c) => c,
                Err(Error::DegenerateGradient { .. }) => None,
                Err(e) => return Err(e),
            };
            let Some((z, f, df, iters)) = corrected else {
                ds *= 0.5;
                continue;
            };
            if iters > 4 {
                ds *= 0.5;
                continue;
            }
            let next_t = Complex64::i() * df.conj() / df.norm() * dir;
            if (next_t * t.conj()).re <= 0.0 {
                ds *= 0.5;
                continue;
            }
            let chord = (z - cur.z).norm();
            let estimate = cur.phase + dir * v * chord * 0.5 * (cur.df.norm() + df.norm());
            let phase = self.unwrap(f, estimate);
            let inc = (phase - cur.phase).abs();
            if inc > PI / 4.0 || (phase - cur.phase) * dir <= 0.0 {
                ds *= 0.5;
                continue;
            }
            if !self.opts.window.contains(z) {
                return Ok((out, Ending::LeftWindow));
            }
            if left_seed && segment_distance(seed, cur.z, z) <= ds.max(chord) {
                let (_, f0, df0, _) = self.correct(seed)?.ok_or_else(|| {
                    Error::Divergence("seed no longer satisfies the curve equation".into())
                })?;
                let gap = (seed - cur.z).norm();
                let est = cur.phase + dir * v * gap * 0.5 * (cur.df.norm() + df0.norm());
                out.push(Node {
                    z: seed,
                    df: df0,
                    phase: self.unwrap(f0, est),
                });
                return Ok((out, Ending::Closed));
            }
            if !left_seed && (z - seed).norm() > 4.0 * ds {
                left_seed = true;
            }
            cur = Node { z, df, phase };
            out.push(cur);
            if inc > PI / 8.0 {
                ds *= 0.5;
            } else if iters < 2 && inc < PI / 16.0 {
                ds = (2.0 * ds).min(self.opts.ds_max);
            }
        }
    }
}

/// Traces the full connected level set through `seed` inside the window.
pub fn trace_curve(
    model: &PhaseModel,
    pair: PhasePair,
    seed: Complex64,
    opts: &TraceOptions,
) -> Result<CoexistenceCurve> {
    let level = model.level(pair);
    let (f, _) = model.difference(pair, seed)?;
    let residual = (f.re - level).abs();
    if !(residual <= SEED_RESIDUAL) {
        return Err(Error::SeedResidual {
            residual,
            threshold: SEED_RESIDUAL,
        });
    }
    let tracer = Tracer {
        model,
        pair,
        level,
        opts,
    };
    let (z0, f0, df0, _) = tracer
        .correct(seed)?
        .ok_or_else(|| Error::Divergence(format!("corrector failed at seed {seed}")))?;
    let start = Node {
        z: z0,
        df: df0,
        phase: model.volume * f0.im,
    };

    let (fwd, end_fwd) = tracer.march(start, 1.0, z0)?;
    let mut nodes;
    let closed;
    let mut diagnostic = None;
    match end_fwd {
        Ending::Closed => {
            nodes = Vec::with_capacity(fwd.len() + 1);
            nodes.push(start);
            nodes.extend(fwd);
            closed = true;
        }
        other => {
            let (bwd, end_bwd) = tracer.march(start, -1.0, z0)?;
            let mut notes = Vec::new();
            for (e, name) in [(&other, "forward"), (&end_bwd, "backward")] {
                match e {
                    Ending::Underflow => notes.push(format!("{name}: step size underflow")),
                    Ending::TooManyPoints => notes.push(format!("{name}: point limit reached")),
                    _ => {}
                }
            }
            if !notes.is_empty() {
                diagnostic = Some(notes.join("; "));
            }
            if matches!(end_bwd, Ending::Closed) {
                // can happen only after a forward failure; keep the loop as traced backwards
                nodes = bwd.into_iter().rev().collect();
                nodes.push(start);
                closed = true;
            } else {
                nodes = bwd.into_iter().rev().collect();
                nodes.push(start);
                nodes.extend(fwd);
                closed = false;
            }
        }
    }

    let stable: Vec<bool> = nodes
        .par_iter()
        .map(|n| model.pair_stable(pair, n.z))
        .collect::<Result<_>>()?;
    let mut points = Vec::with_capacity(nodes.len());
    let mut s = 0.0;
    for (i, n) in nodes.iter().enumerate() {
        if i > 0 {
            let prev = &nodes[i - 1];
            let chord = (n.z - prev.z).norm();
            let turn = (n.tangent() / prev.tangent()).arg();
            s += chord * (1.0 + turn * turn / 24.0);
        }
        points.push(CurvePoint {
            z: n.z,
            phase_accum: n.phase,
            stable: stable[i],
            arc_length: s,
        });
    }
    Ok(CoexistenceCurve {
        pair,
        level,
        volume: model.volume,
        points,
        closed,
        diagnostic,
    })
}

/// Polar grid for [`seed_scan`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedGrid {
    pub n_r: usize,
    pub n_theta: usize,
}

impl Default for SeedGrid {
    fn default() -> Self {
        Self {
            n_r: 64,
            n_theta: 256,
        }
    }
}

/// Points with `|g| <= 1e-6` found by bisecting sign changes of `g` along
/// the edges of a polar grid over the window, sorted by angle.
///
/// With `stable_only` seeds where a third phase lies lower are dropped.
pub fn seed_scan(
    model: &PhaseModel,
    pair: PhasePair,
    grid: SeedGrid,
    opts: &TraceOptions,
    stable_only: bool,
) -> Result<Vec<Complex64>> {
    let level = model.level(pair);
    let w = opts.window;
    let (nr, nt) = (grid.n_r.max(2), grid.n_theta.max(3));
    let node = |i: usize, j: usize| {
        let r = w.r_min * (w.r_max / w.r_min).powf(i as f64 / (nr - 1) as f64);
        let th = -PI + 2.0 * PI * (j as f64 + 0.5) / nt as f64;
        Complex64::from_polar(r, th)
    };
    let g = |z: Complex64| {
        model
            .difference(pair, z)
            .map(|(f, _)| f.re - level)
            .unwrap_or(f64::NAN)
    };
    let values: Vec<f64> = (0..nr * nt)
        .into_par_iter()
        .map(|k| g(node(k / nt, k % nt)))
        .collect();

    let mut edges = Vec::new();
    for i in 0..nr {
        for j in 0..nt {
            let a = values[i * nt + j];
            if i + 1 < nr {
                edges.push(((i, j), (i + 1, j), a, values[(i + 1) * nt + j]));
            }
            let jn = (j + 1) % nt;
            edges.push(((i, j), (i, jn), a, values[i * nt + jn]));
        }
    }
    let found: Vec<Complex64> = edges
        .par_iter()
        .filter(|e| e.2 * e.3 < 0.0)
        .filter_map(|&((i0, j0), (i1, j1), ga, _)| {
            let (mut a, mut b) = (node(i0, j0), node(i1, j1));
            let mut sa = ga.signum();
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                let gm = g(m);
                if !gm.is_finite() {
                    return None;
                }
                if gm.abs() <= SEED_RESIDUAL {
                    return Some(m);
                }
                if gm.signum() == sa {
                    a = m;
                    sa = gm.signum();
                } else {
                    b = m;
                }
            }
            None
        })
        .collect();

    let keep: Vec<bool> = if stable_only {
        found
            .par_iter()
            .map(|&z| model.pair_stable(pair, z).unwrap_or(false))
            .collect()
    } else {
        vec![true; found.len()]
    };
    let mut seeds: Vec<Complex64> = found
        .into_iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(z, _)| z)
        .collect();
    seeds.sort_by(|a, b| {
        a.arg()
            .total_cmp(&b.arg())
            .then(a.norm().total_cmp(&b.norm()))
    });
    let radius = 10.0 * opts.ds_init;
    let mut out: Vec<Complex64> = Vec::new();
    for s in seeds {
        if out.iter().all(|o| (o - s).norm() > radius) {
            out.push(s);
        }
    }
    Ok(out)
}

/// Every connected level-set component of `pair` that carries a stable seed.
///
/// Seeds already lying on a traced component are skipped. Seeds at
/// degenerate points are skipped as well (they belong to multiple points).
pub fn trace_pair(
    model: &PhaseModel,
    pair: PhasePair,
    grid: SeedGrid,
    opts: &TraceOptions,
) -> Result<Vec<CoexistenceCurve>> {
    let seeds = seed_scan(model, pair, grid, opts, true)?;
    let mut curves: Vec<CoexistenceCurve> = Vec::new();
    for s in seeds {
        if curves.iter().any(|c| c.distance_to(s) <= 1e-3) {
            continue;
        }
        match trace_curve(model, pair, s, opts) {
            Ok(c) => curves.push(c),
            Err(Error::DegenerateGradient { .. }) | Err(Error::Divergence(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(curves)
}
