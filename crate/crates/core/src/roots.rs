//! All complex zeros of the fugacity polynomial, by Aberth-Ehrlich iteration.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, FailedRoot, Result};
use crate::free_energy::PhasePair;
use crate::io::{fmt_f64, parse_f64};
use crate::model::SectorWeights;
use crate::numeric::horner_compensated;

/// Polynomial variable a zero is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variable {
    /// `z = e^h`
    Z,
    /// `u = e^(2h)`, natural for spin-1/2 Ising where only even powers of `z` occur.
    U,
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variable::Z => "z",
            Variable::U => "u",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Exact,
    Predicted,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Exact => "exact",
            Source::Predicted => "predicted",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Zero {
    pub z: Complex64,
    /// `|P(z)| / (|P|_inf max(1, |z|)^deg)` for exact zeros; curve residual for predicted ones.
    pub residual: f64,
    pub pair: Option<PhasePair>,
    /// Quantization index `k` (the zero sits where the unwrapped phase is `(2k + 1) pi`).
    pub index: Option<i64>,
}

impl Zero {
    pub fn exact(z: Complex64, residual: f64) -> Self {
        Self {
            z,
            residual,
            pair: None,
            index: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSet {
    pub variable: Variable,
    pub source: Source,
    pub zeros: Vec<Zero>,
}

impl ZeroSet {
    pub fn new(variable: Variable, source: Source, zeros: Vec<Zero>) -> Self {
        Self {
            variable,
            source,
            zeros,
        }
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    pub fn points(&self) -> Vec<Complex64> {
        self.zeros.iter().map(|z| z.z).collect()
    }

    /// Largest `||z| - 1|`.
    pub fn max_circle_deviation(&self) -> f64 {
        self.zeros
            .iter()
            .map(|z| (z.z.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Sorts by argument, then modulus; gives stable output ordering.
    pub fn sort_by_angle(&mut self) {
        self.zeros.sort_by(|a, b| {
            a.z.arg()
                .total_cmp(&b.z.arg())
                .then(a.z.norm().total_cmp(&b.z.norm()))
        });
    }
}

pub const ZEROS_HEADER: &str = "variable,re,im,residual,source,pair,k";

impl ZeroSet {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(ZEROS_HEADER);
        out.push('\n');
        for z in &self.zeros {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                self.variable,
                fmt_f64(z.z.re),
                fmt_f64(z.z.im),
                fmt_f64(z.residual),
                self.source,
                z.pair.map(|p| p.to_string()).unwrap_or_default(),
                z.index.map(|k| k.to_string()).unwrap_or_default(),
            ));
        }
        out
    }

    /// Parses [`ZeroSet::to_csv`] output. An empty body yields an empty `z`/exact set.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == ZEROS_HEADER => {}
            other => return Err(Error::Parse(format!("bad zero-set header {other:?}"))),
        }
        let mut variable = None;
        let mut source = None;
        let mut zeros = Vec::new();
        for (n, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 7 {
                return Err(Error::Parse(format!(
                    "row {}: expected 7 columns, got {}",
                    n + 2,
                    cols.len()
                )));
            }
            let v = match cols[0] {
                "z" => Variable::Z,
                "u" => Variable::U,
                o => {
                    return Err(Error::Parse(format!(
                        "row {}: unknown variable {o:?}",
                        n + 2
                    )))
                }
            };
            let s = match cols[4] {
                "exact" => Source::Exact,
                "predicted" => Source::Predicted,
                o => return Err(Error::Parse(format!("row {}: unknown source {o:?}", n + 2))),
            };
            if variable.is_some_and(|x| x != v) || source.is_some_and(|x| x != s) {
                return Err(Error::Parse(format!(
                    "row {}: mixed variable or source",
                    n + 2
                )));
            }
            variable = Some(v);
            source = Some(s);
            zeros.push(Zero {
                z: Complex64::new(parse_f64(cols[1])?, parse_f64(cols[2])?),
                residual: parse_f64(cols[3])?,
                pair: if cols[5].is_empty() {
                    None
                } else {
                    Some(cols[5].parse()?)
                },
                index: if cols[6].is_empty() {
                    None
                } else {
                    Some(
                        cols[6]
                            .trim()
                            .parse()
                            .map_err(|_| Error::Parse(format!("bad index {:?}", cols[6])))?,
                    )
                },
            });
        }
        Ok(Self::new(
            variable.unwrap_or(Variable::Z),
            source.unwrap_or(Source::Exact),
            zeros,
        ))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Iteration controls for [`polynomial_roots`].
#[derive(Debug, Clone, Copy)]
pub struct AberthOptions {
    pub max_sweeps: usize,
    /// Stop once every update satisfies `|dz| <= tol * |z|`.
    pub tol: f64,
    pub polish_steps: usize,
    pub residual_threshold: f64,
}

impl Default for AberthOptions {
    fn default() -> Self {
        Self {
            max_sweeps: 200,
            tol: 1e-13,
            polish_steps: 3,
            residual_threshold: 1e-8,
        }
    }
}

/// Normalized polynomial with the pieces needed for stable evaluation on
/// both sides of the unit circle.
struct Poly {
    coeffs: Vec<Complex64>,
    deriv: Vec<Complex64>,
    rev: Vec<Complex64>,
    rev_deriv: Vec<Complex64>,
}

impl Poly {
    fn new(coeffs: &[f64]) -> Self {
        let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let coeffs: Vec<Complex64> = coeffs
            .iter()
            .map(|&c| Complex64::new(c / scale, 0.0))
            .collect();
        let deriv = derivative(&coeffs);
        let rev: Vec<Complex64> = coeffs.iter().rev().copied().collect();
        let rev_deriv = derivative(&rev);
        Self {
            coeffs,
            deriv,
            rev,
            rev_deriv,
        }
    }

    fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `P(z) / P'(z)`, evaluated through the reversed polynomial outside the unit disc.
    fn newton_ratio(&self, z: Complex64) -> Complex64 {
        if z.norm() <= 1.0 {
            horner_compensated(&self.coeffs, z) / horner_compensated(&self.deriv, z)
        } else {
            let w = 1.0 / z;
            let r = horner_compensated(&self.rev, w);
            let dr = horner_compensated(&self.rev_deriv, w);
            z * r / (r * self.degree() as f64 - w * dr)
        }
    }

    /// `|P(z)| / max(1, |z|)^deg` with `|P|_inf = 1`.
    fn residual(&self, z: Complex64) -> f64 {
        if z.norm() <= 1.0 {
            horner_compensated(&self.coeffs, z).norm()
        } else {
            horner_compensated(&self.rev, 1.0 / z).norm()
        }
    }
}

fn derivative(c: &[Complex64]) -> Vec<Complex64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &a)| a * i as f64)
        .collect()
}

/// A root with its normalized residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub z: Complex64,
    pub residual: f64,
}

/// All roots of `sum_i coeffs[i] x^i` (real coefficients, lowest order first).
pub fn polynomial_roots(coeffs: &[f64]) -> Result<Vec<Root>> {
    polynomial_roots_with(coeffs, AberthOptions::default())
}

pub fn polynomial_roots_with(coeffs: &[f64], opts: AberthOptions) -> Result<Vec<Root>> {
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::Domain("non-finite polynomial coefficient".into()));
    }
    let top = coeffs
        .iter()
        .rposition(|&c| c != 0.0)
        .ok_or_else(|| Error::Domain("zero polynomial".into()))?;
    let low = coeffs.iter().position(|&c| c != 0.0).unwrap_or(0);
    let mut roots: Vec<Root> = (0..low)
        .map(|_| Root {
            z: Complex64::new(0.0, 0.0),
            residual: 0.0,
        })
        .collect();
    let trimmed = &coeffs[low..=top];
    let degree = trimmed.len() - 1;
    if degree == 0 {
        if roots.is_empty() {
            return Err(Error::Domain("polynomial has degree 0".into()));
        }
        return Ok(roots);
    }
    let poly = Poly::new(trimmed);

    let radius = (trimmed[0] / trimmed[degree])
        .abs()
        .powf(1.0 / degree as f64);
    let rotation = (5f64.sqrt() - 1.0) * 0.5 * PI / degree as f64;
    let mut z: Vec<Complex64> = (0..degree)
        .map(|k| Complex64::from_polar(radius, 2.0 * PI * k as f64 / degree as f64 + rotation))
        .collect();
    let mut done = vec![false; degree];

    for _ in 0..opts.max_sweeps {
        for i in 0..degree {
            if done[i] {
                continue;
            }
            let ratio = poly.newton_ratio(z[i]);
            if ratio == Complex64::new(0.0, 0.0) {
                done[i] = true;
                continue;
            }
            let repulsion: Complex64 = (0..degree)
                .filter(|&j| j != i)
                .map(|j| 1.0 / (z[i] - z[j]))
                .sum();
            let step = ratio / (1.0 - ratio * repulsion);
            if !(step.re.is_finite() && step.im.is_finite()) {
                continue;
            }
            z[i] -= step;
            if step.norm() <= opts.tol * z[i].norm() {
                done[i] = true;
            }
        }
        if done.iter().all(|&d| d) {
            break;
        }
    }

    let mut failed = Vec::new();
    for (i, zi) in z.iter_mut().enumerate() {
        let mut res = poly.residual(*zi);
        for _ in 0..opts.polish_steps {
            let cand = *zi - poly.newton_ratio(*zi);
            let cres = poly.residual(cand);
            if cand.re.is_finite() && cand.im.is_finite() && cres <= res {
                *zi = cand;
                res = cres;
            } else {
                break;
            }
        }
        if !(res <= opts.residual_threshold) {
            failed.push(FailedRoot {
                index: low + i,
                z: *zi,
                residual: res,
            });
        }
        roots.push(Root {
            z: *zi,
            residual: res,
        });
    }
    if !failed.is_empty() {
        return Err(Error::RootsNotConverged {
            total: roots.len(),
            roots: roots.iter().map(|r| r.z).collect(),
            failed,
        });
    }
    Ok(roots)
}

/// Exact Lee-Yang zeros of a partition function given by its sector weights.
///
/// With [`Variable::U`] the weights must have step 2 (Ising) and are used
/// directly as coefficients in `u = z^2`.
pub fn find_roots(weights: &SectorWeights, variable: Variable) -> Result<ZeroSet> {
    let coeffs: Vec<f64> = match variable {
        Variable::U => {
            if weights.step != 2 {
                return Err(Error::Domain(format!(
                    "variable u = z^2 needs sector step 2, got {}",
                    weights.step
                )));
            }
            weights.weights.clone()
        }
        Variable::Z => {
            let step = weights.step as usize;
            let mut c = vec![0.0; (weights.weights.len() - 1) * step + 1];
            for (i, &w) in weights.weights.iter().enumerate() {
                c[i * step] = w;
            }
            c
        }
    };
    let roots = polynomial_roots(&coeffs)?;
    let mut set = ZeroSet::new(
        variable,
        Source::Exact,
        roots
            .into_iter()
            .map(|r| Zero::exact(r.z, r.residual))
            .collect(),
    );
    set.sort_by_angle();
    Ok(set)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchedPair {
    pub a: usize,
    pub b: usize,
    pub distance: f64,
}

/// Greedy mutual-nearest-neighbour pairing of two zero sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub pairs: Vec<MatchedPair>,
    pub max_distance: f64,
    pub mean_distance: f64,
    pub unmatched_a: Vec<usize>,
    pub unmatched_b: Vec<usize>,
}

/// Pairs zeros closest-first: the globally shortest remaining distance is
/// always taken next, so each accepted pair is mutually nearest among the
/// zeros still unpaired.
pub fn match_zeros(a: &ZeroSet, b: &ZeroSet) -> Result<MatchReport> {
    if a.variable != b.variable {
        return Err(Error::Domain(format!(
            "cannot match zeros in {} against zeros in {}",
            a.variable, b.variable
        )));
    }
    Ok(match_points(&a.points(), &b.points()))
}

pub fn match_points(a: &[Complex64], b: &[Complex64]) -> MatchReport {
    let mut candidates: Vec<(f64, usize, usize)> = Vec::with_capacity(a.len() * b.len());
    for (i, za) in a.iter().enumerate() {
        for (j, zb) in b.iter().enumerate() {
            candidates.push(((za - zb).norm(), i, j));
        }
    }
    candidates.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut pairs = Vec::new();
    for (d, i, j) in candidates {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            pairs.push(MatchedPair {
                a: i,
                b: j,
                distance: d,
            });
        }
    }
    pairs.sort_by_key(|p| p.a);
    let max_distance = pairs.iter().map(|p| p.distance).fold(0.0, f64::max);
    let mean_distance = if pairs.is_empty() {
        0.0
    } else {
        pairs.iter().map(|p| p.distance).sum::<f64>() / pairs.len() as f64
    };
    MatchReport {
        pairs,
        max_distance,
        mean_distance,
        unmatched_a: (0..a.len()).filter(|&i| !used_a[i]).collect(),
        unmatched_b: (0..b.len()).filter(|&j| !used_b[j]).collect(),
    }
}
