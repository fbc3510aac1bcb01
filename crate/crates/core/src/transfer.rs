//! Row-to-row transfer matrices for `d = 1` and `d = 2` periodic lattices.
//!
//! A row is a full line of `L` sites along axis 0 (a single site when
//! `d = 1`), and `Z(z) = trace(T(z)^L)`. The explicit operator uses the
//! symmetric split
//!
//! ```text
//! T[r, r'] = W_intra(r)^1/2 W_inter(r, r') W_intra(r')^1/2 z^(m(r)/2) z^(m(r')/2)
//! ```
//!
//! while the evaluator uses `trace((K D)^L)` with `K = W_inter` applied site by
//! site (it is a Kronecker power of the single-bond matrix) and
//! `D = diag(W_intra(r) z^m(r))`, which avoids forming `T` at all.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::model::{ModelKind, ModelSpec, SectorWeights};

/// Default cap on the transfer-matrix dimension (`3^7`).
pub const DEFAULT_DIMENSION_CAP: usize = 2187;

/// Relative threshold for imaginary (and negative) parts of recovered coefficients.
pub const COEFFICIENT_IMAG_TOLERANCE: f64 = 1e-8;

/// Dense transfer matrix evaluated at one fugacity.
#[derive(Debug, Clone)]
pub struct TransferOperator {
    pub model: ModelSpec,
    pub dim: usize,
    pub z: Complex64,
    /// Row-major entries.
    pub entries: Vec<Complex64>,
}

impl TransferOperator {
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.entries[r * self.dim + c]
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..self.dim).all(|r| {
            (0..self.dim).all(|c| {
                (self.get(r, c) - self.get(c, r).conj()).norm()
                    <= tol * self.get(r, c).norm().max(1.0)
            })
        })
    }

    /// `trace(T^L)` by `L - 1` dense products.
    pub fn trace_power(&self, power: usize) -> Complex64 {
        let n = self.dim;
        let mut acc = self.entries.clone();
        let mut next = vec![Complex64::new(0.0, 0.0); n * n];
        for _ in 1..power {
            next.par_chunks_mut(n).enumerate().for_each(|(r, row)| {
                for (c, out) in row.iter_mut().enumerate() {
                    *out = (0..n)
                        .map(|k| acc[r * n + k] * self.entries[k * n + c])
                        .sum();
                }
            });
            std::mem::swap(&mut acc, &mut next);
        }
        (0..n).map(|i| acc[i * n + i]).sum()
    }
}

/// Per-row data shared by both evaluation routes.
struct RowBasis {
    alphabet: Vec<i32>,
    row_len: usize,
    dim: usize,
    /// Zero-field energy of bonds inside the row plus its site terms.
    intra_energy: Vec<f64>,
    charge: Vec<i64>,
    /// Single-bond weights `exp(-E_bond(a, b))` between vertically adjacent sites.
    bond_weight: Vec<f64>,
}

impl RowBasis {
    fn new(model: &ModelSpec, cap: usize) -> Result<Self> {
        model.validate()?;
        let row_len = match model.d {
            1 => 1,
            2 => model.side,
            d => return Err(Error::UnsupportedDimension(d)),
        };
        let alphabet = model.alphabet();
        let s = alphabet.len();
        let dim = (s as f64).powi(row_len as i32);
        if dim > cap as f64 {
            return Err(Error::DimensionCap {
                dim: dim.min(usize::MAX as f64) as usize,
                cap,
            });
        }
        let dim = dim as usize;
        let mut intra_energy = Vec::with_capacity(dim);
        let mut charge = Vec::with_capacity(dim);
        let mut spins = vec![0i32; row_len];
        for r in 0..dim {
            let mut rest = r;
            for sp in spins.iter_mut() {
                *sp = alphabet[rest % s];
                rest /= s;
            }
            let mut e = 0.0;
            if model.d == 2 {
                for i in 0..row_len {
                    e += model.bond_energy(spins[i], spins[(i + 1) % row_len]);
                }
            }
            e += spins.iter().map(|&a| model.site_energy(a)).sum::<f64>();
            intra_energy.push(e);
            charge.push(spins.iter().map(|&a| model.field_charge(a)).sum());
        }
        let bond_weight = alphabet
            .iter()
            .flat_map(|&a| alphabet.iter().map(move |&b| (a, b)))
            .map(|(a, b)| (-model.bond_energy(a, b)).exp())
            .collect();
        Ok(Self {
            alphabet,
            row_len,
            dim,
            intra_energy,
            charge,
            bond_weight,
        })
    }

    fn inter_energy(&self, model: &ModelSpec, r: usize, c: usize) -> f64 {
        let s = self.alphabet.len();
        let (mut r, mut c) = (r, c);
        let mut e = 0.0;
        for _ in 0..self.row_len {
            e += model.bond_energy(self.alphabet[r % s], self.alphabet[c % s]);
            r /= s;
            c /= s;
        }
        e
    }

    /// Applies `K = w (x) w (x) ... (x) w` to `v` in place, one site at a time.
    fn apply_inter(&self, v: &mut [Complex64], scratch: &mut [Complex64]) {
        let s = self.alphabet.len();
        let mut stride = 1;
        for _ in 0..self.row_len {
            let block = stride * s;
            for hi in (0..self.dim).step_by(block) {
                for lo in 0..stride {
                    let base = hi + lo;
                    for (b, slot) in scratch.iter_mut().enumerate().take(s) {
                        *slot = v[base + b * stride];
                    }
                    for a in 0..s {
                        let w = &self.bond_weight[a * s..(a + 1) * s];
                        v[base + a * stride] =
                            w.iter().zip(scratch.iter()).map(|(&wab, &x)| x * wab).sum();
                    }
                }
            }
            stride = block;
        }
    }
}

/// Dense symmetric-split transfer matrix with the default dimension cap.
pub fn build_transfer(model: &ModelSpec, z: Complex64) -> Result<TransferOperator> {
    build_transfer_with_cap(model, z, DEFAULT_DIMENSION_CAP)
}

pub fn build_transfer_with_cap(
    model: &ModelSpec,
    z: Complex64,
    cap: usize,
) -> Result<TransferOperator> {
    let basis = RowBasis::new(model, cap)?;
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain("z = 0 has no logarithm".into()));
    }
    let log_z = z.ln();
    let half: Vec<Complex64> = (0..basis.dim)
        .map(|r| {
            (Complex64::new(-0.5 * basis.intra_energy[r], 0.0)
                + log_z * (0.5 * basis.charge[r] as f64))
                .exp()
        })
        .collect();
    let n = basis.dim;
    let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
    entries.par_chunks_mut(n).enumerate().for_each(|(r, row)| {
        for (c, out) in row.iter_mut().enumerate() {
            *out = half[r] * half[c] * (-basis.inter_energy(model, r, c)).exp();
        }
    });
    Ok(TransferOperator {
        model: *model,
        dim: n,
        z,
        entries,
    })
}

/// A complex number stored as `mantissa * exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledComplex {
    pub mantissa: Complex64,
    pub log_scale: f64,
}

impl ScaledComplex {
    pub fn ln_abs(&self) -> f64 {
        self.mantissa.norm().ln() + self.log_scale
    }

    pub fn arg(&self) -> f64 {
        self.mantissa.arg()
    }

    /// The plain value, or an overflow error.
    pub fn value(&self) -> Result<Complex64> {
        let v = self.mantissa * self.log_scale.exp();
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::Overflow(format!(
                "|Z| = exp({:.3}) exceeds double range; use the log-scaled evaluation",
                self.ln_abs()
            )))
        }
    }

    fn rescaled(&self, log_scale: f64) -> Complex64 {
        self.mantissa * (self.log_scale - log_scale).exp()
    }
}

/// `Z(z)` via the transfer matrix, with the default dimension cap.
pub fn evaluate_z_tm(model: &ModelSpec, z: Complex64) -> Result<Complex64> {
    evaluate_z_tm_scaled(model, z, DEFAULT_DIMENSION_CAP)?.value()
}

/// Log-scaled `Z(z) = trace((K D)^L)`; the running matrix power is
/// renormalized by its largest entry after every row so it never overflows.
pub fn evaluate_z_tm_scaled(model: &ModelSpec, z: Complex64, cap: usize) -> Result<ScaledComplex> {
    let basis = RowBasis::new(model, cap)?;
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain("z = 0 has no logarithm".into()));
    }
    let log_z = z.ln();
    let n = basis.dim;
    let s = basis.alphabet.len();
    let field: Vec<Complex64> = (0..n)
        .map(|r| {
            (Complex64::new(-basis.intra_energy[r], 0.0) + log_z * basis.charge[r] as f64).exp()
        })
        .collect();
    if field
        .iter()
        .any(|w| !(w.re.is_finite() && w.im.is_finite()))
    {
        return Err(Error::Overflow("single-row weight overflows".into()));
    }

    // column-major: column j holds ((K D)^k)[., j]
    let mut m = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        m[j * n + j] = Complex64::new(1.0, 0.0);
    }
    let mut log_scale = 0.0;
    for _ in 0..model.side {
        m.par_chunks_mut(n).for_each_init(
            || vec![Complex64::new(0.0, 0.0); s],
            |scratch, col| {
                col.iter_mut().zip(&field).for_each(|(x, &f)| *x *= f);
                basis.apply_inter(col, scratch);
            },
        );
        let peak = m.par_iter().map(|x| x.norm()).reduce(|| 0.0, f64::max);
        if !peak.is_finite() {
            return Err(Error::Overflow("non-finite transfer-matrix product".into()));
        }
        if peak == 0.0 {
            return Ok(ScaledComplex {
                mantissa: Complex64::new(0.0, 0.0),
                log_scale,
            });
        }
        m.par_iter_mut().for_each(|x| *x /= peak);
        log_scale += peak.ln();
    }
    let trace: Complex64 = (0..n).map(|j| m[j * n + j]).sum();
    Ok(ScaledComplex {
        mantissa: trace,
        log_scale,
    })
}

/// Degree of `z^(-m_min) Z` in the polynomial variable `z^step`.
pub fn polynomial_degree(model: &ModelSpec) -> usize {
    let (m_min, m_max, step) = model.m_range();
    ((m_max - m_min) / step) as usize
}

/// Sector weights recovered from transfer-matrix values at the roots of unity.
pub fn extract_coefficients(model: &ModelSpec) -> Result<SectorWeights> {
    extract_coefficients_with_cap(model, DEFAULT_DIMENSION_CAP)
}

pub fn extract_coefficients_with_cap(model: &ModelSpec, cap: usize) -> Result<SectorWeights> {
    model.validate()?;
    let (m_min, _, step) = model.m_range();
    let degree = polynomial_degree(model);
    let n = degree + 1;
    // z_k^step = exp(2 pi i k / n), so P(p_k) = z_k^(-m_min) Z(z_k)
    let samples: Vec<ScaledComplex> = (0..n)
        .into_par_iter()
        .map(|k| {
            let angle = 2.0 * PI * k as f64 / (n as f64 * step as f64);
            let z = Complex64::from_polar(1.0, angle);
            let zval = evaluate_z_tm_scaled(model, z, cap)?;
            let shift = Complex64::from_polar(1.0, -angle * m_min as f64);
            Ok(ScaledComplex {
                mantissa: zval.mantissa * shift,
                log_scale: zval.log_scale,
            })
        })
        .collect::<Result<_>>()?;

    // positive coefficients: |P| on the unit circle peaks at p = 1
    let reference = samples[0].ln_abs();
    let mut buffer: Vec<Complex64> = samples.iter().map(|s| s.rescaled(reference)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buffer);
    // sum_k P(w^k) w^(-ik) = n c_i
    let scaled: Vec<Complex64> = buffer.iter().map(|c| c / n as f64).collect();

    let largest = scaled.iter().map(|c| c.re.abs()).fold(0.0, f64::max);
    let worst_imag = scaled.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    let worst_negative = scaled.iter().map(|c| (-c.re).max(0.0)).fold(0.0, f64::max);
    let ratio = worst_imag.max(worst_negative) / largest;
    if !(ratio <= COEFFICIENT_IMAG_TOLERANCE) {
        return Err(Error::Conditioning {
            ratio,
            threshold: COEFFICIENT_IMAG_TOLERANCE,
        });
    }
    let factor = reference.exp();
    let weights: Vec<f64> = scaled.iter().map(|c| c.re.max(0.0) * factor).collect();
    if !factor.is_finite() || weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::Overflow(
            "recovered coefficients exceed double range".into(),
        ));
    }
    debug_assert!(model.kind != ModelKind::Ising || step == 2);
    Ok(SectorWeights {
        model: *model,
        m_min,
        step,
        weights,
    })
}
