//! Newton refinement of a predicted zero on the two-term partition function
//! `q_a exp(-V f_a) + q_b exp(-V f_b)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::free_energy::{PhaseModel, PhasePair};
use crate::numeric::wrap_angle;

const TOLERANCE: f64 = 1e-12;
const MAX_STEPS: usize = 50;

/// Solves `G(z) = V (f_a - f_b) - ln(q_a / q_b) - i pi (2k + 1) = 0`
/// to `|G| <= 1e-12`, or to the rounding floor of `V |f_a - f_b|` when that is larger.
///
/// The imaginary part is compared modulo `2 pi`. The guess is taken to lie
/// within `pi` of branch `k` (as interpolated crossings do); the branch is
/// then tracked along the Newton path and must still be `k` at the end,
/// otherwise [`Error::BasinMismatch`] is returned. Returns the zero and `|G|`.
pub fn refine_two_term(
    model: &PhaseModel,
    pair: PhasePair,
    z_guess: Complex64,
    k: i64,
) -> Result<(Complex64, f64)> {
    let v = model.volume;
    let ln_q = (model.degeneracy(pair.0) / model.degeneracy(pair.1)).ln();
    let target = PI * (2 * k + 1) as f64;
    let (mut f, mut df) = model.difference(pair, z_guess)?;
    let mut z = z_guess;
    // unwrapped V Im F, anchored so that the guess sits within pi of the target
    let mut phase = target + wrap_angle(v * f.im - target);
    for _ in 0..=MAX_STEPS {
        let g = Complex64::new(v * f.re - ln_q, phase - target);
        let res = Complex64::new(g.re, wrap_angle(g.im)).norm();
        // V F is only known to a few ulps of its own size
        if res <= TOLERANCE.max(8.0 * f64::EPSILON * v * f.norm()) {
            let got = ((phase - PI) / (2.0 * PI)).round() as i64;
            if got != k {
                return Err(Error::BasinMismatch { expected: k, got });
            }
            return Ok((z, res));
        }
        let step = g / (df * v);
        let next = z - step;
        if !(next.re.is_finite() && next.im.is_finite()) || next.norm() == 0.0 {
            return Err(Error::Divergence(format!(
                "two-term Newton from {z_guess} left the plane"
            )));
        }
        let (nf, ndf) = model.difference(pair, next)?;
        let estimate = phase + v * (0.5 * (df + ndf) * (next - z)).im;
        let raw = v * nf.im;
        phase = raw + 2.0 * PI * ((estimate - raw) / (2.0 * PI)).round();
        z = next;
        f = nf;
        df = ndf;
    }
    Err(Error::Divergence(format!(
        "two-term Newton from {z_guess} did not converge in {MAX_STEPS} steps"
    )))
}
