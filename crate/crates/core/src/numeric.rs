//! Small floating-point helpers shared by the exact and asymptotic engines.

use num_complex::Complex64;

/// Kahan-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Complex product `a * b` split into a rounded value and its (first-order) error.
#[inline]
fn two_prod_complex(a: Complex64, b: Complex64) -> (Complex64, Complex64) {
    let (p1, e1) = two_prod(a.re, b.re);
    let (p2, e2) = two_prod(a.im, b.im);
    let (p3, e3) = two_prod(a.re, b.im);
    let (p4, e4) = two_prod(a.im, b.re);
    let (re, f_re) = two_sum(p1, -p2);
    let (im, f_im) = two_sum(p3, p4);
    (
        Complex64::new(re, im),
        Complex64::new(e1 - e2 + f_re, e3 + e4 + f_im),
    )
}

#[inline]
fn two_sum_complex(a: Complex64, b: Complex64) -> (Complex64, Complex64) {
    let (re, er) = two_sum(a.re, b.re);
    let (im, ei) = two_sum(a.im, b.im);
    (Complex64::new(re, im), Complex64::new(er, ei))
}

/// Compensated Horner evaluation of `sum_i coeffs[i] * z^i`.
///
/// The result is as accurate as plain Horner run in twice the working
/// precision, which matters when the coefficients span many decades.
pub fn horner_compensated(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let Some((last, rest)) = coeffs.split_last() else {
        return Complex64::new(0.0, 0.0);
    };
    let mut s = *last;
    let mut err = Complex64::new(0.0, 0.0);
    for &c in rest.iter().rev() {
        let (p, pe) = two_prod_complex(s, z);
        let (t, se) = two_sum_complex(p, c);
        err = err * z + (pe + se);
        s = t;
    }
    s + err
}

/// Plain Horner evaluation of `sum_i coeffs[i] * z^i` for real coefficients.
pub fn horner_real(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    use std::f64::consts::PI;
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    y
}

/// Central finite-difference derivative of a holomorphic function along the real direction.
pub fn central_difference<F: Fn(Complex64) -> Complex64>(
    f: F,
    z: Complex64,
    step: f64,
) -> Complex64 {
    (f(z + step) - f(z - step)) / (2.0 * step)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_recovers_small_terms() {
        let mut s = KahanSum::new();
        s.add(1.0);
        for _ in 0..10_000 {
            s.add(1e-16);
        }
        assert!((s.value() - (1.0 + 1e-12)).abs() < 1e-15);
    }

    #[test]
    fn compensated_horner_beats_cancellation() {
        // (z - 1)^7 expanded, evaluated right next to its root
        let binom = [1.0, -7.0, 21.0, -35.0, 35.0, -21.0, 7.0, -1.0];
        let coeffs: Vec<Complex64> = binom
            .iter()
            .rev()
            .map(|&c| Complex64::new(c, 0.0))
            .collect();
        let z = Complex64::new(1.001, 0.0);
        let exact = 1e-21;
        let comp = horner_compensated(&coeffs, z);
        assert!((comp.re - exact).abs() < 1e-27, "{comp}");
    }

    #[test]
    fn wrap_angle_range() {
        use std::f64::consts::PI;
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(0.5) - 0.5).abs() < 1e-15);
    }
}
