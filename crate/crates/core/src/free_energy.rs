//! Low-temperature metastable free energies `f_l(z)` per site, with their
//! analytic `z`-derivatives.
//!
//! Remainders of the expansions are dropped. Each evaluation carries the
//! order of the dropped part as a plain number (`remainder`) so tolerances
//! downstream can be stated against it.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::fmt_f64;
use crate::model::{ModelKind, ModelSpec};

/// Ties in `Re f_eff` closer than this count as coexistence.
pub const TAU_STAB: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PhaseLabel {
    #[serde(rename = "plus")]
    Plus,
    #[serde(rename = "minus")]
    Minus,
    #[serde(rename = "zero")]
    Zero,
    /// Potts disordered phase.
    D,
    /// Potts phase magnetized along the field direction.
    M,
    /// The `q - 1` Potts ordered phases not favoured by the field.
    O,
}

impl PhaseLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            PhaseLabel::Plus => "plus",
            PhaseLabel::Minus => "minus",
            PhaseLabel::Zero => "zero",
            PhaseLabel::D => "D",
            PhaseLabel::M => "M",
            PhaseLabel::O => "O",
        }
    }
}

impl fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PhaseLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "plus" | "+" => PhaseLabel::Plus,
            "minus" | "-" => PhaseLabel::Minus,
            "zero" | "0" => PhaseLabel::Zero,
            "D" => PhaseLabel::D,
            "M" => PhaseLabel::M,
            "O" => PhaseLabel::O,
            other => return Err(Error::Parse(format!("unknown phase label {other:?}"))),
        })
    }
}

/// Ordered pair of coexisting phases; written `a/b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct PhasePair(pub PhaseLabel, pub PhaseLabel);

impl PhasePair {
    pub fn new(a: PhaseLabel, b: PhaseLabel) -> Self {
        Self(a, b)
    }

    pub fn contains(&self, p: PhaseLabel) -> bool {
        self.0 == p || self.1 == p
    }
}

impl fmt::Display for PhasePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0, self.1)
    }
}

impl FromStr for PhasePair {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once('/')
            .ok_or_else(|| Error::Parse(format!("phase pair {s:?} is not of the form a/b")))?;
        Ok(Self(a.parse()?, b.parse()?))
    }
}

impl From<PhasePair> for String {
    fn from(p: PhasePair) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for PhasePair {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// One phase's free energy at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeEnergyEval {
    pub phase: PhaseLabel,
    pub z: Complex64,
    pub f: Complex64,
    pub df_dz: Complex64,
    /// Order of magnitude of the dropped remainder.
    pub remainder: f64,
    /// False when the couplings lie outside the range where the expansion is trusted.
    pub trusted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveFreeEnergy {
    pub base: FreeEnergyEval,
    pub volume: f64,
    pub degeneracy: f64,
    /// `f - ln(q_l) / V`
    pub f_eff: Complex64,
}

impl EffectiveFreeEnergy {
    pub fn new(base: FreeEnergyEval, volume: f64, degeneracy: f64) -> Self {
        Self {
            base,
            volume,
            degeneracy,
            f_eff: base.f - degeneracy.ln() / volume,
        }
    }
}

fn check_z(z: Complex64) -> Result<()> {
    if z.norm() == 0.0 || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!(
            "free energy needs a finite nonzero z, got {z}"
        )));
    }
    Ok(())
}

pub fn ising_trusted(coupling: f64) -> bool {
    (-coupling).exp() <= 0.2
}

pub fn potts_trusted(q: u32, coupling: f64, d: usize) -> bool {
    q >= 20 && ((d as f64 * coupling).exp() / q as f64 - 1.0).abs() <= 0.3
}

/// Ising, phases `plus`/`minus`: `f = -+h - dJ - e^(-4dJ) z^(-+2)`.
pub fn ising_f(coupling: f64, d: usize, z: Complex64, phase: PhaseLabel) -> Result<FreeEnergyEval> {
    check_z(z)?;
    let dj = d as f64 * coupling;
    let a = (-4.0 * dj).exp();
    let h = z.ln();
    let (f, df) = match phase {
        PhaseLabel::Plus => {
            let w = 1.0 / (z * z);
            (-h - dj - a * w, -1.0 / z + 2.0 * a * w / z)
        }
        PhaseLabel::Minus => (h - dj - a * z * z, 1.0 / z - 2.0 * a * z),
        other => return Err(Error::InvalidModel(format!("Ising has no phase {other}"))),
    };
    Ok(FreeEnergyEval {
        phase,
        z,
        f,
        df_dz: df,
        remainder: (-4.0 * (2.0 * d as f64 - 1.0) * coupling).exp(),
        trusted: ising_trusted(coupling),
    })
}

/// Blume-Capel in two dimensions, phases `plus`/`minus`/`zero`.
///
/// With `a = e^(-lambda-4J)`, `b = e^(-2lambda-6J)`, `c = e^(lambda-4J)`, `e = e^(2lambda-6J)`:
/// `-f_+ = h + lambda + a/z + 2b/z^2`, `-f_-` its `z -> 1/z` mirror and
/// `-f_0 = (z + 1/z) c + 2 (z^2 + 1/z^2) e`.
pub fn blume_capel_f(
    coupling: f64,
    lambda: f64,
    d: usize,
    z: Complex64,
    phase: PhaseLabel,
) -> Result<FreeEnergyEval> {
    if d != 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    check_z(z)?;
    let h = z.ln();
    let w = 1.0 / z;
    let (f, df) = match phase {
        PhaseLabel::Plus => {
            let a = (-lambda - 4.0 * coupling).exp();
            let b = (-2.0 * lambda - 6.0 * coupling).exp();
            (
                -h - lambda - a * w - 2.0 * b * w * w,
                -w + a * w * w + 4.0 * b * w * w * w,
            )
        }
        PhaseLabel::Minus => {
            let a = (-lambda - 4.0 * coupling).exp();
            let b = (-2.0 * lambda - 6.0 * coupling).exp();
            (h - lambda - a * z - 2.0 * b * z * z, w - a - 4.0 * b * z)
        }
        PhaseLabel::Zero => {
            let c = (lambda - 4.0 * coupling).exp();
            let e = (2.0 * lambda - 6.0 * coupling).exp();
            (
                -(z + w) * c - 2.0 * (z * z + w * w) * e,
                -(1.0 - w * w) * c - 4.0 * (z - w * w * w) * e,
            )
        }
        other => {
            return Err(Error::InvalidModel(format!(
                "Blume-Capel has no phase {other}"
            )))
        }
    };
    Ok(FreeEnergyEval {
        phase,
        z,
        f,
        df_dz: df,
        remainder: (-8.0 * coupling).exp(),
        trusted: ising_trusted(coupling),
    })
}

/// Potts, phases `D`/`M`/`O`, in terms of `Q_k = q - 1 + z^k`.
pub fn potts_f(
    q: u32,
    coupling: f64,
    d: usize,
    z: Complex64,
    phase: PhaseLabel,
) -> Result<FreeEnergyEval> {
    check_z(z)?;
    let qf = q as f64;
    let df_ = d as f64;
    let big_q = qf - 1.0 + z;
    if big_q.norm() < 1e-12 * qf {
        return Err(Error::Domain(format!("Q = q - 1 + z vanishes at z = {z}")));
    }
    let z2 = z * z;
    let q2 = qf - 1.0 + z2;
    let ej = coupling.exp();
    let e1 = ej - 1.0;
    let a = (-2.0 * df_ * coupling).exp();
    let b = df_ * (-(4.0 * df_ - 1.0) * coupling).exp();
    let c = (df_ + 0.5) * (-4.0 * df_ * coupling).exp();

    // minus f and its derivative
    let (mf, dmf, remainder) = match phase {
        PhaseLabel::D => {
            let kappa = df_ * (2.0 * df_ - 1.0);
            let q3 = qf - 1.0 + z2 * z;
            let qq = big_q * big_q;
            let u = q2 / qq;
            let du = 2.0 * z / qq - 2.0 * q2 / (qq * big_q);
            let v = q3 / (qq * big_q);
            let dv = 3.0 * z2 / (qq * big_q) - 3.0 * q3 / (qq * qq);
            let mf =
                big_q.ln() + df_ * e1 * u + kappa * e1 * e1 * v - (kappa + 0.5) * e1 * e1 * u * u;
            let dmf = 1.0 / big_q + df_ * e1 * du + kappa * e1 * e1 * dv
                - (kappa + 0.5) * e1 * e1 * 2.0 * u * du;
            (mf, dmf, qf.powf(-(3.0 - 4.0 / df_)))
        }
        PhaseLabel::M => {
            let w = 1.0 / z;
            let s = big_q * big_q + ej * q2;
            let ds = 2.0 * big_q + 2.0 * ej * z;
            let mf = z.ln() + df_ * coupling + a * (big_q * w - 1.0) + b * s * w * w
                - c * big_q * big_q * w * w;
            let dmf = w - a * (qf - 1.0) * w * w + b * (ds * w * w - 2.0 * s * w * w * w)
                - c * (2.0 * big_q * w * w - 2.0 * big_q * big_q * w * w * w);
            (mf, dmf, qf.powf(-(3.0 - 2.0 / df_)))
        }
        PhaseLabel::O => {
            let s = big_q * big_q + ej * q2;
            let ds = 2.0 * big_q + 2.0 * ej * z;
            let mf = df_ * coupling + a * (big_q - 1.0) + b * s - c * big_q * big_q;
            let dmf = a + b * ds - 2.0 * c * big_q;
            (mf, dmf, qf.powf(-(3.0 - 2.0 / df_)))
        }
        other => return Err(Error::InvalidModel(format!("Potts has no phase {other}"))),
    };
    Ok(FreeEnergyEval {
        phase,
        z,
        f: -mf,
        df_dz: -dmf,
        remainder,
        trusted: potts_trusted(q, coupling, d),
    })
}

/// Result of comparing `Re f_eff` across phases at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Stability {
    pub min_re: f64,
    /// Phases within `tau` of the minimum, in label order.
    pub stable: Vec<PhaseLabel>,
    /// `Re f_eff - min` for every phase, in input order.
    pub gaps: Vec<(PhaseLabel, f64)>,
}

impl Stability {
    pub fn is_stable(&self, p: PhaseLabel) -> bool {
        self.stable.contains(&p)
    }

    pub fn gap(&self, p: PhaseLabel) -> Option<f64> {
        self.gaps.iter().find(|(l, _)| *l == p).map(|(_, g)| *g)
    }
}

pub fn classify_stability(evals: &[EffectiveFreeEnergy], tau: f64) -> Stability {
    let min_re = evals
        .iter()
        .map(|e| e.f_eff.re)
        .fold(f64::INFINITY, f64::min);
    let gaps: Vec<(PhaseLabel, f64)> = evals
        .iter()
        .map(|e| (e.base.phase, e.f_eff.re - min_re))
        .collect();
    let mut stable: Vec<PhaseLabel> = gaps
        .iter()
        .filter(|(_, g)| *g <= tau)
        .map(|(p, _)| *p)
        .collect();
    stable.sort();
    Stability {
        min_re,
        stable,
        gaps,
    }
}

/// The asymptotic description of one model at finite volume `V`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseModel {
    pub spec: ModelSpec,
    pub volume: f64,
}

impl PhaseModel {
    /// Uses `V = L^d` from the spec.
    pub fn new(spec: ModelSpec) -> Result<Self> {
        let v = spec.volume() as f64;
        Self::with_volume(spec, v)
    }

    pub fn with_volume(spec: ModelSpec, volume: f64) -> Result<Self> {
        spec.validate()?;
        if !(volume >= 1.0 && volume.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "volume must be >= 1, got {volume}"
            )));
        }
        if spec.kind == ModelKind::BlumeCapel && spec.d != 2 {
            return Err(Error::UnsupportedDimension(spec.d));
        }
        Ok(Self { spec, volume })
    }

    /// Linear size `V^(1/d)`.
    pub fn side(&self) -> f64 {
        self.volume.powf(1.0 / self.spec.d as f64)
    }

    pub fn phases(&self) -> &'static [PhaseLabel] {
        match self.spec.kind {
            ModelKind::Ising => &[PhaseLabel::Plus, PhaseLabel::Minus],
            ModelKind::BlumeCapel => &[PhaseLabel::Plus, PhaseLabel::Minus, PhaseLabel::Zero],
            ModelKind::Potts => &[PhaseLabel::D, PhaseLabel::M, PhaseLabel::O],
        }
    }

    /// Every unordered pair of phases, in label order.
    pub fn pairs(&self) -> Vec<PhasePair> {
        let ph = self.phases();
        let mut out = Vec::new();
        for i in 0..ph.len() {
            for j in i + 1..ph.len() {
                out.push(PhasePair(ph[i], ph[j]));
            }
        }
        out
    }

    pub fn degeneracy(&self, phase: PhaseLabel) -> f64 {
        match (self.spec.kind, phase) {
            (ModelKind::Potts, PhaseLabel::O) => self.spec.q as f64 - 1.0,
            _ => 1.0,
        }
    }

    pub fn trusted(&self) -> bool {
        match self.spec.kind {
            ModelKind::Ising | ModelKind::BlumeCapel => ising_trusted(self.spec.coupling),
            ModelKind::Potts => potts_trusted(self.spec.q, self.spec.coupling, self.spec.d),
        }
    }

    pub fn eval(&self, phase: PhaseLabel, z: Complex64) -> Result<FreeEnergyEval> {
        let s = &self.spec;
        match s.kind {
            ModelKind::Ising => ising_f(s.coupling, s.d, z, phase),
            ModelKind::BlumeCapel => blume_capel_f(s.coupling, s.lambda, s.d, z, phase),
            ModelKind::Potts => potts_f(s.q, s.coupling, s.d, z, phase),
        }
    }

    pub fn effective(&self, phase: PhaseLabel, z: Complex64) -> Result<EffectiveFreeEnergy> {
        Ok(EffectiveFreeEnergy::new(
            self.eval(phase, z)?,
            self.volume,
            self.degeneracy(phase),
        ))
    }

    pub fn effective_all(&self, z: Complex64) -> Result<Vec<EffectiveFreeEnergy>> {
        self.phases()
            .iter()
            .map(|&p| self.effective(p, z))
            .collect()
    }

    pub fn classify(&self, z: Complex64) -> Result<Stability> {
        Ok(classify_stability(&self.effective_all(z)?, TAU_STAB))
    }

    /// `(1/V) ln(q_a / q_b)`: the value of `Re(f_a - f_b)` on the coexistence curve.
    pub fn level(&self, pair: PhasePair) -> f64 {
        (self.degeneracy(pair.0) / self.degeneracy(pair.1)).ln() / self.volume
    }

    /// `F = f_a - f_b` and `F'`.
    pub fn difference(&self, pair: PhasePair, z: Complex64) -> Result<(Complex64, Complex64)> {
        let a = self.eval(pair.0, z)?;
        let b = self.eval(pair.1, z)?;
        Ok((a.f - b.f, a.df_dz - b.df_dz))
    }

    /// Whether the pair coexists strictly below every other phase at `z`:
    /// the third-phase condition, with margin [`TAU_STAB`].
    pub fn pair_stable(&self, pair: PhasePair, z: Complex64) -> Result<bool> {
        let evals = self.effective_all(z)?;
        let get = |p: PhaseLabel| evals.iter().find(|e| e.base.phase == p).map(|e| e.f_eff.re);
        let (Some(a), Some(b)) = (get(pair.0), get(pair.1)) else {
            return Err(Error::InvalidModel(format!("pair {pair} not in model")));
        };
        let top = a.max(b);
        Ok(evals
            .iter()
            .filter(|e| !pair.contains(e.base.phase))
            .all(|e| e.f_eff.re > top + TAU_STAB))
    }
}

pub const TABLE_HEADER: &str = "z_re,z_im,phase,f_re,f_im,df_re,df_im,gap";

/// CSV table of all phases at the given points; `gap` is `Re f_eff - min`.
pub fn evaluation_table(model: &PhaseModel, points: &[Complex64]) -> Result<String> {
    let mut out = String::from(TABLE_HEADER);
    out.push('\n');
    for &z in points {
        let evals = model.effective_all(z)?;
        let st = classify_stability(&evals, TAU_STAB);
        for (e, (_, gap)) in evals.iter().zip(&st.gaps) {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                fmt_f64(z.re),
                fmt_f64(z.im),
                e.base.phase,
                fmt_f64(e.base.f.re),
                fmt_f64(e.base.f.im),
                fmt_f64(e.base.df_dz.re),
                fmt_f64(e.base.df_dz.im),
                fmt_f64(*gap)
            ));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::central_difference;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ising_at_one() {
        let j = 1.1;
        for p in [PhaseLabel::Plus, PhaseLabel::Minus] {
            let e = ising_f(j, 2, c(1.0, 0.0), p).unwrap();
            assert!((e.f.re - (-2.0 * j - (-8.0 * j).exp())).abs() < 1e-15);
            assert_eq!(e.f.im, 0.0);
        }
        let fp = ising_f(j, 2, c(1.0, 0.0), PhaseLabel::Plus).unwrap();
        let fm = ising_f(j, 2, c(1.0, 0.0), PhaseLabel::Minus).unwrap();
        let d = fp.df_dz - fm.df_dz;
        assert!((d.re - (-2.0 + 4.0 * (-8.0 * j).exp())).abs() < 1e-14);
    }

    #[test]
    fn ising_real_parts_tie_on_circle() {
        for k in 0..17 {
            let z = Complex64::from_polar(1.0, -3.0 + 0.37 * k as f64);
            let a = ising_f(0.7, 2, z, PhaseLabel::Plus).unwrap().f.re;
            let b = ising_f(0.7, 2, z, PhaseLabel::Minus).unwrap().f.re;
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn blume_capel_mirror_symmetry() {
        let (j, l) = (0.9, 0.03);
        for z in [c(0.7, 0.4), c(-1.3, 0.2), c(0.1, -1.9)] {
            let w = 1.0 / z;
            let p = blume_capel_f(j, l, 2, z, PhaseLabel::Plus).unwrap();
            let m = blume_capel_f(j, l, 2, w, PhaseLabel::Minus).unwrap();
            assert!((p.f.re - m.f.re).abs() < 1e-14);
            let o1 = blume_capel_f(j, l, 2, z, PhaseLabel::Zero).unwrap();
            let o2 = blume_capel_f(j, l, 2, w, PhaseLabel::Zero).unwrap();
            assert!((o1.f - o2.f).norm() < 1e-14);
        }
        assert!(matches!(
            blume_capel_f(j, l, 3, c(1.0, 0.0), PhaseLabel::Zero),
            Err(Error::UnsupportedDimension(3))
        ));
    }

    #[test]
    fn blume_capel_delta_on_circle() {
        // Re f_+ - Re f_0 on |z| = 1 against -lambda + e^(-4J)(2e^l - e^-l) cos(theta)
        let j = 4.0f64.ln();
        let eps = (-4.0 * j).exp();
        let l = 0.5 * eps;
        for k in 0..9 {
            let th = k as f64 * PI / 8.0;
            let z = Complex64::from_polar(1.0, th);
            let fp = blume_capel_f(j, l, 2, z, PhaseLabel::Plus).unwrap().f.re;
            let f0 = blume_capel_f(j, l, 2, z, PhaseLabel::Zero).unwrap().f.re;
            let delta = fp - f0;
            let approx = -l + eps * (2.0 * l.exp() - (-l).exp()) * th.cos();
            assert!(
                (delta - approx).abs() < 10.0 * (-6.0 * j).exp(),
                "{th}: {delta} vs {approx}"
            );
        }
    }

    #[test]
    fn blume_capel_ground_state_limit() {
        let z = c(0.8, 0.5);
        let h = z.ln();
        let l = 0.3;
        let p = blume_capel_f(40.0, l, 2, z, PhaseLabel::Plus).unwrap().f;
        let m = blume_capel_f(40.0, l, 2, z, PhaseLabel::Minus).unwrap().f;
        let o = blume_capel_f(40.0, l, 2, z, PhaseLabel::Zero).unwrap().f;
        assert!((p - (-h - l)).norm() < 1e-12);
        assert!((m - (h - l)).norm() < 1e-12);
        assert!(o.norm() < 1e-12);
    }

    #[test]
    fn potts_m_and_o_agree_at_one() {
        for d in [2, 3] {
            let z = c(1.0, 0.0);
            let m = potts_f(25, 1.2, d, z, PhaseLabel::M).unwrap();
            let o = potts_f(25, 1.2, d, z, PhaseLabel::O).unwrap();
            assert!((m.f - o.f).norm() < 1e-15);
        }
    }

    #[test]
    fn potts_disordered_zero_field() {
        let (q, j, d) = (25u32, 1.1f64, 3usize);
        let e1 = j.exp() - 1.0;
        let qf = q as f64;
        let kappa = 15.0;
        let expect = qf.ln() + 3.0 * e1 / qf + kappa * e1 * e1 / (qf * qf)
            - (kappa + 0.5) * e1 * e1 / (qf * qf);
        let f = potts_f(q, j, d, c(1.0, 0.0), PhaseLabel::D).unwrap();
        assert!((-f.f.re - expect).abs() < 1e-14);
    }

    #[test]
    fn potts_branch_point_rejected() {
        assert!(potts_f(5, 1.0, 2, c(-4.0, 0.0), PhaseLabel::D).is_err());
        assert!(potts_f(5, 1.0, 2, c(0.0, 0.0), PhaseLabel::M).is_err());
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let models = [
            PhaseModel::new(ModelSpec::ising(0.9, 2, 4)).unwrap(),
            PhaseModel::new(ModelSpec::blume_capel(0.7, 0.02, 2, 4)).unwrap(),
            PhaseModel::new(ModelSpec::potts(25, 1.2, 3, 4)).unwrap(),
        ];
        for m in &models {
            for &p in m.phases() {
                for z in [c(0.6, 0.3), c(-1.2, 0.9), c(1.7, -0.2)] {
                    let e = m.eval(p, z).unwrap();
                    let fd = central_difference(|w| m.eval(p, w).unwrap().f, z, 1e-6);
                    assert!(
                        (fd - e.df_dz).norm() <= 1e-6 * e.df_dz.norm().max(1e-3),
                        "{p} at {z}"
                    );
                }
            }
        }
    }

    #[test]
    fn stability_examples() {
        let j = 4.0f64.ln();
        let bc = PhaseModel::new(ModelSpec::blume_capel(j, -2.0 * (-4.0 * j).exp(), 2, 8)).unwrap();
        assert_eq!(
            bc.classify(c(1.0, 0.0)).unwrap().stable,
            vec![PhaseLabel::Zero]
        );

        let ising = PhaseModel::new(ModelSpec::ising(1.0, 2, 4)).unwrap();
        let st = ising.classify(Complex64::from_polar(1.0, 0.4)).unwrap();
        assert_eq!(st.stable.len(), 2);

        let jq = (1.185f64 * 25.0).ln() / 3.0;
        let potts = PhaseModel::with_volume(ModelSpec::potts(25, jq, 3, 10), 1000.0).unwrap();
        for th in [0.0, 1.0, 2.5, PI] {
            let st = potts.classify(Complex64::from_polar(2.0, th)).unwrap();
            assert_eq!(st.stable, vec![PhaseLabel::M], "theta {th}");
        }
    }

    #[test]
    fn pair_labels_round_trip() {
        let p = PhasePair(PhaseLabel::Plus, PhaseLabel::Zero);
        assert_eq!(p.to_string(), "plus/zero");
        assert_eq!("plus/zero".parse::<PhasePair>().unwrap(), p);
        assert_eq!(serde_json::to_string(&p).unwrap(), "\"plus/zero\"");
        assert!("M-O".parse::<PhasePair>().is_err());
    }

    #[test]
    fn table_has_one_row_per_phase() {
        let m = PhaseModel::new(ModelSpec::potts(25, 1.2, 3, 4)).unwrap();
        let t = evaluation_table(&m, &[c(1.0, 0.0), c(0.5, 0.5)]).unwrap();
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines[0], TABLE_HEADER);
        assert_eq!(lines.len(), 1 + 6);
        assert!(lines.iter().skip(1).all(|l| l.split(',').count() == 8));
    }
}
