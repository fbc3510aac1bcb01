//! Ising, Blume-Capel and Potts Hamiltonians on periodic hypercubic lattices,
//! plus the exhaustive-enumeration oracle for the partition function.
//!
//! Conventions: `beta = 1`, so `J`, `lambda` and `h` are already scaled by the
//! inverse temperature. Every site has `2d` neighbours and the bond multiset is
//! `{(x, x + e_k) : x in sites, k < d}`, which has exactly `d * V` elements. On
//! an `L = 2` lattice this counts every neighbouring pair twice.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{horner_real, KahanSum};

/// Default cap on the number of configurations an enumeration may visit.
pub const DEFAULT_ENUMERATION_CAP: u64 = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Ising,
    BlumeCapel,
    Potts,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Ising => "ising",
            ModelKind::BlumeCapel => "blume-capel",
            ModelKind::Potts => "potts",
        })
    }
}

/// Model, couplings and periodic lattice geometry.
///
/// `lambda` only matters for Blume-Capel and `q` only for Potts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    #[serde(rename = "J")]
    pub coupling: f64,
    pub lambda: f64,
    pub q: u32,
    pub d: usize,
    #[serde(rename = "L")]
    pub side: usize,
}

impl ModelSpec {
    pub fn ising(coupling: f64, d: usize, side: usize) -> Self {
        Self {
            kind: ModelKind::Ising,
            coupling,
            lambda: 0.0,
            q: 2,
            d,
            side,
        }
    }

    pub fn blume_capel(coupling: f64, lambda: f64, d: usize, side: usize) -> Self {
        Self {
            kind: ModelKind::BlumeCapel,
            coupling,
            lambda,
            q: 3,
            d,
            side,
        }
    }

    pub fn potts(q: u32, coupling: f64, d: usize, side: usize) -> Self {
        Self {
            kind: ModelKind::Potts,
            coupling,
            lambda: 0.0,
            q,
            d,
            side,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.coupling.is_finite() && self.coupling > 0.0) {
            return Err(Error::InvalidModel(format!(
                "J must be positive, got {}",
                self.coupling
            )));
        }
        if self.kind == ModelKind::BlumeCapel && !self.lambda.is_finite() {
            return Err(Error::InvalidModel("lambda must be finite".into()));
        }
        if self.kind == ModelKind::Potts && self.q < 2 {
            return Err(Error::InvalidModel(format!(
                "Potts needs q >= 2, got {}",
                self.q
            )));
        }
        if self.d == 0 {
            return Err(Error::InvalidModel("dimension d must be at least 1".into()));
        }
        if self.side < 2 {
            return Err(Error::InvalidModel(format!(
                "side L must be at least 2, got {}",
                self.side
            )));
        }
        self.checked_volume()
            .ok_or_else(|| Error::InvalidModel("volume L^d overflows".into()))?;
        Ok(())
    }

    fn checked_volume(&self) -> Option<usize> {
        let d = u32::try_from(self.d).ok()?;
        let v = self.side.checked_pow(d)?;
        // site indices and field charges are handled as i64 downstream
        (v <= i64::MAX as usize / 8).then_some(v)
    }

    /// Number of sites `V = L^d`.
    pub fn volume(&self) -> usize {
        self.checked_volume()
            .expect("volume overflow; call validate() first")
    }

    /// Spin values allowed at each site.
    pub fn alphabet(&self) -> Vec<i32> {
        match self.kind {
            ModelKind::Ising => vec![-1, 1],
            ModelKind::BlumeCapel => vec![-1, 0, 1],
            ModelKind::Potts => (1..=self.q as i32).collect(),
        }
    }

    pub fn alphabet_size(&self) -> usize {
        match self.kind {
            ModelKind::Ising => 2,
            ModelKind::BlumeCapel => 3,
            ModelKind::Potts => self.q as usize,
        }
    }

    /// Contribution of one spin to the quantum number conjugate to the field.
    #[inline]
    pub fn field_charge(&self, spin: i32) -> i64 {
        match self.kind {
            ModelKind::Ising | ModelKind::BlumeCapel => spin as i64,
            ModelKind::Potts => (spin == 1) as i64,
        }
    }

    /// `(m_min, m_max, step)` of the field-conjugate quantum number.
    pub fn m_range(&self) -> (i64, i64, i64) {
        let v = self.volume() as i64;
        match self.kind {
            ModelKind::Ising => (-v, v, 2),
            ModelKind::BlumeCapel => (-v, v, 1),
            ModelKind::Potts => (0, v, 1),
        }
    }

    /// Integer bond feature; the zero-field bond energy is linear in it.
    #[inline]
    pub(crate) fn bond_feature(&self, a: i32, b: i32) -> i64 {
        match self.kind {
            ModelKind::Ising => (a * b) as i64,
            ModelKind::BlumeCapel => ((a - b) * (a - b)) as i64,
            ModelKind::Potts => (a == b) as i64,
        }
    }

    /// Integer site feature (only Blume-Capel has one: `sigma^2`).
    #[inline]
    pub(crate) fn site_feature(&self, a: i32) -> i64 {
        match self.kind {
            ModelKind::BlumeCapel => (a * a) as i64,
            _ => 0,
        }
    }

    /// Zero-field energy from summed bond and site features.
    #[inline]
    pub(crate) fn energy_from_features(&self, bonds: i64, sites: i64) -> f64 {
        let j = self.coupling;
        match self.kind {
            ModelKind::Ising | ModelKind::Potts => -j * bonds as f64,
            ModelKind::BlumeCapel => j * bonds as f64 - self.lambda * sites as f64,
        }
    }

    /// Zero-field energy of a single bond.
    #[inline]
    pub fn bond_energy(&self, a: i32, b: i32) -> f64 {
        self.energy_from_features(self.bond_feature(a, b), 0)
    }

    /// Zero-field single-site energy.
    #[inline]
    pub fn site_energy(&self, a: i32) -> f64 {
        self.energy_from_features(0, self.site_feature(a))
    }

    /// Inclusive bounds of the summed bond feature over the `d * V` bonds.
    fn bond_feature_range(&self) -> (i64, i64) {
        let nb = (self.d * self.volume()) as i64;
        match self.kind {
            ModelKind::Ising => (-nb, nb),
            ModelKind::BlumeCapel => (0, 4 * nb),
            ModelKind::Potts => (0, nb),
        }
    }

    fn site_feature_max(&self) -> i64 {
        match self.kind {
            ModelKind::BlumeCapel => self.volume() as i64,
            _ => 0,
        }
    }

    /// `|alphabet|^V` as a float (may exceed integer range).
    pub fn state_count(&self) -> f64 {
        (self.alphabet_size() as f64).powi(self.volume() as i32)
    }
}

/// Index of the neighbour of `site` one step along axis `axis` (periodic).
#[inline]
pub fn neighbor(site: usize, axis: usize, side: usize) -> usize {
    let stride = side.pow(axis as u32);
    let coord = (site / stride) % side;
    if coord + 1 == side {
        site + stride - side * stride
    } else {
        site + stride
    }
}

/// One spin per site, sites indexed lexicographically with axis 0 fastest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    pub spins: Vec<i32>,
}

impl Configuration {
    pub fn new(spins: Vec<i32>) -> Self {
        Self { spins }
    }

    pub fn uniform(model: &ModelSpec, spin: i32) -> Self {
        Self {
            spins: vec![spin; model.volume()],
        }
    }

    pub fn validate(&self, model: &ModelSpec) -> Result<()> {
        let v = model.volume();
        if self.spins.len() != v {
            return Err(Error::InvalidConfiguration(format!(
                "expected {v} spins, got {}",
                self.spins.len()
            )));
        }
        let alphabet = model.alphabet();
        if let Some((site, s)) = self
            .spins
            .iter()
            .enumerate()
            .find(|(_, s)| !alphabet.contains(s))
        {
            return Err(Error::InvalidConfiguration(format!(
                "spin {s} at site {site} is not in the {} alphabet",
                model.kind
            )));
        }
        Ok(())
    }

    /// Total field-conjugate quantum number `m`.
    pub fn charge(&self, model: &ModelSpec) -> i64 {
        self.spins.iter().map(|&s| model.field_charge(s)).sum()
    }
}

/// Summed integer features `(bond, site, charge)` of a configuration.
fn features(model: &ModelSpec, spins: &[i32]) -> (i64, i64, i64) {
    let l = model.side;
    let mut bonds = 0;
    let mut sites = 0;
    let mut charge = 0;
    for (x, &s) in spins.iter().enumerate() {
        for axis in 0..model.d {
            bonds += model.bond_feature(s, spins[neighbor(x, axis, l)]);
        }
        sites += model.site_feature(s);
        charge += model.field_charge(s);
    }
    (bonds, sites, charge)
}

/// `beta * H(config, h)` with `beta = 1`.
pub fn hamiltonian(model: &ModelSpec, config: &Configuration, h: Complex64) -> Result<Complex64> {
    model.validate()?;
    config.validate(model)?;
    let l = model.side;
    let mut energy = KahanSum::new();
    for (x, &s) in config.spins.iter().enumerate() {
        for axis in 0..model.d {
            energy.add(model.bond_energy(s, config.spins[neighbor(x, axis, l)]));
        }
        energy.add(model.site_energy(s));
    }
    let m = config.charge(model) as f64;
    Ok(Complex64::new(energy.value(), 0.0) - h * m)
}

/// Zero-field Boltzmann weight of each magnetization sector.
///
/// `Z(z) = sum_i weights[i] * z^(m_min + i * step)` with `z = e^h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorWeights {
    pub model: ModelSpec,
    pub m_min: i64,
    pub step: i64,
    pub weights: Vec<f64>,
}

impl SectorWeights {
    pub fn m_max(&self) -> i64 {
        self.m_min + self.step * (self.weights.len() as i64 - 1)
    }

    /// `(m_min, m_max, step)`.
    pub fn m_range(&self) -> (i64, i64, i64) {
        (self.m_min, self.m_max(), self.step)
    }

    /// Weight of sector `m`, or `None` if `m` is not a valid sector.
    pub fn weight(&self, m: i64) -> Option<f64> {
        let off = m - self.m_min;
        if off < 0 || off % self.step != 0 {
            return None;
        }
        self.weights.get((off / self.step) as usize).copied()
    }

    /// Sum over sectors, i.e. the partition function at `h = 0`.
    pub fn total(&self) -> f64 {
        let mut s = KahanSum::new();
        self.weights.iter().for_each(|&w| s.add(w));
        s.value()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Per-sector histogram of integer energy features, indexed `[m][bond][site]`.
struct FeatureHistogram {
    counts: Vec<u64>,
    n_bond: usize,
    n_site: usize,
}

impl FeatureHistogram {
    fn new(n_m: usize, n_bond: usize, n_site: usize) -> Self {
        Self {
            counts: vec![0; n_m * n_bond * n_site],
            n_bond,
            n_site,
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.counts
            .iter_mut()
            .zip(other.counts)
            .for_each(|(a, b)| *a += b);
        self
    }
}

/// Exact sector weights by visiting every configuration, with the default cap.
pub fn enumerate_sector_weights(model: &ModelSpec) -> Result<SectorWeights> {
    enumerate_sector_weights_with_cap(model, DEFAULT_ENUMERATION_CAP)
}

/// Exact sector weights by visiting every configuration.
///
/// Configurations are binned by their integer energy features, so the work
/// split across threads only ever adds integers and the result does not
/// depend on the partitioning. Weights are then formed with compensated sums.
pub fn enumerate_sector_weights_with_cap(model: &ModelSpec, cap: u64) -> Result<SectorWeights> {
    model.validate()?;
    let states = model.state_count();
    if states > cap as f64 {
        return Err(Error::TooLarge { states, cap });
    }
    let total = states as u64;
    let s = model.alphabet_size() as u64;
    let v = model.volume();
    let alphabet = model.alphabet();
    let (m_min, m_max, step) = model.m_range();
    let n_m = ((m_max - m_min) / step + 1) as usize;
    let (b_min, b_max) = model.bond_feature_range();
    let n_bond = (b_max - b_min + 1) as usize;
    let n_site = (model.site_feature_max() + 1) as usize;

    let chunk = 1u64 << 14;
    let n_chunks = total.div_ceil(chunk);
    let hist = (0..n_chunks)
        .into_par_iter()
        .fold(
            || FeatureHistogram::new(n_m, n_bond, n_site),
            |mut hist, c| {
                let start = c * chunk;
                let end = (start + chunk).min(total);
                let mut digits = vec![0usize; v];
                let mut rest = start;
                for d in digits.iter_mut() {
                    *d = (rest % s) as usize;
                    rest /= s;
                }
                let mut spins: Vec<i32> = digits.iter().map(|&d| alphabet[d]).collect();
                for _ in start..end {
                    let (bonds, sites, charge) = features(model, &spins);
                    let im = ((charge - m_min) / step) as usize;
                    let ib = (bonds - b_min) as usize;
                    hist.counts[(im * hist.n_bond + ib) * hist.n_site + sites as usize] += 1;
                    // mixed-radix increment
                    for (d, spin) in digits.iter_mut().zip(spins.iter_mut()) {
                        *d += 1;
                        if *d as u64 == s {
                            *d = 0;
                            *spin = alphabet[0];
                        } else {
                            *spin = alphabet[*d];
                            break;
                        }
                    }
                }
                hist
            },
        )
        .reduce(
            || FeatureHistogram::new(n_m, n_bond, n_site),
            FeatureHistogram::merge,
        );

    let mut weights = Vec::with_capacity(n_m);
    for im in 0..n_m {
        let mut acc = KahanSum::new();
        for ib in 0..n_bond {
            for is in 0..n_site {
                let count = hist.counts[(im * n_bond + ib) * n_site + is];
                if count > 0 {
                    let e = model.energy_from_features(b_min + ib as i64, is as i64);
                    acc.add(count as f64 * (-e).exp());
                }
            }
        }
        weights.push(acc.value());
    }
    if weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::Overflow("sector weight exceeds double range".into()));
    }
    Ok(SectorWeights {
        model: *model,
        m_min,
        step,
        weights,
    })
}

/// `Z(z) = sum_m weights[m] z^m`, by Horner in `z^step` followed by the
/// monomial shift `z^m_min`.
pub fn evaluate_z(weights: &SectorWeights, z: Complex64) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        if weights.m_min < 0 {
            return Err(Error::Domain(
                "Z has negative powers of z; z = 0 is a pole".into(),
            ));
        }
        return Ok(if weights.m_min == 0 {
            Complex64::new(weights.weights[0], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        });
    }
    let w = z.powi(weights.step as i32);
    Ok(horner_real(&weights.weights, w) * z.powi(weights.m_min as i32))
}

/// Brute-force `sum_config exp(-beta H(config, h))` with `h = ln z`.
///
/// Independent of [`enumerate_sector_weights`]; evaluates the Hamiltonian of
/// every configuration at complex field. Intended as a test oracle.
pub fn direct_partition_sum(model: &ModelSpec, z: Complex64, cap: u64) -> Result<Complex64> {
    model.validate()?;
    let states = model.state_count();
    if states > cap as f64 {
        return Err(Error::TooLarge { states, cap });
    }
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain("z = 0 has no logarithm".into()));
    }
    let h = z.ln();
    let alphabet = model.alphabet();
    let s = alphabet.len();
    let v = model.volume();
    let mut digits = vec![0usize; v];
    let mut config = Configuration::new(vec![alphabet[0]; v]);
    let mut re = KahanSum::new();
    let mut im = KahanSum::new();
    for _ in 0..states as u64 {
        let w = (-hamiltonian(model, &config, h)?).exp();
        re.add(w.re);
        im.add(w.im);
        for (d, spin) in digits.iter_mut().zip(config.spins.iter_mut()) {
            *d += 1;
            if *d == s {
                *d = 0;
                *spin = alphabet[0];
            } else {
                *spin = alphabet[*d];
                break;
            }
        }
    }
    Ok(Complex64::new(re.value(), im.value()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ising_all_up_energy_counts_double_bonds() {
        let m = ModelSpec::ising(0.7, 2, 2);
        let cfg = Configuration::uniform(&m, 1);
        let h = 0.3;
        let e = hamiltonian(&m, &cfg, c(h, 0.0)).unwrap();
        assert!((e.re - (-8.0 * 0.7 - 4.0 * h)).abs() < 1e-14);
        assert_eq!(e.im, 0.0);
    }

    #[test]
    fn blume_capel_zero_state_has_zero_energy() {
        for l in 2..5 {
            let m = ModelSpec::blume_capel(0.9, -0.4, 2, l);
            let cfg = Configuration::uniform(&m, 0);
            let e = hamiltonian(&m, &cfg, c(0.3, -1.1)).unwrap();
            assert_eq!(e, c(0.0, 0.0));
        }
    }

    #[test]
    fn potts_all_ones() {
        let m = ModelSpec::potts(3, 0.45, 2, 3);
        let cfg = Configuration::uniform(&m, 1);
        let h = -0.2;
        let e = hamiltonian(&m, &cfg, c(h, 0.0)).unwrap();
        assert!((e.re - (-18.0 * 0.45 - 9.0 * h)).abs() < 1e-13);
    }

    #[test]
    fn rejects_foreign_spin() {
        let m = ModelSpec::ising(1.0, 2, 2);
        let cfg = Configuration::new(vec![1, 0, 1, 1]);
        assert!(matches!(
            hamiltonian(&m, &cfg, c(0.0, 0.0)),
            Err(Error::InvalidConfiguration(_))
        ));
        let short = Configuration::new(vec![1, 1]);
        assert!(matches!(
            short.validate(&m),
            Err(Error::InvalidConfiguration(_))
        ));
    }

    #[test]
    fn rejects_bad_models() {
        assert!(ModelSpec::ising(0.0, 2, 3).validate().is_err());
        assert!(ModelSpec::ising(1.0, 2, 1).validate().is_err());
        assert!(ModelSpec::potts(1, 1.0, 2, 3).validate().is_err());
        assert!(ModelSpec::ising(1.0, 0, 3).validate().is_err());
    }

    #[test]
    fn ising_top_sector_is_single_configuration() {
        let j = 0.8;
        let w = enumerate_sector_weights(&ModelSpec::ising(j, 2, 2)).unwrap();
        assert_eq!(w.m_range(), (-4, 4, 2));
        let top = w.weight(4).unwrap();
        assert!((top / (8.0 * j).exp() - 1.0).abs() < 1e-15);
        for m in [-4, -2, 0] {
            assert_eq!(w.weight(m), w.weight(-m));
        }
    }

    #[test]
    fn cap_is_enforced() {
        let m = ModelSpec::ising(1.0, 2, 5);
        match enumerate_sector_weights(&m) {
            Err(Error::TooLarge { cap, .. }) => assert_eq!(cap, DEFAULT_ENUMERATION_CAP),
            other => panic!("expected TooLarge, got {other:?}"),
        }
        assert!(enumerate_sector_weights_with_cap(&ModelSpec::ising(1.0, 1, 10), 100).is_err());
    }

    #[test]
    fn evaluate_z_at_one_is_total_weight() {
        let w = enumerate_sector_weights(&ModelSpec::blume_capel(0.5, 0.2, 2, 2)).unwrap();
        let z1 = evaluate_z(&w, c(1.0, 0.0)).unwrap();
        assert!((z1.re / w.total() - 1.0).abs() < 1e-14);
        assert!(matches!(evaluate_z(&w, c(0.0, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn ising_unit_circle_reflection() {
        let w = enumerate_sector_weights(&ModelSpec::ising(0.6, 2, 3)).unwrap();
        for k in 0..7 {
            let z = Complex64::from_polar(1.0, 0.37 + k as f64);
            let a = evaluate_z(&w, z).unwrap().norm();
            let b = evaluate_z(&w, 1.0 / z.conj()).unwrap().norm();
            assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        }
    }

    #[test]
    fn neighbor_wraps() {
        // 3x3: site 2 is (2,0); +x wraps to (0,0), +y goes to (2,1)
        assert_eq!(neighbor(2, 0, 3), 0);
        assert_eq!(neighbor(2, 1, 3), 5);
        assert_eq!(neighbor(8, 1, 3), 2);
        // L = 2 double counting: both directions land on the same partner
        assert_eq!(neighbor(0, 0, 2), 1);
        assert_eq!(neighbor(1, 0, 2), 0);
    }

    #[test]
    fn sector_weights_json_shape() {
        let w = enumerate_sector_weights(&ModelSpec::ising(0.5, 1, 3)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&w.to_json().unwrap()).unwrap();
        assert!(v.get("model").is_some());
        assert_eq!(v["m_min"], -3);
        assert_eq!(v["step"], 2);
        assert_eq!(v["weights"].as_array().unwrap().len(), 4);
        assert_eq!(SectorWeights::from_json(&w.to_json().unwrap()).unwrap(), w);
    }
}
