//! The four subcommands. Each writes its files and returns what it did.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use leeyang_core::free_energy::PhaseModel;
use leeyang_core::io::{fmt_f64, write_atomic};
use leeyang_core::locator::{
    curves_to_csv, density_profile, predict, quantize_zeros, CoexistenceCurve, Prediction,
};
use leeyang_core::model::{enumerate_sector_weights, ModelKind, ModelSpec, SectorWeights};
use leeyang_core::roots::{find_roots, match_zeros, MatchReport, Variable, ZeroSet};
use leeyang_core::transfer::extract_coefficients;
use leeyang_core::{Complex64, Error as CoreError};
use serde_json::{json, Value};

use crate::config::{Against, CommandKind, CompareArgs, RunConfig};
use crate::error::CliError;
use crate::svg::{emit_svg, Figure};

/// Files written, a one-line summary for stdout and warnings for stderr.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: String,
    pub warnings: Vec<String>,
}

impl Outcome {
    fn write(&mut self, dir: &Path, name: String, contents: &str) -> Result<(), CliError> {
        let path = dir.join(name);
        write_atomic(&path, contents.as_bytes())?;
        self.files.push(path);
        Ok(())
    }
}

fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values always serialize");
    s.push('\n');
    s
}

fn model_json(spec: &ModelSpec, volume: u64) -> Value {
    json!({
        "kind": spec.kind.to_string(),
        "J": spec.coupling,
        "lambda": spec.lambda,
        "q": spec.q,
        "d": spec.d,
        "L": spec.side,
        "V": volume,
    })
}

fn variable_for(kind: ModelKind) -> Variable {
    match kind {
        ModelKind::Ising => Variable::U,
        _ => Variable::Z,
    }
}

/// Transfer matrices where they fit, enumeration otherwise.
pub fn exact_weights(spec: &ModelSpec) -> Result<SectorWeights, CliError> {
    if spec.d <= 2 {
        match extract_coefficients(spec) {
            Ok(w) => return Ok(w),
            Err(tm @ CoreError::DimensionCap { .. }) => {
                return enumerate_sector_weights(spec).map_err(|_| CliError::from(tm));
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(enumerate_sector_weights(spec)?)
}

pub fn exact_zero_set(spec: &ModelSpec) -> Result<(SectorWeights, ZeroSet), CliError> {
    let w = exact_weights(spec)?;
    let zeros = find_roots(&w, variable_for(spec.kind))?;
    Ok((w, zeros))
}

pub fn phase_model(cfg: &RunConfig) -> Result<PhaseModel, CliError> {
    Ok(PhaseModel::with_volume(cfg.spec, cfg.volume as f64)?)
}

/// Curves in plot coordinates (`u = z^2` for Ising).
fn plot_curves(kind: ModelKind, curves: &[CoexistenceCurve]) -> Vec<Vec<Complex64>> {
    curves
        .iter()
        .map(|c| {
            c.points
                .iter()
                .map(|p| {
                    if kind == ModelKind::Ising {
                        p.z * p.z
                    } else {
                        p.z
                    }
                })
                .collect()
        })
        .collect()
}

fn plot_point(kind: ModelKind, z: Complex64) -> Complex64 {
    if kind == ModelKind::Ising {
        z * z
    } else {
        z
    }
}

fn prediction_warnings(p: &Prediction, out: &mut Outcome) {
    if !p.trusted {
        out.warnings.push(
            "warning: couplings lie outside the range where the free-energy expansions are trusted; results are extrapolated"
                .into(),
        );
    }
    if p.refine_failures > 0 {
        out.warnings.push(format!(
            "warning: {} zeros kept their interpolated position after refinement failed",
            p.refine_failures
        ));
    }
    for c in &p.curves {
        if let Some(d) = &c.diagnostic {
            out.warnings
                .push(format!("warning: curve {} stopped early: {d}", c.pair));
        }
    }
}

pub fn run_exact(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (weights, zeros) = exact_zero_set(&cfg.spec)?;
    let mut out = Outcome::default();
    let stem = cfg.stem();
    let dev = zeros.max_circle_deviation();
    if cfg.format.csv() {
        out.write(&cfg.out, format!("{stem}_zeros.csv"), &zeros.to_csv())?;
    }
    if cfg.format.json() {
        out.write(
            &cfg.out,
            format!("{stem}_zeros.json"),
            &(zeros.to_json()? + "\n"),
        )?;
        out.write(
            &cfg.out,
            format!("{stem}_weights.json"),
            &(weights.to_json()? + "\n"),
        )?;
    }
    if cfg.format.svg() {
        let fig = Figure {
            title: format!("exact zeros in {}", zeros.variable),
            exact: zeros.points(),
            ..Figure::default()
        };
        out.write(&cfg.out, format!("{stem}.svg"), &emit_svg(&fig))?;
    }
    if cfg.spec.kind == ModelKind::Ising && dev > 1e-8 {
        out.warnings.push(format!(
            "warning: Ising zeros leave the unit circle by {dev:e}"
        ));
    }
    out.summary = format!(
        "exact: {} zeros in {}, max ||{}|-1| = {}",
        zeros.len(),
        zeros.variable,
        zeros.variable,
        fmt_f64(dev)
    );
    Ok(out)
}

fn prediction_summary(p: &Prediction) -> Value {
    let mut by_pair: BTreeMap<String, usize> = BTreeMap::new();
    for z in &p.zeros.zeros {
        *by_pair
            .entry(z.pair.map(|q| q.to_string()).unwrap_or_default())
            .or_default() += 1;
    }
    json!({
        "zeros": p.zeros.len(),
        "zeros_by_pair": by_pair,
        "curves": p.curves.iter().map(|c| json!({
            "pair": c.pair.to_string(),
            "points": c.points.len(),
            "closed": c.closed,
            "winding_over_2pi": c.winding() / (2.0 * PI),
            "diagnostic": c.diagnostic,
        })).collect::<Vec<_>>(),
        "multiple_points": p.multiple_points.len(),
        "excluded_unstable": p.excluded.len() - p.excluded_near_multiple_points(),
        "excluded_near_multiple_points": p.excluded_near_multiple_points(),
        "refine_failures": p.refine_failures,
        "trusted": p.trusted,
    })
}

pub fn run_predict(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let model = phase_model(cfg)?;
    let p = predict(&model, &cfg.predict)?;
    let mut out = Outcome::default();
    prediction_warnings(&p, &mut out);
    let stem = cfg.stem();
    if cfg.format.csv() {
        out.write(
            &cfg.out,
            format!("{stem}_curves.csv"),
            &curves_to_csv(&p.curves),
        )?;
        out.write(&cfg.out, format!("{stem}_zeros.csv"), &p.zeros.to_csv())?;
    }
    if cfg.format.json() {
        out.write(
            &cfg.out,
            format!("{stem}_curves.json"),
            &to_json(&serde_json::to_value(&p.curves)?),
        )?;
        out.write(
            &cfg.out,
            format!("{stem}_zeros.json"),
            &(p.zeros.to_json()? + "\n"),
        )?;
        out.write(
            &cfg.out,
            format!("{stem}_multiple_points.json"),
            &to_json(&serde_json::to_value(&p.multiple_points)?),
        )?;
        let mut summary = prediction_summary(&p);
        summary["model"] = model_json(&cfg.spec, cfg.volume);
        summary["excluded"] = serde_json::to_value(&p.excluded)?;
        out.write(&cfg.out, format!("{stem}_summary.json"), &to_json(&summary))?;
    }
    if cfg.format.svg() {
        let kind = cfg.spec.kind;
        let fig = Figure {
            title: format!("predicted zeros in {}", p.zeros.variable),
            curves: plot_curves(kind, &p.curves),
            predicted: p.zeros.points(),
            multiple_points: p
                .multiple_points
                .iter()
                .map(|m| plot_point(kind, m.z))
                .collect(),
            ..Figure::default()
        };
        out.write(&cfg.out, format!("{stem}.svg"), &emit_svg(&fig))?;
    }
    out.summary = format!(
        "predict: {} zeros on {} curves, {} multiple points, {} crossings excluded near them",
        p.zeros.len(),
        p.curves.len(),
        p.multiple_points.len(),
        p.excluded_near_multiple_points()
    );
    Ok(out)
}

/// One exact-versus-second-set comparison.
pub struct Comparison {
    pub exact: ZeroSet,
    pub other: ZeroSet,
    pub report: MatchReport,
    pub prediction: Option<Prediction>,
}

pub fn compare_once(cfg: &RunConfig, against: Against) -> Result<Comparison, CliError> {
    let (_, exact) = exact_zero_set(&cfg.spec)?;
    let (other, prediction) = match against {
        Against::Exact => (exact_zero_set(&cfg.spec)?.1, None),
        Against::Predicted => {
            let p = predict(&phase_model(cfg)?, &cfg.predict)?;
            (p.zeros.clone(), Some(p))
        }
    };
    let report = match_zeros(&exact, &other)?;
    Ok(Comparison {
        exact,
        other,
        report,
        prediction,
    })
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn report_json(c: &Comparison) -> Value {
    json!({
        "variable": c.exact.variable.to_string(),
        "exact_count": c.exact.len(),
        "other_count": c.other.len(),
        "max_distance": c.report.max_distance,
        "mean_distance": c.report.mean_distance,
        "unmatched_exact": c.report.unmatched_a.len(),
        "unmatched_other": c.report.unmatched_b.len(),
    })
}

pub fn run_compare(args: &CompareArgs) -> Result<Outcome, CliError> {
    let mut common = args.common.clone();
    if let (Some(s), None, None) = (&args.sweep, common.side, common.volume) {
        common.side = Some(s.0[0]);
    }
    let cfg = RunConfig::resolve(CommandKind::Compare, &common)?;
    let base = compare_once(&cfg, args.against)?;
    let mut out = Outcome::default();
    if let Some(p) = &base.prediction {
        prediction_warnings(p, &mut out);
    }
    let mut report = report_json(&base);
    report["model"] = model_json(&cfg.spec, cfg.volume);
    report["against"] = json!(match args.against {
        Against::Exact => "exact",
        Against::Predicted => "predicted",
    });

    let mut summary = format!(
        "compare: max distance {}, mean {}, unmatched {}/{}",
        fmt_f64(base.report.max_distance),
        fmt_f64(base.report.mean_distance),
        base.report.unmatched_a.len(),
        base.report.unmatched_b.len()
    );
    if let Some(sweep) = &args.sweep {
        let mut rows = Vec::new();
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for &l in &sweep.0 {
            let mut one = cfg.clone();
            one.spec.side = l;
            one.volume = one.spec.volume() as u64;
            let c = compare_once(&one, args.against)?;
            let mut row = report_json(&c);
            row["L"] = json!(l);
            rows.push(row);
            xs.push(l as f64);
            ys.push(c.report.max_distance.ln());
        }
        let slope = fit_slope(&xs, &ys);
        let decreasing = ys.windows(2).all(|w| w[1] < w[0]);
        report["sweep"] = json!({
            "rows": rows,
            "slope": slope,
            "inverse_l0": -slope,
            "strictly_decreasing": decreasing,
        });
        summary.push_str(&format!(
            "; sweep slope of ln(max distance) vs L = {} ({})",
            fmt_f64(slope),
            if decreasing {
                "strictly decreasing"
            } else {
                "not strictly decreasing"
            }
        ));
        if !decreasing {
            out.warnings.push(
                "warning: max distance does not decrease strictly in L; the expansion truncation floor dominates".into(),
            );
        }
    }

    let stem = cfg.stem();
    if cfg.format.json() {
        out.write(&cfg.out, format!("{stem}_report.json"), &to_json(&report))?;
    }
    if cfg.format.csv() {
        let mut csv = String::from("a_re,a_im,b_re,b_im,distance\n");
        for p in &base.report.pairs {
            let (a, b) = (base.exact.zeros[p.a].z, base.other.zeros[p.b].z);
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt_f64(a.re),
                fmt_f64(a.im),
                fmt_f64(b.re),
                fmt_f64(b.im),
                fmt_f64(p.distance)
            ));
        }
        out.write(&cfg.out, format!("{stem}_pairs.csv"), &csv)?;
    }
    if cfg.format.svg() {
        let kind = cfg.spec.kind;
        let (curves, multiple_points) = match &base.prediction {
            Some(p) => (
                plot_curves(kind, &p.curves),
                p.multiple_points
                    .iter()
                    .map(|m| plot_point(kind, m.z))
                    .collect(),
            ),
            None => (Vec::new(), Vec::new()),
        };
        let fig = Figure {
            title: format!(
                "exact (crosses) against {} (circles)",
                report["against"].as_str().unwrap_or("")
            ),
            curves,
            exact: base.exact.points(),
            predicted: base.other.points(),
            multiple_points,
        };
        out.write(&cfg.out, format!("{stem}.svg"), &emit_svg(&fig))?;
    }
    out.summary = summary;
    Ok(out)
}

pub const DENSITY_HEADER: &str = "arc_length,density,cumulative";

pub fn run_density(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let model = phase_model(cfg)?;
    let p = predict(&model, &cfg.predict)?;
    let mut out = Outcome::default();
    prediction_warnings(&p, &mut out);
    let stem = cfg.stem();
    let mut rows_json = Vec::new();
    let mut worst: Option<f64> = None;
    for (i, c) in p.curves.iter().enumerate() {
        let rows = density_profile(&model, c)?;
        if cfg.format.csv() {
            let mut csv = String::from(DENSITY_HEADER);
            csv.push('\n');
            for r in &rows {
                csv.push_str(&format!(
                    "{},{},{}\n",
                    fmt_f64(r.arc_length),
                    fmt_f64(r.density),
                    fmt_f64(r.cumulative)
                ));
            }
            out.write(&cfg.out, format!("{stem}_curve{i}.csv"), &csv)?;
        }
        let integral = rows.last().map(|r| r.cumulative).unwrap_or(0.0);
        let count = quantize_zeros(c, &[]).zeros.len();
        let turns = c.winding() / (2.0 * PI);
        let closed_stable = c.closed && c.all_stable();
        let mismatch = (integral - count as f64).abs() / (count as f64).max(1.0);
        if closed_stable {
            worst = Some(worst.map_or(mismatch, |w: f64| w.max(mismatch)));
        }
        let (lo, hi) = extreme_angles(c, &rows);
        rows_json.push(json!({
            "index": i,
            "pair": c.pair.to_string(),
            "closed": c.closed,
            "all_stable": c.all_stable(),
            "winding_over_2pi": turns,
            "quantized_zeros": count,
            "density_integral": integral,
            "relative_mismatch": if closed_stable { json!(mismatch) } else { Value::Null },
            "min_density": rows.iter().map(|r| r.density).fold(f64::INFINITY, f64::min),
            "max_density": rows.iter().map(|r| r.density).fold(0.0, f64::max),
            "min_density_angle": lo,
            "max_density_angle": hi,
        }));
    }
    if cfg.format.json() {
        let summary = json!({
            "model": model_json(&cfg.spec, cfg.volume),
            "curves": rows_json,
            "worst_relative_mismatch": worst,
        });
        out.write(&cfg.out, format!("{stem}_summary.json"), &to_json(&summary))?;
    }
    if cfg.format.svg() {
        let fig = Figure {
            title: "coexistence curves".into(),
            curves: plot_curves(cfg.spec.kind, &p.curves),
            ..Figure::default()
        };
        out.write(&cfg.out, format!("{stem}.svg"), &emit_svg(&fig))?;
    }
    out.summary = format!(
        "density: {} curves, worst relative mismatch between integral and zero count on closed stable curves: {}",
        p.curves.len(),
        worst.map_or_else(|| "none closed and stable".to_string(), fmt_f64)
    );
    Ok(out)
}

/// Arguments of the curve points with the lowest and highest density.
fn extreme_angles(c: &CoexistenceCurve, rows: &[leeyang_core::locator::DensityRow]) -> (f64, f64) {
    let mut lo = (f64::INFINITY, 0.0);
    let mut hi = (f64::NEG_INFINITY, 0.0);
    for (p, r) in c.points.iter().zip(rows) {
        if r.density < lo.0 {
            lo = (r.density, p.z.arg());
        }
        if r.density > hi.0 {
            hi = (r.density, p.z.arg());
        }
    }
    (lo.1, hi.1)
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
