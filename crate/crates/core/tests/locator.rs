use std::f64::consts::PI;

use leeyang_core::free_energy::{PhaseLabel, PhaseModel, PhasePair};
use leeyang_core::locator::{
    blume_capel_criticals, blume_capel_delta, density_profile, predict, quantize_zeros,
    refine_two_term, seed_scan, trace_pair, PredictOptions, SeedGrid, TraceOptions, TraceWindow,
};
use leeyang_core::model::{ModelKind, ModelSpec};
use leeyang_core::Complex64;

const PM: PhasePair = PhasePair(PhaseLabel::Plus, PhaseLabel::Minus);
const P0: PhasePair = PhasePair(PhaseLabel::Plus, PhaseLabel::Zero);
const M0: PhasePair = PhasePair(PhaseLabel::Minus, PhaseLabel::Zero);
const MO: PhasePair = PhasePair(PhaseLabel::M, PhaseLabel::O);

fn bc(lambda: f64, side: usize) -> PhaseModel {
    PhaseModel::new(ModelSpec::blume_capel(2f64.ln(), lambda, 2, side)).unwrap()
}

fn potts(ratio: f64, volume: f64) -> PhaseModel {
    PhaseModel::with_volume(
        ModelSpec::potts(25, (ratio * 25.0).ln() / 3.0, 3, 10),
        volume,
    )
    .unwrap()
}

fn bc_trace() -> TraceOptions {
    PredictOptions::for_model(ModelKind::BlumeCapel).trace
}

#[test]
fn ising_predicted_angles_follow_the_closed_form() {
    let j = 1.0f64;
    let m = PhaseModel::new(ModelSpec::ising(j, 2, 8)).unwrap();
    let p = predict(&m, &PredictOptions::for_model(ModelKind::Ising)).unwrap();
    assert_eq!(p.zeros.len(), 64);
    let mut angles: Vec<f64> = p
        .zeros
        .zeros
        .iter()
        .map(|z| z.z.arg().rem_euclid(2.0 * PI))
        .collect();
    angles.sort_by(f64::total_cmp);
    let a = (-8.0 * j).exp();
    for (k, phi) in angles.iter().enumerate() {
        let x = (2.0 * (k + 1) as f64 - 1.0) * PI / 64.0;
        let theta_k = x + 2.0 * a * x.sin();
        assert!(
            (phi - theta_k).abs() <= 10.0 * (-12.0 * j).exp(),
            "k = {}: {phi} vs {theta_k}",
            k + 1
        );
    }
    assert!(p.zeros.max_circle_deviation() <= 1e-12);
}

#[test]
fn ising_density_integrates_to_the_zero_count() {
    let m = PhaseModel::new(ModelSpec::ising(1.0, 2, 8)).unwrap();
    let opts = TraceOptions {
        ds_max: 2e-3,
        ..TraceOptions::default()
    };
    let curves = trace_pair(&m, PM, SeedGrid::default(), &opts).unwrap();
    assert_eq!(curves.len(), 1);
    let c = &curves[0];
    assert!(c.closed && c.all_stable());
    let rows = density_profile(&m, c).unwrap();
    let total = rows.last().unwrap().cumulative;
    // one circle in z covers the V zeros in u twice
    assert!((total - 128.0).abs() <= 1e-6 * 128.0, "{total}");
    assert_eq!(quantize_zeros(c, &[]).zeros.len(), 128);
    assert_eq!((c.winding() / (2.0 * PI)).round(), 128.0);
}

#[test]
fn curve_points_satisfy_the_level_equation() {
    for m in [
        bc(0.0, 8),
        bc(-0.02, 8),
        potts(1.185, 1000.0),
        potts(1.3, 1000.0),
    ] {
        let opts = PredictOptions::for_model(m.spec.kind);
        for pair in m.pairs() {
            for c in trace_pair(&m, pair, opts.grid, &opts.trace).unwrap() {
                for p in &c.points {
                    let (f, _) = m.difference(pair, p.z).unwrap();
                    assert!((f.re - c.level).abs() <= 1e-10);
                }
                for w in c.points.windows(2) {
                    assert!((w[1].phase_accum - w[0].phase_accum).abs() < PI / 4.0);
                    assert!(w[1].arc_length > w[0].arc_length);
                }
            }
        }
    }
}

#[test]
fn blume_capel_zero_phase_disappears_above_lambda_plus() {
    let crit = blume_capel_criticals(2f64.ln()).unwrap();
    let m = bc(crit.lambda_plus + 0.05, 8);
    let opts = bc_trace();
    assert!(seed_scan(&m, P0, SeedGrid::default(), &opts, true)
        .unwrap()
        .is_empty());
    assert!(seed_scan(&m, M0, SeedGrid::default(), &opts, true)
        .unwrap()
        .is_empty());
    let pm = seed_scan(&m, PM, SeedGrid::default(), &opts, true).unwrap();
    assert!(!pm.is_empty());
    assert!(pm.iter().all(|z| (z.norm() - 1.0).abs() <= 1e-6));
}

#[test]
fn blume_capel_minus_zero_curve_stays_inside() {
    // on the stable part 1 - r lies in [0, 3 e^(-4J)]
    let m = bc(0.0, 8);
    let eps = 1.0 / 16.0;
    let curves = trace_pair(&m, M0, SeedGrid::default(), &bc_trace()).unwrap();
    assert!(!curves.is_empty());
    for c in &curves {
        for p in c.points.iter().filter(|p| p.stable) {
            let gap = 1.0 - p.z.norm();
            assert!((0.0..=3.0 * eps).contains(&gap), "{gap} at {}", p.z);
        }
    }
}

#[test]
fn blume_capel_density_is_not_constant_on_the_ellipse() {
    let m = bc(0.0, 8);
    let curves = trace_pair(&m, P0, SeedGrid::default(), &bc_trace()).unwrap();
    let rows = density_profile(&m, &curves[0]).unwrap();
    let max = rows.iter().map(|r| r.density).fold(0.0, f64::max);
    let min = rows.iter().map(|r| r.density).fold(f64::INFINITY, f64::min);
    assert!(max / min > 1.2, "{}", max / min);
}

#[test]
fn blume_capel_triple_points_sit_at_theta_c() {
    for j in [1.2, 1.7] {
        let crit = blume_capel_criticals(j).unwrap();
        let width = crit.lambda_plus - crit.lambda_minus;
        for frac in [1e-4, 0.3, 0.5, 0.999] {
            let lambda = crit.lambda_minus + frac * width;
            let m = PhaseModel::new(ModelSpec::blume_capel(j, lambda, 2, 8)).unwrap();
            let p = predict(&m, &PredictOptions::for_model(ModelKind::BlumeCapel)).unwrap();
            assert_eq!(p.multiple_points.len(), 2, "lambda = {lambda}");
            let theta = crit.theta_c(lambda).unwrap();
            for mp in &p.multiple_points {
                assert!((mp.z.norm() - 1.0).abs() <= 1e-9);
                assert!(
                    (mp.z.arg().abs() - theta).abs() <= 1e-8,
                    "{} vs {theta}",
                    mp.z.arg()
                );
            }
            assert!((p.multiple_points[0].z - p.multiple_points[1].z.conj()).norm() <= 1e-9);
            if frac == 1e-4 {
                assert!(theta > 3.0, "{theta}");
            }
        }
        let below =
            PhaseModel::new(ModelSpec::blume_capel(j, crit.lambda_minus - 1e-3, 2, 8)).unwrap();
        let p = predict(&below, &PredictOptions::for_model(ModelKind::BlumeCapel)).unwrap();
        assert!(p.multiple_points.is_empty());
    }
}

#[test]
fn preset_coupling_splits_before_lambda_minus() {
    // at e^(-4J) = 1/16 the e^(-6J) terms make theta = pi a local maximum of
    // Delta, so the zero phase first touches the circle away from -1
    let j = 2f64.ln();
    let crit = blume_capel_criticals(j).unwrap();
    let near = crit
        .theta_c(crit.lambda_minus + 1e-3 * (crit.lambda_plus - crit.lambda_minus))
        .unwrap();
    assert!(near < 2.0, "{near}");
    let m = bc(crit.lambda_minus - 3e-3, 8);
    let p = predict(&m, &PredictOptions::for_model(ModelKind::BlumeCapel)).unwrap();
    assert_eq!(p.multiple_points.len(), 4);
}

#[test]
fn blume_capel_delta_slope_in_lambda() {
    let j = 2.0f64;
    let eps = (-4.0 * j).exp();
    for theta in [0.0, 0.7, PI / 2.0, 2.5, PI] {
        for lambda in [-eps, 0.0, eps] {
            let h = 1e-6;
            let slope = (blume_capel_delta(j, lambda + h, theta)
                - blume_capel_delta(j, lambda - h, theta))
                / (2.0 * h);
            assert!((slope + 1.0).abs() <= 4.0 * eps, "{slope}");
        }
    }
}

#[test]
fn symmetric_models_give_symmetric_zero_sets() {
    for lambda in [-0.02, 0.0, 0.2] {
        let p = predict(
            &bc(lambda, 8),
            &PredictOptions::for_model(ModelKind::BlumeCapel),
        )
        .unwrap();
        let pts = p.zeros.points();
        for z in &pts {
            let inv = 1.0 / z.conj();
            assert!(pts.iter().any(|w| *w == z.conj()));
            assert!(pts.iter().any(|w| (w - inv).norm() <= 1e-15 * inv.norm()));
        }
    }
}

#[test]
fn potts_has_three_seed_families_at_the_preset_coupling() {
    let m = potts(1.185, 1000.0);
    let opts = PredictOptions::for_model(ModelKind::Potts);
    for pair in m.pairs() {
        let seeds = seed_scan(&m, pair, opts.grid, &opts.trace, true).unwrap();
        assert!(!seeds.is_empty(), "no seeds for {pair}");
    }
}

#[test]
fn potts_magnetized_phase_wins_far_outside() {
    let m = potts(1.185, 1000.0);
    for theta in [0.0, 1.0, 2.0, PI] {
        let st = m.classify(Complex64::from_polar(2.0, theta)).unwrap();
        assert_eq!(st.stable, vec![PhaseLabel::M]);
    }
}

/// Radius where `Re(f_M - f_O)` reaches `level` along the ray at `theta`.
fn mo_radius(m: &PhaseModel, theta: f64, level: f64) -> f64 {
    let g = |r: f64| {
        m.difference(MO, Complex64::from_polar(r, theta))
            .unwrap()
            .0
            .re
            - level
    };
    let (mut a, mut b) = (1.0, 1.5);
    assert!(g(a) > 0.0 && g(b) < 0.0);
    for _ in 0..200 {
        let c = 0.5 * (a + b);
        if g(c) > 0.0 {
            a = c;
        } else {
            b = c;
        }
    }
    0.5 * (a + b)
}

#[test]
fn potts_degeneracy_pushes_zeros_outward() {
    let mut mean_shift = Vec::new();
    for v in [1000.0, 4000.0] {
        let m = potts(1.3, v);
        let p = predict(&m, &PredictOptions::for_model(ModelKind::Potts)).unwrap();
        let shifts: Vec<f64> = p
            .zeros
            .zeros
            .iter()
            .filter(|z| z.z.arg().abs() >= 0.5)
            .map(|z| z.z.norm() - mo_radius(&m, z.z.arg(), 0.0))
            .collect();
        assert!(!shifts.is_empty());
        assert!(shifts.iter().all(|&s| s > 0.0));
        mean_shift.push(shifts.iter().sum::<f64>() / shifts.len() as f64);
    }
    // order 1/V: four times the volume, a quarter of the shift
    let ratio = mean_shift[0] / mean_shift[1];
    assert!((ratio - 4.0).abs() <= 0.4, "{ratio}");
}

#[test]
fn refinement_correction_shrinks_like_inverse_volume_squared() {
    let pair = P0;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for v in [64.0, 128.0, 256.0, 512.0, 1024.0] {
        let m = PhaseModel::with_volume(ModelSpec::blume_capel(2f64.ln(), 0.0, 2, 8), v).unwrap();
        let opts = bc_trace();
        let curves = trace_pair(&m, pair, SeedGrid::default(), &opts).unwrap();
        let mut moves = Vec::new();
        for c in &curves {
            for z in quantize_zeros(c, &[]).zeros {
                let (w, _) = refine_two_term(&m, pair, z.z, z.index.unwrap()).unwrap();
                moves.push((w - z.z).norm());
            }
        }
        let mean = moves.iter().sum::<f64>() / moves.len() as f64;
        xs.push(v.ln());
        ys.push(mean.ln());
    }
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let slope = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    assert!((slope + 2.0).abs() <= 0.3, "slope {slope}");
}

#[test]
fn narrow_window_keeps_curves_inside() {
    let m = PhaseModel::new(ModelSpec::ising(1.0, 2, 4)).unwrap();
    let opts = TraceOptions {
        window: TraceWindow::new(0.5, 1.5),
        ..TraceOptions::default()
    };
    for c in trace_pair(
        &m,
        PM,
        SeedGrid {
            n_r: 16,
            n_theta: 64,
        },
        &opts,
    )
    .unwrap()
    {
        assert!(c.points.iter().all(|p| opts.window.contains(p.z)));
    }
}
