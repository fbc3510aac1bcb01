use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use leeyang_core::roots::ZeroSet;

fn leeyang(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_leeyang"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env("LEEYANG_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn zeros(dir: &Path, name: &str) -> ZeroSet {
    ZeroSet::from_csv(&fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

#[test]
fn exact_ising_zeros_lie_on_the_circle() {
    let dir = tempfile::tempdir().unwrap();
    let o = leeyang(
        &[
            "exact", "--model", "ising", "--d", "2", "--L", "4", "--J", "1.0",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let z = zeros(dir.path(), "exact_zeros.csv");
    assert_eq!(z.len(), 16);
    assert!(z.max_circle_deviation() <= 1e-8);
    assert!(String::from_utf8_lossy(&o.stdout).contains("16 zeros in u"));
}

#[test]
fn exact_degree_counts() {
    let dir = tempfile::tempdir().unwrap();
    let o = leeyang(
        &[
            "exact",
            "--model",
            "blume-capel",
            "--L",
            "3",
            "--J",
            "0.69",
            "--lambda",
            "0.0",
        ],
        dir.path(),
    );
    assert!(o.status.success());
    assert_eq!(zeros(dir.path(), "exact_zeros.csv").len(), 18);
    let o = leeyang(
        &[
            "exact", "--model", "potts", "--q", "3", "--d", "2", "--L", "3", "--J", "0.5",
        ],
        dir.path(),
    );
    assert!(o.status.success());
    assert_eq!(zeros(dir.path(), "exact_zeros.csv").len(), 9);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        leeyang(&["exact", "--bogus"], dir.path()).status.code(),
        Some(2)
    );
    assert_eq!(
        leeyang(&["exact", "--model", "ising", "--L", "4"], dir.path())
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        leeyang(
            &["exact", "--model", "ising", "--L", "4", "--J", "-1"],
            dir.path()
        )
        .status
        .code(),
        Some(2)
    );
    let big = leeyang(
        &["exact", "--model", "blume-capel", "--L", "8", "--J", "0.69"],
        dir.path(),
    );
    assert_eq!(big.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&big.stderr).contains("predict"));
    assert_eq!(
        leeyang(
            &[
                "predict",
                "--model",
                "blume-capel",
                "--d",
                "3",
                "--L",
                "4",
                "--J",
                "1"
            ],
            dir.path()
        )
        .status
        .code(),
        Some(3)
    );
}

#[test]
fn untrusted_couplings_warn_but_succeed() {
    let dir = tempfile::tempdir().unwrap();
    let o = leeyang(
        &[
            "predict", "--model", "ising", "--d", "2", "--V", "64", "--J", "1.0",
        ],
        dir.path(),
    );
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("extrapolated"));
    assert_eq!(zeros(dir.path(), "predict_zeros.csv").len(), 64);
}

#[test]
fn identical_flags_give_identical_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [a.path(), b.path()] {
        assert!(leeyang(&["predict", "--preset", "fig1b"], dir)
            .status
            .success());
    }
    let mut names: Vec<_> = fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 7);
    for n in names {
        assert_eq!(
            fs::read(a.path().join(&n)).unwrap(),
            fs::read(b.path().join(&n)).unwrap(),
            "{n:?}"
        );
    }
}

#[test]
fn self_comparison_has_zero_distance() {
    let dir = tempfile::tempdir().unwrap();
    let o = leeyang(
        &[
            "compare",
            "--model",
            "ising",
            "--L",
            "4",
            "--J",
            "1.25",
            "--against",
            "exact",
        ],
        dir.path(),
    );
    assert!(o.status.success());
    let r: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("compare_report.json")).unwrap())
            .unwrap();
    assert_eq!(r["max_distance"], 0.0);
    assert_eq!(r["unmatched_exact"], 0);
}

#[test]
fn compare_figure_overlays_crosses_and_circles() {
    let dir = tempfile::tempdir().unwrap();
    let o = leeyang(
        &["compare", "--model", "ising", "--L", "4", "--J", "1.25"],
        dir.path(),
    );
    assert!(o.status.success());
    let r: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("compare_report.json")).unwrap())
            .unwrap();
    assert_eq!(r["unmatched_exact"], 0);
    assert_eq!(r["unmatched_other"], 0);
    assert!(r["max_distance"].as_f64().unwrap() < 5e-2);
    let svg = fs::read_to_string(dir.path().join("compare.svg")).unwrap();
    assert_eq!(svg.matches("<path").count(), 16);
    assert_eq!(svg.matches(r#"r="3.5""#).count(), 16);
    let pairs = fs::read_to_string(dir.path().join("compare_pairs.csv")).unwrap();
    assert_eq!(pairs.lines().count(), 17);
}

#[test]
fn density_tables_have_the_fixed_header() {
    let dir = tempfile::tempdir().unwrap();
    let o = leeyang(
        &[
            "density", "--model", "ising", "--d", "2", "--V", "64", "--J", "1.0", "--format", "csv",
        ],
        dir.path(),
    );
    assert!(o.status.success());
    let t = fs::read_to_string(dir.path().join("density_curve0.csv")).unwrap();
    assert_eq!(t.lines().next(), Some("arc_length,density,cumulative"));
    let last: f64 = t
        .lines()
        .last()
        .unwrap()
        .split(',')
        .nth(2)
        .unwrap()
        .parse()
        .unwrap();
    assert!((last - 128.0).abs() <= 1e-6 * 128.0, "{last}");
}

#[test]
fn format_selects_the_files() {
    let dir = tempfile::tempdir().unwrap();
    assert!(leeyang(
        &["predict", "--preset", "fig1a", "--format", "svg"],
        dir.path()
    )
    .status
    .success());
    let names: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert_eq!(names, vec!["predict_fig1a.svg".to_string()]);
}
