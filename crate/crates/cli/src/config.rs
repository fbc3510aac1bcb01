//! Flags, presets and their validation into a [`RunConfig`].

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use leeyang_core::locator::{PredictOptions, SeedGrid, TraceWindow};
use leeyang_core::model::{ModelKind, ModelSpec};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "leeyang",
    version,
    about = "Exact and predicted Lee-Yang zeros"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Exact,
    Predict,
    Compare,
    Density,
}

impl fmt::Display for CommandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CommandKind::Exact => "exact",
            CommandKind::Predict => "predict",
            CommandKind::Compare => "compare",
            CommandKind::Density => "density",
        })
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Zeros of the exact partition function polynomial.
    Exact(CommonArgs),
    /// Zeros from coexistence curves and phase quantization.
    Predict(CommonArgs),
    /// Exact against predicted zeros.
    Compare(CompareArgs),
    /// Zero density along every traced curve.
    Density(CommonArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Repeat over several sides and fit ln(max distance) against L, e.g. `L=3,4,5`.
    #[arg(long)]
    pub sweep: Option<Sweep>,
    /// Second zero set: the prediction, or the exact set again.
    #[arg(long, value_enum, default_value_t = Against::Predicted)]
    pub against: Against,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Against {
    Predicted,
    Exact,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    /// Lattice dimension.
    #[arg(long)]
    pub d: Option<usize>,
    /// Side length.
    #[arg(long = "L")]
    pub side: Option<usize>,
    /// Volume; defaults to L^d.
    #[arg(long = "V")]
    pub volume: Option<u64>,
    #[arg(long = "J", allow_negative_numbers = true)]
    pub coupling: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub q: Option<u32>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::All)]
    pub format: Format,
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Seed grid, `NRxNT`.
    #[arg(long)]
    pub grid: Option<Grid>,
    /// Exclusion radius constant around multiple points.
    #[arg(long, allow_negative_numbers = true)]
    pub cdelta: Option<f64>,
    /// Trace window `RMIN:RMAX`.
    #[arg(long)]
    pub window: Option<Window>,
    /// Largest tracer step.
    #[arg(long)]
    pub ds_max: Option<f64>,
    /// Curve residual tolerance.
    #[arg(long)]
    pub tau_curve: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Ising,
    BlumeCapel,
    Potts,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Ising => ModelKind::Ising,
            ModelArg::BlumeCapel => ModelKind::BlumeCapel,
            ModelArg::Potts => ModelKind::Potts,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
    All,
}

impl Format {
    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::All)
    }

    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::All)
    }

    pub fn svg(self) -> bool {
        matches!(self, Format::Svg | Format::All)
    }
}

/// Named parameter sets for the Blume-Capel and Potts pictures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Fig1a,
    Fig1b,
    Fig1c,
    Fig1d,
    Fig2a,
    Fig2b,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::Fig1a,
        Preset::Fig1b,
        Preset::Fig1c,
        Preset::Fig1d,
        Preset::Fig2a,
        Preset::Fig2b,
    ];

    /// Model and volume.
    pub fn spec(self) -> (ModelSpec, u64) {
        // Blume-Capel at e^(-4J) = 1/16; Potts q = 25, d = 3 at the given e^(3J)/q
        let bc = |e_lambda: f64| (ModelSpec::blume_capel(2f64.ln(), e_lambda.ln(), 2, 8), 64);
        let potts = |ratio: f64| (ModelSpec::potts(25, (ratio * 25.0).ln() / 3.0, 3, 10), 1000);
        match self {
            Preset::Fig1a => bc(0.9),
            Preset::Fig1b => bc(0.94),
            Preset::Fig1c => bc(1.0),
            Preset::Fig1d => bc(1.07),
            Preset::Fig2a => potts(1.185),
            Preset::Fig2b => potts(1.155),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig1a => "fig1a",
            Preset::Fig1b => "fig1b",
            Preset::Fig1c => "fig1c",
            Preset::Fig1d => "fig1d",
            Preset::Fig2a => "fig2a",
            Preset::Fig2b => "fig2b",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid(pub SeedGrid);

impl FromStr for Grid {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| format!("expected NRxNT, got {s:?}"))?;
        let n_r: usize = a
            .trim()
            .parse()
            .map_err(|_| format!("bad radial count {a:?}"))?;
        let n_theta: usize = b
            .trim()
            .parse()
            .map_err(|_| format!("bad angular count {b:?}"))?;
        if n_r < 2 || n_theta < 3 {
            return Err(format!(
                "grid needs at least 2x3 nodes, got {n_r}x{n_theta}"
            ));
        }
        Ok(Grid(SeedGrid { n_r, n_theta }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window(pub TraceWindow);

impl FromStr for Window {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| format!("expected RMIN:RMAX, got {s:?}"))?;
        let lo: f64 = a.trim().parse().map_err(|_| format!("bad RMIN {a:?}"))?;
        let hi: f64 = b.trim().parse().map_err(|_| format!("bad RMAX {b:?}"))?;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(format!("window needs 0 < RMIN < RMAX, got {lo}:{hi}"));
        }
        Ok(Window(TraceWindow::new(lo, hi)))
    }
}

/// `L=3,4,5`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sweep(pub Vec<usize>);

impl FromStr for Sweep {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let list = s
            .strip_prefix("L=")
            .ok_or_else(|| format!("expected L=a,b,..., got {s:?}"))?;
        let sides = list
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<usize>()
                    .map_err(|_| format!("bad side {x:?}"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if sides.len() < 2 || sides.iter().any(|&l| l < 2) {
            return Err("a sweep needs at least two sides, each >= 2".into());
        }
        Ok(Sweep(sides))
    }
}

/// Everything a subcommand needs, validated.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub spec: ModelSpec,
    pub volume: u64,
    pub preset: Option<Preset>,
    pub out: PathBuf,
    pub format: Format,
    pub predict: PredictOptions,
}

fn flag(msg: impl Into<String>) -> CliError {
    CliError::Flag(msg.into())
}

impl RunConfig {
    pub fn resolve(command: CommandKind, a: &CommonArgs) -> Result<Self, CliError> {
        let (base, base_volume) = match a.preset {
            Some(p) => {
                let (s, v) = p.spec();
                (Some(s), Some(v))
            }
            None => (None, None),
        };
        let kind: ModelKind = match (a.model, base) {
            (Some(m), _) => m.into(),
            (None, Some(s)) => s.kind,
            (None, None) => return Err(flag("--model is required (or use --preset)")),
        };
        let same_kind = base.filter(|s| s.kind == kind);
        let d = a.d.or(same_kind.map(|s| s.d)).unwrap_or(2);
        if d == 0 {
            return Err(flag("--d must be at least 1"));
        }
        let coupling = a
            .coupling
            .or(same_kind.map(|s| s.coupling))
            .ok_or_else(|| flag("--J is required"))?;
        if !(coupling.is_finite() && coupling > 0.0) {
            return Err(flag(format!("--J must be positive, got {coupling}")));
        }
        let lambda = a.lambda.or(same_kind.map(|s| s.lambda)).unwrap_or(0.0);
        if !lambda.is_finite() {
            return Err(flag("--lambda must be finite"));
        }
        let q = a.q.or(same_kind.map(|s| s.q)).unwrap_or(3);
        if kind == ModelKind::Potts && q < 2 {
            return Err(flag(format!("--q must be at least 2, got {q}")));
        }
        if kind == ModelKind::BlumeCapel && d != 2 && command != CommandKind::Exact {
            return Err(CliError::Range(format!(
                "the Blume-Capel free energies exist only for d = 2 (got d = {d}); `exact` handles other d"
            )));
        }

        let explicit_volume = a.volume.or(if a.side.is_none() {
            same_kind.and(base_volume)
        } else {
            None
        });
        let side = match (a.side, explicit_volume) {
            (Some(l), _) => l,
            (None, Some(v)) => (v as f64).powf(1.0 / d as f64).round().max(2.0) as usize,
            (None, None) => match same_kind {
                Some(s) => s.side,
                None => return Err(flag("--L or --V is required")),
            },
        };
        if side < 2 {
            return Err(flag(format!("--L must be at least 2, got {side}")));
        }
        let spec = match kind {
            ModelKind::Ising => ModelSpec::ising(coupling, d, side),
            ModelKind::BlumeCapel => ModelSpec::blume_capel(coupling, lambda, d, side),
            ModelKind::Potts => ModelSpec::potts(q, coupling, d, side),
        };
        spec.validate().map_err(|e| flag(e.to_string()))?;
        let lattice = spec.volume() as u64;
        let volume = explicit_volume.unwrap_or(lattice);
        if volume == 0 {
            return Err(flag("--V must be positive"));
        }
        if volume != lattice && matches!(command, CommandKind::Exact | CommandKind::Compare) {
            return Err(flag(format!(
                "--V {volume} is not L^d = {lattice}; exact zeros need a whole lattice"
            )));
        }

        let mut predict = PredictOptions::for_model(kind);
        if let Some(Grid(g)) = a.grid {
            predict.grid = g;
        }
        if let Some(c) = a.cdelta {
            if !(c.is_finite() && c >= 0.0) {
                return Err(flag(format!("--cdelta must be nonnegative, got {c}")));
            }
            predict.c_delta = c;
        }
        if let Some(Window(w)) = a.window {
            predict.trace.window = w;
        }
        if let Some(ds) = a.ds_max {
            if !(ds.is_finite() && ds > 0.0) {
                return Err(flag(format!("--ds-max must be positive, got {ds}")));
            }
            predict.trace.ds_max = ds;
            predict.trace.ds_init = predict.trace.ds_init.min(ds);
        }
        if let Some(t) = a.tau_curve {
            if !(t.is_finite() && t > 0.0) {
                return Err(flag(format!("--tau-curve must be positive, got {t}")));
            }
            predict.trace.tau_curve = t;
        }

        Ok(Self {
            command,
            spec,
            volume,
            preset: a.preset,
            out: a.out.clone(),
            format: a.format,
            predict,
        })
    }

    /// Prefix of every output file.
    pub fn stem(&self) -> String {
        match self.preset {
            Some(p) => format!("{}_{}", self.command, p.name()),
            None => self.command.to_string(),
        }
    }
}
