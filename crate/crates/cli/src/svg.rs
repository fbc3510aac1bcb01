//! Static SVG figures of zeros and coexistence curves.

use std::fmt::Write;

use num_complex::Complex64;

const SIZE: f64 = 600.0;
const MAX_POLYLINE: usize = 1500;

/// What goes on one figure. Everything is in plot coordinates already.
#[derive(Debug, Clone, Default)]
pub struct Figure {
    pub title: String,
    pub curves: Vec<Vec<Complex64>>,
    pub exact: Vec<Complex64>,
    pub predicted: Vec<Complex64>,
    pub multiple_points: Vec<Complex64>,
}

struct Frame {
    x0: f64,
    y1: f64,
    scale: f64,
}

impl Frame {
    /// Square box around the data and the unit circle, 10% margin on each side.
    fn fit(fig: &Figure) -> Self {
        let (mut lo_x, mut hi_x, mut lo_y, mut hi_y) = (-1.0f64, 1.0f64, -1.0f64, 1.0f64);
        let all = fig
            .curves
            .iter()
            .flatten()
            .chain(&fig.exact)
            .chain(&fig.predicted)
            .chain(&fig.multiple_points);
        for z in all.filter(|z| z.re.is_finite() && z.im.is_finite()) {
            lo_x = lo_x.min(z.re);
            hi_x = hi_x.max(z.re);
            lo_y = lo_y.min(z.im);
            hi_y = hi_y.max(z.im);
        }
        let span = (hi_x - lo_x).max(hi_y - lo_y);
        let (cx, cy) = (0.5 * (lo_x + hi_x), 0.5 * (lo_y + hi_y));
        let half = 0.5 * span * 1.2;
        Self {
            x0: cx - half,
            y1: cy + half,
            scale: SIZE / (2.0 * half),
        }
    }

    fn px(&self, z: Complex64) -> (f64, f64) {
        ((z.re - self.x0) * self.scale, (self.y1 - z.im) * self.scale)
    }
}

fn subsample(points: &[Complex64]) -> Vec<Complex64> {
    if points.len() <= MAX_POLYLINE {
        return points.to_vec();
    }
    let stride = points.len().div_ceil(MAX_POLYLINE);
    let mut out: Vec<Complex64> = points.iter().step_by(stride).copied().collect();
    if let Some(&last) = points.last() {
        if out.last() != Some(&last) {
            out.push(last);
        }
    }
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Renders the figure. Identical input gives identical bytes.
pub fn emit_svg(fig: &Figure) -> String {
    let f = Frame::fit(fig);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    if !fig.title.is_empty() {
        let _ = writeln!(s, r#"<title>{}</title>"#, escape(&fig.title));
    }

    let (ox, oy) = f.px(Complex64::new(0.0, 0.0));
    let _ = writeln!(
        s,
        r##"<g stroke="#999" stroke-width="0.8"><line x1="0" y1="{oy:.3}" x2="{SIZE}" y2="{oy:.3}"/><line x1="{ox:.3}" y1="0" x2="{ox:.3}" y2="{SIZE}"/></g>"##
    );
    let _ = writeln!(
        s,
        r##"<circle cx="{ox:.3}" cy="{oy:.3}" r="{:.3}" fill="none" stroke="#666" stroke-width="1" stroke-dasharray="5,4"/>"##,
        f.scale
    );

    for c in &fig.curves {
        let pts: Vec<String> = subsample(c)
            .iter()
            .map(|&z| {
                let (x, y) = f.px(z);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(
            s,
            r##"<polyline fill="none" stroke="#1f6fb4" stroke-width="1.2" points="{}"/>"##,
            pts.join(" ")
        );
    }
    for &z in &fig.predicted {
        let (x, y) = f.px(z);
        let _ = writeln!(
            s,
            r##"<circle cx="{x:.3}" cy="{y:.3}" r="3.5" fill="none" stroke="#c0392b" stroke-width="1"/>"##
        );
    }
    for &z in &fig.exact {
        let (x, y) = f.px(z);
        let d = 3.0;
        let _ = writeln!(
            s,
            r##"<path d="M{:.3} {:.3}L{:.3} {:.3}M{:.3} {:.3}L{:.3} {:.3}" stroke="#000" stroke-width="1"/>"##,
            x - d,
            y - d,
            x + d,
            y + d,
            x - d,
            y + d,
            x + d,
            y - d
        );
    }
    for &z in &fig.multiple_points {
        let (x, y) = f.px(z);
        let d = 5.0;
        let _ = writeln!(
            s,
            r##"<polygon points="{:.3},{:.3} {:.3},{:.3} {:.3},{:.3} {:.3},{:.3}" fill="#27ae60"/>"##,
            x,
            y - d,
            x + d,
            y,
            x,
            y + d,
            x - d,
            y
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_figure_has_axes_and_circle() {
        let s = emit_svg(&Figure::default());
        assert!(s.starts_with("<svg"));
        assert!(s.trim_end().ends_with("</svg>"));
        assert!(s.contains("stroke-dasharray"));
        assert_eq!(s.matches("<line").count(), 2);
        assert!(!s.contains("<polyline"));
    }

    #[test]
    fn unit_circle_fits_with_margin() {
        let s = emit_svg(&Figure::default());
        // span 2 plus 20% gives 300 / 1.2 = 250 px radius
        assert!(s.contains(r#"cx="300.000" cy="300.000" r="250.000""#));
    }

    #[test]
    fn markers_and_determinism() {
        let fig = Figure {
            title: "a < b".into(),
            curves: vec![(0..5000)
                .map(|i| Complex64::from_polar(1.0, i as f64 * 1e-3))
                .collect()],
            exact: vec![Complex64::new(0.0, 1.0)],
            predicted: vec![Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.0)],
            multiple_points: vec![Complex64::new(-1.0, 0.0)],
        };
        let a = emit_svg(&fig);
        assert_eq!(a, emit_svg(&fig));
        assert_eq!(a.matches("<path").count(), 1);
        assert_eq!(a.matches("r=\"3.5\"").count(), 2);
        assert_eq!(a.matches("<polygon").count(), 1);
        assert!(a.contains("a &lt; b"));
        let poly = a.lines().find(|l| l.starts_with("<polyline")).unwrap();
        assert!(poly.matches(',').count() <= MAX_POLYLINE + 1);
    }

    #[test]
    fn y_axis_points_up() {
        let fig = Figure {
            predicted: vec![Complex64::new(0.0, 1.0)],
            ..Figure::default()
        };
        let s = emit_svg(&fig);
        assert!(s.contains(r#"cx="300.000" cy="50.000""#));
    }
}
