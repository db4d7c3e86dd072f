//! Minimal polyline SVG plots.

use std::fmt::Write as _;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scale {
    Linear,
    /// Logarithmic, ticks at integer powers of the base.
    Log(f64),
}

impl Scale {
    fn map(&self, v: f64) -> f64 {
        match self {
            Scale::Linear => v,
            Scale::Log(_) => {
                if v > 0.0 {
                    v.ln()
                } else {
                    f64::NAN
                }
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub dashed: bool,
    pub points: Vec<(f64, f64)>,
}

/// A shaded rectangle in data coordinates.
#[derive(Clone, Copy, Debug)]
pub struct Band {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

#[derive(Clone, Debug)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_scale: Scale,
    pub y_scale: Scale,
    pub series: Vec<Series>,
    pub bands: Vec<Band>,
    pub hlines: Vec<(f64, String)>,
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
    xs: Scale,
    ys: Scale,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (self.xs.map(x) - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT
            - BOTTOM
            - (self.ys.map(y) - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 * (1.0 + lo.abs()) {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

fn ticks(scale: Scale, range: (f64, f64)) -> Vec<(f64, String)> {
    match scale {
        Scale::Log(base) => {
            let lb = base.ln();
            let lo = (range.0 / lb).ceil() as i64;
            let hi = (range.1 / lb).floor() as i64;
            let step = ((hi - lo) / 8 + 1).max(1);
            (lo..=hi)
                .step_by(step as usize)
                .map(|e| (base.powi(e as i32), format!("{base}^{e}")))
                .collect()
        }
        Scale::Linear => {
            let span = range.1 - range.0;
            let raw = span / 6.0;
            let mag = 10f64.powf(raw.log10().floor());
            let step = [1.0, 2.0, 5.0, 10.0]
                .iter()
                .map(|m| m * mag)
                .find(|s| *s >= raw)
                .unwrap_or(10.0 * mag);
            let first = (range.0 / step).ceil() as i64;
            let last = (range.1 / step).floor() as i64;
            (first..=last)
                .map(|i| {
                    let v = i as f64 * step;
                    (v, format!("{}", (v * 1e6).round() / 1e6))
                })
                .collect()
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

impl Plot {
    pub fn render(&self) -> String {
        let xs = self.x_scale;
        let ys = self.y_scale;
        let x = extent(
            self.series
                .iter()
                .flat_map(|s| s.points.iter().map(|p| xs.map(p.0))),
        );
        let y = extent(
            self.series
                .iter()
                .flat_map(|s| s.points.iter().map(|p| ys.map(p.1)))
                .chain(self.hlines.iter().map(|h| ys.map(h.0)))
                .chain(self.bands.iter().flat_map(|b| [ys.map(b.y0), ys.map(b.y1)])),
        );
        let f = Frame { x, y, xs, ys };
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(
            out,
            r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );
        for b in &self.bands {
            let (x0, x1) = (f.px(b.x0), f.px(b.x1));
            let (y0, y1) = (f.py(b.y1), f.py(b.y0));
            let _ = writeln!(
                out,
                r##"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="#9ecae1" fill-opacity="0.5"/>"##,
                x1 - x0,
                (y1 - y0).max(0.5)
            );
        }
        let (x_lo, x_hi) = (LEFT, WIDTH - RIGHT);
        let (y_lo, y_hi) = (HEIGHT - BOTTOM, TOP);
        let _ = writeln!(
            out,
            r#"<polyline points="{x_lo},{y_hi} {x_lo},{y_lo} {x_hi},{y_lo}" fill="none" stroke="black"/>"#
        );
        for (v, label) in ticks(xs, x) {
            let px = f.px(v);
            let _ = writeln!(
                out,
                r#"<line x1="{px:.2}" y1="{y_lo}" x2="{px:.2}" y2="{}" stroke="black"/><text x="{px:.2}" y="{}" text-anchor="middle">{label}</text>"#,
                y_lo + 5.0,
                y_lo + 20.0
            );
        }
        for (v, label) in ticks(ys, y) {
            let py = f.py(v);
            let _ = writeln!(
                out,
                r#"<line x1="{}" y1="{py:.2}" x2="{x_lo}" y2="{py:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{label}</text>"#,
                x_lo - 5.0,
                x_lo - 8.0,
                py + 4.0
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            (x_lo + x_hi) / 2.0,
            HEIGHT - 15.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
            (y_lo + y_hi) / 2.0,
            (y_lo + y_hi) / 2.0,
            escape(&self.y_label)
        );
        for (v, label) in &self.hlines {
            let py = f.py(*v);
            let _ = writeln!(
                out,
                r##"<line x1="{x_lo}" y1="{py:.2}" x2="{x_hi}" y2="{py:.2}" stroke="#777" stroke-dasharray="2,3"/><text x="{}" y="{:.2}" text-anchor="end" fill="#555">{}</text>"##,
                x_hi - 4.0,
                py - 4.0,
                escape(label)
            );
        }
        for (i, s) in self.series.iter().enumerate() {
            // Non-finite points split the line.
            let mut runs: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
            for &(px, py) in &s.points {
                let (a, b) = (f.px(px), f.py(py));
                if a.is_finite() && b.is_finite() {
                    runs.last_mut().expect("nonempty").push((a, b));
                } else if !runs.last().expect("nonempty").is_empty() {
                    runs.push(Vec::new());
                }
            }
            let dash = if s.dashed {
                r#" stroke-dasharray="6,4""#
            } else {
                ""
            };
            for run in runs.iter().filter(|r| !r.is_empty()) {
                let pts: Vec<String> = run.iter().map(|(a, b)| format!("{a:.2},{b:.2}")).collect();
                let _ = writeln!(
                    out,
                    r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.2"{dash}/>"#,
                    pts.join(" "),
                    s.color
                );
            }
            let ly = TOP + 14.0 + 16.0 * i as f64;
            let _ = writeln!(
                out,
                r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{}"{dash}/><text x="{}" y="{}">{}</text>"#,
                x_lo + 10.0,
                x_lo + 34.0,
                s.color,
                x_lo + 40.0,
                ly + 4.0,
                escape(&s.label)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_valid_looking_svg() {
        let plot = Plot {
            title: "t <1>".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            x_scale: Scale::Log(2.0),
            y_scale: Scale::Linear,
            series: vec![Series {
                label: "s".into(),
                color: "black",
                dashed: false,
                points: vec![(1.0, 1.0), (2.0, f64::NEG_INFINITY), (4.0, 3.0), (8.0, 2.0)],
            }],
            bands: vec![Band {
                x0: 2.0,
                x1: 4.0,
                y0: 1.0,
                y1: 2.0,
            }],
            hlines: vec![(2.5, "ref".into())],
        };
        let svg = plot.render();
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(svg.contains("t &lt;1&gt;"));
        // The -inf point splits the series in two polylines.
        assert_eq!(svg.matches("stroke-width=\"1.2\"").count(), 2);
        assert!(!svg.contains("NaN") && !svg.contains("inf"));
    }
}
