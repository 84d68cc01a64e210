//! Minimal line charts: polylines, axis ticks and text labels.

use std::fmt::Write as _;

const W: f64 = 720.0;
const H: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const COLOURS: [&str; 4] = ["#1f5fa8", "#c0392b", "#2e8b57", "#8e44ad"];

pub struct Series {
    pub label: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Draw points instead of a line.
    pub points: bool,
}

pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// Vertical markers `(x, label)`.
    pub markers: Vec<(f64, String)>,
    pub log_y: bool,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    (0..=5).map(|i| lo + (hi - lo) * i as f64 / 5.0).collect()
}

fn bounds(v: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for x in v.filter(|x| x.is_finite()) {
        lo = lo.min(x);
        hi = hi.max(x);
    }
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-300 {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

impl Plot {
    fn y_value(&self, y: f64) -> f64 {
        if self.log_y {
            if y > 0.0 {
                y.log10()
            } else {
                f64::NAN
            }
        } else {
            y
        }
    }

    pub fn render(&self) -> String {
        let (x0, x1) = bounds(self.series.iter().flat_map(|s| s.xs.iter().copied()));
        let (y0, y1) = bounds(self.series.iter().flat_map(|s| s.ys.iter().map(|&y| self.y_value(y))));
        let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * (W - LEFT - RIGHT);
        let py = |y: f64| H - BOTTOM - (y - y0) / (y1 - y0) * (H - TOP - BOTTOM);

        let mut s = String::new();
        writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#).unwrap();
        writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#).unwrap();
        writeln!(s, r#"<text x="{}" y="24" font-family="sans-serif" font-size="15" text-anchor="middle">{}</text>"#, W / 2.0, escape(&self.title)).unwrap();
        writeln!(
            s,
            r#"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            W - LEFT - RIGHT,
            H - TOP - BOTTOM
        )
        .unwrap();
        for t in ticks(x0, x1) {
            let x = px(t);
            writeln!(s, r#"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="black"/>"#, H - BOTTOM, H - BOTTOM + 5.0).unwrap();
            writeln!(s, r#"<text x="{x:.2}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">{t:.3}</text>"#, H - BOTTOM + 18.0).unwrap();
        }
        for t in ticks(y0, y1) {
            let y = py(t);
            let label = if self.log_y { format!("1e{t:.1}") } else { format!("{t:.3}") };
            writeln!(s, r#"<line x1="{}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/>"#, LEFT - 5.0).unwrap();
            writeln!(s, r#"<text x="{}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{label}</text>"#, LEFT - 8.0, y + 4.0).unwrap();
        }
        writeln!(s, r#"<text x="{}" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#, W / 2.0, H - 12.0, escape(&self.x_label)).unwrap();
        writeln!(
            s,
            r#"<text x="16" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
            H / 2.0,
            H / 2.0,
            escape(&self.y_label)
        )
        .unwrap();
        for (x, label) in &self.markers {
            if !(x0..=x1).contains(x) {
                continue;
            }
            let xp = px(*x);
            writeln!(s, r##"<line x1="{xp:.2}" y1="{TOP}" x2="{xp:.2}" y2="{}" stroke="#999" stroke-dasharray="4 3"/>"##, H - BOTTOM).unwrap();
            writeln!(s, r#"<text x="{:.2}" y="{}" font-family="sans-serif" font-size="10">{}</text>"#, xp + 2.0, TOP + 12.0, escape(label)).unwrap();
        }
        for (i, ser) in self.series.iter().enumerate() {
            let colour = COLOURS[i % COLOURS.len()];
            let pts: Vec<(f64, f64)> = ser
                .xs
                .iter()
                .zip(&ser.ys)
                .map(|(&x, &y)| (x, self.y_value(y)))
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .map(|(x, y)| (px(x), py(y)))
                .collect();
            if ser.points {
                for (x, y) in &pts {
                    writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{colour}"/>"#).unwrap();
                }
            } else {
                let path: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                writeln!(s, r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#, path.join(" ")).unwrap();
            }
            writeln!(
                s,
                r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" fill="{colour}">{}</text>"#,
                LEFT + 8.0,
                TOP + 16.0 + 14.0 * i as f64,
                escape(&ser.label)
            )
            .unwrap();
        }
        s.push_str("</svg>\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_a_polyline_and_markers() {
        let p = Plot {
            title: "N(E)".into(),
            x_label: "E".into(),
            y_label: "N".into(),
            series: vec![Series { label: "ids".into(), xs: vec![0.0, 1.0, 2.0], ys: vec![0.0, 0.5, 1.0], points: false }],
            markers: vec![(1.0, "k=1".into())],
            log_y: false,
        };
        let s = p.render();
        assert!(s.starts_with("<svg") && s.ends_with("</svg>\n"));
        assert!(s.contains("<polyline") && s.contains("k=1"));
    }

    #[test]
    fn log_axis_skips_non_positive_values() {
        let p = Plot {
            title: "defect".into(),
            x_label: "window".into(),
            y_label: "defect".into(),
            series: vec![Series { label: "d".into(), xs: vec![1.0, 2.0, 3.0], ys: vec![1e-2, 0.0, 1e-6], points: true }],
            markers: vec![],
            log_y: true,
        };
        assert_eq!(p.render().matches("<circle").count(), 2);
    }
}
