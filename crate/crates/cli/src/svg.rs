//! Just enough SVG for static line, scatter, strip and histogram plots.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const TICKS: usize = 5;

pub const BASELINE: &str = "#c0392b";
pub const CANDIDATE: &str = "#2c7fb8";
pub const HIGHLIGHT: &str = "#e6550d";

pub struct Plot {
    title: String,
    x_label: String,
    y_label: String,
    x: (f64, f64),
    y: (f64, f64),
    body: String,
    x_tick_labels: Option<Vec<String>>,
}

/// Min and max of finite values, widened when they coincide.
pub fn bounds(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values.into_iter().filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo > hi {
        return (0.0, 1.0);
    }
    if lo == hi {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        return (lo - pad, hi + pad);
    }
    let pad = (hi - lo) * 0.05;
    (lo - pad, hi + pad)
}

fn tick_label(v: f64, span: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if span < 1e-2 || v.abs() >= 1e5 {
        return format!("{v:.2e}");
    }
    let decimals = (2.0 - span.log10().floor()).clamp(0.0, 6.0) as usize;
    format!("{v:.decimals$}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Plot {
    pub fn new(title: &str, x_label: &str, y_label: &str, x: (f64, f64), y: (f64, f64)) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            x,
            y,
            body: String::new(),
            x_tick_labels: None,
        }
    }

    /// Categorical x axis: one label per integer position `0..labels.len()`.
    pub fn with_x_categories(mut self, labels: Vec<String>) -> Self {
        self.x = (-0.5, labels.len() as f64 - 0.5);
        self.x_tick_labels = Some(labels);
        self
    }

    fn sx(&self, x: f64) -> f64 {
        LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }

    fn sy(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }

    pub fn line(&mut self, (x0, y0): (f64, f64), (x1, y1): (f64, f64), color: &str, width: f64) {
        let _ = writeln!(
            self.body,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="{width}" stroke-opacity="0.8"/>"#,
            self.sx(x0),
            self.sy(y0),
            self.sx(x1),
            self.sy(y1)
        );
    }

    pub fn point(&mut self, x: f64, y: f64, radius: f64, color: &str) {
        let _ = writeln!(
            self.body,
            r#"<circle cx="{:.2}" cy="{:.2}" r="{radius}" fill="{color}" fill-opacity="0.75"/>"#,
            self.sx(x),
            self.sy(y)
        );
    }

    pub fn bar(&mut self, x0: f64, x1: f64, height: f64, color: &str) {
        let (left, right) = (self.sx(x0), self.sx(x1));
        let (top, bottom) = (self.sy(height), self.sy(self.y.0.max(0.0)));
        let _ = writeln!(
            self.body,
            r#"<rect x="{left:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="{color}" stroke="white"/>"#,
            (right - left).max(0.0),
            (bottom - top).max(0.0)
        );
    }

    pub fn vline(&mut self, x: f64, color: &str, label: &str) {
        let sx = self.sx(x);
        let _ = writeln!(
            self.body,
            r#"<line x1="{sx:.2}" y1="{TOP}" x2="{sx:.2}" y2="{:.2}" stroke="{color}" stroke-width="2" stroke-dasharray="6 4"/>"#,
            HEIGHT - BOTTOM
        );
        let _ = writeln!(
            self.body,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" fill="{color}">{}</text>"#,
            sx + 4.0,
            TOP + 12.0,
            escape(label)
        );
    }

    pub fn hline(&mut self, y: f64, color: &str) {
        let sy = self.sy(y);
        let _ = writeln!(
            self.body,
            r#"<line x1="{LEFT}" y1="{sy:.2}" x2="{:.2}" y2="{sy:.2}" stroke="{color}" stroke-width="1" stroke-dasharray="3 3"/>"#,
            WIDTH - RIGHT
        );
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="24" font-size="15" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );
        let (x0, y0, x1, y1) = (LEFT, HEIGHT - BOTTOM, WIDTH - RIGHT, TOP);
        let _ = writeln!(s, r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#);
        let _ = writeln!(s, r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#);

        let yspan = self.y.1 - self.y.0;
        for k in 0..TICKS {
            let v = self.y.0 + yspan * k as f64 / (TICKS - 1) as f64;
            let py = self.sy(v);
            let _ = writeln!(s, r#"<line x1="{:.1}" y1="{py:.2}" x2="{x0}" y2="{py:.2}" stroke="black"/>"#, x0 - 5.0);
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.2}" font-size="11" text-anchor="end">{}</text>"#,
                x0 - 8.0,
                py + 4.0,
                tick_label(v, yspan)
            );
        }
        let ticks: Vec<(f64, String)> = match &self.x_tick_labels {
            Some(labels) => labels.iter().enumerate().map(|(i, l)| (i as f64, l.clone())).collect(),
            None => {
                let span = self.x.1 - self.x.0;
                (0..TICKS)
                    .map(|k| {
                        let v = self.x.0 + span * k as f64 / (TICKS - 1) as f64;
                        (v, tick_label(v, span))
                    })
                    .collect()
            }
        };
        for (v, label) in ticks {
            let px = self.sx(v);
            let _ = writeln!(s, r#"<line x1="{px:.2}" y1="{y0}" x2="{px:.2}" y2="{:.1}" stroke="black"/>"#, y0 + 5.0);
            let _ = writeln!(
                s,
                r#"<text x="{px:.2}" y="{:.1}" font-size="11" text-anchor="middle">{}</text>"#,
                y0 + 18.0,
                escape(&label)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="13" text-anchor="middle">{}</text>"#,
            (x0 + x1) / 2.0,
            HEIGHT - 15.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="18" y="{:.1}" font-size="13" text-anchor="middle" transform="rotate(-90 18 {:.1})">{}</text>"#,
            (y0 + y1) / 2.0,
            (y0 + y1) / 2.0,
            escape(&self.y_label)
        );
        s.push_str(&self.body);
        s.push_str("</svg>\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_elements() {
        let mut p = Plot::new("t<1>", "x", "y", (0.0, 1.0), (0.0, 2.0));
        p.point(0.5, 1.0, 3.0, CANDIDATE);
        p.line((0.0, 0.0), (1.0, 2.0), BASELINE, 2.0);
        let svg = p.render();
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(svg.contains("t&lt;1&gt;"));
        assert!(svg.contains(r#"<circle cx="350.00""#));
    }

    #[test]
    fn degenerate_bounds_are_widened() {
        assert_eq!(bounds([2.0, 2.0]), (1.8, 2.2));
        assert_eq!(bounds([]), (0.0, 1.0));
        assert_eq!(tick_label(0.00012, 0.001), "1.20e-4");
        assert_eq!(tick_label(0.5, 1.0), "0.50");
    }
}
