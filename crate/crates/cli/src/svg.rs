//! Minimal static scatter plot: one circle per point, minima as red lines.

use std::fmt::Write;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 70.0;

pub struct Scatter<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub points: &'a [(f64, f64)],
    /// Vertical red line.
    pub x_min: Option<f64>,
    /// Horizontal red line.
    pub y_min: Option<f64>,
    /// Lines placed in a leading XML comment.
    pub provenance: &'a [String],
}

/// Round step of roughly `span / 5`.
fn tick_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm < 1.5 {
        1.0
    } else if norm < 3.5 {
        2.0
    } else if norm < 7.5 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values.filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Scatter<'_> {
    pub fn render(&self) -> String {
        let (x0, x1) = range(self.points.iter().map(|p| p.0).chain(self.x_min));
        let (y0, y1) = range(self.points.iter().map(|p| p.1).chain(self.y_min));
        let pw = WIDTH - LEFT - RIGHT;
        let ph = HEIGHT - TOP - BOTTOM;
        let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

        let mut s = String::new();
        s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<!--\n");
        for line in self.provenance {
            // "--" is not allowed inside XML comments.
            let _ = writeln!(s, "  {}", line.replace("--", "- -"));
        }
        s.push_str("-->\n");
        let _ = writeln!(
            s,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">"
        );
        let _ = writeln!(s, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>",
            WIDTH / 2.0,
            escape(self.title)
        );

        // Axes and ticks.
        let _ = writeln!(
            s,
            "<g stroke=\"black\" fill=\"none\"><rect x=\"{LEFT}\" y=\"{TOP}\" width=\"{pw}\" height=\"{ph}\"/></g>"
        );
        s.push_str("<g stroke=\"black\">\n");
        let mut labels = String::new();
        let step = tick_step(x1 - x0);
        let mut t = (x0 / step).ceil() * step;
        while t <= x1 + 1e-12 * step {
            let x = sx(t);
            let _ = writeln!(s, "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\"/>", TOP + ph, TOP + ph + 5.0);
            let _ = writeln!(
                labels,
                "<text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
                TOP + ph + 19.0,
                fmt_tick(t, step)
            );
            t += step;
        }
        let step = tick_step(y1 - y0);
        let mut t = (y0 / step).ceil() * step;
        while t <= y1 + 1e-12 * step {
            let y = sy(t);
            let _ = writeln!(s, "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{LEFT}\" y2=\"{y:.2}\"/>", LEFT - 5.0);
            let _ = writeln!(
                labels,
                "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>",
                LEFT - 8.0,
                y + 4.0,
                fmt_tick(t, step)
            );
            t += step;
        }
        s.push_str("</g>\n");
        s.push_str(&labels);
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
            LEFT + pw / 2.0,
            HEIGHT - 20.0,
            escape(self.x_label)
        );
        let _ = writeln!(
            s,
            "<text x=\"20\" y=\"{:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 20 {:.2})\">{}</text>",
            TOP + ph / 2.0,
            TOP + ph / 2.0,
            escape(self.y_label)
        );

        s.push_str("<g fill=\"steelblue\" fill-opacity=\"0.6\">\n");
        for &(x, y) in self.points {
            if x.is_finite() && y.is_finite() {
                let _ = writeln!(s, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"1.5\"/>", sx(x), sy(y));
            }
        }
        s.push_str("</g>\n<g stroke=\"red\" stroke-width=\"1.5\">\n");
        if let Some(x) = self.x_min {
            let _ = writeln!(s, "<line x1=\"{0:.2}\" y1=\"{TOP}\" x2=\"{0:.2}\" y2=\"{1:.2}\"/>", sx(x), TOP + ph);
        }
        if let Some(y) = self.y_min {
            let _ = writeln!(s, "<line x1=\"{LEFT}\" y1=\"{0:.2}\" x2=\"{1:.2}\" y2=\"{0:.2}\"/>", sy(y), LEFT + pw);
        }
        s.push_str("</g>\n</svg>\n");
        s
    }
}

fn fmt_tick(v: f64, step: f64) -> String {
    let digits = (-step.log10().floor()).max(0.0) as usize;
    let v = if v.abs() < 1e-12 * step { 0.0 } else { v };
    format!("{v:.digits$}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ticks_are_round() {
        assert_eq!(tick_step(1.0), 0.2);
        assert_eq!(tick_step(37.0), 5.0);
        assert_eq!(fmt_tick(0.4, 0.2), "0.4");
        assert_eq!(fmt_tick(15.0, 5.0), "15");
    }

    #[test]
    fn renders_points_and_minima() {
        let pts = [(1.0, 0.5), (2.0, 1.0), (3.0, 0.7)];
        let prov = ["fermicorr 0.0 --x".to_string()];
        let svg = Scatter {
            title: "t",
            x_label: "x<",
            y_label: "y",
            points: &pts,
            x_min: Some(1.0),
            y_min: Some(0.5),
            provenance: &prov,
        }
        .render();
        assert_eq!(svg.matches("<circle").count(), 3);
        assert_eq!(svg.matches("stroke=\"red\"").count(), 1);
        assert!(svg.contains("r=\"1.5\""));
        assert!(svg.contains("viewBox=\"0 0 800 600\""));
        assert!(svg.contains("x&lt;"));
        assert!(svg.contains("- -x"));
        let comment_end = svg.find("-->").unwrap();
        assert!(!svg[..comment_end].contains("--x"));
    }
}
