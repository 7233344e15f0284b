//! Minimal SVG drawer for the bar chart and the effect scatter plots.

use std::fmt::Write;

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"];

pub struct Svg {
    width: f64,
    height: f64,
    body: String,
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

impl Svg {
    pub fn new(width: f64, height: f64) -> Self {
        Svg { width, height, body: String::new() }
    }

    pub fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, width: f64) {
        let _ = writeln!(
            self.body,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{stroke}" stroke-width="{width:.2}"/>"#
        );
    }

    pub fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str) {
        let _ = writeln!(self.body, r#"<rect x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{h:.2}" fill="{fill}"/>"#);
    }

    pub fn circle(&mut self, cx: f64, cy: f64, r: f64, fill: &str) {
        let _ =
            writeln!(self.body, r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="{r:.2}" fill="{fill}" fill-opacity="0.75"/>"#);
    }

    pub fn text(&mut self, x: f64, y: f64, s: &str, size: f64, anchor: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{x:.2}" y="{y:.2}" font-size="{size:.1}" font-family="sans-serif" text-anchor="{anchor}">{}</text>"#,
            esc(s)
        );
    }

    pub fn vtext(&mut self, x: f64, y: f64, s: &str, size: f64) {
        let _ = writeln!(
            self.body,
            r#"<text x="{x:.2}" y="{y:.2}" font-size="{size:.1}" font-family="sans-serif" text-anchor="middle" transform="rotate(-90 {x:.2} {y:.2})">{}</text>"#,
            esc(s)
        );
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.0} {h:.0}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body,
            w = self.width,
            h = self.height
        )
    }
}

/// Round tick positions covering `[lo, hi]`.
pub fn ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let span = (hi - lo).abs().max(1e-12);
    let raw = span / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step =
        [1.0, 2.0, 2.5, 5.0, 10.0].iter().map(|m| m * mag).find(|s| span / s <= target as f64).unwrap_or(10.0 * mag);
    let start = (lo / step).ceil() as i64;
    let end = (hi / step).floor() as i64;
    (start..=end).map(|k| k as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

/// Plot frame in pixel space with data-to-pixel mapping.
struct Frame {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    xr: (f64, f64),
    yr: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        self.x0 + (x - self.xr.0) / (self.xr.1 - self.xr.0) * self.w
    }

    fn py(&self, y: f64) -> f64 {
        self.y0 + self.h - (y - self.yr.0) / (self.yr.1 - self.yr.0) * self.h
    }

    fn axes(&self, svg: &mut Svg, xlabel: &str, ylabel: &str, xticks: bool) {
        svg.line(self.x0, self.y0 + self.h, self.x0 + self.w, self.y0 + self.h, "black", 1.0);
        svg.line(self.x0, self.y0, self.x0, self.y0 + self.h, "black", 1.0);
        for t in ticks(self.yr.0, self.yr.1, 5) {
            let y = self.py(t);
            svg.line(self.x0 - 4.0, y, self.x0, y, "black", 1.0);
            svg.line(self.x0, y, self.x0 + self.w, y, "#e0e0e0", 0.5);
            svg.text(self.x0 - 6.0, y + 4.0, &tick_label(t), 10.0, "end");
        }
        if xticks {
            for t in ticks(self.xr.0, self.xr.1, 5) {
                let x = self.px(t);
                svg.line(x, self.y0 + self.h, x, self.y0 + self.h + 4.0, "black", 1.0);
                svg.text(x, self.y0 + self.h + 16.0, &tick_label(t), 10.0, "middle");
            }
        }
        svg.text(self.x0 + self.w / 2.0, self.y0 + self.h + 34.0, xlabel, 12.0, "middle");
        svg.vtext(self.x0 - 40.0, self.y0 + self.h / 2.0, ylabel, 12.0);
    }
}

/// Vertical bars, one per category.
pub fn bar_chart(title: &str, categories: &[String], values: &[f64], xlabel: &str, ylabel: &str) -> String {
    let (w, h) = (560.0, 380.0);
    let mut svg = Svg::new(w, h);
    let top = values.iter().cloned().fold(0.0, f64::max);
    let ymax = if top > 0.0 { top * 1.25 } else { 1.0 };
    let f =
        Frame { x0: 70.0, y0: 40.0, w: 460.0, h: 280.0, xr: (0.0, categories.len().max(1) as f64), yr: (0.0, ymax) };
    svg.text(w / 2.0, 24.0, title, 14.0, "middle");
    f.axes(&mut svg, xlabel, ylabel, false);
    for (i, (c, v)) in categories.iter().zip(values).enumerate() {
        let left = f.px(i as f64 + 0.2);
        let right = f.px(i as f64 + 0.8);
        let y = f.py(*v);
        svg.rect(left, y, right - left, f.py(0.0) - y, PALETTE[0]);
        svg.text((left + right) / 2.0, y - 4.0, &format!("{v:.2}"), 10.0, "middle");
        svg.text((left + right) / 2.0, f.y0 + f.h + 16.0, c, 10.0, "middle");
    }
    svg.finish()
}

pub struct Panel {
    pub title: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Colour group of each point; empty strings share one colour.
    pub groups: Vec<String>,
    /// Intercept and slope of the overlaid line.
    pub line: (f64, f64),
}

/// Side-by-side scatter panels with a fitted line and a shared legend.
pub fn scatter_panels(panels: &[Panel], ylabel: &str) -> String {
    let pw = 360.0;
    let w = 40.0 + pw * panels.len().max(1) as f64;
    let h = 420.0;
    let mut svg = Svg::new(w, h);
    let mut classes: Vec<&str> = panels.iter().flat_map(|p| p.groups.iter().map(String::as_str)).collect();
    classes.sort_unstable();
    classes.dedup();
    let colour = |g: &str| PALETTE[classes.iter().position(|c| *c == g).unwrap_or(0) % PALETTE.len()];
    for (k, p) in panels.iter().enumerate() {
        let range = |v: &[f64]| {
            let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if lo.is_finite() && hi > lo {
                let pad = 0.05 * (hi - lo);
                (lo - pad, hi + pad)
            } else {
                (-1.0, 1.0)
            }
        };
        let f = Frame { x0: 80.0 + pw * k as f64, y0: 40.0, w: pw - 70.0, h: 300.0, xr: range(&p.x), yr: range(&p.y) };
        svg.text(f.x0 + f.w / 2.0, 24.0, &p.title, 13.0, "middle");
        f.axes(&mut svg, &p.title, ylabel, true);
        for (i, (x, y)) in p.x.iter().zip(&p.y).enumerate() {
            let g = p.groups.get(i).map_or("", String::as_str);
            svg.circle(f.px(*x), f.py(*y), 2.5, colour(g));
        }
        let (a, b) = p.line;
        let (xl, xh) = f.xr;
        let clip = |y: f64| y.clamp(f.yr.0, f.yr.1);
        svg.line(f.px(xl), f.py(clip(a + b * xl)), f.px(xh), f.py(clip(a + b * xh)), "black", 2.0);
    }
    let named: Vec<&&str> = classes.iter().filter(|c| !c.is_empty()).collect();
    for (i, c) in named.iter().enumerate() {
        let x = 80.0 + 110.0 * i as f64;
        svg.circle(x, h - 20.0, 4.0, colour(c));
        svg.text(x + 8.0, h - 16.0, c, 11.0, "start");
    }
    svg.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ticks_are_round_and_inside() {
        assert_eq!(ticks(0.0, 1.0, 5), vec![0.0, 0.2, 0.4, 0.6000000000000001, 0.8, 1.0]);
        let t = ticks(-2.3, 7.9, 5);
        assert!(t.iter().all(|v| (-2.3..=7.9).contains(v)));
    }

    #[test]
    fn charts_are_well_formed() {
        let s = bar_chart("t", &["5%".into(), "10%".into()], &[1.21, 1.21], "FDR", "selected %");
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        assert_eq!(s.matches("<rect").count(), 3);
        let p = Panel {
            title: "a<b".into(),
            x: vec![0.0, 1.0],
            y: vec![0.0, 1.0],
            groups: vec!["fear".into(), "".into()],
            line: (0.0, 1.0),
        };
        let s = scatter_panels(&[p], "arousal");
        assert!(s.contains("a&lt;b"));
        assert_eq!(s.matches("<circle").count(), 3);
    }
}
