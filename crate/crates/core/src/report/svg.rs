//! Minimal deterministic SVG writer. Coordinates are printed with two
//! decimals so output bytes depend only on the input values.

use std::fmt::Write;

pub struct Svg {
    buf: String,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Svg {
    pub fn new(width: f64, height: f64) -> Self {
        let mut buf = String::new();
        writeln!(
            buf,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif">"#
        )
        .unwrap();
        writeln!(buf, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
        Svg { buf }
    }

    pub fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str, class: &str) {
        writeln!(
            self.buf,
            r#"<rect class="{class}" x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{h:.2}" fill="{fill}"/>"#
        )
        .unwrap();
    }

    pub fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str) {
        writeln!(
            self.buf,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{stroke}" stroke-width="1"/>"#
        )
        .unwrap();
    }

    pub fn polyline(&mut self, points: &[(f64, f64)], stroke: &str) {
        if points.is_empty() {
            return;
        }
        let pts: Vec<String> = points.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        writeln!(
            self.buf,
            r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="1.5"/>"#,
            pts.join(" ")
        )
        .unwrap();
    }

    pub fn circle(&mut self, x: f64, y: f64, r: f64, fill: &str) {
        writeln!(
            self.buf,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r:.2}" fill="{fill}"/>"#
        )
        .unwrap();
    }

    pub fn text(&mut self, x: f64, y: f64, size: f64, anchor: &str, s: &str) {
        writeln!(
            self.buf,
            r#"<text x="{x:.2}" y="{y:.2}" font-size="{size:.0}" text-anchor="{anchor}">{}</text>"#,
            escape(s)
        )
        .unwrap();
    }

    /// Text rotated a quarter turn counter-clockwise about its anchor.
    pub fn vtext(&mut self, x: f64, y: f64, size: f64, s: &str) {
        writeln!(
            self.buf,
            r#"<text x="{x:.2}" y="{y:.2}" font-size="{size:.0}" text-anchor="middle" transform="rotate(-90 {x:.2} {y:.2})">{}</text>"#,
            escape(s)
        )
        .unwrap();
    }

    pub fn finish(mut self) -> String {
        self.buf.push_str("</svg>\n");
        self.buf
    }
}

/// A rectangular plot area mapping data ranges onto pixels.
#[derive(Debug, Clone, Copy)]
pub struct Frame {
    pub left: f64,
    pub top: f64,
    pub width: f64,
    pub height: f64,
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl Frame {
    pub fn px(&self, x: f64) -> f64 {
        self.left + (x - self.x.0) / (self.x.1 - self.x.0) * self.width
    }

    pub fn py(&self, y: f64) -> f64 {
        self.top + self.height - (y - self.y.0) / (self.y.1 - self.y.0) * self.height
    }

    pub fn bottom(&self) -> f64 {
        self.top + self.height
    }

    /// Box, five ticks per axis, labels and title.
    pub fn axes(&self, svg: &mut Svg, title: &str, xlabel: &str, ylabel: &str) {
        let (l, t, w, h) = (self.left, self.top, self.width, self.height);
        svg.line(l, t + h, l + w, t + h, "black");
        svg.line(l, t, l, t + h, "black");
        for k in 0..=4 {
            let f = k as f64 / 4.0;
            let xv = self.x.0 + f * (self.x.1 - self.x.0);
            let yv = self.y.0 + f * (self.y.1 - self.y.0);
            let (px, py) = (self.px(xv), self.py(yv));
            svg.line(px, t + h, px, t + h + 4.0, "black");
            svg.text(px, t + h + 16.0, 10.0, "middle", &tick(xv));
            svg.line(l - 4.0, py, l, py, "black");
            svg.text(l - 6.0, py + 3.0, 10.0, "end", &tick(yv));
        }
        svg.text(l + w / 2.0, t - 10.0, 13.0, "middle", title);
        svg.text(l + w / 2.0, t + h + 32.0, 11.0, "middle", xlabel);
        svg.vtext(l - 40.0, t + h / 2.0, 11.0, ylabel);
    }
}

fn tick(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-2..1e4).contains(&a) {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.2}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" {
            "0".into()
        } else {
            s.into()
        }
    }
}

/// Upper end of a value axis: the maximum with 5% headroom, or 1 when the
/// data are all zero.
pub fn nice_max(values: impl IntoIterator<Item = f64>) -> f64 {
    let m = values
        .into_iter()
        .filter(|v| v.is_finite())
        .fold(0.0f64, f64::max);
    if m > 0.0 {
        m * 1.05
    } else {
        1.0
    }
}

fn lerp(a: (u8, u8, u8), b: (u8, u8, u8), t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let mix = |x: u8, y: u8| (x as f64 + (y as f64 - x as f64) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

/// Blue for -1, white for 0, red for +1.
pub fn diverging(r: f64) -> String {
    if r < 0.0 {
        lerp((255, 255, 255), (33, 102, 172), -r)
    } else {
        lerp((255, 255, 255), (178, 24, 43), r)
    }
}

/// White to dark purple over [0, 1].
pub fn sequential(t: f64) -> String {
    lerp((255, 255, 255), (63, 0, 125), t)
}

pub const COLOR_A: &str = "#b2182b";
pub const COLOR_B: &str = "#2166ac";
pub const COLOR_NEUTRAL: &str = "#555555";
