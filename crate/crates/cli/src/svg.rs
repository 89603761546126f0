//! Hand-written SVG on a fixed 800x800 canvas.

use std::fmt::Write;

const SIZE: f64 = 800.0;
const MARGIN: f64 = 60.0;

pub struct Canvas {
    bounds: [f64; 4],
    body: String,
}

/// CSS colour for a curve tag; untagged curves are black.
pub fn css_color(tag: Option<&str>) -> &str {
    match tag {
        Some("grey") => "gray",
        Some(c) => c,
        None => "black",
    }
}

impl Canvas {
    /// Canvas showing [x0, x1] x [y0, y1] with equal padding on each side.
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Canvas {
        let pad = |a: f64, b: f64| {
            let w = (b - a).abs().max(1e-9);
            (a - 0.05 * w, b + 0.05 * w)
        };
        let (x0, x1) = pad(x0, x1);
        let (y0, y1) = pad(y0, y1);
        Canvas { bounds: [x0, x1, y0, y1], body: String::new() }
    }

    /// Canvas whose coordinates are already in pixels.
    pub fn raw() -> Canvas {
        Canvas { bounds: [MARGIN, SIZE - MARGIN, SIZE - MARGIN, MARGIN], body: String::new() }
    }

    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        let [x0, x1, y0, y1] = self.bounds;
        let span = SIZE - 2.0 * MARGIN;
        (MARGIN + (p[0] - x0) / (x1 - x0) * span, SIZE - MARGIN - (p[1] - y0) / (y1 - y0) * span)
    }

    pub fn polyline(&mut self, points: &[[f64; 2]], color: &str, width: f64) {
        if points.len() < 2 {
            return;
        }
        let coords: Vec<String> = points
            .iter()
            .map(|&p| {
                let (x, y) = self.map(p);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="{width}"/>"#,
            coords.join(" ")
        );
    }

    pub fn dot(&mut self, p: [f64; 2], radius: f64, color: &str) {
        let (x, y) = self.map(p);
        let _ = writeln!(self.body, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{radius}" fill="{color}"/>"#);
    }

    pub fn label(&mut self, p: [f64; 2], text: &str) {
        let (x, y) = self.map(p);
        let _ = writeln!(
            self.body,
            r#"<text x="{:.2}" y="{:.2}" font-size="14" font-family="sans-serif">{}</text>"#,
            x + 5.0,
            y - 5.0,
            escape(text)
        );
    }

    /// Frame plus axis labels at the bottom and left.
    pub fn axes(&mut self, x_name: &str, y_name: &str) {
        let [x0, x1, y0, y1] = self.bounds;
        self.polyline(&[[x0, y0], [x1, y0], [x1, y1], [x0, y1], [x0, y0]], "lightgray", 1.0);
        let _ = writeln!(
            self.body,
            r#"<text x="{}" y="{}" font-size="16" font-family="sans-serif" text-anchor="middle">{}</text>"#,
            SIZE / 2.0,
            SIZE - 20.0,
            escape(x_name)
        );
        let _ = writeln!(
            self.body,
            r#"<text x="20" y="{}" font-size="16" font-family="sans-serif" transform="rotate(-90 20 {})" text-anchor="middle">{}</text>"#,
            SIZE / 2.0,
            SIZE / 2.0,
            escape(y_name)
        );
        let _ = writeln!(
            self.body,
            r#"<text x="{MARGIN}" y="{}" font-size="12" font-family="sans-serif">x: [{x0:.4}, {x1:.4}]  y: [{y0:.4}, {y1:.4}]</text>"#,
            MARGIN - 20.0
        );
    }

    pub fn finish(self, title: &str) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 800\" width=\"800\" height=\"800\">\n\
             <title>{}</title>\n<rect width=\"800\" height=\"800\" fill=\"white\"/>\n{}</svg>\n",
            escape(title),
            self.body
        )
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
