use serde::{Deserialize, Serialize};
use staeckel_core::critical::{bifurcation_set, NormalType};

use super::Run;
use crate::svg::{css_color, Canvas};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub kind: String,
    pub name: String,
    pub segment: Option<usize>,
    pub t: Option<f64>,
    pub first: f64,
    pub second: f64,
    pub normal: Option<String>,
    pub color: Option<String>,
}

fn normal_name(n: NormalType) -> &'static str {
    match n {
        NormalType::Elliptic => "elliptic",
        NormalType::Hyperbolic => "hyperbolic",
        NormalType::Degenerate => "degenerate",
    }
}

pub fn rows(run: &Run) -> Vec<CurveRow> {
    let set = bifurcation_set(&run.spec);
    let n = run.settings.grid();
    let point_row = |kind: &str, name: &str, v: [f64; 2]| CurveRow {
        kind: kind.to_string(),
        name: name.to_string(),
        segment: None,
        t: None,
        first: v[0],
        second: v[1],
        normal: None,
        color: None,
    };
    let mut rows: Vec<CurveRow> = set
        .vertices
        .iter()
        .map(|v| point_row(if v.tangency { "tangency" } else { "vertex" }, &v.name, v.value))
        .collect();
    rows.extend(set.isolated.iter().map(|v| point_row("isolated", &v.name, v.value)));
    for c in &set.curves {
        for (k, seg) in c.segments.iter().enumerate() {
            let (t0, t1) = seg.range;
            for i in 0..n {
                let t = t0 + (t1 - t0) * i as f64 / (n - 1) as f64;
                let p = c.point(t);
                rows.push(CurveRow {
                    kind: "curve".to_string(),
                    name: c.name.clone(),
                    segment: Some(k),
                    t: Some(t),
                    first: p[0],
                    second: p[1],
                    normal: Some(normal_name(seg.normal).to_string()),
                    color: seg.color.clone().or_else(|| c.color.clone()),
                });
            }
        }
    }
    rows
}

/// The overlay drawn from the emitted rows alone.
pub fn plot(rows: &[CurveRow], axes: [&str; 2], title: &str) -> String {
    let xs = rows.iter().map(|r| r.first);
    let ys = rows.iter().map(|r| r.second);
    let (x0, x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    let (y0, y1) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| (a.min(y), b.max(y)));
    let mut canvas = Canvas::new(x0, x1, y0, y1);
    canvas.axes(axes[0], axes[1]);
    let curves: Vec<&CurveRow> = rows.iter().filter(|r| r.kind == "curve").collect();
    for piece in curves.chunk_by(|a, b| a.name == b.name && a.segment == b.segment) {
        let points: Vec<[f64; 2]> = piece.iter().map(|r| [r.first, r.second]).collect();
        let color = css_color(piece[0].color.as_deref());
        let width = if piece[0].normal.as_deref() == Some("hyperbolic") { 2.0 } else { 3.0 };
        canvas.polyline(&points, color, width);
    }
    for r in rows.iter().filter(|r| r.kind != "curve") {
        let color = if r.kind == "isolated" { "magenta" } else { "black" };
        canvas.dot([r.first, r.second], 4.0, color);
        canvas.label([r.first, r.second], &r.name);
    }
    canvas.finish(title)
}

pub fn run(run: &Run) -> anyhow::Result<bool> {
    let rows = rows(run);
    let names = run.integral_names();
    let meta = vec![format!("# integrals: {},{}", names[0], names[1])];
    let csv = run.out.csv("bifurcate.csv", &meta, &rows)?;
    println!("wrote {}", csv.display());
    if run.settings.plot() {
        let title = format!("{} critical values", run.spec.family().name());
        let svg = run.out.text("bifurcate.svg", &plot(&rows, names, &title))?;
        println!("wrote {}", svg.display());
    }
    Ok(true)
}
