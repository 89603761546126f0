use serde::{Deserialize, Serialize};
use staeckel_core::actions::action_triple;
use staeckel_core::critical::bifurcation_set;

use super::{image_grid, par_map, Run};
use crate::svg::Canvas;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActionRow {
    pub eta1: f64,
    pub eta2: f64,
    pub j1: f64,
    pub j2: f64,
    pub j3: f64,
}

/// Actions on the in-image grid, plus the number of grid points where the
/// period integrals failed.
pub fn rows(run: &Run) -> anyhow::Result<(Vec<ActionRow>, usize)> {
    let set = bifurcation_set(&run.spec);
    let grid = image_grid(&run.spec, &set, run.settings.grid());
    let pool = run.pool()?;
    let results = par_map(&pool, &grid, |v| {
        action_triple(v, &run.spec).ok().map(|j| ActionRow { eta1: v.first, eta2: v.second, j1: j.j1, j2: j.j2, j3: j.j3 })
    });
    let failed = results.iter().filter(|r| r.is_none()).count();
    Ok((results.into_iter().flatten().collect(), failed))
}

const TOP: [f64; 2] = [400.0, 110.0];
const LEFT: [f64; 2] = [90.0, 647.0];
const RIGHT: [f64; 2] = [710.0, 647.0];

/// Barycentric position with J1 at the left corner, J2 at the top and J3 at the right.
fn ternary(r: &ActionRow) -> [f64; 2] {
    let s = r.j1 + r.j2 + r.j3;
    let (a, b, c) = (r.j1 / s, r.j2 / s, r.j3 / s);
    [a * LEFT[0] + b * TOP[0] + c * RIGHT[0], a * LEFT[1] + b * TOP[1] + c * RIGHT[1]]
}

pub fn plot(rows: &[ActionRow], title: &str) -> String {
    let mut canvas = Canvas::raw();
    canvas.polyline(&[LEFT, TOP, RIGHT, LEFT], "black", 1.5);
    canvas.label([LEFT[0] - 30.0, LEFT[1] + 25.0], "J1");
    canvas.label([TOP[0] - 10.0, TOP[1] - 10.0], "J2");
    canvas.label([RIGHT[0], RIGHT[1] + 25.0], "J3");
    for r in rows {
        canvas.dot(ternary(r), 2.5, "steelblue");
    }
    canvas.finish(title)
}

pub fn run(run: &Run) -> anyhow::Result<bool> {
    let (rows, failed) = rows(run)?;
    let names = run.integral_names();
    let meta = vec![
        format!("# integrals: eta1={},eta2={}", names[0], names[1]),
        format!("# skipped: {failed}"),
    ];
    let csv = run.out.csv("actions.csv", &meta, &rows)?;
    println!("wrote {} ({} points)", csv.display(), rows.len());
    if run.settings.plot() {
        let title = format!("{} action map", run.spec.family().name());
        let svg = run.out.text("actions.svg", &plot(&rows, &title))?;
        println!("wrote {}", svg.display());
    }
    Ok(true)
}
