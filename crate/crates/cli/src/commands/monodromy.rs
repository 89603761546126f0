use staeckel_core::actions::{monodromy, MonodromyReport, ValueLoop};
use staeckel_core::Family;

use super::Run;
use crate::config::{config_error, ConfigError};
use crate::output::Report;

/// Circle around the focus-focus value unless --center/--radius say otherwise.
pub fn compute(run: &Run) -> anyhow::Result<(MonodromyReport, [f64; 2], f64)> {
    if run.spec.family() != Family::Prolate {
        return config_error(format!("monodromy needs --system prolate, got {}", run.spec.family().name()));
    }
    let h2 = run.spec.two_h();
    let center = run.settings.center.clone().map_or([0.0, h2], |c| [c[0], c[1]]);
    let radius = run.settings.radius.unwrap_or(0.3 * h2);
    if !(radius > 0.0) {
        return config_error(format!("radius must be positive, got {radius}"));
    }
    let path = ValueLoop::circle(center, radius, run.settings.grid().max(64));
    let report = monodromy(&run.spec, &path).map_err(|e| ConfigError(format!("bad loop: {e}")))?;
    Ok((report, center, radius))
}

pub fn report(m: &MonodromyReport, center: [f64; 2], radius: f64) -> Report {
    let mut r = Report::default();
    r.set("center", center)
        .set("radius", radius)
        .set("matrix", m.matrix)
        .set("raw", m.raw)
        .set("residual", m.residual)
        .set("crossings", m.crossings.len())
        .set("crossing_g", m.crossings.iter().map(|c| c.g).collect::<Vec<_>>())
        .set("crossing_direction", m.crossings.iter().map(|c| c.direction).collect::<Vec<_>>());
    r
}

pub fn format_matrix(m: &[[i64; 3]; 3]) -> String {
    let rows: Vec<String> = m.iter().map(|r| format!("[{},{},{}]", r[0], r[1], r[2])).collect();
    format!("[{}]", rows.join(","))
}

pub fn run(run: &Run) -> anyhow::Result<bool> {
    let (m, center, radius) = compute(run)?;
    let mut r = report(&m, center, radius);
    r.set("b", run.settings.b.unwrap_or(2.4)).set("two_h", run.spec.two_h());
    let path = run.out.json("monodromy.json", &r)?;
    println!("monodromy {} residual {:.3e}", format_matrix(&m.matrix), m.residual);
    println!("wrote {}", path.display());
    Ok(true)
}
