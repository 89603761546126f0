use std::f64::consts::PI;

use rayon::prelude::*;
use staeckel_core::actions::{action_triple, action_triple_quadrature, closed_form_vertices, semitoric_polygon};
use staeckel_core::critical::{bifurcation_set, SingularityType};
use staeckel_core::dynamics::integrate_geodesic;
use staeckel_core::grassmann::{plane_from_bivector, plucker, subspace_angle, wedge_minors, OrientedPlane};
use staeckel_core::separation::{momentum_relation, separated_momenta, stackel_matrix};
use staeckel_core::so4::{build_integrals, integral_values, lp_bracket, sample_leaf};
use staeckel_core::{IntegralValues, Params, QuadraticObservable};

use super::classify::types_over;
use super::{image_grid, monodromy, Run};
use crate::output::Report;

const EXPECTED_MONODROMY: [[i64; 3]; 3] = [[1, 2, 0], [0, 1, 0], [0, -2, 1]];

struct Check {
    name: &'static str,
    pass: bool,
    value: f64,
    detail: String,
}

fn check(name: &'static str, value: f64, limit: f64, detail: String) -> Check {
    Check { name, pass: value < limit, value, detail }
}

fn commutation(run: &Run) -> Check {
    let mut rng = run.rng();
    let (f, g) = build_integrals(&run.spec);
    let casimirs = [QuadraticObservable::casimir1(), QuadraticObservable::casimir2()];
    let mut worst = 0.0f64;
    for _ in 0..run.settings.samples() {
        let (_, l) = sample_leaf(&mut rng, run.spec.two_h());
        let rel = |a: &QuadraticObservable, b: &QuadraticObservable| {
            let scale = a.gradient(&l).norm() * b.gradient(&l).norm() * l.norm_sq().sqrt();
            lp_bracket(a, b, &l).abs() / scale.max(1e-300)
        };
        worst = worst.max(rel(&f, &g));
        for c in &casimirs {
            worst = worst.max(rel(c, &f)).max(rel(c, &g));
        }
    }
    check("commutation", worst, 1e-10, format!("max scaled bracket {worst:.2e}"))
}

fn sum_rule(run: &Run) -> anyhow::Result<Check> {
    let set = bifurcation_set(&run.spec);
    let grid = image_grid(&run.spec, &set, run.settings.grid());
    let root = run.spec.two_h().sqrt();
    let pool = run.pool()?;
    let errors: Vec<f64> = pool.install(|| {
        grid.par_iter()
            .map(|v| action_triple(v, &run.spec).map_or(f64::INFINITY, |j| (j.sum() - root).abs()))
            .collect()
    });
    let worst = errors.iter().copied().fold(0.0, f64::max);
    let value = if grid.is_empty() { f64::INFINITY } else { worst };
    Ok(check("sum_rule", value, 1e-8, format!("max |sum J - sqrt(2h)| {value:.2e} over {} points", grid.len())))
}

fn separation(run: &Run) -> Check {
    let mut rng = run.rng();
    let (mut momentum, mut residual) = (0.0f64, 0.0f64);
    let mut used = 0;
    for _ in 0..run.settings.samples().min(500) {
        let (p, l) = sample_leaf(&mut rng, run.spec.two_h());
        if p.x.iter().any(|v| v.abs() < 1e-2) {
            continue;
        }
        used += 1;
        let Ok((cp, momenta)) = separated_momenta(&p, &run.spec) else {
            residual = f64::INFINITY;
            continue;
        };
        let values = integral_values(&run.spec, &l);
        for (k, m) in momenta.iter().enumerate() {
            let want = momentum_relation(k, &values, &run.spec).map_or(f64::NAN, |rel| rel.eval(cp.s[k]));
            let err = (m * m - want).abs() / (1.0 + want.abs());
            momentum = momentum.max(if err.is_nan() { f64::INFINITY } else { err });
        }
        residual = residual.max(stackel_matrix(&run.spec, &cp).map_or(f64::INFINITY, |s| s.residual));
    }
    Check {
        name: "separation",
        pass: momentum < 1e-6 && residual < 1e-10,
        value: residual,
        detail: format!("Stackel residual {residual:.2e}, momentum relations {momentum:.2e} over {used} points"),
    }
}

fn grassmann(run: &Run) -> Check {
    let mut rng = run.rng();
    let (mut angle, mut minors) = (0.0f64, 0.0f64);
    for _ in 0..run.settings.samples() {
        let (p, l) = sample_leaf(&mut rng, run.spec.two_h());
        minors = wedge_minors(&l).iter().fold(minors, |m, x| m.max(x.abs()));
        let a = OrientedPlane::from_span(p.x, p.y)
            .and_then(|plane| {
                let back = plane_from_bivector(&plucker(&plane)?)?;
                Ok(subspace_angle(&plane, &back))
            })
            .unwrap_or(f64::INFINITY);
        angle = angle.max(a);
    }
    Check {
        name: "pluecker",
        pass: angle < 1e-10 && minors < 1e-12 * run.spec.two_h().max(1.0),
        value: angle,
        detail: format!("round-trip angle {angle:.2e}, minors {minors:.2e}"),
    }
}

fn conservation(run: &Run) -> Check {
    let (p, _) = sample_leaf(&mut run.rng(), run.spec.two_h());
    let t = run.settings.t_end();
    match integrate_geodesic(&p, &run.spec, t, run.settings.tol()) {
        Ok(traj) => {
            let worst = traj.max_drift().into_iter().fold(0.0, f64::max);
            check("conservation", worst, 1e-8, format!("max drift {worst:.2e} over T = {t}"))
        }
        Err(e) => check("conservation", f64::INFINITY, 1e-8, format!("integration failed: {e}")),
    }
}

fn classification(run: &Run) -> Check {
    let set = bifurcation_set(&run.spec);
    let h2 = run.spec.two_h();
    let expect = |name: &str| -> Option<SingularityType> {
        match run.spec.params() {
            Params::Ellipsoidal(_) => Some(match name {
                "d12" | "d14" | "d34" => SingularityType::EllipticElliptic,
                "d13" | "d24" => SingularityType::EllipticHyperbolic,
                "d23" => SingularityType::HyperbolicHyperbolic,
                _ => SingularityType::Degenerate,
            }),
            Params::Prolate { .. } if name == "ff" => Some(SingularityType::FocusFocus),
            _ => None,
        }
    };
    let mut bad = Vec::new();
    let mut seen = 0;
    for v in set.all_vertices() {
        let values = IntegralValues::at_level(v.value[0], v.value[1], h2);
        match (types_over(&run.spec, &values), expect(&v.name)) {
            (None, _) => bad.push(format!("{}: no critical points", v.name)),
            (Some(got), Some(want)) if got != [want] => bad.push(format!("{}: {got:?}", v.name)),
            (Some(got), _) if got.is_empty() => bad.push(format!("{}: empty fibre", v.name)),
            _ => {}
        }
        seen += 1;
    }
    let detail = if bad.is_empty() { format!("{seen} vertices classified") } else { bad.join("; ") };
    Check { name: "classification", pass: bad.is_empty(), value: bad.len() as f64, detail }
}

fn anchors(run: &Run) -> anyhow::Result<Check> {
    let cf = closed_form_vertices(&run.spec)?;
    let set = bifurcation_set(&run.spec);
    let h2 = run.spec.two_h();
    let rt = h2.sqrt();
    let at = |name: &str| -> f64 {
        let Some(v) = set.vertices.iter().find(|v| v.name == name) else { return f64::INFINITY };
        action_triple_quadrature(&IntegralValues::at_level(v.value[0], v.value[1], h2), &run.spec)
            .map_or(f64::INFINITY, |j| {
                let want = match name {
                    "d24" => cf.a31,
                    "d13" => cf.a12,
                    "d23" => cf.hh,
                    "d2" => cf.a21,
                    _ => cf.a22,
                };
                j.max_diff(want) / rt
            })
    };
    let parts = ["d13", "d24", "d23", "d2", "d3"].map(|n| (n, at(n)));
    let worst = parts.iter().map(|p| p.1).fold(0.0, f64::max);
    let detail = parts.iter().map(|(n, e)| format!("{n} {e:.1e}")).collect::<Vec<_>>().join(", ");
    Ok(check("anchors", worst, 1e-8, detail))
}

fn prolate_checks(run: &Run, b: f64, report: &mut Report) -> anyhow::Result<Vec<Check>> {
    let (m, center, radius) = monodromy::compute(run)?;
    println!("monodromy {}", monodromy::format_matrix(&m.matrix));
    report.set("monodromy", m.matrix).set("monodromy_raw", m.raw).set("monodromy_center", center).set("monodromy_radius", radius);
    let mut mono = check("monodromy", m.residual, 1e-2, format!("residual {:.2e}", m.residual));
    mono.pass &= m.matrix == EXPECTED_MONODROMY;
    let poly = semitoric_polygon(&run.spec)?;
    let exact = 2.0 / PI * (1.0 / b).sqrt().acos() * run.spec.two_h().sqrt();
    let err = (poly.height_numeric - exact).abs();
    let height = check("height", err, 1e-6, format!("numeric {:.10} closed form {exact:.10}", poly.height_numeric));
    Ok(vec![mono, height])
}

/// All checks for the configured system.
fn suite(run: &Run) -> anyhow::Result<(Vec<Check>, Report)> {
    let mut report = Report::default();
    let mut checks = vec![commutation(run), sum_rule(run)?, separation(run), grassmann(run), conservation(run), classification(run)];
    match run.spec.params() {
        Params::Ellipsoidal(_) => checks.push(anchors(run)?),
        Params::Prolate { b } => checks.extend(prolate_checks(run, b, &mut report)?),
        _ => {}
    }
    Ok((checks, report))
}

pub fn run(run: &Run) -> anyhow::Result<bool> {
    let (checks, mut report) = suite(run)?;
    for c in &checks {
        println!("{} {:<15} {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
        report.set(&format!("{}_pass", c.name), c.pass).set(&format!("{}_value", c.name), c.value);
    }
    let passed = checks.iter().all(|c| c.pass);
    report
        .set("family", run.spec.family().name())
        .set("seed", run.settings.seed())
        .set("passed", passed);
    let path = run.out.json("verify.json", &report)?;
    println!("{} of {} checks passed", checks.iter().filter(|c| c.pass).count(), checks.len());
    println!("wrote {}", path.display());
    Ok(passed)
}
