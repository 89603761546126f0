use staeckel_core::dynamics::{integrate_geodesic, integrate_reduced, Monitor, Trajectory};
use staeckel_core::so4::{build_integrals, sample_leaf};
use staeckel_core::Bivector;

use super::Run;
use crate::config::{config_error, Flow, Generator};
use crate::output::Report;

const PAIR_NAMES: [&str; 6] = ["l12", "l13", "l14", "l23", "l24", "l34"];

fn drift_report<S>(r: &mut Report, traj: &Trajectory<S>) {
    let max = traj.max_drift();
    for (name, d) in traj.names.iter().zip(&max) {
        r.set(&format!("drift_{name}"), d);
    }
    r.set("max_drift", max.iter().copied().fold(0.0, f64::max))
        .set("steps", traj.times.len())
        .set("rejected", traj.rejected);
}

pub fn run(run: &Run) -> anyhow::Result<bool> {
    let s = &run.settings;
    let (p0, l0) = sample_leaf(&mut run.rng(), run.spec.two_h());
    let flow = s.flow.unwrap_or(Flow::Geodesic);
    let mut report = Report::default();
    report
        .set("flow", flow)
        .set("t_end", s.t_end())
        .set("tol", s.tol())
        .set("seed", s.seed());
    let (header, rows): (Vec<String>, Vec<Vec<f64>>) = match flow {
        Flow::Geodesic => {
            if s.point.is_some() {
                return config_error("--point applies to the reduced flow only");
            }
            let traj = integrate_geodesic(&p0, &run.spec, s.t_end(), s.tol())?;
            drift_report(&mut report, &traj);
            report.set("x0", p0.x.as_slice()).set("y0", p0.y.as_slice());
            let mut header: Vec<String> = ["t", "x1", "x2", "x3", "x4", "y1", "y2", "y3", "y4"].map(String::from).to_vec();
            header.extend(traj.names.iter().map(|n| format!("drift_{n}")));
            let rows = traj
                .times
                .iter()
                .zip(&traj.states)
                .zip(&traj.drift)
                .map(|((t, p), d)| {
                    let mut row = vec![*t];
                    row.extend(p.x.iter().chain(p.y.iter()));
                    row.extend(d);
                    row
                })
                .collect();
            (header, rows)
        }
        Flow::Reduced => {
            let l = match &s.point {
                Some(v) => Bivector::from_array([v[0], v[1], v[2], v[3], v[4], v[5]]),
                None => l0,
            };
            let (f, g) = build_integrals(&run.spec);
            let (gen, partner) = match s.generator.unwrap_or(Generator::First) {
                Generator::First => (f, Monitor::new("partner", g)),
                Generator::Second => (g, Monitor::new("partner", f)),
            };
            let traj = integrate_reduced(&l, &gen, &[partner], s.t_end(), s.tol())?;
            drift_report(&mut report, &traj);
            report.set("generator", s.generator.unwrap_or(Generator::First)).set("l0", l.to_array());
            let mut header: Vec<String> = std::iter::once("t").chain(PAIR_NAMES).map(String::from).collect();
            header.extend(traj.names.iter().map(|n| format!("drift_{n}")));
            let rows = traj
                .times
                .iter()
                .zip(&traj.states)
                .zip(&traj.drift)
                .map(|((t, l), d)| {
                    let mut row = vec![*t];
                    row.extend(l.to_array());
                    row.extend(d);
                    row
                })
                .collect();
            (header, rows)
        }
    };
    let csv = run.out.table("simulate.csv", &[], &header, &rows)?;
    let json = run.out.json("simulate.json", &report)?;
    if let Some(d) = report.get("max_drift") {
        println!("max drift {d}");
    }
    println!("wrote {}", csv.display());
    println!("wrote {}", json.display());
    Ok(true)
}
