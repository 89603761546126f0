use staeckel_core::actions::{parameter_action_map, semitoric_polygon};
use staeckel_core::param_space::{
    blowup, classify_face, flip, involution, involution_fixed_residual, normalize, representative_blowup, BlowupChart,
};
use staeckel_core::{Params, SystemSpec};

use super::Run;
use crate::output::Report;

fn chart(r: &mut Report, key: &str, c: &BlowupChart) {
    r.set(&format!("{key}_q"), c.q).set(&format!("{key}_r"), c.r);
}

fn ellipsoidal(r: &mut Report, e: [f64; 4]) -> anyhow::Result<()> {
    let (spec, rec) = normalize(e)?;
    let Params::Ellipsoidal(n) = spec.params() else { unreachable!("normalize returns an ellipsoidal spec") };
    let (a, b) = (n[2], n[3]);
    let (a2, b2) = involution(a, b)?;
    let (flipped, flip_rec) = flip(e)?;
    r.set("e", e)
        .set("alpha", rec.alpha)
        .set("beta", rec.beta)
        .set("a", a)
        .set("b", b)
        .set("involution_a", a2)
        .set("involution_b", b2)
        .set("fixed_line_residual", involution_fixed_residual(a, b))
        .set("flip_alpha", flip_rec.alpha)
        .set("flip_beta", flip_rec.beta)
        .set("flip_e", match flipped.params() {
            Params::Ellipsoidal(f) => f,
            _ => unreachable!("flip returns an ellipsoidal spec"),
        });
    let raw = blowup(a, b, None)?;
    let rep = representative_blowup(a, b)?;
    chart(r, "blowup", &raw);
    chart(r, "representative", &rep);
    r.set("face", format!("{:?}", classify_face(&rep)))
        .set("hh_actions_j1_j3", parameter_action_map(a, b)?);
    Ok(())
}

fn prolate(r: &mut Report, spec: &SystemSpec, b: f64) -> anyhow::Result<()> {
    let c = blowup(1.0, b, None)?;
    chart(r, "blowup", &c);
    r.set("b", b).set("face", format!("{:?}", classify_face(&c)));
    let poly = semitoric_polygon(spec)?;
    r.set("polygon_vertices", &poly.vertices)
        .set("fake_corner", poly.fake_corner)
        .set("focus_focus", poly.focus_focus)
        .set("height", poly.height)
        .set("height_numeric", poly.height_numeric);
    Ok(())
}

pub fn build(run: &Run) -> anyhow::Result<Report> {
    let mut r = Report::default();
    r.set("family", run.spec.family().name());
    match run.spec.params() {
        Params::Ellipsoidal(e) => ellipsoidal(&mut r, e)?,
        Params::Prolate { b } => prolate(&mut r, &run.spec, b)?,
        Params::Oblate { a } => {
            // poles (0, 1, a, a)
            let c = blowup(a, a, None)?;
            chart(&mut r, "blowup", &c);
            r.set("a", a).set("face", format!("{:?}", classify_face(&c)));
        }
        Params::Lame(f) => {
            r.set("f", f).set("face", "Lame");
        }
        Params::Spherical23 => {
            r.set("face", "Spherical");
        }
        Params::Cylindrical => {
            r.set("face", "Cylindrical");
        }
    }
    Ok(r)
}

pub fn run(run: &Run) -> anyhow::Result<bool> {
    let r = build(run)?;
    let path = run.out.json("polytope.json", &r)?;
    if let Some(face) = r.get("face") {
        println!("face {face}");
    }
    println!("wrote {}", path.display());
    Ok(true)
}
