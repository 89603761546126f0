use staeckel_core::critical::{
    bifurcation_set, chamber, classify, critical_points, differential_rank, in_image, Chamber, SingularityType,
};
use staeckel_core::so4::{casimirs, integral_values};
use staeckel_core::{Bivector, IntegralValues, SystemSpec};

use super::Run;
use crate::config::config_error;
use crate::output::Report;

fn chamber_fields(r: &mut Report, values: &IntegralValues, spec: &SystemSpec) {
    r.set("in_image", in_image(values, spec));
    match chamber(values, spec) {
        Chamber::Outside => r.set("chamber", "outside"),
        Chamber::Inside { code, multiplicity } => {
            r.set("chamber", [code.0, code.1]).set("tori", multiplicity)
        }
    };
}

/// Singularity types over a critical value, rank-1 points left out when
/// anything else is present.
pub fn types_over(spec: &SystemSpec, values: &IntegralValues) -> Option<Vec<SingularityType>> {
    let set = critical_points(spec, values).ok()?;
    let mut all: Vec<SingularityType> = set.sample(4).iter().map(|l| classify(l, spec)).collect();
    all.sort_by_key(|t| t.name());
    all.dedup();
    let rank0: Vec<SingularityType> = all
        .iter()
        .copied()
        .filter(|t| !matches!(t, SingularityType::Rank1Elliptic | SingularityType::Rank1Hyperbolic))
        .collect();
    Some(if rank0.is_empty() { all } else { rank0 })
}

fn point_report(spec: &SystemSpec, l: &Bivector) -> Report {
    let mut r = Report::default();
    let values = integral_values(spec, l);
    let (c1, c2) = casimirs(l);
    let rank = differential_rank(l, spec);
    r.set("point", l.to_array())
        .set("c1", c1)
        .set("c2", c2)
        .set("first", values.first)
        .set("second", values.second)
        .set("rank", rank.rank)
        .set("singular_values", rank.singular_values)
        .set("type", classify(l, spec).name());
    chamber_fields(&mut r, &values, spec);
    r
}

fn value_report(spec: &SystemSpec, values: &IntegralValues) -> Report {
    let mut r = Report::default();
    let set = bifurcation_set(spec);
    let v = [values.first, values.second];
    r.set("value", v).set("distance_to_critical_values", set.distance(v));
    if let Some(vertex) = set.all_vertices().find(|x| x.value == v) {
        r.set("vertex", &vertex.name);
    }
    match types_over(spec, values) {
        Some(types) => {
            r.set("critical", true).set("types", types.iter().map(|t| t.name()).collect::<Vec<_>>());
        }
        None => {
            r.set("critical", false);
        }
    }
    chamber_fields(&mut r, values, spec);
    r
}

pub fn run(run: &Run) -> anyhow::Result<bool> {
    let s = &run.settings;
    let mut r = match (&s.point, &s.value) {
        (Some(p), None) => {
            let l = Bivector::from_array([p[0], p[1], p[2], p[3], p[4], p[5]]);
            if !l.is_finite() {
                return config_error("--point must be finite");
            }
            point_report(&run.spec, &l)
        }
        (None, Some(v)) => value_report(&run.spec, &IntegralValues::at_level(v[0], v[1], run.spec.two_h())),
        _ => return config_error("classify needs exactly one of --point or --value"),
    };
    r.set("family", run.spec.family().name()).set("two_h", run.spec.two_h());
    if let Some(t) = r.get("type").or_else(|| r.get("types")) {
        println!("type {t}");
    }
    let path = run.out.json("classify.json", &r)?;
    println!("wrote {}", path.display());
    Ok(true)
}
