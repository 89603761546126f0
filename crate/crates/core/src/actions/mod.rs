//! Action variables, their closed-form anchors and the prolate monodromy.

mod elliptic;
mod monodromy;
mod quadrature;

pub use elliptic::{complete_elliptic, elliptic_value, EllipticKind, EllipticValue};
pub use monodromy::{
    action_jacobian, derivative_jump, monodromy, semitoric_polygon, Crossing, MonodromyReport, SemitoricPolygon,
    ValueLoop,
};
pub use quadrature::{integrate_smooth, period_integral, MIN_INTERVAL, QUAD_TOL};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::critical::{chamber, Chamber};
use crate::error::{Error, Result};
use crate::separation::{momentum_relation, turning_roots};
use crate::system::{IntegralValues, Params, SystemSpec};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ActionTriple {
    pub j1: f64,
    pub j2: f64,
    pub j3: f64,
}

impl ActionTriple {
    pub fn new(j1: f64, j2: f64, j3: f64) -> Self {
        ActionTriple { j1, j2, j3 }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        ActionTriple::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.j1, self.j2, self.j3]
    }

    pub fn sum(self) -> f64 {
        self.j1 + self.j2 + self.j3
    }

    pub fn scale(self, s: f64) -> Self {
        ActionTriple::new(self.j1 * s, self.j2 * s, self.j3 * s)
    }

    pub fn max_diff(self, other: Self) -> f64 {
        let (a, b) = (self.to_array(), other.to_array());
        (0..3).map(|k| (a[k] - b[k]).abs()).fold(0.0, f64::max)
    }
}

fn checked(values: &IntegralValues, spec: &SystemSpec) -> Result<SystemSpec> {
    let spec = spec.with_level(values.two_h)?;
    if chamber(values, &spec) == Chamber::Outside {
        return Err(Error::NotInImage(format!("({}, {})", values.first, values.second)));
    }
    Ok(spec)
}

fn integral(k: usize, lo: f64, hi: f64, values: &IntegralValues, spec: &SystemSpec) -> Result<f64> {
    Ok(period_integral(&momentum_relation(k, values, spec)?, lo, hi))
}

fn triple(values: &IntegralValues, spec: &SystemSpec, quadrature_only: bool) -> Result<ActionTriple> {
    let spec = checked(values, spec)?;
    let h2 = values.two_h;
    let rt = h2.sqrt();
    let (u, v) = (values.first, values.second);
    let q = |k: usize, lo: f64, hi: f64| integral(k, lo, hi, values, &spec);
    let roots = turning_roots(values, &spec)?;
    let (r1, r2) = (roots.r1, roots.r2);
    let j = match spec.params() {
        Params::Ellipsoidal(e) => [
            q(0, e[0], r1.min(e[1]))?,
            q(1, r1.max(e[1]), r2.min(e[2]))?,
            q(2, r2.max(e[2]), e[3])?,
        ],
        Params::Prolate { b } => [q(0, 0.0, r1.min(1.0))?, u.abs(), q(2, r2.max(1.0), b)?],
        Params::Oblate { a } => [q(0, 0.0, r1.min(1.0))?, q(1, r1.max(1.0), r2.min(a))?, u.abs()],
        Params::Lame(f) => {
            let j1 = if quadrature_only { q(0, 0.0, u / h2)? } else { rt - (h2 - u).max(0.0).sqrt() };
            let (lo, hi) = if r2.is_nan() { (f[1], f[1]) } else { (r2.min(f[1]), r2.max(f[1])) };
            [j1, q(1, f[0], lo)?, q(2, hi, f[2])?]
        }
        Params::Spherical23 => {
            let rest = (h2 - v).max(0.0);
            if quadrature_only {
                let top = if rest > 0.0 { 1.0 - u * u / rest } else { 0.0 };
                [q(0, 0.0, v / h2)?, q(1, 0.0, top)?, u.abs()]
            } else {
                [rt - rest.sqrt(), (rest.sqrt() - u.abs()).max(0.0), u.abs()]
            }
        }
        Params::Cylindrical => {
            let j2 = if quadrature_only { q(1, r1, r2)? } else { (rt - u.abs() - v.abs()).max(0.0) };
            [u.abs(), j2, v.abs()]
        }
    };
    Ok(ActionTriple::from_array(j))
}

/// The three actions at an in-image value. Trivial actions and the
/// closed forms of the Lame, spherical and cylindrical families are used
/// where they exist; everything else is a period integral.
pub fn action_triple(values: &IntegralValues, spec: &SystemSpec) -> Result<ActionTriple> {
    triple(values, spec, false)
}

/// As `action_triple` but with every nontrivial action integrated
/// numerically, for cross-checking the closed forms.
pub fn action_triple_quadrature(values: &IntegralValues, spec: &SystemSpec) -> Result<ActionTriple> {
    triple(values, spec, true)
}

/// Modulus squared and the two characteristics of the ellipsoidal
/// vertex integrals.
pub fn vertex_characteristics(e: [f64; 4]) -> (f64, f64, f64) {
    let k2 = (e[3] - e[2]) * (e[1] - e[0]) / ((e[3] - e[1]) * (e[2] - e[0]));
    let alpha1 = (e[1] - e[0]) / (e[1] - e[3]);
    let alpha3 = (e[3] - e[2]) / (e[0] - e[2]);
    (k2, alpha1, alpha3)
}

/// ((u - v) K(k) + (e4 - e1) Pi(alpha, k)) / (pi sqrt((e1 - e3)(e2 - e4))).
pub fn vertex_integral(u: f64, v: f64, alpha: f64, e: [f64; 4]) -> Result<f64> {
    let (k2, _, _) = vertex_characteristics(e);
    let k = k2.sqrt();
    let kk = complete_elliptic(EllipticKind::K, k, None)?;
    let pi = complete_elliptic(EllipticKind::Pi, k, Some(alpha))?;
    Ok(((u - v) * kk + (e[3] - e[0]) * pi) / (PI * ((e[0] - e[2]) * (e[1] - e[3])).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VertexActions {
    /// tangency on the second line at e2
    pub a21: ActionTriple,
    /// tangency on the third line at e3
    pub a22: ActionTriple,
    pub a31: ActionTriple,
    pub a12: ActionTriple,
    pub hh: ActionTriple,
}

/// Closed-form actions at the ellipsoidal vertices d2, d3, d24, d13 and d23.
pub fn closed_form_vertices(spec: &SystemSpec) -> Result<VertexActions> {
    let e = spec.ellipsoidal_params()?;
    let rt = spec.two_h().sqrt();
    let (_, alpha1, alpha3) = vertex_characteristics(e);
    let c = 2.0 / PI;
    let a21 = ActionTriple::new(
        2.0 * vertex_integral(e[1], e[3], alpha1, e)?,
        0.0,
        2.0 * vertex_integral(e[0], e[1], alpha3, e)?,
    );
    let a22 = ActionTriple::new(
        2.0 * vertex_integral(e[2], e[3], alpha1, e)?,
        0.0,
        2.0 * vertex_integral(e[0], e[2], alpha3, e)?,
    );
    let u1 = ((e[0] - e[1]) / (e[0] - e[2])).sqrt();
    let u2 = ((e[1] - e[2]) / (e[1] - e[3])).sqrt();
    let v1 = ((e[0] - e[1]) / (e[0] - e[3])).sqrt();
    let v2 = ((e[0] - e[2]) / (e[0] - e[3])).sqrt();
    Ok(VertexActions {
        a21: a21.scale(rt),
        a22: a22.scale(rt),
        a31: ActionTriple::new(c * u1.asin(), c * u1.acos(), 0.0).scale(rt),
        a12: ActionTriple::new(0.0, c * u2.asin(), c * u2.acos()).scale(rt),
        hh: ActionTriple::new(c * v1.asin(), c * (v2.asin() - v1.asin()), c * v2.acos()).scale(rt),
    })
}

/// (J1, J3) of the hyperbolic-hyperbolic vertex for the normalized
/// parameters e = (0, 1, a, b).
pub fn parameter_action_map(a: f64, b: f64) -> Result<[f64; 2]> {
    if !(1.0 < a && a < b) {
        return Err(Error::Ordering(format!("need 1 < a < b, got a = {a}, b = {b}")));
    }
    Ok([2.0 / PI * (1.0 / b).sqrt().asin(), 2.0 / PI * (a / b).sqrt().acos()])
}

/// An arc in action space with the momentum values it is the image of.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteriorArc {
    pub name: String,
    pub start: ActionTriple,
    pub end: ActionTriple,
    pub values: Vec<IntegralValues>,
    pub points: Vec<ActionTriple>,
}

/// Point of the oblate interior arc at l34 = l (2h = 1), |l| <= sqrt((a-1)/a).
pub fn oblate_arc_point(a: f64, l: f64) -> Result<ActionTriple> {
    let lim = ((a - 1.0) / a).sqrt();
    if l.abs() > lim * (1.0 + 1e-12) {
        return Err(Error::Domain(format!("|l| = {} exceeds {lim}", l.abs())));
    }
    let w = a * (1.0 - l * l);
    let t1 = (1.0 / w.sqrt()).min(1.0);
    let twist = if l == 0.0 { 0.0 } else { l * ((w - 1.0).max(0.0).sqrt() / l).atan() };
    let p = 2.0 / PI * (t1.asin() + twist);
    Ok(ActionTriple::new(p - l.abs(), 1.0 - p, l.abs()))
}

/// Point of the Lame interior line at first action j1 (2h = 1).
pub fn lame_line_point(f: [f64; 3], j1: f64) -> ActionTriple {
    let delta = ((f[0] - f[1]) / (f[0] - f[2])).sqrt();
    let c = 2.0 / PI * (1.0 - j1);
    ActionTriple::new(j1, c * delta.asin(), c * delta.acos())
}

fn sample_arc(
    name: &str,
    n: usize,
    spec: &SystemSpec,
    value: impl Fn(f64) -> IntegralValues,
    point: impl Fn(f64) -> Result<ActionTriple>,
) -> Result<InteriorArc> {
    let ts: Vec<f64> = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
    let values: Vec<IntegralValues> = ts.iter().map(|&t| value(t)).collect();
    let points = ts
        .iter()
        .zip(&values)
        .map(|(&t, v)| point(t).or_else(|_| action_triple(v, spec)))
        .collect::<Result<Vec<_>>>()?;
    Ok(InteriorArc {
        name: name.to_string(),
        start: points[0],
        end: points[n - 1],
        values,
        points,
    })
}

/// Interior arcs of the action map: the images of the interior critical
/// lines. Closed forms are used where known, period integrals elsewhere.
pub fn interior_arcs(spec: &SystemSpec, n: usize) -> Result<Vec<InteriorArc>> {
    let n = n.max(2);
    let h2 = spec.two_h();
    let rt = h2.sqrt();
    let numeric = |_: f64| -> Result<ActionTriple> { Err(Error::Unsupported(String::new())) };
    match spec.params() {
        Params::Ellipsoidal(e) => {
            let anchors = closed_form_vertices(spec)?;
            // the L2 and L3 segments with e2 < t < e3 lie inside the image
            let line = |i: usize| move |t: f64| {
                let s = e[1] + t * (e[2] - e[1]);
                IntegralValues::at_level(h2 * (e[i] + s), h2 * e[i] * s, h2)
            };
            let mut first = sample_arc("gamma1", n, spec, line(1), numeric)?;
            let mut second = sample_arc("gamma2", n, spec, line(2), numeric)?;
            first.start = anchors.a21;
            first.end = anchors.hh;
            second.start = anchors.hh;
            second.end = anchors.a22;
            Ok(vec![first, second])
        }
        Params::Oblate { a } => {
            let lim = ((a - 1.0) / a).sqrt();
            let l_at = |t: f64| lim * (1.0 - t);
            let arc = sample_arc(
                "oblate",
                n,
                spec,
                |t| {
                    let l = l_at(t) * rt;
                    IntegralValues::at_level(l, h2 - l * l, h2)
                },
                |t| Ok(oblate_arc_point(a, l_at(t))?.scale(rt)),
            )?;
            Ok(vec![arc])
        }
        Params::Lame(f) => {
            let arc = sample_arc(
                "lame",
                n,
                spec,
                |t| {
                    let big_f = h2 * (1.0 - t);
                    IntegralValues::at_level(big_f, f[1] * (h2 - big_f), h2)
                },
                // F = 2h (1 - t) gives J1 = sqrt(2h) (1 - sqrt(t))
                |t| Ok(lame_line_point(f, 1.0 - t.sqrt()).scale(rt)),
            )?;
            Ok(vec![arc])
        }
        _ => Ok(Vec::new()),
    }
}

/// The height invariant (2/pi) acos sqrt(1/b) of the prolate system at 2h = 1.
pub fn height_invariant(b: f64) -> f64 {
    2.0 / PI * (1.0 / b).sqrt().acos()
}
