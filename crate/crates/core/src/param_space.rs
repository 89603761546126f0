//! Moduli of separable coordinate systems: normalisation, the involution,
//! the blow-up chart, face classification and epsilon-degenerations.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::so4::{build_integrals, Bivector};
use crate::system::{Family, IntegralValues, Params, SystemSpec};

/// The affine map e' = (e + beta) / alpha.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineRecord {
    pub alpha: f64,
    pub beta: f64,
}

/// Normalises strictly increasing e to (0, 1, a, b).
pub fn normalize(e: [f64; 4]) -> Result<(SystemSpec, AffineRecord)> {
    SystemSpec::ellipsoidal(e)?;
    let alpha = e[1] - e[0];
    let beta = -e[0];
    let n = e.map(|v| (v + beta) / alpha);
    let spec = SystemSpec::ellipsoidal([0.0, 1.0, n[2], n[3]])?;
    Ok((spec, AffineRecord { alpha, beta }))
}

/// Normalised parameters of the reversed quadruple (-e4, -e3, -e2, -e1),
/// with the record of that map (alpha < 0).
pub fn flip(e: [f64; 4]) -> Result<(SystemSpec, AffineRecord)> {
    SystemSpec::ellipsoidal(e)?;
    let rec = AffineRecord { alpha: e[2] - e[3], beta: -e[3] };
    let n = [e[3], e[2], e[1], e[0]].map(|v| (v + rec.beta) / rec.alpha);
    Ok((SystemSpec::ellipsoidal([0.0, 1.0, n[2], n[3]])?, rec))
}

/// Integral values under e -> alpha e + beta at the level carried by `eta`.
pub fn transform_integral_values(eta: IntegralValues, alpha: f64, beta: f64) -> Result<IntegralValues> {
    if alpha == 0.0 {
        return domain("affine map needs alpha != 0");
    }
    let two_h = eta.two_h;
    Ok(IntegralValues::at_level(
        alpha * eta.first + 2.0 * beta * two_h,
        alpha * alpha * eta.second + alpha * beta * eta.first + beta * beta * two_h,
        two_h,
    ))
}

/// The involution induced by reversing the order of the poles.
pub fn involution(a: f64, b: f64) -> Result<(f64, f64)> {
    if a == b {
        return domain("involution undefined for a = b");
    }
    if !(1.0 < a && a < b) {
        return Err(Error::Ordering(format!("1 < a < b required, got a={a}, b={b}")));
    }
    Ok(((b - 1.0) / (b - a), b / (b - a)))
}

/// Distance from the fixed line 1/b + a/b = 1.
pub fn involution_fixed_residual(a: f64, b: f64) -> f64 {
    1.0 / b + a / b - 1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowupChart {
    pub q: f64,
    pub r: f64,
}

impl BlowupChart {
    /// Whether the point lies in the region of equivalence-class representatives.
    pub fn is_representative(&self) -> bool {
        let tol = 1e-12;
        (-tol..=1.0 + tol).contains(&self.q)
            && (-tol..=1.0 + tol).contains(&self.r)
            && self.q >= (1.0 - self.r) / (2.0 - self.r) - tol
    }
}

/// Blow-up chart q = 1/b, r = (a-1)/(b-1). At a = b = 1 the direction r of
/// approach must be supplied.
pub fn blowup(a: f64, b: f64, direction: Option<f64>) -> Result<BlowupChart> {
    if !(1.0 <= a && a <= b) {
        return Err(Error::Ordering(format!("1 <= a <= b required, got a={a}, b={b}")));
    }
    if b == 1.0 {
        return match direction {
            Some(r) if (0.0..=1.0).contains(&r) => Ok(BlowupChart { q: 1.0, r }),
            Some(r) => domain(format!("blow-up direction must lie in [0,1], got {r}")),
            None => domain("a = b = 1 is the blown-up Lame point; a direction is required"),
        };
    }
    Ok(BlowupChart { q: 1.0 / b, r: (a - 1.0) / (b - 1.0) })
}

/// Chart point of the representative of (a, b): the involution is applied
/// when (a, b) lies in the other half.
pub fn representative_blowup(a: f64, b: f64) -> Result<BlowupChart> {
    let c = blowup(a, b, None)?;
    if c.is_representative() || a == 1.0 || a == b {
        return Ok(c);
    }
    let (a2, b2) = involution(a, b)?;
    blowup(a2, b2, None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Face {
    Interior,
    SelfDual,
    Prolate,
    SymmetricProlate,
    Oblate,
    Lame,
    Spherical,
    Cylindrical,
}

/// Classifies a chart point of the representative region from the
/// parameter inequalities.
pub fn classify_face(c: &BlowupChart) -> Face {
    let tol = 1e-12;
    let near = |u: f64, v: f64| (u - v).abs() <= tol;
    let on_fixed = near(c.q, (1.0 - c.r) / (2.0 - c.r));
    match (near(c.r, 0.0), near(c.r, 1.0), near(c.q, 1.0), near(c.q, 0.0)) {
        (true, _, true, _) | (_, true, true, _) => Face::Spherical,
        (_, true, _, true) => Face::Cylindrical,
        (true, _, _, _) if on_fixed => Face::SymmetricProlate,
        (true, _, _, _) => Face::Prolate,
        (_, true, _, _) => Face::Oblate,
        (_, _, true, _) => Face::Lame,
        _ if on_fixed => Face::SelfDual,
        _ => Face::Interior,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Edge {
    EllipsoidalToProlate,
    EllipsoidalToOblate,
    EllipsoidalToLame,
    EllipsoidalToCylindrical,
    LameToSpherical,
    OblateToSpherical,
    OblateToCylindrical,
}

impl Edge {
    pub const ALL: [Edge; 7] = [
        Edge::EllipsoidalToProlate,
        Edge::EllipsoidalToOblate,
        Edge::EllipsoidalToLame,
        Edge::EllipsoidalToCylindrical,
        Edge::LameToSpherical,
        Edge::OblateToSpherical,
        Edge::OblateToCylindrical,
    ];
}

/// An epsilon-perturbed source system and the linear relation giving the
/// target integrals from the source integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Degeneration {
    pub edge: Edge,
    pub epsilon: f64,
    /// Perturbed source system.
    pub source: SystemSpec,
    /// Limiting target system.
    pub target: SystemSpec,
}

impl Degeneration {
    /// Target quantities as the stated combination of source integrals.
    pub fn predicted(&self, l: &Bivector) -> [f64; 2] {
        let two_h = l.norm_sq();
        let (s1, s2) = build_integrals(&self.source);
        let (u, v) = (s1.value(l), s2.value(l));
        let eps = self.epsilon;
        match (self.edge, self.target.params()) {
            (Edge::EllipsoidalToProlate, Params::Prolate { b }) => [(u - v - two_h) / (b - 1.0), v],
            (Edge::EllipsoidalToOblate, Params::Oblate { a }) => {
                [(a * two_h - u + v / a) / (a - 1.0), v / a]
            }
            (Edge::EllipsoidalToLame, _) => [two_h + eps * u, -eps * v],
            (Edge::EllipsoidalToCylindrical, _) => [v, two_h - u + v],
            (Edge::LameToSpherical, _) => {
                let [f1, f2, _] = lame_params(&self.source);
                [(f2 * (two_h - u) - v) / (f2 - f1), u]
            }
            (Edge::OblateToSpherical, _) => [u, v],
            (Edge::OblateToCylindrical, _) => [eps * v, u],
            _ => unreachable!("edge and target built together"),
        }
    }

    /// Target quantities evaluated exactly (squared where the relation is quadratic).
    pub fn exact(&self, l: &Bivector) -> [f64; 2] {
        let (t1, t2) = build_integrals(&self.target);
        let (u, v) = (t1.value(l), t2.value(l));
        match self.edge {
            Edge::EllipsoidalToProlate | Edge::EllipsoidalToOblate => [u * u, v],
            Edge::EllipsoidalToLame | Edge::OblateToSpherical => [u, v],
            Edge::EllipsoidalToCylindrical => [u * u, v * v],
            Edge::LameToSpherical => [u * u, v],
            Edge::OblateToCylindrical => [u * u, v],
        }
    }

    pub fn error(&self, l: &Bivector) -> f64 {
        let (p, e) = (self.predicted(l), self.exact(l));
        (p[0] - e[0]).abs().max((p[1] - e[1]).abs())
    }
}

fn lame_params(spec: &SystemSpec) -> [f64; 3] {
    match spec.params() {
        Params::Lame(f) => f,
        _ => unreachable!("lame source"),
    }
}

/// Builds the epsilon-path from `from` to the family `to`.
pub fn degeneration_path(from: &SystemSpec, to: Family, epsilon: f64) -> Result<Degeneration> {
    if !(epsilon > 0.0) {
        return domain(format!("epsilon must be positive, got {epsilon}"));
    }
    let unreachable = || {
        Err(Error::Domain(format!(
            "{} is not reachable from {} along a degeneration edge",
            to.name(),
            from.family().name()
        )))
    };
    let (edge, source, target) = match (from.params(), to) {
        (Params::Ellipsoidal(e), Family::Prolate) => {
            let (n, _) = normalize(e)?;
            let [_, _, _, b] = n.ellipsoidal_params()?;
            if 1.0 + epsilon >= b {
                return domain("epsilon too large for this b");
            }
            (
                Edge::EllipsoidalToProlate,
                SystemSpec::ellipsoidal([0.0, 1.0, 1.0 + epsilon, b])?,
                SystemSpec::prolate(b)?,
            )
        }
        (Params::Ellipsoidal(e), Family::Oblate) => {
            let (n, _) = normalize(e)?;
            let [_, _, a, _] = n.ellipsoidal_params()?;
            (
                Edge::EllipsoidalToOblate,
                SystemSpec::ellipsoidal([0.0, 1.0, a, a + epsilon])?,
                SystemSpec::oblate(a)?,
            )
        }
        (Params::Ellipsoidal(e), Family::Lame) => {
            let f = [e[1], e[2], e[3]];
            if -1.0 / epsilon >= f[0] {
                return domain("epsilon too large for these poles");
            }
            (
                Edge::EllipsoidalToLame,
                SystemSpec::ellipsoidal([-1.0 / epsilon, f[0], f[1], f[2]])?,
                SystemSpec::lame(f)?,
            )
        }
        (Params::Ellipsoidal(_), Family::Cylindrical) => (
            Edge::EllipsoidalToCylindrical,
            SystemSpec::ellipsoidal([0.0, epsilon, 1.0, 1.0 + epsilon])?,
            SystemSpec::cylindrical(),
        ),
        (Params::Lame([f1, f2, _]), Family::Spherical23) => (
            Edge::LameToSpherical,
            SystemSpec::lame([f1, f2, f2 + epsilon])?,
            SystemSpec::spherical23(),
        ),
        (Params::Oblate { .. }, Family::Spherical23) => (
            Edge::OblateToSpherical,
            SystemSpec::oblate(1.0 + epsilon)?,
            SystemSpec::spherical23(),
        ),
        (Params::Oblate { .. }, Family::Cylindrical) => (
            Edge::OblateToCylindrical,
            SystemSpec::oblate(1.0 / epsilon)?,
            SystemSpec::cylindrical(),
        ),
        _ => return unreachable(),
    };
    Ok(Degeneration { edge, epsilon, source, target })
}

/// The default source family of each edge, used by sweeps over all edges.
pub fn edge_source(edge: Edge) -> SystemSpec {
    match edge {
        Edge::EllipsoidalToProlate
        | Edge::EllipsoidalToOblate
        | Edge::EllipsoidalToLame
        | Edge::EllipsoidalToCylindrical => SystemSpec::ellipsoidal([0.0, 1.0, 2.4, 4.0]).unwrap(),
        Edge::LameToSpherical => SystemSpec::lame([0.4, 1.3, 3.2]).unwrap(),
        Edge::OblateToSpherical | Edge::OblateToCylindrical => SystemSpec::oblate(2.4).unwrap(),
    }
}

pub fn edge_target(edge: Edge) -> Family {
    match edge {
        Edge::EllipsoidalToProlate => Family::Prolate,
        Edge::EllipsoidalToOblate => Family::Oblate,
        Edge::EllipsoidalToLame => Family::Lame,
        Edge::EllipsoidalToCylindrical | Edge::OblateToCylindrical => Family::Cylindrical,
        Edge::LameToSpherical | Edge::OblateToSpherical => Family::Spherical23,
    }
}

/// Uhlenbeck-type check for the oblate edge: epsilon F4 tends to l34^2.
pub fn scaled_uhlenbeck_oblate(a: f64, epsilon: f64, l: &Bivector) -> f64 {
    let e = [0.0, 1.0, a, a + epsilon];
    let f4 = (0..3).map(|j| l.get(3, j).powi(2) / (e[3] - e[j])).sum::<f64>();
    epsilon * f4
}
