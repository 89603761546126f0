//! Monodromy of the prolate actions around the focus-focus value and the
//! semitoric polygon.
//!
//! The actions are continuous across l = 0 but their gradients jump. At
//! each crossing of l = 0 the one-sided Jacobians D J_A, D J_B with respect
//! to (2h, l, g) give the integer matrix N = D J_A (D J_B)^-1 that
//! continues the basis of side A into side B.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use super::{action_triple, height_invariant, ActionTriple};
use crate::critical::bifurcation_set;
use crate::error::{Error, Result};
use crate::system::{IntegralValues, Params, SystemSpec};

/// Distance from l = 0 at which one-sided gradients are taken.
const SIDE_OFFSET: f64 = 1e-4;
const DIFF_STEP: f64 = 1e-5;
/// Minimal distance of a loop from the bifurcation set.
pub const LOOP_MARGIN: f64 = 1e-3;

/// Closed polyline in the (l, g) value plane at 2h = 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueLoop {
    pub points: Vec<[f64; 2]>,
}

impl ValueLoop {
    /// Counterclockwise circle.
    pub fn circle(center: [f64; 2], radius: f64, n: usize) -> Self {
        let n = n.max(8);
        let points = (0..n)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                [center[0] + radius * t.cos(), center[1] + radius * t.sin()]
            })
            .collect();
        ValueLoop { points }
    }

    /// Counterclockwise axis-aligned rectangle with `per_side` points per side.
    pub fn rectangle(lo: [f64; 2], hi: [f64; 2], per_side: usize) -> Self {
        let n = per_side.max(2);
        let corners = [lo, [hi[0], lo[1]], hi, [lo[0], hi[1]]];
        let mut points = Vec::with_capacity(4 * n);
        for k in 0..4 {
            let (a, b) = (corners[k], corners[(k + 1) % 4]);
            for i in 0..n {
                let t = i as f64 / n as f64;
                points.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
            }
        }
        ValueLoop { points }
    }

    pub fn reversed(&self) -> Self {
        let mut points = self.points.clone();
        points.reverse();
        ValueLoop { points }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    /// g at which the loop crosses l = 0
    pub g: f64,
    /// +1 when moving from l < 0 to l > 0
    pub direction: i8,
    pub raw: [[f64; 3]; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonodromyReport {
    pub matrix: [[i64; 3]; 3],
    pub raw: [[f64; 3]; 3],
    /// max distance of the raw entries from the integer matrix
    pub residual: f64,
    pub crossings: Vec<Crossing>,
}

fn rows(m: &Matrix3<f64>) -> [[f64; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]))
}

fn actions_at(spec: &SystemSpec, two_h: f64, l: f64, g: f64) -> Result<[f64; 3]> {
    Ok(action_triple(&IntegralValues::at_level(l, g, two_h), spec)?.to_array())
}

/// Jacobian of (J1, J2, J3) with respect to (2h, l, g) by central
/// differences; row i is the gradient of J_i.
pub fn action_jacobian(spec: &SystemSpec, l: f64, g: f64) -> Result<Matrix3<f64>> {
    let h2 = spec.two_h();
    let base = [h2, l, g];
    let mut jac = Matrix3::zeros();
    for k in 0..3 {
        let mut plus = base;
        let mut minus = base;
        plus[k] += DIFF_STEP;
        minus[k] -= DIFF_STEP;
        let jp = actions_at(spec, plus[0], plus[1], plus[2])?;
        let jm = actions_at(spec, minus[0], minus[1], minus[2])?;
        for i in 0..3 {
            jac[(i, k)] = (jp[i] - jm[i]) / (2.0 * DIFF_STEP);
        }
    }
    Ok(jac)
}

/// (kappa1, kappa3) with d J_i / dl -> -kappa_i sgn(l) as l -> 0 at fixed g.
pub fn derivative_jump(spec: &SystemSpec, g: f64) -> Result<[f64; 2]> {
    prolate_b(spec)?;
    let plus = action_jacobian(spec, SIDE_OFFSET, g)?;
    let minus = action_jacobian(spec, -SIDE_OFFSET, g)?;
    let kappa = |i: usize| -(plus[(i, 1)] - minus[(i, 1)]) / 2.0;
    Ok([kappa(0), kappa(2)])
}

fn prolate_b(spec: &SystemSpec) -> Result<f64> {
    match spec.params() {
        Params::Prolate { b } => Ok(b),
        _ => Err(Error::Unsupported(format!("monodromy needs the prolate family, got {}", spec.family().name()))),
    }
}

/// Continues the action basis once around the loop. The returned matrix M
/// satisfies J = M J' where J' is the continued basis and J the basis at
/// the start of the loop; loops are rotated to start on the l > 0 side.
pub fn monodromy(spec: &SystemSpec, path: &ValueLoop) -> Result<MonodromyReport> {
    prolate_b(spec)?;
    let n = path.points.len();
    if n < 3 {
        return Err(Error::Domain("loop needs at least three points".into()));
    }
    let set = bifurcation_set(spec);
    for k in 0..n {
        let (a, b) = (path.points[k], path.points[(k + 1) % n]);
        for t in [0.0, 0.5] {
            let p = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
            let d = set.distance(p);
            if d <= LOOP_MARGIN {
                return Err(Error::Domain(format!("loop passes {d:e} from the bifurcation set at {p:?}")));
            }
            action_triple(&IntegralValues::at_level(p[0], p[1], spec.two_h()), spec)?;
        }
    }
    let start = (0..n).find(|&k| path.points[k][0] > 0.0).unwrap_or(0);
    let mut basis = Matrix3::<f64>::identity();
    let mut crossings = Vec::new();
    for step in 0..n {
        let a = path.points[(start + step) % n];
        let b = path.points[(start + step + 1) % n];
        if (a[0] > 0.0) == (b[0] > 0.0) {
            continue;
        }
        let t = a[0] / (a[0] - b[0]);
        let g = a[1] + t * (b[1] - a[1]);
        let from_side = if a[0] > 0.0 { 1.0 } else { -1.0 };
        let da = action_jacobian(spec, from_side * SIDE_OFFSET, g)?;
        let db = action_jacobian(spec, -from_side * SIDE_OFFSET, g)?;
        let inv = db.try_inverse().ok_or_else(|| Error::Singular("action Jacobian at crossing".into()))?;
        let step_matrix = da * inv;
        let rounded = step_matrix.map(f64::round);
        basis *= rounded;
        crossings.push(Crossing { g, direction: if from_side < 0.0 { 1 } else { -1 }, raw: rows(&step_matrix) });
    }
    let raw_product = crossings
        .iter()
        .fold(Matrix3::identity(), |acc, c| acc * Matrix3::from_fn(|i, j| c.raw[i][j]));
    let matrix = basis.try_inverse().ok_or_else(|| Error::Singular("monodromy product".into()))?;
    let raw = raw_product.try_inverse().unwrap_or(matrix);
    let residual = crossings
        .iter()
        .flat_map(|c| c.raw.iter().flatten().map(|x| (x - x.round()).abs()))
        .fold(0.0, f64::max);
    Ok(MonodromyReport {
        matrix: std::array::from_fn(|i| std::array::from_fn(|j| matrix[(i, j)].round() as i64)),
        raw: rows(&raw),
        residual,
        crossings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemitoricPolygon {
    /// vertices in the (l23, J1) plane, counterclockwise
    pub vertices: Vec<[f64; 2]>,
    pub fake_corner: [f64; 2],
    /// image of the focus-focus value
    pub focus_focus: [f64; 2],
    /// closed form (2/pi) acos sqrt(1/b), scaled by sqrt(2h)
    pub height: f64,
    /// J3 at the focus-focus value from the period integral
    pub height_numeric: f64,
}

/// The (l23, J1) projection of the prolate action map with both signs of
/// l23. The height is measured from the focus-focus image up to the fake
/// corner, which equals J3 at the focus-focus value.
pub fn semitoric_polygon(spec: &SystemSpec) -> Result<SemitoricPolygon> {
    let b = prolate_b(spec)?;
    let h2 = spec.two_h();
    let rt = h2.sqrt();
    let ff: ActionTriple = action_triple(&IntegralValues::at_level(0.0, h2, h2), spec)?;
    Ok(SemitoricPolygon {
        vertices: vec![[-rt, 0.0], [rt, 0.0], [0.0, rt]],
        fake_corner: [0.0, rt],
        focus_focus: [0.0, ff.j1],
        height: rt * height_invariant(b),
        height_numeric: ff.j3,
    })
}
