//! Critical points, bifurcation diagrams, singularity types, chambers and
//! Uhlenbeck integrals of the reduced systems.

use nalgebra::{Matrix4, SMatrix, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::s2::{s2_integral_observable, S2Bivector};
use crate::separation::{intervals, momentum_relation, turning_roots};
use crate::so4::{build_integrals, ellipsoidal_integrals, join, structure_matrix, Bivector, XYPair, PAIRS};
use crate::system::{IntegralValues, Params, SystemSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SingularityType {
    EllipticElliptic,
    EllipticHyperbolic,
    HyperbolicHyperbolic,
    FocusFocus,
    Rank1Elliptic,
    Rank1Hyperbolic,
    Degenerate,
    SphericalType,
    Regular,
}

impl SingularityType {
    pub fn name(self) -> &'static str {
        match self {
            SingularityType::EllipticElliptic => "elliptic-elliptic",
            SingularityType::EllipticHyperbolic => "elliptic-hyperbolic",
            SingularityType::HyperbolicHyperbolic => "hyperbolic-hyperbolic",
            SingularityType::FocusFocus => "focus-focus",
            SingularityType::Rank1Elliptic => "rank-1 elliptic",
            SingularityType::Rank1Hyperbolic => "rank-1 hyperbolic",
            SingularityType::Degenerate => "degenerate",
            SingularityType::SphericalType => "spherical type",
            SingularityType::Regular => "regular",
        }
    }
}

/// Normal type of a one-parameter family of critical points (or of an
/// equilibrium of a one degree of freedom system).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NormalType {
    Elliptic,
    Hyperbolic,
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveKind {
    Line,
    Parabola,
    ParametricArc,
}

/// Which branch of a family's critical-value set a curve is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveId {
    /// Ellipsoidal line where the pole with this 0-based index is a turning root.
    PoleLine(usize),
    /// Ellipsoidal double-root parabola.
    DoubleRoot,
    ProlateTop,
    ProlateBottom,
    OblateBottom,
    OblateTop,
    OblateArc { negative: bool },
    /// Lame line G = f_i (2h - F), 0-based i.
    LameLine(usize),
    /// Lame segment F = 0.
    LameEdge,
    SphericalBottom,
    SphericalTop,
    /// Cylindrical edge with X1 (x_fixed) or Y1 at +-sqrt(2h)/2.
    CylinderEdge { x_fixed: bool, positive: bool },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcSegment {
    pub range: (f64, f64),
    pub normal: NormalType,
    pub color: Option<String>,
}

/// A curve of critical values t -> c0 + c1 t + c2 t^2 over `range`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationCurve {
    pub id: CurveId,
    pub name: String,
    pub kind: CurveKind,
    pub coefficients: [[f64; 2]; 3],
    pub range: (f64, f64),
    pub color: Option<String>,
    /// Parameters of vertices lying on the curve, ascending, including the ends.
    pub breakpoints: Vec<f64>,
    pub segments: Vec<ArcSegment>,
}

impl BifurcationCurve {
    pub fn point(&self, t: f64) -> [f64; 2] {
        let c = &self.coefficients;
        [c[0][0] + t * (c[1][0] + t * c[2][0]), c[0][1] + t * (c[1][1] + t * c[2][1])]
    }

    /// Closest parameter and distance from v to the curve.
    pub fn closest(&self, v: [f64; 2]) -> (f64, f64) {
        let (t0, t1) = self.range;
        let dist = |t: f64| {
            let p = self.point(t);
            (p[0] - v[0]).hypot(p[1] - v[1])
        };
        let c = &self.coefficients;
        if c[2] == [0.0, 0.0] {
            let d2 = c[1][0] * c[1][0] + c[1][1] * c[1][1];
            let t = if d2 > 0.0 {
                ((v[0] - c[0][0]) * c[1][0] + (v[1] - c[0][1]) * c[1][1]) / d2
            } else {
                t0
            };
            let t = t.clamp(t0, t1);
            return (t, dist(t));
        }
        let n = 400;
        let mut best = (t0, dist(t0));
        for k in 1..=n {
            let t = t0 + (t1 - t0) * k as f64 / n as f64;
            let d = dist(t);
            if d < best.1 {
                best = (t, d);
            }
        }
        // Newton on the squared distance.
        let mut t = best.0;
        for _ in 0..30 {
            let p = self.point(t);
            let dp = [c[1][0] + 2.0 * c[2][0] * t, c[1][1] + 2.0 * c[2][1] * t];
            let r = [p[0] - v[0], p[1] - v[1]];
            let g = r[0] * dp[0] + r[1] * dp[1];
            let h = dp[0] * dp[0] + dp[1] * dp[1] + 2.0 * (r[0] * c[2][0] + r[1] * c[2][1]);
            if h <= 0.0 {
                break;
            }
            let next = (t - g / h).clamp(t0, t1);
            if (next - t).abs() < 1e-16 * (1.0 + t.abs()) {
                t = next;
                break;
            }
            t = next;
        }
        if dist(t) < best.1 {
            best = (t, dist(t));
        }
        best
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub name: String,
    pub value: [f64; 2],
    pub tangency: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationSet {
    pub spec: SystemSpec,
    pub curves: Vec<BifurcationCurve>,
    pub vertices: Vec<Vertex>,
    /// Critical values not on any curve (the prolate focus-focus value).
    pub isolated: Vec<Vertex>,
}

impl BifurcationSet {
    pub fn distance(&self, v: [f64; 2]) -> f64 {
        let curves = self.curves.iter().map(|c| c.closest(v).1);
        let points = self.isolated.iter().map(|p| (p.value[0] - v[0]).hypot(p.value[1] - v[1]));
        curves.chain(points).fold(f64::INFINITY, f64::min)
    }

    pub fn all_vertices(&self) -> impl Iterator<Item = &Vertex> {
        self.vertices.iter().chain(self.isolated.iter())
    }
}

/// Distance tolerance for deciding that a value lies on the bifurcation set.
pub const ON_SET_TOL: f64 = 1e-9;

fn curve(id: CurveId, name: &str, c: [[f64; 2]; 3], range: (f64, f64), color: Option<&str>) -> BifurcationCurve {
    let kind = match id {
        CurveId::OblateArc { .. } => CurveKind::ParametricArc,
        _ if c[2] == [0.0, 0.0] => CurveKind::Line,
        _ => CurveKind::Parabola,
    };
    BifurcationCurve {
        id,
        name: name.to_string(),
        kind,
        coefficients: c,
        range,
        color: color.map(str::to_string),
        breakpoints: vec![],
        segments: vec![],
    }
}

fn vertex(name: &str, value: [f64; 2], tangency: bool) -> Vertex {
    Vertex { name: name.to_string(), value, tangency }
}

/// Curves and vertices without the rank-1 type segmentation.
fn geometry(spec: &SystemSpec) -> BifurcationSet {
    let h2 = spec.two_h();
    let r = h2.sqrt();
    let mut curves = Vec::new();
    let mut vertices = Vec::new();
    let mut isolated = Vec::new();
    match spec.params() {
        Params::Ellipsoidal(e) => {
            let ranges = [(e[1], e[3]), (e[0], e[3]), (e[0], e[3]), (e[0], e[2])];
            for (i, &range) in ranges.iter().enumerate() {
                let c = [[h2 * e[i], 0.0], [h2, h2 * e[i]], [0.0, 0.0]];
                curves.push(curve(CurveId::PoleLine(i), &format!("L{}", i + 1), c, range, None));
            }
            let c = [[0.0, 0.0], [2.0 * h2, 0.0], [0.0, h2]];
            curves.push(curve(CurveId::DoubleRoot, "C", c, (e[1], e[2]), Some("cyan")));
            for &(i, j) in &PAIRS {
                let v = [h2 * (e[i] + e[j]), h2 * e[i] * e[j]];
                vertices.push(vertex(&format!("d{}{}", i + 1, j + 1), v, false));
            }
            for i in [1, 2] {
                vertices.push(vertex(&format!("d{}", i + 1), [2.0 * h2 * e[i], h2 * e[i] * e[i]], true));
            }
        }
        Params::Prolate { b } => {
            curves.push(curve(CurveId::ProlateTop, "P1", [[0.0, b * h2], [1.0, 0.0], [0.0, -b]], (-r, r), Some("green")));
            curves.push(curve(CurveId::ProlateBottom, "P2", [[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]], (-r, r), Some("blue")));
            vertices.push(vertex("p-", [-r, 0.0], false));
            vertices.push(vertex("p+", [r, 0.0], false));
            isolated.push(vertex("ff", [0.0, h2], false));
        }
        Params::Oblate { a } => {
            let lo = ((a - 1.0) / a).sqrt() * r;
            let slope = 2.0 * (a * (a - 1.0) * h2).sqrt();
            curves.push(curve(CurveId::OblateBottom, "O3", [[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]], (-r, r), Some("blue")));
            curves.push(curve(CurveId::OblateTop, "O2", [[0.0, h2], [1.0, 0.0], [0.0, -1.0]], (-r, r), None));
            curves.push(curve(
                CurveId::OblateArc { negative: false },
                "O1+",
                [[0.0, a * h2], [1.0, -slope], [0.0, a - 1.0]],
                (0.0, lo),
                Some("cyan"),
            ));
            curves.push(curve(
                CurveId::OblateArc { negative: true },
                "O1-",
                [[0.0, a * h2], [1.0, slope], [0.0, a - 1.0]],
                (-lo, 0.0),
                Some("cyan"),
            ));
            vertices.push(vertex("o23-", [-r, 0.0], false));
            vertices.push(vertex("o23+", [r, 0.0], false));
            vertices.push(vertex("o12-", [-lo, h2 / a], true));
            vertices.push(vertex("o12+", [lo, h2 / a], true));
            vertices.push(vertex("o11", [0.0, a * h2], false));
        }
        Params::Lame(f) => {
            for (i, &fi) in f.iter().enumerate() {
                let c = [[0.0, fi * h2], [1.0, -fi], [0.0, 0.0]];
                curves.push(curve(CurveId::LameLine(i), &format!("Lm{}", i + 1), c, (0.0, h2), None));
            }
            curves.push(curve(CurveId::LameEdge, "Lm0", [[0.0, 0.0], [0.0, 1.0], [0.0, 0.0]], (f[0] * h2, f[2] * h2), None));
            vertices.push(vertex("T123", [h2, 0.0], false));
            for (i, &fi) in f.iter().enumerate() {
                vertices.push(vertex(&format!("t{}", i + 1), [0.0, fi * h2], false));
            }
        }
        Params::Spherical23 => {
            curves.push(curve(CurveId::SphericalBottom, "C2", [[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]], (-r, r), None));
            curves.push(curve(CurveId::SphericalTop, "C1", [[0.0, h2], [1.0, 0.0], [0.0, -1.0]], (-r, r), None));
            vertices.push(vertex("s-", [-r, 0.0], false));
            vertices.push(vertex("s+", [r, 0.0], false));
            vertices.push(vertex("D23", [0.0, h2], false));
        }
        Params::Cylindrical => {
            for x_fixed in [true, false] {
                for positive in [true, false] {
                    let s = if positive { 1.0 } else { -1.0 };
                    let (c0, c1) = if x_fixed { (s * r, -1.0) } else { (-s * r, 1.0) };
                    let range = if positive { (0.0, r) } else { (-r, 0.0) };
                    let name = format!("{}{}", if x_fixed { "X" } else { "Y" }, if positive { "+" } else { "-" });
                    curves.push(curve(CurveId::CylinderEdge { x_fixed, positive }, &name, [[0.0, c0], [1.0, c1], [0.0, 0.0]], range, None));
                }
            }
            vertices.push(vertex("c1+", [r, 0.0], false));
            vertices.push(vertex("c1-", [-r, 0.0], false));
            vertices.push(vertex("c3+", [0.0, r], false));
            vertices.push(vertex("c3-", [0.0, -r], false));
        }
    }
    for c in curves.iter_mut() {
        let (t0, t1) = c.range;
        let mut bp = vec![t0, t1];
        for v in &vertices {
            let (t, d) = c.closest(v.value);
            if d < ON_SET_TOL * (1.0 + v.value[0].abs() + v.value[1].abs()) && t > t0 && t < t1 {
                bp.push(t);
            }
        }
        bp.sort_by(f64::total_cmp);
        bp.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        c.breakpoints = bp;
    }
    BifurcationSet { spec: *spec, curves, vertices, isolated }
}

fn segment_color(spec: &SystemSpec, id: CurveId, t: f64) -> Option<String> {
    let c = match (spec.params(), id) {
        (Params::Ellipsoidal(e), CurveId::PoleLine(1)) => {
            if t < e[1] {
                "yellow"
            } else if t < e[2] {
                "red"
            } else {
                "grey"
            }
        }
        (Params::Ellipsoidal(e), CurveId::PoleLine(2)) => {
            if t < e[1] {
                "magenta"
            } else if t < e[2] {
                "orange"
            } else {
                "purple"
            }
        }
        (Params::Oblate { a }, CurveId::OblateTop) => {
            if t.abs() >= ((a - 1.0) / a * spec.two_h()).sqrt() {
                "yellow"
            } else {
                "red"
            }
        }
        _ => return None,
    };
    Some(c.to_string())
}

/// Critical values of the family with vertex list and the rank-1 normal
/// type along each arc, obtained by classifying a critical point at the
/// midpoint of every sub-arc between vertices.
pub fn bifurcation_set(spec: &SystemSpec) -> BifurcationSet {
    let mut set = geometry(spec);
    for k in 0..set.curves.len() {
        let c = set.curves[k].clone();
        let mut segments: Vec<ArcSegment> = Vec::new();
        for w in c.breakpoints.windows(2) {
            let t = 0.5 * (w[0] + w[1]);
            let v = c.point(t);
            let pieces = curve_pieces(spec, c.id, v);
            let normal = pieces
                .iter()
                .flat_map(|p| p.sample(7))
                .map(|l| classify(&l, spec))
                .map(|s| match s {
                    SingularityType::Rank1Elliptic => NormalType::Elliptic,
                    SingularityType::Rank1Hyperbolic => NormalType::Hyperbolic,
                    _ => NormalType::Degenerate,
                })
                .next()
                .unwrap_or(NormalType::Degenerate);
            let color = segment_color(spec, c.id, t).or_else(|| c.color.clone());
            match segments.last_mut() {
                Some(last) if last.normal == normal && last.color == color => last.range.1 = w[1],
                _ => segments.push(ArcSegment { range: (w[0], w[1]), normal, color }),
            }
        }
        set.curves[k].segments = segments;
    }
    set
}

/// An explicitly parametrized component of a set of critical points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CriticalPiece {
    Point(Bivector),
    /// center + radius (cos t e_a + sin t e_b) in the two slots.
    Circle { center: Bivector, slots: [usize; 2], radius: f64 },
    /// center + radius (polar angles) in the three slots.
    Sphere { center: Bivector, slots: [usize; 3], radius: f64 },
    /// One sheet of {sum m_k^2 = radius_sq, sum w_k m_k^2 = level} in the
    /// three slots (an Euler-top orbit).
    EulerCurve { slots: [usize; 3], weights: [f64; 3], radius_sq: f64, level: f64, sheet: f64 },
    /// Critical circle of a double root lambda for poles e (coincident
    /// poles allowed), with the sign of a1 and the upper/lower sign choice.
    PencilCircle { e: [f64; 4], lambda: f64, two_h: f64, a_sign: f64, l_sign: f64 },
    /// One so(3) factor fixed at (fixed, 0, 0); the other is
    /// (first, radius cos t, radius sin t).
    SplitCircle { x_fixed: bool, fixed: f64, first: f64, radius: f64 },
}

fn place(slots: &[usize], values: &[f64], base: Bivector) -> Bivector {
    let mut a = base.to_array();
    for (&s, &v) in slots.iter().zip(values) {
        a[s] = v;
    }
    Bivector::from_array(a)
}

impl CriticalPiece {
    pub fn dimension(&self) -> usize {
        match self {
            CriticalPiece::Point(_) => 0,
            CriticalPiece::Sphere { .. } => 2,
            _ => 1,
        }
    }

    /// Point at parameters (t, u); u is used only by spheres.
    pub fn at(&self, t: f64, u: f64) -> Bivector {
        match *self {
            CriticalPiece::Point(l) => l,
            CriticalPiece::Circle { center, slots, radius } => {
                let c = center.to_array();
                place(&slots, &[c[slots[0]] + radius * t.cos(), c[slots[1]] + radius * t.sin()], center)
            }
            CriticalPiece::Sphere { center, slots, radius } => {
                let c = center.to_array();
                let v = [u.sin() * t.cos(), u.sin() * t.sin(), u.cos()];
                place(&slots, &[c[slots[0]] + radius * v[0], c[slots[1]] + radius * v[1], c[slots[2]] + radius * v[2]], center)
            }
            CriticalPiece::EulerCurve { slots, weights, radius_sq, level, sheet } => {
                let m = euler_orbit(weights, radius_sq, level, sheet, t);
                place(&slots, &m, Bivector::default())
            }
            CriticalPiece::PencilCircle { e, lambda, two_h, a_sign, l_sign } => {
                pencil_point(e, lambda, two_h, a_sign, l_sign, t)
            }
            CriticalPiece::SplitCircle { x_fixed, fixed, first, radius } => {
                let a = Vector3::new(fixed, 0.0, 0.0);
                let b = Vector3::new(first, radius * t.cos(), radius * t.sin());
                let (x, y) = if x_fixed { (a, b) } else { (b, a) };
                join(&XYPair { x, y })
            }
        }
    }

    /// n samples along curves, n x n on spheres, one for points.
    pub fn sample(&self, n: usize) -> Vec<Bivector> {
        let n = n.max(1);
        let tau = std::f64::consts::TAU;
        match self.dimension() {
            0 => vec![self.at(0.0, 0.0)],
            1 => (0..n).map(|k| self.at(tau * (k as f64 + 0.25) / n as f64, 0.0)).collect(),
            _ => (0..n)
                .flat_map(|i| {
                    (0..n).map(move |j| {
                        let t = tau * (i as f64 + 0.25) / n as f64;
                        let u = std::f64::consts::PI * (j as f64 + 0.5) / n as f64;
                        (t, u)
                    })
                })
                .map(|(t, u)| self.at(t, u))
                .collect(),
        }
    }
}

fn euler_orbit(w: [f64; 3], r2: f64, level: f64, sheet: f64, t: f64) -> [f64; 3] {
    let mut idx = [0, 1, 2];
    idx.sort_by(|&i, &j| w[i].total_cmp(&w[j]));
    let [ia, ib, ic] = idx;
    let (wa, wb, wc) = (w[ia], w[ib], w[ic]);
    let mut m = [0.0; 3];
    if level >= wb * r2 {
        let a2 = ((wc * r2 - level) / (wc - wa)).max(0.0);
        let b2 = ((wc * r2 - level) / (wc - wb)).max(0.0);
        m[ia] = a2.sqrt() * t.cos();
        m[ib] = b2.sqrt() * t.sin();
        m[ic] = sheet * (r2 - m[ia] * m[ia] - m[ib] * m[ib]).max(0.0).sqrt();
    } else {
        let a2 = ((level - wa * r2) / (wc - wa)).max(0.0);
        let b2 = ((level - wa * r2) / (wb - wa)).max(0.0);
        m[ic] = a2.sqrt() * t.cos();
        m[ib] = b2.sqrt() * t.sin();
        m[ia] = sheet * (r2 - m[ic] * m[ic] - m[ib] * m[ib]).max(0.0).sqrt();
    }
    m
}

fn pencil_point(e: [f64; 4], lambda: f64, two_h: f64, a_sign: f64, l_sign: f64, t: f64) -> Bivector {
    let big2 = (2.0 * two_h / ((e[2] - e[1]) * (e[3] - e[0]))).sqrt();
    let big3 = (2.0 * two_h / ((e[3] - e[1]) * (e[2] - e[0]))).sqrt();
    let (b2, b3) = (big2 * t.cos(), big3 * t.sin());
    let a1 = a_sign * b2.hypot(b3);
    let q1 = (lambda - e[0]).max(0.0).sqrt();
    let q2 = (lambda - e[1]).max(0.0).sqrt();
    let q3 = (e[2] - lambda).max(0.0).sqrt();
    let q4 = (e[3] - lambda).max(0.0).sqrt();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Bivector::new(
        s * a1 * q1 * q2,
        -s * l_sign * b2 * q1 * q3,
        -s * b3 * q1 * q4,
        -s * l_sign * b3 * q2 * q3,
        s * b2 * q2 * q4,
        -s * l_sign * a1 * q3 * q4,
    )
}

fn pencil_pieces(e: [f64; 4], lambda: f64, two_h: f64) -> Vec<CriticalPiece> {
    let mut out = Vec::new();
    for a_sign in [1.0, -1.0] {
        for l_sign in [1.0, -1.0] {
            out.push(CriticalPiece::PencilCircle { e, lambda, two_h, a_sign, l_sign });
        }
    }
    out
}

fn circle_at(slot: usize, value: f64, slots: [usize; 2], radius_sq: f64) -> CriticalPiece {
    let mut c = [0.0; 6];
    c[slot] = value;
    CriticalPiece::Circle { center: Bivector::from_array(c), slots, radius: radius_sq.max(0.0).sqrt() }
}

fn curve_pieces(spec: &SystemSpec, id: CurveId, v: [f64; 2]) -> Vec<CriticalPiece> {
    let h2 = spec.two_h();
    match (spec.params(), id) {
        (Params::Ellipsoidal(e), CurveId::PoleLine(i)) => {
            let (w1, _) = ellipsoidal_integrals(e);
            let slots: Vec<usize> = (0..6).filter(|&k| PAIRS[k].0 != i && PAIRS[k].1 != i).collect();
            let slots = [slots[0], slots[1], slots[2]];
            let weights = slots.map(|k| w1.q[(k, k)]);
            [1.0, -1.0]
                .iter()
                .map(|&sheet| CriticalPiece::EulerCurve { slots, weights, radius_sq: h2, level: v[0], sheet })
                .collect()
        }
        (Params::Ellipsoidal(e), CurveId::DoubleRoot) => pencil_pieces(e, v[0] / (2.0 * h2), h2),
        (Params::Prolate { .. }, CurveId::ProlateTop) => vec![circle_at(3, v[0], [0, 1], h2 - v[0] * v[0])],
        (Params::Prolate { .. }, CurveId::ProlateBottom) => vec![circle_at(3, v[0], [4, 5], h2 - v[0] * v[0])],
        (Params::Oblate { .. }, CurveId::OblateBottom) => vec![circle_at(5, v[0], [3, 4], h2 - v[0] * v[0])],
        (Params::Oblate { .. }, CurveId::OblateTop) => vec![circle_at(5, v[0], [1, 2], h2 - v[0] * v[0])],
        (Params::Oblate { a }, CurveId::OblateArc { .. }) => {
            let lambda = (a * v[1].max(0.0) / h2).sqrt();
            pencil_pieces([0.0, 1.0, a, a], lambda, h2)
                .into_iter()
                .filter(|p| match p {
                    CriticalPiece::PencilCircle { a_sign, l_sign, .. } => v[0] == 0.0 || -a_sign * l_sign == v[0].signum(),
                    _ => false,
                })
                .collect()
        }
        (Params::Lame(_), CurveId::LameLine(i)) => {
            let f = v[0];
            let axis = [5, 4, 3][i];
            let others: Vec<usize> = (0..3).filter(|&k| k != i).collect();
            let m = (h2 - f).max(0.0).sqrt();
            [m, -m].iter().map(|&s| circle_at(axis, s, [others[0], others[1]], f)).collect()
        }
        (Params::Lame(fs), CurveId::LameEdge) => [1.0, -1.0]
            .iter()
            .map(|&sheet| CriticalPiece::EulerCurve { slots: [5, 4, 3], weights: fs, radius_sq: h2, level: v[1], sheet })
            .collect(),
        (Params::Spherical23, CurveId::SphericalBottom) => vec![circle_at(5, v[0], [3, 4], h2 - v[0] * v[0])],
        (Params::Spherical23, CurveId::SphericalTop) => vec![circle_at(5, v[0], [1, 2], h2 - v[0] * v[0])],
        (Params::Cylindrical, CurveId::CylinderEdge { x_fixed, positive }) => {
            let half = 0.5 * h2.sqrt();
            let fixed = if positive { half } else { -half };
            // first component of the free factor: (l12 - l34)/2 or (l12 + l34)/2
            let first = if x_fixed { 0.5 * (v[0] - v[1]) } else { 0.5 * (v[0] + v[1]) };
            let radius = (half * half - first * first).max(0.0).sqrt();
            vec![CriticalPiece::SplitCircle { x_fixed, fixed, first, radius }]
        }
        _ => vec![],
    }
}

/// Critical points over a critical value, with their parametrization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalSet {
    pub value: [f64; 2],
    pub pieces: Vec<CriticalPiece>,
}

impl CriticalSet {
    pub fn sample(&self, n: usize) -> Vec<Bivector> {
        self.pieces.iter().flat_map(|p| p.sample(n)).collect()
    }
}

/// Critical points in the fibre of a critical value.
pub fn critical_points(spec: &SystemSpec, value: &IntegralValues) -> Result<CriticalSet> {
    let spec = spec.with_level(value.two_h)?;
    let set = geometry(&spec);
    let v = [value.first, value.second];
    let tol = ON_SET_TOL * (1.0 + v[0].abs() + v[1].abs());
    let distance = set.distance(v);
    if distance > tol {
        return Err(Error::OffBifurcationSet { distance });
    }
    let h2 = spec.two_h();
    let near = |p: [f64; 2]| (p[0] - v[0]).hypot(p[1] - v[1]) <= tol;
    let unit_sphere = CriticalPiece::Sphere { center: Bivector::default(), slots: [0, 1, 2], radius: h2.sqrt() };
    match spec.params() {
        Params::Prolate { .. } if near([0.0, h2]) => {
            let p = Bivector::new(0.0, 0.0, h2.sqrt(), 0.0, 0.0, 0.0);
            return Ok(CriticalSet { value: v, pieces: vec![CriticalPiece::Point(p), CriticalPiece::Point(p.scale(-1.0))] });
        }
        Params::Lame(_) if near([h2, 0.0]) => return Ok(CriticalSet { value: v, pieces: vec![unit_sphere] }),
        Params::Spherical23 if near([0.0, h2]) => return Ok(CriticalSet { value: v, pieces: vec![unit_sphere] }),
        _ => {}
    }
    let mut pieces = Vec::new();
    for c in &set.curves {
        if c.closest(v).1 <= tol {
            pieces.extend(curve_pieces(&spec, c.id, v));
        }
    }
    // a separatrix orbit only reaches its equilibria in the limit, so list them
    let mut equilibria = Vec::new();
    for p in &pieces {
        if let CriticalPiece::EulerCurve { slots, weights, radius_sq, level, sheet } = *p {
            let (lo, hi) = (weights.iter().copied().fold(f64::INFINITY, f64::min), weights.iter().copied().fold(f64::NEG_INFINITY, f64::max));
            for k in 0..3 {
                let w = weights[k];
                let on_level = (w * radius_sq - level).abs() <= tol * (1.0 + level.abs());
                if on_level && w > lo && w < hi {
                    let mut m = [0.0; 3];
                    m[k] = sheet * radius_sq.sqrt();
                    let point = CriticalPiece::Point(place(&slots, &m, Bivector::default()));
                    if !equilibria.contains(&point) {
                        equilibria.push(point);
                    }
                }
            }
        }
    }
    pieces.extend(equilibria);
    Ok(CriticalSet { value: v, pieces })
}

/// Rank of the momentum-map differential restricted to the leaf, with the
/// singular values of [X_f, X_g] and the scale they were judged against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankReport {
    pub rank: usize,
    pub singular_values: [f64; 2],
    pub scale: f64,
}

const RANK_TOL: f64 = 1e-8;

pub fn differential_rank(l: &Bivector, spec: &SystemSpec) -> RankReport {
    let (f, g) = build_integrals(spec);
    let b = structure_matrix(l);
    let (gf, gg) = (f.gradient(l), g.gradient(l));
    let m = SMatrix::<f64, 6, 2>::from_columns(&[b * gf, b * gg]);
    let sv = m.singular_values();
    let (hi, lo) = if sv[0] >= sv[1] { (sv[0], sv[1]) } else { (sv[1], sv[0]) };
    let scale = l.norm_sq().sqrt() * (gf.norm() + gg.norm()) + f64::MIN_POSITIVE;
    let rank = [hi, lo].iter().filter(|&&s| s > RANK_TOL * scale).count();
    RankReport { rank, singular_values: [hi, lo], scale }
}

/// Relative size of the smallest singular value of [X_f, X_g]; zero on
/// critical points.
pub fn kernel_residual(l: &Bivector, spec: &SystemSpec) -> f64 {
    let r = differential_rank(l, spec);
    r.singular_values[1] / r.scale
}

/// Leaf-restricted linearization of the vector field of a f + b g, with
/// (a, b) generic at rank 0 and the kernel combination at rank 1.
pub fn leaf_linearization(l: &Bivector, spec: &SystemSpec) -> (RankReport, Matrix4<f64>) {
    let (f, g) = build_integrals(spec);
    let report = differential_rank(l, spec);
    let b = structure_matrix(l);
    let (alpha, beta) = if report.rank == 0 {
        (1.0, std::f64::consts::SQRT_2 - 0.3)
    } else {
        let m = SMatrix::<f64, 6, 2>::from_columns(&[b * f.gradient(l), b * g.gradient(l)]);
        let svd = m.svd(false, true);
        let vt = svd.v_t.expect("requested");
        let k = if svd.singular_values[0] < svd.singular_values[1] { 0 } else { 1 };
        (vt[(k, 0)], vt[(k, 1)])
    };
    let jac = f.combine(alpha, &g, beta).vector_field_jacobian(l);
    let svd = b.svd(true, false);
    let u = svd.u.expect("requested");
    let mut order: Vec<usize> = (0..6).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let t = SMatrix::<f64, 6, 4>::from_fn(|r, c| u[(r, order[c])]);
    (report, t.transpose() * jac * t)
}

/// Singularity type from the eigenvalues of the leaf-restricted
/// linearization and the rank of the momentum-map differential.
pub fn classify(l: &Bivector, spec: &SystemSpec) -> SingularityType {
    let (report, a) = leaf_linearization(l, spec);
    if report.rank == 2 {
        return SingularityType::Regular;
    }
    let s = a.norm_squared();
    if s == 0.0 {
        return SingularityType::Degenerate;
    }
    // eigenvalues come in pairs +-mu; z = mu^2 solves z^2 - p z + q = 0
    let p = 0.5 * (a * a).trace();
    let q = a.determinant();
    let disc = p * p - 4.0 * q;
    let zero = |z: f64| z.abs() < 1e-8 * s;
    // a nilpotent linearization is of spherical type when the fibre carries
    // a 2-sphere of critical points through L
    let nilpotent_type = || {
        let sv = a.singular_values();
        let max = sv.max();
        let rank = sv.iter().filter(|&&x| x > 1e-8 * max).count();
        let values = crate::so4::integral_values(spec, l);
        let on_sphere = critical_points(spec, &values)
            .map(|set| set.pieces.iter().any(|p| p.dimension() == 2))
            .unwrap_or(false);
        if rank >= 2 && on_sphere {
            SingularityType::SphericalType
        } else {
            SingularityType::Degenerate
        }
    };
    if disc < -1e-12 * s * s {
        return if report.rank == 0 { SingularityType::FocusFocus } else { SingularityType::Degenerate };
    }
    let root = disc.max(0.0).sqrt();
    let z = [0.5 * (p - root), 0.5 * (p + root)];
    let zeros = z.iter().filter(|&&x| zero(x)).count();
    match (report.rank, zeros) {
        (_, 2) => nilpotent_type(),
        (0, 0) => match z.iter().filter(|&&x| x < 0.0).count() {
            2 => SingularityType::EllipticElliptic,
            1 => SingularityType::EllipticHyperbolic,
            _ => SingularityType::HyperbolicHyperbolic,
        },
        (1, 1) => {
            let other = if zero(z[0]) { z[1] } else { z[0] };
            if other < 0.0 {
                SingularityType::Rank1Elliptic
            } else {
                SingularityType::Rank1Hyperbolic
            }
        }
        _ => SingularityType::Degenerate,
    }
}

/// Location of a value relative to the momentum-map image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chamber {
    Outside,
    /// Interval indices (1-based) of the turning roots r1, r2 among the
    /// family's pole intervals, and the number of tori in the fibre.
    Inside { code: (u8, u8), multiplicity: u8 },
}

/// True when every separated coordinate has an allowed region.
pub fn in_image(values: &IntegralValues, spec: &SystemSpec) -> bool {
    let Ok(spec) = spec.with_level(values.two_h) else {
        return false;
    };
    if !(values.first.is_finite() && values.second.is_finite()) {
        return false;
    }
    for (k, (lo, hi)) in intervals(&spec).into_iter().enumerate() {
        let Ok(rel) = momentum_relation(k, values, &spec) else {
            return false;
        };
        let tol = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
        let roots = rel.numerator_roots();
        let mut cuts: Vec<f64> = roots.iter().copied().filter(|r| *r > lo && *r < hi).collect();
        cuts.push(lo);
        cuts.push(hi);
        cuts.sort_by(f64::total_cmp);
        let allowed = cuts.windows(2).any(|w| w[1] - w[0] > tol && rel.eval(0.5 * (w[0] + w[1])) >= 0.0);
        // a root absorbed by a higher-order pole leaves a pole, not a turning point
        let count = |set: &[f64], r: f64| set.iter().filter(|x| (*x - r).abs() <= tol).count();
        let boundary = roots
            .iter()
            .any(|&r| r >= lo - tol && r <= hi + tol && count(&roots, r) >= count(&rel.poles, r));
        let [c0, c1, c2] = rel.numerator;
        let vanishing = c0 == 0.0 && c1 == 0.0 && c2 == 0.0;
        if !(allowed || boundary || vanishing) {
            return false;
        }
    }
    true
}

fn interval_index(r: f64, e: [f64; 4]) -> u8 {
    if r < e[1] {
        1
    } else if r < e[2] {
        2
    } else {
        3
    }
}

/// Chamber code and torus multiplicity of a value.
pub fn chamber(values: &IntegralValues, spec: &SystemSpec) -> Chamber {
    if !in_image(values, spec) {
        return Chamber::Outside;
    }
    let Ok(roots) = turning_roots(values, spec) else {
        return Chamber::Outside;
    };
    let code = match spec.params() {
        Params::Ellipsoidal(_) | Params::Prolate { .. } | Params::Oblate { .. } => {
            let e = spec.pole_spectrum().expect("pole families");
            (interval_index(roots.r1, e), interval_index(roots.r2, e))
        }
        Params::Lame(f) => (1, if roots.r2 < f[1] { 1 } else { 2 }),
        Params::Spherical23 | Params::Cylindrical => (1, 1),
    };
    let multiplicity = match spec.params() {
        Params::Ellipsoidal(_) if code == (2, 2) => 4,
        Params::Ellipsoidal(_) => 2,
        Params::Oblate { .. } if code == (2, 2) => 2,
        _ => 1,
    };
    Chamber::Inside { code, multiplicity }
}

/// Uhlenbeck integrals F_i = sum_j l_ij^2 / (e_i - e_j) for poles e.
pub fn uhlenbeck_poles(l: &Bivector, e: [f64; 4]) -> Result<[f64; 4]> {
    let mut out = [0.0; 4];
    for (i, fi) in out.iter_mut().enumerate() {
        for j in (0..4).filter(|&j| j != i) {
            let d = e[i] - e[j];
            if d == 0.0 {
                return domain(format!("coincident poles e{} = e{}", i + 1, j + 1));
            }
            *fi += l.get(i, j).powi(2) / d;
        }
    }
    Ok(out)
}

/// Uhlenbeck integrals of the family. Degenerate families return the
/// limits with divergent members rescaled by the small parameter.
pub fn uhlenbeck(l: &Bivector, spec: &SystemSpec) -> Result<[f64; 4]> {
    let h2 = l.norm_sq();
    let (u, v) = {
        let (f, g) = build_integrals(spec);
        (f.value(l), g.value(l))
    };
    match spec.params() {
        Params::Ellipsoidal(e) => uhlenbeck_poles(l, e),
        Params::Prolate { b } => Ok([
            -v / b,
            -l.l23 * l.l23,
            l.l23 * l.l23,
            l.l14 * l.l14 / b + (l.l24 * l.l24 + l.l34 * l.l34) / (b - 1.0),
        ]),
        Params::Oblate { a } => Ok([-v / a, (v + u * u - h2) / (a - 1.0), -u * u, u * u]),
        Params::Lame([f1, f2, f3]) => {
            let (a, b, c) = (l.l23 * l.l23, l.l24 * l.l24, l.l34 * l.l34);
            Ok([-u, a / (f1 - f2) + b / (f1 - f3), a / (f2 - f1) + c / (f2 - f3), b / (f3 - f1) + c / (f3 - f2)])
        }
        Params::Spherical23 | Params::Cylindrical => {
            Err(Error::Unsupported(format!("no Uhlenbeck limit for the {} family", spec.family().name())))
        }
    }
}

/// A critical value of an S^2 system with its critical points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct S2CriticalValue {
    pub value: f64,
    pub points: Vec<S2Bivector>,
    pub normal: NormalType,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct S2Bifurcation {
    pub segment: (f64, f64),
    pub critical: Vec<S2CriticalValue>,
}

/// Normal type of an equilibrium of the S^2 system with integral weights w
/// on (l12, l13, l23), from the determinant of the tangent-plane
/// linearization.
pub fn s2_normal_type(l: &S2Bivector, w: [f64; 3]) -> NormalType {
    let (jac, t) = s2_integral_observable(w).tangent_linearization(l);
    let a = t.transpose() * jac * t;
    let det = a.determinant();
    let s = a.norm_squared();
    if det.abs() <= 1e-10 * s.max(f64::MIN_POSITIVE) {
        NormalType::Degenerate
    } else if det > 0.0 {
        NormalType::Elliptic
    } else {
        NormalType::Hyperbolic
    }
}

/// Momentum-map segment and critical values of the elliptic S^2 system.
pub fn s2_bifurcation(e: [f64; 3]) -> Result<S2Bifurcation> {
    if !(e[0] < e[1] && e[1] < e[2]) {
        return Err(Error::Ordering(format!("need e1 < e2 < e3, got {e:?}")));
    }
    let w = [e[2], e[1], e[0]];
    let axis = |k: usize| {
        let mut a = [0.0; 3];
        a[k] = 1.0;
        let p = S2Bivector::from_array(a);
        vec![p, p.scale(-1.0)]
    };
    let critical = [(e[0], 2), (e[1], 1), (e[2], 0)]
        .into_iter()
        .map(|(value, k)| {
            let points = axis(k);
            let normal = s2_normal_type(&points[0], w);
            S2CriticalValue { value, points, normal }
        })
        .collect();
    Ok(S2Bifurcation { segment: (e[0], e[2]), critical })
}

/// The spherical-coordinate S^2 system with integral l23^2.
pub fn s2_spherical_bifurcation() -> S2Bifurcation {
    let w = [0.0, 0.0, 1.0];
    let poles = vec![S2Bivector::new(0.0, 0.0, 1.0), S2Bivector::new(0.0, 0.0, -1.0)];
    let equator = S2Bivector::new(1.0, 0.0, 0.0);
    S2Bifurcation {
        segment: (0.0, 1.0),
        critical: vec![
            S2CriticalValue { value: 0.0, points: vec![equator], normal: s2_normal_type(&equator, w) },
            S2CriticalValue { value: 1.0, normal: s2_normal_type(&poles[0], w), points: poles },
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec1258() -> SystemSpec {
        SystemSpec::ellipsoidal([1.0, 2.0, 5.0, 8.0]).unwrap()
    }

    #[test]
    fn ellipsoidal_vertices() {
        let set = bifurcation_set(&spec1258());
        let got: Vec<[f64; 2]> = set.vertices.iter().map(|v| v.value).collect();
        let want = [[3.0, 2.0], [6.0, 5.0], [9.0, 8.0], [7.0, 10.0], [10.0, 16.0], [13.0, 40.0], [4.0, 4.0], [10.0, 25.0]];
        assert_eq!(got, want);
        for v in &set.vertices {
            assert!(set.distance(v.value) < 1e-12, "{}", v.name);
        }
    }

    #[test]
    fn ellipsoidal_arc_colors_and_types() {
        let set = bifurcation_set(&spec1258());
        let l2 = &set.curves[1];
        let kinds: Vec<(NormalType, Option<&str>)> = l2.segments.iter().map(|s| (s.normal, s.color.as_deref())).collect();
        assert_eq!(
            kinds,
            vec![
                (NormalType::Elliptic, Some("yellow")),
                (NormalType::Hyperbolic, Some("red")),
                (NormalType::Hyperbolic, Some("grey")),
            ]
        );
        for k in [0, 3, 4] {
            assert!(set.curves[k].segments.iter().all(|s| s.normal == NormalType::Elliptic), "{}", set.curves[k].name);
        }
    }

    #[test]
    fn line_l1_points() {
        let spec = spec1258();
        let v = IntegralValues::new(1.0 + 4.0, 1.0 * 4.0);
        let set = critical_points(&spec, &v).unwrap();
        let pts = set.sample(16);
        assert!(!pts.is_empty());
        for l in pts {
            assert_eq!([l.l12, l.l13, l.l14], [0.0; 3]);
            assert!((l.norm_sq() - 1.0).abs() < 1e-12);
            assert!(kernel_residual(&l, &spec) < 1e-10);
            let iv = crate::so4::integral_values(&spec, &l);
            assert!((iv.first - 5.0).abs() < 1e-12 && (iv.second - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn parabola_points_are_critical() {
        let spec = spec1258();
        for lambda in [2.0, 2.7, 3.5, 4.9, 5.0] {
            let v = IntegralValues::new(2.0 * lambda, lambda * lambda);
            let set = critical_points(&spec, &v).unwrap();
            for l in set.sample(12) {
                assert!(kernel_residual(&l, &spec) < 1e-10, "lambda {lambda}");
                let (c1, c2) = crate::so4::casimirs(&l);
                assert!((c1 - 1.0).abs() < 1e-12 && c2.abs() < 1e-12);
                let iv = crate::so4::integral_values(&spec, &l);
                assert!((iv.first - v.first).abs() < 1e-12 && (iv.second - v.second).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn off_set_rejected() {
        let err = critical_points(&spec1258(), &IntegralValues::new(5.0, 5.0)).unwrap_err();
        assert!(matches!(err, Error::OffBifurcationSet { .. }));
    }

    #[test]
    fn vertex_table() {
        let spec = spec1258();
        let cases = [
            ([0, 1], SingularityType::EllipticElliptic),
            ([0, 3], SingularityType::EllipticElliptic),
            ([2, 3], SingularityType::EllipticElliptic),
            ([0, 2], SingularityType::EllipticHyperbolic),
            ([1, 3], SingularityType::EllipticHyperbolic),
            ([1, 2], SingularityType::HyperbolicHyperbolic),
        ];
        for ([i, j], want) in cases {
            // the critical point of d_ij is the unit bivector of the complementary pair
            let (p, q) = crate::so4::complement(i, j);
            let (slot, _) = crate::so4::pair_index(p, q);
            assert_eq!(classify(&Bivector::basis(slot), &spec), want, "d{}{}", i + 1, j + 1);
        }
        let e: [f64; 4] = [1.0, 2.0, 5.0, 8.0];
        let d2 = Bivector::new(0.0, 0.0, ((e[1] - e[0]) / (e[2] - e[0])).sqrt(), 0.0, 0.0, ((e[2] - e[1]) / (e[2] - e[0])).sqrt());
        assert_eq!(classify(&d2, &spec), SingularityType::Degenerate);
    }

    #[test]
    fn family_special_points() {
        let pro = SystemSpec::prolate(2.4).unwrap();
        let ff = critical_points(&pro, &IntegralValues::new(0.0, 1.0)).unwrap();
        let pts = ff.sample(4);
        assert_eq!(pts.len(), 2);
        for l in &pts {
            assert_eq!(l.l14.abs(), 1.0);
            assert_eq!(classify(l, &pro), SingularityType::FocusFocus);
        }
        let lame = SystemSpec::lame([0.4, 1.3, 3.2]).unwrap();
        assert_eq!(classify(&Bivector::new(0.6, 0.8, 0.0, 0.0, 0.0, 0.0), &lame), SingularityType::SphericalType);
        let sph = SystemSpec::spherical23();
        assert_eq!(classify(&Bivector::new(0.6, 0.0, 0.8, 0.0, 0.0, 0.0), &sph), SingularityType::SphericalType);
        let a: f64 = 2.4;
        let obl = SystemSpec::oblate(a).unwrap();
        let o12 = Bivector::new(0.0, (1.0 / a).sqrt(), 0.0, 0.0, 0.0, ((a - 1.0) / a).sqrt());
        assert_eq!(classify(&o12, &obl), SingularityType::Degenerate);
    }

    #[test]
    fn all_family_curves_are_critical() {
        let specs = [
            spec1258(),
            SystemSpec::prolate(2.4).unwrap(),
            SystemSpec::oblate(2.4).unwrap(),
            SystemSpec::lame([0.4, 1.3, 3.2]).unwrap(),
            SystemSpec::spherical23(),
            SystemSpec::cylindrical(),
        ];
        for spec in specs {
            let set = geometry(&spec);
            for c in &set.curves {
                for k in 0..=10 {
                    let t = c.range.0 + (c.range.1 - c.range.0) * k as f64 / 10.0;
                    let v = c.point(t);
                    let cs = critical_points(&spec, &IntegralValues::new(v[0], v[1])).unwrap();
                    assert!(!cs.pieces.is_empty(), "{} at {t}", c.name);
                    for l in cs.sample(6) {
                        assert!(kernel_residual(&l, &spec) < 1e-10, "{} {} at {t}", spec.family().name(), c.name);
                        let (c1, c2) = crate::so4::casimirs(&l);
                        assert!((c1 - 1.0).abs() < 1e-12 && c2.abs() < 1e-12, "{} {}", spec.family().name(), c.name);
                        let iv = crate::so4::integral_values(&spec, &l);
                        assert!((iv.first - v[0]).abs() < 1e-10 && (iv.second - v[1]).abs() < 1e-10, "{} {} at {t}", spec.family().name(), c.name);
                    }
                }
            }
        }
    }

    #[test]
    fn chamber_examples() {
        let spec = spec1258();
        let delta = 1e-3;
        assert_eq!(chamber(&IntegralValues::new(7.0, 10.0 + delta), &spec), Chamber::Inside { code: (2, 2), multiplicity: 4 });
        assert_eq!(chamber(&IntegralValues::new(5.0, 5.0), &spec), Chamber::Inside { code: (1, 2), multiplicity: 2 });
        assert_eq!(chamber(&IntegralValues::new(0.0, 0.0), &spec), Chamber::Outside);
        let cyl = SystemSpec::cylindrical();
        assert!(!in_image(&IntegralValues::new(-1.2, 0.0), &cyl));
        assert!(in_image(&IntegralValues::new(0.5, -0.5), &cyl));
    }

    #[test]
    fn separatrix_fibre_lists_equilibria() {
        let set = critical_points(&spec1258(), &IntegralValues::new(7.0, 10.0)).unwrap();
        let points: Vec<&CriticalPiece> = set.pieces.iter().filter(|p| p.dimension() == 0).collect();
        assert_eq!(points.len(), 2);
        for p in points {
            assert_eq!(classify(&p.at(0.0, 0.0), &spec1258()), SingularityType::HyperbolicHyperbolic);
        }
    }

    #[test]
    fn uhlenbeck_sum_and_lines() {
        let spec = spec1258();
        let l = Bivector::new(0.3, -0.2, 0.5, 0.1, 0.7, -0.4);
        let f = uhlenbeck(&l, &spec).unwrap();
        assert!(f.iter().sum::<f64>().abs() < 1e-13);
        let v = IntegralValues::new(2.0 + 6.0, 2.0 * 6.0);
        for l in critical_points(&spec, &v).unwrap().sample(5) {
            assert!(uhlenbeck(&l, &spec).unwrap()[1].abs() < 1e-12);
        }
        assert!(uhlenbeck_poles(&l, [1.0, 1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn s2_table() {
        let b = s2_bifurcation([1.0, 2.0, 5.0]).unwrap();
        assert_eq!(b.segment, (1.0, 5.0));
        let kinds: Vec<(f64, NormalType)> = b.critical.iter().map(|c| (c.value, c.normal)).collect();
        assert_eq!(kinds, vec![(1.0, NormalType::Elliptic), (2.0, NormalType::Hyperbolic), (5.0, NormalType::Elliptic)]);
        let s = s2_spherical_bifurcation();
        assert_eq!(s.critical[0].normal, NormalType::Degenerate);
        assert_eq!(s.critical[1].normal, NormalType::Elliptic);
        assert!(s2_bifurcation([1.0, 1.0, 2.0]).is_err());
    }
}
