//! Coordinate charts, Staeckel matrices, separated momenta and turning
//! points for the six separable families.

use nalgebra::{Matrix3, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::so4::{Bivector, CotangentPoint};
use crate::system::{IntegralValues, Params, SystemSpec};

/// Curvilinear coordinates (s1, s2, s3) of a family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvilinearPoint {
    pub s: [f64; 3],
    pub spec: SystemSpec,
}

/// One factor (s_coord - root) of a chart row.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Factor {
    coord: usize,
    root: f64,
}

/// x_j^2 = scale * prod of factors, one row per Cartesian coordinate.
#[derive(Debug, Clone, PartialEq)]
struct ChartRow {
    scale: f64,
    factors: Vec<Factor>,
}

fn row(scale: f64, factors: &[(usize, f64)]) -> ChartRow {
    ChartRow { scale, factors: factors.iter().map(|&(coord, root)| Factor { coord, root }).collect() }
}

fn chart_rows(spec: &SystemSpec) -> [ChartRow; 4] {
    match spec.params() {
        Params::Ellipsoidal(e) => std::array::from_fn(|j| {
            let den: f64 = (0..4).filter(|&i| i != j).map(|i| e[i] - e[j]).product();
            row(1.0 / den, &[(0, e[j]), (1, e[j]), (2, e[j])])
        }),
        Params::Prolate { b } => [
            row(1.0 / b, &[(0, 0.0), (2, 0.0)]),
            row(-1.0 / (b - 1.0), &[(0, 1.0), (1, 0.0), (2, 1.0)]),
            row(1.0 / (b - 1.0), &[(0, 1.0), (1, 1.0), (2, 1.0)]),
            row(1.0 / ((b - 1.0) * b), &[(0, b), (2, b)]),
        ],
        Params::Oblate { a } => [
            row(1.0 / a, &[(0, 0.0), (1, 0.0)]),
            row(-1.0 / (a - 1.0), &[(0, 1.0), (1, 1.0)]),
            row(1.0 / (a * (a - 1.0)), &[(0, a), (1, a), (2, 0.0)]),
            row(-1.0 / (a * (a - 1.0)), &[(0, a), (1, a), (2, 1.0)]),
        ],
        Params::Lame([f1, f2, f3]) => [
            row(1.0, &[(0, 0.0)]),
            row(-1.0 / ((f2 - f1) * (f3 - f1)), &[(0, 1.0), (1, f1), (2, f1)]),
            row(1.0 / ((f1 - f2) * (f2 - f3)), &[(0, 1.0), (1, f2), (2, f2)]),
            row(1.0 / ((f2 - f3) * (f3 - f1)), &[(0, 1.0), (1, f3), (2, f3)]),
        ],
        Params::Spherical23 => [
            row(1.0, &[(0, 0.0)]),
            row(-1.0, &[(0, 1.0), (1, 0.0)]),
            row(1.0, &[(0, 1.0), (1, 1.0), (2, 0.0)]),
            row(-1.0, &[(0, 1.0), (1, 1.0), (2, 1.0)]),
        ],
        Params::Cylindrical => [
            row(1.0, &[(0, 0.0), (1, 0.0)]),
            row(-1.0, &[(0, 1.0), (1, 0.0)]),
            row(-1.0, &[(1, 1.0), (2, 0.0)]),
            row(1.0, &[(1, 1.0), (2, 1.0)]),
        ],
    }
}

/// Closed intervals of s1, s2, s3.
pub fn intervals(spec: &SystemSpec) -> [(f64, f64); 3] {
    match spec.params() {
        Params::Ellipsoidal(e) => [(e[0], e[1]), (e[1], e[2]), (e[2], e[3])],
        Params::Prolate { b } => [(0.0, 1.0), (0.0, 1.0), (1.0, b)],
        Params::Oblate { a } => [(0.0, 1.0), (1.0, a), (0.0, 1.0)],
        Params::Lame([f1, f2, f3]) => [(0.0, 1.0), (f1, f2), (f2, f3)],
        Params::Spherical23 | Params::Cylindrical => [(0.0, 1.0); 3],
    }
}

const INTERVAL_TOL: f64 = 1e-12;

fn check_intervals(spec: &SystemSpec, s: &[f64; 3]) -> Result<()> {
    for (k, (&sk, (lo, hi))) in s.iter().zip(intervals(spec)).enumerate() {
        let tol = INTERVAL_TOL * (1.0 + lo.abs().max(hi.abs()));
        if !(sk >= lo - tol && sk <= hi + tol) {
            return Err(Error::Interval {
                coordinate: k + 1,
                detail: format!("s{} = {sk} not in [{lo}, {hi}]", k + 1),
            });
        }
    }
    Ok(())
}

impl CurvilinearPoint {
    pub fn new(spec: SystemSpec, s: [f64; 3]) -> Result<Self> {
        check_intervals(&spec, &s)?;
        Ok(CurvilinearPoint { s, spec })
    }
}

/// Squared Cartesian coordinates x_j^2 of a chart point.
pub fn cartesian_squares(spec: &SystemSpec, s: &[f64; 3]) -> Result<[f64; 4]> {
    check_intervals(spec, s)?;
    let rows = chart_rows(spec);
    let mut out = [0.0; 4];
    for (j, r) in rows.iter().enumerate() {
        let v = r.scale * r.factors.iter().map(|f| s[f.coord] - f.root).product::<f64>();
        out[j] = v.max(0.0);
    }
    Ok(out)
}

/// Magnitudes |x_j| of the point with coordinates s.
pub fn to_cartesian(p: &CurvilinearPoint) -> Result<[f64; 4]> {
    Ok(cartesian_squares(&p.spec, &p.s)?.map(f64::sqrt))
}

/// Applies octant signs to chart magnitudes.
pub fn with_signs(magnitudes: [f64; 4], signs: [bool; 4]) -> Vector4<f64> {
    Vector4::from_fn(|j, _| if signs[j] { -magnitudes[j] } else { magnitudes[j] })
}

/// Interior Jacobian dx_j/ds_k for the signed point x.
pub fn jacobian(spec: &SystemSpec, s: &[f64; 3], x: &Vector4<f64>) -> nalgebra::Matrix4x3<f64> {
    let rows = chart_rows(spec);
    let mut jac = nalgebra::Matrix4x3::zeros();
    for (j, r) in rows.iter().enumerate() {
        for f in &r.factors {
            jac[(j, f.coord)] += x[j] / (2.0 * (s[f.coord] - f.root));
        }
    }
    jac
}

/// Diagonal metric g_kk of the chart, from the factorised x_j^2.
pub fn metric(spec: &SystemSpec, s: &[f64; 3]) -> Result<[f64; 3]> {
    let x2 = cartesian_squares(spec, s)?;
    let rows = chart_rows(spec);
    let mut g = [0.0; 3];
    for (k, gk) in g.iter_mut().enumerate() {
        for (j, r) in rows.iter().enumerate() {
            let d: f64 = r.factors.iter().filter(|f| f.coord == k).map(|f| 1.0 / (s[k] - f.root)).sum();
            *gk += 0.25 * x2[j] * d * d;
        }
    }
    Ok(g)
}

/// Roots of sum_i w_i / (s - e_i) = 0 for nonnegative weights and increasing
/// poles. Poles with zero weight are roots themselves; the rest interlace.
pub fn elliptic_roots(w: &[f64], e: &[f64]) -> Vec<f64> {
    let live: Vec<usize> = (0..w.len()).filter(|&i| w[i] > 0.0).collect();
    let mut roots: Vec<f64> = (0..w.len()).filter(|&i| w[i] <= 0.0).map(|i| e[i]).collect();
    let f = |s: f64| live.iter().map(|&i| w[i] / (s - e[i])).sum::<f64>();
    for pair in live.windows(2) {
        let (mut lo, mut hi) = (e[pair[0]], e[pair[1]]);
        // f decreases from +inf to -inf between consecutive live poles.
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    roots.sort_by(f64::total_cmp);
    roots
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        (num / den).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

/// Chart coordinates of a unit vector x. Where the chart is singular
/// (a vanishing radius) the boundary value 0 is used for the undetermined
/// angle-like coordinate.
pub fn from_cartesian(x: &Vector4<f64>, spec: &SystemSpec) -> Result<CurvilinearPoint> {
    let n2 = x.norm_squared();
    if (n2 - 1.0).abs() > 1e-10 {
        return domain(format!("x is off the sphere: |x|^2 - 1 = {:e}", n2 - 1.0));
    }
    let w = x.map(|v| v * v) / n2;
    let s = match spec.params() {
        Params::Ellipsoidal(e) => {
            let r = elliptic_roots(w.as_slice(), &e);
            [r[0], r[1], r[2]]
        }
        Params::Prolate { b } => {
            let rho2 = w[1] + w[2];
            let r = elliptic_roots(&[w[0], rho2, w[3]], &[0.0, 1.0, b]);
            [r[0], ratio(w[1], rho2), r[1]]
        }
        Params::Oblate { a } => {
            let rho2 = w[2] + w[3];
            let r = elliptic_roots(&[w[0], w[1], rho2], &[0.0, 1.0, a]);
            [r[0], r[1], ratio(w[2], rho2)]
        }
        Params::Lame(f) => {
            let s1 = w[0];
            let r = elliptic_roots(&[w[1], w[2], w[3]], &f);
            [s1, r[0], r[1]]
        }
        Params::Spherical23 => {
            let s1 = w[0];
            let s2 = ratio(w[1], 1.0 - s1);
            let s3 = ratio(w[2], w[2] + w[3]);
            [s1, s2, s3]
        }
        Params::Cylindrical => {
            let s2 = w[0] + w[1];
            [ratio(w[0], s2), s2, ratio(w[2], 1.0 - s2)]
        }
    };
    let s = clamp_into(spec, s);
    CurvilinearPoint::new(*spec, s)
}

fn clamp_into(spec: &SystemSpec, s: [f64; 3]) -> [f64; 3] {
    let iv = intervals(spec);
    std::array::from_fn(|k| s[k].clamp(iv[k].0, iv[k].1))
}

/// Separated momenta p_k = y . dx/ds_k of a phase-space point, with its chart point.
pub fn separated_momenta(p: &CotangentPoint, spec: &SystemSpec) -> Result<(CurvilinearPoint, [f64; 3])> {
    let c = from_cartesian(&p.x, spec)?;
    let jac = jacobian(spec, &c.s, &p.x);
    let m = jac.transpose() * p.y;
    Ok((c, [m[0], m[1], m[2]]))
}

/// Rebuilds (x, y) from (s, p) and octant signs, y = sum_k p_k / g_kk dx/ds_k.
pub fn cotangent_from_sp(spec: &SystemSpec, s: &[f64; 3], p: &[f64; 3], signs: [bool; 4]) -> Result<CotangentPoint> {
    let x = with_signs(cartesian_squares(spec, s)?.map(f64::sqrt), signs);
    let jac = jacobian(spec, s, &x);
    let g = metric(spec, s)?;
    let y = jac * Vector3::from_fn(|k, _| p[k] / g[k]);
    Ok(CotangentPoint { x, y })
}

/// Angular momenta of the phase-space point with chart data (s, p).
pub fn angular_momenta_from_sp(s: &[f64; 3], p: &[f64; 3], spec: &SystemSpec, signs: [bool; 4]) -> Result<Bivector> {
    Ok(cotangent_from_sp(spec, s, p, signs)?.angular_momenta())
}

/// p_k^2 = (c0 + c1 s + c2 s^2) / (scale * prod (s - pole)).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumSq {
    pub numerator: [f64; 3],
    pub scale: f64,
    pub poles: Vec<f64>,
}

impl MomentumSq {
    pub fn eval(&self, s: f64) -> f64 {
        let [c0, c1, c2] = self.numerator;
        let num = c0 + s * (c1 + s * c2);
        let den = self.scale * self.poles.iter().map(|p| s - p).product::<f64>();
        if den == 0.0 {
            return f64::INFINITY.copysign(num * self.scale);
        }
        num / den
    }

    /// Real roots of the numerator, ascending.
    pub fn numerator_roots(&self) -> Vec<f64> {
        let [c0, c1, c2] = self.numerator;
        if c2 == 0.0 {
            return if c1 == 0.0 { vec![] } else { vec![-c0 / c1] };
        }
        let disc = c1 * c1 - 4.0 * c2 * c0;
        let scale = c1 * c1 + (4.0 * c2 * c0).abs();
        let disc = if disc < 0.0 && disc > -1e-12 * scale.max(1e-300) { 0.0 } else { disc };
        if disc < 0.0 {
            return vec![];
        }
        let q = -0.5 * (c1 + c1.signum() * disc.sqrt());
        let mut r = if q == 0.0 {
            vec![0.0, 0.0]
        } else {
            vec![q / c2, c0 / q]
        };
        r.sort_by(f64::total_cmp);
        r
    }
}

/// The separated-momentum relation of coordinate `branch` at the given values.
pub fn momentum_relation(branch: usize, values: &IntegralValues, spec: &SystemSpec) -> Result<MomentumSq> {
    if branch > 2 {
        return domain(format!("branch index {branch} out of range"));
    }
    let h2 = values.two_h;
    let (u, v) = (values.first, values.second);
    let m = |numerator: [f64; 3], scale: f64, poles: &[f64]| MomentumSq { numerator, scale, poles: poles.to_vec() };
    let circle = || m([u * u, 0.0, 0.0], -4.0, &[0.0, 1.0]);
    Ok(match spec.params() {
        Params::Ellipsoidal(e) => m([-v, u, -h2], 4.0, &e),
        Params::Prolate { b } => match branch {
            1 => circle(),
            _ => m([-v, v + h2 + (b - 1.0) * u * u, -h2], 4.0, &[0.0, b, 1.0, 1.0]),
        },
        Params::Oblate { a } => match branch {
            2 => circle(),
            _ => m([-a * v, a * h2 + v - (a - 1.0) * u * u, -h2], 4.0, &[0.0, 1.0, a, a]),
        },
        Params::Lame(f) => match branch {
            0 => m([u, -h2, 0.0], 4.0, &[1.0, 1.0, 0.0]),
            _ => m([-v, h2 - u, 0.0], -4.0, &f),
        },
        Params::Spherical23 => match branch {
            0 => m([v, -h2, 0.0], 4.0, &[0.0, 1.0, 1.0]),
            1 => m([h2 - v - u * u, v - h2, 0.0], 4.0, &[0.0, 1.0, 1.0]),
            _ => circle(),
        },
        Params::Cylindrical => match branch {
            0 => circle(),
            1 => m([-u * u, u * u + h2 - v * v, -h2], 4.0, &[1.0, 1.0, 0.0, 0.0]),
            _ => m([v * v, 0.0, 0.0], -4.0, &[0.0, 1.0]),
        },
    })
}

/// p^2 of coordinate `branch` at s; negative values mark forbidden s and
/// poles give a signed infinity.
pub fn separated_momentum_sq(s: f64, branch: usize, values: &IntegralValues, spec: &SystemSpec) -> Result<f64> {
    Ok(momentum_relation(branch, values, spec)?.eval(s))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurningRoots {
    pub r1: f64,
    pub r2: f64,
}

/// The two moving turning points of the family. For the ellipsoidal family
/// these are the roots of 2h z^2 - eta1 z + eta2.
pub fn turning_roots(values: &IntegralValues, spec: &SystemSpec) -> Result<TurningRoots> {
    let h2 = values.two_h;
    let (u, v) = (values.first, values.second);
    let quad = |c0: f64, c1: f64, c2: f64| -> Result<TurningRoots> {
        let r = MomentumSq { numerator: [c0, c1, c2], scale: 1.0, poles: vec![] }.numerator_roots();
        match r.as_slice() {
            [r1, r2] => Ok(TurningRoots { r1: *r1, r2: *r2 }),
            _ => Err(Error::NotInImage(format!(
                "negative discriminant {:e}",
                c1 * c1 - 4.0 * c0 * c2
            ))),
        }
    };
    match spec.params() {
        Params::Ellipsoidal(_) => quad(v, -u, h2),
        Params::Prolate { b } => quad(-v, v + h2 + (b - 1.0) * u * u, -h2),
        Params::Oblate { a } => quad(-a * v, a * h2 + v - (a - 1.0) * u * u, -h2),
        Params::Lame(_) => {
            let r1 = u / h2;
            let r2 = if h2 - u > 0.0 { v / (h2 - u) } else { f64::NAN };
            Ok(TurningRoots { r1, r2 })
        }
        Params::Spherical23 => {
            let r1 = v / h2;
            let r2 = if h2 - v > 0.0 { 1.0 - u * u / (h2 - v) } else { f64::NAN };
            Ok(TurningRoots { r1: r1.min(r2), r2: r1.max(r2) })
        }
        Params::Cylindrical => quad(-u * u, u * u + h2 - v * v, -h2),
    }
}

/// A Staeckel matrix with the residual of the metric relation
/// (Phi^-1)_{0k} = 1 / g_kk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StackelReport {
    pub phi: Matrix3<f64>,
    pub residual: f64,
}

/// Row k of the Staeckel matrix: p_k^2 = row . (2h, c1, c2) with the
/// family's separation constants (c1, c2).
fn stackel_row(spec: &SystemSpec, k: usize, s: f64) -> [f64; 3] {
    let q = |v: [f64; 3], d: f64| v.map(|x| x / d);
    match spec.params() {
        Params::Ellipsoidal(e) => {
            let a: f64 = e.iter().map(|ei| s - ei).product();
            q([-s * s, -s, -1.0], 4.0 * a)
        }
        Params::Prolate { b } => match k {
            1 => [0.0, 0.0, 1.0 / (4.0 * s * (1.0 - s))],
            _ => q([-s * (s - 1.0), s - 1.0, (b - 1.0) * s], 4.0 * s * (s - b) * (s - 1.0).powi(2)),
        },
        Params::Oblate { a } => match k {
            2 => [0.0, 0.0, 1.0 / (4.0 * s * (1.0 - s))],
            _ => q([-s * (s - a), s - a, -(a - 1.0) * s], 4.0 * s * (s - 1.0) * (s - a).powi(2)),
        },
        Params::Lame([f1, f2, f3]) => match k {
            0 => q([-s, 1.0, 0.0], 4.0 * (s - 1.0).powi(2) * s),
            _ => q([s, -s, -1.0], 4.0 * (f3 - s) * (s - f1) * (s - f2)),
        },
        Params::Spherical23 => match k {
            0 => q([-s, 1.0, 0.0], 4.0 * s * (s - 1.0).powi(2)),
            1 => q([-(s - 1.0), s - 1.0, -1.0], 4.0 * s * (s - 1.0).powi(2)),
            _ => [0.0, 0.0, 1.0 / (4.0 * s * (1.0 - s))],
        },
        Params::Cylindrical => match k {
            0 => [0.0, 1.0 / (4.0 * s * (1.0 - s)), 0.0],
            1 => q([-s * (s - 1.0), s - 1.0, -s], 4.0 * (s - 1.0).powi(2) * s * s),
            _ => [0.0, 0.0, 1.0 / (4.0 * s * (1.0 - s))],
        },
    }
}

/// Separation-constant vector (2h, c1, c2) matching [`stackel_matrix`] for
/// values of the family's integrals. For the ellipsoidal family this is
/// (2h, -eta1, eta2); Lame uses (2h, F, G) and the circle families square
/// the linear momentum.
pub fn separation_constants(values: &IntegralValues, spec: &SystemSpec) -> [f64; 3] {
    let (u, v, h2) = (values.first, values.second, values.two_h);
    match spec.params() {
        Params::Ellipsoidal(_) => [h2, -u, v],
        Params::Prolate { .. } | Params::Oblate { .. } | Params::Spherical23 => [h2, v, u * u],
        Params::Lame(_) => [h2, u, v],
        Params::Cylindrical => [h2, u * u, v * v],
    }
}

pub fn stackel_matrix(spec: &SystemSpec, p: &CurvilinearPoint) -> Result<StackelReport> {
    let s = p.s;
    let iv = intervals(spec);
    for k in 0..3 {
        let (lo, hi) = iv[k];
        if s[k] <= lo || s[k] >= hi {
            return domain(format!("s{} = {} must lie in the open interval ({lo}, {hi})", k + 1, s[k]));
        }
    }
    let phi = Matrix3::from_fn(|k, m| stackel_row(spec, k, s[k])[m]);
    let inv = phi
        .try_inverse()
        .ok_or_else(|| Error::Singular("Staeckel matrix is singular (coincident coordinates)".into()))?;
    let g = metric(spec, &s)?;
    let residual = (0..3).map(|k| (inv[(0, k)] * g[k] - 1.0).abs()).fold(0.0, f64::max);
    Ok(StackelReport { phi, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::so4::{integral_values, sample_leaf, trace_rational, DiagonalSpectrum};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn specs() -> Vec<SystemSpec> {
        vec![
            SystemSpec::ellipsoidal([1.0, 2.0, 5.0, 8.0]).unwrap(),
            SystemSpec::prolate(2.4).unwrap(),
            SystemSpec::oblate(2.4).unwrap(),
            SystemSpec::lame([0.4, 1.3, 3.2]).unwrap(),
            SystemSpec::spherical23(),
            SystemSpec::cylindrical(),
        ]
    }

    #[test]
    fn ellipsoidal_chart_example() {
        let spec = SystemSpec::ellipsoidal([1.0, 2.0, 5.0, 8.0]).unwrap();
        let x2 = cartesian_squares(&spec, &[1.5, 3.0, 6.0]).unwrap();
        let want = [5.0 / 28.0, 1.0 / 9.0, 7.0 / 36.0, 65.0 / 126.0];
        for j in 0..4 {
            assert!((x2[j] - want[j]).abs() < 1e-15);
        }
        assert!((x2.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert_eq!(cartesian_squares(&spec, &[1.0, 3.0, 6.0]).unwrap()[0], 0.0);
        assert!(cartesian_squares(&spec, &[2.5, 3.0, 6.0]).is_err());
        let sph = SystemSpec::spherical23();
        assert_eq!(cartesian_squares(&sph, &[1.0, 0.3, 0.8]).unwrap(), [1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn from_cartesian_examples() {
        let spec = SystemSpec::ellipsoidal([1.0, 2.0, 5.0, 8.0]).unwrap();
        let x = Vector4::from(cartesian_squares(&spec, &[1.5, 3.0, 6.0]).unwrap().map(f64::sqrt));
        let p = from_cartesian(&x, &spec).unwrap();
        for (a, b) in p.s.iter().zip([1.5, 3.0, 6.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        let p = from_cartesian(&Vector4::x(), &spec).unwrap();
        assert_eq!(p.s, [2.0, 5.0, 8.0]);
        assert!(from_cartesian(&Vector4::new(1.0, 1.0, 0.0, 0.0), &spec).is_err());
    }

    #[test]
    fn round_trip_all_charts() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for spec in specs() {
            for _ in 0..200 {
                let (p, _) = sample_leaf(&mut rng, 1.0);
                let c = from_cartesian(&p.x, &spec).unwrap();
                let back = to_cartesian(&c).unwrap();
                for j in 0..4 {
                    assert!((back[j] - p.x[j].abs()).abs() < 1e-9, "{:?} {:?} {:?}", spec.family(), back, p.x);
                }
            }
        }
    }

    #[test]
    fn momenta_match_cartesian_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for spec in specs() {
            for _ in 0..200 {
                let (p, l) = sample_leaf(&mut rng, 1.0);
                let (c, mom) = separated_momenta(&p, &spec).unwrap();
                let values = integral_values(&spec, &l);
                for k in 0..3 {
                    let want = mom[k] * mom[k];
                    let got = separated_momentum_sq(c.s[k], k, &values, &spec).unwrap();
                    assert!((got - want).abs() < 1e-7 * (1.0 + want), "{:?} k={k} {got} {want}", spec.family());
                }
            }
        }
    }

    #[test]
    fn trace_is_eight_momentum_squares() {
        let e = [1.0, 2.0, 5.0, 8.0];
        let spec = SystemSpec::ellipsoidal(e).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let (p, l) = sample_leaf(&mut rng, 1.0);
            let (c, _) = separated_momenta(&p, &spec).unwrap();
            let values = integral_values(&spec, &l);
            for k in 0..3 {
                let psi = trace_rational(c.s[k], &l, &DiagonalSpectrum::new(e)).unwrap();
                let p2 = separated_momentum_sq(c.s[k], k, &values, &spec).unwrap();
                assert!((psi - 8.0 * p2).abs() < 1e-8 * (1.0 + psi.abs()));
            }
        }
    }

    #[test]
    fn momentum_example() {
        let spec = SystemSpec::ellipsoidal([1.0, 2.0, 5.0, 8.0]).unwrap();
        let p2 = separated_momentum_sq(3.0, 1, &IntegralValues::new(7.0, 10.0), &spec).unwrap();
        assert!((p2 - 1.0 / 40.0).abs() < 1e-16);
        let r = turning_roots(&IntegralValues::new(7.0, 10.0), &spec).unwrap();
        assert_eq!((r.r1, r.r2), (2.0, 5.0));
        let r = turning_roots(&IntegralValues::new(5.0, 5.0), &spec).unwrap();
        assert!((r.r1 - (5.0 - 5f64.sqrt()) / 2.0).abs() < 1e-15);
        assert!((r.r2 - (5.0 + 5f64.sqrt()) / 2.0).abs() < 1e-15);
        let r = turning_roots(&IntegralValues::new(6.0, 9.0), &spec).unwrap();
        assert_eq!((r.r1, r.r2), (3.0, 3.0));
        assert!(turning_roots(&IntegralValues::new(2.0, 9.0), &spec).is_err());
        assert!(separated_momentum_sq(2.0, 0, &IntegralValues::new(5.0, 5.0), &spec).unwrap().is_infinite());
    }

    #[test]
    fn stackel_residuals() {
        let cases = [
            (specs()[0], [1.5, 3.0, 6.0]),
            (specs()[1], [0.3, 0.6, 1.7]),
            (specs()[2], [0.3, 1.8, 0.4]),
            (specs()[3], [0.35, 0.9, 2.1]),
            (specs()[4], [0.3, 0.6, 0.7]),
            (specs()[5], [0.3, 0.6, 0.7]),
        ];
        for (spec, s) in cases {
            let c = CurvilinearPoint::new(spec, s).unwrap();
            let r = stackel_matrix(&spec, &c).unwrap();
            assert!(r.residual < 1e-12, "{:?}: {}", spec.family(), r.residual);
        }
    }

    #[test]
    fn stackel_inverse_gives_constants() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for spec in specs() {
            for _ in 0..50 {
                let (p, l) = sample_leaf(&mut rng, 1.0);
                let (c, mom) = separated_momenta(&p, &spec).unwrap();
                let Ok(r) = stackel_matrix(&spec, &c) else { continue };
                let psq = Vector3::from_fn(|k, _| mom[k] * mom[k]);
                let eta = r.phi.try_inverse().unwrap() * psq;
                let want = separation_constants(&integral_values(&spec, &l), &spec);
                for m in 0..3 {
                    assert!((eta[m] - want[m]).abs() < 1e-7 * (1.0 + want[m].abs()), "{:?}", spec.family());
                }
            }
        }
    }

    #[test]
    fn angular_momenta_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for spec in specs() {
            for _ in 0..100 {
                let (p, l) = sample_leaf(&mut rng, 1.0);
                let (c, mom) = separated_momenta(&p, &spec).unwrap();
                let signs = [p.x[0] < 0.0, p.x[1] < 0.0, p.x[2] < 0.0, p.x[3] < 0.0];
                let back = angular_momenta_from_sp(&c.s, &mom, &spec, signs).unwrap();
                assert!((back - l).to_vector().norm() < 1e-8, "{:?}", spec.family());
            }
        }
    }
}
