//! Trajectory integration: the constrained geodesic flow on T*S^3, the
//! Lie-Poisson flows on so*(4) and the Euler-top subsystem of the Lame
//! family.
//!
//! All flows use one adaptive Dormand-Prince 5(4) stepper. The geodesic
//! state is projected back onto |x| = 1, x.y = 0 after every accepted step;
//! reduced states are never projected, so Casimir drift measures the
//! method error.

use nalgebra::{Matrix4, SVector, Vector3, Vector6};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::s2::{s2_integral_observable, S2Bivector};
use crate::so4::{build_integrals, casimirs, Bivector, CotangentPoint, QuadraticObservable};
use crate::system::{Params, SystemSpec};

const MAX_STEPS: usize = 50_000_000;
const LOCAL_TOL_FLOOR: f64 = 1e-14;

// Dormand-Prince tableau
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates the autonomous system y' = f(y) from t = 0 to `t_end`,
/// calling `project` on every accepted state and `observe` with it.
/// Returns the number of rejected steps.
///
/// `tol` bounds the error accumulated over the whole run: the per-step
/// tolerance is tol divided by the number of characteristic times
/// (rate |f(y0)| / |y0| times t_end), floored at 1e-14.
pub fn dopri5<const N: usize>(
    f: impl Fn(&SVector<f64, N>) -> SVector<f64, N>,
    y0: SVector<f64, N>,
    t_end: f64,
    tol: f64,
    project: impl Fn(&mut SVector<f64, N>),
    mut observe: impl FnMut(f64, &SVector<f64, N>),
) -> Result<usize> {
    if !(tol > 0.0) || !t_end.is_finite() || t_end < 0.0 {
        return Err(Error::Domain(format!("need tol > 0 and finite t_end >= 0, got {tol}, {t_end}")));
    }
    let mut y = y0;
    let mut t = 0.0;
    observe(t, &y);
    if t_end == 0.0 {
        return Ok(0);
    }
    let mut k1 = f(&y);
    let scale0 = y.amax().max(1.0);
    let rate = k1.amax() / y.amax().max(1e-300);
    let tol = (tol / (rate * t_end).max(1.0)).max(LOCAL_TOL_FLOOR);
    let mut h = (0.01 * scale0 / k1.amax().max(1e-12)).min(t_end) * tol.powf(0.2).max(1e-3);
    let mut rejected = 0;
    for _ in 0..MAX_STEPS {
        if t >= t_end {
            return Ok(rejected);
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        let mut k = [SVector::<f64, N>::zeros(); 7];
        k[0] = k1;
        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                if A[s][j] != 0.0 {
                    ys += kj * (h * A[s][j]);
                }
            }
            k[s] = f(&ys);
        }
        let mut y5 = y;
        let mut err = SVector::<f64, N>::zeros();
        for s in 0..7 {
            y5 += k[s] * (h * B5[s]);
            err += k[s] * (h * (B5[s] - B4[s]));
        }
        let norm = (0..N)
            .map(|i| {
                let sc = tol * (1.0 + y[i].abs().max(y5[i].abs()));
                (err[i] / sc).powi(2)
            })
            .sum::<f64>()
            / N as f64;
        let norm = norm.sqrt();
        if norm <= 1.0 {
            t = if last { t_end } else { t + h };
            y = y5;
            project(&mut y);
            k1 = f(&y);
            observe(t, &y);
        } else {
            rejected += 1;
        }
        let factor = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if !h.is_finite() || h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepUnderflow { t });
        }
    }
    Err(Error::StepUnderflow { t })
}

/// Times, states and per-step drift of monitored quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    pub names: Vec<String>,
    pub initial: Vec<f64>,
    /// drift[k][q] = |q(t_k) - q(0)| / max(1, |q(0)|)
    pub drift: Vec<Vec<f64>>,
    pub rejected: usize,
}

impl<S> Trajectory<S> {
    fn new(names: Vec<String>, initial: Vec<f64>) -> Self {
        Trajectory { times: Vec::new(), states: Vec::new(), names, initial, drift: Vec::new(), rejected: 0 }
    }

    fn push(&mut self, t: f64, state: S, values: &[f64]) {
        let d = values
            .iter()
            .zip(&self.initial)
            .map(|(v, v0)| (v - v0).abs() / v0.abs().max(1.0))
            .collect();
        self.times.push(t);
        self.states.push(state);
        self.drift.push(d);
    }

    /// Largest scaled drift of each monitored quantity.
    pub fn max_drift(&self) -> Vec<f64> {
        let mut m = vec![0.0f64; self.names.len()];
        for row in &self.drift {
            for (a, b) in m.iter_mut().zip(row) {
                *a = a.max(*b);
            }
        }
        m
    }

    pub fn max_drift_of(&self, name: &str) -> Option<f64> {
        let k = self.names.iter().position(|n| n == name)?;
        Some(self.drift.iter().map(|r| r[k]).fold(0.0, f64::max))
    }

    pub fn last(&self) -> Option<&S> {
        self.states.last()
    }
}

/// A named quantity watched along a reduced trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Monitor {
    pub name: String,
    pub observable: QuadraticObservable,
}

impl Monitor {
    pub fn new(name: &str, observable: QuadraticObservable) -> Self {
        Monitor { name: name.to_string(), observable }
    }
}

fn pack(p: &CotangentPoint) -> SVector<f64, 8> {
    SVector::<f64, 8>::from_fn(|i, _| if i < 4 { p.x[i] } else { p.y[i - 4] })
}

fn unpack(v: &SVector<f64, 8>) -> CotangentPoint {
    CotangentPoint { x: v.fixed_rows::<4>(0).into(), y: v.fixed_rows::<4>(4).into() }
}

const GEODESIC_NAMES: [&str; 13] =
    ["norm_x", "x_dot_y", "energy", "first", "second", "c2", "l12", "l13", "l14", "l23", "l24", "l34", "c1"];

fn geodesic_quantities(p: &CotangentPoint, spec: &SystemSpec) -> Vec<f64> {
    let l = p.angular_momenta();
    let (f, g) = build_integrals(spec);
    let (c1, c2) = casimirs(&l);
    let mut v = vec![p.x.norm_squared(), p.x.dot(&p.y), p.energy(), f.value(&l), g.value(&l), c2];
    v.extend(l.to_array());
    v.push(c1);
    v
}

/// Geodesic flow x' = y, y' = -(y.y) x on the constraint set, monitoring
/// the constraints, the energy, the family integrals, C2 and every l_ij.
pub fn integrate_geodesic(p0: &CotangentPoint, spec: &SystemSpec, t_end: f64, tol: f64) -> Result<Trajectory<CotangentPoint>> {
    let tol_c = 1e-12;
    if (p0.x.norm_squared() - 1.0).abs() > tol_c || p0.x.dot(&p0.y).abs() > tol_c {
        return Err(Error::Domain("initial point violates |x| = 1, x.y = 0".into()));
    }
    let names = GEODESIC_NAMES.iter().map(|s| s.to_string()).collect();
    let mut traj = Trajectory::new(names, geodesic_quantities(p0, spec));
    let rhs = |v: &SVector<f64, 8>| {
        let p = unpack(v);
        let yy = p.y.norm_squared();
        SVector::<f64, 8>::from_fn(|i, _| if i < 4 { p.y[i] } else { -yy * p.x[i - 4] })
    };
    let project = |v: &mut SVector<f64, 8>| {
        let p = unpack(v);
        let x = p.x / p.x.norm();
        let y = p.y - x * x.dot(&p.y);
        *v = pack(&CotangentPoint { x, y });
    };
    let rejected = dopri5(rhs, pack(p0), t_end, tol, project, |t, v| {
        let p = unpack(v);
        let q = geodesic_quantities(&p, spec);
        traj.push(t, p, &q);
    })?;
    traj.rejected = rejected;
    Ok(traj)
}

/// Lie-Poisson flow L' = B_L grad f. Monitors C1, C2, f and the given
/// partners.
pub fn integrate_reduced(
    l0: &Bivector,
    f: &QuadraticObservable,
    partners: &[Monitor],
    t_end: f64,
    tol: f64,
) -> Result<Trajectory<Bivector>> {
    let mut monitors = vec![
        Monitor::new("c1", QuadraticObservable::casimir1()),
        Monitor::new("c2", QuadraticObservable::casimir2()),
        Monitor::new("generator", *f),
    ];
    monitors.extend(partners.iter().cloned());
    let eval = |l: &Bivector| monitors.iter().map(|m| m.observable.value(l)).collect::<Vec<_>>();
    let names = monitors.iter().map(|m| m.name.clone()).collect();
    let mut traj = Trajectory::new(names, eval(l0));
    let rejected = dopri5(
        |v: &Vector6<f64>| f.vector_field(&Bivector::from_vector(v)),
        l0.to_vector(),
        t_end,
        tol,
        |_| {},
        |t, v| {
            let l = Bivector::from_vector(v);
            let q = eval(&l);
            traj.push(t, l, &q);
        },
    )?;
    traj.rejected = rejected;
    Ok(traj)
}

/// Lax residual |X' - [A, X]| with X the skew matrix of L and A the skew
/// matrix of -grad f, for the flow generated by f.
pub fn lax_residual(l: &Bivector, f: &QuadraticObservable) -> f64 {
    let x = l.to_matrix();
    let a: Matrix4<f64> = Bivector::from_vector(&(-f.gradient(l))).to_matrix();
    let xdot = Bivector::from_vector(&f.vector_field(l)).to_matrix();
    (xdot - (a * x - x * a)).amax()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EulerReport {
    /// L is on the sphere l12^2 + l13^2 + l14^2 = 2h where the J1 flow is undefined
    pub singular: bool,
    /// dependence of the (l23, l24, l34) components on (l12, l13, l14)
    pub coupling: f64,
    /// difference between the subsystem field and the Euler-top field
    pub field_mismatch: f64,
    /// difference between the subsystem trajectory and a standalone Euler-top run at time T
    pub trajectory_mismatch: f64,
    /// difference between the J1 field and the unit-rate rotation about
    /// (l34, -l24, l23); zero when singular
    pub rotation_mismatch: f64,
}

fn lame_f(spec: &SystemSpec) -> Result<[f64; 3]> {
    match spec.params() {
        Params::Lame(f) => Ok(f),
        _ => Err(Error::Unsupported(format!("Euler subsystem needs the Lame family, got {}", spec.family().name()))),
    }
}

fn sub(v: &Vector6<f64>) -> Vector3<f64> {
    Vector3::new(v[3], v[4], v[5])
}

/// Checks that the (l23, l24, l34) part of the G flow is a closed Euler top
/// with weights f and that the J1 flow is the normalised rotation of
/// (l12, l13, l14) about (l34, -l24, l23).
pub fn euler_substructure_check(spec: &SystemSpec, l0: &Bivector, t_end: f64) -> Result<EulerReport> {
    let f = lame_f(spec)?;
    let (big_f, big_g) = build_integrals(spec);
    let top = s2_integral_observable([f[2], f[1], f[0]]);
    let field = big_g.vector_field(l0);

    let mut moved = *l0;
    moved.l12 += 0.37;
    moved.l13 -= 0.21;
    moved.l14 += 0.55;
    let coupling = (sub(&field) - sub(&big_g.vector_field(&moved))).amax();
    let reduced = S2Bivector::new(l0.l23, l0.l24, l0.l34);
    let field_mismatch = (sub(&field) - top.vector_field(&reduced)).amax();

    let tol = 1e-12;
    let mut full = *l0;
    dopri5(|v: &Vector6<f64>| big_g.vector_field(&Bivector::from_vector(v)), l0.to_vector(), t_end, tol, |_| {}, |_, v| {
        full = Bivector::from_vector(v)
    })?;
    let mut alone = reduced.to_vector();
    dopri5(|v: &Vector3<f64>| top.vector_field(&S2Bivector::from_vector(v)), reduced.to_vector(), t_end, tol, |_| {}, |_, v| {
        alone = *v
    })?;
    let trajectory_mismatch = (Vector3::new(full.l23, full.l24, full.l34) - alone).amax();

    let axis = Vector3::new(l0.l34, -l0.l24, l0.l23);
    let singular = axis.norm() < 1e-12;
    let rotation_mismatch = if singular {
        0.0
    } else {
        // J1 = sqrt(2h) - sqrt(2h - F) and 2h - F = |axis|^2
        let j1_field = big_f.vector_field(l0) / (2.0 * axis.norm());
        let v = Vector3::new(l0.l12, l0.l13, l0.l14);
        let model = -axis.normalize().cross(&v);
        (Vector3::new(j1_field[0], j1_field[1], j1_field[2]) - model).amax().max(sub(&j1_field).amax())
    };
    Ok(EulerReport { singular, coupling, field_mismatch, trajectory_mismatch, rotation_mismatch })
}
