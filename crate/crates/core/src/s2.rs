//! The S^2 analogues: so(3) angular momenta, the Euler-top integral and the
//! elliptic and spherical charts.

use nalgebra::{Matrix3, Matrix3x2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::so4::hat;

/// Angular momenta (l12, l13, l23) of the geodesic flow on S^2.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct S2Bivector {
    pub l12: f64,
    pub l13: f64,
    pub l23: f64,
}

impl S2Bivector {
    pub fn new(l12: f64, l13: f64, l23: f64) -> Self {
        S2Bivector { l12, l13, l23 }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        S2Bivector::new(a[0], a[1], a[2])
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        S2Bivector::new(v[0], v[1], v[2])
    }

    pub fn to_vector(self) -> Vector3<f64> {
        Vector3::new(self.l12, self.l13, self.l23)
    }

    pub fn casimir(self) -> f64 {
        self.to_vector().norm_squared()
    }

    pub fn scale(self, s: f64) -> Self {
        S2Bivector::from_vector(&(self.to_vector() * s))
    }

    /// Angular momenta of (x, y) in R^3.
    pub fn wedge(x: &Vector3<f64>, y: &Vector3<f64>) -> Self {
        S2Bivector::new(x[0] * y[1] - x[1] * y[0], x[0] * y[2] - x[2] * y[0], x[1] * y[2] - x[2] * y[1])
    }
}

/// so(3) structure matrix in the (l12, l13, l23) basis, {l12, l13} = l23.
pub fn s2_structure(l: &S2Bivector) -> Matrix3<f64> {
    -hat(&l.to_vector())
}

/// Quadratic observable L^T diag(w) L on so*(3).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct S2Observable {
    pub weights: [f64; 3],
}

impl S2Observable {
    pub fn value(&self, l: &S2Bivector) -> f64 {
        let v = l.to_vector();
        (0..3).map(|k| self.weights[k] * v[k] * v[k]).sum()
    }

    pub fn gradient(&self, l: &S2Bivector) -> Vector3<f64> {
        let v = l.to_vector();
        Vector3::from_fn(|k, _| 2.0 * self.weights[k] * v[k])
    }

    pub fn vector_field(&self, l: &S2Bivector) -> Vector3<f64> {
        s2_structure(l) * self.gradient(l)
    }

    pub fn jacobian(&self, l: &S2Bivector) -> Matrix3<f64> {
        let q2 = Matrix3::from_diagonal(&Vector3::from(self.weights)) * 2.0;
        -hat(&l.to_vector()) * q2 + hat(&self.gradient(l))
    }

    /// Jacobian of the vector field and an orthonormal basis of the plane
    /// orthogonal to L (the tangent plane of the leaf).
    pub fn tangent_linearization(&self, l: &S2Bivector) -> (Matrix3<f64>, Matrix3x2<f64>) {
        let n = l.to_vector().normalize();
        let seed = if n[0].abs() < 0.9 { Vector3::x() } else { Vector3::y() };
        let a = (seed - n * n.dot(&seed)).normalize();
        let b = n.cross(&a);
        (self.jacobian(l), Matrix3x2::from_columns(&[a, b]))
    }
}

/// The Euler-top integral with weights (w12, w13, w23).
pub fn s2_integral_observable(w: [f64; 3]) -> S2Observable {
    S2Observable { weights: w }
}

/// eta1 = e3 l12^2 + e2 l13^2 + e1 l23^2.
pub fn s2_integral(e: [f64; 3], l: &S2Bivector) -> f64 {
    s2_integral_observable([e[2], e[1], e[0]]).value(l)
}

/// {f, g} for the so(3) bracket.
pub fn s2_bracket(f: &S2Observable, g: &S2Observable, l: &S2Bivector) -> f64 {
    f.gradient(l).dot(&(s2_structure(l) * g.gradient(l)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum S2ChartKind {
    Elliptic,
    Spherical,
}

/// |x_i| of the chart point s. Elliptic charts need s1 in [e1, e2] and
/// s2 in [e2, e3]; spherical charts need s in [0, 1]^2.
pub fn s2_chart(kind: S2ChartKind, s: [f64; 2], e: [f64; 3]) -> Result<[f64; 3]> {
    let tol = 1e-12;
    let check = |k: usize, lo: f64, hi: f64| -> Result<()> {
        let t = tol * (1.0 + lo.abs().max(hi.abs()));
        if s[k] >= lo - t && s[k] <= hi + t {
            Ok(())
        } else {
            Err(Error::Interval { coordinate: k + 1, detail: format!("s{} = {} not in [{lo}, {hi}]", k + 1, s[k]) })
        }
    };
    let sq = match kind {
        S2ChartKind::Elliptic => {
            if !(e[0] < e[1] && e[1] < e[2]) {
                return Err(Error::Ordering(format!("need e1 < e2 < e3, got {e:?}")));
            }
            check(0, e[0], e[1])?;
            check(1, e[1], e[2])?;
            std::array::from_fn(|i| {
                let den: f64 = (0..3).filter(|&j| j != i).map(|j| e[j] - e[i]).product();
                (s[0] - e[i]) * (s[1] - e[i]) / den
            })
        }
        S2ChartKind::Spherical => {
            check(0, 0.0, 1.0)?;
            check(1, 0.0, 1.0)?;
            [s[0], (1.0 - s[0]) * s[1], (1.0 - s[0]) * (1.0 - s[1])]
        }
    };
    Ok(sq.map(|v: f64| v.max(0.0).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integral_examples() {
        let e = [1.0, 2.0, 5.0];
        assert_eq!(s2_integral(e, &S2Bivector::new(1.0, 0.0, 0.0)), 5.0);
        assert_eq!(s2_integral(e, &S2Bivector::new(0.0, -1.0, 0.0)), 2.0);
        let l = S2Bivector::new(0.3, -0.5, 0.8);
        let c = S2Observable { weights: [1.0; 3] };
        let f = s2_integral_observable([5.0, 2.0, 1.0]);
        assert!(s2_bracket(&c, &f, &l).abs() < 1e-15);
    }

    #[test]
    fn bracket_matches_so4_restriction() {
        // {l12, l13} = l23 as in so(4)
        let l = S2Bivector::new(0.2, 0.3, 0.7);
        let b = s2_structure(&l);
        assert_eq!(b[(0, 1)], l.l23);
        assert_eq!(b[(0, 2)], -l.l13);
        assert_eq!(b[(1, 2)], l.l12);
    }

    #[test]
    fn chart_examples() {
        let x = s2_chart(S2ChartKind::Elliptic, [1.5, 3.0], [1.0, 2.0, 5.0]).unwrap();
        let sq = x.map(|v| v * v);
        assert!((sq[0] - 0.25).abs() < 1e-15);
        assert!((sq[1] - 1.0 / 6.0).abs() < 1e-15);
        assert!((sq[2] - 7.0 / 12.0).abs() < 1e-15);
        assert!((sq.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(s2_chart(S2ChartKind::Spherical, [1.0, 0.3], [0.0; 3]).unwrap(), [1.0, 0.0, 0.0]);
        assert_eq!(s2_chart(S2ChartKind::Elliptic, [1.0, 3.0], [1.0, 2.0, 5.0]).unwrap()[0], 0.0);
        assert!(s2_chart(S2ChartKind::Elliptic, [2.5, 3.0], [1.0, 2.0, 5.0]).is_err());
    }
}
