//! Oriented planes in R^4, their Pluecker bivectors and the Hodge split.

use nalgebra::{Matrix4, Matrix4x2, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::so4::{casimirs, Bivector};

const ORTHO_TOL: f64 = 1e-12;
const DECOMPOSABLE_TOL: f64 = 1e-10;
const RANK_CUT: f64 = 1e-9;

/// An oriented 2-plane given by an orthonormal pair (x, y).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrientedPlane {
    pub x: Vector4<f64>,
    pub y: Vector4<f64>,
}

impl OrientedPlane {
    /// Checks |x| = |y| = 1 and x.y = 0.
    pub fn new(x: Vector4<f64>, y: Vector4<f64>) -> Result<Self> {
        let bad = (x.norm() - 1.0).abs() > ORTHO_TOL || (y.norm() - 1.0).abs() > ORTHO_TOL || x.dot(&y).abs() > ORTHO_TOL;
        if bad {
            return Err(Error::Domain(format!(
                "basis not orthonormal: |x| = {}, |y| = {}, x.y = {:e}",
                x.norm(),
                y.norm(),
                x.dot(&y)
            )));
        }
        Ok(OrientedPlane { x, y })
    }

    /// Gram-Schmidt on (u, v), keeping the orientation of u ^ v.
    pub fn from_span(u: Vector4<f64>, v: Vector4<f64>) -> Result<Self> {
        let nu = u.norm();
        if nu < 1e-12 {
            return Err(Error::Domain("first spanning vector vanishes".into()));
        }
        let x = u / nu;
        let w = v - x * x.dot(&v);
        let nw = w.norm();
        if nw < 1e-12 * v.norm().max(1.0) {
            return Err(Error::Domain("spanning vectors are parallel".into()));
        }
        Ok(OrientedPlane { x, y: w / nw })
    }

    pub fn basis(&self) -> Matrix4x2<f64> {
        Matrix4x2::from_columns(&[self.x, self.y])
    }
}

/// L = x ^ y.
pub fn plucker(p: &OrientedPlane) -> Result<Bivector> {
    OrientedPlane::new(p.x, p.y)?;
    Ok(Bivector::wedge(&p.x, &p.y))
}

/// The map v -> v ^ L from R^4 to the 3-vectors, in the bases
/// (b123, b124, b134, b234).
pub fn wedge_matrix(l: &Bivector) -> Matrix4<f64> {
    let Bivector { l12, l13, l14, l23, l24, l34 } = *l;
    Matrix4::new(
        l23, -l13, l12, 0.0, //
        l24, -l14, 0.0, l12, //
        l34, 0.0, -l14, l13, //
        0.0, l34, -l24, l23,
    )
}

/// All sixteen 3x3 minors of the wedge matrix.
pub fn wedge_minors(l: &Bivector) -> [f64; 16] {
    let m = wedge_matrix(l);
    let mut out = [0.0; 16];
    let mut k = 0;
    for skip_r in (0..4).rev() {
        for skip_c in (0..4).rev() {
            out[k] = m.remove_row(skip_r).remove_column(skip_c).determinant();
            k += 1;
        }
    }
    out
}

/// The oriented plane whose Pluecker bivector is L / |L|. L must be
/// decomposable (C2 = 0) and nonzero.
pub fn plane_from_bivector(l: &Bivector) -> Result<OrientedPlane> {
    let (c1, c2) = casimirs(l);
    if !(c1 > 0.0) {
        return Err(Error::Domain("zero bivector has no plane".into()));
    }
    if c2.abs() > DECOMPOSABLE_TOL * c1.max(1.0) {
        return Err(Error::Domain(format!("not decomposable: C2 = {c2:e}, the wedge matrix has rank above 2")));
    }
    let svd = wedge_matrix(l).svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| Error::Singular("SVD without right vectors".into()))?;
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let smax = svd.singular_values[order[3]];
    let kernel = order.iter().filter(|&&k| svd.singular_values[k] < RANK_CUT * smax).count();
    if kernel != 2 {
        return Err(Error::Domain(format!("wedge matrix kernel has dimension {kernel}, expected 2")));
    }
    let x: Vector4<f64> = v_t.row(order[0]).transpose();
    let y: Vector4<f64> = v_t.row(order[1]).transpose();
    let plane = OrientedPlane::from_span(x, y)?;
    let w = Bivector::wedge(&plane.x, &plane.y).to_array();
    let la = l.to_array();
    let k = (0..6).max_by(|&a, &b| la[a].abs().total_cmp(&la[b].abs())).expect("six slots");
    if w[k] * la[k] < 0.0 {
        return Ok(OrientedPlane { x: plane.x, y: -plane.y });
    }
    Ok(plane)
}

/// Largest principal angle between the planes spanned by p and q.
pub fn subspace_angle(p: &OrientedPlane, q: &OrientedPlane) -> f64 {
    let qb = q.basis();
    let resid = p.basis() - qb * (qb.transpose() * p.basis());
    let s = resid.svd(false, false).singular_values;
    s.max().clamp(0.0, 1.0).asin()
}

/// Hodge star on bivectors: star(V12) = V34, star(V13) = -V24, star(V14) = V23.
pub fn hodge_star(l: &Bivector) -> Bivector {
    Bivector::new(l.l34, -l.l24, l.l23, l.l14, -l.l13, l.l12)
}

/// Coordinates of the self-dual and anti-self-dual parts of L in the bases
/// (V12 + V34, V13 - V24, V14 + V23) / 2 and (V12 - V34, V13 + V24, V14 - V23) / 2.
pub fn hodge_split(l: &Bivector) -> (Vector3<f64>, Vector3<f64>) {
    let s = hodge_star(l);
    let plus = (*l + s).scale(0.5);
    let minus = (*l - s).scale(0.5);
    (
        Vector3::new(plus.l12, plus.l13, plus.l14),
        Vector3::new(minus.l12, minus.l13, minus.l14),
    )
}
