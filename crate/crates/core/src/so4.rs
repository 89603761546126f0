//! The Lie-Poisson space so*(4): bivectors, brackets, Casimirs, the
//! self-dual split and quadratic observables.

use nalgebra::{Matrix3, Matrix4, Matrix6, SMatrix, Vector3, Vector4, Vector6};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::system::{Params, SystemSpec};

/// Index pairs of the six components, in storage order.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Storage slot of the pair (i, j), i != j, with the sign of l_ij relative to it.
pub fn pair_index(i: usize, j: usize) -> (usize, f64) {
    let (lo, hi, sign) = if i < j { (i, j, 1.0) } else { (j, i, -1.0) };
    let k = PAIRS.iter().position(|&p| p == (lo, hi)).expect("distinct indices below 4");
    (k, sign)
}

/// Angular momenta l_ij = x_i y_j - x_j y_i.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Bivector {
    pub l12: f64,
    pub l13: f64,
    pub l14: f64,
    pub l23: f64,
    pub l24: f64,
    pub l34: f64,
}

impl Bivector {
    pub fn new(l12: f64, l13: f64, l14: f64, l23: f64, l24: f64, l34: f64) -> Self {
        Bivector { l12, l13, l14, l23, l24, l34 }
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        Bivector::new(a[0], a[1], a[2], a[3], a[4], a[5])
    }

    pub fn to_array(self) -> [f64; 6] {
        [self.l12, self.l13, self.l14, self.l23, self.l24, self.l34]
    }

    pub fn from_vector(v: &Vector6<f64>) -> Self {
        Bivector::new(v[0], v[1], v[2], v[3], v[4], v[5])
    }

    pub fn to_vector(self) -> Vector6<f64> {
        Vector6::from(self.to_array())
    }

    /// Unit bivector along one storage slot.
    pub fn basis(k: usize) -> Self {
        let mut a = [0.0; 6];
        a[k] = 1.0;
        Bivector::from_array(a)
    }

    pub fn wedge(x: &Vector4<f64>, y: &Vector4<f64>) -> Self {
        let mut a = [0.0; 6];
        for (k, &(i, j)) in PAIRS.iter().enumerate() {
            a[k] = x[i] * y[j] - x[j] * y[i];
        }
        Bivector::from_array(a)
    }

    /// The antisymmetric 4x4 matrix with entries l_ij.
    pub fn to_matrix(self) -> Matrix4<f64> {
        let mut m = Matrix4::zeros();
        for (k, &(i, j)) in PAIRS.iter().enumerate() {
            let v = self.to_array()[k];
            m[(i, j)] = v;
            m[(j, i)] = -v;
        }
        m
    }

    pub fn get(self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let (k, s) = pair_index(i, j);
        s * self.to_array()[k]
    }

    pub fn norm_sq(self) -> f64 {
        self.to_vector().norm_squared()
    }

    pub fn is_finite(self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    pub fn scale(self, s: f64) -> Self {
        Bivector::from_vector(&(self.to_vector() * s))
    }
}

impl std::ops::Add for Bivector {
    type Output = Bivector;
    fn add(self, o: Bivector) -> Bivector {
        Bivector::from_vector(&(self.to_vector() + o.to_vector()))
    }
}

impl std::ops::Sub for Bivector {
    type Output = Bivector;
    fn sub(self, o: Bivector) -> Bivector {
        Bivector::from_vector(&(self.to_vector() - o.to_vector()))
    }
}

/// The so(3) + so(3) coordinates of a bivector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XYPair {
    pub x: Vector3<f64>,
    pub y: Vector3<f64>,
}

pub fn split(l: &Bivector) -> XYPair {
    XYPair {
        x: Vector3::new(l.l12 + l.l34, l.l13 - l.l24, l.l14 + l.l23) * 0.5,
        y: Vector3::new(l.l12 - l.l34, -(l.l13 + l.l24), l.l14 - l.l23) * 0.5,
    }
}

pub fn join(p: &XYPair) -> Bivector {
    let (x, y) = (p.x, p.y);
    Bivector::new(x[0] + y[0], x[1] - y[1], x[2] + y[2], x[2] - y[2], -x[1] - y[1], x[0] - y[0])
}

/// Casimirs (sum of squares, Pluecker quantity).
pub fn casimirs(l: &Bivector) -> (f64, f64) {
    (l.norm_sq(), l.l12 * l.l34 - l.l13 * l.l24 + l.l14 * l.l23)
}

/// The so(4) Lie-Poisson structure matrix.
pub fn structure_matrix(l: &Bivector) -> Matrix6<f64> {
    let Bivector { l12, l13, l14, l23, l24, l34 } = *l;
    Matrix6::from_row_slice(&[
        0.0, l23, l24, -l13, -l14, 0.0, //
        -l23, 0.0, l34, l12, 0.0, -l14, //
        -l24, -l34, 0.0, 0.0, l12, l13, //
        l13, -l12, 0.0, 0.0, l34, -l24, //
        l14, 0.0, -l12, -l34, 0.0, l23, //
        0.0, l14, -l13, l24, -l23, 0.0,
    ])
}

/// Structure matrix of the basis bivector in slot k; the structure matrix is
/// linear, so these are its partial derivatives.
pub fn structure_basis(k: usize) -> Matrix6<f64> {
    structure_matrix(&Bivector::basis(k))
}

/// Diagonal spectrum c1..c4 of the compatible structures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagonalSpectrum {
    pub c: [f64; 4],
}

impl DiagonalSpectrum {
    pub fn new(c: [f64; 4]) -> Self {
        DiagonalSpectrum { c }
    }

    pub fn strictly_ordered(&self) -> bool {
        self.c.windows(2).all(|w| w[0] < w[1])
    }
}

/// The compatible bracket attached to a diagonal C.
pub fn compatible_structure(l: &Bivector, c: &DiagonalSpectrum) -> Matrix6<f64> {
    let b = structure_matrix(l);
    let mut out = Matrix6::zeros();
    for a in 0..6 {
        for bb in 0..6 {
            if b[(a, bb)] == 0.0 {
                continue;
            }
            let (p, q) = (PAIRS[a], PAIRS[bb]);
            let common = [p.0, p.1].into_iter().find(|i| *i == q.0 || *i == q.1);
            if let Some(i) = common {
                out[(a, bb)] = -c.c[i] * b[(a, bb)];
            }
        }
    }
    out
}

/// psi(lambda) = Tr((X (lambda I - C)^-1)^2).
pub fn trace_rational(lambda: f64, l: &Bivector, c: &DiagonalSpectrum) -> Result<f64> {
    if let Some(index) = c.c.iter().position(|&ci| ci == lambda) {
        return Err(Error::Pole { index: index + 1 });
    }
    let d = Matrix4::from_diagonal(&Vector4::from(c.c.map(|ci| 1.0 / (lambda - ci))));
    let m = l.to_matrix() * d;
    Ok((m * m).trace())
}

/// Numerator coefficients (I0, I1, I2) with psi = 2 (I0 l^2 + I1 l + I2) / prod(l - c_i).
pub fn trace_numerator(l: &Bivector, c: &DiagonalSpectrum) -> (f64, f64, f64) {
    let a = l.to_array();
    let (mut i0, mut i1, mut i2) = (0.0, 0.0, 0.0);
    for (k, &(i, j)) in PAIRS.iter().enumerate() {
        let (p, q) = complement(i, j);
        let w = a[k] * a[k];
        i0 -= w;
        i1 += w * (c.c[p] + c.c[q]);
        i2 -= w * c.c[p] * c.c[q];
    }
    (i0, i1, i2)
}

/// The two indices of {0,1,2,3} not in {i, j}.
pub fn complement(i: usize, j: usize) -> (usize, usize) {
    let mut it = (0..4).filter(|&k| k != i && k != j);
    (it.next().unwrap(), it.next().unwrap())
}

/// A point of T*S^3 on the constraint set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CotangentPoint {
    pub x: Vector4<f64>,
    pub y: Vector4<f64>,
}

pub const CONSTRAINT_TOL: f64 = 1e-12;

impl CotangentPoint {
    pub fn new(x: Vector4<f64>, y: Vector4<f64>) -> Result<Self> {
        if (x.norm_squared() - 1.0).abs() > CONSTRAINT_TOL || x.dot(&y).abs() > CONSTRAINT_TOL {
            return domain(format!(
                "constraint violated: |x|^2-1 = {:e}, x.y = {:e}",
                x.norm_squared() - 1.0,
                x.dot(&y)
            ));
        }
        Ok(CotangentPoint { x, y })
    }

    /// Normalises x and removes the normal part of y.
    pub fn projected(x: Vector4<f64>, y: Vector4<f64>) -> Self {
        let x = x.normalize();
        let y = y - x * x.dot(&y);
        CotangentPoint { x, y }
    }

    pub fn angular_momenta(&self) -> Bivector {
        Bivector::wedge(&self.x, &self.y)
    }

    pub fn energy(&self) -> f64 {
        0.5 * self.y.norm_squared()
    }
}

/// The Dirac structure matrix of the constrained bracket at (x, y).
pub fn dirac_structure(p: &CotangentPoint) -> Result<SMatrix<f64, 8, 8>> {
    let (x, y) = (p.x, p.y);
    let n2 = x.norm_squared();
    if n2 == 0.0 {
        return domain("dirac structure needs a nonzero x");
    }
    let proj = Matrix4::identity() - x * x.transpose() / n2;
    let shear = (x * y.transpose() - y * x.transpose()) / n2;
    let mut b = SMatrix::<f64, 8, 8>::zeros();
    b.fixed_view_mut::<4, 4>(0, 4).copy_from(&proj);
    b.fixed_view_mut::<4, 4>(4, 0).copy_from(&(-proj));
    b.fixed_view_mut::<4, 4>(4, 4).copy_from(&(-shear));
    Ok(b)
}

/// Value L^T Q L + linear . L + constant on so*(4).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticObservable {
    pub q: Matrix6<f64>,
    pub linear: Vector6<f64>,
    pub constant: f64,
}

impl QuadraticObservable {
    pub fn zero() -> Self {
        QuadraticObservable { q: Matrix6::zeros(), linear: Vector6::zeros(), constant: 0.0 }
    }

    /// Sum of w_k l_k^2.
    pub fn diagonal(w: [f64; 6]) -> Self {
        QuadraticObservable { q: Matrix6::from_diagonal(&Vector6::from(w)), ..Self::zero() }
    }

    /// The single component in slot k.
    pub fn component(k: usize) -> Self {
        let mut linear = Vector6::zeros();
        linear[k] = 1.0;
        QuadraticObservable { linear, ..Self::zero() }
    }

    pub fn linear(v: Vector6<f64>) -> Self {
        QuadraticObservable { linear: v, ..Self::zero() }
    }

    pub fn from_symmetric(q: Matrix6<f64>) -> Self {
        QuadraticObservable { q: (q + q.transpose()) * 0.5, ..Self::zero() }
    }

    pub fn casimir1() -> Self {
        Self::diagonal([1.0; 6])
    }

    pub fn casimir2() -> Self {
        let mut q = Matrix6::zeros();
        for (a, b, s) in [(0, 5, 0.5), (1, 4, -0.5), (2, 3, 0.5)] {
            q[(a, b)] = s;
            q[(b, a)] = s;
        }
        QuadraticObservable { q, ..Self::zero() }
    }

    pub fn value(&self, l: &Bivector) -> f64 {
        let v = l.to_vector();
        v.dot(&(self.q * v)) + self.linear.dot(&v) + self.constant
    }

    pub fn gradient(&self, l: &Bivector) -> Vector6<f64> {
        self.q * l.to_vector() * 2.0 + self.linear
    }

    pub fn is_linear(&self) -> bool {
        self.q.iter().all(|v| *v == 0.0)
    }

    /// a * self + b * other.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        QuadraticObservable {
            q: self.q * a + other.q * b,
            linear: self.linear * a + other.linear * b,
            constant: self.constant * a + other.constant * b,
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        self.combine(a, &Self::zero(), 0.0)
    }

    /// Hamiltonian vector field B_L grad f.
    pub fn vector_field(&self, l: &Bivector) -> Vector6<f64> {
        structure_matrix(l) * self.gradient(l)
    }

    /// Jacobian of the Hamiltonian vector field at L.
    pub fn vector_field_jacobian(&self, l: &Bivector) -> Matrix6<f64> {
        let grad = self.gradient(l);
        let b = structure_matrix(l);
        let mut j = Matrix6::zeros();
        for k in 0..6 {
            let col = structure_basis(k) * grad + b * self.q.column(k) * 2.0;
            j.set_column(k, &col);
        }
        j
    }
}

/// {f, g} at L for the so(4) bracket.
pub fn lp_bracket(f: &QuadraticObservable, g: &QuadraticObservable, l: &Bivector) -> f64 {
    f.gradient(l).dot(&(structure_matrix(l) * g.gradient(l)))
}

/// Separation constants (eta1, eta2) of the ellipsoidal family for pole set e.
/// Coincident poles are allowed.
pub fn ellipsoidal_integrals(e: [f64; 4]) -> (QuadraticObservable, QuadraticObservable) {
    let mut w1 = [0.0; 6];
    let mut w2 = [0.0; 6];
    for (k, &(i, j)) in PAIRS.iter().enumerate() {
        let (p, q) = complement(i, j);
        w1[k] = e[p] + e[q];
        w2[k] = e[p] * e[q];
    }
    (QuadraticObservable::diagonal(w1), QuadraticObservable::diagonal(w2))
}

/// The pair of commuting reduced integrals of a family, in `IntegralValues`
/// order. Families with a circle action return the linear momentum first.
pub fn build_integrals(spec: &SystemSpec) -> (QuadraticObservable, QuadraticObservable) {
    use QuadraticObservable as Q;
    match spec.params() {
        Params::Ellipsoidal(e) => ellipsoidal_integrals(e),
        Params::Prolate { b } => (Q::component(3), Q::diagonal([b, b, 1.0, 0.0, 0.0, 0.0])),
        Params::Oblate { a } => (Q::component(5), Q::diagonal([a, 1.0, 1.0, 0.0, 0.0, 0.0])),
        Params::Lame([f1, f2, f3]) => (
            Q::diagonal([1.0, 1.0, 1.0, 0.0, 0.0, 0.0]),
            Q::diagonal([0.0, 0.0, 0.0, f3, f2, f1]),
        ),
        Params::Spherical23 => (Q::component(5), Q::diagonal([1.0, 1.0, 1.0, 0.0, 0.0, 0.0])),
        Params::Cylindrical => (Q::component(0), Q::component(5)),
    }
}

/// Evaluates the family's integrals at L.
pub fn integral_values(spec: &SystemSpec, l: &Bivector) -> crate::system::IntegralValues {
    let (f, g) = build_integrals(spec);
    crate::system::IntegralValues::at_level(f.value(l), g.value(l), l.norm_sq())
}

/// Uniform point on S^3.
pub fn random_unit4<R: Rng + ?Sized>(rng: &mut R) -> Vector4<f64> {
    loop {
        let v = Vector4::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
        let n = v.norm();
        if n > 1e-8 {
            return v / n;
        }
    }
}

/// Random point of the leaf C1 = 2h, C2 = 0: x uniform on S^3, y uniform on
/// the tangent sphere of radius sqrt(2h).
pub fn sample_leaf<R: Rng + ?Sized>(rng: &mut R, two_h: f64) -> (CotangentPoint, Bivector) {
    let x = random_unit4(rng);
    let y = loop {
        let v = Vector4::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
        let t = v - x * x.dot(&v);
        let n = t.norm();
        if n > 1e-8 {
            break t * (two_h.sqrt() / n);
        }
    };
    let p = CotangentPoint { x, y };
    (p, p.angular_momenta())
}

/// Skew matrix of a 3-vector, v x w = hat(v) w.
pub fn hat(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v[2], v[1], v[2], 0.0, -v[0], -v[1], v[0], 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn structure_matches_canonical_bracket() {
        // {l_ij, l_km} from the canonical bracket of x and y, evaluated by
        // finite differences of the wedge map.
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = Vector4::from_fn(|_, _| rng.random::<f64>() - 0.5);
        let y = Vector4::from_fn(|_, _| rng.random::<f64>() - 0.5);
        let l = Bivector::wedge(&x, &y);
        let b = structure_matrix(&l);
        for a in 0..6 {
            for c in 0..6 {
                let (i, j) = PAIRS[a];
                let (k, m) = PAIRS[c];
                // d l_ij / dx_n = delta_in y_j - delta_jn y_i, d/dy_n = x_i delta_jn - x_j delta_in
                let mut s = 0.0;
                for n in 0..4 {
                    let dx = |p: usize, q: usize| (if p == n { y[q] } else { 0.0 }) - (if q == n { y[p] } else { 0.0 });
                    let dy = |p: usize, q: usize| (if q == n { x[p] } else { 0.0 }) - (if p == n { x[q] } else { 0.0 });
                    s += dx(i, j) * dy(k, m) - dy(i, j) * dx(k, m);
                }
                assert!((s - b[(a, c)]).abs() < 1e-14, "{a} {c}: {s} vs {}", b[(a, c)]);
            }
        }
    }

    #[test]
    fn casimir_examples() {
        assert_eq!(casimirs(&Bivector::basis(0)), (1.0, 0.0));
        assert_eq!(casimirs(&Bivector::new(1.0, 0.0, 0.0, 0.0, 0.0, 1.0)), (2.0, 1.0));
    }

    #[test]
    fn split_examples() {
        let p = split(&Bivector::basis(0));
        assert_eq!(p.x, Vector3::new(0.5, 0.0, 0.0));
        assert_eq!(p.y, Vector3::new(0.5, 0.0, 0.0));
        let p = split(&Bivector::new(1.0, 0.0, 0.0, 0.0, 0.0, 1.0));
        assert_eq!(p.x, Vector3::new(1.0, 0.0, 0.0));
        assert_eq!(p.y, Vector3::zeros());
    }

    #[test]
    fn dirac_examples() {
        let p = CotangentPoint::new(Vector4::x(), Vector4::y()).unwrap();
        let b = dirac_structure(&p).unwrap();
        let ur = b.fixed_view::<4, 4>(0, 4).into_owned();
        assert_eq!(ur, Matrix4::from_diagonal(&Vector4::new(0.0, 1.0, 1.0, 1.0)));
        let mut g1 = nalgebra::SVector::<f64, 8>::zeros();
        g1[0] = 2.0;
        assert!((b * g1).norm() == 0.0);
        let p = CotangentPoint::new(Vector4::x(), Vector4::zeros()).unwrap();
        let b = dirac_structure(&p).unwrap();
        assert!(b.fixed_view::<4, 4>(4, 4).iter().all(|v| *v == 0.0));
        let zero = CotangentPoint { x: Vector4::zeros(), y: Vector4::zeros() };
        assert!(dirac_structure(&zero).is_err());
    }

    #[test]
    fn compatible_identity_is_minus_standard() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (_, l) = sample_leaf(&mut rng, 1.0);
        let bc = compatible_structure(&l, &DiagonalSpectrum::new([1.0; 4]));
        assert!((bc + structure_matrix(&l)).norm() < 1e-15);
    }

    #[test]
    fn trace_numerator_matches_eta() {
        let e = [1.0, 2.0, 5.0, 8.0];
        let (eta1, eta2) = ellipsoidal_integrals(e);
        assert_eq!(eta1.q[(0, 0)], 13.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = DiagonalSpectrum::new(e);
        for _ in 0..50 {
            let (_, l) = sample_leaf(&mut rng, 1.0);
            let (i0, i1, i2) = trace_numerator(&l, &c);
            assert!((i0 + 1.0).abs() < 1e-14);
            assert!((i1 - eta1.value(&l)).abs() < 1e-12);
            assert!((i2 + eta2.value(&l)).abs() < 1e-12);
            let lam = 3.7;
            let direct = trace_rational(lam, &l, &c).unwrap();
            let prod: f64 = e.iter().map(|ei| lam - ei).product();
            assert!((direct - 2.0 * (i0 * lam * lam + i1 * lam + i2) / prod).abs() < 1e-12);
        }
        assert_eq!(trace_rational(2.0, &Bivector::basis(0), &c), Err(Error::Pole { index: 2 }));
        assert_eq!(trace_rational(3.0, &Bivector::default(), &c).unwrap(), 0.0);
    }

    #[test]
    fn vector_field_jacobian_matches_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (_, l) = sample_leaf(&mut rng, 1.0);
        let (f, _) = ellipsoidal_integrals([1.0, 2.0, 5.0, 8.0]);
        let j = f.vector_field_jacobian(&l);
        let h = 1e-6;
        for k in 0..6 {
            let d = Bivector::basis(k).scale(h);
            let fd = (f.vector_field(&(l + d)) - f.vector_field(&(l - d))) / (2.0 * h);
            assert!((fd - j.column(k)).norm() < 1e-7);
        }
    }
}
