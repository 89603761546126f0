use nalgebra::{Vector3, Vector4};
use proptest::prelude::*;
use staeckel_core::actions::action_triple;
use staeckel_core::grassmann::{hodge_split, hodge_star, plane_from_bivector, plucker, subspace_angle, OrientedPlane};
use staeckel_core::param_space::{involution, involution_fixed_residual};
use staeckel_core::s2::{s2_chart, S2ChartKind};
use staeckel_core::separation::{
    from_cartesian, momentum_relation, separated_momenta, stackel_matrix, to_cartesian,
};
use staeckel_core::so4::{build_integrals, casimirs, integral_values, join, lp_bracket, split};
use staeckel_core::{Bivector, CotangentPoint, QuadraticObservable, SystemSpec};

fn bivector() -> impl Strategy<Value = Bivector> {
    prop::array::uniform6(-1.0..1.0f64).prop_map(Bivector::from_array)
}

fn unit4() -> impl Strategy<Value = Vector4<f64>> {
    prop::array::uniform4(-1.0..1.0f64)
        .prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-2)
        .prop_map(|v| Vector4::from(v).normalize())
}

fn sorted<const N: usize>(v: [f64; N], gap: f64) -> [f64; N] {
    let mut v = v;
    v.sort_by(f64::total_cmp);
    for k in 1..N {
        v[k] = v[k].max(v[k - 1] + gap);
    }
    v
}

fn any_spec() -> impl Strategy<Value = SystemSpec> {
    prop_oneof![
        prop::array::uniform4(-3.0..6.0f64).prop_map(|e| SystemSpec::ellipsoidal(sorted(e, 0.2)).unwrap()),
        (1.2..8.0f64).prop_map(|b| SystemSpec::prolate(b).unwrap()),
        (1.2..8.0f64).prop_map(|a| SystemSpec::oblate(a).unwrap()),
        prop::array::uniform3(-3.0..6.0f64).prop_map(|f| SystemSpec::lame(sorted(f, 0.2)).unwrap()),
        Just(SystemSpec::spherical23()),
        Just(SystemSpec::cylindrical()),
    ]
}

/// Point on the leaf |x| = 1, x.y = 0, |y|^2 = 2h.
fn leaf_point(two_h: f64) -> impl Strategy<Value = CotangentPoint> {
    (unit4(), prop::array::uniform4(-1.0..1.0f64))
        .prop_filter_map("y parallel to x", move |(x, v)| {
            let v = Vector4::from(v);
            let t = v - x * x.dot(&v);
            (t.norm() > 1e-3).then(|| CotangentPoint::new(x, t * (two_h.sqrt() / t.norm())).unwrap())
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn integrals_and_casimirs_commute(spec in any_spec(), l in bivector()) {
        let (f, g) = build_integrals(&spec);
        let scale = 1.0 + f.gradient(&l).norm() * g.gradient(&l).norm();
        prop_assert!(lp_bracket(&f, &g, &l).abs() < 1e-12 * scale);
        for c in [QuadraticObservable::casimir1(), QuadraticObservable::casimir2()] {
            for h in [&f, &g] {
                let s = 1.0 + c.gradient(&l).norm() * h.gradient(&l).norm();
                prop_assert!(lp_bracket(&c, h, &l).abs() < 1e-12 * s);
            }
        }
    }

    #[test]
    fn split_join_round_trip(l in bivector()) {
        let p = split(&l);
        prop_assert!((join(&p).to_vector() - l.to_vector()).amax() < 1e-15);
        let (c1, c2) = casimirs(&l);
        prop_assert!((p.x.norm_squared() + p.y.norm_squared() - c1 / 2.0).abs() < 1e-14);
        prop_assert!((p.x.norm_squared() - p.y.norm_squared() - c2).abs() < 1e-14);
    }

    #[test]
    fn hodge_star_is_involutive(l in bivector()) {
        prop_assert_eq!(hodge_star(&hodge_star(&l)), l);
        let (x, y) = hodge_split(&l);
        let s = split(&l);
        prop_assert!((x - s.x).amax() < 1e-15);
        prop_assert!((y - Vector3::new(s.y[0], -s.y[1], s.y[2])).amax() < 1e-15);
    }

    #[test]
    fn involution_is_involutive(a in 1.01..20.0f64, gap in 0.01..20.0f64) {
        let b = a + gap;
        let (a2, b2) = involution(a, b).unwrap();
        let (a3, b3) = involution(a2, b2).unwrap();
        prop_assert!((a3 - a).abs() < 1e-9 * b && (b3 - b).abs() < 1e-9 * b);
        // the fixed line is mapped to itself
        let a_fix = b - 1.0;
        if a_fix > 1.0 {
            let (p, q) = involution(a_fix, b).unwrap();
            prop_assert!(involution_fixed_residual(p, q).abs() < 1e-12);
        }
    }

    #[test]
    fn chart_round_trip(spec in any_spec(), x in unit4()) {
        prop_assume!(x.iter().all(|v| v.abs() > 1e-2));
        let cp = from_cartesian(&x, &spec).unwrap();
        let back = to_cartesian(&cp).unwrap();
        for k in 0..4 {
            prop_assert!((back[k] - x[k].abs()).abs() < 1e-8, "{:?} vs {:?}", back, x);
        }
    }

    #[test]
    fn separated_momenta_satisfy_relations(spec in any_spec(), p in leaf_point(1.0)) {
        prop_assume!(p.x.iter().all(|v| v.abs() > 1e-2));
        let (cp, momenta) = separated_momenta(&p, &spec).unwrap();
        let values = integral_values(&spec, &p.angular_momenta());
        for k in 0..3 {
            let rel = momentum_relation(k, &values, &spec).unwrap();
            let want = rel.eval(cp.s[k]);
            let got = momenta[k] * momenta[k];
            prop_assert!((got - want).abs() < 1e-6 * (1.0 + want.abs()), "branch {k}: {got} vs {want}");
        }
        prop_assert!(stackel_matrix(&spec, &cp).unwrap().residual < 1e-10);
    }

    #[test]
    fn pluecker_round_trip(x in unit4(), y in unit4()) {
        let p = OrientedPlane::from_span(x, y);
        prop_assume!(p.is_ok());
        let p = p.unwrap();
        let l = plucker(&p).unwrap();
        let q = plane_from_bivector(&l).unwrap();
        prop_assert!(subspace_angle(&p, &q) < 1e-10);
        prop_assert!((plucker(&q).unwrap().to_vector() - l.to_vector()).amax() < 1e-10);
        prop_assert!(casimirs(&l).1.abs() < 1e-14);
    }

    #[test]
    fn s2_charts_land_on_sphere(s in prop::array::uniform2(0.0..1.0f64), e in prop::array::uniform3(-3.0..6.0f64)) {
        let x = s2_chart(S2ChartKind::Spherical, s, [0.0; 3]).unwrap();
        prop_assert!((x.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-14);
        let e = sorted(e, 0.1);
        let s_ell = [e[0] + s[0] * (e[1] - e[0]), e[1] + s[1] * (e[2] - e[1])];
        let x = s2_chart(S2ChartKind::Elliptic, s_ell, e).unwrap();
        prop_assert!((x.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn actions_sum_to_root_energy(spec in any_spec(), two_h in 0.5..3.0f64, p in leaf_point(1.0)) {
        let p = CotangentPoint::new(p.x, p.y * two_h.sqrt()).unwrap();
        let values = integral_values(&spec, &p.angular_momenta());
        let j = action_triple(&values, &spec).unwrap();
        prop_assert!((j.sum() - two_h.sqrt()).abs() < 1e-8, "{:?} sum {}", j, j.sum());
        prop_assert!(j.to_array().iter().all(|&v| v >= -1e-12));
    }
}
