use std::f64::consts::{FRAC_PI_2, PI};

use confluent_core::geometry::{arc_weight, cocircularity_angle, confluence_angle, fit_arc};
use confluent_core::{FlowArc, OrientedSample, UnitVec3, Vec3};
use confluent_oracles as oracle;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn arr(v: Vec3) -> [f64; 3] {
    [v.x, v.y, v.z]
}

fn random_unit(rng: &mut impl Rng) -> UnitVec3 {
    loop {
        let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if v.norm() > 0.1 && v.norm() <= 1.0 {
            return v.normalized().unwrap();
        }
    }
}

fn random_sample(rng: &mut impl Rng) -> OrientedSample {
    let p = Vec3::new(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
    OrientedSample::new(p, random_unit(rng)).unwrap()
}

fn unit() -> impl Strategy<Value = UnitVec3> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("away from zero", |(x, y, z)| (x * x + y * y + z * z).sqrt() > 0.1)
        .prop_map(|(x, y, z)| Vec3::new(x, y, z).normalized().unwrap())
}

fn point() -> impl Strategy<Value = Vec3> {
    (-10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn sample() -> impl Strategy<Value = OrientedSample> {
    (point(), unit()).prop_map(|(p, t)| OrientedSample::new(p, t).unwrap())
}

fn distinct_pair() -> impl Strategy<Value = (OrientedSample, OrientedSample)> {
    (sample(), sample()).prop_filter("distinct", |(a, b)| a.position.distance(b.position) > 1e-3)
}

#[test]
fn closed_form_length_matches_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut checked = 0;
    while checked < 10_000 {
        let (p, q) = (random_sample(&mut rng), random_sample(&mut rng));
        let arc = fit_arc(&p, q.position).unwrap();
        if PI - arc.alpha < 1e-3 {
            continue;
        }
        let reference = oracle::arc_length_quadrature(arr(p.position), arr(p.tangent.as_vec()), arr(q.position));
        let rel = (arc.length - reference).abs() / reference;
        assert!(rel <= 1e-6, "alpha {} length {} vs {reference}", arc.alpha, arc.length);
        checked += 1;
    }
}

#[test]
fn reflected_end_tangent_matches_finite_difference() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..10_000 {
        let (p, q) = (random_sample(&mut rng), random_sample(&mut rng));
        let arc = fit_arc(&p, q.position).unwrap();
        let fd = oracle::end_tangent_fd(arr(p.position), arr(p.tangent.as_vec()), arr(q.position));
        let e = arc.end_tangent.as_vec();
        let err = Vec3::new(e.x - fd[0], e.y - fd[1], e.z - fd[2]).norm();
        assert!(err <= 1e-6, "{e:?} vs {fd:?}");
    }
}

#[test]
fn semicircle_has_known_weight() {
    let arc = FlowArc::fit(Vec3::zero(), UnitVec3::y_axis(), Vec3::new(2.0, 0.0, 0.0)).unwrap();
    assert!((arc.length - PI).abs() < 1e-12);
    let w = arc_weight(&arc, UnitVec3::new(0.0, -1.0, 0.0).unwrap(), FRAC_PI_2, 1.0);
    assert!((w - 2.0 * PI).abs() < 1e-12);
}

#[test]
fn reverse_arcs_differ_in_length() {
    // both arcs confluent, lengths differ
    let p = OrientedSample::new(Vec3::zero(), Vec3::new(1.0, 0.3, 0.0).normalized().unwrap()).unwrap();
    let q = OrientedSample::new(Vec3::new(4.0, 0.0, 0.0), Vec3::new(1.0, -0.1, 0.0).normalized().unwrap()).unwrap();
    let (a, b) = (fit_arc(&p, q.position).unwrap(), fit_arc(&q, p.position).unwrap());
    assert!(arc_weight(&a, q.tangent, FRAC_PI_2, 0.0).is_finite());
    assert!(arc_weight(&b, p.tangent, FRAC_PI_2, 0.0).is_finite());
    assert!((a.length - b.length).abs() > 1e-3, "{} {}", a.length, b.length);
}

#[test]
fn flipped_witness_is_cocircular_but_not_confluent() {
    let p = OrientedSample::new(Vec3::zero(), Vec3::new(1.0, 1.0, 0.0).normalized().unwrap()).unwrap();
    let q = OrientedSample::new(Vec3::new(2.0, 0.0, 0.0), Vec3::new(1.0, -1.0, 0.0).normalized().unwrap()).unwrap();
    let forward = fit_arc(&p, q.position).unwrap();
    assert!(confluence_angle(&forward, q.tangent) < 1e-12);
    let p_flipped = p.flipped();
    let (a, b) = (fit_arc(&p_flipped, q.position).unwrap(), fit_arc(&q, p_flipped.position).unwrap());
    assert!(confluence_angle(&a, q.tangent) > FRAC_PI_2);
    assert!(confluence_angle(&b, p_flipped.tangent) > FRAC_PI_2);
    assert!(cocircularity_angle(&p_flipped, &q).unwrap() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn end_angle_is_symmetric((p, q) in distinct_pair()) {
        let a = confluence_angle(&fit_arc(&p, q.position).unwrap(), q.tangent);
        let b = confluence_angle(&fit_arc(&q, p.position).unwrap(), p.tangent);
        prop_assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
    }

    #[test]
    fn confluence_is_symmetric((p, q) in distinct_pair(), eps in 0.05..PI) {
        let a = confluence_angle(&fit_arc(&p, q.position).unwrap(), q.tangent);
        let b = confluence_angle(&fit_arc(&q, p.position).unwrap(), p.tangent);
        prop_assume!((a - eps).abs() > 1e-9);
        prop_assert_eq!(a <= eps, b <= eps);
    }

    #[test]
    fn confluence_implies_cocircularity((p, q) in distinct_pair(), eps in 0.01..FRAC_PI_2) {
        let a = confluence_angle(&fit_arc(&p, q.position).unwrap(), q.tangent);
        if a <= eps {
            prop_assert!(cocircularity_angle(&p, &q).unwrap() <= eps + 1e-12);
        }
    }

    #[test]
    fn cocircularity_ignores_orientation((p, q) in distinct_pair()) {
        let base = cocircularity_angle(&p, &q).unwrap();
        prop_assert!((cocircularity_angle(&p.flipped(), &q).unwrap() - base).abs() < 1e-9);
        prop_assert!((cocircularity_angle(&p, &q.flipped()).unwrap() - base).abs() < 1e-9);
    }

    #[test]
    fn arc_points_stay_in_the_plane((p, q) in distinct_pair(), s in 0.0..=1.0f64) {
        let arc = fit_arc(&p, q.position).unwrap();
        let normal = p.tangent.as_vec().cross(q.position - p.position);
        prop_assume!(normal.norm() > 1e-6);
        let n = normal.normalized().unwrap().as_vec();
        let off = (arc.point_at(s) - p.position).dot(n).abs();
        prop_assert!(off <= 1e-9, "{off}");
    }

    #[test]
    fn arc_ends_at_target((p, q) in distinct_pair()) {
        let arc = fit_arc(&p, q.position).unwrap();
        prop_assume!(!arc.is_degenerate());
        prop_assert!(arc.point_at(1.0).distance(q.position) <= 1e-9 * (1.0 + arc.length));
        prop_assert!(arc.point_at(0.0).distance(p.position) <= 1e-12);
    }
}
