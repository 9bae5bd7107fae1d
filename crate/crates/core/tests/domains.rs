use capax::domains::{Curvature, Curve, Domain, GraphDomain, PolytopeDomain};
use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

fn kite(r: f64) -> Domain {
    Domain::Polytope(PolytopeDomain::diagonal(r))
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn support_max_examples() {
    let s = Domain::Simplex(vec![1.0, 1.0]).support_max(&[2.0, 3.0]).unwrap();
    assert!(close(s.value, 3.0, 1e-12));
    assert!(close(s.witness[0], 0.0, 1e-12) && close(s.witness[1], 1.0, 1e-12));

    let s = Domain::Graph(GraphDomain::circle()).support_max(&[1.0, 1.0]).unwrap();
    assert!(close(s.value, SQRT_2, 1e-12));
    assert!(close(s.witness[0], FRAC_1_SQRT_2, 1e-9));

    let s = kite(0.75).support_max(&[1.0, 2.0]).unwrap();
    assert!(close(s.value, 2.25, 1e-12));
    assert_eq!(s.witness, vec![0.75, 0.75]);
}

#[test]
fn support_min_examples() {
    let s = Domain::Curve(Curve::Alpha).support_min(&[1.0, 1.0]).unwrap();
    assert!(close(s.value, 4.0, 1e-12));
    assert!(close(s.witness[0], 2.0, 1e-9) && close(s.witness[1], 2.0, 1e-9));

    let s = Domain::Curve(Curve::Alpha).support_min(&[2.0, 1.0]).unwrap();
    assert!(close(s.value, 3.0 * 3f64.sqrt(), 1e-12));
    // t = 2π/3 on α
    let t = 2.0 * PI / 3.0;
    let expect = [2.0 * (t / 2.0).sin() - t * (t / 2.0).cos(), 2.0 * (t / 2.0).sin() + (2.0 * PI - t) * (t / 2.0).cos()];
    assert!(close(s.witness[0], expect[0], 1e-9) && close(s.witness[1], expect[1], 1e-9));

    let s = Domain::Simplex(vec![1.0, 2.0]).support_min(&[1.0, 1.0]).unwrap();
    assert!(close(s.value, 1.0, 1e-12));
    assert!(close(s.witness[0], 1.0, 1e-12) && close(s.witness[1], 0.0, 1e-12));
}

#[test]
fn support_rejects_bad_vectors() {
    let d = Domain::Simplex(vec![1.0, 1.0]);
    assert!(d.support_max(&[0.0, 0.0]).is_err());
    assert!(d.support_max(&[1.0, 1.0, 1.0]).is_err());
    assert!(d.support_max(&[-1.0, 1.0]).is_err());
}

#[test]
fn area_examples() {
    assert!(close(Domain::Simplex(vec![1.0, 1.0]).area().unwrap(), 0.5, 1e-15));
    assert!(close(Domain::Graph(GraphDomain::circle()).area().unwrap(), PI / 4.0, 1e-10));
    assert!(close(kite(0.75).area().unwrap(), 0.75, 1e-15));
    assert!(close(Domain::Box(vec![1.0, 2.0, 3.0]).area().unwrap(), 6.0, 1e-15));
    assert!(close(Domain::Simplex(vec![1.0, 2.0, 3.0]).area().unwrap(), 1.0, 1e-15));
    // p-ellipse area a·Γ(1+1/p)²/Γ(1+2/p) at p = 2 is a·π/4
    let e = Domain::Graph(GraphDomain::pellipse(2.0, 3.0).unwrap());
    assert!(close(e.area().unwrap(), 3.0 * PI / 4.0, 1e-10));
    // the Lagrangian bidisk region has area 2π (a quarter of 8π)
    let a = Domain::Curve(Curve::Alpha).area().unwrap();
    let direct = capax::numeric::integrate(
        |t: f64| {
            let p = Curve::Alpha.point(t);
            let v = Curve::Alpha.velocity(t);
            0.5 * (p[0] * v[1] - p[1] * v[0])
        },
        0.0,
        2.0 * PI,
        1e-13,
    )
    .unwrap()
    .abs();
    assert!(close(a, direct, 1e-9), "{a} vs {direct}");
}

#[test]
fn fixed_point_examples() {
    let c = GraphDomain::circle();
    let x = c.fixed_point().unwrap();
    assert!(close(x, FRAC_1_SQRT_2, 1e-12));
    assert!(close(c.df(x), -1.0, 1e-8));
    let x = GraphDomain::pellipse(1.0, 1.0).unwrap().fixed_point().unwrap();
    assert!(close(x, 0.5, 1e-12));
    let x = GraphDomain::pellipse(2.0, 2.0).unwrap().fixed_point().unwrap();
    assert!(close(x, 2.0 / 5f64.sqrt(), 1e-12));
}

#[test]
fn validate_examples() {
    let v = Domain::Graph(GraphDomain::circle()).validate();
    assert_eq!(v.get("symmetric"), Some(true));
    assert_eq!(v.get("concave_cap"), Some(true));
    assert_eq!(v.get("smooth_boundary"), Some(false));
    assert_eq!(v.get("symmetric_closure_smooth"), Some(true));

    let v = Domain::Box(vec![1.0, 2.0]).validate();
    assert_eq!(v.get("convex"), Some(true));
    assert_eq!(v.get("symmetric"), Some(false));

    let v = kite(0.75).validate();
    assert_eq!(v.get("symmetric"), Some(true));
}

#[test]
fn classification_flags() {
    assert!(Domain::LpBall { n: 2, p: 4.0 }.is_convex());
    assert!(!Domain::LpBall { n: 2, p: 4.0 }.is_concave());
    assert!(Domain::LpBall { n: 3, p: 1.5 }.is_concave());
    assert!(Domain::Curve(Curve::gamma_eps(0.05).unwrap()).is_concave());
    let cup = GraphDomain::arc_cup(10.0, 15.0).unwrap();
    assert_eq!(cup.curvature, Curvature::ConvexCup);
    assert!(Domain::Graph(cup).is_concave());
}

#[test]
fn membership() {
    let c = Domain::Graph(GraphDomain::circle());
    assert!(c.contains(&[0.5, 0.5]).unwrap());
    assert!(!c.contains(&[0.8, 0.8]).unwrap());
    assert!(kite(0.75).contains(&[0.7, 0.7]).unwrap());
    assert!(!kite(0.75).contains(&[0.8, 0.8]).unwrap());
}

#[test]
fn polyline_symmetry_and_area() {
    let g = GraphDomain::polyline(vec![[0.0, 1.0], [0.75, 0.75], [1.0, 0.0]], Curvature::ConcaveCap).unwrap();
    assert!(g.symmetric);
    assert!(close(g.area().unwrap(), 0.75, 1e-15));
    assert!(GraphDomain::polyline(vec![[0.0, 1.0], [0.5, 1.2], [1.0, 0.0]], Curvature::ConcaveCap).is_err());
}
