use capax::domains::{Domain, GraphDomain, PolytopeDomain};
use capax::echcap::ech_capacity;
use capax::families::*;
use capax::ghcap::{gh_graph_symmetric, gh_polytope};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn caps(g: &GraphDomain, k_max: usize) -> Vec<f64> {
    (1..=k_max).map(|k| gh_graph_symmetric(g, k).unwrap().value).collect()
}

fn area(g: &GraphDomain) -> f64 {
    g.area().unwrap()
}

#[test]
fn bump_examples() {
    let b = make_bump(BumpSpec {
        support: (0.2, 0.4),
        plateau: Some(Plateau { lo: 0.28, hi: 0.32, height: 1.0 }),
        integral: 0.0,
    })
    .unwrap();
    assert!(b.integral().abs() < 1e-10);
    assert!(close(b.eval(0.3).v, 1.0, 1e-10));
    let lowest = (0..=400).map(|i| b.eval(0.2 + 0.2 * i as f64 / 400.0).v).fold(f64::INFINITY, f64::min);
    assert!(lowest < 0.0);
    assert_eq!(b.eval(0.1).v, 0.0);
    assert_eq!(b.eval(0.45).v, 0.0);

    let eta = make_bump(BumpSpec { support: (0.2, 0.4), plateau: None, integral: 0.5 }).unwrap();
    assert!(close(eta.integral(), 0.5, 1e-10));

    let b4 = make_bump(BumpSpec {
        support: (0.2, 0.4),
        plateau: Some(Plateau { lo: 0.29, hi: 0.31, height: 2.0 / 4.0 }),
        integral: 0.0,
    })
    .unwrap();
    assert!(close(b4.eval(0.3).v, 0.5, 1e-10));
}

#[test]
fn bump_rejects_bad_specs() {
    let bad = BumpSpec { support: (0.4, 0.2), plateau: None, integral: 0.0 };
    assert!(make_bump(bad).is_err());
    let outside = BumpSpec {
        support: (0.2, 0.4),
        plateau: Some(Plateau { lo: 0.35, hi: 0.45, height: 1.0 }),
        integral: 0.0,
    };
    assert!(make_bump(outside).is_err());
}

#[test]
fn zero_amplitude_is_identity() {
    let c = GraphDomain::circle();
    let b = make_bump_for(&c, BumpSpec { support: (0.2, 0.4), plateau: None, integral: 0.1 }).unwrap();
    let e = symmetric_extend(&c, vec![(b, 0.0)]).unwrap();
    for i in 0..=50 {
        let x = i as f64 / 50.0;
        assert_eq!(e.f(x), c.f(x));
    }
}

#[test]
fn extension_is_an_involution_with_matching_integral() {
    let c = GraphDomain::circle();
    let b = make_bump_for(&c, BumpSpec { support: (0.2, 0.4), plateau: None, integral: 0.05 }).unwrap();
    let amp = 0.5 * b.delta_max().min(1.0);
    let e = symmetric_extend(&c, vec![(b.clone(), amp)]).unwrap();
    for i in 0..=1000 {
        let x = e.lambda * i as f64 / 1000.0;
        assert!(close(e.f(e.f(x)), x, 1e-8), "x={x}");
    }
    let m = mirror_integral(&c, &e).unwrap();
    assert!(close(m, amp * b.integral(), 1e-8), "{m} vs {}", amp * b.integral());
    // mirror support is (g(b), g(a))
    assert!(close(e.f(c.f(0.45)), c.f(c.f(0.45)), 1e-12));
    assert!(close(e.f(c.f(0.15)), c.f(c.f(0.15)), 1e-12));
    assert!((e.f(c.f(0.3)) - 0.3).abs() > 1e-6);
}

#[test]
fn mirror_integral_on_random_bumps() {
    let c = GraphDomain::circle();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let a = rng.gen_range(0.05..0.5);
        let w = rng.gen_range(0.05..0.15);
        let integral = rng.gen_range(-0.02..0.02);
        let b = make_bump_for(&c, BumpSpec { support: (a, a + w), plateau: None, integral }).unwrap();
        let amp = 0.5 * b.delta_max().min(1.0);
        let e = symmetric_extend(&c, vec![(b.clone(), amp)]).unwrap();
        let m = mirror_integral(&c, &e).unwrap();
        assert!(close(m, amp * b.integral(), 1e-8), "a={a} w={w}: {m} vs {}", amp * b.integral());
    }
}

#[test]
fn novolume_family() {
    let base = convex_family_base(10.0);
    let f = family_novolume(&base, 3, 0.01).unwrap();
    assert!(close(area(&f.perturbed) - area(&base), 0.01, 1e-8));
    for (a, b) in caps(&base, 30).iter().zip(caps(&f.perturbed, 30)) {
        assert!(close(*a, b, 1e-8));
    }
    let v = Domain::Graph(f.perturbed.clone()).validate();
    assert_eq!(v.get("concave_cap"), Some(true));
    assert_eq!(v.get("symmetric"), Some(true));
    let same = family_novolume(&base, 3, 0.0).unwrap();
    assert_eq!(area(&same.perturbed), area(&base));
    assert!(family_novolume(&base, 2, 0.01).is_err());
}

#[test]
fn mutual_family_moves_one_capacity() {
    for j in 1..=4 {
        let base = if j % 2 == 1 { convex_family_base(10.0) } else { concave_family_base(10.0) };
        let f = family_mutual(&base, j, 0.01).unwrap();
        let (c0, c1) = (caps(&base, 30), caps(&f.perturbed, 30));
        for k in 1..=30 {
            let shift = if k == j { 0.01 } else { 0.0 };
            assert!(close(c1[k - 1] - c0[k - 1], shift, 1e-8), "j={j} k={k}: {}", c1[k - 1] - c0[k - 1]);
        }
        assert!(close(area(&f.perturbed), area(&base), 1e-8), "j={j}");
        let same = family_mutual(&base, j, 0.0).unwrap();
        assert_eq!(caps(&same.perturbed, 6), caps(&base, 6));
    }
    assert!(family_mutual(&convex_family_base(10.0), 2, 0.01).is_err());
}

#[test]
fn blind_family() {
    for delta in [0.001, 0.005] {
        let f = family_blind(0.05, delta).unwrap();
        for (a, b) in caps(&f.base, 30).iter().zip(caps(&f.perturbed, 30)) {
            assert!(close(*a, b, 1e-8));
        }
        assert!(close(area(&f.base), area(&f.perturbed), 1e-8));
        let e0 = ech_capacity(&Domain::Graph(f.base.clone()), 9).unwrap().value;
        let e1 = ech_capacity(&Domain::Graph(f.perturbed.clone()), 9).unwrap().value;
        assert!(close(e1 - e0, delta, 1e-5), "δ={delta}: {}", e1 - e0);
    }
    let f = family_blind(0.05, 0.0).unwrap();
    assert_eq!(area(&f.base), area(&f.perturbed));
}

#[test]
fn blind_slopes_are_separated() {
    let f = family_blind(0.05, 0.001).unwrap();
    let h = &f.base;
    let p = blind_points(h).unwrap();
    assert!(close(h.df(p.y22), -3.0, 1e-8));
    let x = h.fixed_point().unwrap();
    assert!(close(h.df(x), -1.0, 1e-8));
    let x2 = h.solve_slope(-2.0).unwrap();
    let (a, b) = f.bump.support();
    assert!(p.y222 < a && b < p.y221);
    assert!(!(a..=b).contains(&x2) && !(a..=b).contains(&x));
    assert!(family_blind(0.5, 0.001).is_err());
}

#[test]
fn ivr_circle() {
    let c = GraphDomain::circle();
    let b = ivr_graph_bounds(&c, 400).unwrap();
    assert!(close(b.ratio, 1.0335, 1e-3), "{}", b.ratio);
    assert!(b.ratio >= 1.0);
    assert!(b.tail < 1e-3);
    // both bounding profiles carry the capacities of the circle
    let as_poly = |pts: &[[f64; 2]]| {
        let mut v: Vec<Vec<f64>> = pts.iter().map(|p| p.to_vec()).collect();
        v.push(vec![0.0, 0.0]);
        PolytopeDomain::new(v).unwrap()
    };
    let (lo, up) = (as_poly(&b.lower), as_poly(&b.upper));
    for k in 1..=25 {
        let c0 = gh_graph_symmetric(&c, k).unwrap().value;
        assert!(close(gh_polytope(&lo, k).unwrap().value, c0, 1e-6), "lower k={k}");
        assert!(close(gh_polytope(&up, k).unwrap().value, c0, 1e-6), "upper k={k}");
    }
}

#[test]
fn ivr_polytope_examples() {
    let r = (2.0f64 / 3.0).sqrt();
    assert!(close(ivr_polytope_bound(r, 20).unwrap(), 6.0 - 2.0 * 6f64.sqrt(), 1e-9));
    assert!(close(ivr_polytope_bound(2.0 / 3.0, 20).unwrap(), 1.0, 1e-12));
    assert!(ivr_polytope_bound(0.5, 20).is_err());
    let (p0, p1) = ivr_polytopes(0.85, 1.0, 0.55);
    for k in 1..=20 {
        assert!(close(gh_polytope(&p0, k).unwrap().value, gh_polytope(&p1, k).unwrap().value, 1e-12));
    }
}
