use capax::domains::{Curve, Domain, GraphDomain, PolytopeDomain};
use capax::echcap::ech_capacity;
use capax::ghcap::*;
use capax::oracle::lattice_ech_ellipsoid;
use proptest::prelude::*;

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

/// `conv({0} ∪ σ(P))` over all coordinate permutations σ.
fn symmetric_polytope(points: &[Vec<f64>]) -> PolytopeDomain {
    let n = points[0].len();
    let mut verts = vec![vec![0.0; n]];
    for p in points {
        let mut perm: Vec<usize> = (0..n).collect();
        loop {
            verts.push(perm.iter().map(|&i| p[i]).collect());
            if !capax::domains::next_permutation(&mut perm) {
                break;
            }
        }
    }
    PolytopeDomain::new(verts).unwrap()
}

fn points(n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(0.05f64..2.0, n), 1..4)
}

fn ordered(n: usize, max: u64) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0..=max, n).prop_map(|mut v| {
        v.sort_unstable();
        v
    })
}

fn convex_symmetric_catalog() -> Vec<Domain> {
    vec![
        Domain::Graph(GraphDomain::circle()),
        Domain::Graph(GraphDomain::lpball2(3.0).unwrap()),
        Domain::Graph(GraphDomain::arc_cap(1.0, 0.2).unwrap()),
        Domain::LpBall { n: 2, p: 4.0 },
        Domain::LpBall { n: 3, p: 3.0 },
        Domain::Simplex(vec![1.0, 1.0, 1.0]),
        Domain::Polytope(PolytopeDomain::diagonal(0.8)),
    ]
}

fn concave_symmetric_catalog() -> Vec<Domain> {
    vec![
        Domain::Curve(Curve::Alpha),
        Domain::Curve(Curve::gamma_eps(0.05).unwrap()),
        Domain::Graph(GraphDomain::arc_cup(1.0, 1.5).unwrap()),
        Domain::LpBall { n: 2, p: 1.5 },
        Domain::LpBall { n: 3, p: 1.2 },
    ]
}

fn to_f64(v: &[u64]) -> Vec<f64> {
    v.iter().map(|&x| x as f64).collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, ..ProptestConfig::default() })]

    #[test]
    fn transfer_lowers_support_max(pts in points(3), v in ordered(3, 12), two in any::<bool>()) {
        let n = if two { 2 } else { 3 };
        let pts: Vec<Vec<f64>> = pts.iter().map(|p| p[..n].to_vec()).collect();
        let mut v = v[..n].to_vec();
        v.sort_unstable();
        prop_assume!(v.iter().any(|&x| x > 0));
        let dom = Domain::Polytope(symmetric_polytope(&pts));
        let t = transfer(&v, Mode::Convex).unwrap();
        let before = dom.support_max(&to_f64(&v)).unwrap().value;
        let after = dom.support_max(&to_f64(&t)).unwrap().value;
        prop_assert!(after <= before + 1e-12 * (1.0 + before));
    }

    #[test]
    fn backwards_transfer_raises_support_min(idx in 0usize..5, v in ordered(3, 12)) {
        let dom = &concave_symmetric_catalog()[idx];
        let n = dom.dim();
        let mut v: Vec<u64> = v[..n].iter().map(|x| x + 1).collect();
        v.sort_unstable_by(|a, b| b.cmp(a));
        let b = transfer(&v, Mode::Concave).unwrap();
        let before = dom.support_min(&to_f64(&v)).unwrap().value;
        let after = dom.support_min(&to_f64(&b)).unwrap().value;
        prop_assert!(after >= before - 1e-9 * (1.0 + before), "{before} -> {after}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn support_is_homogeneous(s in 0.2f64..5.0, a in 0.5f64..3.0, pts in points(2), v in prop::collection::vec(0.0f64..4.0, 2)) {
        prop_assume!(v.iter().any(|&x| x > 1e-3));
        let simplex = |t: f64| Domain::Simplex(vec![t, t * a]);
        let poly = |t: f64| {
            let p: Vec<Vec<f64>> = pts.iter().map(|q| q.iter().map(|x| x * t).collect()).collect();
            Domain::Polytope(symmetric_polytope(&p))
        };
        let cap = |t: f64| Domain::Graph(GraphDomain::arc_cap(t, 0.2 * t).unwrap());
        let circle_poly = |t: f64| {
            // circle graph scaled as an inscribed polygon through the same nodes
            let verts: Vec<Vec<f64>> = (0..=32)
                .map(|i| {
                    let th = std::f64::consts::FRAC_PI_2 * i as f64 / 32.0;
                    vec![t * th.cos(), t * th.sin()]
                })
                .chain([vec![0.0, 0.0]])
                .collect();
            Domain::Polytope(PolytopeDomain::new(verts).unwrap())
        };
        for make in [&simplex as &dyn Fn(f64) -> Domain, &poly, &cap, &circle_poly] {
            let one = make(1.0).support_max(&v).unwrap().value;
            let scaled = make(s).support_max(&v).unwrap().value;
            prop_assert!(rel_close(scaled, s * one, 1e-9), "{scaled} vs {}", s * one);
        }
        let c = Domain::Graph(GraphDomain::circle()).support_max(&v).unwrap().value;
        let norm = (v[0] * v[0] + v[1] * v[1]).sqrt();
        prop_assert!(rel_close(c, norm, 1e-9));
    }

    #[test]
    fn support_is_permutation_invariant(idx in 0usize..7, v in prop::collection::vec(0.0f64..4.0, 3)) {
        prop_assume!(v.iter().any(|&x| x > 1e-3));
        let dom = &convex_symmetric_catalog()[idx];
        let n = dom.dim();
        let v = v[..n].to_vec();
        let mut rev = v.clone();
        rev.reverse();
        let a = dom.support_max(&v).unwrap().value;
        let b = dom.support_max(&rev).unwrap().value;
        prop_assert!(rel_close(a, b, 1e-9));
    }

    #[test]
    fn ordered_witness(idx in 0usize..7, jdx in 0usize..5, v in ordered(3, 9)) {
        let dom = &convex_symmetric_catalog()[idx];
        let n = dom.dim();
        let vs: Vec<f64> = to_f64(&v).iter().map(|x| x + 0.5).collect();
        let v = vs[..n].to_vec();
        let r = dom.support_max(&v).unwrap();
        let mut w = r.witness.clone();
        w.sort_by(f64::total_cmp);
        let dot: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        prop_assert!(rel_close(dot, r.value, 1e-9), "{dot} vs {}", r.value);
        let inner: Vec<f64> = w.iter().map(|x| x * (1.0 - 1e-6)).collect();
        prop_assert!(dom.contains(&inner).unwrap());

        let dom = &concave_symmetric_catalog()[jdx];
        let n = dom.dim();
        let v: Vec<f64> = vs[..n].to_vec();
        let r = dom.support_min(&v).unwrap();
        let mut w = r.witness.clone();
        w.sort_by(|a, b| b.total_cmp(a));
        let dot: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        prop_assert!(rel_close(dot, r.value, 1e-9), "{dot} vs {}", r.value);
    }

    #[test]
    fn inclusion_monotonicity(a in 0.5f64..3.0, b in 0.5f64..3.0, s in 1.0f64..2.0, p in 1.2f64..5.0, k in 1usize..15) {
        let small = gh_general(&Domain::Simplex(vec![a, b]), k).unwrap().value;
        let big = gh_general(&Domain::Simplex(vec![a * s, b]), k).unwrap().value;
        prop_assert!(small <= big + 1e-12);
        let g0 = GraphDomain::pellipse(p, a).unwrap();
        let g1 = GraphDomain::pellipse(p, a * s).unwrap();
        let small = gh_general(&Domain::Graph(g0), k).unwrap().value;
        let big = gh_general(&Domain::Graph(g1), k).unwrap().value;
        prop_assert!(small <= big + 1e-9);
        let small = gh_general(&Domain::Box(vec![a, b]), k).unwrap().value;
        let big = gh_general(&Domain::Box(vec![a * s, b * s]), k).unwrap().value;
        prop_assert!(small <= big + 1e-12);
    }
}

#[test]
fn monotone_in_k_across_catalog() {
    let mut doms = convex_symmetric_catalog();
    doms.extend(concave_symmetric_catalog());
    doms.push(Domain::Simplex(vec![1.0, std::f64::consts::E]));
    doms.push(Domain::Box(vec![1.0, 2.0, 3.0]));
    doms.push(Domain::Graph(GraphDomain::pellipse(1.5, 2.0).unwrap()));
    for d in &doms {
        let vals: Vec<f64> = (1..=40).map(|k| gh_general(d, k).unwrap().value).collect();
        for (k, w) in vals.windows(2).enumerate() {
            assert!(w[1] >= w[0] - 1e-9 * (1.0 + w[0]), "{d:?} k={}: {} > {}", k + 1, w[0], w[1]);
        }
    }
}

#[test]
fn inclusion_on_nested_concave_domains() {
    for k in 1..=20 {
        let inner = gh_general(&Domain::Curve(Curve::gamma_eps(0.05).unwrap()), k).unwrap().value;
        let outer = gh_general(&Domain::Curve(Curve::Alpha), k).unwrap().value;
        assert!(inner <= outer + 1e-9, "k={k}");
    }
}

#[test]
fn ech_lattice_cross_check() {
    for m in 1..=4u64 {
        let dom = Domain::Simplex(vec![1.0, m as f64]);
        for k in 1..=10 {
            let v = ech_capacity(&dom, k).unwrap().value;
            assert!((v - lattice_ech_ellipsoid(m, k)).abs() < 1e-12, "m={m} k={k}");
        }
    }
}
