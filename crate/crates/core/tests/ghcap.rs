use capax::domains::{Curve, Domain, GraphDomain, PolytopeDomain};
use capax::ghcap::*;
use capax::oracle::sorted_multiset_ellipsoid;
use std::f64::consts::{E, SQRT_2};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn balanced_vectors() {
    assert_eq!(balanced_vector(5, 2, Mode::Convex), vec![2, 3]);
    assert_eq!(balanced_vector(7, 3, Mode::Convex), vec![2, 2, 3]);
    assert_eq!(balanced_vector(4, 2, Mode::Concave), vec![3, 2]);
}

#[test]
fn general_formula_examples() {
    assert!(close(gh_general(&Domain::Box(vec![1.0, 2.0]), 5).unwrap().value, 5.0, 1e-12));
    let e12: Vec<f64> = (1..=6).map(|k| gh_general(&Domain::Simplex(vec![1.0, 2.0]), k).unwrap().value).collect();
    assert_eq!(e12, vec![1.0, 2.0, 2.0, 3.0, 4.0, 4.0]);
    assert!(close(gh_general(&Domain::Simplex(vec![1.0, 1.0]), 3).unwrap().value, 2.0, 1e-12));
}

#[test]
fn record_value_matches_carrier() {
    let doms = [
        Domain::Graph(GraphDomain::circle()),
        Domain::LpBall { n: 3, p: 3.0 },
        Domain::Curve(Curve::Alpha),
        Domain::Polytope(PolytopeDomain::diagonal(0.8)),
    ];
    for d in &doms {
        for k in 1..8 {
            let r = gh_general(d, k).unwrap();
            let dot: f64 = r.carrier_vector.iter().zip(&r.carrier_point).map(|(v, w)| *v as f64 * w).sum();
            assert!(close(dot, r.value, 1e-9), "{d:?} k={k}");
        }
    }
}

#[test]
fn composition_cap() {
    let e = gh_general(&Domain::Box(vec![1.0; 8]), 200);
    assert!(matches!(e, Err(capax::Error::TooManyCompositions(_))));
}

#[test]
fn symmetric_examples() {
    let r = gh_symmetric(&Domain::Simplex(vec![1.0, 1.0]), 4).unwrap();
    assert!(close(r.value, 2.0, 1e-12));
    assert_eq!(r.carrier_vector, vec![2, 2]);
    assert!(close(gh_symmetric(&Domain::LpBall { n: 2, p: 4.0 }, 3).unwrap().value, 5f64.sqrt(), 1e-12));
    assert!(close(gh_symmetric(&Domain::Polytope(PolytopeDomain::diagonal(0.75)), 2).unwrap().value, 1.5, 1e-12));
    assert!(gh_symmetric(&Domain::Box(vec![1.0, 2.0]), 2).is_err());
}

#[test]
fn graph_convex_examples() {
    let e = GraphDomain::pellipse(1.0, 2.0).unwrap();
    assert!(close(gh_graph_convex(&e, 3).unwrap().value, 2.0, 1e-12));
    let g = GraphDomain::pellipse(2.0, E).unwrap();
    let engine = gh_graph_convex(&g, 123).unwrap().value;
    let general = gh_general(&Domain::Graph(g), 123).unwrap().value;
    assert!(close(engine, general, 1e-8), "{engine} vs {general}");
    let g = GraphDomain::pellipse(10.0, 1.5).unwrap();
    assert!(close(gh_graph_convex(&g, 2).unwrap().value, 2.0, 1e-12));
}

#[test]
fn messy_minimiser_is_near_jk() {
    // the best ℓ over all of 1..k−1 lies in {J_k, J_k + 1}
    for &(p, a) in &[(1.5, 2.0), (2.0, E), (3.0, 1.2), (5.0, 1.0)] {
        let g = GraphDomain::pellipse(p, a).unwrap();
        let x = g.fixed_point().unwrap();
        for k in 2..25 {
            let jk = classify(k, g.df(x)).j;
            let mut best = (f64::INFINITY, 0);
            for l in 1..k {
                let s = -(l as f64) / (k - l) as f64;
                let xl = g.solve_slope(s).unwrap();
                let v = l as f64 * xl + (k - l) as f64 * g.f(xl);
                if v < best.0 {
                    best = (v, l);
                }
            }
            let lo = jk.clamp(1, k - 1);
            let hi = (jk + 1).clamp(1, k - 1);
            assert!(best.1 == lo || best.1 == hi, "p={p} a={a} k={k}: ℓ={} J={jk}", best.1);
        }
    }
}

#[test]
fn round_example() {
    let c = GraphDomain::circle();
    assert!(close(gh_graph_symmetric(&c, 4).unwrap().value, 2.0 * SQRT_2, 1e-12));
    assert!(close(gh_graph_symmetric(&c, 5).unwrap().value, 13f64.sqrt(), 1e-12));
    assert!(close(odd_carrier_x(&c, 5).unwrap(), 2.0 / 13f64.sqrt(), 1e-12));
}

#[test]
fn pellipsoid_examples() {
    assert!(close(gh_pellipsoid(2.0, 1.0, 3).unwrap().value, 5f64.sqrt(), 1e-12));
    // With a^p < k − 1 the best m beats k
    let (p, a, k) = (1.5f64, 2.0f64, 40usize);
    let r = p / (p - 1.0);
    let best = (1..k)
        .map(|m| ((a * (k - m) as f64).powf(r) + (m as f64).powf(r)).powf(1.0 / r))
        .fold(f64::INFINITY, f64::min);
    let v = gh_pellipsoid(p, a, k).unwrap().value;
    assert!(v < k as f64);
    assert!(close(v, best, 1e-9), "{v} vs {best}");
    // large p: c_k = k
    assert_eq!(gh_pellipsoid(60.0, 1.5, 7).unwrap().value, 7.0);
    // p → 1⁺ approaches the ellipsoid values
    for k in 1..=12 {
        let v = gh_pellipsoid(1.0 + 1e-9, 2.0, k).unwrap().value;
        assert!(close(v, sorted_multiset_ellipsoid(2.0, k), 1e-6), "k={k}: {v}");
    }
}

#[test]
fn lp_ball_examples() {
    assert!(close(gh_lp_ball(2, 4.0, 2).unwrap().value, SQRT_2, 1e-12));
    assert!(close(gh_lp_ball(2, 1.0, 3).unwrap().value, 1.0, 1e-12));
    assert!(close(gh_lp_ball(3, 4.0, 4).unwrap().value, 6f64.sqrt(), 1e-12));
    for k in 1..10 {
        let ball = gh_general(&Domain::Simplex(vec![1.0, 1.0]), k).unwrap().value;
        assert!(close(gh_lp_ball(2, 2.0, k).unwrap().value, ball, 1e-12));
    }
}

#[test]
fn polytope_examples() {
    assert!(close(gh_polytope(&PolytopeDomain::diagonal(0.75), 3).unwrap().value, 2.25, 1e-12));
    assert!(close(gh_polytope(&PolytopeDomain::diagonal(0.55), 3).unwrap().value, 2.0, 1e-12));
    let sq = PolytopeDomain::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap();
    assert!(close(gh_polytope(&sq, 7).unwrap().value, 7.0, 1e-12));
}

#[test]
fn lagrangian_bidisk() {
    assert_eq!(gh_lagrangian_bidisk(1).unwrap().value, 4.0);
    assert_eq!(gh_lagrangian_bidisk(3).unwrap().value, 8.0);
    assert!(close(gh_lagrangian_bidisk(2).unwrap().value, 3.0 * 3f64.sqrt(), 1e-9));
    for k in [2, 4, 6, 8] {
        assert!(close(gh_lagrangian_bidisk(k).unwrap().value, bidisk_even_closed(k), 1e-9));
    }
    // the printed even coefficient breaks monotonicity at k = 2
    assert!(bidisk_even_printed(2) > gh_lagrangian_bidisk(3).unwrap().value);
}

#[test]
fn or_curve_profile() {
    use capax::domains::{or_g, or_lambda};
    use statrs::function::gamma::gamma;
    for p in [1.5, 3.0] {
        let zero = or_g(p, 0.25f64.powf(1.0 / p));
        assert!(zero.abs() < 1e-9, "p={p}: {zero}");
        let expect = 2.0 * gamma(1.0 + 1.0 / p).powi(2) / gamma(1.0 + 2.0 / p);
        assert!(close(or_g(p, 0.0), expect, 1e-8));
        assert!(or_lambda(p) > 0.0);
    }
}

#[test]
fn or_bidisk_approaches_lagrangian() {
    // P_L(p) tends to the Lagrangian bidisk as p grows
    for k in 1..=4 {
        let lag = gh_lagrangian_bidisk(k).unwrap().value;
        let v = gh_or_lp_bidisk(64.0, k).unwrap().value;
        assert!((v - lag).abs() / lag < 0.05, "k={k}: {v} vs {lag}");
    }
    assert!(gh_or_lp_bidisk(2.0, 1).is_err());
}

#[test]
fn or_bidisk_matches_general_engine() {
    for &p in &[1.5, 3.0, 6.0] {
        let dom = Domain::Curve(Curve::or_curve(p).unwrap());
        for k in 1..=8 {
            let closed = gh_or_lp_bidisk(p, k).unwrap().value;
            let general = gh_general(&dom, k).unwrap().value;
            assert!(close(closed, general, 1e-7), "p={p} k={k}: {closed} vs {general}");
        }
    }
}

#[test]
fn ball_bounds_examples() {
    let (a, b) = ball_bounds(&Domain::Graph(GraphDomain::circle())).unwrap();
    assert!(close(a, 1.0, 1e-9) && close(b, SQRT_2, 1e-9));
    let (a, b) = ball_bounds(&Domain::Simplex(vec![1.0, 1.0])).unwrap();
    assert!(close(a, 1.0, 1e-9) && close(b, 1.0, 1e-9));
    let (a, b) = ball_bounds(&Domain::Polytope(PolytopeDomain::diagonal(0.75))).unwrap();
    assert!(close(a, 1.0, 1e-8) && close(b, 1.5, 1e-8));
}

#[test]
fn carrier_examples() {
    let cs = carriers(&GraphDomain::circle(), 4).unwrap();
    assert_eq!(cs[0].label, (0, 1));
    assert!(close(cs[0].point[0], 0.0, 1e-12) && close(cs[0].point[1], 1.0, 1e-12));
    assert_eq!(cs[2].label, (1, 2));
    assert!(close(cs[2].point[0], 1.0 / 5f64.sqrt(), 1e-12));
    assert!(close(cs[2].point[1], 2.0 / 5f64.sqrt(), 1e-12));
    assert_eq!(cs[3].label, (2, 2));
    assert!(close(cs[3].point[0], 1.0 / SQRT_2, 1e-12));
}

#[test]
fn odd_carriers_increase_to_fixed_point() {
    let g = GraphDomain::pellipse(3.0, 1.0).unwrap();
    let x = g.fixed_point().unwrap();
    let xs: Vec<f64> = (0..200).map(|i| odd_carrier_x(&g, 2 * i + 1).unwrap()).collect();
    assert!(xs.windows(2).all(|w| w[1] > w[0]));
    assert!(x - xs[199] < 1e-2 && xs[199] < x);
}

#[test]
fn transfer_reaches_balance() {
    let mut v = vec![0, 1, 11];
    let k = 12u64;
    let bound: f64 = v.iter().map(|&x| (x as f64 - k as f64 / 3.0).abs()).sum();
    let mut steps = 0;
    loop {
        let w = transfer(&v, Mode::Convex).unwrap();
        if w == v {
            break;
        }
        v = w;
        steps += 1;
    }
    assert_eq!(v, balanced_vector(k, 3, Mode::Convex));
    assert!(steps as f64 <= bound);
}
