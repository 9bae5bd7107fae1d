//! The acceptance criteria, one function each.

use std::f64::consts::{E, PI};
use std::time::Instant;

use capax::domains::{next_permutation, or_g};
use capax::echcap::{ech_capacity, node_tau, symmetric_tau_table, weight_expansion, Boundary};
use capax::families::{ivr_graph_bounds, ivr_polytope_bound};
use capax::ghcap::*;
use capax::oracle::{brute_gh, lattice_ech_ellipsoid, sorted_multiset_ellipsoid, GridSpec};
use capax::{Curve, Domain, GraphDomain, PolytopeDomain};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::function::gamma::gamma;

use crate::commands::{family_report, FamilyArgs, FamilyName};

pub struct Outcome {
    pub pass: bool,
    pub detail: String,
}

pub struct Criterion {
    pub id: u32,
    pub name: &'static str,
    pub tags: &'static [&'static str],
    pub run: fn(f64) -> Outcome,
}

pub struct Report {
    pub id: u32,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn fail(err: impl std::fmt::Display) -> Outcome {
    outcome(false, format!("error: {err}"))
}

macro_rules! tryo {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => return fail(e),
        }
    };
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion { id: 1, name: "ellipsoid and polydisk ground truth", tags: &["gh", "ellipsoid"], run: c1 },
        Criterion { id: 2, name: "symmetric collapse", tags: &["gh", "symmetric"], run: c2 },
        Criterion { id: 3, name: "round profile", tags: &["gh", "graph"], run: c3 },
        Criterion { id: 4, name: "Lagrangian bidisk", tags: &["gh", "bidisk"], run: c4 },
        Criterion { id: 5, name: "lp balls", tags: &["gh", "lp", "oracle"], run: c5 },
        Criterion { id: 6, name: "p-ellipsoid plateau", tags: &["gh", "pellipsoid"], run: c6 },
        Criterion { id: 7, name: "tau table", tags: &["ech", "tau"], run: c7 },
        Criterion { id: 8, name: "volume change with fixed capacities", tags: &["family", "novolume"], run: c8 },
        Criterion { id: 9, name: "single-capacity variation", tags: &["family", "mutual"], run: c9 },
        Criterion { id: 10, name: "capacity-blind ECH shift", tags: &["family", "blind", "ech"], run: c10 },
        Criterion { id: 11, name: "isocapacity volume ratios", tags: &["ivr"], run: c11 },
        Criterion { id: 12, name: "g_p quadrature", tags: &["gh", "quadrature"], run: c12 },
        Criterion { id: 13, name: "property suite", tags: &["properties", "ech"], run: c13 },
    ]
}

/// Runs every criterion whose name, tag or number contains one of `filters`
/// (all of them when `filters` is empty).
pub fn run(filters: &[String], tol_scale: f64) -> Vec<Report> {
    criteria()
        .into_iter()
        .filter(|c| {
            filters.is_empty()
                || filters.iter().any(|f| {
                    let f = f.to_lowercase();
                    c.name.to_lowercase().contains(&f) || c.tags.iter().any(|t| *t == f) || c.id.to_string() == f
                })
        })
        .map(|c| {
            let start = Instant::now();
            let o = (c.run)(tol_scale);
            Report { id: c.id, name: c.name, pass: o.pass, detail: o.detail, seconds: start.elapsed().as_secs_f64() }
        })
        .collect()
}

pub fn format_line(r: &Report, timing: bool) -> String {
    let status = if r.pass { "PASS" } else { "FAIL" };
    if timing {
        format!("{status} criterion {:>2} {} ({:.1}s): {}", r.id, r.name, r.seconds, r.detail)
    } else {
        format!("{status} criterion {:>2} {}: {}", r.id, r.name, r.detail)
    }
}

fn val(r: capax::Result<CapacityRecord>) -> capax::Result<f64> {
    r.map(|r| r.value)
}

// 1 -------------------------------------------------------------------------

fn c1(s: f64) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut box_ok = true;
    for a in [1.0, 2.0, E] {
        for k in 1..=50 {
            let v = tryo!(val(gh_general(&Domain::Simplex(vec![1.0, a]), k)));
            worst = worst.max((v - sorted_multiset_ellipsoid(a, k)).abs());
            box_ok &= tryo!(val(gh_general(&Domain::Box(vec![1.0, a]), k))) == k as f64;
        }
    }
    outcome(worst <= 1e-9 * s && box_ok, format!("max |E(1,a) − sort| = {worst:.2e}; polydisk c_k = k exactly: {box_ok}"))
}

// 2 -------------------------------------------------------------------------

fn symmetric_polytope(points: &[Vec<f64>]) -> PolytopeDomain {
    let n = points[0].len();
    let mut verts = vec![vec![0.0; n]];
    for p in points {
        let mut perm: Vec<usize> = (0..n).collect();
        loop {
            verts.push(perm.iter().map(|&i| p[i]).collect());
            if !next_permutation(&mut perm) {
                break;
            }
        }
    }
    PolytopeDomain { vertices: verts }
}

fn random_symmetric_polytopes(count: usize, seed: u64) -> Vec<PolytopeDomain> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let n = 2 + i % 2;
            let m = rng.gen_range(1..4);
            let pts: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| rng.gen_range(0.05..2.0)).collect()).collect();
            symmetric_polytope(&pts)
        })
        .collect()
}

fn symmetric_catalog() -> Vec<Domain> {
    vec![
        Domain::Graph(GraphDomain::circle()),
        Domain::Graph(GraphDomain::pellipse(3.0, 1.0).unwrap()),
        Domain::Graph(GraphDomain::lpball2(3.0).unwrap()),
        Domain::Graph(GraphDomain::lpball2(1.5).unwrap()),
        Domain::Graph(GraphDomain::arc_cap(1.0, 0.2).unwrap()),
        Domain::Graph(GraphDomain::arc_cup(1.0, 1.5).unwrap()),
        Domain::Curve(Curve::Alpha),
        Domain::Curve(Curve::gamma_eps(0.05).unwrap()),
        Domain::LpBall { n: 3, p: 3.0 },
        Domain::LpBall { n: 3, p: 1.5 },
    ]
}

fn c2(s: f64) -> Outcome {
    let mut doms: Vec<Domain> = random_symmetric_polytopes(10, 2).into_iter().map(Domain::Polytope).collect();
    doms.extend(symmetric_catalog());
    let diffs: Vec<capax::Result<f64>> = doms
        .par_iter()
        .map(|d| {
            let mut worst: f64 = 0.0;
            for k in 1..=20 {
                let a = gh_symmetric(d, k)?.value;
                let b = gh_general(d, k)?.value;
                worst = worst.max((a - b).abs() / (1.0 + b.abs()));
            }
            Ok(worst)
        })
        .collect();
    let mut worst: f64 = 0.0;
    for d in diffs {
        worst = worst.max(tryo!(d));
    }
    outcome(worst <= 1e-9 * s, format!("{} domains, k ≤ 20, max relative diff {worst:.2e}", doms.len()))
}

// 3 -------------------------------------------------------------------------

fn c3(s: f64) -> Outcome {
    let c = GraphDomain::circle();
    let (mut wv, mut wx): (f64, f64) = (0.0, 0.0);
    for k in 1..=40 {
        let kf = k as f64;
        let expect = if k % 2 == 0 { kf / 2f64.sqrt() } else { (kf * kf + 1.0).sqrt() / 2f64.sqrt() };
        wv = wv.max((tryo!(val(gh_graph_symmetric(&c, k))) - expect).abs());
        if k % 2 == 1 {
            let x = tryo!(odd_carrier_x(&c, k));
            wx = wx.max((x - (kf - 1.0) / (2.0 * kf * kf + 2.0).sqrt()).abs());
        }
    }
    outcome(wv <= 1e-8 * s && wx <= 1e-8 * s, format!("k ≤ 40: max value error {wv:.2e}, max carrier error {wx:.2e}"))
}

// 4 -------------------------------------------------------------------------

fn c4(s: f64) -> Outcome {
    let mut odd_ok = true;
    for k in (1..=21).step_by(2) {
        odd_ok &= tryo!(val(gh_lagrangian_bidisk(k))) == 2.0 * k as f64 + 2.0;
    }
    let evens: Vec<usize> = (2..=20).step_by(2).collect();
    let diffs: Vec<capax::Result<f64>> = evens
        .par_iter()
        .map(|&k| {
            let e = gh_lagrangian_bidisk(k)?.value;
            let b = brute_gh(&Domain::Curve(Curve::Alpha), k, GridSpec::default())?;
            Ok((e - b.value).abs())
        })
        .collect();
    let mut worst: f64 = 0.0;
    for d in diffs {
        worst = worst.max(tryo!(d));
    }
    let c2v = tryo!(val(gh_lagrangian_bidisk(2)));
    let k2 = (c2v - 3.0 * 3f64.sqrt()).abs();
    let printed = bidisk_even_printed(2);
    outcome(
        odd_ok && worst <= 1e-6 * s && k2 <= 1e-6 * s,
        format!(
            "odd k ≤ 21 equal 2k+2: {odd_ok}; even k ≤ 20 vs brute max diff {worst:.2e}; c_2 = {c2v:.9} (3√3 diff {k2:.1e}); \
             the printed even coefficient gives {printed:.5} at k = 2, above c_3 = 8, so even k use (2k+2)·sin(πk/(2k+2))"
        ),
    )
}

// 5 -------------------------------------------------------------------------

fn c5(s: f64) -> Outcome {
    let mut cases = Vec::new();
    for n in [2usize, 3] {
        for p in [1.0, 1.5, 3.0, 4.0] {
            for k in 1..=12 {
                cases.push((n, p, k));
            }
        }
    }
    let diffs: Vec<capax::Result<f64>> = cases
        .par_iter()
        .map(|&(n, p, k)| {
            let e = gh_lp_ball(n, p, k)?.value;
            let b = brute_gh(&Domain::LpBall { n, p }, k, GridSpec::default())?;
            Ok((e - b.value).abs())
        })
        .collect();
    let mut worst: f64 = 0.0;
    for d in diffs {
        worst = worst.max(tryo!(d));
    }
    // the gap to the polydisk values k shrinks as p grows
    let mut gaps = Vec::new();
    for p in [4.0, 8.0, 16.0, 32.0, 64.0] {
        let mut g: f64 = 0.0;
        for k in 1..=12 {
            g = g.max((tryo!(val(gh_lp_ball(2, p, k))) - k as f64).abs());
        }
        gaps.push(g);
    }
    let shrinking = gaps.windows(2).all(|w| w[1] < w[0]) && gaps[4] < gaps[0] / 10.0;
    // continuity through the round ball
    let (mut at2, mut near2): (f64, f64) = (0.0, 0.0);
    for k in 1..=12 {
        let ball = sorted_multiset_ellipsoid(1.0, k);
        at2 = at2.max((tryo!(val(gh_lp_ball(2, 2.0, k))) - ball).abs());
        for p in [2.0 - 1e-3, 2.0 + 1e-3] {
            near2 = near2.max((tryo!(val(gh_lp_ball(2, p, k))) - ball).abs() / k as f64);
        }
    }
    outcome(
        worst <= 1e-5 * s && shrinking && at2 <= 1e-3 * s && near2 <= 1e-3 * s,
        format!(
            "{} cases vs brute, max diff {worst:.2e}; max |c_k − k| for p = 4..64: {}; at p = 2 max diff {at2:.1e}, \
             at p = 2 ± 1e-3 max diff/k {near2:.1e}",
            cases.len(),
            gaps.iter().map(|g| format!("{g:.3}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

// 6 -------------------------------------------------------------------------

fn c6(_s: f64) -> Outcome {
    let (a, k) = (E, 123usize);
    let mut prev = f64::NEG_INFINITY;
    let mut monotone = true;
    let mut p_star = None;
    let mut plateau_holds = true;
    let mut p = 1.0;
    let mut first = 0.0;
    while p <= 8.0 + 1e-9 {
        let v = tryo!(val(gh_pellipsoid(p, a, k)));
        if p == 1.0 {
            first = v;
        }
        monotone &= v >= prev - 1e-9;
        if v == k as f64 {
            p_star.get_or_insert(p);
        } else if p_star.is_some() {
            plateau_holds = false;
        }
        prev = v;
        p += 0.01;
    }
    let below = (1..=10_000).find(|&k| gh_pellipsoid(1.5, a, k).map(|r| r.value < k as f64 - 1e-9).unwrap_or(false));
    outcome(
        monotone && p_star.is_some() && plateau_holds && below.is_some(),
        format!(
            "c_123 rises from {first:.4} to the plateau 123, reached at p* ≈ {:.2} (scan step 0.01); \
             p = 1.5 first drops below k at k = {}",
            p_star.unwrap_or(f64::NAN),
            below.map(|k| k.to_string()).unwrap_or("none".into())
        ),
    )
}

// 7 -------------------------------------------------------------------------

/// Closed forms at `ε = 0` with the ε coefficient each τ actually carries, and
/// the coefficient as printed where that differs.
fn tau_constants() -> Vec<(&'static str, f64, f64, f64, f64)> {
    let (r2, r3) = (2f64.sqrt(), 3f64.sqrt());
    let s = |x: f64| (PI * x).sin();
    // (label, exact, printed decimal, ε coefficient, printed ε coefficient)
    vec![
        ("", 4.0, 4.0, -2.0, -2.0),
        ("2", 3.0 * r3 - 4.0, 1.19615, -1.0, -1.0),
        ("22", 4.0 * r2 - 3.0 * r3, 0.46070, -1.0, -1.0),
        ("21", 10.0 * s(0.6) - 3.0 * r3 - 4.0, 0.31441, 0.0, 0.0),
        ("222", 10.0 * s(0.2) - 4.0 * r2, 0.22010, -1.0, -1.0),
        ("221", 14.0 * s(2.0 / 7.0) - 3.0 * r3 - 4.0 * r2, 0.09263, 0.0, 0.0),
        ("212", 16.0 * s(3.0 / 8.0) - 3.0 * r3 - 10.0 * s(0.6), 0.07535, 0.0, 1.0),
        ("211", 14.0 * s(3.0 / 7.0) - 4.0 - 10.0 * s(0.6), 0.13843, 0.0, 1.0),
    ]
}

fn c7(s: f64) -> Outcome {
    let eps = 0.05;
    let curve = tryo!(Curve::gamma_eps(eps));
    let h = tryo!(GraphDomain::from_curve(curve.clone()));
    let table = tryo!(symmetric_tau_table(&h));
    let base = Boundary::Curve(curve.clone());
    let consts = tau_constants();
    let (mut wt, mut we): (f64, f64) = (0.0, 0.0);
    let mut notes = Vec::new();
    for ((label, v), (l2, exact, printed, coef, printed_coef)) in table.iter().zip(&consts) {
        if label != l2 {
            return fail(format!("table order {label} vs {l2}"));
        }
        let expect = exact + coef * eps;
        wt = wt.max((v - expect).abs());
        we = we.max((tryo!(node_tau(&base, label)) - expect).abs());
        let digits = (exact - printed).abs();
        if digits > 5e-6 {
            notes.push(format!("τ{label} decimal printed {printed:.5}, closed form {exact:.5}"));
        }
        if coef != printed_coef {
            notes.push(format!("τ{label} carries {coef:+}ε, printed {printed_coef:+}ε"));
        }
    }
    // the expansion lists τ, τ2, τ1, τ22, τ11, τ21, τ12
    let e = tryo!(weight_expansion(&Domain::Curve(curve), 7)).values();
    let order = ["", "2", "2", "22", "22", "21", "21"];
    let mut wx: f64 = 0.0;
    for (w, l) in e.iter().zip(order) {
        let (_, exact, _, coef, _) = consts.iter().find(|c| c.0 == l).unwrap();
        wx = wx.max((w - (exact + coef * eps)).abs());
    }
    let pass = wt <= 1e-5 * s && we <= 1e-5 * s && wx <= 1e-5 * s;
    outcome(
        pass,
        format!(
            "ε = 0.05: table max error {wt:.1e}, engine {we:.1e}, expansion {wx:.1e}; {}",
            if notes.is_empty() { "printed constants agree".into() } else { notes.join("; ") }
        ),
    )
}

// 8-10 ----------------------------------------------------------------------

fn family_outcome(args: FamilyArgs) -> Result<(bool, String), crate::CliError> {
    let r = family_report(&args)?;
    let worst_gh =
        r.checks.iter().filter(|c| c.claim.starts_with("c_")).map(|c| c.residual).fold(0.0f64, f64::max);
    let area = r.checks.iter().find(|c| c.claim == "area shift").unwrap();
    let mut detail = format!("GH max residual {worst_gh:.1e}, area shift {:.10}", if area.measured.abs() < 5e-11 { 0.0 } else { area.measured });
    if let Some(e) = r.checks.iter().find(|c| c.claim.starts_with("ECH")) {
        detail.push_str(&format!(", ECH_9 shift {:.8}", e.measured));
    }
    Ok((r.pass, detail))
}

fn c8(s: f64) -> Outcome {
    let args = FamilyArgs { j: 3, delta: 0.01, tol_gh: 1e-8 * s, ..FamilyArgs::new(FamilyName::Novolume) };
    let (pass, detail) = tryo!(family_outcome(args));
    outcome(pass, format!("j = 3, δ = 0.01: {detail}"))
}

fn c9(s: f64) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for j in 1..=4 {
        let args = FamilyArgs { j, delta: 0.01, tol_gh: 1e-8 * s, ..FamilyArgs::new(FamilyName::Mutual) };
        let r = tryo!(family_report(&args));
        pass &= r.pass;
        let cj = &r.checks[j - 1];
        let others = r
            .checks
            .iter()
            .enumerate()
            .filter(|(i, c)| *i != j - 1 && c.claim.starts_with("c_"))
            .map(|(_, c)| c.residual)
            .fold(0.0f64, f64::max);
        parts.push(format!("j={j}: Δc_j = {:.10}, others ≤ {others:.1e}", cj.measured));
    }
    outcome(pass, parts.join("; "))
}

fn c10(s: f64) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for delta in [0.001, 0.005] {
        let args =
            FamilyArgs { delta, eps: 0.05, tol_gh: 1e-8 * s, tol_ech: 1e-5 * s, ..FamilyArgs::new(FamilyName::Blind) };
        let (p, d) = tryo!(family_outcome(args));
        pass &= p;
        parts.push(format!("δ = {delta}: {d}"));
    }
    outcome(pass, parts.join("; "))
}

// 11 ------------------------------------------------------------------------

fn c11(s: f64) -> Outcome {
    let b = tryo!(ivr_graph_bounds(&GraphDomain::circle(), 400));
    let r = (2.0f64 / 3.0).sqrt();
    let poly = tryo!(ivr_polytope_bound(r, 20));
    let expect = 6.0 - 2.0 * 6f64.sqrt();
    let pass = (b.ratio - 1.0335).abs() <= 1e-3 * s && (poly - expect).abs() <= 1e-9 * s;
    outcome(
        pass,
        format!(
            "circle ratio {:.5} (truncation bar {:.1e}, within 1e-3 of 1.0335); polytope bound {poly:.9} vs 6 − 2√6 = {expect:.9}, \
             isocapacity check k ≤ 20 passed",
            b.ratio, b.tail
        ),
    )
}

// 12 ------------------------------------------------------------------------

fn c12(s: f64) -> Outcome {
    let mut worst: f64 = 0.0;
    for p in [1.2, 1.5, 3.0, 5.0] {
        let expect = 2.0 * gamma(1.0 + 1.0 / p).powi(2) / gamma(1.0 + 2.0 / p);
        worst = worst.max((or_g(p, 0.0) - expect).abs());
    }
    outcome(worst <= 1e-6 * s, format!("max |g_p(0) − 2Γ(1+1/p)²/Γ(1+2/p)| = {worst:.1e}"))
}

// 13 ------------------------------------------------------------------------

fn concave_catalog() -> Vec<Domain> {
    vec![
        Domain::Curve(Curve::Alpha),
        Domain::Curve(Curve::gamma_eps(0.05).unwrap()),
        Domain::Graph(GraphDomain::arc_cup(1.0, 1.5).unwrap()),
        Domain::LpBall { n: 2, p: 1.5 },
        Domain::LpBall { n: 3, p: 1.2 },
    ]
}

fn convex_catalog() -> Vec<Domain> {
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

fn ordered_vec(rng: &mut ChaCha8Rng, n: usize, lo: u64, ascending: bool) -> Vec<u64> {
    let mut v: Vec<u64> = (0..n).map(|_| rng.gen_range(lo..=12)).collect();
    v.sort_unstable();
    if !ascending {
        v.reverse();
    }
    v
}

fn f64s(v: &[u64]) -> Vec<f64> {
    v.iter().map(|&x| x as f64).collect()
}

fn transfer_pairs(count: usize) -> capax::Result<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let polys = random_symmetric_polytopes(50, 17);
    let concave = concave_catalog();
    let mut bad = 0;
    for i in 0..count {
        if i % 2 == 0 {
            let dom = Domain::Polytope(polys[rng.gen_range(0..polys.len())].clone());
            let v = ordered_vec(&mut rng, dom.dim(), 0, true);
            if v.iter().all(|&x| x == 0) {
                continue;
            }
            let t = transfer(&v, Mode::Convex)?;
            if dom.support_max(&f64s(&t))?.value > dom.support_max(&f64s(&v))?.value * (1.0 + 1e-12) + 1e-12 {
                bad += 1;
            }
        } else {
            let dom = &concave[rng.gen_range(0..concave.len())];
            let v = ordered_vec(&mut rng, dom.dim(), 1, false);
            let b = transfer(&v, Mode::Concave)?;
            if dom.support_min(&f64s(&b))?.value < dom.support_min(&f64s(&v))?.value * (1.0 - 1e-9) - 1e-12 {
                bad += 1;
            }
        }
    }
    Ok(bad)
}

fn monotonicity() -> capax::Result<usize> {
    let mut doms = convex_catalog();
    doms.extend(concave_catalog());
    doms.push(Domain::Simplex(vec![1.0, E]));
    doms.push(Domain::Box(vec![1.0, 2.0, 3.0]));
    let mut bad = 0;
    for d in &doms {
        let mut prev = f64::NEG_INFINITY;
        for k in 1..=40 {
            let v = gh_general(d, k)?.value;
            if v < prev - 1e-9 * (1.0 + prev.abs()) {
                bad += 1;
            }
            prev = v;
        }
    }
    // nested pairs
    let nested = [
        (Domain::Simplex(vec![1.0, 2.0]), Domain::Simplex(vec![1.5, 2.0])),
        (Domain::Graph(GraphDomain::pellipse(3.0, 1.0)?), Domain::Graph(GraphDomain::pellipse(3.0, 1.4)?)),
        (Domain::Curve(Curve::gamma_eps(0.05)?), Domain::Curve(Curve::Alpha)),
        (Domain::LpBall { n: 2, p: 1.5 }, Domain::LpBall { n: 2, p: 3.0 }),
    ];
    for (small, big) in &nested {
        for k in 1..=20 {
            if gh_general(small, k)?.value > gh_general(big, k)?.value + 1e-9 {
                bad += 1;
            }
        }
    }
    Ok(bad)
}

fn ordered_witnesses() -> capax::Result<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut bad = 0;
    for dom in convex_catalog() {
        for _ in 0..20 {
            let v: Vec<f64> = f64s(&ordered_vec(&mut rng, dom.dim(), 0, true)).iter().map(|x| x + 0.5).collect();
            let r = dom.support_max(&v)?;
            let mut w = r.witness.clone();
            w.sort_by(f64::total_cmp);
            let dot: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
            let inner: Vec<f64> = w.iter().map(|x| x * (1.0 - 1e-6)).collect();
            if (dot - r.value).abs() > 1e-9 * (1.0 + r.value) || !dom.contains(&inner)? {
                bad += 1;
            }
        }
    }
    for dom in concave_catalog() {
        for _ in 0..20 {
            let v: Vec<f64> = f64s(&ordered_vec(&mut rng, dom.dim(), 0, true)).iter().map(|x| x + 0.5).collect();
            let r = dom.support_min(&v)?;
            let mut w = r.witness.clone();
            w.sort_by(|a, b| b.total_cmp(a));
            let dot: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
            if (dot - r.value).abs() > 1e-9 * (1.0 + r.value) {
                bad += 1;
            }
        }
    }
    Ok(bad)
}

fn ech_lattice() -> capax::Result<usize> {
    let mut bad = 0;
    for m in 1..=4u64 {
        let dom = Domain::Simplex(vec![1.0, m as f64]);
        for k in 1..=10 {
            if (ech_capacity(&dom, k)?.value - lattice_ech_ellipsoid(m, k)).abs() > 1e-12 {
                bad += 1;
            }
        }
    }
    Ok(bad)
}

fn c13(_s: f64) -> Outcome {
    let t = tryo!(transfer_pairs(1000));
    let m = tryo!(monotonicity());
    let w = tryo!(ordered_witnesses());
    let e = tryo!(ech_lattice());
    outcome(
        t + m + w + e == 0,
        format!(
            "violations: transfer {t}/1000, monotonicity {m}, ordered witness {w}, ECH lattice {e} (E(1,m), m ≤ 4, k ≤ 10)"
        ),
    )
}
