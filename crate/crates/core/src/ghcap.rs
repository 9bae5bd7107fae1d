//! Gutt–Hutchings capacities: the composition formulas, their collapse for
//! symmetric domains, graph reductions and the closed-form catalogue.

use std::f64::consts::PI;

use crate::domains::{or_c, or_g, or_g_prime, or_lambda, Curvature, Curve, Domain, GraphDomain, PolytopeDomain, Profile};
use crate::numeric::brent;
use crate::{invalid, Error, Result};

/// Largest number of compositions the general formula will enumerate.
pub const COMPOSITION_CAP: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct CapacityRecord {
    pub k: usize,
    pub value: f64,
    pub carrier_vector: Vec<u64>,
    pub carrier_point: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Convex,
    Concave,
}

pub fn mode_of(dom: &Domain) -> Result<Mode> {
    if dom.is_convex() {
        Ok(Mode::Convex)
    } else if dom.is_concave() {
        Ok(Mode::Concave)
    } else {
        invalid("domain is neither convex nor concave")
    }
}

/// `V(k, n)` (convex) or `V̌(k, n)` (concave).
pub fn balanced_vector(k: u64, n: usize, mode: Mode) -> Vec<u64> {
    let nn = n as u64;
    match mode {
        Mode::Convex => {
            let (q, r) = (k / nn, k % nn);
            let mut v = vec![q; n - r as usize];
            v.extend(std::iter::repeat(q + 1).take(r as usize));
            v
        }
        Mode::Concave => {
            let kp = k + nn - 1;
            let (q, r) = (kp / nn, kp % nn);
            let mut v = vec![q + 1; r as usize];
            v.extend(std::iter::repeat(q).take(n - r as usize));
            v
        }
    }
}

fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return acc;
        }
    }
    acc
}

/// Number of vectors the general formula visits.
pub fn composition_count(k: u64, n: usize, mode: Mode) -> u128 {
    let n = n as u64;
    match mode {
        Mode::Convex => binomial(k + n - 1, n - 1),
        Mode::Concave => binomial(k + n - 2, n - 1),
    }
}

/// Calls `visit` on every weak composition of `total` into `n` parts, in colex order.
pub fn for_each_composition(total: u64, n: usize, mut visit: impl FnMut(&[u64])) {
    let mut v = vec![0u64; n];
    fn rec(v: &mut [u64], pos: usize, left: u64, visit: &mut dyn FnMut(&[u64])) {
        if pos == 0 {
            v[0] = left;
            visit(v);
            return;
        }
        for x in 0..=left {
            v[pos] = x;
            rec(v, pos - 1, left - x, visit);
        }
    }
    rec(&mut v, n - 1, total, &mut visit);
}

fn better(val: f64, v: &[u64], best: &Option<CapacityRecord>, minimize: bool) -> bool {
    match best {
        None => true,
        Some(b) => {
            let tol = 1e-12 * b.value.abs().max(1.0);
            if (val - b.value).abs() <= tol {
                v < b.carrier_vector.as_slice()
            } else if minimize {
                val < b.value
            } else {
                val > b.value
            }
        }
    }
}

/// `c_k` by the composition formulas: min over `Σv = k` of `max⟨v,·⟩` (convex),
/// max over `Σv = k+n−1`, `v ≥ 1` of `min⟨v,·⟩` (concave).
pub fn gh_general(dom: &Domain, k: usize) -> Result<CapacityRecord> {
    gh_general_as(dom, k, mode_of(dom)?)
}

pub fn gh_general_as(dom: &Domain, k: usize, mode: Mode) -> Result<CapacityRecord> {
    if k == 0 {
        return invalid("k must be positive");
    }
    let n = dom.dim();
    let count = composition_count(k as u64, n, mode);
    if count > COMPOSITION_CAP {
        return Err(Error::TooManyCompositions(count));
    }
    let mut best: Option<CapacityRecord> = None;
    let mut err: Option<Error> = None;
    let (total, offset) = match mode {
        Mode::Convex => (k as u64, 0),
        Mode::Concave => (k as u64 - 1, 1),
    };
    for_each_composition(total, n, |w| {
        if err.is_some() {
            return;
        }
        let v: Vec<u64> = w.iter().map(|x| x + offset).collect();
        let vf: Vec<f64> = v.iter().map(|&x| x as f64).collect();
        let r = match mode {
            Mode::Convex => dom.support_max(&vf),
            Mode::Concave => dom.support_min(&vf),
        };
        match r {
            Ok(s) => {
                if better(s.value, &v, &best, mode == Mode::Convex) {
                    best = Some(CapacityRecord { k, value: s.value, carrier_vector: v, carrier_point: s.witness });
                }
            }
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(best.expect("at least one composition"))
}

/// `c_k` of a symmetric domain from the single balanced vector.
pub fn gh_symmetric(dom: &Domain, k: usize) -> Result<CapacityRecord> {
    if k == 0 {
        return invalid("k must be positive");
    }
    if !dom.is_symmetric() {
        return invalid("domain is not symmetric");
    }
    let mode = mode_of(dom)?;
    let v = balanced_vector(k as u64, dom.dim(), mode);
    let vf: Vec<f64> = v.iter().map(|&x| x as f64).collect();
    let s = match mode {
        Mode::Convex => dom.support_max(&vf)?,
        Mode::Concave => dom.support_min(&vf)?,
    };
    Ok(CapacityRecord { k, value: s.value, carrier_vector: v, carrier_point: s.witness })
}

// ---------------------------------------------------------------------------
// Two-dimensional graphs

/// Which interval `I^k_j` contains the slope at the fixed point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JkClassification {
    pub k: usize,
    pub j: usize,
    pub slope_at_fixed_point: f64,
}

/// `I^k_j = (−(j+1)/(k−j−1), −j/(k−j)]` for `j ≤ k−2`, `I^k_{k−1} = (−∞, −k+1]`.
pub fn interval(k: usize, j: usize) -> (f64, f64) {
    if j + 1 >= k {
        (f64::NEG_INFINITY, -(k as f64) + 1.0)
    } else {
        let (jf, kf) = (j as f64, k as f64);
        (-(jf + 1.0) / (kf - jf - 1.0), -jf / (kf - jf))
    }
}

pub fn classify(k: usize, slope: f64) -> JkClassification {
    let j = (0..k.saturating_sub(1))
        .find(|&j| {
            let (lo, hi) = interval(k, j);
            slope > lo && slope <= hi
        })
        .unwrap_or(k - 1);
    JkClassification { k, j, slope_at_fixed_point: slope }
}

/// Membership in the class of profiles on `[0, 1]` with `f(0) ≥ 1`,
/// `f′(0) = 0`, `f″ < 0` and `f′ → −∞` at 1.
pub fn in_class_v(g: &GraphDomain) -> bool {
    g.curvature == Curvature::ConcaveCap
        && (g.lambda - 1.0).abs() < 1e-12
        && g.height() >= 1.0 - 1e-12
        && g.df(0.0).abs() < 1e-12
        && g.df(1.0 - 1e-10) < -1e2
        && !g.is_polyline()
}

fn graph_record(g: &GraphDomain, k: usize, l: usize, x: f64) -> CapacityRecord {
    let y = g.f(x);
    CapacityRecord {
        k,
        value: l as f64 * x + (k - l) as f64 * y,
        carrier_vector: vec![l as u64, (k - l) as u64],
        carrier_point: vec![x, y],
    }
}

/// `c_k = min{k, F(k, f)}` for profiles in the class above.
pub fn gh_graph_convex(g: &GraphDomain, k: usize) -> Result<CapacityRecord> {
    if k == 0 {
        return invalid("k must be positive");
    }
    if let Profile::PEllipse { p, a } = g.profile {
        if p == 1.0 {
            return gh_general(&Domain::Simplex(vec![1.0, a]), k);
        }
    }
    if !in_class_v(g) {
        return invalid("profile outside the class required by the messy formula");
    }
    let edge = |l: usize| CapacityRecord {
        k,
        value: if l == 0 { k as f64 * g.height() } else { k as f64 },
        carrier_vector: vec![l as u64, (k - l) as u64],
        carrier_point: if l == 0 { vec![0.0, g.height()] } else { vec![1.0, 0.0] },
    };
    let mut cands = vec![edge(0), edge(k)];
    if k >= 2 {
        let x = g.fixed_point()?;
        let jk = classify(k, g.df(x));
        let ells: Vec<usize> = if jk.j == 0 {
            vec![1]
        } else if jk.j == k - 1 {
            vec![k - 1]
        } else {
            vec![jk.j, jk.j + 1]
        };
        for l in ells {
            let xl = g.solve_slope(-(l as f64) / (k - l) as f64)?;
            cands.push(graph_record(g, k, l, xl));
        }
    }
    Ok(pick_min(cands))
}

fn pick_min(cands: Vec<CapacityRecord>) -> CapacityRecord {
    let mut best: Option<CapacityRecord> = None;
    for c in cands {
        if better(c.value, &c.carrier_vector, &best, true) {
            best = Some(c);
        }
    }
    best.unwrap()
}

/// Carrier `x_k` for odd `k` on a concave-cap profile: `f′(x_k) = −(k−1)/(k+1)`.
pub fn odd_carrier_x(g: &GraphDomain, k: usize) -> Result<f64> {
    g.solve_slope(-((k - 1) as f64) / (k + 1) as f64)
}

/// Carrier `x̌_k` for even `k` on a convex-cup profile: `h′(x̌_k) = −(k+2)/k`.
pub fn even_carrier_x(h: &GraphDomain, k: usize) -> Result<f64> {
    h.solve_slope(-((k + 2) as f64) / k as f64)
}

/// Closed-form capacities of a symmetric graph domain.
pub fn gh_graph_symmetric(g: &GraphDomain, k: usize) -> Result<CapacityRecord> {
    if k == 0 {
        return invalid("k must be positive");
    }
    if !g.symmetric {
        return invalid("profile is not symmetric");
    }
    if g.is_polyline() {
        return gh_symmetric(&Domain::Graph(g.clone()), k);
    }
    let kf = k as f64;
    let lam = g.lambda;
    let rec = |v: Vec<u64>, p: [f64; 2]| CapacityRecord {
        k,
        value: v[0] as f64 * p[0] + v[1] as f64 * p[1],
        carrier_vector: v,
        carrier_point: p.to_vec(),
    };
    let k64 = k as u64;
    Ok(match g.curvature {
        Curvature::ConcaveCap => {
            if k % 2 == 0 {
                let x = g.fixed_point()?;
                rec(vec![k64 / 2, k64 / 2], [x, x])
            } else {
                let v = vec![(k64 - 1) / 2, (k64 + 1) / 2];
                if g.df(0.0) > -(kf - 1.0) / (kf + 1.0) {
                    let x = odd_carrier_x(g, k)?;
                    rec(v, [x, g.f(x)])
                } else {
                    rec(v, [0.0, lam])
                }
            }
        }
        Curvature::ConvexCup => {
            if k % 2 == 1 {
                let x = g.fixed_point()?;
                rec(vec![(k64 + 1) / 2, (k64 + 1) / 2], [x, x])
            } else {
                let v = vec![(k64 + 2) / 2, k64 / 2];
                if g.df(lam) > -kf / (kf + 2.0) {
                    let x = even_carrier_x(g, k)?;
                    rec(v, [x, g.f(x)])
                } else {
                    rec(v, [0.0, lam])
                }
            }
        }
    })
}

/// Carrier point and torus label behind `c_k` of a symmetric graph domain.
#[derive(Clone, Debug, PartialEq)]
pub struct Carrier {
    pub k: usize,
    pub point: [f64; 2],
    pub label: (u64, u64),
}

pub fn carriers(g: &GraphDomain, k_max: usize) -> Result<Vec<Carrier>> {
    (1..=k_max)
        .map(|k| {
            let r = gh_graph_symmetric(g, k)?;
            Ok(Carrier {
                k,
                point: [r.carrier_point[0], r.carrier_point[1]],
                label: (r.carrier_vector[0], r.carrier_vector[1]),
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Closed forms

fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// `c_k(E_p(1, a))` from the messy formula with closed-form carriers.
pub fn gh_pellipsoid(p: f64, a: f64, k: usize) -> Result<CapacityRecord> {
    if !(p >= 1.0) || !p.is_finite() {
        return invalid(format!("p = {p} must be at least 1"));
    }
    if !(a >= 1.0) {
        return invalid(format!("a = {a} must be at least 1"));
    }
    if k == 0 {
        return invalid("k must be positive");
    }
    if p == 1.0 {
        return gh_general(&Domain::Simplex(vec![1.0, a]), k);
    }
    let point = |l: usize| {
        // x_ℓ and f(x_ℓ) in log space, stable as p → 1
        let ln_r = (l as f64 / ((k - l) as f64 * a)).ln();
        let z = p * ln_r / (p - 1.0);
        let sp = softplus(z) / p;
        let x = (ln_r / (p - 1.0) - sp).exp();
        let y = a * (-sp).exp();
        (x, y)
    };
    let mut cands = vec![
        CapacityRecord { k, value: k as f64 * a, carrier_vector: vec![0, k as u64], carrier_point: vec![0.0, a] },
        CapacityRecord { k, value: k as f64, carrier_vector: vec![k as u64, 0], carrier_point: vec![1.0, 0.0] },
    ];
    if k >= 2 {
        // f′(x(f)) = −a^p
        let jk = classify(k, -(p * a.ln()).exp());
        let ells: Vec<usize> = if jk.j == 0 {
            vec![1]
        } else if jk.j == k - 1 {
            vec![k - 1]
        } else {
            vec![jk.j, jk.j + 1]
        };
        for l in ells {
            let (x, y) = point(l);
            cands.push(CapacityRecord {
                k,
                value: l as f64 * x + (k - l) as f64 * y,
                carrier_vector: vec![l as u64, (k - l) as u64],
                carrier_point: vec![x, y],
            });
        }
    }
    Ok(pick_min(cands))
}

/// `c_k(B^n_p)`, the moment image `{Σ x_i^{p/2} ≤ 1}`.
pub fn gh_lp_ball(n: usize, p: f64, k: usize) -> Result<CapacityRecord> {
    if n < 1 || k == 0 || !(p > 0.0) {
        return invalid("lp ball needs n ≥ 1, k ≥ 1, p > 0");
    }
    if p == 2.0 {
        return gh_general(&Domain::Simplex(vec![1.0; n]), k);
    }
    let e = p / (p - 2.0);
    let mode = if p > 2.0 { Mode::Convex } else { Mode::Concave };
    let v = balanced_vector(k as u64, n, mode);
    // scaled by the dominant entry so that e = p/(p−2) near ±∞ stays finite
    let top = if e > 0.0 { *v.iter().max().unwrap() } else { *v.iter().min().unwrap() } as f64;
    let value = top * v.iter().map(|&x| (x as f64 / top).powf(e)).sum::<f64>().powf(1.0 / e);
    let dom = Domain::LpBall { n, p };
    let vf: Vec<f64> = v.iter().map(|&x| x as f64).collect();
    let witness = match mode {
        Mode::Convex => dom.support_max(&vf)?.witness,
        Mode::Concave => dom.support_min(&vf)?.witness,
    };
    Ok(CapacityRecord { k, value, carrier_vector: v, carrier_point: witness })
}

/// `c_k` of a symmetric convex polytope: the largest `⟨V(k,n), p_j⟩`.
pub fn gh_polytope(poly: &PolytopeDomain, k: usize) -> Result<CapacityRecord> {
    if k == 0 {
        return invalid("k must be positive");
    }
    if !poly.is_symmetric() {
        return invalid("polytope is not symmetric");
    }
    let v = balanced_vector(k as u64, poly.dim(), Mode::Convex);
    let mut best = (f64::NEG_INFINITY, 0);
    for (i, p) in poly.vertices.iter().enumerate() {
        let s: f64 = v.iter().zip(p).map(|(&a, b)| a as f64 * b).sum();
        if s > best.0 {
            best = (s, i);
        }
    }
    Ok(CapacityRecord { k, value: best.0, carrier_vector: v, carrier_point: poly.vertices[best.1].clone() })
}

/// Even-`k` closed form `(2k+2)·sin(πk/(2k+2))` for the Lagrangian bidisk.
pub fn bidisk_even_closed(k: usize) -> f64 {
    let kf = k as f64;
    (2.0 * kf + 2.0) * (PI * kf / (2.0 * kf + 2.0)).sin()
}

/// The even-`k` expression `(4k+2)·sin(π(k+2)/(2k+2))` as commonly printed; it
/// overshoots `c₃ = 8` already at `k = 2` and is kept only for comparison.
pub fn bidisk_even_printed(k: usize) -> f64 {
    let kf = k as f64;
    (4.0 * kf + 2.0) * (0.5 * PI * (kf + 2.0) / (kf + 1.0)).sin()
}

/// `c_k` of the Lagrangian bidisk through its concave toric model.
pub fn gh_lagrangian_bidisk(k: usize) -> Result<CapacityRecord> {
    if k == 0 {
        return invalid("k must be positive");
    }
    if k % 2 == 1 {
        let h = (k as u64 + 1) / 2;
        return Ok(CapacityRecord {
            k,
            value: 2.0 * k as f64 + 2.0,
            carrier_vector: vec![h, h],
            carrier_point: vec![2.0, 2.0],
        });
    }
    gh_symmetric(&Domain::Curve(Curve::Alpha), k)
}

/// `c_k` of the ℓᵖ-sum of two Lagrangian disks from the case formulas.
pub fn gh_or_lp_bidisk(p: f64, k: usize) -> Result<CapacityRecord> {
    if k == 0 {
        return invalid("k must be positive");
    }
    Curve::or_curve(p)?;
    let g0 = or_g(p, 0.0);
    let lam = or_lambda(p);
    let s = (2.0 / p).sqrt();
    let k64 = k as u64;
    let kf = k as f64;
    let rec = |v: Vec<u64>, pt: [f64; 2]| CapacityRecord {
        k,
        value: v[0] as f64 * pt[0] + v[1] as f64 * pt[1],
        carrier_vector: v,
        carrier_point: pt.to_vec(),
    };
    let root = |target: f64| brent(|u| or_g_prime(p, u) - target, 0.0, or_c(p), 1e-13);
    if p < 2.0 {
        if k % 2 == 0 {
            return Ok(rec(vec![k64 / 2, k64 / 2], [g0, g0]));
        }
        let v = vec![(k64 - 1) / 2, (k64 + 1) / 2];
        if kf < 1.0 / (s - 1.0) {
            return Ok(rec(v, [0.0, lam]));
        }
        let u = root(-PI * (kf + 1.0) / kf)?;
        let g = or_g(p, u);
        let mut r = rec(v, [g, 2.0 * PI * u + g]);
        r.value = kf * g + (kf + 1.0) * PI * u;
        Ok(r)
    } else {
        if k % 2 == 1 {
            return Ok(rec(vec![(k64 + 1) / 2, (k64 + 1) / 2], [g0, g0]));
        }
        let v = vec![(k64 + 2) / 2, k64 / 2];
        if kf < s / (1.0 - s) {
            return Ok(rec(v, [0.0, lam]));
        }
        let u = root(-PI * kf / (kf + 1.0))?;
        let g = or_g(p, u);
        let mut r = rec(v, [g, 2.0 * PI * u + g]);
        r.value = (kf + 1.0) * g + kf * PI * u;
        Ok(r)
    }
}

/// `(max{δ : δe_n ∈ Ω}, n·max{δ : (δ,…,δ) ∈ Ω})` by bisection on membership.
pub fn ball_bounds(dom: &Domain) -> Result<(f64, f64)> {
    let n = dom.dim();
    let ray = |dir: &dyn Fn(f64) -> Vec<f64>| -> Result<f64> {
        let mut hi = 1.0;
        let mut tries = 0;
        while dom.contains(&dir(hi))? {
            hi *= 2.0;
            tries += 1;
            if tries > 60 {
                return invalid("domain looks unbounded along the ray");
            }
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if dom.contains(&dir(mid))? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    };
    let a_sup = ray(&|t| {
        let mut v = vec![0.0; n];
        v[n - 1] = t;
        v
    })?;
    let diag = ray(&|t| vec![t; n])?;
    Ok((a_sup, n as f64 * diag))
}

// ---------------------------------------------------------------------------
// Transfer maps

/// One step of `𝒯` (convex, ascending input) or `ℬ` (concave, descending input).
pub fn transfer(v: &[u64], mode: Mode) -> Result<Vec<u64>> {
    let n = v.len();
    if n == 0 {
        return invalid("empty vector");
    }
    let mut w = v.to_vec();
    match mode {
        Mode::Convex => {
            if v.windows(2).any(|p| p[0] > p[1]) {
                return invalid("transfer needs a nondecreasing vector");
            }
            if w[n - 1] > w[0] + 1 {
                w[0] += 1;
                w[n - 1] -= 1;
                w.sort_unstable();
            }
        }
        Mode::Concave => {
            if v.windows(2).any(|p| p[0] < p[1]) {
                return invalid("backwards transfer needs a nonincreasing vector");
            }
            if w[0] > w[n - 1] + 1 {
                w[0] -= 1;
                w[n - 1] += 1;
                w.sort_unstable_by(|a, b| b.cmp(a));
            }
        }
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_vectors() {
        assert_eq!(balanced_vector(5, 2, Mode::Convex), vec![2, 3]);
        assert_eq!(balanced_vector(7, 3, Mode::Convex), vec![2, 2, 3]);
        assert_eq!(balanced_vector(4, 2, Mode::Concave), vec![3, 2]);
    }

    #[test]
    fn intervals_tile_the_half_line() {
        for k in 2..12 {
            for j in 0..k - 1 {
                let (_, hi) = interval(k, j + 1);
                let (lo, _) = interval(k, j);
                assert!((lo - hi).abs() < 1e-15, "k={k} j={j}");
            }
        }
        assert_eq!(classify(4, -0.5).j, 1);
        assert_eq!(classify(4, -1.0).j, 2);
        assert_eq!(classify(4, -0.2).j, 0);
        assert_eq!(classify(4, -5.0).j, 3);
    }

    #[test]
    fn transfer_examples() {
        assert_eq!(transfer(&[0, 0, 5], Mode::Convex).unwrap(), vec![0, 1, 4]);
        assert_eq!(transfer(&[2, 2, 2], Mode::Convex).unwrap(), vec![2, 2, 2]);
        assert_eq!(transfer(&[4, 1], Mode::Concave).unwrap(), vec![3, 2]);
        assert!(transfer(&[3, 1], Mode::Convex).is_err());
    }

    #[test]
    fn composition_counts() {
        let mut n = 0;
        for_each_composition(5, 3, |_| n += 1);
        assert_eq!(n as u128, composition_count(5, 3, Mode::Convex));
        assert_eq!(composition_count(5, 3, Mode::Concave), binomial(6, 2));
    }
}
