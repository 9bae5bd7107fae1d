//! Weight expansions of concave toric domains in ℝ⁴ by concave subdivision,
//! and ECH capacities from the weighted selection formula.
//!
//! A subdivision node never materialises its region. It keeps two affine rows
//! `(r₁, s₁)`, `(r₂, s₂)` mapping base coordinates to node coordinates
//! `x′ = r₁·p − s₁`, `y′ = r₂·p − s₂`, plus a parameter window on the base
//! boundary. Its weight is the minimum of `x′ + y′` over that window.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::domains::{Curvature, Curve, Domain, GraphDomain, Profile};
use crate::families::Bump;
use crate::numeric::{clamped_root, integrate};
use crate::{families, invalid, Error, Result};

/// Maximum subdivision depth.
pub const MAX_DEPTH: usize = 64;

/// The upper boundary of a concave region, parametrised by `t` with the first
/// coordinate increasing.
#[derive(Clone, Debug)]
pub enum Boundary {
    Curve(Curve),
    Graph(GraphDomain),
    /// Piecewise linear, parametrised by the first coordinate.
    Poly(Vec<[f64; 2]>),
}

impl Boundary {
    pub fn from_domain(dom: &Domain) -> Result<Boundary> {
        match dom {
            Domain::Curve(c) if !c.bounds_convex() => Ok(Boundary::Curve(c.clone())),
            Domain::Graph(g) if g.curvature == Curvature::ConvexCup => match &g.profile {
                Profile::Polyline(pts) => Ok(Boundary::Poly(pts.clone())),
                _ => Ok(Boundary::Graph(g.clone())),
            },
            Domain::Simplex(a) if a.len() == 2 => Ok(Boundary::Poly(vec![[0.0, a[1]], [a[0], 0.0]])),
            _ => invalid("weight expansions need a concave two-dimensional domain"),
        }
    }

    pub fn range(&self) -> (f64, f64) {
        match self {
            Boundary::Curve(c) => c.t_range(),
            Boundary::Graph(g) => (0.0, g.lambda),
            Boundary::Poly(p) => (p[0][0], p[p.len() - 1][0]),
        }
    }

    pub fn point(&self, t: f64) -> [f64; 2] {
        match self {
            Boundary::Curve(c) => c.point(t),
            Boundary::Graph(g) => [t, g.f(t)],
            Boundary::Poly(p) => {
                let i = p.iter().position(|q| q[0] > t).unwrap_or(p.len() - 1).clamp(1, p.len() - 1);
                let (a, b) = (p[i - 1], p[i]);
                let s = ((t - a[0]) / (b[0] - a[0])).clamp(0.0, 1.0);
                [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
            }
        }
    }

    fn tangent(&self, t: f64) -> [f64; 2] {
        match self {
            Boundary::Curve(c) => c.velocity(t),
            Boundary::Graph(g) => [1.0, g.df(t)],
            Boundary::Poly(_) => [f64::NAN, f64::NAN],
        }
    }

    /// Range `[t₋, t₊]` of minimisers of `a·x + b·y` over `[lo, hi]`.
    fn argmin(&self, a: f64, b: f64, lo: f64, hi: f64) -> Result<(f64, f64)> {
        match self {
            Boundary::Curve(c) => {
                let t = clamped_root(
                    |t| {
                        let d = c.direction(t);
                        a * d[0] + b * d[1]
                    },
                    lo,
                    hi,
                    1e-15,
                )?;
                Ok((t, t))
            }
            Boundary::Graph(g) => {
                let x = clamped_root(|x| a + b * g.df(x), lo, hi, 1e-15 * g.lambda.max(1.0))?;
                Ok((x, x))
            }
            Boundary::Poly(p) => {
                let mut cands = vec![lo, hi];
                cands.extend(p.iter().map(|q| q[0]).filter(|&x| x > lo && x < hi));
                cands.sort_by(f64::total_cmp);
                let vals: Vec<f64> = cands
                    .iter()
                    .map(|&t| {
                        let q = self.point(t);
                        a * q[0] + b * q[1]
                    })
                    .collect();
                let m = vals.iter().copied().fold(f64::INFINITY, f64::min);
                let tol = 1e-12 * m.abs().max(1.0);
                let first = vals.iter().position(|v| *v <= m + tol).unwrap();
                let last = vals.iter().rposition(|v| *v <= m + tol).unwrap();
                Ok((cands[first], cands[last]))
            }
        }
    }
}

/// A node of the concave subdivision tree.
#[derive(Clone, Debug)]
pub struct WeightNode {
    /// Path from the root, e.g. `"22"`.
    pub label: String,
    pub r1: [u64; 2],
    pub r2: [u64; 2],
    pub s1: f64,
    pub s2: f64,
    pub window: (f64, f64),
    pub tau: f64,
    /// Minimisers of the node functional; the children split here.
    pub split: (f64, f64),
}

impl WeightNode {
    pub fn root(base: &Boundary) -> WeightNode {
        WeightNode {
            label: String::new(),
            r1: [1, 0],
            r2: [0, 1],
            s1: 0.0,
            s2: 0.0,
            window: base.range(),
            tau: f64::NAN,
            split: (f64::NAN, f64::NAN),
        }
    }

    /// `(a, b)` with node weight `min (a·x + b·y) − offset`.
    pub fn functional(&self) -> (u64, u64) {
        (self.r1[0] + self.r2[0], self.r1[1] + self.r2[1])
    }

    pub fn offset(&self) -> f64 {
        self.s1 + self.s2
    }

    /// Node coordinates of a base point.
    pub fn to_node(&self, p: [f64; 2]) -> [f64; 2] {
        [
            self.r1[0] as f64 * p[0] + self.r1[1] as f64 * p[1] - self.s1,
            self.r2[0] as f64 * p[0] + self.r2[1] as f64 * p[1] - self.s2,
        ]
    }
}

/// Computes the node weight and the split point; a degenerate window closes the node.
pub fn tau(node: &mut WeightNode, base: &Boundary) -> Result<f64> {
    let (lo, hi) = node.window;
    if !(hi > lo) {
        node.tau = 0.0;
        node.split = (lo, lo);
        return Ok(0.0);
    }
    let (a, b) = node.functional();
    let (t0, t1) = base.argmin(a as f64, b as f64, lo, hi)?;
    let p = base.point(t0);
    let v = a as f64 * p[0] + b as f64 * p[1] - node.offset();
    node.tau = v.max(0.0);
    node.split = (t0, t1);
    Ok(node.tau)
}

/// The two children of a node whose weight is known; empty sides give `None`.
pub fn subdivide(node: &WeightNode) -> (Option<WeightNode>, Option<WeightNode>) {
    let (lo, hi) = node.window;
    let (t0, t1) = node.split;
    let width = (hi - lo).abs().max(1e-300);
    let tiny = 1e-13 * width.max(1.0);
    let r_sum = [node.r1[0] + node.r2[0], node.r1[1] + node.r2[1]];
    let shifted = node.s1 + node.s2 + node.tau;
    let child1 = (hi - t1 > tiny).then(|| WeightNode {
        label: format!("{}1", node.label),
        r1: r_sum,
        r2: node.r2,
        s1: shifted,
        s2: node.s2,
        window: (t1, hi),
        tau: f64::NAN,
        split: (f64::NAN, f64::NAN),
    });
    let child2 = (t0 - lo > tiny).then(|| WeightNode {
        label: format!("{}2", node.label),
        r1: node.r1,
        r2: r_sum,
        s1: node.s1,
        s2: shifted,
        window: (lo, t0),
        tau: f64::NAN,
        split: (f64::NAN, f64::NAN),
    });
    (child1, child2)
}

/// Area of the node's region in node coordinates.
pub fn node_area(node: &WeightNode, base: &Boundary) -> Result<f64> {
    let (lo, hi) = node.window;
    if !(hi > lo) {
        return Ok(0.0);
    }
    if let Boundary::Poly(p) = base {
        let mut pts = vec![node.to_node(base.point(lo))];
        pts.extend(p.iter().filter(|q| q[0] > lo && q[0] < hi).map(|q| node.to_node(*q)));
        pts.push(node.to_node(base.point(hi)));
        pts.push([0.0, 0.0]);
        return Ok(crate::domains::shoelace(&pts).abs());
    }
    // Green's theorem: the axes contribute nothing to ∮ x dy − y dx
    let f = |t: f64| {
        let q = node.to_node(base.point(t));
        let d = base.tangent(t);
        let dx = node.r1[0] as f64 * d[0] + node.r1[1] as f64 * d[1];
        let dy = node.r2[0] as f64 * d[0] + node.r2[1] as f64 * d[1];
        q[0] * dy - q[1] * dx
    };
    Ok(0.5 * integrate(f, lo, hi, 1e-13)?.abs())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Weight {
    pub tau: f64,
    pub label: String,
}

/// Ordered weights; the first `complete_to` entries are the largest weights of the domain.
#[derive(Clone, Debug)]
pub struct WeightExpansion {
    pub weights: Vec<Weight>,
    pub complete_to: usize,
}

impl WeightExpansion {
    pub fn values(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w.tau).collect()
    }
}

struct Queued(WeightNode);

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Queued {}
impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Queued {
    fn cmp(&self, other: &Self) -> Ordering {
        // larger weight first, then shorter label, then lexicographic label
        self.0
            .tau
            .total_cmp(&other.0.tau)
            .then_with(|| other.0.label.len().cmp(&self.0.label.len()))
            .then_with(|| other.0.label.cmp(&self.0.label))
    }
}

fn weight_floor(root_tau: f64) -> f64 {
    1e-13 * root_tau.max(1.0)
}

/// The `m` largest weights, found best-first.
pub fn weight_expansion(dom: &Domain, m: usize) -> Result<WeightExpansion> {
    let base = Boundary::from_domain(dom)?;
    weight_expansion_on(&base, m)
}

pub fn weight_expansion_on(base: &Boundary, m: usize) -> Result<WeightExpansion> {
    if m == 0 {
        return invalid("m must be positive");
    }
    match best_first(base, m) {
        Ok(w) => Ok(w),
        Err(Error::Invalid(msg)) if msg.starts_with("monotonicity") => exhaustive(base, m, 14),
        Err(e) => Err(e),
    }
}

fn best_first(base: &Boundary, m: usize) -> Result<WeightExpansion> {
    let mut root = WeightNode::root(base);
    let root_tau = tau(&mut root, base)?;
    let floor = weight_floor(root_tau);
    let mut heap = BinaryHeap::new();
    if root_tau > floor {
        heap.push(Queued(root));
    }
    let mut out = Vec::new();
    while out.len() < m {
        let Some(Queued(node)) = heap.pop() else { break };
        out.push(Weight { tau: node.tau, label: node.label.clone() });
        if node.label.len() >= MAX_DEPTH {
            continue;
        }
        let (c1, c2) = subdivide(&node);
        for mut child in [c1, c2].into_iter().flatten() {
            let t = tau(&mut child, base)?;
            if t > node.tau * (1.0 + 1e-9) + 1e-12 {
                return Err(Error::Invalid(format!(
                    "monotonicity violated at node {:?}: {t} > {}",
                    child.label, node.tau
                )));
            }
            if t > floor {
                heap.push(Queued(child));
            }
        }
    }
    let complete_to = out.len();
    Ok(WeightExpansion { weights: out, complete_to })
}

fn exhaustive(base: &Boundary, m: usize, depth: usize) -> Result<WeightExpansion> {
    let mut root = WeightNode::root(base);
    let root_tau = tau(&mut root, base)?;
    let floor = weight_floor(root_tau);
    let mut level = vec![root];
    let mut all = Vec::new();
    for _ in 0..=depth {
        let mut next = Vec::new();
        for node in level {
            if node.tau <= floor {
                continue;
            }
            let (c1, c2) = subdivide(&node);
            all.push(Weight { tau: node.tau, label: node.label.clone() });
            for mut c in [c1, c2].into_iter().flatten() {
                tau(&mut c, base)?;
                next.push(c);
            }
        }
        level = next;
    }
    all.sort_by(|a, b| b.tau.total_cmp(&a.tau).then_with(|| a.label.cmp(&b.label)));
    all.truncate(m);
    let complete_to = all.len();
    Ok(WeightExpansion { weights: all, complete_to })
}

/// The eight weights of the first three subdivision levels of a symmetric
/// convex-cup profile, from slope equations alone.
pub fn symmetric_tau_table(h: &GraphDomain) -> Result<Vec<(&'static str, f64)>> {
    if h.curvature != Curvature::ConvexCup || !h.symmetric {
        return invalid("the table needs a symmetric convex-cup profile");
    }
    if !(h.df(0.0) < -4.0) {
        return invalid(format!("h′(0) = {} must be below −4", h.df(0.0)));
    }
    let y = |s: f64| -> Result<(f64, f64)> {
        let x = h.solve_slope(s)?;
        Ok((x, h.f(x)))
    };
    let (y0, h0) = y(-1.0)?;
    let (y2, h2) = y(-2.0)?;
    let (y22, h22) = y(-3.0)?;
    let (y21, h21) = y(-1.5)?;
    let (y222, h222) = y(-4.0)?;
    let (y221, h221) = y(-2.5)?;
    let (y212, h212) = y(-5.0 / 3.0)?;
    let (y211, h211) = y(-4.0 / 3.0)?;
    let t = y0 + h0;
    let t2 = 2.0 * y2 + h2 - t;
    let t22 = 3.0 * y22 + h22 - t - t2;
    let t21 = 3.0 * y21 + 2.0 * h21 - 2.0 * t - t2;
    let t222 = 4.0 * y222 + h222 - t - t2 - t22;
    let t221 = 5.0 * y221 + 2.0 * h221 - 2.0 * t - 2.0 * t2 - t22;
    let t212 = 5.0 * y212 + 3.0 * h212 - 3.0 * t - 2.0 * t2 - t21;
    let t211 = 4.0 * y211 + 3.0 * h211 - 3.0 * t - t2 - t21;
    Ok(vec![
        ("", t),
        ("2", t2),
        ("22", t22),
        ("21", t21),
        ("222", t222),
        ("221", t221),
        ("212", t212),
        ("211", t211),
    ])
}

/// Weight of the node with the given label, following the subdivision path.
pub fn node_tau(base: &Boundary, label: &str) -> Result<f64> {
    let mut node = WeightNode::root(base);
    tau(&mut node, base)?;
    for ch in label.chars() {
        let (c1, c2) = subdivide(&node);
        node = match ch {
            '1' => c1,
            '2' => c2,
            _ => return invalid(format!("bad label {label:?}")),
        }
        .ok_or_else(|| Error::Invalid(format!("node {label:?} is empty")))?;
        tau(&mut node, base)?;
    }
    Ok(node.tau)
}

/// `max Σ dᵢwᵢ` subject to `Σ (dᵢ² + dᵢ)/2 ≤ k`, over nonincreasing `d`.
pub fn ech_from_weights(weights: &[f64], k: usize) -> (f64, Vec<u64>) {
    let mut w: Vec<f64> = weights.iter().copied().filter(|x| *x > 0.0).collect();
    w.sort_by(|a, b| b.total_cmp(a));
    w.truncate(k);
    let mut best = (0.0, Vec::new());
    let mut cur = Vec::new();
    fn rec(w: &[f64], i: usize, budget: usize, cap: u64, acc: f64, cur: &mut Vec<u64>, best: &mut (f64, Vec<u64>)) {
        if acc > best.0 + 1e-15 * acc.abs() {
            *best = (acc, cur.clone());
        }
        if i >= w.len() || budget == 0 {
            return;
        }
        let mut d = cap;
        while d >= 1 {
            let cost = (d * d + d) as usize / 2;
            if cost <= budget {
                cur.push(d);
                rec(w, i + 1, budget - cost, d, acc + d as f64 * w[i], cur, best);
                cur.pop();
            }
            d -= 1;
        }
    }
    let cap = ((((8 * k + 1) as f64).sqrt() - 1.0) / 2.0).floor() as u64 + 1;
    rec(&w, 0, k, cap, 0.0, &mut cur, &mut best);
    let mut d = best.1;
    while d.last() == Some(&0) {
        d.pop();
    }
    (best.0, d)
}

/// Same maximum over all `d`, not only nonincreasing ones.
pub fn ech_from_weights_exhaustive(weights: &[f64], k: usize) -> f64 {
    let w: Vec<f64> = weights.iter().copied().take(k).collect();
    fn rec(w: &[f64], i: usize, budget: usize, acc: f64) -> f64 {
        if i == w.len() {
            return acc;
        }
        let mut best = rec(w, i + 1, budget, acc);
        let mut d = 1u64;
        loop {
            let cost = (d * d + d) as usize / 2;
            if cost > budget {
                break;
            }
            best = best.max(rec(w, i + 1, budget - cost, acc + d as f64 * w[i]));
            d += 1;
        }
        best
    }
    rec(&w, 0, k, 0.0)
}

#[derive(Clone, Debug)]
pub struct EchValue {
    pub k: usize,
    pub value: f64,
    pub d: Vec<u64>,
    pub weights: Vec<f64>,
}

pub fn ech_capacity(dom: &Domain, k: usize) -> Result<EchValue> {
    if k == 0 {
        return invalid("k must be positive");
    }
    let exp = weight_expansion(dom, k)?;
    let weights = exp.values();
    let (value, d) = ech_from_weights(&weights, k);
    Ok(EchValue { k, value, d, weights })
}

/// ECH₉ of `h` and of `h + δ(ρ + ρ̃)`.
pub fn ech9_shift(h: &GraphDomain, rho: &Bump, delta: f64) -> Result<(f64, f64)> {
    let before = ech_capacity(&Domain::Graph(h.clone()), 9)?.value;
    let after_dom = families::symmetric_extend(h, vec![(rho.clone(), delta)])?;
    let after = ech_capacity(&Domain::Graph(after_dom), 9)?.value;
    Ok((before, after))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_has_one_weight() {
        let e = weight_expansion(&Domain::Simplex(vec![1.0, 1.0]), 5).unwrap();
        assert_eq!(e.values(), vec![1.0]);
    }

    #[test]
    fn e12_has_two_unit_weights() {
        let e = weight_expansion(&Domain::Simplex(vec![1.0, 2.0]), 2).unwrap();
        let v = e.values();
        assert_eq!(v.len(), 2);
        assert!(v.iter().all(|w| (w - 1.0).abs() < 1e-12));
    }

    #[test]
    fn ech_of_ball() {
        let vals: Vec<f64> = (1..=6)
            .map(|k| ech_capacity(&Domain::Simplex(vec![1.0, 1.0]), k).unwrap().value)
            .collect();
        assert_eq!(vals, vec![1.0, 1.0, 2.0, 2.0, 2.0, 3.0]);
    }

    #[test]
    fn lemma_rows_pattern() {
        let base = Boundary::from_domain(&Domain::Curve(Curve::gamma_eps(0.05).unwrap())).unwrap();
        let mut root = WeightNode::root(&base);
        tau(&mut root, &base).unwrap();
        let (_, c2) = subdivide(&root);
        let c2 = c2.unwrap();
        assert_eq!(c2.functional(), (2, 1));
        assert!((c2.offset() - root.tau).abs() < 1e-15);
        let mut c2 = c2;
        tau(&mut c2, &base).unwrap();
        let (_, c22) = subdivide(&c2);
        let c22 = c22.unwrap();
        assert_eq!(c22.functional(), (3, 1));
        assert!((c22.offset() - root.tau - c2.tau).abs() < 1e-14);
    }
}
