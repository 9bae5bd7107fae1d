//! Smooth bumps, symmetric extensions and the perturbation families that
//! change one invariant of a toric domain while fixing the others.
//!
//! A bump `β` is stored through its second derivative `q = β″`, a combination
//! of two kinds of smooth basis functions: windows `w(x)·S(·)·S(·)` that follow
//! the base profile's curvature `w = |g″|`, and narrow mollifier spikes. The
//! coefficients come from a small linear program that meets the support,
//! plateau and integral constraints while using as little of the curvature
//! budget as possible, so `g + δβ` keeps the sign of `g″` for `δ < 1/budget`.
//! Each basis function is interpolated by Chebyshev polynomials on short panels
//! and integrated exactly, which makes `β`, `β′` and `∫β` cheap to evaluate.

use std::f64::consts::PI;

use crate::domains::{Curvature, Domain, GraphDomain, Jet, Perturbed, PolytopeDomain, Profile};
use crate::numeric::{integrate, solve_linear};
use crate::{ghcap, invalid, Error, Result};

const DEG: usize = 24;
const WINDOWS_PER_REGION: usize = 8;
const SPIKES_PER_REGION: usize = 16;

// ---------------------------------------------------------------------------
// Chebyshev panels

fn cheb_coeffs(vals: &[f64]) -> Vec<f64> {
    let n = vals.len() - 1;
    let nf = n as f64;
    (0..=n)
        .map(|k| {
            let mut s = 0.0;
            for (j, v) in vals.iter().enumerate() {
                let w = if j == 0 || j == n { 0.5 } else { 1.0 };
                s += w * v * (PI * (j * k) as f64 / nf).cos();
            }
            let c = 2.0 * s / nf;
            if k == 0 || k == n {
                0.5 * c
            } else {
                c
            }
        })
        .collect()
}

/// Antiderivative in `x = mid + hw·u`, vanishing at `u = −1`.
fn cheb_integ(c: &[f64], hw: f64) -> Vec<f64> {
    let n = c.len();
    let at = |i: usize| if i < n { c[i] } else { 0.0 };
    let mut out = vec![0.0; n + 1];
    for k in 1..=n {
        let prev = if k == 1 { 2.0 * at(0) } else { at(k - 1) };
        out[k] = hw * (prev - at(k + 1)) / (2.0 * k as f64);
    }
    let at_minus_one: f64 = out.iter().enumerate().skip(1).map(|(k, v)| if k % 2 == 0 { *v } else { -v }).sum();
    out[0] = -at_minus_one;
    out
}

fn cheb_eval(c: &[f64], u: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ck in c.iter().skip(1).rev() {
        let b0 = 2.0 * u * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    u * b1 - b2 + c[0]
}

#[derive(Clone, Debug)]
struct Panel {
    x0: f64,
    x1: f64,
    q: Vec<f64>,
    m: Vec<f64>,
    j: Vec<f64>,
    m_start: f64,
    j_start: f64,
}

impl Panel {
    fn eval(&self, x: f64) -> (f64, f64, f64) {
        let hw = 0.5 * (self.x1 - self.x0);
        let u = ((x - self.x0) / hw - 1.0).clamp(-1.0, 1.0);
        let q = cheb_eval(&self.q, u);
        let m = self.m_start + cheb_eval(&self.m, u);
        let j = self.j_start + self.m_start * (x - self.x0) + cheb_eval(&self.j, u);
        (q, m, j)
    }
}

/// One basis function for `β″`, with its first two antiderivatives from `lo`.
#[derive(Clone, Debug)]
struct Basis {
    lo: f64,
    hi: f64,
    panels: Vec<Panel>,
    /// `∫ B`
    m0: f64,
    /// `∫ (hi − s) B(s) ds`
    n1: f64,
    /// `∫_lo^hi ∫_lo^x (x − s) B(s) ds dx`
    t3: f64,
}

impl Basis {
    fn build(breaks: &[f64], f: impl Fn(f64) -> f64) -> Basis {
        let mut panels = Vec::with_capacity(breaks.len() - 1);
        let (mut m_acc, mut j_acc, mut t3) = (0.0, 0.0, 0.0);
        for w in breaks.windows(2) {
            let (x0, x1) = (w[0], w[1]);
            let hw = 0.5 * (x1 - x0);
            let mid = 0.5 * (x0 + x1);
            let vals: Vec<f64> = (0..=DEG).map(|j| f(mid + hw * (PI * j as f64 / DEG as f64).cos())).collect();
            // sample order runs from u = 1 down to u = −1
            let q = cheb_coeffs(&vals);
            let m = cheb_integ(&q, hw);
            let j = cheb_integ(&m, hw);
            let jj = cheb_integ(&j, hw);
            let len = x1 - x0;
            t3 += j_acc * len + m_acc * len * len / 2.0 + cheb_eval(&jj, 1.0);
            let p = Panel { x0, x1, q, m, j, m_start: m_acc, j_start: j_acc };
            let (_, m1, j1) = p.eval(x1);
            m_acc = m1;
            j_acc = j1;
            panels.push(p);
        }
        Basis { lo: breaks[0], hi: *breaks.last().unwrap(), panels, m0: m_acc, n1: j_acc, t3 }
    }

    /// `(B(x), ∫_lo^x B, ∫_lo^x (x − s) B(s) ds)`.
    fn eval(&self, x: f64) -> (f64, f64, f64) {
        if x <= self.lo {
            return (0.0, 0.0, 0.0);
        }
        if x >= self.hi {
            return (0.0, self.m0, self.n1 + self.m0 * (x - self.hi));
        }
        let i = self.panels.partition_point(|p| p.x1 <= x).min(self.panels.len() - 1);
        self.panels[i].eval(x)
    }

    /// `∫_lo^b ∫_lo^x (x − s) B(s) ds dx` for `b ≥ hi`.
    fn triple(&self, b: f64) -> f64 {
        let d = b - self.hi;
        self.t3 + self.n1 * d + 0.5 * self.m0 * d * d
    }
}

fn smooth_step(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / u).exp();
        let b = (-1.0 / (1.0 - u)).exp();
        a / (a + b)
    }
}

fn mollifier(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - u * u)).exp()
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

// ---------------------------------------------------------------------------
// Bumps

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Plateau {
    pub lo: f64,
    pub hi: f64,
    pub height: f64,
}

/// Declared shape of a bump: support, optional plateau and integral.
/// A plateau starting at the left end of the support is anchored: the bump
/// equals the plateau height on `[support.0, plateau.hi]` and the left end
/// is not required to vanish.
#[derive(Clone, Debug, PartialEq)]
pub struct BumpSpec {
    pub support: (f64, f64),
    pub plateau: Option<Plateau>,
    pub integral: f64,
}

impl BumpSpec {
    pub fn anchored(&self) -> bool {
        matches!(self.plateau, Some(p) if p.lo <= self.support.0)
    }

    fn check(&self) -> Result<()> {
        let (a, b) = self.support;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return invalid(format!("bump support ({a}, {b}) is empty"));
        }
        if !self.integral.is_finite() {
            return invalid("bump integral must be finite");
        }
        if let Some(p) = self.plateau {
            if !(p.lo >= a && p.hi > p.lo && p.hi < b && p.height.is_finite()) {
                return invalid("plateau must lie inside the support");
            }
            if !self.anchored() && p.lo - a < 1e-6 * (b - a) {
                return invalid("no room for a rising flank before the plateau");
            }
        } else if self.integral == 0.0 {
            // the zero bump is fine
        }
        Ok(())
    }
}

/// A smooth bump (or its signed generalisation) built for a given base profile.
#[derive(Clone, Debug)]
pub struct Bump {
    pub spec: BumpSpec,
    /// Smallest `t` with `|β″| ≤ t·w` on the side that matters; `g + δβ` keeps
    /// the curvature sign of `g` for `δ < 1/t`.
    pub budget: f64,
    anchor: f64,
    terms: Vec<(f64, Basis)>,
}

impl Bump {
    pub fn support(&self) -> (f64, f64) {
        self.spec.support
    }

    /// `β`, `β′`, `β″` at `x`.
    pub fn eval(&self, x: f64) -> Jet {
        let (a, b) = self.spec.support;
        if x >= b {
            return Jet::default();
        }
        if x < a {
            return Jet { v: self.anchor, d1: 0.0, d2: 0.0 };
        }
        let mut out = Jet { v: self.anchor, d1: 0.0, d2: 0.0 };
        for (c, basis) in &self.terms {
            if x <= basis.lo {
                continue;
            }
            let (q, m, j) = basis.eval(x);
            out.d2 += c * q;
            out.d1 += c * m;
            out.v += c * j;
        }
        out
    }

    /// `∫ β` over the support, recomputed from the stored expansion.
    pub fn integral(&self) -> f64 {
        let (a, b) = self.spec.support;
        self.anchor * (b - a) + self.terms.iter().map(|(c, basis)| c * basis.triple(b)).sum::<f64>()
    }

    /// Points where the piecewise representation changes; quadrature splits here.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut v = vec![self.spec.support.0, self.spec.support.1];
        for (_, b) in &self.terms {
            v.push(b.lo);
            v.push(b.hi);
        }
        if let Some(p) = self.spec.plateau {
            v.push(p.lo);
            v.push(p.hi);
        }
        v
    }

    /// Largest admissible amplitude for the base the bump was built on.
    pub fn delta_max(&self) -> f64 {
        if self.budget > 0.0 {
            1.0 / self.budget
        } else {
            f64::INFINITY
        }
    }
}

/// A bump with unit curvature weight, independent of any base profile.
pub fn make_bump(spec: BumpSpec) -> Result<Bump> {
    build_bump(spec, |_| 1.0, Curvature::ConvexCup)
}

/// A bump whose second derivative is measured against `|base″|`.
pub fn make_bump_for(base: &GraphDomain, spec: BumpSpec) -> Result<Bump> {
    let g = base.clone();
    build_bump(spec, move |x| g.eval(x).d2.abs(), base.curvature)
}

fn build_bump(spec: BumpSpec, weight: impl Fn(f64) -> f64, curvature: Curvature) -> Result<Bump> {
    spec.check()?;
    let (a, b) = spec.support;
    let regions: Vec<(f64, f64)> = match spec.plateau {
        None => vec![(a, b)],
        Some(p) if spec.anchored() => vec![(p.hi, b)],
        Some(p) => vec![(a, p.lo), (p.hi, b)],
    };
    let height = spec.plateau.map(|p| p.height).unwrap_or(0.0);
    if spec.plateau.is_none() && spec.integral == 0.0 || spec.plateau.is_some() && height == 0.0 && spec.integral == 0.0 {
        return Ok(Bump { spec, budget: 0.0, anchor: 0.0, terms: Vec::new() });
    }

    // windows: a smooth partition of unity on each region, scaled by the weight
    let mut bases: Vec<(bool, Basis)> = Vec::new();
    for &(lo, hi) in &regions {
        let len = hi - lo;
        let cut = len / WINDOWS_PER_REGION as f64;
        let tr = 0.5 * cut;
        for i in 0..WINDOWS_PER_REGION {
            let wlo = if i == 0 { lo } else { lo + cut * i as f64 - 0.5 * tr };
            let whi = if i + 1 == WINDOWS_PER_REGION { hi } else { lo + cut * (i + 1) as f64 + 0.5 * tr };
            let mut breaks = linspace(wlo, wlo + tr, 6);
            breaks.pop();
            breaks.extend(linspace(wlo + tr, whi - tr, 3));
            breaks.pop();
            breaks.extend(linspace(whi - tr, whi, 6));
            breaks.dedup();
            let w = &weight;
            let basis = Basis::build(&breaks, move |x| {
                w(x) * smooth_step((x - wlo) / tr) * smooth_step((whi - x) / tr)
            });
            bases.push((true, basis));
        }
    }
    // spikes: narrow mollifiers on a uniform grid inside each region
    let z = integrate(mollifier, -1.0, 1.0, 1e-15)?;
    for &(lo, hi) in &regions {
        let sigma = (0.01 * (b - a)).min((hi - lo) / 40.0);
        for c in linspace(lo + sigma, hi - sigma, SPIKES_PER_REGION - 1) {
            let breaks = linspace(c - sigma, c + sigma, 8);
            let basis = Basis::build(&breaks, move |x| mollifier((x - c) / sigma) / (sigma * z));
            bases.push((false, basis));
        }
    }

    // linear constraints on the coefficients
    let anchored = spec.anchored();
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    rows.push((bases.iter().map(|(_, s)| s.m0).collect(), 0.0));
    match spec.plateau {
        Some(p) if !anchored => {
            rows.push((bases.iter().map(|(_, s)| s.eval(p.lo).1).collect(), 0.0));
            rows.push((bases.iter().map(|(_, s)| s.eval(p.lo).2).collect(), p.height));
            rows.push((bases.iter().map(|(_, s)| s.eval(b).2).collect(), 0.0));
            rows.push((bases.iter().map(|(_, s)| s.triple(b)).collect(), spec.integral));
        }
        Some(p) => {
            rows.push((bases.iter().map(|(_, s)| s.eval(b).2).collect(), -p.height));
            rows.push((bases.iter().map(|(_, s)| s.triple(b)).collect(), spec.integral - p.height * (b - a)));
        }
        None => {
            rows.push((bases.iter().map(|(_, s)| s.eval(b).2).collect(), 0.0));
            rows.push((bases.iter().map(|(_, s)| s.triple(b)).collect(), spec.integral));
        }
    }

    // coefficient c = s·d with windows d ≥ −t and spikes d ≥ 0
    let s = match curvature {
        Curvature::ConvexCup => 1.0,
        Curvature::ConcaveCap => -1.0,
    };
    let d = solve_budget_lp(&bases, &rows, s)?;
    let coefs = polish(&bases, &rows, s, d)?;
    let budget = bases
        .iter()
        .zip(&coefs)
        .filter(|((is_window, _), _)| *is_window)
        .map(|(_, c)| -s * c)
        .fold(0.0f64, f64::max);
    let terms: Vec<(f64, Basis)> = coefs
        .into_iter()
        .zip(bases)
        .filter(|(c, _)| *c != 0.0)
        .map(|(c, (_, basis))| (c, basis))
        .collect();
    Ok(Bump { spec, budget, anchor: if anchored { height } else { 0.0 }, terms })
}

fn solve_budget_lp(bases: &[(bool, Basis)], rows: &[(Vec<f64>, f64)], s: f64) -> Result<Vec<f64>> {
    use microlp::{ComparisonOp, OptimizationDirection, Problem};
    let mut prob = Problem::new(OptimizationDirection::Minimize);
    let t = prob.add_var(1.0, (0.0, f64::INFINITY));
    let vars: Vec<_> = bases
        .iter()
        .map(|(is_window, _)| {
            if *is_window {
                prob.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY))
            } else {
                prob.add_var(0.0, (0.0, f64::INFINITY))
            }
        })
        .collect();
    for ((is_window, _), &v) in bases.iter().zip(&vars) {
        if *is_window {
            prob.add_constraint([(v, 1.0), (t, 1.0)], ComparisonOp::Ge, 0.0);
        }
    }
    for (coef, rhs) in rows {
        let expr: Vec<_> = vars.iter().zip(coef).map(|(&v, &c)| (v, s * c)).collect();
        prob.add_constraint(expr, ComparisonOp::Eq, *rhs);
    }
    let sol = prob
        .solve()
        .map_err(|e| Error::Invalid(format!("bump constraints are infeasible: {e}")))?;
    Ok(vars.iter().map(|&v| sol[v]).collect())
}

/// Removes the LP's residual by a minimum-norm correction on the active coefficients.
fn polish(bases: &[(bool, Basis)], rows: &[(Vec<f64>, f64)], s: f64, d: Vec<f64>) -> Result<Vec<f64>> {
    let scale = d.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
    let mut c: Vec<f64> = d
        .iter()
        .zip(bases)
        .map(|(x, (is_window, _))| if *is_window || x.abs() > 1e-12 * scale { s * x } else { 0.0 })
        .collect();
    let active: Vec<usize> = (0..c.len()).filter(|&i| c[i] != 0.0 || bases[i].0).collect();
    for _ in 0..3 {
        let resid: Vec<f64> = rows.iter().map(|(a, r)| r - a.iter().zip(&c).map(|(x, y)| x * y).sum::<f64>()).collect();
        let m = rows.len();
        let mut gram = vec![vec![0.0; m]; m];
        for i in 0..m {
            for j in 0..m {
                gram[i][j] = active.iter().map(|&k| rows[i].0[k] * rows[j].0[k]).sum();
            }
        }
        let y = solve_linear(gram, resid)?;
        for &k in &active {
            c[k] += (0..m).map(|i| rows[i].0[k] * y[i]).sum::<f64>();
        }
    }
    Ok(c)
}

// ---------------------------------------------------------------------------
// Symmetric extension

/// `g + Σ amp·β` on `[0, x(g)]`, extended to the unique symmetric profile.
pub fn symmetric_extend(base: &GraphDomain, bumps: Vec<(Bump, f64)>) -> Result<GraphDomain> {
    if !base.symmetric {
        return invalid("symmetric extension needs a symmetric base");
    }
    let bumps: Vec<(Bump, f64)> = bumps.into_iter().filter(|(_, amp)| *amp != 0.0).collect();
    if bumps.is_empty() {
        return Ok(base.clone());
    }
    let fixed = base.fixed_point()?;
    let mut lambda = base.lambda;
    for (bump, amp) in &bumps {
        let (a, b) = bump.support();
        if a < 0.0 || b >= fixed || (a <= 0.0 && !bump.spec.anchored()) {
            return invalid(format!("bump support ({a}, {b}) must lie inside (0, {fixed})"));
        }
        if bump.spec.anchored() {
            if a > 0.0 {
                return invalid("an anchored plateau must start at 0");
            }
            lambda += amp * bump.eval(0.0).v;
        }
        if amp.abs() * bump.budget >= 1.0 {
            return Err(Error::Curvature(format!(
                "amplitude {amp} exceeds the curvature budget {}",
                bump.delta_max()
            )));
        }
    }
    let out = GraphDomain {
        lambda,
        profile: Profile::Perturbed(Box::new(Perturbed { base: base.clone(), fixed, bumps, lambda })),
        curvature: base.curvature,
        symmetric: true,
    };
    let report = Domain::Graph(out.clone()).validate();
    for name in ["concave_cap", "convex_cup", "decreasing"] {
        if report.get(name) == Some(false) {
            return Err(Error::Curvature(format!("perturbed profile fails the {name} check")));
        }
    }
    Ok(out)
}

/// `∫ β̃` for the mirror bump of a perturbed symmetric profile, computed from
/// the right half: `∫_{x(g)}^{λ} (g_ext − g)`.
pub fn mirror_integral(base: &GraphDomain, ext: &GraphDomain) -> Result<f64> {
    let x = base.fixed_point()?;
    let lam = ext.lambda.max(base.lambda);
    let mut cuts = vec![x, lam];
    if let Profile::Perturbed(pp) = &ext.profile {
        for (b, _) in &pp.bumps {
            let (lo, hi) = b.support();
            cuts.push(base.f(hi));
            cuts.push(base.f(lo));
        }
    }
    cuts.retain(|&c| c >= x && c <= lam);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += integrate(|t| ext.f(t) - base.f(t), w[0], w[1], 1e-14)?;
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// Families

/// A perturbed profile together with the data used to build it.
#[derive(Clone, Debug)]
pub struct Family {
    pub base: GraphDomain,
    pub perturbed: GraphDomain,
    pub bump: Bump,
    pub delta: f64,
}

fn margin_support(lo: f64, hi: f64) -> (f64, f64) {
    let gap = hi - lo;
    (lo + 0.02 * gap, hi - 0.02 * gap)
}

/// Symmetric concave-cap base used by the convex families: an arc with `f′(0) = −1/6`.
pub fn convex_family_base(lambda: f64) -> GraphDomain {
    GraphDomain::arc_cap(lambda, 0.2 * lambda).expect("valid arc")
}

/// Symmetric convex-cup base used by the concave families: an arc with `h′(0) = −3`.
pub fn concave_family_base(lambda: f64) -> GraphDomain {
    GraphDomain::arc_cup(lambda, 1.5 * lambda).expect("valid arc")
}

/// Area grows by `δ`, every Gutt–Hutchings capacity stays fixed.
pub fn family_novolume(f: &GraphDomain, j: usize, delta: f64) -> Result<Family> {
    if j < 3 || j % 2 == 0 {
        return invalid("novolume needs an odd j ≥ 3");
    }
    if f.curvature != Curvature::ConcaveCap || !f.symmetric {
        return invalid("novolume needs a symmetric concave-cap profile");
    }
    let s0 = f.df(0.0);
    if !(s0 > -0.5 && s0 <= 0.0) {
        return invalid(format!("novolume needs f′(0) ∈ (−1/2, 0], got {s0}"));
    }
    let xj = ghcap::odd_carrier_x(f, j)?;
    let xj2 = ghcap::odd_carrier_x(f, j + 2)?;
    let spec = BumpSpec { support: margin_support(xj, xj2), plateau: None, integral: 0.5 };
    finish(f, spec, delta)
}

/// Only `c_j` moves, by exactly `δ`.
pub fn family_mutual(base: &GraphDomain, j: usize, delta: f64) -> Result<Family> {
    if j == 0 {
        return invalid("j must be positive");
    }
    if !base.symmetric {
        return invalid("mutual needs a symmetric base");
    }
    let spec = if j % 2 == 0 {
        if base.curvature != Curvature::ConvexCup {
            return invalid("even j needs a convex-cup (concave toric) base");
        }
        let lo = if j == 2 { 0.0 } else { ghcap::even_carrier_x(base, j - 2)? };
        let mid = ghcap::even_carrier_x(base, j)?;
        let hi = ghcap::even_carrier_x(base, j + 2)?;
        plateau_spec(lo, mid, hi, 2.0 / j as f64)
    } else {
        if base.curvature != Curvature::ConcaveCap {
            return invalid("odd j needs a concave-cap (convex toric) base");
        }
        if j == 1 {
            let x3 = ghcap::odd_carrier_x(base, 3)?;
            let hi = 0.5 * x3;
            BumpSpec {
                support: (0.0, hi),
                plateau: Some(Plateau { lo: 0.0, hi: 0.1 * hi, height: 1.0 }),
                integral: 0.0,
            }
        } else {
            let lo = ghcap::odd_carrier_x(base, j - 2)?;
            let mid = ghcap::odd_carrier_x(base, j)?;
            let hi = ghcap::odd_carrier_x(base, j + 2)?;
            plateau_spec(lo, mid, hi, 2.0 / (j + 1) as f64)
        }
    };
    finish(base, spec, delta)
}

fn plateau_spec(lo: f64, mid: f64, hi: f64, height: f64) -> BumpSpec {
    let (a, b) = margin_support(lo, hi);
    let half = 0.02 * (hi - lo);
    BumpSpec {
        support: (a, b),
        plateau: Some(Plateau { lo: mid - half, hi: mid + half, height }),
        integral: 0.0,
    }
}

fn finish(base: &GraphDomain, spec: BumpSpec, delta: f64) -> Result<Family> {
    let bump = make_bump_for(base, spec)?;
    let perturbed = symmetric_extend(base, vec![(bump.clone(), delta)])?;
    Ok(Family { base: base.clone(), perturbed, bump, delta })
}

/// Slope-defined points of the blind-spot base used to place the bump.
#[derive(Clone, Copy, Debug)]
pub struct BlindPoints {
    /// `h′ = −4`
    pub y222: f64,
    /// `h′ = −3`
    pub y22: f64,
    /// `h′ = −5/2`
    pub y221: f64,
}

pub fn blind_points(h: &GraphDomain) -> Result<BlindPoints> {
    Ok(BlindPoints {
        y222: h.solve_slope(-4.0)?,
        y22: h.solve_slope(-3.0)?,
        y221: h.solve_slope(-2.5)?,
    })
}

/// Signed bump around the `h′ = −3` point: plateau 1, zero integral.
pub fn blind_bump(h: &GraphDomain) -> Result<Bump> {
    let p = blind_points(h)?;
    let gap = p.y221 - p.y222;
    let spec = BumpSpec {
        support: (p.y222 + 0.01 * gap, p.y221 - 0.01 * gap),
        plateau: Some(Plateau { lo: p.y22 - 0.004, hi: p.y22 + 0.004, height: 1.0 }),
        integral: 0.0,
    };
    make_bump_for(h, spec)
}

/// The pair `(X_h, X_{h+δ(ρ+ρ̃)})` over the shifted Lagrangian-bidisk curve.
pub fn family_blind(epsilon: f64, delta: f64) -> Result<Family> {
    let h = GraphDomain::from_curve(crate::domains::Curve::gamma_eps(epsilon)?)?;
    if !(h.df(0.0) < -4.0) {
        return invalid(format!("epsilon {epsilon} too large: h′(0) = {} is not below −4", h.df(0.0)));
    }
    let bump = blind_bump(&h)?;
    let perturbed = symmetric_extend(&h, vec![(bump.clone(), delta)])?;
    Ok(Family { base: h, perturbed, bump, delta })
}

// ---------------------------------------------------------------------------
// Isocapacity volume ratios

#[derive(Clone, Debug)]
pub struct IvrBounds {
    /// Upper boundary of the inner region, from `(0, ·)` to `(·, 0)`.
    pub lower: Vec<[f64; 2]>,
    /// Upper boundary of the outer region; may end with a vertical edge.
    pub upper: Vec<[f64; 2]>,
    pub ratio: f64,
    /// Bound on the change of the ratio from truncating the vertex series.
    pub tail: f64,
}

/// Inner and outer piecewise-linear profiles with the capacities of `f`,
/// and the ratio of their areas.
pub fn ivr_graph_bounds(f: &GraphDomain, vertices: usize) -> Result<IvrBounds> {
    if f.curvature != Curvature::ConcaveCap || !f.symmetric {
        return invalid("ivr bounds need a symmetric concave-cap profile");
    }
    let s0 = f.df(0.0);
    if !(s0 > -0.5 && s0 <= 0.0) {
        return invalid(format!("ivr bounds need f′(0) ∈ (−1/2, 0], got {s0}"));
    }
    let fixed = f.fixed_point()?;
    let mut xs = Vec::with_capacity(vertices);
    for i in 0..vertices {
        xs.push(ghcap::odd_carrier_x(f, 2 * i + 1)?);
    }
    let last = *xs.last().unwrap();

    let mut inner: Vec<[f64; 2]> = xs.iter().map(|&x| [x, f.f(x)]).collect();
    inner.push([fixed, fixed]);
    let inner = mirror_polyline(&inner);

    // tangent lines at consecutive carriers and their intersections
    let tangent = |x: f64| (f.df(x), f.f(x) - f.df(x) * x);
    let mut outer: Vec<[f64; 2]> = vec![[0.0, f.f(0.0)]];
    for w in xs.windows(2) {
        let (m1, c1) = tangent(w[0]);
        let (m2, c2) = tangent(w[1]);
        let x = (c2 - c1) / (m1 - m2);
        outer.push([x, m1 * x + c1]);
    }
    // close with the slope −1 line through the fixed point, which carries the
    // even capacities
    let (m, c) = tangent(last);
    let xe = (2.0 * fixed - c) / (m + 1.0);
    outer.push([xe, m * xe + c]);
    let d = xe.max(fixed);
    let outer = mirror_polyline(&outer);

    let closed_area = |pts: &[[f64; 2]]| {
        let mut poly = pts.to_vec();
        poly.push([0.0, 0.0]);
        crate::domains::shoelace(&poly).abs()
    };
    let a_lo = closed_area(&inner);
    let a_up = closed_area(&outer);
    // the untruncated profiles differ from these only inside the square
    // [x_K, d]², whose area bounds the change of either volume
    let strip = 2.0 * (d - last) * (d - last);
    let tail = (a_up + strip) / (a_lo - strip).max(1e-300) - a_up / a_lo;
    Ok(IvrBounds { lower: inner, upper: outer, ratio: a_up / a_lo, tail: tail.abs() })
}

fn mirror_polyline(left: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut out = left.to_vec();
    let n = left.len();
    let last = left[n - 1];
    let start = if (last[0] - last[1]).abs() < 1e-15 { n - 1 } else { n };
    for i in (0..start).rev() {
        let p = left[i];
        out.push([p[1], p[0]]);
    }
    out.dedup_by(|a, b| (a[0] - b[0]).abs() < 1e-15 && (a[1] - b[1]).abs() < 1e-15);
    out
}

/// The kite `Ω_r` and its isocapacity extension by `(a, b)` and `(b, a)`.
pub fn ivr_polytopes(r: f64, a: f64, b: f64) -> (PolytopeDomain, PolytopeDomain) {
    let base = PolytopeDomain::diagonal(r);
    let mut v = base.vertices.clone();
    v.push(vec![a, b]);
    v.push(vec![b, a]);
    (base, PolytopeDomain { vertices: v })
}

/// Lower bound `3(2 − r) − 2/r` on the isocapacity volume ratio of `Ω_r`,
/// after checking that the extremal extension shares `c_k` for `k ≤ k_max`.
pub fn ivr_polytope_bound(r: f64, k_max: usize) -> Result<f64> {
    if !(r >= 2.0 / 3.0 && r < 1.0) {
        return invalid(format!("r = {r} outside [2/3, 1)"));
    }
    let (a, b) = (1.0, 3.0 * r - 2.0);
    let (p0, p1) = ivr_polytopes(r, a, b);
    for k in 1..=k_max {
        let c0 = ghcap::gh_polytope(&p0, k)?.value;
        let c1 = ghcap::gh_polytope(&p1, k)?.value;
        if (c0 - c1).abs() > 1e-12 {
            return Err(Error::Invalid(format!("c_{k} differs: {c0} vs {c1}")));
        }
    }
    let ratio = shoelace_area(&p1) / shoelace_area(&p0);
    let closed = 3.0 * (2.0 - r) - 2.0 / r;
    if (ratio - closed).abs() > 1e-12 {
        return Err(Error::Invalid(format!("area ratio {ratio} disagrees with {closed}")));
    }
    Ok(closed)
}

fn shoelace_area(p: &PolytopeDomain) -> f64 {
    crate::domains::shoelace(&p.hull2()).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chebyshev_integrates_polynomials() {
        // q = 3x² on [0, 2] → ∫ = 8
        let b = Basis::build(&[0.0, 1.0, 2.0], |x| 3.0 * x * x);
        assert!((b.m0 - 8.0).abs() < 1e-12);
        // ∫(2 − s)3s² ds = 16 − 12 = 4
        assert!((b.n1 - 4.0).abs() < 1e-12);
        let (_, m, j) = b.eval(1.5);
        assert!((m - 3.375).abs() < 1e-12);
        // ∫_0^1.5 (1.5 − s) 3 s² ds = 1.5⁴/4
        assert!((j - 1.5f64.powi(4) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn standalone_bump_meets_its_constraints() {
        let spec = BumpSpec {
            support: (0.2, 0.4),
            plateau: Some(Plateau { lo: 0.28, hi: 0.32, height: 1.0 }),
            integral: 0.0,
        };
        let b = make_bump(spec).unwrap();
        assert!((b.eval(0.3).v - 1.0).abs() < 1e-10);
        assert!(b.eval(0.3).d1.abs() < 1e-10);
        assert!(b.integral().abs() < 1e-10);
        assert!(b.eval(0.3999999).v.abs() < 1e-8);
        let lobes = (0..400).map(|i| b.eval(0.2 + 0.2 * i as f64 / 400.0).v).fold(f64::INFINITY, f64::min);
        assert!(lobes < 0.0);
    }

    #[test]
    fn bump_integral_matches_quadrature() {
        let spec = BumpSpec { support: (0.2, 0.4), plateau: None, integral: 0.5 };
        let b = make_bump(spec).unwrap();
        let mut cuts = b.breakpoints();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let q: f64 = cuts.windows(2).map(|w| integrate(|x| b.eval(x).v, w[0], w[1], 1e-14).unwrap()).sum();
        assert!((q - 0.5).abs() < 1e-10, "{q}");
        assert!((b.integral() - 0.5).abs() < 1e-12);
    }
}
