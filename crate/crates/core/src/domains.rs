//! Moment images `Ω ⊂ ℝⁿ≥0`: graph regions, parametric curves, polytopes,
//! boxes, ℓᵖ-balls and simplices, with support functions and areas.

use std::f64::consts::PI;

use crate::families::Bump;
use crate::numeric::{brent, clamped_root, integrate};
use crate::{invalid, Error, Result};

/// Value, first and second derivative of a one-variable function.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

/// Sign of the profile's second derivative.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Curvature {
    /// `f″ < 0`: the region under the graph is convex.
    ConcaveCap,
    /// `h″ > 0`: the region under the graph has convex complement.
    ConvexCup,
}

#[derive(Clone, Debug)]
pub struct SupportResult {
    pub value: f64,
    pub witness: Vec<f64>,
}

// ---------------------------------------------------------------------------
// Parametric curves

/// Closed-form boundary curves `t ↦ (γ₁(t), γ₂(t))`, with `γ₁` increasing.
#[derive(Clone, Debug, PartialEq)]
pub enum Curve {
    /// Image of the Lagrangian bidisk, `t ∈ [0, 2π]`.
    Alpha,
    /// `Alpha` shifted by `(−ε, −ε)` and cut to `[ξ, 2π − ξ]`.
    GammaEps { eps: f64, xi: f64 },
    /// Image of the ℓᵖ-sum of two Lagrangian disks; `t ∈ [−c, c]` with `c = 4^{−1/p}`.
    OrCurve { p: f64 },
}

impl Curve {
    pub fn gamma_eps(eps: f64) -> Result<Curve> {
        if !(eps > 0.0 && eps < 2.0) {
            return invalid(format!("epsilon {eps} outside (0, 2)"));
        }
        let xi = brent(|t| 2.0 * (t / 2.0).sin() - t * (t / 2.0).cos() - eps, 0.0, PI, 1e-15)?;
        Ok(Curve::GammaEps { eps, xi })
    }

    pub fn or_curve(p: f64) -> Result<Curve> {
        if !(p >= 1.0 && p <= 100.0) || (p - 2.0).abs() < 1e-3 {
            return invalid(format!("ℓᵖ exponent {p} must lie in [1, 100] and away from 2"));
        }
        Ok(Curve::OrCurve { p })
    }

    pub fn t_range(&self) -> (f64, f64) {
        match *self {
            Curve::Alpha => (0.0, 2.0 * PI),
            Curve::GammaEps { xi, .. } => (xi, 2.0 * PI - xi),
            Curve::OrCurve { p } => {
                let c = or_c(p);
                (-c, c)
            }
        }
    }

    /// True when the curve bounds a convex region.
    pub fn bounds_convex(&self) -> bool {
        matches!(*self, Curve::OrCurve { p } if p < 2.0)
    }

    pub fn point(&self, t: f64) -> [f64; 2] {
        match *self {
            Curve::Alpha => alpha(t),
            Curve::GammaEps { eps, .. } => {
                let a = alpha(t);
                [a[0] - eps, a[1] - eps]
            }
            Curve::OrCurve { p } => {
                let u = t.abs();
                let g = or_g(p, u);
                if t <= 0.0 {
                    [g, 2.0 * PI * u + g]
                } else {
                    [2.0 * PI * u + g, g]
                }
            }
        }
    }

    pub fn velocity(&self, t: f64) -> [f64; 2] {
        match *self {
            Curve::Alpha | Curve::GammaEps { .. } => {
                let s = (t / 2.0).sin();
                [0.5 * t * s, -0.5 * (2.0 * PI - t) * s]
            }
            Curve::OrCurve { p } => {
                let u = t.abs();
                let dg = or_g_prime(p, u);
                if t < 0.0 {
                    [-dg, -2.0 * PI - dg]
                } else {
                    [2.0 * PI + dg, dg]
                }
            }
        }
    }

    /// Second derivative; `None` for curves without a closed form.
    pub fn accel(&self, t: f64) -> Option<[f64; 2]> {
        match *self {
            Curve::Alpha | Curve::GammaEps { .. } => {
                let (s, c) = (t / 2.0).sin_cos();
                Some([0.5 * s + 0.25 * t * c, 0.5 * s - 0.25 * (2.0 * PI - t) * c])
            }
            Curve::OrCurve { .. } => None,
        }
    }

    /// A positive multiple of the velocity that stays nonzero at the ends.
    pub fn direction(&self, t: f64) -> [f64; 2] {
        match *self {
            Curve::Alpha | Curve::GammaEps { .. } => [t, -(2.0 * PI - t)],
            Curve::OrCurve { .. } => self.velocity(t),
        }
    }

    /// Right endpoint of the region on the first axis.
    pub fn lambda(&self) -> f64 {
        self.point(self.t_range().1)[0]
    }

    /// Parameter with `γ₁(t) = x`.
    pub fn t_at_x(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.t_range();
        let xa = self.point(lo)[0];
        let xb = self.point(hi)[0];
        if x <= xa {
            return Ok(lo);
        }
        if x >= xb {
            return Ok(hi);
        }
        brent(|t| self.point(t)[0] - x, lo, hi, 1e-15)
    }
}

fn alpha(t: f64) -> [f64; 2] {
    let (s, c) = (t / 2.0).sin_cos();
    [2.0 * s - t * c, 2.0 * s + (2.0 * PI - t) * c]
}

/// Half-width `4^{−1/p}` of the parameter range of the ℓᵖ Lagrangian curve.
pub fn or_c(p: f64) -> f64 {
    4f64.powf(-1.0 / p)
}

/// Axis intercept `2π·4^{−1/p}` of the ℓᵖ Lagrangian curve.
pub fn or_lambda(p: f64) -> f64 {
    2.0 * PI * or_c(p)
}

/// Integrand pieces for `g_p` after the substitution `rᵖ = ½ − s·cos θ`,
/// which turns the radicand's two root factors into `s² sin²θ` exactly.
fn or_pieces(p: f64, u: f64, theta: f64) -> (f64, f64, f64) {
    let up = u.powf(p);
    let s = (0.25 - up).max(0.0).sqrt();
    let (sn, cs) = theta.sin_cos();
    // ρ = ½ − s·cos θ and A = 1 − ρ with ρ·A = uᵖ + s² sin²θ; the smaller one
    // comes from the product to avoid cancellation
    let prod = up + s * s * sn * sn;
    let (rho, a) = if cs > 0.0 {
        let a = 0.5 + s * cs;
        (prod / a, a)
    } else {
        let rho = 0.5 - s * cs;
        (rho, prod / rho)
    };
    // F = A^{2/p}(1 − (uᵖ/(ρA))^{2/p})
    let f = if u == 0.0 {
        a.powf(2.0 / p)
    } else {
        // ln(uᵖ/(ρA)) = −softplus(ln(s² sin²θ) − p·ln u)
        let x = (s * s * sn * sn).ln() - p * u.ln();
        let softplus = x.max(0.0) + (-x.abs()).exp().ln_1p();
        a.powf(2.0 / p) * -(-(2.0 / p) * softplus).exp_m1()
    };
    let dr = rho.powf(1.0 / p - 1.0) * s * sn / p;
    (f.max(0.0), dr, rho)
}

/// `g_p(u) = 2∫ √((1−rᵖ)^{2/p} − u²/r²) dr` between the two roots of the radicand.
pub fn or_g(p: f64, u: f64) -> f64 {
    let u = u.abs();
    let c = or_c(p);
    if u >= c {
        return 0.0;
    }
    let v = or_integrate(p, 1e-13, |th| {
        let (f, dr, _) = or_pieces(p, u, th);
        f.sqrt() * dr
    });
    2.0 * v
}

/// `∫₀^π` of an integrand in `θ` that behaves like `θ^{2/p − 1}` at 0 when
/// `u = 0`; for `p > 2` the substitution `θ = (π/2)·wᵖ` on the first half
/// makes it smooth.
fn or_integrate(p: f64, tol: f64, f: impl Fn(f64) -> f64) -> f64 {
    if p <= 2.0 {
        return integrate(&f, 0.0, PI, tol).unwrap_or(f64::NAN);
    }
    let half = 0.5 * PI;
    let g = |w: f64| {
        let th = half * w.powf(p);
        f(th) * half * p * w.powf(p - 1.0)
    };
    // below w₀ the substituted integrand is a power of w; θ² must not underflow
    let w0 = 1e-4f64.max(2.0 * 1e-140f64.powf(1.0 / p));
    let (g0, g1) = (g(w0), g(0.5 * w0));
    let head = if g0 > 0.0 && g1 > 0.0 && g0.is_finite() && g1.is_finite() {
        let e = (g0 / g1).log2();
        g0 * w0 / (e + 1.0)
    } else {
        0.5 * g0 * w0
    };
    let first = integrate(g, w0, 1.0, tol);
    let second = integrate(&f, half, PI, tol);
    match (first, second) {
        (Ok(a), Ok(b)) => head + a + b,
        _ => f64::NAN,
    }
}

/// `g_p′(u)`, differentiating under the integral sign.
pub fn or_g_prime(p: f64, u: f64) -> f64 {
    let u = u.abs();
    if u == 0.0 {
        return -PI;
    }
    let c = or_c(p);
    if u >= c {
        return -(2.0 / p).sqrt() * PI;
    }
    let v = or_integrate(p, 1e-12, |th| {
        let (f, dr, rho) = or_pieces(p, u, th);
        if f <= 0.0 {
            return 0.0;
        }
        -u * rho.powf(-2.0 / p) / f.sqrt() * dr
    });
    2.0 * v
}

// ---------------------------------------------------------------------------
// Graph profiles

/// The closed catalogue of profiles `f : [0, λ] → [0, ∞)`.
#[derive(Clone, Debug)]
pub enum Profile {
    /// `a(1 − xᵖ)^{1/p}` on `[0, 1]`.
    PEllipse { p: f64, a: f64 },
    /// `√(1 − x²)`.
    Circle,
    /// `(1 − x^{p/2})^{2/p}`, the moment image of the ℓᵖ unit ball in ℂ².
    LpBall2 { p: f64 },
    /// Circular arc centred at `(−c, −c)` through `(0, λ)` and `(λ, 0)`.
    ArcCap { lambda: f64, shift: f64 },
    /// Circular arc centred at `(C, C)`, `C > λ`, through `(0, λ)` and `(λ, 0)`.
    ArcCup { lambda: f64, center: f64 },
    /// Piecewise linear through the listed points, first on the vertical axis, last on the horizontal.
    Polyline(Vec<[f64; 2]>),
    /// Graph traced by a parametric curve.
    FromCurve(Curve),
    /// A symmetric profile plus bumps on `[0, x(f)]`, mirrored through the diagonal.
    Perturbed(Box<Perturbed>),
}

#[derive(Clone, Debug)]
pub struct Perturbed {
    pub base: GraphDomain,
    pub fixed: f64,
    pub bumps: Vec<(Bump, f64)>,
    pub lambda: f64,
}

impl Perturbed {
    fn left(&self, x: f64) -> Jet {
        let mut j = self.base.eval(x);
        for (b, amp) in &self.bumps {
            if *amp != 0.0 {
                let bj = b.eval(x);
                j.v += amp * bj.v;
                j.d1 += amp * bj.d1;
                j.d2 += amp * bj.d2;
            }
        }
        j
    }

    fn eval(&self, x: f64) -> Jet {
        if x <= self.fixed {
            return self.left(x);
        }
        let y = if x >= self.lambda {
            0.0
        } else {
            brent(|y| self.left(y).v - x, 0.0, self.fixed, 1e-15 * self.lambda.max(1.0))
                .unwrap_or(f64::NAN)
        };
        let l = self.left(y);
        Jet {
            v: y,
            d1: 1.0 / l.d1,
            d2: -l.d2 / (l.d1 * l.d1 * l.d1),
        }
    }
}

fn eval_profile(profile: &Profile, x: f64) -> Jet {
    match profile {
        Profile::PEllipse { p, a } => pellipse_jet(*p, *a, x),
        Profile::LpBall2 { p } => pellipse_jet(p / 2.0, 1.0, x),
        Profile::Circle => {
            let r = (1.0 - x * x).max(0.0);
            let s = r.sqrt();
            Jet { v: s, d1: -x / s, d2: -1.0 / (r * s) }
        }
        Profile::ArcCap { lambda, shift } => {
            let c = *shift;
            let r2 = c * c + (lambda + c) * (lambda + c);
            let w = (r2 - (x + c) * (x + c)).max(0.0);
            let s = w.sqrt();
            Jet { v: s - c, d1: -(x + c) / s, d2: -r2 / (w * s) }
        }
        Profile::ArcCup { lambda, center } => {
            let c = *center;
            let r2 = c * c + (c - lambda) * (c - lambda);
            let w = (r2 - (c - x) * (c - x)).max(0.0);
            let s = w.sqrt();
            Jet { v: c - s, d1: -(c - x) / s, d2: r2 / (w * s) }
        }
        Profile::Polyline(pts) => {
            let i = match pts.iter().position(|q| q[0] > x) {
                Some(0) => 0,
                Some(i) => i - 1,
                None => pts.len() - 2,
            }
            .min(pts.len() - 2);
            let (a, b) = (pts[i], pts[i + 1]);
            let slope = (b[1] - a[1]) / (b[0] - a[0]);
            Jet { v: a[1] + slope * (x - a[0]), d1: slope, d2: 0.0 }
        }
        Profile::FromCurve(curve) => {
            let t = curve.t_at_x(x).unwrap_or(f64::NAN);
            let p = curve.point(t);
            let v = curve.velocity(t);
            let a = curve.accel(t).unwrap_or([f64::NAN; 2]);
            let d1 = v[1] / v[0];
            let d2 = (a[1] * v[0] - v[1] * a[0]) / (v[0] * v[0] * v[0]);
            Jet { v: p[1], d1, d2 }
        }
        Profile::Perturbed(pp) => pp.eval(x),
    }
}

fn pellipse_jet(p: f64, a: f64, x: f64) -> Jet {
    let x = x.clamp(0.0, 1.0);
    let xp = x.powf(p);
    let u = (1.0 - xp).max(0.0);
    Jet {
        v: a * u.powf(1.0 / p),
        d1: -a * x.powf(p - 1.0) * u.powf(1.0 / p - 1.0),
        d2: -a * (p - 1.0) * x.powf(p - 2.0) * u.powf(1.0 / p - 2.0),
    }
}

/// The region under the graph of a monotone profile on `[0, λ]`.
#[derive(Clone, Debug)]
pub struct GraphDomain {
    pub lambda: f64,
    pub profile: Profile,
    pub curvature: Curvature,
    pub symmetric: bool,
}

impl GraphDomain {
    pub fn circle() -> Self {
        GraphDomain { lambda: 1.0, profile: Profile::Circle, curvature: Curvature::ConcaveCap, symmetric: true }
    }

    /// `E_p(1, a)`; `p ≥ 1`, and `p = 1` gives the degenerate linear profile.
    pub fn pellipse(p: f64, a: f64) -> Result<Self> {
        if !(p >= 1.0) || !(a > 0.0) {
            return invalid(format!("pellipse needs p ≥ 1 and a > 0 (p = {p}, a = {a})"));
        }
        Ok(GraphDomain {
            lambda: 1.0,
            profile: Profile::PEllipse { p, a },
            curvature: Curvature::ConcaveCap,
            symmetric: a == 1.0,
        })
    }

    pub fn lpball2(p: f64) -> Result<Self> {
        if !(p > 0.0) || p == 2.0 {
            return invalid(format!("lpball2 needs p > 0, p ≠ 2 (p = {p})"));
        }
        Ok(GraphDomain {
            lambda: 1.0,
            profile: Profile::LpBall2 { p },
            curvature: if p > 2.0 { Curvature::ConcaveCap } else { Curvature::ConvexCup },
            symmetric: true,
        })
    }

    pub fn arc_cap(lambda: f64, shift: f64) -> Result<Self> {
        if !(lambda > 0.0 && shift >= 0.0) {
            return invalid("arc cap needs λ > 0 and shift ≥ 0");
        }
        Ok(GraphDomain {
            lambda,
            profile: Profile::ArcCap { lambda, shift },
            curvature: Curvature::ConcaveCap,
            symmetric: true,
        })
    }

    pub fn arc_cup(lambda: f64, center: f64) -> Result<Self> {
        if !(lambda > 0.0 && center > lambda) {
            return invalid("arc cup needs center > λ > 0");
        }
        Ok(GraphDomain {
            lambda,
            profile: Profile::ArcCup { lambda, center },
            curvature: Curvature::ConvexCup,
            symmetric: true,
        })
    }

    pub fn polyline(points: Vec<[f64; 2]>, curvature: Curvature) -> Result<Self> {
        if points.len() < 2 {
            return invalid("polyline needs at least two points");
        }
        let first = points[0];
        let last = points[points.len() - 1];
        if first[0] != 0.0 || last[1] != 0.0 {
            return invalid("polyline must start on the vertical axis and end on the horizontal axis");
        }
        if let Some(w) = points.windows(2).find(|w| !(w[1][0] > w[0][0]) || w[1][1] > w[0][1]) {
            return invalid(format!(
                "polyline must be strictly increasing in x and nonincreasing in y ({:?} then {:?})",
                w[0], w[1]
            ));
        }
        let symmetric = (first[1] - last[0]).abs() < 1e-12
            && points.iter().all(|q| {
                points
                    .iter()
                    .any(|r| (r[0] - q[1]).abs() < 1e-9 && (r[1] - q[0]).abs() < 1e-9)
            });
        Ok(GraphDomain { lambda: last[0], profile: Profile::Polyline(points), curvature, symmetric })
    }

    /// Graph traced by a parametric curve whose first coordinate is increasing.
    pub fn from_curve(curve: Curve) -> Result<Self> {
        if curve.accel(curve.t_range().0).is_none() {
            return Err(Error::Unsupported("graph view of a curve without a closed-form second derivative".into()));
        }
        let curvature = if curve.bounds_convex() { Curvature::ConcaveCap } else { Curvature::ConvexCup };
        Ok(GraphDomain { lambda: curve.lambda(), profile: Profile::FromCurve(curve), curvature, symmetric: true })
    }

    pub fn eval(&self, x: f64) -> Jet {
        eval_profile(&self.profile, x.clamp(0.0, self.lambda))
    }

    pub fn f(&self, x: f64) -> f64 {
        self.eval(x).v
    }

    pub fn df(&self, x: f64) -> f64 {
        self.eval(x).d1
    }

    pub fn is_polyline(&self) -> bool {
        matches!(self.profile, Profile::Polyline(_))
    }

    /// Height at `x = 0`.
    pub fn height(&self) -> f64 {
        self.f(0.0)
    }

    fn xtol(&self) -> f64 {
        1e-15 * self.lambda.max(1.0)
    }

    /// The point where `f′ = s`, clamped to `[0, λ]` when `s` lies outside the slope range.
    pub fn solve_slope(&self, s: f64) -> Result<f64> {
        match self.curvature {
            Curvature::ConcaveCap => clamped_root(|x| s - self.df(x), 0.0, self.lambda, self.xtol()),
            Curvature::ConvexCup => clamped_root(|x| self.df(x) - s, 0.0, self.lambda, self.xtol()),
        }
    }

    /// The unique `x` with `f(x) = x`.
    pub fn fixed_point(&self) -> Result<f64> {
        brent(|x| self.f(x) - x, 0.0, self.lambda, self.xtol())
    }

    /// `max v₁x + v₂y` over the region (attained on the upper boundary).
    pub fn support_max(&self, v: [f64; 2]) -> Result<SupportResult> {
        let ends = [[0.0, self.height()], [self.lambda, 0.0]];
        let mut cands: Vec<[f64; 2]> = ends.to_vec();
        if let Profile::Polyline(pts) = &self.profile {
            cands.extend(pts.iter().copied());
        } else if self.curvature == Curvature::ConcaveCap && v[1] > 0.0 {
            let x = self.solve_slope(-v[0] / v[1])?;
            cands.push([x, self.f(x)]);
        }
        Ok(best(&cands, v, true))
    }

    /// `min v₁x + v₂y` over the upper boundary.
    pub fn support_min(&self, v: [f64; 2]) -> Result<SupportResult> {
        let ends = [[0.0, self.height()], [self.lambda, 0.0]];
        let mut cands: Vec<[f64; 2]> = ends.to_vec();
        if let Profile::Polyline(pts) = &self.profile {
            cands.extend(pts.iter().copied());
        } else if self.curvature == Curvature::ConvexCup && v[1] > 0.0 {
            let x = self.solve_slope(-v[0] / v[1])?;
            cands.push([x, self.f(x)]);
        }
        Ok(best(&cands, v, false))
    }

    /// Lebesgue measure of the region.
    pub fn area(&self) -> Result<f64> {
        if let Profile::Polyline(pts) = &self.profile {
            let mut poly = vec![[0.0, 0.0]];
            poly.extend(pts.iter().rev().copied());
            return Ok(shoelace(&poly).abs());
        }
        if self.symmetric {
            let x = self.fixed_point()?;
            let half = self.integral(0.0, x)?;
            return Ok(2.0 * half - x * x);
        }
        self.integral(0.0, self.lambda)
    }

    /// `∫ f` over `[a, b]`, split at the bump breakpoints of perturbed profiles.
    pub fn integral(&self, a: f64, b: f64) -> Result<f64> {
        let mut cuts = vec![a, b];
        if let Profile::Perturbed(pp) = &self.profile {
            for (bump, _) in &pp.bumps {
                cuts.extend(bump.breakpoints());
            }
        }
        cuts.retain(|&c| c >= a && c <= b);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut total = 0.0;
        for w in cuts.windows(2) {
            total += integrate(|x| self.f(x), w[0], w[1], 1e-13 * self.lambda.max(1.0).powi(2))?;
        }
        Ok(total)
    }

    pub fn contains(&self, y: [f64; 2]) -> bool {
        y[0] >= 0.0 && y[1] >= 0.0 && y[0] <= self.lambda && y[1] <= self.f(y[0]) + 1e-14
    }
}

fn best(cands: &[[f64; 2]], v: [f64; 2], maximize: bool) -> SupportResult {
    let mut out: Option<SupportResult> = None;
    for c in cands {
        let val = v[0] * c[0] + v[1] * c[1];
        let better = match &out {
            None => true,
            Some(o) => {
                if maximize {
                    val > o.value
                } else {
                    val < o.value
                }
            }
        };
        if better {
            out = Some(SupportResult { value: val, witness: c.to_vec() });
        }
    }
    out.expect("candidate list is never empty")
}

/// Signed polygon area.
pub fn shoelace(pts: &[[f64; 2]]) -> f64 {
    let n = pts.len();
    0.5 * (0..n)
        .map(|i| {
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
}

/// Convex hull (counter-clockwise, no collinear points).
pub fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 1e-15 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 1e-15 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

// ---------------------------------------------------------------------------
// Polytopes

#[derive(Clone, Debug)]
pub struct PolytopeDomain {
    pub vertices: Vec<Vec<f64>>,
}

impl PolytopeDomain {
    pub fn new(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let n = vertices.first().map(|v| v.len()).unwrap_or(0);
        if n == 0 {
            return invalid("polytope needs at least one vertex");
        }
        for v in &vertices {
            if v.len() != n {
                return Err(Error::Dimension { expected: n, got: v.len() });
            }
            if v.iter().any(|&c| !(c >= 0.0) || !c.is_finite()) {
                return invalid("polytope vertices must be finite and nonnegative");
            }
        }
        Ok(PolytopeDomain { vertices })
    }

    /// The kite `conv{0, e₁, e₂, (r, r)}`.
    pub fn diagonal(r: f64) -> Self {
        PolytopeDomain { vertices: vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![r, r]] }
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    /// Every coordinate permutation maps the vertex set onto itself.
    pub fn is_symmetric(&self) -> bool {
        let n = self.dim();
        let mut perm: Vec<usize> = (0..n).collect();
        loop {
            let closed = self.vertices.iter().all(|v| {
                let w: Vec<f64> = perm.iter().map(|&i| v[i]).collect();
                self.vertices.iter().any(|u| u.iter().zip(&w).all(|(a, b)| (a - b).abs() < 1e-12))
            });
            if !closed {
                return false;
            }
            if !next_permutation(&mut perm) {
                return true;
            }
        }
    }

    /// Membership in the convex hull, decided by a small feasibility LP.
    pub fn contains(&self, y: &[f64]) -> bool {
        use microlp::{ComparisonOp, OptimizationDirection, Problem};
        let n = self.dim();
        if y.len() != n || y.iter().any(|&c| c < -1e-12) {
            return false;
        }
        let mut prob = Problem::new(OptimizationDirection::Minimize);
        let lam: Vec<_> = self.vertices.iter().map(|_| prob.add_var(0.0, (0.0, f64::INFINITY))).collect();
        prob.add_constraint(lam.iter().map(|&l| (l, 1.0)).collect::<Vec<_>>(), ComparisonOp::Eq, 1.0);
        // slack in each coordinate so that boundary points survive rounding
        for i in 0..n {
            let s = prob.add_var(1.0, (-1e-10, 1e-10));
            let mut row: Vec<_> = lam.iter().zip(&self.vertices).map(|(&l, v)| (l, v[i])).collect();
            row.push((s, 1.0));
            prob.add_constraint(row, ComparisonOp::Eq, y[i]);
        }
        prob.solve().is_ok()
    }

    pub fn hull2(&self) -> Vec<[f64; 2]> {
        let pts: Vec<[f64; 2]> = self.vertices.iter().map(|v| [v[0], v[1]]).collect();
        convex_hull(&pts)
    }
}

/// Lexicographic successor; returns false after the last permutation.
pub fn next_permutation(a: &mut [usize]) -> bool {
    let n = a.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

// ---------------------------------------------------------------------------
// Domains

#[derive(Clone, Debug)]
pub enum Domain {
    Graph(GraphDomain),
    Curve(Curve),
    Polytope(PolytopeDomain),
    /// Polydisk `P(a₁, …, aₙ)`.
    Box(Vec<f64>),
    /// `{Σ x_i^{p/2} ≤ 1}`.
    LpBall { n: usize, p: f64 },
    /// Ellipsoid `E(a₁, …, aₙ)`: `{Σ x_i/a_i ≤ 1}`.
    Simplex(Vec<f64>),
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::Graph(_) | Domain::Curve(_) => 2,
            Domain::Polytope(p) => p.dim(),
            Domain::Box(a) | Domain::Simplex(a) => a.len(),
            Domain::LpBall { n, .. } => *n,
        }
    }

    pub fn is_convex(&self) -> bool {
        match self {
            Domain::Graph(g) => g.curvature == Curvature::ConcaveCap,
            Domain::Curve(c) => c.bounds_convex(),
            Domain::Polytope(_) | Domain::Box(_) | Domain::Simplex(_) => true,
            Domain::LpBall { p, .. } => *p >= 2.0,
        }
    }

    pub fn is_concave(&self) -> bool {
        match self {
            Domain::Graph(g) => g.curvature == Curvature::ConvexCup,
            Domain::Curve(c) => !c.bounds_convex(),
            Domain::Polytope(_) | Domain::Box(_) => false,
            Domain::Simplex(_) => true,
            Domain::LpBall { p, .. } => *p <= 2.0,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        match self {
            Domain::Graph(g) => g.symmetric,
            Domain::Curve(_) | Domain::LpBall { .. } => true,
            Domain::Polytope(p) => p.is_symmetric(),
            Domain::Box(a) | Domain::Simplex(a) => a.iter().all(|&x| (x - a[0]).abs() < 1e-14),
        }
    }

    fn check_vector(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: v.len() });
        }
        if v.iter().any(|&c| !(c >= 0.0)) {
            return invalid("support vector must have nonnegative components");
        }
        if v.iter().all(|&c| c == 0.0) {
            return invalid("support vector must be nonzero");
        }
        Ok(())
    }

    /// `max ⟨v, w⟩` over `Ω`, with a maximiser on the upper boundary.
    pub fn support_max(&self, v: &[f64]) -> Result<SupportResult> {
        self.check_vector(v)?;
        match self {
            Domain::Graph(g) => g.support_max([v[0], v[1]]),
            Domain::Curve(c) => curve_support(c, [v[0], v[1]], true),
            Domain::Polytope(p) => {
                let mut best_i = 0;
                let mut best_v = f64::NEG_INFINITY;
                for (i, w) in p.vertices.iter().enumerate() {
                    let s = dot(v, w);
                    if s > best_v {
                        best_v = s;
                        best_i = i;
                    }
                }
                Ok(SupportResult { value: best_v, witness: p.vertices[best_i].clone() })
            }
            Domain::Box(a) => Ok(SupportResult { value: dot(v, a), witness: a.clone() }),
            Domain::Simplex(a) => {
                let i = argbest(v.iter().zip(a).map(|(x, y)| x * y), true);
                Ok(SupportResult { value: v[i] * a[i], witness: axis_point(a.len(), i, a[i]) })
            }
            Domain::LpBall { n, p } => {
                if *p >= 2.0 {
                    Ok(lp_holder(v, *p))
                } else {
                    let i = argbest(v.iter().copied(), true);
                    Ok(SupportResult { value: v[i], witness: axis_point(*n, i, 1.0) })
                }
            }
        }
    }

    /// `min ⟨v, w⟩` over the upper boundary of `Ω`.
    pub fn support_min(&self, v: &[f64]) -> Result<SupportResult> {
        self.check_vector(v)?;
        match self {
            Domain::Graph(g) => g.support_min([v[0], v[1]]),
            Domain::Curve(c) => curve_support(c, [v[0], v[1]], false),
            Domain::Simplex(a) => {
                let i = argbest(v.iter().zip(a).map(|(x, y)| x * y), false);
                Ok(SupportResult { value: v[i] * a[i], witness: axis_point(a.len(), i, a[i]) })
            }
            Domain::LpBall { n, p } => {
                if *p <= 2.0 && *p != 2.0 {
                    Ok(lp_holder(v, *p))
                } else {
                    let i = argbest(v.iter().copied(), false);
                    Ok(SupportResult { value: v[i], witness: axis_point(*n, i, 1.0) })
                }
            }
            Domain::Polytope(_) | Domain::Box(_) => {
                Err(Error::Unsupported("support_min on a convex polytope or box".into()))
            }
        }
    }

    /// Lebesgue measure of `Ω` (the "volume" of the toric domain).
    pub fn area(&self) -> Result<f64> {
        match self {
            Domain::Graph(g) => g.area(),
            Domain::Curve(c) => {
                let (lo, hi) = c.t_range();
                // split at the diagonal for the two-branch curve
                let mid = if matches!(c, Curve::OrCurve { .. }) { 0.0 } else { 0.5 * (lo + hi) };
                let f = |t: f64| c.point(t)[1] * c.velocity(t)[0];
                Ok(integrate(f, lo, mid, 1e-12)? + integrate(f, mid, hi, 1e-12)?)
            }
            Domain::Polytope(p) => {
                if p.dim() != 2 {
                    return Err(Error::Unsupported("area of a polytope in dimension ≠ 2".into()));
                }
                Ok(shoelace(&p.hull2()).abs())
            }
            Domain::Box(a) => Ok(a.iter().product()),
            Domain::Simplex(a) => Ok(a.iter().product::<f64>() / factorial(a.len())),
            Domain::LpBall { n, p } => {
                use statrs::function::gamma::ln_gamma;
                let q = p / 2.0;
                let nf = *n as f64;
                Ok((nf * ln_gamma(1.0 + 1.0 / q) - ln_gamma(1.0 + nf / q)).exp())
            }
        }
    }

    pub fn contains(&self, y: &[f64]) -> Result<bool> {
        if y.len() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: y.len() });
        }
        if y.iter().any(|&c| c < 0.0) {
            return Ok(false);
        }
        Ok(match self {
            Domain::Graph(g) => g.contains([y[0], y[1]]),
            Domain::Curve(c) => {
                let lam = c.lambda();
                if y[0] > lam {
                    false
                } else {
                    let t = c.t_at_x(y[0])?;
                    y[1] <= c.point(t)[1] + 1e-14
                }
            }
            Domain::Polytope(p) => p.contains(y),
            Domain::Box(a) => y.iter().zip(a).all(|(x, b)| *x <= b + 1e-14),
            Domain::Simplex(a) => y.iter().zip(a).map(|(x, b)| x / b).sum::<f64>() <= 1.0 + 1e-14,
            Domain::LpBall { p, .. } => y.iter().map(|x| x.powf(p / 2.0)).sum::<f64>() <= 1.0 + 1e-14,
        })
    }

    /// Sampled checks of the flags the capacity formulas rely on.
    pub fn validate(&self) -> Validation {
        let mut out = Validation::default();
        match self {
            Domain::Graph(g) => validate_graph(g, &mut out),
            Domain::Polytope(p) => {
                out.push("convex", true);
                out.push("symmetric", p.is_symmetric());
                // the hull must not cross the orthant boundary nor miss the origin
                let n = p.dim();
                out.push("contains_origin", p.contains(&vec![0.0; n]));
            }
            _ => {
                out.push("convex", self.is_convex());
                out.push("concave", self.is_concave());
                out.push("symmetric", self.is_symmetric());
            }
        }
        out
    }
}

fn validate_graph(g: &GraphDomain, out: &mut Validation) {
    const N: usize = 10_000;
    let lam = g.lambda;
    out.push("endpoints", g.height() > 0.0 && g.f(lam).abs() <= 1e-9 * lam.max(1.0));
    let xs: Vec<f64> = (1..N).map(|i| lam * i as f64 / N as f64).collect();
    let jets: Vec<Jet> = xs.iter().map(|&x| g.eval(x)).collect();
    out.push("decreasing", jets.iter().all(|j| j.d1 <= 0.0));
    if !g.is_polyline() {
        let ok = match g.curvature {
            Curvature::ConcaveCap => jets.iter().all(|j| j.d2 < 0.0),
            Curvature::ConvexCup => jets.iter().all(|j| j.d2 > 0.0),
        };
        out.push(
            match g.curvature {
                Curvature::ConcaveCap => "concave_cap",
                Curvature::ConvexCup => "convex_cup",
            },
            ok,
        );
    }
    let sym = xs
        .iter()
        .step_by(10)
        .all(|&x| (g.f(g.f(x)) - x).abs() <= 1e-8 * lam.max(1.0));
    out.push("symmetric", sym);
    let ends = [g.eval(0.0).d1, g.eval(lam).d1];
    let slopes_ok = jets.iter().map(|j| j.d1).chain(ends).all(|d| d.is_finite() && d.abs() >= 1e-9);
    out.push("smooth_boundary", slopes_ok);
    if sym {
        let x = g.fixed_point().unwrap_or(f64::NAN);
        let left_ok = xs.iter().filter(|&&t| t < x).all(|&t| g.df(t).is_finite());
        out.push("symmetric_closure_smooth", left_ok && (g.df(x) + 1.0).abs() < 1e-6);
    }
}

/// Named pass/fail checks.
#[derive(Clone, Debug, Default)]
pub struct Validation {
    pub items: Vec<(&'static str, bool)>,
}

impl Validation {
    fn push(&mut self, name: &'static str, ok: bool) {
        self.items.push((name, ok));
    }

    pub fn get(&self, name: &str) -> Option<bool> {
        self.items.iter().find(|(n, _)| *n == name).map(|(_, b)| *b)
    }
}

fn curve_support(c: &Curve, v: [f64; 2], maximize: bool) -> Result<SupportResult> {
    let (lo, hi) = c.t_range();
    let mut cands = vec![c.point(lo), c.point(hi)];
    // ⟨v, γ′⟩ is increasing for a concave region and decreasing for a convex one
    let sign = if c.bounds_convex() { -1.0 } else { 1.0 };
    if maximize == c.bounds_convex() {
        let slope = |t: f64| {
            let d = c.direction(t);
            sign * (v[0] * d[0] + v[1] * d[1])
        };
        let t = clamped_root(slope, lo, hi, 1e-15)?;
        cands.push(c.point(t));
    }
    Ok(best(&cands, v, maximize))
}

fn lp_holder(v: &[f64], p: f64) -> SupportResult {
    // Hölder (p > 2) or reverse Hölder (p < 2) with conjugate exponent p/(p−2)
    let q = p / 2.0;
    let r = p / (p - 2.0);
    let norm = v.iter().map(|&x| x.powf(r)).sum::<f64>().powf(1.0 / r);
    let raw: Vec<f64> = v.iter().map(|&x| x.powf(1.0 / (q - 1.0))).collect();
    let scale = raw.iter().map(|&w| w.powf(q)).sum::<f64>().powf(-1.0 / q);
    SupportResult { value: norm, witness: raw.iter().map(|w| w * scale).collect() }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn argbest(it: impl Iterator<Item = f64>, maximize: bool) -> usize {
    let mut bi = 0;
    let mut bv = if maximize { f64::NEG_INFINITY } else { f64::INFINITY };
    for (i, x) in it.enumerate() {
        if (maximize && x > bv) || (!maximize && x < bv) {
            bv = x;
            bi = i;
        }
    }
    bi
}

fn axis_point(n: usize, i: usize, t: f64) -> Vec<f64> {
    let mut w = vec![0.0; n];
    w[i] = t;
    w
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_endpoints_on_axes() {
        let c = Curve::Alpha;
        let a = c.point(0.0);
        let b = c.point(2.0 * PI);
        assert!(a[0].abs() < 1e-15 && (a[1] - 2.0 * PI).abs() < 1e-14);
        assert!((b[0] - 2.0 * PI).abs() < 1e-14 && b[1].abs() < 1e-14);
    }

    #[test]
    fn gamma_eps_starts_on_axis() {
        let c = Curve::gamma_eps(0.05).unwrap();
        let (lo, hi) = c.t_range();
        assert!(c.point(lo)[0].abs() < 1e-14);
        assert!(c.point(hi)[1].abs() < 1e-14);
    }

    #[test]
    fn circle_jet_matches_finite_differences() {
        let g = GraphDomain::circle();
        let h = 1e-5;
        let x = 0.3;
        let fd1 = (g.f(x + h) - g.f(x - h)) / (2.0 * h);
        let fd2 = (g.f(x + h) - 2.0 * g.f(x) + g.f(x - h)) / (h * h);
        let j = g.eval(x);
        assert!((j.d1 - fd1).abs() < 1e-9);
        assert!((j.d2 - fd2).abs() < 1e-4);
    }

    #[test]
    fn arcs_pass_through_axis_points() {
        let cap = GraphDomain::arc_cap(3.0, 0.7).unwrap();
        assert!((cap.f(0.0) - 3.0).abs() < 1e-14 && cap.f(3.0).abs() < 1e-14);
        let cup = GraphDomain::arc_cup(2.0, 2.6).unwrap();
        assert!((cup.f(0.0) - 2.0).abs() < 1e-14 && cup.f(2.0).abs() < 1e-14);
        assert!((cup.df(0.0) + 2.6 / 0.6).abs() < 1e-12);
    }

    #[test]
    fn or_g_vanishes_at_range_end() {
        for p in [1.5, 3.0] {
            assert!(or_g(p, or_c(p) * (1.0 - 1e-12)).abs() < 1e-5);
        }
    }

    #[test]
    fn or_g_prime_matches_difference_quotient() {
        let p = 3.0;
        let u = 0.3;
        let h = 1e-5;
        let fd = (or_g(p, u + h) - or_g(p, u - h)) / (2.0 * h);
        assert!((or_g_prime(p, u) - fd).abs() < 1e-6);
    }

    #[test]
    fn permutations_enumerate_all() {
        let mut a = vec![0, 1, 2];
        let mut n = 1;
        while next_permutation(&mut a) {
            n += 1;
        }
        assert_eq!(n, 6);
    }
}
