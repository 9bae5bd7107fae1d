//! Brute-force references. Nothing here calls the capacity engines or the
//! support-function code of [`crate::domains`]; boundaries are sampled from
//! their defining parametrisations and every integer vector is tried.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domains::{Curvature, Domain};
use crate::{invalid, Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct GridSpec {
    /// Grid points per axis at every refinement level.
    pub resolution: usize,
    /// Refinement stops once a cell is smaller than this (in parameter units).
    pub min_cell: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { resolution: 64, min_cell: 1e-10 }
    }
}

impl GridSpec {
    fn check(&self) -> Result<()> {
        if self.resolution < 64 {
            return invalid("grid resolution must be at least 64");
        }
        if !(self.min_cell >= 1e-10) {
            return invalid("refinement stops at a cell size of 1e-10");
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct OracleValue {
    pub value: f64,
    /// Error bound from the last refinement level.
    pub error: f64,
    pub vector: Vec<u64>,
}

/// Literal description of the part of the boundary where the optimum of a
/// nonnegative functional lies.
enum Sampled {
    Vertices(Vec<Vec<f64>>),
    /// Parametrised over `[0, 1]^d`.
    Surface { dim: usize, point: Box<dyn Fn(&[f64]) -> Vec<f64>> },
}

fn sampled(dom: &Domain) -> Result<Sampled> {
    Ok(match dom {
        Domain::Box(a) => {
            let n = a.len();
            let verts = (0..1usize << n)
                .map(|m| (0..n).map(|i| if m >> i & 1 == 1 { a[i] } else { 0.0 }).collect())
                .collect();
            Sampled::Vertices(verts)
        }
        Domain::Simplex(a) => {
            let n = a.len();
            let mut verts = vec![vec![0.0; n]];
            for i in 0..n {
                let mut v = vec![0.0; n];
                v[i] = a[i];
                verts.push(v);
            }
            Sampled::Vertices(verts)
        }
        Domain::Polytope(p) => Sampled::Vertices(p.vertices.clone()),
        Domain::Graph(g) => {
            let g = g.clone();
            Sampled::Surface {
                dim: 1,
                point: Box::new(move |u| {
                    let x = u[0] * g.lambda;
                    vec![x, g.f(x)]
                }),
            }
        }
        Domain::Curve(c) => {
            let c = c.clone();
            let (a, b) = c.t_range();
            Sampled::Surface {
                dim: 1,
                point: Box::new(move |u| c.point(a + u[0] * (b - a)).to_vec()),
            }
        }
        Domain::LpBall { n, p } => {
            let (n, q) = (*n, p / 2.0);
            if !(2..=3).contains(&n) {
                return invalid("oracle supports n ≤ 3");
            }
            Sampled::Surface {
                dim: n - 1,
                point: Box::new(move |u| {
                    let half = std::f64::consts::FRAC_PI_2;
                    let d = if n == 2 {
                        let t = u[0] * half;
                        vec![t.cos(), t.sin()]
                    } else {
                        let (t, s) = (u[0] * half, u[1] * half);
                        vec![t.cos() * s.sin(), t.sin() * s.sin(), s.cos()]
                    };
                    let norm = d.iter().map(|x| x.powf(q)).sum::<f64>().powf(1.0 / q);
                    d.iter().map(|x| x / norm).collect()
                }),
            }
        }
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `max` (or `min`) of `⟨v, w⟩` by repeated grid zooming.
fn grid_optimize(s: &Sampled, v: &[f64], maximize: bool, grid: GridSpec) -> (f64, f64) {
    let sign = if maximize { 1.0 } else { -1.0 };
    match s {
        Sampled::Vertices(vs) => {
            let best = vs.iter().map(|w| sign * dot(v, w)).fold(f64::NEG_INFINITY, f64::max);
            (sign * best, 0.0)
        }
        Sampled::Surface { dim, point } => {
            let res = grid.resolution;
            let mut lo = vec![0.0; *dim];
            let mut hi = vec![1.0; *dim];
            let mut best = f64::NEG_INFINITY;
            let mut err;
            loop {
                let h: Vec<f64> = (0..*dim).map(|i| (hi[i] - lo[i]) / res as f64).collect();
                let mut arg = vec![0usize; *dim];
                let mut level_best = f64::NEG_INFINITY;
                let mut spread = 0.0f64;
                let mut idx = vec![0usize; *dim];
                let mut prev_row: Vec<f64> = Vec::new();
                let mut row: Vec<f64> = Vec::with_capacity(res + 1);
                loop {
                    let u: Vec<f64> = (0..*dim).map(|i| lo[i] + idx[i] as f64 * h[i]).collect();
                    let val = sign * dot(v, &point(&u));
                    if let Some(last) = row.last() {
                        spread = spread.max((val - last).abs());
                    }
                    if let Some(above) = prev_row.get(row.len()) {
                        spread = spread.max((val - above).abs());
                    }
                    row.push(val);
                    if val > level_best {
                        level_best = val;
                        arg.clone_from(&idx);
                    }
                    // odometer over the grid
                    let mut i = 0;
                    loop {
                        if i == *dim {
                            break;
                        }
                        idx[i] += 1;
                        if idx[i] <= res {
                            break;
                        }
                        idx[i] = 0;
                        i += 1;
                    }
                    if idx[0] == 0 {
                        prev_row = std::mem::take(&mut row);
                    }
                    if i == *dim {
                        break;
                    }
                }
                best = best.max(level_best);
                err = spread;
                if h.iter().all(|&c| c < grid.min_cell) {
                    break;
                }
                for i in 0..*dim {
                    let c = lo[i] + arg[i] as f64 * h[i];
                    lo[i] = (c - 2.0 * h[i]).max(0.0);
                    hi[i] = (c + 2.0 * h[i]).min(1.0);
                }
            }
            (sign * best, err)
        }
    }
}

/// Every integer vector of the minimax formula, with a grid optimisation per vector.
pub fn brute_gh(dom: &Domain, k: usize, grid: GridSpec) -> Result<OracleValue> {
    grid.check()?;
    let n = dom.dim();
    if n > 3 || k > 30 || k == 0 {
        return invalid("oracle needs n ≤ 3 and 1 ≤ k ≤ 30");
    }
    let convex = match dom {
        Domain::Graph(g) => g.curvature == Curvature::ConcaveCap,
        Domain::LpBall { p, .. } => *p >= 2.0,
        Domain::Curve(c) => c.bounds_convex(),
        _ => true,
    };
    let s = sampled(dom)?;
    let (total, offset) = if convex { (k, 0) } else { (k - 1, 1) };
    let mut best: Option<OracleValue> = None;
    let mut cur = vec![0u64; n];
    fn rec(i: usize, left: usize, cur: &mut Vec<u64>, visit: &mut dyn FnMut(&[u64])) {
        if i + 1 == cur.len() {
            cur[i] = left as u64;
            visit(cur);
            return;
        }
        for a in 0..=left {
            cur[i] = a as u64;
            rec(i + 1, left - a, cur, visit);
        }
    }
    rec(0, total, &mut cur, &mut |w| {
        let v: Vec<u64> = w.iter().map(|x| x + offset).collect();
        let vf: Vec<f64> = v.iter().map(|&x| x as f64).collect();
        let (val, err) = grid_optimize(&s, &vf, convex, grid);
        let better = match &best {
            None => true,
            Some(b) => {
                if convex {
                    val < b.value
                } else {
                    val > b.value
                }
            }
        };
        if better {
            best = Some(OracleValue { value: val, error: err, vector: v });
        }
    });
    best.ok_or_else(|| Error::Invalid("no vectors".into()))
}

/// `k`-th smallest element of `{1, 2, …} ∪ {a, 2a, …}`.
pub fn sorted_multiset_ellipsoid(a: f64, k: usize) -> f64 {
    let mut out = Vec::with_capacity(2 * k);
    out.extend((1..=k).map(|i| i as f64));
    out.extend((1..=k).map(|i| i as f64 * a));
    out.sort_by(f64::total_cmp);
    out[k - 1]
}

/// `k`-th element, indexed from zero, of the sorted `{a + b·m : a, b ≥ 0}`.
pub fn lattice_ech_ellipsoid(m: u64, k: usize) -> f64 {
    let k64 = k as u64;
    let mut vals = Vec::new();
    for b in 0..=k64 / m.max(1) {
        for a in 0..=k64 {
            if a + b * m <= k64 {
                vals.push(a + b * m);
            }
        }
    }
    vals.sort_unstable();
    vals[k] as f64
}

#[derive(Clone, Debug)]
pub struct AreaEstimate {
    pub grid: f64,
    pub grid_error: f64,
    pub monte_carlo: f64,
    /// Three standard errors.
    pub monte_carlo_error: f64,
}

fn extent(dom: &Domain, axis: usize) -> Result<f64> {
    let at = |t: f64| -> Result<bool> {
        let mut y = [0.0, 0.0];
        y[axis] = t;
        dom.contains(&y)
    };
    let mut hi = 1.0;
    while at(hi)? {
        hi *= 2.0;
        if hi > 1e12 {
            return invalid("domain is unbounded");
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if at(mid)? {
            lo = mid
        } else {
            hi = mid
        }
        if hi - lo < 1e-14 * hi {
            break;
        }
    }
    Ok(lo)
}

/// Area of a downward-closed planar region from membership queries alone.
pub fn brute_area(dom: &Domain, grid: GridSpec) -> Result<AreaEstimate> {
    grid.check()?;
    if dom.dim() != 2 {
        return Err(Error::Dimension { expected: 2, got: dom.dim() });
    }
    let xmax = extent(dom, 0)?;
    let ymax = extent(dom, 1)? * (1.0 + 1e-12) + 1e-300;
    let height = |x: f64| -> Result<f64> {
        let (mut lo, mut hi) = (0.0, ymax * 1.01);
        if !dom.contains(&[x, 0.0])? {
            return Ok(0.0);
        }
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if dom.contains(&[x, mid])? {
                lo = mid
            } else {
                hi = mid
            }
        }
        Ok(lo)
    };
    let midpoint = |cols: usize| -> Result<f64> {
        let h = xmax / cols as f64;
        let mut s = 0.0;
        for i in 0..cols {
            s += height((i as f64 + 0.5) * h)?;
        }
        Ok(s * h)
    };
    let cols = grid.resolution * 64;
    let coarse = midpoint(cols / 2)?;
    let fine = midpoint(cols)?;

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let samples = 200_000;
    let mut hits = 0usize;
    for _ in 0..samples {
        let y = [rng.gen::<f64>() * xmax, rng.gen::<f64>() * ymax];
        if dom.contains(&y)? {
            hits += 1;
        }
    }
    let box_area = xmax * ymax;
    let frac = hits as f64 / samples as f64;
    // smoothed fraction so an all-hit or all-miss run keeps a positive bar
    let q = (hits as f64 + 1.0) / (samples as f64 + 2.0);
    Ok(AreaEstimate {
        grid: fine,
        grid_error: (fine - coarse).abs(),
        monte_carlo: frac * box_area,
        monte_carlo_error: 3.0 * box_area * (q * (1.0 - q) / samples as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multisets() {
        assert_eq!(sorted_multiset_ellipsoid(2.0, 3), 2.0);
        assert_eq!(sorted_multiset_ellipsoid(1.0, 5), 3.0);
        assert_eq!(sorted_multiset_ellipsoid(std::f64::consts::E, 1), 1.0);
        assert_eq!(lattice_ech_ellipsoid(1, 3), 2.0);
        assert_eq!(lattice_ech_ellipsoid(2, 2), 2.0);
        assert_eq!(lattice_ech_ellipsoid(2, 1), 1.0);
    }

    #[test]
    fn simplex_brute() {
        let v = brute_gh(&Domain::Simplex(vec![1.0, 2.0]), 4, GridSpec::default()).unwrap();
        assert!((v.value - 3.0).abs() < 1e-6);
    }
}
