//! Subcommand bodies. Each returns the text to print; the binary handles I/O.

use std::collections::BTreeMap;
use std::time::Instant;

use capax::echcap::{ech_capacity, weight_expansion};
use capax::families::{
    concave_family_base, convex_family_base, family_blind, family_mutual, family_novolume, ivr_graph_bounds, Family,
};
use capax::ghcap::{self, CapacityRecord};
use capax::oracle::{brute_gh, GridSpec};
use capax::{Curve, Domain, GraphDomain, Profile};
use rayon::prelude::*;
use serde::Serialize;

use crate::record::{fmt12, round12, CarrierOut, OracleOut, ResultRecord};
use crate::spec::{DomainSpecFile, Params, PerturbationFile};
use crate::{CliError, VERSION};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Engine {
    Auto,
    General,
    Symmetric,
    Graph,
    ClosedForm,
}

impl Engine {
    fn name(self) -> &'static str {
        match self {
            Engine::Auto => "auto",
            Engine::General => "general",
            Engine::Symmetric => "symmetric",
            Engine::Graph => "graph",
            Engine::ClosedForm => "closed-form",
        }
    }
}

/// The dedicated formula for the domain's class, if there is one.
pub fn closed_form(dom: &Domain, k: usize) -> capax::Result<CapacityRecord> {
    match dom {
        Domain::LpBall { n, p } => ghcap::gh_lp_ball(*n, *p, k),
        Domain::Polytope(poly) if poly.is_symmetric() => ghcap::gh_polytope(poly, k),
        Domain::Curve(Curve::Alpha) => ghcap::gh_lagrangian_bidisk(k),
        Domain::Curve(Curve::OrCurve { p }) => ghcap::gh_or_lp_bidisk(*p, k),
        Domain::Graph(g) => match g.profile {
            Profile::PEllipse { p, a } => ghcap::gh_pellipsoid(p, a, k),
            _ => graph_engine(g, k),
        },
        _ => Err(capax::Error::Unsupported("no closed form for this domain".into())),
    }
}

fn graph_engine(g: &GraphDomain, k: usize) -> capax::Result<CapacityRecord> {
    if g.symmetric {
        ghcap::gh_graph_symmetric(g, k)
    } else {
        ghcap::gh_graph_convex(g, k)
    }
}

pub fn run_engine(dom: &Domain, k: usize, engine: Engine) -> capax::Result<(CapacityRecord, &'static str)> {
    match engine {
        Engine::General => ghcap::gh_general(dom, k).map(|r| (r, "general")),
        Engine::Symmetric => ghcap::gh_symmetric(dom, k).map(|r| (r, "symmetric")),
        Engine::Graph => match dom {
            Domain::Graph(g) => graph_engine(g, k).map(|r| (r, "graph")),
            _ => Err(capax::Error::Unsupported("graph engine needs a graph domain".into())),
        },
        Engine::ClosedForm => closed_form(dom, k).map(|r| (r, "closed-form")),
        Engine::Auto => {
            if let Ok(r) = closed_form(dom, k) {
                return Ok((r, "closed-form"));
            }
            if dom.is_symmetric() {
                if let Ok(r) = ghcap::gh_symmetric(dom, k) {
                    return Ok((r, "symmetric"));
                }
            }
            ghcap::gh_general(dom, k).map(|r| (r, "general"))
        }
    }
}

pub struct CapacityArgs {
    pub k: (usize, usize),
    pub engine: Engine,
    pub verify: bool,
    pub tol: f64,
    pub timing: bool,
}

pub fn cmd_capacity(spec: &DomainSpecFile, args: &CapacityArgs) -> Result<ResultRecord, CliError> {
    let start = Instant::now();
    let dom = spec.to_domain()?;
    let ks: Vec<usize> = (args.k.0..=args.k.1).collect();
    let results: Vec<_> = ks.par_iter().map(|&k| run_engine(&dom, k, args.engine)).collect();
    let mut recs = Vec::with_capacity(ks.len());
    let mut used = Vec::new();
    for r in results {
        let (rec, name) = r?;
        recs.push(rec);
        if !used.contains(&name) {
            used.push(name);
        }
    }
    let mut tolerances = BTreeMap::new();
    let mut oracle = None;
    let mut failure = None;
    if args.verify {
        if dom.dim() > 3 || args.k.1 > 30 {
            return Err(CliError::Spec("--verify needs n ≤ 3 and k ≤ 30".into()));
        }
        tolerances.insert("verify".to_string(), args.tol);
        let brute: Vec<_> = ks.par_iter().map(|&k| brute_gh(&dom, k, GridSpec::default())).collect();
        let mut values = Vec::new();
        let mut errors = Vec::new();
        let mut max_diff: f64 = 0.0;
        for (b, rec) in brute.into_iter().zip(&recs) {
            let b = b?;
            let diff = (b.value - rec.value).abs();
            max_diff = max_diff.max(diff);
            if diff > args.tol + b.error && failure.is_none() {
                failure = Some(format!("k = {}: engine {} vs oracle {} ± {}", rec.k, rec.value, b.value, b.error));
            }
            values.push(b.value);
            errors.push(b.error);
        }
        oracle = Some(OracleOut { values, errors, max_diff });
    }
    let record = ResultRecord {
        version: VERSION,
        command: "capacity".into(),
        spec_hash: spec.hash(),
        k_range: [args.k.0, args.k.1],
        engine: format!("{} ({})", args.engine.name(), used.join(",")),
        values: recs.iter().map(|r| r.value).collect(),
        carriers: recs
            .iter()
            .map(|r| CarrierOut { k: r.k, vector: r.carrier_vector.clone(), point: r.carrier_point.clone() })
            .collect(),
        tolerances,
        weights: None,
        oracle,
        wall_time_s: args.timing.then(|| start.elapsed().as_secs_f64()),
    }
    .rounded();
    if let Some(msg) = failure {
        return Err(CliError::Verify(format!("{msg}\n{}", record.to_json())));
    }
    Ok(record)
}

pub fn cmd_ech(spec: &DomainSpecFile, k: (usize, usize), weights: Option<usize>, timing: bool) -> Result<ResultRecord, CliError> {
    let start = Instant::now();
    let dom = spec.to_domain()?;
    let ks: Vec<usize> = (k.0..=k.1).collect();
    let vals: Vec<_> = ks.par_iter().map(|&k| ech_capacity(&dom, k)).collect();
    let mut values = Vec::new();
    let mut carriers = Vec::new();
    for v in vals {
        let v = v?;
        values.push(v.value);
        carriers.push(CarrierOut { k: v.k, vector: v.d.clone(), point: v.weights[..v.d.len()].to_vec() });
    }
    let weights = match weights {
        Some(m) => Some(weight_expansion(&dom, m)?.values()),
        None => None,
    };
    Ok(ResultRecord {
        version: VERSION,
        command: "ech".into(),
        spec_hash: spec.hash(),
        k_range: [k.0, k.1],
        engine: "weight-expansion".into(),
        values,
        carriers,
        tolerances: BTreeMap::new(),
        weights,
        oracle: None,
        wall_time_s: timing.then(|| start.elapsed().as_secs_f64()),
    }
    .rounded())
}

// ---------------------------------------------------------------------------
// Families

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum FamilyName {
    Novolume,
    Mutual,
    Blind,
}

#[derive(Clone, Debug)]
pub struct FamilyArgs {
    pub name: FamilyName,
    pub j: usize,
    pub delta: f64,
    pub eps: f64,
    pub lambda: f64,
    pub k_max: usize,
    pub tol_gh: f64,
    pub tol_ech: f64,
}

impl FamilyArgs {
    pub fn new(name: FamilyName) -> Self {
        FamilyArgs {
            name,
            j: 3,
            delta: if name == FamilyName::Blind { 0.005 } else { 0.01 },
            eps: 0.05,
            lambda: 10.0,
            k_max: 30,
            tol_gh: 1e-8,
            tol_ech: 1e-5,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub claim: String,
    pub measured: f64,
    pub expected: f64,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn new(claim: impl Into<String>, measured: f64, expected: f64, tolerance: f64) -> Self {
        let residual = (measured - expected).abs();
        Check {
            claim: claim.into(),
            measured: round12(measured),
            expected: round12(expected),
            residual: round12(residual),
            tolerance,
            pass: residual <= tolerance,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyReport {
    pub version: &'static str,
    pub family: String,
    pub params: BTreeMap<String, f64>,
    pub before_hash: String,
    pub after_hash: String,
    pub checks: Vec<Check>,
    pub pass: bool,
    #[serde(skip)]
    pub before: DomainSpecFile,
    #[serde(skip)]
    pub after: DomainSpecFile,
}

fn base_spec(g: &GraphDomain, eps: f64) -> DomainSpecFile {
    match g.profile {
        Profile::ArcCap { lambda, shift } => DomainSpecFile {
            params: Params { lambda: Some(lambda), shift: Some(shift), ..DomainSpecFile::graph("arc_cap").params },
            ..DomainSpecFile::graph("arc_cap")
        },
        Profile::ArcCup { lambda, center } => DomainSpecFile {
            params: Params { lambda: Some(lambda), center: Some(center), ..DomainSpecFile::graph("arc_cup").params },
            ..DomainSpecFile::graph("arc_cup")
        },
        _ => DomainSpecFile {
            params: Params { eps: Some(eps), ..DomainSpecFile::graph("gamma_eps").params },
            ..DomainSpecFile::graph("gamma_eps")
        },
    }
}

fn as_graph(dom: Domain) -> GraphDomain {
    match dom {
        Domain::Graph(g) => g,
        _ => unreachable!("family specs are graphs"),
    }
}

fn gh_row(g: &GraphDomain, k_max: usize) -> Result<Vec<f64>, CliError> {
    let v: Vec<_> = (1..=k_max).into_par_iter().map(|k| ghcap::gh_graph_symmetric(g, k).map(|r| r.value)).collect();
    Ok(v.into_iter().collect::<capax::Result<Vec<f64>>>()?)
}

/// Builds the family, writes it to spec form, rebuilds both domains from the
/// specs and checks the claimed equalities on the rebuilt domains.
pub fn family_report(args: &FamilyArgs) -> Result<FamilyReport, CliError> {
    let fam: Family = match args.name {
        FamilyName::Novolume => family_novolume(&convex_family_base(args.lambda), args.j, args.delta)?,
        FamilyName::Mutual => {
            let base =
                if args.j % 2 == 1 { convex_family_base(args.lambda) } else { concave_family_base(args.lambda) };
            family_mutual(&base, args.j, args.delta)?
        }
        FamilyName::Blind => family_blind(args.eps, args.delta)?,
    };
    let before = base_spec(&fam.base, args.eps);
    let mut after = before.clone();
    after.perturbations.push(PerturbationFile::from_bump(&fam.bump.spec, fam.delta));
    let g0 = as_graph(before.to_domain()?);
    let g1 = as_graph(after.to_domain()?);

    let c0 = gh_row(&g0, args.k_max)?;
    let c1 = gh_row(&g1, args.k_max)?;
    let (a0, a1) = (g0.area()?, g1.area()?);
    let mut checks = Vec::new();
    let shift = |k: usize| match args.name {
        FamilyName::Mutual if k == args.j => args.delta,
        _ => 0.0,
    };
    for k in 1..=args.k_max {
        checks.push(Check::new(format!("c_{k} shift"), c1[k - 1] - c0[k - 1], shift(k), args.tol_gh));
    }
    let area_shift = if args.name == FamilyName::Novolume { args.delta } else { 0.0 };
    checks.push(Check::new("area shift", a1 - a0, area_shift, args.tol_gh));
    if args.name == FamilyName::Blind {
        let e0 = ech_capacity(&Domain::Graph(g0.clone()), 9)?.value;
        let e1 = ech_capacity(&Domain::Graph(g1.clone()), 9)?.value;
        checks.push(Check::new("ECH_9 shift", e1 - e0, args.delta, args.tol_ech));
    }
    let mut params = BTreeMap::new();
    params.insert("delta".to_string(), args.delta);
    params.insert("k_max".to_string(), args.k_max as f64);
    match args.name {
        FamilyName::Blind => {
            params.insert("eps".to_string(), args.eps);
        }
        _ => {
            params.insert("j".to_string(), args.j as f64);
            params.insert("lambda".to_string(), args.lambda);
        }
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(FamilyReport {
        version: VERSION,
        family: format!("{:?}", args.name).to_lowercase(),
        params,
        before_hash: before.hash(),
        after_hash: after.hash(),
        checks,
        pass,
        before,
        after,
    })
}

// ---------------------------------------------------------------------------
// Figures

/// `p ↦ c_k(E_p(1, a))` over `lo, lo + step, …, hi`.
pub fn figure_e2p(a: f64, k: usize, range: (f64, f64, f64)) -> Result<String, CliError> {
    let (lo, hi, step) = range;
    if !(step > 0.0 && hi >= lo && lo >= 1.0) {
        return Err(CliError::Spec("p range must be lo:hi:step with 1 ≤ lo ≤ hi and step > 0".into()));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    let ps: Vec<f64> = (0..=n).map(|i| lo + step * i as f64).collect();
    let vals: Vec<_> = ps.par_iter().map(|&p| ghcap::gh_pellipsoid(p, a, k).map(|r| r.value)).collect();
    let mut out = format!("p,c_{k}\n");
    for (p, v) in ps.iter().zip(vals) {
        out.push_str(&format!("{},{}\n", fmt12(*p), fmt12(v?)));
    }
    Ok(out)
}

/// Carrier points of the round profile: odd `k` in red, the fixed point in purple.
pub fn figure_ribcage(k_max: usize) -> Result<String, CliError> {
    let c = GraphDomain::circle();
    let mut out = String::from("series,k,x,y\n");
    for k in (1..=k_max).step_by(2) {
        let x = ghcap::odd_carrier_x(&c, k)?;
        out.push_str(&format!("red,{k},{},{}\n", fmt12(x), fmt12(c.f(x))));
    }
    let x = c.fixed_point()?;
    out.push_str(&format!("purple,,{},{}\n", fmt12(x), fmt12(x)));
    Ok(out)
}

pub fn ivr_profile(name: &str, p: Option<f64>) -> Result<GraphDomain, CliError> {
    match name {
        "circle" => Ok(GraphDomain::circle()),
        "pellipse" => Ok(GraphDomain::pellipse(p.unwrap_or(3.0), 1.0)?),
        other => Err(CliError::Spec(format!("unknown ivr profile {other}"))),
    }
}

/// Lower and upper profiles as CSV, with the ratio and its truncation bar in a leading comment.
pub fn figure_ivr(f: &GraphDomain, vertices: usize) -> Result<String, CliError> {
    let b = ivr_graph_bounds(f, vertices)?;
    let mut out = format!("# ratio={} bar={}\nseries,x,y\n", fmt12(b.ratio), fmt12(b.tail));
    for (name, pts) in [("lower", &b.lower), ("upper", &b.upper)] {
        for q in pts {
            out.push_str(&format!("{name},{},{}\n", fmt12(q[0]), fmt12(q[1])));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_capacities() {
        let spec = DomainSpecFile::parse(r#"{"kind":"simplex","params":{"axes":[1,1]}}"#).unwrap();
        let args = CapacityArgs { k: (1, 10), engine: Engine::Auto, verify: true, tol: 1e-6, timing: false };
        let r = cmd_capacity(&spec, &args).unwrap();
        let ceil: Vec<f64> = (1..=10).map(|k| ((k + 1) / 2) as f64).collect();
        assert_eq!(r.values, ceil);
    }

    #[test]
    fn output_is_deterministic() {
        let spec = DomainSpecFile::parse(r#"{"kind":"graph","params":{"profile":"circle"}}"#).unwrap();
        let args = CapacityArgs { k: (1, 12), engine: Engine::Auto, verify: false, tol: 1e-6, timing: false };
        let a = cmd_capacity(&spec, &args).unwrap().to_json();
        let b = cmd_capacity(&spec, &args).unwrap().to_json();
        assert_eq!(a, b);
    }

    #[test]
    fn family_specs_round_trip() {
        let r = family_report(&FamilyArgs { j: 2, ..FamilyArgs::new(FamilyName::Mutual) }).unwrap();
        assert!(r.pass);
        let text = r.after.canonical();
        assert_eq!(DomainSpecFile::parse(&text).unwrap().canonical(), text);
    }
}
