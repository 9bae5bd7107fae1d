//! JSON domain specs.

use capax::families::{make_bump_for, symmetric_extend, BumpSpec, Plateau};
use capax::{Curvature, Curve, Domain, GraphDomain, PolytopeDomain};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Simplex,
    Box,
    Lpball,
    Pellipse,
    Graph,
    Polytope,
    Curve,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Axis lengths of a simplex or box.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axes: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    /// Graph profile: circle, lpball2, arc_cap, arc_cup, polyline, gamma_eps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<[f64; 2]>>,
    /// concave_cap or convex_cup, for polylines.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curvature: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<f64>>>,
    /// Curve name: alpha, gamma_eps, or.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlateauFile {
    pub lo: f64,
    pub hi: f64,
    pub height: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationFile {
    pub support: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plateau: Option<PlateauFile>,
    pub integral: f64,
    pub amplitude: f64,
}

impl PerturbationFile {
    pub fn from_bump(spec: &BumpSpec, amplitude: f64) -> Self {
        PerturbationFile {
            support: [spec.support.0, spec.support.1],
            plateau: spec.plateau.map(|p| PlateauFile { lo: p.lo, hi: p.hi, height: p.height }),
            integral: spec.integral,
            amplitude,
        }
    }

    fn bump_spec(&self) -> BumpSpec {
        BumpSpec {
            support: (self.support[0], self.support[1]),
            plateau: self.plateau.map(|p| Plateau { lo: p.lo, hi: p.hi, height: p.height }),
            integral: self.integral,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpecFile {
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(default)]
    pub params: Params,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub perturbations: Vec<PerturbationFile>,
}

fn spec_err<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Spec(msg.into()))
}

fn need<T: Clone>(v: &Option<T>, name: &str) -> Result<T, CliError> {
    v.clone().ok_or_else(|| CliError::Spec(format!("missing params.{name}")))
}

impl Params {
    fn present(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let mut mark = |set: bool, name| {
            if set {
                out.push(name)
            }
        };
        mark(self.axes.is_some(), "axes");
        mark(self.p.is_some(), "p");
        mark(self.a.is_some(), "a");
        mark(self.profile.is_some(), "profile");
        mark(self.lambda.is_some(), "lambda");
        mark(self.shift.is_some(), "shift");
        mark(self.center.is_some(), "center");
        mark(self.points.is_some(), "points");
        mark(self.curvature.is_some(), "curvature");
        mark(self.vertices.is_some(), "vertices");
        mark(self.curve.is_some(), "curve");
        mark(self.eps.is_some(), "eps");
        out
    }

    fn numbers(&self) -> Vec<f64> {
        let mut v: Vec<f64> = [self.p, self.a, self.lambda, self.shift, self.center, self.eps].into_iter().flatten().collect();
        v.extend(self.axes.iter().flatten());
        v.extend(self.points.iter().flatten().flatten());
        v.extend(self.vertices.iter().flatten().flatten());
        v
    }
}

impl DomainSpecFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let spec: DomainSpecFile = serde_json::from_str(text).map_err(|e| CliError::Spec(e.to_string()))?;
        spec.check()?;
        Ok(spec)
    }

    pub fn read(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Spec(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Pretty JSON with a trailing newline; field order is fixed by the types.
    pub fn canonical(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("spec serialises");
        s.push('\n');
        s
    }

    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    fn check(&self) -> Result<(), CliError> {
        let mut nums = self.params.numbers();
        for p in &self.perturbations {
            nums.extend(p.support);
            nums.extend([p.integral, p.amplitude]);
            if let Some(pl) = p.plateau {
                nums.extend([pl.lo, pl.hi, pl.height]);
            }
        }
        if nums.iter().any(|x| !x.is_finite()) {
            return spec_err("all numbers must be finite");
        }
        let allowed: &[&str] = match self.kind {
            Kind::Simplex | Kind::Box => &["axes"],
            Kind::Lpball => &["p"],
            Kind::Pellipse => &["p", "a"],
            Kind::Graph => &["profile", "p", "lambda", "shift", "center", "points", "curvature", "eps"],
            Kind::Polytope => &["vertices"],
            Kind::Curve => &["curve", "eps", "p"],
        };
        if let Some(bad) = self.params.present().into_iter().find(|n| !allowed.contains(n)) {
            return spec_err(format!("params.{bad} does not apply to kind {:?}", self.kind));
        }
        if !self.perturbations.is_empty() && !matches!(self.kind, Kind::Graph | Kind::Pellipse) {
            return spec_err("perturbations apply to graph and pellipse specs only");
        }
        Ok(())
    }

    fn dim_check(&self, n: usize) -> Result<(), CliError> {
        match self.dimension {
            Some(d) if d != n => spec_err(format!("dimension {d} does not match the data ({n})")),
            _ => Ok(()),
        }
    }

    pub fn to_domain(&self) -> Result<Domain, CliError> {
        let p = &self.params;
        let dom = match self.kind {
            Kind::Simplex | Kind::Box => {
                let axes = need(&p.axes, "axes")?;
                self.dim_check(axes.len())?;
                if axes.is_empty() || axes.iter().any(|&a| !(a > 0.0)) {
                    return spec_err("axes must be positive");
                }
                if self.kind == Kind::Simplex {
                    Domain::Simplex(axes)
                } else {
                    Domain::Box(axes)
                }
            }
            Kind::Lpball => {
                let n = self.dimension.ok_or_else(|| CliError::Spec("lpball needs a dimension".into()))?;
                let pp = need(&p.p, "p")?;
                if n == 0 || !(pp > 0.0) {
                    return spec_err("lpball needs dimension ≥ 1 and p > 0");
                }
                Domain::LpBall { n, p: pp }
            }
            Kind::Pellipse => {
                self.dim_check(2)?;
                let g = GraphDomain::pellipse(need(&p.p, "p")?, p.a.unwrap_or(1.0))?;
                Domain::Graph(self.perturb(g)?)
            }
            Kind::Graph => {
                self.dim_check(2)?;
                let name = need(&p.profile, "profile")?;
                let g = match name.as_str() {
                    "circle" => GraphDomain::circle(),
                    "lpball2" => GraphDomain::lpball2(need(&p.p, "p")?)?,
                    "arc_cap" => GraphDomain::arc_cap(need(&p.lambda, "lambda")?, need(&p.shift, "shift")?)?,
                    "arc_cup" => GraphDomain::arc_cup(need(&p.lambda, "lambda")?, need(&p.center, "center")?)?,
                    "polyline" => {
                        let curv = match p.curvature.as_deref() {
                            Some("concave_cap") | None => Curvature::ConcaveCap,
                            Some("convex_cup") => Curvature::ConvexCup,
                            Some(other) => return spec_err(format!("unknown curvature {other}")),
                        };
                        GraphDomain::polyline(need(&p.points, "points")?, curv)?
                    }
                    "gamma_eps" => GraphDomain::from_curve(Curve::gamma_eps(need(&p.eps, "eps")?)?)?,
                    other => return spec_err(format!("unknown graph profile {other}")),
                };
                Domain::Graph(self.perturb(g)?)
            }
            Kind::Polytope => {
                let v = need(&p.vertices, "vertices")?;
                let poly = PolytopeDomain::new(v)?;
                self.dim_check(poly.dim())?;
                Domain::Polytope(poly)
            }
            Kind::Curve => {
                self.dim_check(2)?;
                let name = need(&p.curve, "curve")?;
                Domain::Curve(match name.as_str() {
                    "alpha" => Curve::Alpha,
                    "gamma_eps" => Curve::gamma_eps(need(&p.eps, "eps")?)?,
                    "or" => Curve::or_curve(need(&p.p, "p")?)?,
                    other => return spec_err(format!("unknown curve {other}")),
                })
            }
        };
        Ok(dom)
    }

    fn perturb(&self, base: GraphDomain) -> Result<GraphDomain, CliError> {
        if self.perturbations.is_empty() {
            return Ok(base);
        }
        let mut bumps = Vec::new();
        for p in &self.perturbations {
            bumps.push((make_bump_for(&base, p.bump_spec())?, p.amplitude));
        }
        Ok(symmetric_extend(&base, bumps)?)
    }

    pub fn graph(profile: &str) -> Self {
        DomainSpecFile {
            kind: Kind::Graph,
            dimension: None,
            params: Params { profile: Some(profile.into()), ..Params::default() },
            perturbations: vec![],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unknown_fields() {
        assert!(DomainSpecFile::parse(r#"{"kind":"simplex","params":{"axes":[1,1]},"colour":1}"#).is_err());
        assert!(DomainSpecFile::parse(r#"{"kind":"simplex","params":{"axes":[1,1],"wat":2}}"#).is_err());
        assert!(DomainSpecFile::parse(r#"{"kind":"simplex","params":{"axes":[1,1],"p":2}}"#).is_err());
        assert!(DomainSpecFile::parse(r#"{"kind":"simplex","params":{"axes":[1,1e999]}}"#).is_err());
    }

    #[test]
    fn canonical_round_trip() {
        let s = DomainSpecFile::parse(r#"{"kind":"graph","params":{"profile":"arc_cap","lambda":10,"shift":2},
            "perturbations":[{"support":[1,2],"integral":0.5,"amplitude":0.01}]}"#)
        .unwrap();
        let c = s.canonical();
        assert_eq!(DomainSpecFile::parse(&c).unwrap().canonical(), c);
        assert_eq!(s.hash().len(), 64);
    }

    #[test]
    fn builds_every_kind() {
        for text in [
            r#"{"kind":"simplex","params":{"axes":[1,2]}}"#,
            r#"{"kind":"box","dimension":3,"params":{"axes":[1,2,3]}}"#,
            r#"{"kind":"lpball","dimension":3,"params":{"p":3}}"#,
            r#"{"kind":"pellipse","params":{"p":3,"a":2}}"#,
            r#"{"kind":"graph","params":{"profile":"circle"}}"#,
            r#"{"kind":"graph","params":{"profile":"polyline","points":[[0,1],[0.75,0.75],[1,0]]}}"#,
            r#"{"kind":"polytope","params":{"vertices":[[0,0],[1,0],[0,1],[0.75,0.75]]}}"#,
            r#"{"kind":"curve","params":{"curve":"gamma_eps","eps":0.05}}"#,
        ] {
            DomainSpecFile::parse(text).unwrap().to_domain().unwrap();
        }
        let bad = DomainSpecFile::parse(r#"{"kind":"box","dimension":3,"params":{"axes":[1,2]}}"#).unwrap();
        assert!(bad.to_domain().is_err());
    }
}
