//! The JSON run configuration and its validation.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use fracwos_core::engine::Field;
use fracwos_core::geometry::random_interior_points;
use fracwos_core::{
    AnnulusDomain, BallDomain, BoxDomain, CaseId, Domain, FracOrder, PolygonDomain, ProblemSpec,
    WalkConfig,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub case: CaseSpec,
    pub alpha: Alphas,
    #[serde(default)]
    pub points: Option<PointsSpec>,
    #[serde(default)]
    pub walk: WalkSpec,
    /// Path counts for `convergence`.
    #[serde(default)]
    pub ladder: Option<Vec<usize>>,
    /// Output path prefix; files are `<prefix>_<kind>.<ext>`.
    pub output: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Alphas {
    One(f64),
    Many(Vec<f64>),
}

impl Alphas {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Alphas::One(a) => vec![*a],
            Alphas::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CaseSpec {
    Name(String),
    Registered {
        name: String,
        #[serde(default)]
        n: Option<usize>,
    },
    Inline(InlineCase),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineCase {
    pub domain: DomainSpec,
    pub f: DataSpec,
    pub g: DataSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    Ball { center: Vec<f64>, radius: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Annulus { center: Vec<f64>, inner: f64, outer: f64 },
    Polygon { vertices: Vec<[f64; 2]> },
    LShape,
    Hexagon,
    Stripe,
}

/// Source or exterior data: `"zero"`, `{"constant": c}`, or the name of a
/// registered case whose data is reused.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DataSpec {
    Named(String),
    Constant { constant: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PointsSpec {
    List(Vec<Vec<f64>>),
    Grid { lo: Vec<f64>, hi: Vec<f64>, counts: Vec<usize> },
    Random {
        count: usize,
        seed: u64,
        #[serde(default = "default_min_dist")]
        min_dist: f64,
    },
    Radial { direction: Vec<f64>, radii: Vec<f64> },
}

fn default_min_dist() -> f64 {
    1e-3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WalkSpec {
    pub epsilon: f64,
    pub num_paths: usize,
    pub seed: u64,
    pub max_steps: usize,
}

impl Default for WalkSpec {
    fn default() -> Self {
        let w = WalkConfig::default();
        Self { epsilon: w.epsilon, num_paths: w.num_paths, seed: w.seed, max_steps: w.max_steps }
    }
}

impl WalkSpec {
    pub fn to_config(&self) -> WalkConfig {
        WalkConfig {
            epsilon: self.epsilon,
            num_paths: self.num_paths,
            seed: self.seed,
            max_steps: self.max_steps,
            ..WalkConfig::default()
        }
    }
}

/// A case ready to run at one α.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub name: String,
    pub problem: ProblemSpec,
    pub exact: Option<Field>,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| config_err(format!("invalid config: {e}")))
    }

    /// Orders as validated [`FracOrder`]s.
    pub fn orders(&self) -> Result<Vec<FracOrder>, CliError> {
        let vals = self.alpha.values();
        if vals.is_empty() {
            return Err(config_err("alpha list is empty"));
        }
        vals.into_iter().map(|a| FracOrder::new(a).map_err(|e| config_err(e.to_string()))).collect()
    }

    pub fn single_order(&self) -> Result<FracOrder, CliError> {
        match self.orders()?.as_slice() {
            [a] => Ok(*a),
            _ => Err(config_err("this command takes a single alpha")),
        }
    }

    /// Checks everything that can be checked without running a walk.
    pub fn validate(&self) -> Result<(), CliError> {
        let orders = self.orders()?;
        self.walk.to_config().validate().map_err(|e| config_err(e.to_string()))?;
        for a in orders {
            self.resolve(a)?;
        }
        if let Some(ladder) = &self.ladder {
            if ladder.is_empty() || ladder.contains(&0) {
                return Err(config_err("ladder must be a nonempty list of positive path counts"));
            }
        }
        if self.output.as_os_str().is_empty() {
            return Err(config_err("output prefix is empty"));
        }
        Ok(())
    }

    pub fn resolve(&self, alpha: FracOrder) -> Result<Resolved, CliError> {
        match &self.case {
            CaseSpec::Name(name) => registered(name, None, alpha),
            CaseSpec::Registered { name, n } => registered(name, *n, alpha),
            CaseSpec::Inline(inline) => {
                let domain = build_domain(&inline.domain)?;
                let n = domain.dim();
                if alpha.value() >= n as f64 {
                    return Err(config_err(format!("alpha must be below the dimension {n}")));
                }
                let f = data(&inline.f, alpha, n, Part::Source)?;
                let g = data(&inline.g, alpha, n, Part::Exterior)?;
                Ok(Resolved {
                    name: "inline".into(),
                    problem: ProblemSpec::new(alpha, f, g, domain).map_err(|e| config_err(e.to_string()))?,
                    exact: None,
                })
            }
        }
    }

    /// Evaluation points, checked against the problem's dimension.
    pub fn points(&self, domain: &dyn Domain) -> Result<Vec<Vec<f64>>, CliError> {
        let spec = self.points.as_ref().ok_or_else(|| config_err("points are required"))?;
        let pts = match spec {
            PointsSpec::List(v) => v.clone(),
            PointsSpec::Grid { lo, hi, counts } => grid(lo, hi, counts)?,
            PointsSpec::Random { count, seed, min_dist } => {
                if *count == 0 {
                    return Err(config_err("random point count is zero"));
                }
                random_interior_points(domain, *count, *seed, *min_dist)
                    .map_err(|e| config_err(e.to_string()))?
            }
            PointsSpec::Radial { direction, radii } => {
                let norm = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm.is_nan() || norm <= 0.0 {
                    return Err(config_err("radial direction must be nonzero"));
                }
                radii.iter().map(|r| direction.iter().map(|d| r * d / norm).collect()).collect()
            }
        };
        if pts.is_empty() {
            return Err(config_err("points list is empty"));
        }
        let n = domain.dim();
        if let Some(p) = pts.iter().find(|p| p.len() != n || p.iter().any(|v| !v.is_finite())) {
            return Err(config_err(format!("point {p:?} is not a finite {n}-vector")));
        }
        Ok(pts)
    }
}

fn registered(name: &str, n: Option<usize>, alpha: FracOrder) -> Result<Resolved, CliError> {
    let id: CaseId = name.parse().map_err(|e: fracwos_core::Error| config_err(e.to_string()))?;
    let case = id.build(alpha, n).map_err(|e| config_err(e.to_string()))?;
    Ok(Resolved { name: id.name().into(), problem: case.problem(), exact: case.u_exact.clone() })
}

fn build_domain(spec: &DomainSpec) -> Result<Arc<dyn Domain>, CliError> {
    let wrap = |e: fracwos_core::Error| config_err(e.to_string());
    Ok(match spec {
        DomainSpec::Ball { center, radius } => Arc::new(BallDomain::new(center.clone(), *radius).map_err(wrap)?),
        DomainSpec::Box { lo, hi } => Arc::new(BoxDomain::new(lo.clone(), hi.clone()).map_err(wrap)?),
        DomainSpec::Annulus { center, inner, outer } => {
            Arc::new(AnnulusDomain::new(center.clone(), *inner, *outer).map_err(wrap)?)
        }
        DomainSpec::Polygon { vertices } => Arc::new(PolygonDomain::new(vertices.clone()).map_err(wrap)?),
        DomainSpec::LShape => Arc::new(PolygonDomain::l_shape()),
        DomainSpec::Hexagon => Arc::new(PolygonDomain::regular_hexagon()),
        DomainSpec::Stripe => Arc::new(BoxDomain::stripe()),
    })
}

#[derive(Clone, Copy)]
enum Part {
    Source,
    Exterior,
}

fn data(spec: &DataSpec, alpha: FracOrder, n: usize, part: Part) -> Result<Field, CliError> {
    match spec {
        DataSpec::Constant { constant } if constant.is_finite() => Ok(Field::Constant(*constant)),
        DataSpec::Constant { constant } => Err(config_err(format!("constant {constant} is not finite"))),
        DataSpec::Named(s) if s == "zero" => Ok(Field::Constant(0.0)),
        DataSpec::Named(s) => {
            let id: CaseId = s.parse().map_err(|e: fracwos_core::Error| config_err(e.to_string()))?;
            let dim = (id == CaseId::BallConstant).then_some(n);
            let case = id.build(alpha, dim).map_err(|e| config_err(e.to_string()))?;
            if case.n != n {
                return Err(config_err(format!("{s} data is {}-dimensional, domain is {n}-dimensional", case.n)));
            }
            Ok(match part {
                Part::Source => case.f,
                Part::Exterior => case.g,
            })
        }
    }
}

fn grid(lo: &[f64], hi: &[f64], counts: &[usize]) -> Result<Vec<Vec<f64>>, CliError> {
    if lo.is_empty() || lo.len() != hi.len() || lo.len() != counts.len() {
        return Err(config_err("grid lo, hi and counts must have the same nonzero length"));
    }
    if counts.contains(&0) {
        return Err(config_err("grid counts must be positive"));
    }
    let axes: Vec<Vec<f64>> = lo
        .iter()
        .zip(hi)
        .zip(counts)
        .map(|((&a, &b), &m)| {
            if m == 1 {
                vec![0.5 * (a + b)]
            } else {
                (0..m).map(|i| a + (b - a) * i as f64 / (m - 1) as f64).collect()
            }
        })
        .collect();
    let mut out = vec![Vec::new()];
    for axis in &axes {
        out = out
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    Ok(out)
}
