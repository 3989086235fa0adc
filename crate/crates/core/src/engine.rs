//! Walk-on-spheres solver: path generation, the per-path score, parallel
//! aggregation and the analytic step-count diagnostic.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{self, domain, Error, Result};
use crate::geometry::Domain;
use crate::kernels::{FracOrder, KernelConstants};
use crate::sampling::{unit_direction_into, ExitRadiusLaw, InteriorRadiusLaw, RngStream};
use crate::specfun::{self, gamma, BetaParams};
use crate::stats::Welford;

/// Paths per aggregation block; fixed so that results do not depend on the
/// number of worker threads.
const BLOCK: usize = 1024;

type FieldFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A real-valued field on `R^n`.
#[derive(Clone)]
pub enum Field {
    Constant(f64),
    Function(Arc<FieldFn>),
}

impl Field {
    pub fn new(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Field::Function(Arc::new(f))
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Field::Constant(c) => *c,
            Field::Function(f) => f(x),
        }
    }

    /// Evaluation that reports non-finite values as errors.
    pub fn eval_checked(&self, x: &[f64]) -> Result<f64> {
        let v = self.eval(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Evaluation { point: x.to_vec(), value: v })
        }
    }

    pub fn as_constant(&self) -> Option<f64> {
        match self {
            Field::Constant(c) => Some(*c),
            Field::Function(_) => None,
        }
    }
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Constant(c) => write!(f, "Constant({c})"),
            Field::Function(_) => f.write_str("Function(..)"),
        }
    }
}

/// `(-Δ)^{α/2} u = f` in `Ω`, `u = g` on `Ωᶜ`.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub n: usize,
    pub alpha: FracOrder,
    pub source: Field,
    pub exterior: Field,
    pub domain: Arc<dyn Domain>,
}

impl ProblemSpec {
    pub fn new(
        alpha: FracOrder,
        source: Field,
        exterior: Field,
        domain: Arc<dyn Domain>,
    ) -> Result<Self> {
        let n = domain.dim();
        if n == 0 {
            return error::domain("domain has dimension zero");
        }
        Ok(Self { n, alpha, source, exterior, domain })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkConfig {
    /// Width of the absorbing shell `Γ_ε` inside `∂Ω`.
    pub epsilon: f64,
    pub num_paths: usize,
    pub seed: u64,
    pub max_steps: usize,
    pub zeta_quad_points: usize,
}

impl WalkConfig {
    pub fn new(epsilon: f64, num_paths: usize, seed: u64) -> Self {
        Self { epsilon, num_paths, seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return domain(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if self.num_paths == 0 {
            return domain("num_paths must be at least 1");
        }
        if self.max_steps == 0 || self.zeta_quad_points == 0 {
            return domain("max_steps and zeta_quad_points must be positive");
        }
        Ok(())
    }
}

impl Default for WalkConfig {
    fn default() -> Self {
        Self { epsilon: 1e-6, num_paths: 10_000, seed: 0, max_steps: 1_000_000, zeta_quad_points: 64 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathRealization {
    pub score: f64,
    pub steps: usize,
    pub exit_point: Vec<f64>,
    pub stopped_in_shell: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub variance: f64,
    pub stderr: f64,
    pub n_paths: usize,
    pub mean_steps: f64,
    /// Paths dropped for exceeding `max_steps`.
    pub failed_paths: usize,
}

/// Per-run state shared by all paths: the problem, the configuration and the
/// precomputed sampling laws.
#[derive(Debug, Clone)]
pub struct Walker<'a> {
    problem: &'a ProblemSpec,
    config: &'a WalkConfig,
    constants: &'a KernelConstants,
    exit: ExitRadiusLaw,
    interior: Option<InteriorRadiusLaw>,
}

impl<'a> Walker<'a> {
    pub fn new(
        problem: &'a ProblemSpec,
        config: &'a WalkConfig,
        constants: &'a KernelConstants,
    ) -> Result<Self> {
        config.validate()?;
        if constants.n != problem.n || constants.alpha != problem.alpha {
            return domain("kernel constants do not match the problem's dimension and order");
        }
        let interior = match problem.source.as_constant() {
            Some(_) => None,
            None => Some(InteriorRadiusLaw::new(problem.n, problem.alpha)?),
        };
        Ok(Self { problem, config, constants, exit: ExitRadiusLaw::new(problem.alpha), interior })
    }

    fn check_start(&self, x0: &[f64]) -> Result<()> {
        let d = &self.problem.domain;
        if x0.len() != self.problem.n {
            return domain(format!("start point has dimension {}, problem has {}", x0.len(), self.problem.n));
        }
        if !d.contains(x0) {
            return domain(format!("start point {x0:?} is not inside the domain"));
        }
        if d.boundary_distance(x0) < self.config.epsilon {
            return domain(format!("start point {x0:?} lies in the absorbing shell"));
        }
        Ok(())
    }

    /// One walk from `x0` on the random stream `rng`.
    pub fn walk(&self, x0: &[f64], rng: &mut RngStream) -> Result<PathRealization> {
        let p = self.problem;
        let n = p.n;
        let alpha = p.alpha.value();
        let zeta_unit = self.constants.zeta_unit;
        let source_const = p.source.as_constant();
        let mut x = x0.to_vec();
        let mut next = vec![0.0; n];
        let mut dir = vec![0.0; n];
        let mut score = 0.0;
        for steps in 1..=self.config.max_steps {
            let r = p.domain.boundary_distance(&x);
            let zeta = r.powf(alpha) * zeta_unit;
            match (source_const, &self.interior) {
                (Some(c), _) => score += zeta * c,
                (None, Some(law)) => {
                    let s = law.sample(rng)?;
                    unit_direction_into(&mut dir, rng);
                    for i in 0..n {
                        next[i] = x[i] + r * s * dir[i];
                    }
                    score += zeta * p.source.eval_checked(&next)?;
                }
                (None, None) => unreachable!("interior law exists for non-constant sources"),
            }

            let gamma = self.exit.sample(r, rng);
            unit_direction_into(&mut dir, rng);
            for i in 0..n {
                next[i] = x[i] + gamma * dir[i];
            }
            if !p.domain.contains(&next) {
                score += p.exterior.eval_checked(&next)?;
                return Ok(PathRealization { score, steps, exit_point: next, stopped_in_shell: false });
            }
            if p.domain.boundary_distance(&next) < self.config.epsilon {
                let proj = p.domain.project_boundary(&next);
                score += p.exterior.eval_checked(&proj)?;
                return Ok(PathRealization { score, steps, exit_point: proj, stopped_in_shell: true });
            }
            std::mem::swap(&mut x, &mut next);
        }
        Err(Error::StepCap { max_steps: self.config.max_steps })
    }

    /// Path `path_idx` of the estimate at `x0`.
    pub fn run_path(&self, x0: &[f64], path_idx: u64) -> Result<PathRealization> {
        self.check_start(x0)?;
        let mut rng = RngStream::new(point_seed(self.config.seed, x0), path_idx);
        self.walk(x0, &mut rng)
    }

    pub fn estimate_point(&self, x0: &[f64]) -> Result<Estimate> {
        self.check_start(x0)?;
        let key = point_seed(self.config.seed, x0);
        let total = self.config.num_paths;
        let blocks = total.div_ceil(BLOCK);
        let partial: Vec<Result<(Welford, u64, usize)>> = (0..blocks)
            .into_par_iter()
            .map(|b| {
                let mut acc = Welford::default();
                let mut steps = 0u64;
                let mut failed = 0usize;
                for idx in b * BLOCK..((b + 1) * BLOCK).min(total) {
                    let mut rng = RngStream::new(key, idx as u64);
                    match self.walk(x0, &mut rng) {
                        Ok(path) => {
                            acc.push(path.score);
                            steps += path.steps as u64;
                        }
                        Err(Error::StepCap { .. }) => failed += 1,
                        Err(e) => return Err(e),
                    }
                }
                Ok((acc, steps, failed))
            })
            .collect();

        let mut acc = Welford::default();
        let mut steps = 0u64;
        let mut failed = 0usize;
        for part in partial {
            let (w, s, f) = part?;
            acc.merge(&w);
            steps += s;
            failed += f;
        }
        if acc.count == 0 {
            return Err(Error::Estimation(format!("all {total} paths from {x0:?} failed")));
        }
        if failed > 0 {
            log::warn!("{failed} of {total} paths from {x0:?} hit the step cap and were dropped");
        }
        Ok(Estimate {
            mean: acc.mean,
            variance: acc.variance(),
            stderr: acc.stderr(),
            n_paths: acc.count as usize,
            mean_steps: steps as f64 / acc.count as f64,
            failed_paths: failed,
        })
    }
}

/// Seed of the random streams for a start point: the run seed mixed with the
/// coordinates' bit patterns, so equal points replay identically and distinct
/// points draw from unrelated streams regardless of evaluation order.
pub fn point_seed(seed: u64, x: &[f64]) -> u64 {
    let mut h = splitmix(seed ^ 0x6a09_e667_f3bc_c908);
    for v in x {
        // +0.0 and -0.0 are the same start point
        let bits = if *v == 0.0 { 0 } else { v.to_bits() };
        h = splitmix(h ^ bits);
    }
    h
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn run_path(
    problem: &ProblemSpec,
    config: &WalkConfig,
    constants: &KernelConstants,
    x0: &[f64],
    path_idx: u64,
) -> Result<PathRealization> {
    Walker::new(problem, config, constants)?.run_path(x0, path_idx)
}

/// Mean of `num_paths` independent scores from `x0`.
pub fn estimate_point(
    problem: &ProblemSpec,
    config: &WalkConfig,
    constants: &KernelConstants,
    x0: &[f64],
) -> Result<Estimate> {
    Walker::new(problem, config, constants)?.estimate_point(x0)
}

/// Independent estimates at each point; a failing point does not affect the
/// others.
pub fn estimate_field(
    problem: &ProblemSpec,
    config: &WalkConfig,
    constants: &KernelConstants,
    points: &[Vec<f64>],
) -> Vec<Result<Estimate>> {
    match Walker::new(problem, config, constants) {
        Ok(w) => points.iter().map(|x| w.estimate_point(x)).collect(),
        Err(e) => points.iter().map(|_| Err(e.clone())).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepBound {
    pub p_star: f64,
    pub q_star: f64,
    pub bound: f64,
}

/// Upper bound `1 + q*/(1-p*)²` on the expected number of jumps in a ball of
/// radius `r` with shell width `epsilon`.
pub fn step_bound(n: usize, alpha: FracOrder, r: f64, epsilon: f64) -> Result<StepBound> {
    if n == 0 {
        return domain("dimension must be at least 1");
    }
    if !(epsilon > 0.0 && epsilon < r && r.is_finite()) {
        return domain(format!("step_bound needs 0 < epsilon < r, got epsilon={epsilon}, r={r}"));
    }
    let a = alpha.value();
    let nf = n as f64;
    let c_tilde = gamma(nf / 2.0) * (std::f64::consts::PI * a / 2.0).sin()
        / std::f64::consts::PI.powf(nf / 2.0 + 1.0);
    let pref = std::f64::consts::PI.powf(nf / 2.0) / gamma(nf / 2.0) * c_tilde;
    let p = BetaParams::new(a / 2.0, 1.0 - a / 2.0)?;
    let e = epsilon / r;
    let p_star = pref * specfun::inc_beta_upper(e * e, p)?;
    let q = (r - epsilon) / r;
    let q_star = 1.0 - pref * specfun::inc_beta_upper(q * q, p)?;
    let bound = 1.0 + q_star / ((1.0 - p_star) * (1.0 - p_star));
    Ok(StepBound { p_star, q_star, bound })
}

/// `((1/N)·sqrt(Σ d²), sqrt(Σ d² / N))` for `d = estimate - exact`.
pub fn error_metric(estimates: &[f64], exact: &[f64]) -> Result<(f64, f64)> {
    if estimates.len() != exact.len() {
        return Err(Error::LengthMismatch { left: estimates.len(), right: exact.len() });
    }
    if estimates.is_empty() {
        return domain("error_metric needs at least one point");
    }
    let n = estimates.len() as f64;
    let ss: f64 = estimates.iter().zip(exact).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((ss.sqrt() / n, (ss / n).sqrt()))
}
