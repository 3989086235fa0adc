//! Deterministic references: tensor-product quadrature of the one-ball
//! representation `u(x) = ∫ f Q_r(x,·) + ∫ g P_r(x,·)` and the registry of
//! benchmark problems with their manufactured sources.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::engine::{Field, ProblemSpec};
use crate::error::{domain, Error, Result};
use crate::geometry::{AnnulusDomain, BallDomain, BoxDomain, Domain, PolygonDomain};
use crate::kernels::{green_upper, make_constants, BallGeom, FracOrder, KernelConstants};
use crate::specfun::{gamma, gauss_jacobi_unit, gauss_legendre, hyp1f1, hyp2f1, QuadRule};

const ORACLE_TOL: f64 = 1e-8;

/// Quadrature resolution of one pass of the ball oracle.
#[derive(Debug, Clone, Copy)]
struct Resolution {
    radial: usize,
    angular: usize,
}

/// Directions and weights of an angular rule on `S^{n-1}`, `n ∈ {2, 3}`.
fn sphere_rule(n: usize, m: usize) -> Vec<(Vec<f64>, f64)> {
    match n {
        2 => (0..m)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / m as f64;
                (vec![t.cos(), t.sin()], 2.0 * PI / m as f64)
            })
            .collect(),
        _ => {
            let mu = gauss_legendre((m / 2).max(2));
            let mut out = Vec::with_capacity(mu.len() * m);
            for (c, w) in mu.iter() {
                let s = (1.0 - c * c).max(0.0).sqrt();
                for j in 0..m {
                    let p = 2.0 * PI * j as f64 / m as f64;
                    out.push((vec![s * p.cos(), s * p.sin(), c], w * 2.0 * PI / m as f64));
                }
            }
            out
        }
    }
}

/// `∫_ball f(y) Q_r(x, y) dy` in polar coordinates around `x`: along each ray
/// `t = t_max s`, weight `s^{α-1}(1-s)^{α/2}` absorbs both endpoint behaviors.
fn interior_integral(
    ball: &BallGeom,
    k: &KernelConstants,
    f: &Field,
    x: &[f64],
    res: Resolution,
) -> Result<f64> {
    let n = ball.dim();
    let a = k.alpha();
    let r2 = ball.radius * ball.radius;
    let xr: Vec<f64> = x.iter().zip(&ball.center).map(|(p, c)| p - c).collect();
    let x2: f64 = xr.iter().map(|v| v * v).sum();
    let gap = r2 - x2;
    let rule = gauss_jacobi_unit(res.radial, a - 1.0, a / 2.0);
    let mut y = vec![0.0; n];
    let mut total = 0.0;
    for (omega, wa) in sphere_rule(n, res.angular) {
        let xd: f64 = xr.iter().zip(&omega).map(|(p, q)| p * q).sum();
        let root = (xd * xd + gap).sqrt();
        let t_max = root - xd;
        let t_back = root + xd;
        let mut ray = 0.0;
        for (s, w) in rule.iter() {
            let t = t_max * s;
            let one_minus = 1.0 - s;
            for i in 0..n {
                y[i] = x[i] + t * omega[i];
            }
            let b = t_max * one_minus * (t + t_back);
            let comp = gap * b / (gap * b + r2 * t * t);
            let bracket = green_upper(comp, k);
            let fv = f.eval_checked(&y)?;
            ray += w * bracket / one_minus.powf(a / 2.0) * fv;
        }
        total += wa * k.c_hat * t_max.powf(a) * ray;
    }
    Ok(total)
}

/// `∫_{|z-c|>r} g(z) P_r(x, z) dz` after `t = r/|z - c|`, which maps the
/// exterior onto (0, 1) with weight `t^{α-1}(1-t)^{-α/2}`.
fn exterior_integral(
    ball: &BallGeom,
    k: &KernelConstants,
    g: &Field,
    x: &[f64],
    res: Resolution,
) -> Result<f64> {
    if g.as_constant() == Some(0.0) {
        return Ok(0.0);
    }
    let n = ball.dim();
    let a = k.alpha();
    let r = ball.radius;
    let xr: Vec<f64> = x.iter().zip(&ball.center).map(|(p, c)| (p - c) / r).collect();
    let x2: f64 = xr.iter().map(|v| v * v).sum();
    let rule: QuadRule = gauss_jacobi_unit(res.radial, a - 1.0, -a / 2.0);
    let pref = k.c_tilde * (1.0 - x2).powf(a / 2.0);
    let mut z = vec![0.0; n];
    let mut total = 0.0;
    for (omega, wa) in sphere_rule(n, res.angular) {
        let mut ray = 0.0;
        for (t, w) in rule.iter() {
            let d2: f64 = xr.iter().zip(&omega).map(|(p, q)| (t * p - q).powi(2)).sum();
            for i in 0..n {
                z[i] = ball.center[i] + r / t * omega[i];
            }
            let gv = g.eval_checked(&z)?;
            ray += w * (1.0 + t).powf(-a / 2.0) * d2.powf(-(n as f64) / 2.0) * gv;
        }
        total += wa * pref * ray;
    }
    Ok(total)
}

fn check_oracle_input(ball: &BallGeom, x: &[f64]) -> Result<()> {
    let n = ball.dim();
    if !(n == 2 || n == 3) {
        return Err(Error::UnsupportedBranch(format!("ball oracle needs n in {{2, 3}}, got {n}")));
    }
    if x.len() != n {
        return domain("oracle point dimension differs from the ball");
    }
    if ball.rel_norm2(x) >= ball.radius * ball.radius {
        return domain("oracle point must lie strictly inside the ball");
    }
    Ok(())
}

fn caps(n: usize) -> Resolution {
    if n == 2 {
        Resolution { radial: 512, angular: 1024 }
    } else {
        Resolution { radial: 128, angular: 128 }
    }
}

fn converge(
    start: Resolution,
    cap: Resolution,
    mut eval: impl FnMut(Resolution) -> Result<f64>,
) -> Result<f64> {
    let mut res = Resolution { radial: start.radial.max(4), angular: start.angular.max(4) };
    let mut prev = eval(res)?;
    loop {
        res = Resolution { radial: res.radial * 2, angular: res.angular * 2 };
        if res.radial > cap.radial || res.angular > cap.angular {
            return Err(Error::Oracle(format!(
                "ball quadrature not within {ORACLE_TOL} at {} x {} points",
                res.radial / 2,
                res.angular / 2
            )));
        }
        let next = eval(res)?;
        if (next - prev).abs() < ORACLE_TOL {
            return Ok(next);
        }
        prev = next;
    }
}

/// Solution of the fractional Poisson problem on a ball at an interior
/// point, by quadrature of the one-ball representation. Resolutions start at
/// `(radial_pts, angular_pts)` and are doubled together until successive
/// values agree to 1e-8.
pub fn ball_solution_quadrature(
    ball: &BallGeom,
    alpha: FracOrder,
    source: &Field,
    exterior: &Field,
    x: &[f64],
    radial_pts: usize,
    angular_pts: usize,
) -> Result<f64> {
    check_oracle_input(ball, x)?;
    let k = make_constants(ball.dim(), alpha, 64)?;
    converge(Resolution { radial: radial_pts, angular: angular_pts }, caps(ball.dim()), |res| {
        Ok(interior_integral(ball, &k, source, x, res)? + exterior_integral(ball, &k, exterior, x, res)?)
    })
}

/// `ζ(x) = ∫_ball Q_r(x, y) dy` by the same quadrature.
pub fn zeta_quadrature(ball: &BallGeom, k: &KernelConstants, x: &[f64]) -> Result<f64> {
    check_oracle_input(ball, x)?;
    let one = Field::Constant(1.0);
    converge(Resolution { radial: 16, angular: 16 }, caps(ball.dim()), |res| {
        interior_integral(ball, k, &one, x, res)
    })
}

/// The benchmark problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseId {
    /// Unit disk, constant source, `u = (1-|x|²)_+^{α/2}`.
    Disk,
    /// Unit disk, `u = g = (1+|x|²)^{-3/2}`.
    DiskDecay,
    /// Unit ball in `R^n` (default n = 10), constant source.
    BallConstant,
    /// L-shape, `u = g = e^{-|x|²}`.
    LShape,
    Stripe,
    Hexagon,
    Annulus,
}

impl CaseId {
    pub const ALL: [CaseId; 7] = [
        CaseId::Disk,
        CaseId::DiskDecay,
        CaseId::BallConstant,
        CaseId::LShape,
        CaseId::Stripe,
        CaseId::Hexagon,
        CaseId::Annulus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CaseId::Disk => "disk",
            CaseId::DiskDecay => "disk_decay",
            CaseId::BallConstant => "ball_constant",
            CaseId::LShape => "l_shape",
            CaseId::Stripe => "stripe",
            CaseId::Hexagon => "hexagon",
            CaseId::Annulus => "annulus",
        }
    }

    /// Builds the case; `n` overrides the dimension of `BallConstant` only.
    pub fn build(self, alpha: FracOrder, n: Option<usize>) -> Result<ExactCase> {
        let a = alpha.value();
        if let Some(m) = n {
            let fixed = if self == CaseId::BallConstant { None } else { Some(2) };
            if fixed.is_some_and(|d| d != m) || m == 0 {
                return domain(format!("{} is defined for n = 2 only", self.name()));
            }
        }
        let dist2 = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
        let bump = move |x: &[f64]| {
            let s = 1.0 - dist2(x);
            if s > 0.0 {
                s.powf(a / 2.0)
            } else {
                0.0
            }
        };
        let case = match self {
            CaseId::Disk | CaseId::BallConstant => {
                let dim = if self == CaseId::BallConstant { n.unwrap_or(10) } else { 2 };
                let nf = dim as f64;
                let f = 2f64.powf(a) * gamma(1.0 + a / 2.0) * gamma((nf + a) / 2.0) / gamma(nf / 2.0);
                ExactCase {
                    id: self,
                    n: dim,
                    alpha,
                    domain: Arc::new(BallDomain::unit(dim)),
                    f: Field::Constant(f),
                    g: Field::Constant(0.0),
                    u_exact: Some(Field::new(bump)),
                }
            }
            CaseId::DiskDecay => {
                let c = gamma(2.0 + a);
                let u = move |x: &[f64]| (1.0 + dist2(x)).powf(-1.5);
                ExactCase {
                    id: self,
                    n: 2,
                    alpha,
                    domain: Arc::new(BallDomain::unit(2)),
                    f: Field::new(move |x| {
                        c * hyp2f1((2.0 + a) / 2.0, (3.0 + a) / 2.0, 1.0, -dist2(x))
                            .unwrap_or(f64::NAN)
                    }),
                    g: Field::new(u),
                    u_exact: Some(Field::new(u)),
                }
            }
            CaseId::LShape => {
                let c = 2f64.powf(a) * gamma(1.0 + a / 2.0);
                let u = move |x: &[f64]| (-dist2(x)).exp();
                ExactCase {
                    id: self,
                    n: 2,
                    alpha,
                    domain: Arc::new(PolygonDomain::l_shape()),
                    f: Field::new(move |x| {
                        c * hyp1f1(1.0 + a / 2.0, 1.0, -dist2(x)).unwrap_or(f64::NAN)
                    }),
                    g: Field::new(u),
                    u_exact: Some(Field::new(u)),
                }
            }
            CaseId::Stripe => {
                let c = 2f64.powf(a) * gamma(1.0 + a / 2.0);
                let (c1, c2) = ([PI / 3.0, -PI / 4.0], [-PI / 2.0, 2.0 * PI / 3.0]);
                ExactCase {
                    id: self,
                    n: 2,
                    alpha,
                    domain: Arc::new(BoxDomain::stripe()),
                    f: Field::new(move |x| {
                        let p1 = c1[0] * x[0] + c1[1] * x[1];
                        let p2 = c2[0] * x[0] + c2[1] * x[1];
                        c * (signed_pow(p2.cos(), a / 3.0) + signed_pow(p1.sin(), a / 2.0))
                            * (-dist2(x)).cos()
                    }),
                    g: Field::Constant(0.0),
                    u_exact: None,
                }
            }
            CaseId::Hexagon => {
                let (c1, c2) = ([PI / 3.0, -PI / 4.0], [-PI / 2.0, 2.0 * PI / 3.0]);
                ExactCase {
                    id: self,
                    n: 2,
                    alpha,
                    domain: Arc::new(PolygonDomain::regular_hexagon()),
                    f: Field::new(move |x| {
                        let p1 = c1[0] * x[0] + c1[1] * x[1];
                        let p2 = c2[0] * x[0] + c2[1] * x[1];
                        p1.sin().powi(2) + p2.cos().powi(2) - (a * x[0] * x[1]).powi(3)
                    }),
                    g: Field::Constant(0.0),
                    u_exact: None,
                }
            }
            CaseId::Annulus => ExactCase {
                id: self,
                n: 2,
                alpha,
                domain: Arc::new(AnnulusDomain::standard()),
                f: Field::new(|x| {
                    (x[1] * x[1] - 2.0 * x[0] * x[1]).cos() - (x[0] * x[0] + 2.0 * x[0] * x[1]).sin()
                }),
                g: Field::Constant(0.0),
                u_exact: None,
            },
        };
        Ok(case)
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CaseId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CaseId::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown case {s:?}")))
    }
}

/// `sign(b)·|b|^p`, the convention used for fractional powers of the stripe
/// source's possibly negative bases.
pub fn signed_pow(b: f64, p: f64) -> f64 {
    b.signum() * b.abs().powf(p)
}

/// A benchmark problem with its data and, when known, the exact solution.
#[derive(Debug, Clone)]
pub struct ExactCase {
    pub id: CaseId,
    pub n: usize,
    pub alpha: FracOrder,
    pub domain: Arc<dyn Domain>,
    pub f: Field,
    pub g: Field,
    pub u_exact: Option<Field>,
}

impl ExactCase {
    pub fn name(&self) -> &'static str {
        self.id.name()
    }

    pub fn problem(&self) -> ProblemSpec {
        ProblemSpec {
            n: self.n,
            alpha: self.alpha,
            source: self.f.clone(),
            exterior: self.g.clone(),
            domain: self.domain.clone(),
        }
    }
}

/// All seven benchmark problems at order `alpha`.
pub fn exact_registry(alpha: FracOrder) -> Vec<ExactCase> {
    CaseId::ALL.iter().map(|c| c.build(alpha, None).expect("default dimensions are valid")).collect()
}
