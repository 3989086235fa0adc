//! Closed-form fractional Green function and Poisson kernel of a ball, the
//! radial laws they induce for jumps from the ball center, and the weight
//! `ζ = ∫ Q_r(x, y) dy`.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::sampling::{unit_direction_into, RngStream};
use crate::specfun::{self, gamma, gauss_jacobi_unit, gauss_legendre, BetaParams};

/// Smallest supported fractional order.
pub const ALPHA_MIN: f64 = 0.05;
/// Largest supported fractional order.
pub const ALPHA_MAX: f64 = 1.95;

const ZETA_TOL: f64 = 1e-10;
const ZETA_MAX_POINTS: usize = 1024;

/// Order `α` of the operator `(-Δ)^{α/2}`, restricted to `[0.05, 1.95]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FracOrder(f64);

impl FracOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(ALPHA_MIN..=ALPHA_MAX).contains(&alpha) {
            return domain(format!(
                "fractional order {alpha} outside the supported range [{ALPHA_MIN}, {ALPHA_MAX}]"
            ));
        }
        Ok(Self(alpha))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// Shape parameters `(α/2, 1 - α/2)` of the exit-radius law.
    pub fn exit_params(self) -> BetaParams {
        BetaParams::new(self.0 / 2.0, 1.0 - self.0 / 2.0).expect("alpha in (0, 2)")
    }
}

/// A ball `B(center, radius)` in `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BallGeom {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl BallGeom {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return domain("ball center must have at least one coordinate");
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return domain(format!("ball radius must be positive, got {radius}"));
        }
        Ok(Self { center, radius })
    }

    pub fn unit(n: usize) -> Self {
        Self { center: vec![0.0; n], radius: 1.0 }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// `|x - center|²`.
    pub fn rel_norm2(&self, x: &[f64]) -> f64 {
        x.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum()
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return domain(format!("point has dimension {}, ball has {}", x.len(), self.dim()));
        }
        Ok(())
    }
}

pub(crate) fn dist2(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Constants of the ball kernels for a fixed dimension and order.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelConstants {
    pub n: usize,
    pub alpha: FracOrder,
    /// `Γ(n/2) sin(πα/2) / π^{n/2+1}`, prefactor of the Poisson kernel.
    pub c_tilde: f64,
    /// `Γ(n/2) / (2^α π^{n/2} Γ²(α/2))`, prefactor of the Green function.
    pub c_hat: f64,
    /// `B((n-α)/2, α/2)`.
    pub beta_full: f64,
    /// `ζ(0)` on the unit ball.
    pub zeta_unit: f64,
    pub(crate) green: BetaParams,
    pub(crate) ln_beta_green: f64,
    pub(crate) exit: BetaParams,
    pub(crate) ln_beta_exit: f64,
}

impl KernelConstants {
    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha.value()
    }

    /// Shape parameters `((n-α)/2, α/2)` of the Green function's Beta form.
    pub fn green_params(&self) -> BetaParams {
        self.green
    }

    pub fn exit_params(&self) -> BetaParams {
        self.exit
    }
}

/// Builds the kernel constants, computing `ζ(0)` on the unit ball by
/// Gauss-Jacobi quadrature, doubling `quad_points` until two successive
/// values agree to 1e-10.
pub fn make_constants(n: usize, alpha: FracOrder, quad_points: usize) -> Result<KernelConstants> {
    if n == 0 {
        return domain("dimension must be at least 1");
    }
    let a = alpha.value();
    let nf = n as f64;
    if a >= nf {
        return Err(Error::UnsupportedBranch(format!(
            "alpha = {a} >= n = {n} (logarithmic / degenerate Green function)"
        )));
    }
    let half_n = nf / 2.0;
    let c_tilde = gamma(half_n) * (PI * a / 2.0).sin() / PI.powf(half_n + 1.0);
    let g_half = gamma(a / 2.0);
    let c_hat = gamma(half_n) / (2f64.powf(a) * PI.powf(half_n) * g_half * g_half);
    let green = BetaParams::new((nf - a) / 2.0, a / 2.0)?;
    let exit = alpha.exit_params();
    let beta_full = green.complete();
    if !(c_tilde > 0.0 && c_hat > 0.0 && c_tilde.is_finite() && c_hat.is_finite()) {
        return domain(format!("kernel constants degenerate for n={n}, alpha={a}"));
    }

    let mut m = quad_points.max(2);
    let mut prev = zeta_unit_quadrature(n, a, m);
    loop {
        if m * 2 > ZETA_MAX_POINTS {
            return Err(Error::Oracle(format!(
                "zeta quadrature not converged at {m} points (n={n}, alpha={a})"
            )));
        }
        m *= 2;
        let next = zeta_unit_quadrature(n, a, m);
        if (next - prev).abs() < ZETA_TOL {
            prev = next;
            break;
        }
        prev = next;
    }

    Ok(KernelConstants {
        n,
        alpha,
        c_tilde,
        c_hat,
        beta_full,
        zeta_unit: prev,
        ln_beta_green: beta_full.ln(),
        green,
        ln_beta_exit: exit.complete().ln(),
        exit,
    })
}

/// `(1/(2^{α-1}Γ²(α/2))) ∫₀¹ s^{α-1} w(s) ds` with an `m`-point rule per piece.
///
/// The integrand carries `s^{α-1}` and `s^{n-1}` terms at the origin and a
/// `(1-s)^{α/2}` factor at 1, so [0, 1] is split at 1/2: the constant part of
/// `w` is integrated against the weight exactly on [0, 1/2], the remainder
/// (smooth) by Gauss-Legendre, and [1/2, 1] by Gauss-Jacobi with weight
/// `(1-s)^{α/2}`.
fn zeta_unit_quadrature(n: usize, alpha: f64, m: usize) -> f64 {
    let nf = n as f64;
    let (ga, gb) = ((nf - alpha) / 2.0, alpha / 2.0);
    let ln_b = specfun::beta::ln_beta_unchecked(ga, gb);
    let full = ln_b.exp();

    let mut near = full * 0.5f64.powf(alpha) / alpha;
    let leg = gauss_legendre(m);
    for (x, w) in leg.iter() {
        let s = 0.25 * (1.0 + x);
        let lower = specfun::beta::reg_pair_with(s * s, ga, gb, ln_b).0 * full;
        near -= 0.25 * w * s.powf(alpha - 1.0) * lower;
    }

    let rule = gauss_jacobi_unit(m, 0.0, alpha / 2.0);
    let mut far = 0.0;
    for (v, w) in rule.iter() {
        let s = 0.5 * (1.0 + v);
        let one_minus_s = 0.5 * (1.0 - v);
        let upper = specfun::beta::reg_pair_with(one_minus_s * (1.0 + s), gb, ga, ln_b).0 * full;
        far += w * 0.5 * s.powf(alpha - 1.0) * upper / (1.0 - v).powf(alpha / 2.0);
    }

    let g = gamma(alpha / 2.0);
    (near + far) * 2f64.powf(1.0 - alpha) / (g * g)
}

/// `Γ(n/2) / (2^α Γ(1+α/2) Γ((n+α)/2))`: the value `ζ(0)` must take on the
/// unit ball for the constant-source solution `(1-|x|²)_+^{α/2}` to hold.
pub fn zeta_unit_closed_form(n: usize, alpha: f64) -> f64 {
    let nf = n as f64;
    gamma(nf / 2.0) / (2f64.powf(alpha) * gamma(1.0 + alpha / 2.0) * gamma((nf + alpha) / 2.0))
}

/// Poisson kernel `P_r(x, z)` of the ball, `x` inside and `z` outside.
pub fn poisson_kernel(ball: &BallGeom, x: &[f64], z: &[f64], k: &KernelConstants) -> Result<f64> {
    ball.check_dim(x)?;
    ball.check_dim(z)?;
    let r2 = ball.radius * ball.radius;
    let x2 = ball.rel_norm2(x);
    let z2 = ball.rel_norm2(z);
    if x2 >= r2 {
        return domain("poisson_kernel: x must lie in the open ball");
    }
    if z2 <= r2 {
        return domain("poisson_kernel: z must lie outside the closed ball");
    }
    let ratio = (r2 - x2) / (z2 - r2);
    let d = dist2(x, z).sqrt();
    Ok(k.c_tilde * ratio.powf(k.alpha() / 2.0) * d.powi(-(k.n as i32)))
}

/// `1 - ρ*(x, y)` computed without cancellation.
fn green_rho_complement(ball: &BallGeom, x: &[f64], y: &[f64]) -> (f64, f64) {
    let r2 = ball.radius * ball.radius;
    let a = r2 - ball.rel_norm2(x);
    let b = r2 - ball.rel_norm2(y);
    let d2 = dist2(x, y);
    let denom = a * b + r2 * d2;
    (r2 * d2 / denom, a * b / denom)
}

/// Green function `Q_r(x, y)` of the ball in its incomplete-Beta form.
pub fn green_function(ball: &BallGeom, x: &[f64], y: &[f64], k: &KernelConstants) -> Result<f64> {
    ball.check_dim(x)?;
    ball.check_dim(y)?;
    if k.alpha() >= k.n as f64 {
        return Err(Error::UnsupportedBranch("alpha >= n".into()));
    }
    let r2 = ball.radius * ball.radius;
    if ball.rel_norm2(x) >= r2 || ball.rel_norm2(y) >= r2 {
        return domain("green_function: both points must lie in the open ball");
    }
    let d2 = dist2(x, y);
    if d2 == 0.0 {
        return Err(Error::Singular("green_function evaluated at x == y".into()));
    }
    let (_, comp) = green_rho_complement(ball, x, y);
    let bracket = green_upper(comp, k);
    Ok(k.c_hat * d2.powf((k.alpha() - k.n as f64) / 2.0) * bracket)
}

/// `B(a,b) - B(1 - comp; a, b)` for the Green parameters, from `comp = 1 - ρ*`.
#[inline]
pub(crate) fn green_upper(comp: f64, k: &KernelConstants) -> f64 {
    let p = k.green;
    specfun::beta::reg_pair_with(comp, p.b(), p.a(), k.ln_beta_green).0 * k.beta_full
}

/// Probability that a jump from the ball center lands within distance
/// `gamma` of the center: `F(γ) = 1 - I_{r²/γ²}(α/2, 1-α/2)`.
pub fn exit_radius_cdf(gamma: f64, r: f64, alpha: FracOrder) -> Result<f64> {
    if r.is_nan() || r <= 0.0 {
        return domain(format!("radius must be positive, got {r}"));
    }
    if gamma.is_nan() || gamma < r {
        return domain(format!("exit radius {gamma} below ball radius {r}"));
    }
    if gamma.is_infinite() {
        return Ok(1.0);
    }
    let q = r / gamma;
    Ok(specfun::reg_inc_beta_pair(q * q, alpha.exit_params())?.1)
}

/// `w(s) = B((n-α)/2, α/2) - B(s²; (n-α)/2, α/2)` for `s` in (0, 1).
pub fn interior_radial_weight(s: f64, n: usize, alpha: FracOrder) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return domain(format!("radial coordinate {s} outside (0, 1)"));
    }
    let a = alpha.value();
    if a >= n as f64 {
        return Err(Error::UnsupportedBranch("alpha >= n".into()));
    }
    let p = BetaParams::new((n as f64 - a) / 2.0, a / 2.0)?;
    specfun::inc_beta((1.0 - s) * (1.0 + s), p.swapped())
}

/// `ζ` at the center of a ball of the given radius: `radius^α · ζ_unit`.
#[inline]
pub fn zeta_center(radius: f64, k: &KernelConstants) -> f64 {
    radius.powf(k.alpha()) * k.zeta_unit
}

/// Monte Carlo estimate of `ζ(x) = ∫_ball Q_r(x, y) dy`, returning
/// `(value, standard error)`.
///
/// Points are drawn along uniform directions from `x` with distance density
/// proportional to `t^{α-1}` up to the sphere, which cancels the
/// `|y-x|^{α-n}` singularity and leaves a bounded score.
pub fn zeta_general(
    ball: &BallGeom,
    x: &[f64],
    k: &KernelConstants,
    mc_samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    ball.check_dim(x)?;
    let n = ball.dim();
    if n != k.n {
        return domain("zeta_general: ball dimension differs from the constants");
    }
    let r2 = ball.radius * ball.radius;
    let x_rel: Vec<f64> = x.iter().zip(&ball.center).map(|(a, c)| a - c).collect();
    let x2: f64 = x_rel.iter().map(|v| v * v).sum();
    if x2 >= r2 {
        return domain("zeta_general: x must lie in the open ball");
    }
    if mc_samples < 2 {
        return domain("zeta_general needs at least two samples");
    }
    let alpha = k.alpha();
    let sphere = 2.0 * PI.powf(n as f64 / 2.0) / gamma(n as f64 / 2.0);
    let mut rng = RngStream::new(seed, 0);
    let mut dir = vec![0.0; n];
    let mut y = vec![0.0; n];
    let (mut mean, mut m2) = (0.0, 0.0);
    for i in 0..mc_samples {
        unit_direction_into(&mut dir, &mut rng);
        let xd: f64 = x_rel.iter().zip(&dir).map(|(a, b)| a * b).sum();
        let t_max = -xd + (xd * xd + r2 - x2).sqrt();
        let t = t_max * rng.open01().powf(1.0 / alpha);
        for j in 0..n {
            y[j] = ball.center[j] + x_rel[j] + t * dir[j];
        }
        let (_, comp) = green_rho_complement(ball, x, &y);
        let score = sphere * k.c_hat * t_max.powf(alpha) / alpha * green_upper(comp, k);
        let delta = score - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (score - mean);
    }
    let var = m2 / (mc_samples - 1) as f64;
    Ok((mean, (var / mc_samples as f64).sqrt()))
}
