//! Reproducible sampling of jump targets from a ball center: exit points
//! distributed by the Poisson kernel and interior points by the Green density.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{domain, Error, Result};
use crate::kernels::{BallGeom, FracOrder};
use crate::specfun::beta::{inv_with, ln_beta_unchecked, reg_pair_with};

/// Exit radii are capped at this multiple of the ball radius. The cap is only
/// reached when the inverse Beta underflows, far beyond any bounded domain.
pub const EXIT_RADIUS_CAP: f64 = 1e150;

/// Proposal budget of the interior-radius rejection sampler.
pub const MAX_PROPOSALS: usize = 1_000_000;

/// A random stream identified by `(seed, stream_id)`.
///
/// Backed by ChaCha8 with the stream id placed in the cipher's stream word, so
/// distinct ids give independent sequences and a stream can be rebuilt at will.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self { seed, stream_id, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Number of 32-bit words drawn so far.
    pub fn counter(&self) -> u128 {
        self.inner.get_word_pos()
    }

    /// Uniform on the open interval (0, 1), on the grid `(k + 1/2) 2^-53`.
    #[inline]
    pub fn open01(&mut self) -> f64 {
        ((self.inner.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Uniform point on `S^{n-1}`.
pub fn unit_direction(n: usize, rng: &mut RngStream) -> Vec<f64> {
    let mut v = vec![0.0; n];
    unit_direction_into(&mut v, rng);
    v
}

/// Writes a uniform point on `S^{n-1}` into `out` (`n = out.len()`).
pub fn unit_direction_into(out: &mut [f64], rng: &mut RngStream) {
    match out.len() {
        0 => {}
        1 => out[0] = if rng.next_u64() >> 63 == 0 { 1.0 } else { -1.0 },
        2 => {
            let t = std::f64::consts::TAU * rng.open01();
            let (s, c) = t.sin_cos();
            out[0] = c;
            out[1] = s;
        }
        _ => loop {
            let mut norm2 = 0.0;
            for v in out.iter_mut() {
                let g: f64 = StandardNormal.sample(rng);
                *v = g;
                norm2 += g * g;
            }
            if norm2 > 1e-100 {
                let inv = 1.0 / norm2.sqrt();
                out.iter_mut().for_each(|v| *v *= inv);
                return;
            }
        },
    }
}

/// Exit-radius law `γ = r x^{-1/2}`, `x ~ Beta(α/2, 1-α/2)`, with the Beta
/// constants precomputed.
#[derive(Debug, Clone, Copy)]
pub struct ExitRadiusLaw {
    a: f64,
    b: f64,
    ln_b: f64,
}

impl ExitRadiusLaw {
    pub fn new(alpha: FracOrder) -> Self {
        let a = alpha.value() / 2.0;
        let b = 1.0 - alpha.value() / 2.0;
        Self { a, b, ln_b: ln_beta_unchecked(a, b) }
    }

    /// Radius as a function of the uniform variate `u`; decreasing to `r` as
    /// `u → 1`.
    pub fn radius_from_uniform(&self, r: f64, u: f64) -> f64 {
        let gamma = if self.b < 0.5 {
            // x piles up near 1 for large α: invert for 1 - x ~ Beta(b, a)
            // instead, which keeps full precision in γ - r.
            let y = inv_with(1.0 - u, self.b, self.a, self.ln_b);
            r / (1.0 - y).sqrt()
        } else {
            r / inv_with(u, self.a, self.b, self.ln_b).sqrt()
        };
        if gamma.is_finite() {
            // keep the point strictly outside the closed ball after rounding
            gamma.clamp(r * (1.0 + 8.0 * f64::EPSILON), EXIT_RADIUS_CAP * r)
        } else {
            EXIT_RADIUS_CAP * r
        }
    }

    #[inline]
    pub fn sample(&self, r: f64, rng: &mut RngStream) -> f64 {
        self.radius_from_uniform(r, rng.open01())
    }
}

/// Radial law of interior points on the unit ball: density proportional to
/// `s^{α-1} w(s)` on (0, 1).
#[derive(Debug, Clone, Copy)]
pub struct InteriorRadiusLaw {
    inv_alpha: f64,
    ga: f64,
    gb: f64,
    ln_b: f64,
}

impl InteriorRadiusLaw {
    pub fn new(n: usize, alpha: FracOrder) -> Result<Self> {
        let a = alpha.value();
        if n == 0 {
            return domain("dimension must be at least 1");
        }
        if a >= n as f64 {
            return Err(Error::UnsupportedBranch(format!("alpha = {a} >= n = {n}")));
        }
        let ga = (n as f64 - a) / 2.0;
        let gb = a / 2.0;
        Ok(Self { inv_alpha: 1.0 / a, ga, gb, ln_b: ln_beta_unchecked(ga, gb) })
    }

    /// `w(s)/w(0⁺) = I_{1-s²}(α/2, (n-α)/2)`.
    #[inline]
    pub fn acceptance(&self, s: f64) -> f64 {
        reg_pair_with((1.0 - s) * (1.0 + s), self.gb, self.ga, self.ln_b).0
    }

    /// Rejection sampler with proposal `s = U^{1/α}`. Returns the radius and
    /// the number of proposals used.
    pub fn sample_counted(&self, rng: &mut RngStream) -> Result<(f64, usize)> {
        for k in 1..=MAX_PROPOSALS {
            let s = rng.open01().powf(self.inv_alpha);
            let v = rng.open01();
            if s > 0.0 && s < 1.0 && v < self.acceptance(s) {
                return Ok((s, k));
            }
        }
        Err(Error::Sampling(format!(
            "interior radius rejection exceeded {MAX_PROPOSALS} proposals"
        )))
    }

    #[inline]
    pub fn sample(&self, rng: &mut RngStream) -> Result<f64> {
        self.sample_counted(rng).map(|p| p.0)
    }
}

/// Distance `γ > r` of an exit point from the ball center.
pub fn sample_exit_radius(r: f64, alpha: FracOrder, rng: &mut RngStream) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return domain(format!("radius must be positive, got {r}"));
    }
    Ok(ExitRadiusLaw::new(alpha).sample(r, rng))
}

/// Exit point `center + γ u` of a jump from the ball center.
pub fn sample_exit_point(ball: &BallGeom, alpha: FracOrder, rng: &mut RngStream) -> Vec<f64> {
    let gamma = ExitRadiusLaw::new(alpha).sample(ball.radius, rng);
    let mut u = unit_direction(ball.dim(), rng);
    for (v, c) in u.iter_mut().zip(&ball.center) {
        *v = c + gamma * *v;
    }
    u
}

/// Normalized radius `s ∈ (0, 1)` of an interior point.
pub fn sample_interior_radius(n: usize, alpha: FracOrder, rng: &mut RngStream) -> Result<f64> {
    InteriorRadiusLaw::new(n, alpha)?.sample(rng)
}

/// Interior point `center + radius·s·u` distributed by the normalized Green
/// density of the ball center.
pub fn sample_interior_point(
    ball: &BallGeom,
    n: usize,
    alpha: FracOrder,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    if n != ball.dim() {
        return domain(format!("dimension {n} differs from ball dimension {}", ball.dim()));
    }
    let s = InteriorRadiusLaw::new(n, alpha)?.sample(rng)?;
    let mut u = unit_direction(n, rng);
    for (v, c) in u.iter_mut().zip(&ball.center) {
        *v = c + ball.radius * s * *v;
    }
    Ok(u)
}
