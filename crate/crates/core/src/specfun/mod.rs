//! Special functions used by the ball kernels, the samplers and the manufactured
//! source terms of the benchmark problems.
//!
//! Everything here is a pure function of its arguments. Gamma and log-gamma
//! come from `libm`; the incomplete Beta function, its inverse, the
//! hypergeometric series and the Gauss-Jacobi rules are implemented locally.

pub(crate) mod beta;
mod hypergeometric;
mod quadrature;

pub use beta::{
    beta, inc_beta, inc_beta_upper, inv_reg_inc_beta, ln_beta, reg_inc_beta,
    reg_inc_beta_pair, BetaParams,
};
pub use hypergeometric::{hyp1f1, hyp2f1};
pub use quadrature::{gauss_jacobi, gauss_jacobi_rule, gauss_jacobi_unit, gauss_legendre, QuadRule};

/// Gamma function.
#[inline]
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// Natural logarithm of `|Γ(x)|`.
#[inline]
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `1/Γ(x)`, returning zero at the poles `x = 0, -1, -2, ...`.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    if x > 171.0 {
        return (-ln_gamma(x)).exp();
    }
    1.0 / gamma(x)
}

/// Kahan-compensated sum used by the series evaluations.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    #[inline]
    pub(crate) fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub(crate) fn value(&self) -> f64 {
        self.sum
    }
}
