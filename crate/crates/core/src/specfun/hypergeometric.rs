use crate::error::{domain, Result};

use super::{gamma, rgamma, KahanSum};

const MAX_TERMS: usize = 200_000;
const SERIES_TOL: f64 = 1e-17;
const DIRECT_RADIUS: f64 = 0.5;

fn check_c(c: f64) -> Result<()> {
    if !c.is_finite() || (c <= 0.0 && c == c.floor()) {
        return domain(format!("c = {c} must not be a nonpositive integer"));
    }
    Ok(())
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// Plain power series of ₂F₁; callers guarantee |z| < 1.
fn series_2f1(a: f64, b: f64, c: f64, z: f64) -> f64 {
    let mut sum = KahanSum::default();
    let mut term = 1.0;
    sum.add(term);
    for k in 0..MAX_TERMS {
        let k = k as f64;
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        sum.add(term);
        if term == 0.0 || term.abs() <= SERIES_TOL * sum.value().abs() {
            break;
        }
    }
    sum.value()
}

/// Plain power series of ₁F₁.
fn series_1f1(a: f64, c: f64, z: f64) -> f64 {
    let mut sum = KahanSum::default();
    let mut term = 1.0;
    sum.add(term);
    for k in 0..MAX_TERMS {
        let k = k as f64;
        term *= (a + k) / ((c + k) * (k + 1.0)) * z;
        sum.add(term);
        if term == 0.0 || (k > z.abs() && term.abs() <= SERIES_TOL * sum.value().abs()) {
            break;
        }
    }
    sum.value()
}

/// Gauss hypergeometric function ₂F₁(a, b; c; z) on the half line z ≤ 0.
///
/// The power series is summed directly for |z| ≤ 1/2. Further out, the
/// `1/(1-z)` connection formula is used when `b - a` is not an integer, and
/// the Pfaff transformation `z → z/(z-1)` otherwise.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    check_c(c)?;
    if z.is_nan() || z > 0.0 || !a.is_finite() || !b.is_finite() {
        return domain(format!("hyp2f1 requires finite parameters and z <= 0, got z = {z}"));
    }
    if z == 0.0 || a == 0.0 || b == 0.0 {
        return Ok(1.0);
    }
    if -z <= DIRECT_RADIUS {
        return Ok(series_2f1(a, b, c, z));
    }
    let d = b - a;
    if z < -1.0 && (d - d.round()).abs() > 1e-6 {
        // ₂F₁(a,b;c;z) = Γ(c)Γ(b-a)/(Γ(b)Γ(c-a)) (1-z)^{-a} ₂F₁(a, c-b; a-b+1; 1/(1-z))
        //              + Γ(c)Γ(a-b)/(Γ(a)Γ(c-b)) (1-z)^{-b} ₂F₁(b, c-a; b-a+1; 1/(1-z))
        let w = 1.0 / (1.0 - z);
        let gc = gamma(c);
        let mut total = 0.0;
        let k1 = gc * gamma(d) * rgamma(b) * rgamma(c - a);
        if k1 != 0.0 {
            total += k1 * w.powf(a) * series_2f1(a, c - b, 1.0 - d, w);
        }
        let k2 = gc * gamma(-d) * rgamma(a) * rgamma(c - b);
        if k2 != 0.0 {
            total += k2 * w.powf(b) * series_2f1(b, c - a, 1.0 + d, w);
        }
        return Ok(total);
    }
    // Pfaff: (1-z)^{-a} ₂F₁(a, c-b; c; z/(z-1)); pick the parameter order that
    // terminates the series if possible.
    let w = z / (z - 1.0);
    let (p, q) = if is_nonpositive_integer(c - a) && !is_nonpositive_integer(c - b) {
        (b, c - a)
    } else {
        (a, c - b)
    };
    Ok((1.0 - z).powf(-p) * series_2f1(p, q, c, w))
}

/// Confluent hypergeometric function ₁F₁(a; c; z) on z ≤ 0.
///
/// For negative `z` Kummer's transformation `e^z ₁F₁(c-a; c; -z)` turns the
/// alternating series into one with terms of eventually constant sign.
pub fn hyp1f1(a: f64, c: f64, z: f64) -> Result<f64> {
    check_c(c)?;
    if z.is_nan() || z > 0.0 || !a.is_finite() {
        return domain(format!("hyp1f1 requires finite a and z <= 0, got z = {z}"));
    }
    if z == 0.0 || a == 0.0 {
        return Ok(1.0);
    }
    if is_nonpositive_integer(a) {
        // terminating polynomial, no cancellation issue worth transforming
        return Ok(series_1f1(a, c, z));
    }
    Ok(z.exp() * series_1f1(c - a, c, -z))
}
