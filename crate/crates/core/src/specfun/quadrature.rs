use nalgebra::{DMatrix, SymmetricEigen};

use super::{gamma, ln_gamma};

/// A quadrature rule as parallel node / weight vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ wᵢ h(xᵢ)`.
    pub fn integrate(&self, mut h: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * h(x)).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Gauss-Jacobi rule on [-1, 1] for the weight `(1-x)^a (1+x)^b`, a, b > -1.
///
/// Golub-Welsch: eigen-decomposition of the symmetric Jacobi matrix of the
/// three-term recurrence.
pub fn gauss_jacobi(m: usize, a: f64, b: f64) -> QuadRule {
    assert!(m >= 1, "quadrature needs at least one node");
    assert!(a > -1.0 && b > -1.0, "Jacobi exponents must exceed -1");
    let ab = a + b;
    let mut jac = DMatrix::<f64>::zeros(m, m);
    for k in 0..m {
        let kf = k as f64;
        let diag = if k == 0 {
            (b - a) / (ab + 2.0)
        } else {
            (b * b - a * a) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        jac[(k, k)] = diag;
        if k + 1 < m {
            let n = kf + 1.0;
            let s = 2.0 * n + ab;
            let num = 4.0 * n * (n + a) * (n + b) * (n + ab);
            let den = s * s * (s + 1.0) * (s - 1.0);
            let off = if n == 1.0 && (ab + 1.0).abs() < 1e-14 {
                // limit of the general expression when a + b = -1
                (4.0 * (1.0 + a) * (1.0 + b) / ((ab + 2.0).powi(2) * (ab + 3.0))).sqrt()
            } else {
                (num / den).sqrt()
            };
            jac[(k, k + 1)] = off;
            jac[(k + 1, k)] = off;
        }
    }
    let ln_mu0 = (ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0)
        - ln_gamma(ab + 2.0);
    let mu0 = if ab + 2.0 < 170.0 {
        2f64.powf(ab + 1.0) * gamma(a + 1.0) * gamma(b + 1.0) / gamma(ab + 2.0)
    } else {
        ln_mu0.exp()
    };
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..m)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    QuadRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}

/// Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(m: usize) -> QuadRule {
    gauss_jacobi(m, 0.0, 0.0)
}

/// Rule on (0, 1) for the weight `s^left (1-s)^right`.
pub fn gauss_jacobi_unit(m: usize, left: f64, right: f64) -> QuadRule {
    let rule = gauss_jacobi(m, right, left);
    let scale = 0.5f64.powf(left + right + 1.0);
    QuadRule {
        nodes: rule.nodes.iter().map(|&x| 0.5 * (1.0 + x)).collect(),
        weights: rule.weights.iter().map(|&w| w * scale).collect(),
    }
}

/// `m`-point rule exact for `∫₀¹ s^exponent q(s) ds`, deg q ≤ 2m-1.
pub fn gauss_jacobi_rule(m: usize, exponent: f64) -> Vec<(f64, f64)> {
    gauss_jacobi_unit(m, exponent, 0.0).iter().collect()
}
