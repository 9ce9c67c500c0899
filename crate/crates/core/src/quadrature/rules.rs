//! Classical Gauss rules: generalized Laguerre on `(0, ∞)` and Jacobi-type
//! rules on `[0, 1]`.

use super::golub_welsch::gauss_rule;
use crate::error::{Error, Result};
use crate::special::log_gamma_unchecked;

/// Gauss rule for the weight `y^a e^{-y}` on `(0, ∞)`.
///
/// Weights are stored normalised to unit sum; the total mass `Γ(a+1)` is
/// carried as a logarithm because it overflows for the exponents met in
/// practice (`a` in the thousands).
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    normalized_weights: Vec<f64>,
    log_mass: f64,
    parameter: f64,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Weights divided by the total mass; they sum to one.
    pub fn normalized_weights(&self) -> &[f64] {
        &self.normalized_weights
    }

    /// `ln Γ(a+1)`, the log of the total weight.
    pub fn log_mass(&self) -> f64 {
        self.log_mass
    }

    /// Unnormalised weights. Overflows to infinity once `Γ(a+1)` does.
    pub fn weights(&self) -> Vec<f64> {
        let mass = self.log_mass.exp();
        self.normalized_weights.iter().map(|w| w * mass).collect()
    }

    pub fn parameter(&self) -> f64 {
        self.parameter
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// `Σ w̃_i g(y_i)`: the weighted mean of `g` under `y^a e^{-y} / Γ(a+1)`.
    pub fn mean<F: FnMut(f64) -> f64>(&self, mut g: F) -> f64 {
        self.nodes.iter().zip(&self.normalized_weights).map(|(&y, &w)| w * g(y)).sum()
    }
}

/// Nodes and weights for `y^a e^{-y}` from the generalized Laguerre
/// recurrence `a_i = 2i + a + 1`, `b_i = i (i + a)`.
pub fn gauss_laguerre_general(n: usize, a: f64) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::Domain("quadrature order must be positive".into()));
    }
    if !(a > -1.0) || !a.is_finite() {
        return Err(Error::Divergent { index: 0, value: a });
    }
    // Work relative to the shift `a`: the spread of the nodes is only
    // O(sqrt(n a)), so eigenvalues come out with better absolute accuracy.
    let diag: Vec<f64> = (0..n).map(|i| 2.0 * i as f64 + 1.0).collect();
    let offdiag: Vec<f64> = (1..n)
        .map(|i| {
            let i = i as f64;
            (i * (i + a)).sqrt()
        })
        .collect();
    let (shifted, weights) = gauss_rule(&diag, &offdiag)?;
    let nodes = shifted.into_iter().map(|x| x + a).collect();
    Ok(QuadratureRule { nodes, normalized_weights: weights, log_mass: log_gamma_unchecked(a + 1.0), parameter: a })
}

/// A rule on `[0, 1]`, weights summing to the integral of the weight function.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitIntervalRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl UnitIntervalRule {
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * f(t)).sum()
    }
}

/// Gauss rule for the weight `(1 - t)^alpha` on `[0, 1]`, exact for
/// polynomials of degree `2n - 1`.
pub fn gauss_jacobi_unit(n: usize, alpha: f64) -> Result<UnitIntervalRule> {
    if n == 0 {
        return Err(Error::Domain("quadrature order must be positive".into()));
    }
    if !(alpha > -1.0) {
        return Err(Error::Divergent { index: 0, value: alpha });
    }
    // Jacobi polynomials on [-1, 1] with weight (1-x)^alpha (1+x)^0.
    let beta = 0.0;
    let ab = alpha + beta;
    let diag: Vec<f64> = (0..n)
        .map(|k| {
            let k = k as f64;
            if k == 0.0 {
                (beta - alpha) / (ab + 2.0)
            } else {
                (beta * beta - alpha * alpha) / ((2.0 * k + ab) * (2.0 * k + ab + 2.0))
            }
        })
        .collect();
    let offdiag: Vec<f64> = (1..n)
        .map(|k| {
            let k = k as f64;
            let s = 2.0 * k + ab;
            (4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0))).sqrt()
        })
        .collect();
    let (x, w) = gauss_rule(&diag, &offdiag)?;
    // ∫_0^1 (1-t)^alpha dt = 1/(alpha+1)
    let mass = 1.0 / (alpha + 1.0);
    Ok(UnitIntervalRule {
        nodes: x.iter().map(|&x| 0.5 * (1.0 + x)).collect(),
        weights: w.iter().map(|&w| w * mass).collect(),
    })
}

/// Gauss–Legendre on `[0, 1]`.
pub fn gauss_legendre_unit(n: usize) -> Result<UnitIntervalRule> {
    gauss_jacobi_unit(n, 0.0)
}
