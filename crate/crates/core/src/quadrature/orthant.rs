//! Integrals over the positive orthant against `Π y_i^{a_i} e^{-N y_i}`.

use rayon::prelude::*;

use super::rules::{gauss_laguerre_general, QuadratureRule};
use crate::error::{Error, Result};
use crate::summation::compensated_sum;

/// Largest dimension handled by tensor-product rules.
pub const MAX_TENSOR_DIM: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthantOptions {
    pub initial_nodes: usize,
    pub max_nodes: usize,
    pub rel_tol: f64,
}

impl Default for OrthantOptions {
    fn default() -> Self {
        Self { initial_nodes: 40, max_nodes: 1280, rel_tol: 1e-10 }
    }
}

/// `∫ Π y_i^{a_i} e^{-N Σ y_i} g(y) dy` split as `mean · exp(log_scale)`.
///
/// `log_scale` is the log of the same integral with `g ≡ 1`, so `mean` is
/// directly the normalised average of `g` and never over- or underflows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthantIntegral {
    pub log_scale: f64,
    pub mean: f64,
    /// `Σ w̃ |g|`, the scale against which convergence is judged.
    pub abs_mean: f64,
    pub nodes_per_axis: usize,
}

impl OrthantIntegral {
    pub fn value(&self) -> f64 {
        self.mean * self.log_scale.exp()
    }

    pub fn log_abs(&self) -> f64 {
        self.mean.abs().ln() + self.log_scale
    }

    pub fn sign(&self) -> f64 {
        if self.mean == 0.0 {
            0.0
        } else {
            self.mean.signum()
        }
    }
}

pub fn integrate_orthant<G>(g: G, exponents: &[f64], n_scale: f64) -> Result<OrthantIntegral>
where
    G: Fn(&[f64]) -> f64 + Sync,
{
    integrate_orthant_with(g, exponents, n_scale, OrthantOptions::default())
}

/// Tensor generalized Gauss–Laguerre after the substitution `u = N y`,
/// doubling the node count until two successive rules agree.
pub fn integrate_orthant_with<G>(g: G, exponents: &[f64], n_scale: f64, opts: OrthantOptions) -> Result<OrthantIntegral>
where
    G: Fn(&[f64]) -> f64 + Sync,
{
    let d = exponents.len();
    if d == 0 || d > MAX_TENSOR_DIM {
        return Err(Error::UnsupportedDimension { dim: d, max: MAX_TENSOR_DIM });
    }
    if !(n_scale > 0.0) {
        return Err(Error::Domain(format!("scale N must be positive, got {n_scale}")));
    }
    for (i, &a) in exponents.iter().enumerate() {
        if !(a > -1.0) {
            return Err(Error::Divergent { index: i, value: a });
        }
    }

    let mut n = opts.initial_nodes.max(1);
    let mut previous: Option<(f64, f64)> = None;
    let mut last_change = f64::INFINITY;
    loop {
        let rules = exponents.iter().map(|&a| gauss_laguerre_general(n, a)).collect::<Result<Vec<_>>>()?;
        let (mean, abs_mean) = tensor_mean(&g, &rules, n_scale);
        if let Some((prev, _)) = previous {
            let change = (mean - prev).abs();
            last_change = change / abs_mean.max(f64::MIN_POSITIVE);
            if change <= opts.rel_tol * abs_mean {
                let log_scale = rules.iter().map(QuadratureRule::log_mass).sum::<f64>()
                    - exponents.iter().map(|a| (a + 1.0) * n_scale.ln()).sum::<f64>();
                return Ok(OrthantIntegral { log_scale, mean, abs_mean, nodes_per_axis: n });
            }
        }
        if n * 2 > opts.max_nodes {
            return Err(Error::NonConvergence { what: "orthant quadrature", change: last_change, nodes: n });
        }
        previous = Some((mean, abs_mean));
        n *= 2;
    }
}

fn tensor_mean<G>(g: &G, rules: &[QuadratureRule], n_scale: f64) -> (f64, f64)
where
    G: Fn(&[f64]) -> f64 + Sync,
{
    let d = rules.len();
    let first = &rules[0];
    let partial: Vec<(f64, f64)> = first
        .nodes()
        .par_iter()
        .zip(first.normalized_weights())
        .map(|(&u0, &w0)| {
            let mut y = vec![u0 / n_scale; d];
            let mut acc = Vec::new();
            let mut acc_abs = Vec::new();
            let mut idx = vec![0usize; d];
            loop {
                let mut w = w0;
                for k in 1..d {
                    y[k] = rules[k].nodes()[idx[k]] / n_scale;
                    w *= rules[k].normalized_weights()[idx[k]];
                }
                let v = g(&y);
                acc.push(w * v);
                acc_abs.push(w * v.abs());
                // odometer over axes 1..d
                let mut k = d;
                loop {
                    if k == 1 {
                        return (compensated_sum(acc), compensated_sum(acc_abs));
                    }
                    k -= 1;
                    idx[k] += 1;
                    if idx[k] < rules[k].order() {
                        break;
                    }
                    idx[k] = 0;
                }
            }
        })
        .collect();
    (compensated_sum(partial.iter().map(|p| p.0)), compensated_sum(partial.iter().map(|p| p.1)))
}
