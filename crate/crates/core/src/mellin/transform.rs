//! The `N`-twisted Mellin transform
//!
//! ```text
//! A_N f(x) = ∫ e^{N Σ (x_i ln y_i - y_i)} f(y) dy / ∫ e^{N Σ (x_i ln y_i - y_i)} dy
//! ```
//!
//! and its asymptotic series `Σ_β N^{-|β|} ∂^β f(x) g_β(N x)`.

use serde::{Deserialize, Serialize};

use super::test_function::TestFunction;
use crate::error::{Error, Result};
use crate::gk::{g_float_table, horner};
use crate::poly::{rational_to_f64, FloatPolynomial};
use crate::quadrature::{integrate_orthant, MAX_TENSOR_DIM};
use crate::report::{loglog_slope, AsymptoticReport};
use crate::special::log_gamma_unchecked;
use crate::summation::{compensated_sum, NeumaierSum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
    Series,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::ClosedForm => "closed_form",
            Method::Quadrature => "quadrature",
            Method::Series => "series",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformResult {
    pub value: f64,
    pub method: Method,
    pub series_order: Option<usize>,
    /// `Σ_i (ln Γ(N x_i + 1) - (N x_i + 1) ln N)`.
    pub log_denominator: f64,
    /// Series only: the signed sum of each layer `|β| = j`, indexed by `j`.
    pub layers: Vec<f64>,
}

fn check_exponents(x: &[f64], n: f64) -> Result<()> {
    if !(n > 0.0) {
        return Err(Error::Domain(format!("N must be positive, got {n}")));
    }
    for (i, &xi) in x.iter().enumerate() {
        if !(n * xi > -1.0) {
            return Err(Error::Divergent { index: i, value: n * xi });
        }
    }
    Ok(())
}

fn check_dim(f: &TestFunction, x: &[f64]) -> Result<()> {
    if f.dim() != x.len() {
        return Err(Error::Domain(format!(
            "function of {} variables evaluated at a point of dimension {}",
            f.dim(),
            x.len()
        )));
    }
    Ok(())
}

/// `ln Π_i Γ(N x_i + 1) / N^{N x_i + 1}`, the log of the normalising integral.
pub fn denominator_log(x: &[f64], n: f64) -> Result<f64> {
    check_exponents(x, n)?;
    Ok(x.iter().map(|&xi| log_gamma_unchecked(n * xi + 1.0) - (n * xi + 1.0) * n.ln()).sum())
}

/// `A_N f(x)` by the cheapest exact route: Γ-ratio closed forms for
/// polynomial and exponential data, tensor Gauss–Laguerre otherwise.
pub fn transform_numeric(f: &TestFunction, x: &[f64], n: f64) -> Result<TransformResult> {
    check_dim(f, x)?;
    let log_denominator = denominator_log(x, n)?;
    match closed_form(f, x, n) {
        Some(value) => Ok(TransformResult {
            value,
            method: Method::ClosedForm,
            series_order: None,
            log_denominator,
            layers: Vec::new(),
        }),
        None => transform_quadrature(f, x, n),
    }
}

/// `A_N f(x)` by quadrature regardless of the function family.
pub fn transform_quadrature(f: &TestFunction, x: &[f64], n: f64) -> Result<TransformResult> {
    check_dim(f, x)?;
    let log_denominator = denominator_log(x, n)?;
    if x.len() > MAX_TENSOR_DIM {
        return Err(Error::UnsupportedDimension { dim: x.len(), max: MAX_TENSOR_DIM });
    }
    let exponents: Vec<f64> = x.iter().map(|&xi| n * xi).collect();
    let integral = integrate_orthant(|y| f.evaluate(y), &exponents, n)?;
    // the normalising integral is exactly e^{log_scale}, so the ratio is the mean
    Ok(TransformResult {
        value: integral.mean,
        method: Method::Quadrature,
        series_order: None,
        log_denominator,
        layers: Vec::new(),
    })
}

/// Closed forms: `y^m ↦ Π_i Π_{j=1}^{m_i} (x_i + j/N)` and
/// `e^{⟨λ,y⟩} ↦ Π_i (N/(N-λ_i))^{N x_i + 1}`.
pub fn closed_form(f: &TestFunction, x: &[f64], n: f64) -> Option<f64> {
    match f {
        TestFunction::Polynomial(p) => Some(compensated_sum(p.terms().map(|(e, c)| {
            let mut v = rational_to_f64(c);
            for (&xi, &m) in x.iter().zip(e) {
                for j in 1..=m {
                    v *= xi + j as f64 / n;
                }
            }
            v
        }))),
        TestFunction::ExponentialMix { terms, .. } => Some(compensated_sum(terms.iter().map(|t| {
            let log: f64 = t.lambda.iter().zip(x).map(|(&l, &xi)| -(n * xi + 1.0) * (-l / n).ln_1p()).sum();
            t.c * log.exp()
        }))),
        _ => None,
    }
}

/// Precomputed data for evaluating the truncated series many times.
#[derive(Debug, Clone)]
pub struct SeriesExpansion {
    f: TestFunction,
    order: usize,
    /// Multi-indices grouped by total order `|β|`.
    layers: Vec<Vec<Vec<u32>>>,
    /// Exact derivatives of polynomial data, aligned with `layers`.
    poly_derivatives: Option<Vec<Vec<FloatPolynomial>>>,
    g_table: Vec<Vec<f64>>,
}

/// All multi-indices of dimension `d` with `|β| = total`, lexicographic.
pub fn multi_indices(d: usize, total: u32) -> Vec<Vec<u32>> {
    if d == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=total).rev() {
        for mut rest in multi_indices(d - 1, total - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

impl SeriesExpansion {
    pub fn new(f: &TestFunction, order: usize) -> Result<Self> {
        if let Some(max) = f.max_derivative_order() {
            if order > max {
                return Err(Error::DerivativeCapability { requested: order, available: max });
            }
        }
        let d = f.dim();
        let layers: Vec<Vec<Vec<u32>>> = (0..=order as u32).map(|j| multi_indices(d, j)).collect();
        let poly_derivatives = match f {
            TestFunction::Polynomial(p) => {
                Some(layers.iter().map(|layer| layer.iter().map(|b| p.partial(b).to_f64()).collect()).collect())
            }
            _ => None,
        };
        Ok(Self { f: f.clone(), order, layers, poly_derivatives, g_table: g_float_table(order as u32) })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.f.dim()
    }

    /// Series value and per-layer sums, without the interior-point check.
    ///
    /// The expression is smooth in `x` on all of `R^d`, which lets callers
    /// difference it across polytope boundaries.
    pub fn evaluate(&self, x: &[f64], n: f64) -> Result<(f64, Vec<f64>)> {
        let mut layer_sums = vec![0.0; self.order + 1];
        for j in (0..=self.order).rev() {
            let scale = n.powi(-(j as i32));
            let mut acc = NeumaierSum::new();
            for (idx, beta) in self.layers[j].iter().enumerate() {
                let g: f64 = beta.iter().zip(x).map(|(&b, &xi)| horner(&self.g_table[b as usize], n * xi)).product();
                if g == 0.0 {
                    continue;
                }
                let deriv = match &self.poly_derivatives {
                    Some(p) => p[j][idx].evaluate(x),
                    None => self.f.partial(beta, x)?,
                };
                acc.add(scale * deriv * g);
            }
            layer_sums[j] = acc.value();
        }
        let total = compensated_sum(layer_sums.iter().rev().copied());
        Ok((total, layer_sums))
    }
}

/// The asymptotic series truncated at `|β| ≤ order`, at an interior point.
pub fn transform_series(f: &TestFunction, x: &[f64], n: f64, order: usize) -> Result<TransformResult> {
    check_dim(f, x)?;
    if let Some(i) = x.iter().position(|&xi| !(xi > 0.0)) {
        return Err(Error::Domain(format!("the series expansion needs an interior point; x[{i}] = {}", x[i])));
    }
    let log_denominator = denominator_log(x, n)?;
    let (value, layers) = SeriesExpansion::new(f, order)?.evaluate(x, n)?;
    Ok(TransformResult { value, method: Method::Series, series_order: Some(order), log_denominator, layers })
}

/// Outcome of fitting the truncation error against `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalOrder {
    pub order: usize,
    /// One row per `N`: exact = quadrature/closed form, predicted = series.
    pub rows: Vec<AsymptoticReport>,
    /// Least-squares slope of `ln |error|` against `ln N`; `None` when exact.
    pub slope: Option<f64>,
    pub exact: bool,
}

/// Errors at or below this level are rounding noise, not truncation error.
pub const EXACTNESS_THRESHOLD: f64 = 1e-13;

/// Measures how fast the truncated series approaches the transform.
pub fn empirical_order(f: &TestFunction, x: &[f64], n_list: &[f64], order: usize) -> Result<EmpiricalOrder> {
    if n_list.len() < 4 {
        return Err(Error::Domain("an order study needs at least 4 values of N".into()));
    }
    if n_list.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("N values must be strictly increasing".into()));
    }
    if n_list[n_list.len() - 1] < 10.0 * n_list[0] {
        return Err(Error::Domain("N values must span at least one decade".into()));
    }
    check_dim(f, x)?;
    let expansion = SeriesExpansion::new(f, order)?;
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let exact = transform_numeric(f, x, n)?.value;
        let (series, _) = expansion.evaluate(x, n)?;
        rows.push(AsymptoticReport::new(n, exact, series));
    }
    let errors: Vec<f64> = rows.iter().map(AsymptoticReport::abs_error).collect();
    if errors.iter().any(|&e| e <= EXACTNESS_THRESHOLD) {
        return Ok(EmpiricalOrder { order, rows, slope: None, exact: true });
    }
    let slope = loglog_slope(n_list, &errors);
    for r in &mut rows {
        r.fitted_slope = slope;
    }
    Ok(EmpiricalOrder { order, rows, slope, exact: false })
}
