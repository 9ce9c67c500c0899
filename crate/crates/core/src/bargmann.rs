//! Monomial states `z^k` in the Bargmann space with weight `e^{-N|z|²}`,
//! their expectations, and the spectral measure
//! `ν_N(f) = Σ_{Σ q_i k_i = N α} A_N f(k/N)`.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mellin::{transform_numeric, SeriesExpansion, TestFunction};
use crate::polytope::{EmExpansion, HPolytope, MAX_EM_ORDER};
use crate::quadrature::{gauss_legendre_unit, UnitIntervalRule, MAX_TENSOR_DIM};
use crate::special::log_gamma_unchecked;
use crate::summation::{compensated_sum, NeumaierSum};

/// Scalar weights: the states spanning level `N` are the `z^k` with
/// `Σ q_i k_i = N · alpha`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "WeightDataSpec", into = "WeightDataSpec")]
pub struct WeightData {
    q: Vec<u64>,
    alpha: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightDataSpec {
    d: usize,
    q: Vec<u64>,
    alpha: u64,
}

impl WeightData {
    pub fn new(q: Vec<u64>, alpha: u64) -> Result<Self> {
        if q.is_empty() {
            return Err(Error::Domain("weight data needs at least one coordinate".into()));
        }
        if q.contains(&0) || alpha == 0 {
            return Err(Error::Domain(format!(
                "weights and alpha must be positive integers, got q = {q:?}, alpha = {alpha}"
            )));
        }
        Ok(Self { q, alpha })
    }

    /// `q = (1, …, 1)`.
    pub fn unit(d: usize, alpha: u64) -> Result<Self> {
        Self::new(vec![1; d], alpha)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn q(&self) -> &[u64] {
        &self.q
    }

    pub fn alpha(&self) -> u64 {
        self.alpha
    }

    pub fn is_unit(&self) -> bool {
        self.q.iter().all(|&w| w == 1)
    }
}

impl TryFrom<WeightDataSpec> for WeightData {
    type Error = Error;

    fn try_from(spec: WeightDataSpec) -> Result<Self> {
        if spec.d != spec.q.len() {
            return Err(Error::Domain(format!("d = {} but {} weights were given", spec.d, spec.q.len())));
        }
        WeightData::new(spec.q, spec.alpha)
    }
}

impl From<WeightData> for WeightDataSpec {
    fn from(w: WeightData) -> Self {
        WeightDataSpec { d: w.q.len(), q: w.q, alpha: w.alpha }
    }
}

/// `ln ‖z^k‖²_N = d ln(π/N) + Σ (ln k_i! - k_i ln N)`.
pub fn norm_squared_log(n: u64, k: &[u64]) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("N must be positive".into()));
    }
    let ln_n = (n as f64).ln();
    let d = k.len() as f64;
    Ok(d * (std::f64::consts::PI.ln() - ln_n)
        + k.iter().map(|&ki| log_gamma_unchecked(ki as f64 + 1.0) - ki as f64 * ln_n).sum::<f64>())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BargmannState {
    pub n: u64,
    pub k: Vec<u64>,
    pub log_norm_sq: f64,
}

impl BargmannState {
    pub fn new(n: u64, k: Vec<u64>) -> Result<Self> {
        let log_norm_sq = norm_squared_log(n, &k)?;
        Ok(Self { n, k, log_norm_sq })
    }

    /// `|z^k|² e^{-N|z|²} / ‖z^k‖²`, a probability density on `C^d`.
    pub fn density(&self, z: &[Complex64]) -> Result<f64> {
        Ok(self.log_density(z)?.exp())
    }

    /// Log of [`BargmannState::density`]; `-inf` on the zero set of `z^k`.
    pub fn log_density(&self, z: &[Complex64]) -> Result<f64> {
        if z.len() != self.k.len() {
            return Err(Error::Domain(format!(
                "state of dimension {} evaluated at a point of dimension {}",
                self.k.len(),
                z.len()
            )));
        }
        let nf = self.n as f64;
        let mut log = -self.log_norm_sq;
        for (&ki, zi) in self.k.iter().zip(z) {
            let r = zi.norm_sqr();
            if ki > 0 {
                if r == 0.0 {
                    return Ok(f64::NEG_INFINITY);
                }
                log += ki as f64 * r.ln();
            }
            log -= nf * r;
        }
        Ok(log)
    }
}

pub fn state_density(n: u64, k: &[u64], z: &[Complex64]) -> Result<f64> {
    BargmannState::new(n, k.to_vec())?.density(z)
}

/// Panels and nodes per panel of the per-state radial rule.
const RADIAL_PANELS: usize = 64;
const RADIAL_NODES: usize = 20;
/// The radial window spans this many standard deviations beyond the mean.
const RADIAL_WINDOW: f64 = 40.0;

/// Nodes and normalised weights for the radial law `r^k e^{-N r}` of one
/// coordinate: composite Gauss–Legendre on a window around the mean.
fn radial_rule(n: f64, k: u64, panel: &UnitIntervalRule) -> (Vec<f64>, Vec<f64>) {
    let kf = k as f64;
    let mean = (kf + 1.0) / n;
    let sd = (kf + 1.0).sqrt() / n;
    let lo = (mean - RADIAL_WINDOW * sd).max(0.0);
    let hi = mean + RADIAL_WINDOW * sd;
    let width = (hi - lo) / RADIAL_PANELS as f64;
    let log_norm = (kf + 1.0) * n.ln() - log_gamma_unchecked(kf + 1.0);
    let mut nodes = Vec::with_capacity(RADIAL_PANELS * RADIAL_NODES);
    let mut weights = Vec::with_capacity(RADIAL_PANELS * RADIAL_NODES);
    for p in 0..RADIAL_PANELS {
        let a = lo + p as f64 * width;
        for (&t, &w) in panel.nodes.iter().zip(&panel.weights) {
            let r = a + t * width;
            let log_density = if k == 0 { 0.0 } else { kf * r.ln() } - n * r + log_norm;
            nodes.push(r);
            weights.push(w * width * log_density.exp());
        }
    }
    // nodes this far into the tails cannot move a normalised sum
    let wmax = weights.iter().fold(0.0f64, |m, &w| m.max(w));
    let keep: Vec<bool> = weights.iter().map(|&w| w > 1e-20 * wmax).collect();
    let mut it = keep.iter();
    nodes.retain(|_| *it.next().expect("same length"));
    let mut it = keep.iter();
    weights.retain(|_| *it.next().expect("same length"));
    (nodes, weights)
}

/// `∫ Π r_i^{k_i} e^{-N r_i} f(r) dr / ∫ Π r_i^{k_i} e^{-N r_i} dr`, the
/// expectation of `f(|z_1|², …, |z_d|²)` in the state `z^k`.
pub fn state_expectation(f: &TestFunction, n: u64, k: &[u64]) -> Result<f64> {
    let d = k.len();
    if f.dim() != d {
        return Err(Error::Domain(format!("function of {} variables for a state of dimension {d}", f.dim())));
    }
    if d == 0 || d > MAX_TENSOR_DIM {
        return Err(Error::UnsupportedDimension { dim: d, max: MAX_TENSOR_DIM });
    }
    if n == 0 {
        return Err(Error::Domain("N must be positive".into()));
    }
    let panel = gauss_legendre_unit(RADIAL_NODES)?;
    let rules: Vec<(Vec<f64>, Vec<f64>)> = k.iter().map(|&ki| radial_rule(n as f64, ki, &panel)).collect();
    let mut num = NeumaierSum::new();
    let mut den = NeumaierSum::new();
    let mut idx = vec![0usize; d];
    let mut r = vec![0.0; d];
    loop {
        let mut w = 1.0;
        for (j, (nodes, weights)) in rules.iter().enumerate() {
            r[j] = nodes[idx[j]];
            w *= weights[idx[j]];
        }
        if w > 0.0 {
            num.add(w * f.evaluate(&r));
            den.add(w);
        }
        let mut j = d;
        loop {
            if j == 0 {
                return Ok(num.value() / den.value());
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < rules[j].0.len() {
                break;
            }
            idx[j] = 0;
        }
    }
}

/// All `k ∈ Z_+^d` with `Σ q_i k_i = N α`, lexicographically sorted.
pub fn weight_lattice_points(w: &WeightData, n: u64) -> Vec<Vec<u64>> {
    fn rec(q: &[u64], remaining: u64, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        let i = prefix.len();
        if i + 1 == q.len() {
            if remaining % q[i] == 0 {
                prefix.push(remaining / q[i]);
                out.push(prefix.clone());
                prefix.pop();
            }
            return;
        }
        for ki in 0..=remaining / q[i] {
            prefix.push(ki);
            rec(q, remaining - ki * q[i], prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&w.q, n * w.alpha, &mut Vec::with_capacity(w.q.len()), &mut out);
    out
}

fn check_level(f: &TestFunction, w: &WeightData, n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("N must be positive".into()));
    }
    if f.dim() != w.dim() {
        return Err(Error::Domain(format!("function of {} variables for weights of dimension {}", f.dim(), w.dim())));
    }
    Ok(())
}

/// `ν_N(f)`: the transform at every lattice point, summed in sorted order.
pub fn spectral_measure(f: &TestFunction, w: &WeightData, n: u64) -> Result<f64> {
    check_level(f, w, n)?;
    let nf = n as f64;
    let terms: Vec<f64> = weight_lattice_points(w, n)
        .par_iter()
        .map(|k| {
            let x: Vec<f64> = k.iter().map(|&ki| ki as f64 / nf).collect();
            transform_numeric(f, &x, nf).map(|r| r.value)
        })
        .collect::<Result<_>>()?;
    Ok(compensated_sum(terms))
}

/// `ν_N(f)` as the trace of state expectations, each from its own radial
/// quadrature.
pub fn spectral_measure_by_states(f: &TestFunction, w: &WeightData, n: u64) -> Result<f64> {
    check_level(f, w, n)?;
    let terms: Vec<f64> =
        weight_lattice_points(w, n).par_iter().map(|k| state_expectation(f, n, k)).collect::<Result<_>>()?;
    Ok(compensated_sum(terms))
}

/// `ν_N(f)` from the Euler–Maclaurin expansion of the lattice sum over the
/// slice `Σ x_i = α`, written over the simplex `{x' ≥ 0, Σ x' ≤ α}` in the
/// first `d - 1` coordinates with summand the order-`M` series of `A_N f`.
pub fn spectral_measure_em(f: &TestFunction, w: &WeightData, n: u64, order: usize) -> Result<f64> {
    check_level(f, w, n)?;
    if !w.is_unit() {
        return Err(Error::Unsupported("the Euler–Maclaurin estimate is defined for unit weights only".into()));
    }
    if order > MAX_EM_ORDER {
        return Err(Error::Unsupported(format!(
            "Euler–Maclaurin order {order} exceeds the supported maximum {MAX_EM_ORDER}"
        )));
    }
    let nf = n as f64;
    let alpha = w.alpha() as f64;
    let d = w.dim();
    if d == 1 {
        return Ok(transform_numeric(f, &[alpha], nf)?.value);
    }
    let series = Arc::new(SeriesExpansion::new(f, order)?);
    let inner = {
        let series = Arc::clone(&series);
        TestFunction::numeric(d - 1, move |xp: &[f64]| {
            let mut x = xp.to_vec();
            x.push(alpha - xp.iter().sum::<f64>());
            series.evaluate(&x, nf).map_or(f64::NAN, |(v, _)| v)
        })
    };
    let slice = HPolytope::simplex(d - 1, w.alpha() as i64)?;
    let em = EmExpansion::new(&inner, &slice, order)?;
    let value = em.evaluate(nf) * nf.powi(d as i32 - 1);
    if !value.is_finite() {
        return Err(Error::Domain("series evaluation failed inside the Euler–Maclaurin sum".into()));
    }
    Ok(value)
}
