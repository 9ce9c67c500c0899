//! Superlevel sets `{z ∈ C^d : density_{N,k}(z) ≥ t}` and their exact volumes.
//!
//! With `r_i = |z_i|²` each complex coordinate contributes `π dr_i`, so the
//! volume is `π^d` times an `r`-space volume. Writing `r_i = a_i (1 + u_i)`
//! for `k_i > 0`, the condition becomes
//!
//! ```text
//! Σ_{k_i>0} k_i ψ(u_i) + N Σ_{k_i=0} r_i ≤ D,   ψ(u) = u - ln(1+u),
//! ```
//!
//! where `D` is the log of the maximal density over `t`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::bargmann::norm_squared_log;
use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre_unit, monte_carlo_volume, UnitIntervalRule, DEFAULT_SEED};
use crate::special::log_factorial_excess;

/// `ψ(u) = u - ln(1 + u)` for `u > -1`, without cancellation near 0.
pub fn psi(u: f64) -> f64 {
    if u.abs() < 0.1 {
        // Σ_{m≥2} (-u)^m / m
        let mut term = u * u;
        let mut acc = 0.0;
        for m in 2..40 {
            let t = term / m as f64;
            acc += if m % 2 == 0 { t } else { -t };
            term *= u;
            if t.abs() < 1e-18 * acc.abs() {
                break;
            }
        }
        acc
    } else {
        u - u.ln_1p()
    }
}

/// Which solution of `ψ(u) = y` to return.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `-1 < u ≤ 0`.
    Lower,
    /// `u ≥ 0`.
    Upper,
}

const BISECTION_REL_TOL: f64 = 1e-13;

/// Solves `ψ(u) = y` on one branch by bisection.
pub fn psi_inverse(y: f64, branch: Branch) -> f64 {
    if !(y > 0.0) {
        return 0.0;
    }
    let (mut lo, mut hi) = match branch {
        Branch::Lower => (-1.0, 0.0),
        Branch::Upper => {
            let mut hi = (2.0 * y).sqrt().max(1.0);
            while psi(hi) < y {
                hi *= 2.0;
            }
            (0.0, hi)
        }
    };
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi || hi - lo <= BISECTION_REL_TOL * mid.abs() * 1e-2 {
            break;
        }
        let below = psi(mid) < y;
        match (branch, below) {
            (Branch::Upper, true) | (Branch::Lower, false) => lo = mid,
            _ => hi = mid,
        }
    }
    0.5 * (lo + hi)
}

/// The data of one superlevel-set problem. Coordinates are reordered so
/// that the `l` strictly positive exponents come first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSetProblem {
    pub n: u64,
    /// Exponents with the positive ones first.
    pub k: Vec<u64>,
    /// `permutation[i]` is the original index of reordered coordinate `i`.
    pub permutation: Vec<usize>,
    pub l: usize,
    /// `a_i = k_i / N`, reordered.
    pub a: Vec<f64>,
    pub log_t: f64,
    /// `ln ‖z^k‖² + ln t`: the region is `Σ k_i ln r_i - N Σ r_i ≥ threshold_log`.
    pub threshold_log: f64,
    /// `d ln(N/π) - Σ (ln k_i! - k_i ln k_i + k_i)`, attained at `r = a`.
    pub log_max_density: f64,
}

impl LevelSetProblem {
    pub fn new(n: u64, k: &[u64], log_t: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("N must be positive".into()));
        }
        if k.is_empty() {
            return Err(Error::Domain("k must have at least one component".into()));
        }
        if !log_t.is_finite() {
            return Err(Error::Domain(format!("log t must be finite, got {log_t}")));
        }
        let mut permutation: Vec<usize> = (0..k.len()).filter(|&i| k[i] > 0).collect();
        let l = permutation.len();
        permutation.extend((0..k.len()).filter(|&i| k[i] == 0));
        let k: Vec<u64> = permutation.iter().map(|&i| k[i]).collect();
        let nf = n as f64;
        let d = k.len() as f64;
        let log_max_density =
            d * (nf.ln() - PI.ln()) - k.iter().map(|&ki| log_factorial_excess(ki as f64)).sum::<f64>();
        Ok(Self {
            n,
            a: k.iter().map(|&ki| ki as f64 / nf).collect(),
            threshold_log: norm_squared_log(n, &k)? + log_t,
            log_max_density,
            k,
            permutation,
            l,
            log_t,
        })
    }

    pub fn with_t(n: u64, k: &[u64], t: f64) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("t must be positive, got {t}")));
        }
        Self::new(n, k, t.ln())
    }

    pub fn dim(&self) -> usize {
        self.k.len()
    }

    /// `D = ln(max density) - ln t`; the set is empty when negative.
    pub fn depth(&self) -> f64 {
        self.log_max_density - self.log_t
    }

    /// Whether `r` (reordered coordinates) lies in the superlevel set.
    pub fn contains_r(&self, r: &[f64]) -> bool {
        self.cost(r) <= self.depth()
    }

    /// `Σ k_i ψ(r_i/a_i - 1) + N Σ_{k_i=0} r_i`.
    pub fn cost(&self, r: &[f64]) -> f64 {
        let nf = self.n as f64;
        self.k
            .iter()
            .zip(&self.a)
            .zip(r)
            .map(|((&ki, &ai), &ri)| {
                if ki > 0 {
                    if ri <= 0.0 {
                        f64::INFINITY
                    } else {
                        ki as f64 * psi(ri / ai - 1.0)
                    }
                } else {
                    nf * ri
                }
            })
            .sum()
    }

    /// Extent of the set along each reordered `r` axis.
    pub fn bounding_box(&self) -> Vec<(f64, f64)> {
        let depth = self.depth().max(0.0);
        self.k
            .iter()
            .zip(&self.a)
            .map(|(&ki, &ai)| {
                if ki > 0 {
                    let y = depth / ki as f64;
                    (ai * (1.0 + psi_inverse(y, Branch::Lower)), ai * (1.0 + psi_inverse(y, Branch::Upper)))
                } else {
                    (0.0, depth / self.n as f64)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VolumeMethod {
    Empty,
    ClosedForm,
    Bisection,
    NestedQuadrature,
    MonteCarlo,
}

/// A superlevel-set volume in `C^d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VolumeEstimate {
    pub volume: f64,
    /// Monte Carlo standard error.
    pub stderr: Option<f64>,
    /// `|V_Q - V_{2Q}|` for nested quadrature.
    pub error_estimate: Option<f64>,
    pub method: VolumeMethod,
    /// Set when `t` exceeds the maximal density.
    pub empty: bool,
}

impl VolumeEstimate {
    fn empty() -> Self {
        Self { volume: 0.0, stderr: None, error_estimate: None, method: VolumeMethod::Empty, empty: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeOptions {
    /// Samples for dimensions above [`MAX_QUADRATURE_DIM`].
    pub samples: u64,
    pub seed: u64,
    /// Initial Gauss–Legendre order per nesting level; doubled once or twice.
    pub nodes: usize,
    pub rel_tol: f64,
}

impl Default for VolumeOptions {
    fn default() -> Self {
        Self { samples: 1 << 20, seed: DEFAULT_SEED, nodes: 32, rel_tol: 1e-10 }
    }
}

/// Largest dimension handled by nested quadrature; Monte Carlo beyond.
pub const MAX_QUADRATURE_DIM: usize = 3;

/// One nesting level: a coordinate's cost `k ψ(u)` (Jacobian `a`) or `N r`.
#[derive(Debug, Clone, Copy)]
enum Axis {
    Positive { k: f64 },
    Zero { n: f64 },
}

/// Measure of `{v : Σ_i cost_i(v_i) ≤ s}` in the `(u, r)` coordinates.
fn level_measure(axes: &[Axis], s: f64, rule: &UnitIntervalRule) -> f64 {
    if !(s > 0.0) {
        return 0.0;
    }
    let (first, rest) = axes.split_first().expect("at least one axis");
    if rest.is_empty() {
        return match *first {
            Axis::Positive { k } => psi_inverse(s / k, Branch::Upper) - psi_inverse(s / k, Branch::Lower),
            Axis::Zero { n } => s / n,
        };
    }
    // cost = s sin²θ on the first axis leaves s cos²θ for the rest
    let mut acc = 0.0;
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let theta = FRAC_PI_2 * x;
        let (sin, cos) = theta.sin_cos();
        let dcost = 2.0 * s * sin * cos;
        let inner = level_measure(rest, s * cos * cos, rule);
        let jac = match *first {
            Axis::Positive { k } => {
                let y = s * sin * sin / k;
                [Branch::Lower, Branch::Upper]
                    .iter()
                    .map(|&b| {
                        let u = psi_inverse(y, b);
                        // du/dcost = (1+u) / (k u)
                        ((1.0 + u) / (k * u)).abs()
                    })
                    .sum::<f64>()
            }
            Axis::Zero { n } => 1.0 / n,
        };
        acc += FRAC_PI_2 * w * dcost * jac * inner;
    }
    acc
}

/// `Vol{z ∈ C^d : density(z) ≥ t}`.
pub fn superlevel_volume_exact(p: &LevelSetProblem) -> Result<VolumeEstimate> {
    superlevel_volume_with(p, &VolumeOptions::default())
}

pub fn superlevel_volume_with(p: &LevelSetProblem, opts: &VolumeOptions) -> Result<VolumeEstimate> {
    let depth = p.depth();
    if depth <= 0.0 {
        return Ok(VolumeEstimate::empty());
    }
    let d = p.dim();
    let nf = p.n as f64;
    let torus = PI.powi(d as i32);
    if d == 1 {
        let (volume, method) = if p.l == 0 {
            (PI * depth / nf, VolumeMethod::ClosedForm)
        } else {
            let k = p.k[0] as f64;
            let width = psi_inverse(depth / k, Branch::Upper) - psi_inverse(depth / k, Branch::Lower);
            (PI * p.a[0] * width, VolumeMethod::Bisection)
        };
        return Ok(VolumeEstimate { volume, stderr: None, error_estimate: None, method, empty: false });
    }
    if d <= MAX_QUADRATURE_DIM {
        let axes: Vec<Axis> =
            p.k.iter().map(|&k| if k > 0 { Axis::Positive { k: k as f64 } } else { Axis::Zero { n: nf } }).collect();
        let jac: f64 = p.a[..p.l].iter().product();
        let mut nodes = opts.nodes;
        let mut prev = level_measure(&axes, depth, &gauss_legendre_unit(nodes)?);
        let mut change = f64::INFINITY;
        for _ in 0..2 {
            nodes *= 2;
            let next = level_measure(&axes, depth, &gauss_legendre_unit(nodes)?);
            change = (next - prev).abs();
            prev = next;
            if change <= opts.rel_tol * next.abs() {
                break;
            }
        }
        if change > 1e3 * opts.rel_tol * prev.abs() {
            return Err(Error::NonConvergence {
                what: "superlevel volume quadrature",
                change: change / prev.abs(),
                nodes,
            });
        }
        return Ok(VolumeEstimate {
            volume: torus * jac * prev,
            stderr: None,
            error_estimate: Some(torus * jac * change),
            method: VolumeMethod::NestedQuadrature,
            empty: false,
        });
    }
    let mc = superlevel_volume_mc(p, opts.samples, opts.seed)?;
    Ok(mc)
}

/// Monte Carlo in the `r`-space bounding box, in any dimension.
pub fn superlevel_volume_mc(p: &LevelSetProblem, samples: u64, seed: u64) -> Result<VolumeEstimate> {
    if p.depth() <= 0.0 {
        return Ok(VolumeEstimate::empty());
    }
    let bbox = p.bounding_box();
    let est = monte_carlo_volume(|r| p.contains_r(r), &bbox, samples, seed)?;
    let torus = PI.powi(p.dim() as i32);
    Ok(VolumeEstimate {
        volume: torus * est.estimate,
        stderr: Some(torus * est.stderr),
        error_estimate: None,
        method: VolumeMethod::MonteCarlo,
        empty: false,
    })
}
