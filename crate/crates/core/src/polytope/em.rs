//! Riemann sums over dilated lattice polytopes and their Euler–Maclaurin
//! expansion `τ(N⁻¹ ∂/∂h) ∫_{P_h} f |_{h=0}` with `τ(w) = Π w_i/(1 - e^{-w_i})`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::hpolytope::HPolytope;
use super::integrate::PolytopeIntegrator;
use super::linalg::{solve, Q};
use crate::error::{Error, Result};
use crate::mellin::{multi_indices, TestFunction};
use crate::poly::rational_to_f64;
use crate::report::AsymptoticReport;
use crate::special::todd_coefficients;
use crate::summation::{compensated_sum, NeumaierSum};

/// Highest truncation order of the τ expansion.
pub const MAX_EM_ORDER: usize = 4;

/// Finite-difference stencils use the nodes `-4δ, …, 4δ`.
pub const STENCIL_HALF_WIDTH: i32 = 4;

/// `δ = (smallest positive vertex-facet slack) / STEP_DIVISOR`.
pub const STEP_DIVISOR: f64 = 32.0;

/// `N^{-n} Σ_{k ∈ Z^n ∩ N P} f(k/N)`.
pub fn riemann_sum(f: &TestFunction, p: &HPolytope, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("dilation N must be positive".into()));
    }
    if f.dim() != p.dim() {
        return Err(Error::Domain(format!("function of {} variables on a polytope of dimension {}", f.dim(), p.dim())));
    }
    let nf = n as f64;
    let points = p.lattice_points(n)?;
    let values: Vec<f64> = points
        .par_iter()
        .map(|k| {
            let y: Vec<f64> = k.iter().map(|&c| c as f64 / nf).collect();
            f.evaluate(&y)
        })
        .collect();
    Ok(compensated_sum(values) / nf.powi(p.dim() as i32))
}

/// Weights `c[k][j]` of the `k`-th derivative at `x0` on the given nodes.
pub fn fornberg_weights(max_order: usize, nodes: &[f64], x0: f64) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// The N-independent part of the expansion: `layers[j]` collects every
/// `Π b_{γ_i} ∂^γ_h ∫_{P_h} f` with `|γ| = j`.
#[derive(Debug, Clone, Serialize)]
pub struct EmExpansion {
    pub order: usize,
    pub step: f64,
    pub layers: Vec<f64>,
    pub integrals_evaluated: usize,
}

impl EmExpansion {
    pub fn new(f: &TestFunction, p: &HPolytope, order: usize) -> Result<Self> {
        Self::with_step(f, p, order, p.min_slack() / STEP_DIVISOR)
    }

    /// As [`EmExpansion::new`] with an explicit finite-difference step.
    pub fn with_step(f: &TestFunction, p: &HPolytope, order: usize, step: f64) -> Result<Self> {
        if !(step > 0.0) || STENCIL_HALF_WIDTH as f64 * step * order as f64 >= p.min_slack() {
            return Err(Error::Domain(format!("finite-difference step {step} is too large for this polytope")));
        }
        if order > MAX_EM_ORDER {
            return Err(Error::Unsupported(format!(
                "Euler–Maclaurin order {order} exceeds the supported maximum {MAX_EM_ORDER}"
            )));
        }
        if !p.is_lattice() {
            return Err(Error::Geometry("the Euler–Maclaurin expansion needs a lattice polytope".into()));
        }
        let integrator = PolytopeIntegrator::new(f, p)?;
        let r = p.facets().len();
        let todd = todd_coefficients(order).to_f64();
        let nodes: Vec<f64> = (-STENCIL_HALF_WIDTH..=STENCIL_HALF_WIDTH).map(f64::from).collect();
        let stencil = fornberg_weights(order, &nodes, 0.0);

        // (γ, coefficient, [(offsets, weight)]) for every nonzero term
        let mut terms: Vec<(usize, f64, Vec<(Vec<i32>, f64)>)> = Vec::new();
        for j in 0..=order {
            for gamma in multi_indices(r, j as u32) {
                let coeff: f64 = gamma.iter().map(|&g| todd[g as usize]).product();
                if coeff == 0.0 {
                    continue;
                }
                let mut points: Vec<(Vec<i32>, f64)> = vec![(vec![0; r], 1.0)];
                for (i, &g) in gamma.iter().enumerate() {
                    if g == 0 {
                        continue;
                    }
                    let w = &stencil[g as usize];
                    let wmax = w.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                    let mut next = Vec::new();
                    for (offsets, weight) in &points {
                        for (k, &wk) in w.iter().enumerate() {
                            if wk.abs() <= 1e-13 * wmax {
                                continue;
                            }
                            let mut o = offsets.clone();
                            o[i] = k as i32 - STENCIL_HALF_WIDTH;
                            next.push((o, weight * wk));
                        }
                    }
                    points = next;
                }
                terms.push((j, coeff, points));
            }
        }

        let mut needed: BTreeMap<Vec<i32>, f64> = BTreeMap::new();
        for (_, _, points) in &terms {
            for (o, _) in points {
                needed.insert(o.clone(), 0.0);
            }
        }
        let keys: Vec<Vec<i32>> = needed.keys().cloned().collect();
        let values: Vec<f64> = keys
            .par_iter()
            .map(|o| {
                let h: Vec<f64> = o.iter().map(|&k| k as f64 * step).collect();
                integrator.integrate(&h)
            })
            .collect::<Result<_>>()?;
        for (k, v) in keys.into_iter().zip(values) {
            needed.insert(k, v);
        }

        let mut sums = vec![NeumaierSum::new(); order + 1];
        for (j, coeff, points) in &terms {
            let mut d = NeumaierSum::new();
            for (o, w) in points {
                d.add(w * needed[o]);
            }
            sums[*j].add(coeff * d.value() / step.powi(*j as i32));
        }
        Ok(Self {
            order,
            step,
            layers: sums.iter().map(NeumaierSum::value).collect(),
            integrals_evaluated: needed.len(),
        })
    }

    /// `Σ_j N^{-j} layers[j]`, summed from the smallest layer up.
    pub fn evaluate(&self, n: f64) -> f64 {
        compensated_sum(self.layers.iter().enumerate().rev().map(|(j, l)| l * n.powi(-(j as i32))))
    }
}

/// The Euler–Maclaurin corrected approximation to [`riemann_sum`].
pub fn euler_maclaurin_sum(f: &TestFunction, p: &HPolytope, n: u64, order: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("dilation N must be positive".into()));
    }
    Ok(EmExpansion::new(f, p, order)?.evaluate(n as f64))
}

/// Lattice-point counts fitted by an exact degree-`n` polynomial on the
/// first `n + 1` dilations and checked on the rest.
#[derive(Debug, Clone, Serialize)]
pub struct EhrhartCheck {
    /// Ascending coefficients as `"p/q"` strings.
    pub coefficients: Vec<String>,
    /// exact = count, predicted = interpolating polynomial.
    pub rows: Vec<AsymptoticReport>,
    pub consistent: bool,
    #[serde(skip)]
    exact_coefficients: Vec<BigRational>,
}

impl EhrhartCheck {
    pub fn exact_coefficients(&self) -> &[BigRational] {
        &self.exact_coefficients
    }

    /// The leading coefficient, which is the volume of the polytope.
    pub fn leading(&self) -> f64 {
        rational_to_f64(self.exact_coefficients.last().expect("at least one coefficient"))
    }
}

pub fn ehrhart_check(p: &HPolytope, n_list: &[u64]) -> Result<EhrhartCheck> {
    let n = p.dim();
    if !p.is_lattice() {
        return Err(Error::Geometry("Ehrhart polynomials need a lattice polytope".into()));
    }
    if n_list.len() < n + 2 {
        return Err(Error::Domain(format!(
            "need at least {} dilations to fit and verify a degree-{n} polynomial",
            n + 2
        )));
    }
    let mut sorted = n_list.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) || sorted[0] == 0 {
        return Err(Error::Domain("dilations must be distinct and positive".into()));
    }
    let counts: Vec<usize> = n_list.iter().map(|&m| p.lattice_points(m).map(|v| v.len())).collect::<Result<_>>()?;
    let q = |v: u64| Q::from_integer(BigInt::from(v));
    let vandermonde: Vec<Vec<Q>> =
        n_list[..=n].iter().map(|&m| (0..=n).map(|e| num_traits::pow(q(m), e)).collect()).collect();
    let rhs: Vec<Q> = counts[..=n].iter().map(|&c| q(c as u64)).collect();
    let coeffs = solve(&vandermonde, &rhs).expect("distinct nodes give an invertible Vandermonde matrix");
    let eval = |m: u64| coeffs.iter().rev().fold(Q::zero(), |acc, c| acc * q(m) + c);
    let mut consistent = true;
    let rows = n_list
        .iter()
        .zip(&counts)
        .map(|(&m, &c)| {
            let predicted = eval(m);
            if predicted != q(c as u64) {
                consistent = false;
            }
            AsymptoticReport::new(m as f64, c as f64, predicted.to_f64().unwrap_or(f64::NAN))
        })
        .collect();
    Ok(EhrhartCheck {
        coefficients: coeffs
            .iter()
            .map(|c| if c.is_integer() { c.to_integer().to_string() } else { c.to_string() })
            .collect(),
        rows,
        consistent,
        exact_coefficients: coeffs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn riemann_examples() {
        let interval = HPolytope::cube(1);
        assert_relative_eq!(
            riemann_sum(&TestFunction::constant(1, 1), &interval, 10).unwrap(),
            1.1,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            riemann_sum(&TestFunction::coordinate(1, 0), &interval, 10).unwrap(),
            0.55,
            max_relative = 1e-15
        );
        let square = HPolytope::cube(2);
        assert_relative_eq!(
            riemann_sum(&TestFunction::constant(2, 1), &square, 5).unwrap(),
            36.0 / 25.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn fornberg_matches_textbook_stencils() {
        let w = fornberg_weights(2, &[-1.0, 0.0, 1.0], 0.0);
        assert_eq!(w[1], vec![-0.5, 0.0, 0.5]);
        assert_eq!(w[2], vec![1.0, -2.0, 1.0]);
        let w5 = fornberg_weights(4, &[-2.0, -1.0, 0.0, 1.0, 2.0], 0.0);
        for (a, b) in w5[4].iter().zip([1.0, -4.0, 6.0, -4.0, 1.0]) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn em_examples() {
        let interval = HPolytope::cube(1);
        let one = TestFunction::constant(1, 1);
        assert_relative_eq!(euler_maclaurin_sum(&one, &interval, 10, 1).unwrap(), 1.1, max_relative = 1e-12);
        let x = TestFunction::coordinate(1, 0);
        assert_relative_eq!(euler_maclaurin_sum(&x, &interval, 10, 2).unwrap(), 0.55, max_relative = 1e-12);
        let tri = HPolytope::standard_simplex(2);
        let v = euler_maclaurin_sum(&TestFunction::constant(2, 1), &tri, 4, 2).unwrap();
        assert!((v - 0.9375).abs() < 1e-9);
    }

    #[test]
    fn em_rejects_rational_polytopes_and_high_order() {
        let half =
            HPolytope::from_json(r#"{"n": 1, "facets": [{"u": [-1], "c": "0"}, {"u": [1], "c": "1/2"}]}"#).unwrap();
        assert!(euler_maclaurin_sum(&TestFunction::constant(1, 1), &half, 4, 1).is_err());
        assert!(euler_maclaurin_sum(&TestFunction::constant(1, 1), &HPolytope::cube(1), 4, 5).is_err());
    }

    #[test]
    fn ehrhart_examples() {
        let ns = [1, 2, 3, 5, 8];
        let c = ehrhart_check(&HPolytope::cube(1), &ns).unwrap();
        assert!(c.consistent);
        assert_eq!(c.coefficients, vec!["1", "1"]);
        let c = ehrhart_check(&HPolytope::cube(2), &ns).unwrap();
        assert_eq!(c.coefficients, vec!["1", "2", "1"]);
        let c = ehrhart_check(&HPolytope::standard_simplex(2), &ns).unwrap();
        assert_eq!(c.coefficients, vec!["1", "3/2", "1/2"]);
        assert!(c.consistent);
    }
}
