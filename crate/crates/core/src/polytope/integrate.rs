//! Integrals over perturbed polytopes `{⟨u_i, x⟩ ≤ c_i + h_i}` by
//! triangulation and collapsed-coordinate Gauss rules on each simplex.

use super::hpolytope::HPolytope;
use super::linalg::{solve_f64, subsets};
use crate::error::{Error, Result};
use crate::mellin::TestFunction;
use crate::poly::rational_to_f64;
use crate::quadrature::{gauss_jacobi_unit, UnitIntervalRule};
use crate::summation::NeumaierSum;

/// Largest dimension with a triangulation routine.
pub const MAX_INTEGRATION_DIM: usize = 3;

/// Tensor rule on the `d`-simplex through the Duffy collapse
/// `λ_j = t_j Π_{i<j} (1 - t_i)`, whose Jacobian `Π (1 - t_j)^{d-j}` is
/// absorbed into Gauss–Jacobi weights. Exact for degree `2q - 1`.
#[derive(Debug, Clone)]
pub struct SimplexRule {
    dim: usize,
    points: usize,
    axes: Vec<UnitIntervalRule>,
}

impl SimplexRule {
    pub fn new(dim: usize, points: usize) -> Result<Self> {
        let axes = (1..=dim).map(|j| gauss_jacobi_unit(points, (dim - j) as f64)).collect::<Result<_>>()?;
        Ok(Self { dim, points, axes })
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// `∫_S f` and `∫_S |f|` over the simplex with the given `d + 1` vertices.
    pub fn integrate<F: Fn(&[f64]) -> f64>(&self, verts: &[Vec<f64>], f: &F) -> (f64, f64) {
        let d = self.dim;
        let edges: Vec<Vec<f64>> =
            verts[1..].iter().map(|v| v.iter().zip(&verts[0]).map(|(a, b)| a - b).collect()).collect();
        let jac = determinant(&edges).abs();
        let q = self.points;
        let mut idx = vec![0usize; d];
        let mut x = vec![0.0; d];
        let mut sum = NeumaierSum::new();
        let mut abs = NeumaierSum::new();
        loop {
            let mut rest = 1.0;
            let mut w = 1.0;
            x.copy_from_slice(&verts[0]);
            for j in 0..d {
                let t = self.axes[j].nodes[idx[j]];
                w *= self.axes[j].weights[idx[j]];
                let lambda = rest * t;
                rest *= 1.0 - t;
                for (xi, e) in x.iter_mut().zip(&edges[j]) {
                    *xi += lambda * e;
                }
            }
            let v = f(&x);
            sum.add(w * v);
            abs.add(w * v.abs());
            let mut j = d;
            loop {
                if j == 0 {
                    return (jac * sum.value(), jac * abs.value());
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < q {
                    break;
                }
                idx[j] = 0;
            }
        }
    }
}

fn determinant(m: &[Vec<f64>]) -> f64 {
    match m.len() {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        3 => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
        n => unreachable!("determinant of a {n}x{n} matrix"),
    }
}

/// Vertices of the perturbed polytope in floating point.
pub fn perturbed_vertices(p: &HPolytope, h: &[f64]) -> Result<Vec<Vec<f64>>> {
    let n = p.dim();
    let normals: Vec<Vec<f64>> = p.facets().iter().map(|f| f.u.iter().map(|&v| v as f64).collect()).collect();
    let offsets: Vec<f64> = p.facets().iter().zip(h).map(|(f, hi)| rational_to_f64(&f.c) + hi).collect();
    let scale = offsets.iter().fold(1.0f64, |m, c| m.max(c.abs()));
    let tol = 1e-10 * scale;
    let mut out: Vec<Vec<f64>> = Vec::new();
    for subset in subsets(normals.len(), n) {
        let a: Vec<Vec<f64>> = subset.iter().map(|&i| normals[i].clone()).collect();
        let b: Vec<f64> = subset.iter().map(|&i| offsets[i]).collect();
        let Some(x) = solve_f64(&a, &b) else { continue };
        let feasible = normals.iter().zip(&offsets).all(|(u, &c)| dot(u, &x) <= c + tol);
        if feasible && !out.iter().any(|v| v.iter().zip(&x).all(|(a, b)| (a - b).abs() <= tol)) {
            out.push(x);
        }
    }
    if out.len() < n + 1 {
        return Err(Error::Geometry(format!(
            "perturbed polytope is degenerate ({} vertices in dimension {n})",
            out.len()
        )));
    }
    Ok(out)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn centroid(points: &[Vec<f64>]) -> Vec<f64> {
    let n = points[0].len();
    let mut c = vec![0.0; n];
    for p in points {
        for (ci, pi) in c.iter_mut().zip(p) {
            *ci += pi;
        }
    }
    c.iter_mut().for_each(|ci| *ci /= points.len() as f64);
    c
}

/// Orders coplanar points around their centroid given two in-plane axes.
fn sort_around(points: &mut [Vec<f64>], e1: &[f64], e2: &[f64]) {
    let c = centroid(points);
    points.sort_by(|a, b| {
        let angle = |p: &Vec<f64>| {
            let d: Vec<f64> = p.iter().zip(&c).map(|(x, y)| x - y).collect();
            dot(&d, e2).atan2(dot(&d, e1))
        };
        angle(a).total_cmp(&angle(b))
    });
}

/// Simplices covering the perturbed polytope.
pub fn triangulate(p: &HPolytope, h: &[f64]) -> Result<Vec<Vec<Vec<f64>>>> {
    let n = p.dim();
    let mut verts = perturbed_vertices(p, h)?;
    match n {
        1 => {
            let lo = verts.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
            let hi = verts.iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max);
            Ok(vec![vec![vec![lo], vec![hi]]])
        }
        2 => {
            sort_around(&mut verts, &[1.0, 0.0], &[0.0, 1.0]);
            Ok((1..verts.len() - 1).map(|i| vec![verts[0].clone(), verts[i].clone(), verts[i + 1].clone()]).collect())
        }
        3 => {
            let apex = centroid(&verts);
            let scale = verts.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
            let mut out = Vec::new();
            for (f, hi) in p.facets().iter().zip(h) {
                let u: Vec<f64> = f.u.iter().map(|&v| v as f64).collect();
                let c = rational_to_f64(&f.c) + hi;
                let mut face: Vec<Vec<f64>> =
                    verts.iter().filter(|v| (dot(&u, v) - c).abs() <= 1e-9 * scale).cloned().collect();
                if face.len() < 3 {
                    continue;
                }
                let fc = centroid(&face);
                let e1: Vec<f64> = face[0].iter().zip(&fc).map(|(a, b)| a - b).collect();
                let e2 = [u[1] * e1[2] - u[2] * e1[1], u[2] * e1[0] - u[0] * e1[2], u[0] * e1[1] - u[1] * e1[0]];
                sort_around(&mut face, &e1, &e2);
                for i in 1..face.len() - 1 {
                    out.push(vec![apex.clone(), face[0].clone(), face[i].clone(), face[i + 1].clone()]);
                }
            }
            Ok(out)
        }
        _ => Err(Error::UnsupportedDimension { dim: n, max: MAX_INTEGRATION_DIM }),
    }
}

/// Integrates one function over perturbations of one polytope with a fixed
/// rule, so that differences across perturbations carry no rule noise.
#[derive(Debug, Clone)]
pub struct PolytopeIntegrator {
    polytope: HPolytope,
    f: TestFunction,
    rule: SimplexRule,
}

const ADAPTIVE_ORDERS: [usize; 4] = [8, 16, 32, 64];
const ADAPTIVE_TOL: f64 = 1e-13;

impl PolytopeIntegrator {
    /// Polynomials get the smallest exact rule; other functions the first
    /// rule in 8, 16, 32, 64 points that agrees with its successor at `h = 0`.
    pub fn new(f: &TestFunction, p: &HPolytope) -> Result<Self> {
        let n = p.dim();
        if n > MAX_INTEGRATION_DIM {
            return Err(Error::UnsupportedDimension { dim: n, max: MAX_INTEGRATION_DIM });
        }
        if f.dim() != n {
            return Err(Error::Domain(format!("function of {} variables on a polytope of dimension {n}", f.dim())));
        }
        let make =
            |q| -> Result<Self> { Ok(Self { polytope: p.clone(), f: f.clone(), rule: SimplexRule::new(n, q)? }) };
        if let TestFunction::Polynomial(poly) = f {
            let degree = poly.degree().max(0) as usize;
            return make(degree / 2 + 2);
        }
        let h0 = vec![0.0; p.facets().len()];
        let mut prev = make(ADAPTIVE_ORDERS[0])?;
        let mut prev_value = prev.integrate_with_abs(&h0)?;
        let mut change = f64::INFINITY;
        for &q in &ADAPTIVE_ORDERS[1..] {
            let next = make(q)?;
            let value = next.integrate_with_abs(&h0)?;
            change = (value.0 - prev_value.0).abs() / value.1.max(f64::MIN_POSITIVE);
            if change <= ADAPTIVE_TOL {
                return Ok(prev);
            }
            prev = next;
            prev_value = value;
        }
        Err(Error::NonConvergence {
            what: "simplex quadrature",
            change,
            nodes: ADAPTIVE_ORDERS[ADAPTIVE_ORDERS.len() - 1],
        })
    }

    pub fn points_per_axis(&self) -> usize {
        self.rule.points()
    }

    pub fn polytope(&self) -> &HPolytope {
        &self.polytope
    }

    fn integrate_with_abs(&self, h: &[f64]) -> Result<(f64, f64)> {
        let mut sum = NeumaierSum::new();
        let mut abs = NeumaierSum::new();
        let f = |x: &[f64]| self.f.evaluate(x);
        for simplex in triangulate(&self.polytope, h)? {
            let (v, a) = self.rule.integrate(&simplex, &f);
            sum.add(v);
            abs.add(a);
        }
        Ok((sum.value(), abs.value()))
    }

    /// `∫_{P_h} f`.
    pub fn integrate(&self, h: &[f64]) -> Result<f64> {
        if h.len() != self.polytope.facets().len() {
            return Err(Error::Domain(format!("{} offsets for {} facets", h.len(), self.polytope.facets().len())));
        }
        Ok(self.integrate_with_abs(h)?.0)
    }
}

/// `∫_{P_h} f dx` over the polytope with facet offsets shifted by `h`.
pub fn dilated_integral(f: &TestFunction, p: &HPolytope, h: &[f64]) -> Result<f64> {
    PolytopeIntegrator::new(f, p)?.integrate(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::RationalPolynomial;
    use approx::assert_relative_eq;

    #[test]
    fn interval_examples() {
        let one = TestFunction::constant(1, 1);
        let p = HPolytope::cube(1);
        // facets are -x ≤ 0 then x ≤ 1
        let v = dilated_integral(&one, &p, &[0.1, 0.25]).unwrap();
        assert_relative_eq!(v, 1.35, max_relative = 1e-15);
        let x = TestFunction::coordinate(1, 0);
        assert_relative_eq!(dilated_integral(&x, &p, &[0.0, 0.0]).unwrap(), 0.5, max_relative = 1e-15);
    }

    #[test]
    fn triangle_area() {
        let one = TestFunction::constant(2, 1);
        let p = HPolytope::standard_simplex(2);
        assert_relative_eq!(dilated_integral(&one, &p, &[0.0; 3]).unwrap(), 0.5, max_relative = 1e-15);
        // (1 + h1 + h2 + h3)² / 2
        let h = [0.1, -0.05, 0.2];
        assert_relative_eq!(dilated_integral(&one, &p, &h).unwrap(), 1.25f64.powi(2) / 2.0, max_relative = 1e-14);
    }

    #[test]
    fn monomial_moments_of_the_simplex() {
        // ∫_{Δ_3} x^a y^b z^c = a! b! c! / (a+b+c+3)!
        let p = HPolytope::standard_simplex(3);
        let f = TestFunction::monomial(&[2, 1, 3]);
        let expected = 2.0 * 1.0 * 6.0 / (1..=9).map(f64::from).product::<f64>();
        assert_relative_eq!(dilated_integral(&f, &p, &[0.0; 4]).unwrap(), expected, max_relative = 1e-13);
    }

    #[test]
    fn cube_with_perturbed_faces() {
        let p = HPolytope::cube(3);
        let h = [0.1, 0.0, -0.2, 0.05, 0.0, 0.3];
        let one = TestFunction::constant(3, 1);
        assert_relative_eq!(dilated_integral(&one, &p, &h).unwrap(), 1.1 * 0.85 * 1.3, max_relative = 1e-14);
        let xy = TestFunction::polynomial(&RationalPolynomial::variable(3, 0) * &RationalPolynomial::variable(3, 1));
        // ∫ x over [-0.1, 1] times ∫ y over [0.2, 1.05] times 1.3
        let ix = (1.0 - 0.01) / 2.0;
        let iy = (1.05f64.powi(2) - 0.04) / 2.0;
        assert_relative_eq!(dilated_integral(&xy, &p, &h).unwrap(), ix * iy * 1.3, max_relative = 1e-13);
    }

    #[test]
    fn gaussian_over_square() {
        // separable: (∫_0^1 e^{-(x-c)²/2})² via erf-free series oracle
        let f = TestFunction::gaussian(vec![0.3, 0.3], 1.0).unwrap();
        let p = HPolytope::cube(2);
        let oracle_1d = {
            let m = 20_000;
            let h = 1.0 / m as f64;
            // composite Simpson
            let g = |x: f64| (-(x - 0.3f64).powi(2) / 2.0).exp();
            let mut s = g(0.0) + g(1.0);
            for i in 1..m {
                s += if i % 2 == 1 { 4.0 } else { 2.0 } * g(i as f64 * h);
            }
            s * h / 3.0
        };
        let v = dilated_integral(&f, &p, &[0.0; 4]).unwrap();
        assert_relative_eq!(v, oracle_1d * oracle_1d, max_relative = 1e-12);
    }

    #[test]
    fn collapsing_perturbation_is_a_geometry_error() {
        let one = TestFunction::constant(1, 1);
        assert!(matches!(dilated_integral(&one, &HPolytope::cube(1), &[-0.6, -0.6]), Err(Error::Geometry(_))));
    }
}
