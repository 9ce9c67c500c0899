//! Gauss rules from the three-term recurrence of monic orthogonal
//! polynomials (Golub–Welsch).
//!
//! The Jacobi matrix is diagonalised with implicit QL iterations that only
//! track the first component of each eigenvector, which is all the weights
//! need.

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 60;

/// Nodes (ascending) and weights normalised to unit total mass.
///
/// `diag[i]` are the recurrence coefficients `a_i` and `offdiag[i]` the
/// couplings `sqrt(b_{i+1})` between rows `i` and `i+1`.
pub(crate) fn gauss_rule(diag: &[f64], offdiag: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    assert!(n >= 1 && offdiag.len() + 1 == n);
    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    e.push(0.0);
    let mut z = vec![0.0; n];
    z[0] = 1.0;

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                if e[m].abs() <= f64::EPSILON * (d[m].abs() + d[m + 1].abs()) {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            if sweeps == MAX_SWEEPS {
                return Err(Error::NonConvergence { what: "tridiagonal eigenproblem", change: e[l].abs(), nodes: n });
            }
            sweeps += 1;

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;

                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut pairs: Vec<(f64, f64)> = d.into_iter().zip(z.into_iter().map(|v| v * v)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    Ok(pairs.into_iter().map(|(x, w)| (x, w / total)).unzip())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_node() {
        let (x, w) = gauss_rule(&[3.0], &[]).unwrap();
        assert_eq!(x, vec![3.0]);
        assert_eq!(w, vec![1.0]);
    }

    #[test]
    fn two_point_legendre() {
        // monic Legendre: a_k = 0, b_1 = 1/3
        let (x, w) = gauss_rule(&[0.0, 0.0], &[(1.0f64 / 3.0).sqrt()]).unwrap();
        let r = 1.0 / 3f64.sqrt();
        assert!((x[0] + r).abs() < 1e-15 && (x[1] - r).abs() < 1e-15);
        assert!((w[0] - 0.5).abs() < 1e-15 && (w[1] - 0.5).abs() < 1e-15);
    }
}
