//! Functions on the positive orthant with the partial derivatives the
//! asymptotic expansion needs.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use num_rational::BigRational;

use crate::poly::RationalPolynomial;

/// One term `c · e^{⟨λ, y⟩}` of an exponential mixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpTerm {
    pub c: f64,
    pub lambda: Vec<f64>,
}

type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A black-box function; derivatives come from central differences.
#[derive(Clone)]
pub struct NumericFunction {
    dim: usize,
    f: Evaluator,
}

impl fmt::Debug for NumericFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NumericFunction").field("dim", &self.dim).finish_non_exhaustive()
    }
}

/// Highest derivative order a [`TestFunction::Numeric`] supplies.
pub const NUMERIC_DERIVATIVE_ORDER: usize = 2;

#[derive(Debug, Clone)]
pub enum TestFunction {
    /// Exact polynomial data. Unbounded, but its transform has a closed form.
    Polynomial(RationalPolynomial),
    /// `Σ c_j e^{⟨λ_j, y⟩}` with every `λ_j ≤ 0` componentwise.
    ExponentialMix {
        dim: usize,
        terms: Vec<ExpTerm>,
    },
    /// `exp(-|y - center|² / (2 width²))`.
    GaussianBump {
        center: Vec<f64>,
        width: f64,
    },
    Numeric(NumericFunction),
}

impl TestFunction {
    pub fn polynomial(p: RationalPolynomial) -> Self {
        Self::Polynomial(p)
    }

    pub fn constant(dim: usize, c: i64) -> Self {
        Self::Polynomial(RationalPolynomial::constant(dim, BigRational::from_integer(c.into())))
    }

    /// The coordinate function `y_index`.
    pub fn coordinate(dim: usize, index: usize) -> Self {
        Self::Polynomial(RationalPolynomial::variable(dim, index))
    }

    /// The monomial `y^exp` with unit coefficient.
    pub fn monomial(exp: &[u32]) -> Self {
        Self::Polynomial(RationalPolynomial::monomial(exp.to_vec(), BigRational::from_integer(1.into())))
    }

    pub fn exponential_mix(terms: Vec<ExpTerm>) -> Result<Self> {
        let dim = terms
            .first()
            .map(|t| t.lambda.len())
            .ok_or_else(|| Error::Domain("exponential mixture needs at least one term".into()))?;
        for t in &terms {
            if t.lambda.len() != dim {
                return Err(Error::Domain("exponential terms disagree on dimension".into()));
            }
            if t.lambda.iter().any(|&l| !(l <= 0.0)) || !t.c.is_finite() {
                return Err(Error::Domain(format!(
                    "exponential rates must be <= 0 for boundedness on the orthant, got {:?}",
                    t.lambda
                )));
            }
        }
        Ok(Self::ExponentialMix { dim, terms })
    }

    pub fn gaussian(center: Vec<f64>, width: f64) -> Result<Self> {
        if center.is_empty() || !(width > 0.0) || !width.is_finite() {
            return Err(Error::Domain(format!("gaussian bump needs a center and a positive width, got width {width}")));
        }
        Ok(Self::GaussianBump { center, width })
    }

    pub fn numeric<F>(dim: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self::Numeric(NumericFunction { dim, f: Arc::new(f) })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Polynomial(p) => p.vars(),
            Self::ExponentialMix { dim, .. } => *dim,
            Self::GaussianBump { center, .. } => center.len(),
            Self::Numeric(n) => n.dim,
        }
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self, Self::Polynomial(p) if p.degree() > 0)
    }

    /// `None` when derivatives of every order are available in closed form.
    pub fn max_derivative_order(&self) -> Option<usize> {
        match self {
            Self::Numeric(_) => Some(NUMERIC_DERIVATIVE_ORDER),
            _ => None,
        }
    }

    pub fn evaluate(&self, y: &[f64]) -> f64 {
        match self {
            Self::Polynomial(p) => p.evaluate(y),
            Self::ExponentialMix { terms, .. } => terms.iter().map(|t| t.c * dot(&t.lambda, y).exp()).sum(),
            Self::GaussianBump { center, width } => {
                let r2: f64 = y.iter().zip(center).map(|(a, b)| (a - b).powi(2)).sum();
                (-r2 / (2.0 * width * width)).exp()
            }
            Self::Numeric(n) => (n.f)(y),
        }
    }

    /// `∂^beta f (y)`.
    pub fn partial(&self, beta: &[u32], y: &[f64]) -> Result<f64> {
        let order: usize = beta.iter().map(|&b| b as usize).sum();
        if order == 0 {
            return Ok(self.evaluate(y));
        }
        match self {
            Self::Polynomial(p) => Ok(p.partial(beta).evaluate(y)),
            Self::ExponentialMix { terms, .. } => Ok(terms
                .iter()
                .map(|t| {
                    let scale: f64 = t.lambda.iter().zip(beta).map(|(l, &b)| l.powi(b as i32)).product();
                    t.c * scale * dot(&t.lambda, y).exp()
                })
                .sum()),
            Self::GaussianBump { center, width } => Ok(y
                .iter()
                .zip(center)
                .zip(beta)
                .map(|((&yi, &ci), &b)| gaussian_derivative(b, (yi - ci) / width, *width))
                .product()),
            Self::Numeric(n) => {
                if order > NUMERIC_DERIVATIVE_ORDER {
                    return Err(Error::DerivativeCapability { requested: order, available: NUMERIC_DERIVATIVE_ORDER });
                }
                Ok(central_difference(&*n.f, beta, y))
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `d^k/dy^k exp(-z²/2)` with `z = (y - c)/w`: `(-1/w)^k He_k(z) e^{-z²/2}`.
fn gaussian_derivative(k: u32, z: f64, width: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for j in 0..k {
        let next = z * cur - j as f64 * prev;
        prev = cur;
        cur = next;
    }
    let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
    sign * cur * (-0.5 * z * z).exp() / width.powi(k as i32)
}

fn central_difference(f: &(dyn Fn(&[f64]) -> f64 + Send + Sync), beta: &[u32], y: &[f64]) -> f64 {
    let active: Vec<usize> = (0..beta.len()).filter(|&i| beta[i] > 0).collect();
    let mut p = y.to_vec();
    let mut at = |shifts: &[(usize, f64)]| {
        p.copy_from_slice(y);
        for &(i, s) in shifts {
            p[i] += s;
        }
        f(&p)
    };
    let step1 = |i: usize| 1e-5 * y[i].abs().max(1.0);
    let step2 = |i: usize| 1e-4 * y[i].abs().max(1.0);
    match active.as_slice() {
        [i] if beta[*i] == 1 => {
            let h = step1(*i);
            (at(&[(*i, h)]) - at(&[(*i, -h)])) / (2.0 * h)
        }
        [i] => {
            let h = step2(*i);
            (at(&[(*i, h)]) - 2.0 * at(&[]) + at(&[(*i, -h)])) / (h * h)
        }
        [i, j] => {
            let (hi, hj) = (step2(*i), step2(*j));
            (at(&[(*i, hi), (*j, hj)]) - at(&[(*i, hi), (*j, -hj)]) - at(&[(*i, -hi), (*j, hj)])
                + at(&[(*i, -hi), (*j, -hj)]))
                / (4.0 * hi * hj)
        }
        _ => unreachable!("order checked by caller"),
    }
}

/// Serialised form, tagged by `kind`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TestFunctionSpec {
    Polynomial(RationalPolynomial),
    Expmix { terms: Vec<ExpTerm> },
    Gaussian { center: Vec<f64>, width: f64 },
}

impl TryFrom<TestFunctionSpec> for TestFunction {
    type Error = Error;

    fn try_from(spec: TestFunctionSpec) -> Result<Self> {
        match spec {
            TestFunctionSpec::Polynomial(p) => Ok(Self::Polynomial(p)),
            TestFunctionSpec::Expmix { terms } => Self::exponential_mix(terms),
            TestFunctionSpec::Gaussian { center, width } => Self::gaussian(center, width),
        }
    }
}

impl TestFunction {
    /// `None` for [`TestFunction::Numeric`], which has no serialised form.
    pub fn to_spec(&self) -> Option<TestFunctionSpec> {
        match self {
            Self::Polynomial(p) => Some(TestFunctionSpec::Polynomial(p.clone())),
            Self::ExponentialMix { terms, .. } => Some(TestFunctionSpec::Expmix { terms: terms.clone() }),
            Self::GaussianBump { center, width } => {
                Some(TestFunctionSpec::Gaussian { center: center.clone(), width: *width })
            }
            Self::Numeric(_) => None,
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: TestFunctionSpec = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        spec.try_into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gaussian_derivatives_match_finite_differences() {
        let g = TestFunction::gaussian(vec![1.0, 0.5], 0.7).unwrap();
        let y = [0.8, 1.1];
        let numeric = TestFunction::numeric(2, {
            let g = g.clone();
            move |y| g.evaluate(y)
        });
        for beta in [[1, 0], [0, 1], [2, 0], [1, 1], [0, 2]] {
            assert_relative_eq!(
                g.partial(&beta, &y).unwrap(),
                numeric.partial(&beta, &y).unwrap(),
                max_relative = 1e-6
            );
        }
        // fourth derivative of e^{-z²/2} at 0 is He_4(0) = 3
        let g1 = TestFunction::gaussian(vec![0.0], 1.0).unwrap();
        assert_relative_eq!(g1.partial(&[4], &[0.0]).unwrap(), 3.0);
    }

    #[test]
    fn numeric_refuses_third_derivatives() {
        let f = TestFunction::numeric(1, |y| y[0].sin());
        assert!(matches!(f.partial(&[3], &[0.1]), Err(Error::DerivativeCapability { .. })));
    }

    #[test]
    fn exponential_mix_validates_rates() {
        assert!(TestFunction::exponential_mix(vec![ExpTerm { c: 1.0, lambda: vec![0.5] }]).is_err());
        let f = TestFunction::exponential_mix(vec![ExpTerm { c: 2.0, lambda: vec![-1.0, -0.5] }]).unwrap();
        assert_relative_eq!(f.partial(&[1, 2], &[0.0, 0.0]).unwrap(), 2.0 * -1.0 * 0.25);
    }

    #[test]
    fn json_forms() {
        let f = TestFunction::from_json(r#"{"kind":"gaussian","center":[1.0],"width":1.0}"#).unwrap();
        assert_eq!(f.dim(), 1);
        let p = TestFunction::from_json(r#"{"kind":"polynomial","vars":1,"terms":[{"exp":[1],"num":"1","den":"1"}]}"#)
            .unwrap();
        assert_eq!(p.evaluate(&[0.25]), 0.25);
        let e = TestFunction::from_json(r#"{"kind":"expmix","terms":[{"c":1.0,"lambda":[-2.0]}]}"#).unwrap();
        assert_relative_eq!(e.evaluate(&[1.0]), (-2.0f64).exp());
        assert!(TestFunction::from_json(r#"{"kind":"expmix","terms":[{"c":1.0,"lambda":[2.0]}]}"#).is_err());
        let round = serde_json::to_string(&p.to_spec().unwrap()).unwrap();
        assert!(round.contains(r#""kind":"polynomial""#));
    }
}
