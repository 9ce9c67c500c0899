//! Sparse multivariate polynomials with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exponent multi-index of a monomial.
pub type Exponent = Vec<u32>;

/// A polynomial in `vars` variables with exact rational coefficients.
///
/// Terms are kept in an exponent-keyed map and never store a zero
/// coefficient, so two equal polynomials compare equal structurally.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalPolynomial {
    vars: usize,
    terms: BTreeMap<Exponent, BigRational>,
}

impl RationalPolynomial {
    pub fn zero(vars: usize) -> Self {
        Self { vars, terms: BTreeMap::new() }
    }

    pub fn one(vars: usize) -> Self {
        Self::constant(vars, BigRational::one())
    }

    pub fn constant(vars: usize, c: BigRational) -> Self {
        Self::monomial(vec![0; vars], c)
    }

    /// The polynomial `x_index`.
    pub fn variable(vars: usize, index: usize) -> Self {
        assert!(index < vars, "variable index {index} out of range for {vars} variables");
        let mut exp = vec![0; vars];
        exp[index] = 1;
        Self::monomial(exp, BigRational::one())
    }

    pub fn monomial(exp: Exponent, c: BigRational) -> Self {
        let vars = exp.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Self { vars, terms }
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, merging repeats.
    pub fn from_terms<I>(vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponent, BigRational)>,
    {
        let mut p = Self::zero(vars);
        for (exp, c) in terms {
            if exp.len() != vars {
                return Err(Error::Domain(format!("exponent {exp:?} has length {}, expected {vars}", exp.len())));
            }
            p.add_term(exp, c);
        }
        Ok(p)
    }

    /// Univariate polynomial from ascending coefficients.
    pub fn univariate(coeffs: &[BigRational]) -> Self {
        let mut p = Self::zero(1);
        for (i, c) in coeffs.iter().enumerate() {
            p.add_term(vec![i as u32], c.clone());
        }
        p
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Maximal total degree over stored terms, `-1` for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.terms.keys().map(|e| e.iter().map(|&x| x as i64).sum::<i64>()).max().unwrap_or(-1)
    }

    /// Maximal exponent of variable `index`, `-1` for the zero polynomial.
    pub fn degree_in(&self, index: usize) -> i64 {
        self.terms.keys().map(|e| e[index] as i64).max().unwrap_or(-1)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exp: &[u32]) -> BigRational {
        self.terms.get(exp).cloned().unwrap_or_else(BigRational::zero)
    }

    fn add_term(&mut self, exp: Exponent, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.vars);
        }
        Self { vars: self.vars, terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(self.vars);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Partial derivative of the given order with respect to `index`.
    pub fn derivative(&self, index: usize, order: u32) -> Self {
        let mut out = Self::zero(self.vars);
        for (e, c) in &self.terms {
            let p = e[index];
            if p < order {
                continue;
            }
            let falling: BigInt = (0..order).map(|j| BigInt::from(p - j)).product();
            let mut ne = e.clone();
            ne[index] -= order;
            out.add_term(ne, c * BigRational::from_integer(falling));
        }
        out
    }

    /// Mixed partial derivative `∂^beta`.
    pub fn partial(&self, beta: &[u32]) -> Self {
        assert_eq!(beta.len(), self.vars);
        beta.iter().enumerate().fold(self.clone(), |p, (i, &b)| if b == 0 { p } else { p.derivative(i, b) })
    }

    /// Exact evaluation at a rational point.
    pub fn evaluate_exact(&self, point: &[BigRational]) -> BigRational {
        assert_eq!(point.len(), self.vars);
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (x, &p) in point.iter().zip(e) {
                if p > 0 {
                    term *= num_traits::pow(x.clone(), p as usize);
                }
            }
            acc += term;
        }
        acc
    }

    /// Floating point evaluation; coefficients are rounded once to `f64`.
    pub fn evaluate(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.vars);
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut term = rational_to_f64(c);
                for (x, &p) in point.iter().zip(e) {
                    term *= x.powi(p as i32);
                }
                term
            })
            .sum()
    }

    /// Coefficients rounded to `f64`, for repeated fast evaluation.
    pub fn to_f64(&self) -> FloatPolynomial {
        FloatPolynomial {
            vars: self.vars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), rational_to_f64(c))).collect(),
        }
    }

    /// Ascending coefficient vector of a univariate polynomial.
    pub fn univariate_coefficients(&self) -> Vec<BigRational> {
        assert_eq!(self.vars, 1, "univariate_coefficients needs a univariate polynomial");
        let deg = self.degree();
        if deg < 0 {
            return Vec::new();
        }
        (0..=deg as u32).map(|i| self.coefficient(&[i])).collect()
    }
}

/// A polynomial with `f64` coefficients used in hot evaluation loops.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatPolynomial {
    vars: usize,
    terms: Vec<(Exponent, f64)>,
}

impl FloatPolynomial {
    pub fn evaluate(&self, point: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut term = *c;
            for (x, &p) in point.iter().zip(e) {
                if p > 0 {
                    term *= x.powi(p as i32);
                }
            }
            acc += term;
        }
        acc
    }

    pub fn vars(&self) -> usize {
        self.vars
    }
}

pub(crate) fn rational_to_f64(c: &BigRational) -> f64 {
    c.to_f64().unwrap_or_else(|| if c.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

/// Parses `"p/q"`, an integer, or a finite decimal such as `"-1.25"` exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational literal {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int_part: BigInt = match int {
            "" | "-" | "+" => BigInt::zero(),
            _ => int.parse().map_err(|_| bad())?,
        };
        let frac_part: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let magnitude = int_part.abs() * &scale + frac_part;
        let num = if negative { -magnitude } else { magnitude };
        return Ok(BigRational::new(num, scale));
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(p))
}

impl Add for &RationalPolynomial {
    type Output = RationalPolynomial;

    fn add(self, rhs: &RationalPolynomial) -> RationalPolynomial {
        assert_eq!(self.vars, rhs.vars, "variable count mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &RationalPolynomial {
    type Output = RationalPolynomial;

    fn sub(self, rhs: &RationalPolynomial) -> RationalPolynomial {
        self + &(-rhs)
    }
}

impl Neg for &RationalPolynomial {
    type Output = RationalPolynomial;

    fn neg(self) -> RationalPolynomial {
        RationalPolynomial { vars: self.vars, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }
}

impl Mul for &RationalPolynomial {
    type Output = RationalPolynomial;

    fn mul(self, rhs: &RationalPolynomial) -> RationalPolynomial {
        assert_eq!(self.vars, rhs.vars, "variable count mismatch");
        let mut out = RationalPolynomial::zero(self.vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Exponent = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

macro_rules! forward_owned_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for RationalPolynomial {
            type Output = RationalPolynomial;

            fn $method(self, rhs: RationalPolynomial) -> RationalPolynomial {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl fmt::Display for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            let mag = c.abs();
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(i, &p)| {
                    let name = if self.vars == 1 { "s".to_string() } else { format!("s{}", i + 1) };
                    if p == 1 {
                        name
                    } else {
                        format!("{name}^{p}")
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{mag}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalPolynomial[{}]({self})", self.vars)
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    exp: Vec<u32>,
    num: String,
    den: String,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    vars: usize,
    terms: Vec<TermRepr>,
}

impl Serialize for RationalPolynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PolyRepr {
            vars: self.vars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermRepr { exp: e.clone(), num: c.numer().to_string(), den: c.denom().to_string() })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RationalPolynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = PolyRepr::deserialize(deserializer)?;
        let mut terms = Vec::with_capacity(repr.terms.len());
        for t in repr.terms {
            let num: BigInt = t.num.parse().map_err(D::Error::custom)?;
            let den: BigInt = t.den.parse().map_err(D::Error::custom)?;
            if den.is_zero() {
                return Err(D::Error::custom("zero denominator"));
            }
            terms.push((t.exp, BigRational::new(num, den)));
        }
        RationalPolynomial::from_terms(repr.vars, terms).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn zero_polynomial_has_degree_minus_one() {
        assert_eq!(RationalPolynomial::zero(2).degree(), -1);
        assert_eq!(RationalPolynomial::one(2).degree(), 0);
    }

    #[test]
    fn cancellation_removes_terms() {
        let x = RationalPolynomial::variable(1, 0);
        let d = &x - &x;
        assert!(d.is_zero());
        assert_eq!(d.len(), 0);
    }

    #[test]
    fn derivative_of_cube() {
        let x = RationalPolynomial::variable(1, 0);
        let p = x.pow(3).scale(&q(1, 2));
        let d2 = p.derivative(0, 2);
        assert_eq!(d2, x.scale(&q(3, 1)));
        assert!(p.derivative(0, 4).is_zero());
    }

    #[test]
    fn exact_evaluation() {
        let x = RationalPolynomial::variable(2, 0);
        let y = RationalPolynomial::variable(2, 1);
        let p = &(&x * &y) + &RationalPolynomial::constant(2, q(1, 3));
        assert_eq!(p.evaluate_exact(&[q(1, 2), q(2, 3)]), q(2, 3));
    }

    #[test]
    fn parse_literals() {
        assert_eq!(parse_rational("3/6").unwrap(), q(1, 2));
        assert_eq!(parse_rational("-1.25").unwrap(), q(-5, 4));
        assert_eq!(parse_rational("-0.5").unwrap(), q(-1, 2));
        assert_eq!(parse_rational("7").unwrap(), q(7, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn json_layout() {
        let p = RationalPolynomial::univariate(&[q(1, 1), q(5, 6)]);
        let json = serde_json::to_value(&p).unwrap();
        assert_eq!(
            json,
            serde_json::json!({"vars": 1, "terms": [
                {"exp": [0], "num": "1", "den": "1"},
                {"exp": [1], "num": "5", "den": "6"}
            ]})
        );
    }

    fn small_poly() -> impl Strategy<Value = RationalPolynomial> {
        prop::collection::vec(((0u32..4, 0u32..4), -20i64..20, 1i64..9), 0..6).prop_map(|ts| {
            RationalPolynomial::from_terms(2, ts.into_iter().map(|((a, b), n, d)| (vec![a, b], q(n, d)))).unwrap()
        })
    }

    proptest! {
        #[test]
        fn json_round_trip(p in small_poly()) {
            let s = serde_json::to_string(&p).unwrap();
            let back: RationalPolynomial = serde_json::from_str(&s).unwrap();
            prop_assert_eq!(back, p);
        }

        #[test]
        fn multiplication_is_evaluation_homomorphism(a in small_poly(), b in small_poly(), x in -5i64..5, y in 1i64..5) {
            let pt = [q(x, 3), q(y, 2)];
            let lhs = (&a * &b).evaluate_exact(&pt);
            prop_assert_eq!(lhs, a.evaluate_exact(&pt) * b.evaluate_exact(&pt));
            let deg = (&a * &b).degree();
            if !a.is_zero() && !b.is_zero() {
                prop_assert_eq!(deg, a.degree() + b.degree());
            }
        }
    }
}
