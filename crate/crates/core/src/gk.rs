//! The polynomial family `g_k` governing the asymptotic expansion of the
//! twisted Mellin transform.
//!
//! `g_k(s) = (1/k!) Σ_{l=0}^{k} (-1)^l C(k,l) s^l s^(k-l)`, where
//! `s^(m) = (s+m)(s+m-1)⋯(s+1)` is the Hardy function. Although each summand
//! has degree `k`, the sum collapses to degree `⌊k/2⌋`.

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::One;

use crate::poly::RationalPolynomial;

fn int(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn factorial(n: u64) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

/// `s^(m) = (s+m)(s+m-1)⋯(s+1)`; the empty product `1` for `m = 0`.
pub fn hardy_polynomial(m: u32) -> RationalPolynomial {
    let s = RationalPolynomial::variable(1, 0);
    (1..=m as u64).fold(RationalPolynomial::one(1), |acc, j| &acc * &(&s + &RationalPolynomial::constant(1, int(j))))
}

/// `g_k(s)` built directly from its defining alternating sum.
pub fn g_polynomial(k: u32) -> RationalPolynomial {
    let s = RationalPolynomial::variable(1, 0);
    let mut acc = RationalPolynomial::zero(1);
    for l in 0..=k {
        let c = BigRational::from_integer(binomial(BigInt::from(k), BigInt::from(l)));
        let c = if l % 2 == 1 { -c } else { c };
        let term = &s.pow(l) * &hardy_polynomial(k - l);
        acc = &acc + &term.scale(&c);
    }
    acc.scale(&BigRational::new(BigInt::one(), factorial(k as u64)))
}

/// `g_0, …, g_kmax` as Taylor coefficients in `x` of `e^{-sx} (1-x)^{-(1+s)}`.
///
/// Both factors are expanded to order `k_max` independently and multiplied
/// as power series with polynomial coefficients, which makes this an
/// oracle for [`g_polynomial`] that never touches the alternating sum.
pub fn g_from_generating_function(k_max: u32) -> Vec<RationalPolynomial> {
    let s = RationalPolynomial::variable(1, 0);
    let n_terms = k_max as usize + 1;

    // e^{-sx} = Σ (-s)^n x^n / n!
    let mut exp_series = Vec::with_capacity(n_terms);
    let mut term = RationalPolynomial::one(1);
    for n in 0..n_terms {
        if n > 0 {
            let factor = s.scale(&BigRational::new(BigInt::from(-1), BigInt::from(n)));
            term = &term * &factor;
        }
        exp_series.push(term.clone());
    }

    // (1-x)^{-(1+s)} = Σ (1+s)(2+s)⋯(n+s)/n! x^n
    let mut binom_series = Vec::with_capacity(n_terms);
    let mut term = RationalPolynomial::one(1);
    for n in 0..n_terms {
        if n > 0 {
            let factor = (&s + &RationalPolynomial::constant(1, int(n as u64)))
                .scale(&BigRational::new(BigInt::one(), BigInt::from(n)));
            term = &term * &factor;
        }
        binom_series.push(term.clone());
    }

    (0..n_terms)
        .map(|k| (0..=k).fold(RationalPolynomial::zero(1), |acc, j| &acc + &(&exp_series[j] * &binom_series[k - j])))
        .collect()
}

/// `g_β(s_1,…,s_d) = Π_i g_{β_i}(s_i)`.
pub fn g_multiindex(beta: &[u32]) -> RationalPolynomial {
    let d = beta.len();
    let mut acc = RationalPolynomial::one(d);
    for (i, &b) in beta.iter().enumerate() {
        let g = g_polynomial(b);
        let lifted = RationalPolynomial::from_terms(
            d,
            g.terms().map(|(e, c)| {
                let mut exp = vec![0; d];
                exp[i] = e[0];
                (exp, c.clone())
            }),
        )
        .expect("lifted exponent has the right length");
        acc = &acc * &lifted;
    }
    acc
}

/// Ascending `f64` coefficients of `g_0, …, g_kmax`, for fast evaluation.
pub fn g_float_table(k_max: u32) -> Vec<Vec<f64>> {
    (0..=k_max)
        .map(|k| g_polynomial(k).univariate_coefficients().iter().map(crate::poly::rational_to_f64).collect())
        .collect()
}

/// Horner evaluation of an ascending coefficient slice.
pub fn horner(coeffs: &[f64], s: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * s + c)
}
