//! Real special functions: log-Gamma, Stirling's approximation, unit-ball
//! volumes, and the series coefficients of `w / (1 - e^{-w})`.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::rational_to_f64;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Below this argument the recurrence `Γ(x+1) = xΓ(x)` shifts upward before
/// the asymptotic series is applied.
const STIRLING_CUTOFF: f64 = 10.0;

/// `B_{2j} / (2j (2j-1))` for `j = 1..=10`.
const STIRLING_COEFFS: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

/// `Σ_j B_{2j} / (2j(2j-1) x^{2j-1})`, the correction to Stirling's formula.
fn stirling_tail(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut acc = 0.0;
    for &c in STIRLING_COEFFS.iter().rev() {
        acc = acc * inv2 + c;
    }
    acc * inv
}

/// Natural logarithm of `Γ(x)` for `x > 0`.
///
/// Uses the Stirling series for `x >= 10` and upward recurrence below that.
/// Relative error is below `1e-13` for `x >= 0.5` away from the zeros of
/// `ln Γ` at 1 and 2, where the absolute error is below `1e-14`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("log_gamma requires x > 0, got {x}")));
    }
    Ok(log_gamma_unchecked(x))
}

pub(crate) fn log_gamma_unchecked(x: f64) -> f64 {
    if x == 1.0 || x == 2.0 {
        return 0.0;
    }
    if x >= STIRLING_CUTOFF {
        return (x - 0.5) * x.ln() - x + HALF_LN_2PI + stirling_tail(x);
    }
    let mut shifted = x;
    let mut product = 1.0;
    while shifted < STIRLING_CUTOFF {
        product *= shifted;
        shifted += 1.0;
    }
    log_gamma_unchecked(shifted) - product.ln()
}

/// `ln Γ(k+1) - (k ln k - k)` without the cancellation of the direct
/// difference; the quantity that stays `O(ln k)` while each side grows like
/// `k ln k`. Defined as `0` at `k = 0`.
pub fn log_factorial_excess(k: f64) -> f64 {
    if k == 0.0 {
        return 0.0;
    }
    if k >= STIRLING_CUTOFF {
        // ln Γ(k+1) = ln k + ln Γ(k), expanded with Stirling's series for Γ(k).
        return 0.5 * k.ln() + HALF_LN_2PI + stirling_tail(k);
    }
    log_gamma_unchecked(k + 1.0) - (k * k.ln() - k)
}

/// `ln(√(2πk) (k/e)^k)`, Stirling's approximation to `ln k!`.
pub fn stirling_log_factorial(k: u64) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("Stirling's formula is undefined at k = 0; use log_gamma(1)".into()));
    }
    let k = k as f64;
    Ok(0.5 * (2.0 * PI * k).ln() + k * k.ln() - k)
}

/// Volume of the unit ball in `R^d`, `π^{d/2} / Γ(d/2 + 1)`.
pub fn unit_ball_volume(d: usize) -> f64 {
    // γ_d = γ_{d-2} · 2π/d, seeded by γ_0 = 1 and γ_1 = 2.
    let mut v = if d % 2 == 0 { 1.0 } else { 2.0 };
    let mut j = if d % 2 == 0 { 2 } else { 3 };
    while j <= d {
        v *= 2.0 * PI / j as f64;
        j += 2;
    }
    v
}

/// Taylor coefficients `b_0..b_M` of `w / (1 - e^{-w})`, kept exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToddCoefficients {
    coeffs: Vec<BigRational>,
}

impl ToddCoefficients {
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn get(&self, m: usize) -> &BigRational {
        &self.coeffs[m]
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(rational_to_f64).collect()
    }
}

/// Inverts `(1 - e^{-w})/w = Σ_j (-1)^j w^j / (j+1)!` as a power series.
pub fn todd_coefficients(order: usize) -> ToddCoefficients {
    let mut fact = BigInt::one();
    let mut c = Vec::with_capacity(order + 1);
    for j in 0..=order {
        fact *= BigInt::from(j + 1);
        let sign = if j % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        c.push(BigRational::new(sign, fact.clone()));
    }
    let mut b: Vec<BigRational> = Vec::with_capacity(order + 1);
    b.push(BigRational::one());
    for m in 1..=order {
        let mut acc = BigRational::zero();
        for j in 1..=m {
            acc += &c[j] * &b[m - j];
        }
        b.push(-acc);
    }
    ToddCoefficients { coeffs: b }
}
