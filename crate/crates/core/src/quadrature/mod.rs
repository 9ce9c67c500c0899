//! Numerical integration: Gauss rules, orthant integrals and Monte Carlo.

mod golub_welsch;
mod monte_carlo;
mod orthant;
mod rules;

pub use monte_carlo::{monte_carlo_volume, McEstimate, CHUNK_SAMPLES, DEFAULT_SEED};
pub use orthant::{integrate_orthant, integrate_orthant_with, OrthantIntegral, OrthantOptions, MAX_TENSOR_DIM};
pub use rules::{gauss_jacobi_unit, gauss_laguerre_general, gauss_legendre_unit, QuadratureRule, UnitIntervalRule};
