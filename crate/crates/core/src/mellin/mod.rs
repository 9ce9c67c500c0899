//! The twisted Mellin transform, its closed forms and its asymptotic series.

mod test_function;
mod transform;

pub use test_function::{ExpTerm, NumericFunction, TestFunction, TestFunctionSpec, NUMERIC_DERIVATIVE_ORDER};
pub use transform::{
    closed_form, denominator_log, empirical_order, multi_indices, transform_numeric, transform_quadrature,
    transform_series, EmpiricalOrder, Method, SeriesExpansion, TransformResult, EXACTNESS_THRESHOLD,
};
