//! Lattice polytopes, their dilations and the Euler–Maclaurin expansion of
//! Riemann sums over them.

mod em;
mod hpolytope;
mod integrate;
mod linalg;

pub use em::{
    ehrhart_check, euler_maclaurin_sum, fornberg_weights, riemann_sum, EhrhartCheck, EmExpansion, MAX_EM_ORDER,
    STENCIL_HALF_WIDTH, STEP_DIVISOR,
};
pub use hpolytope::{Facet, HPolytope, HPolytopeSpec};
pub use integrate::{
    dilated_integral, perturbed_vertices, triangulate, PolytopeIntegrator, SimplexRule, MAX_INTEGRATION_DIM,
};
