//! Distribution laws of monomial-state densities: exact superlevel volumes
//! and their asymptotic predictors.

mod laws;
mod level_set;

pub use laws::{
    direction_to_k, gamma_constant, layer_cake_check, logn_epsilon_doubled, plain_epsilon, refined_prediction,
    scaling_study, sigma_predicted, EpsilonSchedule, LayerCake, PredictorMode, ScalingStudy, StudyRow,
    LAYER_CAKE_MIN_POINTS,
};
pub use level_set::{
    psi, psi_inverse, superlevel_volume_exact, superlevel_volume_mc, superlevel_volume_with, Branch, LevelSetProblem,
    VolumeEstimate, VolumeMethod, VolumeOptions, MAX_QUADRATURE_DIM,
};
