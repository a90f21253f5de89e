//! Partition agreement and the population-level objects used to check
//! consistency claims numerically.

mod agreement;
mod assignment;
pub(crate) mod theory;

pub use agreement::{misclassification_distance, nmi, nmi_with, NmiNormalization};
pub use assignment::max_weight_assignment;
pub use theory::{
    check_conditions, g_functional, concentration_deviation, population_gap, population_criterion, sample_feasible_confusion,
    BlockModelSpec, CheckStatus, ConditionCheck, ConditionReport, ConfusionMatrix, Estimate, GaussianPairModel,
    PopulationGap, PairSimilarityModel, UniformPairModel,
};
