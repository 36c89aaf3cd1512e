//! Runtime regression: a ridge model on standardized graph metrics with an
//! RBF-kernel regressor fitted to its residuals.

mod compound;
mod ridge;
mod scores;
mod standardize;
mod svr;

pub use compound::{fit_compound, CompoundModel, FeatureSet, RegressionConfig, Target, MIN_TRAINING_ROWS, MODEL_VERSION};
pub use ridge::{fit_ridge, impact_factors, RidgeModel};
pub use scores::{score, Scores};
pub use standardize::{fit_standardizer, Standardizer};
pub use svr::{fit_rbf_residual, scale_gamma, RbfResidualModel, ResidualSolver, SvrHyper};
