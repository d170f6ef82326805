//! Producers of (validation, test) cost pairs for a configuration.

mod dataset;
mod linear;
mod metrics;
mod synthetic;

pub use dataset::{
    german_credit_standin, split_dataset, Column, ColumnKind, DataSplit, Schema, TabularDataset,
    STANDARD_FRACTIONS,
};
pub use linear::{evaluate_linear_model, norm_inv_cdf, LinearModelEvaluator, SGD_EPOCHS};
pub use metrics::precision_recall;
pub use synthetic::{Surface, SyntheticProblem};

use crate::error::Result;
use crate::pareto::{CostVector, ObjectiveSpec};
use crate::search::{Assignment, ConfigurationSpace};

/// Something that scores a configuration on a validation and a test split.
///
/// Implementations must be pure functions of `(assignment, seed)`: the
/// search relies on that to make runs independent of scheduling.
pub trait Evaluator: Sync {
    /// Short identifier recorded in run archives.
    fn id(&self) -> String;

    /// Objectives of the returned cost vectors, in order.
    fn objectives(&self) -> Vec<ObjectiveSpec>;

    /// Rejects spaces the evaluator cannot interpret.
    fn check_space(&self, _space: &ConfigurationSpace) -> Result<()> {
        Ok(())
    }

    /// Canonical (validation, test) costs of one configuration.
    fn evaluate(&self, assignment: &Assignment, seed: u64) -> Result<(CostVector, CostVector)>;
}
