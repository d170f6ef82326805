//! Evaluation of multi-objective hyperparameter optimization under a
//! validation/test split.
//!
//! A search selects configurations by their *validation* costs, but what
//! matters is how they perform on *test* data. Mapping the validation front
//! to test costs yields a set that is generally no longer mutually
//! non-dominated; this crate brackets the true test-time front between an
//! optimistic and a pessimistic reading of that set and measures the
//! distance between the two with the hypervolume indicator.
//!
//! ```
//! use paretogap::{gap_report, EvaluationRecord, ReferencePoint, CostVector, Assignment};
//!
//! let rec = |id: &str, v: [f64; 2], t: [f64; 2]| {
//!     EvaluationRecord::complete(
//!         id,
//!         Assignment::new(),
//!         CostVector::new(v.to_vec()).unwrap(),
//!         Some(CostVector::new(t.to_vec()).unwrap()),
//!         0,
//!     )
//!     .unwrap()
//! };
//! let records = [
//!     rec("a", [0.1, 0.9], [0.2, 0.8]),
//!     rec("b", [0.3, 0.5], [0.4, 0.6]),
//!     rec("c", [0.6, 0.2], [0.5, 0.7]),
//! ];
//! let report = gap_report(&records, &ReferencePoint::unit(2)).unwrap();
//! assert!((report.approximation_gap - 0.07).abs() < 1e-12);
//! ```

pub mod archive;
pub mod error;
pub mod evaluators;
pub mod hypervolume;
pub mod pareto;
pub mod protocol;
pub mod search;

pub use error::{Error, Result};
pub use evaluators::Evaluator;
pub use hypervolume::{
    hypervolume_2d, hypervolume_mc, hypervolume_nd, McEstimate, ReferencePoint, HV_TOLERANCE,
};
pub use pareto::{
    anti_dominated_filter, canonicalize, dominates, non_dominated_filter, CostVector, Direction,
    FrontApproximation, FrontPoint, ObjectiveSpec, RecordId,
};
pub use protocol::{
    compare_dominance, compare_fronts, compare_gap, compare_hv, front_hypervolume, gap_report,
    naive_test_front, optimistic_front, pessimistic_front, validation_front, ComparisonVerdict,
    Criterion, EvaluationRecord, Evidence, GapReport, Outcome, RecordStatus,
};
pub use search::{
    Assignment, ConfigurationSpace, Execution, ParamValue, ParameterKind, ParameterSpec, Scale,
};
