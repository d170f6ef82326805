//! Configuration spaces and seeded random search.

mod random;
mod space;

pub use random::{checkpoint_reports, derive_seed, run_random_search, sample, Execution};
pub use space::{Assignment, ConfigurationSpace, ParamValue, ParameterKind, ParameterSpec, Scale};
