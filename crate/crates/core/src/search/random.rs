use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::space::{Assignment, ConfigurationSpace, ParamValue, ParameterKind, Scale};
use crate::error::{Error, Result};
use crate::evaluators::Evaluator;
use crate::hypervolume::ReferencePoint;
use crate::protocol::{gap_report, EvaluationRecord, GapReport};

/// Draws one assignment, consuming `rng` in parameter order.
pub fn sample<R: Rng + ?Sized>(space: &ConfigurationSpace, rng: &mut R) -> Assignment {
    let mut assignment = Assignment::new();
    for p in space.parameters() {
        let value = match &p.kind {
            ParameterKind::Categorical(values) => {
                ParamValue::Categorical(values[rng.random_range(0..values.len())].clone())
            }
            ParameterKind::Continuous {
                lo,
                hi,
                scale: Scale::Linear,
            } => ParamValue::Float((lo + (hi - lo) * rng.random::<f64>()).clamp(*lo, *hi)),
            ParameterKind::Continuous {
                lo,
                hi,
                scale: Scale::Log,
            } => {
                let (a, b) = (lo.ln(), hi.ln());
                ParamValue::Float((a + (b - a) * rng.random::<f64>()).exp().clamp(*lo, *hi))
            }
            ParameterKind::Integer { lo, hi } => ParamValue::Int(rng.random_range(*lo..=*hi)),
        };
        assignment.push(p.name.clone(), value);
    }
    assignment
}

/// Seed of trial `index` under `master_seed` (SplitMix64 over a counter).
///
/// Depends only on the pair, so trials can run in any order or on any
/// thread.
pub fn derive_seed(master_seed: u64, index: u64) -> u64 {
    let mut z = master_seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// How trials of a search are scheduled. Results do not depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Sequential,
    Parallel {
        threads: usize,
    },
}

fn run_trial(
    space: &ConfigurationSpace,
    evaluator: &dyn Evaluator,
    master_seed: u64,
    index: usize,
) -> EvaluationRecord {
    let seed = derive_seed(master_seed, index as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let assignment = sample(space, &mut rng);
    let id = format!("trial-{index:04}");
    // The evaluator gets its own seed so it never shares a stream with sampling.
    match evaluator.evaluate(&assignment, derive_seed(seed, 0)) {
        Ok((validation, test)) => {
            EvaluationRecord::complete(id.clone(), assignment.clone(), validation, Some(test), seed)
                .unwrap_or_else(|e| EvaluationRecord::failed(id, assignment, seed, e.to_string()))
        }
        Err(e) => EvaluationRecord::failed(id, assignment, seed, e.to_string()),
    }
}

/// Runs `budget` trials of random search.
///
/// Trial `i` samples with a generator seeded by `derive_seed(master_seed, i)`;
/// the evaluator receives `derive_seed(that_seed, 0)`. A failing evaluation
/// yields a failed record and the run goes on.
pub fn run_random_search(
    space: &ConfigurationSpace,
    evaluator: &dyn Evaluator,
    budget: usize,
    master_seed: u64,
    execution: Execution,
) -> Result<Vec<EvaluationRecord>> {
    if budget == 0 {
        return Err(Error::InvalidArgument("budget must be at least 1".into()));
    }
    evaluator.check_space(space)?;
    match execution {
        Execution::Sequential => Ok((0..budget)
            .map(|i| run_trial(space, evaluator, master_seed, i))
            .collect()),
        Execution::Parallel { threads } => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::InvalidArgument(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(|| {
                (0..budget)
                    .into_par_iter()
                    .map(|i| run_trial(space, evaluator, master_seed, i))
                    .collect()
            }))
        }
    }
}

/// Gap reports over growing prefixes of one run, one per budget.
pub fn checkpoint_reports(
    records: &[EvaluationRecord],
    budgets: &[usize],
    reference: &ReferencePoint,
) -> Result<Vec<(usize, GapReport)>> {
    for pair in budgets.windows(2) {
        if pair[0] >= pair[1] {
            return Err(Error::InvalidArgument(format!(
                "budgets must be strictly ascending, got {} before {}",
                pair[0], pair[1]
            )));
        }
    }
    budgets
        .iter()
        .map(|&b| {
            if b == 0 || b > records.len() {
                return Err(Error::InvalidArgument(format!(
                    "budget {b} outside 1..={} records",
                    records.len()
                )));
            }
            Ok((b, gap_report(&records[..b], reference)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluators::{Surface, SyntheticProblem};
    use crate::search::ParameterSpec;

    #[test]
    fn log_samples_are_in_bounds_and_log_uniform() {
        let space = ConfigurationSpace::new(vec![ParameterSpec::continuous(
            "alpha",
            1e-6,
            1e-2,
            Scale::Log,
        )])
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 10_000;
        let (a, b) = (1e-6f64.ln(), 1e-2f64.ln());
        let mut u: Vec<f64> = (0..n)
            .map(|_| {
                let v = sample(&space, &mut rng).get_f64("alpha").unwrap();
                assert!((1e-6..=1e-2).contains(&v));
                (v.ln() - a) / (b - a)
            })
            .collect();
        u.sort_by(f64::total_cmp);
        // Kolmogorov-Smirnov statistic against U(0, 1); 1.63/sqrt(n) is the 1% critical value.
        let d = u
            .iter()
            .enumerate()
            .map(|(i, &x)| ((i + 1) as f64 / n as f64 - x).max(x - i as f64 / n as f64))
            .fold(0.0, f64::max);
        assert!(d < 1.63 / (n as f64).sqrt(), "KS statistic {d}");
    }

    #[test]
    fn sampling_is_deterministic_and_in_domain() {
        let space = ConfigurationSpace::random_forest();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..200)
                .map(|_| sample(&space, &mut rng))
                .collect::<Vec<_>>()
        };
        let first = draw(11);
        assert_eq!(first, draw(11));
        for a in &first {
            space.check(a).unwrap();
        }
        let single =
            ConfigurationSpace::new(vec![ParameterSpec::categorical("only", ["x"])]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..20 {
            assert_eq!(sample(&single, &mut rng).get_str("only"), Some("x"));
        }
    }

    #[test]
    fn integer_samples_hit_both_ends() {
        let space = ConfigurationSpace::new(vec![ParameterSpec::integer("k", 1, 3)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let seen: std::collections::BTreeSet<i64> = (0..200)
            .map(|_| match sample(&space, &mut rng).get("k") {
                Some(ParamValue::Int(v)) => *v,
                other => panic!("{other:?}"),
            })
            .collect();
        assert_eq!(seen.into_iter().collect::<Vec<_>>(), vec![1, 2, 3]);
    }

    #[test]
    fn derived_seeds_differ() {
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|i| derive_seed(42, i)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
    }

    fn synthetic(sigma: f64) -> (ConfigurationSpace, SyntheticProblem) {
        let space = ConfigurationSpace::unit_cube(3).unwrap();
        let problem = SyntheticProblem::new(space.clone(), Surface::Convex, sigma).unwrap();
        (space, problem)
    }

    #[test]
    fn budgets_and_determinism() {
        let (space, problem) = synthetic(0.05);
        let runs = run_random_search(&space, &problem, 40, 9, Execution::Sequential).unwrap();
        assert_eq!(runs.len(), 40);
        let par =
            run_random_search(&space, &problem, 40, 9, Execution::Parallel { threads: 4 }).unwrap();
        assert_eq!(runs, par);
        assert!(run_random_search(&space, &problem, 0, 9, Execution::Sequential).is_err());

        let one = run_random_search(&space, &problem, 1, 9, Execution::Sequential).unwrap();
        let front = crate::protocol::validation_front(&one).unwrap();
        assert_eq!(front.len(), 1);
    }

    #[test]
    fn checkpoints() {
        let (space, problem) = synthetic(0.05);
        let records = run_random_search(&space, &problem, 120, 4, Execution::Sequential).unwrap();
        let r = ReferencePoint::unit(2);
        let reports = checkpoint_reports(&records, &[10, 50, 120], &r).unwrap();
        assert_eq!(reports.len(), 3);
        for w in reports.windows(2) {
            assert!(w[1].1.validation_hv >= w[0].1.validation_hv);
        }
        assert_eq!(reports[2].1, gap_report(&records, &r).unwrap());
        assert!(checkpoint_reports(&records, &[50, 10], &r).is_err());
        assert!(checkpoint_reports(&records, &[121], &r).is_err());
    }
}
