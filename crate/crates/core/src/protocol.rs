//! Test-set evaluation of a validation-selected Pareto front.
//!
//! A search produces records with costs on two disjoint data splits. The
//! front is selected on validation costs; what it is worth on unseen data
//! is then bracketed by two fronts built from the same records' test costs:
//!
//! * the *optimistic* front keeps the validation-front members that no
//!   other member beats on test,
//! * the *pessimistic* front keeps the members that beat no other member
//!   on test.
//!
//! The difference of their hypervolumes is the approximation gap. Two
//! searches are compared by hypervolume bracketing, front dominance, or gap
//! size.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::hypervolume::{hypervolume_nd, ReferencePoint, HV_TOLERANCE};
use crate::pareto::{
    anti_dominated_filter, dominates_slice, non_dominated_filter, CostVector, FrontApproximation,
    FrontPoint, RecordId,
};
use crate::search::Assignment;

/// Outcome of evaluating one configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum RecordStatus {
    Complete,
    Failed { reason: String },
}

/// One evaluated hyperparameter configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationRecord {
    pub record_id: RecordId,
    pub assignment: Assignment,
    /// `None` only for failed evaluations.
    pub validation_costs: Option<CostVector>,
    pub test_costs: Option<CostVector>,
    pub seed: u64,
    pub status: RecordStatus,
    pub metadata: BTreeMap<String, String>,
}

impl EvaluationRecord {
    pub fn complete(
        record_id: impl Into<RecordId>,
        assignment: Assignment,
        validation_costs: CostVector,
        test_costs: Option<CostVector>,
        seed: u64,
    ) -> Result<Self> {
        if let Some(test) = &test_costs {
            if test.dim() != validation_costs.dim() {
                return Err(Error::DimensionMismatch {
                    expected: validation_costs.dim(),
                    found: test.dim(),
                });
            }
        }
        Ok(Self {
            record_id: record_id.into(),
            assignment,
            validation_costs: Some(validation_costs),
            test_costs,
            seed,
            status: RecordStatus::Complete,
            metadata: BTreeMap::new(),
        })
    }

    pub fn failed(
        record_id: impl Into<RecordId>,
        assignment: Assignment,
        seed: u64,
        reason: impl Into<String>,
    ) -> Self {
        Self {
            record_id: record_id.into(),
            assignment,
            validation_costs: None,
            test_costs: None,
            seed,
            status: RecordStatus::Failed {
                reason: reason.into(),
            },
            metadata: BTreeMap::new(),
        }
    }

    pub fn is_complete(&self) -> bool {
        matches!(self.status, RecordStatus::Complete) && self.validation_costs.is_some()
    }

    fn test_costs_or_err(&self) -> Result<&CostVector> {
        self.test_costs
            .as_ref()
            .ok_or_else(|| Error::MissingTestCosts {
                record_id: self.record_id.to_string(),
            })
    }
}

/// Completed records, after checking id uniqueness and a common dimension.
fn usable(records: &[EvaluationRecord]) -> Result<Vec<&EvaluationRecord>> {
    let mut seen = HashSet::new();
    for r in records {
        if !seen.insert(&r.record_id) {
            return Err(Error::DuplicateRecord(r.record_id.to_string()));
        }
    }
    let complete: Vec<&EvaluationRecord> = records.iter().filter(|r| r.is_complete()).collect();
    if complete.is_empty() {
        return Err(Error::Empty("no completed evaluation records"));
    }
    let dim = complete[0]
        .validation_costs
        .as_ref()
        .map_or(0, CostVector::dim);
    for r in &complete {
        let v = r.validation_costs.as_ref().map_or(0, CostVector::dim);
        let t = r.test_costs.as_ref().map_or(dim, CostVector::dim);
        if v != dim || t != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: if v != dim { v } else { t },
            });
        }
    }
    Ok(complete)
}

fn validation_members(records: &[EvaluationRecord]) -> Result<Vec<&EvaluationRecord>> {
    let complete = usable(records)?;
    let costs: Vec<&CostVector> = complete
        .iter()
        .map(|r| r.validation_costs.as_ref().expect("complete record"))
        .collect();
    let keep = non_dominated_filter(&costs)?;
    Ok(keep.into_iter().map(|i| complete[i]).collect())
}

/// Pareto front of the validation costs over all completed records.
pub fn validation_front(records: &[EvaluationRecord]) -> Result<FrontApproximation> {
    let points = validation_members(records)?
        .into_iter()
        .map(|r| FrontPoint {
            record_id: r.record_id.clone(),
            costs: r.validation_costs.clone().expect("complete record"),
        })
        .collect();
    Ok(FrontApproximation::from_filtered(points))
}

/// Test costs of the validation-front members, in front order.
fn members_on_test(records: &[EvaluationRecord]) -> Result<Vec<FrontPoint>> {
    validation_members(records)?
        .into_iter()
        .map(|r| {
            Ok(FrontPoint {
                record_id: r.record_id.clone(),
                costs: r.test_costs_or_err()?.clone(),
            })
        })
        .collect()
}

fn select(points: Vec<FrontPoint>, keep: Vec<usize>) -> FrontApproximation {
    let keep: HashSet<usize> = keep.into_iter().collect();
    FrontApproximation::from_filtered(
        points
            .into_iter()
            .enumerate()
            .filter_map(|(i, p)| keep.contains(&i).then_some(p))
            .collect(),
    )
}

/// Validation-front members that no other member dominates on test.
pub fn optimistic_front(records: &[EvaluationRecord]) -> Result<FrontApproximation> {
    let points = members_on_test(records)?;
    let keep = non_dominated_filter(&points.iter().map(|p| &p.costs).collect::<Vec<_>>())?;
    Ok(select(points, keep))
}

/// Validation-front members that dominate no other member on test.
pub fn pessimistic_front(records: &[EvaluationRecord]) -> Result<FrontApproximation> {
    let points = members_on_test(records)?;
    let keep = anti_dominated_filter(&points.iter().map(|p| &p.costs).collect::<Vec<_>>())?;
    Ok(select(points, keep))
}

/// Pareto front of the test costs of every completed record.
///
/// This is the flawed protocol that selects on test data; it is exposed to
/// measure how much it overstates the optimistic front.
pub fn naive_test_front(records: &[EvaluationRecord]) -> Result<FrontApproximation> {
    let points = usable(records)?
        .into_iter()
        .map(|r| {
            Ok(FrontPoint {
                record_id: r.record_id.clone(),
                costs: r.test_costs_or_err()?.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let keep = non_dominated_filter(&points.iter().map(|p| &p.costs).collect::<Vec<_>>())?;
    Ok(select(points, keep))
}

/// Hypervolume of a front's costs; an empty front has volume zero.
pub fn front_hypervolume(front: &FrontApproximation, reference: &ReferencePoint) -> Result<f64> {
    hypervolume_nd(&front.costs(), reference)
}

/// Hypervolumes of the validation, optimistic and pessimistic fronts.
#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    pub validation_hv: f64,
    pub optimistic_hv: f64,
    pub pessimistic_hv: f64,
    pub approximation_gap: f64,
    pub reference: ReferencePoint,
    pub validation_size: usize,
    pub optimistic_size: usize,
    pub pessimistic_size: usize,
}

/// Builds all three fronts from scratch and measures them.
pub fn gap_report(records: &[EvaluationRecord], reference: &ReferencePoint) -> Result<GapReport> {
    let validation = validation_front(records)?;
    if let Some(dim) = validation.dim() {
        if dim != reference.dim() {
            return Err(Error::DimensionMismatch {
                expected: reference.dim(),
                found: dim,
            });
        }
    }
    let optimistic = optimistic_front(records)?;
    let pessimistic = pessimistic_front(records)?;
    let validation_hv = front_hypervolume(&validation, reference)?;
    let optimistic_hv = front_hypervolume(&optimistic, reference)?;
    let pessimistic_hv = front_hypervolume(&pessimistic, reference)?;
    Ok(GapReport {
        validation_hv,
        optimistic_hv,
        pessimistic_hv,
        approximation_gap: optimistic_hv - pessimistic_hv,
        reference: reference.clone(),
        validation_size: validation.len(),
        optimistic_size: optimistic.len(),
        pessimistic_size: pessimistic.len(),
    })
}

/// Which comparison rule produced a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    HvDifference,
    FrontDominance,
    Gap,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::HvDifference => "hv_difference",
            Criterion::FrontDominance => "front_dominance",
            Criterion::Gap => "gap",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    FirstBetter,
    SecondBetter,
    Incomparable,
}

impl Outcome {
    pub fn swapped(self) -> Self {
        match self {
            Outcome::FirstBetter => Outcome::SecondBetter,
            Outcome::SecondBetter => Outcome::FirstBetter,
            Outcome::Incomparable => Outcome::Incomparable,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::FirstBetter => "first_better",
            Outcome::SecondBetter => "second_better",
            Outcome::Incomparable => "incomparable",
        })
    }
}

/// What a verdict was decided on.
#[derive(Debug, Clone, PartialEq)]
pub enum Evidence {
    Hypervolume {
        first_pessimistic: f64,
        first_optimistic: f64,
        second_pessimistic: f64,
        second_optimistic: f64,
    },
    /// Optimistic-front members of the challenged side that no pessimistic
    /// member of the other side dominates.
    Dominance {
        first_uncovered: Vec<RecordId>,
        second_uncovered: Option<Vec<RecordId>>,
    },
    Gap {
        first_gap: f64,
        second_gap: f64,
        tie_epsilon: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonVerdict {
    pub criterion: Criterion,
    pub outcome: Outcome,
    pub evidence: Evidence,
}

impl fmt::Display for ComparisonVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "criterion: {}", self.criterion)?;
        match &self.evidence {
            Evidence::Hypervolume {
                first_pessimistic,
                first_optimistic,
                second_pessimistic,
                second_optimistic,
            } => {
                writeln!(
                    f,
                    "evidence: A pessimistic {first_pessimistic:.6} optimistic {first_optimistic:.6}; \
                     B pessimistic {second_pessimistic:.6} optimistic {second_optimistic:.6}"
                )?;
            }
            Evidence::Dominance {
                first_uncovered,
                second_uncovered,
            } => {
                let list = |ids: &[RecordId]| {
                    ids.iter()
                        .map(RecordId::as_str)
                        .collect::<Vec<_>>()
                        .join(" ")
                };
                writeln!(
                    f,
                    "evidence: B optimistic members not dominated by A pessimistic: [{}]",
                    list(first_uncovered)
                )?;
                if let Some(second) = second_uncovered {
                    writeln!(
                        f,
                        "evidence: A optimistic members not dominated by B pessimistic: [{}]",
                        list(second)
                    )?;
                }
            }
            Evidence::Gap {
                first_gap,
                second_gap,
                tie_epsilon,
            } => {
                writeln!(
                    f,
                    "evidence: A gap {first_gap:.6}; B gap {second_gap:.6}; tie epsilon {tie_epsilon}"
                )?;
            }
        }
        write!(f, "outcome: {}", self.outcome)
    }
}

/// Hypervolume-difference criterion: one method is better when its
/// pessimistic hypervolume exceeds the other's optimistic hypervolume.
pub fn compare_hv(first: &GapReport, second: &GapReport) -> Result<ComparisonVerdict> {
    if first.reference != second.reference {
        return Err(Error::ReferenceMismatch {
            first: first.reference.values().to_vec(),
            second: second.reference.values().to_vec(),
        });
    }
    let outcome = if first.pessimistic_hv > second.optimistic_hv + HV_TOLERANCE {
        Outcome::FirstBetter
    } else if second.pessimistic_hv > first.optimistic_hv + HV_TOLERANCE {
        Outcome::SecondBetter
    } else {
        Outcome::Incomparable
    };
    Ok(ComparisonVerdict {
        criterion: Criterion::HvDifference,
        outcome,
        evidence: Evidence::Hypervolume {
            first_pessimistic: first.pessimistic_hv,
            first_optimistic: first.optimistic_hv,
            second_pessimistic: second.pessimistic_hv,
            second_optimistic: second.optimistic_hv,
        },
    })
}

fn uncovered(attacker: &FrontApproximation, target: &FrontApproximation) -> Result<Vec<RecordId>> {
    if attacker.is_empty() || target.is_empty() {
        return Err(Error::Empty("front for dominance comparison"));
    }
    if attacker.dim() != target.dim() {
        return Err(Error::DimensionMismatch {
            expected: attacker.dim().unwrap_or(0),
            found: target.dim().unwrap_or(0),
        });
    }
    Ok(target
        .points()
        .iter()
        .filter(|t| {
            !attacker
                .points()
                .iter()
                .any(|a| dominates_slice(&a.costs, &t.costs))
        })
        .map(|t| t.record_id.clone())
        .collect())
}

/// Front-dominance criterion in one direction: `first_pessimistic` wins when
/// each point of `second_optimistic` is strictly dominated by one of its
/// points. Otherwise the pair is incomparable in this direction.
pub fn compare_dominance(
    first_pessimistic: &FrontApproximation,
    second_optimistic: &FrontApproximation,
) -> Result<ComparisonVerdict> {
    let left = uncovered(first_pessimistic, second_optimistic)?;
    let outcome = if left.is_empty() {
        Outcome::FirstBetter
    } else {
        Outcome::Incomparable
    };
    Ok(ComparisonVerdict {
        criterion: Criterion::FrontDominance,
        outcome,
        evidence: Evidence::Dominance {
            first_uncovered: left,
            second_uncovered: None,
        },
    })
}

/// Front-dominance criterion checked in both directions on two record sets.
pub fn compare_fronts(
    first: &[EvaluationRecord],
    second: &[EvaluationRecord],
) -> Result<ComparisonVerdict> {
    let first_pess = pessimistic_front(first)?;
    let first_opt = optimistic_front(first)?;
    let second_pess = pessimistic_front(second)?;
    let second_opt = optimistic_front(second)?;
    let first_uncovered = uncovered(&first_pess, &second_opt)?;
    let second_uncovered = uncovered(&second_pess, &first_opt)?;
    let outcome = match (first_uncovered.is_empty(), second_uncovered.is_empty()) {
        (true, false) => Outcome::FirstBetter,
        (false, true) => Outcome::SecondBetter,
        // Mutual coverage cannot happen under strict dominance, but a tie is
        // the only honest answer if it ever did.
        _ => Outcome::Incomparable,
    };
    Ok(ComparisonVerdict {
        criterion: Criterion::FrontDominance,
        outcome,
        evidence: Evidence::Dominance {
            first_uncovered,
            second_uncovered: Some(second_uncovered),
        },
    })
}

/// Gap criterion: the smaller approximation gap is the more robust front.
/// Gaps within `tie_epsilon` of each other are incomparable.
pub fn compare_gap(
    first: &GapReport,
    second: &GapReport,
    tie_epsilon: f64,
) -> Result<ComparisonVerdict> {
    if !tie_epsilon.is_finite() || tie_epsilon < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tie epsilon must be a finite non-negative number, got {tie_epsilon}"
        )));
    }
    let (a, b) = (first.approximation_gap, second.approximation_gap);
    let outcome = if a < b - tie_epsilon {
        Outcome::FirstBetter
    } else if b < a - tie_epsilon {
        Outcome::SecondBetter
    } else {
        Outcome::Incomparable
    };
    Ok(ComparisonVerdict {
        criterion: Criterion::Gap,
        outcome,
        evidence: Evidence::Gap {
            first_gap: a,
            second_gap: b,
            tie_epsilon,
        },
    })
}
