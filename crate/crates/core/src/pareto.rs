//! Objective-space representation, strict Pareto dominance and
//! non-dominated filtering.
//!
//! Everything downstream works on the canonical minimization scale: an
//! objective that is naturally maximized (precision, recall, accuracy) is
//! mapped to a loss by [`canonicalize`] before it enters any front.

use std::collections::HashSet;
use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Optimization direction of a single objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Minimize,
    Maximize,
}

/// Name, direction and optional known value range of one objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveSpec {
    pub name: String,
    pub direction: Direction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub known_range: Option<(f64, f64)>,
}

impl ObjectiveSpec {
    pub fn minimize(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            direction: Direction::Minimize,
            known_range: None,
        }
    }

    pub fn maximize(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            direction: Direction::Maximize,
            known_range: None,
        }
    }

    pub fn with_range(mut self, lower: f64, upper: f64) -> Self {
        self.known_range = Some((lower, upper));
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(Error::InvalidObjective("objective name is empty".into()));
        }
        if let Some((lo, hi)) = self.known_range {
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return Err(Error::InvalidObjective(format!(
                    "objective `{}` has invalid range [{lo}, {hi}]",
                    self.name
                )));
            }
        }
        Ok(())
    }

    /// Whether canonical costs of this objective are known to lie in `[0, 1]`.
    pub fn is_unit_loss(&self) -> bool {
        self.known_range == Some((0.0, 1.0))
    }

    /// Maps a raw measurement onto the minimization scale.
    pub fn to_cost(&self, raw: f64) -> f64 {
        match (self.direction, self.known_range) {
            (Direction::Minimize, _) => raw,
            (Direction::Maximize, Some((_, hi))) => hi - raw,
            (Direction::Maximize, None) => -raw,
        }
    }

    /// Inverse of [`ObjectiveSpec::to_cost`].
    pub fn to_raw(&self, cost: f64) -> f64 {
        match (self.direction, self.known_range) {
            (Direction::Minimize, _) => cost,
            (Direction::Maximize, Some((_, hi))) => hi - cost,
            (Direction::Maximize, None) => -cost,
        }
    }
}

/// Checks a whole objective list: every spec valid, names unique.
pub fn validate_objectives(specs: &[ObjectiveSpec]) -> Result<()> {
    let mut seen = HashSet::new();
    for spec in specs {
        spec.validate()?;
        if !seen.insert(spec.name.as_str()) {
            return Err(Error::InvalidObjective(format!(
                "duplicate objective name `{}`",
                spec.name
            )));
        }
    }
    Ok(())
}

/// True when every objective is a canonical loss bounded by `[0, 1]`, in
/// which case the all-ones reference point is a sensible default.
pub fn all_unit_losses(specs: &[ObjectiveSpec]) -> bool {
    !specs.is_empty() && specs.iter().all(ObjectiveSpec::is_unit_loss)
}

/// A point in objective space on the canonical minimization scale.
///
/// Entries are always finite; construction rejects NaN and infinities.
#[derive(Debug, Clone, PartialEq)]
pub struct CostVector(Vec<f64>);

impl CostVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("cost vector"));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self(values))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for CostVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for CostVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for CostVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

/// Converts raw objective measurements into a canonical cost vector.
pub fn canonicalize(raw: &[f64], specs: &[ObjectiveSpec]) -> Result<CostVector> {
    if raw.len() != specs.len() {
        return Err(Error::DimensionMismatch {
            expected: specs.len(),
            found: raw.len(),
        });
    }
    if let Some(index) = raw.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let values = raw
        .iter()
        .zip(specs)
        .map(|(&v, spec)| spec.to_cost(v))
        .collect();
    CostVector::new(values)
}

/// Strict Pareto dominance: `a` is no worse than `b` everywhere and strictly
/// better somewhere.
pub fn dominates(a: &CostVector, b: &CostVector) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(dominates_slice(a, b))
}

/// Dominance on raw slices of equal length.
pub(crate) fn dominates_slice(a: &[f64], b: &[f64]) -> bool {
    debug_assert_eq!(a.len(), b.len());
    let mut strictly_better = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly_better = true;
        }
    }
    strictly_better
}

pub(crate) fn uniform_dimension<P: AsRef<[f64]>>(points: &[P]) -> Result<usize> {
    let first = points.first().ok_or(Error::Empty("point set"))?;
    let dim = first.as_ref().len();
    for p in points {
        if p.as_ref().len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.as_ref().len(),
            });
        }
    }
    Ok(dim)
}

/// Indices of the points not dominated by any other point, in input order.
///
/// Exact duplicates never dominate each other, so every copy of a
/// non-dominated vector is retained.
pub fn non_dominated_filter<P: AsRef<[f64]>>(points: &[P]) -> Result<Vec<usize>> {
    uniform_dimension(points)?;
    Ok(filter_by(points, dominates_slice))
}

/// Indices of the points that dominate no other point, in input order.
///
/// This is [`non_dominated_filter`] under the reversed relation.
pub fn anti_dominated_filter<P: AsRef<[f64]>>(points: &[P]) -> Result<Vec<usize>> {
    uniform_dimension(points)?;
    Ok(filter_by(points, |other, this| {
        dominates_slice(this, other)
    }))
}

// O(n^2) pairwise scan; `excludes(other, this)` removes `this`.
fn filter_by<P, F>(points: &[P], excludes: F) -> Vec<usize>
where
    P: AsRef<[f64]>,
    F: Fn(&[f64], &[f64]) -> bool,
{
    (0..points.len())
        .filter(|&i| {
            let this = points[i].as_ref();
            !points
                .iter()
                .enumerate()
                .any(|(j, other)| j != i && excludes(other.as_ref(), this))
        })
        .collect()
}

/// Identifier of an evaluated configuration.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RecordId(String);

impl RecordId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for RecordId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<String> for RecordId {
    fn from(s: String) -> Self {
        Self(s)
    }
}

impl From<&str> for RecordId {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

/// One member of a front approximation.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontPoint {
    pub record_id: RecordId,
    pub costs: CostVector,
}

/// A set of mutually non-dominated cost vectors, each tied to the record it
/// came from.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FrontApproximation {
    points: Vec<FrontPoint>,
}

impl FrontApproximation {
    /// Builds a front, checking pairwise non-dominance, uniform dimension and
    /// distinct record ids.
    pub fn new(points: Vec<FrontPoint>) -> Result<Self> {
        if !points.is_empty() {
            let costs: Vec<&[f64]> = points.iter().map(|p| p.costs.values()).collect();
            uniform_dimension(&costs)?;
            for (i, a) in costs.iter().enumerate() {
                for (j, b) in costs.iter().enumerate() {
                    if i != j && dominates_slice(a, b) {
                        return Err(Error::InvalidArgument(format!(
                            "front member `{}` dominates `{}`",
                            points[i].record_id, points[j].record_id
                        )));
                    }
                }
            }
        }
        let mut seen = HashSet::new();
        for p in &points {
            if !seen.insert(&p.record_id) {
                return Err(Error::DuplicateRecord(p.record_id.to_string()));
            }
        }
        Ok(Self { points })
    }

    /// Filters `candidates` down to its non-dominated members.
    pub fn from_candidates(candidates: Vec<FrontPoint>) -> Result<Self> {
        let keep = non_dominated_filter(
            &candidates
                .iter()
                .map(|p| p.costs.values())
                .collect::<Vec<_>>(),
        )?;
        let keep: HashSet<usize> = keep.into_iter().collect();
        let points = candidates
            .into_iter()
            .enumerate()
            .filter_map(|(i, p)| keep.contains(&i).then_some(p))
            .collect();
        Self::new(points)
    }

    // Callers guarantee the front invariants.
    pub(crate) fn from_filtered(points: Vec<FrontPoint>) -> Self {
        Self { points }
    }

    pub fn points(&self) -> &[FrontPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.points.first().map(|p| p.costs.dim())
    }

    pub fn record_ids(&self) -> impl Iterator<Item = &RecordId> {
        self.points.iter().map(|p| &p.record_id)
    }

    pub fn contains(&self, id: &RecordId) -> bool {
        self.points.iter().any(|p| &p.record_id == id)
    }

    pub fn costs(&self) -> Vec<&CostVector> {
        self.points.iter().map(|p| &p.costs).collect()
    }
}
