//! Text serialization of runs: archives, external record files, gap tables
//! and plot data.
//!
//! An archive is a format tag line, a TOML manifest, a `%%records` marker
//! and a CSV record table:
//!
//! ```text
//! # paretogap archive v1
//! tool_version = "0.1.0"
//! evaluator = "synthetic:convex:0.05"
//! ...
//! %%records
//! record_id,status,reason,seed,f1_val,f2_val,f1_test,f2_test,x0,x1
//! trial-0000,complete,,1234,0.31,0.52,0.29,0.55,0.30,0.47
//! ```
//!
//! Costs are stored canonically (minimized) with shortest round-trip float
//! formatting, so reading an archive back yields identical records and
//! writing the same run twice yields identical bytes.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypervolume::ReferencePoint;
use crate::pareto::{
    canonicalize, validate_objectives, CostVector, Direction, ObjectiveSpec, RecordId,
};
use crate::protocol::{
    naive_test_front, optimistic_front, pessimistic_front, validation_front, EvaluationRecord,
    GapReport, RecordStatus,
};
use crate::search::{Assignment, ConfigurationSpace, ParamValue};

pub const FORMAT_TAG: &str = "# paretogap archive v1";
const RECORDS_MARKER: &str = "%%records";
const FIXED_COLUMNS: [&str; 4] = ["record_id", "status", "reason", "seed"];
const METADATA_COLUMN: &str = "metadata";

/// Everything about a run except its records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool_version: String,
    /// Evaluator identifier, e.g. `synthetic:convex:0.05` or `linear-sgd`.
    pub evaluator: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    /// Number of records.
    pub budget: usize,
    /// Suggested checkpoint budgets for analysis.
    #[serde(default)]
    pub budgets: Vec<usize>,
    /// Reference point in canonical cost space.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<Vec<f64>>,
    pub objectives: Vec<ObjectiveSpec>,
    /// Free-form provenance (dataset, split seed, thread count is never stored).
    #[serde(default)]
    pub notes: BTreeMap<String, String>,
    /// Search space in its text format.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<String>,
}

impl Manifest {
    pub fn new(evaluator: impl Into<String>, objectives: Vec<ObjectiveSpec>) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            evaluator: evaluator.into(),
            master_seed: None,
            budget: 0,
            budgets: Vec::new(),
            reference: None,
            objectives,
            notes: BTreeMap::new(),
            space: None,
        }
    }

    /// The recorded reference point, else the unit point if every objective
    /// is a `[0, 1]` loss.
    pub fn reference_point(&self) -> Option<ReferencePoint> {
        match &self.reference {
            Some(r) => ReferencePoint::new(r.clone()).ok(),
            None => ReferencePoint::default_for(&self.objectives),
        }
    }

    pub fn parsed_space(&self) -> Result<Option<ConfigurationSpace>> {
        self.space
            .as_deref()
            .map(ConfigurationSpace::parse)
            .transpose()
    }
}

/// A self-describing run: manifest plus records.
#[derive(Debug, Clone, PartialEq)]
pub struct RunArchive {
    pub manifest: Manifest,
    pub records: Vec<EvaluationRecord>,
}

impl RunArchive {
    /// Checks manifest/record consistency.
    pub fn new(mut manifest: Manifest, records: Vec<EvaluationRecord>) -> Result<Self> {
        manifest.budget = records.len();
        let archive = Self { manifest, records };
        archive.validate()?;
        Ok(archive)
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.manifest;
        validate_objectives(&m.objectives)?;
        let dim = m.objectives.len();
        if m.budget != self.records.len() {
            return Err(Error::Archive(format!(
                "manifest budget {} but {} records",
                m.budget,
                self.records.len()
            )));
        }
        if let Some(r) = &m.reference {
            if r.len() != dim {
                return Err(Error::Archive(format!(
                    "reference has {} values for {dim} objectives",
                    r.len()
                )));
            }
            ReferencePoint::new(r.clone())?;
        }
        if let Some(&b) = m.budgets.iter().find(|&&b| b == 0 || b > m.budget) {
            return Err(Error::Archive(format!(
                "checkpoint budget {b} outside 1..={}",
                m.budget
            )));
        }
        let space = m.parsed_space()?;
        let mut ids = std::collections::HashSet::new();
        for r in &self.records {
            if !ids.insert(&r.record_id) {
                return Err(Error::DuplicateRecord(r.record_id.to_string()));
            }
            for c in r.validation_costs.iter().chain(&r.test_costs) {
                if c.dim() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: c.dim(),
                    });
                }
            }
            if let Some(space) = &space {
                if r.is_complete() {
                    space.check(&r.assignment)?;
                }
            }
        }
        Ok(())
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        self.validate()?;
        let manifest =
            toml::to_string(&self.manifest).map_err(|e| Error::Archive(e.to_string()))?;
        writeln!(out, "{FORMAT_TAG}")?;
        out.write_all(manifest.as_bytes())?;
        writeln!(out, "{RECORDS_MARKER}")?;

        let names: Vec<&str> = self
            .manifest
            .objectives
            .iter()
            .map(|o| o.name.as_str())
            .collect();
        let params = self.parameter_columns();
        let with_metadata = self.records.iter().any(|r| !r.metadata.is_empty());
        let mut csv = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        let mut header: Vec<String> = FIXED_COLUMNS.iter().map(|s| s.to_string()).collect();
        header.extend(cost_columns(&names));
        header.extend(params.iter().cloned());
        if with_metadata {
            header.push(METADATA_COLUMN.into());
        }
        csv.write_record(&header)?;
        for r in &self.records {
            let (status, reason) = match &r.status {
                RecordStatus::Complete => ("complete", ""),
                RecordStatus::Failed { reason } => ("failed", reason.as_str()),
            };
            let mut row = vec![
                r.record_id.to_string(),
                status.into(),
                reason.into(),
                r.seed.to_string(),
            ];
            for costs in [&r.validation_costs, &r.test_costs] {
                match costs {
                    Some(c) => row.extend(c.iter().map(|v| format!("{v:?}"))),
                    None => row.extend(names.iter().map(|_| String::new())),
                }
            }
            row.extend(
                params
                    .iter()
                    .map(|p| r.assignment.get(p).map_or(String::new(), |v| v.to_string())),
            );
            if with_metadata {
                row.push(
                    r.metadata
                        .iter()
                        .map(|(k, v)| format!("{k}={v}"))
                        .collect::<Vec<_>>()
                        .join("\u{1f}"),
                );
            }
            csv.write_record(&row)?;
        }
        csv.flush()?;
        Ok(())
    }

    pub fn to_text(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Archive(e.to_string()))
    }

    pub fn read<R: Read>(mut input: R) -> Result<Self> {
        let mut text = String::new();
        input.read_to_string(&mut text)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let body = text
            .strip_prefix(FORMAT_TAG)
            .and_then(|rest| rest.strip_prefix('\n'))
            .ok_or_else(|| Error::Archive(format!("missing format tag `{FORMAT_TAG}`")))?;
        let marker = format!("\n{RECORDS_MARKER}\n");
        let split = body
            .find(&marker)
            .ok_or_else(|| Error::Archive(format!("missing `{RECORDS_MARKER}` marker")))?;
        let manifest: Manifest = toml::from_str(&body[..split + 1])
            .map_err(|e| Error::Archive(format!("manifest: {e}")))?;
        let table = &body[split + marker.len()..];

        let space = manifest.parsed_space()?;
        let names: Vec<&str> = manifest
            .objectives
            .iter()
            .map(|o| o.name.as_str())
            .collect();
        let dim = names.len();
        let mut reader = csv::ReaderBuilder::new().from_reader(table.as_bytes());
        let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        let expected: Vec<String> = FIXED_COLUMNS
            .iter()
            .map(|s| s.to_string())
            .chain(cost_columns(&names))
            .collect();
        if header.len() < expected.len() || header[..expected.len()] != expected[..] {
            return Err(Error::Archive(format!(
                "record header must start with {}",
                expected.join(",")
            )));
        }
        let mut params: Vec<&str> = header[expected.len()..]
            .iter()
            .map(String::as_str)
            .collect();
        let with_metadata = params.last() == Some(&METADATA_COLUMN);
        if with_metadata {
            params.pop();
        }

        let mut records = Vec::new();
        for (n, row) in reader.records().enumerate() {
            let row = row?;
            let line = n + 2;
            let field = |i: usize| row.get(i).unwrap_or("");
            let seed: u64 = field(3).parse().map_err(|_| {
                Error::Archive(format!("record row {line}: bad seed `{}`", field(3)))
            })?;
            let mut assignment = Assignment::new();
            for (k, name) in params.iter().enumerate() {
                let text = field(expected.len() + k);
                if text.is_empty() {
                    continue;
                }
                let value = match space.as_ref().and_then(|s| s.get(name)) {
                    Some(p) => p.parse_value(text)?,
                    None => ParamValue::Categorical(text.to_string()),
                };
                assignment.push(*name, value);
            }
            let costs = |offset: usize| -> Result<Option<CostVector>> {
                let cells: Vec<&str> = (0..dim).map(|k| field(4 + offset + k)).collect();
                if cells.iter().all(|c| c.is_empty()) {
                    return Ok(None);
                }
                cells
                    .iter()
                    .map(|c| {
                        c.parse::<f64>().map_err(|_| {
                            Error::Archive(format!("record row {line}: bad cost `{c}`"))
                        })
                    })
                    .collect::<Result<Vec<f64>>>()
                    .and_then(CostVector::new)
                    .map(Some)
            };
            let (validation, test) = (costs(0)?, costs(dim)?);
            let mut record = match field(1) {
                "complete" => {
                    let validation = validation.ok_or_else(|| {
                        Error::Archive(format!("record row {line}: complete without costs"))
                    })?;
                    EvaluationRecord::complete(field(0), assignment, validation, test, seed)?
                }
                "failed" => EvaluationRecord::failed(field(0), assignment, seed, field(2)),
                other => {
                    return Err(Error::Archive(format!(
                        "record row {line}: unknown status `{other}`"
                    )))
                }
            };
            if with_metadata {
                let cell = field(expected.len() + params.len());
                for pair in cell.split('\u{1f}').filter(|p| !p.is_empty()) {
                    let (k, v) = pair.split_once('=').ok_or_else(|| {
                        Error::Archive(format!("record row {line}: bad metadata `{pair}`"))
                    })?;
                    record.metadata.insert(k.to_string(), v.to_string());
                }
            }
            records.push(record);
        }
        let archive = Self { manifest, records };
        archive.validate()?;
        Ok(archive)
    }

    /// Space parameters in declaration order, else assignment names in
    /// first-seen order.
    fn parameter_columns(&self) -> Vec<String> {
        if let Ok(Some(space)) = self.manifest.parsed_space() {
            return space.parameters().iter().map(|p| p.name.clone()).collect();
        }
        let mut names: Vec<String> = Vec::new();
        for r in &self.records {
            for (k, _) in r.assignment.iter() {
                if !names.iter().any(|n| n == k) {
                    names.push(k.to_string());
                }
            }
        }
        names
    }
}

fn cost_columns(names: &[&str]) -> Vec<String> {
    let val = names.iter().map(|n| format!("{n}_val"));
    let test = names.iter().map(|n| format!("{n}_test"));
    val.chain(test).collect()
}

/// True if `text` looks like an archive rather than a record file.
pub fn is_archive(text: &str) -> bool {
    text.starts_with(FORMAT_TAG)
}

/// Reads an external record file.
///
/// The header must contain `record_id` and, for every objective, a
/// `<name>_val` column and optionally a `<name>_test` column; objectives
/// are taken from the `_val` columns in order. Every other column is an
/// assignment column kept as text. Values are in the objective's own
/// units; lines before the header of the form
///
/// ```text
/// #! objective precision maximize 0 1
/// ```
///
/// declare direction and optional range (default: minimize, no range).
/// A row with empty validation cells becomes a failed record.
pub fn read_record_file<R: Read>(
    mut input: R,
) -> Result<(Vec<ObjectiveSpec>, Vec<EvaluationRecord>)> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let mut declared: BTreeMap<String, ObjectiveSpec> = BTreeMap::new();
    let mut body_start = 0;
    for (n, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if let Some(decl) = trimmed.strip_prefix("#!") {
            let spec = parse_objective_decl(decl).map_err(|message| Error::Parse {
                line: n + 1,
                column: 1,
                message,
            })?;
            declared.insert(spec.name.clone(), spec);
        } else if !(trimmed.is_empty() || trimmed.starts_with('#')) {
            break;
        }
        body_start += line.len() + 1;
    }
    let header_line = text[..body_start].lines().count() + 1;
    let body = &text[body_start.min(text.len())..];

    let mut reader = csv::ReaderBuilder::new().from_reader(body.as_bytes());
    let header: Vec<String> = reader
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let position = |name: &str| header.iter().position(|h| h == name);
    let id_col = position("record_id")
        .ok_or_else(|| Error::Dataset("record file needs a `record_id` column".into()))?;
    let names: Vec<String> = header
        .iter()
        .filter_map(|h| h.strip_suffix("_val").map(str::to_string))
        .collect();
    if names.is_empty() {
        return Err(Error::Dataset(
            "record file has no `<objective>_val` columns".into(),
        ));
    }
    let val_cols: Vec<usize> = names
        .iter()
        .map(|n| position(&format!("{n}_val")).unwrap())
        .collect();
    let test_cols: Vec<Option<usize>> = names
        .iter()
        .map(|n| position(&format!("{n}_test")))
        .collect();
    if test_cols.iter().any(Option::is_some) && test_cols.iter().any(Option::is_none) {
        return Err(Error::Dataset(
            "either every objective has a `_test` column or none does".into(),
        ));
    }
    if let Some(unknown) = declared.keys().find(|k| !names.contains(k)) {
        return Err(Error::Dataset(format!(
            "declared objective `{unknown}` has no `{unknown}_val` column"
        )));
    }
    let objectives: Vec<ObjectiveSpec> = names
        .iter()
        .map(|n| {
            declared
                .remove(n)
                .unwrap_or_else(|| ObjectiveSpec::minimize(n.clone()))
        })
        .collect();
    validate_objectives(&objectives)?;
    let used: Vec<usize> = std::iter::once(id_col)
        .chain(val_cols.iter().copied())
        .chain(test_cols.iter().flatten().copied())
        .collect();
    let assignment_cols: Vec<usize> = (0..header.len()).filter(|c| !used.contains(c)).collect();

    let mut records = Vec::new();
    for (n, row) in reader.records().enumerate() {
        let row = row?;
        let line = header_line + n + 1;
        let cell = |c: usize| row.get(c).unwrap_or("").trim();
        let number = |c: usize| -> Result<f64> {
            cell(c).parse::<f64>().map_err(|_| Error::Parse {
                line,
                column: c + 1,
                message: format!("`{}` in column `{}` is not a number", cell(c), header[c]),
            })
        };
        let mut assignment = Assignment::new();
        for &c in &assignment_cols {
            if !cell(c).is_empty() {
                assignment.push(
                    header[c].clone(),
                    ParamValue::Categorical(cell(c).to_string()),
                );
            }
        }
        let id = RecordId::new(cell(id_col));
        if id.as_str().is_empty() {
            return Err(Error::Parse {
                line,
                column: id_col + 1,
                message: "empty record_id".into(),
            });
        }
        if val_cols.iter().all(|&c| cell(c).is_empty()) {
            records.push(EvaluationRecord::failed(
                id,
                assignment,
                0,
                "no validation costs",
            ));
            continue;
        }
        let raw: Vec<f64> = val_cols.iter().map(|&c| number(c)).collect::<Result<_>>()?;
        let validation = canonicalize(&raw, &objectives)?;
        let test =
            if test_cols[0].is_some() && test_cols.iter().flatten().any(|&c| !cell(c).is_empty()) {
                let raw: Vec<f64> = test_cols
                    .iter()
                    .flatten()
                    .map(|&c| number(c))
                    .collect::<Result<_>>()?;
                Some(canonicalize(&raw, &objectives)?)
            } else {
                None
            };
        records.push(EvaluationRecord::complete(
            id, assignment, validation, test, 0,
        )?);
    }
    Ok((objectives, records))
}

fn parse_objective_decl(decl: &str) -> std::result::Result<ObjectiveSpec, String> {
    let tokens: Vec<&str> = decl.split_whitespace().collect();
    let usage = "expected `#! objective <name> minimize|maximize [lo hi]`";
    match tokens.as_slice() {
        ["objective", name, direction, rest @ ..] => {
            let spec = match *direction {
                "minimize" => ObjectiveSpec::minimize(*name),
                "maximize" => ObjectiveSpec::maximize(*name),
                other => return Err(format!("unknown direction `{other}`; {usage}")),
            };
            match rest {
                [] => Ok(spec),
                [lo, hi] => {
                    let lo: f64 = lo.parse().map_err(|_| format!("bad lower bound `{lo}`"))?;
                    let hi: f64 = hi.parse().map_err(|_| format!("bad upper bound `{hi}`"))?;
                    Ok(spec.with_range(lo, hi))
                }
                _ => Err(usage.into()),
            }
        }
        _ => Err(usage.into()),
    }
}

/// Gap table as CSV, one row per budget.
pub fn gap_table_csv(rows: &[(usize, GapReport)]) -> String {
    let mut out = String::from(
        "budget,validation_hv,pessimistic_hv,optimistic_hv,approximation_gap,validation_size,pessimistic_size,optimistic_size\n",
    );
    for (budget, r) in rows {
        let _ = writeln!(
            out,
            "{budget},{:?},{:?},{:?},{:?},{},{},{}",
            r.validation_hv,
            r.pessimistic_hv,
            r.optimistic_hv,
            r.approximation_gap,
            r.validation_size,
            r.pessimistic_size,
            r.optimistic_size
        );
    }
    out
}

/// Gap table for humans, four decimals.
pub fn gap_table_text(rows: &[(usize, GapReport)]) -> String {
    let mut out = format!(
        "{:>8}  {:>13}  {:>14}  {:>13}  {:>17}\n",
        "budget", "Validation HV", "Pessimistic HV", "Optimistic HV", "Approximation Gap"
    );
    for (budget, r) in rows {
        let _ = writeln!(
            out,
            "{budget:>8}  {:>13.4}  {:>14.4}  {:>13.4}  {:>17.4}",
            r.validation_hv, r.pessimistic_hv, r.optimistic_hv, r.approximation_gap
        );
    }
    out
}

/// Point sets that can be exported for plotting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointSet {
    Validation,
    Optimistic,
    Pessimistic,
    NaiveTest,
    AllPoints,
}

impl PointSet {
    pub const ALL: [PointSet; 5] = [
        PointSet::Validation,
        PointSet::Optimistic,
        PointSet::Pessimistic,
        PointSet::NaiveTest,
        PointSet::AllPoints,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PointSet::Validation => "validation",
            PointSet::Optimistic => "optimistic",
            PointSet::Pessimistic => "pessimistic",
            PointSet::NaiveTest => "naive-test",
            PointSet::AllPoints => "all-points",
        }
    }
}

impl fmt::Display for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PointSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let valid: Vec<&str> = Self::ALL.iter().map(|p| p.name()).collect();
                Error::InvalidArgument(format!(
                    "unknown point set `{s}`; valid: {}",
                    valid.join(", ")
                ))
            })
    }
}

/// Plot rows for one point set as CSV.
///
/// Columns: `record_id`, each objective's validation and test value in the
/// objective's own units, then 0/1 membership flags for the validation,
/// optimistic, pessimistic and naive-test fronts.
pub fn plot_data_csv(
    records: &[EvaluationRecord],
    objectives: &[ObjectiveSpec],
    which: PointSet,
) -> Result<String> {
    let fronts = [
        validation_front(records)?,
        optimistic_front(records)?,
        pessimistic_front(records)?,
        naive_test_front(records)?,
    ];
    let selected: Vec<&EvaluationRecord> = match which {
        PointSet::AllPoints => records.iter().collect(),
        _ => {
            let front = match which {
                PointSet::Validation => &fronts[0],
                PointSet::Optimistic => &fronts[1],
                PointSet::Pessimistic => &fronts[2],
                _ => &fronts[3],
            };
            records
                .iter()
                .filter(|r| front.contains(&r.record_id))
                .collect()
        }
    };
    let mut out = String::from("record_id");
    for split in ["val", "test"] {
        for o in objectives {
            let _ = write!(out, ",{}_{split}", o.name);
        }
    }
    out.push_str(
        ",on_validation_front,on_optimistic_front,on_pessimistic_front,on_naive_test_front\n",
    );
    let raw = |o: &ObjectiveSpec, v: f64| match o.direction {
        Direction::Minimize => v,
        Direction::Maximize => o.to_raw(v),
    };
    for r in selected {
        out.push_str(&csv_escape(r.record_id.as_str()));
        for costs in [&r.validation_costs, &r.test_costs] {
            for (k, o) in objectives.iter().enumerate() {
                match costs {
                    Some(c) => {
                        let _ = write!(out, ",{:?}", raw(o, c[k]));
                    }
                    None => out.push(','),
                }
            }
        }
        for front in &fronts {
            let _ = write!(out, ",{}", u8::from(front.contains(&r.record_id)));
        }
        out.push('\n');
    }
    Ok(out)
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
