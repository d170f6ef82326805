//! Tabular binary-classification data: CSV ingestion with a schema sidecar,
//! a bundled synthetic stand-in for the German credit data, and stratified
//! train/validation/test splitting.
//!
//! Schema sidecar format, one column per line (`#` comments):
//!
//! ```text
//! duration         numeric
//! checking_status  categorical
//! class            label bad      # value that marks the positive class
//! row_id           ignore
//! ```
//!
//! Without a positive value the label column must hold `0`/`1`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnKind {
    Numeric,
    Categorical,
    Label { positive: Option<String> },
    Ignore,
}

/// Column declarations for a CSV file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    pub columns: Vec<(String, ColumnKind)>,
}

impl Schema {
    pub fn parse(text: &str) -> Result<Self> {
        let mut columns: Vec<(String, ColumnKind)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("");
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.is_empty() {
                continue;
            }
            let err = |column: usize, message: String| Error::Parse {
                line: idx + 1,
                column,
                message,
            };
            let col_of = |tok: &str| line.find(tok).map_or(1, |b| line[..b].chars().count() + 1);
            let kind = match (toks.get(1).copied(), toks.len()) {
                (Some("numeric"), 2) => ColumnKind::Numeric,
                (Some("categorical"), 2) => ColumnKind::Categorical,
                (Some("ignore"), 2) => ColumnKind::Ignore,
                (Some("label"), 2) => ColumnKind::Label { positive: None },
                (Some("label"), 3) => ColumnKind::Label {
                    positive: Some(toks[2].to_owned()),
                },
                (None, _) => {
                    return Err(err(
                        line.chars().count() + 1,
                        "expected a column kind".into(),
                    ))
                }
                (Some(k), _) if ["numeric", "categorical", "ignore", "label"].contains(&k) => {
                    return Err(err(
                        col_of(toks[toks.len() - 1]),
                        "unexpected trailing token".into(),
                    ))
                }
                (Some(k), _) => {
                    return Err(err(
                        col_of(k),
                        format!(
                        "unknown column kind `{k}` (expected numeric, categorical, label, ignore)"
                    ),
                    ))
                }
            };
            if columns.iter().any(|(n, _)| n == toks[0]) {
                return Err(err(
                    col_of(toks[0]),
                    format!("duplicate column `{}`", toks[0]),
                ));
            }
            columns.push((toks[0].to_owned(), kind));
        }
        let labels = columns
            .iter()
            .filter(|(_, k)| matches!(k, ColumnKind::Label { .. }))
            .count();
        if labels != 1 {
            return Err(Error::Dataset(format!(
                "schema must declare exactly one label column, found {labels}"
            )));
        }
        Ok(Self { columns })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (name, kind) in &self.columns {
            let kind = match kind {
                ColumnKind::Numeric => "numeric".to_owned(),
                ColumnKind::Categorical => "categorical".to_owned(),
                ColumnKind::Ignore => "ignore".to_owned(),
                ColumnKind::Label { positive: None } => "label".to_owned(),
                ColumnKind::Label { positive: Some(p) } => format!("label {p}"),
            };
            out.push_str(&format!("{name} {kind}\n"));
        }
        out
    }
}

/// One feature column.
#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    Numeric { name: String, values: Vec<f64> },
    Categorical { name: String, values: Vec<String> },
}

impl Column {
    pub fn name(&self) -> &str {
        match self {
            Column::Numeric { name, .. } | Column::Categorical { name, .. } => name,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Column::Numeric { values, .. } => values.len(),
            Column::Categorical { values, .. } => values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Feature columns plus a binary label, validated on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularDataset {
    features: Vec<Column>,
    labels: Vec<u8>,
    label_name: String,
}

impl TabularDataset {
    pub fn new(
        features: Vec<Column>,
        labels: Vec<u8>,
        label_name: impl Into<String>,
    ) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Dataset("dataset has no rows".into()));
        }
        if let Some(row) = labels.iter().position(|&l| l > 1) {
            return Err(Error::Dataset(format!("label at row {row} is not 0 or 1")));
        }
        let positives = labels.iter().filter(|&&l| l == 1).count();
        if positives == 0 || positives == labels.len() {
            return Err(Error::Dataset("both classes must be present".into()));
        }
        for col in &features {
            if col.len() != labels.len() {
                return Err(Error::Dataset(format!(
                    "column `{}` has {} rows, labels have {}",
                    col.name(),
                    col.len(),
                    labels.len()
                )));
            }
            if let Column::Numeric { name, values } = col {
                if let Some(row) = values.iter().position(|v| !v.is_finite()) {
                    return Err(Error::Dataset(format!(
                        "column `{name}` row {row} is not finite"
                    )));
                }
            }
        }
        Ok(Self {
            features,
            labels,
            label_name: label_name.into(),
        })
    }

    pub fn features(&self) -> &[Column] {
        &self.features
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn rows(&self) -> usize {
        self.labels.len()
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&l| l == 1).count()
    }

    pub fn categorical_count(&self) -> usize {
        self.features
            .iter()
            .filter(|c| matches!(c, Column::Categorical { .. }))
            .count()
    }

    /// Reads comma-separated data with a header row, typed by `schema`.
    pub fn read_csv<R: Read>(reader: R, schema: &Schema) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header: Vec<String> = csv.headers()?.iter().map(str::to_owned).collect();
        let position: HashMap<&str, usize> = header
            .iter()
            .enumerate()
            .map(|(i, h)| (h.as_str(), i))
            .collect();
        for (name, _) in &schema.columns {
            if !position.contains_key(name.as_str()) {
                return Err(Error::Dataset(format!(
                    "schema column `{name}` missing from CSV header"
                )));
            }
        }
        let declared: HashSet<&str> = schema.columns.iter().map(|(n, _)| n.as_str()).collect();
        if let Some(extra) = header.iter().find(|h| !declared.contains(h.as_str())) {
            return Err(Error::Dataset(format!(
                "CSV column `{extra}` is not declared in the schema"
            )));
        }

        let mut raw: Vec<Vec<String>> = vec![Vec::new(); schema.columns.len()];
        for (row, record) in csv.records().enumerate() {
            let record = record?;
            for (slot, (name, _)) in raw.iter_mut().zip(&schema.columns) {
                let cell = record.get(position[name.as_str()]).unwrap_or("");
                if cell.is_empty() || cell == "?" {
                    return Err(Error::Dataset(format!(
                        "missing value in column `{name}` at data row {}",
                        row + 1
                    )));
                }
                slot.push(cell.to_owned());
            }
        }

        let mut features = Vec::new();
        let mut labels = None;
        let mut label_name = String::new();
        for ((name, kind), cells) in schema.columns.iter().zip(raw) {
            match kind {
                ColumnKind::Numeric => {
                    let values = cells
                        .iter()
                        .enumerate()
                        .map(|(row, c)| {
                            c.parse::<f64>()
                                .ok()
                                .filter(|v| v.is_finite())
                                .ok_or_else(|| {
                                    Error::Dataset(format!(
                                        "column `{name}` data row {}: `{c}` is not a finite number",
                                        row + 1
                                    ))
                                })
                        })
                        .collect::<Result<Vec<_>>>()?;
                    features.push(Column::Numeric {
                        name: name.clone(),
                        values,
                    });
                }
                ColumnKind::Categorical => features.push(Column::Categorical {
                    name: name.clone(),
                    values: cells,
                }),
                ColumnKind::Label { positive } => {
                    label_name = name.clone();
                    labels = Some(
                        cells
                            .iter()
                            .enumerate()
                            .map(|(row, c)| match (positive, c.as_str()) {
                                (Some(p), v) => Ok(u8::from(v == p)),
                                (None, "0") => Ok(0),
                                (None, "1") => Ok(1),
                                (None, v) => Err(Error::Dataset(format!(
                                    "label `{v}` at data row {} is not 0/1 (declare the positive value in the schema)",
                                    row + 1
                                ))),
                            })
                            .collect::<Result<Vec<u8>>>()?,
                    );
                }
                ColumnKind::Ignore => {}
            }
        }
        if let (Some(ColumnKind::Label { positive: Some(p) }), Some(ls)) = (
            schema
                .columns
                .iter()
                .map(|(_, k)| k)
                .find(|k| matches!(k, ColumnKind::Label { .. })),
            &labels,
        ) {
            if !ls.contains(&1) {
                return Err(Error::Dataset(format!(
                    "positive label value `{p}` never occurs"
                )));
            }
        }
        Self::new(features, labels.unwrap_or_default(), label_name)
    }

    /// Writes the dataset as CSV (labels as 0/1) and returns the matching schema.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<Schema> {
        let mut csv = csv::Writer::from_writer(writer);
        let mut header: Vec<&str> = self.features.iter().map(Column::name).collect();
        header.push(&self.label_name);
        csv.write_record(&header)?;
        for row in 0..self.rows() {
            let mut cells: Vec<String> = self
                .features
                .iter()
                .map(|c| match c {
                    Column::Numeric { values, .. } => format!("{:?}", values[row]),
                    Column::Categorical { values, .. } => values[row].clone(),
                })
                .collect();
            cells.push(self.labels[row].to_string());
            csv.write_record(&cells)?;
        }
        csv.flush()?;
        let mut columns: Vec<(String, ColumnKind)> = self
            .features
            .iter()
            .map(|c| {
                let kind = match c {
                    Column::Numeric { .. } => ColumnKind::Numeric,
                    Column::Categorical { .. } => ColumnKind::Categorical,
                };
                (c.name().to_owned(), kind)
            })
            .collect();
        columns.push((
            self.label_name.clone(),
            ColumnKind::Label { positive: None },
        ));
        Ok(Schema { columns })
    }
}

impl fmt::Display for TabularDataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let positives = self.positives();
        write!(
            f,
            "{} rows, {} features ({} categorical), {} positive ({:.1}%)",
            self.rows(),
            self.features.len(),
            self.categorical_count(),
            positives,
            100.0 * positives as f64 / self.rows() as f64
        )
    }
}

// (name, category count) of the categorical stand-in columns.
const STANDIN_CATEGORICAL: [(&str, usize); 13] = [
    ("checking_status", 4),
    ("credit_history", 5),
    ("purpose", 10),
    ("savings_status", 5),
    ("employment", 5),
    ("personal_status", 4),
    ("other_parties", 3),
    ("property_magnitude", 4),
    ("other_payment_plans", 3),
    ("housing", 3),
    ("job", 4),
    ("own_telephone", 2),
    ("foreign_worker", 2),
];

/// A synthetic dataset shaped like the German credit data: 1000 rows, 7
/// numeric and 13 categorical features, exactly 30% positives (`class = 1`,
/// the "bad credit" class).
///
/// Labels come from a hidden logistic score over all features; the 300
/// highest scores are positive, so the classes are learnable but overlap.
pub fn german_credit_standin(seed: u64) -> TabularDataset {
    const ROWS: usize = 1000;
    const POSITIVES: usize = 300;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let std_normal = Normal::new(0.0, 1.0).expect("valid normal");
    let mut score = vec![0.0; ROWS];
    let mut features = Vec::new();

    let lognormal = |mu: f64, sigma: f64, lo: f64, hi: f64, rng: &mut ChaCha8Rng| {
        (mu + sigma * std_normal.sample(rng))
            .exp()
            .round()
            .clamp(lo, hi)
    };
    let numeric = |name: &str, values: Vec<f64>, weight: f64, center: f64, score: &mut [f64]| {
        for (s, v) in score.iter_mut().zip(&values) {
            *s += weight * (v - center);
        }
        Column::Numeric {
            name: name.to_owned(),
            values,
        }
    };

    let duration: Vec<f64> = (0..ROWS)
        .map(|_| lognormal(2.9, 0.5, 4.0, 72.0, &mut rng))
        .collect();
    features.push(numeric("duration", duration, 0.04, 20.0, &mut score));
    let amount: Vec<f64> = (0..ROWS)
        .map(|_| lognormal(7.8, 0.7, 250.0, 18500.0, &mut rng))
        .collect();
    let log_amount: Vec<f64> = amount.iter().map(|a| a.ln()).collect();
    for (s, v) in score.iter_mut().zip(&log_amount) {
        *s += 0.3 * (v - 7.8);
    }
    features.push(Column::Numeric {
        name: "credit_amount".into(),
        values: amount,
    });
    let installment: Vec<f64> = (0..ROWS).map(|_| rng.random_range(1..=4) as f64).collect();
    features.push(numeric(
        "installment_commitment",
        installment,
        0.15,
        2.5,
        &mut score,
    ));
    let residence: Vec<f64> = (0..ROWS).map(|_| rng.random_range(1..=4) as f64).collect();
    features.push(numeric("residence_since", residence, 0.0, 2.5, &mut score));
    let age: Vec<f64> = (0..ROWS)
        .map(|_| 19.0 + lognormal(2.7, 0.6, 0.0, 56.0, &mut rng))
        .collect();
    features.push(numeric("age", age, -0.02, 35.0, &mut score));
    let credits: Vec<f64> = (0..ROWS)
        .map(|_| 1.0 + (rng.random::<f64>().powi(3) * 4.0).floor().min(3.0))
        .collect();
    features.push(numeric("existing_credits", credits, 0.1, 1.4, &mut score));
    let dependents: Vec<f64> = (0..ROWS)
        .map(|_| if rng.random::<f64>() < 0.15 { 2.0 } else { 1.0 })
        .collect();
    features.push(numeric("num_dependents", dependents, 0.0, 1.15, &mut score));

    for (col, (name, levels)) in STANDIN_CATEGORICAL.iter().enumerate() {
        let effects: Vec<f64> = (0..*levels)
            .map(|_| 0.6 * std_normal.sample(&mut rng))
            .collect();
        // Skewed level frequencies, like real survey codes.
        let weights: Vec<f64> = (0..*levels).map(|k| 1.0 / (k as f64 + 1.0)).collect();
        let total: f64 = weights.iter().sum();
        let values = (0..ROWS)
            .map(|row| {
                let mut u = rng.random::<f64>() * total;
                let mut level = levels - 1;
                for (k, w) in weights.iter().enumerate() {
                    if u < *w {
                        level = k;
                        break;
                    }
                    u -= w;
                }
                score[row] += effects[level];
                format!("A{}{}", col + 1, level + 1)
            })
            .collect();
        features.push(Column::Categorical {
            name: (*name).to_owned(),
            values,
        });
    }
    for s in score.iter_mut() {
        let u: f64 = rng.random_range(1e-12..1.0);
        *s += (u / (1.0 - u)).ln();
    }
    let mut order: Vec<usize> = (0..ROWS).collect();
    order.sort_by(|&a, &b| score[b].total_cmp(&score[a]).then(a.cmp(&b)));
    let mut labels = vec![0u8; ROWS];
    for &row in &order[..POSITIVES] {
        labels[row] = 1;
    }
    TabularDataset::new(features, labels, "class").expect("stand-in dataset is valid")
}

/// Row indices of the train, validation and test parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataSplit {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
}

impl DataSplit {
    pub fn parts(&self) -> [&[usize]; 3] {
        [&self.train, &self.validation, &self.test]
    }

    /// Checks the parts are non-empty, disjoint and cover `0..rows`.
    pub fn validate(&self, rows: usize) -> Result<()> {
        let mut seen = vec![false; rows];
        for part in self.parts() {
            if part.is_empty() {
                return Err(Error::Dataset("split has an empty part".into()));
            }
            for &i in part {
                if i >= rows || std::mem::replace(&mut seen[i], true) {
                    return Err(Error::Dataset(format!(
                        "row {i} out of range or assigned twice"
                    )));
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Dataset("split does not cover every row".into()));
        }
        Ok(())
    }
}

pub const STANDARD_FRACTIONS: [f64; 3] = [0.6, 0.2, 0.2];

/// Largest-remainder apportionment of `n` items over `fractions`.
fn apportion(n: usize, fractions: &[f64; 3]) -> [usize; 3] {
    let ideal: Vec<f64> = fractions.iter().map(|f| f * n as f64).collect();
    let mut counts = [0usize; 3];
    for (c, x) in counts.iter_mut().zip(&ideal) {
        *c = x.floor() as usize;
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| {
        (ideal[b] - ideal[b].floor())
            .total_cmp(&(ideal[a] - ideal[a].floor()))
            .then(a.cmp(&b))
    });
    let mut left = n - counts.iter().sum::<usize>();
    for &k in order.iter().cycle() {
        if left == 0 {
            break;
        }
        counts[k] += 1;
        left -= 1;
    }
    counts
}

/// Seeded stratified split.
///
/// Each class is apportioned over the parts by largest remainder with at
/// least one row per part; single rows are then moved between parts until
/// the overall part sizes equal the apportionment of the full row count.
pub fn split_dataset(data: &TabularDataset, fractions: [f64; 3], seed: u64) -> Result<DataSplit> {
    if fractions.iter().any(|f| f.is_nan() || *f <= 0.0)
        || (fractions.iter().sum::<f64>() - 1.0).abs() > 1e-9
    {
        return Err(Error::InvalidArgument(format!(
            "split fractions must be positive and sum to 1, got {fractions:?}"
        )));
    }
    let rows = data.rows();
    if rows < 10 {
        return Err(Error::Dataset(format!(
            "need at least 10 rows to split, got {rows}"
        )));
    }
    let mut by_class: BTreeMap<u8, Vec<usize>> = BTreeMap::new();
    for (i, &l) in data.labels().iter().enumerate() {
        by_class.entry(l).or_default().push(i);
    }
    let mut alloc: Vec<[usize; 3]> = Vec::new();
    for (label, members) in &by_class {
        if members.len() < 3 {
            return Err(Error::Dataset(format!(
                "class {label} has {} rows, fewer than the 3 split parts",
                members.len()
            )));
        }
        let mut a = apportion(members.len(), &fractions);
        for k in 0..3 {
            if a[k] == 0 {
                let donor = (0..3)
                    .max_by_key(|&j| (a[j], std::cmp::Reverse(j)))
                    .expect("three parts");
                a[donor] -= 1;
                a[k] += 1;
            }
        }
        alloc.push(a);
    }

    let target = apportion(rows, &fractions);
    let class_sizes: Vec<usize> = by_class.values().map(Vec::len).collect();
    loop {
        let totals: Vec<usize> = (0..3).map(|k| alloc.iter().map(|a| a[k]).sum()).collect();
        let over = (0..3).find(|&k| totals[k] > target[k]);
        let under = (0..3).find(|&k| totals[k] < target[k]);
        let (Some(from), Some(to)) = (over, under) else {
            break;
        };
        // Move from the class that is most over-represented in `from`
        // relative to `to`, never emptying a part.
        let pick = (0..alloc.len())
            .filter(|&c| alloc[c][from] > 1)
            .max_by(|&a, &b| {
                let excess = |c: usize| {
                    let n = class_sizes[c] as f64;
                    (alloc[c][from] as f64 - n * fractions[from])
                        - (alloc[c][to] as f64 - n * fractions[to])
                };
                excess(a).total_cmp(&excess(b)).then(b.cmp(&a))
            });
        let Some(c) = pick else { break };
        alloc[c][from] -= 1;
        alloc[c][to] += 1;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parts: [Vec<usize>; 3] = Default::default();
    for (members, a) in by_class.values().zip(&alloc) {
        let mut shuffled = members.clone();
        shuffled.shuffle(&mut rng);
        let mut start = 0;
        for (part, &n) in parts.iter_mut().zip(a) {
            part.extend_from_slice(&shuffled[start..start + n]);
            start += n;
        }
    }
    for p in parts.iter_mut() {
        p.sort_unstable();
    }
    let [train, validation, test] = parts;
    let split = DataSplit {
        train,
        validation,
        test,
    };
    split.validate(rows)?;
    Ok(split)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(labels: Vec<u8>) -> TabularDataset {
        let n = labels.len();
        TabularDataset::new(
            vec![Column::Numeric {
                name: "x".into(),
                values: (0..n).map(|i| i as f64).collect(),
            }],
            labels,
            "y",
        )
        .unwrap()
    }

    #[test]
    fn standin_shape() {
        let d = german_credit_standin(0);
        assert_eq!(d.rows(), 1000);
        assert_eq!(d.features().len(), 20);
        assert_eq!(d.categorical_count(), 13);
        assert_eq!(d.positives(), 300);
        assert_eq!(d, german_credit_standin(0));
    }

    #[test]
    fn standin_split_is_600_200_200_with_30_percent_positives() {
        let d = german_credit_standin(1);
        let s = split_dataset(&d, STANDARD_FRACTIONS, 5).unwrap();
        let sizes: Vec<usize> = s.parts().iter().map(|p| p.len()).collect();
        assert_eq!(sizes, vec![600, 200, 200]);
        let pos: Vec<usize> = s
            .parts()
            .iter()
            .map(|p| p.iter().filter(|&&i| d.labels()[i] == 1).count())
            .collect();
        assert_eq!(pos, vec![180, 60, 60]);
        assert_eq!(s, split_dataset(&d, STANDARD_FRACTIONS, 5).unwrap());
        assert_ne!(s, split_dataset(&d, STANDARD_FRACTIONS, 6).unwrap());
    }

    #[test]
    fn ten_rows_every_arrangement_splits_with_both_classes_everywhere() {
        // All C(10, 5) placements of five positives.
        for mask in 0u32..1024 {
            if mask.count_ones() != 5 {
                continue;
            }
            let labels: Vec<u8> = (0..10).map(|i| ((mask >> i) & 1) as u8).collect();
            let d = toy(labels);
            for seed in 0..3 {
                let s = split_dataset(&d, STANDARD_FRACTIONS, seed).unwrap();
                assert_eq!(s.parts().map(|p| p.len()), [6, 2, 2]);
                for part in s.parts() {
                    assert!(part.iter().any(|&i| d.labels()[i] == 1));
                    assert!(part.iter().any(|&i| d.labels()[i] == 0));
                }
            }
        }
    }

    #[test]
    fn parts_cover_and_sizes_stay_within_one_row() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for seed in 0..1000u64 {
            let n = rng.random_range(10..200);
            let pos = rng.random_range(3..=n - 3);
            let mut labels = vec![0u8; n];
            labels[..pos].iter_mut().for_each(|l| *l = 1);
            labels.shuffle(&mut rng);
            let d = toy(labels);
            let s = split_dataset(&d, STANDARD_FRACTIONS, seed).unwrap();
            s.validate(n).unwrap();
            for (part, f) in s.parts().iter().zip(STANDARD_FRACTIONS) {
                assert!(
                    (part.len() as f64 - f * n as f64).abs() <= 1.0,
                    "n={n} part={}",
                    part.len()
                );
            }
        }
    }

    #[test]
    fn split_errors() {
        let d = toy(vec![1, 1, 0, 0, 0, 0, 0, 0, 0, 0]);
        assert!(split_dataset(&d, STANDARD_FRACTIONS, 0).is_err());
        let small = toy(vec![1, 1, 1, 0, 0, 0]);
        assert!(split_dataset(&small, STANDARD_FRACTIONS, 0).is_err());
        let ok = toy(vec![1, 1, 1, 0, 0, 0, 0, 0, 0, 0]);
        assert!(split_dataset(&ok, [0.5, 0.5, 0.0], 0).is_err());
    }

    #[test]
    fn dataset_validation() {
        assert!(TabularDataset::new(vec![], vec![0, 0], "y").is_err());
        assert!(TabularDataset::new(vec![], vec![0, 2], "y").is_err());
        let short = Column::Numeric {
            name: "x".into(),
            values: vec![1.0],
        };
        assert!(TabularDataset::new(vec![short], vec![0, 1], "y").is_err());
    }

    #[test]
    fn csv_ingestion_with_schema() {
        let schema = Schema::parse(
            "id ignore\nage numeric\ncolor categorical  # free text\nclass label bad\n",
        )
        .unwrap();
        let csv = "id,age,color,class\n1,30,red,good\n2,41.5,blue,bad\n3,22,red,good\n";
        let d = TabularDataset::read_csv(csv.as_bytes(), &schema).unwrap();
        assert_eq!(d.rows(), 3);
        assert_eq!(d.labels(), &[0, 1, 0]);
        assert_eq!(d.features().len(), 2);
        assert_eq!(
            d.to_string(),
            "3 rows, 2 features (1 categorical), 1 positive (33.3%)"
        );

        let missing = "id,age,color,class\n1,,red,good\n2,41,blue,bad\n";
        assert!(TabularDataset::read_csv(missing.as_bytes(), &schema).is_err());
        let not_number = "id,age,color,class\n1,old,red,good\n2,41,blue,bad\n";
        assert!(TabularDataset::read_csv(not_number.as_bytes(), &schema).is_err());
        let extra = "id,age,color,class,zip\n1,3,red,good,1\n2,41,blue,bad,2\n";
        assert!(TabularDataset::read_csv(extra.as_bytes(), &schema).is_err());

        let plain = Schema::parse("x numeric\ny label\n").unwrap();
        assert!(TabularDataset::read_csv("x,y\n1,0\n2,yes\n".as_bytes(), &plain).is_err());
    }

    #[test]
    fn schema_errors() {
        assert!(Schema::parse("x numeric\n").is_err());
        assert!(Schema::parse("x numeric\ny label\nz label\n").is_err());
        match Schema::parse("x numeric\ny  colour\n") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 4)),
            other => panic!("{other:?}"),
        }
        assert!(Schema::parse("x numeric extra\ny label\n").is_err());
        assert!(Schema::parse("x numeric\nx label\n").is_err());
    }

    #[test]
    fn csv_round_trip() {
        let d = german_credit_standin(3);
        let mut buf = Vec::new();
        let schema = d.write_csv(&mut buf).unwrap();
        let schema = Schema::parse(&schema.to_text()).unwrap();
        let back = TabularDataset::read_csv(buf.as_slice(), &schema).unwrap();
        assert_eq!(back, d);
    }
}
