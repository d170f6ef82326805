//! Declarative configuration spaces and their line-oriented text format.
//!
//! One parameter per line, `#` starts a comment:
//!
//! ```text
//! penalty        categorical  l2, l1, elasticnet
//! alpha          float        1e-6  1e-2  log
//! l1_ratio       float        0.0   1.0
//! min_leaf       integer      1     20
//! ```
//!
//! `float` takes an optional trailing `linear` (default) or `log`.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};

/// Sampling scale of a continuous parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParameterKind {
    Categorical(Vec<String>),
    Continuous { lo: f64, hi: f64, scale: Scale },
    Integer { lo: i64, hi: i64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParameterSpec {
    pub name: String,
    pub kind: ParameterKind,
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

fn valid_category(value: &str) -> bool {
    !value.is_empty()
        && !value
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, ',' | '#' | '"'))
}

impl ParameterSpec {
    pub fn categorical<S: Into<String>>(
        name: impl Into<String>,
        values: impl IntoIterator<Item = S>,
    ) -> Self {
        Self {
            name: name.into(),
            kind: ParameterKind::Categorical(values.into_iter().map(Into::into).collect()),
        }
    }

    pub fn continuous(name: impl Into<String>, lo: f64, hi: f64, scale: Scale) -> Self {
        Self {
            name: name.into(),
            kind: ParameterKind::Continuous { lo, hi, scale },
        }
    }

    pub fn integer(name: impl Into<String>, lo: i64, hi: i64) -> Self {
        Self {
            name: name.into(),
            kind: ParameterKind::Integer { lo, hi },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(format!("`{}`: {msg}", self.name)));
        if !valid_name(&self.name) {
            return bad("invalid parameter name".into());
        }
        match &self.kind {
            ParameterKind::Categorical(values) => {
                if values.is_empty() {
                    return bad("categorical parameter needs at least one value".into());
                }
                let mut seen = HashSet::new();
                for v in values {
                    if !valid_category(v) {
                        return bad(format!("invalid categorical value {v:?}"));
                    }
                    if !seen.insert(v) {
                        return bad(format!("duplicate categorical value `{v}`"));
                    }
                }
            }
            ParameterKind::Continuous { lo, hi, scale } => {
                if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                    return bad(format!("need finite lo < hi, got [{lo:?}, {hi:?}]"));
                }
                if *scale == Scale::Log && *lo <= 0.0 {
                    return bad("log scale requires lo > 0".into());
                }
            }
            ParameterKind::Integer { lo, hi } => {
                if lo >= hi {
                    return bad(format!("need lo < hi, got [{lo}, {hi}]"));
                }
            }
        }
        Ok(())
    }

    /// Whether `value` lies in this parameter's domain.
    pub fn contains(&self, value: &ParamValue) -> bool {
        match (&self.kind, value) {
            (ParameterKind::Categorical(values), ParamValue::Categorical(v)) => values.contains(v),
            (ParameterKind::Continuous { lo, hi, .. }, ParamValue::Float(v)) => {
                *lo <= *v && *v <= *hi
            }
            (ParameterKind::Integer { lo, hi }, ParamValue::Int(v)) => lo <= v && v <= hi,
            _ => false,
        }
    }

    /// Parses a value written by [`ParamValue`]'s `Display`.
    pub fn parse_value(&self, text: &str) -> Result<ParamValue> {
        let text = text.trim();
        let value = match &self.kind {
            ParameterKind::Categorical(_) => Some(ParamValue::Categorical(text.to_owned())),
            ParameterKind::Continuous { .. } => text.parse().ok().map(ParamValue::Float),
            ParameterKind::Integer { .. } => text.parse().ok().map(ParamValue::Int),
        };
        value.filter(|v| self.contains(v)).ok_or_else(|| {
            Error::InvalidParameter(format!("`{}`: value {text:?} outside domain", self.name))
        })
    }

    /// Maps a value into `[0, 1]`: linear or log position for numbers, index
    /// over `len - 1` for categories.
    pub fn encode(&self, value: &ParamValue) -> Result<f64> {
        if !self.contains(value) {
            return Err(Error::InvalidParameter(format!(
                "`{}`: value {value} outside domain",
                self.name
            )));
        }
        Ok(match (&self.kind, value) {
            (ParameterKind::Categorical(values), ParamValue::Categorical(v)) => {
                if values.len() == 1 {
                    0.0
                } else {
                    let idx = values.iter().position(|x| x == v).unwrap_or(0);
                    idx as f64 / (values.len() - 1) as f64
                }
            }
            (
                ParameterKind::Continuous {
                    lo,
                    hi,
                    scale: Scale::Linear,
                },
                ParamValue::Float(v),
            ) => (v - lo) / (hi - lo),
            (
                ParameterKind::Continuous {
                    lo,
                    hi,
                    scale: Scale::Log,
                },
                ParamValue::Float(v),
            ) => (v.ln() - lo.ln()) / (hi.ln() - lo.ln()),
            (ParameterKind::Integer { lo, hi }, ParamValue::Int(v)) => {
                (v - lo) as f64 / (hi - lo) as f64
            }
            _ => unreachable!("checked by contains"),
        }
        .clamp(0.0, 1.0))
    }
}

impl fmt::Display for ParameterSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParameterKind::Categorical(values) => {
                write!(f, "{} categorical {}", self.name, values.join(", "))
            }
            ParameterKind::Continuous { lo, hi, scale } => {
                let scale = match scale {
                    Scale::Linear => "linear",
                    Scale::Log => "log",
                };
                write!(f, "{} float {lo:?} {hi:?} {scale}", self.name)
            }
            ParameterKind::Integer { lo, hi } => write!(f, "{} integer {lo} {hi}", self.name),
        }
    }
}

/// A concrete value of one parameter.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    Categorical(String),
    Float(f64),
    Int(i64),
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Categorical(s) => f.write_str(s),
            ParamValue::Float(v) => write!(f, "{v:?}"),
            ParamValue::Int(v) => write!(f, "{v}"),
        }
    }
}

/// Parameter values in the order of the space they were drawn from.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Assignment(Vec<(String, ParamValue)>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: impl Into<String>, value: ParamValue) {
        self.0.push((name.into(), value));
    }

    pub fn with(mut self, name: impl Into<String>, value: ParamValue) -> Self {
        self.push(name, value);
        self
    }

    pub fn get(&self, name: &str) -> Option<&ParamValue> {
        self.0.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn get_f64(&self, name: &str) -> Option<f64> {
        match self.get(name)? {
            ParamValue::Float(v) => Some(*v),
            ParamValue::Int(v) => Some(*v as f64),
            ParamValue::Categorical(_) => None,
        }
    }

    pub fn get_str(&self, name: &str) -> Option<&str> {
        match self.get(name)? {
            ParamValue::Categorical(s) => Some(s),
            _ => None,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &ParamValue)> {
        self.0.iter().map(|(n, v)| (n.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// An ordered list of uniquely named parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigurationSpace {
    parameters: Vec<ParameterSpec>,
}

const LINEAR_MODEL_SPACE: &str = include_str!("../../fixtures/linear_model.space");
const RANDOM_FOREST_SPACE: &str = include_str!("../../fixtures/random_forest.space");

impl ConfigurationSpace {
    pub fn new(parameters: Vec<ParameterSpec>) -> Result<Self> {
        let mut seen = HashSet::new();
        for p in &parameters {
            p.validate()?;
            if !seen.insert(p.name.as_str()) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate parameter name `{}`",
                    p.name
                )));
            }
        }
        Ok(Self { parameters })
    }

    /// Search space of the SGD linear classifier.
    pub fn linear_model() -> Self {
        Self::parse(LINEAR_MODEL_SPACE).expect("bundled linear-model space is valid")
    }

    /// Search space of a random forest classifier.
    pub fn random_forest() -> Self {
        Self::parse(RANDOM_FOREST_SPACE).expect("bundled random-forest space is valid")
    }

    /// `dim` continuous parameters `x0..x{dim-1}` on `[0, 1]`.
    pub fn unit_cube(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter(
                "unit cube needs at least one dimension".into(),
            ));
        }
        Self::new(
            (0..dim)
                .map(|i| ParameterSpec::continuous(format!("x{i}"), 0.0, 1.0, Scale::Linear))
                .collect(),
        )
    }

    pub fn parameters(&self) -> &[ParameterSpec] {
        &self.parameters
    }

    pub fn len(&self) -> usize {
        self.parameters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parameters.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&ParameterSpec> {
        self.parameters.iter().find(|p| p.name == name)
    }

    /// Checks that an assignment covers exactly this space, in order, with
    /// every value inside its domain.
    pub fn check(&self, assignment: &Assignment) -> Result<()> {
        if assignment.len() != self.len() {
            return Err(Error::InvalidParameter(format!(
                "assignment has {} values, space has {} parameters",
                assignment.len(),
                self.len()
            )));
        }
        for (spec, (name, value)) in self.parameters.iter().zip(assignment.iter()) {
            if spec.name != name {
                return Err(Error::InvalidParameter(format!(
                    "expected `{}`, found `{name}`",
                    spec.name
                )));
            }
            if !spec.contains(value) {
                return Err(Error::InvalidParameter(format!(
                    "`{name}`: value {value} outside domain"
                )));
            }
        }
        Ok(())
    }

    /// Maps an assignment to a point of the unit cube, one coordinate per
    /// parameter.
    pub fn encode(&self, assignment: &Assignment) -> Result<Vec<f64>> {
        self.check(assignment)?;
        self.parameters
            .iter()
            .zip(assignment.iter())
            .map(|(spec, (_, v))| spec.encode(v))
            .collect()
    }

    /// Parses the text format described in the module docs.
    pub fn parse(text: &str) -> Result<Self> {
        let mut parameters = Vec::new();
        let mut names: HashSet<String> = HashSet::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let content = raw_line.split('#').next().unwrap_or("");
            if content.trim().is_empty() {
                continue;
            }
            let spec = parse_line(content, line_no)?;
            if !names.insert(spec.name.clone()) {
                return Err(Error::Parse {
                    line: line_no,
                    column: column_of(content, 0),
                    message: format!("duplicate parameter name `{}`", spec.name),
                });
            }
            parameters.push(spec);
        }
        if parameters.is_empty() {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                message: "space defines no parameters".into(),
            });
        }
        Ok(Self { parameters })
    }

    pub fn to_text(&self) -> String {
        self.parameters.iter().map(|p| format!("{p}\n")).collect()
    }
}

impl fmt::Display for ConfigurationSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// 1-based column of the `nth` whitespace token, or one past the end.
fn column_of(line: &str, nth: usize) -> usize {
    tokens(line)
        .nth(nth)
        .map_or(line.chars().count() + 1, |(col, _)| col)
}

fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter()
        .map(move |(byte, tok)| (line[..byte].chars().count() + 1, tok))
}

fn parse_line(line: &str, line_no: usize) -> Result<ParameterSpec> {
    let err = |column: usize, message: String| Error::Parse {
        line: line_no,
        column,
        message,
    };
    let toks: Vec<(usize, &str)> = tokens(line).collect();
    let end = line.chars().count() + 1;
    let (name_col, name) = toks[0];
    if !valid_name(name) {
        return Err(err(name_col, format!("invalid parameter name `{name}`")));
    }
    let (kind_col, kind) = *toks.get(1).ok_or_else(|| {
        err(
            end,
            "expected parameter kind (categorical, float, integer)".into(),
        )
    })?;
    let spec = match kind {
        "categorical" => {
            let byte_after_kind = line
                .char_indices()
                .nth(kind_col - 1 + kind.chars().count())
                .map_or(line.len(), |(b, _)| b);
            let rest = &line[byte_after_kind..];
            let rest_col = kind_col + kind.chars().count();
            let mut values = Vec::new();
            let mut offset = 0;
            for piece in rest.split(',') {
                let col = rest_col + rest[..offset].chars().count() + piece.len()
                    - piece.trim_start().len();
                let value = piece.trim();
                if !valid_category(value) {
                    return Err(err(col, format!("invalid categorical value {value:?}")));
                }
                if values.iter().any(|v: &String| v == value) {
                    return Err(err(col, format!("duplicate categorical value `{value}`")));
                }
                values.push(value.to_owned());
                offset += piece.len() + 1;
            }
            ParameterSpec::categorical(name, values)
        }
        "float" | "integer" => {
            if toks.len() < 4 {
                return Err(err(
                    end,
                    format!("`{kind}` needs a lower and an upper bound"),
                ));
            }
            let max_tokens = if kind == "float" { 5 } else { 4 };
            if toks.len() > max_tokens {
                let (col, tok) = toks[max_tokens];
                return Err(err(col, format!("unexpected token `{tok}`")));
            }
            if kind == "float" {
                let num = |i: usize| -> Result<f64> {
                    let (col, tok) = toks[i];
                    tok.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| err(col, format!("expected a finite number, found `{tok}`")))
                };
                let (lo, hi) = (num(2)?, num(3)?);
                let scale = match toks.get(4) {
                    None | Some((_, "linear")) => Scale::Linear,
                    Some((_, "log")) => Scale::Log,
                    Some(&(col, other)) => {
                        return Err(err(
                            col,
                            format!("expected `linear` or `log`, found `{other}`"),
                        ))
                    }
                };
                ParameterSpec::continuous(name, lo, hi, scale)
            } else {
                let num = |i: usize| -> Result<i64> {
                    let (col, tok) = toks[i];
                    tok.parse::<i64>()
                        .map_err(|_| err(col, format!("expected an integer, found `{tok}`")))
                };
                ParameterSpec::integer(name, num(2)?, num(3)?)
            }
        }
        other => {
            return Err(err(
                kind_col,
                format!("unknown parameter kind `{other}` (expected categorical, float, integer)"),
            ))
        }
    };
    spec.validate().map_err(|e| err(kind_col, e.to_string()))?;
    Ok(spec)
}
