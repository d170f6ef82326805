//! Logistic-loss linear classifier trained by SGD, scored by precision and
//! recall on the validation and test parts of a split.
//!
//! Preprocessing is fit on the training rows only: numeric columns go
//! through an empirical-rank transform to standard-normal scores,
//! categorical columns are one-hot encoded over the categories seen in
//! training (unseen categories encode as all zeros).

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::dataset::{Column, DataSplit, TabularDataset};
use super::metrics::precision_recall;
use super::Evaluator;
use crate::error::{Error, Result};
use crate::pareto::{CostVector, ObjectiveSpec};
use crate::search::{Assignment, ConfigurationSpace, ParameterKind};

/// Fixed epoch budget of every training run.
pub const SGD_EPOCHS: usize = 100;
/// Epochs without improvement before the step size is divided.
const PLATEAU_EPOCHS: usize = 5;
const PLATEAU_DIVISOR: f64 = 5.0;
const PLATEAU_TOL: f64 = 1e-3;
const MIN_STEP: f64 = 1e-6;
/// Rank probabilities are clipped away from 0 and 1 before the normal map.
const RANK_CLIP: f64 = 1e-7;

/// Inverse of the standard normal CDF (Acklam's rational approximation,
/// relative error below 1.2e-9 on the open unit interval).
pub fn norm_inv_cdf(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383_577_518_672_69e2,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

/// Rank-to-normal transform fit on one training column.
#[derive(Debug, Clone)]
struct QuantileNormal {
    sorted: Vec<f64>,
}

impl QuantileNormal {
    fn fit(values: impl Iterator<Item = f64>) -> Self {
        let mut sorted: Vec<f64> = values.collect();
        sorted.sort_by(f64::total_cmp);
        Self { sorted }
    }

    fn transform(&self, v: f64) -> f64 {
        let n = self.sorted.len() as f64;
        let below = self.sorted.partition_point(|&x| x < v) as f64;
        let upto = self.sorted.partition_point(|&x| x <= v) as f64;
        // Mid-rank of `v` among the training values.
        let p = (below + upto) / (2.0 * n);
        norm_inv_cdf(p.clamp(RANK_CLIP, 1.0 - RANK_CLIP))
    }
}

#[derive(Debug, Clone)]
enum Encoder {
    Numeric(QuantileNormal),
    OneHot(Vec<String>),
}

impl Encoder {
    fn width(&self) -> usize {
        match self {
            Encoder::Numeric(_) => 1,
            Encoder::OneHot(cats) => cats.len(),
        }
    }
}

/// Row-major design matrix with labels.
#[derive(Debug, Clone)]
struct Design {
    x: Vec<f64>,
    y: Vec<u8>,
    width: usize,
}

impl Design {
    fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.width..(i + 1) * self.width]
    }

    fn rows(&self) -> usize {
        self.y.len()
    }
}

fn fit_encoders(data: &TabularDataset, train: &[usize]) -> Vec<Encoder> {
    data.features()
        .iter()
        .map(|col| match col {
            Column::Numeric { values, .. } => {
                Encoder::Numeric(QuantileNormal::fit(train.iter().map(|&i| values[i])))
            }
            Column::Categorical { values, .. } => {
                let cats: BTreeSet<&String> = train.iter().map(|&i| &values[i]).collect();
                Encoder::OneHot(cats.into_iter().cloned().collect())
            }
        })
        .collect()
}

fn encode(data: &TabularDataset, encoders: &[Encoder], rows: &[usize]) -> Design {
    let width: usize = encoders.iter().map(Encoder::width).sum();
    let mut x = Vec::with_capacity(rows.len() * width);
    for &i in rows {
        for (col, enc) in data.features().iter().zip(encoders) {
            match (col, enc) {
                (Column::Numeric { values, .. }, Encoder::Numeric(q)) => {
                    x.push(q.transform(values[i]))
                }
                (Column::Categorical { values, .. }, Encoder::OneHot(cats)) => {
                    let hit = cats.binary_search(&values[i]).ok();
                    x.extend((0..cats.len()).map(|k| if Some(k) == hit { 1.0 } else { 0.0 }));
                }
                _ => unreachable!("encoders are fit column by column"),
            }
        }
    }
    Design {
        x,
        y: rows.iter().map(|&i| data.labels()[i]).collect(),
        width,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Hyperparameters {
    alpha: f64,
    l1_ratio: f64,
    fit_intercept: bool,
    eta0: f64,
    positive_weight: f64,
}

impl Hyperparameters {
    fn from_assignment(a: &Assignment) -> Result<Self> {
        let num = |name: &str| {
            a.get_f64(name).ok_or_else(|| {
                Error::InvalidParameter(format!("linear model needs numeric `{name}`"))
            })
        };
        let text = |name: &str| {
            a.get_str(name).ok_or_else(|| {
                Error::InvalidParameter(format!("linear model needs categorical `{name}`"))
            })
        };
        let l1_ratio = match text("penalty")? {
            "l2" => 0.0,
            "l1" => 1.0,
            "elasticnet" => num("l1_ratio")?,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown penalty `{other}`"
                )))
            }
        };
        let fit_intercept = match text("fit_intercept")? {
            "true" => true,
            "false" => false,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "fit_intercept must be true/false, got `{other}`"
                )))
            }
        };
        let hp = Self {
            alpha: num("alpha")?,
            l1_ratio,
            fit_intercept,
            eta0: num("eta0")?,
            positive_weight: 2f64.powf(num("pos_class_weight_exp")?),
        };
        let alpha_ok = hp.alpha.is_finite() && hp.alpha >= 0.0;
        let eta_ok = hp.eta0.is_finite() && hp.eta0 > 0.0;
        if !alpha_ok
            || !eta_ok
            || !(0.0..=1.0).contains(&hp.l1_ratio)
            || !hp.positive_weight.is_finite()
        {
            return Err(Error::InvalidParameter(format!(
                "hyperparameters out of range: {hp:?}"
            )));
        }
        Ok(hp)
    }
}

#[derive(Debug, Clone)]
struct Model {
    weights: Vec<f64>,
    intercept: f64,
}

impl Model {
    fn score(&self, row: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(row)
            .map(|(w, x)| w * x)
            .sum::<f64>()
            + self.intercept
    }

    /// Positive iff the logistic output exceeds 0.5.
    fn predict(&self, design: &Design) -> Vec<u8> {
        (0..design.rows())
            .map(|i| u8::from(self.score(design.row(i)) > 0.0))
            .collect()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

// log(1 + exp(-margin)) without overflow.
fn log_loss(margin: f64) -> f64 {
    if margin > 0.0 {
        (-margin).exp().ln_1p()
    } else {
        -margin + margin.exp().ln_1p()
    }
}

fn objective(model: &Model, design: &Design, hp: &Hyperparameters) -> f64 {
    let mut total = 0.0;
    let mut weight_sum = 0.0;
    for i in 0..design.rows() {
        let y = design.y[i];
        let w = if y == 1 { hp.positive_weight } else { 1.0 };
        let sign = if y == 1 { 1.0 } else { -1.0 };
        total += w * log_loss(sign * model.score(design.row(i)));
        weight_sum += w;
    }
    let l2: f64 = model.weights.iter().map(|w| w * w).sum();
    let l1: f64 = model.weights.iter().map(|w| w.abs()).sum();
    total / weight_sum + hp.alpha * (0.5 * (1.0 - hp.l1_ratio) * l2 + hp.l1_ratio * l1)
}

/// Class-weighted SGD with elastic-net penalty and a divide-on-plateau
/// step size: the step stays at `eta0` while the training objective keeps
/// improving by at least `PLATEAU_TOL`, and is divided by
/// `PLATEAU_DIVISOR` after `PLATEAU_EPOCHS` epochs without improvement.
fn train(design: &Design, hp: &Hyperparameters, seed: u64) -> Result<Model> {
    let mut model = Model {
        weights: vec![0.0; design.width],
        intercept: 0.0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..design.rows()).collect();
    let mut eta = hp.eta0;
    let mut best = f64::INFINITY;
    let mut stale = 0;
    let l2 = hp.alpha * (1.0 - hp.l1_ratio);
    let l1 = hp.alpha * hp.l1_ratio;
    for _ in 0..SGD_EPOCHS {
        order.shuffle(&mut rng);
        for &i in &order {
            let row = design.row(i);
            let y = design.y[i];
            let class_weight = if y == 1 { hp.positive_weight } else { 1.0 };
            let grad = (sigmoid(model.score(row)) - f64::from(y)) * class_weight;
            let shrink = (1.0 - eta * l2).max(0.0);
            let threshold = eta * l1;
            for (w, x) in model.weights.iter_mut().zip(row) {
                let mut v = *w * shrink - eta * grad * x;
                if threshold > 0.0 {
                    v = v.signum() * (v.abs() - threshold).max(0.0);
                }
                *w = v;
            }
            if hp.fit_intercept {
                model.intercept -= eta * grad;
            }
        }
        let loss = objective(&model, design, hp);
        if !loss.is_finite() {
            return Err(Error::Evaluation("training objective diverged".into()));
        }
        if loss > best - PLATEAU_TOL {
            stale += 1;
        } else {
            stale = 0;
        }
        best = best.min(loss);
        if stale >= PLATEAU_EPOCHS {
            eta /= PLATEAU_DIVISOR;
            stale = 0;
            if eta < MIN_STEP {
                break;
            }
        }
    }
    Ok(model)
}

/// Evaluator over a fixed dataset and split; preprocessing happens once.
#[derive(Debug, Clone)]
pub struct LinearModelEvaluator {
    train: Design,
    validation: Design,
    test: Design,
    label: String,
}

impl LinearModelEvaluator {
    pub fn new(data: &TabularDataset, split: &DataSplit) -> Result<Self> {
        split.validate(data.rows())?;
        let encoders = fit_encoders(data, &split.train);
        Ok(Self {
            train: encode(data, &encoders, &split.train),
            validation: encode(data, &encoders, &split.validation),
            test: encode(data, &encoders, &split.test),
            label: "linear-sgd".into(),
        })
    }

    /// Tags the evaluator id with a dataset description.
    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn feature_width(&self) -> usize {
        self.train.width
    }

    fn losses(model: &Model, design: &Design) -> Result<CostVector> {
        let (precision, recall) = precision_recall(&model.predict(design), &design.y)?;
        CostVector::new(vec![1.0 - precision, 1.0 - recall])
    }
}

impl Evaluator for LinearModelEvaluator {
    fn id(&self) -> String {
        self.label.clone()
    }

    fn objectives(&self) -> Vec<ObjectiveSpec> {
        vec![
            ObjectiveSpec::maximize("precision").with_range(0.0, 1.0),
            ObjectiveSpec::maximize("recall").with_range(0.0, 1.0),
        ]
    }

    fn check_space(&self, space: &ConfigurationSpace) -> Result<()> {
        let need = |name: &str| {
            space
                .get(name)
                .map(|p| &p.kind)
                .ok_or_else(|| Error::InvalidArgument(format!("linear model space lacks `{name}`")))
        };
        let within = |name: &str, lo: f64, hi: f64| -> Result<()> {
            match need(name)? {
                ParameterKind::Continuous { lo: a, hi: b, .. } if *a >= lo && *b <= hi => Ok(()),
                ParameterKind::Integer { lo: a, hi: b } if *a as f64 >= lo && *b as f64 <= hi => {
                    Ok(())
                }
                other => Err(Error::InvalidArgument(format!(
                    "`{name}` must be numeric within [{lo}, {hi}], found {other:?}"
                ))),
            }
        };
        let categories = |name: &str, allowed: &[&str]| -> Result<()> {
            match need(name)? {
                ParameterKind::Categorical(values)
                    if values.iter().all(|v| allowed.contains(&v.as_str())) =>
                {
                    Ok(())
                }
                other => Err(Error::InvalidArgument(format!(
                    "`{name}` must be categorical over {allowed:?}, found {other:?}"
                ))),
            }
        };
        categories("penalty", &["l2", "l1", "elasticnet"])?;
        categories("fit_intercept", &["true", "false"])?;
        within("alpha", 0.0, f64::MAX)?;
        within("l1_ratio", 0.0, 1.0)?;
        within("eta0", f64::MIN_POSITIVE, f64::MAX)?;
        within("pos_class_weight_exp", -60.0, 60.0)?;
        Ok(())
    }

    fn evaluate(&self, assignment: &Assignment, seed: u64) -> Result<(CostVector, CostVector)> {
        let hp = Hyperparameters::from_assignment(assignment)?;
        let model = train(&self.train, &hp, seed)?;
        Ok((
            Self::losses(&model, &self.validation)?,
            Self::losses(&model, &self.test)?,
        ))
    }
}

/// One-shot evaluation of a linear-model configuration.
pub fn evaluate_linear_model(
    data: &TabularDataset,
    split: &DataSplit,
    assignment: &Assignment,
    seed: u64,
) -> Result<(CostVector, CostVector)> {
    LinearModelEvaluator::new(data, split)?.evaluate(assignment, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluators::{german_credit_standin, split_dataset, STANDARD_FRACTIONS};
    use crate::search::ParamValue;
    use rand::Rng;
    use statrs::distribution::{ContinuousCDF, Normal};

    fn config(penalty: &str, exp: f64) -> Assignment {
        Assignment::new()
            .with("penalty", ParamValue::Categorical(penalty.into()))
            .with("alpha", ParamValue::Float(1e-4))
            .with("l1_ratio", ParamValue::Float(0.15))
            .with("fit_intercept", ParamValue::Categorical("true".into()))
            .with("eta0", ParamValue::Float(0.01))
            .with("pos_class_weight_exp", ParamValue::Float(exp))
    }

    /// Two well-separated Gaussian clusters plus a categorical column.
    fn clusters(n: usize, seed: u64) -> TabularDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let labels: Vec<u8> = (0..n).map(|i| u8::from(i % 3 == 0)).collect();
        let a: Vec<f64> = labels
            .iter()
            .map(|&l| if l == 1 { 5.0 } else { -5.0 } + rng.random_range(-1.0..1.0))
            .collect();
        let b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let c: Vec<String> = (0..n).map(|i| ["u", "v"][i % 2].to_string()).collect();
        TabularDataset::new(
            vec![
                Column::Numeric {
                    name: "a".into(),
                    values: a,
                },
                Column::Numeric {
                    name: "b".into(),
                    values: b,
                },
                Column::Categorical {
                    name: "c".into(),
                    values: c,
                },
            ],
            labels,
            "y",
        )
        .unwrap()
    }

    #[test]
    fn inverse_normal_matches_reference_cdf() {
        let reference = Normal::new(0.0, 1.0).unwrap();
        for &p in &[
            1e-7,
            1e-4,
            0.01,
            0.02425,
            0.1,
            0.3,
            0.5,
            0.7,
            0.9,
            0.975,
            0.999,
            1.0 - 1e-7,
        ] {
            let x = norm_inv_cdf(p);
            assert!((x - reference.inverse_cdf(p)).abs() < 1e-6, "p={p}: {x}");
        }
        assert_eq!(norm_inv_cdf(0.5), 0.0);
        assert!(norm_inv_cdf(0.0).is_infinite());
    }

    #[test]
    fn quantile_transform_is_monotone_and_centered() {
        let q = QuantileNormal::fit([3.0, 1.0, 2.0, 2.0, 5.0].into_iter());
        let xs: Vec<f64> = [0.0, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 9.0]
            .iter()
            .map(|&v| q.transform(v))
            .collect();
        assert!(xs.windows(2).all(|w| w[0] <= w[1]), "{xs:?}");
        // One value below 2.0, three at or below: mid-rank (1 + 3) / 2 / 5.
        assert_eq!(q.transform(2.0), norm_inv_cdf(0.4));
        assert_eq!(
            QuantileNormal::fit([1.0, 2.0, 3.0].into_iter()).transform(2.0),
            0.0
        );
        assert!((q.transform(0.0) - norm_inv_cdf(RANK_CLIP)).abs() < 1e-12);
    }

    #[test]
    fn separable_clusters_are_classified_perfectly() {
        let d = clusters(120, 4);
        let split = split_dataset(&d, STANDARD_FRACTIONS, 1).unwrap();
        // Positives are a third of the rows; weight 2 balances the classes.
        for penalty in ["l2", "l1", "elasticnet"] {
            let (val, test) = evaluate_linear_model(&d, &split, &config(penalty, 1.0), 9).unwrap();
            assert_eq!(val.values(), &[0.0, 0.0], "{penalty}");
            assert_eq!(test.values(), &[0.0, 0.0], "{penalty}");
        }
    }

    #[test]
    fn no_positive_predictions_means_full_precision_loss() {
        let d = clusters(120, 4);
        let split = split_dataset(&d, STANDARD_FRACTIONS, 1).unwrap();
        let ev = LinearModelEvaluator::new(&d, &split).unwrap();
        let model = Model {
            weights: vec![0.0; ev.feature_width()],
            intercept: -1.0,
        };
        let losses = LinearModelEvaluator::losses(&model, &ev.validation).unwrap();
        assert_eq!(losses.values(), &[1.0, 1.0]);
    }

    #[test]
    fn deterministic_and_bounded_on_standin() {
        let d = german_credit_standin(0);
        let split = split_dataset(&d, STANDARD_FRACTIONS, 0).unwrap();
        let ev = LinearModelEvaluator::new(&d, &split).unwrap();
        assert_eq!(ev.feature_width(), 7 + 54);
        for exp in [-7.0, -1.0, 0.0, 3.0, 7.0] {
            let a = config("elasticnet", exp);
            let first = ev.evaluate(&a, 21).unwrap();
            assert_eq!(first, ev.evaluate(&a, 21).unwrap());
            for c in first.0.iter().chain(first.1.iter()) {
                assert!((0.0..=1.0).contains(c));
            }
        }
        // Learns something: better than predicting everything positive.
        let (val, _) = ev.evaluate(&config("l2", 1.0), 3).unwrap();
        assert!(val[0] < 0.6 && val[1] < 0.6, "{val:?}");
    }

    #[test]
    fn rejects_bad_assignments_and_spaces() {
        let d = clusters(60, 1);
        let split = split_dataset(&d, STANDARD_FRACTIONS, 1).unwrap();
        let ev = LinearModelEvaluator::new(&d, &split).unwrap();
        let mut bad = config("l2", 0.0);
        bad = Assignment::new().with("penalty", bad.get("penalty").unwrap().clone());
        assert!(ev.evaluate(&bad, 0).is_err());
        assert!(ev.evaluate(&config("l3", 0.0), 0).is_err());
        assert!(ev.check_space(&ConfigurationSpace::linear_model()).is_ok());
        assert!(ev
            .check_space(&ConfigurationSpace::random_forest())
            .is_err());
        let empty_part = DataSplit {
            train: (0..50).collect(),
            validation: (50..60).collect(),
            test: vec![],
        };
        assert!(LinearModelEvaluator::new(&d, &empty_part).is_err());
    }
}
