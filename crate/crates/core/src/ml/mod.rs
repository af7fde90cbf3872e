//! Classifiers and regressors: bind a catalog loss to a solver, train on a
//! [`Dataset`], predict, score and cross-validate.
//!
//! Binary problems map the two sorted label values to −1/+1 and train one
//! weight vector. More than two classes use one-vs-rest. Losses that are
//! not classification losses are treated as regression on the raw labels.

mod model_file;

pub use model_file::{read_model, write_model};

use std::fmt;

use crate::batch_opt::{self, SolverConfig, SolverResult};
use crate::dataio::Dataset;
use crate::dual_opt::{svc_dual_with_labels, DualConfig, SvmKind};
use crate::error::{Error, Result};
use crate::linalg::{DenseVector, SparseExample};
use crate::losses::{LossKind, RegularizedLoss, Regularizer};
use crate::stochastic_opt::{self, EpochSampler, StochasticConfig};

/// Solver selector. The numeric codes are a stable interface (`algtype` on
/// the command line).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    OwlQn,
    Gd,
    GdLineSearch,
    GdBarzilaiBorwein,
    GdNesterov,
    Lbfgs,
    Tron,
    SvcDual,
    Sgd,
    SgdDecayingLearningRate,
    SgdAdagrad,
    Sag,
    Rda,
    RdaAdagrad,
}

impl Algorithm {
    pub const ALL: [Algorithm; 14] = [
        Algorithm::OwlQn,
        Algorithm::Gd,
        Algorithm::GdLineSearch,
        Algorithm::GdBarzilaiBorwein,
        Algorithm::GdNesterov,
        Algorithm::Lbfgs,
        Algorithm::Tron,
        Algorithm::SvcDual,
        Algorithm::Sgd,
        Algorithm::SgdDecayingLearningRate,
        Algorithm::SgdAdagrad,
        Algorithm::Sag,
        Algorithm::Rda,
        Algorithm::RdaAdagrad,
    ];

    pub fn code(self) -> usize {
        Self::ALL.iter().position(|a| *a == self).expect("listed")
    }

    pub fn from_code(code: usize) -> Option<Self> {
        Self::ALL.get(code).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::OwlQn => "owlqn",
            Algorithm::Gd => "gd",
            Algorithm::GdLineSearch => "gdLineSearch",
            Algorithm::GdBarzilaiBorwein => "gdBarzilaiBorwein",
            Algorithm::GdNesterov => "gdNesterov",
            Algorithm::Lbfgs => "lbfgs",
            Algorithm::Tron => "tron",
            Algorithm::SvcDual => "svcDual",
            Algorithm::Sgd => "sgd",
            Algorithm::SgdDecayingLearningRate => "sgdDecayingLearningRate",
            Algorithm::SgdAdagrad => "sgdAdagrad",
            Algorithm::Sag => "sag",
            Algorithm::Rda => "rda",
            Algorithm::RdaAdagrad => "rdaAdagrad",
        }
    }

    /// Case-insensitive lookup by [`Self::name`].
    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|a| a.name().eq_ignore_ascii_case(name))
    }

    pub fn is_stochastic(self) -> bool {
        matches!(
            self,
            Algorithm::Sgd
                | Algorithm::SgdDecayingLearningRate
                | Algorithm::SgdAdagrad
                | Algorithm::Sag
                | Algorithm::Rda
                | Algorithm::RdaAdagrad
        )
    }

    /// Why this solver cannot train `loss` with `regularizer`, if it can't.
    pub fn incompatibility(self, loss: LossKind, regularizer: Regularizer, lambda: f64) -> Option<String> {
        let name = self.name();
        match self {
            Algorithm::OwlQn | Algorithm::Rda | Algorithm::RdaAdagrad if regularizer != Regularizer::L1 => {
                Some(format!("{name} needs an L1 regularizer"))
            }
            Algorithm::Sag if regularizer != Regularizer::L2 => Some(format!("{name} needs an L2 regularizer")),
            Algorithm::Tron if regularizer != Regularizer::L2 || !loss.has_curvature() => Some(format!(
                "{name} needs Hessian-vector products (L2 with least squares, logistic, smooth SVM or smooth SVR)"
            )),
            Algorithm::SvcDual
                if regularizer != Regularizer::L2
                    || !matches!(loss, LossKind::HingeSvm | LossKind::SmoothSvm) =>
            {
                Some(format!("{name} needs an L2-regularized hinge or smooth SVM loss"))
            }
            Algorithm::SvcDual if lambda <= 0.0 => Some(format!("{name} needs lambda > 0 (C = 1/lambda)")),
            _ => None,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Everything needed to train: loss, regularizer, strength, solver and its
/// settings, and the number of classes (ignored for regression losses).
///
/// `dual.c` is not used; the dual solver always runs with `C = 1/λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierSpec {
    pub loss: LossKind,
    pub regularizer: Regularizer,
    pub lambda: f64,
    pub algorithm: Algorithm,
    pub n_classes: usize,
    pub batch: SolverConfig,
    pub stochastic: StochasticConfig,
    pub dual: DualConfig,
}

impl ClassifierSpec {
    /// Default solver settings; fails if `algorithm` does not apply.
    pub fn new(
        loss: LossKind,
        regularizer: Regularizer,
        lambda: f64,
        algorithm: Algorithm,
        n_classes: usize,
    ) -> Result<Self> {
        let spec = ClassifierSpec {
            loss,
            regularizer,
            lambda,
            algorithm,
            n_classes,
            batch: SolverConfig::default(),
            stochastic: StochasticConfig::default(),
            dual: DualConfig::default(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn is_classification(&self) -> bool {
        self.loss.is_classification()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::Config(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        if let Some(why) = self.algorithm.incompatibility(self.loss, self.regularizer, self.lambda) {
            return Err(Error::Config(why));
        }
        if self.is_classification() && self.n_classes < 2 {
            return Err(Error::Config(format!(
                "classification needs at least 2 classes, got {}",
                self.n_classes
            )));
        }
        if self.algorithm.is_stochastic() {
            self.stochastic.validate()
        } else if self.algorithm == Algorithm::SvcDual {
            DualConfig {
                c: 1.0 / self.lambda,
                ..self.dual.clone()
            }
            .validate()
        } else {
            self.batch.validate()
        }
    }
}

/// Trained weights. `class_labels` is empty for regression, holds the
/// negative then positive label for binary problems, and one label per
/// weight vector for one-vs-rest.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub weights: Vec<DenseVector>,
    pub class_labels: Vec<f64>,
    pub num_features: usize,
    /// Absent for models loaded from a file.
    pub spec: Option<ClassifierSpec>,
    /// One solver run per weight vector; objectives are λ-convention.
    /// Empty for loaded models.
    pub results: Vec<SolverResult>,
}

impl TrainedModel {
    pub fn is_regression(&self) -> bool {
        self.class_labels.is_empty()
    }

    /// One score per weight vector: `w_k·x`, ignoring indices `≥ m`.
    pub fn scores(&self, x: &SparseExample) -> Vec<f64> {
        self.weights.iter().map(|w| x.dot_truncated(w)).collect()
    }

    /// Total objective over all sub-models.
    pub fn objective(&self) -> f64 {
        self.results.iter().map(|r| r.f).sum()
    }
}

/// Trains per `spec`: binary, one-vs-rest or regression depending on the
/// loss and the number of distinct labels.
pub fn train(spec: &ClassifierSpec, data: &Dataset) -> Result<TrainedModel> {
    spec.validate()?;
    if data.is_empty() {
        return Err(Error::InvalidInput("cannot train on an empty dataset".into()));
    }
    if !spec.is_classification() {
        let result = fit(spec, data.examples(), data.labels().to_vec(), data.num_features())?;
        return Ok(TrainedModel {
            weights: vec![result.w.clone()],
            class_labels: Vec::new(),
            num_features: data.num_features(),
            spec: Some(spec.clone()),
            results: vec![result],
        });
    }
    let classes = class_set(spec, data)?;
    train_with_classes(spec, data, &classes)
}

fn class_set(spec: &ClassifierSpec, data: &Dataset) -> Result<Vec<f64>> {
    let classes = data.distinct_labels();
    if classes.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "classification needs at least 2 distinct labels, found {}",
            classes.len()
        )));
    }
    if classes.len() != spec.n_classes {
        return Err(Error::Config(format!(
            "nClasses is {} but the data has {} distinct labels",
            spec.n_classes,
            classes.len()
        )));
    }
    Ok(classes)
}

fn train_with_classes(spec: &ClassifierSpec, data: &Dataset, classes: &[f64]) -> Result<TrainedModel> {
    if classes.len() > 2 {
        return one_vs_rest(spec, data, classes);
    }
    let positive = classes[1];
    let labels = data
        .labels()
        .iter()
        .map(|&y| if y == positive { 1.0 } else { -1.0 })
        .collect();
    let result = fit(spec, data.examples(), labels, data.num_features())?;
    Ok(TrainedModel {
        weights: vec![result.w.clone()],
        class_labels: classes.to_vec(),
        num_features: data.num_features(),
        spec: Some(spec.clone()),
        results: vec![result],
    })
}

/// One-vs-rest even for two classes; used to check that the multiclass
/// path agrees with the binary one.
pub fn train_one_vs_rest(spec: &ClassifierSpec, data: &Dataset) -> Result<TrainedModel> {
    spec.validate()?;
    if !spec.is_classification() {
        return Err(Error::Config("one-vs-rest needs a classification loss".into()));
    }
    if data.is_empty() {
        return Err(Error::InvalidInput("cannot train on an empty dataset".into()));
    }
    let classes = class_set(spec, data)?;
    one_vs_rest(spec, data, &classes)
}

fn one_vs_rest(spec: &ClassifierSpec, data: &Dataset, classes: &[f64]) -> Result<TrainedModel> {
    let mut weights = Vec::with_capacity(classes.len());
    let mut results = Vec::with_capacity(classes.len());
    for &class in classes {
        let labels = data
            .labels()
            .iter()
            .map(|&y| if y == class { 1.0 } else { -1.0 })
            .collect();
        let r = fit(spec, data.examples(), labels, data.num_features())?;
        weights.push(r.w.clone());
        results.push(r);
    }
    Ok(TrainedModel {
        weights,
        class_labels: classes.to_vec(),
        num_features: data.num_features(),
        spec: Some(spec.clone()),
        results,
    })
}

/// One solver run from `w = 0`.
fn fit(spec: &ClassifierSpec, examples: &[SparseExample], labels: Vec<f64>, dim: usize) -> Result<SolverResult> {
    let loss = RegularizedLoss::with_labels(examples, labels, dim, spec.loss, spec.regularizer, spec.lambda)?;
    let x0 = vec![0.0; dim];
    let (b, s) = (&spec.batch, &spec.stochastic);
    match spec.algorithm {
        Algorithm::OwlQn => batch_opt::owlqn(&loss, &x0, b),
        Algorithm::Gd => batch_opt::gd(&loss, &x0, b),
        Algorithm::GdLineSearch => batch_opt::gd_line_search(&loss, &x0, b),
        Algorithm::GdBarzilaiBorwein => batch_opt::gd_barzilai_borwein(&loss, &x0, b),
        Algorithm::GdNesterov => batch_opt::gd_nesterov(&loss, &x0, b),
        Algorithm::Lbfgs => batch_opt::lbfgs(&loss, &x0, b),
        Algorithm::Tron => batch_opt::tron(&loss, &x0, b),
        Algorithm::Sgd => stochastic_opt::sgd(&loss, &x0, s),
        Algorithm::SgdDecayingLearningRate => stochastic_opt::sgd_decaying_learning_rate(&loss, &x0, s),
        Algorithm::SgdAdagrad => stochastic_opt::sgd_adagrad(&loss, &x0, s),
        Algorithm::Sag => stochastic_opt::sgd_stochastic_average_gradient(&loss, &x0, s),
        Algorithm::Rda => stochastic_opt::sgd_regularized_dual_averaging(&loss, &x0, s),
        Algorithm::RdaAdagrad => stochastic_opt::sgd_regularized_dual_averaging_adagrad(&loss, &x0, s),
        Algorithm::SvcDual => {
            let kind = match spec.loss {
                LossKind::HingeSvm => SvmKind::L1Svm,
                _ => SvmKind::L2Svm,
            };
            let cfg = DualConfig {
                c: 1.0 / spec.lambda,
                ..spec.dual.clone()
            };
            let mut r = svc_dual_with_labels(examples, loss.labels(), dim, kind, &cfg)?.result;
            // C-convention back to λ-convention
            r.f *= spec.lambda;
            for p in &mut r.trace {
                p.1 *= spec.lambda;
            }
            Ok(r)
        }
    }
}

/// Binary: the positive label when `w·x ≥ 0`, else the negative one.
/// Multiclass: label of the highest score, lowest index on ties.
/// Regression: `w·x`.
pub fn predict(model: &TrainedModel, x: &SparseExample) -> f64 {
    let scores = model.scores(x);
    match model.class_labels.len() {
        0 => scores[0],
        2 if model.weights.len() == 1 => {
            if scores[0] >= 0.0 {
                model.class_labels[1]
            } else {
                model.class_labels[0]
            }
        }
        _ => model.class_labels[argmax(&scores)],
    }
}

/// First index of the maximum.
pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (k, s) in scores.iter().enumerate().skip(1) {
        if *s > scores[best] {
            best = k;
        }
    }
    best
}

/// Fraction of examples whose predicted label equals the true one,
/// computed as `1 − errors/n`.
pub fn predict_accuracy(model: &TrainedModel, test: &Dataset) -> Result<f64> {
    if test.is_empty() {
        return Err(Error::InvalidInput("accuracy of an empty test set".into()));
    }
    let errors = test
        .examples()
        .iter()
        .zip(test.labels())
        .filter(|(x, y)| predict(model, x) != **y)
        .count();
    Ok(1.0 - errors as f64 / test.num_examples() as f64)
}

/// Mean squared prediction error; the regression counterpart of
/// [`predict_accuracy`].
pub fn mean_squared_error(model: &TrainedModel, test: &Dataset) -> Result<f64> {
    if test.is_empty() {
        return Err(Error::InvalidInput("error of an empty test set".into()));
    }
    let sum: f64 = test
        .examples()
        .iter()
        .zip(test.labels())
        .map(|(x, y)| {
            let r = predict(model, x) - y;
            r * r
        })
        .sum();
    Ok(sum / test.num_examples() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossValidation {
    pub mean_accuracy: f64,
    pub fold_accuracies: Vec<f64>,
}

/// Sizes of `folds` contiguous parts of `n` items; the first `n % folds`
/// parts get one extra item.
pub fn fold_sizes(n: usize, folds: usize) -> Vec<usize> {
    (0..folds).map(|k| n / folds + usize::from(k < n % folds)).collect()
}

/// Index sets of each fold after a seeded shuffle.
pub fn fold_assignment(n: usize, folds: usize, seed: u64) -> Vec<Vec<usize>> {
    let order = EpochSampler::new(seed).next_epoch(n);
    let mut start = 0;
    fold_sizes(n, folds)
        .into_iter()
        .map(|size| {
            let part = order[start..start + size].to_vec();
            start += size;
            part
        })
        .collect()
}

/// k-fold cross-validated accuracy. Every fold's model knows the full
/// label set, even if its training part is missing a class.
pub fn cross_validate(spec: &ClassifierSpec, data: &Dataset, folds: usize, seed: u64) -> Result<CrossValidation> {
    spec.validate()?;
    if !spec.is_classification() {
        return Err(Error::Unsupported("cross-validated accuracy needs a classification loss".into()));
    }
    if folds < 2 {
        return Err(Error::Config(format!("need at least 2 folds, got {folds}")));
    }
    let n = data.num_examples();
    if folds > n {
        return Err(Error::Config(format!("{folds} folds but only {n} examples")));
    }
    let classes = class_set(spec, data)?;
    let parts = fold_assignment(n, folds, seed);
    let mut fold_accuracies = Vec::with_capacity(folds);
    for (k, held_out) in parts.iter().enumerate() {
        let train_idx: Vec<usize> = parts
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != k)
            .flat_map(|(_, p)| p.iter().copied())
            .collect();
        let model = train_with_classes(spec, &data.subset(&train_idx), &classes)?;
        fold_accuracies.push(predict_accuracy(&model, &data.subset(held_out))?);
    }
    let mean_accuracy = fold_accuracies.iter().sum::<f64>() / folds as f64;
    Ok(CrossValidation {
        mean_accuracy,
        fold_accuracies,
    })
}
