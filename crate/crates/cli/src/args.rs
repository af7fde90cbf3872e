use std::ffi::OsString;
use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand};
use linconvex::losses::{LossKind, Regularizer};

pub const METHODS: [(&str, LossKind, Regularizer); 16] = [
    ("L2-regularized logistic regression", LossKind::Logistic, Regularizer::L2),
    ("L2-regularized hinge-loss SVM (L1-SVM)", LossKind::HingeSvm, Regularizer::L2),
    ("L2-regularized squared-hinge SVM (L2-SVM)", LossKind::SmoothSvm, Regularizer::L2),
    ("L1-regularized squared-hinge SVM (L2-SVM)", LossKind::SmoothSvm, Regularizer::L1),
    ("L1-regularized logistic regression", LossKind::Logistic, Regularizer::L1),
    ("L1-regularized hinge-loss SVM", LossKind::HingeSvm, Regularizer::L1),
    ("L2-regularized Huber SVM", LossKind::HuberSvm { threshold: linconvex::losses::DEFAULT_HUBER_THRESHOLD }, Regularizer::L2),
    ("L1-regularized Huber SVM", LossKind::HuberSvm { threshold: linconvex::losses::DEFAULT_HUBER_THRESHOLD }, Regularizer::L1),
    ("L2-regularized probit regression", LossKind::Probit, Regularizer::L2),
    ("L1-regularized probit regression", LossKind::Probit, Regularizer::L1),
    ("L2-regularized least squares (ridge)", LossKind::LeastSquares, Regularizer::L2),
    ("L1-regularized least squares (lasso)", LossKind::LeastSquares, Regularizer::L1),
    ("L2-regularized epsilon-insensitive SVR", LossKind::HingeSvr { epsilon: linconvex::losses::DEFAULT_SVR_EPSILON }, Regularizer::L2),
    ("L1-regularized epsilon-insensitive SVR", LossKind::HingeSvr { epsilon: linconvex::losses::DEFAULT_SVR_EPSILON }, Regularizer::L1),
    ("L2-regularized squared epsilon-insensitive SVR", LossKind::SmoothSvr { epsilon: linconvex::losses::DEFAULT_SVR_EPSILON }, Regularizer::L2),
    ("L1-regularized squared epsilon-insensitive SVR", LossKind::SmoothSvr { epsilon: linconvex::losses::DEFAULT_SVR_EPSILON }, Regularizer::L1),
];

const ENUMERATIONS: &str = "\
-method (objective):
   0  L2 logistic             8  L2 probit
   1  L2 hinge SVM            9  L1 probit
   2  L2 squared-hinge SVM   10  L2 least squares
   3  L1 squared-hinge SVM   11  L1 least squares
   4  L1 logistic            12  L2 eps-insensitive SVR
   5  L1 hinge SVM           13  L1 eps-insensitive SVR
   6  L2 Huber SVM           14  L2 squared eps-insensitive SVR
   7  L1 Huber SVM           15  L1 squared eps-insensitive SVR
Methods 10-15 are regression; -nClasses is ignored and `mse` is reported.

-algtype (solver):
   0  OWL-QN (L1 only)             7  dual coordinate descent (L2 hinge/squared hinge)
   1  gradient descent             8  SGD
   2  GD + line search             9  SGD, decaying step
   3  GD + Barzilai-Borwein       10  SGD + AdaGrad
   4  GD + Nesterov               11  SAG (L2 only)
   5  L-BFGS                      12  RDA (L1 only)
   6  trust-region Newton         13  RDA + AdaGrad (L1 only)
-maxIter is the evaluation budget for 0-6 and the epoch count for 7-13.

Flags take a single dash, e.g. `-method 3 -algtype 0 -reg 0.25`.
Exit status: 0 success, 1 usage error, 2 data or model error.";

#[derive(Debug, Parser)]
#[command(name = "linconvex", version, about = "Train, evaluate and benchmark linear models", after_long_help = ENUMERATIONS)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a model; report test accuracy when test data is given
    Train(TrainArgs),
    /// Predict with a saved model
    Predict(PredictArgs),
    /// Time several solvers on the standard SVM/logistic objectives
    Bench(BenchArgs),
}

/// Feature/label file pair or a combined LIBSVM file, per role.
#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    #[arg(long = "trainFeatureFile")]
    pub train_feature_file: Option<PathBuf>,
    #[arg(long = "trainLabelFile")]
    pub train_label_file: Option<PathBuf>,
    /// Training data in LIBSVM format
    #[arg(long = "trainFile")]
    pub train_file: Option<PathBuf>,
    #[arg(long = "testFeatureFile")]
    pub test_feature_file: Option<PathBuf>,
    #[arg(long = "testLabelFile")]
    pub test_label_file: Option<PathBuf>,
    /// Test data in LIBSVM format
    #[arg(long = "testFile")]
    pub test_file: Option<PathBuf>,
    /// Feature indices in files start at 1
    #[arg(long = "startwith1", default_value_t = true, action = ArgAction::Set)]
    pub startwith1: bool,
}

/// Solver knobs shared by train and bench.
#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Regularization strength λ
    #[arg(long = "reg", default_value_t = 1.0)]
    pub reg: f64,
    /// Evaluation budget (batch solvers) or epochs (dual and stochastic)
    #[arg(long = "maxIter", default_value_t = 1000)]
    pub max_iter: usize,
    /// Stopping tolerance
    #[arg(long = "tol", default_value_t = 0.01)]
    pub tol: f64,
    #[arg(long = "seed", default_value_t = 0)]
    pub seed: u64,
    /// Initial step for batch solvers
    #[arg(long = "alpha", default_value_t = 1.0)]
    pub alpha: f64,
    /// Armijo sufficient-decrease constant
    #[arg(long = "gamma", default_value_t = 1e-4)]
    pub gamma: f64,
    #[arg(long = "lbfgsMemory", default_value_t = 100)]
    pub memory: usize,
    /// Step size for stochastic solvers
    #[arg(long = "stepSize", default_value_t = 0.01)]
    pub step_size: f64,
    #[arg(long = "decayRate", default_value_t = 0.01)]
    pub decay_rate: f64,
    #[arg(long = "miniBatchSize", default_value_t = 1)]
    pub mini_batch_size: usize,
    #[arg(long = "rdaGamma", default_value_t = 1.0)]
    pub rda_gamma: f64,
    #[arg(long = "verbosity", default_value_t = 0)]
    pub verbosity: u8,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    /// Objective, see `--help`
    #[arg(long = "method", default_value_t = 0)]
    pub method: usize,
    /// Solver, see `--help`
    #[arg(long = "algtype", default_value_t = 5)]
    pub algtype: usize,
    #[arg(long = "nClasses", default_value_t = 2)]
    pub n_classes: usize,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub data: DataArgs,
    /// Write the trained model here
    #[arg(long = "modelOut")]
    pub model_out: Option<PathBuf>,
    /// Also report k-fold cross-validated accuracy on the training data
    #[arg(long = "folds")]
    pub folds: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct PredictArgs {
    #[arg(long = "modelIn")]
    pub model_in: PathBuf,
    #[arg(long = "testFeatureFile")]
    pub test_feature_file: Option<PathBuf>,
    #[arg(long = "testLabelFile")]
    pub test_label_file: Option<PathBuf>,
    #[arg(long = "testFile")]
    pub test_file: Option<PathBuf>,
    #[arg(long = "startwith1", default_value_t = true, action = ArgAction::Set)]
    pub startwith1: bool,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Comma-separated rows: logistic, l2svm-primal, l2svm-dual,
    /// l1svm-primal, l1svm-dual
    #[arg(long = "objectives", default_value = "logistic,l2svm-primal,l2svm-dual,l1svm-primal,l1svm-dual")]
    pub objectives: String,
    /// Comma-separated solver names (see the -algtype list)
    #[arg(long = "solvers", default_value = "lbfgs,tron,svcDual")]
    pub solvers: String,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub data: DataArgs,
}

/// Rewrites `-name` as `--name` so the single-dash long flags of the
/// original tool parse with clap. Negative numbers and `--x` are left as is.
pub fn normalize_flags<I, T>(args: I) -> Vec<OsString>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    args.into_iter()
        .map(Into::into)
        .map(|a| match a.to_str() {
            Some(s) if s.len() > 2 && s.starts_with('-') && s.as_bytes()[1].is_ascii_alphabetic() => {
                OsString::from(format!("-{s}"))
            }
            _ => a,
        })
        .collect()
}
