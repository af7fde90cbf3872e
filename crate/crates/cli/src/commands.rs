use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use linconvex::batch_opt::SolverConfig;
use linconvex::dataio::{self, Dataset, IndexBase};
use linconvex::dual_opt::DualConfig;
use linconvex::losses::{LossKind, Regularizer};
use linconvex::ml::{self, Algorithm, ClassifierSpec};
use linconvex::stochastic_opt::StochasticConfig;
use linconvex::SparseExample;

use crate::args::{BenchArgs, DataArgs, PredictArgs, SolverArgs, TrainArgs, METHODS};
use crate::CliError;

type Result<T> = std::result::Result<T, CliError>;

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn in_file<T>(path: &Path, r: linconvex::Result<T>) -> Result<T> {
    r.map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn read_libsvm(path: &Path, base: IndexBase) -> Result<Dataset> {
    in_file(path, dataio::read_libsvm(open(path)?, base))
}

fn read_pair(features: &Path, labels: &Path, base: IndexBase) -> Result<Dataset> {
    let (examples, n, m) = in_file(features, dataio::read_feature_file(open(features)?, base))?;
    let y = in_file(labels, dataio::read_label_file(open(labels)?, n))?;
    in_file(features, Dataset::new(examples, y, m))
}

/// Examples plus labels when the source has them.
enum TestData {
    Labelled(Dataset),
    Unlabelled(Vec<SparseExample>),
}

/// Loads one role from either a feature(+label) pair or a LIBSVM file.
/// `labels_optional` allows a feature file alone.
fn load_role(
    role: &str,
    features: Option<&Path>,
    labels: Option<&Path>,
    combined: Option<&Path>,
    base: IndexBase,
    labels_optional: bool,
) -> Result<Option<TestData>> {
    match (features, labels, combined) {
        (None, None, None) => Ok(None),
        (None, None, Some(f)) => Ok(Some(TestData::Labelled(read_libsvm(f, base)?))),
        (Some(_), _, Some(_)) | (_, Some(_), Some(_)) => Err(CliError::Usage(format!(
            "give either -{role}FeatureFile/-{role}LabelFile or -{role}File, not both"
        ))),
        (Some(f), Some(l), None) => Ok(Some(TestData::Labelled(read_pair(f, l, base)?))),
        (Some(f), None, None) if labels_optional => {
            let (examples, _, _) = in_file(f, dataio::read_feature_file(open(f)?, base))?;
            Ok(Some(TestData::Unlabelled(examples)))
        }
        (Some(_), None, None) => Err(CliError::Usage(format!("-{role}FeatureFile needs -{role}LabelFile"))),
        (None, Some(_), None) => Err(CliError::Usage(format!("-{role}LabelFile needs -{role}FeatureFile"))),
    }
}

fn load_training(data: &DataArgs) -> Result<Dataset> {
    let base = IndexBase::from_start_with_one(data.startwith1);
    match load_role(
        "train",
        data.train_feature_file.as_deref(),
        data.train_label_file.as_deref(),
        data.train_file.as_deref(),
        base,
        false,
    )? {
        Some(TestData::Labelled(d)) => Ok(d),
        _ => Err(CliError::Usage(
            "training data required: -trainFeatureFile and -trainLabelFile, or -trainFile".into(),
        )),
    }
}

fn spec_from(
    loss: LossKind,
    regularizer: Regularizer,
    algorithm: Algorithm,
    n_classes: usize,
    s: &SolverArgs,
) -> linconvex::Result<ClassifierSpec> {
    let spec = ClassifierSpec {
        loss,
        regularizer,
        lambda: s.reg,
        algorithm,
        n_classes,
        batch: SolverConfig {
            alpha: s.alpha,
            gamma: s.gamma,
            max_eval: s.max_iter,
            tol: s.tol,
            memory: s.memory,
            verbosity: s.verbosity,
        },
        stochastic: StochasticConfig {
            step_size: s.step_size,
            decay_rate: s.decay_rate,
            epochs: s.max_iter,
            mini_batch_size: s.mini_batch_size,
            seed: s.seed,
            rda_gamma: s.rda_gamma,
            ..StochasticConfig::default()
        },
        dual: DualConfig {
            c: 1.0,
            tol: s.tol,
            max_epochs: s.max_iter,
            seed: s.seed,
        },
    };
    spec.validate()?;
    Ok(spec)
}

fn report(out: &mut dyn Write, model: &ml::TrainedModel, test: &Dataset) -> Result<()> {
    if model.is_regression() {
        writeln!(out, "mse {}", ml::mean_squared_error(model, test)?)?;
    } else {
        writeln!(out, "accuracy {}", ml::predict_accuracy(model, test)?)?;
    }
    Ok(())
}

pub fn train(args: &TrainArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let &(_, loss, regularizer) = METHODS
        .get(args.method)
        .ok_or_else(|| CliError::Usage(format!("unknown -method {} (0-{})", args.method, METHODS.len() - 1)))?;
    let algorithm = Algorithm::from_code(args.algtype)
        .ok_or_else(|| CliError::Usage(format!("unknown -algtype {} (0-13)", args.algtype)))?;
    let spec = spec_from(loss, regularizer, algorithm, args.n_classes, &args.solver)?;

    let base = IndexBase::from_start_with_one(args.data.startwith1);
    let d = &args.data;
    let test = match load_role(
        "test",
        d.test_feature_file.as_deref(),
        d.test_label_file.as_deref(),
        d.test_file.as_deref(),
        base,
        false,
    )? {
        Some(TestData::Labelled(t)) => Some(t),
        _ => None,
    };
    let data = load_training(d)?;

    let model = ml::train(&spec, &data)?;
    if args.solver.verbosity > 0 {
        for (k, r) in model.results.iter().enumerate() {
            writeln!(err, "model {k}: f = {} after {} evaluations ({:?})", r.f, r.evaluations, r.terminated)?;
        }
    }
    if let Some(path) = &args.model_out {
        let file = File::create(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        in_file(path, ml::write_model(&model, BufWriter::new(file)))?;
    }
    if let Some(folds) = args.folds {
        let cv = ml::cross_validate(&spec, &data, folds, args.solver.seed)?;
        writeln!(out, "cvAccuracy {}", cv.mean_accuracy)?;
    }
    if let Some(test) = test {
        report(out, &model, &test)?;
    }
    Ok(())
}

pub fn predict(args: &PredictArgs, out: &mut dyn Write) -> Result<()> {
    let path = &args.model_in;
    let model = in_file(path, ml::read_model(open(path)?))?;
    let base = IndexBase::from_start_with_one(args.startwith1);
    let test = load_role(
        "test",
        args.test_feature_file.as_deref(),
        args.test_label_file.as_deref(),
        args.test_file.as_deref(),
        base,
        true,
    )?
    .ok_or_else(|| CliError::Usage("test data required: -testFeatureFile or -testFile".into()))?;
    let examples = match &test {
        TestData::Labelled(d) => d.examples(),
        TestData::Unlabelled(e) => e.as_slice(),
    };
    for x in examples {
        writeln!(out, "{}", ml::predict(&model, x))?;
    }
    if let TestData::Labelled(d) = &test {
        report(out, &model, d)?;
    }
    Ok(())
}

/// The five standard rows: which loss, and whether it is solved in the dual.
pub const OBJECTIVES: [(&str, LossKind, bool); 5] = [
    ("logistic", LossKind::Logistic, false),
    ("l2svm-primal", LossKind::SmoothSvm, false),
    ("l2svm-dual", LossKind::SmoothSvm, true),
    ("l1svm-primal", LossKind::HingeSvm, false),
    ("l1svm-dual", LossKind::HingeSvm, true),
];

/// Whether `solver` can run the `objective` row: dual rows only take the
/// dual solver, primal rows take any applicable primal solver.
pub fn bench_supported(dual_row: bool, loss: LossKind, solver: Algorithm) -> bool {
    if dual_row {
        solver == Algorithm::SvcDual
    } else {
        solver != Algorithm::SvcDual && solver.incompatibility(loss, Regularizer::L2, 1.0).is_none()
    }
}

pub fn bench(args: &BenchArgs, out: &mut dyn Write) -> Result<()> {
    let rows = args
        .objectives
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|name| {
            OBJECTIVES
                .iter()
                .find(|o| o.0.eq_ignore_ascii_case(name))
                .ok_or_else(|| CliError::Usage(format!("unknown objective {name:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let solvers = args
        .solvers
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|name| Algorithm::from_name(name).ok_or_else(|| CliError::Usage(format!("unknown solver {name:?}"))))
        .collect::<Result<Vec<_>>>()?;
    let data = load_training(&args.data)?;
    let n_classes = data.distinct_labels().len();

    writeln!(out, "objective\tsolver\tseconds\tobjective_value\ttrain_accuracy")?;
    for &&(name, loss, dual_row) in &rows {
        for &solver in &solvers {
            if !bench_supported(dual_row, loss, solver) {
                writeln!(out, "{name}\t{solver}\t*\t*\t*")?;
                continue;
            }
            let spec = spec_from(loss, Regularizer::L2, solver, n_classes, &args.solver)?;
            let start = Instant::now();
            let model = ml::train(&spec, &data)?;
            let seconds = start.elapsed().as_secs_f64();
            let accuracy = ml::predict_accuracy(&model, &data)?;
            writeln!(out, "{name}\t{solver}\t{seconds:.6}\t{}\t{accuracy}", model.objective())?;
        }
    }
    Ok(())
}
