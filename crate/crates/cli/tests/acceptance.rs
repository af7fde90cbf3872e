//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`); exits non-zero if any
//! criterion fails or overruns its time budget.

use std::path::Path;
use std::time::{Duration, Instant};

use clap::Parser;
use linconvex::batch_opt::{
    gd, gd_barzilai_borwein, gd_line_search, gd_nesterov, lbfgs, owlqn, tron, SolverConfig, SolverResult,
};
use linconvex::dataio::{read_libsvm, write_libsvm, Dataset, IndexBase};
use linconvex::dual_opt::{svc_dual, DualConfig, DualState, SvmKind};
use linconvex::losses::{convex_midpoint_check, DifferentiableFunction, LossKind, RegularizedLoss, Regularizer, CATALOG};
use linconvex::ml::{self, Algorithm, ClassifierSpec};
use linconvex::stochastic_opt::{
    sgd, sgd_adagrad, sgd_decaying_learning_rate, sgd_regularized_dual_averaging,
    sgd_regularized_dual_averaging_adagrad, sgd_stochastic_average_gradient, EpochSampler, StochasticConfig,
};
use linconvex::{Result as CoreResult, SparseExample};
use linconvex_cli::args::{normalize_flags, Cli, Command};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

/// Two significant figures, e.g. 0.885 → "8.9e-1".
fn sig2(v: f64) -> String {
    format!("{v:.1e}")
}

fn zero_fraction(w: &[f64]) -> f64 {
    w.iter().filter(|v| **v == 0.0).count() as f64 / w.len() as f64
}

/// Random sparse data around a hidden linear model; ±1 labels with a
/// fraction `flip` inverted.
fn synthetic(seed: u64, n: usize, m: usize, density: f64, flip: f64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let truth: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut examples = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let mut entries: Vec<(usize, f64)> = Vec::new();
        for j in 0..m {
            if rng.random::<f64>() < density {
                entries.push((j, rng.random_range(-1.0..1.0)));
            }
        }
        if entries.is_empty() {
            entries.push((rng.random_range(0..m), 1.0));
        }
        let x = SparseExample::new(entries).unwrap();
        let s = if x.dot(&truth) + 0.05 * rng.random_range(-1.0..1.0) >= 0.0 { 1.0 } else { -1.0 };
        labels.push(if rng.random::<f64>() < flip { -s } else { s });
        examples.push(x);
    }
    Dataset::new(examples, labels, m).unwrap()
}

fn random_point(rng: &mut ChaCha8Rng, m: usize, scale: f64) -> Vec<f64> {
    (0..m).map(|_| rng.random_range(-scale..scale)).collect()
}

fn data_file(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = linconvex_cli::run(std::iter::once("linconvex").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap())
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    let smooth: Vec<_> = CATALOG.iter().filter(|(_, k, r)| *r == Regularizer::L2 && k.is_smooth()).collect();
    ensure(smooth.len() == 6, || format!("expected 6 smooth losses, found {}", smooth.len()))?;
    for (i, (name, kind, reg)) in smooth.into_iter().enumerate() {
        let mut d = synthetic(100 + i as u64, 10, 5, 0.8, 0.1);
        if !kind.is_classification() {
            let (ex, y, m) = d.into_parts();
            let y: Vec<f64> = y.iter().map(|v| v * rng.random_range(0.5..2.0)).collect();
            d = Dataset::new(ex, y, m).unwrap();
        }
        let loss = RegularizedLoss::new(&d, *kind, *reg, 0.7).unwrap();
        for _ in 0..20 {
            let w = random_point(&mut rng, 5, 2.0);
            let (_, g) = loss.eval(&w);
            let h = 1e-6;
            let mut diff = 0.0;
            for j in 0..5 {
                let (mut a, mut b) = (w.clone(), w.clone());
                a[j] += h;
                b[j] -= h;
                let fd = (loss.value(&a) - loss.value(&b)) / (2.0 * h);
                diff += (fd - g[j]).powi(2);
            }
            let err = diff.sqrt() / g.norm().max(1e-12);
            ensure(err <= 1e-5, || format!("{name}: relative error {err:.2e}"))?;
            worst = worst.max(err);
        }
    }
    Ok(format!("6 losses x 20 points, worst relative error {worst:.1e}"))
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for (i, (name, kind, reg)) in CATALOG.iter().enumerate() {
        let d = synthetic(200 + i as u64, 20, 5, 0.6, 0.2);
        let d = if kind.is_classification() {
            d
        } else {
            let (ex, y, m) = d.into_parts();
            Dataset::new(ex, y.iter().map(|v| 3.0 * v).collect::<Vec<_>>(), m).unwrap()
        };
        let loss = RegularizedLoss::new(&d, *kind, *reg, 0.5).unwrap();
        for k in 0..1000 {
            let scale = [0.1, 1.0, 10.0, 100.0][k % 4];
            let a = random_point(&mut rng, 5, scale);
            let b = random_point(&mut rng, 5, scale);
            ensure(convex_midpoint_check(&loss, &a, &b), || format!("{name}: midpoint violation at pair {k}"))?;
        }
    }
    Ok("16 losses x 1000 pairs, no violation".into())
}

fn criterion_3() -> Outcome {
    let d = synthetic(3, 200, 10, 0.5, 0.08);
    let lambda = 1.0;
    let lipschitz = 0.25 * d.examples().iter().map(|x| x.squared_norm()).sum::<f64>() + lambda;
    let mut rows = Vec::new();
    for alg in [
        Algorithm::Gd,
        Algorithm::GdLineSearch,
        Algorithm::GdBarzilaiBorwein,
        Algorithm::GdNesterov,
        Algorithm::Lbfgs,
        Algorithm::Tron,
        Algorithm::Sgd,
        Algorithm::SgdAdagrad,
        Algorithm::Sag,
    ] {
        let mut spec = ClassifierSpec::new(LossKind::Logistic, Regularizer::L2, lambda, alg, 2).unwrap();
        spec.batch.tol = 0.01;
        spec.batch.max_eval = 100_000;
        spec.batch.alpha = if alg == Algorithm::Gd { 1.0 / lipschitz } else { 1.0 };
        spec.stochastic.epochs = 100;
        spec.stochastic.seed = 3;
        spec.stochastic.step_size = match alg {
            Algorithm::Sgd => 0.02,
            Algorithm::SgdAdagrad => 0.5,
            _ => {
                let max_sq = d.examples().iter().map(|x| x.squared_norm()).fold(0.0, f64::max);
                1.0 / (4.0 * max_sq + lambda)
            }
        };
        let model = ml::train(&spec, &d).map_err(|e| format!("{alg}: {e}"))?;
        let acc = ml::predict_accuracy(&model, &d).map_err(|e| e.to_string())?;
        rows.push((alg, acc, model.objective()));
    }
    let acc0 = sig2(rows[0].1);
    for (alg, acc, _) in &rows {
        ensure(sig2(*acc) == acc0, || format!("{alg}: accuracy {acc} vs {}", rows[0].1))?;
    }
    let batch: Vec<_> = rows.iter().filter(|r| !r.0.is_stochastic()).collect();
    let (lo, hi) = batch
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.2), hi.max(r.2)));
    ensure(rel(lo, hi) < 1e-4, || format!("batch objectives span [{lo}, {hi}]"))?;
    Ok(format!(
        "9 solvers, accuracy {acc0} (2 s.f.), batch objective spread {:.1e} relative",
        rel(lo, hi)
    ))
}

fn same_predictions(a: &[f64], b: &[f64], d: &Dataset) -> usize {
    d.examples()
        .iter()
        .filter(|x| (x.dot(a) >= 0.0) != (x.dot(b) >= 0.0))
        .count()
}

fn criterion_4() -> Outcome {
    let d = synthetic(4, 200, 10, 0.6, 0.1);
    let lambda = 1.0;
    let c = 1.0 / lambda;
    let zeros = vec![0.0; 10];

    let l2 = RegularizedLoss::new(&d, LossKind::SmoothSvm, Regularizer::L2, lambda).unwrap();
    let primal = lbfgs(&l2, &zeros, &SolverConfig { tol: 1e-6, ..SolverConfig::default() }).map_err(|e| e.to_string())?;
    let dual = svc_dual(&d, SvmKind::L2Svm, &DualConfig { c, tol: 1e-6, max_epochs: 10_000, seed: 4 })
        .map_err(|e| e.to_string())?;
    let r2 = rel(c * primal.f, dual.result.f);
    ensure(r2 < 1e-4, || format!("L2-SVM objectives {} vs {}", c * primal.f, dual.result.f))?;
    let m2 = same_predictions(&primal.w, &dual.result.w, &d);
    ensure(m2 == 0, || format!("L2-SVM: {m2} predictions differ"))?;

    let l1 = RegularizedLoss::new(&d, LossKind::HingeSvm, Regularizer::L2, lambda).unwrap();
    let sub = sgd_decaying_learning_rate(
        &l1,
        &zeros,
        &StochasticConfig {
            step_size: 0.01,
            decay_rate: 0.01,
            epochs: 20_000,
            mini_batch_size: d.num_examples(),
            ..StochasticConfig::default()
        },
    )
    .map_err(|e| e.to_string())?;
    let dual1 = svc_dual(&d, SvmKind::L1Svm, &DualConfig { c, tol: 1e-6, max_epochs: 10_000, seed: 4 })
        .map_err(|e| e.to_string())?;
    let r1 = rel(c * sub.f, dual1.result.f);
    ensure(r1 < 1e-3, || format!("L1-SVM objectives {} vs {}", c * sub.f, dual1.result.f))?;
    let m1 = same_predictions(&sub.w, &dual1.result.w, &d);
    ensure(m1 == 0, || format!("L1-SVM: {m1} predictions differ"))?;
    Ok(format!(
        "L2-SVM gap {r2:.1e}, L1-SVM (subgradient primal) gap {r1:.1e}, predictions identical on 200 examples"
    ))
}

/// Proximal gradient with step 1/L, L = ¼‖X‖_F² ≥ the logistic Lipschitz
/// constant. Stops early only if an iterate repeats exactly.
fn ista(loss: &RegularizedLoss, lambda: f64, iterations: usize) -> (Vec<f64>, usize) {
    let examples: &[SparseExample] = linconvex::losses::LinearModelLoss::examples(loss);
    let step = 1.0 / (0.25 * examples.iter().map(|x| x.squared_norm()).sum::<f64>());
    let mut w = vec![0.0; loss.dimension()];
    for k in 0..iterations {
        let (_, g) = loss.data_eval(&w);
        let next: Vec<f64> = w
            .iter()
            .zip(g.iter())
            .map(|(a, b)| {
                let z = a - step * b;
                z.signum() * (z.abs() - step * lambda).max(0.0)
            })
            .collect();
        if next == w {
            return (w, k);
        }
        w = next;
    }
    (w, iterations)
}

fn criterion_5() -> Outcome {
    let d = synthetic(5, 100, 10, 0.8, 0.05);
    let probe = RegularizedLoss::new(&d, LossKind::Logistic, Regularizer::L1, 0.0).unwrap();
    let lambda = 0.5 * probe.lambda_max();
    let loss = RegularizedLoss::new(&d, LossKind::Logistic, Regularizer::L1, lambda).unwrap();
    let zeros = vec![0.0; 10];
    let ow = owlqn(&loss, &zeros, &SolverConfig { tol: 1e-10, max_eval: 100_000, ..SolverConfig::default() })
        .map_err(|e| e.to_string())?;
    let sc = StochasticConfig {
        step_size: 1.0,
        epochs: 200,
        rda_gamma: 5.0,
        seed: 5,
        ..StochasticConfig::default()
    };
    let rda = sgd_regularized_dual_averaging(&loss, &zeros, &sc).map_err(|e| e.to_string())?;
    let ada = sgd_regularized_dual_averaging_adagrad(&loss, &zeros, &sc).map_err(|e| e.to_string())?;
    for (name, w) in [("OWL-QN", &ow.w), ("RDA", &rda.w), ("RDA-AdaGrad", &ada.w)] {
        let z = zero_fraction(w);
        ensure(z >= 0.2, || format!("{name}: only {:.0}% exact zeros", 100.0 * z))?;
    }
    let (w_ista, iters) = ista(&loss, lambda, 1_000_000);
    let f_ista = loss.value(&w_ista);
    let gap = rel(ow.f, f_ista);
    ensure(gap < 1e-6, || format!("OWL-QN {} vs ISTA {f_ista}", ow.f))?;
    Ok(format!(
        "zeros OWL-QN {:.0}% / RDA {:.0}% / RDA-AdaGrad {:.0}%; OWL-QN vs ISTA ({iters} iterations to a fixed point) {gap:.1e}",
        100.0 * zero_fraction(&ow.w),
        100.0 * zero_fraction(&rda.w),
        100.0 * zero_fraction(&ada.w)
    ))
}

fn criterion_6() -> Outcome {
    let mut updates = 0usize;
    for seed in 0..50u64 {
        let d = synthetic(600 + seed, 30, 5, 0.6, 0.2);
        let kind = if seed % 2 == 0 { SvmKind::L1Svm } else { SvmKind::L2Svm };
        let c = 0.05 + 0.1 * seed as f64;
        let mut st = DualState::new(d.examples(), d.labels(), 5, kind, c).map_err(|e| e.to_string())?;
        let mut sampler = EpochSampler::new(seed);
        let mut last = st.dual_objective();
        for epoch in 0..50 {
            for i in sampler.next_epoch(30) {
                st.update(i);
                updates += 1;
                let a = st.alpha()[i];
                ensure(a >= 0.0 && a <= st.upper_bound(), || format!("problem {seed}: alpha {a} left the box"))?;
            }
            let now = st.dual_objective();
            ensure(now >= last - 1e-12 * last.abs().max(1.0), || {
                format!("problem {seed} epoch {epoch}: dual fell {last} -> {now}")
            })?;
            last = now;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let x = SparseExample::new(vec![(0, rng.random_range(0.1..3.0)), (2, rng.random_range(-3.0..3.0))]).unwrap();
        let c: f64 = rng.random_range(0.01..5.0);
        let expected = c.min(1.0 / x.squared_norm());
        let y = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let d = Dataset::new(vec![x], vec![y], 3).unwrap();
        let s = svc_dual(&d, SvmKind::L1Svm, &DualConfig { c, tol: 1e-12, max_epochs: 10, seed: 0 })
            .map_err(|e| e.to_string())?;
        let err = (s.alpha[0] - expected).abs();
        ensure(err <= 1e-10, || format!("closed form off by {err:.1e}"))?;
        worst = worst.max(err);
    }
    Ok(format!(
        "50 problems, {updates} coordinate updates feasible, dual monotone; closed form worst error {worst:.1e}"
    ))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 0..100 {
        let n = rng.random_range(0..30);
        let m = rng.random_range(1..40);
        let examples: Vec<SparseExample> = (0..n)
            .map(|_| {
                let mut entries = Vec::new();
                for j in 0..m {
                    if rng.random::<f64>() < 0.3 {
                        entries.push((j, rng.random_range(-1e3..1e3) * 10f64.powi(rng.random_range(-8..8))));
                    }
                }
                SparseExample::new(entries).unwrap()
            })
            .collect();
        let labels: Vec<f64> = (0..n).map(|_| rng.random_range(-5..5) as f64 * 0.5).collect();
        let d = Dataset::from_examples(examples, labels).unwrap();
        let base = if k % 2 == 0 { IndexBase::One } else { IndexBase::Zero };
        let mut first = Vec::new();
        write_libsvm(&d, &mut first, base).map_err(|e| e.to_string())?;
        let back = read_libsvm(first.as_slice(), base).map_err(|e| format!("dataset {k}: {e}"))?;
        let mut second = Vec::new();
        write_libsvm(&back, &mut second, base).map_err(|e| e.to_string())?;
        ensure(first == second, || format!("dataset {k}: second write differs"))?;
        ensure(back.examples() == d.examples() && back.labels() == d.labels(), || format!("dataset {k}: values changed"))?;
    }

    let argv = [
        "linconvex", "train", "-method", "3", "-algtype", "0", "-reg", "0.25", "-nClasses", "20", "-maxIter", "1000",
        "-startwith1", "true", "-trainFeatureFile", "../data/20newsgroup.feat", "-trainLabelFile",
        "../data/20newsgroup.label", "-testFeatureFile", "../data/20newsgroup.feat", "-testLabelFile",
        "../data/20newsgroup.label",
    ];
    let cli = Cli::try_parse_from(normalize_flags(argv)).map_err(|e| e.to_string())?;
    let Command::Train(t) = cli.command else {
        return Err("flag set parsed to the wrong subcommand".into());
    };
    ensure(
        t.method == 3 && t.algtype == 0 && t.solver.reg == 0.25 && t.n_classes == 20 && t.solver.max_iter == 1000
            && t.data.startwith1
            && t.data.test_label_file.is_some(),
        || format!("flag values misread: {t:?}"),
    )?;

    let mut note = "ijcnn1 not present locally, skipped".to_owned();
    for name in ["ijcnn1", "ijcnn1.tr", "ijcnn1.libsvm"] {
        let path = data_file(name);
        if Path::new(&path).exists() {
            let file = std::fs::File::open(&path).map_err(|e| e.to_string())?;
            let d = read_libsvm(std::io::BufReader::new(file), IndexBase::One).map_err(|e| e.to_string())?;
            ensure(d.num_examples() == 35_000 && d.num_features() == 22, || {
                format!("{name}: n = {}, m = {}", d.num_examples(), d.num_features())
            })?;
            note = format!("{name} loaded with n = 35000, m = 22");
        }
    }
    Ok(format!("100 datasets byte-identical on rewrite; listing flags parse; {note}"))
}

fn criterion_8() -> Outcome {
    let sep = data_file("separable4.libsvm");
    let (code, out) = run_cli(&["train", "-trainFile", &sep, "-testFile", &sep]);
    ensure(code == 0 && out == "accuracy 1\n", || format!("train exit {code}, output {out:?}"))?;

    let bin = data_file("binary200.libsvm");
    let (code, out) = run_cli(&["bench", "-trainFile", &bin]);
    ensure(code == 0, || format!("bench exit {code}"))?;
    let mut rows = 0;
    let mut l2_acc = Vec::new();
    for line in out.lines().skip(1) {
        let cells: Vec<&str> = line.split('\t').collect();
        let (objective, solver) = (cells[0], cells[1]);
        let dual_row = objective.ends_with("-dual");
        let supported = if dual_row {
            solver == "svcDual"
        } else {
            solver != "svcDual" && !(objective == "l1svm-primal" && solver == "tron")
        };
        ensure((cells[2] == "*") != supported, || format!("wrong cell marking: {line}"))?;
        if supported && objective.starts_with("l2svm") {
            l2_acc.push(cells[4].parse::<f64>().map_err(|e| e.to_string())?);
        }
        rows += 1;
    }
    ensure(rows == 15, || format!("expected 15 rows, got {rows}"))?;
    ensure(l2_acc.iter().all(|a| sig2(*a) == sig2(l2_acc[0])), || {
        format!("L2-SVM primal/dual accuracies disagree: {l2_acc:?}")
    })?;
    Ok(format!(
        "`accuracy 1` on separable data; bench 5 objectives x 3 solvers, `*` cells as expected, L2-SVM accuracies {}",
        sig2(l2_acc[0])
    ))
}

type Batch<'a> = fn(&RegularizedLoss<'a>, &[f64], &SolverConfig) -> CoreResult<SolverResult>;
type Stoch<'a> = fn(&RegularizedLoss<'a>, &[f64], &StochasticConfig) -> CoreResult<SolverResult>;

fn criterion_9() -> Outcome {
    let d = synthetic(9, 150, 8, 0.6, 0.1);
    let l2 = RegularizedLoss::new(&d, LossKind::Logistic, Regularizer::L2, 1.0).unwrap();
    let l1 = RegularizedLoss::new(&d, LossKind::Logistic, Regularizer::L1, 2.0).unwrap();
    let x0 = vec![0.0; 8];
    let cfg = SolverConfig { alpha: 0.05, tol: 1e-8, max_eval: 500, ..SolverConfig::default() };
    let mut paths = 0;
    let batch: [(&str, Batch); 6] = [
        ("gd", gd),
        ("gdLineSearch", gd_line_search),
        ("gdBarzilaiBorwein", gd_barzilai_borwein),
        ("gdNesterov", gd_nesterov),
        ("lbfgs", lbfgs),
        ("tron", tron),
    ];
    for (name, s) in batch {
        ensure(s(&l2, &x0, &cfg).ok() == s(&l2, &x0, &cfg).ok(), || format!("{name} differs between runs"))?;
        paths += 1;
    }
    ensure(owlqn(&l1, &x0, &cfg).ok() == owlqn(&l1, &x0, &cfg).ok(), || "owlqn differs between runs".into())?;
    paths += 1;
    for seed in [0, 1, 12345] {
        let sc = StochasticConfig { step_size: 0.05, epochs: 10, mini_batch_size: 4, seed, ..StochasticConfig::default() };
        let on_l2: [(&str, Stoch); 4] = [
            ("sgd", sgd),
            ("sgdDecayingLearningRate", sgd_decaying_learning_rate),
            ("sgdAdagrad", sgd_adagrad),
            ("sag", sgd_stochastic_average_gradient),
        ];
        for (name, s) in on_l2 {
            ensure(s(&l2, &x0, &sc).ok() == s(&l2, &x0, &sc).ok(), || format!("{name} seed {seed} differs"))?;
            paths += 1;
        }
        let on_l1: [(&str, Stoch); 2] = [
            ("rda", sgd_regularized_dual_averaging),
            ("rdaAdagrad", sgd_regularized_dual_averaging_adagrad),
        ];
        for (name, s) in on_l1 {
            ensure(s(&l1, &x0, &sc).ok() == s(&l1, &x0, &sc).ok(), || format!("{name} seed {seed} differs"))?;
            paths += 1;
        }
        for kind in [SvmKind::L1Svm, SvmKind::L2Svm] {
            let dc = DualConfig { c: 1.0, tol: 1e-6, max_epochs: 50, seed };
            ensure(svc_dual(&d, kind, &dc).ok() == svc_dual(&d, kind, &dc).ok(), || format!("svcDual seed {seed} differs"))?;
            paths += 1;
        }
    }
    let bin = data_file("binary200.libsvm");
    let args = ["train", "-algtype", "8", "-stepSize", "0.05", "-maxIter", "20", "-seed", "3", "-trainFile", &bin, "-testFile", &bin];
    ensure(run_cli(&args) == run_cli(&args), || "CLI output differs between runs".into())?;
    Ok(format!("{paths} solver paths and the CLI bit-identical across two runs"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, u64); 9] = [
        ("gradient oracle", criterion_1, 5),
        ("convexity", criterion_2, 30),
        ("cross-solver agreement", criterion_3, 60),
        ("primal-dual agreement", criterion_4, 30),
        ("L1 sparsity", criterion_5, 60),
        ("dual invariants", criterion_6, 10),
        ("I/O round trip", criterion_7, 10),
        ("end-to-end CLI", criterion_8, 30),
        ("determinism", criterion_9, 30),
    ];
    let mut failed = 0;
    for (k, (name, check, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > Duration::from_secs(budget) => {
                Err(format!("{detail}; but took {took:.2?}, budget {budget} s"))
            }
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail} [{took:.2?}]", k + 1),
            Err(reason) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {reason} [{took:.2?}]", k + 1);
            }
        }
    }
    println!("{} of 9 acceptance criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
