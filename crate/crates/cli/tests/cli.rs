use std::fs;
use std::path::PathBuf;

use linconvex_cli::{run, EXIT_DATA, EXIT_OK, EXIT_USAGE};

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    p.to_str().unwrap().to_owned()
}

fn exec(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("linconvex").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn paper_style_invocation_runs() {
    let (feat, label) = (data("toy20.feat"), data("toy20.label"));
    let (code, out, err) = exec(&[
        "train", "-method", "3", "-algtype", "0", "-reg", "0.25", "-nClasses", "20", "-maxIter", "1000",
        "-startwith1", "true", "-trainFeatureFile", &feat, "-trainLabelFile", &label,
        "-testFeatureFile", &feat, "-testLabelFile", &label,
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    let acc: f64 = out.trim().strip_prefix("accuracy ").unwrap().parse().unwrap();
    assert!((0.0..=1.0).contains(&acc));
}

#[test]
fn separable_set_is_learned() {
    for form in [
        vec!["-trainFile".to_owned(), data("separable4.libsvm"), "-testFile".into(), data("separable4.libsvm")],
        vec![
            "-trainFeatureFile".into(),
            data("separable4.feat"),
            "-trainLabelFile".into(),
            data("separable4.label"),
            "-testFeatureFile".into(),
            data("separable4.feat"),
            "-testLabelFile".into(),
            data("separable4.label"),
        ],
    ] {
        let mut args = vec!["train"];
        args.extend(form.iter().map(String::as_str));
        let (code, out, _) = exec(&args);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out, "accuracy 1\n");
    }
}

#[test]
fn train_then_predict() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("model.txt");
    let model = model.to_str().unwrap();
    let (code, out, _) = exec(&["train", "-method", "2", "-algtype", "6", "-trainFile", &data("separable4.libsvm"), "-modelOut", model]);
    assert_eq!((code, out.as_str()), (EXIT_OK, ""));

    let (code, out, _) = exec(&["predict", "-modelIn", model, "-testFile", &data("separable4.libsvm")]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "1\n1\n-1\n-1\naccuracy 1\n");

    // features only: predictions, no accuracy
    let (code, out, _) = exec(&["predict", "-modelIn", model, "-testFeatureFile", &data("separable4.feat")]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "1\n1\n-1\n-1\n");

    let broken = dir.path().join("broken.txt");
    fs::write(&broken, "2 2\n-1 1\n0.5 oops\n").unwrap();
    let (code, _, err) = exec(&["predict", "-modelIn", broken.to_str().unwrap(), "-testFile", &data("separable4.libsvm")]);
    assert_eq!(code, EXIT_DATA);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn usage_errors_exit_one() {
    let sep = data("separable4.libsvm");
    for args in [
        vec!["train", "-method", "1"],
        vec!["train", "-trainFeatureFile", &sep],
        vec!["train", "-trainFile", &sep, "-trainFeatureFile", &sep],
        vec!["train", "-method", "0", "-algtype", "0", "-trainFile", &sep],
        vec!["train", "-method", "99", "-trainFile", &sep],
        vec!["train", "-algtype", "14", "-trainFile", &sep],
        vec!["train", "-nosuchflag", "1"],
        vec!["bench", "-objectives", "nonsense", "-trainFile", &sep],
        vec![],
    ] {
        let (code, _, err) = exec(&args);
        assert_eq!(code, EXIT_USAGE, "{args:?}: {err}");
        assert!(!err.is_empty());
    }
}

#[test]
fn data_errors_exit_two_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.libsvm");
    fs::write(&bad, "1 1:0.5\n-1 2:abc\n").unwrap();
    let (code, _, err) = exec(&["train", "-trainFile", bad.to_str().unwrap()]);
    assert_eq!(code, EXIT_DATA);
    assert!(err.contains("bad.libsvm") && err.contains("line 2"), "{err}");

    let (code, _, _) = exec(&["train", "-trainFile", "/definitely/not/here"]);
    assert_eq!(code, EXIT_DATA);
}

#[test]
fn help_documents_the_enumerations() {
    let (code, out, _) = exec(&["train", "--help"]);
    assert_eq!(code, EXIT_OK);
    for flag in ["--method", "--algtype", "--reg", "--nClasses", "--maxIter", "--startwith1", "--trainFeatureFile"] {
        assert!(out.contains(flag), "{flag}");
    }
    let (_, top, _) = exec(&["--help"]);
    assert!(top.contains("OWL-QN") && top.contains("L1 squared-hinge SVM"));
}

#[test]
fn regression_reports_mse() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("reg.libsvm");
    fs::write(&f, "2 1:1\n4 1:2\n6 1:3\n").unwrap();
    let f = f.to_str().unwrap();
    let (code, out, _) = exec(&["train", "-method", "10", "-reg", "0.001", "-tol", "1e-8", "-trainFile", f, "-testFile", f]);
    assert_eq!(code, EXIT_OK);
    let mse: f64 = out.trim().strip_prefix("mse ").unwrap().parse().unwrap();
    assert!(mse < 1e-4);
}

#[test]
fn cross_validation_flag() {
    let (code, out, _) = exec(&["train", "-trainFile", &data("binary200.libsvm"), "-folds", "5"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("cvAccuracy "));
}

#[test]
fn bench_marks_unsupported_pairs() {
    let (code, out, err) = exec(&["bench", "-trainFile", &data("binary200.libsvm")]);
    assert_eq!(code, EXIT_OK, "{err}");
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "objective\tsolver\tseconds\tobjective_value\ttrain_accuracy");
    assert_eq!(lines.len(), 1 + 5 * 3);
    for line in &lines[1..] {
        let cells: Vec<&str> = line.split('\t').collect();
        let star = cells[2] == "*";
        let expect_star = match (cells[0], cells[1]) {
            (o, "svcDual") => !o.ends_with("-dual"),
            (o, _) if o.ends_with("-dual") => true,
            ("l1svm-primal", "tron") => true,
            _ => false,
        };
        assert_eq!(star, expect_star, "{line}");
    }
}

#[test]
fn outputs_are_deterministic() {
    let args = ["train", "-algtype", "8", "-stepSize", "0.05", "-maxIter", "20", "-seed", "3", "-trainFile", &data("binary200.libsvm"), "-testFile", &data("binary200.libsvm")];
    assert_eq!(exec(&args), exec(&args));
}
