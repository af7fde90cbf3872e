//! Plain-text model files:
//!
//! ```text
//! m nClasses          (nClasses = 0 for regression)
//! label label ...     (empty for regression)
//! w w w ...           (one line per weight vector)
//! ```

use std::io::{BufRead, Write};

use super::TrainedModel;
use crate::error::{Error, Result};
use crate::linalg::DenseVector;

fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn write_model<W: Write>(model: &TrainedModel, mut sink: W) -> Result<()> {
    writeln!(sink, "{} {}", model.num_features, model.class_labels.len())?;
    writeln!(sink, "{}", join(&model.class_labels))?;
    for w in &model.weights {
        writeln!(sink, "{}", join(w))?;
    }
    sink.flush()?;
    Ok(())
}

fn parse_reals(line: &str, lineno: usize, what: &str) -> Result<Vec<f64>> {
    line.split_whitespace()
        .map(|tok| match tok.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(Error::parse(lineno, format!("bad {what} {tok:?}"))),
        })
        .collect()
}

/// Reads a model written by [`write_model`]. The result has no spec and no
/// solver results.
pub fn read_model<R: BufRead>(reader: R) -> Result<TrainedModel> {
    let mut lines = Vec::new();
    for line in reader.lines() {
        lines.push(line?);
    }
    while lines.last().is_some_and(|l| l.trim().is_empty()) {
        lines.pop();
    }
    let header = lines.first().ok_or_else(|| Error::parse(1, "empty model file"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [m, k] = fields[..] else {
        return Err(Error::parse(1, "header must be `m nClasses`"));
    };
    let m: usize = m.parse().map_err(|_| Error::parse(1, format!("bad dimension {m:?}")))?;
    let k: usize = k.parse().map_err(|_| Error::parse(1, format!("bad class count {k:?}")))?;
    if k == 1 {
        return Err(Error::parse(1, "a classifier needs at least 2 classes"));
    }
    let class_labels = parse_reals(lines.get(1).map_or("", String::as_str), 2, "label")?;
    if class_labels.len() != k {
        return Err(Error::parse(2, format!("expected {k} labels, found {}", class_labels.len())));
    }
    let vectors = if k > 2 { k } else { 1 };
    let body = lines.get(2..).unwrap_or(&[]);
    if body.len() != vectors {
        return Err(Error::parse(
            3 + body.len().min(vectors),
            format!("expected {vectors} weight lines, found {}", body.len()),
        ));
    }
    let weights = body
        .iter()
        .enumerate()
        .map(|(i, line)| {
            let w = parse_reals(line, i + 3, "weight")?;
            if w.len() != m {
                return Err(Error::parse(i + 3, format!("expected {m} weights, found {}", w.len())));
            }
            Ok(DenseVector::from(w))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TrainedModel {
        weights,
        class_labels,
        num_features: m,
        spec: None,
        results: Vec::new(),
    })
}
