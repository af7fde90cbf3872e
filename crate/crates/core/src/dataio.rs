//! LIBSVM text format plus the split feature-file / label-file layout.
//!
//! Grammar (one example per line, whitespace separated):
//!
//! ```text
//! <label> <index>:<value> <index>:<value> ...
//! ```
//!
//! Indices must be strictly increasing within a line. Feature files use the
//! same grammar without the leading label; label files hold one number per
//! line. Parsing never consults the locale.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::linalg::{DenseVector, SparseExample};

/// Whether indices in a file start at 0 or at 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IndexBase {
    Zero,
    #[default]
    One,
}

impl IndexBase {
    pub fn offset(self) -> usize {
        match self {
            IndexBase::Zero => 0,
            IndexBase::One => 1,
        }
    }

    /// `true` maps to one-based, mirroring a `startwith1` flag.
    pub fn from_start_with_one(one_based: bool) -> Self {
        if one_based {
            IndexBase::One
        } else {
            IndexBase::Zero
        }
    }
}

/// `n` sparse examples, their labels and the feature dimension `m`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    examples: Vec<SparseExample>,
    labels: DenseVector,
    num_features: usize,
}

impl Dataset {
    /// Checks that labels line up with examples and every index is `< m`.
    pub fn new(
        examples: Vec<SparseExample>,
        labels: impl Into<DenseVector>,
        num_features: usize,
    ) -> Result<Self> {
        let labels = labels.into();
        if labels.len() != examples.len() {
            return Err(Error::DimensionMismatch {
                expected: examples.len(),
                found: labels.len(),
            });
        }
        if let Some(max) = examples.iter().filter_map(SparseExample::max_index).max() {
            if max >= num_features {
                return Err(Error::DimensionMismatch {
                    expected: num_features,
                    found: max + 1,
                });
            }
        }
        if let Some(bad) = labels.iter().find(|y| !y.is_finite()) {
            return Err(Error::InvalidLabel {
                label: *bad,
                reason: "labels must be finite",
            });
        }
        Ok(Dataset {
            examples,
            labels,
            num_features,
        })
    }

    /// Dimension inferred as `1 + max index`.
    pub fn from_examples(examples: Vec<SparseExample>, labels: impl Into<DenseVector>) -> Result<Self> {
        let m = inferred_dimension(&examples);
        Self::new(examples, labels, m)
    }

    pub fn examples(&self) -> &[SparseExample] {
        &self.examples
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn num_features(&self) -> usize {
        self.num_features
    }

    pub fn num_examples(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    /// Raises `m` so that train and test sets can share a dimension. Never
    /// shrinks below what the data needs.
    pub fn widen_features(&mut self, m: usize) {
        self.num_features = self.num_features.max(m);
    }

    /// Distinct label values in ascending order.
    pub fn distinct_labels(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.labels.to_vec();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    /// A new dataset holding the rows at `indices`, same dimension.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            examples: indices.iter().map(|&i| self.examples[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            num_features: self.num_features,
        }
    }

    pub fn into_parts(self) -> (Vec<SparseExample>, DenseVector, usize) {
        (self.examples, self.labels, self.num_features)
    }
}

fn inferred_dimension(examples: &[SparseExample]) -> usize {
    examples
        .iter()
        .filter_map(SparseExample::max_index)
        .max()
        .map_or(0, |j| j + 1)
}

fn parse_number(tok: &str, what: &str, line: usize) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid {what} `{tok}`")))?;
    if !v.is_finite() {
        return Err(Error::parse(line, format!("non-finite {what} `{tok}`")));
    }
    Ok(v)
}

/// Parses `index:value` tokens. Returns the entries (zeros dropped) and the
/// largest shifted index seen, zero-valued entries included.
fn parse_features<'a>(
    tokens: impl Iterator<Item = &'a str>,
    base: IndexBase,
    line: usize,
) -> Result<(SparseExample, Option<usize>)> {
    let mut entries = Vec::new();
    let mut last: Option<usize> = None;
    for tok in tokens {
        let (idx, val) = tok
            .split_once(':')
            .ok_or_else(|| Error::parse(line, format!("expected index:value, got `{tok}`")))?;
        let raw: usize = idx
            .parse()
            .map_err(|_| Error::parse(line, format!("invalid feature index `{idx}`")))?;
        let j = raw.checked_sub(base.offset()).ok_or_else(|| {
            Error::parse(
                line,
                format!("feature index {raw} below index base {}", base.offset()),
            )
        })?;
        if let Some(prev) = last {
            if j <= prev {
                return Err(Error::parse(
                    line,
                    format!("feature indices not strictly increasing at `{tok}`"),
                ));
            }
        }
        last = Some(j);
        let v = parse_number(val, "feature value", line)?;
        entries.push((j, v));
    }
    Ok((SparseExample::from_sorted(entries), last))
}

/// Reads a LIBSVM-format stream. Blank lines are skipped; `m` is one more
/// than the largest index seen.
pub fn read_libsvm<R: BufRead>(reader: R, base: IndexBase) -> Result<Dataset> {
    let mut examples = Vec::new();
    let mut labels = Vec::new();
    let mut m = 0;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let mut tokens = line.split_ascii_whitespace();
        let Some(label_tok) = tokens.next() else {
            continue;
        };
        let label = parse_number(label_tok, "label", lineno)?;
        let (example, max_idx) = parse_features(tokens, base, lineno)?;
        if let Some(j) = max_idx {
            m = m.max(j + 1);
        }
        examples.push(example);
        labels.push(label);
    }
    Ok(Dataset {
        examples,
        labels: labels.into(),
        num_features: m,
    })
}

/// Features-only counterpart of [`read_libsvm`]. Every line is one example,
/// so an empty line is an example with no features. Returns
/// `(examples, n, m)`.
pub fn read_feature_file<R: BufRead>(
    reader: R,
    base: IndexBase,
) -> Result<(Vec<SparseExample>, usize, usize)> {
    let mut examples = Vec::new();
    let mut m = 0;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let (example, max_idx) = parse_features(line.split_ascii_whitespace(), base, lineno + 1)?;
        if let Some(j) = max_idx {
            m = m.max(j + 1);
        }
        examples.push(example);
    }
    let n = examples.len();
    Ok((examples, n, m))
}

/// Reads exactly `n` numeric labels, one per line. Blank lines are ignored.
pub fn read_label_file<R: BufRead>(reader: R, n: usize) -> Result<DenseVector> {
    let mut labels = Vec::with_capacity(n);
    let mut last_line = 0;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        last_line = lineno + 1;
        let tok = line.trim();
        if tok.is_empty() {
            continue;
        }
        if labels.len() == n {
            return Err(Error::parse(last_line, format!("more than {n} labels")));
        }
        labels.push(parse_number(tok, "label", last_line)?);
    }
    if labels.len() != n {
        return Err(Error::parse(
            last_line,
            format!("expected {n} labels, found {}", labels.len()),
        ));
    }
    Ok(labels.into())
}

/// Reads a feature file and its label file into one dataset.
pub fn read_feature_label_files<F: BufRead, L: BufRead>(
    features: F,
    labels: L,
    base: IndexBase,
) -> Result<Dataset> {
    let (examples, n, m) = read_feature_file(features, base)?;
    let labels = read_label_file(labels, n)?;
    Dataset::new(examples, labels, m)
}

/// Writes `d` in canonical LIBSVM form: label, then `index:value` pairs in
/// increasing order separated by single spaces, `\n` line ends. Numbers use
/// the shortest representation that parses back to the same value.
pub fn write_libsvm<W: Write>(d: &Dataset, mut sink: W, base: IndexBase) -> Result<()> {
    for (example, label) in d.examples.iter().zip(d.labels.iter()) {
        write!(sink, "{label}")?;
        for &(j, v) in example.entries() {
            write!(sink, " {}:{v}", j + base.offset())?;
        }
        sink.write_all(b"\n")?;
    }
    sink.flush()?;
    Ok(())
}

/// Writes only the feature part, one example per line.
pub fn write_feature_file<W: Write>(examples: &[SparseExample], mut sink: W, base: IndexBase) -> Result<()> {
    for example in examples {
        let mut first = true;
        for &(j, v) in example.entries() {
            if !first {
                sink.write_all(b" ")?;
            }
            first = false;
            write!(sink, "{}:{v}", j + base.offset())?;
        }
        sink.write_all(b"\n")?;
    }
    sink.flush()?;
    Ok(())
}

pub fn write_label_file<W: Write>(labels: &[f64], mut sink: W) -> Result<()> {
    for y in labels {
        writeln!(sink, "{y}")?;
    }
    sink.flush()?;
    Ok(())
}
