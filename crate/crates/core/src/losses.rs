//! The differentiable-function contract and the catalog of regularized
//! linear-model losses.
//!
//! Every loss has the form
//!
//! ```text
//! f(w) = Σ_i ℓ(y_i, w·x_i) + λ·R(w),   R(w) = ½‖w‖²  or  ‖w‖₁
//! ```
//!
//! with the data term summed, not averaged: `λ` is a plain multiplier on the
//! regularizer. (LIBLINEAR-style `C·Σℓ + ½‖w‖²` is the same problem with
//! `C = 1/λ`, scaled by `C`.) There is no implicit intercept; append a
//! constant feature if one is wanted.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::dataio::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{check_len, DenseVector, SparseExample};

pub const DEFAULT_HUBER_THRESHOLD: f64 = 0.5;
pub const DEFAULT_SVR_EPSILON: f64 = 0.1;

/// Anything a solver can minimize: a value and a (sub)gradient, and
/// optionally a Hessian-vector product.
pub trait DifferentiableFunction {
    fn dimension(&self) -> usize;

    /// Objective value and a (sub)gradient at `w`.
    ///
    /// Panics if `w.len() != self.dimension()`; solvers check dimensions
    /// once on entry.
    fn eval(&self, w: &[f64]) -> (f64, DenseVector);

    fn value(&self, w: &[f64]) -> f64 {
        self.eval(w).0
    }

    fn supports_hessian(&self) -> bool {
        false
    }

    /// `H(w)·v`, where `H` is the Hessian or a generalized Hessian.
    fn hessian_vector_product(&self, _w: &[f64], _v: &[f64]) -> Result<DenseVector> {
        Err(Error::Unsupported(
            "this function does not provide Hessian-vector products".into(),
        ))
    }
}

/// `f(w) = s(w) + λ₁‖w‖₁` with `s` smooth. Orthant-wise and dual-averaging
/// solvers need the two parts separately.
pub trait CompositeL1: DifferentiableFunction {
    fn l1_strength(&self) -> f64;

    /// Value and gradient of the smooth part `s` only.
    fn eval_smooth(&self, w: &[f64]) -> (f64, DenseVector);
}

/// A sum of per-example terms `ℓ_i(w·x_i)` plus a regularizer. The gradient
/// of term `i` is `ℓ_i'(z)·x_i`, which is what stochastic solvers exploit.
pub trait LinearModelLoss: DifferentiableFunction {
    fn examples(&self) -> &[SparseExample];

    /// `dℓ_i/dz` at margin `z = w·x_i`.
    fn term_derivative(&self, i: usize, z: f64) -> f64;

    fn regularizer(&self) -> Regularizer;

    fn lambda(&self) -> f64;

    fn num_examples(&self) -> usize {
        self.examples().len()
    }

    /// `out += scale·λ·∇R(w)`, using `sign(0) = 0` for L1.
    fn add_regularizer_gradient(&self, w: &[f64], scale: f64, out: &mut [f64]) {
        let c = scale * self.lambda();
        if c == 0.0 {
            return;
        }
        match self.regularizer() {
            Regularizer::L2 => {
                for (o, wj) in out.iter_mut().zip(w) {
                    *o += c * wj;
                }
            }
            Regularizer::L1 => {
                for (o, wj) in out.iter_mut().zip(w) {
                    *o += c * sign(*wj);
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regularizer {
    /// `‖w‖₁`
    L1,
    /// `½‖w‖²`
    L2,
}

/// Per-example loss `ℓ(y, z)` with `z = w·x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LossKind {
    /// `½(z − y)²`
    LeastSquares,
    /// `log(1 + exp(−yz))`
    Logistic,
    /// `−log Φ(yz)`
    Probit,
    /// `max(0, 1 − yz)`
    HingeSvm,
    /// `max(0, 1 − yz)²`
    SmoothSvm,
    /// Hinge with a quadratic blend of half-width `threshold` around the kink.
    HuberSvm { threshold: f64 },
    /// `max(0, |z − y| − epsilon)`
    HingeSvr { epsilon: f64 },
    /// `max(0, |z − y| − epsilon)²`
    SmoothSvr { epsilon: f64 },
}

impl LossKind {
    pub fn huber_svm() -> Self {
        LossKind::HuberSvm {
            threshold: DEFAULT_HUBER_THRESHOLD,
        }
    }

    pub fn hinge_svr() -> Self {
        LossKind::HingeSvr {
            epsilon: DEFAULT_SVR_EPSILON,
        }
    }

    pub fn smooth_svr() -> Self {
        LossKind::SmoothSvr {
            epsilon: DEFAULT_SVR_EPSILON,
        }
    }

    /// Classification losses require labels in `{−1, +1}`.
    pub fn is_classification(&self) -> bool {
        !matches!(
            self,
            LossKind::LeastSquares | LossKind::HingeSvr { .. } | LossKind::SmoothSvr { .. }
        )
    }

    /// Losses with a (generalized) second derivative in `z`.
    pub fn has_curvature(&self) -> bool {
        matches!(
            self,
            LossKind::LeastSquares
                | LossKind::Logistic
                | LossKind::SmoothSvm
                | LossKind::SmoothSvr { .. }
        )
    }

    /// Continuously differentiable in `w` (no kinks).
    pub fn is_smooth(&self) -> bool {
        !matches!(self, LossKind::HingeSvm | LossKind::HingeSvr { .. })
    }

    fn validate(&self) -> Result<()> {
        match *self {
            LossKind::HuberSvm { threshold } if !(threshold > 0.0 && threshold.is_finite()) => Err(
                Error::Config(format!("Huber threshold must be > 0, got {threshold}")),
            ),
            LossKind::HingeSvr { epsilon } | LossKind::SmoothSvr { epsilon }
                if !(epsilon >= 0.0 && epsilon.is_finite()) =>
            {
                Err(Error::Config(format!(
                    "SVR epsilon must be >= 0, got {epsilon}"
                )))
            }
            _ => Ok(()),
        }
    }

    /// `(ℓ(y, z), ∂ℓ/∂z)`.
    pub fn term(&self, y: f64, z: f64) -> (f64, f64) {
        match *self {
            LossKind::LeastSquares => {
                let r = z - y;
                (0.5 * r * r, r)
            }
            LossKind::Logistic => {
                let t = y * z;
                // log(1 + e^{-t}) = log1p(e^{-|t|}) + max(0, -t)
                let loss = (-t.abs()).exp().ln_1p() + (-t).max(0.0);
                (loss, -y * sigmoid(-t))
            }
            LossKind::Probit => {
                let t = y * z;
                (-log_ndtr(t), -y * inverse_mills(t))
            }
            LossKind::HingeSvm => {
                let margin = 1.0 - y * z;
                if margin > 0.0 {
                    (margin, -y)
                } else {
                    (0.0, 0.0)
                }
            }
            LossKind::SmoothSvm => {
                let margin = 1.0 - y * z;
                if margin > 0.0 {
                    (margin * margin, -2.0 * y * margin)
                } else {
                    (0.0, 0.0)
                }
            }
            LossKind::HuberSvm { threshold: h } => {
                let t = y * z;
                if t >= 1.0 + h {
                    (0.0, 0.0)
                } else if t > 1.0 - h {
                    let q = 1.0 + h - t;
                    (q * q / (4.0 * h), -y * q / (2.0 * h))
                } else {
                    (1.0 - t, -y)
                }
            }
            LossKind::HingeSvr { epsilon } => {
                let r = z - y;
                let excess = r.abs() - epsilon;
                if excess > 0.0 {
                    (excess, sign(r))
                } else {
                    (0.0, 0.0)
                }
            }
            LossKind::SmoothSvr { epsilon } => {
                let r = z - y;
                let excess = r.abs() - epsilon;
                if excess > 0.0 {
                    (excess * excess, 2.0 * excess * sign(r))
                } else {
                    (0.0, 0.0)
                }
            }
        }
    }

    /// `∂²ℓ/∂z²` (generalized for the squared hinges). `None` for losses
    /// without one.
    pub fn curvature(&self, y: f64, z: f64) -> Option<f64> {
        match *self {
            LossKind::LeastSquares => Some(1.0),
            LossKind::Logistic => {
                let s = sigmoid(y * z);
                Some(s * (1.0 - s))
            }
            LossKind::SmoothSvm => Some(if y * z < 1.0 { 2.0 } else { 0.0 }),
            LossKind::SmoothSvr { epsilon } => {
                Some(if (z - y).abs() > epsilon { 2.0 } else { 0.0 })
            }
            _ => None,
        }
    }
}

#[inline]
fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[inline]
pub(crate) fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const PROBIT_TAIL: f64 = -8.0;

/// Mills ratio `(1 − Φ(x))/φ(x)` for large positive `x`, by its continued
/// fraction `1/(x + 1/(x + 2/(x + 3/(x + …))))`.
fn mills_ratio(x: f64) -> f64 {
    let mut tail = x;
    for k in (1..=60).rev() {
        tail = x + k as f64 / tail;
    }
    1.0 / tail
}

/// `log Φ(t)` for the standard normal CDF.
pub fn log_ndtr(t: f64) -> f64 {
    if t < PROBIT_TAIL {
        -0.5 * t * t - LN_SQRT_2PI + mills_ratio(-t).ln()
    } else if t > 0.0 {
        (-0.5 * libm::erfc(t * FRAC_1_SQRT_2)).ln_1p()
    } else {
        (0.5 * libm::erfc(-t * FRAC_1_SQRT_2)).ln()
    }
}

/// `φ(t)/Φ(t)`.
pub fn inverse_mills(t: f64) -> f64 {
    if t < PROBIT_TAIL {
        1.0 / mills_ratio(-t)
    } else {
        let pdf = (-0.5 * t * t).exp() / (2.0 * PI).sqrt();
        pdf / (0.5 * libm::erfc(-t * FRAC_1_SQRT_2))
    }
}

/// A loss from the catalog bound to its training data.
#[derive(Debug, Clone)]
pub struct RegularizedLoss<'a> {
    examples: &'a [SparseExample],
    labels: Vec<f64>,
    dim: usize,
    kind: LossKind,
    regularizer: Regularizer,
    lambda: f64,
}

impl<'a> RegularizedLoss<'a> {
    pub fn new(data: &'a Dataset, kind: LossKind, regularizer: Regularizer, lambda: f64) -> Result<Self> {
        Self::with_labels(
            data.examples(),
            data.labels().to_vec(),
            data.num_features(),
            kind,
            regularizer,
            lambda,
        )
    }

    /// Same examples, different labels; this is how one-vs-rest reuses one
    /// dataset for every class.
    pub fn with_labels(
        examples: &'a [SparseExample],
        labels: Vec<f64>,
        dim: usize,
        kind: LossKind,
        regularizer: Regularizer,
        lambda: f64,
    ) -> Result<Self> {
        check_len(examples.len(), labels.len())?;
        kind.validate()?;
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::Config(format!("lambda must be >= 0, got {lambda}")));
        }
        if let Some(max) = examples.iter().filter_map(SparseExample::max_index).max() {
            if max >= dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: max + 1,
                });
            }
        }
        if kind.is_classification() {
            if let Some(&bad) = labels.iter().find(|&&y| y != 1.0 && y != -1.0) {
                return Err(Error::InvalidLabel {
                    label: bad,
                    reason: "classification losses need labels in {-1, +1}",
                });
            }
        } else if let Some(&bad) = labels.iter().find(|y| !y.is_finite()) {
            return Err(Error::InvalidLabel {
                label: bad,
                reason: "labels must be finite",
            });
        }
        Ok(RegularizedLoss {
            examples,
            labels,
            dim,
            kind,
            regularizer,
            lambda,
        })
    }

    pub fn kind(&self) -> LossKind {
        self.kind
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    /// Checked version of [`DifferentiableFunction::eval`].
    pub fn evaluate(&self, w: &[f64]) -> Result<(f64, DenseVector)> {
        check_len(self.dim, w.len())?;
        Ok(self.eval(w))
    }

    /// `Σ_i ℓ(y_i, w·x_i)` and its gradient.
    pub fn data_eval(&self, w: &[f64]) -> (f64, DenseVector) {
        assert_eq!(w.len(), self.dim, "dimension mismatch");
        let mut f = 0.0;
        let mut g = DenseVector::zeros(self.dim);
        for (x, &y) in self.examples.iter().zip(&self.labels) {
            let (l, d) = self.kind.term(y, x.dot(w));
            f += l;
            if d != 0.0 {
                x.add_scaled_to(d, &mut g);
            }
        }
        (f, g)
    }

    /// `λ·R(w)`.
    pub fn regularizer_value(&self, w: &[f64]) -> f64 {
        match self.regularizer {
            Regularizer::L2 => 0.5 * self.lambda * w.iter().map(|v| v * v).sum::<f64>(),
            Regularizer::L1 => self.lambda * w.iter().map(|v| v.abs()).sum::<f64>(),
        }
    }

    /// Largest `|∂/∂w_j|` of the data term at `w = 0`; the smallest L1
    /// strength for which `w = 0` is optimal.
    pub fn lambda_max(&self) -> f64 {
        let (_, g) = self.data_eval(&vec![0.0; self.dim]);
        g.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

impl DifferentiableFunction for RegularizedLoss<'_> {
    fn dimension(&self) -> usize {
        self.dim
    }

    fn eval(&self, w: &[f64]) -> (f64, DenseVector) {
        let (f, mut g) = self.data_eval(w);
        self.add_regularizer_gradient(w, 1.0, &mut g);
        (f + self.regularizer_value(w), g)
    }

    fn supports_hessian(&self) -> bool {
        self.regularizer == Regularizer::L2 && self.kind.has_curvature()
    }

    fn hessian_vector_product(&self, w: &[f64], v: &[f64]) -> Result<DenseVector> {
        if !self.supports_hessian() {
            return Err(Error::Unsupported(format!(
                "Hessian-vector product for {:?} with {:?} regularizer",
                self.kind, self.regularizer
            )));
        }
        check_len(self.dim, w.len())?;
        check_len(self.dim, v.len())?;
        let mut hv: DenseVector = v.iter().map(|vj| self.lambda * vj).collect();
        for (x, &y) in self.examples.iter().zip(&self.labels) {
            let d = self.kind.curvature(y, x.dot(w)).unwrap_or(0.0);
            if d != 0.0 {
                x.add_scaled_to(d * x.dot(v), &mut hv);
            }
        }
        Ok(hv)
    }
}

impl CompositeL1 for RegularizedLoss<'_> {
    /// `λ` for an L1 loss; zero for L2, whose whole objective is smooth.
    fn l1_strength(&self) -> f64 {
        match self.regularizer {
            Regularizer::L1 => self.lambda,
            Regularizer::L2 => 0.0,
        }
    }

    fn eval_smooth(&self, w: &[f64]) -> (f64, DenseVector) {
        match self.regularizer {
            Regularizer::L1 => self.data_eval(w),
            Regularizer::L2 => self.eval(w),
        }
    }
}

impl LinearModelLoss for RegularizedLoss<'_> {
    fn examples(&self) -> &[SparseExample] {
        self.examples
    }

    fn term_derivative(&self, i: usize, z: f64) -> f64 {
        self.kind.term(self.labels[i], z).1
    }

    fn regularizer(&self) -> Regularizer {
        self.regularizer
    }

    fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// Midpoint convexity: `f((a+b)/2) ≤ (f(a)+f(b))/2` up to a relative slack
/// of `1e-9`.
pub fn convex_midpoint_check<F: DifferentiableFunction + ?Sized>(f: &F, a: &[f64], b: &[f64]) -> bool {
    let mid: Vec<f64> = a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect();
    let fa = f.value(a);
    let fb = f.value(b);
    f.value(&mid) <= 0.5 * (fa + fb) + 1e-9 * (1.0 + fa.abs() + fb.abs())
}

/// The sixteen regularized losses, by name.
pub const CATALOG: [(&str, LossKind, Regularizer); 16] = [
    ("l2-least-squares", LossKind::LeastSquares, Regularizer::L2),
    ("l1-least-squares", LossKind::LeastSquares, Regularizer::L1),
    ("l2-logistic", LossKind::Logistic, Regularizer::L2),
    ("l1-logistic", LossKind::Logistic, Regularizer::L1),
    ("l2-probit", LossKind::Probit, Regularizer::L2),
    ("l1-probit", LossKind::Probit, Regularizer::L1),
    ("l2-hinge-svm", LossKind::HingeSvm, Regularizer::L2),
    ("l1-hinge-svm", LossKind::HingeSvm, Regularizer::L1),
    ("l2-smooth-svm", LossKind::SmoothSvm, Regularizer::L2),
    ("l1-smooth-svm", LossKind::SmoothSvm, Regularizer::L1),
    (
        "l2-huber-svm",
        LossKind::HuberSvm {
            threshold: DEFAULT_HUBER_THRESHOLD,
        },
        Regularizer::L2,
    ),
    (
        "l1-huber-svm",
        LossKind::HuberSvm {
            threshold: DEFAULT_HUBER_THRESHOLD,
        },
        Regularizer::L1,
    ),
    (
        "l2-hinge-svr",
        LossKind::HingeSvr {
            epsilon: DEFAULT_SVR_EPSILON,
        },
        Regularizer::L2,
    ),
    (
        "l1-hinge-svr",
        LossKind::HingeSvr {
            epsilon: DEFAULT_SVR_EPSILON,
        },
        Regularizer::L1,
    ),
    (
        "l2-smooth-svr",
        LossKind::SmoothSvr {
            epsilon: DEFAULT_SVR_EPSILON,
        },
        Regularizer::L2,
    ),
    (
        "l1-smooth-svr",
        LossKind::SmoothSvr {
            epsilon: DEFAULT_SVR_EPSILON,
        },
        Regularizer::L1,
    ),
];
