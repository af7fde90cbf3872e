//! Dual coordinate descent for linear SVMs.
//!
//! Works in the C-convention, `C·Σ loss_i + ½‖w‖²`. A λ-convention model
//! `Σ loss_i + λ·½‖w‖²` has the same minimizer with `C = 1/λ`, and its
//! objective is the C-convention value divided by `C`.

use crate::batch_opt::{SolverResult, Termination};
use crate::dataio::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{DenseVector, SparseExample};
use crate::stochastic_opt::EpochSampler;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SvmKind {
    /// Hinge loss; box `0 ≤ α ≤ C`.
    L1Svm,
    /// Squared hinge; `0 ≤ α`, diagonal shift `1/(2C)`.
    L2Svm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualConfig {
    pub c: f64,
    /// Stop once the largest `|PG|` seen in an epoch is below this.
    pub tol: f64,
    pub max_epochs: usize,
    pub seed: u64,
}

impl Default for DualConfig {
    fn default() -> Self {
        DualConfig {
            c: 1.0,
            tol: 1e-3,
            max_epochs: 1000,
            seed: 0,
        }
    }
}

impl DualConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::Config(format!("C must be > 0, got {}", self.c)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!("tol must be > 0, got {}", self.tol)));
        }
        if self.max_epochs == 0 {
            return Err(Error::Config("max epochs must be positive".into()));
        }
        Ok(())
    }
}

/// Dual variables, the primal vector `w = Σ α_i y_i x_i` kept in sync with
/// them, and the shifted diagonal `Q̄_ii = x_iᵀx_i + D_ii`.
#[derive(Debug, Clone)]
pub struct DualState<'a> {
    examples: &'a [SparseExample],
    labels: Vec<f64>,
    kind: SvmKind,
    c: f64,
    alpha: Vec<f64>,
    w: DenseVector,
    qdiag: Vec<f64>,
    diag_shift: f64,
    upper: f64,
}

impl<'a> DualState<'a> {
    /// Starts at `α = 0`, hence `w = 0`.
    pub fn new(
        examples: &'a [SparseExample],
        labels: &[f64],
        dim: usize,
        kind: SvmKind,
        c: f64,
    ) -> Result<Self> {
        if examples.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: examples.len(),
                found: labels.len(),
            });
        }
        if let Some(&bad) = labels.iter().find(|&&y| y != 1.0 && y != -1.0) {
            return Err(Error::InvalidLabel {
                label: bad,
                reason: "SVM labels must be -1 or +1",
            });
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Config(format!("C must be > 0, got {c}")));
        }
        if let Some(max) = examples.iter().filter_map(SparseExample::max_index).max() {
            if max >= dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: max + 1,
                });
            }
        }
        let (diag_shift, upper) = match kind {
            SvmKind::L1Svm => (0.0, c),
            SvmKind::L2Svm => (0.5 / c, f64::INFINITY),
        };
        Ok(DualState {
            examples,
            labels: labels.to_vec(),
            kind,
            c,
            alpha: vec![0.0; examples.len()],
            w: DenseVector::zeros(dim),
            qdiag: examples.iter().map(|x| x.squared_norm() + diag_shift).collect(),
            diag_shift,
            upper,
        })
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn w(&self) -> &DenseVector {
        &self.w
    }

    pub fn upper_bound(&self) -> f64 {
        self.upper
    }

    /// One coordinate step on `α_i`. Returns `|PG_i|` before the step.
    /// Examples with `x_iᵀx_i = 0` are left alone.
    pub fn update(&mut self, i: usize) -> f64 {
        let x = &self.examples[i];
        if x.is_empty() || self.qdiag[i] == self.diag_shift {
            return 0.0;
        }
        let y = self.labels[i];
        let a = self.alpha[i];
        let grad = y * x.dot(&self.w) - 1.0 + self.diag_shift * a;
        let pg = if a == 0.0 {
            grad.min(0.0)
        } else if a == self.upper {
            grad.max(0.0)
        } else {
            grad
        };
        if pg != 0.0 {
            let next = (a - grad / self.qdiag[i]).max(0.0).min(self.upper);
            self.alpha[i] = next;
            x.add_scaled_to((next - a) * y, &mut self.w);
        }
        debug_assert!(self.alpha[i] >= 0.0 && self.alpha[i] <= self.upper);
        pg.abs()
    }

    /// `Σ α_i − ½‖w‖² − ½·Σ D_ii α_i²`.
    pub fn dual_objective(&self) -> f64 {
        let sum: f64 = self.alpha.iter().sum();
        let sq: f64 = self.alpha.iter().map(|a| a * a).sum();
        sum - 0.5 * sq_norm(&self.w) - 0.5 * self.diag_shift * sq
    }

    /// `C·Σ loss_i(w) + ½‖w‖²` at the current `w`.
    pub fn primal_objective(&self) -> f64 {
        let data: f64 = self
            .examples
            .iter()
            .zip(&self.labels)
            .map(|(x, y)| {
                let margin = (1.0 - y * x.dot(&self.w)).max(0.0);
                match self.kind {
                    SvmKind::L1Svm => margin,
                    SvmKind::L2Svm => margin * margin,
                }
            })
            .sum();
        self.c * data + 0.5 * sq_norm(&self.w)
    }

    /// `Σ α_i y_i x_i` from scratch.
    pub fn recompute_w(&self) -> DenseVector {
        let mut w = DenseVector::zeros(self.w.len());
        for ((x, y), a) in self.examples.iter().zip(&self.labels).zip(&self.alpha) {
            if *a != 0.0 {
                x.add_scaled_to(a * y, &mut w);
            }
        }
        w
    }

    /// Largest deviation of the running `w` from [`Self::recompute_w`],
    /// relative to `max(1, ‖w‖∞)`.
    pub fn w_drift(&self) -> f64 {
        let exact = self.recompute_w();
        let scale = exact.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        exact
            .iter()
            .zip(self.w.iter())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
            / scale
    }
}

fn sq_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Result of [`svc_dual`]: the primal solution (objective in the
/// C-convention, `evaluations` = epochs run), the final dual variables and
/// the dual objective after every epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    pub result: SolverResult,
    pub alpha: Vec<f64>,
    pub dual_trace: Vec<f64>,
}

/// Dual coordinate descent on `data` (labels must be ±1).
pub fn svc_dual(data: &Dataset, kind: SvmKind, cfg: &DualConfig) -> Result<DualSolution> {
    svc_dual_with_labels(data.examples(), data.labels(), data.num_features(), kind, cfg)
}

/// [`svc_dual`] on explicit examples and ±1 labels.
pub fn svc_dual_with_labels(
    examples: &[SparseExample],
    labels: &[f64],
    dim: usize,
    kind: SvmKind,
    cfg: &DualConfig,
) -> Result<DualSolution> {
    cfg.validate()?;
    let mut state = DualState::new(examples, labels, dim, kind, cfg.c)?;
    let mut sampler = EpochSampler::new(cfg.seed);
    let mut trace = vec![(0, state.primal_objective())];
    let mut dual_trace = vec![state.dual_objective()];
    let mut terminated = Termination::BudgetExhausted;
    let mut epochs = 0;
    while epochs < cfg.max_epochs {
        let mut max_pg = 0.0f64;
        for i in sampler.next_epoch(examples.len()) {
            max_pg = max_pg.max(state.update(i));
        }
        epochs += 1;
        debug_assert!(state.w_drift() <= 1e-8, "w drifted by {}", state.w_drift());
        dual_trace.push(state.dual_objective());
        trace.push((epochs, state.primal_objective()));
        if max_pg < cfg.tol {
            terminated = Termination::Converged;
            break;
        }
    }
    let f = state.primal_objective();
    Ok(DualSolution {
        result: SolverResult {
            w: state.w.clone(),
            f,
            evaluations: epochs,
            terminated,
            trace,
        },
        alpha: state.alpha,
        dual_trace,
    })
}
