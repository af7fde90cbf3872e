//! Batch solvers over any [`DifferentiableFunction`].
//!
//! All solvers count *function evaluations* against `max_eval`, never
//! iterations, and stop when the 2-norm of the gradient (or of the
//! pseudo-gradient for OWL-QN) drops below `tol`.

mod gd;
mod lbfgs;
mod line_search;
mod owlqn;
mod tron;

pub use gd::{gd, gd_barzilai_borwein, gd_line_search, gd_nesterov};
pub use lbfgs::{lbfgs, LbfgsHistory};
pub use owlqn::{owlqn, pseudo_gradient};
pub use tron::{tron, tron_with_params, TrustRegionParams};

use crate::error::{Error, Result};
use crate::linalg::{check_len, DenseVector};
use crate::losses::DifferentiableFunction;

/// Hyperparameters shared by the batch solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Step size for `gd`; initial trial step for the line-search solvers.
    pub alpha: f64,
    /// Armijo sufficient-decrease constant, in `(0, 1)`.
    pub gamma: f64,
    /// Function-evaluation budget.
    pub max_eval: usize,
    /// Gradient-norm tolerance.
    pub tol: f64,
    /// Number of curvature pairs kept by L-BFGS / OWL-QN.
    pub memory: usize,
    /// 0 is silent; 1 prints a summary; 2 prints every iteration.
    pub verbosity: u8,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            alpha: 1.0,
            gamma: 1e-4,
            max_eval: 1000,
            tol: 1e-3,
            memory: 100,
            verbosity: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: String| Err(Error::Config(format!("{what} {v}")));
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad("alpha must be > 0, got", self.alpha.to_string());
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return bad("gamma must lie in (0, 1), got", self.gamma.to_string());
        }
        if self.max_eval == 0 {
            return bad("max_eval must be positive, got", "0".into());
        }
        if !(self.tol > 0.0) {
            return bad("tol must be > 0, got", self.tol.to_string());
        }
        if self.memory == 0 {
            return bad("memory must be positive, got", "0".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// The solver's stopping criterion held at the returned point.
    Converged,
    /// The evaluation (or epoch) budget ran out first.
    BudgetExhausted,
    /// No acceptable step could be found: the backtracking step underflowed
    /// or the trust region stopped predicting any decrease.
    LineSearchFailed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverResult {
    pub w: DenseVector,
    pub f: f64,
    pub evaluations: usize,
    pub terminated: Termination,
    /// `(evaluation index, f)` for every accepted iterate.
    pub trace: Vec<(usize, f64)>,
}

/// Counts evaluations and refuses to exceed the budget.
pub(crate) struct Evaluator<'a, F: ?Sized> {
    func: &'a F,
    count: usize,
    budget: usize,
}

impl<'a, F: DifferentiableFunction + ?Sized> Evaluator<'a, F> {
    pub(crate) fn new(func: &'a F, budget: usize) -> Self {
        Evaluator {
            func,
            count: 0,
            budget,
        }
    }

    pub(crate) fn exhausted(&self) -> bool {
        self.count >= self.budget
    }

    pub(crate) fn count(&self) -> usize {
        self.count
    }

    /// `None` once the budget is spent.
    pub(crate) fn eval(&mut self, w: &[f64]) -> Option<(f64, DenseVector)> {
        self.eval_with(w, |f, w| f.eval(w))
    }

    pub(crate) fn eval_with(
        &mut self,
        w: &[f64],
        op: impl FnOnce(&F, &[f64]) -> (f64, DenseVector),
    ) -> Option<(f64, DenseVector)> {
        if self.exhausted() {
            return None;
        }
        self.count += 1;
        Some(op(self.func, w))
    }
}

pub(crate) fn check_start<F: DifferentiableFunction + ?Sized>(
    func: &F,
    x0: &[f64],
    cfg: &SolverConfig,
) -> Result<()> {
    cfg.validate()?;
    check_len(func.dimension(), x0.len())
}

pub(crate) fn log_iter(cfg: &SolverConfig, name: &str, evals: usize, f: f64, gnorm: f64) {
    if cfg.verbosity >= 2 {
        eprintln!("{name}: eval {evals:>6}  f = {f:.10e}  |g| = {gnorm:.3e}");
    }
}

pub(crate) fn finish(
    cfg: &SolverConfig,
    name: &str,
    w: DenseVector,
    f: f64,
    evaluations: usize,
    terminated: Termination,
    trace: Vec<(usize, f64)>,
) -> SolverResult {
    if cfg.verbosity >= 1 {
        eprintln!("{name}: {terminated:?} after {evaluations} evaluations, f = {f:.10e}");
    }
    SolverResult {
        w,
        f,
        evaluations,
        terminated,
        trace,
    }
}
