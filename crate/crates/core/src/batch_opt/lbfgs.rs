use std::collections::VecDeque;

use super::line_search::{armijo, Backtrack};
use super::{check_start, finish, log_iter, Evaluator, SolverConfig, SolverResult, Termination};
use crate::error::Result;
use crate::linalg::{axpy, dense_dot, norm, DenseVector};
use crate::losses::DifferentiableFunction;

/// Pairs with `sᵀy` at or below this are not stored.
const MIN_CURVATURE: f64 = 1e-10;

/// The last `memory` curvature pairs `(s, y)` and the two-loop recursion
/// over them.
#[derive(Debug, Clone)]
pub struct LbfgsHistory {
    memory: usize,
    pairs: VecDeque<(DenseVector, DenseVector, f64)>,
}

impl LbfgsHistory {
    pub fn new(memory: usize) -> Self {
        LbfgsHistory {
            memory,
            pairs: VecDeque::with_capacity(memory),
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn clear(&mut self) {
        self.pairs.clear();
    }

    /// Stores `(s, y)` unless `sᵀy ≤ 1e-10`. Returns whether it was kept.
    pub fn push(&mut self, s: DenseVector, y: DenseVector) -> bool {
        let sy = dense_dot(&s, &y);
        if sy <= MIN_CURVATURE {
            return false;
        }
        if self.pairs.len() == self.memory {
            self.pairs.pop_front();
        }
        self.pairs.push_back((s, y, 1.0 / sy));
        true
    }

    /// `−H·g`, with `H⁰ = (sᵀy / yᵀy)·I` from the newest pair. With no
    /// pairs this is `−g`.
    pub fn direction(&self, g: &[f64]) -> DenseVector {
        let mut q = DenseVector::from(g);
        let mut alphas = vec![0.0; self.pairs.len()];
        for (k, (s, y, rho)) in self.pairs.iter().enumerate().rev() {
            let a = rho * dense_dot(s, &q);
            alphas[k] = a;
            axpy(&mut q, -a, y);
        }
        if let Some((s, y, _)) = self.pairs.back() {
            q.scale(dense_dot(s, y) / dense_dot(y, y));
        }
        for (k, (s, y, rho)) in self.pairs.iter().enumerate() {
            let b = rho * dense_dot(y, &q);
            axpy(&mut q, alphas[k] - b, s);
        }
        q.scale(-1.0);
        q
    }
}

/// Limited-memory BFGS with Armijo backtracking. Trial steps start at 1;
/// while the history is empty they start at `α` instead. A direction that
/// is not a descent direction clears the history and falls back to `−g`.
pub fn lbfgs<F: DifferentiableFunction + ?Sized>(
    func: &F,
    x0: &[f64],
    cfg: &SolverConfig,
) -> Result<SolverResult> {
    check_start(func, x0, cfg)?;
    let mut ev = Evaluator::new(func, cfg.max_eval);
    let mut hist = LbfgsHistory::new(cfg.memory);
    let mut x = DenseVector::from(x0);
    let (mut f, mut g) = ev.eval(&x).expect("budget is positive");
    let mut trace = vec![(ev.count(), f)];
    let term = loop {
        let gnorm = norm(&g);
        log_iter(cfg, "lbfgs", ev.count(), f, gnorm);
        if gnorm < cfg.tol {
            break Termination::Converged;
        }
        if ev.exhausted() {
            break Termination::BudgetExhausted;
        }
        let mut dir = hist.direction(&g);
        let mut slope = dense_dot(&g, &dir);
        if slope >= 0.0 {
            hist.clear();
            dir = g.iter().map(|v| -v).collect();
            slope = dense_dot(&g, &dir);
        }
        let t0 = if hist.is_empty() { cfg.alpha } else { 1.0 };
        match armijo(&mut ev, &x, f, &dir, slope, t0, cfg.gamma) {
            Backtrack::Accepted { x: xn, f: fnew, g: gn } => {
                hist.push(xn.sub(&x), gn.sub(&g));
                (x, f, g) = (xn, fnew, gn);
                trace.push((ev.count(), f));
            }
            Backtrack::StepUnderflow => break Termination::LineSearchFailed,
            Backtrack::OutOfBudget => break Termination::BudgetExhausted,
        }
    };
    Ok(finish(cfg, "lbfgs", x, f, ev.count(), term, trace))
}
