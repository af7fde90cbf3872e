//! Gradient descent and its line-search, Barzilai-Borwein and Nesterov
//! variants.

use super::line_search::{armijo, Backtrack};
use super::{check_start, finish, log_iter, Evaluator, SolverConfig, SolverResult, Termination};
use crate::error::Result;
use crate::linalg::{dense_dot, multiply_accumulate, norm, DenseVector};
use crate::losses::DifferentiableFunction;

const BB_MIN: f64 = 1e-10;
const BB_MAX: f64 = 1e10;

/// Fixed-step gradient descent: `x ← x − α·g` until `‖g‖ < tol` or the
/// evaluation budget is spent. Divergence is not detected; it shows up as a
/// growing trace.
pub fn gd<F: DifferentiableFunction + ?Sized>(
    func: &F,
    x0: &[f64],
    cfg: &SolverConfig,
) -> Result<SolverResult> {
    check_start(func, x0, cfg)?;
    let mut ev = Evaluator::new(func, cfg.max_eval);
    let mut x = DenseVector::from(x0);
    let (mut f, mut g) = ev.eval(&x).expect("budget is positive");
    let mut gnorm = norm(&g);
    let mut trace = vec![(ev.count(), f)];
    while gnorm >= cfg.tol && !ev.exhausted() {
        multiply_accumulate(&mut x, cfg.alpha, &g)?;
        (f, g) = ev.eval(&x).expect("budget checked");
        gnorm = norm(&g);
        trace.push((ev.count(), f));
        log_iter(cfg, "gd", ev.count(), f, gnorm);
    }
    let term = if gnorm < cfg.tol {
        Termination::Converged
    } else {
        Termination::BudgetExhausted
    };
    Ok(finish(cfg, "gd", x, f, ev.count(), term, trace))
}

/// Steepest descent with Armijo backtracking seeded at `α` every iteration.
pub fn gd_line_search<F: DifferentiableFunction + ?Sized>(
    func: &F,
    x0: &[f64],
    cfg: &SolverConfig,
) -> Result<SolverResult> {
    descent_with_seed(func, x0, cfg, "gdLineSearch", |_, _| cfg.alpha)
}

/// Steepest descent whose trial step is the Barzilai-Borwein length
/// `sᵀs / sᵀy`, clamped to `[1e-10, 1e10]`, followed by Armijo backtracking.
/// The first step, and any step with `sᵀy ≤ 0`, is seeded with `α`.
pub fn gd_barzilai_borwein<F: DifferentiableFunction + ?Sized>(
    func: &F,
    x0: &[f64],
    cfg: &SolverConfig,
) -> Result<SolverResult> {
    descent_with_seed(func, x0, cfg, "gdBarzilaiBorwein", |s, y| {
        let sy = dense_dot(s, y);
        if sy <= 0.0 {
            cfg.alpha
        } else {
            (dense_dot(s, s) / sy).clamp(BB_MIN, BB_MAX)
        }
    })
}

/// Shared loop for the two steepest-descent variants. `seed(s, y)` gives the
/// first trial step from the last displacement and gradient change; it is
/// not called on the first iteration.
fn descent_with_seed<F: DifferentiableFunction + ?Sized>(
    func: &F,
    x0: &[f64],
    cfg: &SolverConfig,
    name: &str,
    seed: impl Fn(&[f64], &[f64]) -> f64,
) -> Result<SolverResult> {
    check_start(func, x0, cfg)?;
    let mut ev = Evaluator::new(func, cfg.max_eval);
    let mut x = DenseVector::from(x0);
    let (mut f, mut g) = ev.eval(&x).expect("budget is positive");
    let mut trace = vec![(ev.count(), f)];
    let mut last: Option<(DenseVector, DenseVector)> = None;
    let term = loop {
        let gnorm = norm(&g);
        log_iter(cfg, name, ev.count(), f, gnorm);
        if gnorm < cfg.tol {
            break Termination::Converged;
        }
        if ev.exhausted() {
            break Termination::BudgetExhausted;
        }
        let t0 = match &last {
            None => cfg.alpha,
            Some((s, y)) => seed(s, y),
        };
        let dir: DenseVector = g.iter().map(|v| -v).collect();
        match armijo(&mut ev, &x, f, &dir, -gnorm * gnorm, t0, cfg.gamma) {
            Backtrack::Accepted { x: xn, f: fnew, g: gn } => {
                last = Some((xn.sub(&x), gn.sub(&g)));
                (x, f, g) = (xn, fnew, gn);
                trace.push((ev.count(), f));
            }
            Backtrack::StepUnderflow => break Termination::LineSearchFailed,
            Backtrack::OutOfBudget => break Termination::BudgetExhausted,
        }
    };
    Ok(finish(cfg, name, x, f, ev.count(), term, trace))
}

/// Nesterov's accelerated gradient with backtracking:
/// `y_k = x_k + (k−1)/(k+2)·(x_k − x_{k−1})`, `x_{k+1} = y_k − t·∇f(y_k)`,
/// `t` found by Armijo backtracking at `y_k` seeded with `α`. When a step
/// raises the objective the momentum restarts (`k = 1`), which keeps the
/// method from cycling. The objective trace need not be monotone.
pub fn gd_nesterov<F: DifferentiableFunction + ?Sized>(
    func: &F,
    x0: &[f64],
    cfg: &SolverConfig,
) -> Result<SolverResult> {
    check_start(func, x0, cfg)?;
    let mut ev = Evaluator::new(func, cfg.max_eval);
    let mut x = DenseVector::from(x0);
    let mut x_prev = x.clone();
    let (mut f, mut g) = ev.eval(&x).expect("budget is positive");
    let mut trace = vec![(ev.count(), f)];
    let mut k = 1usize;
    let term = loop {
        let gnorm = norm(&g);
        log_iter(cfg, "gdNesterov", ev.count(), f, gnorm);
        if gnorm < cfg.tol {
            break Termination::Converged;
        }
        if ev.exhausted() {
            break Termination::BudgetExhausted;
        }
        let beta = (k - 1) as f64 / (k + 2) as f64;
        let (y, fy, gy) = if beta == 0.0 {
            (x.clone(), f, g.clone())
        } else {
            let y: DenseVector = x
                .iter()
                .zip(x_prev.iter())
                .map(|(a, b)| a + beta * (a - b))
                .collect();
            let Some((fy, gy)) = ev.eval(&y) else {
                break Termination::BudgetExhausted;
            };
            (y, fy, gy)
        };
        let gy_norm = norm(&gy);
        let dir: DenseVector = gy.iter().map(|v| -v).collect();
        match armijo(&mut ev, &y, fy, &dir, -gy_norm * gy_norm, cfg.alpha, cfg.gamma) {
            Backtrack::Accepted { x: xn, f: fnew, g: gn } => {
                x_prev = std::mem::replace(&mut x, xn);
                // restart the momentum whenever the objective goes up
                k = if fnew > f { 1 } else { k + 1 };
                f = fnew;
                g = gn;
                trace.push((ev.count(), f));
            }
            Backtrack::StepUnderflow => break Termination::LineSearchFailed,
            Backtrack::OutOfBudget => break Termination::BudgetExhausted,
        }
    };
    Ok(finish(cfg, "gdNesterov", x, f, ev.count(), term, trace))
}
