//! Orthant-wise limited-memory quasi-Newton for `s(w) + λ‖w‖₁`.

use super::lbfgs::LbfgsHistory;
use super::line_search::{MIN_STEP, SHRINK};
use super::{check_start, finish, log_iter, Evaluator, SolverConfig, SolverResult, Termination};
use crate::error::Result;
use crate::linalg::{dense_dot, norm, DenseVector};
use crate::losses::CompositeL1;

/// Minimum-norm subgradient of `s(w) + λ‖w‖₁` given `g = ∇s(w)`.
///
/// Off zero it is `g_j + λ·sign(w_j)`. At `w_j = 0` it is the one-sided
/// derivative that points downhill, or 0 when `|g_j| ≤ λ`.
pub fn pseudo_gradient(w: &[f64], g: &[f64], lambda: f64) -> DenseVector {
    w.iter()
        .zip(g)
        .map(|(&wj, &gj)| {
            if wj > 0.0 {
                gj + lambda
            } else if wj < 0.0 {
                gj - lambda
            } else if gj + lambda < 0.0 {
                gj + lambda
            } else if gj - lambda > 0.0 {
                gj - lambda
            } else {
                0.0
            }
        })
        .collect()
}

fn signum(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn l1(w: &[f64]) -> f64 {
    w.iter().map(|v| v.abs()).sum()
}

/// OWL-QN. The L-BFGS direction is built from smooth-part curvature pairs,
/// applied to the pseudo-gradient, and sign-projected so it never opposes
/// the pseudo-gradient coordinatewise. Trial points are projected onto the
/// orthant picked at the current point, which is how coordinates land on
/// exact zeros. Sufficient decrease is measured with the pseudo-gradient.
///
/// With `λ = 0` both projections are skipped and the iterates are those of
/// [`super::lbfgs`].
pub fn owlqn<F: CompositeL1 + ?Sized>(
    func: &F,
    x0: &[f64],
    cfg: &SolverConfig,
) -> Result<SolverResult> {
    check_start(func, x0, cfg)?;
    let lambda = func.l1_strength();
    let project = lambda > 0.0;
    let mut ev = Evaluator::new(func, cfg.max_eval);
    let mut hist = LbfgsHistory::new(cfg.memory);
    let mut x = DenseVector::from(x0);
    let (fs0, mut g) = ev
        .eval_with(&x, |f, w| f.eval_smooth(w))
        .expect("budget is positive");
    let mut f = fs0 + lambda * l1(&x);
    let mut trace = vec![(ev.count(), f)];

    let term = 'outer: loop {
        let pg = pseudo_gradient(&x, &g, lambda);
        let pg_norm = norm(&pg);
        log_iter(cfg, "owlqn", ev.count(), f, pg_norm);
        if pg_norm < cfg.tol {
            break Termination::Converged;
        }
        if ev.exhausted() {
            break Termination::BudgetExhausted;
        }

        let mut dir = hist.direction(&pg);
        if project {
            for (d, p) in dir.iter_mut().zip(pg.iter()) {
                if *d * *p > 0.0 {
                    *d = 0.0;
                }
            }
        }
        if dense_dot(&pg, &dir) >= 0.0 {
            hist.clear();
            dir = pg.iter().map(|v| -v).collect();
        }

        let slope = dense_dot(&pg, &dir);
        let orthant: Vec<f64> = x
            .iter()
            .zip(pg.iter())
            .map(|(&wj, &pj)| if wj != 0.0 { signum(wj) } else { -signum(pj) })
            .collect();

        let mut t = if hist.is_empty() { cfg.alpha } else { 1.0 };
        loop {
            let mut trial: DenseVector = x.iter().zip(dir.iter()).map(|(a, d)| a + t * d).collect();
            if project {
                for (v, o) in trial.iter_mut().zip(&orthant) {
                    if *v * *o <= 0.0 {
                        *v = 0.0;
                    }
                }
            }
            let Some((fs_t, g_t)) = ev.eval_with(&trial, |f, w| f.eval_smooth(w)) else {
                break 'outer Termination::BudgetExhausted;
            };
            let f_t = fs_t + lambda * l1(&trial);
            let step = trial.sub(&x);
            let accept = if project {
                f_t <= f + cfg.gamma * dense_dot(&pg, &step)
            } else {
                f_t <= f + cfg.gamma * t * slope
            };
            if accept {
                hist.push(step, g_t.sub(&g));
                (x, g, f) = (trial, g_t, f_t);
                trace.push((ev.count(), f));
                break;
            }
            t *= SHRINK;
            if t < MIN_STEP {
                break 'outer Termination::LineSearchFailed;
            }
        }
    };
    Ok(finish(cfg, "owlqn", x, f, ev.count(), term, trace))
}
