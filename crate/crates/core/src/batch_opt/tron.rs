//! Trust-region Newton with a truncated conjugate-gradient inner solver.

use super::{check_start, finish, log_iter, Evaluator, SolverConfig, SolverResult, Termination};
use crate::error::{Error, Result};
use crate::linalg::{axpy, dense_dot, norm, DenseVector};
use crate::losses::DifferentiableFunction;

/// Acceptance thresholds `η` and radius factors `σ` for the trust region.
#[derive(Debug, Clone, PartialEq)]
pub struct TrustRegionParams {
    pub eta0: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub sigma3: f64,
    /// CG stops once `‖r‖ ≤ cg_rel_tol·‖g‖`.
    pub cg_rel_tol: f64,
}

impl Default for TrustRegionParams {
    fn default() -> Self {
        TrustRegionParams {
            eta0: 1e-4,
            eta1: 0.25,
            eta2: 0.75,
            sigma1: 0.25,
            sigma2: 0.5,
            sigma3: 4.0,
            cg_rel_tol: 0.1,
        }
    }
}

impl TrustRegionParams {
    /// New radius after a step of length `snorm` with actual reduction
    /// `actred`, predicted reduction `prered` and directional derivative
    /// `gs = gᵀs`.
    pub fn next_radius(&self, delta: f64, snorm: f64, actred: f64, prered: f64, gs: f64) -> f64 {
        // step length that minimizes the 1-D quadratic interpolant along s
        let curvature = -actred - gs;
        let alpha = if curvature <= 0.0 {
            self.sigma3
        } else {
            self.sigma1.max(-0.5 * (gs / curvature))
        };
        if actred < self.eta0 * prered {
            (alpha.max(self.sigma1) * snorm).min(self.sigma2 * delta)
        } else if actred < self.eta1 * prered {
            (self.sigma1 * delta).max((alpha * snorm).min(self.sigma2 * delta))
        } else if actred < self.eta2 * prered {
            (self.sigma1 * delta).max((alpha * snorm).min(self.sigma3 * delta))
        } else {
            delta.max((alpha * snorm).min(self.sigma3 * delta))
        }
    }
}

/// [`tron_with_params`] with the default trust-region constants.
pub fn tron<F: DifferentiableFunction + ?Sized>(
    func: &F,
    x0: &[f64],
    cfg: &SolverConfig,
) -> Result<SolverResult> {
    tron_with_params(func, x0, cfg, &TrustRegionParams::default())
}

/// Trust-region Newton. Each outer iteration approximately minimizes
/// `gᵀs + ½sᵀHs` over `‖s‖ ≤ Δ` by conjugate gradients (stopping at the
/// boundary or at relative residual `cg_rel_tol`), accepts the step when
/// the actual/predicted reduction ratio exceeds `η₀`, and resizes `Δ`.
/// `Δ₀ = ‖∇f(x0)‖`. Only function evaluations count against the budget.
pub fn tron_with_params<F: DifferentiableFunction + ?Sized>(
    func: &F,
    x0: &[f64],
    cfg: &SolverConfig,
    params: &TrustRegionParams,
) -> Result<SolverResult> {
    check_start(func, x0, cfg)?;
    if !func.supports_hessian() {
        return Err(Error::Unsupported(
            "trust-region Newton needs Hessian-vector products".into(),
        ));
    }
    let mut ev = Evaluator::new(func, cfg.max_eval);
    let mut w = DenseVector::from(x0);
    let (mut f, mut g) = ev.eval(&w).expect("budget is positive");
    let mut gnorm = norm(&g);
    let mut delta = gnorm;
    let mut first = true;
    let mut trace = vec![(ev.count(), f)];

    let term = loop {
        log_iter(cfg, "tron", ev.count(), f, gnorm);
        if gnorm < cfg.tol {
            break Termination::Converged;
        }
        if ev.exhausted() {
            break Termination::BudgetExhausted;
        }
        let (s, r) = truncated_cg(func, &w, &g, delta, params.cg_rel_tol * gnorm)?;
        let w_new: DenseVector = w.iter().zip(s.iter()).map(|(a, b)| a + b).collect();
        let gs = dense_dot(&g, &s);
        let prered = -0.5 * (gs - dense_dot(&s, &r));
        let (f_new, g_new) = ev.eval(&w_new).expect("budget checked");
        let actred = f - f_new;
        let snorm = norm(&s);
        if first {
            delta = delta.min(snorm);
            first = false;
        }
        delta = params.next_radius(delta, snorm, actred, prered, gs);

        if actred > params.eta0 * prered {
            (w, f, g) = (w_new, f_new, g_new);
            gnorm = norm(&g);
            trace.push((ev.count(), f));
        }
        if f < -1e32 {
            break Termination::LineSearchFailed;
        }
        if prered <= 0.0 && actred <= 0.0 {
            break Termination::LineSearchFailed;
        }
        if actred.abs() <= 1e-12 * f.abs() && prered.abs() <= 1e-12 * f.abs() {
            break if gnorm < cfg.tol {
                Termination::Converged
            } else {
                Termination::LineSearchFailed
            };
        }
    };
    Ok(finish(cfg, "tron", w, f, ev.count(), term, trace))
}

/// Steihaug CG on `min gᵀs + ½sᵀHs, ‖s‖ ≤ Δ`. Returns `s` and the final
/// residual `r = −g − Hs`.
fn truncated_cg<F: DifferentiableFunction + ?Sized>(
    func: &F,
    w: &[f64],
    g: &[f64],
    delta: f64,
    cg_tol: f64,
) -> Result<(DenseVector, DenseVector)> {
    let n = g.len();
    let mut s = DenseVector::zeros(n);
    let mut r: DenseVector = g.iter().map(|v| -v).collect();
    let mut d = r.clone();
    let mut rr = dense_dot(&r, &r);
    for _ in 0..(2 * n).max(10) {
        if rr.sqrt() <= cg_tol {
            break;
        }
        let hd = func.hessian_vector_product(w, &d)?;
        let dhd = dense_dot(&d, &hd);
        let step = if dhd > 0.0 { rr / dhd } else { f64::INFINITY };
        let mut trial = s.clone();
        if step.is_finite() {
            axpy(&mut trial, step, &d);
        }
        if !step.is_finite() || norm(&trial) > delta {
            let tau = boundary_step(&s, &d, delta);
            axpy(&mut s, tau, &d);
            axpy(&mut r, -tau, &hd);
            break;
        }
        s = trial;
        axpy(&mut r, -step, &hd);
        let rr_new = dense_dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for (di, ri) in d.iter_mut().zip(r.iter()) {
            *di = ri + beta * *di;
        }
    }
    Ok((s, r))
}

/// Nonnegative `τ` with `‖s + τd‖ = Δ`.
fn boundary_step(s: &[f64], d: &[f64], delta: f64) -> f64 {
    let sd = dense_dot(s, d);
    let dd = dense_dot(d, d);
    let ss = dense_dot(s, s);
    let rad = (sd * sd + dd * (delta * delta - ss)).max(0.0).sqrt();
    if sd >= 0.0 {
        (delta * delta - ss) / (sd + rad)
    } else {
        (rad - sd) / dd
    }
}
