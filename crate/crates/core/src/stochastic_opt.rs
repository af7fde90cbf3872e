//! Stochastic solvers for linear-model losses: plain and decaying-step SGD,
//! AdaGrad, SAG, and regularized dual averaging (with and without AdaGrad
//! scaling).
//!
//! Every solver sweeps the data in epochs. Each epoch visits a fresh
//! seeded permutation of the examples in mini-batches, so a fixed seed gives
//! bit-identical runs. The returned point is the last iterate and the trace
//! holds the full objective after every epoch.

use std::cell::RefCell;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::batch_opt::{SolverResult, Termination};
use crate::error::{Error, Result};
use crate::linalg::{check_len, DenseVector};
use crate::losses::{LinearModelLoss, Regularizer};

#[derive(Debug, Clone, PartialEq)]
pub struct StochasticConfig {
    /// Step size `η`. Zero is allowed and leaves the start point unchanged.
    pub step_size: f64,
    /// Decay for [`sgd_decaying_learning_rate`]: `η_t = η/(1 + decay·t)`.
    pub decay_rate: f64,
    pub epochs: usize,
    pub mini_batch_size: usize,
    pub seed: u64,
    /// AdaGrad stabilizer `δ`.
    pub adagrad_eps: f64,
    /// Dual-averaging scale `γ`.
    pub rda_gamma: f64,
}

impl Default for StochasticConfig {
    fn default() -> Self {
        StochasticConfig {
            step_size: 0.01,
            decay_rate: 0.01,
            epochs: 50,
            mini_batch_size: 1,
            seed: 0,
            adagrad_eps: 1e-8,
            rda_gamma: 1.0,
        }
    }
}

impl StochasticConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if !(self.step_size >= 0.0 && self.step_size.is_finite()) {
            return fail(format!("step size must be >= 0, got {}", self.step_size));
        }
        if !(self.decay_rate >= 0.0 && self.decay_rate.is_finite()) {
            return fail(format!("decay rate must be >= 0, got {}", self.decay_rate));
        }
        if self.epochs == 0 {
            return fail("epochs must be positive".into());
        }
        if self.mini_batch_size == 0 {
            return fail("mini-batch size must be positive".into());
        }
        if !(self.adagrad_eps > 0.0) {
            return fail(format!("AdaGrad epsilon must be > 0, got {}", self.adagrad_eps));
        }
        if !(self.rda_gamma > 0.0) {
            return fail(format!("RDA gamma must be > 0, got {}", self.rda_gamma));
        }
        Ok(())
    }
}

/// Seeded source of per-epoch visiting orders (Fisher-Yates shuffles).
pub struct EpochSampler {
    rng: ChaCha8Rng,
}

impl EpochSampler {
    pub fn new(seed: u64) -> Self {
        EpochSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// A permutation of `0..n`.
    pub fn next_epoch(&mut self, n: usize) -> Vec<usize> {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut self.rng);
        order
    }
}

/// Sum over `batch` of `ℓ_i'(w·x_i)·x_i`, scaled by `data_scale`, plus
/// `reg_scale·λ·∇R(w)`.
fn batch_gradient<L: LinearModelLoss + ?Sized>(
    loss: &L,
    w: &[f64],
    batch: &[usize],
    data_scale: f64,
    reg_scale: f64,
) -> DenseVector {
    let examples = loss.examples();
    let mut g = DenseVector::zeros(w.len());
    for &i in batch {
        let x = &examples[i];
        let d = loss.term_derivative(i, x.dot(w));
        if d != 0.0 {
            x.add_scaled_to(data_scale * d, &mut g);
        }
    }
    loss.add_regularizer_gradient(w, reg_scale, &mut g);
    g
}

/// Runs `cfg.epochs` epochs, calling `step(w, batch, t)` for every
/// mini-batch with the global update counter `t` (starting at 0).
fn run_epochs<L: LinearModelLoss + ?Sized>(
    loss: &L,
    x0: &[f64],
    cfg: &StochasticConfig,
    mut step: impl FnMut(&mut DenseVector, &[usize], usize),
    mut end_of_epoch: impl FnMut(&DenseVector),
) -> Result<SolverResult> {
    cfg.validate()?;
    check_len(loss.dimension(), x0.len())?;
    let n = loss.num_examples();
    let mut w = DenseVector::from(x0);
    let mut trace = vec![(0, loss.value(&w))];
    let mut sampler = EpochSampler::new(cfg.seed);
    let mut t = 0usize;
    for epoch in 1..=cfg.epochs {
        let order = sampler.next_epoch(n);
        for batch in order.chunks(cfg.mini_batch_size) {
            step(&mut w, batch, t);
            t += 1;
        }
        end_of_epoch(&w);
        trace.push((epoch, loss.value(&w)));
    }
    let f = trace.last().map_or(f64::NAN, |p| p.1);
    Ok(SolverResult {
        w,
        f,
        evaluations: cfg.epochs,
        terminated: Termination::BudgetExhausted,
        trace,
    })
}

/// `w ← w − η·ĝ` with `ĝ` the mini-batch data subgradient plus the
/// regularizer gradient scaled by `|batch|/n`.
pub fn sgd<L: LinearModelLoss + ?Sized>(loss: &L, x0: &[f64], cfg: &StochasticConfig) -> Result<SolverResult> {
    sgd_with_schedule(loss, x0, cfg, |_| cfg.step_size)
}

/// SGD with `η_t = η/(1 + decay·t)`, `t` counting updates from 0.
pub fn sgd_decaying_learning_rate<L: LinearModelLoss + ?Sized>(
    loss: &L,
    x0: &[f64],
    cfg: &StochasticConfig,
) -> Result<SolverResult> {
    sgd_with_schedule(loss, x0, cfg, |t| decayed_step(cfg, t))
}

pub fn decayed_step(cfg: &StochasticConfig, t: usize) -> f64 {
    cfg.step_size / (1.0 + cfg.decay_rate * t as f64)
}

fn sgd_with_schedule<L: LinearModelLoss + ?Sized>(
    loss: &L,
    x0: &[f64],
    cfg: &StochasticConfig,
    schedule: impl Fn(usize) -> f64,
) -> Result<SolverResult> {
    let n = loss.num_examples() as f64;
    run_epochs(
        loss,
        x0,
        cfg,
        |w, batch, t| {
            let g = batch_gradient(loss, w, batch, 1.0, batch.len() as f64 / n);
            let eta = schedule(t);
            for (wj, gj) in w.iter_mut().zip(g.iter()) {
                *wj -= eta * gj;
            }
        },
        |_| {},
    )
}

/// Per-coordinate AdaGrad: `G_j += ĝ_j²`, `w_j −= η·ĝ_j/(δ + √G_j)`.
pub fn sgd_adagrad<L: LinearModelLoss + ?Sized>(
    loss: &L,
    x0: &[f64],
    cfg: &StochasticConfig,
) -> Result<SolverResult> {
    let n = loss.num_examples() as f64;
    let mut accum = vec![0.0; x0.len()];
    run_epochs(
        loss,
        x0,
        cfg,
        |w, batch, _| {
            let g = batch_gradient(loss, w, batch, 1.0, batch.len() as f64 / n);
            for ((wj, gj), acc) in w.iter_mut().zip(g.iter()).zip(accum.iter_mut()) {
                *acc += gj * gj;
                *wj -= cfg.step_size * gj / (cfg.adagrad_eps + acc.sqrt());
            }
        },
        |_| {},
    )
}

/// Stochastic-average-gradient memory for a linear model: one stored
/// derivative `d_i` per example and the running sum `a = Σ d_i·x_i`.
#[derive(Debug, Clone)]
pub struct SagState {
    scalars: Vec<f64>,
    sum: DenseVector,
}

impl SagState {
    pub fn new(num_examples: usize, dim: usize) -> Self {
        SagState {
            scalars: vec![0.0; num_examples],
            sum: DenseVector::zeros(dim),
        }
    }

    /// Refreshes example `i` with its derivative at `w`.
    pub fn visit<L: LinearModelLoss + ?Sized>(&mut self, loss: &L, w: &[f64], i: usize) {
        let x = &loss.examples()[i];
        let fresh = loss.term_derivative(i, x.dot(w));
        let delta = fresh - self.scalars[i];
        if delta != 0.0 {
            x.add_scaled_to(delta, &mut self.sum);
        }
        self.scalars[i] = fresh;
    }

    pub fn sum(&self) -> &DenseVector {
        &self.sum
    }

    pub fn scalars(&self) -> &[f64] {
        &self.scalars
    }

    /// `Σ d_i·x_i` rebuilt from the stored scalars.
    pub fn recomputed_sum<L: LinearModelLoss + ?Sized>(&self, loss: &L) -> DenseVector {
        let mut a = DenseVector::zeros(self.sum.len());
        for (x, d) in loss.examples().iter().zip(&self.scalars) {
            x.add_scaled_to(*d, &mut a);
        }
        a
    }
}

/// SAG: `w ← w − η·(a/n + (λ/n)·∇R(w))`, i.e. descent on the averaged
/// objective `f/n`, whose minimizer is that of `f`. L2 only.
pub fn sgd_stochastic_average_gradient<L: LinearModelLoss + ?Sized>(
    loss: &L,
    x0: &[f64],
    cfg: &StochasticConfig,
) -> Result<SolverResult> {
    if loss.regularizer() != Regularizer::L2 {
        return Err(Error::Unsupported(
            "SAG needs an L2 regularizer; use dual averaging for L1".into(),
        ));
    }
    let n = loss.num_examples();
    let inv_n = 1.0 / n.max(1) as f64;
    let state = RefCell::new(SagState::new(n, x0.len()));
    run_epochs(
        loss,
        x0,
        cfg,
        |w, batch, _| {
            let mut st = state.borrow_mut();
            for &i in batch {
                st.visit(loss, w, i);
            }
            let mut dir: DenseVector = st.sum.iter().map(|a| a * inv_n).collect();
            loss.add_regularizer_gradient(w, inv_n, &mut dir);
            for (wj, dj) in w.iter_mut().zip(dir.iter()) {
                *wj -= cfg.step_size * dj;
            }
        },
        |_| {
            if cfg!(debug_assertions) {
                let st = state.borrow();
                let exact = st.recomputed_sum(loss);
                let scale = exact.iter().fold(1.0f64, |m, v| m.max(v.abs()));
                let drift = exact
                    .iter()
                    .zip(st.sum.iter())
                    .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                debug_assert!(drift <= 1e-10 * scale, "SAG running sum drifted by {drift}");
            }
        },
    )
}

/// Closed-form dual-averaging step:
/// `w_j = 0` if `|ḡ_j| ≤ λ`, else `−(√t/γ)·(ḡ_j − λ·sign ḡ_j)`.
pub fn rda_update(avg_grad: &[f64], t: usize, lambda: f64, gamma: f64) -> DenseVector {
    let scale = (t as f64).sqrt() / gamma;
    avg_grad
        .iter()
        .map(|&g| soft_threshold_step(g, lambda, scale))
        .collect()
}

/// AdaGrad-scaled dual averaging:
/// `w_j = 0` if `|ḡ_j| ≤ λ`, else `−(η·t/H_j)·(ḡ_j − λ·sign ḡ_j)` with
/// `H_j = δ + √(Σ ĝ_j²)`.
pub fn rda_adagrad_update(
    avg_grad: &[f64],
    sq_grad_sum: &[f64],
    t: usize,
    lambda: f64,
    eta: f64,
    delta: f64,
) -> DenseVector {
    avg_grad
        .iter()
        .zip(sq_grad_sum)
        .map(|(&g, &s)| {
            let h = delta + s.sqrt();
            soft_threshold_step(g, lambda, eta * t as f64 / h)
        })
        .collect()
}

#[inline]
fn soft_threshold_step(g: f64, lambda: f64, scale: f64) -> f64 {
    if g.abs() <= lambda {
        0.0
    } else {
        -scale * (g - lambda * g.signum())
    }
}

fn require_l1<L: LinearModelLoss + ?Sized>(loss: &L) -> Result<()> {
    if loss.regularizer() != Regularizer::L1 {
        return Err(Error::Unsupported(
            "dual averaging is for L1-regularized losses".into(),
        ));
    }
    Ok(())
}

/// Regularized dual averaging for L1 losses. Mini-batch gradients of the
/// data term are rescaled by `n/|batch|` so they estimate the full-sum
/// gradient; coordinates whose running average stays inside `[−λ, λ]` are
/// exactly zero.
pub fn sgd_regularized_dual_averaging<L: LinearModelLoss + ?Sized>(
    loss: &L,
    x0: &[f64],
    cfg: &StochasticConfig,
) -> Result<SolverResult> {
    require_l1(loss)?;
    let n = loss.num_examples() as f64;
    let lambda = loss.lambda();
    let mut grad_sum = vec![0.0; x0.len()];
    run_epochs(
        loss,
        x0,
        cfg,
        |w, batch, t| {
            let g = batch_gradient(loss, w, batch, n / batch.len() as f64, 0.0);
            let steps = t + 1;
            for (s, gj) in grad_sum.iter_mut().zip(g.iter()) {
                *s += gj;
            }
            let avg: Vec<f64> = grad_sum.iter().map(|s| s / steps as f64).collect();
            *w = rda_update(&avg, steps, lambda, cfg.rda_gamma);
        },
        |_| {},
    )
}

/// Dual averaging with AdaGrad's per-coordinate scaling; `η` is
/// `cfg.step_size` and `δ` is `cfg.adagrad_eps`.
pub fn sgd_regularized_dual_averaging_adagrad<L: LinearModelLoss + ?Sized>(
    loss: &L,
    x0: &[f64],
    cfg: &StochasticConfig,
) -> Result<SolverResult> {
    require_l1(loss)?;
    let n = loss.num_examples() as f64;
    let lambda = loss.lambda();
    let mut grad_sum = vec![0.0; x0.len()];
    let mut sq_sum = vec![0.0; x0.len()];
    run_epochs(
        loss,
        x0,
        cfg,
        |w, batch, t| {
            let g = batch_gradient(loss, w, batch, n / batch.len() as f64, 0.0);
            let steps = t + 1;
            for ((s, q), gj) in grad_sum.iter_mut().zip(sq_sum.iter_mut()).zip(g.iter()) {
                *s += gj;
                *q += gj * gj;
            }
            let avg: Vec<f64> = grad_sum.iter().map(|s| s / steps as f64).collect();
            *w = rda_adagrad_update(&avg, &sq_sum, steps, lambda, cfg.step_size, cfg.adagrad_eps);
        },
        |_| {},
    )
}
