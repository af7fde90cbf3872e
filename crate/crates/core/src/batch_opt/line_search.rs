use super::Evaluator;
use crate::linalg::DenseVector;
use crate::losses::DifferentiableFunction;

/// Smallest trial step before backtracking gives up.
pub(crate) const MIN_STEP: f64 = 1e-20;
/// Backtracking shrink factor.
pub(crate) const SHRINK: f64 = 0.5;

pub(crate) enum Backtrack {
    Accepted {
        x: DenseVector,
        f: f64,
        g: DenseVector,
    },
    StepUnderflow,
    OutOfBudget,
}

/// Armijo backtracking along `dir` from `x`:
/// accept the first `t = t0·2⁻ᵏ` with `f(x + t·dir) ≤ fx + γ·t·slope`,
/// where `slope = gᵀdir < 0`.
pub(crate) fn armijo<F: DifferentiableFunction + ?Sized>(
    ev: &mut Evaluator<'_, F>,
    x: &[f64],
    fx: f64,
    dir: &[f64],
    slope: f64,
    t0: f64,
    gamma: f64,
) -> Backtrack {
    let mut t = t0;
    loop {
        let trial: DenseVector = x.iter().zip(dir).map(|(xi, di)| xi + t * di).collect();
        let Some((ft, gt)) = ev.eval(&trial) else {
            return Backtrack::OutOfBudget;
        };
        if ft <= fx + gamma * t * slope {
            return Backtrack::Accepted {
                x: trial,
                f: ft,
                g: gt,
            };
        }
        t *= SHRINK;
        if t < MIN_STEP {
            return Backtrack::StepUnderflow;
        }
    }
}
