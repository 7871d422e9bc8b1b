//! Newton refinement of parameter vectors on a precision ladder.

use super::spec::{energy_gradient, energy_gradient_jacobian, ConfigSpec, ParamVector};
use crate::error::{Error, Result};
use crate::linalg;
use crate::numerics::{BigReal, MIN_DIGITS};
use crate::potentials::Potential;

/// Working digits beyond the expected correct digits at each rung.
const LADDER_GUARD: u32 = 10;
/// Correct digits assumed for the starting vector.
const INITIAL_DIGITS: u32 = 8;
const MAX_STEPS: usize = 200;
const MAX_HALVINGS: usize = 30;

/// One Newton iteration as recorded by [`newton_refine_traced`].
#[derive(Clone, Debug)]
pub struct NewtonStep {
    pub work_digits: u32,
    /// Gradient norm before the step.
    pub residual: BigReal,
    /// Norm of the accepted update, zero when the rung was only promoted.
    pub step: BigReal,
}

fn norm(v: &[BigReal], digits: u32) -> BigReal {
    v.iter().fold(BigReal::zero(digits), |acc, x| acc + x.square()).sqrt().expect("non-negative")
}

fn rung(correct: u32, target: u32) -> u32 {
    (2 * correct).max(MIN_DIGITS).saturating_add(LADDER_GUARD).min(target + LADDER_GUARD)
}

/// Refines `params0` until the energy gradient norm drops below
/// `10^(5 - target_digits)`, returning values at `target_digits`.
pub fn newton_refine(
    spec: &ConfigSpec,
    params0: &ParamVector,
    pot: Potential,
    target_digits: u32,
) -> Result<ParamVector> {
    Ok(newton_refine_traced(spec, params0, pot, target_digits)?.0)
}

pub fn newton_refine_traced(
    spec: &ConfigSpec,
    params0: &ParamVector,
    pot: Potential,
    target_digits: u32,
) -> Result<(ParamVector, Vec<NewtonStep>)> {
    let target = target_digits.max(MIN_DIGITS);
    let top = target + LADDER_GUARD;
    let mut work = rung(INITIAL_DIGITS, target);
    let mut params = params0.with_precision(work);
    let mut trace = Vec::new();
    let mut strikes = 0;
    if spec.arity() == 0 {
        return Ok((params0.with_precision(target), trace));
    }
    for _ in 0..MAX_STEPS {
        params = params.with_precision(work);
        let (e, grad, jac) = energy_gradient_jacobian(spec, &params, pot)?;
        let r = norm(&grad, work);
        let goal = BigReal::exp10(5 - target as i32, work);
        if work == top && r < goal {
            return Ok((params.with_precision(target), trace));
        }
        let noise = BigReal::exp10(12 - work as i32, work) * BigReal::one(work).max(&e.abs());
        if r < noise && work < top {
            trace.push(NewtonStep { work_digits: work, residual: r, step: BigReal::zero(work) });
            work = rung(work - LADDER_GUARD, target);
            continue;
        }
        let rhs: Vec<BigReal> = grad.iter().map(|g| -g).collect();
        let pivot_floor = BigReal::exp10(-(work as i32) / 2, work);
        let h = linalg::solve(&jac, &rhs, &pivot_floor)?;
        let mut t = BigReal::one(work);
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let cand: Vec<BigReal> = params.values.iter().zip(&h).map(|(p, d)| p + &(d * &t)).collect();
            let cand = params.with_values(cand);
            match energy_gradient(spec, &cand, pot) {
                Ok((_, g)) if norm(&g, work) < r => {
                    accepted = Some(cand);
                    break;
                }
                Ok(_) | Err(Error::DomainViolation { .. }) | Err(Error::CoincidentPoints { .. }) => t /= 2.0,
                Err(e) => return Err(e),
            }
        }
        let step = norm(&h, work) * &t;
        trace.push(NewtonStep { work_digits: work, residual: r.clone(), step: step.clone() });
        match accepted {
            Some(next) => {
                strikes = 0;
                params = next;
                let k = if step.is_zero() { work } else { (-step.log10_abs()).max(0.0).floor() as u32 };
                let correct = (2 * k).min(work - LADDER_GUARD);
                work = work.max(rung(correct, target));
            }
            None if r < noise => {
                // At the noise floor of the top rung; nothing left to gain.
                return Ok((params.with_precision(target), trace));
            }
            None => {
                strikes += 1;
                if strikes >= 2 {
                    return Err(Error::Diverged { steps: trace.len() });
                }
                let full: Vec<BigReal> = params.values.iter().zip(&h).map(|(p, d)| p + d).collect();
                params = params.with_values(full);
            }
        }
    }
    Err(Error::Diverged { steps: trace.len() })
}
