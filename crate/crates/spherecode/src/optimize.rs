//! Percolating annealing, tangential gradient descent and multi-start runs.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::geometry::{gram_matrix, gram_signature, normalize, random_point_set, GramSignature, Point3, PointSet};
use crate::linalg;
use crate::numerics::{BigReal, Rng};
use crate::potentials::{energy, tangential_forces, EnergyValue, Potential};
use crate::verify::{chart_derivatives, chart_step, tangent_basis};

#[derive(Clone, Debug)]
pub struct AnnealConfig {
    pub passes_per_round: usize,
    pub scale_init: BigReal,
    pub scale_ratio: BigReal,
    pub final_precision: BigReal,
    /// Consecutive rounds without any improvement before giving up.
    pub max_rounds: usize,
}

impl AnnealConfig {
    pub fn new(digits: u32) -> Self {
        AnnealConfig {
            passes_per_round: 100_000,
            scale_init: BigReal::from_ratio(1, 10, digits),
            scale_ratio: BigReal::from_ratio(8, 10, digits),
            final_precision: BigReal::exp10(-(digits as i32) / 2, digits),
            max_rounds: 10 * digits as usize,
        }
    }

    fn check(&self) -> Result<()> {
        if self.passes_per_round == 0 {
            return Err(Error::InvalidArgument("passes_per_round must be at least 1".into()));
        }
        if self.scale_ratio.signum() <= 0 || self.scale_ratio >= 1.0 {
            return Err(Error::InvalidArgument("scale_ratio must lie in (0, 1)".into()));
        }
        if self.final_precision.signum() <= 0 || self.scale_init.signum() <= 0 {
            return Err(Error::InvalidArgument("scale_init and final_precision must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct DescentConfig {
    /// Step size is `alpha_numerator / n`.
    pub alpha_numerator: BigReal,
    /// Halving stops at `alpha_floor / n`.
    pub alpha_floor: BigReal,
    pub tolerance: BigReal,
    pub max_iters: usize,
    /// Once the residual drops below this value the run switches to damped
    /// Newton steps in the tangent chart. `None` keeps plain descent.
    pub polish_below: Option<BigReal>,
    /// Precision of random starting points in [`multi_start`].
    pub precision: u32,
}

impl DescentConfig {
    pub fn new(digits: u32) -> Self {
        DescentConfig {
            alpha_numerator: BigReal::from_ratio(1, 2, digits),
            alpha_floor: BigReal::from_ratio(1, 10, digits),
            tolerance: BigReal::exp10(-(3 * digits as i32) / 4, digits),
            max_iters: 200_000,
            polish_below: Some(BigReal::exp10(-2, digits)),
            precision: digits,
        }
    }

    pub fn with_tolerance(mut self, tolerance: BigReal) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn plain(mut self) -> Self {
        self.polish_below = None;
        self
    }

    fn check(&self) -> Result<()> {
        if self.alpha_numerator.signum() <= 0 || self.alpha_numerator > 1.0 {
            return Err(Error::InvalidArgument("alpha_numerator must lie in (0, 1]".into()));
        }
        if self.alpha_floor.signum() <= 0 || self.alpha_floor > self.alpha_numerator {
            return Err(Error::InvalidArgument("alpha_floor must lie in (0, alpha_numerator]".into()));
        }
        if self.tolerance.signum() <= 0 {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    /// Residual fell below the descent tolerance.
    Converged,
    /// An annealing round improved the energy by less than `final_precision`.
    ImprovementBelowPrecision,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub final_points: PointSet,
    pub final_energy: EnergyValue,
    pub iterations: usize,
    pub residual: BigReal,
    /// `(round or iteration, energy)` samples in run order.
    pub history: Vec<(usize, BigReal)>,
    pub stop: StopReason,
}

/// Energy noise allowance at working precision `p`.
fn noise(e: &BigReal, p: u32) -> BigReal {
    BigReal::exp10(3 - p as i32, p) * BigReal::one(p).max(&e.abs())
}

pub fn jiggle(set: &PointSet, scale: &BigReal, rng: &mut Rng) -> Result<PointSet> {
    if scale.signum() <= 0 {
        return Err(Error::InvalidArgument("jiggle scale must be positive".into()));
    }
    let p = set.digits();
    let mut out = Vec::with_capacity(set.len());
    for x in set.points() {
        loop {
            let d =
                Point3::new(scale * &rng.next_uniform(p), scale * &rng.next_uniform(p), scale * &rng.next_uniform(p));
            match normalize(&x.add(&d)) {
                Ok(q) => {
                    out.push(q);
                    break;
                }
                Err(Error::ZeroVector) => continue,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(PointSet::new_unchecked(out))
}

/// Improvement-only random search with geometric scale decay.
pub fn percolating_anneal(p0: &PointSet, pot: Potential, cfg: &AnnealConfig, rng: &mut Rng) -> Result<RunReport> {
    cfg.check()?;
    let p = p0.digits();
    let mut current = p0.clone();
    let mut e = energy(&current, pot)?.value;
    let mut scale = cfg.scale_init.with_precision(p);
    let mut history = vec![(0, e.clone())];
    let mut stale = 0usize;
    let mut round = 0usize;
    loop {
        round += 1;
        let start = e.clone();
        let mut improved = false;
        for _ in 0..cfg.passes_per_round {
            let cand = jiggle(&current, &scale, rng)?;
            let ce = match energy(&cand, pot) {
                Ok(v) => v.value,
                Err(Error::CoincidentPoints { .. }) => continue,
                Err(err) => return Err(err),
            };
            if ce < e {
                current = cand;
                e = ce;
                improved = true;
            }
        }
        history.push((round, e.clone()));
        if improved {
            stale = 0;
            scale *= &cfg.scale_ratio;
            if start - &e < cfg.final_precision {
                break;
            }
        } else {
            stale += 1;
            if stale >= cfg.max_rounds {
                return Err(Error::StagnationLimit { rounds: stale });
            }
        }
    }
    let (_, r) = tangential_forces(&current, pot)?;
    let final_energy = energy(&current, pot)?;
    Ok(RunReport {
        final_points: current,
        final_energy,
        iterations: round,
        residual: r,
        history,
        stop: StopReason::ImprovementBelowPrecision,
    })
}

fn step_along(set: &PointSet, t: &[Point3], alpha: &BigReal) -> Result<PointSet> {
    let pts =
        set.points().iter().zip(t).map(|(x, ti)| normalize(&x.add_scaled(alpha, ti))).collect::<Result<Vec<_>>>()?;
    Ok(PointSet::new_unchecked(pts))
}

/// Moves every point by `alpha` times its tangential force and renormalizes.
pub fn descent_step(set: &PointSet, pot: Potential, alpha: &BigReal) -> Result<PointSet> {
    let (t, _) = tangential_forces(set, pot)?;
    step_along(set, &t, alpha)
}

const HISTORY_STRIDE: usize = 100;

pub fn descent(p0: &PointSet, pot: Potential, cfg: &DescentConfig) -> Result<RunReport> {
    cfg.check()?;
    let p = p0.digits();
    let n = p0.len() as f64;
    let tol = cfg.tolerance.with_precision(p);
    let mut alpha = cfg.alpha_numerator.with_precision(p) / n;
    let floor = cfg.alpha_floor.with_precision(p) / n;
    let mut current = p0.clone();
    let e0 = energy(&current, pot)?.value;
    let mut e = e0.clone();
    let mut history = vec![(0, e.clone())];
    let mut iter = 0usize;
    loop {
        let (t, r) = tangential_forces(&current, pot)?;
        if r < tol {
            return finish(current, pot, iter, r, history, e);
        }
        if let Some(thr) = &cfg.polish_below {
            if &r < thr {
                return polish(current, pot, cfg, iter, e, e0, history);
            }
        }
        if iter >= cfg.max_iters {
            return Err(Error::IterationLimit { iterations: iter, residual: r.to_sci_string(6) });
        }
        let slack = noise(&e, p);
        loop {
            let cand = step_along(&current, &t, &alpha)?;
            let ce = energy(&cand, pot)?.value;
            if ce <= &e + &slack && ce <= e0 {
                current = cand;
                e = ce;
                break;
            }
            if alpha <= floor {
                return Err(Error::NoProgress { iteration: iter });
            }
            alpha = (&alpha / 2.0).max(&floor);
        }
        iter += 1;
        if iter.is_multiple_of(HISTORY_STRIDE) {
            history.push((iter, e.clone()));
        }
    }
}

/// Levenberg-Marquardt steps in the tangent chart, used to finish a descent
/// run once the residual is small.
fn polish(
    mut current: PointSet,
    pot: Potential,
    cfg: &DescentConfig,
    mut iter: usize,
    mut e: BigReal,
    e0: BigReal,
    mut history: Vec<(usize, BigReal)>,
) -> Result<RunReport> {
    let p = current.digits();
    let tol = cfg.tolerance.with_precision(p);
    let pivot_floor = BigReal::exp10(-(p as i32), p);
    let give_up = BigReal::exp10(30, p);
    loop {
        let (_, r) = tangential_forces(&current, pot)?;
        if r < tol {
            return finish(current, pot, iter, r, history, e);
        }
        if iter >= cfg.max_iters {
            return Err(Error::IterationLimit { iterations: iter, residual: r.to_sci_string(6) });
        }
        let basis = tangent_basis(&current);
        let (g, h) = chart_derivatives(&current, pot, &basis)?;
        let gnorm = g.iter().fold(BigReal::zero(p), |a, v| a + v.square()).sqrt()?;
        let mut lambda = gnorm.max(&BigReal::exp10(-(p as i32) / 2, p));
        let rhs: Vec<BigReal> = g.iter().map(|v| -v).collect();
        let slack = noise(&e, p);
        loop {
            let mut a = h.clone();
            for (k, row) in a.iter_mut().enumerate() {
                row[k] += &lambda;
            }
            let accepted = match linalg::solve(&a, &rhs, &pivot_floor) {
                Ok(u) => {
                    let cand = chart_step(&current, &basis, &u)?;
                    match energy(&cand, pot) {
                        Ok(ce) if ce.value <= &e + &slack && ce.value <= e0 => Some((cand, ce.value)),
                        _ => None,
                    }
                }
                Err(Error::SingularJacobian { .. }) => None,
                Err(err) => return Err(err),
            };
            if let Some((cand, ce)) = accepted {
                current = cand;
                e = ce;
                break;
            }
            lambda *= 4.0;
            if lambda > give_up {
                return Err(Error::NoProgress { iteration: iter });
            }
        }
        iter += 1;
        history.push((iter, e.clone()));
    }
}

fn finish(
    points: PointSet,
    pot: Potential,
    iterations: usize,
    residual: BigReal,
    mut history: Vec<(usize, BigReal)>,
    e: BigReal,
) -> Result<RunReport> {
    if history.last().map(|h| h.0) != Some(iterations) {
        history.push((iterations, e));
    }
    let final_energy = energy(&points, pot)?;
    Ok(RunReport { final_points: points, final_energy, iterations, residual, history, stop: StopReason::Converged })
}

#[derive(Clone, Debug)]
pub struct MultiStartReport {
    pub best: RunReport,
    /// Restart index of `best`.
    pub best_index: usize,
    /// Gram signature of every successful restart, in restart order.
    pub signatures: Vec<GramSignature>,
    /// Final energy per restart, `None` where the run failed.
    pub energies: Vec<Option<BigReal>>,
    pub failures: Vec<(usize, Error)>,
}

/// Random start for restart `index`: stream `index` of `base_seed`.
pub fn random_start(n: usize, base_seed: u64, index: usize, digits: u32) -> PointSet {
    random_point_set(n, &mut Rng::new(base_seed, index as u64), digits)
}

pub fn multi_start(
    n: usize,
    pot: Potential,
    restarts: usize,
    cfg: &DescentConfig,
    base_seed: u64,
) -> Result<MultiStartReport> {
    let threads = std::thread::available_parallelism().map_or(1, |t| t.get());
    multi_start_with_threads(n, pot, restarts, cfg, base_seed, threads)
}

pub fn multi_start_with_threads(
    n: usize,
    pot: Potential,
    restarts: usize,
    cfg: &DescentConfig,
    base_seed: u64,
    threads: usize,
) -> Result<MultiStartReport> {
    if restarts == 0 || n == 0 {
        return Err(Error::InvalidArgument("need at least one point and one restart".into()));
    }
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<RunReport>>>> = Mutex::new(vec![None; restarts]);
    std::thread::scope(|scope| {
        for _ in 0..threads.clamp(1, restarts) {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::SeqCst);
                if k >= restarts {
                    break;
                }
                let start = random_start(n, base_seed, k, cfg.precision);
                let out = descent(&start, pot, cfg);
                results.lock().expect("no poisoned workers")[k] = Some(out);
            });
        }
    });
    let results = results.into_inner().expect("no poisoned workers");
    let mut best: Option<(usize, RunReport)> = None;
    let mut signatures = Vec::new();
    let mut energies = Vec::new();
    let mut failures = Vec::new();
    for (k, res) in results.into_iter().enumerate() {
        match res.expect("every restart ran") {
            Ok(run) => {
                let p = run.final_points.digits();
                let tol = crate::geometry::default_tolerance(p);
                signatures.push(gram_signature(&gram_matrix(&run.final_points), &tol));
                energies.push(Some(run.final_energy.value.clone()));
                let better = match &best {
                    None => true,
                    Some((_, b)) => run.final_energy.value < b.final_energy.value,
                };
                if better {
                    best = Some((k, run));
                }
            }
            Err(e) => {
                energies.push(None);
                failures.push((k, e));
            }
        }
    }
    match best {
        Some((best_index, best)) => Ok(MultiStartReport { best, best_index, signatures, energies, failures }),
        None => Err(failures.into_iter().next().expect("at least one restart").1),
    }
}
