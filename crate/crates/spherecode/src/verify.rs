//! Second-order certification of critical configurations.

use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::{normalize, Point3, PointSet};
use crate::linalg::{self, Matrix};
use crate::numerics::BigReal;
use crate::potentials::{kernel, residual, Potential};

pub use crate::linalg::eigenvalues_sym;

/// Two orthonormal tangent vectors at every point.
#[derive(Clone, Debug)]
pub struct TangentBasis {
    pub t1: Vec<Point3>,
    pub t2: Vec<Point3>,
}

impl TangentBasis {
    fn vector(&self, i: usize, alpha: usize) -> &Point3 {
        if alpha == 0 {
            &self.t1[i]
        } else {
            &self.t2[i]
        }
    }
}

pub fn tangent_basis(set: &PointSet) -> TangentBasis {
    let p = set.digits();
    let mut t1 = Vec::with_capacity(set.len());
    let mut t2 = Vec::with_capacity(set.len());
    for x in set.points() {
        let abs: Vec<BigReal> = (0..3).map(|k| x.coord(k).abs()).collect();
        let mut seed_axis = 0;
        for k in 1..3 {
            if abs[k] < abs[seed_axis] {
                seed_axis = k;
            }
        }
        let e = Point3::axis(seed_axis, p);
        let a = normalize(&e.sub(&x.scale(&e.dot(x)))).expect("seed axis is never parallel to x");
        t2.push(x.cross(&a));
        t1.push(a);
    }
    TangentBasis { t1, t2 }
}

/// Gradient and Hessian of the energy in the chart
/// `u ↦ normalize(x_i + u₁ t1_i + u₂ t2_i)` at `u = 0`.
pub(crate) fn chart_derivatives(
    set: &PointSet,
    pot: Potential,
    basis: &TangentBasis,
) -> Result<(Vec<BigReal>, Matrix)> {
    let n = set.len();
    let p = set.digits();
    let pts = set.points();
    let floor = BigReal::exp10(-(p as i32), p);
    let mut h = linalg::zeros(2 * n, 2 * n, p);
    let mut grad_amb = vec![Point3::zero(p); n];
    for i in 0..n {
        for j in i + 1..n {
            let w = pts[i].sub(&pts[j]);
            let q = w.norm2();
            if q < floor {
                return Err(Error::CoincidentPoints { i, j });
            }
            let (_, d1, d2) = kernel(&q, pot);
            let g = w.scale(&(&d1 * 2.0));
            grad_amb[i] = grad_amb[i].add(&g);
            grad_amb[j] = grad_amb[j].sub(&g);
            let two_d1 = &d1 * 2.0;
            let four_d2 = &d2 * 4.0;
            let twi = [basis.t1[i].dot(&w), basis.t2[i].dot(&w)];
            let twj = [basis.t1[j].dot(&w), basis.t2[j].dot(&w)];
            for a in 0..2 {
                for b in 0..2 {
                    let mut dii = &four_d2 * &twi[a] * &twi[b];
                    let mut djj = &four_d2 * &twj[a] * &twj[b];
                    if a == b {
                        dii += &two_d1;
                        djj += &two_d1;
                    }
                    h[2 * i + a][2 * i + b] += dii;
                    h[2 * j + a][2 * j + b] += djj;
                    let tt = basis.vector(i, a).dot(basis.vector(j, b));
                    let off = &two_d1 * &tt + &four_d2 * &twi[a] * &twj[b];
                    h[2 * i + a][2 * j + b] -= &off;
                    h[2 * j + b][2 * i + a] -= off;
                }
            }
        }
    }
    let mut grad = Vec::with_capacity(2 * n);
    for i in 0..n {
        // Second derivative of the normalized chart is -x, giving -(∇E·x).
        let radial = grad_amb[i].dot(&pts[i]);
        for a in 0..2 {
            h[2 * i + a][2 * i + a] -= &radial;
            grad.push(basis.vector(i, a).dot(&grad_amb[i]));
        }
    }
    Ok((grad, h))
}

/// The 2n×2n energy Hessian in the tangent chart of [`tangent_basis`].
pub fn hessian(set: &PointSet, pot: Potential) -> Result<Matrix> {
    Ok(chart_derivatives(set, pot, &tangent_basis(set))?.1)
}

/// Moves each point along `u` in the tangent chart.
pub(crate) fn chart_step(set: &PointSet, basis: &TangentBasis, u: &[BigReal]) -> Result<PointSet> {
    let pts = set
        .points()
        .iter()
        .enumerate()
        .map(|(i, x)| normalize(&x.add_scaled(&u[2 * i], &basis.t1[i]).add_scaled(&u[2 * i + 1], &basis.t2[i])))
        .collect::<Result<Vec<_>>>()?;
    Ok(PointSet::new_unchecked(pts))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Minimum,
    Saddle,
    Degenerate,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Minimum => "minimum",
            Verdict::Saddle => "saddle",
            Verdict::Degenerate => "degenerate",
        })
    }
}

#[derive(Clone, Debug)]
pub struct HessianReport {
    /// Ascending, length 2n.
    pub eigenvalues: Vec<BigReal>,
    pub zero_count: usize,
    pub expected_zero_count: usize,
    pub verdict: Verdict,
}

/// Default zero tolerance 10^(-p/2).
pub fn default_zero_tol(digits: u32) -> BigReal {
    BigReal::exp10(-(digits as i32) / 2, digits)
}

fn collinear(set: &PointSet) -> bool {
    let p = set.digits();
    let tol = BigReal::exp10(-(p as i32), p);
    let first = &set.points()[0];
    set.points().iter().all(|x| x.cross(first).norm2() < tol)
}

pub fn verify_minimum(set: &PointSet, pot: Potential, zero_tol: &BigReal) -> Result<HessianReport> {
    let p = set.digits();
    if set.len() <= 1 {
        return Ok(HessianReport {
            eigenvalues: vec![BigReal::zero(p); 2 * set.len()],
            zero_count: 2 * set.len(),
            expected_zero_count: 2 * set.len(),
            verdict: Verdict::Degenerate,
        });
    }
    let r = residual(set, pot)?;
    if &r >= zero_tol {
        return Err(Error::NotCritical { residual: r.to_sci_string(6) });
    }
    let eigenvalues = eigenvalues_sym(&hessian(set, pot)?, p)?;
    let zero_count = eigenvalues.iter().filter(|l| &l.abs() < zero_tol).count();
    let expected_zero_count = if collinear(set) { 2 } else { 3 };
    let neg_tol = -zero_tol;
    let verdict = if eigenvalues.iter().any(|l| *l < neg_tol) {
        Verdict::Saddle
    } else if zero_count == expected_zero_count {
        Verdict::Minimum
    } else {
        Verdict::Degenerate
    };
    Ok(HessianReport { eigenvalues, zero_count, expected_zero_count, verdict })
}
