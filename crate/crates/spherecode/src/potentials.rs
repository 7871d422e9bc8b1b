//! Logarithmic and Riesz pair potentials, energies and tangential forces.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{Point3, PointSet};
use crate::numerics::BigReal;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Potential {
    /// `-log d`
    Log,
    /// `d^-s` for integer `s ≥ 1`
    Riesz(u32),
}

impl Potential {
    pub fn token(&self) -> String {
        match self {
            Potential::Log => "log".into(),
            Potential::Riesz(1) => "r1".into(),
            Potential::Riesz(2) => "r2".into(),
            Potential::Riesz(s) => format!("rs:{s}"),
        }
    }
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.token())
    }
}

impl FromStr for Potential {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log" => Ok(Potential::Log),
            "r1" => Ok(Potential::Riesz(1)),
            "r2" => Ok(Potential::Riesz(2)),
            _ => {
                let k = s
                    .strip_prefix("rs:")
                    .and_then(|k| k.parse::<u32>().ok())
                    .filter(|&k| k >= 1)
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown potential {s:?}")))?;
                Ok(Potential::Riesz(k))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnergyValue {
    pub value: BigReal,
    pub potential: Potential,
    pub n: usize,
}

pub fn pair_potential(d: &BigReal, pot: Potential) -> Result<BigReal> {
    if d.signum() <= 0 {
        return Err(Error::Domain(format!("pair distance must be positive, got {}", d.to_sci_string(8))));
    }
    Ok(match pot {
        Potential::Log => -d.ln()?,
        Potential::Riesz(s) => d.powi(-(s as i32)),
    })
}

/// The pair term as a function of `q = d²`: value, first and second derivative.
pub(crate) fn kernel(q: &BigReal, pot: Potential) -> (BigReal, BigReal, BigReal) {
    match pot {
        Potential::Log => {
            let inv = q.recip();
            let psi = q.ln().expect("positive squared distance") * -0.5;
            let d1 = &inv * -0.5;
            let d2 = inv.square() * 0.5;
            (psi, d1, d2)
        }
        Potential::Riesz(s) => {
            let h = s as f64 / 2.0;
            let psi = q_power(q, s);
            let inv = q.recip();
            let d1 = &psi * &inv * -h;
            let d2 = &psi * inv.square() * (h * (h + 1.0));
            (psi, d1, d2)
        }
    }
}

/// `q^(-s/2)` for integer `s`.
fn q_power(q: &BigReal, s: u32) -> BigReal {
    if s.is_multiple_of(2) {
        q.powi(-((s / 2) as i32))
    } else {
        q.sqrt().expect("positive squared distance").powi(-(s as i32))
    }
}

fn coincidence_floor(p: u32) -> BigReal {
    BigReal::exp10(-(p as i32), p)
}

/// Squared distance of every pair `i < j`, failing on coincident points.
fn checked_q(a: &Point3, b: &Point3, i: usize, j: usize, floor: &BigReal) -> Result<(Point3, BigReal)> {
    let w = a.sub(b);
    let q = w.norm2();
    if &q < floor {
        return Err(Error::CoincidentPoints { i, j });
    }
    Ok((w, q))
}

pub fn energy(set: &PointSet, pot: Potential) -> Result<EnergyValue> {
    let p = set.digits();
    let floor = coincidence_floor(p);
    let pts = set.points();
    let mut total = BigReal::zero(p);
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let (_, q) = checked_q(&pts[i], &pts[j], i, j, &floor)?;
            total += match pot {
                Potential::Log => q.ln()? * -0.5,
                Potential::Riesz(s) => q_power(&q, s),
            };
        }
    }
    Ok(EnergyValue { value: total, potential: pot, n: pts.len() })
}

/// Coefficient `c` with force contribution `c (x_i - x_j)` on point i.
fn force_coefficient(q: &BigReal, pot: Potential) -> BigReal {
    match pot {
        Potential::Log => q.recip(),
        Potential::Riesz(s) => q_power(q, s) / q * s as f64,
    }
}

/// Negative energy gradient at every point, as ambient vectors.
pub fn forces(set: &PointSet, pot: Potential) -> Result<Vec<Point3>> {
    let p = set.digits();
    let floor = coincidence_floor(p);
    let pts = set.points();
    let mut out = vec![Point3::zero(p); pts.len()];
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let (w, q) = checked_q(&pts[i], &pts[j], i, j, &floor)?;
            let c = force_coefficient(&q, pot);
            let f = w.scale(&c);
            out[i] = out[i].add(&f);
            out[j] = out[j].sub(&f);
        }
    }
    Ok(out)
}

pub fn force(set: &PointSet, i: usize, pot: Potential) -> Result<Point3> {
    let pts = set.points();
    if i >= pts.len() {
        return Err(Error::InvalidArgument(format!("point index {i} out of range")));
    }
    let p = set.digits();
    let floor = coincidence_floor(p);
    let mut f = Point3::zero(p);
    for (j, xj) in pts.iter().enumerate() {
        if j == i {
            continue;
        }
        let (w, q) = checked_q(&pts[i], xj, i.min(j), i.max(j), &floor)?;
        f = f.add_scaled(&force_coefficient(&q, pot), &w);
    }
    Ok(f)
}

/// `F - (F·x) x`
pub fn tangential_component(x: &Point3, f: &Point3) -> Point3 {
    f.sub(&x.scale(&f.dot(x)))
}

/// Tangential forces and the largest of their norms.
pub fn tangential_forces(set: &PointSet, pot: Potential) -> Result<(Vec<Point3>, BigReal)> {
    let p = set.digits();
    let t: Vec<Point3> = forces(set, pot)?.iter().zip(set.points()).map(|(f, x)| tangential_component(x, f)).collect();
    let r = t.iter().map(Point3::norm2).fold(BigReal::zero(p), |a, b| a.max(&b));
    Ok((t, r.sqrt().expect("non-negative")))
}

pub fn residual(set: &PointSet, pot: Potential) -> Result<BigReal> {
    Ok(tangential_forces(set, pot)?.1)
}
