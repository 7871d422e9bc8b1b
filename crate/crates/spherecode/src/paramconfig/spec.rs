//! Generator-based parameterizations and their energy derivatives.

use std::fmt;

use super::jet::{Jet, Order};
use crate::error::{Error, Result};
use crate::geometry::{Point3, PointSet};
use crate::linalg::{self, Matrix};
use crate::numerics::BigReal;
use crate::potentials::{energy, kernel, Potential};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if *self == Sign::Plus { "+" } else { "-" })
    }
}

/// A coordinate expression: a constant or a possibly negated variable.
#[derive(Clone, Debug, PartialEq)]
pub enum ParamRef {
    Const(BigReal),
    Var { index: usize, negate: bool },
}

impl ParamRef {
    pub fn var(index: usize) -> ParamRef {
        ParamRef::Var { index, negate: false }
    }

    pub fn neg_var(index: usize) -> ParamRef {
        ParamRef::Var { index, negate: true }
    }

    fn var_index(&self) -> Option<usize> {
        match self {
            ParamRef::Var { index, .. } => Some(*index),
            ParamRef::Const(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Generator {
    Pole {
        z_sign: Sign,
    },
    /// `k` points at height `z`, vertex `m` at angle `2π(m + phase)/k`.
    Ring {
        k: usize,
        z: ParamRef,
        phase: ParamRef,
    },
    /// `k` points at height `z`; the first is `(x, √(1−z²−x²), z)`, the rest
    /// follow by rotation through `2π/k`.
    OffsetRing {
        k: usize,
        z: ParamRef,
        x: ParamRef,
    },
    FreePoint {
        z: ParamRef,
        x: ParamRef,
        y_sign: Sign,
    },
}

impl Generator {
    pub fn point_count(&self) -> usize {
        match self {
            Generator::Pole { .. } | Generator::FreePoint { .. } => 1,
            Generator::Ring { k, .. } | Generator::OffsetRing { k, .. } => *k,
        }
    }

    fn refs(&self) -> Vec<&ParamRef> {
        match self {
            Generator::Pole { .. } => Vec::new(),
            Generator::Ring { z, phase, .. } => vec![z, phase],
            Generator::OffsetRing { z, x, .. } | Generator::FreePoint { z, x, .. } => vec![z, x],
        }
    }
}

/// An ordered list of generators over named variables.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigSpec {
    names: Vec<String>,
    generators: Vec<Generator>,
}

fn valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl ConfigSpec {
    pub fn new(names: Vec<String>, generators: Vec<Generator>) -> Result<ConfigSpec> {
        for (i, name) in names.iter().enumerate() {
            if !valid_name(name) {
                return Err(Error::InvalidArgument(format!("invalid parameter name {name:?}")));
            }
            if names[..i].contains(name) {
                return Err(Error::InvalidArgument(format!("duplicate parameter name {name:?}")));
            }
        }
        let mut used = vec![false; names.len()];
        for (g, gen) in generators.iter().enumerate() {
            if let Generator::Ring { k, .. } | Generator::OffsetRing { k, .. } = gen {
                if *k < 2 {
                    return Err(Error::InvalidArgument(format!("generator {g}: ring size {k} below 2")));
                }
            }
            for r in gen.refs() {
                if let Some(index) = r.var_index() {
                    if index >= names.len() {
                        return Err(Error::InvalidArgument(format!(
                            "generator {g}: variable {index} out of range for arity {}",
                            names.len()
                        )));
                    }
                    used[index] = true;
                }
            }
        }
        if let Some(unused) = used.iter().position(|u| !u) {
            return Err(Error::InvalidArgument(format!("parameter {} is never referenced", names[unused])));
        }
        Ok(ConfigSpec { names, generators })
    }

    pub fn arity(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn point_count(&self) -> usize {
        self.generators.iter().map(Generator::point_count).sum()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Named parameter values at a common precision.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamVector {
    pub names: Vec<String>,
    pub values: Vec<BigReal>,
    digits: u32,
}

impl ParamVector {
    /// Precision is the lowest among the values, or `digits` when empty.
    pub fn new(names: Vec<String>, values: Vec<BigReal>, digits: u32) -> Result<ParamVector> {
        if names.len() != values.len() {
            return Err(Error::SizeMismatch { left: names.len(), right: values.len() });
        }
        let digits = values.iter().map(BigReal::digits).min().unwrap_or(digits);
        let values = values.iter().map(|v| v.with_precision(digits)).collect();
        Ok(ParamVector { names, values, digits })
    }

    pub fn for_spec(spec: &ConfigSpec, values: Vec<BigReal>, digits: u32) -> Result<ParamVector> {
        ParamVector::new(spec.names.clone(), values, digits)
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&BigReal> {
        self.names.iter().position(|n| n == name).map(|i| &self.values[i])
    }

    pub fn with_precision(&self, digits: u32) -> ParamVector {
        ParamVector {
            names: self.names.clone(),
            values: self.values.iter().map(|v| v.with_precision(digits)).collect(),
            digits,
        }
    }

    pub(crate) fn with_values(&self, values: Vec<BigReal>) -> ParamVector {
        ParamVector { names: self.names.clone(), values, digits: self.digits }
    }
}

fn check_params(spec: &ConfigSpec, params: &ParamVector) -> Result<()> {
    if params.len() != spec.arity() {
        return Err(Error::SizeMismatch { left: spec.arity(), right: params.len() });
    }
    if params.names != spec.names {
        return Err(Error::InvalidArgument(format!(
            "parameter names {:?} do not match the spec {:?}",
            params.names, spec.names
        )));
    }
    Ok(())
}

/// A generated point as jets over the variables it depends on.
struct PointJet {
    vars: Vec<usize>,
    c: [Jet; 3],
}

struct Builder<'a> {
    params: &'a ParamVector,
    order: Order,
    digits: u32,
}

impl Builder<'_> {
    fn jet(&self, r: &ParamRef, vars: &[usize]) -> Jet {
        let m = vars.len();
        match r {
            ParamRef::Const(c) => Jet::constant(c.with_precision(self.digits), m, self.order),
            ParamRef::Var { index, negate } => {
                let local = vars.iter().position(|v| v == index).expect("variable collected");
                let j = Jet::variable(self.params.values[*index].clone(), local, m, self.order);
                if *negate {
                    j.neg()
                } else {
                    j
                }
            }
        }
    }

    fn constant(&self, v: f64, m: usize) -> Jet {
        Jet::constant(BigReal::from_f64(v, self.digits), m, self.order)
    }

    /// `√(1 − Σ tᵢ²)`, tolerating a rounding-level negative radicand when it
    /// carries no derivatives.
    fn root(&self, terms: &[&Jet], generator: usize) -> Result<Jet> {
        let m = terms[0].g.len();
        let mut rad = self.constant(1.0, m);
        for t in terms {
            rad = rad.sub(&t.square());
        }
        let p = self.digits;
        let constant = rad.g.iter().all(BigReal::is_zero);
        let violation = || Error::DomainViolation { generator, radicand: rad.v.to_sci_string(6) };
        if rad.v.signum() < 0 {
            let slack = BigReal::exp10(2 - p as i32, p);
            if (self.order == Order::Value || constant) && rad.v > -slack {
                return Ok(self.constant(0.0, m));
            }
            return Err(violation());
        }
        rad.sqrt().ok_or_else(violation)
    }

    fn points(&self, g: usize, gen: &Generator) -> Result<Vec<PointJet>> {
        let mut vars: Vec<usize> = gen.refs().iter().filter_map(|r| r.var_index()).collect();
        vars.sort_unstable();
        vars.dedup();
        let p = self.digits;
        let rotated = |k: usize, i: usize, x: &Jet, y: &Jet| {
            let angle = BigReal::pi(p) * 2.0 * i as f64 / k as f64;
            let (c, s) = (angle.cos(), angle.sin());
            [x.scale(&c).sub(&y.scale(&s)), x.scale(&s).add(&y.scale(&c))]
        };
        let out = match gen {
            Generator::Pole { z_sign } => {
                vec![[self.constant(0.0, 0), self.constant(0.0, 0), self.constant(z_sign.value(), 0)]]
            }
            Generator::Ring { k, z, phase } => {
                let z = self.jet(z, &vars);
                let r = self.root(&[&z], g)?;
                let phase = self.jet(phase, &vars);
                let step = BigReal::pi(p) * 2.0 / *k as f64;
                (0..*k)
                    .map(|i| {
                        let theta = phase.add_const(&BigReal::from_i64(i as i64, p)).scale(&step);
                        [r.mul(&theta.cos()), r.mul(&theta.sin()), z.clone()]
                    })
                    .collect()
            }
            Generator::OffsetRing { k, z, x } => {
                let z = self.jet(z, &vars);
                let x = self.jet(x, &vars);
                let y = self.root(&[&z, &x], g)?;
                (0..*k)
                    .map(|i| {
                        let [a, b] = rotated(*k, i, &x, &y);
                        [a, b, z.clone()]
                    })
                    .collect()
            }
            Generator::FreePoint { z, x, y_sign } => {
                let z = self.jet(z, &vars);
                let x = self.jet(x, &vars);
                let mut y = self.root(&[&z, &x], g)?;
                if *y_sign == Sign::Minus {
                    y = y.neg();
                }
                vec![[x, y, z]]
            }
        };
        Ok(out.into_iter().map(|c| PointJet { vars: vars.clone(), c }).collect())
    }
}

fn point_jets(spec: &ConfigSpec, params: &ParamVector, order: Order) -> Result<Vec<PointJet>> {
    check_params(spec, params)?;
    let b = Builder { params, order, digits: params.digits() };
    let mut out = Vec::with_capacity(spec.point_count());
    for (g, gen) in spec.generators.iter().enumerate() {
        out.extend(b.points(g, gen)?);
    }
    Ok(out)
}

/// Instantiates the spec at `params`, in generator order.
pub fn build_points(spec: &ConfigSpec, params: &ParamVector) -> Result<PointSet> {
    let pts = point_jets(spec, params, Order::Value)?
        .into_iter()
        .map(|pj| {
            let [x, y, z] = pj.c;
            Point3::new(x.v, y.v, z.v)
        })
        .collect();
    Ok(PointSet::new_unchecked(pts))
}

pub fn param_energy(spec: &ConfigSpec, params: &ParamVector, pot: Potential) -> Result<BigReal> {
    Ok(energy(&build_points(spec, params)?, pot)?.value)
}

fn merge(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut u: Vec<usize> = a.iter().chain(b).copied().collect();
    u.sort_unstable();
    u.dedup();
    u
}

fn positions(sub: &[usize], all: &[usize]) -> Vec<usize> {
    sub.iter().map(|v| all.iter().position(|w| w == v).expect("subset")).collect()
}

/// Energy with its gradient and, for second order, its Hessian with respect
/// to the parameters.
fn derivatives(
    spec: &ConfigSpec,
    params: &ParamVector,
    pot: Potential,
    order: Order,
) -> Result<(BigReal, Vec<BigReal>, Matrix)> {
    let pts = point_jets(spec, params, order)?;
    let p = params.digits();
    let a = spec.arity();
    let floor = BigReal::exp10(-(p as i32), p);
    let mut value = BigReal::zero(p);
    let mut grad = vec![BigReal::zero(p); a];
    let mut hess = if order == Order::Second { linalg::zeros(a, a, p) } else { Vec::new() };
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let u = merge(&pts[i].vars, &pts[j].vars);
            let (mi, mj) = (positions(&pts[i].vars, &u), positions(&pts[j].vars, &u));
            let mut q = Jet::constant(BigReal::zero(p), u.len(), order);
            for k in 0..3 {
                let w = pts[i].c[k].embed(&mi, u.len()).sub(&pts[j].c[k].embed(&mj, u.len()));
                q = q.add(&w.square());
            }
            if q.v < floor {
                return Err(Error::CoincidentPoints { i, j });
            }
            let (psi, d1, d2) = kernel(&q.v, pot);
            let e = q.chain(psi, &d1, &d2);
            value += &e.v;
            for (x, &gx) in u.iter().enumerate() {
                grad[gx] += &e.g[x];
                if order == Order::Second {
                    for (y, &gy) in u.iter().enumerate() {
                        hess[gx][gy] += &e.h[x * u.len() + y];
                    }
                }
            }
        }
    }
    Ok((value, grad, hess))
}

/// `[∂E/∂a, ∂E/∂b, …]`
pub fn param_gradient(spec: &ConfigSpec, params: &ParamVector, pot: Potential) -> Result<Vec<BigReal>> {
    Ok(derivatives(spec, params, pot, Order::First)?.1)
}

/// Matrix of second partial derivatives of the energy.
pub fn param_jacobian(spec: &ConfigSpec, params: &ParamVector, pot: Potential) -> Result<Matrix> {
    Ok(derivatives(spec, params, pot, Order::Second)?.2)
}

pub(crate) fn energy_gradient_jacobian(
    spec: &ConfigSpec,
    params: &ParamVector,
    pot: Potential,
) -> Result<(BigReal, Vec<BigReal>, Matrix)> {
    derivatives(spec, params, pot, Order::Second)
}

pub(crate) fn energy_gradient(
    spec: &ConfigSpec,
    params: &ParamVector,
    pot: Potential,
) -> Result<(BigReal, Vec<BigReal>)> {
    let (e, g, _) = derivatives(spec, params, pot, Order::First)?;
    Ok((e, g))
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 40;

    fn names(n: &[&str]) -> Vec<String> {
        n.iter().map(|s| s.to_string()).collect()
    }

    fn antiprism() -> ConfigSpec {
        let half = ParamRef::Const(BigReal::from_f64(0.5, P));
        let zero = ParamRef::Const(BigReal::zero(P));
        ConfigSpec::new(
            names(&["a"]),
            vec![
                Generator::Ring { k: 4, z: ParamRef::var(0), phase: half },
                Generator::Ring { k: 4, z: ParamRef::neg_var(0), phase: zero },
            ],
        )
        .unwrap()
    }

    fn pv(values: &[f64]) -> ParamVector {
        let n: Vec<String> = ["a", "b", "c", "d"][..values.len()].iter().map(|s| s.to_string()).collect();
        ParamVector::new(n, values.iter().map(|&v| BigReal::from_f64(v, P)).collect(), P).unwrap()
    }

    /// Two poles, an offset ring, a free point and a ring with a variable phase.
    fn mixed() -> ConfigSpec {
        ConfigSpec::new(
            names(&["a", "b", "c", "d"]),
            vec![
                Generator::Pole { z_sign: Sign::Plus },
                Generator::OffsetRing { k: 3, z: ParamRef::var(0), x: ParamRef::var(1) },
                Generator::FreePoint { z: ParamRef::neg_var(2), x: ParamRef::var(1), y_sign: Sign::Minus },
                Generator::Ring { k: 4, z: ParamRef::neg_var(0), phase: ParamRef::var(3) },
                Generator::Pole { z_sign: Sign::Minus },
            ],
        )
        .unwrap()
    }

    #[test]
    fn validation() {
        let v = ParamRef::var(1);
        let bad = ConfigSpec::new(names(&["a"]), vec![Generator::Ring { k: 3, z: v, phase: ParamRef::var(0) }]);
        assert!(bad.is_err());
        let unused = ConfigSpec::new(
            names(&["a", "b"]),
            vec![Generator::Ring { k: 3, z: ParamRef::var(0), phase: ParamRef::var(0) }],
        );
        assert!(unused.is_err());
        let small = ConfigSpec::new(
            names(&["a"]),
            vec![Generator::Ring { k: 1, z: ParamRef::var(0), phase: ParamRef::var(0) }],
        );
        assert!(small.is_err());
        assert_eq!(mixed().point_count(), 10);
    }

    #[test]
    fn pole_and_antiprism_points() {
        let spec = ConfigSpec::new(Vec::new(), vec![Generator::Pole { z_sign: Sign::Plus }]).unwrap();
        let set = build_points(&spec, &ParamVector::new(Vec::new(), Vec::new(), P).unwrap()).unwrap();
        assert_eq!(set.points()[0], Point3::axis(2, P));
        assert!(param_gradient(&spec, &ParamVector::new(Vec::new(), Vec::new(), P).unwrap(), Potential::Log)
            .unwrap()
            .is_empty());

        let a = BigReal::parse("0.5563309621802899475", P).unwrap();
        let params = ParamVector::new(names(&["a"]), vec![a.clone()], P).unwrap();
        let set = build_points(&antiprism(), &params).unwrap();
        let b = ((BigReal::one(P) - a.square()) / 2.0).sqrt().unwrap();
        let c = (BigReal::one(P) - a.square()).sqrt().unwrap();
        let tol = BigReal::exp10(-37, P);
        let first = &set.points()[0];
        assert!((&first.x - &b).abs() < tol && (&first.y - &b).abs() < tol && (&first.z - &a).abs() < tol);
        let fifth = &set.points()[4];
        assert!((&fifth.x - &c).abs() < tol && fifth.y.abs() < tol && (&fifth.z + &a).abs() < tol);
    }

    #[test]
    fn domain_violation_names_generator() {
        let spec = ConfigSpec::new(
            names(&["a"]),
            vec![
                Generator::Pole { z_sign: Sign::Plus },
                Generator::Ring { k: 5, z: ParamRef::var(0), phase: ParamRef::Const(BigReal::zero(P)) },
            ],
        )
        .unwrap();
        let err = build_points(&spec, &pv(&[1.2])).unwrap_err();
        assert!(matches!(err, Error::DomainViolation { generator: 1, .. }));
    }

    #[test]
    fn two_poles_give_antipodal_energy() {
        let spec = ConfigSpec::new(
            Vec::new(),
            vec![Generator::Pole { z_sign: Sign::Plus }, Generator::Pole { z_sign: Sign::Minus }],
        )
        .unwrap();
        let e =
            param_energy(&spec, &ParamVector::new(Vec::new(), Vec::new(), P).unwrap(), Potential::Riesz(1)).unwrap();
        assert_eq!(e, 0.5);
    }

    fn fd_gradient(spec: &ConfigSpec, params: &ParamVector, pot: Potential) -> Vec<BigReal> {
        let h = BigReal::exp10(-(P as i32) / 3, P);
        (0..params.len())
            .map(|k| {
                let mut up = params.values.clone();
                up[k] += &h;
                let mut dn = params.values.clone();
                dn[k] -= &h;
                let eu = param_energy(spec, &params.with_values(up), pot).unwrap();
                let ed = param_energy(spec, &params.with_values(dn), pot).unwrap();
                (eu - ed) / (&h * 2.0)
            })
            .collect()
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let spec = mixed();
        let params = pv(&[0.41, 0.33, 0.27, 0.13]);
        for pot in [Potential::Log, Potential::Riesz(1), Potential::Riesz(2)] {
            let (e, g, j) = energy_gradient_jacobian(&spec, &params, pot).unwrap();
            assert!((&e - param_energy(&spec, &params, pot).unwrap()).abs() < BigReal::exp10(-35, P));
            let fd = fd_gradient(&spec, &params, pot);
            let tol = BigReal::exp10(-(P as i32) / 3 + 2, P);
            for k in 0..4 {
                assert!((&fd[k] - &g[k]).abs() / BigReal::one(P).max(&g[k].abs()) < tol, "{pot} {k}");
            }
            let h = BigReal::exp10(-(P as i32) / 3, P);
            for v in 0..4 {
                let mut up = params.values.clone();
                up[v] += &h;
                let mut dn = params.values.clone();
                dn[v] -= &h;
                let gu = param_gradient(&spec, &params.with_values(up), pot).unwrap();
                let gd = param_gradient(&spec, &params.with_values(dn), pot).unwrap();
                for u in 0..4 {
                    let fd = (&gu[u] - &gd[u]) / (&h * 2.0);
                    assert!((&fd - &j[u][v]).abs() / BigReal::one(P).max(&j[u][v].abs()) < tol);
                    assert!((&j[u][v] - &j[v][u]).abs() < BigReal::exp10(5 - P as i32, P));
                }
            }
        }
    }

    #[test]
    fn boundary_derivatives_fail() {
        let spec = antiprism();
        assert!(param_energy(&spec, &pv(&[1.0]), Potential::Riesz(1)).is_err());
        assert!(matches!(param_gradient(&spec, &pv(&[1.0]), Potential::Riesz(1)), Err(Error::DomainViolation { .. })));
    }
}
