//! Integer polynomials and minimal-polynomial recovery.

use std::fmt;

use rug::Integer;

use super::lll::lattice_reduce;
use crate::error::{Error, Result};
use crate::numerics::BigReal;

/// Guard digits withheld from the lattice scaling.
pub const LATTICE_GUARD_DIGITS: u32 = 10;
/// Minimum precision accepted by [`minimal_polynomial`].
pub const MIN_RECOVERY_DIGITS: u32 = 30;
/// Largest degree searched.
pub const MAX_RECOVERY_DEGREE: usize = 48;

/// Primitive integer polynomial with positive leading coefficient, stored in
/// ascending degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<Integer>,
}

impl IntPolynomial {
    /// Canonicalizes `coeffs`: trailing zeros dropped, content divided out,
    /// leading coefficient made positive.
    pub fn new(coeffs: Vec<Integer>) -> Result<IntPolynomial> {
        let mut coeffs = coeffs;
        while coeffs.last().is_some_and(|c| *c == 0) {
            coeffs.pop();
        }
        let Some(lead) = coeffs.last() else {
            return Err(Error::InvalidArgument("zero polynomial".into()));
        };
        let sign = if *lead < 0 { -1 } else { 1 };
        let content = coeffs.iter().fold(Integer::new(), |g, c| g.gcd(c));
        let coeffs = coeffs.into_iter().map(|c| c.div_exact(&content) * sign).collect();
        Ok(IntPolynomial { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<IntPolynomial> {
        IntPolynomial::new(coeffs.iter().map(|&c| Integer::from(c)).collect())
    }

    /// Ascending coefficients.
    pub fn coeffs(&self) -> &[Integer] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Largest coefficient magnitude.
    pub fn height(&self) -> Integer {
        self.coeffs.iter().map(|c| c.clone().abs()).max().expect("non-empty")
    }

    /// Horner evaluation at the precision of `x`.
    pub fn eval(&self, x: &BigReal) -> BigReal {
        let p = x.digits();
        self.coeffs.iter().rev().fold(BigReal::zero(p), |acc, c| acc * x + BigReal::from_integer(c, p))
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if *c == 0 {
                continue;
            }
            let mag = c.clone().abs();
            match (first, *c < 0) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            first = false;
            if mag != 1 || k == 0 {
                write!(f, "{mag}")?;
            }
            match k {
                0 => {}
                1 => f.write_str("x")?,
                _ => write!(f, "x^{k}")?,
            }
        }
        Ok(())
    }
}

/// `|poly(x)|` at the precision of `x`.
pub fn verify_root(poly: &IntPolynomial, x: &BigReal) -> BigReal {
    poly.eval(x).abs()
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecoveryResult {
    pub poly: IntPolynomial,
    pub degree: usize,
    pub height: Integer,
    pub residual: BigReal,
    pub accepted: bool,
}

/// Scale that keeps residuals comparable across degrees: `max(1, |x|)^d`.
fn magnitude(x: &BigReal, d: usize) -> BigReal {
    BigReal::one(x.digits()).max(&x.abs()).powi(d as i32)
}

/// Acceptance bound on `|poly(x)|` for a candidate of degree `d` and height `h`.
fn threshold(x: &BigReal, d: usize, height: &Integer) -> BigReal {
    let p = x.digits();
    let exponent = -(p as i32 - LATTICE_GUARD_DIGITS as i32 / 2);
    magnitude(x, d) * BigReal::from_integer(height, p) * (d + 1) as f64 * BigReal::exp10(exponent, p)
}

/// Shortest relation among the given powers of `x`, as a polynomial.
fn candidate(x: &BigReal, powers: &[usize]) -> Result<IntPolynomial> {
    let p = x.digits();
    let d = *powers.last().expect("at least one power");
    let scale = BigReal::exp10((p - LATTICE_GUARD_DIGITS) as i32, p) / magnitude(x, d);
    let m = powers.len();
    let basis: Vec<Vec<Integer>> = powers
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            let mut row = vec![Integer::new(); m + 1];
            row[i] = Integer::from(1);
            row[m] = (x.powi(e as i32) * &scale).round_to_integer();
            row
        })
        .collect();
    let reduced = lattice_reduce(&basis)?;
    let mut coeffs = vec![Integer::new(); d + 1];
    for (i, &e) in powers.iter().enumerate() {
        coeffs[e] = reduced[0][i].clone();
    }
    IntPolynomial::new(coeffs)
}

/// Searches degrees `1..=max_degree` (even degrees in even powers only when
/// `even_only`) for an integer polynomial vanishing at `x`.
///
/// The first candidate whose residual and height both pass the acceptance
/// bounds is returned with `accepted` set; otherwise the candidate closest
/// to acceptance is returned unaccepted.
pub fn minimal_polynomial(x: &BigReal, max_degree: usize, even_only: bool) -> Result<RecoveryResult> {
    let p = x.digits();
    if p < MIN_RECOVERY_DIGITS {
        return Err(Error::InsufficientPrecision { digits: p, required: MIN_RECOVERY_DIGITS });
    }
    if max_degree == 0 || max_degree > MAX_RECOVERY_DEGREE {
        return Err(Error::InvalidArgument(format!("max degree must be in 1..={MAX_RECOVERY_DEGREE}")));
    }
    let height_cap = BigReal::exp10(p as i32 / 4, p);
    let mut best: Option<(BigReal, RecoveryResult)> = None;
    let degrees: Vec<usize> =
        if even_only { (2..=max_degree).step_by(2).collect() } else { (1..=max_degree).collect() };
    for d in degrees {
        let powers: Vec<usize> = if even_only { (0..=d).step_by(2).collect() } else { (0..=d).collect() };
        let poly = match candidate(x, &powers) {
            Ok(poly) => poly,
            Err(Error::InvalidArgument(_)) => continue,
            Err(e) => return Err(e),
        };
        let residual = verify_root(&poly, x);
        let height = poly.height();
        let bound = threshold(x, poly.degree(), &height);
        let accepted = residual < bound && BigReal::from_integer(&height, p) < height_cap;
        let result = RecoveryResult { degree: poly.degree(), height, residual: residual.clone(), accepted, poly };
        if accepted {
            return Ok(result);
        }
        let ratio = residual / bound;
        if best.as_ref().is_none_or(|(r, _)| ratio < *r) {
            best = Some((ratio, result));
        }
    }
    best.map(|(_, r)| r).ok_or_else(|| Error::InvalidArgument("no degree to search".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form() {
        let p = IntPolynomial::from_i64(&[4, 0, -2, 0]).unwrap();
        assert_eq!(p.coeffs(), IntPolynomial::from_i64(&[-2, 0, 1]).unwrap().coeffs());
        assert_eq!(p.to_string(), "x^2 - 2");
        assert_eq!(IntPolynomial::from_i64(&[-9, 0, 26, 0, 7]).unwrap().to_string(), "7x^4 + 26x^2 - 9");
        assert!(IntPolynomial::from_i64(&[0, 0]).is_err());
    }

    #[test]
    fn root_residuals() {
        let p = IntPolynomial::from_i64(&[-2, 0, 1]).unwrap();
        let r2 = BigReal::from_i64(2, 40).sqrt().unwrap();
        assert!(verify_root(&p, &r2) < BigReal::exp10(-38, 40));
        assert_eq!(verify_root(&p, &BigReal::from_f64(1.5, 40)), 0.25);
    }

    #[test]
    fn square_root_of_two() {
        let x = BigReal::from_i64(2, 40).sqrt().unwrap();
        let r = minimal_polynomial(&x, 4, false).unwrap();
        assert!(r.accepted);
        assert_eq!(r.poly, IntPolynomial::from_i64(&[-2, 0, 1]).unwrap());
        let neg = minimal_polynomial(&-x, 4, false).unwrap();
        assert_eq!(neg.poly, IntPolynomial::from_i64(&[-2, 0, 1]).unwrap());
    }

    #[test]
    fn rationals_and_limits() {
        let r = minimal_polynomial(&BigReal::from_ratio(5, 7, 40), 3, false).unwrap();
        assert!(r.accepted);
        assert_eq!(r.poly, IntPolynomial::from_i64(&[-5, 7]).unwrap());
        assert!(matches!(
            minimal_polynomial(&BigReal::from_f64(0.5, 20), 2, false),
            Err(Error::InsufficientPrecision { .. })
        ));
    }

    #[test]
    fn transcendental_is_not_accepted() {
        let pi = BigReal::pi(40);
        assert!(!minimal_polynomial(&pi, 6, false).unwrap().accepted);
    }
}
