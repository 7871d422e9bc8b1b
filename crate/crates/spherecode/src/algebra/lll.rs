//! Integral LLL reduction with exact rational Gram–Schmidt data.

use rug::ops::DivRounding;
use rug::Integer;

use crate::error::{Error, Result};

/// Lovász parameter δ = 99/100 as a fraction.
const DELTA_NUM: i32 = 99;
const DELTA_DEN: i32 = 100;

fn dot(a: &[Integer], b: &[Integer]) -> Integer {
    a.iter().zip(b).map(|(x, y)| Integer::from(x * y)).sum()
}

struct State {
    b: Vec<Vec<Integer>>,
    /// `d[i + 1]` holds dᵢ; `d[0] = 1`.
    d: Vec<Integer>,
    lambda: Vec<Vec<Integer>>,
}

impl State {
    fn d(&self, i: isize) -> &Integer {
        &self.d[(i + 1) as usize]
    }

    /// Size-reduces `b_k` against `b_l`.
    fn red(&mut self, k: usize, l: usize) {
        let dl = self.d(l as isize).clone();
        let lam = self.lambda[k][l].clone();
        if Integer::from(&lam * 2u32).cmp_abs(&dl) != std::cmp::Ordering::Greater {
            return;
        }
        // Nearest integer to λ/d with ties rounded up.
        let q = Integer::from(&lam * 2u32 + &dl).div_floor(Integer::from(&dl * 2u32));
        let bl = self.b[l].clone();
        for (x, y) in self.b[k].iter_mut().zip(&bl) {
            *x -= Integer::from(&q * y);
        }
        self.lambda[k][l] -= Integer::from(&q * &dl);
        for i in 0..l {
            let t = Integer::from(&q * &self.lambda[l][i]);
            self.lambda[k][i] -= t;
        }
    }

    fn swap(&mut self, k: usize, k_max: usize) {
        self.b.swap(k, k - 1);
        for j in 0..k - 1 {
            let t = std::mem::take(&mut self.lambda[k][j]);
            self.lambda[k][j] = std::mem::replace(&mut self.lambda[k - 1][j], t);
        }
        let lam = self.lambda[k][k - 1].clone();
        let (dk2, dk1, dk) =
            (self.d(k as isize - 2).clone(), self.d(k as isize - 1).clone(), self.d(k as isize).clone());
        let big_b = (Integer::from(&dk2 * &dk) + Integer::from(&lam * &lam)).div_exact(&dk1);
        for i in k + 1..=k_max {
            let t = self.lambda[i][k].clone();
            let num = Integer::from(&dk * &self.lambda[i][k - 1]) - Integer::from(&lam * &t);
            self.lambda[i][k] = num.div_exact(&dk1);
            let num = Integer::from(&big_b * &t) + Integer::from(&lam * &self.lambda[i][k]);
            self.lambda[i][k - 1] = num.div_exact(&dk);
        }
        self.d[k] = big_b;
    }
}

/// LLL-reduces the rows of `basis` with δ = 0.99.
///
/// Fails with `DependentBasis` when the rows are linearly dependent.
pub fn lattice_reduce(basis: &[Vec<Integer>]) -> Result<Vec<Vec<Integer>>> {
    let n = basis.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let dim = basis[0].len();
    if basis.iter().any(|r| r.len() != dim) {
        return Err(Error::InvalidArgument("basis rows differ in length".into()));
    }
    let mut s = State { b: basis.to_vec(), d: vec![Integer::from(1); n + 1], lambda: vec![vec![Integer::new(); n]; n] };
    s.d[1] = dot(&s.b[0], &s.b[0]);
    if s.d[1] == 0 {
        return Err(Error::DependentBasis);
    }
    let mut k = 1;
    let mut k_max = 0;
    while k < n {
        if k > k_max {
            k_max = k;
            for j in 0..=k {
                let mut u = dot(&s.b[k], &s.b[j]);
                for i in 0..j {
                    let num = Integer::from(s.d(i as isize) * &u) - Integer::from(&s.lambda[k][i] * &s.lambda[j][i]);
                    u = num.div_exact(s.d(i as isize - 1));
                }
                if j < k {
                    s.lambda[k][j] = u;
                } else {
                    if u == 0 {
                        return Err(Error::DependentBasis);
                    }
                    s.d[k + 1] = u;
                }
            }
        }
        loop {
            s.red(k, k - 1);
            let lhs = Integer::from(s.d(k as isize) * s.d(k as isize - 2)) * DELTA_DEN;
            let rhs = Integer::from(s.d(k as isize - 1) * s.d(k as isize - 1)) * DELTA_NUM
                - Integer::from(&s.lambda[k][k - 1] * &s.lambda[k][k - 1]) * DELTA_DEN;
            if lhs < rhs {
                s.swap(k, k_max);
                k = (k - 1).max(1);
                continue;
            }
            for l in (0..k - 1).rev() {
                s.red(k, l);
            }
            k += 1;
            break;
        }
    }
    Ok(s.b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(rows: &[&[i64]]) -> Vec<Vec<Integer>> {
        rows.iter().map(|r| r.iter().map(|&v| Integer::from(v)).collect()).collect()
    }

    fn norm2(v: &[Integer]) -> Integer {
        dot(v, v)
    }

    #[test]
    fn identity_is_unchanged() {
        let id = ints(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(lattice_reduce(&id).unwrap(), id);
    }

    #[test]
    fn two_dimensional_shortest_vector() {
        let out = lattice_reduce(&ints(&[&[1, 0], &[4, 1]])).unwrap();
        assert!(norm2(&out[0]) <= 1);
        let out = lattice_reduce(&ints(&[&[201, 37], &[1648, 297]])).unwrap();
        // Exhaustive search over small coefficient pairs for the shortest vector.
        let mut best = Integer::from(u64::MAX);
        for a in -60i64..=60 {
            for b in -60i64..=60 {
                if a == 0 && b == 0 {
                    continue;
                }
                let v = [Integer::from(201 * a + 1648 * b), Integer::from(37 * a + 297 * b)];
                best = best.min(norm2(&v));
            }
        }
        assert!(norm2(&out[0]) <= Integer::from(&best * 2u32));
    }

    #[test]
    fn dependent_rows_are_rejected() {
        assert_eq!(lattice_reduce(&ints(&[&[1, 2], &[2, 4]])).unwrap_err(), Error::DependentBasis);
        assert_eq!(lattice_reduce(&ints(&[&[0, 0], &[1, 0]])).unwrap_err(), Error::DependentBasis);
    }

    #[test]
    fn preserves_lattice_determinant() {
        let basis = ints(&[&[3, 1, 4], &[1, 5, 9], &[2, 6, 5]]);
        let out = lattice_reduce(&basis).unwrap();
        let det = |m: &Vec<Vec<Integer>>| {
            let g: Vec<Vec<Integer>> = m.iter().map(|a| m.iter().map(|b| dot(a, b)).collect()).collect();
            Integer::from(&g[0][0] * &g[1][1]) * &g[2][2]
                + Integer::from(&g[0][1] * &g[1][2]) * &g[2][0]
                + Integer::from(&g[0][2] * &g[1][0]) * &g[2][1]
                - Integer::from(&g[0][2] * &g[1][1]) * &g[2][0]
                - Integer::from(&g[0][0] * &g[1][2]) * &g[2][1]
                - Integer::from(&g[0][1] * &g[1][0]) * &g[2][2]
        };
        assert_eq!(det(&basis), det(&out));
    }
}
