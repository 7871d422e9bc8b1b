//! Dense linear algebra on [`BigReal`] matrices.

#![allow(clippy::needless_range_loop)]
use crate::error::{Error, Result};
use crate::numerics::BigReal;

/// Row-major dense matrix.
pub type Matrix = Vec<Vec<BigReal>>;

pub fn zeros(rows: usize, cols: usize, digits: u32) -> Matrix {
    vec![vec![BigReal::zero(digits); cols]; rows]
}

fn max_abs(m: &Matrix) -> BigReal {
    let p = m.first().and_then(|r| r.first()).map_or(crate::numerics::MIN_DIGITS, BigReal::digits);
    m.iter().flatten().fold(BigReal::zero(p), |acc, v| acc.max(&v.abs()))
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
///
/// Fails with `SingularJacobian` when the best available pivot falls below
/// `pivot_floor`.
pub fn solve(a: &Matrix, b: &[BigReal], pivot_floor: &BigReal) -> Result<Vec<BigReal>> {
    let n = b.len();
    assert!(a.len() == n && a.iter().all(|r| r.len() == n), "solve needs a square system");
    let mut m: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for col in 0..n {
        let (best, _) =
            (col..n).map(|r| (r, m[r][col].abs())).fold((col, None::<BigReal>), |(bi, bv), (r, v)| match bv {
                Some(ref cur) if *cur >= v => (bi, bv),
                _ => (r, Some(v)),
            });
        let pivot = m[best][col].abs();
        if &pivot < pivot_floor {
            return Err(Error::SingularJacobian { pivot: pivot.to_sci_string(6) });
        }
        m.swap(col, best);
        let inv = m[col][col].recip();
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] * &inv;
            for c in col..=n {
                let delta = &factor * &m[col][c];
                m[r][c] -= delta;
            }
        }
    }
    let mut x = vec![BigReal::zero(b.first().map_or(16, BigReal::digits)); n];
    for r in (0..n).rev() {
        let mut acc = m[r][n].clone();
        for c in r + 1..n {
            acc -= &m[r][c] * &x[c];
        }
        x[r] = acc / &m[r][r];
    }
    Ok(x)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn eigenvalues_sym(m: &Matrix, digits: u32) -> Result<Vec<BigReal>> {
    let n = m.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut a: Matrix = m.iter().map(|r| r.iter().map(|v| v.with_precision(digits)).collect()).collect();
    let scale = BigReal::one(digits).max(&max_abs(&a));
    let sym_tol = BigReal::exp10(5 - digits as i32, digits) * &scale;
    for i in 0..n {
        for j in i + 1..n {
            let d = (&a[i][j] - &a[j][i]).abs();
            if d > sym_tol {
                return Err(Error::NonSymmetric { asymmetry: d.to_sci_string(6) });
            }
            let avg = (&a[i][j] + &a[j][i]) / 2.0;
            a[i][j] = avg.clone();
            a[j][i] = avg;
        }
    }
    let frob = a.iter().flatten().fold(BigReal::zero(digits), |acc, v| acc + v.square()).sqrt()?;
    let stop = BigReal::exp10(10 - digits as i32, digits) * BigReal::one(digits).max(&frob);
    let stop2 = stop.square();
    for _sweep in 0..100 {
        let mut off = BigReal::zero(digits);
        for i in 0..n {
            for j in i + 1..n {
                off += a[i][j].square() * 2.0;
            }
        }
        if off < stop2 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].is_zero() {
                    continue;
                }
                rotate(&mut a, p, q);
            }
        }
    }
    let mut ev: Vec<BigReal> = (0..n).map(|i| a[i][i].clone()).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    Ok(ev)
}

fn rotate(a: &mut Matrix, p: usize, q: usize) {
    let apq = a[p][q].clone();
    let theta = (&a[q][q] - &a[p][p]) / (&apq * 2.0);
    let root = (theta.square() + 1.0).sqrt().expect("positive");
    let t = if theta.signum() >= 0 { (&theta + &root).recip() } else { -(&root - &theta).recip() };
    let c = (t.square() + 1.0).sqrt().expect("positive").recip();
    let s = &t * &c;
    let tau = &s / (&c + 1.0);
    let delta = &t * &apq;
    a[p][p] -= &delta;
    a[q][q] += &delta;
    let zero = BigReal::zero(apq.digits());
    a[p][q] = zero.clone();
    a[q][p] = zero;
    for r in 0..a.len() {
        if r == p || r == q {
            continue;
        }
        let g = a[r][p].clone();
        let h = a[r][q].clone();
        let np = &g - &s * (&h + &g * &tau);
        let nq = &h + &s * (&g - &h * &tau);
        a[r][p] = np.clone();
        a[p][r] = np;
        a[r][q] = nq.clone();
        a[q][r] = nq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Rng;

    const P: u32 = 40;

    fn mat(rows: &[&[f64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&v| BigReal::from_f64(v, P)).collect()).collect()
    }

    #[test]
    fn solve_small_system() {
        let a = mat(&[&[0.0, 2.0, 1.0], &[1.0, 1.0, 0.0], &[3.0, 0.0, 1.0]]);
        let b: Vec<BigReal> = [5.0, 3.0, 4.0].iter().map(|&v| BigReal::from_f64(v, P)).collect();
        let x = solve(&a, &b, &BigReal::exp10(-20, P)).unwrap();
        for (xi, want) in x.iter().zip([1.0, 2.0, 1.0]) {
            assert!((xi - want).abs() < BigReal::exp10(-37, P));
        }
    }

    #[test]
    fn singular_system_is_reported() {
        let a = mat(&[&[1.0, 2.0], &[2.0, 4.0]]);
        let b = vec![BigReal::one(P), BigReal::one(P)];
        assert!(matches!(solve(&a, &b, &BigReal::exp10(-20, P)), Err(Error::SingularJacobian { .. })));
    }

    #[test]
    fn jacobi_examples() {
        let d = eigenvalues_sym(&mat(&[&[3.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 2.0]]), P).unwrap();
        assert_eq!(d, vec![BigReal::one(P), BigReal::from_i64(2, P), BigReal::from_i64(3, P)]);
        let s = eigenvalues_sym(&mat(&[&[0.0, 1.0], &[1.0, 0.0]]), P).unwrap();
        assert!((&s[0] + 1.0).abs() < BigReal::exp10(-38, P));
        assert!((&s[1] - 1.0).abs() < BigReal::exp10(-38, P));
        assert!(matches!(eigenvalues_sym(&mat(&[&[0.0, 1.0], &[0.5, 0.0]]), P), Err(Error::NonSymmetric { .. })));
    }

    #[test]
    fn jacobi_preserves_trace_and_frobenius() {
        let mut rng = Rng::new(3, 0);
        let n = 6;
        let mut m = zeros(n, n, P);
        for i in 0..n {
            for j in i..n {
                let v = rng.next_uniform(P);
                m[i][j] = v.clone();
                m[j][i] = v;
            }
        }
        let ev = eigenvalues_sym(&m, P).unwrap();
        let trace = (0..n).fold(BigReal::zero(P), |a, i| a + &m[i][i]);
        let frob = m.iter().flatten().fold(BigReal::zero(P), |a, v| a + v.square());
        let ev_sum = ev.iter().fold(BigReal::zero(P), |a, v| a + v);
        let ev_sq = ev.iter().fold(BigReal::zero(P), |a, v| a + v.square());
        assert!((trace - ev_sum).abs() < BigReal::exp10(8 - P as i32, P));
        assert!((frob - ev_sq).abs() < BigReal::exp10(8 - P as i32, P));
        assert!(ev.windows(2).all(|w| w[0] <= w[1]));
    }
}
