//! Second-order forward-mode numbers over a small local variable list.

use crate::numerics::BigReal;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Order {
    Value,
    First,
    Second,
}

/// Value with gradient and Hessian over `m` local variables. Derivative
/// storage is empty beyond the tracked order.
#[derive(Clone, Debug)]
pub(crate) struct Jet {
    pub v: BigReal,
    pub g: Vec<BigReal>,
    /// Row-major m×m.
    pub h: Vec<BigReal>,
    order: Order,
}

impl Jet {
    pub fn constant(v: BigReal, m: usize, order: Order) -> Jet {
        let p = v.digits();
        let g = if order >= Order::First { vec![BigReal::zero(p); m] } else { Vec::new() };
        let h = if order == Order::Second { vec![BigReal::zero(p); m * m] } else { Vec::new() };
        Jet { v, g, h, order }
    }

    pub fn variable(v: BigReal, k: usize, m: usize, order: Order) -> Jet {
        let mut j = Jet::constant(v, m, order);
        if order >= Order::First {
            j.g[k] = BigReal::one(j.v.digits());
        }
        j
    }

    fn m(&self) -> usize {
        self.g.len()
    }

    fn map2(&self, o: &Jet, v: BigReal, f: impl Fn(&BigReal, &BigReal) -> BigReal) -> Jet {
        Jet {
            v,
            g: self.g.iter().zip(&o.g).map(|(a, b)| f(a, b)).collect(),
            h: self.h.iter().zip(&o.h).map(|(a, b)| f(a, b)).collect(),
            order: self.order,
        }
    }

    fn map1(&self, v: BigReal, f: impl Fn(&BigReal) -> BigReal) -> Jet {
        Jet { v, g: self.g.iter().map(&f).collect(), h: self.h.iter().map(&f).collect(), order: self.order }
    }

    pub fn add(&self, o: &Jet) -> Jet {
        self.map2(o, &self.v + &o.v, |a, b| a + b)
    }

    pub fn sub(&self, o: &Jet) -> Jet {
        self.map2(o, &self.v - &o.v, |a, b| a - b)
    }

    pub fn neg(&self) -> Jet {
        self.map1(-&self.v, |a| -a)
    }

    pub fn scale(&self, s: &BigReal) -> Jet {
        self.map1(&self.v * s, |a| a * s)
    }

    pub fn add_const(&self, c: &BigReal) -> Jet {
        self.map1(&self.v + c, |a| a.clone())
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let m = self.m();
        let g = (0..m).map(|i| &self.v * &o.g[i] + &o.v * &self.g[i]).collect();
        let mut h = Vec::with_capacity(self.h.len());
        if self.order == Order::Second {
            for i in 0..m {
                for j in 0..m {
                    let k = i * m + j;
                    h.push(&self.v * &o.h[k] + &o.v * &self.h[k] + &self.g[i] * &o.g[j] + &self.g[j] * &o.g[i]);
                }
            }
        }
        Jet { v: &self.v * &o.v, g, h, order: self.order }
    }

    pub fn square(&self) -> Jet {
        self.mul(self)
    }

    /// Applies a scalar function with value `f0` and derivatives `f1`, `f2`.
    pub fn chain(&self, f0: BigReal, f1: &BigReal, f2: &BigReal) -> Jet {
        let m = self.m();
        let g = self.g.iter().map(|a| a * f1).collect();
        let mut h = Vec::with_capacity(self.h.len());
        if self.order == Order::Second {
            for i in 0..m {
                for j in 0..m {
                    h.push(&self.h[i * m + j] * f1 + &self.g[i] * &self.g[j] * f2);
                }
            }
        }
        Jet { v: f0, g, h, order: self.order }
    }

    fn has_derivatives(&self) -> bool {
        self.g.iter().any(|d| !d.is_zero())
    }

    /// Square root; `None` when the radicand is zero but carries derivatives.
    pub fn sqrt(&self) -> Option<Jet> {
        let r = self.v.sqrt().ok()?;
        if r.is_zero() {
            return if self.has_derivatives() { None } else { Some(self.map1(r, |a| a.clone())) };
        }
        let f1 = (&r * 2.0).recip();
        let f2 = -(&f1 / &self.v) / 2.0;
        Some(self.chain(r, &f1, &f2))
    }

    pub fn sin(&self) -> Jet {
        let s = self.v.sin();
        let c = self.v.cos();
        let f2 = -&s;
        self.chain(s, &c, &f2)
    }

    pub fn cos(&self) -> Jet {
        let s = self.v.sin();
        let c = self.v.cos();
        let f1 = -&s;
        let f2 = -&c;
        self.chain(c, &f1, &f2)
    }

    /// Re-expresses the jet over `m_new` variables; local variable `k`
    /// becomes variable `map[k]`.
    pub fn embed(&self, map: &[usize], m_new: usize) -> Jet {
        let mut out = Jet::constant(self.v.clone(), m_new, self.order);
        if self.order >= Order::First {
            for (k, &t) in map.iter().enumerate() {
                out.g[t] = self.g[k].clone();
            }
        }
        if self.order == Order::Second {
            let m = self.m();
            for (a, &ta) in map.iter().enumerate() {
                for (b, &tb) in map.iter().enumerate() {
                    out.h[ta * m_new + tb] = self.h[a * m + b].clone();
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 40;

    fn close(a: &BigReal, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn product_and_chain_rules() {
        // f(x, y) = sin(x) * sqrt(y) at (0.3, 2)
        let x = Jet::variable(BigReal::from_f64(0.3, P), 0, 2, Order::Second);
        let y = Jet::variable(BigReal::from_i64(2, P), 1, 2, Order::Second);
        let f = x.sin().mul(&y.sqrt().unwrap());
        let (sx, cx, ry) = (0.3f64.sin(), 0.3f64.cos(), 2f64.sqrt());
        assert!(close(&f.v, sx * ry));
        assert!(close(&f.g[0], cx * ry));
        assert!(close(&f.g[1], sx / (2.0 * ry)));
        assert!(close(&f.h[0], -sx * ry));
        assert!(close(&f.h[1], cx / (2.0 * ry)));
        assert!(close(&f.h[2], cx / (2.0 * ry)));
        assert!(close(&f.h[3], -sx / (4.0 * 2.0 * ry)));
    }

    #[test]
    fn embedding_moves_derivatives() {
        let x = Jet::variable(BigReal::from_f64(1.5, P), 0, 1, Order::Second).square();
        let e = x.embed(&[2], 3);
        assert!(close(&e.g[2], 3.0));
        assert!(close(&e.h[8], 2.0));
        assert!(e.g[0].is_zero() && e.h[0].is_zero());
    }

    #[test]
    fn sqrt_at_zero() {
        let c = Jet::constant(BigReal::zero(P), 1, Order::Second);
        assert!(c.sqrt().unwrap().v.is_zero());
        let v = Jet::variable(BigReal::zero(P), 0, 1, Order::First);
        assert!(v.sqrt().is_none());
    }
}
