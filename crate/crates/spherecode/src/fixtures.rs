//! Classical configurations with closed-form coordinates.

use crate::geometry::{Point3, PointSet};
use crate::numerics::BigReal;

fn set(points: Vec<Point3>) -> PointSet {
    PointSet::new(points).expect("fixture coordinates are valid")
}

fn unit(v: [BigReal; 3]) -> Point3 {
    let [x, y, z] = v;
    crate::geometry::normalize(&Point3::new(x, y, z)).expect("non-zero fixture vector")
}

fn pole(sign: i64, p: u32) -> Point3 {
    Point3::new(BigReal::zero(p), BigReal::zero(p), BigReal::from_i64(sign, p))
}

/// `k` points at height `z`, the first at angle `2π·offset/k`.
fn ring(k: usize, z: &BigReal, offset: f64, p: u32) -> Vec<Point3> {
    let r = (BigReal::one(p) - z.square()).sqrt().expect("|z| <= 1");
    let two_pi = BigReal::pi(p) * 2.0;
    (0..k)
        .map(|m| {
            let theta = &two_pi * (m as f64 + offset) / (k as f64);
            Point3::new(&r * theta.cos(), &r * theta.sin(), z.clone())
        })
        .collect()
}

pub fn antipodal(p: u32) -> PointSet {
    set(vec![pole(1, p), pole(-1, p)])
}

/// Equilateral triangle on the equator.
pub fn triangle(p: u32) -> PointSet {
    set(ring(3, &BigReal::zero(p), 0.0, p))
}

pub fn tetrahedron(p: u32) -> PointSet {
    let s = |a: i64, b: i64, c: i64| unit([BigReal::from_i64(a, p), BigReal::from_i64(b, p), BigReal::from_i64(c, p)]);
    set(vec![s(1, 1, 1), s(1, -1, -1), s(-1, 1, -1), s(-1, -1, 1)])
}

/// Poles plus an equatorial ring of `k`.
pub fn bipyramid(k: usize, p: u32) -> PointSet {
    let mut pts = vec![pole(1, p)];
    pts.extend(ring(k, &BigReal::zero(p), 0.0, p));
    pts.push(pole(-1, p));
    set(pts)
}

pub fn octahedron(p: u32) -> PointSet {
    let mut pts = Vec::new();
    for k in [2, 0, 1] {
        let mut a = Point3::zero(p);
        *a.coord_mut(k) = BigReal::one(p);
        let mut b = Point3::zero(p);
        *b.coord_mut(k) = BigReal::from_i64(-1, p);
        pts.push(a);
        pts.push(b);
    }
    set(pts)
}

pub fn cube(p: u32) -> PointSet {
    let mut pts = Vec::new();
    for sx in [1, -1] {
        for sy in [1, -1] {
            for sz in [1, -1] {
                pts.push(unit([BigReal::from_i64(sx, p), BigReal::from_i64(sy, p), BigReal::from_i64(sz, p)]));
            }
        }
    }
    set(pts)
}

/// Poles plus two staggered pentagons at z = ±1/√5.
pub fn icosahedron(p: u32) -> PointSet {
    let a = BigReal::from_i64(5, p).sqrt().expect("positive").recip();
    let mut pts = vec![pole(1, p)];
    pts.extend(ring(5, &a, 0.0, p));
    pts.extend(ring(5, &-&a, 0.5, p));
    pts.push(pole(-1, p));
    set(pts)
}

/// The 32-point code formed by the icosahedron and the dual dodecahedron.
pub fn icosadodeca32(p: u32) -> PointSet {
    let phi = (BigReal::one(p) + BigReal::from_i64(5, p).sqrt().expect("positive")) / 2.0;
    let zero = || BigReal::zero(p);
    let one = |s: i64| BigReal::from_i64(s, p);
    let mut raw: Vec<[BigReal; 3]> = Vec::new();
    for s1 in [1, -1] {
        for s2 in [1, -1] {
            let a = one(s1);
            let b = &phi * s2 as f64;
            raw.push([zero(), a.clone(), b.clone()]);
            raw.push([a.clone(), b.clone(), zero()]);
            raw.push([b, zero(), a]);
        }
    }
    let inv = phi.recip();
    for sx in [1, -1] {
        for sy in [1, -1] {
            for sz in [1, -1] {
                raw.push([one(sx), one(sy), one(sz)]);
            }
        }
    }
    for s1 in [1, -1] {
        for s2 in [1, -1] {
            let a = &inv * s1 as f64;
            let b = &phi * s2 as f64;
            raw.push([zero(), a.clone(), b.clone()]);
            raw.push([a.clone(), b.clone(), zero()]);
            raw.push([b, zero(), a]);
        }
    }
    set(raw.into_iter().map(unit).collect())
}
