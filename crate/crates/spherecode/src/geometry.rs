//! Points on the unit sphere, Gram matrices and isometry fingerprints.

use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::{BigReal, Rng};

/// A vector in R³. Points of a [`PointSet`] lie on the unit sphere.
#[derive(Clone, Debug, PartialEq)]
pub struct Point3 {
    pub x: BigReal,
    pub y: BigReal,
    pub z: BigReal,
}

impl Point3 {
    pub fn new(x: BigReal, y: BigReal, z: BigReal) -> Self {
        Point3 { x, y, z }
    }

    pub fn from_f64(v: [f64; 3], digits: u32) -> Self {
        Point3::new(BigReal::from_f64(v[0], digits), BigReal::from_f64(v[1], digits), BigReal::from_f64(v[2], digits))
    }

    pub fn zero(digits: u32) -> Self {
        Point3::new(BigReal::zero(digits), BigReal::zero(digits), BigReal::zero(digits))
    }

    /// Unit vector along coordinate axis `k` (0, 1 or 2).
    pub fn axis(k: usize, digits: u32) -> Self {
        let mut p = Point3::zero(digits);
        *p.coord_mut(k) = BigReal::one(digits);
        p
    }

    pub fn digits(&self) -> u32 {
        self.x.digits().min(self.y.digits()).min(self.z.digits())
    }

    pub fn coord(&self, k: usize) -> &BigReal {
        match k {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("coordinate index {k} out of range"),
        }
    }

    pub fn coord_mut(&mut self, k: usize) -> &mut BigReal {
        match k {
            0 => &mut self.x,
            1 => &mut self.y,
            2 => &mut self.z,
            _ => panic!("coordinate index {k} out of range"),
        }
    }

    pub fn to_f64(&self) -> [f64; 3] {
        [self.x.to_f64(), self.y.to_f64(), self.z.to_f64()]
    }

    pub fn with_precision(&self, digits: u32) -> Self {
        Point3::new(self.x.with_precision(digits), self.y.with_precision(digits), self.z.with_precision(digits))
    }

    pub fn dot(&self, o: &Point3) -> BigReal {
        &self.x * &o.x + &self.y * &o.y + &self.z * &o.z
    }

    pub fn cross(&self, o: &Point3) -> Point3 {
        Point3::new(&self.y * &o.z - &self.z * &o.y, &self.z * &o.x - &self.x * &o.z, &self.x * &o.y - &self.y * &o.x)
    }

    pub fn add(&self, o: &Point3) -> Point3 {
        Point3::new(&self.x + &o.x, &self.y + &o.y, &self.z + &o.z)
    }

    pub fn sub(&self, o: &Point3) -> Point3 {
        Point3::new(&self.x - &o.x, &self.y - &o.y, &self.z - &o.z)
    }

    pub fn scale(&self, s: &BigReal) -> Point3 {
        Point3::new(&self.x * s, &self.y * s, &self.z * s)
    }

    /// `self + s * o`
    pub fn add_scaled(&self, s: &BigReal, o: &Point3) -> Point3 {
        Point3::new(&self.x + s * &o.x, &self.y + s * &o.y, &self.z + s * &o.z)
    }

    pub fn norm2(&self) -> BigReal {
        self.dot(self)
    }

    pub fn norm(&self) -> BigReal {
        self.norm2().sqrt().expect("squared norm is non-negative")
    }
}

/// Scales `v` onto the unit sphere.
pub fn normalize(v: &Point3) -> Result<Point3> {
    let p = v.digits();
    let n = v.norm();
    if n <= BigReal::exp10(-(p as i32) / 2, p) {
        return Err(Error::ZeroVector);
    }
    let inv = n.recip();
    Ok(v.scale(&inv))
}

/// An ordered configuration of points on the unit sphere.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    points: Vec<Point3>,
}

impl PointSet {
    /// Checks the on-sphere and distinct-points invariants.
    pub fn new(points: Vec<Point3>) -> Result<Self> {
        let set = PointSet { points };
        set.validate()?;
        Ok(set)
    }

    /// Builds a set without checking invariants. Callers guarantee them.
    pub fn new_unchecked(points: Vec<Point3>) -> Self {
        PointSet { points }
    }

    /// Normalizes each raw vector, then validates.
    pub fn from_f64(coords: &[[f64; 3]], digits: u32) -> Result<Self> {
        let pts = coords.iter().map(|c| normalize(&Point3::from_f64(*c, digits))).collect::<Result<Vec<_>>>()?;
        PointSet::new(pts)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::InvalidArgument("a point set needs at least one point".into()));
        }
        let p = self.digits();
        let on_tol = BigReal::exp10(2 - p as i32, p);
        for (i, q) in self.points.iter().enumerate() {
            let dev = q.norm2() - 1.0;
            if dev.abs() >= on_tol {
                return Err(Error::OffSphere { index: i, deviation: dev.to_sci_string(6) });
            }
        }
        if let Some((i, j)) = self.coincident_pair() {
            return Err(Error::CoincidentPoints { i, j });
        }
        Ok(())
    }

    /// First pair closer than 10^(-p/2), if any.
    pub fn coincident_pair(&self) -> Option<(usize, usize)> {
        let p = self.digits();
        let tol2 = BigReal::exp10(-(p as i32), p);
        for i in 0..self.points.len() {
            for j in i + 1..self.points.len() {
                if self.points[i].sub(&self.points[j]).norm2() < tol2 {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point3> {
        self.points
    }

    pub fn digits(&self) -> u32 {
        self.points.iter().map(Point3::digits).min().unwrap_or(crate::numerics::MIN_DIGITS)
    }

    pub fn with_precision(&self, digits: u32) -> Self {
        PointSet { points: self.points.iter().map(|p| p.with_precision(digits)).collect() }
    }

    pub fn to_f64(&self) -> Vec<[f64; 3]> {
        self.points.iter().map(Point3::to_f64).collect()
    }

    /// Applies the 3x3 matrix `m` (row-major) to every point.
    pub fn transform(&self, m: &[[BigReal; 3]; 3]) -> PointSet {
        let pts = self
            .points
            .iter()
            .map(|v| {
                let row = |r: &[BigReal; 3]| &r[0] * &v.x + &r[1] * &v.y + &r[2] * &v.z;
                Point3::new(row(&m[0]), row(&m[1]), row(&m[2]))
            })
            .collect();
        PointSet { points: pts }
    }

    /// Reorders points so that output index k holds input point `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> PointSet {
        PointSet { points: perm.iter().map(|&k| self.points[k].clone()).collect() }
    }
}

pub fn pair_distance(p: &Point3, q: &Point3) -> BigReal {
    p.sub(q).norm()
}

/// Dense symmetric matrix of pairwise dot products.
#[derive(Clone, Debug, PartialEq)]
pub struct GramMatrix {
    n: usize,
    entries: Vec<BigReal>,
}

impl GramMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigReal {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[BigReal] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[BigReal] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }
}

pub fn gram_matrix(set: &PointSet) -> GramMatrix {
    let n = set.len();
    let pts = set.points();
    let mut entries = vec![BigReal::zero(set.digits()); n * n];
    for i in 0..n {
        for j in i..n {
            let d = pts[i].dot(&pts[j]);
            entries[j * n + i] = d.clone();
            entries[i * n + j] = d;
        }
    }
    GramMatrix { n, entries }
}

/// Histogram of equal-value classes among the n² Gram entries, as
/// `[class_size, multiplicity]` pairs sorted by class size.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GramSignature {
    pub groups: Vec<[usize; 2]>,
}

impl GramSignature {
    pub fn total(&self) -> usize {
        self.groups.iter().map(|g| g[0] * g[1]).sum()
    }
}

impl fmt::Display for GramSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_histogram(f, &self.groups)
    }
}

pub(crate) fn write_histogram(f: &mut fmt::Formatter<'_>, groups: &[[usize; 2]]) -> fmt::Result {
    write!(f, "[")?;
    for (k, g) in groups.iter().enumerate() {
        if k > 0 {
            write!(f, ", ")?;
        }
        write!(f, "[{}, {}]", g[0], g[1])?;
    }
    write!(f, "]")
}

/// Turns a list of class sizes into a sorted `[size, count]` histogram.
pub(crate) fn histogram(sizes: impl IntoIterator<Item = usize>) -> Vec<[usize; 2]> {
    let mut sizes: Vec<usize> = sizes.into_iter().collect();
    sizes.sort_unstable();
    let mut out: Vec<[usize; 2]> = Vec::new();
    for s in sizes {
        match out.last_mut() {
            Some(last) if last[0] == s => last[1] += 1,
            _ => out.push([s, 1]),
        }
    }
    out
}

/// Sizes of the runs of sorted values whose consecutive gaps stay within `tol`.
fn cluster_sizes(sorted: &[BigReal], tol: &BigReal) -> Vec<usize> {
    let mut sizes = Vec::new();
    let mut run = 0usize;
    for (k, v) in sorted.iter().enumerate() {
        if k > 0 && &(v - &sorted[k - 1]) > tol {
            sizes.push(run);
            run = 0;
        }
        run += 1;
    }
    if run > 0 {
        sizes.push(run);
    }
    sizes
}

fn sorted_values(values: &[BigReal]) -> Vec<BigReal> {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite Gram entries"));
    v
}

pub fn gram_signature(g: &GramMatrix, tol: &BigReal) -> GramSignature {
    let sorted = sorted_values(g.entries());
    GramSignature { groups: histogram(cluster_sizes(&sorted, tol)) }
}

/// Default clustering tolerance 10^(-p/2).
pub fn default_tolerance(digits: u32) -> BigReal {
    BigReal::exp10(-(digits as i32) / 2, digits)
}

/// Outcome of an isometry test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Isometry {
    /// Gram data agree. `confirmed` is set when an explicit point
    /// correspondence was found (always attempted for n ≤ 12).
    Match {
        confirmed: bool,
    },
    Mismatch,
}

impl Isometry {
    pub fn is_match(&self) -> bool {
        matches!(self, Isometry::Match { .. })
    }
}

/// Largest n for which an explicit correspondence is searched.
pub const EXHAUSTIVE_ISOMETRY_LIMIT: usize = 12;

fn close(a: &BigReal, b: &BigReal, tol: &BigReal) -> bool {
    &(a - b).abs() <= tol
}

pub fn isometric(p: &PointSet, q: &PointSet, tol: &BigReal) -> Result<Isometry> {
    if p.len() != q.len() {
        return Err(Error::SizeMismatch { left: p.len(), right: q.len() });
    }
    let n = p.len();
    let gp = gram_matrix(p);
    let gq = gram_matrix(q);

    let sp = sorted_values(gp.entries());
    let sq = sorted_values(gq.entries());
    if !sp.iter().zip(&sq).all(|(a, b)| close(a, b, tol)) {
        return Ok(Isometry::Mismatch);
    }

    let prof_p: Vec<Vec<BigReal>> = (0..n).map(|i| sorted_values(gp.row(i))).collect();
    let prof_q: Vec<Vec<BigReal>> = (0..n).map(|i| sorted_values(gq.row(i))).collect();
    let compatible: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| prof_p[i].iter().zip(&prof_q[j]).all(|(a, b)| close(a, b, tol))).collect())
        .collect();
    if !has_perfect_matching(&compatible) {
        return Ok(Isometry::Mismatch);
    }
    if n > EXHAUSTIVE_ISOMETRY_LIMIT {
        return Ok(Isometry::Match { confirmed: false });
    }
    let mut assign = vec![usize::MAX; n];
    let mut used = vec![false; n];
    if extend_correspondence(0, &gp, &gq, &compatible, tol, &mut assign, &mut used) {
        Ok(Isometry::Match { confirmed: true })
    } else {
        Ok(Isometry::Mismatch)
    }
}

fn has_perfect_matching(adj: &[Vec<bool>]) -> bool {
    let n = adj.len();
    let mut owner = vec![usize::MAX; n];
    fn augment(i: usize, adj: &[Vec<bool>], seen: &mut [bool], owner: &mut [usize]) -> bool {
        for j in 0..adj.len() {
            if adj[i][j] && !seen[j] {
                seen[j] = true;
                if owner[j] == usize::MAX || augment(owner[j], adj, seen, owner) {
                    owner[j] = i;
                    return true;
                }
            }
        }
        false
    }
    (0..n).all(|i| augment(i, adj, &mut vec![false; n], &mut owner))
}

fn extend_correspondence(
    i: usize,
    gp: &GramMatrix,
    gq: &GramMatrix,
    compatible: &[Vec<bool>],
    tol: &BigReal,
    assign: &mut [usize],
    used: &mut [bool],
) -> bool {
    let n = gp.n();
    if i == n {
        return true;
    }
    for j in 0..n {
        if used[j] || !compatible[i][j] {
            continue;
        }
        let consistent = (0..i).all(|k| close(gp.get(i, k), gq.get(j, assign[k]), tol));
        if !consistent {
            continue;
        }
        assign[i] = j;
        used[j] = true;
        if extend_correspondence(i + 1, gp, gq, compatible, tol, assign, used) {
            return true;
        }
        used[j] = false;
    }
    assign[i] = usize::MAX;
    false
}

/// Rotation matrix carrying the unit vector `normal` to (0, 0, 1).
pub fn rotation_to_axis(normal: &Point3) -> Result<[[BigReal; 3]; 3]> {
    let p = normal.digits();
    let n = normalize(normal)?;
    let one = BigReal::one(p);
    // A half-turn about x first keeps 1 + c away from zero.
    let flip = n.z.signum() < 0;
    let n = if flip { Point3::new(n.x.clone(), -&n.y, -&n.z) } else { n };
    let (ux, uy) = (n.y.clone(), -&n.x);
    let c = n.z.clone();
    let k = (&one + &c).recip();
    // R v = c v + u × v + u (u·v) / (1 + c) with u = (n_y, -n_x, 0).
    let mut m = [
        [&c + &ux * &ux * &k, &ux * &uy * &k, uy.clone()],
        [&ux * &uy * &k, &c + &uy * &uy * &k, -&ux],
        [-&uy, ux.clone(), c.clone()],
    ];
    if flip {
        for row in m.iter_mut() {
            row[1] = -&row[1];
            row[2] = -&row[2];
        }
    }
    Ok(m)
}

pub fn rotate_to_axis(set: &PointSet, normal: &Point3) -> Result<PointSet> {
    Ok(set.transform(&rotation_to_axis(normal)?))
}

/// Draws a point approximately uniformly on the sphere.
pub fn random_point(rng: &mut Rng, digits: u32) -> Point3 {
    loop {
        let v = [rng.next_f64(), rng.next_f64(), rng.next_f64()];
        let r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        if !(1e-6..=1.0).contains(&r2) {
            continue;
        }
        if let Ok(p) = normalize(&Point3::from_f64(v, digits)) {
            return p;
        }
    }
}

pub fn random_point_set(n: usize, rng: &mut Rng, digits: u32) -> PointSet {
    loop {
        let pts = (0..n).map(|_| random_point(rng, digits)).collect();
        let set = PointSet::new_unchecked(pts);
        if set.coincident_pair().is_none() {
            return set;
        }
    }
}
