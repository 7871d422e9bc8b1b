//! Coplanar families, embedded regular polygons and symmetry reports.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::{
    gram_matrix, gram_signature, histogram, normalize, write_histogram, GramSignature, Point3, PointSet,
};
use crate::numerics::BigReal;

/// Points of the set lying on a common plane `normal · x = offset`.
#[derive(Clone, Debug)]
pub struct PlaneFamily {
    /// Unit normal with `offset ≥ 0`; for planes through the origin the
    /// first significant component is positive.
    pub normal: Point3,
    pub offset: BigReal,
    /// Ascending point indices.
    pub members: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Polygon {
    pub k: usize,
    /// Ascending point indices.
    pub members: Vec<usize>,
    pub normal: Point3,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryReport {
    /// `[family size, count]` for coplanar families of at least 4 points.
    pub planes: Vec<[usize; 2]>,
    /// `[k, count]` for regular k-gons.
    pub polygons: Vec<[usize; 2]>,
    pub gram_groups: GramSignature,
}

impl fmt::Display for SymmetryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Planes   ")?;
        write_histogram(f, &self.planes)?;
        write!(f, "\nGram     {}\nPolygons ", self.gram_groups)?;
        write_histogram(f, &self.polygons)
    }
}

/// Default tolerance: 10⁻¹², or 10^(−p/2) when that is coarser.
pub fn default_symmetry_tol(digits: u32) -> BigReal {
    BigReal::exp10(-((digits as i32) / 2).min(12), digits)
}

/// Flips `n` so that its first component exceeding `tol` in magnitude is positive.
fn canonical_direction(n: &Point3, tol: &BigReal) -> Point3 {
    for k in 0..3 {
        let c = n.coord(k);
        if &c.abs() > tol {
            return if c.signum() < 0 { n.scale(&BigReal::from_i64(-1, n.digits())) } else { n.clone() };
        }
    }
    n.clone()
}

fn plane_through(pts: &[Point3], i: usize, j: usize, k: usize, tol: &BigReal) -> Option<(Point3, BigReal)> {
    let raw = pts[j].sub(&pts[i]).cross(&pts[k].sub(&pts[i]));
    if &raw.norm() < tol {
        return None;
    }
    let mut n = normalize(&raw).ok()?;
    let mut offset = n.dot(&pts[i]);
    if &offset.abs() <= tol {
        n = canonical_direction(&n, tol);
        offset = n.dot(&pts[i]);
    } else if offset.signum() < 0 {
        n = n.scale(&BigReal::from_i64(-1, n.digits()));
        offset = -offset;
    }
    Some((n, offset))
}

/// Maximal coplanar families with at least `min_size` members.
fn families(set: &PointSet, tol: &BigReal, min_size: usize) -> Vec<PlaneFamily> {
    let pts = set.points();
    let n = pts.len();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut out: Vec<PlaneFamily> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if out.iter().any(|f| [i, j, k].iter().all(|m| f.members.binary_search(m).is_ok())) {
                    continue;
                }
                let Some((normal, offset)) = plane_through(pts, i, j, k, tol) else { continue };
                let members: Vec<usize> = (0..n).filter(|&m| &(normal.dot(&pts[m]) - &offset).abs() < tol).collect();
                if seen.insert(members.clone()) {
                    out.push(PlaneFamily { normal, offset, members });
                }
            }
        }
    }
    out.retain(|f| f.members.len() >= min_size);
    out
}

/// All maximal families of at least 4 points within `tol` of a common plane.
pub fn coplanar_families(set: &PointSet, tol: &BigReal) -> Vec<PlaneFamily> {
    families(set, tol, 4)
}

/// Regular k-gons (k ≥ 3) inside one coplanar family.
fn polygons_in(family: &PlaneFamily, pts: &[Point3], tol: &BigReal) -> Vec<Polygon> {
    let p = family.normal.digits();
    let center = family.normal.scale(&family.offset);
    let s = family.members.len();
    let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut out = Vec::new();
    let two_pi = BigReal::pi(p) * 2.0;
    for &a in &family.members {
        let radial = pts[a].sub(&center);
        let rho = radial.norm();
        if &rho < tol {
            continue;
        }
        let u = radial.scale(&rho.recip());
        let v = family.normal.cross(&u);
        for k in 3..=s {
            let mut members = vec![a];
            for m in 1..k {
                let phi = &two_pi * m as f64 / k as f64;
                let target = center.add(&u.scale(&(&rho * phi.cos()))).add(&v.scale(&(&rho * phi.sin())));
                match family.members.iter().find(|&&b| &pts[b].sub(&target).norm() < tol) {
                    Some(&b) => members.push(b),
                    None => break,
                }
            }
            if members.len() < k {
                continue;
            }
            members.sort_unstable();
            if found.insert(members.clone()) {
                out.push(Polygon { k, members, normal: family.normal.clone() });
            }
        }
    }
    out
}

/// Every regular polygon formed by points of the set.
pub fn regular_polygons(set: &PointSet, tol: &BigReal) -> Vec<Polygon> {
    let pts = set.points();
    let mut out: Vec<Polygon> = families(set, tol, 3).iter().flat_map(|f| polygons_in(f, pts, tol)).collect();
    out.sort_by(|a, b| (a.k, &a.members).cmp(&(b.k, &b.members)));
    out
}

pub fn symmetry_report(set: &PointSet, tol: &BigReal) -> SymmetryReport {
    SymmetryReport {
        planes: histogram(coplanar_families(set, tol).iter().map(|f| f.members.len())),
        polygons: histogram(regular_polygons(set, tol).iter().map(|p| p.k)),
        gram_groups: gram_signature(&gram_matrix(set), tol),
    }
}

fn lexicographic(a: &Point3, b: &Point3) -> std::cmp::Ordering {
    (0..3)
        .map(|k| a.coord(k).partial_cmp(b.coord(k)).expect("finite"))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Axis suggested by the polygon structure.
///
/// Polygons are grouped by `k` and parallel normal. The winner has the largest
/// `k`, then the most parallel copies, then the lexicographically smallest
/// canonical normal. Without polygons the normal of the largest coplanar
/// family is used.
pub fn suggest_axis(set: &PointSet, tol: &BigReal) -> Result<Point3> {
    let mut groups: Vec<(usize, Point3, usize)> = Vec::new();
    for poly in regular_polygons(set, tol) {
        let n = canonical_direction(&poly.normal, tol);
        match groups.iter_mut().find(|(k, m, _)| *k == poly.k && &m.sub(&n).norm() < tol) {
            Some(g) => g.2 += 1,
            None => groups.push((poly.k, n, 1)),
        }
    }
    let best =
        groups.into_iter().min_by(|a, b| b.0.cmp(&a.0).then(b.2.cmp(&a.2)).then_with(|| lexicographic(&a.1, &b.1)));
    if let Some((_, n, _)) = best {
        return Ok(n);
    }
    coplanar_families(set, tol)
        .into_iter()
        .map(|f| (f.members.len(), canonical_direction(&f.normal, tol)))
        .min_by(|a, b| b.0.cmp(&a.0).then_with(|| lexicographic(&a.1, &b.1)))
        .map(|(_, n)| n)
        .ok_or(Error::NoStructure)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::geometry::random_point_set;
    use crate::numerics::Rng;

    const P: u32 = 40;

    fn tol() -> BigReal {
        default_symmetry_tol(P)
    }

    #[test]
    fn octahedron() {
        let oct = fixtures::octahedron(P);
        let fam = coplanar_families(&oct, &tol());
        assert_eq!(fam.len(), 3);
        assert!(fam.iter().all(|f| f.members.len() == 4 && f.offset.abs() < tol()));
        let rep = symmetry_report(&oct, &tol());
        assert_eq!(rep.polygons, vec![[3, 8], [4, 3]]);
        assert_eq!(rep.planes, vec![[4, 3]]);
        assert_eq!(rep.gram_groups.to_string(), "[[6, 2], [24, 1]]");
        let axis = suggest_axis(&oct, &tol()).unwrap();
        let coords = axis.to_f64();
        assert_eq!(coords.iter().filter(|c| (c.abs() - 1.0).abs() < 1e-12).count(), 1);
    }

    #[test]
    fn small_sets() {
        assert!(coplanar_families(&fixtures::tetrahedron(P), &tol()).is_empty());
        let tri = fixtures::triangle(P);
        assert!(coplanar_families(&tri, &tol()).is_empty());
        let rep = symmetry_report(&tri, &tol());
        assert_eq!(rep.gram_groups.groups, vec![[3, 1], [6, 1]]);
        assert_eq!(rep.polygons, vec![[3, 1]]);
        assert!(regular_polygons(&fixtures::antipodal(P), &tol()).is_empty());
        assert_eq!(symmetry_report(&fixtures::bipyramid(3, P), &tol()).polygons, vec![[3, 1]]);
    }

    #[test]
    fn icosahedron_pentagons() {
        let ico = fixtures::icosahedron(P);
        let rep = symmetry_report(&ico, &tol());
        // The 15 coplanar quadruples are golden rectangles, not squares.
        assert_eq!(rep.polygons, vec![[3, 40], [5, 12]]);
        assert_eq!(rep.planes, vec![[4, 15], [5, 12]]);
    }

    #[test]
    fn generic_cloud_has_no_structure() {
        let set = random_point_set(7, &mut Rng::new(11, 0), P);
        assert_eq!(suggest_axis(&set, &tol()).unwrap_err(), Error::NoStructure);
    }
}
