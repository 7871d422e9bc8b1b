//! Property checks shared by the proptest suite and the acceptance target.
#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use spherecode::algebra::{lattice_reduce, minimal_polynomial, IntPolynomial};
use spherecode::geometry::{default_tolerance, gram_matrix, gram_signature, random_point_set};
use spherecode::io::{
    format_params, format_points, format_poly, format_spec, parse_params, parse_points, parse_poly, parse_spec,
    RunManifest,
};
use spherecode::optimize::{percolating_anneal, AnnealConfig};
use spherecode::paramconfig::{builtin_spec_with_digits, newton_refine_traced, param_energy, ParamVector};
use spherecode::potentials::{energy, forces};
use spherecode::symmetry::{default_symmetry_tol, symmetry_report};
use spherecode::{fixtures, BigReal, Integer, Point3, PointSet, Potential, Rng};

pub type Check = std::result::Result<(), TestCaseError>;

pub const POTENTIALS: [Potential; 4] = [Potential::Log, Potential::Riesz(1), Potential::Riesz(2), Potential::Riesz(3)];

pub fn potential() -> impl Strategy<Value = Potential> {
    prop::sample::select(POTENTIALS.to_vec())
}

/// Runs `check` over `cases` deterministic draws of `strategy`.
pub fn run_cases<S: Strategy>(cases: u32, strategy: S, check: impl Fn(S::Value) -> Check) -> Result<(), String> {
    let mut runner = TestRunner::new_with_rng(
        Config { cases, failure_persistence: None, ..Config::default() },
        proptest::test_runner::TestRng::deterministic_rng(proptest::test_runner::RngAlgorithm::ChaCha),
    );
    runner.run(&strategy, check).map_err(|e| e.to_string())
}

pub fn random_set(n: usize, seed: u64, digits: u32) -> PointSet {
    random_point_set(n, &mut Rng::new(seed, 0), digits)
}

/// Rotation by Euler angles `(a, b, c)` about z, y, z.
pub fn rotation(a: f64, b: f64, c: f64, digits: u32) -> [[BigReal; 3]; 3] {
    let rz = |t: f64| {
        let t = BigReal::from_f64(t, digits);
        let (c, s) = (t.cos(), t.sin());
        let (z, o) = (BigReal::zero(digits), BigReal::one(digits));
        [[c.clone(), -s.clone(), z.clone()], [s, c, z.clone()], [z.clone(), z, o]]
    };
    let ry = |t: f64| {
        let t = BigReal::from_f64(t, digits);
        let (c, s) = (t.cos(), t.sin());
        let (z, o) = (BigReal::zero(digits), BigReal::one(digits));
        [[c.clone(), z.clone(), s.clone()], [z.clone(), o, z.clone()], [-s, z, c]]
    };
    mat_mul(&mat_mul(&rz(a), &ry(b)), &rz(c))
}

fn mat_mul(a: &[[BigReal; 3]; 3], b: &[[BigReal; 3]; 3]) -> [[BigReal; 3]; 3] {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| (0..3).fold(BigReal::zero(a[0][0].digits()), |acc, k| acc + &a[i][k] * &b[k][j]))
    })
}

pub fn z_flip(set: &PointSet) -> PointSet {
    let p = set.digits();
    let (o, z) = (BigReal::one(p), BigReal::zero(p));
    let m = [[o.clone(), z.clone(), z.clone()], [z.clone(), o.clone(), z.clone()], [z.clone(), z, -o]];
    set.transform(&m)
}

fn close(a: &BigReal, b: &BigReal, slack: i32) -> bool {
    let p = a.digits().min(b.digits());
    let scale = BigReal::one(p).max(&a.abs());
    (a - b).abs() <= BigReal::exp10(slack - p as i32, p) * scale
}

/// Ambient forces agree with central differences of the energy.
pub fn check_gradient(n: usize, seed: u64, pot: Potential, digits: u32) -> Check {
    let set = random_set(n, seed, digits);
    let f = forces(&set, pot).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let h = BigReal::exp10(-(digits as i32) / 3, digits);
    let tol = BigReal::exp10(-(digits as i32) / 3, digits);
    let mut scale = BigReal::zero(digits);
    for v in &f {
        scale = scale.max(&v.norm());
    }
    for i in 0..n {
        for k in 0..3 {
            let shifted = |sign: f64| {
                let mut pts = set.points().to_vec();
                *pts[i].coord_mut(k) += &h * sign;
                energy(&PointSet::new_unchecked(pts), pot).unwrap().value
            };
            let fd = (shifted(1.0) - shifted(-1.0)) / (&h * 2.0);
            let err = (fd + f[i].coord(k)).abs();
            prop_assert!(err <= &tol * &scale, "point {i} coord {k}: error {err} for {pot:?} at {digits} digits");
        }
    }
    Ok(())
}

/// Energy and Gram signature survive rotation and relabelling.
pub fn check_invariance(n: usize, seed: u64, pot: Potential, angles: (f64, f64, f64), perm: Vec<usize>) -> Check {
    let digits = 30;
    let set = random_set(n, seed, digits);
    let moved = set.transform(&rotation(angles.0, angles.1, angles.2, digits)).permuted(&perm);
    let e0 = energy(&set, pot).unwrap().value;
    let e1 = energy(&moved, pot).unwrap().value;
    prop_assert!(close(&e0, &e1, 4), "{e0} vs {e1}");
    let tol = default_tolerance(digits);
    let flipped = energy(&z_flip(&set), pot).unwrap().value;
    prop_assert!(close(&e0, &flipped, 4), "mirror {e0} vs {flipped}");
    prop_assert_eq!(gram_signature(&gram_matrix(&set), &tol), gram_signature(&gram_matrix(&moved), &tol));
    Ok(())
}

/// Symmetry histograms of a fixture survive rotation and relabelling.
pub fn check_symmetry_invariance(which: usize, angles: (f64, f64, f64), perm_seed: u64) -> Check {
    let digits = 40;
    let set = match which % 4 {
        0 => fixtures::octahedron(digits),
        1 => fixtures::cube(digits),
        2 => fixtures::icosahedron(digits),
        _ => fixtures::bipyramid(5, digits),
    };
    let mut perm: Vec<usize> = (0..set.len()).collect();
    let mut rng = Rng::new(perm_seed, 0);
    for i in (1..perm.len()).rev() {
        perm.swap(i, (rng.next_u64() % (i as u64 + 1)) as usize);
    }
    let moved = set.transform(&rotation(angles.0, angles.1, angles.2, digits)).permuted(&perm);
    let tol = default_symmetry_tol(digits);
    prop_assert_eq!(symmetry_report(&set, &tol), symmetry_report(&moved, &tol));
    Ok(())
}

/// A regular k-gon on a tilted circle is reported once.
pub fn check_ring_detection(k: usize, z: f64, phase: f64, angles: (f64, f64, f64)) -> Check {
    let digits = 40;
    let zr = BigReal::from_f64(z, digits);
    let r = (BigReal::one(digits) - zr.square()).sqrt().unwrap();
    let two_pi = BigReal::pi(digits) * 2.0;
    let pts: Vec<Point3> = (0..k)
        .map(|m| {
            let t = two_pi.clone() * (m as f64 + phase) / k as f64;
            Point3::new(&r * &t.cos(), &r * &t.sin(), zr.clone())
        })
        .collect();
    let set = PointSet::new(pts).unwrap().transform(&rotation(angles.0, angles.1, angles.2, digits));
    let report = symmetry_report(&set, &default_symmetry_tol(digits));
    let count = report.polygons.iter().find(|g| g[0] == k).map_or(0, |g| g[1]);
    prop_assert_eq!(count, 1, "k={} report {:?}", k, report.polygons);
    Ok(())
}

/// Annealing history never increases.
pub fn check_anneal_monotone(n: usize, seed: u64, pot: Potential) -> Check {
    let digits = 20;
    let start = random_set(n, seed, digits);
    let cfg = AnnealConfig {
        passes_per_round: 40,
        scale_init: BigReal::from_ratio(1, 5, digits),
        scale_ratio: BigReal::from_ratio(1, 2, digits),
        final_precision: BigReal::exp10(-4, digits),
        max_rounds: 6,
    };
    let report = percolating_anneal(&start, pot, &cfg, &mut Rng::new(seed, 1)).unwrap();
    for w in report.history.windows(2) {
        prop_assert!(w[1].1 <= w[0].1, "history rises: {:?}", report.history);
    }
    let e0 = energy(&start, pot).unwrap().value;
    prop_assert!(report.final_energy.value <= e0);
    Ok(())
}

/// Newton from a perturbed antiprism seed at least roughly doubles the
/// correct digits per step once it is in the quadratic regime.
pub fn check_newton_doubling(offset: f64) -> Check {
    let (spec, seed) = builtin_spec_with_digits(8, Potential::Log, 100).unwrap();
    let start = ParamVector::new(seed.names.clone(), vec![BigReal::from_f64(0.5646 + offset, 40)], 40).unwrap();
    let (out, trace) =
        newton_refine_traced(&spec, &start, Potential::Log, 80).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let moves: Vec<f64> = trace.iter().filter(|s| !s.step.is_zero()).map(|s| -s.residual.log10_abs()).collect();
    for w in moves.windows(2) {
        if w[0] > 4.0 && w[1] < 70.0 {
            prop_assert!(w[1] >= 1.8 * w[0] - 2.0, "{:?}", moves);
        }
    }
    let x = &out.values[0];
    let x2 = x.square();
    let poly = (&x2 * 7.0 + 26.0) * &x2 - 9.0;
    prop_assert!(poly.abs() < BigReal::exp10(-70, 80), "residual {}", poly);
    Ok(())
}

/// Point, parameter, spec, polynomial and manifest files round-trip.
pub fn check_round_trips(n: usize, seed: u64, digits: u32, coeffs: Vec<i64>) -> Check {
    let set = random_set(n, seed, digits);
    let text = format_points(&set, digits, Some(Potential::Riesz(1)));
    let (back, header) = parse_points(&text, None, false).unwrap();
    prop_assert_eq!(header.n, Some(n));
    prop_assert_eq!(header.precision, Some(digits));
    let tol = BigReal::exp10(-(digits as i32), digits);
    for (a, b) in set.points().iter().zip(back.points()) {
        prop_assert!(a.sub(b).norm() < tol);
    }
    prop_assert_eq!(format_points(&back, digits, Some(Potential::Riesz(1))), text);

    let values: Vec<BigReal> = set.points().iter().map(|x| x.coord(2).clone()).collect();
    let names: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    let params = ParamVector::new(names, values, digits).unwrap();
    let ptext = format_params(&params);
    let pback = parse_params(&ptext, digits).unwrap();
    prop_assert_eq!(&pback.names, &params.names);
    for (a, b) in params.values.iter().zip(&pback.values) {
        prop_assert!((a - b).abs() < tol);
    }
    prop_assert_eq!(format_params(&pback), ptext);

    for &m in &spherecode::paramconfig::REGISTERED[..4] {
        let (spec, _) = builtin_spec_with_digits(m, Potential::Riesz(1), digits).unwrap();
        let stext = format_spec(&spec, digits);
        prop_assert_eq!(format_spec(&parse_spec(&stext, digits).unwrap(), digits), stext);
    }

    let poly = IntPolynomial::from_i64(&coeffs).unwrap();
    prop_assert_eq!(parse_poly(&format_poly(&poly)).unwrap(), poly);

    let manifest = RunManifest {
        command: "minimize".into(),
        args: vec!["--n".into(), n.to_string()],
        potential: Some("r1".into()),
        n: Some(n),
        precision: digits,
        seed: Some(seed),
        algorithms: vec!["optimizer=descent".into(), "rng=chacha8".into()],
        wall_time_secs: 0.25,
        energy: Some(energy(&set, Potential::Riesz(1)).unwrap().value.to_sci_string(digits)),
        input: None,
        output: Some("out.pts".into()),
    };
    prop_assert_eq!(RunManifest::parse(&manifest.to_text()).unwrap(), manifest);
    Ok(())
}

/// Rational and quadratic-surd inputs give canonical low-degree relations,
/// unchanged by raising the precision.
pub fn check_algdep(num: i64, den: i64, surd: bool) -> Check {
    let mut last = None;
    for digits in [60u32, 90] {
        let q = BigReal::from_ratio(num, den, digits);
        let x = if surd { q.sqrt().unwrap() } else { q };
        let res = minimal_polynomial(&x, 4, false).unwrap();
        prop_assert!(res.accepted, "{} not accepted at {} digits", res.poly, digits);
        let c = res.poly.coeffs();
        prop_assert!(c.last().unwrap() > &0);
        let g = c.iter().fold(Integer::new(), |acc, v| acc.gcd(v));
        prop_assert_eq!(g, Integer::from(1));
        prop_assert!(res.poly.eval(&x).abs() < BigReal::exp10(-(digits as i32) / 2, digits));
        if let Some(prev) = &last {
            prop_assert_eq!(prev, &res.poly);
        }
        last = Some(res.poly);
    }
    Ok(())
}

/// Reduced bases are size-reduced, satisfy the exchange condition and
/// span the same lattice.
pub fn check_lll(rows: Vec<Vec<i64>>) -> Check {
    let basis: Vec<Vec<Integer>> = rows.iter().map(|r| r.iter().map(|&v| Integer::from(v)).collect()).collect();
    let det0 = gram_det(&basis);
    if det0 == 0 {
        return Ok(());
    }
    let reduced = lattice_reduce(&basis).unwrap();
    prop_assert_eq!(gram_det(&reduced), det0);
    let (mu, b2) = gram_schmidt(&reduced);
    for i in 0..reduced.len() {
        for m in &mu[i][..i] {
            prop_assert!(m.abs() <= 0.5 + 1e-9);
        }
        if i > 0 {
            prop_assert!(b2[i] >= (0.99 - mu[i][i - 1].powi(2)) * b2[i - 1] - 1e-6 * b2[i - 1]);
        }
    }
    Ok(())
}

fn gram_det(b: &[Vec<Integer>]) -> Integer {
    let n = b.len();
    let mut g: Vec<Vec<Integer>> = (0..n)
        .map(|i| (0..n).map(|j| b[i].iter().zip(&b[j]).map(|(x, y)| Integer::from(x * y)).sum()).collect())
        .collect();
    // Fraction-free Bareiss elimination.
    let mut prev = Integer::from(1);
    let mut sign = 1;
    for k in 0..n {
        if g[k][k] == 0 {
            match (k + 1..n).find(|&r| g[r][k] != 0) {
                Some(r) => {
                    g.swap(k, r);
                    sign = -sign;
                }
                None => return Integer::new(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = Integer::from(&g[i][j] * &g[k][k]) - Integer::from(&g[i][k] * &g[k][j]);
                g[i][j] = v / &prev;
            }
        }
        prev = g[k][k].clone();
    }
    prev * sign
}

fn gram_schmidt(b: &[Vec<Integer>]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = b.len();
    let v: Vec<Vec<f64>> = b.iter().map(|r| r.iter().map(|x| x.to_f64()).collect()).collect();
    let dot = |a: &[f64], c: &[f64]| a.iter().zip(c).map(|(x, y)| x * y).sum::<f64>();
    let mut star: Vec<Vec<f64>> = Vec::new();
    let mut mu = vec![vec![0.0; n]; n];
    let mut b2 = vec![0.0; n];
    for i in 0..n {
        let mut s = v[i].clone();
        for j in 0..i {
            mu[i][j] = dot(&v[i], &star[j]) / b2[j];
            for (x, y) in s.iter_mut().zip(&star[j]) {
                *x -= mu[i][j] * y;
            }
        }
        b2[i] = dot(&s, &s);
        star.push(s);
    }
    (mu, b2)
}

/// Energy of the refined antiprism is unchanged by the precision of the
/// parameter vector beyond the shared digits.
pub fn check_param_energy_stable() -> Check {
    let (spec, seed) = builtin_spec_with_digits(8, Potential::Riesz(1), 60).unwrap();
    let e40 = param_energy(&spec, &seed.with_precision(40), Potential::Riesz(1)).unwrap();
    let e60 = param_energy(&spec, &seed, Potential::Riesz(1)).unwrap();
    prop_assert!(close(&e40, &e60.with_precision(40), 4));
    Ok(())
}
