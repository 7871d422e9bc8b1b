//! Text formats for point sets, parameters, specs, polynomials and run
//! manifests.

use std::fmt::Write as _;
use std::path::Path;

use rug::Integer;

use crate::algebra::IntPolynomial;
use crate::error::{Error, Result};
use crate::geometry::{normalize, Point3, PointSet};
use crate::numerics::{BigReal, GUARD_DIGITS, MIN_DIGITS};
use crate::paramconfig::{ConfigSpec, Generator, ParamRef, ParamVector, Sign};
use crate::potentials::Potential;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Non-blank lines that are not comments, with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn number(token: &str, digits: u32, line: usize) -> Result<BigReal> {
    BigReal::parse(token, digits).map_err(|_| parse_err(line, format!("not a number: {token:?}")))
}

/// Shortest positional rendering that keeps `sig` significant digits.
fn compact(x: &BigReal, sig: u32) -> String {
    let s = x.to_plain_string(sig);
    if s.contains('.') && !s.contains('e') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Header fields of a point file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PointsHeader {
    pub n: Option<usize>,
    pub precision: Option<u32>,
    pub potential: Option<Potential>,
}

fn parse_header(line: &str, lineno: usize) -> Result<PointsHeader> {
    let mut h = PointsHeader::default();
    for field in line.trim_start_matches('#').split_whitespace() {
        let Some((key, value)) = field.split_once('=') else { continue };
        let bad = || parse_err(lineno, format!("bad header field {field:?}"));
        match key {
            "n" => h.n = Some(value.parse().map_err(|_| bad())?),
            "precision" => h.precision = Some(value.parse().map_err(|_| bad())?),
            "potential" => h.potential = Some(value.parse().map_err(|_| bad())?),
            _ => {}
        }
    }
    Ok(h)
}

/// Renders a point set with `digits` significant digits plus guard digits.
pub fn format_points(set: &PointSet, digits: u32, potential: Option<Potential>) -> String {
    let mut out = format!("# n={} precision={digits}", set.len());
    if let Some(pot) = potential {
        write!(out, " potential={pot}").expect("string write");
    }
    out.push('\n');
    let sig = digits + GUARD_DIGITS;
    for p in set.points() {
        writeln!(out, "{} {} {}", p.x.to_sci_string(sig), p.y.to_sci_string(sig), p.z.to_sci_string(sig))
            .expect("string write");
    }
    out
}

/// Parses a point file. Precision comes from the header unless `digits` is
/// given; points off the sphere by more than 10^(2−p) are rejected unless
/// `renormalize` is set.
pub fn parse_points(text: &str, digits: Option<u32>, renormalize: bool) -> Result<(PointSet, PointsHeader)> {
    let header = match text.lines().next() {
        Some(first) if first.trim_start().starts_with('#') => parse_header(first, 1)?,
        _ => PointsHeader::default(),
    };
    let p = digits.or(header.precision).unwrap_or(MIN_DIGITS).max(MIN_DIGITS);
    let mut pts = Vec::new();
    for (lineno, line) in content_lines(text) {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_err(lineno, format!("expected 3 coordinates, found {}", fields.len())));
        }
        let c = fields.iter().map(|f| number(f, p, lineno)).collect::<Result<Vec<_>>>()?;
        let [x, y, z]: [BigReal; 3] = c.try_into().expect("three fields");
        pts.push(Point3::new(x, y, z));
    }
    if let Some(n) = header.n {
        if n != pts.len() {
            return Err(parse_err(0, format!("header declares n={n} but {} points follow", pts.len())));
        }
    }
    let slack = BigReal::exp10(2 - p as i32, p);
    for (index, pt) in pts.iter_mut().enumerate() {
        let dev = pt.norm2() - 1.0;
        if dev.abs() > slack {
            if !renormalize {
                return Err(Error::OffSphere { index, deviation: dev.to_sci_string(6) });
            }
            *pt = normalize(pt)?;
        }
    }
    Ok((PointSet::new(pts)?, header))
}

pub fn read_points(path: &Path, digits: Option<u32>, renormalize: bool) -> Result<(PointSet, PointsHeader)> {
    parse_points(&read_text(path)?, digits, renormalize)
}

pub fn write_points(path: &Path, set: &PointSet, digits: u32, potential: Option<Potential>) -> Result<()> {
    write_text(path, &format_points(set, digits, potential))
}

/// `name value` lines at the vector's precision plus guard digits.
pub fn format_params(params: &ParamVector) -> String {
    let sig = params.digits() + GUARD_DIGITS;
    params.names.iter().zip(&params.values).map(|(n, v)| format!("{n} {}\n", v.to_plain_string(sig))).collect()
}

pub fn parse_params(text: &str, digits: u32) -> Result<ParamVector> {
    let mut names = Vec::new();
    let mut values = Vec::new();
    for (lineno, line) in content_lines(text) {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [name, value] = fields[..] else {
            return Err(parse_err(lineno, "expected `name value`"));
        };
        if names.iter().any(|n| n == name) {
            return Err(parse_err(lineno, format!("duplicate parameter {name}")));
        }
        names.push(name.to_string());
        values.push(number(value, digits, lineno)?);
    }
    ParamVector::new(names, values, digits)
}

pub fn read_params(path: &Path, digits: u32) -> Result<ParamVector> {
    parse_params(&read_text(path)?, digits)
}

pub fn write_params(path: &Path, params: &ParamVector) -> Result<()> {
    write_text(path, &format_params(params))
}

fn format_ref(r: &ParamRef, names: &[String], sig: u32) -> String {
    match r {
        ParamRef::Const(c) => compact(c, sig),
        ParamRef::Var { index, negate } => format!("{}${}", if *negate { "-" } else { "" }, names[*index]),
    }
}

/// One generator per line, preceded by a `params` line naming the variables
/// in order.
pub fn format_spec(spec: &ConfigSpec, digits: u32) -> String {
    let sig = digits + GUARD_DIGITS;
    let names = spec.names();
    let mut out = String::new();
    if !names.is_empty() {
        writeln!(out, "params {}", names.join(" ")).expect("string write");
    }
    for g in spec.generators() {
        let r = |x: &ParamRef| format_ref(x, names, sig);
        let line = match g {
            Generator::Pole { z_sign } => format!("pole {z_sign}"),
            Generator::Ring { k, z, phase } => format!("ring {k} z={} phase={}", r(z), r(phase)),
            Generator::OffsetRing { k, z, x } => format!("oring {k} z={} x={}", r(z), r(x)),
            Generator::FreePoint { z, x, y_sign } => format!("free z={} x={} y={y_sign}", r(z), r(x)),
        };
        out.push_str(&line);
        out.push('\n');
    }
    out
}

struct SpecParser {
    names: Vec<String>,
    declared: bool,
    digits: u32,
}

impl SpecParser {
    fn sign(&self, token: &str, lineno: usize) -> Result<Sign> {
        match token {
            "+" => Ok(Sign::Plus),
            "-" => Ok(Sign::Minus),
            _ => Err(parse_err(lineno, format!("expected + or -, found {token:?}"))),
        }
    }

    fn reference(&mut self, token: &str, lineno: usize) -> Result<ParamRef> {
        let (negate, body) = match token.strip_prefix('-') {
            Some(rest) if rest.starts_with('$') => (true, rest),
            _ => (false, token),
        };
        let Some(name) = body.strip_prefix('$') else {
            return Ok(ParamRef::Const(number(token, self.digits, lineno)?));
        };
        let index = match self.names.iter().position(|n| n == name) {
            Some(i) => i,
            None if !self.declared => {
                self.names.push(name.to_string());
                self.names.len() - 1
            }
            None => return Err(parse_err(lineno, format!("undeclared parameter ${name}"))),
        };
        Ok(ParamRef::Var { index, negate })
    }

    fn keyed(&mut self, token: Option<&&str>, key: &str, lineno: usize) -> Result<ParamRef> {
        let value = token
            .and_then(|t| t.strip_prefix(key))
            .and_then(|t| t.strip_prefix('='))
            .ok_or_else(|| parse_err(lineno, format!("expected {key}=<ref>")))?;
        self.reference(value, lineno)
    }

    fn ring_size(token: Option<&&str>, lineno: usize) -> Result<usize> {
        token.and_then(|t| t.parse().ok()).ok_or_else(|| parse_err(lineno, "expected a ring size"))
    }
}

/// Parses a spec file. Constants are read at `digits`. Without a `params`
/// line, variables are numbered in order of first appearance.
pub fn parse_spec(text: &str, digits: u32) -> Result<ConfigSpec> {
    let mut sp = SpecParser { names: Vec::new(), declared: false, digits };
    let mut generators = Vec::new();
    for (lineno, line) in content_lines(text) {
        let t: Vec<&str> = line.split_whitespace().collect();
        let arity = |want: usize| -> Result<()> {
            if t.len() == want {
                Ok(())
            } else {
                Err(parse_err(lineno, format!("`{}` takes {} fields", t[0], want - 1)))
            }
        };
        let g = match t[0] {
            "params" => {
                if sp.declared || !generators.is_empty() {
                    return Err(parse_err(lineno, "`params` must come first and only once"));
                }
                sp.names = t[1..].iter().map(|s| s.to_string()).collect();
                sp.declared = true;
                continue;
            }
            "pole" => {
                arity(2)?;
                Generator::Pole { z_sign: sp.sign(t[1], lineno)? }
            }
            "ring" => {
                arity(4)?;
                let k = SpecParser::ring_size(t.get(1), lineno)?;
                Generator::Ring { k, z: sp.keyed(t.get(2), "z", lineno)?, phase: sp.keyed(t.get(3), "phase", lineno)? }
            }
            "oring" => {
                arity(4)?;
                let k = SpecParser::ring_size(t.get(1), lineno)?;
                Generator::OffsetRing { k, z: sp.keyed(t.get(2), "z", lineno)?, x: sp.keyed(t.get(3), "x", lineno)? }
            }
            "free" => {
                arity(4)?;
                let z = sp.keyed(t.get(1), "z", lineno)?;
                let x = sp.keyed(t.get(2), "x", lineno)?;
                let y = t[3].strip_prefix("y=").ok_or_else(|| parse_err(lineno, "expected y=+|-"))?;
                Generator::FreePoint { z, x, y_sign: sp.sign(y, lineno)? }
            }
            other => return Err(parse_err(lineno, format!("unknown directive {other:?}"))),
        };
        generators.push(g);
    }
    ConfigSpec::new(sp.names, generators).map_err(|e| match e {
        Error::InvalidArgument(m) => parse_err(0, m),
        other => other,
    })
}

pub fn read_spec(path: &Path, digits: u32) -> Result<ConfigSpec> {
    parse_spec(&read_text(path)?, digits)
}

pub fn write_spec(path: &Path, spec: &ConfigSpec, digits: u32) -> Result<()> {
    write_text(path, &format_spec(spec, digits))
}

/// Ascending coefficients on one line.
pub fn format_poly(poly: &IntPolynomial) -> String {
    let parts: Vec<String> = poly.coeffs().iter().map(Integer::to_string).collect();
    format!("{}\n", parts.join(" "))
}

pub fn parse_poly(text: &str) -> Result<IntPolynomial> {
    let mut lines = content_lines(text);
    let (lineno, line) = lines.next().ok_or_else(|| parse_err(1, "empty polynomial file"))?;
    if let Some((extra, _)) = lines.next() {
        return Err(parse_err(extra, "polynomial must fit on one line"));
    }
    let coeffs = line
        .split_whitespace()
        .map(|t| t.parse::<Integer>().map_err(|_| parse_err(lineno, format!("not an integer: {t:?}"))))
        .collect::<Result<Vec<_>>>()?;
    IntPolynomial::new(coeffs).map_err(|e| parse_err(lineno, e.to_string()))
}

pub fn read_poly(path: &Path) -> Result<IntPolynomial> {
    parse_poly(&read_text(path)?)
}

pub fn write_poly(path: &Path, poly: &IntPolynomial) -> Result<()> {
    write_text(path, &format_poly(poly))
}

/// Metadata describing one command-line run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunManifest {
    pub command: String,
    /// Full argument list after the program name, for replay.
    pub args: Vec<String>,
    pub potential: Option<String>,
    pub n: Option<usize>,
    pub precision: u32,
    pub seed: Option<u64>,
    /// `name=id` pairs such as `rng=chacha8`.
    pub algorithms: Vec<String>,
    pub wall_time_secs: f64,
    pub energy: Option<String>,
    pub input: Option<String>,
    pub output: Option<String>,
}

impl RunManifest {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: &str| {
            out.push_str(k);
            out.push(' ');
            out.push_str(v);
            out.push('\n');
        };
        put("command", &self.command);
        for a in &self.args {
            put("arg", a);
        }
        if let Some(p) = &self.potential {
            put("potential", p);
        }
        if let Some(n) = self.n {
            put("n", &n.to_string());
        }
        put("precision", &self.precision.to_string());
        if let Some(s) = self.seed {
            put("seed", &s.to_string());
        }
        for a in &self.algorithms {
            put("algorithm", a);
        }
        put("wall_time_secs", &format!("{:.6}", self.wall_time_secs));
        if let Some(e) = &self.energy {
            put("energy", e);
        }
        if let Some(i) = &self.input {
            put("input", i);
        }
        if let Some(o) = &self.output {
            put("output", o);
        }
        out
    }

    pub fn parse(text: &str) -> Result<RunManifest> {
        let mut m = RunManifest::default();
        for (lineno, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l)) {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once(' ').unwrap_or((line, ""));
            let bad = || parse_err(lineno, format!("bad value for {key}"));
            match key {
                "command" => m.command = value.to_string(),
                "arg" => m.args.push(value.to_string()),
                "potential" => m.potential = Some(value.to_string()),
                "n" => m.n = Some(value.parse().map_err(|_| bad())?),
                "precision" => m.precision = value.parse().map_err(|_| bad())?,
                "seed" => m.seed = Some(value.parse().map_err(|_| bad())?),
                "algorithm" => m.algorithms.push(value.to_string()),
                "wall_time_secs" => m.wall_time_secs = value.parse().map_err(|_| bad())?,
                "energy" => m.energy = Some(value.to_string()),
                "input" => m.input = Some(value.to_string()),
                "output" => m.output = Some(value.to_string()),
                other => return Err(parse_err(lineno, format!("unknown manifest key {other:?}"))),
            }
        }
        if m.command.is_empty() {
            return Err(parse_err(0, "manifest has no command"));
        }
        Ok(m)
    }
}
