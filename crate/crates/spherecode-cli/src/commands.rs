use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::Parser;
use spherecode::algebra::minimal_polynomial;
use spherecode::geometry::{default_tolerance, gram_matrix, gram_signature};
use spherecode::io::{self, RunManifest};
use spherecode::numerics::RNG_ALGORITHM;
use spherecode::optimize::{descent, multi_start_with_threads, percolating_anneal, random_start};
use spherecode::paramconfig::{
    build_points, builtin_spec_with_digits, newton_refine, param_energy, ConfigSpec, ParamVector,
};
use spherecode::potentials::energy;
use spherecode::symmetry::{default_symmetry_tol, suggest_axis, symmetry_report};
use spherecode::verify::{default_zero_tol, verify_minimum};
use spherecode::{AnnealConfig, BigReal, DescentConfig, GramSignature, PointSet, Potential, Rng, RunReport};

use crate::{Algo, Cli, Command, GlobalOpts, SpecSource};

const DEFAULT_PRECISION: u32 = 40;

/// Invalid combination of arguments; reported with exit status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

struct Ctx {
    g: GlobalOpts,
    manifest: RunManifest,
}

impl Ctx {
    fn precision(&self, fallback: Option<u32>) -> u32 {
        self.g.precision.or(fallback).unwrap_or(DEFAULT_PRECISION)
    }

    fn potential(&self, fallback: Option<Potential>) -> Result<Potential> {
        match &self.g.potential {
            Some(tok) => tok.parse().map_err(|e: spherecode::Error| usage(e.to_string())),
            None => fallback.ok_or_else(|| usage("--potential is required")),
        }
    }

    fn read_points(&mut self, path: &Path, renormalize: bool) -> Result<(PointSet, Option<Potential>)> {
        self.manifest.input = Some(path.display().to_string());
        let (set, header) = io::read_points(path, self.g.precision, renormalize)?;
        Ok((set, header.potential))
    }

    fn threads(&self) -> usize {
        self.g.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |t| t.get())).max(1)
    }

    /// Energies are printed five digits short of the working precision.
    fn show_energy(&mut self, e: &BigReal, p: u32) {
        let text = e.to_plain_string(p.saturating_sub(5).max(1));
        println!("energy {text}");
        self.manifest.energy = Some(text);
    }

    fn write_points(&mut self, set: &PointSet, p: u32, pot: Option<Potential>) -> Result<()> {
        if let Some(out) = self.g.output.clone() {
            io::write_points(&out, set, p, pot)?;
            self.manifest.output = Some(out.display().to_string());
        }
        Ok(())
    }
}

pub fn run(cli: Cli, args: Vec<String>) -> Result<()> {
    let start = Instant::now();
    let mut ctx = Ctx {
        g: cli.global.clone(),
        manifest: RunManifest { args, seed: Some(cli.global.seed), ..RunManifest::default() },
    };
    let name = match &cli.command {
        Command::Energy { .. } => "energy",
        Command::Minimize { .. } => "minimize",
        Command::Build { .. } => "build",
        Command::Refine { .. } => "refine",
        Command::Hessian { .. } => "hessian",
        Command::Symmetry { .. } => "symmetry",
        Command::Gram { .. } => "gram",
        Command::Algdep { .. } => "algdep",
        Command::Replay { .. } => "replay",
    };
    ctx.manifest.command = name.to_string();
    match cli.command {
        Command::Energy { input, renormalize } => cmd_energy(&mut ctx, &input, renormalize)?,
        Command::Minimize { n, input, algo, restarts, passes, final_precision, max_iters, report } => {
            let opts = MinimizeOpts {
                n,
                input: input.as_deref(),
                algo,
                restarts,
                passes,
                final_precision: final_precision.as_deref(),
                max_iters,
                report: report.as_deref(),
            };
            cmd_minimize(&mut ctx, opts)?
        }
        Command::Build { source } => cmd_build(&mut ctx, &source)?,
        Command::Refine { source, target } => cmd_refine(&mut ctx, &source, target)?,
        Command::Hessian { input, zero_tol } => cmd_hessian(&mut ctx, &input, zero_tol.as_deref())?,
        Command::Symmetry { input, tol } => cmd_symmetry(&mut ctx, &input, tol.as_deref())?,
        Command::Gram { input, tol } => cmd_gram(&mut ctx, &input, tol.as_deref())?,
        Command::Algdep { value, max_degree, even, exp } => cmd_algdep(&mut ctx, &value, max_degree, even, exp)?,
        Command::Replay { manifest_file } => return replay(&manifest_file),
    }
    if let Some(path) = &ctx.g.manifest {
        ctx.manifest.wall_time_secs = start.elapsed().as_secs_f64();
        ctx.manifest.algorithms.insert(0, format!("rng={RNG_ALGORITHM}"));
        io::write_text(path, &ctx.manifest.to_text())?;
    }
    Ok(())
}

fn replay(path: &Path) -> Result<()> {
    let m = RunManifest::parse(&io::read_text(path)?)?;
    if m.command == "replay" {
        bail!(usage("a replay manifest cannot be replayed"));
    }
    let argv = std::iter::once("spherecode".to_string()).chain(m.args.iter().cloned());
    let cli = Cli::try_parse_from(argv).map_err(|e| usage(format!("manifest arguments: {e}")))?;
    run(cli, m.args)
}

fn parse_tol(text: Option<&str>, p: u32, fallback: BigReal) -> Result<BigReal> {
    match text {
        Some(t) => BigReal::parse(t, p).map_err(|_| usage(format!("bad tolerance {t:?}"))),
        None => Ok(fallback),
    }
}

fn cmd_energy(ctx: &mut Ctx, input: &Path, renormalize: bool) -> Result<()> {
    let (set, header_pot) = ctx.read_points(input, renormalize)?;
    let pot = ctx.potential(header_pot)?;
    ctx.manifest.potential = Some(pot.token());
    ctx.manifest.n = Some(set.len());
    ctx.manifest.precision = set.digits();
    let e = energy(&set, pot)?;
    ctx.show_energy(&e.value, set.digits());
    Ok(())
}

/// Options of the `minimize` subcommand.
pub struct MinimizeOpts<'a> {
    pub n: Option<usize>,
    pub input: Option<&'a Path>,
    pub algo: Algo,
    pub restarts: usize,
    pub passes: usize,
    pub final_precision: Option<&'a str>,
    pub max_iters: Option<usize>,
    pub report: Option<&'a Path>,
}

fn cmd_minimize(ctx: &mut Ctx, o: MinimizeOpts) -> Result<()> {
    if o.restarts == 0 {
        bail!(usage("--restarts must be at least 1"));
    }
    let (start, header_pot) = match (o.n, o.input) {
        (_, Some(path)) => {
            let (set, pot) = ctx.read_points(path, true)?;
            (Some(set), pot)
        }
        (Some(_), None) => (None, None),
        (None, None) => bail!(usage("minimize needs --n or --input")),
    };
    let pot = ctx.potential(header_pot)?;
    let p = start.as_ref().map_or_else(|| ctx.precision(None), PointSet::digits);
    let n = start.as_ref().map_or_else(|| o.n.expect("checked"), PointSet::len);
    ctx.manifest.potential = Some(pot.token());
    ctx.manifest.n = Some(n);
    ctx.manifest.precision = p;
    let mut cfg = DescentConfig::new(p);
    if let Some(m) = o.max_iters {
        cfg.max_iters = m;
    }
    let mut acfg = AnnealConfig::new(p);
    acfg.passes_per_round = o.passes.max(1);
    acfg.final_precision = parse_tol(o.final_precision, p, BigReal::exp10(-8, p))?;
    if o.algo != Algo::Descent {
        ctx.manifest.algorithms.push("anneal=percolating".into());
    }
    if o.algo != Algo::Anneal {
        ctx.manifest.algorithms.push("descent=tangential+chart-newton".into());
    }
    let restarts = if start.is_some() { 1 } else { o.restarts };
    let seed = ctx.g.seed;
    let digits = p.saturating_sub(5).max(1);
    let tol = default_tolerance(p);
    // Per restart: energy text, or the failure.
    let mut rows: Vec<std::result::Result<(String, GramSignature), String>> = Vec::new();
    let (best_index, run) = match (o.algo, start) {
        (Algo::Descent, Some(set)) => (0, descent(&set, pot, &cfg)?),
        (Algo::Descent, None) => {
            let rep = multi_start_with_threads(n, pot, restarts, &cfg, seed, ctx.threads())?;
            let mut sigs = rep.signatures.iter();
            let mut fails = rep.failures.iter();
            for e in &rep.energies {
                rows.push(match e {
                    Some(e) => Ok((e.to_plain_string(digits), sigs.next().expect("one per success").clone())),
                    None => Err(fails.next().expect("one per failure").1.to_string()),
                });
            }
            (rep.best_index, rep.best)
        }
        (algo, start) => {
            let mut best: Option<(usize, RunReport)> = None;
            let mut first_err = None;
            for k in 0..restarts {
                let set = match &start {
                    Some(s) => s.clone(),
                    None => random_start(n, seed, k, p),
                };
                let out = percolating_anneal(&set, pot, &acfg, &mut Rng::new(seed, (restarts + k) as u64))
                    .and_then(|a| if algo == Algo::Both { descent(&a.final_points, pot, &cfg) } else { Ok(a) });
                match out {
                    Ok(r) => {
                        let sig = gram_signature(&gram_matrix(&r.final_points), &tol);
                        rows.push(Ok((r.final_energy.value.to_plain_string(digits), sig)));
                        if best.as_ref().is_none_or(|(_, b)| r.final_energy.value < b.final_energy.value) {
                            best = Some((k, r));
                        }
                    }
                    Err(e) => {
                        rows.push(Err(e.to_string()));
                        first_err.get_or_insert(e);
                    }
                }
            }
            match best {
                Some(b) => b,
                None => return Err(first_err.expect("some restart ran").into()),
            }
        }
    };
    if restarts > 1 {
        for (k, row) in rows.iter().enumerate() {
            match row {
                Ok((e, _)) => println!("restart {k} {e}"),
                Err(_) => println!("restart {k} failed"),
            }
        }
        println!("best_restart {best_index}");
    }
    if let Some(path) = o.report {
        let mut text = format!("algorithm {}\npotential {}\nn {n}\nprecision {p}\n", o.algo.name(), pot.token());
        for (k, row) in rows.iter().enumerate() {
            text.push_str(&match row {
                Ok((e, sig)) => format!("restart {k} energy {e} signature {sig}\n"),
                Err(e) => format!("restart {k} failed {e}\n"),
            });
        }
        text.push_str(&format!(
            "best_restart {best_index}\niterations {}\nresidual {}\n",
            run.iterations,
            run.residual.to_sci_string(3)
        ));
        for (step, e) in &run.history {
            text.push_str(&format!("history {step} {}\n", e.to_sci_string(digits)));
        }
        io::write_text(path, &text)?;
    }
    ctx.show_energy(&run.final_energy.value, p);
    println!("residual {}", run.residual.to_sci_string(3));
    println!("gram {}", gram_signature(&gram_matrix(&run.final_points), &default_tolerance(p)));
    ctx.write_points(&run.final_points, p, Some(pot))?;
    Ok(())
}

/// Spec and parameters named by a `--spec`/`--builtin` pair, at `p` digits.
fn load_spec(ctx: &mut Ctx, src: &SpecSource, p: u32, pot: Option<Potential>) -> Result<(ConfigSpec, ParamVector)> {
    let (spec, seed) = match (&src.spec, src.builtin) {
        (Some(path), None) => {
            ctx.manifest.input = Some(path.display().to_string());
            (io::read_spec(path, p)?, None)
        }
        (None, Some(n)) => {
            let pot = pot.ok_or_else(|| usage("--builtin needs --potential"))?;
            let (spec, seed) = builtin_spec_with_digits(n, pot, p)?;
            (spec, Some(seed))
        }
        _ => bail!(usage("give exactly one of --spec and --builtin")),
    };
    let params = match (&src.params, seed) {
        (Some(path), _) => io::read_params(path, p)?,
        (None, Some(seed)) => seed,
        (None, None) if spec.arity() == 0 => ParamVector::new(Vec::new(), Vec::new(), p)?,
        (None, None) => bail!(usage("--params is required with --spec")),
    };
    Ok((spec, params))
}

fn optional_potential(ctx: &Ctx) -> Result<Option<Potential>> {
    ctx.g.potential.as_ref().map(|_| ctx.potential(None)).transpose()
}

fn cmd_build(ctx: &mut Ctx, src: &SpecSource) -> Result<()> {
    let p = ctx.precision(None);
    let pot = optional_potential(ctx)?;
    let (spec, params) = load_spec(ctx, src, p, pot)?;
    let set = build_points(&spec, &params)?;
    ctx.manifest.n = Some(set.len());
    ctx.manifest.precision = p;
    println!("points {}", set.len());
    if let Some(pot) = pot {
        ctx.manifest.potential = Some(pot.token());
        ctx.show_energy(&energy(&set, pot)?.value, p);
    }
    ctx.write_points(&set, p, pot)?;
    Ok(())
}

fn cmd_refine(ctx: &mut Ctx, src: &SpecSource, target: Option<u32>) -> Result<()> {
    let pot = ctx.potential(None)?;
    let target = target.unwrap_or_else(|| ctx.precision(None));
    // Constants must carry the guard digits of the top Newton rung.
    let p = target + 10;
    let (spec, params) = load_spec(ctx, src, p, Some(pot))?;
    ctx.manifest.potential = Some(pot.token());
    ctx.manifest.n = Some(spec.point_count());
    ctx.manifest.precision = target;
    ctx.manifest.algorithms.push("newton=precision-ladder".into());
    let refined = newton_refine(&spec, &params, pot, target)?;
    print!("{}", io::format_params(&refined));
    ctx.show_energy(&param_energy(&spec, &refined, pot)?, target);
    if let Some(out) = ctx.g.output.clone() {
        io::write_params(&out, &refined)?;
        ctx.manifest.output = Some(out.display().to_string());
    }
    Ok(())
}

fn cmd_hessian(ctx: &mut Ctx, input: &Path, zero_tol: Option<&str>) -> Result<()> {
    let (set, header_pot) = ctx.read_points(input, false)?;
    let pot = ctx.potential(header_pot)?;
    let p = set.digits();
    ctx.manifest.potential = Some(pot.token());
    ctx.manifest.n = Some(set.len());
    ctx.manifest.precision = p;
    let tol = parse_tol(zero_tol, p, default_zero_tol(p))?;
    let rep = verify_minimum(&set, pot, &tol)?;
    for (k, l) in rep.eigenvalues.iter().enumerate() {
        println!("eigenvalue {k} {}", l.to_sci_string(12));
    }
    if let Some(l) = rep.eigenvalues.iter().find(|l| l.abs() >= tol) {
        println!("smallest_nonzero {}", l.to_sci_string(12));
    }
    if let Some(l) = rep.eigenvalues.last() {
        println!("largest {}", l.to_sci_string(12));
    }
    println!("zero_count {} expected {}", rep.zero_count, rep.expected_zero_count);
    println!("verdict {}", rep.verdict);
    Ok(())
}

fn cmd_symmetry(ctx: &mut Ctx, input: &Path, tol: Option<&str>) -> Result<()> {
    let (set, _) = ctx.read_points(input, false)?;
    let p = set.digits();
    ctx.manifest.n = Some(set.len());
    ctx.manifest.precision = p;
    let tol = parse_tol(tol, p, default_symmetry_tol(p))?;
    println!("{}", symmetry_report(&set, &tol));
    match suggest_axis(&set, &tol) {
        Ok(a) => println!("Axis     {} {} {}", a.x.to_sci_string(12), a.y.to_sci_string(12), a.z.to_sci_string(12)),
        Err(spherecode::Error::NoStructure) => println!("Axis     none"),
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn cmd_gram(ctx: &mut Ctx, input: &Path, tol: Option<&str>) -> Result<()> {
    let (set, _) = ctx.read_points(input, false)?;
    let p = set.digits();
    ctx.manifest.n = Some(set.len());
    ctx.manifest.precision = p;
    let tol = parse_tol(tol, p, default_tolerance(p))?;
    println!("{}", gram_signature(&gram_matrix(&set), &tol));
    Ok(())
}

/// Significant digits written in a decimal literal.
fn literal_digits(text: &str) -> u32 {
    let mantissa = text.split(['e', 'E']).next().unwrap_or("");
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    digits.trim_start_matches('0').len() as u32
}

fn cmd_algdep(ctx: &mut Ctx, value: &str, max_degree: usize, even: bool, exp: bool) -> Result<()> {
    let path = PathBuf::from(value);
    let text = if path.is_file() {
        ctx.manifest.input = Some(value.to_string());
        let body = io::read_text(&path)?;
        body.split_whitespace().last().context("empty value file")?.to_string()
    } else {
        value.to_string()
    };
    let p = ctx.precision(Some(literal_digits(&text).max(16)));
    ctx.manifest.precision = p;
    ctx.manifest.algorithms.push("lll=integral-0.99".into());
    let x = BigReal::parse(&text, p).map_err(|_| usage(format!("not a number: {text:?}")))?;
    let x = if exp { x.exp() } else { x };
    let r = minimal_polynomial(&x, max_degree, even)?;
    let coeffs: Vec<String> = r.poly.coeffs().iter().map(|c| c.to_string()).collect();
    println!("coefficients {}", coeffs.join(" "));
    println!("polynomial {}", r.poly);
    println!("residual {}", r.residual.to_sci_string(3));
    println!("accepted {}", r.accepted);
    if let Some(out) = ctx.g.output.clone() {
        io::write_poly(&out, &r.poly)?;
        ctx.manifest.output = Some(out.display().to_string());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_digit_counts() {
        assert_eq!(literal_digits("0.5646169639331753669"), 19);
        assert_eq!(literal_digits("-12.5e3"), 3);
        assert_eq!(literal_digits("0"), 0);
    }
}
