//! Command-line front end.
//!
//! Exit codes: 0 success, 1 domain or validation error, 2 numerical-certification
//! failure, 64 usage error.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::audit::{audit_remarks, render};
use crate::closed::{eval_m1, eval_n1};
use crate::designer::{configuration_of, design, realize, verify_reports, Target, ZeroTarget};
use crate::error::{Error, Result};
use crate::perturbation::{melnikov_params, params_to_perturbation, PerturbationSpec, MAX_CLOSED_DEGREE};
use crate::pwsim::{find_limit_cycles, integrate_piecewise, Nest, SimConfig};
use crate::quadrature::{builtin_system, melnikov_quadrature, Model, QuadratureConfig};
use crate::rootkit::isolate::ZeroReport;
use crate::rootkit::poly::{descartes_bound, discriminant, isolate_real_roots, rational_to_f64, Bound, RationalPolynomial, SturmSequence};
use crate::rootkit::wronskian::{f_w4_derivative_scaled, wronskians, Basis};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_CERTIFICATION: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const THREADS_ENV: &str = "MELNIKOV_LAB_THREADS";

#[derive(Parser, Debug)]
#[command(name = "melnikov-lab", version, about = "Averaged functions, zero certification and limit-cycle simulation for piecewise complex perturbations of i(z^2-1)/2")]
struct Cli {
    /// Print machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Write the run manifest to this file instead of stderr.
    #[arg(long, global = true, value_name = "PATH")]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate or count zeros of M1 and N1.
    #[command(subcommand)]
    Melnikov(MelnikovCommand),
    /// Compare closed forms against direct quadrature.
    Quadcheck(QuadcheckArgs),
    /// Check the Wronskians of the span bases on a grid.
    EctCheck(EctArgs),
    /// Exact real-root counting for a rational polynomial.
    Sturm(SturmArgs),
    /// Place zeros of r*M1 and r*N1 by a linear solve.
    Design(DesignArgs),
    /// Build a perturbation realizing the configuration [[i,j]].
    Realize(RealizeArgs),
    /// Certify the configuration of a perturbation.
    Verify(SpecArg),
    /// Find limit cycles of the piecewise system by simulation.
    Simulate(SimulateArgs),
    /// Compare the published parameter tables against the block integrals.
    AuditRemarks,
}

#[derive(Subcommand, Debug)]
enum MelnikovCommand {
    /// CSV of (r, M1, N1) on a grid.
    Eval {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value = "0.05:0.95:0.05")]
        grid: String,
    },
    /// Certified zeros of M1 and N1 in (0,1).
    Zeros {
        #[arg(long)]
        spec: PathBuf,
    },
}

#[derive(Args, Debug)]
struct SpecArg {
    #[arg(long)]
    spec: PathBuf,
}

#[derive(Args, Debug)]
struct QuadcheckArgs {
    /// Spec file; omit to use --random seeded specs.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Number of random specs when no file is given.
    #[arg(long, default_value_t = 10)]
    random: usize,
    #[arg(long, default_value_t = 3)]
    m: usize,
    #[arg(long)]
    holomorphic: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value = "0.05:0.95:0.05")]
    grid: String,
}

#[derive(Args, Debug)]
struct EctArgs {
    /// `f` for the seven-element basis, `g` for the degree-m basis.
    #[arg(long, default_value = "f")]
    basis: String,
    #[arg(long, default_value_t = 3)]
    m: usize,
    #[arg(long, default_value = "0.001:0.999:0.001")]
    grid: String,
}

#[derive(Args, Debug)]
struct SturmArgs {
    /// Coefficients from the constant term up, e.g. "1,-3/2,0.5".
    #[arg(long, allow_hyphen_values = true)]
    poly: String,
    #[arg(long, default_value = "-inf", allow_hyphen_values = true)]
    lo: String,
    #[arg(long, default_value = "inf", allow_hyphen_values = true)]
    hi: String,
}

#[derive(Args, Debug)]
struct DesignArgs {
    /// Comma-separated targets such as "f:0.2,g:0.5,f:-0.3".
    #[arg(long, allow_hyphen_values = true)]
    targets: String,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    holomorphic: bool,
    /// Write the resulting perturbation here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RealizeArgs {
    #[arg(long)]
    i: usize,
    #[arg(long)]
    j: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    holomorphic: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "out.json")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, default_value_t = 1e-3)]
    eps: f64,
    #[arg(long, default_value = "left")]
    nest: String,
    /// Window of w-radii as lo:hi.
    #[arg(long, default_value = "0.05:0.95")]
    search: String,
    #[arg(long, default_value_t = 64)]
    seeds: usize,
    #[arg(long, default_value_t = 1e-10)]
    rk_tol: f64,
    #[arg(long, default_value_t = 1e-12)]
    event_tol: f64,
    #[arg(long, default_value_t = 200_000)]
    max_steps: usize,
    #[arg(long)]
    allow_large_epsilon: bool,
    /// Also dump the trajectory from this section point.
    #[arg(long, allow_hyphen_values = true)]
    trajectory_x0: Option<f64>,
    #[arg(long, default_value_t = 6.283185307179586)]
    t_max: f64,
    #[arg(long, default_value = "trajectory.csv")]
    trajectory_out: PathBuf,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub input_digest: String,
    pub version: String,
    pub wall_time_s: f64,
}

/// What a subcommand produced: stdout text, files written, inputs read, exit code.
struct Outcome {
    stdout: String,
    exit: i32,
    inputs: Vec<Vec<u8>>,
    artifacts: Vec<PathBuf>,
}

impl Outcome {
    fn new(stdout: String) -> Self {
        Outcome { stdout, exit: EXIT_OK, inputs: Vec::new(), artifacts: Vec::new() }
    }

    fn exit(mut self, code: i32) -> Self {
        self.exit = code;
        self
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_certification_failure() {
        EXIT_CERTIFICATION
    } else {
        EXIT_DOMAIN
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        // a pool that is already built keeps its size
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

/// Runs the CLI on `argv` (including the program name) and returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    configure_threads();
    let start = Instant::now();
    let name = command_name(&cli.command);
    let result = dispatch(&cli.command, cli.json);
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    let _ = write!(out, "{}", outcome.stdout);
    let mut hasher = Sha256::new();
    for input in &outcome.inputs {
        hasher.update(input);
    }
    let manifest = RunManifest {
        command: name.to_string(),
        argv: argv.iter().map(|a| a.to_string_lossy().into_owned()).collect(),
        input_digest: format!("{:x}", hasher.finalize()),
        version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    let write_manifest = |path: &Path, err: &mut dyn Write| {
        if let Err(e) = std::fs::write(path, format!("{text}\n")) {
            let _ = writeln!(err, "warning: could not write manifest {}: {e}", path.display());
        }
    };
    match &cli.manifest {
        Some(p) => write_manifest(p, err),
        None if outcome.artifacts.is_empty() => {
            let _ = writeln!(err, "manifest: {}", serde_json::to_string(&manifest).expect("manifest serializes"));
        }
        None => {}
    }
    for a in &outcome.artifacts {
        let mut p = a.clone().into_os_string();
        p.push(".manifest.json");
        write_manifest(Path::new(&p), err);
    }
    outcome.exit
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Melnikov(MelnikovCommand::Eval { .. }) => "melnikov eval",
        Command::Melnikov(MelnikovCommand::Zeros { .. }) => "melnikov zeros",
        Command::Quadcheck(_) => "quadcheck",
        Command::EctCheck(_) => "ect-check",
        Command::Sturm(_) => "sturm",
        Command::Design(_) => "design",
        Command::Realize(_) => "realize",
        Command::Verify(_) => "verify",
        Command::Simulate(_) => "simulate",
        Command::AuditRemarks => "audit-remarks",
    }
}

fn dispatch(c: &Command, json: bool) -> Result<Outcome> {
    match c {
        Command::Melnikov(MelnikovCommand::Eval { spec, grid }) => cmd_eval(spec, grid, json),
        Command::Melnikov(MelnikovCommand::Zeros { spec }) => cmd_zeros(spec, json),
        Command::Quadcheck(a) => cmd_quadcheck(a, json),
        Command::EctCheck(a) => cmd_ect(a, json),
        Command::Sturm(a) => cmd_sturm(a, json),
        Command::Design(a) => cmd_design(a, json),
        Command::Realize(a) => cmd_realize(a, json),
        Command::Verify(a) => cmd_verify(&a.spec, json),
        Command::Simulate(a) => cmd_simulate(a, json),
        Command::AuditRemarks => cmd_audit(json),
    }
}

/// 15 significant digits.
pub fn fmt15(v: f64) -> String {
    format!("{v:.14e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt15).unwrap_or_default()
}

fn to_json<T: Serialize>(v: &T) -> String {
    format!("{}\n", serde_json::to_string_pretty(v).expect("serializable"))
}

/// Parses `lo:hi:step` into the points `lo + k·step <= hi`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::Domain(format!("grid '{s}' is not lo:hi:step"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let v: Vec<f64> = parts.iter().map(|p| p.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<_>>()?;
    let (lo, hi, step) = (v[0], v[1], v[2]);
    if !(step > 0.0) || !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(bad());
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| lo + k as f64 * step).collect())
}

fn parse_pair(s: &str) -> Result<(f64, f64)> {
    let bad = || Error::Domain(format!("'{s}' is not lo:hi"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

/// Integers, `p/q` fractions and plain decimals are read exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Domain(format!("'{s}' is not a rational number"));
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    if let Ok(i) = BigInt::from_str(s) {
        return Ok(BigRational::from_integer(i));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if !frac.is_empty() && frac.chars().all(|c| c.is_ascii_digit()) {
            let neg = int.starts_with('-');
            let digits = format!("{}{frac}", int.trim_start_matches(['-', '+']));
            let num = BigInt::from_str(&digits).map_err(|_| bad())?;
            let den = BigInt::from(10u32).pow(frac.len() as u32);
            let v = BigRational::new(num, den);
            return Ok(if neg { -v } else { v });
        }
    }
    Err(bad())
}

fn parse_bound(s: &str) -> Result<Bound> {
    match s.trim() {
        "inf" | "+inf" => Ok(Bound::PosInfinity),
        "-inf" => Ok(Bound::NegInfinity),
        other => Ok(Bound::At(parse_rational(other)?)),
    }
}

pub fn parse_targets(s: &str) -> Result<Vec<ZeroTarget>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (w, x) = p.trim().split_once(':').ok_or_else(|| Error::Domain(format!("target '{p}' is not f:x or g:x")))?;
            let location: f64 = x.trim().parse().map_err(|_| Error::Domain(format!("bad target location '{x}'")))?;
            let which = match w.trim() {
                "f" => Target::F,
                "g" => Target::G,
                other => return Err(Error::Domain(format!("target kind '{other}' is not f or g"))),
            };
            Ok(ZeroTarget { location, which })
        })
        .collect()
}

fn read_spec(path: &Path) -> Result<(PerturbationSpec, Vec<u8>)> {
    let bytes = std::fs::read(path)?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| Error::InvalidSpec(format!("{} is not UTF-8", path.display())))?;
    Ok((PerturbationSpec::from_json(&text)?, bytes))
}

fn write_spec(path: &Path, spec: &PerturbationSpec) -> Result<()> {
    std::fs::write(path, format!("{}\n", spec.to_json()))?;
    Ok(())
}

fn closed_or_quadrature(spec: &PerturbationSpec, r: f64) -> Result<(f64, f64)> {
    if spec.m() <= MAX_CLOSED_DEGREE {
        let p = melnikov_params(spec)?;
        return Ok((eval_m1(&p, r)?, eval_n1(&p, r)?));
    }
    let cfg = QuadratureConfig::default();
    let left = melnikov_quadrature(&builtin_system(Model::HalfIZ2Minus1Left), spec, r, &cfg)?;
    let right = melnikov_quadrature(&builtin_system(Model::HalfIZ2Minus1Right), spec, r, &cfg)?;
    Ok((left.m1, right.m1))
}

fn cmd_eval(path: &Path, grid: &str, json: bool) -> Result<Outcome> {
    let (spec, bytes) = read_spec(path)?;
    let grid = parse_grid(grid)?;
    let rows: Vec<(f64, f64, f64)> = grid
        .iter()
        .map(|&r| closed_or_quadrature(&spec, r).map(|(m, n)| (r, m, n)))
        .collect::<Result<_>>()?;
    let stdout = if json {
        to_json(&rows.iter().map(|&(r, m, n)| json!({"r": r, "m1": m, "n1": n})).collect::<Vec<_>>())
    } else {
        let mut s = String::from("r,M1,N1\n");
        for (r, m, n) in rows {
            s.push_str(&format!("{},{},{}\n", fmt15(r), fmt15(m), fmt15(n)));
        }
        s
    };
    Ok(Outcome { inputs: vec![bytes], ..Outcome::new(stdout) })
}

fn zero_rows(name: &str, rep: &ZeroReport, s: &mut String) {
    for z in &rep.zeros {
        s.push_str(&format!("{name},{},{},{}\n", fmt15(z.location), fmt15(z.half_width), z.simple));
    }
}

fn cmd_zeros(path: &Path, json: bool) -> Result<Outcome> {
    let (spec, bytes) = read_spec(path)?;
    let p = melnikov_params(&spec)?;
    let (rm, rn) = verify_reports(&p, spec.m(), spec.holomorphic())?;
    let conf = configuration_of(&rm, &rn);
    let stdout = if json {
        to_json(&json!({"m1": rm, "n1": rn, "configuration": conf}))
    } else {
        let mut s = String::from("function,location,half_width,simple\n");
        zero_rows("M1", &rm, &mut s);
        zero_rows("N1", &rn, &mut s);
        s
    };
    let exit = if conf.certified { EXIT_OK } else { EXIT_CERTIFICATION };
    Ok(Outcome { inputs: vec![bytes], ..Outcome::new(stdout) }.exit(exit))
}

/// Largest `|closed - quadrature|` over the grid for `M₁` and `N₁`.
pub fn quadcheck_spec(spec: &PerturbationSpec, grid: &[f64]) -> Result<f64> {
    let p = melnikov_params(spec)?;
    let cfg = QuadratureConfig::default();
    let left = builtin_system(Model::HalfIZ2Minus1Left);
    let right = builtin_system(Model::HalfIZ2Minus1Right);
    let mut worst = 0.0f64;
    for &r in grid {
        let qm = melnikov_quadrature(&left, spec, r, &cfg)?.m1;
        let qn = melnikov_quadrature(&right, spec, r, &cfg)?.m1;
        worst = worst.max((eval_m1(&p, r)? - qm).abs()).max((eval_n1(&p, r)? - qn).abs());
    }
    Ok(worst)
}

fn cmd_quadcheck(a: &QuadcheckArgs, json: bool) -> Result<Outcome> {
    let grid = parse_grid(&a.grid)?;
    let (specs, inputs) = match &a.spec {
        Some(path) => {
            let (s, b) = read_spec(path)?;
            (vec![s], vec![b])
        }
        None => {
            if a.m > MAX_CLOSED_DEGREE {
                return Err(Error::UnsupportedDegree { m: a.m, max: MAX_CLOSED_DEGREE });
            }
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            ((0..a.random).map(|_| PerturbationSpec::random(a.m, a.holomorphic, &mut rng)).collect(), Vec::new())
        }
    };
    let worst: Vec<f64> = specs.par_iter().map(|s| quadcheck_spec(s, &grid)).collect::<Result<_>>()?;
    let max = worst.iter().copied().fold(0.0, f64::max);
    let pass = max < a.tol;
    let stdout = if json {
        to_json(&json!({"specs": specs.len(), "points": grid.len(), "max_discrepancy": max, "tol": a.tol, "pass": pass}))
    } else {
        format!("max discrepancy {} over {} specs x {} radii (tol {})\n", fmt15(max), specs.len(), grid.len(), a.tol)
    };
    Ok(Outcome { inputs, ..Outcome::new(stdout) }.exit(if pass { EXIT_OK } else { EXIT_CERTIFICATION }))
}

#[derive(Debug, Serialize)]
pub struct EctSummary {
    pub basis: String,
    pub points: usize,
    /// Smallest closed-form value of each Wronskian on the grid.
    pub min_closed: Vec<f64>,
    pub all_positive: bool,
    /// Largest relative error of `W₄′(1-r²)³ = 768 r⁴` (seven-element basis only).
    pub w4_identity_rel_err: Option<f64>,
}

pub fn ect_check(basis: Basis, grid: &[f64]) -> Result<EctSummary> {
    basis.validate()?;
    let mut min_closed = vec![f64::INFINITY; basis.len()];
    let mut w4 = None;
    for &r in grid {
        let w = wronskians(basis, r)?;
        for (k, v) in w.closed.iter().enumerate() {
            min_closed[k] = min_closed[k].min(*v);
        }
        if basis == Basis::F {
            let expected = 768.0 * r.powi(4);
            let rel = (f_w4_derivative_scaled(r) - expected).abs() / expected;
            w4 = Some(w4.map_or(rel, |x: f64| x.max(rel)));
        }
    }
    let name = match basis {
        Basis::F => "f".to_string(),
        Basis::G(m) => format!("g{m}"),
    };
    Ok(EctSummary { basis: name, points: grid.len(), all_positive: min_closed.iter().all(|&v| v > 0.0), min_closed, w4_identity_rel_err: w4 })
}

fn cmd_ect(a: &EctArgs, json: bool) -> Result<Outcome> {
    let basis = match a.basis.as_str() {
        "f" => Basis::F,
        "g" => Basis::G(a.m),
        other => return Err(Error::Domain(format!("basis '{other}' is not f or g"))),
    };
    let grid = parse_grid(&a.grid)?;
    if grid.iter().any(|&r| !(r > 0.0 && r < 1.0)) {
        return Err(Error::Domain("ect-check grid must lie in (0,1)".into()));
    }
    let s = ect_check(basis, &grid)?;
    let ok = s.all_positive && s.w4_identity_rel_err.is_none_or(|e| e < 1e-8);
    let stdout = if json {
        to_json(&s)
    } else {
        let mut out = String::from("k,min_W\n");
        for (k, v) in s.min_closed.iter().enumerate() {
            out.push_str(&format!("{k},{}\n", fmt15(*v)));
        }
        if let Some(e) = s.w4_identity_rel_err {
            out.push_str(&format!("W4 identity max relative error {}\n", fmt15(e)));
        }
        out
    };
    Ok(Outcome::new(stdout).exit(if ok { EXIT_OK } else { EXIT_CERTIFICATION }))
}

fn cmd_sturm(a: &SturmArgs, json: bool) -> Result<Outcome> {
    let coeffs: Vec<BigRational> = a.poly.split(',').map(parse_rational).collect::<Result<_>>()?;
    let p = RationalPolynomial::new(coeffs);
    if p.is_zero() {
        return Err(Error::Domain("the zero polynomial has no finite root count".into()));
    }
    let (lo, hi) = (parse_bound(&a.lo)?, parse_bound(&a.hi)?);
    let seq = SturmSequence::new(&p);
    let count = seq.count(&lo, &hi)?;
    let width = BigRational::new(1.into(), BigInt::from(1u64 << 52));
    let roots = isolate_real_roots(&p, &lo, &hi, &width)?;
    let disc = if p.degree().unwrap_or(0) >= 2 { Some(rational_to_f64(&discriminant(&p)?)) } else { None };
    let descartes = descartes_bound(&p);
    let stdout = if json {
        let iv: Vec<_> = roots.iter().map(|r| json!({"lo": rational_to_f64(&r.lo), "hi": rational_to_f64(&r.hi)})).collect();
        to_json(&json!({"distinct_roots": count, "descartes_positive_bound": descartes, "discriminant": disc, "intervals": iv}))
    } else {
        let mut s = format!("distinct real roots {count}\ndescartes positive-root bound {descartes}\n");
        if let Some(d) = disc {
            s.push_str(&format!("discriminant {}\n", fmt15(d)));
        }
        s.push_str("lo,hi\n");
        for r in &roots {
            s.push_str(&format!("{},{}\n", fmt15(rational_to_f64(&r.lo)), fmt15(rational_to_f64(&r.hi))));
        }
        s
    };
    Ok(Outcome::new(stdout))
}

fn cmd_design(a: &DesignArgs, json: bool) -> Result<Outcome> {
    let targets = parse_targets(&a.targets)?;
    let params = design(&targets, a.m, a.holomorphic)?;
    let mut outcome = Outcome::new(String::new());
    let spec = params_to_perturbation(&params, a.m, a.holomorphic)?;
    if let Some(path) = &a.out {
        write_spec(path, &spec)?;
        outcome.artifacts.push(path.clone());
    }
    outcome.stdout = if json {
        to_json(&json!({"params": params, "spec": spec}))
    } else {
        let arr = params.to_array();
        let mut s = String::from("param,value\n");
        for (n, v) in crate::perturbation::PARAM_NAMES.iter().zip(arr) {
            s.push_str(&format!("{n},{}\n", fmt15(v)));
        }
        s
    };
    Ok(outcome)
}

fn cmd_realize(a: &RealizeArgs, json: bool) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let spec = realize(a.i, a.j, a.m, a.holomorphic, &mut rng)?;
    write_spec(&a.out, &spec)?;
    let p = melnikov_params(&spec)?;
    let (rm, rn) = verify_reports(&p, spec.m(), spec.holomorphic())?;
    let conf = configuration_of(&rm, &rn);
    let stdout = if json {
        to_json(&json!({"configuration": conf, "out": a.out}))
    } else {
        format!("[[{},{}]] {} -> {}\n", conf.m1, conf.n1, certified_word(conf.certified), a.out.display())
    };
    let mut o = Outcome::new(stdout);
    o.artifacts.push(a.out.clone());
    Ok(o)
}

fn certified_word(c: bool) -> &'static str {
    if c {
        "certified"
    } else {
        "uncertified"
    }
}

fn cmd_verify(path: &Path, json: bool) -> Result<Outcome> {
    let (spec, bytes) = read_spec(path)?;
    let p = melnikov_params(&spec)?;
    let (rm, rn) = verify_reports(&p, spec.m(), spec.holomorphic())?;
    let conf = configuration_of(&rm, &rn);
    let stdout = if json {
        to_json(&conf)
    } else {
        format!("[[{},{}]] {}\n", conf.m1, conf.n1, certified_word(conf.certified))
    };
    let exit = if conf.certified { EXIT_OK } else { EXIT_CERTIFICATION };
    Ok(Outcome { inputs: vec![bytes], ..Outcome::new(stdout) }.exit(exit))
}

fn cmd_simulate(a: &SimulateArgs, json: bool) -> Result<Outcome> {
    let (spec, bytes) = read_spec(&a.spec)?;
    let nest = Nest::from_str(&a.nest)?;
    let cfg = SimConfig {
        epsilon: a.eps,
        rk_tol: a.rk_tol,
        event_tol: a.event_tol,
        max_steps: a.max_steps,
        nest,
        allow_large_epsilon: a.allow_large_epsilon,
    };
    let warnings = cfg.validate()?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let search = parse_pair(&a.search)?;
    let found = find_limit_cycles(&spec, &cfg, search, a.seeds)?;
    let mut outcome = Outcome { inputs: vec![bytes], ..Outcome::new(String::new()) };
    if let Some(x0) = a.trajectory_x0 {
        let tr = integrate_piecewise(&spec, &cfg, num_complex::Complex64::new(x0, 0.0), a.t_max)?;
        let mut s = String::from("t,re_z,im_z\n");
        for (t, z) in &tr.points {
            s.push_str(&format!("{},{},{}\n", fmt15(*t), fmt15(z.re), fmt15(z.im)));
        }
        std::fs::write(&a.trajectory_out, s)?;
        outcome.artifacts.push(a.trajectory_out.clone());
    }
    outcome.stdout = if json {
        to_json(&found)
    } else {
        let mut s = String::from("section_point,radius_in_w,predicted_r0,deviation,stable\n");
        for c in &found.cycles {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt15(c.section_point),
                fmt15(c.radius_in_w),
                fmt_opt(c.predicted_r0),
                fmt_opt(c.deviation),
                c.stable
            ));
        }
        s
    };
    Ok(outcome)
}

fn cmd_audit(json: bool) -> Result<Outcome> {
    let rep = audit_remarks();
    let stdout = if json {
        to_json(&rep)
    } else {
        render(&rep).join("\n") + "\n"
    };
    Ok(Outcome::new(stdout))
}
