//! Command-line front end: reproducible experiment drivers over the
//! library modules, with file-based inputs and outputs.
//!
//! Exit codes: 0 success, 2 usage, 3 validation or I/O failure,
//! 4 numerical failure. All randomness in a command flows through its
//! single `--seed`; reruns with identical flags produce byte-identical
//! outputs. Output files are written to a temporary sibling and renamed
//! into place, so failed runs leave nothing behind.

use std::ffi::OsString;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nalgebra::DVector;
use rayon::prelude::*;
use serde_json::json;

use crate::analysis::{
    self, convergence_study, decay_profile, lebesgue_constant, stability_ratios,
};
use crate::basis::aux_space;
use crate::geometry::{
    generate_points, load_point_set, mesh_stats, quadrature, save_point_set, GenMethod, ManifoldId,
    Point, PointSet, QuadratureRule, SizeSpec,
};
use crate::interp::SaddleSystem;
use crate::kernels::{self, KernelSpec};
use crate::targets::Target;
use crate::{Error, Result};

#[derive(Parser)]
#[command(
    name = "manifold-splines",
    about = "Kernel interpolation and approximation on S1, S2 and SO(3)",
    version
)]
struct Cli {
    /// Worker-thread cap (falls back to MANIFOLD_SPLINES_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a point set and report its mesh statistics.
    GenPoints(GenPointsArgs),
    /// Solve an interpolation problem and report its errors.
    Interpolate(InterpolateArgs),
    /// Scan the Lebesgue constant of the Lagrange basis.
    Lebesgue(LebesgueArgs),
    /// Fit the exponential decay of one Lagrange function.
    Decay(DecayArgs),
    /// Run a convergence study over refined center sets.
    Converge(ConvergeArgs),
    /// Bracket L_p stability ratios of the Lagrange basis.
    Stability(StabilityArgs),
    /// Compare a closed-form kernel against its spectral expansion.
    KernelCheck(KernelCheckArgs),
}

/// Center-set input: a CSV file, or generation flags.
#[derive(Args)]
struct PointSource {
    /// Point-set CSV produced by gen-points.
    #[arg(long)]
    points: Option<PathBuf>,
    /// Manifold: sphere1 | sphere2 | so3 (generation mode).
    #[arg(long)]
    manifold: Option<String>,
    /// Generator: fibonacci | random | greedy-net (generation mode).
    #[arg(long)]
    method: Option<String>,
    /// Point count (generation mode).
    #[arg(long)]
    n: Option<usize>,
    /// Covering radius for greedy-net (generation mode).
    #[arg(long)]
    epsilon: Option<f64>,
}

impl PointSource {
    fn resolve(&self, seed: u64) -> Result<(PointSet, GenMethod)> {
        if let Some(path) = &self.points {
            return Ok((load_point_set(path)?, GenMethod::Random));
        }
        let manifold = ManifoldId::parse(self.manifold.as_deref().ok_or_else(|| {
            Error::InvalidInput("need either --points or --manifold/--method".into())
        })?)?;
        let method = GenMethod::parse(self.method.as_deref().unwrap_or("random"))?;
        let size = match (self.n, self.epsilon) {
            (Some(n), None) => SizeSpec::Count(n),
            (None, Some(e)) => SizeSpec::Epsilon(e),
            _ => {
                return Err(Error::InvalidInput(
                    "give exactly one of --n and --epsilon".into(),
                ))
            }
        };
        Ok((generate_points(manifold, method, size, seed)?, method))
    }
}

#[derive(Args)]
struct GenPointsArgs {
    #[command(flatten)]
    source: PointSource,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct InterpolateArgs {
    #[command(flatten)]
    source: PointSource,
    /// Kernel preset name (e.g. rss-s2-m2) or a kernel JSON file.
    #[arg(long)]
    kernel: String,
    /// Target preset (const | exp-dot-u | harmonic-mix) or a samples CSV.
    #[arg(long)]
    target: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Probe size as a multiple of the center count.
    #[arg(long, default_value_t = 10)]
    probe_factor: usize,
    /// Gauss-Legendre level of the error quadrature.
    #[arg(long, default_value_t = 30)]
    quad_level: usize,
    /// Output interpolant JSON path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct LebesgueArgs {
    #[command(flatten)]
    source: PointSource,
    #[arg(long)]
    kernel: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    probe_factor: usize,
    /// Output prefix: writes <out>.json and <out>.csv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DecayArgs {
    #[command(flatten)]
    source: PointSource,
    #[arg(long)]
    kernel: String,
    /// Index of the center whose Lagrange function is profiled.
    #[arg(long, default_value_t = 0)]
    xi: usize,
    #[arg(long, default_value_t = 24)]
    bins: usize,
    /// Upper end of the fit window in radians (default 0.9·diameter).
    #[arg(long)]
    r_cut: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    probe_factor: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ConvergeArgs {
    /// Manifold: sphere1 | sphere2 | so3.
    #[arg(long)]
    manifold: String,
    /// Generator for every refinement level.
    #[arg(long, default_value = "fibonacci")]
    method: String,
    /// Comma-separated center counts, strictly increasing.
    #[arg(long, value_delimiter = ',')]
    ns: Vec<usize>,
    #[arg(long)]
    kernel: String,
    #[arg(long)]
    target: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    probe_factor: usize,
    #[arg(long, default_value_t = 30)]
    quad_level: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct StabilityArgs {
    #[command(flatten)]
    source: PointSource,
    #[arg(long)]
    kernel: String,
    /// Lebesgue exponent: 1 | 2 | inf.
    #[arg(long, default_value = "2")]
    p: String,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    probe_factor: usize,
    #[arg(long, default_value_t = 30)]
    quad_level: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct KernelCheckArgs {
    /// Closed-form kernel preset or JSON file.
    #[arg(long)]
    kernel: String,
    /// Truncation degree of the spectral comparison kernel.
    #[arg(long, default_value_t = 200)]
    lmax: usize,
    #[arg(long, default_value_t = 200)]
    grid: usize,
    /// Smallest geodesic distance on the comparison grid.
    #[arg(long, default_value_t = 0.05)]
    omega_min: f64,
    #[arg(long)]
    out: PathBuf,
}

/// Runs the CLI on the given argument list and returns the process exit
/// code. The binary is a thin wrapper over this; tests call it directly.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    let threads = cli
        .threads
        .or_else(|| {
            std::env::var("MANIFOLD_SPLINES_THREADS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(0); // 0: rayon picks the available parallelism
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot build thread pool: {e}");
            return 4;
        }
    };
    let outcome = pool.install(|| dispatch(cli.command));
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Numerical(_) => 4,
        _ => 3,
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::GenPoints(a) => cmd_gen_points(a),
        Command::Interpolate(a) => cmd_interpolate(a),
        Command::Lebesgue(a) => cmd_lebesgue(a),
        Command::Decay(a) => cmd_decay(a),
        Command::Converge(a) => cmd_converge(a),
        Command::Stability(a) => cmd_stability(a),
        Command::KernelCheck(a) => cmd_kernel_check(a),
    }
}

/// Loads a kernel from a preset name, or from a JSON file when the
/// argument names an existing file.
fn load_kernel(arg: &str) -> Result<KernelSpec> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = fs::read_to_string(path)?;
        let value: serde_json::Value = serde_json::from_str(&text)?;
        KernelSpec::from_json(&value)
    } else {
        kernels::preset(arg)
    }
}

/// Probe set for error and Lebesgue scans: `factor`·N points from the
/// centers' generator family, re-seeded so probe and centers never
/// coincide by construction.
fn make_probe(
    manifold: ManifoldId,
    method: GenMethod,
    n_centers: usize,
    factor: usize,
    seed: u64,
) -> Result<PointSet> {
    let method = match method {
        GenMethod::Fibonacci => GenMethod::Fibonacci,
        _ => GenMethod::Random,
    };
    generate_points(
        manifold,
        method,
        SizeSpec::Count(factor.max(1) * n_centers),
        seed ^ 0x9e37_79b9_7f4a_7c15,
    )
}

/// Writes bytes to a temporary sibling of `path` and renames into place.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

fn print_json(value: &serde_json::Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn cmd_gen_points(a: GenPointsArgs) -> Result<()> {
    let (set, method) = a.source.resolve(a.seed)?;
    let probe = make_probe(set.manifold, method, set.len(), 10, a.seed)?;
    let stats = mesh_stats(&set, &probe)?;
    save_point_set(&set, &a.out)?;
    print_json(&json!({
        "manifold": set.manifold.name(),
        "n": set.len(),
        "h": stats.h,
        "q": stats.q,
        "rho": stats.rho,
    }))
}

/// Target-samples CSV: the geometry CSV format with one extra trailing
/// value column per row.
fn read_samples_csv(path: &Path) -> Result<(PointSet, DVector<f64>)> {
    let reader = BufReader::new(fs::File::open(path)?);
    let mut manifold: Option<ManifoldId> = None;
    let mut pts = Vec::new();
    let mut vals = Vec::new();
    for line in reader.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(name) = rest.trim().strip_prefix("manifold=") {
                manifold = Some(ManifoldId::parse(name.trim())?);
            }
            continue;
        }
        let m =
            manifold.ok_or_else(|| Error::InvalidInput("missing `# manifold=` header".into()))?;
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| {
                f.trim()
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad number `{f}`")))
            })
            .collect::<Result<_>>()?;
        if fields.len() != m.ambient_dim() + 1 {
            return Err(Error::InvalidInput(format!(
                "expected {} columns, found {}",
                m.ambient_dim() + 1,
                fields.len()
            )));
        }
        pts.push(Point::new(m, &fields[..m.ambient_dim()])?);
        vals.push(fields[m.ambient_dim()]);
    }
    let m = manifold.ok_or_else(|| Error::InvalidInput("empty samples file".into()))?;
    Ok((PointSet::new(m, pts)?, DVector::from_vec(vals)))
}

fn interpolant_json(sys: &SaddleSystem, s: &crate::interp::Interpolant) -> serde_json::Value {
    json!({
        "manifold": sys.manifold().name(),
        "kernel": sys.kernel.to_json(),
        "n": sys.n_centers(),
        "aux_dim": sys.aux_dim(),
        "a": s.a.as_slice(),
        "b": s.b.as_slice(),
        "residual": s.residual,
        "side_residual": s.side_residual,
        "condition_estimate": sys.condition_estimate,
    })
}

fn cmd_interpolate(a: InterpolateArgs) -> Result<()> {
    let kernel = load_kernel(&a.kernel)?;
    let target_path = Path::new(&a.target);
    let (centers, method, data, target) = if target_path.is_file() {
        let (pts, vals) = read_samples_csv(target_path)?;
        (pts, GenMethod::Random, vals, None)
    } else {
        let target = Target::parse(&a.target)?;
        let (pts, method) = a.source.resolve(a.seed)?;
        let data = DVector::from_fn(pts.len(), |i, _| target.eval(pts.manifold, pts.point(i)));
        (pts, method, data, Some(target))
    };
    if centers.manifold != kernel.manifold {
        return Err(Error::InvalidInput(format!(
            "kernel is on {}, points on {}",
            kernel.manifold.name(),
            centers.manifold.name()
        )));
    }
    let aux = aux_space(kernel.manifold, kernel.m)?;
    let sys = SaddleSystem::assemble(kernel, aux, centers)?;
    let s = sys.solve_interpolant(&data)?;
    write_json(&a.out, &interpolant_json(&sys, &s))?;

    let mut report = json!({
        "residual": s.residual,
        "side_residual": s.side_residual,
    });
    if let Some(target) = target {
        let manifold = sys.manifold();
        let probe = make_probe(manifold, method, sys.n_centers(), a.probe_factor, a.seed)?;
        let sup_error = probe
            .points()
            .par_iter()
            .map(|x| {
                sys.eval_interpolant(&s, x)
                    .map(|v| (v - target.eval(manifold, x)).abs())
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0f64, f64::max);
        let quad = quadrature(manifold, a.quad_level)?;
        let l2_error = l2_error(&sys, &s, &target, &quad);
        report["sup_error"] = json!(sup_error);
        report["l2_error"] = json!(l2_error);
    }
    print_json(&report)
}

fn l2_error(
    sys: &SaddleSystem,
    s: &crate::interp::Interpolant,
    target: &Target,
    quad: &QuadratureRule,
) -> f64 {
    quad.integrate(|x| {
        let d = sys.eval_interpolant(s, x).unwrap() - target.eval(sys.manifold(), x);
        d * d
    })
    .max(0.0)
    .sqrt()
}

/// Builds the saddle system for an analysis command.
fn assemble(
    source: &PointSource,
    kernel_arg: &str,
    seed: u64,
) -> Result<(SaddleSystem, GenMethod)> {
    let kernel = load_kernel(kernel_arg)?;
    let (centers, method) = source.resolve(seed)?;
    if centers.manifold != kernel.manifold {
        return Err(Error::InvalidInput(format!(
            "kernel is on {}, points on {}",
            kernel.manifold.name(),
            centers.manifold.name()
        )));
    }
    let aux = aux_space(kernel.manifold, kernel.m)?;
    Ok((SaddleSystem::assemble(kernel, aux, centers)?, method))
}

/// Writes `<out>.json` and `<out>.csv` for a report, echoing the JSON.
fn emit_report(
    out: &Path,
    value: &serde_json::Value,
    csv: impl FnOnce(&mut Vec<u8>) -> Result<()>,
) -> Result<()> {
    write_json(&out.with_extension("json"), value)?;
    let mut buf = Vec::new();
    csv(&mut buf)?;
    write_atomic(&out.with_extension("csv"), &buf)?;
    print_json(value)
}

fn cmd_lebesgue(a: LebesgueArgs) -> Result<()> {
    let (sys, method) = assemble(&a.source, &a.kernel, a.seed)?;
    let probe = make_probe(
        sys.manifold(),
        method,
        sys.n_centers(),
        a.probe_factor,
        a.seed,
    )?;
    let report = lebesgue_constant(&sys, &probe)?;
    emit_report(&a.out, &serde_json::to_value(&report)?, |w| {
        analysis::write_lebesgue_csv(&report, w)
    })
}

fn cmd_decay(a: DecayArgs) -> Result<()> {
    let (sys, method) = assemble(&a.source, &a.kernel, a.seed)?;
    let probe = make_probe(
        sys.manifold(),
        method,
        sys.n_centers(),
        a.probe_factor,
        a.seed,
    )?;
    let report = decay_profile(&sys, a.xi, &probe, a.bins, a.r_cut)?;
    emit_report(&a.out, &serde_json::to_value(&report)?, |w| {
        analysis::write_decay_csv(&report, w)
    })
}

fn cmd_converge(a: ConvergeArgs) -> Result<()> {
    let manifold = ManifoldId::parse(&a.manifold)?;
    let method = GenMethod::parse(&a.method)?;
    let kernel = load_kernel(&a.kernel)?;
    let target = Target::parse(&a.target)?;
    if a.ns.is_empty() {
        return Err(Error::InvalidInput("--ns must list center counts".into()));
    }
    let sets: Vec<PointSet> =
        a.ns.iter()
            .map(|n| generate_points(manifold, method, SizeSpec::Count(*n), a.seed))
            .collect::<Result<_>>()?;
    let n_max = *a.ns.iter().max().unwrap();
    let probe = make_probe(manifold, method, n_max, a.probe_factor, a.seed)?;
    let quad = quadrature(manifold, a.quad_level)?;
    let aux = aux_space(kernel.manifold, kernel.m)?;
    let report = convergence_study(&kernel, &aux, &target, &sets, &probe, &quad)?;
    emit_report(&a.out, &serde_json::to_value(&report)?, |w| {
        analysis::write_convergence_csv(&report, w)
    })
}

fn cmd_stability(a: StabilityArgs) -> Result<()> {
    let p = match a.p.as_str() {
        "1" => 1.0,
        "2" => 2.0,
        "inf" => f64::INFINITY,
        other => {
            return Err(Error::InvalidInput(format!(
                "p must be 1, 2 or inf, not `{other}`"
            )))
        }
    };
    let (sys, method) = assemble(&a.source, &a.kernel, a.seed)?;
    let probe = make_probe(
        sys.manifold(),
        method,
        sys.n_centers(),
        a.probe_factor,
        a.seed,
    )?;
    let quad = quadrature(sys.manifold(), a.quad_level)?;
    let report = stability_ratios(&sys, &quad, &probe, p, a.trials, a.seed)?;
    emit_report(&a.out, &serde_json::to_value(&report)?, |w| {
        analysis::write_stability_csv(&report, w)
    })
}

fn cmd_kernel_check(a: KernelCheckArgs) -> Result<()> {
    let closed = load_kernel(&a.kernel)?;
    let spectral = KernelSpec::spectral_surface_spline(closed.manifold, closed.m, a.lmax)?;
    let report = kernels::spectral_match(&closed, &spectral, a.grid, a.omega_min)?;
    let value = serde_json::to_value(&report)?;
    write_json(&a.out, &value)?;
    print_json(&value)
}
