//! `linefield`: build, verify, classify and scan line fields from the shell.
//!
//! Exit status: 0 on success or a passing check, 1 when the mathematical
//! answer is negative, 2 on usage or input errors.

mod params;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use linefield::analysis::{
    annular_norms, classify_domain, refinement_levels, singularity_scan, verify_solution, FieldSource,
    LiftStatus, VerdictStatus, VerifyOptions,
};
use linefield::geometry::{ClosedCurve, DomainMode, DomainSpec, Vec2};
use linefield::grid::{divergence_tensor, rasterize, DivergenceMode, RasterGrid};
use linefield::io::{
    load_domain, load_field, save_field, save_raster_line, save_raster_scalar, save_report, FieldMeta,
};
use linefield::patterns::{angle_dist_mod_pi, LineField, PatternSpec};

#[derive(Debug, Parser)]
#[command(name = "linefield", version, about = "Line fields with P div P = 0 on planar domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the exact solution of a tubular domain.
    Solve(SolveArgs),
    /// Check a field against the solution conditions.
    Verify(VerifyArgs),
    /// Decide whether a domain is a tube.
    Classify(ClassifyArgs),
    /// Write a catalog pattern.
    Pattern(PatternArgs),
    /// Report defects, orientability and divergence concentration.
    Scan(ScanArgs),
    /// Tabulate the L^p norm of div P over annuli around the defect.
    Norms(NormsArgs),
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long)]
    domain: PathBuf,
    #[arg(long)]
    h: f64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    field: PathBuf,
    #[arg(long)]
    domain: PathBuf,
    /// Rebuild the recorded pattern at this many coarser levels for the L2 growth test.
    #[arg(long)]
    refine: Option<usize>,
    #[arg(long)]
    report: PathBuf,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[arg(long)]
    domain: PathBuf,
    /// Boundary samples per component.
    #[arg(long, default_value_t = 256)]
    samples: usize,
    #[arg(long)]
    report: PathBuf,
}

#[derive(Debug, Args)]
struct PatternArgs {
    #[arg(long)]
    name: String,
    /// `key=value` pairs; points are `x,y`.
    #[arg(long, num_args = 0..)]
    params: Vec<String>,
    /// Domain file; the unit disk when omitted.
    #[arg(long)]
    domain: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0 / 128.0)]
    h: f64,
    #[arg(long)]
    out: PathBuf,
    /// Optional PPM rendering of the field.
    #[arg(long)]
    image: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ScanArgs {
    #[arg(long)]
    field: PathBuf,
    #[arg(long)]
    report: PathBuf,
    /// Optional PGM map of |div P|.
    #[arg(long)]
    map: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct NormsArgs {
    #[arg(long)]
    field: PathBuf,
    #[arg(long)]
    p: f64,
    #[arg(long, num_args = 0.., value_delimiter = ',')]
    eps_list: Vec<f64>,
    /// Outer radius of the annuli.
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    #[arg(long)]
    report: Option<PathBuf>,
}

/// Result of a command that ran to completion.
enum Outcome {
    Yes,
    No,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(if code == 0 { 0 } else { 2 });
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    let result = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Verify(a) => verify(a),
        Command::Classify(a) => classify(a),
        Command::Pattern(a) => pattern(a),
        Command::Scan(a) => scan(a),
        Command::Norms(a) => norms(a),
    };
    match result {
        Ok(Outcome::Yes) => ExitCode::SUCCESS,
        Ok(Outcome::No) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("LINEFIELD_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| anyhow!("LINEFIELD_THREADS must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn positive_h(h: f64) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        bail!("--h must be a positive number, got {h}");
    }
    Ok(h)
}

fn domain_from(path: &Path) -> Result<DomainSpec> {
    load_domain(path).with_context(|| format!("loading domain {}", path.display()))
}

fn field_from(path: &Path) -> Result<(LineField, FieldMeta)> {
    load_field(path).with_context(|| format!("loading field {}", path.display()))
}

fn write_field(path: &Path, field: &LineField, grid: &RasterGrid, pattern: PatternSpec) -> Result<()> {
    let meta = FieldMeta::new(*field.lattice(), Some(pattern)).with_components(grid);
    save_field(path, field, &meta).with_context(|| format!("writing {}", path.display()))
}

fn verdict_word(status: VerdictStatus) -> &'static str {
    match status {
        VerdictStatus::Pass => "pass",
        VerdictStatus::Fail => "fail",
        VerdictStatus::Inconclusive => "inconclusive",
    }
}

fn solve(a: SolveArgs) -> Result<Outcome> {
    let h = positive_h(a.h)?;
    let spec = domain_from(&a.domain)?;
    if spec.mode() != DomainMode::Tubular {
        bail!("solve needs a tubular domain (curve and delta)");
    }
    let grid = rasterize(&spec, h)?;
    let pattern = PatternSpec::Tubular;
    let field = pattern.build(&spec, &grid)?;
    write_field(&a.out, &field, &grid, pattern.clone())?;
    let Some(report_path) = a.report else {
        println!("solve: wrote {} cells", field.defined_count());
        return Ok(Outcome::Yes);
    };
    // one coarser level when the tube stays resolved there
    let levels = if rasterize(&spec, 2.0 * h).is_ok() {
        refinement_levels(h, 1)
    } else {
        vec![h]
    };
    let report = verify_solution(
        FieldSource::Analytic {
            pattern: &pattern,
            domain: &spec,
            h_levels: &levels,
        },
        &VerifyOptions::default(),
    )?;
    save_report(&report_path, &report)?;
    println!("solve: self-verification {}", verdict_word(report.verdict.status));
    Ok(if report.failed() { Outcome::No } else { Outcome::Yes })
}

fn verify(a: VerifyArgs) -> Result<Outcome> {
    let (field, meta) = field_from(&a.field)?;
    let spec = domain_from(&a.domain)?;
    let grid = rasterize(&spec, meta.h)?;
    if grid.lattice() != field.lattice() {
        bail!("the field grid does not match the raster of {} at h = {}", a.domain.display(), meta.h);
    }
    let options = VerifyOptions::default();
    let report = match a.refine {
        None | Some(0) => verify_solution(FieldSource::Given { field: &field, grid: &grid }, &options)?,
        Some(k) => {
            let pattern = meta
                .pattern
                .as_ref()
                .ok_or_else(|| anyhow!("--refine needs a field written by `pattern` or `solve`"))?;
            let rebuilt = pattern.build(&spec, &grid)?;
            if rebuilt.mask() != field.mask() || max_angle_gap(&rebuilt, &field) > 1e-9 {
                bail!("the field differs from its recorded {} pattern", pattern.name());
            }
            let levels = refinement_levels(meta.h, k);
            verify_solution(
                FieldSource::Analytic {
                    pattern,
                    domain: &spec,
                    h_levels: &levels,
                },
                &options,
            )?
        }
    };
    save_report(&a.report, &report)?;
    println!("verify: {}", verdict_word(report.verdict.status));
    for r in &report.verdict.reasons {
        println!("  {r}");
    }
    Ok(if report.failed() { Outcome::No } else { Outcome::Yes })
}

fn max_angle_gap(a: &LineField, b: &LineField) -> f64 {
    (0..a.lattice().len())
        .filter(|&i| a.is_defined(i))
        .map(|i| angle_dist_mod_pi(a.theta(i), b.theta(i)))
        .fold(0.0, f64::max)
}

fn classify(a: ClassifyArgs) -> Result<Outcome> {
    let spec = domain_from(&a.domain)?;
    let (lo, hi) = spec.bounding_box();
    let h = (hi - lo).norm() / 1024.0;
    let grid = rasterize(&spec, h)?;
    let verdict = classify_domain(&spec, &grid, a.samples)?;
    save_report(&a.report, &verdict)?;
    if verdict.is_tubular {
        println!("classify: tubular, delta {:.6}", verdict.delta.unwrap_or(f64::NAN));
        Ok(Outcome::Yes)
    } else {
        println!("classify: not tubular");
        for r in &verdict.reasons {
            println!("  {r}");
        }
        Ok(Outcome::No)
    }
}

fn pattern(a: PatternArgs) -> Result<Outcome> {
    let pattern = params::pattern_from_params(&a.name, &a.params)?;
    let h = positive_h(a.h)?;
    let spec = match &a.domain {
        Some(p) => domain_from(p)?,
        None => DomainSpec::raw(ClosedCurve::circle(Vec2::ZERO, 1.0)?, vec![]),
    };
    let grid = rasterize(&spec, h)?;
    let field = pattern.build(&spec, &grid)?;
    write_field(&a.out, &field, &grid, pattern)?;
    if let Some(img) = &a.image {
        save_raster_line(img, &field)?;
    }
    println!("pattern: wrote {} cells", field.defined_count());
    Ok(Outcome::Yes)
}

fn scan(a: ScanArgs) -> Result<Outcome> {
    let (field, _) = field_from(&a.field)?;
    let report = singularity_scan(&field)?;
    save_report(&a.report, &report)?;
    if let Some(map) = &a.map {
        let div = divergence_tensor(&field.to_tensor(), DivergenceMode::Interior)?.magnitude();
        save_raster_scalar(map, &div)?;
    }
    for d in &report.defects {
        println!(
            "defect {:?} charge {:+} at ({:.6}, {:.6})",
            d.kind, d.charge, d.position.x, d.position.y
        );
    }
    match report.lift {
        LiftStatus::Orientable => {
            println!("scan: orientable");
            Ok(Outcome::Yes)
        }
        LiftStatus::NonOrientable { winding, .. } => {
            println!("scan: not orientable, witness loop winding {winding:+}");
            Ok(Outcome::No)
        }
        LiftStatus::TooRough { jump } => {
            println!("scan: lift aborted, neighbor jump {jump:.3} rad");
            Ok(Outcome::No)
        }
    }
}

fn norms(a: NormsArgs) -> Result<Outcome> {
    if a.eps_list.is_empty() {
        bail!("--eps-list needs at least one radius");
    }
    let (field, meta) = field_from(&a.field)?;
    let center = match meta.pattern.as_ref().and_then(PatternSpec::defect_center) {
        Some(c) => c,
        None => {
            let report = singularity_scan(&field)?;
            report
                .defects
                .iter()
                .max_by(|x, y| x.charge.abs().total_cmp(&y.charge.abs()))
                .map(|d| d.position)
                .ok_or_else(|| anyhow!("the field has no defect to center the annuli on"))?
        }
    };
    let table = annular_norms(&field, center, a.radius, a.p, &a.eps_list)?;
    println!("eps\tnorm_pow");
    for r in &table.rows {
        println!("{}\t{:.9}", r.eps, r.value);
    }
    if let Some(s) = table.log_slope {
        println!("slope vs ln(1/eps): {s:.6}");
    }
    if let Some(path) = &a.report {
        save_report(path, &table)?;
    }
    Ok(Outcome::Yes)
}
