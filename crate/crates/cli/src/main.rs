//! `nodaldiv`: generate decomposed surfaces, construct the nodal
//! eigenfunction, verify it, and run refinement sweeps.

mod config;
mod error;
mod rundir;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nodaldiv::construct::{construct, ConstructionParams};
use nodaldiv::mesh::{build_from_spec, load_mesh, Side, SurfaceSpec};
use nodaldiv::verify::{convergence_sweep, mesh_spacing, VerificationReport, VerifyOptions, Verifier};
use nodaldiv::{Construction, Mesh, MeshError};

use config::{parse_levels, Overrides, RunConfig, Source, OUT_ENV};
use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "nodaldiv", version, about = "Eigenfunctions whose nodal set is a prescribed dividing multicurve")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the labeled mesh and write mesh.off.
    Generate(RunArgs),
    /// Build F, u and Ω and write the fields and parameters.
    Construct(RunArgs),
    /// Run every check and write report.txt; exit 1 if any fails.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        /// Verify a directory written by `construct` instead of rebuilding;
        /// the report goes there unless --out or NODALDIV_OUT is set.
        #[arg(long, value_name = "DIR", conflicts_with = "sweep")]
        from: Option<PathBuf>,
        /// Sweep levels a..b (inclusive) and write sweep.csv.
        #[arg(long, value_name = "A..B", value_parser = parse_levels)]
        sweep: Option<std::ops::RangeInclusive<u32>>,
    },
    /// Refinement sweep over levels a..b (inclusive, default 0..2).
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_name = "A..B", value_parser = parse_levels, default_value = "0..2")]
        levels: std::ops::RangeInclusive<u32>,
    },
    /// Summarize a written report; exit 1 if it records a failure.
    Report {
        /// Run directory (default: the configured output directory).
        #[arg(long, value_name = "DIR")]
        from: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        config: Option<PathBuf>,
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    /// Config file with [run] and [tolerances] sections.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// sphere-equator, sphere-two-circles, torus-two-meridians or genus2-separating.
    #[arg(long)]
    preset: Option<String>,
    /// Surface spec file.
    #[arg(long, value_name = "FILE")]
    spec: Option<PathBuf>,
    /// Labeled OFF mesh.
    #[arg(long, value_name = "FILE")]
    mesh: Option<PathBuf>,
    #[arg(long)]
    level: Option<u32>,
    #[arg(long)]
    rho0: Option<f64>,
    #[arg(long)]
    collar_rings: Option<usize>,
    #[arg(long)]
    margin: Option<f64>,
    /// Smooth F near the seams.
    #[arg(long)]
    smooth: bool,
    /// Eigen-identity tolerance (default 0.2·2^-level).
    #[arg(long)]
    eigen_tol: Option<f64>,
    /// Faces sampled by the adaptedness check.
    #[arg(long)]
    samples: Option<usize>,
    /// Output directory; NODALDIV_OUT takes precedence.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Seed of the adaptedness sampling.
    #[arg(long)]
    seed: Option<u64>,
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let base = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let o = Overrides {
            preset: self.preset.clone(),
            spec: self.spec.clone(),
            mesh: self.mesh.clone(),
            level: self.level,
            rho0: self.rho0,
            collar_rings: self.collar_rings,
            margin: self.margin,
            smooth: self.smooth,
            eigen_tol: self.eigen_tol,
            samples: self.samples,
            out: self.out.clone(),
            seed: self.seed,
        };
        base.apply(&o, env_out())
    }
}

fn env_out() -> Option<PathBuf> {
    std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from)
}

fn surface_spec(cfg: &RunConfig, level: Option<u32>) -> Result<SurfaceSpec, CliError> {
    let mut spec = match &cfg.source {
        Some(Source::Preset(name)) => SurfaceSpec::preset(name, 0)?,
        Some(Source::Spec(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.clone(), e))?;
            SurfaceSpec::parse(&text).map_err(|e| match e {
                MeshError::Parse { line, msg } => CliError::Config(format!("{}: line {line}: {msg}", path.display())),
                other => other.into(),
            })?
        }
        Some(Source::Mesh(_)) => {
            return Err(CliError::Config("a mesh file has no refinement levels; use --preset or --spec".into()))
        }
        None => return Err(CliError::Config("no input: give --preset, --spec or --mesh".into())),
    };
    if let Some(l) = level.or(cfg.level) {
        spec.level = l;
    }
    if let Some(r) = cfg.collar_rings {
        spec.collar_rings = r;
    }
    Ok(spec)
}

/// The mesh of the configured source and its level.
fn build_mesh(cfg: &RunConfig) -> Result<(Mesh, u32), CliError> {
    if let Some(Source::Mesh(path)) = &cfg.source {
        if !path.exists() {
            return Err(CliError::Config(format!("{}: no such mesh file", path.display())));
        }
        return Ok((load_mesh(path)?, cfg.level.unwrap_or(0)));
    }
    let spec = surface_spec(cfg, None)?;
    Ok((build_from_spec(&spec)?, spec.level))
}

fn construction_params(cfg: &RunConfig) -> ConstructionParams<f64> {
    ConstructionParams { rho0: cfg.rho0, margin: cfg.margin, smooth_seam: cfg.smooth, ..Default::default() }
}

fn verify_options(cfg: &RunConfig, level: u32) -> VerifyOptions {
    VerifyOptions { level, eigen_tol: cfg.eigen_tol, samples: cfg.samples, seed: cfg.seed }
}

fn source_meta(cfg: &RunConfig) -> (&'static str, String) {
    match &cfg.source {
        Some(Source::Preset(n)) => ("run.preset", n.clone()),
        Some(Source::Spec(p)) => ("run.spec", p.display().to_string()),
        Some(Source::Mesh(p)) => ("run.mesh", p.display().to_string()),
        None => ("run.source", "none".into()),
    }
}

fn print_summary(mesh: &Mesh) {
    let t = mesh.tri();
    println!("vertices {}, edges {}, faces {}", t.n_vertices(), t.n_edges(), t.n_faces());
    println!("euler characteristic {}", mesh.euler_characteristic());
    for c in mesh.collars() {
        println!("circle {}: {} vertices, {} collar rings", c.circle, c.rings[0].len(), c.rings.len());
    }
    for p in mesh.pieces() {
        let side = match p.side {
            Side::Minus => "minus",
            Side::Plus => "plus",
        };
        let circles: Vec<String> = p.circles.iter().map(|c| c.to_string()).collect();
        let genus = (2 - p.euler - p.circles.len() as i64) / 2;
        println!("{side} piece: genus {genus}, boundary {}, euler {}", circles.join(" "), p.euler);
    }
}

fn cmd_generate(cfg: &RunConfig) -> Result<(), CliError> {
    let (mesh, level) = build_mesh(cfg)?;
    rundir::create(&cfg.out)?;
    let path = rundir::write_mesh(&cfg.out, &mesh)?;
    println!("level {level}");
    print_summary(&mesh);
    println!("wrote {}", path.display());
    Ok(())
}

fn run_construct(cfg: &RunConfig) -> Result<(Mesh, Construction, u32), CliError> {
    let (mesh, level) = build_mesh(cfg)?;
    let result = construct(&mesh, &construction_params(cfg))?;
    let p = &result.params;
    for r in &p.rejected_rho0 {
        println!("retry: rho0 = {r} gives a slope A >= 1/2, halving");
    }
    println!("rho0 = {}", p.rho0);
    for a in &p.slopes {
        let side = if a.side == Side::Minus { "minus" } else { "plus" };
        println!("A[{} {side}] = {:.6}", a.circle, a.a);
    }
    println!("C = {:.6}, epsilon = {:.6}, sigma = {:.6}", p.c, p.epsilon, p.sigma);
    rundir::create(&cfg.out)?;
    rundir::save_construction(&cfg.out, &mesh, &result, level)?;
    println!("wrote fields to {}", cfg.out.display());
    Ok((mesh, result, level))
}

fn print_report(report: &VerificationReport) {
    for c in &report.checks {
        let worst = c.worst.map(|w| format!(" at {w}")).unwrap_or_default();
        println!(
            "{:<18} {}  value {:.6e}  tol {:.3e}{worst}",
            c.name,
            if c.pass { "PASS" } else { "FAIL" },
            c.value,
            c.tol
        );
    }
    println!(
        "eigen residual {:.6e} (interior {:.6e}, seam {:.6e}); min Omega/omega {:.6e}; min contact {:.6e}",
        report.eigen_residual, report.interior_residual, report.seam_residual, report.min_omega, report.min_contact
    );
}

fn finish(report: &VerificationReport) -> Result<(), CliError> {
    print_report(report);
    let failing: Vec<String> = report.failing().iter().map(|s| s.to_string()).collect();
    if failing.is_empty() {
        println!("all checks pass");
        Ok(())
    } else {
        Err(CliError::Failed(failing))
    }
}

fn write_report(dir: &Path, report: &VerificationReport) -> Result<(), CliError> {
    rundir::create(dir)?;
    rundir::write_text(dir.join(rundir::REPORT), &report.to_text())?;
    if !report.sweep.is_empty() {
        rundir::write_text(dir.join(rundir::SWEEP_CSV), &report.sweep_csv())?;
    }
    println!("wrote {}", dir.join(rundir::REPORT).display());
    Ok(())
}

fn verify_one(
    cfg: &RunConfig,
    mesh: &Mesh,
    result: &Construction,
    level: u32,
    source: (&str, String),
) -> Result<(), CliError> {
    let v = Verifier::new(mesh, result, verify_options(cfg, level))?;
    let mut report = v.run();
    report.meta.insert(0, (source.0.to_string(), source.1));
    report.push_meta("run.h", format!("{:.16e}", mesh_spacing(mesh)));
    if let Some(e) = &cfg.eigen_tol {
        report.push_meta("tolerances.eigen", format!("{e:.16e}"));
    }
    write_report(&cfg.out, &report)?;
    if let Ok(r) = v.residual_field() {
        rundir::write_vertex(cfg.out.join(rundir::RESIDUAL), &r)?;
    }
    finish(&report)
}

fn cmd_verify(cfg: &RunConfig, from: Option<&Path>) -> Result<(), CliError> {
    match from {
        Some(dir) => {
            let (mesh, result, level) = rundir::load_construction(dir)?;
            let level = cfg.level.unwrap_or(level);
            verify_one(cfg, &mesh, &result, level, ("run.from", dir.display().to_string()))
        }
        None => {
            let (mesh, result, level) = run_construct(cfg)?;
            verify_one(cfg, &mesh, &result, level, source_meta(cfg))
        }
    }
}

fn cmd_sweep(cfg: &RunConfig, levels: std::ops::RangeInclusive<u32>) -> Result<(), CliError> {
    surface_spec(cfg, None)?;
    let outcome = convergence_sweep(
        levels,
        |l| build_from_spec(&surface_spec(cfg, Some(l)).map_err(|e| MeshError::Spec(e.to_string()))?),
        &construction_params(cfg),
        verify_options(cfg, 0),
    )?;
    for r in &outcome.rows {
        println!(
            "level {}  h {:.4e}  residual {:.6e}  interior {:.6e}  min Omega {:.6e}  min contact {:.6e}  seam worst {:.6e}",
            r.level, r.h, r.eigen_residual, r.interior_residual, r.min_omega, r.min_contact, r.seam_worst
        );
    }
    let mut report = outcome.into_report();
    let source = source_meta(cfg);
    report.meta.insert(0, (source.0.to_string(), source.1));
    write_report(&cfg.out, &report)?;
    println!("wrote {}", cfg.out.join(rundir::SWEEP_CSV).display());
    finish(&report)
}

fn cmd_report(dir: &Path) -> Result<(), CliError> {
    let path = dir.join(rundir::REPORT);
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::Io(path.clone(), e))?;
    let report = VerificationReport::parse(&text).map_err(|m| CliError::Config(format!("{}: {m}", path.display())))?;
    for (k, v) in &report.meta {
        if k.starts_with("sweep.row.") {
            println!("{k} = {v}");
        }
    }
    finish(&report)
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate(a) => cmd_generate(&a.resolve()?),
        Command::Construct(a) => run_construct(&a.resolve()?).map(|_| ()),
        Command::Verify { run, from, sweep } => {
            let mut cfg = run.resolve()?;
            // A checked directory receives its own report unless told otherwise.
            if let (Some(dir), None, None) = (&from, &run.out, env_out()) {
                cfg.out = dir.clone();
            }
            match sweep {
                Some(levels) => cmd_sweep(&cfg, levels),
                None => cmd_verify(&cfg, from.as_deref()),
            }
        }
        Command::Sweep { run, levels } => cmd_sweep(&run.resolve()?, levels),
        Command::Report { from, config, out } => {
            let dir = match from {
                Some(d) => d,
                None => {
                    let cfg = match &config {
                        Some(p) => RunConfig::load(p)?,
                        None => RunConfig::default(),
                    };
                    let o = Overrides { out, ..Default::default() };
                    cfg.apply(&o, env_out())?.out
                }
            };
            cmd_report(&dir)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
