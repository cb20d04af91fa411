use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use prym_core::flow::{cylinder_modulus, decompose, DecompositionStatus, DEFAULT_STEP_CAP};
use prym_core::models::{
    enumerate_candidates, load_manifest, manifest_to_json, prym_three_cylinder_diagrams, table1_rows,
    CandidateSpec, Catalog, ModelRef, SearchBounds,
};
use prym_core::qfield::parse_quad;
use prym_core::veech::{
    audit_spec, commensurability_witness, AuditConfig, AuditReport, Verdict, DEFAULT_LENGTH_BOUND,
    DEFAULT_MAX_DIRECTIONS,
};
use prym_core::{TranslationSurface, Vec2};

mod render;

#[derive(Parser)]
#[command(name = "prym-audit", version)]
#[command(about = "Build, scan and audit three-cylinder Prym(2,2) candidate surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build every candidate of a manifest and print its stratum
    Validate {
        #[arg(long)]
        manifest: PathBuf,
    },
    /// Search every candidate of a manifest for a periodic direction with
    /// incommensurable moduli
    Audit {
        #[arg(long)]
        manifest: PathBuf,
        /// Report file; standard output when omitted
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        bounds: Bounds,
        /// Worker threads
        #[arg(long, env = "VEECH_AUDIT_JOBS")]
        jobs: Option<usize>,
        /// Directory for one SVG drawing per candidate
        #[arg(long)]
        render: Option<PathBuf>,
    },
    /// Decompose a surface file in one direction. Circumferences and heights
    /// are measured after the similarity taking v = (x, y) to (x² + y², 0),
    /// so both come out multiplied by |v|. Moduli are unaffected.
    Scan {
        surface: PathBuf,
        /// Two field elements separated by a comma, e.g. "1, sqrt(2)"
        #[arg(long)]
        direction: String,
        #[arg(long, default_value_t = DEFAULT_STEP_CAP)]
        step_cap: usize,
    },
    /// Draw a surface file, an audit report or one report of an audit output
    Render {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Report to draw when the input holds several
        #[arg(long, default_value_t = 0)]
        index: usize,
    },
    /// Write the surface of one manifest entry as a surface file
    Export {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grid search over rational twists and slits for every model and row
    Search {
        #[arg(long, default_value_t = 12)]
        twist_denominator: u32,
        #[arg(long, default_value_t = 12)]
        slit_denominator: u32,
        #[arg(long, default_value_t = DEFAULT_STEP_CAP)]
        step_cap: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate the diagram files of the eight models
    Diagrams {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(clap::Args, Clone)]
struct Bounds {
    /// Longest saddle connection whose direction is scanned
    #[arg(long, default_value_t = DEFAULT_LENGTH_BOUND.to_string())]
    length_bound: String,
    #[arg(long, default_value_t = DEFAULT_STEP_CAP)]
    step_cap: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_DIRECTIONS)]
    max_directions: usize,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Input(String),
}

type Result<T> = std::result::Result<T, CliError>;

/// Audit settings shared by every candidate of a run.
#[derive(Debug, Clone)]
struct RunConfig {
    length_bound: String,
    step_cap: usize,
    max_directions: usize,
    jobs: usize,
}

impl RunConfig {
    fn new(bounds: &Bounds, jobs: Option<usize>) -> Result<Self> {
        let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        if jobs == 0 || bounds.step_cap == 0 || bounds.max_directions == 0 {
            return Err(CliError::Input(
                "--jobs, --step-cap and --max-directions must be at least 1".into(),
            ));
        }
        Ok(RunConfig {
            length_bound: bounds.length_bound.clone(),
            step_cap: bounds.step_cap,
            max_directions: bounds.max_directions,
            jobs,
        })
    }

    fn audit_config(&self, d: u64) -> Result<AuditConfig> {
        let length_bound = parse_quad(&self.length_bound, Some(d))
            .map_err(|e| CliError::Input(format!("--length-bound: {e}")))?;
        if !length_bound.is_positive() {
            return Err(CliError::Input("--length-bound must be positive".into()));
        }
        Ok(AuditConfig {
            length_bound,
            step_cap: self.step_cap,
            max_directions: self.max_directions,
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
struct Summary {
    eliminated: usize,
    not_eliminated: usize,
    undetermined_totals: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct AuditOutput {
    reports: Vec<AuditReport>,
    summary: Summary,
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(out: Option<&Path>, contents: &str) -> Result<()> {
    match out {
        Some(path) => write(path, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn manifest(path: &Path) -> Result<Vec<CandidateSpec>> {
    load_manifest(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn surface_file(path: &Path) -> Result<TranslationSurface> {
    let text =
        String::from_utf8(read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    TranslationSurface::from_json(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn parse_direction(text: &str, d: u64) -> Result<Vec2> {
    let bad = |msg: String| CliError::Input(format!("--direction {text:?}: {msg}"));
    let (x, y) = text
        .split_once(',')
        .ok_or_else(|| bad("expected two components".into()))?;
    let x = parse_quad(x, Some(d)).map_err(|e| bad(e.to_string()))?;
    let y = parse_quad(y, Some(d)).map_err(|e| bad(e.to_string()))?;
    let v = Vec2::new(x, y);
    if v.is_zero() {
        return Err(bad("direction must be nonzero".into()));
    }
    Ok(v)
}

fn cmd_validate(path: &Path) -> Result<bool> {
    let specs = manifest(path)?;
    let catalog = Catalog::builtin();
    let mut ok = true;
    for (i, spec) in specs.iter().enumerate() {
        match spec.build(&catalog) {
            Ok(cand) => {
                let st = cand.surface.stratum();
                let involution = match &cand.involution {
                    Some(_) => "involution ok",
                    None => "no involution",
                };
                println!(
                    "{i}\t{}\tgenus {}\torders {:?}\tQ(sqrt {})\t{involution}",
                    spec.label(),
                    st.genus,
                    st.orders,
                    spec.d
                );
            }
            Err(e) => {
                ok = false;
                println!("{i}\t{}\tinvalid: {e}", spec.label());
            }
        }
    }
    Ok(ok)
}

fn cmd_audit(path: &Path, out: Option<&Path>, run: &RunConfig, render_dir: Option<&Path>) -> Result<bool> {
    let specs = manifest(path)?;
    let catalog = Catalog::builtin();
    let configs = specs
        .iter()
        .map(|s| run.audit_config(s.d))
        .collect::<Result<Vec<_>>>()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(run.jobs)
        .build()
        .map_err(|e| CliError::Input(e.to_string()))?;
    info!("auditing {} candidates with {} workers", specs.len(), run.jobs);
    let reports: Vec<AuditReport> = pool.install(|| {
        specs
            .par_iter()
            .zip(&configs)
            .enumerate()
            .map(|(i, (spec, config))| {
                let report = audit_spec(spec, &catalog, config)
                    .map_err(|e| CliError::Input(format!("entry {i}: {e}")))?;
                match report.verdict {
                    Verdict::Eliminated => info!("{i}: {} eliminated", spec.label()),
                    Verdict::NotEliminated => warn!("{i}: {} not eliminated", spec.label()),
                }
                Ok(report)
            })
            .collect::<Result<_>>()
    })?;
    let mut summary = Summary::default();
    for r in &reports {
        match r.verdict {
            Verdict::Eliminated => summary.eliminated += 1,
            Verdict::NotEliminated => summary.not_eliminated += 1,
        }
        summary.undetermined_totals += r.stats.undetermined;
    }
    if let Some(dir) = render_dir {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        for (i, r) in reports.iter().enumerate() {
            let svg = render::report(r, &catalog).map_err(CliError::Input)?;
            write(&dir.join(format!("candidate-{i}.svg")), &svg)?;
        }
    }
    let doc = AuditOutput { reports, summary };
    let mut text = serde_json::to_string_pretty(&doc).expect("reports serialize");
    text.push('\n');
    emit(out, &text)?;
    info!(
        "eliminated {}, not eliminated {}, undetermined directions {}",
        summary.eliminated, summary.not_eliminated, summary.undetermined_totals
    );
    Ok(summary.not_eliminated == 0)
}

fn cmd_scan(path: &Path, direction: &str, step_cap: usize) -> Result<bool> {
    let s = surface_file(path)?;
    let dir = parse_direction(direction, s.field())?;
    if step_cap == 0 {
        return Err(CliError::Input("--step-cap must be at least 1".into()));
    }
    let dec = decompose(&s, &dir, step_cap).map_err(|e| CliError::Input(e.to_string()))?;
    println!("direction ({}, {})", dec.direction.x, dec.direction.y);
    match &dec.status {
        DecompositionStatus::Undetermined { steps_exhausted } => {
            println!(
                "undetermined: a separatrix crossed {steps_exhausted} edges without reaching a cone point"
            );
        }
        DecompositionStatus::Periodic(p) => {
            println!("periodic: {} cylinders", p.cylinders.len());
            println!("cylinder\tcircumference\theight\tmodulus");
            let moduli: Vec<_> = p.cylinders.iter().map(cylinder_modulus).collect();
            for (i, (c, m)) in p.cylinders.iter().zip(&moduli).enumerate() {
                println!("{i}\t{}\t{}\t{m}", c.circumference, c.height);
            }
            match commensurability_witness(&moduli).map_err(|e| CliError::Input(e.to_string()))? {
                None => println!("parabolic"),
                Some((i, j, r)) => println!("VIOLATION: moduli of cylinders {i} and {j} have ratio {r}"),
            }
        }
    }
    Ok(true)
}

fn cmd_render(input: &Path, out: &Path, index: usize) -> Result<bool> {
    let bytes = read(input)?;
    let bad = |e: String| CliError::Input(format!("{}: {e}", input.display()));
    let value: Value = serde_json::from_slice(&bytes).map_err(|e| bad(e.to_string()))?;
    let catalog = Catalog::builtin();
    let svg = if value.get("polygons").is_some() {
        let s = surface_file(input)?;
        render::surface(&s, None)
    } else {
        let report: AuditReport = if value.get("reports").is_some() {
            let doc: AuditOutput = serde_json::from_value(value).map_err(|e| bad(e.to_string()))?;
            doc.reports
                .into_iter()
                .nth(index)
                .ok_or_else(|| bad(format!("no report {index}")))?
        } else {
            serde_json::from_value(value).map_err(|e| bad(e.to_string()))?
        };
        render::report(&report, &catalog).map_err(bad)?
    };
    write(out, &svg)?;
    Ok(true)
}

fn cmd_export(path: &Path, index: usize, out: Option<&Path>) -> Result<bool> {
    let specs = manifest(path)?;
    let spec = specs
        .get(index)
        .ok_or_else(|| CliError::Input(format!("manifest has no entry {index}")))?;
    let cand = spec
        .build(&Catalog::builtin())
        .map_err(|e| CliError::Input(format!("entry {index}: {e}")))?;
    let mut text = cand.surface.to_json();
    text.push('\n');
    emit(out, &text)?;
    Ok(true)
}

fn cmd_search(bounds: SearchBounds, out: Option<&Path>) -> Result<bool> {
    if bounds.twist_denominator == 0 || bounds.slit_denominator == 0 || bounds.step_cap == 0 {
        return Err(CliError::Input("search bounds must be at least 1".into()));
    }
    let catalog = Catalog::builtin();
    let mut specs = Vec::new();
    for (m, diagram) in catalog.models.iter().enumerate() {
        let model = ModelRef::Number(m as u32 + 1);
        for row in table1_rows() {
            let found = enumerate_candidates(&model, diagram, &row, bounds)
                .map_err(|e| CliError::Input(format!("model {model} row {}: {e}", row.index)))?;
            info!("model {model}, row {}: {} candidates", row.index, found.len());
            specs.extend(found);
        }
    }
    emit(out, &manifest_to_json(&specs))?;
    Ok(true)
}

fn cmd_diagrams(dir: &Path) -> Result<bool> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    for d in prym_three_cylinder_diagrams() {
        write(&dir.join(format!("{}.json", d.name)), &d.to_json())?;
    }
    Ok(true)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Validate { manifest } => cmd_validate(&manifest),
        Command::Audit {
            manifest,
            out,
            bounds,
            jobs,
            render,
        } => {
            let run = RunConfig::new(&bounds, jobs)?;
            cmd_audit(&manifest, out.as_deref(), &run, render.as_deref())
        }
        Command::Scan {
            surface,
            direction,
            step_cap,
        } => cmd_scan(&surface, &direction, step_cap),
        Command::Render { input, out, index } => cmd_render(&input, &out, index),
        Command::Export { manifest, index, out } => cmd_export(&manifest, index, out.as_deref()),
        Command::Search {
            twist_denominator,
            slit_denominator,
            step_cap,
            out,
        } => cmd_search(
            SearchBounds {
                twist_denominator,
                slit_denominator,
                step_cap,
            },
            out.as_deref(),
        ),
        Command::Diagrams { out } => cmd_diagrams(&out),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
