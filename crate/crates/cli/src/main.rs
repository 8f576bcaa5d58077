//! Command-line front end: `analyze`, `assess` and `curve` subcommands over
//! a JSON frame document.
//!
//! Exit codes: 0 on success, 2 on input/validation errors, 3 on numerical
//! errors, 1 on output I/O failures.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use limitframe::document::{load_model, load_spectrum, BuiltModel, DocumentError};
use limitframe::pipeline::{run_pattern, PatternRun, PipelineError, SearchMethod};
use limitframe::report::{write_curve_csv, ReportDocument};
use limitframe::LateralLoadPattern;

const EXIT_IO: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "limitframe",
    version,
    about = "Plastic collapse multipliers, capacity curves and equivalent-SDOF seismic checks for planar frames"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the collapse search and build the truncated capacity curve
    Analyze(AnalyzeArgs),
    /// Analyze, then convert to an equivalent SDOF and check spectral demand
    Assess(AssessArgs),
    /// Export the truncated capacity curve as CSV
    Curve(CurveArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Frame input document (JSON)
    input: PathBuf,
    /// Pattern name to run, or "all"
    #[arg(long, default_value = "all")]
    pattern: String,
    /// Search method override
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// GA seed override
    #[arg(long)]
    seed: Option<u64>,
    /// Base-shear-drop fraction override (0 <= alpha_s < 1)
    #[arg(long = "alpha-s")]
    alpha_s: Option<f64>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also export capacity curves (per-pattern suffix when several run)
    #[arg(long)]
    curve: Option<PathBuf>,
}

#[derive(Args)]
struct AssessArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    curve: Option<PathBuf>,
    /// Spectrum parameter file overriding the document's spectrum
    #[arg(long)]
    spectrum: Option<PathBuf>,
}

#[derive(Args)]
struct CurveArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// CSV output path (per-pattern suffix when several run)
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Ga,
    Exhaustive,
}

impl From<MethodArg> for SearchMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Ga => SearchMethod::Ga,
            MethodArg::Exhaustive => SearchMethod::Exhaustive,
        }
    }
}

struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn validation(error: impl Into<anyhow::Error>) -> Self {
        Self {
            code: EXIT_VALIDATION,
            error: error.into(),
        }
    }

    fn numerical(error: impl Into<anyhow::Error>) -> Self {
        Self {
            code: EXIT_NUMERICAL,
            error: error.into(),
        }
    }

    fn io(error: anyhow::Error) -> Self {
        Self {
            code: EXIT_IO,
            error,
        }
    }
}

impl From<DocumentError> for Failure {
    fn from(e: DocumentError) -> Self {
        Failure::validation(e)
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        Failure::numerical(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(args) => analyze(args),
        Command::Assess(args) => assess(args),
        Command::Curve(args) => curve(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {:#}", failure.error);
            ExitCode::from(failure.code)
        }
    }
}

fn load_and_override(common: &CommonArgs, with_assessment: bool) -> Result<BuiltModel, Failure> {
    let mut model = load_model(&common.input)?;
    if let Some(method) = common.method {
        model.analysis.method = method.into();
    }
    if let Some(seed) = common.seed {
        model.analysis.ga.seed = seed;
    }
    if let Some(alpha_s) = common.alpha_s {
        if !(0.0..1.0).contains(&alpha_s) {
            return Err(Failure::validation(anyhow!(
                "--alpha-s must lie in [0, 1), got {alpha_s}"
            )));
        }
        model.analysis.alpha_s = alpha_s;
    }
    if with_assessment && model.assessment.is_none() {
        return Err(Failure::validation(anyhow!(
            "document has no `assessment` block; add one or pass --spectrum"
        )));
    }
    Ok(model)
}

fn select_patterns<'m>(
    model: &'m BuiltModel,
    selector: &str,
) -> Result<Vec<&'m LateralLoadPattern>, Failure> {
    if selector == "all" {
        Ok(model.patterns.iter().collect())
    } else {
        Ok(vec![model.pattern(selector)?])
    }
}

fn run_selected(
    model: &BuiltModel,
    selector: &str,
    with_assessment: bool,
) -> Result<Vec<(PatternRun, f64)>, Failure> {
    let assessment = if with_assessment {
        model.assessment.as_ref()
    } else {
        None
    };
    select_patterns(model, selector)?
        .into_iter()
        .map(|pattern| {
            let start = Instant::now();
            let run = run_pattern(&model.frame, pattern, &model.analysis, assessment)?;
            Ok((run, start.elapsed().as_secs_f64() * 1e3))
        })
        .collect()
}

fn write_report(report: &ReportDocument, out: Option<&Path>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(report).expect("report serializes");
    match out {
        Some(path) => std::fs::write(path, text.as_bytes())
            .with_context(|| format!("cannot write report to {}", path.display()))
            .map_err(Failure::io),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

/// Appends the pattern name before the extension when several curves are
/// exported through one `--curve` path.
fn curve_path(base: &Path, pattern: &str, multiple: bool) -> PathBuf {
    if !multiple {
        return base.to_owned();
    }
    let stem = base.file_stem().unwrap_or_default().to_string_lossy();
    let ext = base
        .extension()
        .map(|e| format!(".{}", e.to_string_lossy()))
        .unwrap_or_default();
    base.with_file_name(format!("{stem}.{pattern}{ext}"))
}

fn write_curves(runs: &[(PatternRun, f64)], base: &Path) -> Result<(), Failure> {
    let multiple = runs.len() > 1;
    for (run, _) in runs {
        let path = curve_path(base, &run.pattern.name, multiple);
        let file = std::fs::File::create(&path)
            .with_context(|| format!("cannot create {}", path.display()))
            .map_err(Failure::io)?;
        write_curve_csv(std::io::BufWriter::new(file), &run.curve)
            .with_context(|| format!("cannot write {}", path.display()))
            .map_err(Failure::io)?;
    }
    Ok(())
}

fn analyze(args: AnalyzeArgs) -> Result<(), Failure> {
    let model = load_and_override(&args.common, false)?;
    let runs = run_selected(&model, &args.common.pattern, false)?;
    if let Some(base) = &args.curve {
        write_curves(&runs, base)?;
    }
    write_report(&ReportDocument::from_runs(&runs), args.out.as_deref())
}

fn assess(args: AssessArgs) -> Result<(), Failure> {
    let mut model = load_and_override(&args.common, args.spectrum.is_none())?;
    if let Some(path) = &args.spectrum {
        let spectrum = load_spectrum(path)?;
        model
            .assessment
            .get_or_insert_with(|| limitframe::AssessmentSettings {
                floor_masses: model.frame.default_floor_masses(),
                spectrum: None,
                shape: Default::default(),
            })
            .spectrum = Some(spectrum);
    }
    let spectrum_present = model
        .assessment
        .as_ref()
        .is_some_and(|a| a.spectrum.is_some());
    if !spectrum_present {
        return Err(Failure::validation(anyhow!(
            "no spectrum given: add `assessment.spectrum` to the document or pass --spectrum"
        )));
    }
    let runs = run_selected(&model, &args.common.pattern, true)?;
    if let Some(base) = &args.curve {
        write_curves(&runs, base)?;
    }
    write_report(&ReportDocument::from_runs(&runs), args.out.as_deref())
}

fn curve(args: CurveArgs) -> Result<(), Failure> {
    let model = load_and_override(&args.common, false)?;
    let runs = run_selected(&model, &args.common.pattern, false)?;
    write_curves(&runs, &args.out)
}
