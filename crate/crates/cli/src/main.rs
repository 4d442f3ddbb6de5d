//! `polyflow` command-line front end.
//!
//! Exit codes: 0 converged, 2 iteration limit, 3 divergence, 64 usage,
//! 65 bad input data, 66 unreadable input, 73 unwritable output.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use polyflow::flow::{classify, integrate, FlowStatus};
use polyflow::mesh::{quality_report, smooth, write_history_csv, write_quality_csv};
use polyflow::quotient::pi;
use polyflow::sampling::random_configuration;
use polyflow::spectral::hessian_spectrum;
use polyflow::{Configuration, ElementKind, Error, FieldVariant, FlowSettings, Mesh, Normalization};

const EX_USAGE: u8 = 64;
const EX_DATAERR: u8 = 65;
const EX_NOINPUT: u8 = 66;
const EX_CANTCREAT: u8 = 73;
const EX_MAX_ITERS: u8 = 2;
const EX_DIVERGED: u8 = 3;

const CLASSIFY_TOL: f64 = 1e-8;

#[derive(Parser)]
#[command(name = "polyflow", version, about = "Volume gradient flows for polyhedral elements and meshes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Flow one element to a singular shape on the configuration sphere.
    Regularize(RegularizeArgs),
    /// Smooth a mesh by averaging per-element shifts.
    Smooth(SmoothArgs),
    /// Linearization spectrum at a singular configuration.
    Spectrum(SpectrumArgs),
    /// Classify the configuration of a single-element mesh file.
    Classify(ClassifyArgs),
    /// Per-element quality of a mesh.
    Quality(QualityArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FieldArg {
    Gradient,
    YVariant,
}

impl From<FieldArg> for FieldVariant {
    fn from(f: FieldArg) -> Self {
        match f {
            FieldArg::Gradient => FieldVariant::MeanVolumeGradient,
            FieldArg::YVariant => FieldVariant::YVariant,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum NormalizationArg {
    Psi,
    None,
}

impl From<NormalizationArg> for Normalization {
    fn from(n: NormalizationArg) -> Self {
        match n {
            NormalizationArg::Psi => Normalization::Psi,
            NormalizationArg::None => Normalization::None,
        }
    }
}

#[derive(Args)]
struct ElementArgs {
    /// tetrahedron, pyramid, prism, hexahedron or octahedron
    #[arg(long = "type")]
    kind: ElementKind,
    #[arg(long, value_enum, default_value = "gradient")]
    field: FieldArg,
}

#[derive(Args)]
struct RegularizeArgs {
    #[command(flatten)]
    element: ElementArgs,
    /// Single-element mesh JSON giving the start configuration
    #[arg(long, conflicts_with = "random", required_unless_present = "random")]
    input: Option<PathBuf>,
    /// Seed for a uniformly random start configuration
    #[arg(long)]
    random: Option<u64>,
    #[arg(long, default_value_t = 0.05)]
    step: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, value_enum, default_value = "psi")]
    normalization: NormalizationArg,
    /// Write one CSV row per iteration
    #[arg(long)]
    trajectory: Option<PathBuf>,
    /// Write the terminal configuration as single-element mesh JSON
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SmoothArgs {
    #[arg(long)]
    input: PathBuf,
    /// Smoothed mesh JSON; standard output if absent
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = 0.05)]
    step: f64,
    #[arg(long, default_value_t = 10_000)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-6)]
    quality_tol: f64,
    #[arg(long, value_enum, default_value = "psi")]
    normalization: NormalizationArg,
    /// Per-iteration quality history CSV
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    element: ElementArgs,
    /// `optimal`, `collinear` (tetrahedra only) or a single-element mesh JSON file
    #[arg(long, default_value = "optimal")]
    at: String,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    element: ElementArgs,
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = CLASSIFY_TOL)]
    tol: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Csv,
}

#[derive(Args)]
struct QualityArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: ReportFormat,
    /// Report file; standard output if absent
    #[arg(long)]
    output: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EX_USAGE } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Regularize(a) => regularize(a),
        Command::Smooth(a) => smooth_mesh(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Classify(a) => classify_file(a),
        Command::Quality(a) => quality(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("polyflow: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(EX_NOINPUT, format!("{}: {e}", path.display())))
}

fn read_mesh(path: &Path) -> Result<Mesh, Failure> {
    let text = read_input(path)?;
    Mesh::from_json(&text).map_err(|e| Failure::new(EX_DATAERR, format!("{}: {e}", path.display())))
}

/// The configuration of a single-element mesh of the given kind.
fn read_element(path: &Path, kind: ElementKind) -> Result<Configuration, Failure> {
    let mesh = read_mesh(path)?;
    match mesh.elements() {
        [e] if e.kind == kind => Ok(mesh.element_configuration(0)),
        [e] => Err(Failure::new(
            EX_DATAERR,
            format!("{}: element is a {}, expected a {kind}", path.display(), e.kind),
        )),
        els => Err(Failure::new(
            EX_DATAERR,
            format!("{}: expected exactly one element, found {}", path.display(), els.len()),
        )),
    }
}

fn write_output(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure::new(EX_CANTCREAT, format!("{}: {e}", path.display())))
}

// a closed stdout (e.g. piped into `head`) is not an error
fn print_text(text: &str) {
    let _ = writeln!(io::stdout().lock(), "{text}");
}

fn print_json(value: &Value) {
    print_text(&serde_json::to_string_pretty(value).expect("JSON values serialize"));
}

fn data_error(e: Error) -> Failure {
    match e {
        Error::InvalidVariant { .. } => Failure::new(EX_USAGE, e.to_string()),
        Error::Divergence { .. } => Failure::new(EX_DIVERGED, e.to_string()),
        _ => Failure::new(EX_DATAERR, e.to_string()),
    }
}

fn check_element(args: &ElementArgs) -> Result<FieldVariant, Failure> {
    let variant = FieldVariant::from(args.field);
    polyflow::elements::check_variant(args.kind, variant).map_err(data_error)?;
    Ok(variant)
}

/// False for NaN as well.
fn positive(x: f64) -> bool {
    x > 0.0
}

fn status_code(status: FlowStatus) -> u8 {
    match status {
        FlowStatus::Converged => 0,
        FlowStatus::MaxIterations => EX_MAX_ITERS,
    }
}

fn regularize(a: RegularizeArgs) -> Outcome {
    let kind = a.element.kind;
    let variant = check_element(&a.element)?;
    if !(positive(a.step) && positive(a.tol)) {
        return Err(Failure::new(EX_USAGE, "--step and --tol must be positive"));
    }
    let p0 = match (&a.input, a.random) {
        (Some(path), _) => read_element(path, kind)?,
        (None, Some(seed)) => random_configuration(kind, variant, seed).map_err(data_error)?,
        (None, None) => unreachable!("clap requires one of --input and --random"),
    };
    let settings = FlowSettings {
        step: a.step,
        max_iters: a.max_iters,
        tol: a.tol,
        normalization: a.normalization.into(),
    };
    if let Some(w) = settings.stability_warning(kind, variant) {
        eprintln!("polyflow: warning: {w}");
    }
    let trajectory = integrate(kind, variant, &p0, &settings).map_err(data_error)?;

    if let Some(path) = &a.trajectory {
        let mut buf = Vec::new();
        trajectory.write_csv(kind, &mut buf).expect("writing to memory");
        write_output(path, &buf)?;
    }
    let last = trajectory.last();
    if let Some(path) = &a.output {
        let mesh = Mesh::single(kind, &last.p).map_err(data_error)?;
        write_output(path, mesh.to_json().as_bytes())?;
    }
    let class = classify(kind, variant, &last.p, a.tol).map_err(data_error)?;
    print_json(&json!({
        "type": kind,
        "field": variant,
        "status": trajectory.status,
        "iterations": trajectory.iterations(),
        "f": last.f,
        "classification": class,
        "halvings": trajectory.halvings,
        "descent_steps": trajectory.descent_steps,
        "configuration": last.p.points().iter().map(|v| [v.x, v.y, v.z]).collect::<Vec<_>>(),
    }));
    Ok(status_code(trajectory.status))
}

fn smooth_mesh(a: SmoothArgs) -> Outcome {
    if !positive(a.step) {
        return Err(Failure::new(EX_USAGE, "--step must be positive"));
    }
    let mesh = read_mesh(&a.input)?;
    let settings = FlowSettings {
        step: a.step,
        normalization: a.normalization.into(),
        ..FlowSettings::default()
    };
    let out = smooth(&mesh, &settings, a.max_iters, a.quality_tol).map_err(data_error)?;
    for w in &out.warnings {
        eprintln!("polyflow: warning: {w}");
    }
    if let Some(path) = &a.report {
        let mut buf = Vec::new();
        write_history_csv(&out.history, &mut buf).expect("writing to memory");
        write_output(path, &buf)?;
    }
    let text = out.mesh.to_json();
    match &a.output {
        Some(path) => write_output(path, text.as_bytes())?,
        None => print_text(&text),
    }
    let last = out.history.last().expect("history holds the input report");
    eprintln!(
        "polyflow: {} iterations, min_q {:.6}, mean_q {:.6}, inverted {}",
        out.iterations(),
        last.min_q,
        last.mean_q,
        last.inverted_count
    );
    Ok(status_code(out.status))
}

fn spectrum(a: SpectrumArgs) -> Outcome {
    let kind = a.element.kind;
    let variant = check_element(&a.element)?;
    let p = match a.at.as_str() {
        "optimal" => kind.reference_shape(variant).map_err(data_error)?,
        "collinear" => {
            if kind != ElementKind::Tetrahedron {
                return Err(Failure::new(EX_USAGE, "--at collinear is defined for tetrahedra only"));
            }
            Configuration::from_rows(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.5, 0.0, 0.0], [-1.5, 0.0, 0.0]])
                .expect("finite rows")
        }
        file => read_element(Path::new(file), kind)?,
    };
    let q = pi(&p).map_err(data_error)?;
    let s = hessian_spectrum(kind, variant, &q).map_err(data_error)?;
    print_json(&json!({
        "type": kind,
        "field": variant,
        "eigenvalues": s.eigenvalues,
        "zero_count": s.zero_count,
        "positive": s.positive_count(),
        "negative": s.negative_count(),
        "max_imaginary": s.max_imaginary,
        "asymmetry": s.asymmetry,
    }));
    Ok(0)
}

fn classify_file(a: ClassifyArgs) -> Outcome {
    let variant = check_element(&a.element)?;
    let p = read_element(&a.input, a.element.kind)?;
    let class = classify(a.element.kind, variant, &p, a.tol).map_err(data_error)?;
    print_json(&serde_json::to_value(class).expect("JSON values serialize"));
    Ok(0)
}

fn quality(a: QualityArgs) -> Outcome {
    let mesh = read_mesh(&a.input)?;
    let report = quality_report(&mesh);
    let mut buf = Vec::new();
    match a.format {
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut buf, &report).expect("JSON values serialize");
            buf.push(b'\n');
        }
        ReportFormat::Csv => write_quality_csv(&mesh, &report, &mut buf).expect("writing to memory"),
    }
    match &a.output {
        Some(path) => write_output(path, &buf)?,
        None => {
            let _ = io::stdout().lock().write_all(&buf);
        }
    }
    Ok(0)
}
