//! Command-line front end for the max k-cut measurement-pattern toolkit.
//!
//! Subcommands: `solve` (optimize parameters and sample assignments),
//! `spectrum` (energy levels of the cost operator), `estimate` (cluster
//! node accounting, native versus translated), `verify` (analytic
//! self-check battery), and `pattern` (compile and export a pattern).
//!
//! Every output written with `--out` is accompanied by a
//! `<file>.manifest.json` sidecar that records the invocation, input
//! digests, and an output digest. The output files themselves carry no
//! timestamps, so identical invocations produce byte-identical files;
//! the manifest's `fingerprint` covers everything except the wall-clock
//! field and therefore also matches across repeated runs.
//!
//! Exit codes: 0 success, 2 invalid input or usage, 3 instance exceeds a
//! size guard, 4 verification failure.

use clap::{Args, Parser, Subcommand, ValueEnum};
use mbqc_kcut::graph::Graph;
use mbqc_kcut::hamiltonian::{
    build_penalized_target, build_target, spectrum, EncodingParams, SpectrumLevel,
    REPRESENTATIVE_CAP, SPECTRUM_TOLERANCE,
};
use mbqc_kcut::pattern::{assemble_pattern, pattern_stats};
use mbqc_kcut::qaoa::{solve, Backend, Method, OptimizerConfig, SolveOutcome};
use mbqc_kcut::resources::{
    asymptotic_crossover_k, asymptotic_overhead_ratio, circuit_gate_counts,
    m_optimized_cluster_size_from_gates, native_cluster_size, overhead_ratio,
    sweep_complete_graphs, sweep_to_csv, translated_cluster_size, GateCounts, SweepRow,
    TranslationMethod,
};
use mbqc_kcut::verify::run_default_checks;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

const EXIT_INPUT: i32 = 2;
const EXIT_SIZE: i32 = 3;
const EXIT_VERIFY: i32 = 4;

#[derive(Debug)]
enum CliError {
    Core(mbqc_kcut::Error),
    Io(PathBuf, std::io::Error),
    Usage(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(path, e) => write!(f, "{}: {e}", path.display()),
            CliError::Usage(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<mbqc_kcut::Error> for CliError {
    fn from(e: mbqc_kcut::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(mbqc_kcut::Error::SizeGuard { .. }) => EXIT_SIZE,
            _ => EXIT_INPUT,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "mbqc-kcut",
    version,
    about = "Measurement-pattern toolkit for variational weighted max k-cut"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Optimize variational parameters and sample label assignments
    Solve(SolveCmd),
    /// Enumerate energy levels of the (optionally penalized) cost operator
    Spectrum(SpectrumCmd),
    /// Account cluster nodes: native pattern versus translated circuits
    Estimate(EstimateCmd),
    /// Run the analytic self-check battery
    Verify(VerifyCmd),
    /// Compile a measurement pattern and export it
    Pattern(PatternCmd),
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct GraphInput {
    /// Weighted edge-list file: optional "p N" header, "u v [weight]" lines
    #[arg(long, value_name = "FILE")]
    graph: Option<PathBuf>,
    /// Complete unit-weight graph on N vertices
    #[arg(long, value_name = "N")]
    complete: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
struct InputDigest {
    path: String,
    sha256: String,
}

impl GraphInput {
    fn load(&self) -> CliResult<(Graph, Vec<InputDigest>)> {
        match (&self.graph, self.complete) {
            (Some(path), None) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Io(path.clone(), e))?;
                let g = Graph::parse(&text)?;
                let digest = InputDigest {
                    path: path.display().to_string(),
                    sha256: sha256_hex(text.as_bytes()),
                };
                Ok((g, vec![digest]))
            }
            (None, Some(n)) => Ok((Graph::complete(n), Vec::new())),
            _ => unreachable!("clap enforces exactly one input source"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    /// Exact layered evolution
    Reference,
    /// Compiled measurement pattern with sampled outcomes
    Mbqc,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Backend {
        match b {
            BackendArg::Reference => Backend::Reference,
            BackendArg::Mbqc => Backend::Mbqc,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Grid,
    NelderMead,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Grid => Method::Grid,
            MethodArg::NelderMead => Method::NelderMead,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PatternFormat {
    Json,
    Dot,
}

#[derive(Args)]
struct SolveCmd {
    #[command(flatten)]
    input: GraphInput,
    /// Number of label classes
    #[arg(short, long)]
    k: u32,
    /// Variational layers
    #[arg(short = 'p', long = "layers", default_value_t = 1)]
    layers: usize,
    /// Demote invalid labels via the penalty term (reference backend only)
    #[arg(long)]
    penalty: bool,
    /// State engine; defaults to mbqc, or reference when --penalty is set
    #[arg(long, value_enum)]
    backend: Option<BackendArg>,
    /// Parameter search strategy
    #[arg(long, value_enum, default_value_t = MethodArg::NelderMead)]
    optimizer: MethodArg,
    /// Grid resolution per parameter dimension
    #[arg(long, default_value_t = 8)]
    grid_points: usize,
    /// Nelder-Mead starts (first from the grid, the rest random)
    #[arg(long, default_value_t = 2)]
    restarts: usize,
    /// Objective evaluations allowed per search phase
    #[arg(long, default_value_t = 400)]
    max_evals: usize,
    /// Samples drawn from the final state (0 disables sampling)
    #[arg(long, default_value_t = 1000)]
    shots: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write JSON here (with a .manifest.json sidecar) instead of stdout
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumCmd {
    #[command(flatten)]
    input: GraphInput,
    /// Number of label classes
    #[arg(short, long)]
    k: u32,
    /// Use the penalized operator
    #[arg(long)]
    penalty: bool,
    /// Highest levels to report
    #[arg(long, default_value_t = 6)]
    top: usize,
    /// Lowest levels to report
    #[arg(long, default_value_t = 1)]
    bottom: usize,
    /// Representative assignments kept per level
    #[arg(long, default_value_t = REPRESENTATIVE_CAP)]
    representatives: usize,
    /// Write JSON here (with a .manifest.json sidecar) instead of stdout
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateCmd {
    /// Weighted edge-list file
    #[arg(long, value_name = "FILE", conflicts_with_all = ["complete", "sweep"])]
    graph: Option<PathBuf>,
    /// Complete unit-weight graph on N vertices
    #[arg(long, value_name = "N", conflicts_with = "sweep")]
    complete: Option<usize>,
    /// Number of label classes (power of two)
    #[arg(short, long, required_unless_present = "sweep")]
    k: Option<u32>,
    /// Tabulate overhead ratios across complete graphs instead
    #[arg(long)]
    sweep: bool,
    /// Vertex counts for --sweep
    #[arg(long, value_delimiter = ',', default_value = "10,100,1000")]
    vertices: Vec<u64>,
    /// Label counts for --sweep
    #[arg(long, value_delimiter = ',', default_value = "2,4,16")]
    ks: Vec<u32>,
    /// Table format for --sweep output
    #[arg(long, value_enum, default_value_t = TableFormat::Json)]
    format: TableFormat,
    /// Write here (with a .manifest.json sidecar) instead of stdout
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyCmd {
    /// Emit the report as JSON instead of text lines
    #[arg(long)]
    json: bool,
    /// Write the report here (with a .manifest.json sidecar)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PatternCmd {
    #[command(flatten)]
    input: GraphInput,
    /// Number of label classes
    #[arg(short, long)]
    k: u32,
    /// Variational layers
    #[arg(short = 'p', long = "layers", default_value_t = 1)]
    layers: usize,
    /// Rejected: the penalty term has no pattern realization
    #[arg(long)]
    penalty: bool,
    #[arg(long, value_enum, default_value_t = PatternFormat::Json)]
    format: PatternFormat,
    /// Write here (with a .manifest.json sidecar) instead of stdout
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let code = match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}

fn dispatch(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Cmd::Solve(cmd) => cmd_solve(cmd),
        Cmd::Spectrum(cmd) => cmd_spectrum(cmd),
        Cmd::Estimate(cmd) => cmd_estimate(cmd),
        Cmd::Verify(cmd) => cmd_verify(cmd),
        Cmd::Pattern(cmd) => cmd_pattern(cmd),
    }
}

// ---------------------------------------------------------------- output

fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Serialize)]
struct OutputDigest {
    path: String,
    bytes: usize,
    sha256: String,
}

#[derive(Serialize)]
struct ManifestBody<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a [String],
    inputs: &'a [InputDigest],
    output: OutputDigest,
}

#[derive(Serialize)]
struct Manifest<'a> {
    #[serde(flatten)]
    body: ManifestBody<'a>,
    /// Wall-clock stamp; excluded from the fingerprint.
    unix_time_seconds: u64,
    /// Digest of every field above except the wall clock.
    fingerprint: String,
}

/// Prints to stdout, or writes the file plus its manifest sidecar.
fn emit(content: &str, out: Option<&Path>, inputs: &[InputDigest]) -> CliResult<()> {
    let Some(path) = out else {
        print!("{content}");
        return Ok(());
    };
    fs::write(path, content).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    let command: Vec<String> = std::env::args().skip(1).collect();
    let body = ManifestBody {
        tool: "mbqc-kcut",
        version: env!("CARGO_PKG_VERSION"),
        command: &command,
        inputs,
        output: OutputDigest {
            path: path.display().to_string(),
            bytes: content.len(),
            sha256: sha256_hex(content.as_bytes()),
        },
    };
    let fingerprint = sha256_hex(
        serde_json::to_string(&body)
            .map_err(mbqc_kcut::Error::from)?
            .as_bytes(),
    );
    let unix_time_seconds = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let manifest = Manifest {
        body,
        unix_time_seconds,
        fingerprint,
    };
    let manifest_path = PathBuf::from(format!("{}.manifest.json", path.display()));
    let mut text = serde_json::to_string_pretty(&manifest).map_err(mbqc_kcut::Error::from)?;
    text.push('\n');
    fs::write(&manifest_path, text).map_err(|e| CliError::Io(manifest_path.clone(), e))?;
    Ok(())
}

fn to_pretty_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut text = serde_json::to_string_pretty(value).map_err(mbqc_kcut::Error::from)?;
    text.push('\n');
    Ok(text)
}

#[derive(Serialize)]
struct GraphDoc {
    vertices: usize,
    edges: usize,
    content_hash: String,
}

impl GraphDoc {
    fn new(g: &Graph) -> Self {
        GraphDoc {
            vertices: g.vertex_count(),
            edges: g.edges().len(),
            content_hash: format!("{:016x}", g.content_hash()),
        }
    }
}

// ----------------------------------------------------------------- solve

#[derive(Serialize)]
struct SolveDoc {
    command: &'static str,
    graph: GraphDoc,
    #[serde(flatten)]
    outcome: SolveOutcome,
}

fn cmd_solve(cmd: SolveCmd) -> CliResult<i32> {
    let (g, inputs) = cmd.input.load()?;
    let backend = match (cmd.penalty, cmd.backend) {
        (true, Some(BackendArg::Mbqc)) => {
            return Err(CliError::Usage(
                "--penalty needs the reference backend: the penalty term has \
                 no measurement-pattern realization"
                    .into(),
            ));
        }
        (true, _) => Backend::Reference,
        (false, Some(b)) => b.into(),
        (false, None) => Backend::Mbqc,
    };
    let cfg = OptimizerConfig {
        method: cmd.optimizer.into(),
        layers: cmd.layers,
        grid_points: cmd.grid_points,
        restarts: cmd.restarts,
        max_evals: cmd.max_evals,
        seed: cmd.seed,
        backend,
        use_penalty: cmd.penalty,
    };
    let outcome = solve(&g, cmd.k, &cfg, cmd.shots)?;
    let doc = SolveDoc {
        command: "solve",
        graph: GraphDoc::new(&g),
        outcome,
    };
    emit(&to_pretty_json(&doc)?, cmd.out.as_deref(), &inputs)?;
    Ok(0)
}

// -------------------------------------------------------------- spectrum

#[derive(Serialize)]
struct SpectrumDoc {
    command: &'static str,
    graph: GraphDoc,
    k: u32,
    penalty: bool,
    total_qubits: usize,
    level_count: usize,
    tolerance: f64,
    /// Highest levels, best first.
    top: Vec<SpectrumLevel>,
    /// Lowest levels, worst first.
    bottom: Vec<SpectrumLevel>,
}

fn cmd_spectrum(cmd: SpectrumCmd) -> CliResult<i32> {
    let (g, inputs) = cmd.input.load()?;
    let enc = EncodingParams::new(cmd.k, g.vertex_count())?;
    let h = if cmd.penalty {
        build_penalized_target(&g, &enc)?
    } else {
        build_target(&g, &enc)?
    };
    let report = spectrum(
        &h,
        &enc,
        SPECTRUM_TOLERANCE,
        cmd.representatives,
        mbqc_kcut::pauli::DENSE_QUBIT_LIMIT,
    )?;
    let doc = SpectrumDoc {
        command: "spectrum",
        graph: GraphDoc::new(&g),
        k: cmd.k,
        penalty: cmd.penalty,
        total_qubits: enc.total_qubits(),
        level_count: report.levels.len(),
        tolerance: report.tolerance,
        top: report.levels.iter().rev().take(cmd.top).cloned().collect(),
        bottom: report.levels.iter().take(cmd.bottom).cloned().collect(),
    };
    emit(&to_pretty_json(&doc)?, cmd.out.as_deref(), &inputs)?;
    Ok(0)
}

// -------------------------------------------------------------- estimate

#[derive(Serialize)]
struct TranslationDoc {
    method: &'static str,
    cluster_nodes: u64,
    ratio: f64,
    asymptotic_ratio: f64,
}

#[derive(Serialize)]
struct EstimateDoc {
    command: &'static str,
    graph: GraphDoc,
    k: u32,
    qubits_per_vertex: u32,
    native_nodes: u64,
    gate_counts: GateCounts,
    translations: Vec<TranslationDoc>,
    /// Optimized translation costed from its own gate counts; disagrees
    /// with the published closed form used in `translations`.
    gate_accounted_m_opt_nodes: Option<u64>,
    /// Label count where the optimized translation starts to win.
    asymptotic_crossover_k: u32,
}

#[derive(Serialize)]
struct SweepDoc {
    command: &'static str,
    rows: Vec<SweepRow>,
    asymptotic_crossover_k: u32,
}

fn cmd_estimate(cmd: EstimateCmd) -> CliResult<i32> {
    if cmd.sweep {
        let rows = sweep_complete_graphs(&cmd.vertices, &cmd.ks)?;
        let content = match cmd.format {
            TableFormat::Csv => sweep_to_csv(&rows),
            TableFormat::Json => to_pretty_json(&SweepDoc {
                command: "estimate-sweep",
                rows,
                asymptotic_crossover_k: asymptotic_crossover_k(),
            })?,
        };
        emit(&content, cmd.out.as_deref(), &[])?;
        return Ok(0);
    }
    if cmd.format == TableFormat::Csv {
        return Err(CliError::Usage(
            "csv output is only available for --sweep".into(),
        ));
    }
    let input = GraphInput {
        graph: cmd.graph.clone(),
        complete: cmd.complete,
    };
    if input.graph.is_none() && input.complete.is_none() {
        return Err(CliError::Usage(
            "estimate needs --graph, --complete, or --sweep".into(),
        ));
    }
    let (g, inputs) = input.load()?;
    let k = cmd.k.expect("clap enforces -k without --sweep");
    let v = g.vertex_count() as u64;
    let e = g.edges().len() as u64;
    let translations = TranslationMethod::ALL
        .iter()
        .map(|&method| -> CliResult<TranslationDoc> {
            Ok(TranslationDoc {
                method: method.name(),
                cluster_nodes: translated_cluster_size(v, e, k, method)?,
                ratio: overhead_ratio(v, e, k, method)?,
                asymptotic_ratio: asymptotic_overhead_ratio(k, method)?,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let m = k.trailing_zeros();
    let doc = EstimateDoc {
        command: "estimate",
        graph: GraphDoc::new(&g),
        k,
        qubits_per_vertex: m,
        native_nodes: native_cluster_size(v, e, k)?,
        gate_counts: circuit_gate_counts(v, e, k)?,
        translations,
        gate_accounted_m_opt_nodes: if m >= 2 {
            Some(m_optimized_cluster_size_from_gates(v, e, k)?)
        } else {
            None
        },
        asymptotic_crossover_k: asymptotic_crossover_k(),
    };
    emit(&to_pretty_json(&doc)?, cmd.out.as_deref(), &inputs)?;
    Ok(0)
}

// ---------------------------------------------------------------- verify

#[derive(Serialize)]
struct CheckDoc {
    name: &'static str,
    passed: bool,
    details: String,
    duration_ms: f64,
}

fn cmd_verify(cmd: VerifyCmd) -> CliResult<i32> {
    let reports = run_default_checks();
    let all_passed = reports.iter().all(|r| r.passed);
    let content = if cmd.json {
        let docs: Vec<CheckDoc> = reports
            .iter()
            .map(|r| CheckDoc {
                name: r.name,
                passed: r.passed,
                details: r.details.clone(),
                duration_ms: r.duration.as_secs_f64() * 1e3,
            })
            .collect();
        to_pretty_json(&docs)?
    } else {
        let mut text = String::new();
        for r in &reports {
            text.push_str(&format!(
                "{} {:<18} {} ({:.1} ms)\n",
                if r.passed { "PASS" } else { "FAIL" },
                r.name,
                r.details,
                r.duration.as_secs_f64() * 1e3,
            ));
        }
        text.push_str(&format!(
            "{}: {} of {} checks passed\n",
            if all_passed { "ok" } else { "FAILED" },
            reports.iter().filter(|r| r.passed).count(),
            reports.len(),
        ));
        text
    };
    emit(&content, cmd.out.as_deref(), &[])?;
    Ok(if all_passed { 0 } else { EXIT_VERIFY })
}

// --------------------------------------------------------------- pattern

fn cmd_pattern(cmd: PatternCmd) -> CliResult<i32> {
    if cmd.penalty {
        return Err(CliError::Usage(
            "the invalid-label penalty has no measurement-pattern \
             realization; compile without --penalty (sampling filters \
             invalid labels) or run solve --penalty on the reference \
             backend"
                .into(),
        ));
    }
    let (g, inputs) = cmd.input.load()?;
    let pattern = assemble_pattern(&g, cmd.k, cmd.layers)?;
    let stats = pattern_stats(&pattern);
    let content = match cmd.format {
        PatternFormat::Json => {
            let mut text = pattern.to_json();
            if !text.ends_with('\n') {
                text.push('\n');
            }
            text
        }
        PatternFormat::Dot => pattern.to_dot(),
    };
    emit(&content, cmd.out.as_deref(), &inputs)?;
    if cmd.out.is_some() {
        eprintln!(
            "pattern: {} nodes ({} inputs, {} cost ancillae, {} mixer), {} links, {} rounds",
            stats.total_nodes,
            stats.inputs,
            stats.cost_ancillae,
            stats.mixer_a1 + stats.mixer_a2,
            stats.cz_links,
            stats.declared_rounds,
        );
    }
    Ok(0)
}
