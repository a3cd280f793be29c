//! Batch analysis driver: scores ties, checks axioms, runs the order
//! censuses, and exports correlation matrices, histograms and DOT graphs.
//!
//! Every run echoes its fully resolved configuration to stderr so any output
//! can be reproduced from the log line alone. Exit codes: 0 success, 2
//! configuration error, 3 input error, 4 numerical non-convergence.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use ties::axioms::{A2Mode, AxiomChecker, GraphSampler, GraphSpec};
use ties::graph::{build_graph, BipartiteGraph, TieProfile};
use ties::ingest::{
    format_g, parse_events, write_dot, write_edges, EventFormat, IngestWarnings,
};
use ties::measures::{score_all, MeasureError, MeasureKind, MeasureSpec};
use ties::order::{conflict_census, incomparability_census, ties_by_profile};
use ties::stats::{tau_matrix, PairScope};
use ties::{order, ExtensionTable, ScoreTable};

#[derive(Parser)]
#[command(name = "ties", version, about = "Tie strength from co-attendance event logs")]
struct Cli {
    /// Worker threads for censuses and per-pair scoring (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score every tie under one measure and write an edge list.
    Compute(ComputeArgs),
    /// Check the eight axioms against a measure.
    Axioms(AxiomsArgs),
    /// Count tie pairs the partial order leaves incomparable.
    OrderCensus(OrderCensusArgs),
    /// Count strict conflicts between a measure and the partial order.
    Conflicts(ConflictsArgs),
    /// Kendall tau-b matrix across measures.
    Tau(TauArgs),
    /// Frequency of event sizes.
    Histogram(HistogramArgs),
    /// Export the inferred weighted network in DOT format.
    Dot(DotArgs),
    /// Build and verify a linear extension over the graph's tie profiles.
    Linext(LinextArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Event log path.
    #[arg(long)]
    input: PathBuf,
    /// Input format (jsonl or csv); inferred from the extension if omitted.
    #[arg(long)]
    format: Option<EventFormat>,
}

#[derive(Args, Clone)]
struct MeasureArgs {
    /// Tie-strength measure.
    #[arg(long)]
    measure: MeasureKind,
    /// Walk decay base of the Katz measure (> 1).
    #[arg(long)]
    katz_gamma: Option<f64>,
    /// Even walk-length cap of the Katz measure.
    #[arg(long = "katz-max-len")]
    katz_max_len: Option<u32>,
    /// Restart probability of the random walk, in (0,1).
    #[arg(long)]
    rwr_alpha: Option<f64>,
    /// SimRank decay, in (0,1).
    #[arg(long)]
    simrank_gamma: Option<f64>,
    /// Mixing weight of the proportional measures, in (0,1).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Initial directed value of the temporal measure (> 0).
    #[arg(long)]
    temporal_init: Option<f64>,
    /// Convergence tolerance of iterative measures.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Iteration cap of iterative measures.
    #[arg(long)]
    max_iterations: Option<u32>,
}

impl MeasureArgs {
    fn to_spec(&self) -> Result<MeasureSpec, CliError> {
        let mut spec = MeasureSpec::new(self.measure).expect("defaults are valid");
        if let Some(v) = self.katz_gamma {
            spec.katz_gamma = v;
        }
        if let Some(v) = self.katz_max_len {
            spec.katz_max_walk_length = v;
        }
        if let Some(v) = self.rwr_alpha {
            spec.rwr_alpha = v;
        }
        if let Some(v) = self.simrank_gamma {
            spec.simrank_gamma = v;
        }
        if let Some(v) = self.epsilon {
            spec.epsilon = v;
        }
        if let Some(v) = self.temporal_init {
            spec.temporal_init = v;
        }
        if let Some(v) = self.tolerance {
            spec.tolerance = v;
        }
        if let Some(v) = self.max_iterations {
            spec.max_iterations = v;
        }
        spec.validated().map_err(CliError::config)
    }
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    measure: MeasureArgs,
    /// Output edge list (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AxiomsArgs {
    /// Perturb this event log instead of sampling random graphs.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Input format (jsonl or csv); inferred from the extension if omitted.
    #[arg(long)]
    format: Option<EventFormat>,
    #[command(flatten)]
    measure: MeasureArgs,
    /// Randomized trials per axiom.
    #[arg(long, default_value_t = 1000)]
    trials: u32,
    /// Sampler seed.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Baseline-axiom reading: strict (exactly 0 and 1) or positive.
    #[arg(long, default_value = "positive")]
    a2_mode: A2Mode,
    /// Sampler bound: people per graph.
    #[arg(long, default_value_t = 8)]
    max_people: usize,
    /// Sampler bound: events per graph.
    #[arg(long, default_value_t = 6)]
    max_events: usize,
    /// Sampler bound: attendees per event.
    #[arg(long, default_value_t = 5)]
    max_event_size: usize,
    /// Write the full JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OrderCensusArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Append one CSV record (label,total,count,percentage) here.
    #[arg(long)]
    results: Option<PathBuf>,
    /// Dataset label for the results record (default: input file stem).
    #[arg(long)]
    label: Option<String>,
}

#[derive(Args)]
struct ConflictsArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    measure: MeasureArgs,
    /// Append one CSV record here.
    #[arg(long)]
    results: Option<PathBuf>,
    /// Dataset label for the results record (default: input file stem).
    #[arg(long)]
    label: Option<String>,
}

#[derive(Args)]
struct TauArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Comma-separated measure list.
    #[arg(long, value_delimiter = ',', required = true)]
    measures: Vec<MeasureKind>,
    /// Align on every person pair instead of only ties.
    #[arg(long)]
    all_pairs: bool,
    /// Output matrix CSV (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct HistogramArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Output CSV (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DotArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    measure: MeasureArgs,
    /// Pen width of the strongest tie.
    #[arg(long, default_value_t = 4.0)]
    width_scale: f64,
    /// Output DOT file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LinextArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Output CSV of (profile,value) rows (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Errors with their process exit codes.
#[derive(Debug)]
enum CliError {
    Config(String),
    Input(String),
    NonConvergence(String),
}

impl CliError {
    fn config(e: impl ToString) -> Self {
        Self::Config(e.to_string())
    }

    fn input(e: impl ToString) -> Self {
        Self::Input(e.to_string())
    }

    fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Input(_) => 3,
            Self::NonConvergence(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Self::Config(m) | Self::Input(m) | Self::NonConvergence(m) => m,
        }
    }
}

impl From<MeasureError> for CliError {
    fn from(e: MeasureError) -> Self {
        match e {
            MeasureError::Parameter { .. } => Self::Config(e.to_string()),
            MeasureError::NonConvergence { .. } => Self::NonConvergence(e.to_string()),
            _ => Self::Input(e.to_string()),
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            std::process::exit(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .expect("thread pool built once");
    }
    if let Err(e) = run(cli.command) {
        eprintln!("error: {}", e.message());
        std::process::exit(e.exit_code());
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Compute(args) => cmd_compute(args),
        Command::Axioms(args) => cmd_axioms(args),
        Command::OrderCensus(args) => cmd_order_census(args),
        Command::Conflicts(args) => cmd_conflicts(args),
        Command::Tau(args) => cmd_tau(args),
        Command::Histogram(args) => cmd_histogram(args),
        Command::Dot(args) => cmd_dot(args),
        Command::Linext(args) => cmd_linext(args),
    }
}

fn infer_format(path: &Path, format: Option<EventFormat>) -> Result<EventFormat, CliError> {
    if let Some(f) = format {
        return Ok(f);
    }
    match path.extension().and_then(|e| e.to_str()) {
        Some("jsonl") | Some("json") => Ok(EventFormat::Jsonl),
        Some("csv") => Ok(EventFormat::Csv),
        other => Err(CliError::Config(format!(
            "cannot infer event format from extension {other:?}; pass --format"
        ))),
    }
}

fn report_warnings(warnings: &IngestWarnings) {
    if warnings.duplicate_participants > 0 {
        eprintln!(
            "warning: collapsed {} duplicate participant entries",
            warnings.duplicate_participants
        );
    }
    if warnings.empty_events > 0 {
        eprintln!(
            "warning: kept {} events with no participants",
            warnings.empty_events
        );
    }
}

fn load_graph(args: &InputArgs) -> Result<(BipartiteGraph, EventFormat), CliError> {
    let format = infer_format(&args.input, args.format)?;
    let (events, warnings) = parse_events(&args.input, format).map_err(CliError::input)?;
    report_warnings(&warnings);
    let graph = build_graph(&events).map_err(CliError::input)?;
    Ok((graph, format))
}

fn format_name(format: EventFormat) -> &'static str {
    match format {
        EventFormat::Jsonl => "jsonl",
        EventFormat::Csv => "csv",
    }
}

fn spec_fields(spec: &MeasureSpec) -> String {
    format!(
        "measure={} katz_gamma={} katz_max_walk_length={} rwr_alpha={} simrank_gamma={} \
         epsilon={} temporal_init={} tolerance={} max_iterations={}",
        spec.kind,
        spec.katz_gamma,
        spec.katz_max_walk_length,
        spec.rwr_alpha,
        spec.simrank_gamma,
        spec.epsilon,
        spec.temporal_init,
        spec.tolerance,
        spec.max_iterations
    )
}

fn echo_config(parts: &[String]) {
    eprintln!(
        "config: {} threads={}",
        parts.join(" "),
        rayon::current_num_threads()
    );
}

fn out_name(out: &Option<PathBuf>) -> String {
    out.as_ref()
        .map(|p| p.display().to_string())
        .unwrap_or_else(|| "-".to_owned())
}

/// Write to the file, or to stdout when no path was given.
fn emit(out: &Option<PathBuf>, body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let file = std::fs::File::create(path)
                .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
            let mut writer = std::io::BufWriter::new(file);
            body(&mut writer)
                .and_then(|()| writer.flush())
                .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            body(&mut lock).map_err(CliError::input)
        }
    }
}

fn cmd_compute(args: ComputeArgs) -> Result<(), CliError> {
    let spec = args.measure.to_spec()?;
    let (graph, format) = load_graph(&args.input)?;
    echo_config(&[
        "command=compute".into(),
        format!("input={}", args.input.input.display()),
        format!("format={}", format_name(format)),
        spec_fields(&spec),
        format!("out={}", out_name(&args.out)),
    ]);
    let table: ScoreTable = score_all(&graph, &spec)?;
    emit(&args.out, |w| write_edges(&table, w))
}

fn cmd_axioms(args: AxiomsArgs) -> Result<(), CliError> {
    let spec = args.measure.to_spec()?;
    let sampler = GraphSampler {
        seed: args.seed,
        max_people: args.max_people,
        max_events: args.max_events,
        max_event_size: args.max_event_size,
    };
    let mut checker = AxiomChecker::new(spec.clone(), sampler).with_a2_mode(args.a2_mode);
    let mut source = "random".to_owned();
    if let Some(path) = &args.input {
        let format = infer_format(path, args.format)?;
        let (events, warnings) = parse_events(path, format).map_err(CliError::input)?;
        report_warnings(&warnings);
        let graph = build_graph(&events).map_err(CliError::input)?;
        checker = checker.with_fixed_graph(GraphSpec::from_graph(&graph));
        source = path.display().to_string();
    }
    echo_config(&[
        "command=axioms".into(),
        format!("input={source}"),
        spec_fields(&spec),
        format!("trials={}", args.trials),
        format!("seed={}", args.seed),
        format!("a2_mode={:?}", args.a2_mode),
        format!(
            "max_people={} max_events={} max_event_size={}",
            args.max_people, args.max_events, args.max_event_size
        ),
        format!("out={}", out_name(&args.out)),
    ]);
    let report = checker.check_all(args.trials);
    println!("{}", report.table_row());
    for (axiom, verdict) in &report.entries {
        if let Some(witness) = verdict.witness() {
            println!("  {axiom} violated: {}", witness.summary());
        }
    }
    if let Some(path) = &args.out {
        std::fs::write(path, report.to_json())
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn append_census_record(
    path: &Path,
    label: &str,
    columns: &[(&str, String)],
) -> Result<(), CliError> {
    let fresh = !path.exists();
    let file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
    let mut writer = csv::Writer::from_writer(file);
    if fresh {
        let mut header = vec!["label"];
        header.extend(columns.iter().map(|(name, _)| *name));
        writer
            .write_record(&header)
            .map_err(|e| CliError::Input(e.to_string()))?;
    }
    let mut row = vec![label.to_owned()];
    row.extend(columns.iter().map(|(_, value)| value.clone()));
    writer
        .write_record(&row)
        .map_err(|e| CliError::Input(e.to_string()))?;
    writer.flush().map_err(|e| CliError::Input(e.to_string()))
}

fn dataset_label(args_label: &Option<String>, input: &Path) -> String {
    args_label.clone().unwrap_or_else(|| {
        input
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| input.display().to_string())
    })
}

fn cmd_order_census(args: OrderCensusArgs) -> Result<(), CliError> {
    let (graph, format) = load_graph(&args.input)?;
    let label = dataset_label(&args.label, &args.input.input);
    echo_config(&[
        "command=order-census".into(),
        format!("input={}", args.input.input.display()),
        format!("format={}", format_name(format)),
        format!("label={label}"),
        format!(
            "results={}",
            args.results
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_else(|| "-".into())
        ),
    ]);
    let census = incomparability_census(&graph).map_err(CliError::input)?;
    // Profile-equal tie pairs count as comparable.
    println!(
        "{} pairs, {} incomparable ({:.2}%)",
        census.total,
        census.count,
        census.percentage()
    );
    if let Some(path) = &args.results {
        append_census_record(
            path,
            &label,
            &[
                ("total", census.total.to_string()),
                ("incomparable", census.count.to_string()),
                ("percentage", format!("{:.2}", census.percentage())),
            ],
        )?;
    }
    Ok(())
}

fn cmd_conflicts(args: ConflictsArgs) -> Result<(), CliError> {
    let spec = args.measure.to_spec()?;
    let (graph, format) = load_graph(&args.input)?;
    let label = dataset_label(&args.label, &args.input.input);
    echo_config(&[
        "command=conflicts".into(),
        format!("input={}", args.input.input.display()),
        format!("format={}", format_name(format)),
        spec_fields(&spec),
        format!("label={label}"),
        format!(
            "results={}",
            args.results
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_else(|| "-".into())
        ),
    ]);
    let scores: ScoreTable = score_all(&graph, &spec)?;
    let census = conflict_census(&graph, &scores).map_err(CliError::input)?;
    println!(
        "{} pairs, {} conflicts ({:.2}%), {} weak disagreements",
        census.total,
        census.conflicts,
        census.percentage(),
        census.weak_disagreements
    );
    if let Some(path) = &args.results {
        append_census_record(
            path,
            &label,
            &[
                ("measure", spec.kind.name().to_owned()),
                ("total", census.total.to_string()),
                ("conflicts", census.conflicts.to_string()),
                ("percentage", format!("{:.2}", census.percentage())),
                ("weak", census.weak_disagreements.to_string()),
            ],
        )?;
    }
    Ok(())
}

fn cmd_tau(args: TauArgs) -> Result<(), CliError> {
    if args.measures.len() < 2 {
        return Err(CliError::Config(
            "tau needs at least 2 measures (pass --measures a,b,...)".into(),
        ));
    }
    let specs: Vec<MeasureSpec> = args
        .measures
        .iter()
        .map(|&kind| MeasureSpec::new(kind).expect("defaults are valid"))
        .collect();
    let (graph, format) = load_graph(&args.input)?;
    let scope = if args.all_pairs {
        PairScope::AllPairs
    } else {
        PairScope::Ties
    };
    echo_config(&[
        "command=tau".into(),
        format!("input={}", args.input.input.display()),
        format!("format={}", format_name(format)),
        format!(
            "measures={}",
            args.measures
                .iter()
                .map(|m| m.name())
                .collect::<Vec<_>>()
                .join(",")
        ),
        format!("all_pairs={}", args.all_pairs),
        format!("out={}", out_name(&args.out)),
    ]);
    let matrix: ties::TauMatrix =
        tau_matrix(&graph, &specs, scope).map_err(CliError::input)?;
    for (i, kind) in matrix.measures().iter().enumerate() {
        if let Some(reason) = matrix.failure(i) {
            eprintln!("warning: {kind} row missing: {reason}");
        }
    }
    emit(&args.out, |w| matrix.write_csv(w))
}

fn cmd_histogram(args: HistogramArgs) -> Result<(), CliError> {
    let (graph, format) = load_graph(&args.input)?;
    echo_config(&[
        "command=histogram".into(),
        format!("input={}", args.input.input.display()),
        format!("format={}", format_name(format)),
        format!("out={}", out_name(&args.out)),
    ]);
    let histogram = graph.event_size_histogram();
    emit(&args.out, |w| {
        writeln!(w, "size,count")?;
        for (size, count) in &histogram {
            writeln!(w, "{size},{count}")?;
        }
        Ok(())
    })
}

fn cmd_dot(args: DotArgs) -> Result<(), CliError> {
    if args.width_scale <= 0.0 {
        return Err(CliError::Config(format!(
            "--width-scale must be positive, got {}",
            args.width_scale
        )));
    }
    let spec = args.measure.to_spec()?;
    let (graph, format) = load_graph(&args.input)?;
    echo_config(&[
        "command=dot".into(),
        format!("input={}", args.input.input.display()),
        format!("format={}", format_name(format)),
        spec_fields(&spec),
        format!("width_scale={}", args.width_scale),
        format!("out={}", out_name(&args.out)),
    ]);
    let table: ScoreTable = score_all(&graph, &spec)?;
    if table.is_empty() {
        eprintln!("warning: no ties to draw; writing an empty graph");
    }
    emit(&args.out, |w| {
        write_dot(&table, w, args.width_scale).map(|_| ())
    })
}

fn cmd_linext(args: LinextArgs) -> Result<(), CliError> {
    let (graph, format) = load_graph(&args.input)?;
    echo_config(&[
        "command=linext".into(),
        format!("input={}", args.input.input.display()),
        format!("format={}", format_name(format)),
        format!("out={}", out_name(&args.out)),
    ]);
    let profiles: BTreeSet<TieProfile> = ties_by_profile(&graph)
        .map_err(CliError::input)?
        .into_keys()
        .collect();
    let table: ExtensionTable = order::build_linear_extension(profiles);
    let (ok, violations) = order::verify_linear_extension(&table);
    println!(
        "linear extension over {} profiles: {}",
        table.len(),
        if ok {
            "verified".to_owned()
        } else {
            format!("{} violations", violations.len())
        }
    );
    emit(&args.out, |w| {
        let mut writer = csv::Writer::from_writer(w);
        writer.write_record(["profile", "value"])?;
        for (profile, value) in table.iter() {
            let sizes: Vec<String> = profile.sizes().iter().map(|s| s.to_string()).collect();
            writer.write_record([sizes.join(" "), format_g(*value, 9)])?;
        }
        writer.flush()?;
        Ok(())
    })
}
