//! Command-line pipeline: ingest event logs, learn the strategy HMM,
//! build and prune the pseudo-map, cluster sub-intentions into
//! intentions, and report map statistics.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use mapminer::clustering::{
    build_intention_map, eagle_cluster, Cover, IntentionMap, UndirectedView,
};
use mapminer::config::PipelineConfig;
use mapminer::error::{Error, Result};
use mapminer::eventlog::{
    activity_histogram, encode_cases, parse_log, write_log, ColumnSchema, EventLog, HistogramEntry,
};
use mapminer::hmm::{
    baum_welch, deserialize_model, serialize_model, HmmModel, ModelDocument, TrainingReport,
};
use mapminer::kmeans::{kmeans_init_with, KMeansOptions};
use mapminer::mapbuilder::{
    build_pseudo_map, find_start_stop, prune_transitions, to_dot, to_graphml, PseudoMap,
    StartStopReport,
};
use mapminer::metrics::{network_metrics, node_metrics, NetworkMetrics, NodeMetrics};
use mapminer::strategy::{extract_strategies, StrategyTable};
use mapminer::synthgen::{generate_log, GroundTruthSpec};

#[derive(Parser)]
#[command(
    name = "mapminer",
    version,
    about = "Intention mining from event logs: strategies, maps, intentions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a log, report its shape, optionally write a normalized copy
    Ingest(IngestArgs),
    /// Activity frequency table with cumulative fractions
    Stats(StatsArgs),
    /// Learn the strategy HMM from a log
    Train(TrainArgs),
    /// Print the strategy table of a trained model
    Strategies(StrategiesArgs),
    /// Prune the transition matrix and export the pseudo-map
    Map(MapArgs),
    /// Cluster sub-intentions into intentions
    Cluster(ClusterArgs),
    /// Per-node and network statistics of the map
    Metrics(MetricsArgs),
    /// Run every stage and write all artifacts plus a manifest
    Pipeline(PipelineArgs),
    /// Generate a synthetic log from a ground-truth spec
    Synth(SynthArgs),
}

#[derive(Args, Clone)]
struct SchemaArgs {
    /// Field delimiter of the log file
    #[arg(long, default_value = ";")]
    delimiter: char,
    /// Header name of the case-id column
    #[arg(long, default_value = "Incident ID")]
    case_column: String,
    /// Header name of the timestamp column
    #[arg(long, default_value = "DateStamp")]
    timestamp_column: String,
    /// Header name of the activity column
    #[arg(long, default_value = "IncidentActivity_Type")]
    activity_column: String,
    /// Header name of the assignment-group column
    #[arg(long, default_value = "Assignment Group")]
    group_column: String,
    /// chrono pattern for timestamps (day-first by default)
    #[arg(long, default_value = "%d/%m/%Y %H:%M")]
    timestamp_format: String,
}

impl SchemaArgs {
    fn to_schema(&self) -> Result<ColumnSchema> {
        if !self.delimiter.is_ascii() {
            return Err(Error::Domain("delimiter must be an ASCII character".into()));
        }
        Ok(ColumnSchema {
            delimiter: self.delimiter as u8,
            case_column: self.case_column.clone(),
            timestamp_column: self.timestamp_column.clone(),
            activity_column: self.activity_column.clone(),
            group_column: self.group_column.clone(),
            timestamp_format: self.timestamp_format.clone(),
        })
    }
}

#[derive(Args, Clone)]
struct ModelParams {
    /// Hidden state count; defaults to round(activities / 3)
    #[arg(long)]
    states: Option<usize>,
    /// Baum-Welch iteration budget
    #[arg(long, default_value_t = 50)]
    iterations: usize,
    /// Early-stop threshold on the log-likelihood improvement
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
    /// Independent training runs; the best final likelihood wins
    #[arg(long, default_value_t = 1)]
    restarts: usize,
    /// Additive smoothing of the K-Means initialization counts
    #[arg(long, default_value_t = 1e-3)]
    smoothing: f64,
    /// Seed for every stochastic step
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args, Clone)]
struct MapParams {
    /// Transition pruning threshold
    #[arg(long, default_value_t = 0.15)]
    epsilon: f64,
    /// Override the selected Start sub-intention
    #[arg(long)]
    start: Option<usize>,
    /// Override the selected Stop sub-intention
    #[arg(long)]
    stop: Option<usize>,
}

#[derive(Args, Clone)]
struct ClusterParams {
    /// Minimal clique size seeding a community
    #[arg(long, default_value_t = 3)]
    clique: usize,
    /// Minimal community size kept in the cover
    #[arg(long, default_value_t = 2)]
    complex: usize,
}

#[derive(Args)]
struct IngestArgs {
    #[arg(long)]
    input: PathBuf,
    /// Write a normalized copy of the log here
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    schema: SchemaArgs,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    input: PathBuf,
    /// Write the histogram as JSON here
    #[arg(long)]
    json: Option<PathBuf>,
    #[command(flatten)]
    schema: SchemaArgs,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    input: PathBuf,
    /// Where to write the model JSON
    #[arg(long, default_value = "model.json")]
    output: PathBuf,
    /// Initialize with "kmeans" or "uniform"
    #[arg(long, default_value = "kmeans")]
    init: String,
    #[command(flatten)]
    schema: SchemaArgs,
    #[command(flatten)]
    model: ModelParams,
}

#[derive(Args)]
struct StrategiesArgs {
    #[arg(long)]
    model: PathBuf,
    /// Emission probabilities below this are summarized, not listed
    #[arg(long, default_value_t = 0.005)]
    threshold: f64,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct MapArgs {
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    map: MapParams,
    #[arg(long)]
    dot: Option<PathBuf>,
    #[arg(long)]
    graphml: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct ClusterArgs {
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    map: MapParams,
    #[command(flatten)]
    cluster: ClusterParams,
    /// Write the cover JSON here
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write the rebuilt intention map here
    #[arg(long)]
    intention_map: Option<PathBuf>,
}

#[derive(Args)]
struct MetricsArgs {
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    map: MapParams,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long)]
    input: PathBuf,
    /// Output directory; falls back to $MAPMINER_OUTDIR, then ./mapminer-out
    #[arg(long)]
    outdir: Option<PathBuf>,
    /// Overwrite artifacts produced under a different configuration
    #[arg(long, default_value_t = false)]
    force: bool,
    /// Emission display threshold of the strategy table
    #[arg(long, default_value_t = 0.005)]
    threshold: f64,
    #[command(flatten)]
    schema: SchemaArgs,
    #[command(flatten)]
    model: ModelParams,
    #[command(flatten)]
    map: MapParams,
    #[command(flatten)]
    cluster: ClusterParams,
}

#[derive(Args)]
struct SynthArgs {
    /// Ground-truth spec JSON
    #[arg(long)]
    spec: PathBuf,
    /// Where to write the generated log
    #[arg(long)]
    output: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Ingest(args) => run_ingest(args),
        Command::Stats(args) => run_stats(args),
        Command::Train(args) => run_train(args),
        Command::Strategies(args) => run_strategies(args),
        Command::Map(args) => run_map(args),
        Command::Cluster(args) => run_cluster(args),
        Command::Metrics(args) => run_metrics(args),
        Command::Pipeline(args) => run_pipeline(args),
        Command::Synth(args) => run_synth(args),
    };
    if let Err(err) = outcome {
        eprintln!("error: {err}");
        std::process::exit(1);
    }
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Domain(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| Error::Domain(format!("{}: {e}", parent.display())))?;
        }
    }
    fs::write(path, contents).map_err(|e| Error::Domain(format!("{}: {e}", path.display())))
}

fn to_pretty_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

fn parse_input(path: &Path, schema: &ColumnSchema) -> Result<EventLog> {
    let contents = read_file(path)?;
    let mut log = parse_log(contents.as_bytes(), schema)?;
    log.source = Some(path.display().to_string());
    Ok(log)
}

fn load_model(path: &Path) -> Result<(HmmModel, ModelDocument)> {
    let doc = deserialize_model(&read_file(path)?)?;
    let model = doc.clone().into_model()?;
    Ok((model, doc))
}

fn vocabulary_labels(doc: &ModelDocument) -> Result<mapminer::eventlog::Vocabulary> {
    let map = doc
        .vocabulary
        .as_ref()
        .ok_or_else(|| Error::Validation("model document carries no vocabulary".to_string()))?;
    let mut counts = std::collections::HashMap::new();
    // Rebuild by rank: lower ids get higher synthetic counts.
    for (label, &id) in map {
        counts.insert(label.clone(), map.len() - id);
    }
    Ok(mapminer::eventlog::Vocabulary::from_counts(&counts))
}

fn run_ingest(args: IngestArgs) -> Result<()> {
    let schema = args.schema.to_schema()?;
    let log = parse_input(&args.input, &schema)?;
    println!(
        "cases={} events={} activities={}",
        log.n_cases(),
        log.n_events(),
        log.n_activities()
    );
    if let Some(output) = args.output {
        let mut buffer = Vec::new();
        write_log(&log, &mut buffer)?;
        write_file(&output, &String::from_utf8_lossy(&buffer))?;
        println!("normalized log written to {}", output.display());
    }
    Ok(())
}

fn run_stats(args: StatsArgs) -> Result<()> {
    let schema = args.schema.to_schema()?;
    let log = parse_input(&args.input, &schema)?;
    let histogram = activity_histogram(&log)?;
    print_histogram(&histogram);
    if let Some(path) = args.json {
        write_file(&path, &to_pretty_json(&histogram)?)?;
    }
    Ok(())
}

fn print_histogram(histogram: &[HistogramEntry]) {
    let width = histogram
        .iter()
        .map(|h| h.activity.len())
        .max()
        .unwrap_or(8)
        .max(8);
    println!(
        "{:<width$}  {:>9}  {:>10}",
        "Activity", "Count", "Cumulative"
    );
    for entry in histogram {
        println!(
            "{:<width$}  {:>9}  {:>10.6}",
            entry.activity, entry.count, entry.cumulative
        );
    }
}

fn train_config(schema: &ColumnSchema, params: &ModelParams) -> PipelineConfig {
    PipelineConfig {
        n_states: params.states,
        bw_iterations: params.iterations,
        bw_tolerance: params.tolerance,
        bw_restarts: params.restarts,
        kmeans_smoothing: params.smoothing,
        seed: params.seed,
        schema: schema.clone(),
        ..PipelineConfig::default()
    }
}

fn train_model(
    log: &EventLog,
    config: &PipelineConfig,
    init: &str,
) -> Result<(HmmModel, TrainingReport)> {
    let sequences = encode_cases(log);
    let n_states = config.resolved_n_states(log.n_activities());
    let mut best: Option<(HmmModel, TrainingReport)> = None;
    for restart in 0..config.bw_restarts as u64 {
        let seed = config.seed.wrapping_add(restart.wrapping_mul(1000));
        let initial = match init {
            "kmeans" => kmeans_init_with(
                &sequences,
                n_states,
                seed,
                &KMeansOptions {
                    smoothing: config.kmeans_smoothing,
                    ..KMeansOptions::default()
                },
            )?,
            "uniform" => HmmModel::init_uniform(n_states, log.n_activities())?,
            other => {
                return Err(Error::Domain(format!(
                    "unknown init `{other}` (expected kmeans or uniform)"
                )))
            }
        };
        let (model, report) = baum_welch(
            &initial,
            &sequences,
            config.bw_iterations,
            config.bw_tolerance,
        )?;
        let final_ll = report
            .log_likelihood_per_iteration
            .last()
            .copied()
            .unwrap_or(f64::NEG_INFINITY);
        let improves = best.as_ref().is_none_or(|(_, held)| {
            final_ll
                > held
                    .log_likelihood_per_iteration
                    .last()
                    .copied()
                    .unwrap_or(f64::NEG_INFINITY)
        });
        if improves {
            best = Some((model, report));
        }
    }
    Ok(best.expect("at least one restart runs"))
}

fn run_train(args: TrainArgs) -> Result<()> {
    let schema = args.schema.to_schema()?;
    let config = train_config(&schema, &args.model);
    config.validate()?;
    let log = parse_input(&args.input, &schema)?;
    let (model, report) = train_model(&log, &config, &args.init)?;

    let mut doc = ModelDocument::from_model(&model);
    doc.vocabulary = Some(log.vocabulary.to_map());
    doc.config_hash = Some(config.hash());
    write_file(&args.output, &serialize_model(&doc)?)?;

    println!(
        "trained {} states over {} symbols in {} iterations (converged_early={})",
        model.n_states, model.n_symbols, report.iterations_run, report.converged_early
    );
    if let Some(ll) = report.log_likelihood_per_iteration.last() {
        println!("final log-likelihood: {ll:.4}");
    }
    println!("model written to {}", args.output.display());
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct StrategiesExport {
    config_hash: Option<String>,
    #[serde(flatten)]
    table: StrategyTable,
}

fn run_strategies(args: StrategiesArgs) -> Result<()> {
    let (model, doc) = load_model(&args.model)?;
    let vocabulary = vocabulary_labels(&doc)?;
    let table = extract_strategies(&model, &vocabulary, args.threshold)?;
    print_strategy_table(&table);
    if let Some(path) = args.json {
        let export = StrategiesExport {
            config_hash: doc.config_hash.clone(),
            table,
        };
        write_file(&path, &to_pretty_json(&export)?)?;
    }
    Ok(())
}

fn print_strategy_table(table: &StrategyTable) {
    println!("{:<5} {:>5}  {:<60} Distribution", "S", "pi", "Activities");
    for strategy in &table.strategies {
        let activities: Vec<&str> = strategy
            .activities
            .iter()
            .map(|a| a.activity.as_str())
            .collect();
        let distribution: Vec<String> = strategy
            .activities
            .iter()
            .map(|a| format!("{:.2}", a.probability))
            .collect();
        println!(
            "{:<5} {:>5.2}  {:<60} [{}]",
            strategy.label,
            strategy.pi,
            activities.join(", "),
            distribution.join(", ")
        );
    }
}

#[derive(Serialize, Deserialize)]
struct PseudoMapExport {
    config_hash: Option<String>,
    #[serde(flatten)]
    map: PseudoMap,
    start_stop: StartStopReport,
}

fn build_map(model: &HmmModel, params: &MapParams) -> Result<(PseudoMap, StartStopReport)> {
    let edges = prune_transitions(&model.trans, params.epsilon);
    let map = build_pseudo_map(&edges, model.n_states, params.epsilon)?;
    let report = find_start_stop(&map, params.start, params.stop)?;
    Ok((map, report))
}

fn run_map(args: MapArgs) -> Result<()> {
    let (model, doc) = load_model(&args.model)?;
    let (map, report) = build_map(&model, &args.map)?;
    println!(
        "{} nodes, {} edges at epsilon={}",
        map.n_nodes,
        map.edges.len(),
        map.epsilon
    );
    println!(
        "start candidates: {:?} (selected {:?})",
        report.start_candidates, report.selected_start
    );
    println!(
        "stop candidates:  {:?} (selected {:?})",
        report.stop_candidates, report.selected_stop
    );
    if let Some(path) = &args.dot {
        write_file(path, &to_dot(&map, doc.config_hash.as_deref()))?;
    }
    if let Some(path) = &args.graphml {
        write_file(path, &to_graphml(&map))?;
    }
    if let Some(path) = &args.json {
        let export = PseudoMapExport {
            config_hash: doc.config_hash.clone(),
            map,
            start_stop: report,
        };
        write_file(path, &to_pretty_json(&export)?)?;
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct CoverExport {
    config_hash: Option<String>,
    communities: Vec<Vec<usize>>,
    outliers: Vec<usize>,
    eq: f64,
}

impl CoverExport {
    fn new(cover: &Cover, config_hash: Option<String>) -> Self {
        CoverExport {
            config_hash,
            communities: cover
                .communities
                .iter()
                .map(|c| c.iter().copied().collect())
                .collect(),
            outliers: cover.outliers.iter().copied().collect(),
            eq: cover.eq,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct IntentionMapExport {
    config_hash: Option<String>,
    #[serde(flatten)]
    map: IntentionMap,
}

fn run_cluster(args: ClusterArgs) -> Result<()> {
    let (model, doc) = load_model(&args.model)?;
    let (map, report) = build_map(&model, &args.map)?;
    let view = UndirectedView::from_pseudo_map(&map);
    let cover = eagle_cluster(&view, args.cluster.clique, args.cluster.complex);
    print_membership_table(&cover);
    println!(
        "{} intentions, eq={:.4}, outliers={:?}",
        cover.communities.len(),
        cover.eq,
        cover.outliers
    );
    if let Some(path) = &args.json {
        write_file(
            path,
            &to_pretty_json(&CoverExport::new(&cover, doc.config_hash.clone()))?,
        )?;
    }
    if let Some(path) = &args.intention_map {
        let intention_map =
            build_intention_map(&map, &cover, report.selected_start, report.selected_stop)?;
        let export = IntentionMapExport {
            config_hash: doc.config_hash.clone(),
            map: intention_map,
        };
        write_file(path, &to_pretty_json(&export)?)?;
    }
    Ok(())
}

fn print_membership_table(cover: &Cover) {
    println!("{:<6} Cluster", "Node");
    for node in 0..cover.membership.len() {
        let labels = cover.memberships_of(node);
        let cell = if labels.is_empty() {
            "-".to_string()
        } else {
            labels.join(", ")
        };
        println!("{node:<6} {cell}");
    }
}

#[derive(Serialize, Deserialize)]
struct MetricsExport {
    config_hash: Option<String>,
    nodes: Vec<NodeMetrics>,
    network: NetworkMetrics,
}

fn run_metrics(args: MetricsArgs) -> Result<()> {
    let (model, doc) = load_model(&args.model)?;
    let (map, _) = build_map(&model, &args.map)?;
    let view = UndirectedView::from_pseudo_map(&map);
    let nodes = node_metrics(&view);
    let network = network_metrics(&view)?;
    print_metrics(&nodes, &network);
    if let Some(path) = &args.json {
        let export = MetricsExport {
            config_hash: doc.config_hash.clone(),
            nodes,
            network,
        };
        write_file(path, &to_pretty_json(&export)?)?;
    }
    Ok(())
}

fn print_metrics(nodes: &[NodeMetrics], network: &NetworkMetrics) {
    println!(
        "{:<6} {:>6} {:>6} {:>4} {:>6}",
        "Node", "CC", "CL", "EC", "NC"
    );
    for m in nodes {
        println!(
            "{:<6} {:>6.2} {:>6.2} {:>4} {:>6.2}",
            m.node,
            m.clustering_coefficient,
            m.closeness,
            m.eccentricity,
            m.neighborhood_connectivity
        );
    }
    println!(
        "diameter={} density={:.3} centralization={:.3} characteristic_path_length={:.3}",
        network.diameter,
        network.density,
        network.degree_centralization,
        network.characteristic_path_length
    );
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    config: PipelineConfig,
    config_hash: String,
    artifacts: BTreeMap<String, String>,
    log: LogSummary,
    training: TrainingReport,
    network: NetworkMetrics,
}

#[derive(Serialize, Deserialize)]
struct LogSummary {
    cases: usize,
    events: usize,
    activities: usize,
}

fn run_pipeline(args: PipelineArgs) -> Result<()> {
    let schema = args.schema.to_schema()?;
    let config = PipelineConfig {
        n_states: args.model.states,
        epsilon: args.map.epsilon,
        bw_iterations: args.model.iterations,
        bw_tolerance: args.model.tolerance,
        bw_restarts: args.model.restarts,
        kmeans_smoothing: args.model.smoothing,
        clique_size_threshold: args.cluster.clique,
        complex_size_threshold: args.cluster.complex,
        display_threshold: args.threshold,
        seed: args.model.seed,
        schema: schema.clone(),
        start_override: args.map.start,
        stop_override: args.map.stop,
    };
    config.validate()?;
    let config_hash = config.hash();

    let outdir = args
        .outdir
        .or_else(|| std::env::var_os("MAPMINER_OUTDIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("mapminer-out"));
    fs::create_dir_all(&outdir).map_err(|e| Error::Domain(format!("{}: {e}", outdir.display())))?;

    // A manifest from a different configuration guards its artifacts.
    let manifest_path = outdir.join("manifest.json");
    if manifest_path.exists() && !args.force {
        let existing: Manifest = serde_json::from_str(&read_file(&manifest_path)?)?;
        if existing.config_hash != config_hash {
            return Err(Error::Domain(format!(
                "{} belongs to config {} (current {}); pass --force to overwrite",
                manifest_path.display(),
                existing.config_hash,
                config_hash
            )));
        }
    }

    println!("[1/6] parsing {}", args.input.display());
    let log = parse_input(&args.input, &schema)?;
    println!(
        "      cases={} events={} activities={}",
        log.n_cases(),
        log.n_events(),
        log.n_activities()
    );

    let n_states = config.resolved_n_states(log.n_activities());
    println!(
        "[2/6] training {} states ({} iterations, seed {})",
        n_states, config.bw_iterations, config.seed
    );
    let (model, report) = train_model(&log, &config, "kmeans")?;
    let mut doc = ModelDocument::from_model(&model);
    doc.vocabulary = Some(log.vocabulary.to_map());
    doc.config_hash = Some(config_hash.clone());
    let model_path = outdir.join("model.json");
    write_file(&model_path, &serialize_model(&doc)?)?;

    println!("[3/6] extracting strategies");
    let table = extract_strategies(&model, &log.vocabulary, config.display_threshold)?;
    let strategies_path = outdir.join("strategies.json");
    write_file(
        &strategies_path,
        &to_pretty_json(&StrategiesExport {
            config_hash: Some(config_hash.clone()),
            table,
        })?,
    )?;

    println!("[4/6] building pseudo-map at epsilon={}", config.epsilon);
    let map_params = MapParams {
        epsilon: config.epsilon,
        start: config.start_override,
        stop: config.stop_override,
    };
    let (map, start_stop) = build_map(&model, &map_params)?;
    println!(
        "      {} edges, start candidates {:?}, stop candidates {:?}",
        map.edges.len(),
        start_stop.start_candidates,
        start_stop.stop_candidates
    );
    let dot_path = outdir.join("pseudo_map.dot");
    write_file(&dot_path, &to_dot(&map, Some(&config_hash)))?;
    let graphml_path = outdir.join("pseudo_map.graphml");
    write_file(&graphml_path, &to_graphml(&map))?;
    let map_json_path = outdir.join("pseudo_map.json");
    write_file(
        &map_json_path,
        &to_pretty_json(&PseudoMapExport {
            config_hash: Some(config_hash.clone()),
            map: map.clone(),
            start_stop: start_stop.clone(),
        })?,
    )?;

    println!(
        "[5/6] clustering (clique >= {}, complex >= {})",
        config.clique_size_threshold, config.complex_size_threshold
    );
    let view = UndirectedView::from_pseudo_map(&map);
    let cover = eagle_cluster(
        &view,
        config.clique_size_threshold,
        config.complex_size_threshold,
    );
    println!(
        "      {} intentions, eq={:.4}, outliers={:?}",
        cover.communities.len(),
        cover.eq,
        cover.outliers
    );
    let cover_path = outdir.join("cover.json");
    write_file(
        &cover_path,
        &to_pretty_json(&CoverExport::new(&cover, Some(config_hash.clone())))?,
    )?;
    let intention_map = build_intention_map(
        &map,
        &cover,
        start_stop.selected_start,
        start_stop.selected_stop,
    )?;
    let intention_path = outdir.join("intention_map.json");
    write_file(
        &intention_path,
        &to_pretty_json(&IntentionMapExport {
            config_hash: Some(config_hash.clone()),
            map: intention_map,
        })?,
    )?;

    println!("[6/6] network metrics");
    let nodes = node_metrics(&view);
    let network = network_metrics(&view)?;
    println!(
        "      diameter={} density={:.3} centralization={:.3} cpl={:.3}",
        network.diameter,
        network.density,
        network.degree_centralization,
        network.characteristic_path_length
    );
    let metrics_path = outdir.join("metrics.json");
    write_file(
        &metrics_path,
        &to_pretty_json(&MetricsExport {
            config_hash: Some(config_hash.clone()),
            nodes,
            network: network.clone(),
        })?,
    )?;

    // File names relative to the manifest, so equivalent runs in
    // different directories stay byte-identical.
    let artifacts: BTreeMap<String, String> = [
        ("model", &model_path),
        ("strategies", &strategies_path),
        ("pseudo_map_dot", &dot_path),
        ("pseudo_map_graphml", &graphml_path),
        ("pseudo_map_json", &map_json_path),
        ("cover", &cover_path),
        ("intention_map", &intention_path),
        ("metrics", &metrics_path),
    ]
    .into_iter()
    .map(|(k, v)| {
        let name = v
            .file_name()
            .map(|f| f.to_string_lossy().into_owned())
            .unwrap_or_else(|| v.display().to_string());
        (k.to_string(), name)
    })
    .collect();
    let manifest = Manifest {
        config,
        config_hash,
        artifacts,
        log: LogSummary {
            cases: log.n_cases(),
            events: log.n_events(),
            activities: log.n_activities(),
        },
        training: report,
        network,
    };
    write_file(&manifest_path, &to_pretty_json(&manifest)?)?;
    println!("manifest written to {}", manifest_path.display());
    Ok(())
}

fn run_synth(args: SynthArgs) -> Result<()> {
    let spec: GroundTruthSpec = serde_json::from_str(&read_file(&args.spec)?)?;
    let log = generate_log(&spec)?;
    let mut buffer = Vec::new();
    write_log(&log, &mut buffer)?;
    write_file(&args.output, &String::from_utf8_lossy(&buffer))?;
    println!(
        "generated cases={} events={} activities={} -> {}",
        log.n_cases(),
        log.n_events(),
        log.n_activities(),
        args.output.display()
    );
    Ok(())
}
