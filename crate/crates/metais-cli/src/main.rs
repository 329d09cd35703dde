mod config;

use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use metais::dataset::{load_csv, load_keel, Dataset, LabelColumn};
use metais::eval::{self, BenchmarkSettings};
use metais::forest::{self, ForestParams};
use metais::isalgos::{self, Algorithm};
use metais::metafeatures;
use metais::nng::{self, BuildMethod};
use metais::pipeline::{self, ClassifierKind, MetaTrainConfig, QueryScaling};

use config::{load_config, parse_label_column, RunConfig};

/// Instance selection with a trainable meta model.
#[derive(Parser)]
#[command(name = "metais", version, about)]
struct Cli {
    /// Settings file (.toml or .json); explicit flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Worker threads.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a reference selection algorithm on one dataset.
    Select(SelectArgs),
    /// Train a meta selector from labeled selection runs on several datasets.
    MetaTrain(MetaTrainArgs),
    /// Score a dataset with a trained selector and threshold the result.
    MetaSelect(MetaSelectArgs),
    /// Leave-one-dataset-out comparison of the meta selector against its
    /// reference algorithm.
    Benchmark(BenchmarkArgs),
    /// Export feature-importance tables from a trained selector.
    Importance(ImportanceArgs),
    /// Precompute a nearest-neighbor graph and store it as JSON.
    GraphCache(GraphCacheArgs),
}

fn algorithm_value(s: &str) -> std::result::Result<Algorithm, String> {
    Algorithm::from_str(s).map_err(|e| e.to_string())
}

fn classifier_value(s: &str) -> std::result::Result<ClassifierKind, String> {
    ClassifierKind::from_str(s).map_err(|e| e.to_string())
}

fn scaling_value(s: &str) -> std::result::Result<QueryScaling, String> {
    QueryScaling::from_str(s).map_err(|e| e.to_string())
}

fn method_value(s: &str) -> std::result::Result<String, String> {
    match s.to_ascii_lowercase().as_str() {
        "auto" | "brute" | "indexed" => Ok(s.to_ascii_lowercase()),
        other => Err(format!("unknown graph method `{}`", other)),
    }
}

#[derive(Args)]
struct SelectArgs {
    /// Dataset file (.dat or .csv).
    #[arg(long, value_name = "FILE")]
    data: PathBuf,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Reference algorithm: enn, drop3, icf, hmnei or ccis.
    #[arg(long, value_parser = algorithm_value)]
    algorithm: Option<Algorithm>,
    /// Neighborhood size.
    #[arg(short, long)]
    k: Option<usize>,
    /// CSV label column: a header name, a zero-based index, or `last`.
    #[arg(long)]
    label_column: Option<String>,
}

#[derive(Args)]
struct MetaTrainArgs {
    /// Training dataset files (repeatable).
    #[arg(long, value_name = "FILE", required = true)]
    data: Vec<PathBuf>,
    /// Output directory for the selector bundle.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Reference algorithm supplying the keep/remove labels.
    #[arg(long, value_parser = algorithm_value)]
    algorithm: Option<Algorithm>,
    /// Neighborhood size of the reference algorithm.
    #[arg(short, long)]
    k: Option<usize>,
    /// Descriptor neighborhood sizes, ascending (e.g. 3,5,9,15,23,33).
    #[arg(long, value_delimiter = ',')]
    k_list: Option<Vec<usize>>,
    /// Meta classifier: rf or balanced_rf.
    #[arg(long, value_parser = classifier_value)]
    classifier: Option<ClassifierKind>,
    /// Trees in the forest.
    #[arg(long)]
    trees: Option<usize>,
    /// Maximum tree depth.
    #[arg(long)]
    max_depth: Option<usize>,
    /// Minimum rows per leaf.
    #[arg(long)]
    min_leaf: Option<usize>,
    /// Candidate features per split (default: square root of the column count).
    #[arg(long)]
    features_per_split: Option<usize>,
    /// Random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// CSV label column: a header name, a zero-based index, or `last`.
    #[arg(long)]
    label_column: Option<String>,
}

#[derive(Args)]
struct MetaSelectArgs {
    /// Directory holding a trained selector bundle.
    #[arg(long, value_name = "DIR")]
    bundle: PathBuf,
    /// Dataset file (.dat or .csv).
    #[arg(long, value_name = "FILE")]
    data: PathBuf,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Keep threshold on the retention probability.
    #[arg(long)]
    theta: Option<f64>,
    /// Descriptor scaling: `own` (query statistics) or `train`.
    #[arg(long, value_parser = scaling_value)]
    scaling: Option<QueryScaling>,
    /// CSV label column: a header name, a zero-based index, or `last`.
    #[arg(long)]
    label_column: Option<String>,
}

#[derive(Args)]
struct BenchmarkArgs {
    /// Dataset files (repeatable; at least two).
    #[arg(long, value_name = "FILE", required = true)]
    data: Vec<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Reference algorithm.
    #[arg(long, value_parser = algorithm_value)]
    algorithm: Option<Algorithm>,
    /// Neighborhood size of the reference algorithm.
    #[arg(short, long)]
    k: Option<usize>,
    /// Descriptor neighborhood sizes, ascending.
    #[arg(long, value_delimiter = ',')]
    k_list: Option<Vec<usize>>,
    /// Meta classifier: rf or balanced_rf.
    #[arg(long, value_parser = classifier_value)]
    classifier: Option<ClassifierKind>,
    /// Trees in the forest.
    #[arg(long)]
    trees: Option<usize>,
    /// Maximum tree depth.
    #[arg(long)]
    max_depth: Option<usize>,
    /// Minimum rows per leaf.
    #[arg(long)]
    min_leaf: Option<usize>,
    /// Candidate features per split.
    #[arg(long)]
    features_per_split: Option<usize>,
    /// Thresholds to sweep, ascending (e.g. 0.1,0.2,...,0.9).
    #[arg(long, value_delimiter = ',')]
    thetas: Option<Vec<f64>>,
    /// Stratified folds per held-out dataset.
    #[arg(long)]
    folds: Option<usize>,
    /// Random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Significance level for the statistical tests.
    #[arg(long)]
    alpha: Option<f64>,
    /// Descriptor scaling for held-out data: `own` or `train`.
    #[arg(long, value_parser = scaling_value)]
    scaling: Option<QueryScaling>,
    /// CSV label column: a header name, a zero-based index, or `last`.
    #[arg(long)]
    label_column: Option<String>,
}

#[derive(Args)]
struct ImportanceArgs {
    /// Directory holding a trained selector bundle.
    #[arg(long, value_name = "DIR")]
    bundle: PathBuf,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Args)]
struct GraphCacheArgs {
    /// Dataset file (.dat or .csv).
    #[arg(long, value_name = "FILE")]
    data: PathBuf,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Neighbors to store per row.
    #[arg(short, long)]
    k: Option<usize>,
    /// Graph construction: auto, brute or indexed.
    #[arg(long, value_parser = method_value)]
    method: Option<String>,
    /// CSV label column: a header name, a zero-based index, or `last`.
    #[arg(long)]
    label_column: Option<String>,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let cfg = match &cli.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    let jobs = cli.jobs.or(cfg.jobs).unwrap_or(1);
    if jobs == 0 {
        bail!("--jobs must be at least 1");
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build_global()
        .context("initializing the worker pool")?;

    match cli.command {
        Command::Select(a) => cmd_select(a, &cfg, jobs),
        Command::MetaTrain(a) => cmd_meta_train(a, &cfg, jobs),
        Command::MetaSelect(a) => cmd_meta_select(a, &cfg, jobs),
        Command::Benchmark(a) => cmd_benchmark(a, &cfg, jobs),
        Command::Importance(a) => cmd_importance(a, jobs),
        Command::GraphCache(a) => cmd_graph_cache(a, &cfg, jobs),
    }
}

/// Try the path as given, then relative to METAIS_DATA_DIR.
fn resolve_data_path(p: &Path) -> Result<PathBuf> {
    if p.exists() {
        return Ok(p.to_path_buf());
    }
    if let Ok(dir) = std::env::var("METAIS_DATA_DIR") {
        let alt = Path::new(&dir).join(p);
        if alt.exists() {
            return Ok(alt);
        }
    }
    bail!("dataset file `{}` not found", p.display());
}

fn load_dataset(p: &Path, label: &LabelColumn) -> Result<Dataset> {
    let path = resolve_data_path(p)?;
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .unwrap_or_default();
    let d = match ext.as_str() {
        "dat" | "keel" => load_keel(&path)?,
        "csv" => load_csv(&path, label)?,
        other => bail!(
            "`{}`: unsupported dataset extension `{}` (expected .dat or .csv)",
            path.display(),
            other
        ),
    };
    Ok(d)
}

fn load_datasets(paths: &[PathBuf], label: &LabelColumn) -> Result<Vec<Dataset>> {
    paths.iter().map(|p| load_dataset(p, label)).collect()
}

fn prepare_out_dir(out: &Path) -> Result<()> {
    std::fs::create_dir_all(out)
        .with_context(|| format!("creating output directory `{}`", out.display()))
}

fn write_json_file(dir: &Path, name: &str, value: &serde_json::Value) -> Result<()> {
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(&path, text).with_context(|| format!("writing `{}`", path.display()))
}

fn resolve_algorithm(flag: Option<Algorithm>, cfg: Option<&str>) -> Result<Algorithm> {
    match (flag, cfg) {
        (Some(a), _) => Ok(a),
        (None, Some(s)) => Ok(Algorithm::from_str(s)?),
        (None, None) => Ok(Algorithm::Enn),
    }
}

fn resolve_classifier(flag: Option<ClassifierKind>, cfg: Option<&str>) -> Result<ClassifierKind> {
    match (flag, cfg) {
        (Some(c), _) => Ok(c),
        (None, Some(s)) => Ok(ClassifierKind::from_str(s)?),
        (None, None) => Ok(ClassifierKind::default()),
    }
}

fn resolve_scaling(flag: Option<QueryScaling>, cfg: Option<&str>) -> Result<QueryScaling> {
    match (flag, cfg) {
        (Some(q), _) => Ok(q),
        (None, Some(s)) => Ok(QueryScaling::from_str(s)?),
        (None, None) => Ok(QueryScaling::default()),
    }
}

fn forest_params(
    trees: Option<usize>,
    max_depth: Option<usize>,
    min_leaf: Option<usize>,
    features_per_split: Option<usize>,
) -> ForestParams {
    let d = ForestParams::default();
    ForestParams {
        n_trees: trees.unwrap_or(d.n_trees),
        max_depth: max_depth.unwrap_or(d.max_depth),
        min_leaf: min_leaf.unwrap_or(d.min_leaf),
        features_per_split: features_per_split.or(d.features_per_split),
    }
}

fn forest_json(f: &ForestParams) -> serde_json::Value {
    json!({
        "trees": f.n_trees,
        "max_depth": f.max_depth,
        "min_leaf": f.min_leaf,
        "features_per_split": f.features_per_split,
    })
}

fn cmd_select(a: SelectArgs, cfg: &RunConfig, jobs: usize) -> Result<()> {
    let algorithm = resolve_algorithm(a.algorithm, cfg.algorithm.as_deref())?;
    let k = a.k.or(cfg.k).unwrap_or(3);
    let label_raw = a
        .label_column
        .or_else(|| cfg.label_column.clone())
        .unwrap_or_else(|| "last".into());
    let label = parse_label_column(&label_raw);

    let d = load_dataset(&a.data, &label)?;
    prepare_out_dir(&a.out)?;

    let (mask, wall_ms) = eval::time_ms(|| isalgos::run(algorithm, &d, k));
    let mask = mask?;

    isalgos::write_mask_csv(&mask, a.out.join("mask.csv"))?;
    let stats = isalgos::reduction_stats(&mask);
    write_json_file(
        &a.out,
        "stats.json",
        &json!({
            "dataset": d.name(),
            "algorithm": stats.algorithm,
            "k": stats.k,
            "n": stats.n,
            "n_kept": stats.n_kept,
            "reduction_rate": stats.reduction_rate,
        }),
    )?;
    write_json_file(&a.out, "timing.json", &json!({ "wall_ms": wall_ms }))?;
    write_json_file(
        &a.out,
        "run_config.json",
        &json!({
            "command": "select",
            "data": a.data,
            "algorithm": algorithm.name(),
            "k": k,
            "label_column": label_raw,
            "jobs": jobs,
        }),
    )?;
    println!(
        "{}: kept {} of {} rows (reduction {:.4})",
        d.name(),
        stats.n_kept,
        stats.n,
        stats.reduction_rate
    );
    Ok(())
}

fn cmd_meta_train(a: MetaTrainArgs, cfg: &RunConfig, jobs: usize) -> Result<()> {
    let algorithm = resolve_algorithm(a.algorithm, cfg.algorithm.as_deref())?;
    let k = a.k.or(cfg.k).unwrap_or(3);
    let k_list = a
        .k_list
        .or_else(|| cfg.k_list.clone())
        .unwrap_or_else(|| metafeatures::DEFAULT_K_LIST.to_vec());
    let classifier = resolve_classifier(a.classifier, cfg.classifier.as_deref())?;
    let forest = forest_params(
        a.trees.or(cfg.trees),
        a.max_depth.or(cfg.max_depth),
        a.min_leaf.or(cfg.min_leaf),
        a.features_per_split.or(cfg.features_per_split),
    );
    let seed = a.seed.or(cfg.seed).unwrap_or(42);
    let label_raw = a
        .label_column
        .or_else(|| cfg.label_column.clone())
        .unwrap_or_else(|| "last".into());
    let label = parse_label_column(&label_raw);

    let datasets = load_datasets(&a.data, &label)?;
    prepare_out_dir(&a.out)?;

    let (meta, extract_ms) =
        eval::time_ms(|| pipeline::build_meta_training_set(&datasets, algorithm, k, &k_list));
    let meta = meta?;
    let train_cfg = MetaTrainConfig {
        reference_algorithm: algorithm,
        k,
        k_list: k_list.clone(),
        classifier,
        forest: forest.clone(),
        seed,
    };
    let (selector, train_ms) = eval::time_ms(|| pipeline::train_meta_selector(&meta, &train_cfg));
    let selector = selector?;
    pipeline::save_bundle(&selector, &a.out)?;

    // Per-dataset label balance of the merged training table.
    let labels = meta.labels().expect("training table is labeled");
    let mut per_source: Vec<serde_json::Value> = Vec::new();
    for s in meta.sources() {
        let mut rows = 0usize;
        let mut kept = 0usize;
        for i in 0..meta.n_rows() {
            if meta.source_name_of(i) == s {
                rows += 1;
                kept += usize::from(labels[i]);
            }
        }
        per_source.push(json!({ "source": s, "rows": rows, "kept_label": kept }));
    }
    let kept_total: usize = labels.iter().map(|&l| usize::from(l)).sum();
    write_json_file(
        &a.out,
        "training_log.json",
        &json!({
            "datasets": per_source,
            "meta_rows": meta.n_rows(),
            "meta_columns": meta.n_cols(),
            "kept_labels": kept_total,
            "discarded_labels": meta.n_rows() - kept_total,
            "oob_available": selector.model.oob_available,
        }),
    )?;
    write_json_file(
        &a.out,
        "timing.json",
        &json!({ "extract_ms": extract_ms, "train_ms": train_ms }),
    )?;
    write_json_file(
        &a.out,
        "run_config.json",
        &json!({
            "command": "meta-train",
            "data": a.data,
            "algorithm": algorithm.name(),
            "k": k,
            "k_list": k_list,
            "classifier": classifier.name(),
            "forest": forest_json(&forest),
            "seed": seed,
            "label_column": label_raw,
            "jobs": jobs,
        }),
    )?;
    println!(
        "trained on {} datasets ({} meta rows); bundle written to {}",
        datasets.len(),
        meta.n_rows(),
        a.out.display()
    );
    Ok(())
}

fn cmd_meta_select(a: MetaSelectArgs, cfg: &RunConfig, jobs: usize) -> Result<()> {
    let theta = a.theta.or(cfg.theta).unwrap_or(0.5);
    let scaling = resolve_scaling(a.scaling, cfg.scaling.as_deref())?;
    let label_raw = a
        .label_column
        .or_else(|| cfg.label_column.clone())
        .unwrap_or_else(|| "last".into());
    let label = parse_label_column(&label_raw);

    let selector = pipeline::load_bundle(&a.bundle)?;
    let d = load_dataset(&a.data, &label)?;
    prepare_out_dir(&a.out)?;

    let (scores, wall_ms) = eval::time_ms(|| pipeline::score_instances(&selector, &d, scaling));
    let scores = scores?;
    let mask = pipeline::apply_threshold(&scores, theta)?;

    let mut prob_csv = String::from("index,probability\n");
    for (i, p) in scores.probabilities.iter().enumerate() {
        prob_csv.push_str(&format!("{},{}\n", i, p));
    }
    std::fs::write(a.out.join("probabilities.csv"), prob_csv)
        .with_context(|| format!("writing `{}`", a.out.join("probabilities.csv").display()))?;

    isalgos::write_mask_csv(&mask, a.out.join("mask.csv"))?;
    write_json_file(
        &a.out,
        "stats.json",
        &json!({
            "dataset": d.name(),
            "selector": scores.selector,
            "theta": theta,
            "n": d.n_rows(),
            "n_kept": mask.kept_count(),
            "reduction_rate": mask.reduction_rate(),
            "warnings": scores.warnings,
        }),
    )?;
    write_json_file(&a.out, "timing.json", &json!({ "wall_ms": wall_ms }))?;
    write_json_file(
        &a.out,
        "run_config.json",
        &json!({
            "command": "meta-select",
            "bundle": a.bundle,
            "data": a.data,
            "theta": theta,
            "scaling": scaling.name(),
            "label_column": label_raw,
            "jobs": jobs,
        }),
    )?;
    println!(
        "{}: kept {} of {} rows at theta {} (reduction {:.4})",
        d.name(),
        mask.kept_count(),
        d.n_rows(),
        theta,
        mask.reduction_rate()
    );
    Ok(())
}

fn cmd_benchmark(a: BenchmarkArgs, cfg: &RunConfig, jobs: usize) -> Result<()> {
    if a.data.len() < 2 {
        bail!("benchmark needs at least two --data files");
    }
    let settings = BenchmarkSettings {
        reference_algorithm: resolve_algorithm(a.algorithm, cfg.algorithm.as_deref())?,
        k: a.k.or(cfg.k).unwrap_or(3),
        k_list: a
            .k_list
            .or_else(|| cfg.k_list.clone())
            .unwrap_or_else(|| metafeatures::DEFAULT_K_LIST.to_vec()),
        classifier: resolve_classifier(a.classifier, cfg.classifier.as_deref())?,
        forest: forest_params(
            a.trees.or(cfg.trees),
            a.max_depth.or(cfg.max_depth),
            a.min_leaf.or(cfg.min_leaf),
            a.features_per_split.or(cfg.features_per_split),
        ),
        thetas: a
            .thetas
            .or_else(|| cfg.thetas.clone())
            .unwrap_or_else(|| pipeline::DEFAULT_THETA_GRID.to_vec()),
        folds: a.folds.or(cfg.folds).unwrap_or(5),
        seed: a.seed.or(cfg.seed).unwrap_or(42),
        alpha: a.alpha.or(cfg.alpha).unwrap_or(0.05),
        query_scaling: resolve_scaling(a.scaling, cfg.scaling.as_deref())?,
    };
    let label_raw = a
        .label_column
        .or_else(|| cfg.label_column.clone())
        .unwrap_or_else(|| "last".into());
    let label = parse_label_column(&label_raw);

    let datasets = load_datasets(&a.data, &label)?;
    prepare_out_dir(&a.out)?;

    let report = eval::leave_one_dataset_out(&datasets, &settings)?;

    eval::write_report_json(&report, a.out.join("report.json"))?;
    eval::write_curves_csv(&report, a.out.join("curves.csv"))?;
    eval::write_summary_csv(&report, a.out.join("summary_auarr_l.csv"), true)?;
    eval::write_summary_csv(&report, a.out.join("summary_auarr.csv"), false)?;
    eval::write_timing_csv(&report, a.out.join("timing.csv"), jobs)?;
    eval::write_importance_csvs(&report.importance, &a.out)?;
    write_json_file(
        &a.out,
        "run_config.json",
        &json!({
            "command": "benchmark",
            "data": a.data,
            "algorithm": settings.reference_algorithm.name(),
            "k": settings.k,
            "k_list": settings.k_list,
            "classifier": settings.classifier.name(),
            "forest": forest_json(&settings.forest),
            "thetas": settings.thetas,
            "folds": settings.folds,
            "seed": settings.seed,
            "alpha": settings.alpha,
            "scaling": settings.query_scaling.name(),
            "label_column": label_raw,
            "jobs": jobs,
        }),
    )?;

    for side in [("limited", &report.aggregate.limited), ("full", &report.aggregate.unlimited)] {
        println!(
            "{}: meta wins {}, reference wins {}, ties {} (mean diff {:+.5}, {})",
            side.0,
            side.1.wins_meta,
            side.1.wins_reference,
            side.1.ties,
            side.1.mean_diff,
            side.1.wilcoxon.verdict.symbol(),
        );
    }
    if !report.skipped_datasets.is_empty() {
        for (name, why) in &report.skipped_datasets {
            eprintln!("skipped {}: {}", name, why);
        }
    }
    Ok(())
}

fn cmd_importance(a: ImportanceArgs, jobs: usize) -> Result<()> {
    let selector = pipeline::load_bundle(&a.bundle)?;
    prepare_out_dir(&a.out)?;
    let imp = forest::mdi_importance(&selector.model);
    eval::write_importance_csvs(&imp, &a.out)?;
    write_json_file(
        &a.out,
        "run_config.json",
        &json!({
            "command": "importance",
            "bundle": a.bundle,
            "jobs": jobs,
        }),
    )?;
    println!("importance tables written to {}", a.out.display());
    Ok(())
}

fn cmd_graph_cache(a: GraphCacheArgs, cfg: &RunConfig, jobs: usize) -> Result<()> {
    let k = a.k.or(cfg.k).unwrap_or(33);
    let method_raw = a
        .method
        .or_else(|| cfg.method.clone())
        .unwrap_or_else(|| "auto".into());
    let label_raw = a
        .label_column
        .or_else(|| cfg.label_column.clone())
        .unwrap_or_else(|| "last".into());
    let label = parse_label_column(&label_raw);

    let d = load_dataset(&a.data, &label)?;
    let method = if method_raw.eq_ignore_ascii_case("auto") {
        BuildMethod::auto(d.n_rows())
    } else {
        BuildMethod::from_str(&method_raw)?
    };
    prepare_out_dir(&a.out)?;

    let (graph, wall_ms) = eval::time_ms(|| nng::build_graph(&d, k, method));
    let graph = graph?;
    nng::save_graph(&graph, a.out.join("graph.json"))?;
    write_json_file(&a.out, "timing.json", &json!({ "wall_ms": wall_ms }))?;
    write_json_file(
        &a.out,
        "run_config.json",
        &json!({
            "command": "graph-cache",
            "data": a.data,
            "k": k,
            "method": method_raw,
            "label_column": label_raw,
            "jobs": jobs,
        }),
    )?;
    println!(
        "graph for {} ({} rows, k_max {}) written to {}",
        d.name(),
        graph.n_rows(),
        graph.k_max(),
        a.out.join("graph.json").display()
    );
    Ok(())
}
