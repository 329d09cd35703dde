//! The meta-selection pipeline: turn reference algorithm decisions on a
//! corpus of datasets into a trained keep/remove classifier, and apply that
//! classifier to new datasets.
//!
//! Training: for every dataset, compute per-instance descriptors, label each
//! instance 1 if the reference algorithm kept it and 0 otherwise,
//! standardize the descriptor columns per dataset, then merge everything and
//! fit a (balanced) random forest.
//!
//! Application: compute the descriptors of the new dataset, standardize them
//! (by default with the dataset's own column statistics, optionally with the
//! stored training statistics), and read keep probabilities off the forest.
//! A threshold Θ turns probabilities into a concrete selection: an instance
//! is kept when its probability is at least Θ, so larger Θ prunes more.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, ScalingParams};
use crate::error::{Error, Result};
use crate::forest::{self, ForestModel, ForestParams};
use crate::isalgos::{self, Algorithm, SelectionMask};
use crate::metafeatures::{self, MetaDataset};
use crate::nng::{build_graph, BuildMethod, NeighborGraph};

/// Candidate thresholds used when sweeping the accuracy/reduction trade-off.
pub const DEFAULT_THETA_GRID: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

/// Which forest variant to train on the merged meta training set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    RandomForest,
    BalancedRandomForest,
}

impl ClassifierKind {
    pub fn name(&self) -> &'static str {
        match self {
            ClassifierKind::RandomForest => "rf",
            ClassifierKind::BalancedRandomForest => "balanced_rf",
        }
    }
}

impl Default for ClassifierKind {
    fn default() -> Self {
        ClassifierKind::BalancedRandomForest
    }
}

impl std::fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ClassifierKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rf" | "random_forest" => Ok(ClassifierKind::RandomForest),
            "brf" | "balanced_rf" | "balanced_random_forest" => {
                Ok(ClassifierKind::BalancedRandomForest)
            }
            other => Err(Error::invalid(format!("unknown classifier `{}`", other))),
        }
    }
}

/// How to standardize the descriptors of a dataset being scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryScaling {
    /// Use the query dataset's own column statistics (default).
    OwnStats,
    /// Replay the column statistics of the merged training meta set.
    TrainStats,
}

impl Default for QueryScaling {
    fn default() -> Self {
        QueryScaling::OwnStats
    }
}

impl QueryScaling {
    pub fn name(&self) -> &'static str {
        match self {
            QueryScaling::OwnStats => "own",
            QueryScaling::TrainStats => "train",
        }
    }
}

impl std::str::FromStr for QueryScaling {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "own" | "own_stats" => Ok(QueryScaling::OwnStats),
            "train" | "train_stats" => Ok(QueryScaling::TrainStats),
            other => Err(Error::invalid(format!("unknown scaling mode `{}`", other))),
        }
    }
}

/// Everything about a trained selector except the forest itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectorInfo {
    pub format_version: u32,
    pub library_version: String,
    pub reference_algorithm: Algorithm,
    /// Neighborhood size handed to the reference algorithm.
    pub k: usize,
    /// Neighborhood sizes of the descriptor columns.
    pub k_list: Vec<usize>,
    pub classifier: ClassifierKind,
    pub seed: u64,
    /// Names of the datasets the selector was trained on.
    pub trained_on: Vec<String>,
    /// Column statistics of the merged training meta set, for
    /// [`QueryScaling::TrainStats`].
    pub train_scaling: ScalingParams,
}

const SELECTOR_FORMAT_VERSION: u32 = 1;

/// A trained meta selector: forest plus provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct MetaSelector {
    pub model: ForestModel,
    pub info: SelectorInfo,
}

/// Training-time configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaTrainConfig {
    pub reference_algorithm: Algorithm,
    pub k: usize,
    pub k_list: Vec<usize>,
    pub classifier: ClassifierKind,
    pub forest: ForestParams,
    pub seed: u64,
}

impl Default for MetaTrainConfig {
    fn default() -> Self {
        MetaTrainConfig {
            reference_algorithm: Algorithm::Enn,
            k: 3,
            k_list: metafeatures::DEFAULT_K_LIST.to_vec(),
            classifier: ClassifierKind::default(),
            forest: ForestParams::default(),
            seed: 42,
        }
    }
}

/// Descriptor matrix of one dataset, with the graph clipping warning (if
/// any) surfaced to the caller.
fn meta_features_of(d: &Dataset, k_list: &[usize]) -> Result<(MetaDataset, Option<String>)> {
    let k_top = *k_list
        .last()
        .ok_or_else(|| Error::invalid("k list must not be empty"))?;
    let graph: NeighborGraph = build_graph(d, k_top, BuildMethod::auto(d.n_rows()))?;
    let warning = graph.clipped_from().map(|orig| {
        format!(
            "dataset `{}`: neighborhood size clipped from {} to {} (n = {})",
            d.name(),
            orig,
            graph.k_max(),
            d.n_rows()
        )
    });
    let meta = metafeatures::extract(&graph, k_list, d.name())?;
    Ok((meta, warning))
}

/// Run the reference algorithm on every dataset, extract its descriptors,
/// attach keep/remove labels, standardize per dataset, and merge.
pub fn build_meta_training_set(
    datasets: &[Dataset],
    algo: Algorithm,
    k: usize,
    k_list: &[usize],
) -> Result<MetaDataset> {
    if datasets.is_empty() {
        return Err(Error::invalid("need at least one training dataset"));
    }
    for (i, d) in datasets.iter().enumerate() {
        if datasets[..i].iter().any(|e| e.name() == d.name()) {
            return Err(Error::invalid(format!(
                "duplicate dataset name `{}`; sources must be distinguishable",
                d.name()
            )));
        }
    }
    let mut parts = Vec::with_capacity(datasets.len());
    for d in datasets {
        let mask = isalgos::run(algo, d, k).map_err(|e| {
            Error::invalid(format!("{} failed on dataset `{}`: {}", algo, d.name(), e))
        })?;
        let (mut meta, _warning) = meta_features_of(d, k_list)?;
        meta.set_labels(Some(mask.keep().iter().map(|&b| u8::from(b)).collect()))?;
        meta.standardize_columns()?;
        parts.push(meta);
    }
    MetaDataset::concat(parts)
}

/// Fit the keep/remove classifier on a labeled merged meta set.
pub fn train_meta_selector(meta: &MetaDataset, cfg: &MetaTrainConfig) -> Result<MetaSelector> {
    let labels = meta
        .labels()
        .ok_or_else(|| Error::invalid("meta training set carries no labels"))?;
    let kept: usize = labels.iter().map(|&l| usize::from(l)).sum();
    if kept == 0 || kept == labels.len() {
        return Err(Error::invalid(
            "meta training labels are single-class; the reference algorithm kept everything or nothing",
        ));
    }
    let train_scaling = ScalingParams::fit(meta.records(), meta.n_rows(), meta.n_cols())?;
    let model = match cfg.classifier {
        ClassifierKind::RandomForest => {
            forest::train_random_forest(meta, labels, &cfg.forest, cfg.seed)?
        }
        ClassifierKind::BalancedRandomForest => {
            forest::train_balanced_random_forest(meta, labels, &cfg.forest, cfg.seed)?
        }
    };
    Ok(MetaSelector {
        model,
        info: SelectorInfo {
            format_version: SELECTOR_FORMAT_VERSION,
            library_version: env!("CARGO_PKG_VERSION").to_string(),
            reference_algorithm: cfg.reference_algorithm,
            k: cfg.k,
            k_list: cfg.k_list.clone(),
            classifier: cfg.classifier,
            seed: cfg.seed,
            trained_on: meta.sources().to_vec(),
            train_scaling,
        },
    })
}

/// Build the training set and fit the selector in one step.
pub fn train_from_datasets(datasets: &[Dataset], cfg: &MetaTrainConfig) -> Result<MetaSelector> {
    let meta =
        build_meta_training_set(datasets, cfg.reference_algorithm, cfg.k, &cfg.k_list)?;
    train_meta_selector(&meta, cfg)
}

/// Keep probabilities for every instance of a dataset, plus the threshold
/// grid to sweep and any warnings produced along the way.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub probabilities: Vec<f64>,
    pub theta_grid: Vec<f64>,
    /// Name recorded in masks derived from this result.
    pub selector: String,
    pub warnings: Vec<String>,
}

/// Score every instance of `d` with the selector.
pub fn score_instances(
    sel: &MetaSelector,
    d: &Dataset,
    scaling: QueryScaling,
) -> Result<SelectionResult> {
    let (mut meta, warning) = meta_features_of(d, &sel.info.k_list)?;
    match scaling {
        QueryScaling::OwnStats => {
            meta.standardize_columns()?;
        }
        QueryScaling::TrainStats => {
            meta.apply_scaling(&sel.info.train_scaling)?;
        }
    }
    let probabilities = forest::predict_proba(&sel.model, &meta)?;
    Ok(SelectionResult {
        probabilities,
        theta_grid: DEFAULT_THETA_GRID.to_vec(),
        selector: format!("meta-{}", sel.info.reference_algorithm),
        warnings: warning.into_iter().collect(),
    })
}

/// Turn scored probabilities into a concrete keep/remove mask: keep exactly
/// the instances with probability `>= theta`. Requires `0 < theta < 1`.
pub fn apply_threshold(res: &SelectionResult, theta: f64) -> Result<SelectionMask> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::invalid(format!(
            "theta must lie strictly between 0 and 1, got {}",
            theta
        )));
    }
    let keep: Vec<bool> = res.probabilities.iter().map(|&p| p >= theta).collect();
    Ok(SelectionMask::new(keep, res.selector.clone(), None))
}

const MODEL_FILE: &str = "model.json";
const SELECTOR_FILE: &str = "selector.json";

/// Persist a selector as a directory with `model.json` and `selector.json`.
pub fn save_bundle(sel: &MetaSelector, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    forest::save_model(&sel.model, dir.join(MODEL_FILE))?;
    let text = serde_json::to_string_pretty(&sel.info)?;
    fs::write(dir.join(SELECTOR_FILE), text).map_err(|e| Error::io(dir.join(SELECTOR_FILE), e))
}

/// Load a selector bundle written by [`save_bundle`].
pub fn load_bundle(dir: impl AsRef<Path>) -> Result<MetaSelector> {
    let dir = dir.as_ref();
    let model = forest::load_model(dir.join(MODEL_FILE))?;
    let text = fs::read_to_string(dir.join(SELECTOR_FILE))
        .map_err(|e| Error::io(dir.join(SELECTOR_FILE), e))?;
    let info: SelectorInfo = serde_json::from_str(&text)?;
    if info.format_version != SELECTOR_FORMAT_VERSION {
        return Err(Error::Format(format!(
            "selector format version {} unsupported (expected {})",
            info.format_version, SELECTOR_FORMAT_VERSION
        )));
    }
    let expected = metafeatures::feature_names(&info.k_list);
    if model.feature_names != expected {
        return Err(Error::Format(
            "selector metadata and model disagree on descriptor columns".into(),
        ));
    }
    Ok(MetaSelector { model, info })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    fn corpus() -> Vec<Dataset> {
        vec![
            synth::blobs(120, 2, 2, 1.2, 1).unwrap().with_name("blobs-a"),
            synth::moons(120, 0.25, 2).unwrap().with_name("moons-a"),
            synth::spirals(120, 0.15, 3).unwrap().with_name("spirals-a"),
        ]
    }

    fn quick_cfg() -> MetaTrainConfig {
        MetaTrainConfig {
            k_list: vec![3, 5, 9],
            forest: ForestParams {
                n_trees: 30,
                ..ForestParams::default()
            },
            ..MetaTrainConfig::default()
        }
    }

    #[test]
    fn training_set_is_labeled_standardized_and_sourced() {
        let data = corpus();
        let meta = build_meta_training_set(&data, Algorithm::Enn, 3, &[3, 5, 9]).unwrap();
        assert_eq!(meta.n_rows(), 360);
        assert_eq!(meta.n_cols(), 24);
        assert!(meta.labels().is_some());
        assert_eq!(
            meta.sources(),
            &["blobs-a".to_string(), "moons-a".to_string(), "spirals-a".to_string()]
        );
        // Per-dataset standardization makes the merged columns zero-mean too.
        for c in 0..meta.n_cols() {
            let mean: f64 =
                (0..meta.n_rows()).map(|r| meta.row(r)[c]).sum::<f64>() / meta.n_rows() as f64;
            assert!(mean.abs() < 1e-9, "column {c} mean {mean}");
        }
        // Labels agree with a direct run of the reference algorithm.
        let mask = isalgos::run(Algorithm::Enn, &data[0], 3).unwrap();
        let labels = meta.labels().unwrap();
        for i in 0..120 {
            assert_eq!(labels[i] == 1, mask.keep()[i]);
        }
    }

    #[test]
    fn duplicate_names_are_rejected() {
        let d = synth::blobs(60, 2, 2, 1.0, 1).unwrap();
        let err =
            build_meta_training_set(&[d.clone(), d], Algorithm::Enn, 3, &[3]).unwrap_err();
        assert!(err.to_string().contains("duplicate"), "{err}");
    }

    #[test]
    fn end_to_end_scoring_and_thresholding() {
        let data = corpus();
        let sel = train_from_datasets(&data, &quick_cfg()).unwrap();
        assert_eq!(sel.info.trained_on.len(), 3);

        let query = synth::blobs(90, 2, 2, 1.0, 9).unwrap().with_name("query");
        let res = score_instances(&sel, &query, QueryScaling::OwnStats).unwrap();
        assert_eq!(res.probabilities.len(), 90);
        assert!(res.probabilities.iter().all(|&p| (0.0..=1.0).contains(&p)));

        // Larger thresholds can only remove more.
        let mut prev = usize::MAX;
        for theta in DEFAULT_THETA_GRID {
            let mask = apply_threshold(&res, theta).unwrap();
            assert_eq!(mask.n(), 90);
            assert!(mask.kept_count() <= prev);
            prev = mask.kept_count();
        }
        assert!(apply_threshold(&res, 0.0).is_err());
        assert!(apply_threshold(&res, 1.0).is_err());
    }

    #[test]
    fn scaling_modes_differ_but_stay_valid() {
        let data = corpus();
        let sel = train_from_datasets(&data, &quick_cfg()).unwrap();
        let query = synth::moons(80, 0.2, 11).unwrap().with_name("q2");
        let own = score_instances(&sel, &query, QueryScaling::OwnStats).unwrap();
        let train = score_instances(&sel, &query, QueryScaling::TrainStats).unwrap();
        assert_eq!(own.probabilities.len(), train.probabilities.len());
        assert!(train.probabilities.iter().all(|&p| (0.0..=1.0).contains(&p)));
    }

    #[test]
    fn single_class_labels_error_at_training() {
        // Tight blobs: the noise filter keeps every instance.
        let d = synth::blobs(80, 2, 2, 0.3, 5).unwrap();
        let meta = build_meta_training_set(&[d], Algorithm::Enn, 3, &[3]).unwrap();
        let labels = meta.labels().unwrap();
        assert!(labels.iter().all(|&l| l == 1), "premise: everything kept");
        let err = train_meta_selector(&meta, &quick_cfg()).unwrap_err();
        assert!(err.to_string().contains("single-class"), "{err}");
    }

    #[test]
    fn bundle_roundtrip_preserves_predictions() {
        let data = corpus();
        let sel = train_from_datasets(&data, &quick_cfg()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let bundle = dir.path().join("selector");
        save_bundle(&sel, &bundle).unwrap();
        let back = load_bundle(&bundle).unwrap();
        assert_eq!(back.info, sel.info);
        assert_eq!(back.model.trees, sel.model.trees);

        let query = synth::spirals(70, 0.1, 13).unwrap().with_name("q3");
        let a = score_instances(&sel, &query, QueryScaling::OwnStats).unwrap();
        let b = score_instances(&back, &query, QueryScaling::OwnStats).unwrap();
        assert_eq!(a.probabilities, b.probabilities);
    }

    #[test]
    fn tiny_dataset_clips_neighborhoods_with_a_warning() {
        let data = corpus();
        let sel = train_from_datasets(&data, &quick_cfg()).unwrap();
        let tiny = synth::blobs(8, 2, 2, 0.8, 21).unwrap().with_name("tiny");
        let res = score_instances(&sel, &tiny, QueryScaling::OwnStats).unwrap();
        assert_eq!(res.probabilities.len(), 8);
        assert_eq!(res.warnings.len(), 1);
        assert!(res.warnings[0].contains("clipped"), "{}", res.warnings[0]);
    }
}
