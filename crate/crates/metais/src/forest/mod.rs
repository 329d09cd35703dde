//! Random forests over descriptor matrices, with a class-balanced variant
//! for skewed keep/remove label distributions.
//!
//! Training is deterministic for a given seed: every tree derives its own
//! generator from the master seed and the tree index, trees are grown in
//! index order (possibly on parallel threads), and all tie-breaks in the
//! split search are explicit.

mod tree;

use std::fs;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metafeatures::MetaDataset;

pub use tree::TreeNode;

use tree::GrowConfig;

/// Training hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_leaf: usize,
    /// Candidate features per split; `None` means `ceil(sqrt(n_features))`.
    pub features_per_split: Option<usize>,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            max_depth: 10,
            min_leaf: 1,
            features_per_split: None,
        }
    }
}

/// A trained forest. Everything needed for prediction serializes to JSON;
/// out-of-bag scores are a training byproduct and stay in memory only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub format_version: u32,
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_leaf: usize,
    pub features_per_split: usize,
    pub balanced: bool,
    pub seed: u64,
    pub feature_names: Vec<String>,
    /// True when training saw a single class; predictions are constant.
    pub degenerate_single_class: bool,
    pub oob_available: bool,
    pub trees: Vec<TreeNode>,
    #[serde(skip)]
    pub oob_scores: Option<Vec<Option<f64>>>,
}

const MODEL_FORMAT_VERSION: u32 = 1;

/// Stable per-tree seed derivation (splitmix-style avalanche).
pub(crate) fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut z = master ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E9B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Train with plain bootstrap sampling.
pub fn train_random_forest(
    x: &MetaDataset,
    y: &[u8],
    params: &ForestParams,
    seed: u64,
) -> Result<ForestModel> {
    train(x, y, params, seed, false)
}

/// Train with per-tree balanced bootstrap sampling: each tree sees an equal
/// number of draws (with replacement) from both classes, sized by the
/// smaller class.
pub fn train_balanced_random_forest(
    x: &MetaDataset,
    y: &[u8],
    params: &ForestParams,
    seed: u64,
) -> Result<ForestModel> {
    train(x, y, params, seed, true)
}

fn train(
    x: &MetaDataset,
    y: &[u8],
    params: &ForestParams,
    seed: u64,
    balanced: bool,
) -> Result<ForestModel> {
    let n = x.n_rows();
    let m = x.n_cols();
    if y.len() != n {
        return Err(Error::invalid(format!(
            "{} labels for {} rows",
            y.len(),
            n
        )));
    }
    if y.iter().any(|&v| v > 1) {
        return Err(Error::invalid("labels must be 0 or 1"));
    }
    if params.n_trees == 0 {
        return Err(Error::invalid("n_trees must be at least 1"));
    }
    if params.min_leaf == 0 {
        return Err(Error::invalid("min_leaf must be at least 1"));
    }
    let fps = match params.features_per_split {
        Some(f) => {
            if f == 0 || f > m {
                return Err(Error::invalid(format!(
                    "features_per_split must be in 1..={}",
                    m
                )));
            }
            f
        }
        None => (m as f64).sqrt().ceil() as usize,
    };

    let mut pools: [Vec<u32>; 2] = [Vec::new(), Vec::new()];
    for (i, &label) in y.iter().enumerate() {
        pools[label as usize].push(i as u32);
    }

    if pools[0].is_empty() || pools[1].is_empty() {
        let mut counts = [0u32; 2];
        counts[usize::from(!pools[1].is_empty())] = n as u32;
        let trees = vec![TreeNode::Leaf { counts }; params.n_trees];
        return Ok(ForestModel {
            format_version: MODEL_FORMAT_VERSION,
            n_trees: params.n_trees,
            max_depth: params.max_depth,
            min_leaf: params.min_leaf,
            features_per_split: fps,
            balanced,
            seed,
            feature_names: x.feature_names().to_vec(),
            degenerate_single_class: true,
            oob_available: false,
            trees,
            oob_scores: None,
        });
    }

    let cfg = GrowConfig {
        max_depth: params.max_depth,
        min_leaf: params.min_leaf,
        features_per_split: fps,
    };
    let n_min = pools[0].len().min(pools[1].len());

    let records = x.records();
    let grown: Vec<(TreeNode, Vec<bool>)> = (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, t as u64));
            let mut bag: Vec<u32> = Vec::new();
            if balanced {
                for pool in &pools {
                    for _ in 0..n_min {
                        bag.push(pool[rng.random_range(0..pool.len())]);
                    }
                }
            } else {
                for _ in 0..n {
                    bag.push(rng.random_range(0..n as u32));
                }
            }
            let mut in_bag = vec![false; n];
            for &r in &bag {
                in_bag[r as usize] = true;
            }
            let node = tree::grow(records, m, y, bag, &cfg, &mut rng);
            (node, in_bag)
        })
        .collect();

    let mut oob_sum = vec![0.0f64; n];
    let mut oob_cnt = vec![0u32; n];
    for (node, in_bag) in &grown {
        for i in 0..n {
            if !in_bag[i] {
                oob_sum[i] += node.proba(x.row(i));
                oob_cnt[i] += 1;
            }
        }
    }
    let oob_scores: Vec<Option<f64>> = (0..n)
        .map(|i| (oob_cnt[i] > 0).then(|| oob_sum[i] / f64::from(oob_cnt[i])))
        .collect();
    let oob_available = oob_scores.iter().any(|s| s.is_some());
    let trees = grown.into_iter().map(|(t, _)| t).collect();

    Ok(ForestModel {
        format_version: MODEL_FORMAT_VERSION,
        n_trees: params.n_trees,
        max_depth: params.max_depth,
        min_leaf: params.min_leaf,
        features_per_split: fps,
        balanced,
        seed,
        feature_names: x.feature_names().to_vec(),
        degenerate_single_class: false,
        oob_available,
        trees,
        oob_scores: (oob_available).then_some(oob_scores),
    })
}

/// One node of a forest flattened into a contiguous array; `feature` is
/// `FLAT_LEAF` on leaves, where `value` holds the class-1 probability
/// instead of the split threshold.
#[derive(Clone, Copy)]
struct FlatNode {
    feature: u32,
    left: u32,
    right: u32,
    value: f64,
}

const FLAT_LEAF: u32 = u32::MAX;

/// Cache-friendly read-only view of the trees, built once per prediction
/// batch. Traversal decisions and leaf values match [`TreeNode::proba`]
/// exactly; only the memory layout differs.
struct FlatForest {
    nodes: Vec<FlatNode>,
    roots: Vec<u32>,
}

impl FlatForest {
    fn new(trees: &[TreeNode]) -> FlatForest {
        let mut f = FlatForest {
            nodes: Vec::new(),
            roots: Vec::with_capacity(trees.len()),
        };
        for t in trees {
            let root = f.push(t);
            f.roots.push(root);
        }
        f
    }

    fn push(&mut self, t: &TreeNode) -> u32 {
        let at = self.nodes.len() as u32;
        match t {
            TreeNode::Leaf { counts } => {
                let total = counts[0] + counts[1];
                let p = if total == 0 {
                    0.5
                } else {
                    f64::from(counts[1]) / f64::from(total)
                };
                self.nodes.push(FlatNode {
                    feature: FLAT_LEAF,
                    left: 0,
                    right: 0,
                    value: p,
                });
            }
            TreeNode::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                self.nodes.push(FlatNode {
                    feature: *feature as u32,
                    left: 0,
                    right: 0,
                    value: *threshold,
                });
                let l = self.push(left);
                let r = self.push(right);
                self.nodes[at as usize].left = l;
                self.nodes[at as usize].right = r;
            }
        }
        at
    }

    fn proba(&self, root: u32, row: &[f64]) -> f64 {
        let mut i = root as usize;
        loop {
            let n = self.nodes[i];
            if n.feature == FLAT_LEAF {
                return n.value;
            }
            i = if row[n.feature as usize] <= n.value {
                n.left
            } else {
                n.right
            } as usize;
        }
    }
}

/// Mean class-1 probability over all trees, one value per row of `x`.
/// `x` must carry exactly the columns the model was trained on.
pub fn predict_proba(model: &ForestModel, x: &MetaDataset) -> Result<Vec<f64>> {
    if x.feature_names() != model.feature_names.as_slice() {
        return Err(Error::invalid(
            "descriptor columns do not match the model's training columns",
        ));
    }
    let flat = FlatForest::new(&model.trees);
    let probs: Vec<f64> = (0..x.n_rows())
        .into_par_iter()
        .map(|i| {
            let row = x.row(i);
            let sum: f64 = flat.roots.iter().map(|&r| flat.proba(r, row)).sum();
            sum / model.trees.len() as f64
        })
        .collect();
    Ok(probs)
}

/// Threshold-free and thresholded quality measures of binary scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// Area under the ROC curve (rank statistic, ties get midranks);
    /// undefined when only one class is present.
    pub auc: Option<f64>,
    /// Mean of per-class recalls at the 0.5 threshold, over classes present.
    pub balanced_accuracy: f64,
    /// Plain accuracy at the 0.5 threshold.
    pub accuracy: f64,
}

/// Metrics for already-computed scores.
pub fn evaluate_scores(scores: &[f64], y: &[u8]) -> Result<Metrics> {
    if scores.len() != y.len() || scores.is_empty() {
        return Err(Error::invalid("scores and labels must align and be non-empty"));
    }
    if y.iter().any(|&v| v > 1) {
        return Err(Error::invalid("labels must be 0 or 1"));
    }
    let n1 = y.iter().filter(|&&v| v == 1).count();
    let n0 = y.len() - n1;

    let auc = if n0 > 0 && n1 > 0 {
        // Midrank Mann-Whitney statistic.
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
        let mut ranks = vec![0.0f64; scores.len()];
        let mut i = 0;
        while i < order.len() {
            let mut j = i;
            while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
                j += 1;
            }
            let midrank = (i + j) as f64 / 2.0 + 1.0;
            for &idx in &order[i..=j] {
                ranks[idx] = midrank;
            }
            i = j + 1;
        }
        let rank_sum_pos: f64 = (0..y.len()).filter(|&i| y[i] == 1).map(|i| ranks[i]).sum();
        let u = rank_sum_pos - (n1 * (n1 + 1)) as f64 / 2.0;
        Some(u / (n0 as f64 * n1 as f64))
    } else {
        None
    };

    let mut correct = [0usize; 2];
    let mut total = [0usize; 2];
    for (i, &label) in y.iter().enumerate() {
        let pred = u8::from(scores[i] >= 0.5);
        total[label as usize] += 1;
        if pred == label {
            correct[label as usize] += 1;
        }
    }
    let recalls: Vec<f64> = (0..2)
        .filter(|&c| total[c] > 0)
        .map(|c| correct[c] as f64 / total[c] as f64)
        .collect();
    let balanced_accuracy = recalls.iter().sum::<f64>() / recalls.len() as f64;
    let accuracy = (correct[0] + correct[1]) as f64 / y.len() as f64;

    Ok(Metrics {
        auc,
        balanced_accuracy,
        accuracy,
    })
}

/// Predict on `x` and score against `y`.
pub fn evaluate_classifier(model: &ForestModel, x: &MetaDataset, y: &[u8]) -> Result<Metrics> {
    let scores = predict_proba(model, x)?;
    evaluate_scores(&scores, y)
}

/// Mean-decrease-in-impurity attribution, overall and grouped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceReport {
    pub feature_names: Vec<String>,
    /// Per feature: Gini decrease weighted by node size, averaged over trees.
    pub per_feature: Vec<f64>,
    /// Summed per descriptor type (the part before `@` in the column name).
    pub by_type: Vec<(String, f64)>,
    /// Summed per neighborhood size (the part after `@`).
    pub by_k: Vec<(String, f64)>,
}

pub fn mdi_importance(model: &ForestModel) -> ImportanceReport {
    let m = model.feature_names.len();
    let mut totals = vec![0.0f64; m];
    for tree in &model.trees {
        let mut per_tree = vec![0.0f64; m];
        let root_n = walk_mdi(tree, &mut per_tree).0;
        if root_n > 0.0 {
            for (t, p) in totals.iter_mut().zip(&per_tree) {
                *t += p / root_n;
            }
        }
    }
    let per_feature: Vec<f64> = totals.iter().map(|t| t / model.trees.len() as f64).collect();

    let mut by_type: Vec<(String, f64)> = Vec::new();
    let mut by_k: Vec<(String, f64)> = Vec::new();
    for (name, &v) in model.feature_names.iter().zip(&per_feature) {
        let (ty, k) = match name.split_once('@') {
            Some((ty, k)) => (ty.to_string(), k.to_string()),
            None => (name.clone(), "-".to_string()),
        };
        accumulate(&mut by_type, ty, v);
        accumulate(&mut by_k, k, v);
    }

    ImportanceReport {
        feature_names: model.feature_names.clone(),
        per_feature,
        by_type,
        by_k,
    }
}

fn accumulate(groups: &mut Vec<(String, f64)>, key: String, v: f64) {
    match groups.iter_mut().find(|(k, _)| *k == key) {
        Some((_, total)) => *total += v,
        None => groups.push((key, v)),
    }
}

/// Returns `(n, c0, c1)` of the subtree and adds weighted impurity decreases
/// into `acc` (indexed by feature, in unnormalized node-count units).
fn walk_mdi(node: &TreeNode, acc: &mut [f64]) -> (f64, f64, f64) {
    match node {
        TreeNode::Leaf { counts } => {
            let c0 = f64::from(counts[0]);
            let c1 = f64::from(counts[1]);
            (c0 + c1, c0, c1)
        }
        TreeNode::Split {
            feature,
            left,
            right,
            ..
        } => {
            let (nl, l0, l1) = walk_mdi(left, acc);
            let (nr, r0, r1) = walk_mdi(right, acc);
            let (n, c0, c1) = (nl + nr, l0 + r0, l1 + r1);
            let g = |n: f64, a: f64, b: f64| {
                if n > 0.0 {
                    1.0 - (a * a + b * b) / (n * n)
                } else {
                    0.0
                }
            };
            let decrease = n * g(n, c0, c1) - nl * g(nl, l0, l1) - nr * g(nr, r0, r1);
            acc[*feature] += decrease;
            (n, c0, c1)
        }
    }
}

/// Serialize a model to pretty JSON.
pub fn model_to_json(model: &ForestModel) -> Result<String> {
    Ok(serde_json::to_string_pretty(model)?)
}

/// Parse and validate a model produced by [`model_to_json`].
pub fn model_from_json(text: &str) -> Result<ForestModel> {
    let model: ForestModel = serde_json::from_str(text)?;
    if model.format_version != MODEL_FORMAT_VERSION {
        return Err(Error::Format(format!(
            "model format version {} unsupported (expected {})",
            model.format_version, MODEL_FORMAT_VERSION
        )));
    }
    if model.trees.is_empty() || model.trees.len() != model.n_trees {
        return Err(Error::Format("tree count mismatch".into()));
    }
    let m = model.feature_names.len();
    for tree in &model.trees {
        validate_tree(tree, m)?;
    }
    Ok(model)
}

fn validate_tree(node: &TreeNode, m: usize) -> Result<()> {
    match node {
        TreeNode::Leaf { counts } => {
            if counts[0] == 0 && counts[1] == 0 {
                return Err(Error::Format("leaf with no training rows".into()));
            }
            Ok(())
        }
        TreeNode::Split {
            feature,
            threshold,
            left,
            right,
        } => {
            if *feature >= m {
                return Err(Error::Format(format!(
                    "split on feature {} but model has {} columns",
                    feature, m
                )));
            }
            if !threshold.is_finite() {
                return Err(Error::Format("non-finite split threshold".into()));
            }
            validate_tree(left, m)?;
            validate_tree(right, m)
        }
    }
}

pub fn save_model(model: &ForestModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, model_to_json(model)?).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ForestModel> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    model_from_json(&text)
}
