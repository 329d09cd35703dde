//! Benchmark machinery: 1-nearest-neighbor scoring, threshold sweeps,
//! accuracy-vs-reduction areas, significance tests, and the
//! leave-one-dataset-out comparison between a meta selector and its
//! reference algorithm.
//!
//! Reports serialize deterministically: wall-clock measurements never enter
//! the JSON/CSV report files and are exposed separately for the timing table.

pub mod stats;

use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{stratified_kfold, Dataset};
use crate::error::{Error, Result};
use crate::forest::{derive_seed, ForestParams, ImportanceReport};
use crate::isalgos::{self, Algorithm};
use crate::metafeatures;
use crate::nng::raw_sq_dist;
use crate::pipeline::{
    self, apply_threshold, ClassifierKind, MetaSelector, MetaTrainConfig, QueryScaling,
    SelectionResult,
};

pub use stats::{significance, welch_t, wilcoxon_signed_rank, TestKind, TestOutcome, Verdict};

/// Accuracy and F1 of a 1-nearest-neighbor classifier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Nn1Scores {
    pub accuracy: f64,
    pub f1: f64,
}

/// Classify every row of `test` by its nearest row of `train` (squared
/// Euclidean distance, ties toward the smaller train row index).
///
/// F1 is the positive-class score for two-class data (class id 1 is the
/// positive class) and the macro average over classes present in the test
/// labels otherwise.
pub fn eval_1nn(train: &Dataset, test: &Dataset) -> Result<Nn1Scores> {
    if train.n_features() != test.n_features() {
        return Err(Error::invalid(format!(
            "train has {} features, test has {}",
            train.n_features(),
            test.n_features()
        )));
    }
    if train.n_classes() != test.n_classes() {
        return Err(Error::invalid(
            "train and test must share one class vocabulary",
        ));
    }
    let predictions: Vec<usize> = (0..test.n_rows())
        .into_par_iter()
        .map(|t| {
            let row = test.row(t);
            let mut best = (raw_sq_dist(row, train.row(0)), 0usize);
            for j in 1..train.n_rows() {
                let raw = raw_sq_dist(row, train.row(j));
                if raw < best.0 {
                    best = (raw, j);
                }
            }
            train.label(best.1)
        })
        .collect();

    let n_classes = test.n_classes();
    let mut tp = vec![0usize; n_classes];
    let mut fp = vec![0usize; n_classes];
    let mut fn_ = vec![0usize; n_classes];
    let mut correct = 0usize;
    for (t, &pred) in predictions.iter().enumerate() {
        let truth = test.label(t);
        if pred == truth {
            correct += 1;
            tp[truth] += 1;
        } else {
            fp[pred] += 1;
            fn_[truth] += 1;
        }
    }
    let accuracy = correct as f64 / test.n_rows() as f64;

    let f1_of = |c: usize| -> f64 {
        let denom = 2 * tp[c] + fp[c] + fn_[c];
        if denom == 0 {
            0.0
        } else {
            2.0 * tp[c] as f64 / denom as f64
        }
    };
    let f1 = if n_classes == 2 {
        f1_of(1)
    } else {
        let present: Vec<usize> = (0..n_classes).filter(|&c| tp[c] + fn_[c] > 0).collect();
        present.iter().map(|&c| f1_of(c)).sum::<f64>() / present.len().max(1) as f64
    };
    Ok(Nn1Scores { accuracy, f1 })
}

/// One point of an accuracy-vs-reduction trade-off curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    /// `None` for the no-reduction anchor.
    pub theta: Option<f64>,
    pub reduction_rate: f64,
    pub accuracy: f64,
    pub f1: f64,
}

/// Sweep output: the curve (anchor first, then one point per usable Θ) and
/// the thresholds that had to be skipped because nothing was kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub curve: Vec<CurvePoint>,
    pub skipped_thetas: Vec<f64>,
}

/// Evaluate existing instance scores at every threshold of `thetas`.
pub fn sweep_from_scores(
    scores: &SelectionResult,
    train: &Dataset,
    test: &Dataset,
    thetas: &[f64],
) -> Result<SweepResult> {
    if thetas.is_empty() {
        return Err(Error::invalid("need at least one threshold"));
    }
    if thetas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("thresholds must be strictly ascending"));
    }
    let anchor = eval_1nn(train, test)?;
    let mut curve = vec![CurvePoint {
        theta: None,
        reduction_rate: 0.0,
        accuracy: anchor.accuracy,
        f1: anchor.f1,
    }];
    let mut skipped = Vec::new();
    for &theta in thetas {
        let mask = apply_threshold(scores, theta)?;
        if mask.kept_count() == 0 {
            skipped.push(theta);
            continue;
        }
        let kept = train.subset(&mask.kept_indices())?;
        let s = eval_1nn(&kept, test)?;
        curve.push(CurvePoint {
            theta: Some(theta),
            reduction_rate: mask.reduction_rate(),
            accuracy: s.accuracy,
            f1: s.f1,
        });
    }
    Ok(SweepResult {
        curve,
        skipped_thetas: skipped,
    })
}

/// Score `train` with the selector, then sweep the thresholds.
pub fn theta_sweep(
    sel: &MetaSelector,
    train: &Dataset,
    test: &Dataset,
    thetas: &[f64],
    scaling: QueryScaling,
) -> Result<SweepResult> {
    let scores = pipeline::score_instances(sel, train, scaling)?;
    sweep_from_scores(&scores, train, test, thetas)
}

/// Trapezoidal area under a trade-off curve from its first point up to
/// `limit` on the reduction axis. Points must come sorted by non-decreasing
/// reduction rate; equal rates collapse to their best score. A `limit`
/// between two points is resolved by linear interpolation; a limit beyond
/// the last point integrates up to the last point only.
pub fn auarr(curve: &[CurvePoint], limit: f64) -> Result<f64> {
    area_under(curve, limit, |p| p.accuracy)
}

fn area_under(curve: &[CurvePoint], limit: f64, score: impl Fn(&CurvePoint) -> f64) -> Result<f64> {
    if curve.is_empty() {
        return Err(Error::invalid("empty curve"));
    }
    if !(0.0..=1.0).contains(&limit) {
        return Err(Error::invalid(format!(
            "limit must lie in [0, 1], got {}",
            limit
        )));
    }
    let mut points: Vec<(f64, f64)> = Vec::with_capacity(curve.len());
    for p in curve {
        let (rr, s) = (p.reduction_rate, score(p));
        if !(0.0..=1.0).contains(&rr) || !s.is_finite() {
            return Err(Error::invalid(format!(
                "curve point out of range: reduction {}, score {}",
                rr, s
            )));
        }
        match points.last_mut() {
            Some((last_rr, last_s)) if *last_rr == rr => {
                // Duplicate reduction rates keep the better score.
                if s > *last_s {
                    *last_s = s;
                }
            }
            Some((last_rr, _)) if *last_rr > rr => {
                return Err(Error::invalid(
                    "curve points must be sorted by reduction rate",
                ));
            }
            _ => points.push((rr, s)),
        }
    }

    let mut area = 0.0;
    for w in points.windows(2) {
        let (r0, s0) = w[0];
        let (r1, s1) = w[1];
        if limit <= r0 {
            break;
        }
        if limit >= r1 {
            area += (r1 - r0) * (s0 + s1) / 2.0;
        } else {
            let t = (limit - r0) / (r1 - r0);
            let s_at = s0 + t * (s1 - s0);
            area += (limit - r0) * (s0 + s_at) / 2.0;
            break;
        }
    }
    Ok(area)
}

/// The single operating point of a reference selection algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefPoint {
    pub reduction_rate: f64,
    pub accuracy: f64,
    pub f1: f64,
}

/// Limited and unlimited areas for a meta curve against a reference point.
///
/// The reference algorithm contributes a two-point curve: the no-reduction
/// anchor and its own operating point, extended past its reduction rate as
/// the same straight line (clamped at zero accuracy). The limited areas stop
/// at the reference reduction rate; the unlimited ones run to the meta
/// curve's last point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaComparison {
    /// Reduction rate both limited areas stop at (the reference's rate).
    pub limit: f64,
    /// Reduction rate the unlimited areas run to (meta curve's last point).
    pub horizon: f64,
    pub auarr_l_meta: f64,
    pub auarr_l_ref: f64,
    pub auarr_meta: f64,
    pub auarr_ref: f64,
}

/// Compare areas. `full_accuracy` is the score with no reduction (the
/// anchor shared by both curves). With a reference at zero reduction the
/// limited areas degenerate to zero and the reference line is flat.
pub fn auarr_limited(
    meta_curve: &[CurvePoint],
    reference: &RefPoint,
    full_accuracy: f64,
) -> Result<AreaComparison> {
    if meta_curve.is_empty() {
        return Err(Error::invalid("empty curve"));
    }
    let limit = reference.reduction_rate;
    if !(0.0..=1.0).contains(&limit) {
        return Err(Error::invalid("reference reduction rate out of range"));
    }
    let horizon = meta_curve.last().unwrap().reduction_rate;
    let auarr_l_meta = auarr(meta_curve, limit)?;
    let auarr_meta = auarr(meta_curve, horizon)?;

    let (auarr_l_ref, auarr_ref) = if limit == 0.0 {
        // Degenerate: flat reference line at its accuracy.
        (0.0, horizon * reference.accuracy)
    } else {
        let l_ref = limit * (full_accuracy + reference.accuracy) / 2.0;
        let slope = (reference.accuracy - full_accuracy) / limit;
        let line = |rr: f64| (full_accuracy + slope * rr).max(0.0);
        // Piecewise-linear integral of the clamped line from 0 to horizon.
        let mut knots = vec![0.0, horizon];
        if slope < 0.0 {
            let zero_at = -full_accuracy / slope;
            if zero_at > 0.0 && zero_at < horizon {
                knots.insert(1, zero_at);
            }
        }
        let mut u_ref = 0.0;
        for w in knots.windows(2) {
            u_ref += (w[1] - w[0]) * (line(w[0]) + line(w[1])) / 2.0;
        }
        (l_ref, u_ref)
    };

    Ok(AreaComparison {
        limit,
        horizon,
        auarr_l_meta,
        auarr_l_ref,
        auarr_meta,
        auarr_ref,
    })
}

/// Wall-clock a closure in milliseconds.
pub fn time_ms<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64() * 1e3)
}

/// Full configuration of a leave-one-dataset-out benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkSettings {
    pub reference_algorithm: Algorithm,
    pub k: usize,
    pub k_list: Vec<usize>,
    pub classifier: ClassifierKind,
    pub forest: ForestParams,
    pub thetas: Vec<f64>,
    pub folds: usize,
    pub seed: u64,
    pub alpha: f64,
    pub query_scaling: QueryScaling,
}

impl Default for BenchmarkSettings {
    fn default() -> Self {
        BenchmarkSettings {
            reference_algorithm: Algorithm::Enn,
            k: 3,
            k_list: metafeatures::DEFAULT_K_LIST.to_vec(),
            classifier: ClassifierKind::default(),
            forest: ForestParams::default(),
            thetas: pipeline::DEFAULT_THETA_GRID.to_vec(),
            folds: 5,
            seed: 42,
            alpha: 0.05,
            query_scaling: QueryScaling::default(),
        }
    }
}

/// Per-fold comparison record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub reference: RefPoint,
    pub curve: Vec<CurvePoint>,
    pub skipped_thetas: Vec<f64>,
    pub areas: AreaComparison,
    #[serde(skip)]
    pub reference_wall_ms: f64,
    #[serde(skip)]
    pub meta_wall_ms: f64,
}

/// Per-dataset aggregation over its folds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetReport {
    pub name: String,
    pub n_rows: usize,
    pub folds: Vec<FoldReport>,
    pub skipped_folds: Vec<(usize, String)>,
    pub mean_auarr_l_meta: f64,
    pub std_auarr_l_meta: f64,
    pub mean_auarr_l_ref: f64,
    pub std_auarr_l_ref: f64,
    pub mean_auarr_meta: f64,
    pub std_auarr_meta: f64,
    pub mean_auarr_ref: f64,
    pub std_auarr_ref: f64,
    pub mean_reference_reduction: f64,
    pub welch_limited: TestOutcome,
    pub welch_unlimited: TestOutcome,
    #[serde(skip)]
    pub mean_reference_wall_ms: f64,
    #[serde(skip)]
    pub mean_meta_wall_ms: f64,
}

/// One side (limited or unlimited) of the cross-dataset aggregate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateSide {
    pub wins_meta: usize,
    pub wins_reference: usize,
    pub ties: usize,
    /// Mean over datasets of (meta mean - reference mean).
    pub mean_diff: f64,
    pub wilcoxon: TestOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub limited: AggregateSide,
    pub unlimited: AggregateSide,
}

/// Everything a benchmark run produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub settings: BenchmarkSettings,
    pub datasets: Vec<DatasetReport>,
    pub skipped_datasets: Vec<(String, String)>,
    pub aggregate: AggregateReport,
    /// Importance of a final selector trained on every usable dataset.
    pub importance: ImportanceReport,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Leave-one-dataset-out benchmark.
///
/// For every dataset: train a selector on all the others, split the held-out
/// dataset into stratified folds, and on each fold run the reference
/// algorithm and the selector sweep on the fold-train portion, scoring both
/// against the fold-test portion. Datasets where the reference algorithm
/// fails (or fewer than two folds survive) are skipped with a recorded
/// reason. Needs at least two usable datasets.
pub fn leave_one_dataset_out(
    datasets: &[Dataset],
    cfg: &BenchmarkSettings,
) -> Result<EvalReport> {
    if datasets.len() < 2 {
        return Err(Error::invalid("leave-one-dataset-out needs at least 2 datasets"));
    }

    let mut skipped_datasets: Vec<(String, String)> = Vec::new();

    // Labeled, per-dataset-standardized descriptor matrices, computed once.
    let mut usable: Vec<(usize, crate::metafeatures::MetaDataset)> = Vec::new();
    for (i, d) in datasets.iter().enumerate() {
        match pipeline::build_meta_training_set(
            std::slice::from_ref(d),
            cfg.reference_algorithm,
            cfg.k,
            &cfg.k_list,
        ) {
            Ok(meta) => usable.push((i, meta)),
            Err(e) => skipped_datasets.push((d.name().to_string(), e.to_string())),
        }
    }
    if usable.len() < 2 {
        return Err(Error::invalid(format!(
            "only {} datasets usable; at least 2 required",
            usable.len()
        )));
    }

    let train_cfg = |seed: u64| MetaTrainConfig {
        reference_algorithm: cfg.reference_algorithm,
        k: cfg.k,
        k_list: cfg.k_list.clone(),
        classifier: cfg.classifier,
        forest: cfg.forest.clone(),
        seed,
    };

    let mut dataset_reports: Vec<DatasetReport> = Vec::new();
    for (pos, &(held_out, _)) in usable.iter().enumerate() {
        let d = &datasets[held_out];
        let parts: Vec<crate::metafeatures::MetaDataset> = usable
            .iter()
            .enumerate()
            .filter(|&(q, _)| q != pos)
            .map(|(_, (_, meta))| meta.clone())
            .collect();
        let merged = crate::metafeatures::MetaDataset::concat(parts)?;
        let selector =
            pipeline::train_meta_selector(&merged, &train_cfg(derive_seed(cfg.seed, 2 * pos as u64)))?;

        let folds = match stratified_kfold(d, cfg.folds, derive_seed(cfg.seed, 2 * pos as u64 + 1))
        {
            Ok(f) => f,
            Err(e) => {
                skipped_datasets.push((d.name().to_string(), e.to_string()));
                continue;
            }
        };

        let mut fold_reports: Vec<FoldReport> = Vec::new();
        let mut skipped_folds: Vec<(usize, String)> = Vec::new();
        for (fi, fold) in folds.iter().enumerate() {
            match run_fold(d, fold, &selector, cfg) {
                Ok(fr) => fold_reports.push(FoldReport { fold: fi, ..fr }),
                Err(e) => skipped_folds.push((fi, e.to_string())),
            }
        }
        if fold_reports.len() < 2 {
            skipped_datasets.push((
                d.name().to_string(),
                format!("only {} usable folds", fold_reports.len()),
            ));
            continue;
        }

        let l_meta: Vec<f64> = fold_reports.iter().map(|f| f.areas.auarr_l_meta).collect();
        let l_ref: Vec<f64> = fold_reports.iter().map(|f| f.areas.auarr_l_ref).collect();
        let u_meta: Vec<f64> = fold_reports.iter().map(|f| f.areas.auarr_meta).collect();
        let u_ref: Vec<f64> = fold_reports.iter().map(|f| f.areas.auarr_ref).collect();
        let (mean_auarr_l_meta, std_auarr_l_meta) = mean_std(&l_meta);
        let (mean_auarr_l_ref, std_auarr_l_ref) = mean_std(&l_ref);
        let (mean_auarr_meta, std_auarr_meta) = mean_std(&u_meta);
        let (mean_auarr_ref, std_auarr_ref) = mean_std(&u_ref);
        let welch_limited = significance(&l_meta, &l_ref, TestKind::WelchT, cfg.alpha)?;
        let welch_unlimited = significance(&u_meta, &u_ref, TestKind::WelchT, cfg.alpha)?;
        let mean_reference_reduction = fold_reports
            .iter()
            .map(|f| f.reference.reduction_rate)
            .sum::<f64>()
            / fold_reports.len() as f64;
        let mean_reference_wall_ms = fold_reports
            .iter()
            .map(|f| f.reference_wall_ms)
            .sum::<f64>()
            / fold_reports.len() as f64;
        let mean_meta_wall_ms =
            fold_reports.iter().map(|f| f.meta_wall_ms).sum::<f64>() / fold_reports.len() as f64;

        dataset_reports.push(DatasetReport {
            name: d.name().to_string(),
            n_rows: d.n_rows(),
            folds: fold_reports,
            skipped_folds,
            mean_auarr_l_meta,
            std_auarr_l_meta,
            mean_auarr_l_ref,
            std_auarr_l_ref,
            mean_auarr_meta,
            std_auarr_meta,
            mean_auarr_ref,
            std_auarr_ref,
            mean_reference_reduction,
            welch_limited,
            welch_unlimited,
            mean_reference_wall_ms,
            mean_meta_wall_ms,
        });
    }

    if dataset_reports.len() < 2 {
        return Err(Error::invalid(format!(
            "only {} datasets produced fold results; at least 2 required",
            dataset_reports.len()
        )));
    }

    let aggregate = AggregateReport {
        limited: aggregate_side(
            &dataset_reports
                .iter()
                .map(|r| (r.mean_auarr_l_meta, r.mean_auarr_l_ref))
                .collect::<Vec<_>>(),
            cfg.alpha,
        )?,
        unlimited: aggregate_side(
            &dataset_reports
                .iter()
                .map(|r| (r.mean_auarr_meta, r.mean_auarr_ref))
                .collect::<Vec<_>>(),
            cfg.alpha,
        )?,
    };

    // Final selector on every usable dataset, for the importance report.
    let all_parts: Vec<crate::metafeatures::MetaDataset> =
        usable.iter().map(|(_, m)| m.clone()).collect();
    let merged_all = crate::metafeatures::MetaDataset::concat(all_parts)?;
    let final_selector = pipeline::train_meta_selector(&merged_all, &train_cfg(cfg.seed))?;
    let importance = crate::forest::mdi_importance(&final_selector.model);

    Ok(EvalReport {
        settings: cfg.clone(),
        datasets: dataset_reports,
        skipped_datasets,
        aggregate,
        importance,
    })
}

fn run_fold(
    d: &Dataset,
    fold: &crate::dataset::FoldSplit,
    selector: &MetaSelector,
    cfg: &BenchmarkSettings,
) -> Result<FoldReport> {
    let train = d.subset(&fold.train_indices)?;
    let test = d.subset(&fold.test_indices)?;

    let (ref_mask, reference_wall_ms) =
        time_ms(|| isalgos::run(cfg.reference_algorithm, &train, cfg.k));
    let ref_mask = ref_mask?;
    if ref_mask.kept_count() == 0 {
        return Err(Error::invalid("reference algorithm kept nothing"));
    }
    let ref_train = train.subset(&ref_mask.kept_indices())?;
    let ref_scores = eval_1nn(&ref_train, &test)?;
    let reference = RefPoint {
        reduction_rate: ref_mask.reduction_rate(),
        accuracy: ref_scores.accuracy,
        f1: ref_scores.f1,
    };

    let (scores, meta_wall_ms) =
        time_ms(|| pipeline::score_instances(selector, &train, cfg.query_scaling));
    let scores = scores?;
    let sweep = sweep_from_scores(&scores, &train, &test, &cfg.thetas)?;
    let full_accuracy = sweep.curve[0].accuracy;
    let areas = auarr_limited(&sweep.curve, &reference, full_accuracy)?;

    Ok(FoldReport {
        fold: 0,
        reference,
        curve: sweep.curve,
        skipped_thetas: sweep.skipped_thetas,
        areas,
        reference_wall_ms,
        meta_wall_ms,
    })
}

fn aggregate_side(pairs: &[(f64, f64)], alpha: f64) -> Result<AggregateSide> {
    let meta: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let reference: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let wins_meta = pairs.iter().filter(|(m, r)| m > r).count();
    let wins_reference = pairs.iter().filter(|(m, r)| r > m).count();
    let ties = pairs.len() - wins_meta - wins_reference;
    let mean_diff =
        pairs.iter().map(|(m, r)| m - r).sum::<f64>() / pairs.len() as f64;
    let wilcoxon = significance(&meta, &reference, TestKind::Wilcoxon, alpha)?;
    Ok(AggregateSide {
        wins_meta,
        wins_reference,
        ties,
        mean_diff,
        wilcoxon,
    })
}

/// Serialize a report as pretty JSON (deterministic; no wall-clock fields).
pub fn write_report_json(report: &EvalReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(report)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Flat per-point CSV: every anchor, meta and reference curve point of every
/// dataset and fold.
pub fn write_curves_csv(report: &EvalReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = Vec::new();
    writeln!(out, "dataset,fold,kind,theta,reduction_rate,accuracy,f1")
        .map_err(|e| Error::io(path, e))?;
    for ds in &report.datasets {
        for fold in &ds.folds {
            for p in &fold.curve {
                let kind = if p.theta.is_none() { "anchor" } else { "meta" };
                let theta = p.theta.map(|t| format!("{t}")).unwrap_or_default();
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    ds.name, fold.fold, kind, theta, p.reduction_rate, p.accuracy, p.f1
                )
                .map_err(|e| Error::io(path, e))?;
            }
            writeln!(
                out,
                "{},{},reference,,{},{},{}",
                ds.name,
                fold.fold,
                fold.reference.reduction_rate,
                fold.reference.accuracy,
                fold.reference.f1
            )
            .map_err(|e| Error::io(path, e))?;
        }
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Per-dataset summary of limited (or unlimited) areas with verdicts, plus
/// `wins` and `mean_diff` footer rows.
pub fn write_summary_csv(
    report: &EvalReport,
    path: impl AsRef<Path>,
    limited: bool,
) -> Result<()> {
    let path = path.as_ref();
    let mut out = Vec::new();
    writeln!(
        out,
        "dataset,reference_mean,reference_std,meta_mean,meta_std,diff,verdict"
    )
    .map_err(|e| Error::io(path, e))?;
    for ds in &report.datasets {
        let (rm, rs, mm, ms, test) = if limited {
            (
                ds.mean_auarr_l_ref,
                ds.std_auarr_l_ref,
                ds.mean_auarr_l_meta,
                ds.std_auarr_l_meta,
                &ds.welch_limited,
            )
        } else {
            (
                ds.mean_auarr_ref,
                ds.std_auarr_ref,
                ds.mean_auarr_meta,
                ds.std_auarr_meta,
                &ds.welch_unlimited,
            )
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            ds.name,
            rm,
            rs,
            mm,
            ms,
            mm - rm,
            test.verdict.symbol()
        )
        .map_err(|e| Error::io(path, e))?;
    }
    let agg = if limited {
        &report.aggregate.limited
    } else {
        &report.aggregate.unlimited
    };
    writeln!(
        out,
        "wins,{},,{},,,",
        agg.wins_reference, agg.wins_meta
    )
    .map_err(|e| Error::io(path, e))?;
    writeln!(
        out,
        "mean_diff,,,,,{},{}",
        agg.mean_diff,
        agg.wilcoxon.verdict.symbol()
    )
    .map_err(|e| Error::io(path, e))?;
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Wall-clock comparison per dataset. This is the one output that varies
/// between runs.
pub fn write_timing_csv(report: &EvalReport, path: impl AsRef<Path>, jobs: usize) -> Result<()> {
    let path = path.as_ref();
    let mut out = Vec::new();
    writeln!(out, "dataset,n_rows,reference_ms,meta_ms,speedup,jobs")
        .map_err(|e| Error::io(path, e))?;
    for ds in &report.datasets {
        let speedup = if ds.mean_meta_wall_ms > 0.0 {
            ds.mean_reference_wall_ms / ds.mean_meta_wall_ms
        } else {
            f64::INFINITY
        };
        writeln!(
            out,
            "{},{},{:.3},{:.3},{:.2},{}",
            ds.name, ds.n_rows, ds.mean_reference_wall_ms, ds.mean_meta_wall_ms, speedup, jobs
        )
        .map_err(|e| Error::io(path, e))?;
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Importance tables: per feature, per descriptor type and per neighborhood
/// size.
pub fn write_importance_csvs(imp: &ImportanceReport, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    let write_pairs = |name: &str, rows: Vec<(String, f64)>| -> Result<()> {
        let path = dir.join(name);
        let mut out = Vec::new();
        writeln!(out, "group,importance").map_err(|e| Error::io(&path, e))?;
        for (g, v) in rows {
            writeln!(out, "{},{}", g, v).map_err(|e| Error::io(&path, e))?;
        }
        fs::write(&path, out).map_err(|e| Error::io(&path, e))
    };
    let per_feature: Vec<(String, f64)> = imp
        .feature_names
        .iter()
        .cloned()
        .zip(imp.per_feature.iter().copied())
        .collect();
    write_pairs("importance_features.csv", per_feature)?;
    write_pairs("importance_by_type.csv", imp.by_type.clone())?;
    write_pairs("importance_by_k.csv", imp.by_k.clone())
}
