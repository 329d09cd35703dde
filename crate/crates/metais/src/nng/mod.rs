//! Nearest-neighbor graphs over a dataset.
//!
//! For every instance the graph stores its `k_max` nearest neighbors under
//! the feature-count-normalized squared Euclidean distance, sorted by
//! ascending `(distance, index)`. Ties are always broken toward the smaller
//! row index, and both construction methods ([`BuildMethod::Brute`] and
//! [`BuildMethod::Indexed`]) produce bit-identical graphs.

mod kdtree;

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

pub(crate) use kdtree::KdTree;

/// Squared Euclidean distance divided by the number of features, so values
/// are comparable across datasets of different dimensionality.
pub fn distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || a.len() != b.len() {
        return Err(Error::invalid(format!(
            "distance between vectors of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(raw_sq_dist(a, b) / a.len() as f64)
}

/// Unnormalized squared Euclidean distance. All neighbor computations rank by
/// this value so that normalization can never perturb comparisons.
#[inline]
pub(crate) fn raw_sq_dist(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..a.len() {
        let d = a[i] - b[i];
        acc += d * d;
    }
    acc
}

/// How to find the nearest neighbors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuildMethod {
    /// Pairwise scan. O(n^2 m), exact.
    Brute,
    /// k-d tree accelerated. Exact, same output as `Brute`.
    Indexed,
}

impl BuildMethod {
    /// Pick a sensible method for the given data size: the tree overhead only
    /// pays off once the pairwise scan gets large.
    pub fn auto(n_rows: usize) -> BuildMethod {
        if n_rows >= 512 {
            BuildMethod::Indexed
        } else {
            BuildMethod::Brute
        }
    }
}

impl std::str::FromStr for BuildMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brute" => Ok(BuildMethod::Brute),
            "indexed" => Ok(BuildMethod::Indexed),
            other => Err(Error::invalid(format!("unknown build method `{}`", other))),
        }
    }
}

/// Nearest-neighbor lists for every instance of a dataset, plus the labels
/// needed to interpret them without going back to the source data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighborGraph {
    k_max: usize,
    /// `neighbors[i]` is sorted ascending by `(distance, index)` and never
    /// contains `i` itself.
    neighbors: Vec<Vec<(usize, f64)>>,
    labels: Vec<usize>,
    n_classes: usize,
    /// Set when the requested `k_max` exceeded `n - 1` and was clipped.
    clipped_from: Option<usize>,
}

impl NeighborGraph {
    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn n_rows(&self) -> usize {
        self.neighbors.len()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn clipped_from(&self) -> Option<usize> {
        self.clipped_from
    }

    /// Full neighbor list of vertex `v`: ascending `(index, distance)`.
    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.neighbors[v]
    }

    /// Whether the graph connects every vertex to all others.
    pub fn is_complete(&self) -> bool {
        self.k_max + 1 >= self.n_rows()
    }
}

/// Build the `k_max`-nearest-neighbor graph of `d`.
///
/// `k_max` is clipped to `n - 1` when it exceeds the number of other rows;
/// the original request is recorded in [`NeighborGraph::clipped_from`].
pub fn build_graph(d: &Dataset, k_max: usize, method: BuildMethod) -> Result<NeighborGraph> {
    if k_max == 0 {
        return Err(Error::invalid("k_max must be at least 1"));
    }
    if d.n_rows() < 2 {
        return Err(Error::invalid("neighbor graph needs at least 2 rows"));
    }
    let (k, clipped_from) = if k_max > d.n_rows() - 1 {
        (d.n_rows() - 1, Some(k_max))
    } else {
        (k_max, None)
    };
    let m = d.n_features() as f64;
    let neighbors: Vec<Vec<(usize, f64)>> = match method {
        BuildMethod::Brute => (0..d.n_rows())
            .into_par_iter()
            .map(|i| {
                let mut cand: Vec<(usize, f64)> = (0..d.n_rows())
                    .filter(|&j| j != i)
                    .map(|j| (j, raw_sq_dist(d.row(i), d.row(j))))
                    .collect();
                if k < cand.len() {
                    cand.select_nth_unstable_by(k - 1, |a, b| {
                        a.1.total_cmp(&b.1).then(a.0.cmp(&b.0))
                    });
                    cand.truncate(k);
                }
                cand.sort_unstable_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
                cand.into_iter().map(|(j, raw)| (j, raw / m)).collect()
            })
            .collect(),
        BuildMethod::Indexed => {
            let tree = KdTree::build(d.features(), d.n_rows(), d.n_features());
            (0..d.n_rows())
                .into_par_iter()
                .map(|i| {
                    tree.knn(d.row(i), k, i)
                        .into_iter()
                        .map(|(j, raw)| (j, raw / m))
                        .collect()
                })
                .collect()
        }
    };
    Ok(NeighborGraph {
        k_max: k,
        neighbors,
        labels: d.labels().to_vec(),
        n_classes: d.n_classes(),
        clipped_from,
    })
}

/// A borrowed view of a graph restricted to the first `k` neighbors.
#[derive(Debug, Clone, Copy)]
pub struct GraphView<'a> {
    graph: &'a NeighborGraph,
    k: usize,
}

impl<'a> GraphView<'a> {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_rows(&self) -> usize {
        self.graph.n_rows()
    }

    pub fn labels(&self) -> &'a [usize] {
        self.graph.labels()
    }

    pub fn neighbors(&self, v: usize) -> &'a [(usize, f64)] {
        let list = self.graph.neighbors(v);
        &list[..self.k.min(list.len())]
    }
}

/// Restrict a graph to its first `k` neighbors per vertex without copying.
pub fn truncate(g: &NeighborGraph, k: usize) -> Result<GraphView<'_>> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if k > g.k_max() {
        return Err(Error::invalid(format!(
            "k = {} exceeds the graph's k_max = {}",
            k,
            g.k_max()
        )));
    }
    Ok(GraphView { graph: g, k })
}

#[derive(Serialize, Deserialize)]
struct GraphCacheFile {
    format_version: u32,
    graph: NeighborGraph,
}

const GRAPH_CACHE_VERSION: u32 = 1;

/// Persist a graph as JSON. Distances round-trip exactly.
pub fn save_graph(g: &NeighborGraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = GraphCacheFile {
        format_version: GRAPH_CACHE_VERSION,
        graph: g.clone(),
    };
    let text = serde_json::to_string(&file)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Load a graph produced by [`save_graph`].
pub fn load_graph(path: impl AsRef<Path>) -> Result<NeighborGraph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: GraphCacheFile = serde_json::from_str(&text)?;
    if file.format_version != GRAPH_CACHE_VERSION {
        return Err(Error::Format(format!(
            "graph cache version {} unsupported (expected {})",
            file.format_version, GRAPH_CACHE_VERSION
        )));
    }
    let g = file.graph;
    if g.k_max == 0 || g.neighbors.len() != g.labels.len() {
        return Err(Error::Format("inconsistent graph cache".into()));
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Dataset;
    use approx::assert_relative_eq;

    fn grid_dataset(n: usize, m: usize, seed: u64) -> Dataset {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let features: Vec<f64> = (0..n * m)
            .map(|_| f64::from(rng.random_range(-4i32..=4)))
            .collect();
        let labels: Vec<usize> = (0..n).map(|i| i % 2).collect();
        Dataset::new(
            format!("grid{seed}"),
            features,
            n,
            m,
            labels,
            (0..m).map(|i| format!("f{i}")).collect(),
            vec!["a".into(), "b".into()],
        )
        .unwrap()
    }

    #[test]
    fn distance_is_normalized_squared_euclidean() {
        let d = distance(&[0.0, 0.0], &[3.0, 4.0]).unwrap();
        assert_relative_eq!(d, 12.5); // 25 / 2
        assert_relative_eq!(distance(&[1.0], &[1.0]).unwrap(), 0.0);
        assert!(distance(&[1.0], &[1.0, 2.0]).is_err());
        assert!(distance(&[], &[]).is_err());
    }

    #[test]
    fn brute_and_indexed_agree_exactly() {
        for seed in 0..6 {
            let n = 50 + seed as usize * 37;
            let m = 1 + (seed as usize % 4);
            let d = grid_dataset(n, m, seed);
            let a = build_graph(&d, 7, BuildMethod::Brute).unwrap();
            let b = build_graph(&d, 7, BuildMethod::Indexed).unwrap();
            assert_eq!(a, b, "seed {seed}");
        }
    }

    #[test]
    fn neighbor_lists_are_sorted_and_self_free() {
        let d = grid_dataset(80, 3, 11);
        let g = build_graph(&d, 10, BuildMethod::Indexed).unwrap();
        for v in 0..g.n_rows() {
            let list = g.neighbors(v);
            assert_eq!(list.len(), 10);
            for w in list.windows(2) {
                assert!(
                    w[0].1 < w[1].1 || (w[0].1 == w[1].1 && w[0].0 < w[1].0),
                    "sorted by (distance, index)"
                );
            }
            assert!(list.iter().all(|&(j, _)| j != v));
        }
    }

    #[test]
    fn k_max_clipping_is_recorded() {
        let d = grid_dataset(6, 2, 3);
        let g = build_graph(&d, 33, BuildMethod::Brute).unwrap();
        assert_eq!(g.k_max(), 5);
        assert_eq!(g.clipped_from(), Some(33));
        assert!(g.is_complete());
        let g2 = build_graph(&d, 5, BuildMethod::Brute).unwrap();
        assert_eq!(g2.clipped_from(), None);
        assert!(build_graph(&d, 0, BuildMethod::Brute).is_err());
    }

    #[test]
    fn truncation_views() {
        let d = grid_dataset(30, 2, 5);
        let g = build_graph(&d, 9, BuildMethod::Brute).unwrap();
        let v = truncate(&g, 3).unwrap();
        assert_eq!(v.k(), 3);
        for i in 0..g.n_rows() {
            assert_eq!(v.neighbors(i), &g.neighbors(i)[..3]);
        }
        assert!(truncate(&g, 10).is_err());
        assert!(truncate(&g, 0).is_err());
    }

    #[test]
    fn graph_cache_roundtrip_is_lossless() {
        let d = grid_dataset(40, 3, 8);
        let g = build_graph(&d, 6, BuildMethod::Indexed).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.json");
        save_graph(&g, &path).unwrap();
        let back = load_graph(&path).unwrap();
        assert_eq!(g, back);
    }
}
