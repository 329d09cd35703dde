//! Single decision tree: growth and traversal.

use rand::Rng;
use serde::{Deserialize, Serialize};

/// A binary-classification CART node. Rows with `value <= threshold` go
/// left. Leaves carry the class counts of the training rows that reached
/// them (in-bag, so bootstrap multiplicity included).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum TreeNode {
    Split {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        counts: [u32; 2],
    },
}

impl TreeNode {
    /// Leaf class counts for one feature row.
    pub fn leaf_counts(&self, row: &[f64]) -> [u32; 2] {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { counts } => return *counts,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if row[*feature] <= *threshold {
                        left
                    } else {
                        right
                    };
                }
            }
        }
    }

    /// Probability of class 1 for one feature row.
    pub fn proba(&self, row: &[f64]) -> f64 {
        let c = self.leaf_counts(row);
        let total = c[0] + c[1];
        if total == 0 {
            0.5
        } else {
            f64::from(c[1]) / f64::from(total)
        }
    }
}

pub(crate) struct GrowConfig {
    pub max_depth: usize,
    pub min_leaf: usize,
    pub features_per_split: usize,
}

#[inline]
fn gini(c0: f64, c1: f64) -> f64 {
    let n = c0 + c1;
    if n == 0.0 {
        0.0
    } else {
        1.0 - (c0 * c0 + c1 * c1) / (n * n)
    }
}

/// Grow a tree on the in-bag rows (indices carry bootstrap multiplicity).
pub(crate) fn grow<R: Rng>(
    records: &[f64],
    n_cols: usize,
    y: &[u8],
    rows: Vec<u32>,
    cfg: &GrowConfig,
    rng: &mut R,
) -> TreeNode {
    grow_rec(records, n_cols, y, rows, 0, cfg, rng)
}

fn grow_rec<R: Rng>(
    records: &[f64],
    n_cols: usize,
    y: &[u8],
    rows: Vec<u32>,
    depth: usize,
    cfg: &GrowConfig,
    rng: &mut R,
) -> TreeNode {
    let mut counts = [0u32; 2];
    for &r in &rows {
        counts[y[r as usize] as usize] += 1;
    }
    let n = rows.len();
    if depth >= cfg.max_depth || counts[0] == 0 || counts[1] == 0 || n < 2 * cfg.min_leaf {
        return TreeNode::Leaf { counts };
    }

    let features = sample_features(rng, n_cols, cfg.features_per_split);

    let parent_weighted = gini(f64::from(counts[0]), f64::from(counts[1])) * n as f64;
    let mut best: Option<(f64, usize, f64)> = None; // (weighted child impurity, feature, threshold)
    let mut sorted: Vec<u32> = Vec::with_capacity(n);
    for &f in &features {
        sorted.clear();
        sorted.extend_from_slice(&rows);
        sorted.sort_unstable_by(|&a, &b| {
            records[a as usize * n_cols + f].total_cmp(&records[b as usize * n_cols + f])
        });
        let mut left = [0f64; 2];
        let mut right = [f64::from(counts[0]), f64::from(counts[1])];
        for i in 0..n - 1 {
            let cls = y[sorted[i] as usize] as usize;
            left[cls] += 1.0;
            right[cls] -= 1.0;
            let v_here = records[sorted[i] as usize * n_cols + f];
            let v_next = records[sorted[i + 1] as usize * n_cols + f];
            if v_here == v_next {
                continue;
            }
            let n_left = i + 1;
            let n_right = n - n_left;
            if n_left < cfg.min_leaf || n_right < cfg.min_leaf {
                continue;
            }
            let w =
                gini(left[0], left[1]) * n_left as f64 + gini(right[0], right[1]) * n_right as f64;
            // Strict improvement over the best so far: on ties the earliest
            // (feature in sampled order, then lowest threshold) wins.
            if best.map_or(w < parent_weighted, |(bw, _, _)| w < bw) {
                best = Some((w, f, 0.5 * (v_here + v_next)));
            }
        }
    }

    let Some((_, feature, threshold)) = best else {
        return TreeNode::Leaf { counts };
    };

    let (rows_left, rows_right): (Vec<u32>, Vec<u32>) = rows
        .into_iter()
        .partition(|&r| records[r as usize * n_cols + feature] <= threshold);
    let left = grow_rec(records, n_cols, y, rows_left, depth + 1, cfg, rng);
    let right = grow_rec(records, n_cols, y, rows_right, depth + 1, cfg, rng);
    TreeNode::Split {
        feature,
        threshold,
        left: Box::new(left),
        right: Box::new(right),
    }
}

/// `count` distinct feature indices via a partial Fisher-Yates pass.
fn sample_features<R: Rng>(rng: &mut R, n_cols: usize, count: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n_cols).collect();
    let take = count.min(n_cols);
    for i in 0..take {
        let j = rng.random_range(i..n_cols);
        idx.swap(i, j);
    }
    idx.truncate(take);
    idx
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn grows_a_stump_on_separable_data() {
        // One feature, classes split cleanly at 0.5.
        let records: Vec<f64> = vec![0.0, 0.1, 0.2, 0.8, 0.9, 1.0];
        let y = vec![0u8, 0, 0, 1, 1, 1];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cfg = GrowConfig {
            max_depth: 5,
            min_leaf: 1,
            features_per_split: 1,
        };
        let tree = grow(&records, 1, &y, (0..6).collect(), &cfg, &mut rng);
        match &tree {
            TreeNode::Split {
                feature, threshold, ..
            } => {
                assert_eq!(*feature, 0);
                assert!(*threshold > 0.2 && *threshold < 0.8);
            }
            TreeNode::Leaf { .. } => panic!("expected a split"),
        }
        assert_eq!(tree.proba(&[0.0]), 0.0);
        assert_eq!(tree.proba(&[1.0]), 1.0);
    }

    #[test]
    fn respects_depth_and_leaf_floors() {
        let records: Vec<f64> = (0..32).map(|i| f64::from(i)).collect();
        let y: Vec<u8> = (0..32).map(|i| u8::from(i % 2 == 0)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cfg = GrowConfig {
            max_depth: 0,
            min_leaf: 1,
            features_per_split: 1,
        };
        let tree = grow(&records, 1, &y, (0..32).collect(), &cfg, &mut rng);
        assert!(matches!(tree, TreeNode::Leaf { .. }));

        let cfg = GrowConfig {
            max_depth: 10,
            min_leaf: 16,
            features_per_split: 1,
        };
        let tree = grow(&records, 1, &y, (0..32).collect(), &cfg, &mut rng);
        // Only one split can satisfy 16 rows on both sides.
        if let TreeNode::Split { left, right, .. } = &tree {
            assert!(matches!(**left, TreeNode::Leaf { .. }));
            assert!(matches!(**right, TreeNode::Leaf { .. }));
        }
    }

    #[test]
    fn feature_sampling_is_a_permutation_prefix() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let f = sample_features(&mut rng, 48, 7);
            assert_eq!(f.len(), 7);
            let mut s = f.clone();
            s.sort_unstable();
            s.dedup();
            assert_eq!(s.len(), 7, "features are distinct");
            assert!(f.iter().all(|&i| i < 48));
        }
        let all = sample_features(&mut rng, 5, 9);
        assert_eq!(all.len(), 5);
    }
}
