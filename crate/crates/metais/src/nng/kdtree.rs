//! Exact k-d tree for nearest-neighbor queries over row-major data.
//!
//! Queries return exactly the same neighbors, distances and ordering as a
//! brute-force scan: candidates are ranked by the pair
//! `(raw squared distance, row index)` and subtrees are pruned only when the
//! query-to-bounding-box distance strictly exceeds the current k-th best
//! distance, so equal-distance candidates with smaller indices are never lost.

const LEAF_SIZE: usize = 16;

pub(crate) struct KdTree<'a> {
    data: &'a [f64],
    dims: usize,
    nodes: Vec<Node>,
    /// Row indices, permuted so each node owns a contiguous range.
    order: Vec<u32>,
}

struct Node {
    start: usize,
    end: usize,
    /// Bounding box of the points in this node: `dims` (min, max) pairs.
    bounds: Vec<(f64, f64)>,
    children: Option<(usize, usize)>,
}

/// One entry in the current best-k set.
#[derive(Clone, Copy, PartialEq)]
struct Entry {
    raw: f64,
    idx: u32,
}

impl Entry {
    fn beats(&self, other: &Entry) -> bool {
        self.raw < other.raw || (self.raw == other.raw && self.idx < other.idx)
    }
}

/// Fixed-capacity max-heap over `(raw, idx)` with lexicographic order.
struct BestK {
    cap: usize,
    heap: Vec<Entry>,
}

impl BestK {
    fn new(cap: usize) -> Self {
        BestK {
            cap,
            heap: Vec::with_capacity(cap),
        }
    }

    fn full(&self) -> bool {
        self.heap.len() == self.cap
    }

    fn worst_raw(&self) -> f64 {
        self.heap[0].raw
    }

    fn offer(&mut self, e: Entry) {
        if !self.full() {
            self.heap.push(e);
            let mut i = self.heap.len() - 1;
            while i > 0 {
                let p = (i - 1) / 2;
                if self.heap[p].beats(&self.heap[i]) {
                    self.heap.swap(p, i);
                    i = p;
                } else {
                    break;
                }
            }
        } else if e.beats(&self.heap[0]) {
            self.heap[0] = e;
            let n = self.heap.len();
            let mut i = 0;
            loop {
                let (l, r) = (2 * i + 1, 2 * i + 2);
                let mut m = i;
                if l < n && self.heap[m].beats(&self.heap[l]) {
                    m = l;
                }
                if r < n && self.heap[m].beats(&self.heap[r]) {
                    m = r;
                }
                if m == i {
                    break;
                }
                self.heap.swap(i, m);
                i = m;
            }
        }
    }

    fn into_sorted(self) -> Vec<(usize, f64)> {
        let mut v: Vec<(usize, f64)> = self.heap.iter().map(|e| (e.idx as usize, e.raw)).collect();
        v.sort_unstable_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        v
    }
}

impl<'a> KdTree<'a> {
    pub fn build(data: &'a [f64], n_rows: usize, dims: usize) -> Self {
        let mut order: Vec<u32> = (0..n_rows as u32).collect();
        let mut nodes = Vec::new();
        if n_rows > 0 {
            build_node(data, dims, &mut order, 0, n_rows, &mut nodes);
        }
        KdTree {
            data,
            dims,
            nodes,
            order,
        }
    }

    fn point(&self, row: u32) -> &[f64] {
        let r = row as usize;
        &self.data[r * self.dims..(r + 1) * self.dims]
    }

    /// The `k` rows closest to `query` (raw squared distance, ties by row
    /// index), excluding row `exclude`. Pass `exclude = usize::MAX` to keep
    /// all rows. Returns ascending `(row, raw_sq_dist)`.
    pub fn knn(&self, query: &[f64], k: usize, exclude: usize) -> Vec<(usize, f64)> {
        if k == 0 || self.nodes.is_empty() {
            return Vec::new();
        }
        let mut best = BestK::new(k);
        self.search(0, query, exclude, &mut best);
        best.into_sorted()
    }

    fn search(&self, node_id: usize, query: &[f64], exclude: usize, best: &mut BestK) {
        let node = &self.nodes[node_id];
        match node.children {
            None => {
                for &row in &self.order[node.start..node.end] {
                    if row as usize == exclude {
                        continue;
                    }
                    let raw = raw_sq(query, self.point(row));
                    best.offer(Entry { raw, idx: row });
                }
            }
            Some((left, right)) => {
                let dl = box_dist(query, &self.nodes[left].bounds);
                let dr = box_dist(query, &self.nodes[right].bounds);
                let (first, d_first, second, d_second) = if dl <= dr {
                    (left, dl, right, dr)
                } else {
                    (right, dr, left, dl)
                };
                if !best.full() || d_first <= best.worst_raw() {
                    self.search(first, query, exclude, best);
                }
                if !best.full() || d_second <= best.worst_raw() {
                    self.search(second, query, exclude, best);
                }
            }
        }
    }
}

fn build_node(
    data: &[f64],
    dims: usize,
    order: &mut [u32],
    start: usize,
    end: usize,
    nodes: &mut Vec<Node>,
) -> usize {
    let slice_range = start..end;
    let mut bounds = vec![(f64::INFINITY, f64::NEG_INFINITY); dims];
    for &row in &order[slice_range.clone()] {
        let p = &data[row as usize * dims..(row as usize + 1) * dims];
        for (d, &v) in p.iter().enumerate() {
            if v < bounds[d].0 {
                bounds[d].0 = v;
            }
            if v > bounds[d].1 {
                bounds[d].1 = v;
            }
        }
    }
    let id = nodes.len();
    nodes.push(Node {
        start,
        end,
        bounds,
        children: None,
    });
    let len = end - start;
    if len > LEAF_SIZE {
        // Split on the dimension with the widest spread; (value, row) pairs
        // are all distinct, so the median split always makes progress.
        let split_dim = nodes[id]
            .bounds
            .iter()
            .enumerate()
            .max_by(|a, b| (a.1 .1 - a.1 .0).total_cmp(&(b.1 .1 - b.1 .0)))
            .map(|(d, _)| d)
            .unwrap_or(0);
        if nodes[id].bounds[split_dim].1 > nodes[id].bounds[split_dim].0 {
            let mid = len / 2;
            order[start..end].select_nth_unstable_by(mid, |&a, &b| {
                let va = data[a as usize * dims + split_dim];
                let vb = data[b as usize * dims + split_dim];
                va.total_cmp(&vb).then(a.cmp(&b))
            });
            let left = build_node(data, dims, order, start, start + mid, nodes);
            let right = build_node(data, dims, order, start + mid, end, nodes);
            nodes[id].children = Some((left, right));
        }
        // All points identical along every dimension: keep as one big leaf.
    }
    id
}

#[inline]
fn raw_sq(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..a.len() {
        let d = a[i] - b[i];
        acc += d * d;
    }
    acc
}

fn box_dist(query: &[f64], bounds: &[(f64, f64)]) -> f64 {
    let mut acc = 0.0;
    for (q, (lo, hi)) in query.iter().zip(bounds) {
        let d = if q < lo {
            lo - q
        } else if q > hi {
            q - hi
        } else {
            0.0
        };
        acc += d * d;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn brute(data: &[f64], dims: usize, query: &[f64], k: usize, exclude: usize) -> Vec<(usize, f64)> {
        let n = data.len() / dims;
        let mut v: Vec<(usize, f64)> = (0..n)
            .filter(|&i| i != exclude)
            .map(|i| (i, raw_sq(query, &data[i * dims..(i + 1) * dims])))
            .collect();
        v.sort_unstable_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        v.truncate(k);
        v
    }

    #[test]
    fn matches_brute_force_including_duplicates() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for trial in 0..40 {
            let dims = 1 + (trial % 5);
            let n = 2 + rng.random_range(0..120);
            // Coarse grid so exact duplicate points and tied distances occur.
            let data: Vec<f64> = (0..n * dims)
                .map(|_| f64::from(rng.random_range(-3i32..=3)))
                .collect();
            let tree = KdTree::build(&data, n, dims);
            for q in 0..n.min(25) {
                let query = data[q * dims..(q + 1) * dims].to_vec();
                for &k in &[1usize, 3, n - 1, n + 4] {
                    let got = tree.knn(&query, k, q);
                    let want = brute(&data, dims, &query, k, q);
                    assert_eq!(got, want, "trial {trial} q={q} k={k}");
                }
            }
        }
    }

    #[test]
    fn all_identical_points_form_single_leaf() {
        let n = 100;
        let data = vec![1.5; n * 2];
        let tree = KdTree::build(&data, n, 2);
        let got = tree.knn(&[1.5, 1.5], 5, 0);
        assert_eq!(
            got,
            vec![(1, 0.0), (2, 0.0), (3, 0.0), (4, 0.0), (5, 0.0)],
            "ties broken by ascending row index"
        );
    }
}
