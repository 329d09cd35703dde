//! Per-instance neighborhood descriptors.
//!
//! For every instance, eight descriptors are computed over its `k` nearest
//! neighbors, for each `k` in a configurable list (default
//! `[3, 5, 9, 15, 23, 33]`): average and minimum distance to same-class,
//! opposite-class and any-class neighbors, plus the counts of same- and
//! opposite-class neighbors. When an instance has no same-class (or no
//! opposite-class) neighbor among its `k` nearest, the corresponding
//! average/minimum columns carry the sentinel value `-1`, which is
//! distinguishable from any real distance (distances are non-negative).
//!
//! Columns are laid out descriptor-major: all `k` values of the first
//! descriptor, then all `k` values of the second, and so on.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::nng::NeighborGraph;

/// Descriptor names in column order.
pub const DESCRIPTOR_NAMES: [&str; 8] = [
    "avg_dist_same",
    "avg_dist_opposite",
    "avg_dist_any",
    "min_dist_same",
    "min_dist_opposite",
    "min_dist_any",
    "count_same",
    "count_opposite",
];

/// Default neighborhood sizes.
pub const DEFAULT_K_LIST: [usize; 6] = [3, 5, 9, 15, 23, 33];

/// Sentinel stored when a class-conditional neighbor set is empty.
pub const EMPTY_SENTINEL: f64 = -1.0;

/// Column names for the given `k` list, in column order:
/// `avg_dist_same@k=3`, `avg_dist_same@k=5`, ..., `count_opposite@k=33`.
pub fn feature_names(k_list: &[usize]) -> Vec<String> {
    let mut names = Vec::with_capacity(DESCRIPTOR_NAMES.len() * k_list.len());
    for d in DESCRIPTOR_NAMES {
        for &k in k_list {
            names.push(format!("{}@k={}", d, k));
        }
    }
    names
}

/// A row-major matrix of per-instance descriptors, optionally with binary
/// labels and a record of which source dataset each row came from.
#[derive(Debug, Clone, PartialEq)]
pub struct MetaDataset {
    records: Vec<f64>,
    n_rows: usize,
    feature_names: Vec<String>,
    labels: Option<Vec<u8>>,
    /// Names of contributing source datasets.
    sources: Vec<String>,
    /// Per-row index into `sources`.
    source_of: Vec<u32>,
}

impl MetaDataset {
    pub fn new(
        records: Vec<f64>,
        n_rows: usize,
        feature_names: Vec<String>,
        labels: Option<Vec<u8>>,
        sources: Vec<String>,
        source_of: Vec<u32>,
    ) -> Result<Self> {
        if n_rows == 0 || feature_names.is_empty() {
            return Err(Error::invalid("meta dataset must be non-empty"));
        }
        if records.len() != n_rows * feature_names.len() {
            return Err(Error::invalid(format!(
                "{} values for {} rows x {} columns",
                records.len(),
                n_rows,
                feature_names.len()
            )));
        }
        if let Some(l) = &labels {
            if l.len() != n_rows {
                return Err(Error::invalid("label vector length mismatch"));
            }
            if l.iter().any(|&v| v > 1) {
                return Err(Error::invalid("labels must be binary (0 or 1)"));
            }
        }
        if source_of.len() != n_rows {
            return Err(Error::invalid("source index length mismatch"));
        }
        if source_of.iter().any(|&s| s as usize >= sources.len()) {
            return Err(Error::invalid("row references unknown source"));
        }
        Ok(MetaDataset {
            records,
            n_rows,
            feature_names,
            labels,
            sources,
            source_of,
        })
    }

    /// Rows that all come from one source dataset.
    pub fn single_source(
        records: Vec<f64>,
        n_rows: usize,
        feature_names: Vec<String>,
        labels: Option<Vec<u8>>,
        source: impl Into<String>,
    ) -> Result<Self> {
        let source_of = vec![0u32; n_rows];
        MetaDataset::new(
            records,
            n_rows,
            feature_names,
            labels,
            vec![source.into()],
            source_of,
        )
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.feature_names.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.records[i * self.n_cols()..(i + 1) * self.n_cols()]
    }

    pub fn records(&self) -> &[f64] {
        &self.records
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn labels(&self) -> Option<&[u8]> {
        self.labels.as_deref()
    }

    pub fn set_labels(&mut self, labels: Option<Vec<u8>>) -> Result<()> {
        if let Some(l) = &labels {
            if l.len() != self.n_rows {
                return Err(Error::invalid("label vector length mismatch"));
            }
            if l.iter().any(|&v| v > 1) {
                return Err(Error::invalid("labels must be binary (0 or 1)"));
            }
        }
        self.labels = labels;
        Ok(())
    }

    pub fn sources(&self) -> &[String] {
        &self.sources
    }

    pub fn source_name_of(&self, row: usize) -> &str {
        &self.sources[self.source_of[row] as usize]
    }

    /// Standardize every column in place (including sentinel cells, which are
    /// treated as ordinary values). Returns the applied parameters.
    pub fn standardize_columns(&mut self) -> Result<crate::dataset::ScalingParams> {
        let n_cols = self.n_cols();
        let params = crate::dataset::ScalingParams::fit(&self.records, self.n_rows, n_cols)?;
        params.apply(&mut self.records, n_cols)?;
        Ok(params)
    }

    /// Scale columns in place with externally supplied statistics.
    pub fn apply_scaling(&mut self, params: &crate::dataset::ScalingParams) -> Result<()> {
        let n_cols = self.n_cols();
        params.apply(&mut self.records, n_cols)
    }

    /// Stack several meta datasets (same columns) into one, preserving row
    /// order and per-row source attribution. Labels are kept only if every
    /// part carries them.
    pub fn concat(parts: Vec<MetaDataset>) -> Result<MetaDataset> {
        let first = parts
            .first()
            .ok_or_else(|| Error::invalid("concat of zero meta datasets"))?;
        let feature_names = first.feature_names.clone();
        let keep_labels = parts.iter().all(|p| p.labels.is_some());
        let mut records = Vec::new();
        let mut labels: Vec<u8> = Vec::new();
        let mut sources: Vec<String> = Vec::new();
        let mut source_of: Vec<u32> = Vec::new();
        let mut n_rows = 0;
        for p in &parts {
            if p.feature_names != feature_names {
                return Err(Error::invalid(
                    "meta datasets with different columns cannot be concatenated",
                ));
            }
            let offset: Vec<u32> = p
                .sources
                .iter()
                .map(|s| match sources.iter().position(|e| e == s) {
                    Some(i) => i as u32,
                    None => {
                        sources.push(s.clone());
                        (sources.len() - 1) as u32
                    }
                })
                .collect();
            records.extend_from_slice(&p.records);
            if keep_labels {
                labels.extend_from_slice(p.labels.as_deref().unwrap());
            }
            source_of.extend(p.source_of.iter().map(|&s| offset[s as usize]));
            n_rows += p.n_rows;
        }
        MetaDataset::new(
            records,
            n_rows,
            feature_names,
            keep_labels.then_some(labels),
            sources,
            source_of,
        )
    }
}

/// Compute the descriptor matrix for every vertex of `g`.
///
/// Requirements: `k_list` non-empty and strictly ascending; the graph must
/// hold at least `max(k_list)` neighbors per vertex, unless it is complete
/// (then larger `k` values simply see every other instance).
pub fn extract(g: &NeighborGraph, k_list: &[usize], source: &str) -> Result<MetaDataset> {
    if k_list.is_empty() {
        return Err(Error::invalid("k list must not be empty"));
    }
    if k_list[0] == 0 {
        return Err(Error::invalid("k values must be positive"));
    }
    if k_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("k list must be strictly ascending"));
    }
    let k_top = *k_list.last().unwrap();
    if k_top > g.k_max() && !g.is_complete() {
        return Err(Error::invalid(format!(
            "k = {} exceeds the graph's k_max = {} and the graph is not complete",
            k_top,
            g.k_max()
        )));
    }

    let n = g.n_rows();
    let kl = k_list.len();
    let n_cols = DESCRIPTOR_NAMES.len() * kl;
    let mut records = vec![0.0; n * n_cols];
    let labels = g.labels();

    for v in 0..n {
        let own = labels[v];
        let list = g.neighbors(v);
        let row = &mut records[v * n_cols..(v + 1) * n_cols];
        let mut sum_same = 0.0;
        let mut sum_opp = 0.0;
        let mut cnt_same = 0usize;
        let mut cnt_opp = 0usize;
        let mut min_same = f64::INFINITY;
        let mut min_opp = f64::INFINITY;
        let mut next = 0usize;
        for (ki, &k) in k_list.iter().enumerate() {
            let upto = k.min(list.len());
            while next < upto {
                let (j, dist) = list[next];
                if labels[j] == own {
                    sum_same += dist;
                    cnt_same += 1;
                    if dist < min_same {
                        min_same = dist;
                    }
                } else {
                    sum_opp += dist;
                    cnt_opp += 1;
                    if dist < min_opp {
                        min_opp = dist;
                    }
                }
                next += 1;
            }
            let total = cnt_same + cnt_opp;
            let (avg_same, mn_same) = if cnt_same > 0 {
                (sum_same / cnt_same as f64, min_same)
            } else {
                (EMPTY_SENTINEL, EMPTY_SENTINEL)
            };
            let (avg_opp, mn_opp) = if cnt_opp > 0 {
                (sum_opp / cnt_opp as f64, min_opp)
            } else {
                (EMPTY_SENTINEL, EMPTY_SENTINEL)
            };
            let (avg_any, mn_any) = if total > 0 {
                ((sum_same + sum_opp) / total as f64, min_same.min(min_opp))
            } else {
                (EMPTY_SENTINEL, EMPTY_SENTINEL)
            };
            row[ki] = avg_same;
            row[kl + ki] = avg_opp;
            row[2 * kl + ki] = avg_any;
            row[3 * kl + ki] = mn_same;
            row[4 * kl + ki] = mn_opp;
            row[5 * kl + ki] = mn_any;
            row[6 * kl + ki] = cnt_same as f64;
            row[7 * kl + ki] = cnt_opp as f64;
        }
    }

    MetaDataset::single_source(records, n, feature_names(k_list), None, source)
}

/// Write a meta dataset as CSV: one column per descriptor, then `label` (if
/// present), then `source`.
pub fn write_meta_csv(m: &MetaDataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = Vec::new();
    let mut header: Vec<&str> = m.feature_names().iter().map(|s| s.as_str()).collect();
    if m.labels().is_some() {
        header.push("label");
    }
    header.push("source");
    writeln!(out, "{}", header.join(",")).map_err(|e| Error::io(path, e))?;
    for i in 0..m.n_rows() {
        let mut cells: Vec<String> = m.row(i).iter().map(|v| format_cell(*v)).collect();
        if let Some(l) = m.labels() {
            cells.push(l[i].to_string());
        }
        cells.push(m.source_name_of(i).to_string());
        writeln!(out, "{}", cells.join(",")).map_err(|e| Error::io(path, e))?;
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

fn format_cell(v: f64) -> String {
    format!("{}", v)
}

/// Read a meta dataset written by [`write_meta_csv`].
pub fn read_meta_csv(path: impl AsRef<Path>) -> Result<MetaDataset> {
    let path = path.as_ref();
    let path_str = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::Format(format!("{}: {}", path_str, e)))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Format(format!("{}: {}", path_str, e)))?
        .iter()
        .map(|h| h.to_string())
        .collect();
    if headers.last().map(|s| s.as_str()) != Some("source") {
        return Err(Error::parse(&path_str, 1, "last column must be `source`"));
    }
    let has_label = headers.len() >= 2 && headers[headers.len() - 2] == "label";
    let n_meta = headers.len() - 1 - usize::from(has_label);
    if n_meta == 0 {
        return Err(Error::parse(&path_str, 1, "no descriptor columns"));
    }
    let feature_names: Vec<String> = headers[..n_meta].to_vec();
    let mut records = Vec::new();
    let mut labels: Vec<u8> = Vec::new();
    let mut sources: Vec<String> = Vec::new();
    let mut source_of: Vec<u32> = Vec::new();
    for (rec_no, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Format(format!("{}: {}", path_str, e)))?;
        let line_no = rec_no + 2;
        if record.len() != headers.len() {
            return Err(Error::parse(&path_str, line_no, "ragged row"));
        }
        for i in 0..n_meta {
            let v: f64 = record[i].parse().map_err(|_| {
                Error::parse(
                    &path_str,
                    line_no,
                    format!("non-numeric value `{}`", &record[i]),
                )
            })?;
            records.push(v);
        }
        if has_label {
            let l: u8 = record[n_meta].parse().map_err(|_| {
                Error::parse(&path_str, line_no, format!("bad label `{}`", &record[n_meta]))
            })?;
            labels.push(l);
        }
        let src = record[headers.len() - 1].to_string();
        let idx = match sources.iter().position(|s| *s == src) {
            Some(i) => i as u32,
            None => {
                sources.push(src);
                (sources.len() - 1) as u32
            }
        };
        source_of.push(idx);
    }
    let n_rows = source_of.len();
    if n_rows == 0 {
        return Err(Error::parse(&path_str, 1, "no data rows"));
    }
    MetaDataset::new(
        records,
        n_rows,
        feature_names,
        has_label.then_some(labels),
        sources,
        source_of,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Dataset;
    use crate::nng::{build_graph, BuildMethod};
    use approx::assert_relative_eq;

    fn four_points() -> Dataset {
        Dataset::new(
            "four",
            vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 5.0, 5.0],
            4,
            2,
            vec![0, 0, 1, 0],
            vec!["x".into(), "y".into()],
            vec!["c0".into(), "c1".into()],
        )
        .unwrap()
    }

    #[test]
    fn names_are_descriptor_major() {
        let names = feature_names(&DEFAULT_K_LIST);
        assert_eq!(names.len(), 48);
        assert_eq!(names[0], "avg_dist_same@k=3");
        assert_eq!(names[1], "avg_dist_same@k=5");
        assert_eq!(names[5], "avg_dist_same@k=33");
        assert_eq!(names[6], "avg_dist_opposite@k=3");
        assert_eq!(names[47], "count_opposite@k=33");
    }

    #[test]
    fn descriptor_values_on_hand_example() {
        let d = four_points();
        let g = build_graph(&d, 3, BuildMethod::Brute).unwrap();
        let m = extract(&g, &[3], "four").unwrap();
        assert_eq!(m.n_rows(), 4);
        assert_eq!(m.n_cols(), 8);
        // Vertex 0 at the origin: neighbors are 1 (d=0.5), 2 (d=0.5), 3 (d=25).
        let row = m.row(0);
        assert_relative_eq!(row[0], 12.75); // avg same: (0.5 + 25) / 2
        assert_relative_eq!(row[1], 0.5); // avg opposite
        assert_relative_eq!(row[2], 26.0 / 3.0); // avg any
        assert_relative_eq!(row[3], 0.5); // min same
        assert_relative_eq!(row[4], 0.5); // min opposite
        assert_relative_eq!(row[5], 0.5); // min any
        assert_relative_eq!(row[6], 2.0); // count same
        assert_relative_eq!(row[7], 1.0); // count opposite
    }

    #[test]
    fn sentinel_for_missing_class_neighbors() {
        // Two instances per class, far apart: with k=1 each sees only its twin.
        let d = Dataset::new(
            "s",
            vec![0.0, 0.1, 100.0, 100.1],
            4,
            1,
            vec![0, 0, 1, 1],
            vec!["x".into()],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        let g = build_graph(&d, 1, BuildMethod::Brute).unwrap();
        let m = extract(&g, &[1], "s").unwrap();
        let row = m.row(0);
        assert!(row[0] >= 0.0); // avg same exists
        assert_eq!(row[1], EMPTY_SENTINEL); // no opposite neighbor
        assert_eq!(row[4], EMPTY_SENTINEL); // min opposite
        assert_eq!(row[7], 0.0); // count opposite
    }

    #[test]
    fn complete_graph_allows_larger_k() {
        let d = four_points();
        let g = build_graph(&d, 3, BuildMethod::Brute).unwrap(); // complete: k_max = n-1
        let m = extract(&g, &[3, 5, 9], "four").unwrap();
        assert_eq!(m.n_cols(), 24);
        // k=5 and k=9 see the same 3 neighbors as k=3.
        let row = m.row(0);
        assert_eq!(row[0], row[1]);
        assert_eq!(row[1], row[2]);

        // Incomplete graph with k beyond k_max must fail.
        let d2 = crate::dataset::Dataset::new(
            "six",
            (0..12).map(f64::from).collect(),
            6,
            2,
            vec![0, 1, 0, 1, 0, 1],
            vec!["x".into(), "y".into()],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        let g2 = build_graph(&d2, 3, BuildMethod::Brute).unwrap();
        assert!(extract(&g2, &[5], "six").is_err());
        assert!(extract(&g2, &[], "six").is_err());
        assert!(extract(&g2, &[3, 3], "six").is_err());
        assert!(extract(&g2, &[0], "six").is_err());
    }

    #[test]
    fn csv_roundtrip_with_labels_and_sources() {
        let d = four_points();
        let g = build_graph(&d, 3, BuildMethod::Brute).unwrap();
        let mut m = extract(&g, &[1, 3], "four").unwrap();
        m.set_labels(Some(vec![1, 0, 1, 1])).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("meta.csv");
        write_meta_csv(&m, &path).unwrap();
        let back = read_meta_csv(&path).unwrap();
        assert_eq!(back.feature_names(), m.feature_names());
        assert_eq!(back.labels(), m.labels());
        assert_eq!(back.records(), m.records());
        assert_eq!(back.source_name_of(2), "four");
    }

    #[test]
    fn concat_merges_sources_and_checks_columns() {
        let d = four_points();
        let g = build_graph(&d, 3, BuildMethod::Brute).unwrap();
        let mut a = extract(&g, &[3], "alpha").unwrap();
        a.set_labels(Some(vec![1, 1, 0, 1])).unwrap();
        let mut b = extract(&g, &[3], "beta").unwrap();
        b.set_labels(Some(vec![0, 0, 1, 0])).unwrap();
        let merged = MetaDataset::concat(vec![a.clone(), b]).unwrap();
        assert_eq!(merged.n_rows(), 8);
        assert_eq!(merged.sources(), &["alpha".to_string(), "beta".to_string()]);
        assert_eq!(merged.source_name_of(0), "alpha");
        assert_eq!(merged.source_name_of(7), "beta");
        assert_eq!(merged.labels().unwrap()[..4], [1, 1, 0, 1]);

        let c = extract(&g, &[1], "gamma").unwrap();
        assert!(MetaDataset::concat(vec![a, c]).is_err());
    }

    #[test]
    fn standardization_covers_all_columns() {
        let d = four_points();
        let g = build_graph(&d, 3, BuildMethod::Brute).unwrap();
        let mut m = extract(&g, &[3], "four").unwrap();
        let params = m.standardize_columns().unwrap();
        assert_eq!(params.means.len(), 8);
        for c in 0..m.n_cols() {
            let mean: f64 = (0..m.n_rows()).map(|r| m.row(r)[c]).sum::<f64>() / m.n_rows() as f64;
            assert!(mean.abs() < 1e-12, "column {c} centered, got {mean}");
        }
    }
}
