//! Labeled numeric datasets and the bookkeeping around them: loading from
//! Keel `.dat` and plain CSV files, per-feature standardization, and
//! stratified cross-validation splits.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A dense, row-major numeric dataset with one integer class label per row.
///
/// Class labels are contiguous ids `0..n_classes`, assigned in order of first
/// appearance when loaded from a file. The original class tokens are kept in
/// `class_names` so files written back out use the original vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    features: Vec<f64>,
    n_rows: usize,
    n_features: usize,
    labels: Vec<usize>,
    feature_names: Vec<String>,
    class_names: Vec<String>,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        features: Vec<f64>,
        n_rows: usize,
        n_features: usize,
        labels: Vec<usize>,
        feature_names: Vec<String>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        if n_rows == 0 {
            return Err(Error::invalid("dataset must contain at least one row"));
        }
        if n_features == 0 {
            return Err(Error::invalid("dataset must have at least one feature"));
        }
        if features.len() != n_rows * n_features {
            return Err(Error::invalid(format!(
                "feature buffer has {} values, expected {} ({} rows x {} features)",
                features.len(),
                n_rows * n_features,
                n_rows,
                n_features
            )));
        }
        if labels.len() != n_rows {
            return Err(Error::invalid(format!(
                "{} labels for {} rows",
                labels.len(),
                n_rows
            )));
        }
        if feature_names.len() != n_features {
            return Err(Error::invalid(format!(
                "{} feature names for {} features",
                feature_names.len(),
                n_features
            )));
        }
        if class_names.is_empty() {
            return Err(Error::invalid("dataset must declare at least one class"));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= class_names.len()) {
            return Err(Error::invalid(format!(
                "label id {} out of range for {} classes",
                bad,
                class_names.len()
            )));
        }
        if let Some(pos) = features.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite feature value at row {}, column {}",
                pos / n_features,
                pos % n_features
            )));
        }
        Ok(Dataset {
            name: name.into(),
            features,
            n_rows,
            n_features,
            labels,
            feature_names,
            class_names,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.features[row * self.n_features + col]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    /// Number of rows carrying each class label.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.n_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// New dataset holding the given rows (in the given order). The class
    /// vocabulary is preserved even if some classes lose all members.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::invalid("subset of zero rows"));
        }
        let mut features = Vec::with_capacity(indices.len() * self.n_features);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.n_rows {
                return Err(Error::invalid(format!(
                    "row index {} out of range ({} rows)",
                    i, self.n_rows
                )));
            }
            features.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Dataset::new(
            self.name.clone(),
            features,
            indices.len(),
            self.n_features,
            labels,
            self.feature_names.clone(),
            self.class_names.clone(),
        )
    }
}

/// Per-column means and standard deviations captured during standardization,
/// so the same affine map can be replayed or inverted later.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ScalingParams {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl ScalingParams {
    /// Column statistics of a row-major buffer. Population standard
    /// deviation; columns with zero spread get std 1 so scaling is a no-op.
    pub fn fit(values: &[f64], n_rows: usize, n_cols: usize) -> Result<Self> {
        if n_rows == 0 || values.len() != n_rows * n_cols {
            return Err(Error::invalid("scaling requires a non-empty rectangular buffer"));
        }
        let mut means = vec![0.0; n_cols];
        for r in 0..n_rows {
            for c in 0..n_cols {
                means[c] += values[r * n_cols + c];
            }
        }
        for m in &mut means {
            *m /= n_rows as f64;
        }
        let mut vars = vec![0.0; n_cols];
        for r in 0..n_rows {
            for c in 0..n_cols {
                let d = values[r * n_cols + c] - means[c];
                vars[c] += d * d;
            }
        }
        let stds = vars
            .iter()
            .map(|v| {
                let s = (v / n_rows as f64).sqrt();
                if s > 0.0 {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        Ok(ScalingParams { means, stds })
    }

    /// Apply `(x - mean) / std` column-wise in place.
    pub fn apply(&self, values: &mut [f64], n_cols: usize) -> Result<()> {
        if n_cols != self.means.len() || values.len() % n_cols != 0 {
            return Err(Error::invalid(format!(
                "scaling params cover {} columns, buffer has {}",
                self.means.len(),
                n_cols
            )));
        }
        for (i, v) in values.iter_mut().enumerate() {
            let c = i % n_cols;
            *v = (*v - self.means[c]) / self.stds[c];
        }
        Ok(())
    }

    /// Inverse of [`ScalingParams::apply`].
    pub fn invert(&self, values: &mut [f64], n_cols: usize) -> Result<()> {
        if n_cols != self.means.len() || values.len() % n_cols != 0 {
            return Err(Error::invalid(format!(
                "scaling params cover {} columns, buffer has {}",
                self.means.len(),
                n_cols
            )));
        }
        for (i, v) in values.iter_mut().enumerate() {
            let c = i % n_cols;
            *v = *v * self.stds[c] + self.means[c];
        }
        Ok(())
    }
}

/// Standardize every feature column to zero mean and unit variance.
/// Returns the scaled dataset together with the parameters used.
pub fn standardize(d: &Dataset) -> Result<(Dataset, ScalingParams)> {
    let params = ScalingParams::fit(&d.features, d.n_rows, d.n_features)?;
    let mut features = d.features.clone();
    params.apply(&mut features, d.n_features)?;
    let scaled = Dataset::new(
        d.name.clone(),
        features,
        d.n_rows,
        d.n_features,
        d.labels.clone(),
        d.feature_names.clone(),
        d.class_names.clone(),
    )?;
    Ok((scaled, params))
}

/// One train/test split out of a k-fold partition. Indices refer to rows of
/// the dataset the split was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldSplit {
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
}

/// Deterministic stratified k-fold split: rows of each class are shuffled
/// with a seeded generator and dealt round-robin across folds, so fold class
/// proportions track the full dataset as closely as integer counts allow.
pub fn stratified_kfold(d: &Dataset, folds: usize, seed: u64) -> Result<Vec<FoldSplit>> {
    if folds < 2 {
        return Err(Error::invalid("need at least 2 folds"));
    }
    if folds > d.n_rows() {
        return Err(Error::invalid(format!(
            "{} folds requested for {} rows",
            folds,
            d.n_rows()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0usize; d.n_rows()];
    for class in 0..d.n_classes() {
        let mut members: Vec<usize> = (0..d.n_rows()).filter(|&i| d.label(i) == class).collect();
        members.shuffle(&mut rng);
        for (pos, &row) in members.iter().enumerate() {
            assignment[row] = pos % folds;
        }
    }
    let mut splits = Vec::with_capacity(folds);
    for f in 0..folds {
        let test_indices: Vec<usize> = (0..d.n_rows()).filter(|&i| assignment[i] == f).collect();
        let train_indices: Vec<usize> = (0..d.n_rows()).filter(|&i| assignment[i] != f).collect();
        if test_indices.is_empty() || train_indices.is_empty() {
            return Err(Error::invalid(format!(
                "fold {} would be empty; fewer rows than folds in some class?",
                f
            )));
        }
        splits.push(FoldSplit {
            train_indices,
            test_indices,
        });
    }
    Ok(splits)
}

fn is_numeric_keyword(word: &str) -> bool {
    matches!(
        word.to_ascii_lowercase().as_str(),
        "real" | "integer" | "numeric"
    )
}

#[derive(Debug, Clone)]
struct KeelAttribute {
    name: String,
    /// `None` for numeric attributes, `Some(tokens)` for categorical ones.
    categories: Option<Vec<String>>,
}

fn parse_keel_attribute(path: &str, line_no: usize, rest: &str) -> Result<KeelAttribute> {
    let rest = rest.trim();
    if rest.is_empty() {
        return Err(Error::parse(path, line_no, "attribute without a name"));
    }
    // Name runs until whitespace, '{' or '['.
    let name_end = rest
        .find(|c: char| c.is_whitespace() || c == '{' || c == '[')
        .unwrap_or(rest.len());
    let name = rest[..name_end].trim().to_string();
    if name.is_empty() {
        return Err(Error::parse(path, line_no, "attribute without a name"));
    }
    let tail = rest[name_end..].trim();
    if tail.starts_with('{') {
        let close = tail.find('}').ok_or_else(|| {
            Error::parse(path, line_no, "unterminated category list in attribute")
        })?;
        let categories: Vec<String> = tail[1..close]
            .split(',')
            .map(|t| t.trim().to_string())
            .filter(|t| !t.is_empty())
            .collect();
        if categories.is_empty() {
            return Err(Error::parse(path, line_no, "empty category list"));
        }
        return Ok(KeelAttribute {
            name,
            categories: Some(categories),
        });
    }
    let kind_word = tail
        .split(|c: char| c.is_whitespace() || c == '[')
        .next()
        .unwrap_or("");
    if tail.is_empty() || is_numeric_keyword(kind_word) {
        // Range bounds like `[-3.09, 2.81]` are informational; ignore them.
        return Ok(KeelAttribute {
            name,
            categories: None,
        });
    }
    Err(Error::parse(
        path,
        line_no,
        format!("unsupported attribute type `{}`", tail),
    ))
}

/// Load a dataset in the Keel `.dat` dialect.
///
/// Recognized header lines: `@relation`, `@attribute`, `@inputs`, `@outputs`,
/// `@data`. The output attribute (default: the last declared one) becomes the
/// class label; every other attribute must be numeric. Class ids are assigned
/// in order of first appearance in the data section.
pub fn load_keel(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let path_str = path.display().to_string();
    parse_keel(&text, &path_str, default_name_from_path(path))
}

fn default_name_from_path(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Parse Keel-format text. Exposed for callers that already hold the bytes.
pub fn parse_keel(text: &str, path_str: &str, fallback_name: String) -> Result<Dataset> {
    let mut relation: Option<String> = None;
    let mut attributes: Vec<KeelAttribute> = Vec::new();
    let mut outputs: Option<Vec<String>> = None;
    let mut inputs: Option<Vec<String>> = None;
    let mut data_start: Option<usize> = None;

    let lines: Vec<&str> = text.lines().collect();
    for (idx, raw) in lines.iter().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if let Some(rest) = strip_keyword(line, "@relation") {
            relation = Some(rest.trim().to_string());
        } else if let Some(rest) = strip_keyword(line, "@attribute") {
            attributes.push(parse_keel_attribute(path_str, line_no, rest)?);
        } else if let Some(rest) = strip_keyword(line, "@inputs") {
            inputs = Some(split_name_list(rest));
        } else if let Some(rest) = strip_keyword(line, "@outputs") {
            outputs = Some(split_name_list(rest));
        } else if strip_keyword(line, "@data").is_some() {
            data_start = Some(idx + 1);
            break;
        } else if line.starts_with('@') {
            return Err(Error::parse(
                path_str,
                line_no,
                format!("unknown header directive `{}`", line),
            ));
        } else {
            return Err(Error::parse(
                path_str,
                line_no,
                "data row before @data section",
            ));
        }
    }

    let data_start =
        data_start.ok_or_else(|| Error::parse(path_str, lines.len(), "missing @data section"))?;
    if attributes.len() < 2 {
        return Err(Error::parse(
            path_str,
            data_start,
            "need at least one input attribute and one output attribute",
        ));
    }

    let find_attr = |name: &str| attributes.iter().position(|a| a.name == name);

    let output_idx = match &outputs {
        Some(names) => {
            if names.len() != 1 {
                return Err(Error::parse(
                    path_str,
                    data_start,
                    "exactly one output attribute is supported",
                ));
            }
            find_attr(&names[0]).ok_or_else(|| {
                Error::parse(
                    path_str,
                    data_start,
                    format!("@outputs names unknown attribute `{}`", names[0]),
                )
            })?
        }
        None => attributes.len() - 1,
    };

    let input_idx: Vec<usize> = match &inputs {
        Some(names) => {
            let mut v = Vec::with_capacity(names.len());
            for n in names {
                let i = find_attr(n).ok_or_else(|| {
                    Error::parse(
                        path_str,
                        data_start,
                        format!("@inputs names unknown attribute `{}`", n),
                    )
                })?;
                if i == output_idx {
                    return Err(Error::parse(
                        path_str,
                        data_start,
                        format!("attribute `{}` listed as both input and output", n),
                    ));
                }
                v.push(i);
            }
            v
        }
        None => (0..attributes.len()).filter(|&i| i != output_idx).collect(),
    };
    if input_idx.is_empty() {
        return Err(Error::parse(path_str, data_start, "no input attributes"));
    }
    for &i in &input_idx {
        if attributes[i].categories.is_some() {
            return Err(Error::parse(
                path_str,
                data_start,
                format!(
                    "categorical input attribute `{}` is not supported",
                    attributes[i].name
                ),
            ));
        }
    }

    let declared_classes = attributes[output_idx].categories.clone();
    let mut class_names: Vec<String> = Vec::new();
    let mut features: Vec<f64> = Vec::new();
    let mut labels: Vec<usize> = Vec::new();
    let n_cols = attributes.len();

    for (idx, raw) in lines.iter().enumerate().skip(data_start) {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(|c| c.trim()).collect();
        if cells.len() != n_cols {
            return Err(Error::parse(
                path_str,
                line_no,
                format!("row has {} values, expected {}", cells.len(), n_cols),
            ));
        }
        for &i in &input_idx {
            let v: f64 = cells[i].parse().map_err(|_| {
                Error::parse(
                    path_str,
                    line_no,
                    format!(
                        "non-numeric value `{}` in attribute `{}`",
                        cells[i], attributes[i].name
                    ),
                )
            })?;
            features.push(v);
        }
        let token = cells[output_idx];
        if let Some(declared) = &declared_classes {
            if !declared.iter().any(|d| d == token) {
                return Err(Error::parse(
                    path_str,
                    line_no,
                    format!("class token `{}` not in declared set", token),
                ));
            }
        }
        let id = match class_names.iter().position(|c| c == token) {
            Some(id) => id,
            None => {
                class_names.push(token.to_string());
                class_names.len() - 1
            }
        };
        labels.push(id);
    }

    if labels.is_empty() {
        return Err(Error::parse(path_str, lines.len(), "empty data section"));
    }

    let feature_names: Vec<String> = input_idx
        .iter()
        .map(|&i| attributes[i].name.clone())
        .collect();
    let name = relation.filter(|r| !r.is_empty()).unwrap_or(fallback_name);
    Dataset::new(
        name,
        features,
        labels.len(),
        input_idx.len(),
        labels,
        feature_names,
        class_names,
    )
}

fn strip_keyword<'a>(line: &'a str, keyword: &str) -> Option<&'a str> {
    if line.len() >= keyword.len() && line[..keyword.len()].eq_ignore_ascii_case(keyword) {
        let rest = &line[keyword.len()..];
        if rest.is_empty() || rest.starts_with(char::is_whitespace) {
            return Some(rest);
        }
    }
    None
}

fn split_name_list(rest: &str) -> Vec<String> {
    rest.split(',')
        .map(|t| t.trim().to_string())
        .filter(|t| !t.is_empty())
        .collect()
}

/// Write a dataset back out in the Keel `.dat` dialect.
pub fn write_keel(d: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    let _ = writeln!(out, "@relation {}", d.name());
    for name in d.feature_names() {
        let _ = writeln!(out, "@attribute {} real", name);
    }
    let _ = writeln!(out, "@attribute Class {{{}}}", d.class_names().join(", "));
    let _ = writeln!(out, "@inputs {}", d.feature_names().join(", "));
    let _ = writeln!(out, "@outputs Class");
    let _ = writeln!(out, "@data");
    for i in 0..d.n_rows() {
        let mut cells: Vec<String> = d.row(i).iter().map(|v| format_value(*v)).collect();
        cells.push(d.class_names()[d.label(i)].clone());
        let _ = writeln!(out, "{}", cells.join(","));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

fn format_value(v: f64) -> String {
    // Shortest representation that round-trips exactly.
    let mut s = format!("{}", v);
    if !s.contains('.') && !s.contains('e') && !s.contains("inf") && !s.contains("NaN") {
        s.push_str(".0");
    }
    s
}

/// Which CSV column holds the class label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    /// Header name (requires a header row).
    Name(String),
    /// Zero-based column index.
    Index(usize),
    /// The last column, whatever it is called.
    Last,
}

/// Load a dataset from a headered CSV file. All columns except the label
/// column must be numeric.
pub fn load_csv(path: impl AsRef<Path>, label: &LabelColumn) -> Result<Dataset> {
    let path = path.as_ref();
    let path_str = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Format(format!("{}: {}", path_str, e)))?;

    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Format(format!("{}: {}", path_str, e)))?
        .iter()
        .map(|h| h.to_string())
        .collect();
    if headers.len() < 2 {
        return Err(Error::parse(
            &path_str,
            1,
            "need at least one feature column and one label column",
        ));
    }

    let label_idx = match label {
        LabelColumn::Name(n) => headers.iter().position(|h| h == n).ok_or_else(|| {
            Error::parse(&path_str, 1, format!("no column named `{}` in header", n))
        })?,
        LabelColumn::Index(i) => {
            if *i >= headers.len() {
                return Err(Error::parse(
                    &path_str,
                    1,
                    format!("label column {} out of range ({} columns)", i, headers.len()),
                ));
            }
            *i
        }
        LabelColumn::Last => headers.len() - 1,
    };

    let feature_idx: Vec<usize> = (0..headers.len()).filter(|&i| i != label_idx).collect();
    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut class_names: Vec<String> = Vec::new();

    for (rec_no, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Format(format!("{}: {}", path_str, e)))?;
        let line_no = rec_no + 2; // 1-based, after the header line
        if record.len() != headers.len() {
            return Err(Error::parse(
                &path_str,
                line_no,
                format!("row has {} values, expected {}", record.len(), headers.len()),
            ));
        }
        for &i in &feature_idx {
            let cell = &record[i];
            let v: f64 = cell.parse().map_err(|_| {
                Error::parse(
                    &path_str,
                    line_no,
                    format!("non-numeric value `{}` in column `{}`", cell, headers[i]),
                )
            })?;
            features.push(v);
        }
        let token = record[label_idx].to_string();
        let id = match class_names.iter().position(|c| *c == token) {
            Some(id) => id,
            None => {
                class_names.push(token);
                class_names.len() - 1
            }
        };
        labels.push(id);
    }

    if labels.is_empty() {
        return Err(Error::parse(&path_str, 1, "no data rows"));
    }

    let feature_names = feature_idx.iter().map(|&i| headers[i].clone()).collect();
    Dataset::new(
        default_name_from_path(path),
        features,
        labels.len(),
        feature_idx.len(),
        labels,
        feature_names,
        class_names,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn toy() -> Dataset {
        Dataset::new(
            "toy",
            vec![1.0, 10.0, 2.0, 20.0, 3.0, 30.0],
            3,
            2,
            vec![0, 1, 0],
            vec!["a".into(), "b".into()],
            vec!["x".into(), "y".into()],
        )
        .unwrap()
    }

    #[test]
    fn construction_validates_shapes() {
        assert!(Dataset::new("d", vec![1.0], 1, 1, vec![0], vec!["a".into()], vec!["c".into()]).is_ok());
        assert!(Dataset::new("d", vec![], 0, 1, vec![], vec!["a".into()], vec!["c".into()]).is_err());
        assert!(Dataset::new("d", vec![1.0, 2.0], 1, 1, vec![0], vec!["a".into()], vec!["c".into()]).is_err());
        assert!(Dataset::new("d", vec![f64::NAN], 1, 1, vec![0], vec!["a".into()], vec!["c".into()]).is_err());
        assert!(Dataset::new("d", vec![1.0], 1, 1, vec![3], vec!["a".into()], vec!["c".into()]).is_err());
    }

    #[test]
    fn standardize_centers_and_scales() {
        let d = toy();
        let (scaled, params) = standardize(&d).unwrap();
        assert_relative_eq!(params.means[0], 2.0);
        assert_relative_eq!(params.means[1], 20.0);
        let expect = (2.0f64 / 3.0).sqrt();
        assert_relative_eq!(params.stds[0], expect, max_relative = 1e-12);
        // column 0 becomes [-1.2247.., 0, 1.2247..]
        assert_relative_eq!(scaled.value(0, 0), -1.0 / expect, max_relative = 1e-12);
        assert_relative_eq!(scaled.value(1, 0), 0.0);
        assert_relative_eq!(scaled.value(2, 0), 1.0 / expect, max_relative = 1e-12);
        // round-trip back
        let mut buf = scaled.features().to_vec();
        params.invert(&mut buf, 2).unwrap();
        for (a, b) in buf.iter().zip(d.features()) {
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
    }

    #[test]
    fn standardize_constant_column_is_noop_scale() {
        let d = Dataset::new(
            "c",
            vec![5.0, 1.0, 5.0, 2.0],
            2,
            2,
            vec![0, 0],
            vec!["a".into(), "b".into()],
            vec!["c".into()],
        )
        .unwrap();
        let (scaled, params) = standardize(&d).unwrap();
        assert_eq!(params.stds[0], 1.0);
        assert_eq!(scaled.value(0, 0), 0.0);
        assert_eq!(scaled.value(1, 0), 0.0);
    }

    #[test]
    fn subset_preserves_class_vocabulary() {
        let d = toy();
        let s = d.subset(&[0, 2]).unwrap();
        assert_eq!(s.n_rows(), 2);
        assert_eq!(s.n_classes(), 2);
        assert_eq!(s.labels(), &[0, 0]);
        assert_eq!(s.row(1), &[3.0, 30.0]);
        assert!(d.subset(&[]).is_err());
        assert!(d.subset(&[7]).is_err());
    }

    #[test]
    fn kfold_is_stratified_and_deterministic() {
        // 12 rows, classes 8/4.
        let n = 12;
        let labels: Vec<usize> = (0..n).map(|i| usize::from(i % 3 == 0)).collect();
        let features: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let d = Dataset::new(
            "k",
            features,
            n,
            1,
            labels,
            vec!["a".into()],
            vec!["c0".into(), "c1".into()],
        )
        .unwrap();
        let folds = stratified_kfold(&d, 4, 9).unwrap();
        assert_eq!(folds.len(), 4);
        let mut seen = vec![0usize; n];
        for f in &folds {
            assert_eq!(f.train_indices.len() + f.test_indices.len(), n);
            let c1 = f.test_indices.iter().filter(|&&i| d.label(i) == 1).count();
            assert_eq!(c1, 1); // 4 minority rows over 4 folds
            assert_eq!(f.test_indices.len(), 3);
            for &i in &f.test_indices {
                seen[i] += 1;
            }
        }
        assert!(seen.iter().all(|&s| s == 1), "each row tested exactly once");
        let again = stratified_kfold(&d, 4, 9).unwrap();
        assert_eq!(folds, again);
        let other = stratified_kfold(&d, 4, 10).unwrap();
        assert_ne!(folds, other);
        assert!(stratified_kfold(&d, 1, 0).is_err());
        assert!(stratified_kfold(&d, 13, 0).is_err());
    }

    #[test]
    fn keel_parse_basic() {
        let text = "\
@relation banana
@attribute At1 real [-3.09, 2.81]
@attribute At2 real [-2.39, 3.19]
@attribute Class {-1.0, 1.0}
@inputs At1, At2
@outputs Class
@data
1.14,-0.114,-1.0
-1.14, 0.51,1.0
0.0,0.0,-1.0
";
        let d = parse_keel(text, "mem", "fallback".into()).unwrap();
        assert_eq!(d.name(), "banana");
        assert_eq!(d.n_rows(), 3);
        assert_eq!(d.n_features(), 2);
        assert_eq!(d.n_classes(), 2);
        assert_eq!(d.class_names(), &["-1.0".to_string(), "1.0".to_string()]);
        assert_eq!(d.labels(), &[0, 1, 0]);
        assert_relative_eq!(d.value(1, 1), 0.51);
    }

    #[test]
    fn keel_defaults_and_errors() {
        // No @inputs/@outputs: last attribute is the label.
        let text = "@relation r\n@attribute a real\n@attribute c {p, q}\n@data\n1.0,p\n2.0,q\n";
        let d = parse_keel(text, "mem", "f".into()).unwrap();
        assert_eq!(d.n_features(), 1);
        assert_eq!(d.class_names(), &["p".to_string(), "q".to_string()]);

        // Unknown class token.
        let bad = "@relation r\n@attribute a real\n@attribute c {p}\n@data\n1.0,z\n";
        let err = parse_keel(bad, "mem", "f".into()).unwrap_err();
        assert!(err.to_string().contains("class token"), "{err}");

        // Non-numeric feature cell names the line.
        let bad = "@relation r\n@attribute a real\n@attribute c {p}\n@data\nxx,p\n";
        let err = parse_keel(bad, "mem", "f".into()).unwrap_err();
        assert!(err.to_string().contains("mem:5"), "{err}");

        // Missing @data.
        let bad = "@relation r\n@attribute a real\n@attribute c {p}\n";
        assert!(parse_keel(bad, "mem", "f".into()).is_err());

        // Empty data section.
        let bad = "@relation r\n@attribute a real\n@attribute c {p}\n@data\n";
        assert!(parse_keel(bad, "mem", "f".into()).is_err());

        // Ragged row.
        let bad = "@relation r\n@attribute a real\n@attribute c {p}\n@data\n1.0\n";
        assert!(parse_keel(bad, "mem", "f".into()).is_err());

        // Categorical input attribute is rejected.
        let bad = "@relation r\n@attribute a {u, v}\n@attribute c {p}\n@data\nu,p\n";
        assert!(parse_keel(bad, "mem", "f".into()).is_err());
    }

    #[test]
    fn keel_roundtrip_through_file() {
        let d = toy();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("toy.dat");
        write_keel(&d, &path).unwrap();
        let back = load_keel(&path).unwrap();
        assert_eq!(back.n_rows(), d.n_rows());
        assert_eq!(back.n_features(), d.n_features());
        assert_eq!(back.labels(), d.labels());
        assert_eq!(back.class_names(), d.class_names());
        for i in 0..d.n_rows() {
            assert_eq!(back.row(i), d.row(i));
        }
    }

    #[test]
    fn csv_loading() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        std::fs::write(&path, "f1,f2,target\n1.5,2.5,yes\n3.5,4.5,no\n0.5,0.5,yes\n").unwrap();

        let d = load_csv(&path, &LabelColumn::Last).unwrap();
        assert_eq!(d.n_rows(), 3);
        assert_eq!(d.n_features(), 2);
        assert_eq!(d.class_names(), &["yes".to_string(), "no".to_string()]);
        assert_eq!(d.labels(), &[0, 1, 0]);

        let d2 = load_csv(&path, &LabelColumn::Name("target".into())).unwrap();
        assert_eq!(d2.labels(), d.labels());
        let d3 = load_csv(&path, &LabelColumn::Index(2)).unwrap();
        assert_eq!(d3.labels(), d.labels());

        assert!(load_csv(&path, &LabelColumn::Name("zzz".into())).is_err());
        assert!(load_csv(&path, &LabelColumn::Index(9)).is_err());

        // Label column in the middle: features are the remaining columns.
        let mid = dir.path().join("mid.csv");
        std::fs::write(&mid, "f1,cls,f2\n1.0,a,2.0\n3.0,b,4.0\n").unwrap();
        let d4 = load_csv(&mid, &LabelColumn::Name("cls".into())).unwrap();
        assert_eq!(d4.n_features(), 2);
        assert_eq!(d4.feature_names(), &["f1".to_string(), "f2".to_string()]);
        assert_eq!(d4.labels(), &[0, 1]);
        assert_eq!(d4.row(1), &[3.0, 4.0]);

        std::fs::write(&path, "f1,target\nbad,yes\n").unwrap();
        let err = load_csv(&path, &LabelColumn::Last).unwrap_err();
        assert!(err.to_string().contains("non-numeric"), "{err}");
    }
}
