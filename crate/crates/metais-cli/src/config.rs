//! Optional run-configuration files. Every knob a subcommand accepts as a
//! flag can also come from a TOML or JSON file; explicit flags win.

use std::path::Path;

use anyhow::{bail, Context, Result};
use metais::dataset::LabelColumn;
use serde::{Deserialize, Serialize};

/// All recognized settings. Subcommands read the subset they care about and
/// ignore the rest.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub algorithm: Option<String>,
    pub k: Option<usize>,
    pub k_list: Option<Vec<usize>>,
    pub classifier: Option<String>,
    pub trees: Option<usize>,
    pub max_depth: Option<usize>,
    pub min_leaf: Option<usize>,
    pub features_per_split: Option<usize>,
    pub theta: Option<f64>,
    pub thetas: Option<Vec<f64>>,
    pub folds: Option<usize>,
    pub seed: Option<u64>,
    pub alpha: Option<f64>,
    pub scaling: Option<String>,
    pub label_column: Option<String>,
    pub method: Option<String>,
    pub jobs: Option<usize>,
}

/// Load a config file, dispatching on the extension.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config `{}`", path.display()))?;
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .unwrap_or_default();
    match ext.as_str() {
        "toml" => toml::from_str(&text)
            .with_context(|| format!("parsing TOML config `{}`", path.display())),
        "json" => serde_json::from_str(&text)
            .with_context(|| format!("parsing JSON config `{}`", path.display())),
        other => bail!(
            "config `{}`: unsupported extension `{}` (expected .toml or .json)",
            path.display(),
            other
        ),
    }
}

/// `last`, a zero-based index, or a header name.
pub fn parse_label_column(s: &str) -> LabelColumn {
    if s.eq_ignore_ascii_case("last") {
        LabelColumn::Last
    } else if let Ok(i) = s.parse::<usize>() {
        LabelColumn::Index(i)
    } else {
        LabelColumn::Name(s.to_string())
    }
}
