//! Iterative case filtering: after an edited-nearest-neighbor pass, instances
//! whose reachable set outgrows their coverage set are discarded, in rounds,
//! until the configuration is stable.
//!
//! For an instance `t`, the local set is every same-class instance strictly
//! closer to `t` than `t`'s nearest enemy (including `t` itself; with no
//! enemy the whole class qualifies). `coverage(t)` is the size of `t`'s local
//! set and `reachable(t)` counts the instances whose local sets contain `t`.
//! Each round flags all instances with `reachable > coverage` and removes
//! them together.

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::nng::raw_sq_dist;

use super::enn::enn_keep;
use super::SelectionMask;

/// Coverage and reachability of every row of `d`, treating `d` itself as the
/// retained set.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalSetInfo {
    pub coverage: Vec<usize>,
    pub reachable: Vec<usize>,
}

pub fn local_sets(d: &Dataset) -> Result<LocalSetInfo> {
    let retained: Vec<usize> = (0..d.n_rows()).collect();
    Ok(local_sets_of(d, &retained))
}

/// Coverage/reachability restricted to `retained` (local indices into it).
fn local_sets_of(d: &Dataset, retained: &[usize]) -> LocalSetInfo {
    let s = retained.len();
    let mut enemy: Vec<f64> = vec![f64::INFINITY; s];
    for (a, &i) in retained.iter().enumerate() {
        for &j in retained {
            if d.label(j) == d.label(i) {
                continue;
            }
            let raw = raw_sq_dist(d.row(i), d.row(j));
            if raw < enemy[a] {
                enemy[a] = raw;
            }
        }
    }
    let mut coverage = vec![0usize; s];
    let mut reachable = vec![0usize; s];
    for (a, &i) in retained.iter().enumerate() {
        for (b, &j) in retained.iter().enumerate() {
            if d.label(j) != d.label(i) {
                continue;
            }
            // j belongs to the local set of i?
            if raw_sq_dist(d.row(i), d.row(j)) < enemy[a] {
                coverage[a] += 1;
                reachable[b] += 1;
            }
        }
    }
    LocalSetInfo {
        coverage,
        reachable,
    }
}

pub fn icf(d: &Dataset, k: usize) -> Result<SelectionMask> {
    if k == 0 {
        return Err(Error::invalid("icf requires k >= 1"));
    }
    if d.n_rows() <= k {
        return Err(Error::invalid(format!(
            "icf with k = {} needs more than {} rows",
            k,
            d.n_rows()
        )));
    }

    let keep = enn_keep(d, k)?;
    let mut retained: Vec<usize> = (0..d.n_rows()).filter(|&i| keep[i]).collect();

    loop {
        if retained.len() <= 1 {
            break;
        }
        let info = local_sets_of(d, &retained);
        let next: Vec<usize> = retained
            .iter()
            .enumerate()
            .filter(|&(a, _)| info.reachable[a] <= info.coverage[a])
            .map(|(_, &i)| i)
            .collect();
        if next.len() == retained.len() {
            break;
        }
        retained = next;
    }

    let mut keep = vec![false; d.n_rows()];
    for &i in &retained {
        keep[i] = true;
    }
    Ok(SelectionMask::new(keep, "icf", Some(k)))
}
