//! Decremental reduction with an edited-nearest-neighbor noise filter in
//! front (the "drop3" pruning scheme).
//!
//! Stage 1 applies the ENN filter; if that empties a class, the
//! lowest-indexed removed member of that class is put back so every class
//! survives into stage 2.
//!
//! Stage 2 considers the survivors in order of decreasing distance to their
//! nearest enemy (instances without any enemy come last; ties by ascending
//! row index). Every survivor `t` keeps a list of its `k + 1` nearest
//! current survivors; the instances that have `P` in their list are `P`'s
//! associates — survivors and already-pruned instances alike. `P` is removed
//! when at least as many of its associates are classified correctly by a
//! k-vote over their lists without `P` as with `P`, unless `P` is the last
//! remaining instance of its class. After a removal, affected lists are
//! extended with the next nearest survivor.

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::nng::{build_graph, raw_sq_dist, BuildMethod};

use super::enn::enn_keep;
use super::{majority_class, SelectionMask};

pub fn drop3(d: &Dataset, k: usize) -> Result<SelectionMask> {
    if k == 0 {
        return Err(Error::invalid("drop3 requires k >= 1"));
    }
    if d.n_rows() <= k {
        return Err(Error::invalid(format!(
            "drop3 with k = {} needs more than {} rows",
            k,
            d.n_rows()
        )));
    }

    // Stage 1: noise filter, with a floor of one instance per class.
    let mut keep = enn_keep(d, k)?;
    for class in 0..d.n_classes() {
        let class_rows = || (0..d.n_rows()).filter(|&i| d.label(i) == class);
        if class_rows().next().is_some() && !class_rows().any(|i| keep[i]) {
            let first = class_rows().next().unwrap();
            keep[first] = true;
        }
    }

    let survivors: Vec<usize> = (0..d.n_rows()).filter(|&i| keep[i]).collect();
    if survivors.len() <= 1 {
        return Ok(SelectionMask::new(keep, "drop3", Some(k)));
    }
    let sub = d.subset(&survivors)?;
    let pruned = prune(&sub, k)?;

    for (local, &orig) in survivors.iter().enumerate() {
        keep[orig] = pruned[local];
    }
    Ok(SelectionMask::new(keep, "drop3", Some(k)))
}

/// Stage 2 on the filtered dataset. Returns the keep vector in local indices.
fn prune(sub: &Dataset, k: usize) -> Result<Vec<bool>> {
    let n = sub.n_rows();
    let m = sub.n_features() as f64;
    let n_classes = sub.n_classes();

    // Neighbor lists of length k+1 (shorter only when the data runs out).
    let g = build_graph(sub, k + 1, BuildMethod::auto(n))?;
    let mut lists: Vec<Vec<(usize, f64)>> = (0..n).map(|i| g.neighbors(i).to_vec()).collect();
    let mut associates: Vec<Vec<usize>> = vec![Vec::new(); n];
    for t in 0..n {
        for &(j, _) in &lists[t] {
            associates[j].push(t);
        }
    }

    // Distance to the nearest enemy among the survivors, or None.
    let enemy_dist: Vec<Option<f64>> = (0..n)
        .map(|t| {
            let mut best: Option<f64> = None;
            for x in 0..n {
                if sub.label(x) == sub.label(t) {
                    continue;
                }
                let raw = raw_sq_dist(sub.row(t), sub.row(x));
                if best.map_or(true, |b| raw < b) {
                    best = Some(raw);
                }
            }
            best
        })
        .collect();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| match (enemy_dist[a], enemy_dist[b]) {
        (Some(da), Some(db)) => db.total_cmp(&da).then(a.cmp(&b)),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => a.cmp(&b),
    });

    let mut in_s = vec![true; n];
    let mut class_left = vec![0usize; n_classes];
    for i in 0..n {
        class_left[sub.label(i)] += 1;
    }

    // Votes over the first `k` entries of a list, optionally pretending one
    // member is absent. Returns true when the associate is classified right;
    // an empty vote set counts as wrong.
    let classify_ok = |a: usize, list: &[(usize, f64)], skip: Option<usize>| -> bool {
        let mut counts = vec![0usize; n_classes];
        let mut used = 0;
        for &(j, _) in list {
            if Some(j) == skip {
                continue;
            }
            counts[sub.label(j)] += 1;
            used += 1;
            if used == k {
                break;
            }
        }
        majority_class(&counts) == Some(sub.label(a))
    };

    for &p in &order {
        if class_left[sub.label(p)] <= 1 {
            continue;
        }
        let mut with = 0usize;
        let mut without = 0usize;
        for &a in &associates[p] {
            if classify_ok(a, &lists[a], None) {
                with += 1;
            }
            if classify_ok(a, &lists[a], Some(p)) {
                without += 1;
            }
        }
        if without < with {
            continue;
        }

        // Remove p and repair every list that contained it.
        in_s[p] = false;
        class_left[sub.label(p)] -= 1;
        let affected = std::mem::take(&mut associates[p]);
        for &a in &affected {
            let pos = lists[a].iter().position(|&(j, _)| j == p).expect("associate list");
            lists[a].remove(pos);
            // Next nearest survivor not already in the list.
            let mut best: Option<(f64, usize)> = None;
            for j in 0..n {
                if !in_s[j] || j == a || lists[a].iter().any(|&(e, _)| e == j) {
                    continue;
                }
                let raw = raw_sq_dist(sub.row(a), sub.row(j));
                if best.map_or(true, |(bd, bi)| raw < bd || (raw == bd && j < bi)) {
                    best = Some((raw, j));
                }
            }
            if let Some((raw, j)) = best {
                lists[a].push((j, raw / m));
                associates[j].push(a);
            }
        }
    }

    Ok(in_s)
}
