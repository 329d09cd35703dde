//! Hit-miss network editing, iterated while the training accuracy holds up.
//!
//! The hit-miss network has, for every instance `x` and every class with a
//! member other than `x`, one edge from `x` to its nearest neighbor in that
//! class. For a node `v`, `hit(v)` counts incoming edges from instances of
//! `v`'s own class and `miss(v)` counts the rest.
//!
//! One editing pass applies four rules on the current retained set:
//! 1. flag `x` for removal when `miss(x) > 0` and `miss(x) >= hit(x)`;
//! 2. if a class would keep fewer than 4 instances, unflag its flagged
//!    members with `hit > 0`;
//! 3. with more than 3 classes present, unflag `x` when `miss(x) < c / 2`
//!    (`c` = number of classes present);
//! 4. unflag `x` when `hit(x) >= |class of x| / 4`.
//!
//! Passes repeat until nothing is removed or the 1-nearest-neighbor accuracy
//! over the original instances would drop; the set before the drop is kept.

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::nng::raw_sq_dist;

use super::{nn1_accuracy_against, SelectionMask};

pub fn hmnei(d: &Dataset) -> Result<SelectionMask> {
    let present = d.class_counts().iter().filter(|&&c| c > 0).count();
    if present < 2 {
        // A single class has no misses; nothing can ever be flagged.
        return Ok(SelectionMask::new(
            vec![true; d.n_rows()],
            "hmnei",
            None,
        ));
    }
    if d.n_rows() < present + 1 {
        return Err(Error::invalid(format!(
            "hmnei needs more rows ({}) than classes ({})",
            d.n_rows(),
            present
        )));
    }

    let mut retained = vec![true; d.n_rows()];
    let mut accuracy = nn1_accuracy_against(d, &retained);

    loop {
        let next = edit_pass(d, &retained);
        let n_next = next.iter().filter(|&&b| b).count();
        if n_next == 0 || next == retained {
            break;
        }
        let acc_next = nn1_accuracy_against(d, &next);
        if acc_next < accuracy {
            break;
        }
        retained = next;
        accuracy = acc_next;
    }

    Ok(SelectionMask::new(retained, "hmnei", None))
}

/// One hit-miss editing pass over the rows with `retained[i]`.
fn edit_pass(d: &Dataset, retained: &[bool]) -> Vec<bool> {
    let n = d.n_rows();
    let n_classes = d.n_classes();

    let mut class_size = vec![0usize; n_classes];
    for i in 0..n {
        if retained[i] {
            class_size[d.label(i)] += 1;
        }
    }
    let classes_present = class_size.iter().filter(|&&c| c > 0).count();

    let mut hit = vec![0usize; n];
    let mut miss = vec![0usize; n];
    for x in 0..n {
        if !retained[x] {
            continue;
        }
        for class in 0..n_classes {
            let mut best: Option<(f64, usize)> = None;
            for v in 0..n {
                if !retained[v] || v == x || d.label(v) != class {
                    continue;
                }
                let raw = raw_sq_dist(d.row(x), d.row(v));
                if best.map_or(true, |(bd, bi)| raw < bd || (raw == bd && v < bi)) {
                    best = Some((raw, v));
                }
            }
            if let Some((_, v)) = best {
                if d.label(x) == class {
                    hit[v] += 1;
                } else {
                    miss[v] += 1;
                }
            }
        }
    }

    let mut flagged: Vec<bool> = (0..n)
        .map(|x| retained[x] && miss[x] > 0 && miss[x] >= hit[x])
        .collect();

    // Rule 2: preserve small classes.
    for class in 0..n_classes {
        if class_size[class] == 0 {
            continue;
        }
        let flagged_count = (0..n)
            .filter(|&x| flagged[x] && d.label(x) == class)
            .count();
        if class_size[class] - flagged_count < 4 {
            for x in 0..n {
                if flagged[x] && d.label(x) == class && hit[x] > 0 {
                    flagged[x] = false;
                }
            }
        }
    }

    // Rule 3: with many classes, tolerate a few misses.
    if classes_present > 3 {
        let half = classes_present as f64 / 2.0;
        for x in 0..n {
            if flagged[x] && (miss[x] as f64) < half {
                flagged[x] = false;
            }
        }
    }

    // Rule 4: keep instances that answer for a good share of their class.
    for x in 0..n {
        if flagged[x] && hit[x] as f64 >= class_size[d.label(x)] as f64 / 4.0 {
            flagged[x] = false;
        }
    }

    (0..n).map(|x| retained[x] && !flagged[x]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Dataset;
    use crate::isalgos::testutil::two_clusters;

    #[test]
    fn xor_corners_are_all_kept() {
        // Two classes on opposite corners of the unit square: every point is
        // initially flagged or protecting, and rule 2 restores the rest.
        let d = Dataset::new(
            "xor",
            vec![0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 0.0, 1.0],
            4,
            2,
            vec![0, 0, 1, 1],
            vec!["x".into(), "y".into()],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        let mask = hmnei(&d).unwrap();
        assert_eq!(mask.kept_count(), 4);
    }

    #[test]
    fn single_class_keeps_everything() {
        let d = Dataset::new(
            "mono",
            (0..6).map(f64::from).collect(),
            6,
            1,
            vec![0; 6],
            vec!["x".into()],
            vec!["only".into()],
        )
        .unwrap();
        let mask = hmnei(&d).unwrap();
        assert_eq!(mask.kept_count(), 6);
        assert_eq!(mask.k(), None);
    }

    #[test]
    fn reduces_clean_clusters_without_breaking_them() {
        // Larger clusters so rule 2's small-class floor is not the whole story.
        let xs: Vec<f64> = (0..12).map(f64::from).chain((20..32).map(f64::from)).collect();
        let labels: Vec<usize> = std::iter::repeat(0)
            .take(12)
            .chain(std::iter::repeat(1).take(12))
            .collect();
        let d = Dataset::new(
            "wide",
            xs,
            24,
            1,
            labels,
            vec!["x".into()],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        let mask = hmnei(&d).unwrap();
        assert!(mask.kept_count() < 24, "some editing happens");
        let kept: Vec<usize> = mask.kept_indices().iter().map(|&i| d.label(i)).collect();
        assert!(kept.contains(&0) && kept.contains(&1));
        // Editing must not hurt training-set accuracy.
        let acc_full = nn1_accuracy_against(&d, &vec![true; 24]);
        let acc_kept = nn1_accuracy_against(&d, mask.keep());
        assert!(acc_kept >= acc_full);
    }

    #[test]
    fn deterministic() {
        let d = two_clusters();
        assert_eq!(hmnei(&d).unwrap(), hmnei(&d).unwrap());
    }
}
