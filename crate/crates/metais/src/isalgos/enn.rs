//! Edited nearest neighbor filtering: drop every instance whose k nearest
//! neighbors vote for a different class. A single pass over the original
//! dataset; votes of all k neighbors count equally and ties go to the
//! smallest class id.

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::nng::{build_graph, BuildMethod};

use super::{majority_class, SelectionMask};

pub fn enn(d: &Dataset, k: usize) -> Result<SelectionMask> {
    Ok(SelectionMask::new(enn_keep(d, k)?, "enn", Some(k)))
}

/// The raw keep vector, shared with the algorithms that use this filter as a
/// first stage.
pub(crate) fn enn_keep(d: &Dataset, k: usize) -> Result<Vec<bool>> {
    if k == 0 {
        return Err(Error::invalid("enn requires k >= 1"));
    }
    if d.n_rows() <= k {
        return Err(Error::invalid(format!(
            "enn with k = {} needs more than {} rows",
            k,
            d.n_rows()
        )));
    }
    let g = build_graph(d, k, BuildMethod::auto(d.n_rows()))?;
    let mut keep = Vec::with_capacity(d.n_rows());
    for i in 0..d.n_rows() {
        let mut counts = vec![0usize; d.n_classes()];
        for &(j, _) in g.neighbors(i) {
            counts[d.label(j)] += 1;
        }
        keep.push(majority_class(&counts) == Some(d.label(i)));
    }
    Ok(keep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Dataset;
    use crate::isalgos::testutil::two_clusters;

    #[test]
    fn clean_clusters_keep_everything() {
        let d = two_clusters();
        let m = enn(&d, 3).unwrap();
        assert_eq!(m.kept_count(), 10);
        assert_eq!(m.reduction_rate(), 0.0);
    }

    #[test]
    fn isolated_noise_point_is_removed() {
        // Class b point planted in the middle of the a cluster.
        let xs = vec![0.0, 1.0, 2.0, 1.5, 10.0, 11.0, 12.0];
        let labels = vec![0, 0, 0, 1, 1, 1, 1];
        let d = Dataset::new(
            "noisy",
            xs,
            7,
            1,
            labels,
            vec!["x".into()],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        let m = enn(&d, 3).unwrap();
        assert!(!m.keep()[3], "planted point removed");
        assert!(m.keep()[0] && m.keep()[1] && m.keep()[2]);
        assert!(m.keep()[4] && m.keep()[5] && m.keep()[6]);
    }

    #[test]
    fn vote_ties_prefer_smaller_class_id() {
        // Query 0 has two a-neighbors and two b-neighbors at symmetric spots;
        // with k=4 the vote is 2:2 and class 0 wins the tie.
        let xs = vec![0.0, -1.0, 1.0, -2.0, 2.0];
        let labels = vec![0, 0, 1, 1, 0];
        let d = Dataset::new(
            "tie",
            xs,
            5,
            1,
            labels,
            vec!["x".into()],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        let m = enn(&d, 4).unwrap();
        assert!(m.keep()[0]);
    }

    #[test]
    fn preconditions() {
        let d = two_clusters();
        assert!(enn(&d, 0).is_err());
        assert!(enn(&d, 10).is_err()); // k = n
        assert!(enn(&d, 9).is_ok());
    }
}
