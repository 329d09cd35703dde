//! Paired and unpaired significance tests used by the benchmark reports.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::error::{Error, Result};

/// Outcome of Welch's unequal-variance t-test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WelchOutcome {
    pub t: f64,
    pub df: f64,
    /// P(observing this or larger t) under H0 — small when `a` beats `b`.
    pub p_one_sided_greater: f64,
    pub p_two_sided: f64,
}

/// Welch's t-test of mean(a) vs mean(b). Needs two values per side. With
/// zero variance on both sides the outcome degenerates to certainty (equal
/// means: p = 0.5/1.0, otherwise 0 or 1 by the sign of the difference).
pub fn welch_t(a: &[f64], b: &[f64]) -> Result<WelchOutcome> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::invalid("welch t-test needs at least 2 values per side"));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let ma = a.iter().sum::<f64>() / na;
    let mb = b.iter().sum::<f64>() / nb;
    let va = a.iter().map(|x| (x - ma).powi(2)).sum::<f64>() / (na - 1.0);
    let vb = b.iter().map(|x| (x - mb).powi(2)).sum::<f64>() / (nb - 1.0);
    let se2 = va / na + vb / nb;
    let diff = ma - mb;

    if se2 == 0.0 {
        let (t, p_greater, p_two) = if diff == 0.0 {
            (0.0, 0.5, 1.0)
        } else if diff > 0.0 {
            (f64::INFINITY, 0.0, 0.0)
        } else {
            (f64::NEG_INFINITY, 1.0, 0.0)
        };
        return Ok(WelchOutcome {
            t,
            df: na + nb - 2.0,
            p_one_sided_greater: p_greater,
            p_two_sided: p_two,
        });
    }

    let t = diff / se2.sqrt();
    let df = se2 * se2
        / ((va / na).powi(2) / (na - 1.0) + (vb / nb).powi(2) / (nb - 1.0));
    let dist = StudentsT::new(0.0, 1.0, df)
        .map_err(|e| Error::invalid(format!("t distribution: {e}")))?;
    let p_one_sided_greater = 1.0 - dist.cdf(t);
    let p_two_sided = 2.0 * (1.0 - dist.cdf(t.abs()));
    Ok(WelchOutcome {
        t,
        df,
        p_one_sided_greater,
        p_two_sided,
    })
}

/// Outcome of the Wilcoxon signed-rank test on paired samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonOutcome {
    /// Rank sum of the pairs where `a > b`.
    pub w_plus: f64,
    pub w_minus: f64,
    /// Pairs left after dropping zero differences.
    pub n_effective: usize,
    /// P(W+ at least as large) — small when `a` beats `b`.
    pub p_one_sided_greater: f64,
    pub p_two_sided: f64,
    /// True when the p-values come from the exact permutation distribution.
    pub exact: bool,
}

/// Exact permutation distribution up to this many non-zero pairs; beyond it
/// the normal approximation with tie correction and continuity correction.
const WILCOXON_EXACT_LIMIT: usize = 50;

/// Wilcoxon signed-rank test of paired samples (H1 for the one-sided value:
/// `a > b`). Zero differences are dropped; tied magnitudes get midranks. If
/// every pair is equal the result degenerates to p = 0.5/1.0.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<WilcoxonOutcome> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::invalid(
            "wilcoxon test needs non-empty paired samples of equal length",
        ));
    }
    let diffs: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| x - y)
        .filter(|d| *d != 0.0)
        .collect();
    let n = diffs.len();
    if n == 0 {
        return Ok(WilcoxonOutcome {
            w_plus: 0.0,
            w_minus: 0.0,
            n_effective: 0,
            p_one_sided_greater: 0.5,
            p_two_sided: 1.0,
            exact: true,
        });
    }

    // Midranks of |d|.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diffs[i].abs().total_cmp(&diffs[j].abs()));
    let mut ranks = vec![0.0f64; n];
    let mut tie_sizes: Vec<usize> = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && diffs[order[j + 1]].abs() == diffs[order[i]].abs() {
            j += 1;
        }
        let midrank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = midrank;
        }
        tie_sizes.push(j - i + 1);
        i = j + 1;
    }

    let w_plus: f64 = (0..n).filter(|&i| diffs[i] > 0.0).map(|i| ranks[i]).sum();
    let rank_total = n as f64 * (n as f64 + 1.0) / 2.0;
    let w_minus = rank_total - w_plus;

    let (p_ge, p_le, exact) = if n <= WILCOXON_EXACT_LIMIT {
        // Doubled midranks are integers, so the sign-flip distribution of
        // 2*W+ is an integer subset-sum count — exact even with ties.
        let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
        let total: usize = doubled.iter().sum();
        let mut counts = vec![0.0f64; total + 1];
        counts[0] = 1.0;
        let mut reach = 0usize;
        for &r in &doubled {
            reach += r;
            for s in (r..=reach).rev() {
                counts[s] += counts[s - r];
            }
        }
        let denom = 2f64.powi(n as i32);
        let obs = (2.0 * w_plus).round() as usize;
        let p_ge: f64 = counts[obs..].iter().sum::<f64>() / denom;
        let p_le: f64 = counts[..=obs].iter().sum::<f64>() / denom;
        (p_ge, p_le, true)
    } else {
        let nf = n as f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let tie_term: f64 = tie_sizes
            .iter()
            .map(|&t| {
                let t = t as f64;
                t * t * t - t
            })
            .sum::<f64>()
            / 48.0;
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term;
        if var <= 0.0 {
            (0.5, 0.5, false)
        } else {
            let sd = var.sqrt();
            let normal = Normal::new(0.0, 1.0).expect("unit normal");
            let p_ge = 1.0 - normal.cdf((w_plus - mean - 0.5) / sd);
            let p_le = normal.cdf((w_plus - mean + 0.5) / sd);
            (p_ge, p_le, false)
        }
    };

    Ok(WilcoxonOutcome {
        w_plus,
        w_minus,
        n_effective: n,
        p_one_sided_greater: p_ge,
        p_two_sided: (2.0 * p_ge.min(p_le)).min(1.0),
        exact,
    })
}

/// Which test to run in [`significance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    WelchT,
    Wilcoxon,
}

/// Three-way comparison verdict at a significance level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Better,
    Equal,
    Worse,
}

impl Verdict {
    pub fn symbol(&self) -> &'static str {
        match self {
            Verdict::Better => "+",
            Verdict::Equal => "=",
            Verdict::Worse => "-",
        }
    }
}

/// A significance decision with the numbers behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub kind: TestKind,
    pub statistic: f64,
    pub p_one_sided_greater: f64,
    pub p_two_sided: f64,
    pub alpha: f64,
    pub verdict: Verdict,
}

/// Compare `candidate` against `reference` values. The verdict is `Better`
/// when the one-sided test says candidate > reference at level `alpha`,
/// `Worse` for the opposite direction, `Equal` otherwise (including fully
/// degenerate data).
pub fn significance(
    candidate: &[f64],
    reference: &[f64],
    kind: TestKind,
    alpha: f64,
) -> Result<TestOutcome> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid("alpha must lie strictly between 0 and 1"));
    }
    let (statistic, p_greater, p_lesser, p_two) = match kind {
        TestKind::WelchT => {
            let o = welch_t(candidate, reference)?;
            (o.t, o.p_one_sided_greater, 1.0 - o.p_one_sided_greater, o.p_two_sided)
        }
        TestKind::Wilcoxon => {
            let o = wilcoxon_signed_rank(candidate, reference)?;
            let flipped = wilcoxon_signed_rank(reference, candidate)?;
            (
                o.w_plus,
                o.p_one_sided_greater,
                flipped.p_one_sided_greater,
                o.p_two_sided,
            )
        }
    };
    let verdict = if p_greater <= alpha {
        Verdict::Better
    } else if p_lesser <= alpha {
        Verdict::Worse
    } else {
        Verdict::Equal
    };
    Ok(TestOutcome {
        kind,
        statistic,
        p_one_sided_greater: p_greater,
        p_two_sided: p_two,
        alpha,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn welch_matches_hand_computed_example() {
        // means 3 and 6, variances 2.5 and 10, n = 5 each:
        // t = -3 / sqrt(2.5), df = 6.25 / 1.0625.
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let b = [2.0, 4.0, 6.0, 8.0, 10.0];
        let o = welch_t(&a, &b).unwrap();
        assert_relative_eq!(o.t, -3.0 / 2.5f64.sqrt(), max_relative = 1e-12);
        assert_relative_eq!(o.df, 6.25 / 1.0625, max_relative = 1e-12);
        assert!(o.p_one_sided_greater > 0.9);
        assert!(o.p_two_sided < 0.2);
    }

    #[test]
    fn welch_matches_published_reference_values() {
        // Classic paired-drug sleep data, unpaired Welch analysis:
        // t = -1.8608, df = 17.776, two-sided p = 0.0794.
        let g1 = [0.7, -1.6, -0.2, -1.2, -0.1, 3.4, 3.7, 0.8, 0.0, 2.0];
        let g2 = [1.9, 0.8, 1.1, 0.1, -0.1, 4.4, 5.5, 1.6, 4.6, 3.4];
        let o = welch_t(&g1, &g2).unwrap();
        assert_relative_eq!(o.t, -1.860813, max_relative = 1e-5);
        assert_relative_eq!(o.df, 17.77647, max_relative = 1e-5);
        assert_relative_eq!(o.p_two_sided, 0.0793941, max_relative = 1e-4);
    }

    #[test]
    fn welch_degenerate_zero_variance() {
        let o = welch_t(&[1.0, 1.0], &[1.0, 1.0]).unwrap();
        assert_eq!(o.t, 0.0);
        assert_eq!(o.p_two_sided, 1.0);
        let o = welch_t(&[2.0, 2.0], &[1.0, 1.0]).unwrap();
        assert_eq!(o.p_one_sided_greater, 0.0);
        assert!(welch_t(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn wilcoxon_exact_small_sample() {
        // Eight pairs, distinct differences, W+ = 3 (ranks 1 and 2 positive).
        // Exact: P(W+ <= 3) = 5/256, P(W+ >= 3) = 253/256,
        // two-sided = 10/256.
        let b = [0.0; 8];
        let a = [0.5, 1.5, -2.5, -3.5, -4.5, -5.5, -6.5, -7.5];
        let o = wilcoxon_signed_rank(&a, &b).unwrap();
        assert!(o.exact);
        assert_eq!(o.n_effective, 8);
        assert_relative_eq!(o.w_plus, 3.0);
        assert_relative_eq!(o.w_minus, 33.0);
        assert_relative_eq!(o.p_one_sided_greater, 253.0 / 256.0);
        assert_relative_eq!(o.p_two_sided, 10.0 / 256.0);
        // The flipped test sees W+ = 33 and the small tail.
        let f = wilcoxon_signed_rank(&b, &a).unwrap();
        assert_relative_eq!(f.p_one_sided_greater, 5.0 / 256.0);
        // 10/256 = 0.0390625 < 0.05: significant at the usual level,
        // matching the critical value W = 3 for n = 8.
        assert!(o.p_two_sided < 0.05);
    }

    #[test]
    fn wilcoxon_just_above_critical_value() {
        // W+ = 4 for n = 8 gives two-sided 14/256 = 0.0546875 > 0.05.
        let b = [0.0; 8];
        let a = [0.5, -1.5, 2.5, -3.5, -4.5, -5.5, -6.5, -7.5]; // ranks 1,3 positive
        let o = wilcoxon_signed_rank(&a, &b).unwrap();
        assert_relative_eq!(o.w_plus, 4.0);
        assert_relative_eq!(o.p_two_sided, 14.0 / 256.0);
        assert!(o.p_two_sided > 0.05);
    }

    #[test]
    fn wilcoxon_handles_ties_and_zeros() {
        // Zero differences are dropped; tied magnitudes share midranks.
        let a = [1.0, 1.0, 2.0, 3.0, 5.0];
        let b = [1.0, 2.0, 1.0, 1.0, 1.0];
        let o = wilcoxon_signed_rank(&a, &b).unwrap();
        assert_eq!(o.n_effective, 4);
        // |d| = 1, 1, 2, 4 -> midranks 1.5, 1.5, 3, 4; W+ = 1.5 + 3 + 4.
        assert_relative_eq!(o.w_plus, 8.5);
        assert!(o.exact);
        // All-zero differences degenerate cleanly.
        let o = wilcoxon_signed_rank(&[1.0, 2.0], &[1.0, 2.0]).unwrap();
        assert_eq!(o.n_effective, 0);
        assert_relative_eq!(o.p_two_sided, 1.0);
    }

    #[test]
    fn wilcoxon_normal_approximation_for_large_n() {
        // 60 pairs, alternating small/large positive differences plus a few
        // negatives: the approximation must land near the exact-style result.
        let a: Vec<f64> = (0..60).map(|i| f64::from(i % 7) + 0.5).collect();
        let b: Vec<f64> = (0..60).map(|i| if i % 9 == 0 { 10.0 } else { 0.0 }).collect();
        let o = wilcoxon_signed_rank(&a, &b).unwrap();
        assert!(!o.exact);
        assert!(o.p_one_sided_greater < 0.05, "{o:?}");
        assert!((0.0..=1.0).contains(&o.p_two_sided));
    }

    #[test]
    fn verdicts_at_alpha() {
        let better = significance(
            &[0.9, 0.91, 0.92, 0.93, 0.94],
            &[0.5, 0.51, 0.52, 0.53, 0.54],
            TestKind::WelchT,
            0.05,
        )
        .unwrap();
        assert_eq!(better.verdict, Verdict::Better);
        assert_eq!(better.verdict.symbol(), "+");

        let worse = significance(
            &[0.1, 0.11, 0.12, 0.13, 0.14],
            &[0.5, 0.51, 0.52, 0.53, 0.54],
            TestKind::WelchT,
            0.05,
        )
        .unwrap();
        assert_eq!(worse.verdict, Verdict::Worse);

        let equal = significance(
            &[0.5, 0.6, 0.4, 0.55, 0.45],
            &[0.5, 0.59, 0.41, 0.54, 0.46],
            TestKind::WelchT,
            0.05,
        )
        .unwrap();
        assert_eq!(equal.verdict, Verdict::Equal);

        // Fully degenerate paired data gives '='.
        let eq = significance(&[1.0, 1.0, 1.0], &[1.0, 1.0, 1.0], TestKind::Wilcoxon, 0.05)
            .unwrap();
        assert_eq!(eq.verdict, Verdict::Equal);
        assert!(significance(&[1.0, 2.0], &[1.0, 2.0], TestKind::WelchT, 0.0).is_err());
    }
}
