//! Pairwise clustering quality.

use crate::discovery::ClusterResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("partitions cover {predicted} and {truth} entities")]
pub struct UniverseMismatch {
    pub predicted: usize,
    pub truth: usize,
}

/// Pair counts over all unordered entity pairs and the derived rates.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PairMetrics {
    pub precision: f64,
    pub recall: f64,
    pub accuracy: f64,
    /// Together in both partitions.
    pub true_together: u64,
    /// Apart in both partitions.
    pub true_apart: u64,
    pub predicted_together: u64,
    pub truth_together: u64,
    pub pairs: u64,
}

/// Precision, recall and accuracy of `predicted` against `truth`.
///
/// A ratio whose denominator is zero is reported as 1.
pub fn pair_metrics(predicted: &ClusterResult, truth: &ClusterResult) -> Result<PairMetrics, UniverseMismatch> {
    let m = truth.entity_count();
    if predicted.entity_count() != m {
        return Err(UniverseMismatch {
            predicted: predicted.entity_count(),
            truth: m,
        });
    }
    let (p, t) = (predicted.labels(), truth.labels());
    let (mut tt, mut ta, mut pt, mut gt) = (0u64, 0u64, 0u64, 0u64);
    for i in 0..m {
        for j in i + 1..m {
            let (sp, st) = (p[i] == p[j], t[i] == t[j]);
            pt += sp as u64;
            gt += st as u64;
            tt += (sp && st) as u64;
            ta += (!sp && !st) as u64;
        }
    }
    let pairs = (m * m.saturating_sub(1) / 2) as u64;
    let ratio = |a: u64, b: u64| if b == 0 { 1.0 } else { a as f64 / b as f64 };
    Ok(PairMetrics {
        precision: ratio(tt, pt),
        recall: ratio(tt, gt),
        accuracy: ratio(tt + ta, pairs),
        true_together: tt,
        true_apart: ta,
        predicted_together: pt,
        truth_together: gt,
        pairs,
    })
}
