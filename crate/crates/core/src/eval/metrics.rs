//! Top-K Precision/Recall with fractional credit for tied scores.

use std::collections::BTreeSet;

use crate::error::{validation, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopKMetrics {
    pub precision: f64,
    /// `None` when the target has no true value to recall.
    pub recall: Option<f64>,
}

/// Harmonic mean of P and R; 0 when both are 0.
pub fn f_score(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

/// Expected number of true values among the top `k` when the order inside
/// each run of equal scores is uniformly random.
///
/// Runs entirely inside the cutoff count fully. The run straddling the
/// cutoff, of size g with s slots left, gives each member s/g of a slot.
pub fn expected_hits(scores: &[f64], truth: &BTreeSet<usize>, k: usize) -> f64 {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut hits = 0.0;
    let mut taken = 0;
    let mut i = 0;
    while i < order.len() && taken < k {
        let score = scores[order[i]];
        let mut j = i;
        while j < order.len() && scores[order[j]] == score {
            j += 1;
        }
        let group = j - i;
        let group_hits = order[i..j].iter().filter(|x| truth.contains(x)).count() as f64;
        let slots = (k - taken).min(group);
        hits += group_hits * slots as f64 / group as f64;
        taken += slots;
        i = j;
    }
    hits
}

/// Precision and recall of the top-`k` prediction over `scores`.
///
/// `truth` holds positions into `scores`. When fewer than `k` candidates
/// exist, all of them are predicted and precision divides by that count.
pub fn metrics_topk(scores: &[f64], truth: &BTreeSet<usize>, k: usize) -> Result<TopKMetrics> {
    if k == 0 {
        return Err(validation("K must be at least 1"));
    }
    if let Some(&bad) = truth.iter().find(|&&t| t >= scores.len()) {
        return Err(validation(format!("truth position {bad} outside {} candidates", scores.len())));
    }
    let predicted = k.min(scores.len());
    if predicted == 0 {
        return Ok(TopKMetrics { precision: 0.0, recall: None });
    }
    let hits = expected_hits(scores, truth, k);
    Ok(TopKMetrics {
        precision: hits / predicted as f64,
        recall: (!truth.is_empty()).then(|| hits / truth.len() as f64),
    })
}
