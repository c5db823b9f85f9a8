//! Confidence scores computed from one target's votes over the candidate
//! values of a single attribute type.

use crate::error::{Error, Result};

/// Splits the votes into two clusters with the optimal 1-D 2-means
/// partition and returns the gap between the cluster means.
///
/// In one dimension an optimal 2-means partition is a prefix/suffix split of
/// the sorted values, so scanning every boundary with prefix sums is exact.
pub fn clusterness(votes: &[f64]) -> Result<f64> {
    if votes.len() < 2 {
        return Err(Error::ConfidenceUndefined(votes.len()));
    }
    let mut sorted = votes.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mut prefix = Vec::with_capacity(n + 1);
    let mut prefix_sq = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    prefix_sq.push(0.0);
    for &v in &sorted {
        prefix.push(prefix.last().unwrap() + v);
        prefix_sq.push(prefix_sq.last().unwrap() + v * v);
    }
    let sse = |lo: usize, hi: usize| {
        let k = (hi - lo) as f64;
        let s = prefix[hi] - prefix[lo];
        (prefix_sq[hi] - prefix_sq[lo] - s * s / k).max(0.0)
    };

    let mut best = (f64::INFINITY, 1);
    for split in 1..n {
        let cost = sse(0, split) + sse(split, n);
        if cost < best.0 {
            best = (cost, split);
        }
    }
    let split = best.1;
    let low = (prefix[split] - prefix[0]) / split as f64;
    let high = (prefix[n] - prefix[split]) / (n - split) as f64;
    Ok((high - low).max(0.0))
}

/// Top-1 vote minus top-2 vote.
pub fn gap_statistic(votes: &[f64]) -> Result<f64> {
    if votes.len() < 2 {
        return Err(Error::ConfidenceUndefined(votes.len()));
    }
    let (mut first, mut second) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &v in votes {
        if v > first {
            second = first;
            first = v;
        } else if v > second {
            second = v;
        }
    }
    Ok(first - second)
}
