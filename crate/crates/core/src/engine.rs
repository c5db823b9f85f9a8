//! Two-phase vote distribution attack for one targeted user.
//!
//! Phase I spreads a vote capacity of |V_s| from the target over the social
//! nodes with `s ← α·e_v + (1−α)·Mᵀs`. Phase II lets every user split its
//! capacity over its attribute values in proportion to link weight.

use crate::confidence::{clusterness, gap_statistic};
use crate::error::{validation, Error, Result};
use crate::graph::{AttributeVocabulary, SbaNetwork};
use crate::transition::TransitionOperator;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VialParams {
    /// Backtracking strength.
    pub alpha: f64,
    /// Stop once the L1 change per capita drops to this.
    pub epsilon: f64,
    /// Iteration cap; `None` means ⌊log₂|V_s|⌋.
    pub max_iters: Option<usize>,
}

impl Default for VialParams {
    fn default() -> Self {
        VialParams { alpha: 0.1, epsilon: 1e-6, max_iters: None }
    }
}

impl VialParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(validation(format!("alpha must lie in [0, 1], got {}", self.alpha)));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(validation(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.max_iters == Some(0) {
            return Err(validation("max_iters must be at least 1"));
        }
        Ok(())
    }

    pub fn iteration_cap(&self, n_social: usize) -> usize {
        self.max_iters.unwrap_or_else(|| default_iteration_cap(n_social))
    }
}

pub fn default_iteration_cap(n_social: usize) -> usize {
    if n_social < 2 {
        1
    } else {
        (usize::BITS - 1 - n_social.leading_zeros()) as usize
    }
}

/// Vote capacity per social node.
#[derive(Debug, Clone, PartialEq)]
pub struct VoteVector {
    pub values: Vec<f64>,
}

impl VoteVector {
    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Phase1Output {
    pub votes: VoteVector,
    pub iterations: usize,
    pub final_error: f64,
}

pub fn phase1(op: &TransitionOperator<'_>, target: usize, params: &VialParams) -> Result<Phase1Output> {
    phase1_observed(op, target, params, |_, _| {})
}

/// Phase I, calling `observe(i, s_i)` after every iteration.
pub fn phase1_observed(
    op: &TransitionOperator<'_>,
    target: usize,
    params: &VialParams,
    mut observe: impl FnMut(usize, &[f64]),
) -> Result<Phase1Output> {
    params.validate()?;
    let n = op.dim();
    if target >= n {
        return Err(Error::UnknownId { kind: "user", id: format!("#{target}") });
    }
    let capacity = n as f64;
    let cap = params.iteration_cap(n);
    let keep = 1.0 - params.alpha;

    let mut s = vec![0.0; n];
    s[target] = capacity;
    let mut next = vec![0.0; n];
    let mut scratch = op.scratch();
    let mut iterations = 0;
    let mut error = f64::INFINITY;
    while iterations < cap {
        op.apply_transpose_into(&s, &mut next, &mut scratch)?;
        for x in next.iter_mut() {
            *x *= keep;
        }
        next[target] += params.alpha * capacity;
        error = s.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum::<f64>() / capacity;
        std::mem::swap(&mut s, &mut next);
        iterations += 1;
        observe(iterations, &s);
        if error <= params.epsilon {
            break;
        }
    }
    Ok(Phase1Output { votes: VoteVector { values: s }, iterations, final_error: error })
}

/// Votes per attribute value: each user divides its capacity among its
/// attribute values in proportion to link weight.
pub fn phase2(network: &SbaNetwork, s: &VoteVector) -> Result<Vec<f64>> {
    if s.values.len() != network.n_social() {
        return Err(Error::Dimension { expected: network.n_social(), got: s.values.len() });
    }
    let rev = network.attribute_rev();
    Ok((0..network.n_attribute())
        .map(|a| rev.row(a).map(|(u, w)| s.values[u] * w / network.attribute_degree(u)).sum())
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankedValue {
    pub value: usize,
    pub score: f64,
}

/// The run of equal scores that contains the K-th ranked value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TieGroup {
    pub score: f64,
    pub size: usize,
    /// How many members of the group fall inside the top K.
    pub inside: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    pub attr_type: usize,
    pub top: Vec<RankedValue>,
    pub boundary: Option<TieGroup>,
}

/// Candidates of one type ordered by descending score, ties by value index.
pub fn rank_type(scores: &[f64], vocab: &AttributeVocabulary, attr_type: usize) -> Vec<RankedValue> {
    let mut ranked: Vec<RankedValue> =
        vocab.values_of_type(attr_type).iter().map(|&value| RankedValue { value, score: scores[value] }).collect();
    ranked.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.value.cmp(&b.value)));
    ranked
}

pub fn predict_topk(scores: &[f64], vocab: &AttributeVocabulary, attr_type: &str, k: usize) -> Result<Ranking> {
    let t = vocab
        .type_index(attr_type)
        .ok_or_else(|| Error::Vocabulary(format!("unknown attribute type `{attr_type}`")))?;
    topk_for_type(scores, vocab, t, k)
}

pub(crate) fn topk_for_type(scores: &[f64], vocab: &AttributeVocabulary, t: usize, k: usize) -> Result<Ranking> {
    if k == 0 {
        return Err(validation("K must be at least 1"));
    }
    if scores.len() != vocab.n_values() {
        return Err(Error::Dimension { expected: vocab.n_values(), got: scores.len() });
    }
    let ranked = rank_type(scores, vocab, t);
    let cut = k.min(ranked.len());
    let boundary = (cut > 0).then(|| {
        let score = ranked[cut - 1].score;
        let size = ranked.iter().filter(|r| r.score == score).count();
        let inside = ranked[..cut].iter().filter(|r| r.score == score).count();
        TieGroup { score, size, inside }
    });
    Ok(Ranking { attr_type: t, top: ranked[..cut].to_vec(), boundary })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Confidence {
    pub clusterness: f64,
    pub gap: f64,
}

/// Both confidence scores over the candidates of one type, or `None` when
/// the type has fewer than two values.
pub fn confidence_for_type(scores: &[f64], vocab: &AttributeVocabulary, t: usize) -> Option<Confidence> {
    let votes: Vec<f64> = vocab.values_of_type(t).iter().map(|&v| scores[v]).collect();
    match (clusterness(&votes), gap_statistic(&votes)) {
        (Ok(clusterness), Ok(gap)) => Some(Confidence { clusterness, gap }),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypePrediction {
    pub ranking: Ranking,
    pub confidence: Option<Confidence>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttackResult {
    /// Score per attribute value.
    pub votes: Vec<f64>,
    /// One entry per attribute type, in vocabulary type order.
    pub predictions: Vec<TypePrediction>,
    pub iterations_used: usize,
    pub final_error: f64,
}

impl AttackResult {
    pub fn from_scores(vocab: &AttributeVocabulary, votes: Vec<f64>, k: usize) -> Result<Self> {
        let predictions = (0..vocab.n_types())
            .map(|t| {
                Ok(TypePrediction {
                    ranking: topk_for_type(&votes, vocab, t, k)?,
                    confidence: confidence_for_type(&votes, vocab, t),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(AttackResult { votes, predictions, iterations_used: 0, final_error: 0.0 })
    }
}

/// Phase I, Phase II and per-type top-K for one target.
pub fn attack(
    network: &SbaNetwork,
    op: &TransitionOperator<'_>,
    target: usize,
    params: &VialParams,
    k: usize,
) -> Result<AttackResult> {
    if network.n_social() != op.dim() {
        return Err(Error::Dimension { expected: network.n_social(), got: op.dim() });
    }
    let p1 = phase1(op, target, params)?;
    let votes = phase2(network, &p1.votes)?;
    let mut result = AttackResult::from_scores(network.vocab(), votes, k)?;
    result.iterations_used = p1.iterations;
    result.final_error = p1.final_error;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_network, fixtures, AttributeVocabulary, NetworkBuilder};
    use crate::transition::Shares;
    use std::collections::BTreeSet;

    #[test]
    fn default_cap_is_floor_log2() {
        assert_eq!(default_iteration_cap(1), 1);
        assert_eq!(default_iteration_cap(2), 1);
        assert_eq!(default_iteration_cap(1_111_905), 20);
        assert_eq!(default_iteration_cap(10_000), 13);
    }

    #[test]
    fn params_validation() {
        assert!(VialParams { alpha: 1.5, ..Default::default() }.validate().is_err());
        assert!(VialParams { epsilon: 0.0, ..Default::default() }.validate().is_err());
        assert!(VialParams { max_iters: Some(0), ..Default::default() }.validate().is_err());
    }

    #[test]
    fn alpha_one_returns_unit_capacity() {
        let net = fixtures::sab();
        let op = TransitionOperator::new(&net, Shares::equal()).unwrap();
        let params = VialParams { alpha: 1.0, epsilon: 1e-12, max_iters: Some(50) };
        let out = phase1(&op, 2, &params).unwrap();
        let mut expect = vec![0.0; net.n_social()];
        expect[2] = net.n_social() as f64;
        assert_eq!(out.votes.values, expect);
        assert_eq!(out.iterations, 1);
    }

    #[test]
    fn single_user_network() {
        let mut b = NetworkBuilder::new(AttributeVocabulary::default());
        b.add_user("solo").unwrap();
        let net = b.build();
        let op = TransitionOperator::new(&net, Shares::equal()).unwrap();
        let params = VialParams { alpha: 0.1, epsilon: 1e-9, max_iters: Some(10) };
        let mut seen = Vec::new();
        let out = phase1_observed(&op, 0, &params, |_, s| seen.push(s.to_vec())).unwrap();
        assert!(seen.iter().all(|s| s == &vec![1.0]));
        assert_eq!(out.votes.values, vec![1.0]);
    }

    #[test]
    fn phase2_worked_example() {
        let net =
            build_network(&[], &[], &[("p", "a", None), ("p", "b", None), ("q", "a", None)], &[("a", "t"), ("b", "t")])
                .unwrap();
        let t = phase2(&net, &VoteVector { values: vec![2.0, 1.0] }).unwrap();
        assert_eq!(t, vec![2.0, 1.0]);
    }

    #[test]
    fn phase2_without_attributes_is_zero() {
        let net = build_network(&[("p", "q", None)], &[], &[], &[("a", "t"), ("b", "t")]).unwrap();
        assert_eq!(phase2(&net, &VoteVector { values: vec![1.0, 1.0] }).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn phase2_scale_equivariance() {
        let base = |w: f64| {
            build_network(
                &[],
                &[],
                &[("p", "a", Some(1.0 * w)), ("p", "b", Some(3.0 * w)), ("q", "a", None)],
                &[("a", "t"), ("b", "t")],
            )
            .unwrap()
        };
        let s = VoteVector { values: vec![5.0, 2.0] };
        let one = phase2(&base(1.0), &s).unwrap();
        let scaled = phase2(&base(7.5), &s).unwrap();
        for (a, b) in one.iter().zip(&scaled) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    fn majors() -> AttributeVocabulary {
        AttributeVocabulary::from_pairs(&[("CS", "major"), ("Bio", "major"), ("Paris", "city"), ("Rome", "city")])
            .unwrap()
    }

    #[test]
    fn topk_strict_order() {
        let vocab = majors();
        let r = predict_topk(&[2.0, 1.0, 9.0, 0.0], &vocab, "major", 1).unwrap();
        assert_eq!(r.top, vec![RankedValue { value: 0, score: 2.0 }]);
        assert_eq!(r.boundary, Some(TieGroup { score: 2.0, size: 1, inside: 1 }));
    }

    #[test]
    fn topk_all_ties() {
        let vocab = majors();
        let r = predict_topk(&[0.0; 4], &vocab, "city", 2).unwrap();
        assert_eq!(r.top.iter().map(|v| v.value).collect::<Vec<_>>(), vec![2, 3]);
        assert_eq!(r.boundary.unwrap().size, 2);
        let r = predict_topk(&[0.0; 4], &vocab, "major", 1).unwrap();
        assert_eq!(r.top[0].value, 0);
        assert_eq!(r.boundary, Some(TieGroup { score: 0.0, size: 2, inside: 1 }));
    }

    #[test]
    fn topk_filters_type() {
        let vocab = majors();
        let r = predict_topk(&[1.0, 2.0, 3.0, 4.0], &vocab, "major", 5).unwrap();
        assert!(r.top.iter().all(|v| vocab.type_of(v.value) == 0));
        assert_eq!(r.top.len(), 2);
        assert!(matches!(predict_topk(&[0.0; 4], &vocab, "employer", 1), Err(Error::Vocabulary(_))));
        assert!(predict_topk(&[0.0; 4], &vocab, "major", 0).is_err());
    }

    #[test]
    fn attack_on_sab_prefers_shared_behavior_value() {
        // u5 shares app3 with u2, who holds a1; a2 holders are two hops
        // further away through u6 and app4.
        let net = fixtures::sab();
        let u5 = net.user_index("u5").unwrap();
        let (stripped, truth) = net.remove_attribute_links(&BTreeSet::from([u5]));
        let op = TransitionOperator::new(&stripped, Shares::equal()).unwrap();
        let params = VialParams { alpha: 0.1, epsilon: 1e-12, max_iters: Some(500) };
        let result = attack(&stripped, &op, u5, &params, 3).unwrap();
        let a1 = net.vocab().value_index("a1").unwrap();
        let a2 = net.vocab().value_index("a2").unwrap();
        assert_eq!(truth[&u5], vec![a1]);
        assert!(result.votes[a1] > result.votes[a2], "{:?}", result.votes);
        assert_eq!(result.predictions[0].ranking.top[0].value, a1);
        let total: f64 = result.votes.iter().sum();
        let holders: f64 = {
            let p1 = phase1(&op, u5, &params).unwrap();
            (0..stripped.n_social()).filter(|&u| stripped.attribute_degree(u) > 0.0).map(|u| p1.votes.values[u]).sum()
        };
        assert!((total - holders).abs() <= 1e-10 * holders);
    }

    #[test]
    fn attack_alpha_one_is_all_zero() {
        let net = fixtures::sab();
        let u5 = net.user_index("u5").unwrap();
        let (stripped, _) = net.remove_attribute_links(&BTreeSet::from([u5]));
        let op = TransitionOperator::new(&stripped, Shares::equal()).unwrap();
        let params = VialParams { alpha: 1.0, ..Default::default() };
        let result = attack(&stripped, &op, u5, &params, 1).unwrap();
        assert!(result.votes.iter().all(|&v| v == 0.0));
        let c = result.predictions[0].confidence.unwrap();
        assert_eq!((c.clusterness, c.gap), (0.0, 0.0));
    }

    #[test]
    fn mirrored_targets_give_mirrored_votes() {
        // l1 - hub - r1, each side holding its own value.
        let net = build_network(
            &[("l1", "hub", None), ("hub", "r1", None), ("l1", "l2", None), ("r1", "r2", None)],
            &[("l1", "x", None), ("l2", "x", None), ("r1", "y", None), ("r2", "y", None)],
            &[("l2", "L", None), ("r2", "R", None), ("hub", "H", None)],
            &[("L", "side"), ("R", "side"), ("H", "side")],
        )
        .unwrap();
        let op = TransitionOperator::new(&net, Shares::equal()).unwrap();
        let params = VialParams { alpha: 0.2, epsilon: 1e-13, max_iters: Some(1000) };
        let l = attack(&net, &op, net.user_index("l1").unwrap(), &params, 1).unwrap();
        let r = attack(&net, &op, net.user_index("r1").unwrap(), &params, 1).unwrap();
        let (vl, vr, vh) = (0, 1, 2);
        assert!((l.votes[vl] - r.votes[vr]).abs() < 1e-9);
        assert!((l.votes[vr] - r.votes[vl]).abs() < 1e-9);
        assert!((l.votes[vh] - r.votes[vh]).abs() < 1e-9);
        assert_eq!(l.predictions[0].ranking.top[0].value, vl);
        assert_eq!(r.predictions[0].ranking.top[0].value, vr);
    }
}
