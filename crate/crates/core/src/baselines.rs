//! Comparison attacks. Each returns one score per attribute value; use
//! [`AttackResult::from_scores`] to get rankings and confidence scores.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::engine::{attack, AttackResult, VialParams};
use crate::error::{validation, Error, Result};
use crate::graph::SbaNetwork;
use crate::transition::{Shares, TransitionOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaselineKind {
    Random,
    CnSan,
    AaSan,
    RwwrSan,
    VialB,
}

impl BaselineKind {
    pub const ALL: [BaselineKind; 5] =
        [BaselineKind::Random, BaselineKind::CnSan, BaselineKind::AaSan, BaselineKind::RwwrSan, BaselineKind::VialB];

    pub fn name(self) -> &'static str {
        match self {
            BaselineKind::Random => "random",
            BaselineKind::CnSan => "cn-san",
            BaselineKind::AaSan => "aa-san",
            BaselineKind::RwwrSan => "rwwr-san",
            BaselineKind::VialB => "vial-b",
        }
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaselineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BaselineKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| validation(format!("unknown baseline `{s}`")))
    }
}

fn check_target(network: &SbaNetwork, target: usize) -> Result<()> {
    if target < network.n_social() {
        Ok(())
    } else {
        Err(Error::UnknownId { kind: "user", id: format!("#{target}") })
    }
}

/// Fraction of non-excluded users holding each value. Identical for every
/// target.
pub fn random_baseline(network: &SbaNetwork, excluded: &BTreeSet<usize>) -> Vec<f64> {
    let mut counts = vec![0.0; network.n_attribute()];
    let mut population = 0usize;
    for u in 0..network.n_social() {
        if excluded.contains(&u) {
            continue;
        }
        population += 1;
        for &a in network.attributes_of(u) {
            counts[a] += 1.0;
        }
    }
    if population > 0 {
        for c in counts.iter_mut() {
            *c /= population as f64;
        }
    }
    counts
}

/// Number of the target's friends holding each value.
pub fn cn_san(network: &SbaNetwork, target: usize) -> Result<Vec<f64>> {
    common_neighbor_scores(network, target, |_| 1.0)
}

/// Common friends weighted by 1/ln|Γ_u|, where Γ_u counts neighbors of every
/// kind. A friend with at most one neighbor contributes nothing.
pub fn aa_san(network: &SbaNetwork, target: usize) -> Result<Vec<f64>> {
    common_neighbor_scores(network, target, |u| {
        let deg = network.neighbor_count(u);
        if deg <= 1 {
            0.0
        } else {
            1.0 / (deg as f64).ln()
        }
    })
}

fn common_neighbor_scores(network: &SbaNetwork, target: usize, weight: impl Fn(usize) -> f64) -> Result<Vec<f64>> {
    check_target(network, target)?;
    let mut scores = vec![0.0; network.n_attribute()];
    for &u in network.social_adj().cols(target) {
        let w = weight(u);
        for &a in network.attributes_of(u) {
            scores[a] += w;
        }
    }
    Ok(scores)
}

/// Random walk with restart on the graph of users and attribute values
/// (social and attribute links only). Returns the walk's stationary
/// distribution: users first, then attribute values.
pub fn rwwr_distribution(
    network: &SbaNetwork,
    target: usize,
    restart: f64,
    epsilon: f64,
    max_iters: usize,
) -> Result<Vec<f64>> {
    check_target(network, target)?;
    if !(0.0..=1.0).contains(&restart) {
        return Err(validation(format!("restart must lie in [0, 1], got {restart}")));
    }
    if epsilon.is_nan() || epsilon <= 0.0 || max_iters == 0 {
        return Err(validation("epsilon must be positive and max_iters at least 1"));
    }
    let ns = network.n_social();
    let na = network.n_attribute();
    let user_out: Vec<f64> = (0..ns).map(|u| network.social_degree(u) + network.attribute_degree(u)).collect();
    let social = network.social_adj();
    let attr = network.attribute_adj();
    let attr_rev = network.attribute_rev();

    let mut p = vec![0.0; ns + na];
    p[target] = 1.0;
    let mut next = vec![0.0; ns + na];
    for _ in 0..max_iters {
        // users pull from friends and from the values they hold
        for x in 0..ns {
            let mut acc = if user_out[x] == 0.0 { p[x] } else { 0.0 };
            for (u, w) in social.row(x) {
                acc += p[u] * w / user_out[u];
            }
            for (a, w) in attr.row(x) {
                acc += p[ns + a] * w / network.value_degree(a);
            }
            next[x] = acc;
        }
        for a in 0..na {
            let mut acc = if network.value_degree(a) == 0.0 { p[ns + a] } else { 0.0 };
            for (u, w) in attr_rev.row(a) {
                acc += p[u] * w / user_out[u];
            }
            next[ns + a] = acc;
        }
        for v in next.iter_mut() {
            *v *= 1.0 - restart;
        }
        next[target] += restart;
        let diff: f64 = p.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut p, &mut next);
        if diff <= epsilon {
            break;
        }
    }
    Ok(p)
}

/// Stationary probability of each attribute node under a restarting walk
/// from the target.
pub fn rwwr_san(network: &SbaNetwork, target: usize, restart: f64, epsilon: f64, max_iters: usize) -> Result<Vec<f64>> {
    let mut p = rwwr_distribution(network, target, restart, epsilon, max_iters)?;
    Ok(p.split_off(network.n_social()))
}

/// The main attack run on a copy of the network without social links.
pub fn vial_b(
    network: &SbaNetwork,
    target: usize,
    shares: Shares,
    params: &VialParams,
    k: usize,
) -> Result<AttackResult> {
    check_target(network, target)?;
    let behavior_only = network.without_social_links();
    let op = TransitionOperator::new(&behavior_only, shares)?;
    attack(&behavior_only, &op, target, params, k)
}
