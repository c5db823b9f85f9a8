//! Dense reference implementations of the attack's closed forms.
//!
//! Nothing here calls into the sparse propagation code; the dividing matrix is
//! rebuilt entry by entry from the raw adjacency so that agreement with the
//! engine is meaningful.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{phase1, phase1_observed, Phase1Output, VialParams, VoteVector};
use crate::error::{Error, Result};
use crate::eval::metrics::metrics_topk;
use crate::graph::{AttributeVocabulary, NetworkBuilder, SbaNetwork};
use crate::transition::{materialize_dense, Shares, TransitionOperator, DENSE_CAP};

/// Largest candidate list accepted by [`brute_force_metrics`].
pub const BRUTE_FORCE_CAP: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub id: String,
    pub max_deviation: f64,
    pub tolerance: f64,
}

impl OracleReport {
    pub fn new(id: impl Into<String>, max_deviation: f64, tolerance: f64) -> Self {
        OracleReport { id: id.into(), max_deviation, tolerance }
    }

    pub fn passed(&self) -> bool {
        self.max_deviation <= self.tolerance
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{:.3e}\t{:.0e}\t{}",
            self.id,
            self.max_deviation,
            self.tolerance,
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

fn check_cap(network: &SbaNetwork) -> Result<()> {
    if network.n_social() > DENSE_CAP {
        return Err(Error::Size { what: "social node count", size: network.n_social(), cap: DENSE_CAP });
    }
    Ok(())
}

fn row_sum(weights: &[f64]) -> f64 {
    weights.iter().sum()
}

/// The social, behavior-sharing and attribute-sharing transition matrices,
/// each row-stochastic where the user has links of that class.
pub fn channel_matrices(network: &SbaNetwork) -> Result<[DMatrix<f64>; 3]> {
    check_cap(network)?;
    let n = network.n_social();
    let mut social = DMatrix::zeros(n, n);
    let mut behavior = DMatrix::zeros(n, n);
    let mut attribute = DMatrix::zeros(n, n);
    let social_adj = network.social_adj();
    for u in 0..n {
        let d = row_sum(social_adj.weights(u));
        for (&x, &w) in social_adj.cols(u).iter().zip(social_adj.weights(u)) {
            social[(u, x)] += w / d;
        }
    }
    for (adj, rev, out) in [
        (network.behavior_adj(), network.behavior_rev(), &mut behavior),
        (network.attribute_adj(), network.attribute_rev(), &mut attribute),
    ] {
        for u in 0..n {
            let d_u = row_sum(adj.weights(u));
            for (&hub, &w_uh) in adj.cols(u).iter().zip(adj.weights(u)) {
                let d_h = row_sum(rev.weights(hub));
                for (&x, &w_hx) in rev.cols(hub).iter().zip(rev.weights(hub)) {
                    out[(u, x)] += (w_uh / d_u) * (w_hx / d_h);
                }
            }
        }
    }
    Ok([social, behavior, attribute])
}

/// Dividing matrix built directly from its definition.
pub fn dense_dividing_matrix(network: &SbaNetwork, shares: Shares) -> Result<DMatrix<f64>> {
    shares.validate()?;
    let channels = channel_matrices(network)?;
    let n = network.n_social();
    let mut m = DMatrix::zeros(n, n);
    for u in 0..n {
        let degrees = [
            row_sum(network.social_adj().weights(u)),
            row_sum(network.behavior_adj().weights(u)),
            row_sum(network.attribute_adj().weights(u)),
        ];
        let w = match shares {
            Shares::Global { social, behavior, attribute } => [social, behavior, attribute],
            Shares::PerNode { tau } => degrees.map(|d| tau * d),
        };
        let total: f64 = (0..3).filter(|&c| degrees[c] > 0.0).map(|c| w[c]).sum();
        if total == 0.0 {
            m[(u, u)] = 1.0;
            continue;
        }
        for c in (0..3).filter(|&c| degrees[c] > 0.0) {
            for x in 0..n {
                m[(u, x)] += w[c] / total * channels[c][(u, x)];
            }
        }
    }
    Ok(m)
}

/// Converged Phase I votes from the direct solve of
/// `(I - (1 - alpha) M^T) x = alpha |V_s| e_target`.
pub fn closed_form_votes(network: &SbaNetwork, shares: Shares, target: usize, alpha: f64) -> Result<VoteVector> {
    let n = network.n_social();
    if target >= n {
        return Err(Error::UnknownId { kind: "user", id: format!("#{target}") });
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Precondition(format!("closed form needs alpha in (0, 1], got {alpha}")));
    }
    let m = dense_dividing_matrix(network, shares)?;
    let a = DMatrix::identity(n, n) - m.transpose() * (1.0 - alpha);
    let mut b = DVector::zeros(n);
    b[target] = alpha * n as f64;
    let x = a.lu().solve(&b).expect("diagonally dominant system is nonsingular");
    Ok(VoteVector { values: x.iter().copied().collect() })
}

/// Whether every user, item and attribute value lies in one component.
pub fn is_connected(network: &SbaNetwork) -> bool {
    let (n_s, n_b) = (network.n_social(), network.n_behavior());
    let total = n_s + n_b + network.n_attribute();
    if total == 0 {
        return true;
    }
    let mut seen = vec![false; total];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(node) = queue.pop_front() {
        let next: Vec<usize> = if node < n_s {
            let s = network.social_adj().cols(node).iter().copied();
            let b = network.behavior_adj().cols(node).iter().map(|&y| n_s + y);
            let a = network.attribute_adj().cols(node).iter().map(|&v| n_s + n_b + v);
            s.chain(b).chain(a).collect()
        } else if node < n_s + n_b {
            network.behavior_rev().cols(node - n_s).to_vec()
        } else {
            network.attribute_rev().cols(node - n_s - n_b).to_vec()
        };
        for x in next {
            if !seen[x] {
                seen[x] = true;
                queue.push_back(x);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Stationary distribution of the chain with transition matrix M, by dense
/// power iteration from a point mass to an L1 step of 1e-12.
///
/// Fails on disconnected networks and when the iteration does not settle,
/// which is what a periodic chain does.
pub fn stationary_distribution(network: &SbaNetwork, shares: Shares) -> Result<Vec<f64>> {
    const TOL: f64 = 1e-12;
    const MAX_ITERS: usize = 200_000;
    if !is_connected(network) {
        return Err(Error::Precondition("stationary distribution needs a connected network".into()));
    }
    let n = network.n_social();
    if n == 0 {
        return Err(Error::Precondition("network has no users".into()));
    }
    let mt = dense_dividing_matrix(network, shares)?.transpose();
    let mut pi = DVector::zeros(n);
    pi[0] = 1.0;
    for _ in 0..MAX_ITERS {
        let next = &mt * &pi;
        let step = (&next - &pi).lp_norm(1);
        pi = next;
        if step <= TOL {
            let sum = pi.sum();
            return Ok(pi.iter().map(|p| p / sum).collect());
        }
    }
    Err(Error::Precondition(format!(
        "power iteration did not converge in {MAX_ITERS} steps; the chain may be periodic"
    )))
}

/// Compares the alpha = 0 Phase I limit under per-node shares with
/// `|V_s| d_u / D`, where D sums the total degree of every user.
pub fn corollary_check(network: &SbaNetwork, tau: f64, target: usize) -> Result<OracleReport> {
    corollary_check_with(network, tau, target, &phase1)
}

fn corollary_check_with(network: &SbaNetwork, tau: f64, target: usize, engine: &Phase1Fn) -> Result<OracleReport> {
    if !is_connected(network) {
        return Err(Error::Precondition("degree-proportional check needs a connected network".into()));
    }
    let n = network.n_social();
    let op = TransitionOperator::new(network, Shares::PerNode { tau })?;
    let out = engine(&op, target, &limit_params(0.0))?;
    let degrees: Vec<f64> = (0..n)
        .map(|u| {
            row_sum(network.social_adj().weights(u))
                + row_sum(network.behavior_adj().weights(u))
                + row_sum(network.attribute_adj().weights(u))
        })
        .collect();
    let d_total: f64 = degrees.iter().sum();
    let dev = degrees
        .iter()
        .zip(&out.votes.values)
        .map(|(d, s)| {
            let expected = n as f64 * d / d_total;
            (s - expected).abs() / expected
        })
        .fold(0.0, f64::max);
    Ok(OracleReport::new("degree-proportional-limit", dev, 1e-8))
}

/// Exact mean precision and recall over every ordering of the tied groups.
pub fn brute_force_metrics(scores: &[f64], truth: &BTreeSet<usize>, k: usize) -> Result<(f64, Option<f64>)> {
    if scores.len() > BRUTE_FORCE_CAP {
        return Err(Error::Size { what: "candidate count", size: scores.len(), cap: BRUTE_FORCE_CAP });
    }
    if k == 0 {
        return Err(Error::Validation("K must be at least 1".into()));
    }
    let mut distinct: Vec<f64> = scores.to_vec();
    distinct.sort_by(|a, b| b.total_cmp(a));
    distinct.dedup();
    let groups: Vec<Vec<usize>> =
        distinct.iter().map(|&s| (0..scores.len()).filter(|&i| scores[i] == s).collect()).collect();
    let per_group: Vec<Vec<Vec<usize>>> =
        groups.iter().map(|g| g.iter().copied().permutations(g.len()).collect()).collect();
    let predicted = k.min(scores.len());
    let mut orderings = 0usize;
    let mut hit_sum = 0usize;
    for combo in per_group.into_iter().multi_cartesian_product() {
        let order: Vec<usize> = combo.into_iter().flatten().collect();
        hit_sum += order[..predicted].iter().filter(|i| truth.contains(i)).count();
        orderings += 1;
    }
    if orderings == 0 {
        return Ok((0.0, None));
    }
    let hits = hit_sum as f64 / orderings as f64;
    Ok((hits / predicted as f64, (!truth.is_empty()).then(|| hits / truth.len() as f64)))
}

/// Signature of a Phase I implementation under test.
pub type Phase1Fn = dyn Fn(&TransitionOperator<'_>, usize, &VialParams) -> Result<Phase1Output>;

fn limit_params(alpha: f64) -> VialParams {
    VialParams { alpha, epsilon: 1e-14, max_iters: Some(200_000) }
}

/// Seeded random SBA network with `n_users` users and every link class.
///
/// Connected fixtures hang every user off an earlier one through a social
/// link or a shared item, and give every user at least one item so the chain
/// is aperiodic. Otherwise about a tenth of the users are left isolated.
pub fn random_fixture(rng: &mut impl Rng, n_users: usize, weighted: bool, connected: bool) -> SbaNetwork {
    let vocab = AttributeVocabulary::from_pairs(&[
        ("c0", "city"),
        ("c1", "city"),
        ("c2", "city"),
        ("c3", "city"),
        ("m0", "major"),
        ("m1", "major"),
        ("m2", "major"),
    ])
    .expect("static vocabulary");
    let values: Vec<String> = vocab.values().names().to_vec();
    let weight = |rng: &mut dyn rand::RngCore| if weighted { rng.random_range(0.5..2.0) } else { 1.0 };
    let mut b = NetworkBuilder::new(vocab);
    let user = |i: usize| format!("u{i}");
    let n_items = (n_users / 3).max(2);
    for i in 0..n_users {
        b.add_user(&user(i)).expect("valid id");
        let isolated = !connected && i > 0 && rng.random_bool(0.1);
        if isolated {
            continue;
        }
        if i > 0 {
            let parent = rng.random_range(0..i);
            if rng.random_bool(0.7) {
                let w = weight(rng);
                b.add_social(&user(i), &user(parent), w).expect("valid link");
            } else {
                let item = format!("t{i}");
                let (w1, w2) = (weight(rng), weight(rng));
                b.add_behavior(&user(i), &item, w1).expect("valid link");
                b.add_behavior(&user(parent), &item, w2).expect("valid link");
            }
            if rng.random_bool(0.5) {
                let other = rng.random_range(0..i);
                let w = weight(rng);
                b.add_social(&user(i), &user(other), w).expect("valid link");
            }
        }
        for _ in 0..rng.random_range(1..=3) {
            let item = format!("i{}", rng.random_range(0..n_items));
            let w = weight(rng);
            b.add_behavior(&user(i), &item, w).expect("valid link");
        }
        for _ in 0..rng.random_range(0..=2) {
            let value = &values[rng.random_range(0..values.len())];
            let w = weight(rng);
            b.add_attribute(&user(i), value, w).expect("valid link");
        }
    }
    b.build()
}

/// Seeded metrics fixture: up to 8 candidates with scores drawn from a small
/// set so that ties are frequent.
pub fn random_metrics_fixture(rng: &mut impl Rng) -> (Vec<f64>, BTreeSet<usize>, usize) {
    let n = rng.random_range(1..=8);
    let levels = rng.random_range(1..=3);
    let scores: Vec<f64> = (0..n).map(|_| rng.random_range(0..levels) as f64 * 0.25).collect();
    let truth: BTreeSet<usize> = (0..n).filter(|_| rng.random_bool(0.3)).collect();
    let k = rng.random_range(1..=n + 1);
    (scores, truth, k)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub networks: usize,
    pub min_users: usize,
    pub max_users: usize,
    pub alphas: Vec<f64>,
    /// Connected networks used for the alpha = 0 checks.
    pub limit_networks: usize,
    pub limit_targets: usize,
    pub operator_pairs: usize,
    pub metric_fixtures: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 7,
            networks: 50,
            min_users: 20,
            max_users: 200,
            alphas: vec![0.05, 0.1, 0.5, 1.0],
            limit_networks: 10,
            limit_targets: 5,
            operator_pairs: 100,
            metric_fixtures: 200,
        }
    }
}

fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Runs every oracle check with the library's Phase I.
pub fn verify_suite(config: &SuiteConfig) -> Result<Vec<OracleReport>> {
    verify_suite_with(config, &phase1)
}

/// Runs every oracle check against the given Phase I implementation.
pub fn verify_suite_with(config: &SuiteConfig, engine: &Phase1Fn) -> Result<Vec<OracleReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let shares = Shares::equal();
    let nets: Vec<SbaNetwork> = (0..config.networks)
        .map(|i| {
            let n = rng.random_range(config.min_users..=config.max_users);
            random_fixture(&mut rng, n, true, i % 2 == 0)
        })
        .collect();

    let mut closed_form = 0.0f64;
    let mut conserve_iter = 0.0f64;
    let mut conserve_closed = 0.0f64;
    for net in &nets {
        let n = net.n_social() as f64;
        let op = TransitionOperator::new(net, shares)?;
        let target = rng.random_range(0..net.n_social());
        for &alpha in &config.alphas {
            let expected = closed_form_votes(net, shares, target, alpha)?;
            conserve_closed = conserve_closed.max((expected.total() - n).abs() / n);
            let got = engine(&op, target, &limit_params(alpha))?;
            closed_form = closed_form.max(linf(&got.votes.values, &expected.values));
        }
        let params = VialParams { alpha: 0.1, epsilon: 1e-14, max_iters: Some(100) };
        phase1_observed(&op, target, &params, |_, s| {
            conserve_iter = conserve_iter.max((s.iter().sum::<f64>() - n).abs() / n);
        })?;
    }

    let mut stochastic = 0.0f64;
    let mut channel = 0.0f64;
    let mut matrix = 0.0f64;
    for net in &nets {
        let m = materialize_dense(net, shares, DENSE_CAP)?;
        for u in 0..net.n_social() {
            if !net.is_isolated(u) {
                stochastic = stochastic.max((m.row(u).sum() - 1.0).abs());
            }
        }
        for c in channel_matrices(net)? {
            for u in 0..net.n_social() {
                let sum = c.row(u).sum();
                if sum != 0.0 {
                    channel = channel.max((sum - 1.0).abs());
                }
            }
        }
        matrix = matrix.max((&m - dense_dividing_matrix(net, shares)?).amax());
    }

    let mut operator = 0.0f64;
    for i in 0..config.operator_pairs {
        let net = &nets[i % nets.len()];
        let share = if i % 3 == 2 {
            Shares::PerNode { tau: rng.random_range(0.1..10.0) }
        } else {
            let w: [f64; 3] = [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0), rng.random_range(0.1..1.0)];
            Shares::Global { social: w[0], behavior: w[1], attribute: w[2] }
        };
        let op = TransitionOperator::new(net, share)?;
        let s: Vec<f64> = (0..net.n_social()).map(|_| rng.random_range(0.0..1.0)).collect();
        let dense = dense_dividing_matrix(net, share)?.transpose() * DVector::from_vec(s.clone());
        operator = operator.max(linf(&op.apply_transpose(&s)?, dense.as_slice()));
    }

    let mut stationary = 0.0f64;
    let mut independence = 0.0f64;
    let mut degree_limit = 0.0f64;
    for net in nets.iter().filter(|n| is_connected(n)).take(config.limit_networks) {
        let n = net.n_social();
        let pi = stationary_distribution(net, shares)?;
        let expected: Vec<f64> = pi.iter().map(|p| p * n as f64).collect();
        let op = TransitionOperator::new(net, shares)?;
        let targets: Vec<usize> =
            (0..config.limit_targets.min(n)).map(|j| j * n / config.limit_targets.min(n)).collect();
        let votes = targets
            .iter()
            .map(|&v| engine(&op, v, &limit_params(0.0)).map(|o| o.votes.values))
            .collect::<Result<Vec<_>>>()?;
        for (i, a) in votes.iter().enumerate() {
            stationary = stationary.max(linf(a, &expected));
            for b in &votes[i + 1..] {
                independence = independence.max(linf(a, b));
            }
        }
        let tau = rng.random_range(0.1..10.0);
        let target = rng.random_range(0..n);
        degree_limit = degree_limit.max(corollary_check_with(net, tau, target, engine)?.max_deviation);
    }

    let mut metrics = 0.0f64;
    for _ in 0..config.metric_fixtures {
        let (scores, truth, k) = random_metrics_fixture(&mut rng);
        let got = metrics_topk(&scores, &truth, k)?;
        let (p, r) = brute_force_metrics(&scores, &truth, k)?;
        let dr = match (got.recall, r) {
            (Some(a), Some(b)) => (a - b).abs(),
            (None, None) => 0.0,
            _ => f64::INFINITY,
        };
        metrics = metrics.max((got.precision - p).abs()).max(dr);
    }

    Ok(vec![
        OracleReport::new("closed-form-votes", closed_form, 1e-8),
        OracleReport::new("stationary-limit", stationary, 1e-6),
        OracleReport::new("target-independence", independence, 1e-6),
        OracleReport::new("degree-proportional-limit", degree_limit, 1e-8),
        OracleReport::new("conservation-iterative", conserve_iter, 1e-8),
        OracleReport::new("conservation-closed-form", conserve_closed, 1e-10),
        OracleReport::new("row-stochastic", stochastic, 1e-10),
        OracleReport::new("channel-sums", channel, 1e-10),
        OracleReport::new("dividing-matrix", matrix, 1e-12),
        OracleReport::new("factored-operator", operator, 1e-12),
        OracleReport::new("metrics", metrics, 1e-12),
    ])
}
