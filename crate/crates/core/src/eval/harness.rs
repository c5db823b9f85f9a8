//! Test-user sampling and multi-trial evaluation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::metrics::{f_score, metrics_topk, TopKMetrics};
use super::report::{EvalReport, MetricRow};
use crate::baselines::{aa_san, cn_san, random_baseline, rwwr_san, BaselineKind};
use crate::engine::{confidence_for_type, phase1, phase2, Confidence, VialParams};
use crate::error::{validation, Error, Result};
use crate::graph::SbaNetwork;
use crate::transition::{Shares, TransitionOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AttackKind {
    Vial,
    Baseline(BaselineKind),
}

impl AttackKind {
    pub fn name(self) -> &'static str {
        match self {
            AttackKind::Vial => "vial",
            AttackKind::Baseline(b) => b.name(),
        }
    }
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AttackKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "vial" {
            Ok(AttackKind::Vial)
        } else {
            s.parse().map(AttackKind::Baseline)
        }
    }
}

/// How targets are drawn in each trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TargetSampling {
    /// Up to `per_value` holders of every attribute value.
    PerValue,
    /// `count` users drawn uniformly from everyone eligible.
    Uniform { count: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitSpec {
    pub per_value: usize,
    pub min_behaviors: usize,
    pub trials: usize,
    pub rng_seed: u64,
    pub sampling: TargetSampling,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec { per_value: 5, min_behaviors: 5, trials: 10, rng_seed: 0, sampling: TargetSampling::PerValue }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        if self.per_value == 0 || self.trials == 0 {
            return Err(validation("per_value and trials must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TestSample {
    pub users: BTreeSet<usize>,
    /// Sampled slots before removing users drawn for several values.
    pub raw_count: usize,
    pub warnings: Vec<String>,
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn eligible(network: &SbaNetwork, u: usize, min_behaviors: usize) -> bool {
    network.behavior_adj().degree(u) >= min_behaviors
}

pub fn sample_test_users(network: &SbaNetwork, spec: &SplitSpec, trial: usize) -> Result<TestSample> {
    spec.validate()?;
    let mut rng = trial_rng(spec.rng_seed, trial);
    let mut sample = TestSample::default();
    match spec.sampling {
        TargetSampling::PerValue => {
            for a in 0..network.n_attribute() {
                let pool: Vec<usize> = network
                    .attribute_rev()
                    .cols(a)
                    .iter()
                    .copied()
                    .filter(|&u| eligible(network, u, spec.min_behaviors))
                    .collect();
                if pool.is_empty() {
                    sample.warnings.push(format!("value `{}` has no eligible users", network.vocab().value_name(a)));
                    continue;
                }
                let take = spec.per_value.min(pool.len());
                for i in index::sample(&mut rng, pool.len(), take) {
                    sample.users.insert(pool[i]);
                }
                sample.raw_count += take;
            }
        }
        TargetSampling::Uniform { count } => {
            let pool: Vec<usize> = (0..network.n_social())
                .filter(|&u| network.attribute_adj().degree(u) > 0 && eligible(network, u, spec.min_behaviors))
                .collect();
            let take = count.min(pool.len());
            if take < count {
                sample.warnings.push(format!("only {take} eligible users for {count} requested"));
            }
            sample.users.extend(index::sample(&mut rng, pool.len(), take).into_iter().map(|i| pool[i]));
            sample.raw_count = take;
        }
    }
    Ok(sample)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub params: VialParams,
    pub shares: Shares,
    pub k_list: Vec<usize>,
    pub split: SplitSpec,
    /// Worker threads for per-target attacks; `None` uses all cores.
    pub threads: Option<usize>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            params: VialParams::default(),
            shares: Shares::equal(),
            k_list: vec![1, 2, 3],
            split: SplitSpec::default(),
            threads: None,
        }
    }
}

/// Per-target, per-type evaluation record.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetOutcome {
    pub trial: usize,
    pub attack: AttackKind,
    pub target: usize,
    pub attr_type: usize,
    pub confidence: Option<Confidence>,
    /// One entry per K in the config's `k_list`.
    pub metrics: Vec<TopKMetrics>,
}

/// Everything an attack needs for one trial, built once and shared by all
/// targets.
struct Prepared<'a> {
    network: &'a SbaNetwork,
    vial: Option<TransitionOperator<'a>>,
    vial_b: Option<TransitionOperator<'a>>,
    random: Option<Vec<f64>>,
    params: VialParams,
}

impl Prepared<'_> {
    fn scores(&self, kind: AttackKind, target: usize) -> Result<Vec<f64>> {
        let p = &self.params;
        match kind {
            AttackKind::Vial | AttackKind::Baseline(BaselineKind::VialB) => {
                let op = if kind == AttackKind::Vial { &self.vial } else { &self.vial_b };
                let op = op.as_ref().expect("operator prepared");
                let p1 = phase1(op, target, p)?;
                phase2(op.network(), &p1.votes)
            }
            AttackKind::Baseline(BaselineKind::Random) => Ok(self.random.clone().expect("random prepared")),
            AttackKind::Baseline(BaselineKind::CnSan) => cn_san(self.network, target),
            AttackKind::Baseline(BaselineKind::AaSan) => aa_san(self.network, target),
            AttackKind::Baseline(BaselineKind::RwwrSan) => {
                let iters = p.iteration_cap(self.network.n_social());
                rwwr_san(self.network, target, p.alpha, p.epsilon, iters)
            }
        }
    }
}

/// Attribute type, confidence and per-K metrics for one target.
type TypeOutcome = (usize, Option<Confidence>, Vec<TopKMetrics>);

fn evaluate_target(
    prepared: &Prepared<'_>,
    kind: AttackKind,
    target: usize,
    truth: &[usize],
    k_list: &[usize],
) -> Result<Vec<TypeOutcome>> {
    let scores = prepared.scores(kind, target)?;
    let vocab = prepared.network.vocab();
    let mut out = Vec::new();
    for t in 0..vocab.n_types() {
        let candidates = vocab.values_of_type(t);
        let truth_pos: BTreeSet<usize> =
            candidates.iter().enumerate().filter(|(_, v)| truth.contains(v)).map(|(i, _)| i).collect();
        if truth_pos.is_empty() {
            continue;
        }
        let type_scores: Vec<f64> = candidates.iter().map(|&v| scores[v]).collect();
        let metrics = k_list.iter().map(|&k| metrics_topk(&type_scores, &truth_pos, k)).collect::<Result<Vec<_>>>()?;
        out.push((t, confidence_for_type(&scores, vocab, t), metrics));
    }
    Ok(out)
}

/// Runs every attack over `split.trials` trials and averages the metrics,
/// first over targets within a trial and then over trials.
pub fn run_trials(network: &SbaNetwork, attacks: &[AttackKind], config: &EvalConfig) -> Result<EvalReport> {
    config.split.validate()?;
    config.params.validate()?;
    config.shares.validate()?;
    if config.k_list.is_empty() || config.k_list.contains(&0) {
        return Err(validation("K list must be non-empty with every K at least 1"));
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = config.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| validation(format!("thread pool: {e}")))?;

    let mut outcomes = Vec::new();
    let mut failures: BTreeMap<AttackKind, usize> = BTreeMap::new();
    let mut sample_counts = Vec::new();
    let mut warnings = Vec::new();

    for trial in 0..config.split.trials {
        let sample = sample_test_users(network, &config.split, trial)?;
        sample_counts.push((sample.raw_count, sample.users.len()));
        warnings.extend(sample.warnings.iter().map(|w| format!("trial {trial}: {w}")));
        let (stripped, truth) = network.remove_attribute_links(&sample.users);
        let social_free =
            attacks.contains(&AttackKind::Baseline(BaselineKind::VialB)).then(|| stripped.without_social_links());
        let prepared = Prepared {
            network: &stripped,
            vial: if attacks.contains(&AttackKind::Vial) {
                Some(TransitionOperator::new(&stripped, config.shares)?)
            } else {
                None
            },
            vial_b: match &social_free {
                Some(net) => Some(TransitionOperator::new(net, config.shares)?),
                None => None,
            },
            random: attacks
                .contains(&AttackKind::Baseline(BaselineKind::Random))
                .then(|| random_baseline(&stripped, &sample.users)),
            params: config.params,
        };
        let targets: Vec<usize> = sample.users.iter().copied().collect();
        for &kind in attacks {
            let results: Vec<_> = pool.install(|| {
                targets.par_iter().map(|&v| evaluate_target(&prepared, kind, v, &truth[&v], &config.k_list)).collect()
            });
            for (&target, result) in targets.iter().zip(results) {
                match result {
                    Ok(per_type) => {
                        for (attr_type, confidence, metrics) in per_type {
                            outcomes.push(TargetOutcome {
                                trial,
                                attack: kind,
                                target,
                                attr_type,
                                confidence,
                                metrics,
                            });
                        }
                    }
                    Err(_) => *failures.entry(kind).or_default() += 1,
                }
            }
        }
    }

    let rows = aggregate(network, attacks, config, &outcomes);
    Ok(EvalReport {
        attacks: attacks.to_vec(),
        type_names: network.vocab().type_names().to_vec(),
        k_list: config.k_list.clone(),
        trials: config.split.trials,
        rows,
        outcomes,
        sample_counts,
        failures: failures.into_iter().collect(),
        warnings,
    })
}

fn aggregate(
    network: &SbaNetwork,
    attacks: &[AttackKind],
    config: &EvalConfig,
    outcomes: &[TargetOutcome],
) -> Vec<MetricRow> {
    let vocab = network.vocab();
    let mut rows = Vec::new();
    for &kind in attacks {
        for t in 0..vocab.n_types() {
            for (ki, &k) in config.k_list.iter().enumerate() {
                let mut trial_p = Vec::new();
                let mut trial_r = Vec::new();
                let mut n_targets = 0;
                for trial in 0..config.split.trials {
                    let here: Vec<&TopKMetrics> = outcomes
                        .iter()
                        .filter(|o| o.attack == kind && o.attr_type == t && o.trial == trial)
                        .map(|o| &o.metrics[ki])
                        .collect();
                    if here.is_empty() {
                        continue;
                    }
                    n_targets += here.len();
                    trial_p.push(mean(here.iter().map(|m| m.precision)));
                    trial_r.push(mean(here.iter().filter_map(|m| m.recall)));
                }
                let precision = mean(trial_p.iter().copied());
                let recall = mean(trial_r.iter().copied());
                rows.push(MetricRow {
                    attack: kind,
                    attr_type: vocab.type_name(t).to_owned(),
                    k,
                    precision,
                    recall,
                    fscore: f_score(precision, recall),
                    n_targets,
                    trials: trial_p.len(),
                });
            }
        }
    }
    rows
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_network;

    fn two_groups() -> SbaNetwork {
        // Two cliques, each user holding the group's major, with 2 items each.
        let mut social = Vec::new();
        let mut behavior = Vec::new();
        let mut attribute = Vec::new();
        let users: Vec<String> = (0..12).map(|i| format!("u{i}")).collect();
        let items = ["i0", "i1", "i2", "i3"];
        for i in 0..12 {
            let g = i / 6;
            for j in (i + 1)..12 {
                if j / 6 == g {
                    social.push((users[i].as_str(), users[j].as_str(), None));
                }
            }
            behavior.push((users[i].as_str(), items[2 * g], None));
            behavior.push((users[i].as_str(), items[2 * g + 1], None));
            attribute.push((users[i].as_str(), if g == 0 { "CS" } else { "Bio" }, None));
        }
        build_network(&social, &behavior, &attribute, &[("CS", "major"), ("Bio", "major"), ("Law", "major")]).unwrap()
    }

    fn spec(per_value: usize, trials: usize) -> SplitSpec {
        SplitSpec { per_value, min_behaviors: 2, trials, rng_seed: 42, sampling: TargetSampling::PerValue }
    }

    #[test]
    fn undersupplied_value_takes_everyone() {
        let net = two_groups();
        let s = sample_test_users(&net, &spec(10, 1), 0).unwrap();
        assert_eq!(s.users.len(), 12);
        assert_eq!(s.raw_count, 12);
        assert_eq!(s.warnings.len(), 1, "Law has no holders");
    }

    #[test]
    fn sampling_is_deterministic() {
        let net = two_groups();
        let a = sample_test_users(&net, &spec(2, 3), 1).unwrap();
        let b = sample_test_users(&net, &spec(2, 3), 1).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.users.len(), 4);
    }

    #[test]
    fn min_behaviors_filters() {
        let net = two_groups();
        let mut sp = spec(5, 1);
        sp.min_behaviors = 3;
        let s = sample_test_users(&net, &sp, 0).unwrap();
        assert!(s.users.is_empty());
    }

    #[test]
    fn uniform_sampling() {
        let net = two_groups();
        let mut sp = spec(1, 1);
        sp.sampling = TargetSampling::Uniform { count: 5 };
        let s = sample_test_users(&net, &sp, 0).unwrap();
        assert_eq!(s.users.len(), 5);
    }

    #[test]
    fn perfect_attack_scores_one() {
        let net = two_groups();
        let config = EvalConfig {
            params: VialParams { alpha: 0.3, epsilon: 1e-10, max_iters: Some(100) },
            k_list: vec![1],
            split: spec(1, 1),
            threads: Some(2),
            ..Default::default()
        };
        let report = run_trials(&net, &[AttackKind::Vial, AttackKind::Baseline(BaselineKind::CnSan)], &config).unwrap();
        for row in &report.rows {
            assert_eq!((row.precision, row.recall, row.fscore), (1.0, 1.0, 1.0), "{row:?}");
            assert_eq!(row.n_targets, 2);
        }
        assert!(report.failures.is_empty());
    }

    #[test]
    fn run_is_deterministic() {
        let net = two_groups();
        let config = EvalConfig { split: spec(2, 2), threads: Some(3), ..Default::default() };
        let attacks: Vec<AttackKind> =
            ["vial", "random", "aa-san", "rwwr-san", "vial-b"].iter().map(|s| s.parse().unwrap()).collect();
        let a = run_trials(&net, &attacks, &config).unwrap();
        let b = run_trials(&net, &attacks, &config).unwrap();
        assert_eq!(a.to_tsv(), b.to_tsv());
        assert_eq!(a.outcomes, b.outcomes);
    }

    #[test]
    fn rejects_bad_k() {
        let net = two_groups();
        let config = EvalConfig { k_list: vec![0], ..Default::default() };
        assert!(run_trials(&net, &[AttackKind::Vial], &config).is_err());
    }
}
