use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use vial_core::baselines::{aa_san, cn_san, random_baseline, rwwr_san, vial_b, BaselineKind};
use vial_core::eval::{run_trials, AttackKind, EvalConfig, SplitSpec, TargetSampling};
use vial_core::io::{load_network, NetworkPaths};
use vial_core::oracle::{verify_suite, SuiteConfig};
use vial_core::synth::{generate, AttributeTypeSpec, SynthConfig};
use vial_core::{attack as run_attack, snapshot, AttackResult, SbaNetwork, Shares, TransitionOperator, VialParams};

use crate::{AttackArgs, BuildArgs, EngineArgs, EvalArgs, SynthArgs, VerifyArgs};

pub fn parse_shares(s: &str) -> Result<Shares> {
    let shares = if let Some(tau) = s.strip_prefix("per-node:") {
        Shares::PerNode { tau: tau.trim().parse().with_context(|| format!("bad tau in `{s}`"))? }
    } else {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .with_context(|| format!("bad shares `{s}`"))?;
        let [social, behavior, attribute] = parts[..] else {
            bail!("shares need three comma-separated numbers or per-node:TAU, got `{s}`");
        };
        Shares::Global { social, behavior, attribute }
    };
    shares.validate()?;
    Ok(shares)
}

impl EngineArgs {
    fn params(&self) -> Result<VialParams> {
        let p = VialParams { alpha: self.alpha, epsilon: self.epsilon, max_iters: self.max_iters };
        p.validate()?;
        Ok(p)
    }
}

/// Integer with thousands separators.
pub fn grouped(n: usize) -> String {
    let digits = n.to_string();
    let mut out = String::new();
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(c);
    }
    out
}

fn counts(net: &SbaNetwork) -> String {
    let rows = [
        ("social nodes", net.n_social()),
        ("behavior nodes", net.n_behavior()),
        ("attribute nodes", net.n_attribute()),
        ("social links", net.social_link_count()),
        ("behavior links", net.behavior_link_count()),
        ("attribute links", net.attribute_link_count()),
    ];
    rows.iter().map(|(name, n)| format!("{name}: {}\n", grouped(*n))).collect()
}

pub fn build(args: BuildArgs) -> Result<ExitCode> {
    let base = args.dir.as_deref().map(NetworkPaths::in_dir);
    let pick = |given: Option<std::path::PathBuf>, from_dir: Option<&std::path::PathBuf>, name: &str| {
        given.or_else(|| from_dir.cloned()).ok_or_else(|| anyhow!("missing --{name} (or --dir)"))
    };
    let paths = NetworkPaths {
        social: pick(args.social, base.as_ref().map(|b| &b.social), "social")?,
        behavior: pick(args.behavior, base.as_ref().map(|b| &b.behavior), "behavior")?,
        attribute: pick(args.attribute, base.as_ref().map(|b| &b.attribute), "attribute")?,
        vocab: pick(args.vocab, base.as_ref().map(|b| &b.vocab), "vocab")?,
    };
    let (net, warnings) = load_network(&paths)?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    snapshot::save(&net, &args.out).with_context(|| format!("writing {}", args.out.display()))?;
    print!("{}", counts(&net));
    println!("snapshot: {}", args.out.display());
    Ok(ExitCode::SUCCESS)
}

fn load_snapshot(path: &Path) -> Result<SbaNetwork> {
    snapshot::load(path).with_context(|| format!("reading snapshot {}", path.display()))
}

/// Resolves a user id, suggesting the closest known ids when it is unknown.
pub fn resolve_user(net: &SbaNetwork, id: &str) -> Result<usize> {
    if let Ok(u) = net.user_index(id) {
        return Ok(u);
    }
    let mut near: Vec<(f64, &str)> =
        net.users().names().iter().map(|n| (strsim::jaro_winkler(id, n), n.as_str())).collect();
    near.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(b.1)));
    let names: Vec<&str> = near.iter().take(5).map(|(_, n)| *n).collect();
    if names.is_empty() {
        bail!("unknown user id `{id}`; the network has no users");
    }
    bail!("unknown user id `{id}`; nearest matches: {}", names.join(", "))
}

fn render_attack(net: &SbaNetwork, name: &str, target: &str, result: &AttackResult, iterative: bool) -> String {
    let vocab = net.vocab();
    let mut s = format!("attack: {name}\ntarget: {target}\n");
    if iterative {
        let _ = writeln!(s, "iterations: {}\nfinal error: {:.3e}", result.iterations_used, result.final_error);
    }
    for p in &result.predictions {
        let _ = writeln!(s, "{}:", vocab.type_name(p.ranking.attr_type));
        for (rank, r) in p.ranking.top.iter().enumerate() {
            let _ = writeln!(s, "  {}. {}\t{:.6}", rank + 1, vocab.value_name(r.value), r.score);
        }
        if let Some(b) = p.ranking.boundary.filter(|b| b.size > b.inside) {
            let _ = writeln!(s, "  ({} of {} values tied at {:.6} fall inside the cutoff)", b.inside, b.size, b.score);
        }
        match p.confidence {
            Some(c) => {
                let _ = writeln!(s, "  confidence: clusterness {:.6}, gap {:.6}", c.clusterness, c.gap);
            }
            None => s.push_str("  confidence: undefined (fewer than 2 values)\n"),
        }
    }
    if result.votes.iter().all(|&v| v == 0.0) {
        s.push_str("note: every score is zero; no reached user holds a value of these types");
        s.push_str(" (with alpha = 1 all capacity stays on the target)\n");
    }
    s
}

pub fn attack(args: AttackArgs) -> Result<ExitCode> {
    let net = load_snapshot(&args.snapshot)?;
    let target = resolve_user(&net, &args.target)?;
    let kind: AttackKind = args.attack.parse()?;
    let params = args.engine.params()?;
    let shares = parse_shares(&args.engine.shares)?;
    let own = net.attributes_of(target).len();
    if own > 0 {
        eprintln!("warning: target `{}` has {own} attribute links; they take part in the attack", args.target);
    }
    let vocab = net.vocab();
    let (result, iterative) = match kind {
        AttackKind::Vial => {
            let op = TransitionOperator::new(&net, shares)?;
            (run_attack(&net, &op, target, &params, args.k)?, true)
        }
        AttackKind::Baseline(BaselineKind::VialB) => (vial_b(&net, target, shares, &params, args.k)?, true),
        AttackKind::Baseline(b) => {
            let scores = match b {
                BaselineKind::Random => random_baseline(&net, &BTreeSet::from([target])),
                BaselineKind::CnSan => cn_san(&net, target)?,
                BaselineKind::AaSan => aa_san(&net, target)?,
                BaselineKind::RwwrSan => {
                    rwwr_san(&net, target, params.alpha, params.epsilon, params.iteration_cap(net.n_social()))?
                }
                BaselineKind::VialB => unreachable!(),
            };
            (AttackResult::from_scores(vocab, scores, args.k)?, false)
        }
    };
    print!("{}", render_attack(&net, kind.name(), &args.target, &result, iterative));
    if let Some(out) = &args.out {
        let mut tsv = String::from("attribute_type\tvalue\tscore\n");
        for a in 0..vocab.n_values() {
            let _ =
                writeln!(tsv, "{}\t{}\t{}", vocab.type_name(vocab.type_of(a)), vocab.value_name(a), result.votes[a]);
        }
        fs::write(out, tsv).with_context(|| format!("writing {}", out.display()))?;
    }
    Ok(ExitCode::SUCCESS)
}

pub fn eval(args: EvalArgs) -> Result<ExitCode> {
    let net = load_snapshot(&args.snapshot)?;
    let attacks: Vec<AttackKind> = if args.attacks.is_empty() {
        std::iter::once(AttackKind::Vial).chain(BaselineKind::ALL.iter().map(|&b| AttackKind::Baseline(b))).collect()
    } else {
        let mut seen = Vec::new();
        for a in &args.attacks {
            let kind: AttackKind = a.parse()?;
            if !seen.contains(&kind) {
                seen.push(kind);
            }
        }
        seen
    };
    let config = EvalConfig {
        params: args.engine.params()?,
        shares: parse_shares(&args.engine.shares)?,
        k_list: args.k.clone(),
        split: SplitSpec {
            per_value: args.per_value,
            min_behaviors: args.min_behaviors,
            trials: args.trials,
            rng_seed: args.seed,
            sampling: args.uniform.map_or(TargetSampling::PerValue, |count| TargetSampling::Uniform { count }),
        },
        threads: args.threads,
    };
    let report = run_trials(&net, &attacks, &config)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    fs::write(args.out.join("report.tsv"), report.to_tsv())?;
    let reference = attacks.contains(&AttackKind::Vial).then_some(AttackKind::Vial);
    if let Some(r) = reference {
        fs::write(args.out.join("gains.tsv"), report.gains_tsv(r))?;
    }
    print!("{}", report.to_table());
    for (trial, (raw, dedup)) in report.sample_counts.iter().enumerate() {
        println!("trial {trial}: {raw} sampled, {dedup} distinct targets");
    }
    for (kind, n) in &report.failures {
        println!("{kind}: {n} targets failed and were excluded");
    }
    if let Some(r) = reference {
        println!();
        print!("{}", report.gains_tsv(r));
    }
    Ok(ExitCode::SUCCESS)
}

pub fn verify(args: VerifyArgs) -> Result<ExitCode> {
    let config = SuiteConfig { seed: args.seed, networks: args.networks.max(1), ..Default::default() };
    let reports = verify_suite(&config)?;
    let mut ok = true;
    for r in &reports {
        println!("{r}");
        ok &= r.passed();
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

pub fn synth(args: SynthArgs) -> Result<ExitCode> {
    let per_block = (args.users / args.communities.max(1)).max(1) as f64;
    let config = SynthConfig {
        n_users: args.users,
        n_communities: args.communities,
        p_in: (args.degree_in / per_block).min(1.0),
        p_out: (args.degree_out / per_block).min(1.0),
        n_items: args.items,
        types: args.types.iter().map(|name| AttributeTypeSpec { name: name.clone(), n_values: args.values }).collect(),
        rho_a: args.rho_a,
        rho_b: args.rho_b,
        behaviors_per_user: args.behaviors,
        seed: args.seed,
    };
    let data = generate(&config)?;
    data.write(&args.out).with_context(|| format!("writing {}", args.out.display()))?;
    println!(
        "wrote {} users, {} social, {} behavior and {} attribute links to {}",
        grouped(config.n_users),
        grouped(data.social.len()),
        grouped(data.behavior.len()),
        grouped(data.values.iter().map(Vec::len).sum()),
        args.out.display()
    );
    Ok(ExitCode::SUCCESS)
}
