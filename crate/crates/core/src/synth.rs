//! Planted-attribute networks from a stochastic block model.
//!
//! User `i` belongs to community `i % n_communities`. Social links follow a
//! block model with separate within- and between-community probabilities.
//! Community `c` owns value `c` of every attribute type: its members hold it
//! with probability `rho_a` and otherwise hold a uniformly chosen other
//! value. Items are split into one pool per community; each behavior comes
//! from the user's own pool with probability `rho_b` and from the other
//! pools otherwise. All weights are 1.

use std::collections::BTreeSet;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{validation, Result};
use crate::graph::{AttributeVocabulary, NetworkBuilder, SbaNetwork};
use crate::io::{write_edges, NetworkPaths};

#[derive(Debug, Clone, PartialEq)]
pub struct AttributeTypeSpec {
    pub name: String,
    pub n_values: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub n_users: usize,
    pub n_communities: usize,
    pub p_in: f64,
    pub p_out: f64,
    pub n_items: usize,
    pub types: Vec<AttributeTypeSpec>,
    pub rho_a: f64,
    pub rho_b: f64,
    pub behaviors_per_user: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_users: 1000,
            n_communities: 2,
            p_in: 0.004,
            p_out: 0.0004,
            n_items: 2000,
            types: ["major", "city"]
                .into_iter()
                .map(|name| AttributeTypeSpec { name: name.to_owned(), n_values: 20 })
                .collect(),
            rho_a: 0.9,
            rho_b: 0.9,
            behaviors_per_user: 6,
            seed: 1,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p_in", self.p_in), ("p_out", self.p_out), ("rho_a", self.rho_a), ("rho_b", self.rho_b)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(validation(format!("{name} must lie in [0, 1], got {p}")));
            }
        }
        if self.n_communities < 2 {
            return Err(validation("at least 2 communities are required"));
        }
        if self.n_items < self.n_communities {
            return Err(validation("every community needs at least one item"));
        }
        for t in &self.types {
            if t.n_values < self.n_communities {
                return Err(validation(format!(
                    "type `{}` has {} values but {} communities each need their own dominant value",
                    t.name, t.n_values, self.n_communities
                )));
            }
        }
        if self.types.iter().map(|t| &t.name).collect::<BTreeSet<_>>().len() != self.types.len() {
            return Err(validation("attribute type names must be distinct"));
        }
        Ok(())
    }

    fn pool(&self, c: usize) -> std::ops::Range<usize> {
        let per = self.n_items / self.n_communities;
        let end = if c + 1 == self.n_communities { self.n_items } else { (c + 1) * per };
        c * per..end
    }
}

/// Generated dataset with its planted ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthData {
    pub config: SynthConfig,
    pub social: Vec<(usize, usize)>,
    pub behavior: Vec<(usize, usize)>,
    /// One value per type for every user, as value indices into `value_names`.
    pub values: Vec<Vec<usize>>,
    pub value_names: Vec<String>,
    pub communities: Vec<usize>,
}

fn geometric_skip(rng: &mut impl Rng, p: f64) -> u64 {
    if p >= 1.0 {
        return 0;
    }
    let u: f64 = rng.random();
    ((1.0 - u).ln() / (1.0 - p).ln()).floor().min(u64::MAX as f64) as u64
}

/// Undirected Erdos-Renyi pairs within one block, by geometric skipping.
fn block_within(rng: &mut impl Rng, members: &[usize], p: f64, out: &mut Vec<(usize, usize)>) {
    if p <= 0.0 {
        return;
    }
    let n = members.len() as u64;
    let (mut v, mut w) = (1u64, -1i64);
    while v < n {
        w += 1 + geometric_skip(rng, p) as i64;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            out.push((members[w as usize], members[v as usize]));
        }
    }
}

/// Pairs across two blocks, by geometric skipping over the m1 x m2 grid.
fn block_between(rng: &mut impl Rng, a: &[usize], b: &[usize], p: f64, out: &mut Vec<(usize, usize)>) {
    if p <= 0.0 || a.is_empty() || b.is_empty() {
        return;
    }
    let total = a.len() as u64 * b.len() as u64;
    let mut k = geometric_skip(rng, p);
    while k < total {
        let (i, j) = ((k / b.len() as u64) as usize, (k % b.len() as u64) as usize);
        out.push((a[i], b[j]));
        k = k.saturating_add(1 + geometric_skip(rng, p));
    }
}

pub fn generate(config: &SynthConfig) -> Result<SynthData> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let c_count = config.n_communities;
    let communities: Vec<usize> = (0..config.n_users).map(|i| i % c_count).collect();
    let blocks: Vec<Vec<usize>> =
        (0..c_count).map(|c| (0..config.n_users).filter(|&i| i % c_count == c).collect()).collect();

    let mut social = Vec::new();
    for c in 0..c_count {
        block_within(&mut rng, &blocks[c], config.p_in, &mut social);
        for d in (c + 1)..c_count {
            block_between(&mut rng, &blocks[c], &blocks[d], config.p_out, &mut social);
        }
    }
    social.sort_unstable();

    let mut value_names = Vec::new();
    let mut offsets = Vec::new();
    for t in &config.types {
        offsets.push(value_names.len());
        value_names.extend((0..t.n_values).map(|v| format!("{}_{v}", t.name)));
    }
    let values: Vec<Vec<usize>> = communities
        .iter()
        .map(|&c| {
            config
                .types
                .iter()
                .zip(&offsets)
                .map(|(t, &off)| {
                    let v = if rng.random_bool(config.rho_a) {
                        c
                    } else {
                        let other = rng.random_range(0..t.n_values - 1);
                        if other >= c {
                            other + 1
                        } else {
                            other
                        }
                    };
                    off + v
                })
                .collect()
        })
        .collect();

    let mut behavior = Vec::new();
    for (u, &c) in communities.iter().enumerate() {
        let own = config.pool(c);
        let outside = config.n_items - own.len();
        let wanted = config.behaviors_per_user.min(config.n_items);
        let mut chosen = BTreeSet::new();
        let mut attempts = 0;
        while chosen.len() < wanted && attempts < 100 * wanted.max(1) {
            attempts += 1;
            let item = if outside == 0 || rng.random_bool(config.rho_b) {
                rng.random_range(own.clone())
            } else {
                let k = rng.random_range(0..outside);
                if k < own.start {
                    k
                } else {
                    k + own.len()
                }
            };
            chosen.insert(item);
        }
        behavior.extend(chosen.into_iter().map(|y| (u, y)));
    }

    Ok(SynthData { config: config.clone(), social, behavior, values, value_names, communities })
}

fn user_id(u: usize) -> String {
    format!("u{u}")
}

fn item_id(y: usize) -> String {
    format!("i{y}")
}

impl SynthData {
    pub fn vocab(&self) -> AttributeVocabulary {
        let mut vocab = AttributeVocabulary::default();
        let mut names = self.value_names.iter();
        for t in &self.config.types {
            for name in names.by_ref().take(t.n_values) {
                vocab.insert(name, &t.name).expect("generated names are distinct");
            }
        }
        vocab
    }

    /// Builds the network with users, items and values indexed as generated.
    pub fn network(&self) -> SbaNetwork {
        let mut b = NetworkBuilder::new(self.vocab());
        for u in 0..self.config.n_users {
            b.add_user(&user_id(u)).expect("valid id");
        }
        for &(u, v) in &self.social {
            b.add_social(&user_id(u), &user_id(v), 1.0).expect("valid link");
        }
        for &(u, y) in &self.behavior {
            b.add_behavior(&user_id(u), &item_id(y), 1.0).expect("valid link");
        }
        for (u, vs) in self.values.iter().enumerate() {
            for &a in vs {
                b.add_attribute(&user_id(u), &self.value_names[a], 1.0).expect("valid link");
            }
        }
        b.build()
    }

    /// Writes the four network files and `manifest.tsv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let paths = NetworkPaths::in_dir(dir);
        let social: Vec<(String, String)> = self.social.iter().map(|&(u, v)| (user_id(u), user_id(v))).collect();
        write_edges(&paths.social, social.iter().map(|(a, b)| (a.as_str(), b.as_str(), 1.0)))?;
        let behavior: Vec<(String, String)> = self.behavior.iter().map(|&(u, y)| (user_id(u), item_id(y))).collect();
        write_edges(&paths.behavior, behavior.iter().map(|(a, b)| (a.as_str(), b.as_str(), 1.0)))?;
        let users: Vec<String> = (0..self.config.n_users).map(user_id).collect();
        let attribute = self
            .values
            .iter()
            .enumerate()
            .flat_map(|(u, vs)| vs.iter().map(move |&a| (u, a)))
            .map(|(u, a)| (users[u].as_str(), self.value_names[a].as_str(), 1.0));
        write_edges(&paths.attribute, attribute)?;
        let vocab = self.vocab();
        write_edges(
            &paths.vocab,
            (0..vocab.n_values()).map(|a| (vocab.value_name(a), vocab.type_name(vocab.type_of(a)), 1.0)),
        )?;
        let mut w = BufWriter::new(fs::File::create(dir.join("manifest.tsv"))?);
        for (u, vs) in self.values.iter().enumerate() {
            let names: Vec<&str> = vs.iter().map(|&a| self.value_names[a].as_str()).collect();
            writeln!(w, "{}\t{}\t{}", users[u], self.communities[u], names.join(","))?;
        }
        w.flush()?;
        Ok(())
    }
}
