//! The dividing matrix M over social nodes and its factored transpose.
//!
//! Row u of M splits u's capacity between three channels: social neighbors
//! (by link weight), behavior-sharing neighbors (u -> item -> user) and
//! attribute-sharing neighbors (u -> value -> user). The hop-2 channels are
//! never expanded into user-user pairs; `apply_transpose` routes mass through
//! the item and value nodes, which costs one pass over the links.

use nalgebra::DMatrix;

use crate::error::{validation, Error, Result};
use crate::graph::SbaNetwork;

/// Default cap on social nodes for dense materialization.
pub const DENSE_CAP: usize = 2000;

/// How a user's capacity is split between the three neighbor classes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shares {
    /// The same share weights for every user.
    Global { social: f64, behavior: f64, attribute: f64 },
    /// Each user's shares are `tau` times its degree in each link class.
    PerNode { tau: f64 },
}

impl Default for Shares {
    fn default() -> Self {
        Shares::equal()
    }
}

impl Shares {
    pub fn equal() -> Self {
        Shares::Global { social: 1.0 / 3.0, behavior: 1.0 / 3.0, attribute: 1.0 / 3.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Shares::Global { social, behavior, attribute } => {
                let all = [social, behavior, attribute];
                if all.iter().any(|w| !w.is_finite() || *w < 0.0) {
                    return Err(validation("shares must be non-negative and finite"));
                }
                if all.iter().all(|w| *w == 0.0) {
                    return Err(validation("at least one share must be positive"));
                }
                Ok(())
            }
            Shares::PerNode { tau } => {
                if tau.is_finite() && tau > 0.0 {
                    Ok(())
                } else {
                    Err(validation(format!("per-node tau must be positive, got {tau}")))
                }
            }
        }
    }

    /// (w_S, w_BS, w_AS) as seen by user `u`.
    pub fn for_user(&self, net: &SbaNetwork, u: usize) -> (f64, f64, f64) {
        match *self {
            Shares::Global { social, behavior, attribute } => (social, behavior, attribute),
            Shares::PerNode { tau } => {
                (tau * net.social_degree(u), tau * net.behavior_degree(u), tau * net.attribute_degree(u))
            }
        }
    }
}

/// Per-user channel factors `w_Y / (w_T * d_{u,Y})`, zero where the channel
/// is absent. A user whose `w_T` is zero keeps its own mass.
#[derive(Debug, Clone)]
struct ChannelFactors {
    social: Vec<f64>,
    behavior: Vec<f64>,
    attribute: Vec<f64>,
    self_loop: Vec<bool>,
}

fn channel_factors(net: &SbaNetwork, shares: &Shares) -> ChannelFactors {
    let n = net.n_social();
    let mut f = ChannelFactors {
        social: vec![0.0; n],
        behavior: vec![0.0; n],
        attribute: vec![0.0; n],
        self_loop: vec![false; n],
    };
    for u in 0..n {
        let (ws, wb, wa) = shares.for_user(net, u);
        let ds = net.social_degree(u);
        let db = net.behavior_degree(u);
        let da = net.attribute_degree(u);
        let on = |d: f64| if d > 0.0 { 1.0 } else { 0.0 };
        let total = ws * on(ds) + wb * on(db) + wa * on(da);
        if total > 0.0 {
            if ds > 0.0 {
                f.social[u] = ws / total / ds;
            }
            if db > 0.0 {
                f.behavior[u] = wb / total / db;
            }
            if da > 0.0 {
                f.attribute[u] = wa / total / da;
            }
        } else {
            f.self_loop[u] = true;
        }
    }
    f
}

/// Factored representation of M, ready to apply Mᵀ.
#[derive(Debug, Clone)]
pub struct TransitionOperator<'a> {
    network: &'a SbaNetwork,
    shares: Shares,
    factors: ChannelFactors,
    inv_item_degree: Vec<f64>,
    inv_value_degree: Vec<f64>,
}

/// Per-call buffers for the item and value accumulators.
#[derive(Debug, Clone, Default)]
pub struct Scratch {
    items: Vec<f64>,
    values: Vec<f64>,
}

fn inverse_or_zero(d: f64) -> f64 {
    if d > 0.0 {
        1.0 / d
    } else {
        0.0
    }
}

impl<'a> TransitionOperator<'a> {
    pub fn new(network: &'a SbaNetwork, shares: Shares) -> Result<Self> {
        shares.validate()?;
        Ok(TransitionOperator {
            network,
            shares,
            factors: channel_factors(network, &shares),
            inv_item_degree: (0..network.n_behavior()).map(|y| inverse_or_zero(network.item_degree(y))).collect(),
            inv_value_degree: (0..network.n_attribute()).map(|a| inverse_or_zero(network.value_degree(a))).collect(),
        })
    }

    pub fn network(&self) -> &'a SbaNetwork {
        self.network
    }

    pub fn shares(&self) -> Shares {
        self.shares
    }

    pub fn dim(&self) -> usize {
        self.network.n_social()
    }

    /// True when row u of M is the self-loop `M_uu = 1`.
    pub fn is_self_loop(&self, u: usize) -> bool {
        self.factors.self_loop[u]
    }

    /// I_{u,S}, I_{u,BS}, I_{u,AS}
    pub fn indicators(&self, u: usize) -> (bool, bool, bool) {
        let net = self.network;
        (net.social_degree(u) > 0.0, net.behavior_degree(u) > 0.0, net.attribute_degree(u) > 0.0)
    }

    /// w_T(u); zero for users that fall back to a self-loop.
    pub fn normalizer(&self, u: usize) -> f64 {
        let (ws, wb, wa) = self.shares.for_user(self.network, u);
        let (s, b, a) = self.indicators(u);
        ws * f64::from(u8::from(s)) + wb * f64::from(u8::from(b)) + wa * f64::from(u8::from(a))
    }

    pub fn scratch(&self) -> Scratch {
        Scratch { items: vec![0.0; self.network.n_behavior()], values: vec![0.0; self.network.n_attribute()] }
    }

    /// Returns Mᵀs.
    pub fn apply_transpose(&self, s: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim()];
        let mut scratch = self.scratch();
        self.apply_transpose_into(s, &mut out, &mut scratch)?;
        Ok(out)
    }

    /// Writes Mᵀs into `out`. Every entry of `out` is overwritten.
    pub fn apply_transpose_into(&self, s: &[f64], out: &mut [f64], scratch: &mut Scratch) -> Result<()> {
        let n = self.dim();
        if s.len() != n {
            return Err(Error::Dimension { expected: n, got: s.len() });
        }
        if out.len() != n {
            return Err(Error::Dimension { expected: n, got: out.len() });
        }
        let net = self.network;
        let f = &self.factors;
        scratch.items.resize(net.n_behavior(), 0.0);
        scratch.values.resize(net.n_attribute(), 0.0);

        // user -> item -> user and user -> value -> user: gather the mass each
        // hub node receives, already divided by the hub's social degree.
        collect_hub_mass(net.behavior_rev(), s, &f.behavior, &self.inv_item_degree, &mut scratch.items);
        collect_hub_mass(net.attribute_rev(), s, &f.attribute, &self.inv_value_degree, &mut scratch.values);

        let social = net.social_adj();
        let behavior = net.behavior_adj();
        let attribute = net.attribute_adj();
        for (x, slot) in out.iter_mut().enumerate() {
            let mut acc = if f.self_loop[x] { s[x] } else { 0.0 };
            for (u, w) in social.row(x) {
                acc += s[u] * f.social[u] * w;
            }
            for (y, w) in behavior.row(x) {
                acc += scratch.items[y] * w;
            }
            for (a, w) in attribute.row(x) {
                acc += scratch.values[a] * w;
            }
            *slot = acc;
        }
        Ok(())
    }

    /// Entries of row u of M, summed over channels, as (x, M_ux) sorted by x.
    pub fn row(&self, u: usize) -> Vec<(usize, f64)> {
        let net = self.network;
        let f = &self.factors;
        let mut entries: Vec<(usize, f64)> = Vec::new();
        if f.self_loop[u] {
            return vec![(u, 1.0)];
        }
        for (x, w) in net.social_adj().row(u) {
            entries.push((x, f.social[u] * w));
        }
        for (y, w_uy) in net.behavior_adj().row(u) {
            for (x, w_xy) in net.behavior_rev().row(y) {
                entries.push((x, f.behavior[u] * w_uy * w_xy * self.inv_item_degree[y]));
            }
        }
        for (a, w_ua) in net.attribute_adj().row(u) {
            for (x, w_xa) in net.attribute_rev().row(a) {
                entries.push((x, f.attribute[u] * w_ua * w_xa * self.inv_value_degree[a]));
            }
        }
        entries.sort_by_key(|e| e.0);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
        for (x, v) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == x => last.1 += v,
                _ => merged.push((x, v)),
            }
        }
        merged
    }
}

fn collect_hub_mass(rev: &crate::graph::Csr, s: &[f64], factor: &[f64], inv_degree: &[f64], hub: &mut [f64]) {
    for (h, slot) in hub.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (u, w) in rev.row(h) {
            acc += s[u] * factor[u] * w;
        }
        *slot = acc * inv_degree[h];
    }
}

/// Explicit M as a dense matrix. Refuses networks above `cap` social nodes.
pub fn materialize_dense(network: &SbaNetwork, shares: Shares, cap: usize) -> Result<DMatrix<f64>> {
    let n = network.n_social();
    if n > cap {
        return Err(Error::Size { what: "social node count", size: n, cap });
    }
    let op = TransitionOperator::new(network, shares)?;
    let mut m = DMatrix::zeros(n, n);
    for u in 0..n {
        for (x, v) in op.row(u) {
            m[(u, x)] = v;
        }
    }
    Ok(m)
}
