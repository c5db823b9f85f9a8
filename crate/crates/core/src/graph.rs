//! Social-behavior-attribute network.
//!
//! Users (social nodes), items (behavior nodes) and attribute values
//! (attribute nodes) live in three dense index spaces. Social links are
//! undirected; behavior and attribute links are bipartite between a user and
//! an item or value. Every adjacency is stored as CSR in both directions so
//! propagation can pull from either side.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::error::{validation, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    Social,
    Behavior,
    Attribute,
}

impl NodeKind {
    pub fn name(self) -> &'static str {
        match self {
            NodeKind::Social => "social",
            NodeKind::Behavior => "behavior",
            NodeKind::Attribute => "attribute",
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeRef {
    pub kind: NodeKind,
    pub index: usize,
}

impl NodeRef {
    pub fn social(index: usize) -> Self {
        NodeRef { kind: NodeKind::Social, index }
    }

    pub fn behavior(index: usize) -> Self {
        NodeRef { kind: NodeKind::Behavior, index }
    }

    pub fn attribute(index: usize) -> Self {
        NodeRef { kind: NodeKind::Attribute, index }
    }
}

/// Which bipartite link class a hop-2 neighborhood is taken through.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Via {
    Behavior,
    Attribute,
}

/// Bijective string id <-> dense index map, in first-seen order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IdMap {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl IdMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.names.len();
        self.names.push(name.to_owned());
        self.index.insert(name.to_owned(), i);
        i
    }

    pub fn get(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub(crate) fn from_names(names: Vec<String>) -> Result<Self> {
        let mut index = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(validation(format!("duplicate id `{n}`")));
            }
        }
        Ok(IdMap { names, index })
    }
}

/// Attribute values and the attribute type each one belongs to.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AttributeVocabulary {
    values: IdMap,
    types: IdMap,
    value_type: Vec<usize>,
    by_type: Vec<Vec<usize>>,
}

impl AttributeVocabulary {
    /// Builds a vocabulary from `(value, type)` pairs. Repeating a pair is
    /// harmless; assigning one value to two types is an error.
    pub fn from_pairs<S: AsRef<str>, T: AsRef<str>>(pairs: &[(S, T)]) -> Result<Self> {
        let mut vocab = AttributeVocabulary::default();
        for (value, ty) in pairs {
            vocab.insert(value.as_ref(), ty.as_ref())?;
        }
        Ok(vocab)
    }

    pub fn insert(&mut self, value: &str, ty: &str) -> Result<usize> {
        if value.is_empty() || ty.is_empty() {
            return Err(Error::Vocabulary("empty attribute value or type".into()));
        }
        let t = self.types.intern(ty);
        if t == self.by_type.len() {
            self.by_type.push(Vec::new());
        }
        if let Some(v) = self.values.get(value) {
            if self.value_type[v] != t {
                return Err(Error::Vocabulary(format!(
                    "value `{value}` assigned to both `{}` and `{ty}`",
                    self.types.name(self.value_type[v])
                )));
            }
            return Ok(v);
        }
        let v = self.values.intern(value);
        self.value_type.push(t);
        self.by_type[t].push(v);
        Ok(v)
    }

    pub fn n_values(&self) -> usize {
        self.values.len()
    }

    pub fn n_types(&self) -> usize {
        self.types.len()
    }

    pub fn value_index(&self, value: &str) -> Option<usize> {
        self.values.get(value)
    }

    pub fn value_name(&self, value: usize) -> &str {
        self.values.name(value)
    }

    pub fn type_index(&self, ty: &str) -> Option<usize> {
        self.types.get(ty)
    }

    pub fn type_name(&self, ty: usize) -> &str {
        self.types.name(ty)
    }

    pub fn type_names(&self) -> &[String] {
        self.types.names()
    }

    pub fn type_of(&self, value: usize) -> usize {
        self.value_type[value]
    }

    /// Value indices of one attribute type, in ascending index order.
    pub fn values_of_type(&self, ty: usize) -> &[usize] {
        &self.by_type[ty]
    }

    pub fn values(&self) -> &IdMap {
        &self.values
    }

    pub(crate) fn from_parts(values: Vec<String>, types: Vec<String>, value_type: Vec<usize>) -> Result<Self> {
        if values.len() != value_type.len() {
            return Err(Error::Dimension { expected: values.len(), got: value_type.len() });
        }
        let values = IdMap::from_names(values)?;
        let types = IdMap::from_names(types)?;
        let mut by_type = vec![Vec::new(); types.len()];
        for (v, &t) in value_type.iter().enumerate() {
            let bucket = by_type.get_mut(t).ok_or_else(|| Error::Vocabulary(format!("type index {t} out of range")))?;
            bucket.push(v);
        }
        Ok(AttributeVocabulary { values, types, value_type, by_type })
    }
}

/// Weighted compressed sparse rows. Each row is sorted by column.
#[derive(Debug, Clone, PartialEq)]
pub struct Csr {
    offsets: Vec<usize>,
    cols: Vec<usize>,
    weights: Vec<f64>,
}

impl Csr {
    fn empty(rows: usize) -> Self {
        Csr { offsets: vec![0; rows + 1], cols: Vec::new(), weights: Vec::new() }
    }

    /// `entries` must be sorted by (row, col) without duplicates.
    fn from_sorted(rows: usize, entries: &[(usize, usize, f64)]) -> Self {
        let mut offsets = vec![0usize; rows + 1];
        for &(r, _, _) in entries {
            offsets[r + 1] += 1;
        }
        for i in 0..rows {
            offsets[i + 1] += offsets[i];
        }
        Csr { offsets, cols: entries.iter().map(|e| e.1).collect(), weights: entries.iter().map(|e| e.2).collect() }
    }

    fn from_map(rows: usize, map: HashMap<(usize, usize), f64>) -> Self {
        let mut entries: Vec<_> = map.into_iter().map(|((r, c), w)| (r, c, w)).collect();
        entries.sort_unstable_by_key(|e| (e.0, e.1));
        Self::from_sorted(rows, &entries)
    }

    fn transpose(&self, cols: usize) -> Self {
        let mut entries = Vec::with_capacity(self.nnz());
        for r in 0..self.rows() {
            for (c, w) in self.row(r) {
                entries.push((c, r, w));
            }
        }
        entries.sort_unstable_by_key(|e| (e.0, e.1));
        Self::from_sorted(cols, &entries)
    }

    pub(crate) fn from_raw(offsets: Vec<usize>, cols: Vec<usize>, weights: Vec<f64>) -> Result<Self> {
        let ok = !offsets.is_empty()
            && offsets[0] == 0
            && offsets.windows(2).all(|w| w[0] <= w[1])
            && *offsets.last().unwrap() == cols.len()
            && cols.len() == weights.len();
        if !ok {
            return Err(Error::Snapshot("malformed adjacency arrays".into()));
        }
        Ok(Csr { offsets, cols, weights })
    }

    pub fn rows(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    pub fn cols(&self, r: usize) -> &[usize] {
        &self.cols[self.offsets[r]..self.offsets[r + 1]]
    }

    pub fn weights(&self, r: usize) -> &[f64] {
        &self.weights[self.offsets[r]..self.offsets[r + 1]]
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.cols(r).iter().copied().zip(self.weights(r).iter().copied())
    }

    pub fn degree(&self, r: usize) -> usize {
        self.offsets[r + 1] - self.offsets[r]
    }

    pub(crate) fn raw(&self) -> (&[usize], &[usize], &[f64]) {
        (&self.offsets, &self.cols, &self.weights)
    }

    fn row_sums(&self) -> Vec<f64> {
        (0..self.rows()).map(|r| self.weights(r).iter().sum()).collect()
    }

    fn filter_rows(&self, drop: impl Fn(usize) -> bool) -> Self {
        let mut entries = Vec::with_capacity(self.nnz());
        for r in 0..self.rows() {
            if !drop(r) {
                entries.extend(self.row(r).map(|(c, w)| (r, c, w)));
            }
        }
        Self::from_sorted(self.rows(), &entries)
    }
}

/// Immutable social-behavior-attribute network with precomputed degree sums.
#[derive(Debug, Clone, PartialEq)]
pub struct SbaNetwork {
    users: IdMap,
    items: IdMap,
    vocab: AttributeVocabulary,
    social: Csr,
    behavior: Csr,
    behavior_rev: Csr,
    attribute: Csr,
    attribute_rev: Csr,
    social_degree: Vec<f64>,
    behavior_degree: Vec<f64>,
    attribute_degree: Vec<f64>,
    item_degree: Vec<f64>,
    value_degree: Vec<f64>,
}

impl SbaNetwork {
    fn assemble(
        users: IdMap,
        items: IdMap,
        vocab: AttributeVocabulary,
        social: Csr,
        behavior: Csr,
        attribute: Csr,
    ) -> Self {
        let behavior_rev = behavior.transpose(items.len());
        let attribute_rev = attribute.transpose(vocab.n_values());
        SbaNetwork {
            social_degree: social.row_sums(),
            behavior_degree: behavior.row_sums(),
            attribute_degree: attribute.row_sums(),
            item_degree: behavior_rev.row_sums(),
            value_degree: attribute_rev.row_sums(),
            users,
            items,
            vocab,
            social,
            behavior,
            behavior_rev,
            attribute,
            attribute_rev,
        }
    }

    pub(crate) fn from_parts(
        users: IdMap,
        items: IdMap,
        vocab: AttributeVocabulary,
        social: Csr,
        behavior: Csr,
        attribute: Csr,
    ) -> Result<Self> {
        let n = users.len();
        if social.rows() != n || behavior.rows() != n || attribute.rows() != n {
            return Err(Error::Snapshot("adjacency row count differs from user count".into()));
        }
        let in_range = |csr: &Csr, cols: usize| csr.cols.iter().all(|&c| c < cols);
        if !in_range(&social, n) || !in_range(&behavior, items.len()) || !in_range(&attribute, vocab.n_values()) {
            return Err(Error::Snapshot("adjacency column out of range".into()));
        }
        Ok(Self::assemble(users, items, vocab, social, behavior, attribute))
    }

    pub fn n_social(&self) -> usize {
        self.users.len()
    }

    pub fn n_behavior(&self) -> usize {
        self.items.len()
    }

    pub fn n_attribute(&self) -> usize {
        self.vocab.n_values()
    }

    pub fn users(&self) -> &IdMap {
        &self.users
    }

    pub fn items(&self) -> &IdMap {
        &self.items
    }

    pub fn vocab(&self) -> &AttributeVocabulary {
        &self.vocab
    }

    pub fn user_index(&self, id: &str) -> Result<usize> {
        self.users.get(id).ok_or_else(|| Error::UnknownId { kind: "user", id: id.to_owned() })
    }

    /// Resolves an external id of the given kind.
    pub fn lookup(&self, kind: NodeKind, id: &str) -> Option<NodeRef> {
        let index = match kind {
            NodeKind::Social => self.users.get(id),
            NodeKind::Behavior => self.items.get(id),
            NodeKind::Attribute => self.vocab.value_index(id),
        }?;
        Some(NodeRef { kind, index })
    }

    pub fn node_name(&self, node: NodeRef) -> &str {
        match node.kind {
            NodeKind::Social => self.users.name(node.index),
            NodeKind::Behavior => self.items.name(node.index),
            NodeKind::Attribute => self.vocab.value_name(node.index),
        }
    }

    pub fn social_adj(&self) -> &Csr {
        &self.social
    }

    /// User -> item links.
    pub fn behavior_adj(&self) -> &Csr {
        &self.behavior
    }

    /// Item -> user links.
    pub fn behavior_rev(&self) -> &Csr {
        &self.behavior_rev
    }

    /// User -> attribute value links.
    pub fn attribute_adj(&self) -> &Csr {
        &self.attribute
    }

    /// Attribute value -> user links.
    pub fn attribute_rev(&self) -> &Csr {
        &self.attribute_rev
    }

    /// d_{u,S}
    pub fn social_degree(&self, u: usize) -> f64 {
        self.social_degree[u]
    }

    /// d_{u,B}
    pub fn behavior_degree(&self, u: usize) -> f64 {
        self.behavior_degree[u]
    }

    /// d_{u,A}
    pub fn attribute_degree(&self, u: usize) -> f64 {
        self.attribute_degree[u]
    }

    /// d_u = d_{u,S} + d_{u,B} + d_{u,A}
    pub fn total_degree(&self, u: usize) -> f64 {
        self.social_degree[u] + self.behavior_degree[u] + self.attribute_degree[u]
    }

    /// d_{y,S} for behavior node y.
    pub fn item_degree(&self, y: usize) -> f64 {
        self.item_degree[y]
    }

    /// d_{a,S} for attribute node a.
    pub fn value_degree(&self, a: usize) -> f64 {
        self.value_degree[a]
    }

    /// |Γ_u|: number of distinct neighbors of any kind.
    pub fn neighbor_count(&self, u: usize) -> usize {
        self.social.degree(u) + self.behavior.degree(u) + self.attribute.degree(u)
    }

    pub fn social_link_count(&self) -> usize {
        self.social.nnz() / 2
    }

    pub fn behavior_link_count(&self) -> usize {
        self.behavior.nnz()
    }

    pub fn attribute_link_count(&self) -> usize {
        self.attribute.nnz()
    }

    pub fn link_count(&self) -> usize {
        self.social_link_count() + self.behavior_link_count() + self.attribute_link_count()
    }

    pub fn is_isolated(&self, u: usize) -> bool {
        self.neighbor_count(u) == 0
    }

    /// Attribute values held by `u`.
    pub fn attributes_of(&self, u: usize) -> &[usize] {
        self.attribute.cols(u)
    }

    /// Hop-2 social neighbors of `u` through shared items or shared values.
    /// Contains `u` itself whenever `u` has at least one link of that class.
    pub fn hop2_neighbors(&self, u: NodeRef, via: Via) -> Result<BTreeSet<usize>> {
        if u.kind != NodeKind::Social {
            return Err(Error::NodeKind { expected: "social", got: u.kind.name() });
        }
        if u.index >= self.n_social() {
            return Err(Error::UnknownId { kind: "user", id: format!("#{}", u.index) });
        }
        let (fwd, rev) = match via {
            Via::Behavior => (&self.behavior, &self.behavior_rev),
            Via::Attribute => (&self.attribute, &self.attribute_rev),
        };
        let mut out = BTreeSet::new();
        for &y in fwd.cols(u.index) {
            out.extend(rev.cols(y).iter().copied());
        }
        Ok(out)
    }

    /// Strips every attribute link incident to `users`. Returns the reduced
    /// network and, for each listed user, the attribute values removed.
    pub fn remove_attribute_links(&self, users: &BTreeSet<usize>) -> (SbaNetwork, BTreeMap<usize, Vec<usize>>) {
        let truth = users.iter().map(|&u| (u, self.attribute.cols(u).to_vec())).collect();
        let attribute = self.attribute.filter_rows(|u| users.contains(&u));
        let net = Self::assemble(
            self.users.clone(),
            self.items.clone(),
            self.vocab.clone(),
            self.social.clone(),
            self.behavior.clone(),
            attribute,
        );
        (net, truth)
    }

    /// Copy of this network with every social link removed.
    pub fn without_social_links(&self) -> SbaNetwork {
        Self::assemble(
            self.users.clone(),
            self.items.clone(),
            self.vocab.clone(),
            Csr::empty(self.n_social()),
            self.behavior.clone(),
            self.attribute.clone(),
        )
    }
}

/// Accumulates edges and produces an [`SbaNetwork`].
///
/// Users are indexed in first-seen order across all edge kinds, items in
/// first-seen order, and attribute values in vocabulary order. Repeated links
/// collapse into one link whose weight is the sum.
#[derive(Debug, Default)]
pub struct NetworkBuilder {
    users: IdMap,
    items: IdMap,
    vocab: AttributeVocabulary,
    social: HashMap<(usize, usize), f64>,
    behavior: HashMap<(usize, usize), f64>,
    attribute: HashMap<(usize, usize), f64>,
}

fn check_weight(w: f64) -> Result<f64> {
    if w.is_finite() && w > 0.0 {
        Ok(w)
    } else {
        Err(validation(format!("link weight must be positive and finite, got {w}")))
    }
}

fn check_id<'a>(what: &str, id: &'a str) -> Result<&'a str> {
    if id.is_empty() {
        Err(validation(format!("empty {what} id")))
    } else {
        Ok(id)
    }
}

impl NetworkBuilder {
    pub fn new(vocab: AttributeVocabulary) -> Self {
        NetworkBuilder { vocab, ..Default::default() }
    }

    /// Registers a user even if it has no links.
    pub fn add_user(&mut self, id: &str) -> Result<usize> {
        Ok(self.users.intern(check_id("user", id)?))
    }

    pub fn add_social(&mut self, a: &str, b: &str, weight: f64) -> Result<()> {
        let w = check_weight(weight)?;
        let (a, b) = (self.add_user(a)?, self.add_user(b)?);
        if a == b {
            return Err(validation(format!("self-loop on user `{}`", self.users.name(a))));
        }
        *self.social.entry((a.min(b), a.max(b))).or_insert(0.0) += w;
        Ok(())
    }

    pub fn add_behavior(&mut self, user: &str, item: &str, weight: f64) -> Result<()> {
        let w = check_weight(weight)?;
        let u = self.add_user(user)?;
        let y = self.items.intern(check_id("item", item)?);
        *self.behavior.entry((u, y)).or_insert(0.0) += w;
        Ok(())
    }

    pub fn add_attribute(&mut self, user: &str, value: &str, weight: f64) -> Result<()> {
        let w = check_weight(weight)?;
        let a = self
            .vocab
            .value_index(check_id("attribute value", value)?)
            .ok_or_else(|| Error::Vocabulary(format!("attribute value `{value}` is not in the vocabulary")))?;
        let u = self.add_user(user)?;
        *self.attribute.entry((u, a)).or_insert(0.0) += w;
        Ok(())
    }

    pub fn build(self) -> SbaNetwork {
        let n = self.users.len();
        let mut social = HashMap::with_capacity(self.social.len() * 2);
        for ((a, b), w) in self.social {
            social.insert((a, b), w);
            social.insert((b, a), w);
        }
        SbaNetwork::assemble(
            self.users,
            self.items,
            self.vocab,
            Csr::from_map(n, social),
            Csr::from_map(n, self.behavior),
            Csr::from_map(n, self.attribute),
        )
    }
}

/// Builds a network from edge lists. A `None` weight means 1.0.
pub fn build_network(
    social_edges: &[(&str, &str, Option<f64>)],
    behavior_edges: &[(&str, &str, Option<f64>)],
    attribute_edges: &[(&str, &str, Option<f64>)],
    vocab: &[(&str, &str)],
) -> Result<SbaNetwork> {
    let mut b = NetworkBuilder::new(AttributeVocabulary::from_pairs(vocab)?);
    for &(u, v, w) in social_edges {
        b.add_social(u, v, w.unwrap_or(1.0))?;
    }
    for &(u, y, w) in behavior_edges {
        b.add_behavior(u, y, w.unwrap_or(1.0))?;
    }
    for &(u, a, w) in attribute_edges {
        b.add_attribute(u, a, w.unwrap_or(1.0))?;
    }
    Ok(b.build())
}


#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> SbaNetwork {
        build_network(&[("a", "b", None), ("b", "c", None), ("c", "a", None)], &[], &[], &[]).unwrap()
    }

    #[test]
    fn triangle_degrees() {
        let net = triangle();
        assert_eq!(net.n_social(), 3);
        for u in 0..3 {
            assert_eq!(net.social_degree(u), 2.0);
            assert_eq!(net.total_degree(u), 2.0);
        }
        assert_eq!(net.social_link_count(), 3);
    }

    #[test]
    fn duplicate_edges_sum() {
        let net = build_network(&[("u", "v", Some(1.0)), ("v", "u", None)], &[], &[], &[]).unwrap();
        assert_eq!(net.social_link_count(), 1);
        assert_eq!(net.social_adj().weights(0), &[2.0]);
        assert_eq!(net.social_degree(1), 2.0);
    }

    #[test]
    fn sab_behavior_sharing_neighbors() {
        let net = sab_net();
        let u1 = net.lookup(NodeKind::Social, "u1").unwrap();
        let got: Vec<&str> =
            net.hop2_neighbors(u1, Via::Behavior).unwrap().into_iter().map(|i| net.users().name(i)).collect();
        assert_eq!(got, vec!["u1", "u2", "u4"]);
    }

    fn sab_net() -> SbaNetwork {
        fixtures::sab()
    }

    #[test]
    fn hop2_requires_social_node() {
        let net = sab_net();
        let err = net.hop2_neighbors(NodeRef::behavior(0), Via::Behavior).unwrap_err();
        assert!(matches!(err, Error::NodeKind { .. }));
    }

    #[test]
    fn hop2_empty_without_links() {
        let net = triangle();
        assert!(net.hop2_neighbors(NodeRef::social(0), Via::Behavior).unwrap().is_empty());
    }

    #[test]
    fn hop2_set_semantics() {
        let net =
            build_network(&[], &[("x", "i1", None), ("x", "i2", None), ("y", "i1", None), ("y", "i2", None)], &[], &[])
                .unwrap();
        let got = net.hop2_neighbors(NodeRef::social(0), Via::Behavior).unwrap();
        assert_eq!(got.into_iter().collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn remove_attribute_links_from_u5() {
        let net = sab_net();
        let u5 = net.user_index("u5").unwrap();
        let a1 = net.vocab().value_index("a1").unwrap();
        let before = net.value_degree(a1);
        let (stripped, truth) = net.remove_attribute_links(&BTreeSet::from([u5]));
        assert_eq!(stripped.attribute_degree(u5), 0.0);
        assert_eq!(truth[&u5], vec![a1]);
        assert_eq!(stripped.value_degree(a1), before - 1.0);
        assert_eq!(stripped.social_adj(), net.social_adj());
    }

    #[test]
    fn remove_nothing_is_identity() {
        let net = sab_net();
        let (same, truth) = net.remove_attribute_links(&BTreeSet::new());
        assert_eq!(same, net);
        assert!(truth.is_empty());
    }

    #[test]
    fn remove_user_without_attributes() {
        let net = sab_net();
        let u6 = net.user_index("u6").unwrap();
        let (same, truth) = net.remove_attribute_links(&BTreeSet::from([u6]));
        assert_eq!(same, net);
        assert!(truth[&u6].is_empty());
    }

    #[test]
    fn rejects_unknown_value_and_bad_weight() {
        let err = build_network(&[], &[], &[("u", "nope", None)], &[("a", "city")]).unwrap_err();
        assert!(matches!(err, Error::Vocabulary(_)));
        let err = build_network(&[("u", "v", Some(0.0))], &[], &[], &[]).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
        let err = build_network(&[("u", "v", Some(-2.0))], &[], &[], &[]).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
        let err = build_network(&[("", "v", None)], &[], &[], &[]).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn vocabulary_type_conflict() {
        let err = AttributeVocabulary::from_pairs(&[("x", "city"), ("x", "major")]).unwrap_err();
        assert!(matches!(err, Error::Vocabulary(_)));
        let ok = AttributeVocabulary::from_pairs(&[("x", "city"), ("x", "city"), ("y", "major")]).unwrap();
        assert_eq!(ok.n_values(), 2);
        assert_eq!(ok.values_of_type(ok.type_index("major").unwrap()), &[1]);
    }

    #[test]
    fn isolated_user_allowed() {
        let mut b = NetworkBuilder::new(AttributeVocabulary::default());
        b.add_user("lonely").unwrap();
        let net = b.build();
        assert!(net.is_isolated(0));
    }
}
