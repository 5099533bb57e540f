//! Labeled rooted trees `(T, φ)` and the combinatorial quantities computed
//! from them: dimension, branches, subtrees, forgetful contractions and
//! truncations.
//!
//! Edges point toward the root and labels strictly increase along every
//! edge. Vertex names are arbitrary strings; labels are stored separately so
//! that distinct vertices may share a label.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::product::FlagProduct;

/// Largest label accepted by validation. Keeps every dimension sum in `u64`.
pub const MAX_LABEL: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("empty input: no vertices")]
    EmptyInput,
    #[error("not a tree: {0}")]
    NotATree(String),
    #[error("label violation on edge {from} -> {to}: {source_label} >= {target_label}")]
    LabelViolation {
        from: String,
        to: String,
        source_label: u64,
        target_label: u64,
    },
    #[error("label {label} of vertex {vertex} is outside 1..={max}", max = MAX_LABEL)]
    LabelOutOfRange { vertex: String, label: i64 },
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("declared root {declared} conflicts with inferred root {inferred}")]
    RootConflict { declared: String, inferred: String },
    #[error("the root {0} cannot be forgotten")]
    RootForbidden(String),
}

/// Unvalidated tree description, as read from JSON or produced by the DSL
/// parser.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawTree {
    pub labels: BTreeMap<String, i64>,
    #[serde(default)]
    pub edges: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<String>,
}

/// A validated labeled tree.
///
/// Vertices are kept sorted by name, so two trees with the same names,
/// labels and edges compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabeledTree {
    names: Vec<String>,
    labels: Vec<u64>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    root: usize,
}

/// A maximal chain starting at a leaf whose vertices are each the target of
/// at most one edge. The root never belongs to a branch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Branch {
    /// Leaf first, moving toward the root.
    pub vertices: Vec<String>,
    pub leaf: String,
    pub length: usize,
    pub min_width: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncationResult {
    /// Vertices at distance `<= m` from the root.
    pub base: LabeledTree,
    /// One tree per distance-`m` vertex that has children, rooted there.
    pub hanging: Vec<LabeledTree>,
}

/// Checks a raw description and builds the tree. The root is inferred as
/// the unique vertex without an outgoing edge.
pub fn validate_tree(raw: &RawTree) -> Result<LabeledTree, TreeError> {
    if raw.labels.is_empty() {
        return Err(TreeError::EmptyInput);
    }
    let names: Vec<String> = raw.labels.keys().cloned().collect();
    let index: BTreeMap<&str, usize> = names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let mut labels = Vec::with_capacity(names.len());
    for (name, &label) in &raw.labels {
        if label < 1 || label as u64 > MAX_LABEL {
            return Err(TreeError::LabelOutOfRange {
                vertex: name.clone(),
                label,
            });
        }
        labels.push(label as u64);
    }

    let lookup = |name: &str| {
        index
            .get(name)
            .copied()
            .ok_or_else(|| TreeError::UnknownVertex(name.to_string()))
    };
    let mut parent: Vec<Option<usize>> = vec![None; names.len()];
    let edges: BTreeSet<(usize, usize)> = raw
        .edges
        .iter()
        .map(|(s, t)| Ok((lookup(s)?, lookup(t)?)))
        .collect::<Result<_, TreeError>>()?;
    for &(s, t) in &edges {
        if s == t {
            return Err(TreeError::NotATree(format!("self-loop at {}", names[s])));
        }
        if let Some(old) = parent[s] {
            return Err(TreeError::NotATree(format!(
                "vertex {} has two outgoing edges (to {} and {})",
                names[s], names[old], names[t]
            )));
        }
        parent[s] = Some(t);
    }

    let roots: Vec<usize> = (0..names.len()).filter(|&v| parent[v].is_none()).collect();
    let root = match roots.as_slice() {
        [r] => *r,
        [] => {
            return Err(TreeError::NotATree(
                "no root: the edges contain a cycle".into(),
            ))
        }
        many => {
            let listed: Vec<&str> = many.iter().map(|&v| names[v].as_str()).collect();
            return Err(TreeError::NotATree(format!(
                "disconnected: several vertices without outgoing edge ({})",
                listed.join(", ")
            )));
        }
    };
    if let Some(declared) = &raw.root {
        if declared != &names[root] {
            return Err(TreeError::RootConflict {
                declared: declared.clone(),
                inferred: names[root].clone(),
            });
        }
    }
    // With a single root and out-degree <= 1, a vertex that cannot reach the
    // root within |V| steps sits on a cycle.
    for start in 0..names.len() {
        let mut cur = start;
        let mut steps = 0;
        while let Some(p) = parent[cur] {
            cur = p;
            steps += 1;
            if steps > names.len() {
                return Err(TreeError::NotATree(format!(
                    "vertex {} lies on a cycle",
                    names[start]
                )));
            }
        }
    }
    for &(s, t) in &edges {
        if labels[s] >= labels[t] {
            return Err(TreeError::LabelViolation {
                from: names[s].clone(),
                to: names[t].clone(),
                source_label: labels[s],
                target_label: labels[t],
            });
        }
    }
    Ok(LabeledTree::assemble(names, labels, parent))
}

impl LabeledTree {
    fn assemble(names: Vec<String>, labels: Vec<u64>, parent: Vec<Option<usize>>) -> Self {
        let mut children = vec![Vec::new(); names.len()];
        let mut root = 0;
        for (v, p) in parent.iter().enumerate() {
            match p {
                Some(p) => children[*p].push(v),
                None => root = v,
            }
        }
        LabeledTree {
            names,
            labels,
            parent,
            children,
            root,
        }
    }

    /// Builds a tree from name → label and child → parent maps that are
    /// already known to be valid.
    pub(crate) fn from_maps(
        labels: &BTreeMap<String, u64>,
        parent_of: &BTreeMap<String, String>,
    ) -> Self {
        let names: Vec<String> = labels.keys().cloned().collect();
        let index: BTreeMap<&str, usize> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let parent = names
            .iter()
            .map(|n| parent_of.get(n).map(|p| index[p.as_str()]))
            .collect();
        let tree = Self::assemble(names, labels.values().copied().collect(), parent);
        debug_assert!(validate_tree(&tree.to_raw()).is_ok());
        tree
    }

    fn restricted(
        &self,
        keep: impl Fn(usize) -> bool,
        reparent: impl Fn(usize) -> Option<usize>,
    ) -> Self {
        let mut labels = BTreeMap::new();
        let mut parent_of = BTreeMap::new();
        for v in (0..self.len()).filter(|&v| keep(v)) {
            labels.insert(self.names[v].clone(), self.labels[v]);
            if let Some(p) = reparent(v) {
                parent_of.insert(self.names[v].clone(), self.names[p].clone());
            }
        }
        Self::from_maps(&labels, &parent_of)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Vertex names in lexicographic order; indices used by the other
    /// accessors refer to this order.
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.binary_search_by(|n| n.as_str().cmp(name)).ok()
    }

    pub fn label(&self, v: usize) -> u64 {
        self.labels[v]
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    /// Sources of the edges pointing into `v`, sorted by name.
    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn root(&self) -> usize {
        self.root
    }

    /// The ambient dimension `n = φ(root)`.
    pub fn ambient(&self) -> u64 {
        self.labels[self.root]
    }

    /// Edges as `(source, target)` index pairs, ordered by source.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len()).filter_map(move |v| self.parent[v].map(|p| (v, p)))
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&v| v != self.root && self.children[v].is_empty())
            .collect()
    }

    pub fn is_chain(&self) -> bool {
        self.children.iter().all(|c| c.len() <= 1)
    }

    /// Number of edges on the path from `v` to the root.
    pub fn distance(&self, v: usize) -> usize {
        let mut d = 0;
        let mut cur = v;
        while let Some(p) = self.parent[cur] {
            d += 1;
            cur = p;
        }
        d
    }

    pub fn depth(&self) -> usize {
        (0..self.len()).map(|v| self.distance(v)).max().unwrap_or(0)
    }

    /// Vertices ordered by distance from the root, ties broken by name.
    pub fn bfs_order(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.len());
        let mut queue = VecDeque::from([self.root]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            queue.extend(self.children[v].iter().copied());
        }
        // children lists are name-sorted, so a stable sort by distance
        // yields name order within each level
        order.sort_by_key(|&v| self.distance(v));
        order
    }

    /// `Σ_{(s,t)} φ(s)(φ(t) − φ(s))`, the dimension of the tree variety.
    pub fn dimension(&self) -> u64 {
        self.edges()
            .map(|(s, t)| self.labels[s] * (self.labels[t] - self.labels[s]))
            .sum()
    }

    /// Dimension of the subtree rooted at every vertex, indexed by vertex.
    pub fn subtree_dimensions(&self) -> Vec<u64> {
        let mut dims = vec![0u64; self.len()];
        for &v in self.bfs_order().iter().rev() {
            if let Some(p) = self.parent[v] {
                dims[p] += dims[v] + self.labels[v] * (self.labels[p] - self.labels[v]);
            }
        }
        dims
    }

    /// One branch per leaf, ordered by leaf name.
    pub fn branches(&self) -> Vec<Branch> {
        self.leaves()
            .into_iter()
            .map(|leaf| {
                let mut chain = vec![leaf];
                let mut cur = leaf;
                while let Some(p) = self.parent[cur] {
                    if p == self.root || self.children[p].len() >= 2 {
                        break;
                    }
                    chain.push(p);
                    cur = p;
                }
                let gaps = chain.iter().map(|&s| {
                    let t = self.parent[s].expect("branch vertices are not the root");
                    self.labels[t] - self.labels[s]
                });
                let min_width = gaps.fold(self.labels[leaf], u64::min);
                Branch {
                    vertices: chain.iter().map(|&v| self.names[v].clone()).collect(),
                    leaf: self.names[leaf].clone(),
                    length: chain.len(),
                    min_width,
                }
            })
            .collect()
    }

    fn require(&self, name: &str) -> Result<usize, TreeError> {
        self.index_of(name)
            .ok_or_else(|| TreeError::UnknownVertex(name.to_string()))
    }

    /// Whether `v` lies in the subtree rooted at `top` (every vertex with a
    /// directed path to `top`, including `top`).
    pub fn is_below(&self, v: usize, top: usize) -> bool {
        let mut cur = v;
        loop {
            if cur == top {
                return true;
            }
            match self.parent[cur] {
                Some(p) => cur = p,
                None => return false,
            }
        }
    }

    /// The subtree `T^v` of vertices with a directed path to `v`, rooted at
    /// `v`.
    pub fn subtree_at(&self, name: &str) -> Result<LabeledTree, TreeError> {
        let top = self.require(name)?;
        Ok(self.subtree_at_index(top))
    }

    pub(crate) fn subtree_at_index(&self, top: usize) -> LabeledTree {
        self.restricted(
            |v| self.is_below(v, top),
            |v| if v == top { None } else { self.parent[v] },
        )
    }

    /// Deletes a non-root vertex `v`, reattaching its sources to its target.
    /// The flag reports whether the forgetful map onto the new tree variety
    /// is surjective, i.e. whether the labels of the sources of `v` sum to at
    /// most `φ(v)`.
    pub fn forget_vertex(&self, name: &str) -> Result<(LabeledTree, bool), TreeError> {
        let v = self.require(name)?;
        if v == self.root {
            return Err(TreeError::RootForbidden(name.to_string()));
        }
        Ok(self.forget_index(v))
    }

    pub(crate) fn forget_index(&self, v: usize) -> (LabeledTree, bool) {
        let target = self.parent[v];
        let incoming: u64 = self.children[v].iter().map(|&s| self.labels[s]).sum();
        let tree = self.restricted(
            |w| w != v,
            |w| match self.parent[w] {
                Some(p) if p == v => target,
                other => other,
            },
        );
        (tree, incoming <= self.labels[v])
    }

    /// Splits the tree at distance `m` into the truncation and the trees
    /// hanging below the distance-`m` vertices.
    pub fn truncate(&self, m: usize) -> TruncationResult {
        let dist: Vec<usize> = (0..self.len()).map(|v| self.distance(v)).collect();
        let base = self.restricted(|v| dist[v] <= m, |v| self.parent[v]);
        let hanging = (0..self.len())
            .filter(|&v| dist[v] == m && !self.children[v].is_empty())
            .map(|v| self.subtree_at_index(v))
            .collect();
        TruncationResult { base, hanging }
    }

    /// When the tree is a union of chains joined only at the root, returns
    /// the corresponding product of partial flag varieties.
    pub fn as_flag_product(&self) -> Option<FlagProduct> {
        let non_root_branching =
            (0..self.len()).any(|v| v != self.root && self.children[v].len() > 1);
        if non_root_branching {
            return None;
        }
        let factors = self.children[self.root]
            .iter()
            .map(|&top| {
                let mut flag = vec![self.labels[top]];
                let mut cur = top;
                while let Some(&c) = self.children[cur].first() {
                    flag.push(self.labels[c]);
                    cur = c;
                }
                flag.reverse();
                flag
            })
            .collect();
        Some(FlagProduct::new(factors, self.ambient()).expect("tree labels form valid flags"))
    }

    /// Same vertices and edges under new names. Panics if `rename` is not
    /// injective.
    pub fn renamed(&self, rename: impl Fn(&str) -> String) -> LabeledTree {
        let mut labels = BTreeMap::new();
        let mut parent_of = BTreeMap::new();
        for (v, name) in self.names.iter().enumerate() {
            let new = rename(name);
            assert!(
                labels.insert(new.clone(), self.labels[v]).is_none(),
                "rename must be injective"
            );
            if let Some(p) = self.parent[v] {
                parent_of.insert(new, rename(&self.names[p]));
            }
        }
        Self::from_maps(&labels, &parent_of)
    }

    pub fn to_raw(&self) -> RawTree {
        RawTree {
            labels: self
                .names
                .iter()
                .cloned()
                .zip(self.labels.iter().map(|&l| l as i64))
                .collect(),
            edges: self
                .edges()
                .map(|(s, t)| (self.names[s].clone(), self.names[t].clone()))
                .collect(),
            root: None,
        }
    }

    /// Compact JSON with vertices in lexicographic order.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(&self.to_raw()).expect("tree serializes")
    }

    /// One-line chain notation: one `|`-separated chain per leaf, each
    /// written from the leaf up to the first vertex already printed (or the
    /// root).
    pub fn to_dsl(&self) -> String {
        let mut printed = vec![false; self.len()];
        let mut chains = Vec::new();
        let mut starts = self.leaves();
        if starts.is_empty() {
            starts.push(self.root);
        }
        for leaf in starts {
            let mut parts = Vec::new();
            let mut cur = Some(leaf);
            while let Some(v) = cur {
                if printed[v] {
                    parts.push(self.names[v].clone());
                    break;
                }
                printed[v] = true;
                parts.push(format!("{}:{}", self.names[v], self.labels[v]));
                cur = self.parent[v];
            }
            chains.push(parts.join(">"));
        }
        chains.join(" | ")
    }
}

impl fmt::Display for LabeledTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_dsl())
    }
}
