//! Exhaustive orbit counts of `GL(n, q)` on the `F_q`-points of a tree
//! variety, for `q ≤ 5`.
//!
//! Points are tuples of subspaces in reduced row echelon form, so equal
//! subspaces have equal keys. The group acts on row vectors from the right
//! and orbits are the connected components of the generator graph.
//!
//! When the point count exceeds the cap, the count is computed on a slice:
//! one root-to-leaf flag is fixed to coordinate subspaces, and optionally a
//! second chain is fixed to each of its coordinate orbit representatives.
//! The acting group is then the subgroup of matrices preserving every fixed
//! coordinate subspace. Both reductions are exact.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;
use thiserror::Error;

use super::field::SmallField;
use crate::tree::LabeledTree;

pub const DEFAULT_CAP: u64 = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slicing {
    /// Full enumeration when within the cap, otherwise the cheapest slice.
    Auto,
    Off,
    Parabolic,
    Double,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrbitLimits {
    pub cap: u64,
    pub slicing: Slicing,
}

impl Default for OrbitLimits {
    fn default() -> Self {
        OrbitLimits {
            cap: DEFAULT_CAP,
            slicing: Slicing::Auto,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OrbitReport {
    pub q: u64,
    /// All `F_q`-points of the variety.
    pub point_count: u64,
    pub orbit_count: u64,
    /// A slice was enumerated instead of the whole variety.
    pub limits_hit: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrbitError {
    #[error("field order {0} is not supported (use 2, 3, 4 or 5)")]
    UnsupportedField(u64),
    #[error("enumeration needs {projected} points, above the cap of {cap}")]
    CapExceeded { cap: u64, projected: u64 },
}

/// Number of `k`-dimensional subspaces of `F_q^m`, saturating.
pub fn gaussian_binomial(m: u64, k: u64, q: u64) -> u64 {
    if k > m {
        return 0;
    }
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        let (Some(a), Some(b)) = (
            (q as u128).checked_pow((m - i) as u32),
            (q as u128).checked_pow((i + 1) as u32),
        ) else {
            return u64::MAX;
        };
        let (Some(n2), Some(d2)) = (num.checked_mul(a - 1), den.checked_mul(b - 1)) else {
            return u64::MAX;
        };
        let g = gcd(n2, d2);
        num = n2 / g;
        den = d2 / g;
    }
    u64::try_from(num / den).unwrap_or(u64::MAX)
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Exact number of `F_q`-points: the product of Gaussian binomials over
/// edges.
pub fn point_count(tree: &LabeledTree, q: u64) -> u64 {
    tree.edges()
        .map(|(s, t)| gaussian_binomial(tree.label(t), tree.label(s), q))
        .fold(1u64, u64::saturating_mul)
}

/// Coordinate subspaces fixed at some vertices; every other non-root
/// vertex is enumerated.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Slice {
    fixed: BTreeMap<usize, Vec<usize>>,
}

#[derive(Debug, Clone)]
struct Plan {
    slices: Vec<Slice>,
    materialized: u64,
}

fn fiber_size(tree: &LabeledTree, fixed: &BTreeMap<usize, Vec<usize>>, q: u64) -> u64 {
    tree.edges()
        .filter(|(s, _)| !fixed.contains_key(s))
        .map(|(s, t)| gaussian_binomial(tree.label(t), tree.label(s), q))
        .fold(1u64, u64::saturating_mul)
}

fn path_to_root(tree: &LabeledTree, v: usize) -> Vec<usize> {
    let mut path = vec![v];
    let mut cur = v;
    while let Some(p) = tree.parent(cur) {
        if p == tree.root() {
            break;
        }
        path.push(p);
        cur = p;
    }
    path
}

/// The leaf-to-root flag of `leaf` as prefix coordinate sets.
fn parabolic_slice(tree: &LabeledTree, leaf: usize) -> Slice {
    let fixed = path_to_root(tree, leaf)
        .into_iter()
        .map(|v| (v, (0..tree.label(v) as usize).collect()))
        .collect();
    Slice { fixed }
}

/// Every way to grow the block counts `prev` to a total of `dim`, one
/// block at a time, without exceeding the block sizes.
fn grown_counts(prev: &[usize], sizes: &[usize], dim: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut budget = vec![dim - prev.iter().sum::<usize>()];
    for (b, &size) in sizes.iter().enumerate() {
        let mut next = Vec::new();
        let mut next_budget = Vec::new();
        for (counts, &left) in out.iter().zip(&budget) {
            for extra in 0..=(size - prev[b]).min(left) {
                let mut c = counts.clone();
                c.push(prev[b] + extra);
                next.push(c);
                next_budget.push(left - extra);
            }
        }
        out = next;
        budget = next_budget;
    }
    out.into_iter()
        .zip(budget)
        .filter(|(_, left)| *left == 0)
        .map(|(c, _)| c)
        .collect()
}

/// Every coordinate flag with the dimensions of `chain_dims` inside the
/// first `top` coordinates, up to permutations preserving the blocks cut
/// out by `cuts`. A flag is recorded by how many coordinates each member
/// takes from each block, always the first ones. Stops once more than
/// `limit` have been produced.
fn coordinate_flags(
    chain_dims: &[usize],
    top: usize,
    cuts: &[usize],
    limit: u64,
) -> Vec<Vec<Vec<usize>>> {
    let mut blocks: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for &c in cuts.iter().chain(std::iter::once(&top)) {
        if c > start && c <= top {
            blocks.push((start, c));
            start = c;
        }
    }
    let sizes: Vec<usize> = blocks.iter().map(|(s, e)| e - s).collect();
    let mut partial: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for &dim in chain_dims {
        let mut next = Vec::new();
        for flag in &partial {
            let zero = vec![0; blocks.len()];
            let prev = flag.last().unwrap_or(&zero);
            for counts in grown_counts(prev, &sizes, dim) {
                let mut f = flag.clone();
                f.push(counts);
                next.push(f);
            }
            if next.len() as u64 > limit {
                break;
            }
        }
        partial = next;
    }
    partial
        .into_iter()
        .map(|flag| {
            flag.iter()
                .map(|counts| {
                    blocks
                        .iter()
                        .zip(counts)
                        .flat_map(|(&(s, _), &c)| s..s + c)
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Fixes the flag of `leaf1` and runs the second chain from `leaf2` (up to
/// the first vertex on the first flag) through its coordinate
/// representatives.
fn double_slices(tree: &LabeledTree, leaf1: usize, leaf2: usize, limit: u64) -> Vec<Slice> {
    let base = parabolic_slice(tree, leaf1);
    let mut chain = vec![leaf2];
    let mut junction = tree.parent(leaf2).expect("leaves are not the root");
    while junction != tree.root() && !base.fixed.contains_key(&junction) {
        chain.push(junction);
        junction = tree.parent(junction).expect("the root ends every path");
    }
    let top = tree.label(junction) as usize;
    let mut cuts: Vec<usize> = base.fixed.keys().map(|&v| tree.label(v) as usize).collect();
    cuts.sort_unstable();
    let dims: Vec<usize> = chain.iter().map(|&v| tree.label(v) as usize).collect();
    coordinate_flags(&dims, top, &cuts, limit)
        .into_iter()
        .map(|sets| {
            let mut fixed = base.fixed.clone();
            fixed.extend(chain.iter().copied().zip(sets));
            Slice { fixed }
        })
        .collect()
}

fn choose_plan(
    tree: &LabeledTree,
    q: u64,
    limits: &OrbitLimits,
) -> Result<(Plan, bool), OrbitError> {
    let total = point_count(tree, q);
    let plain = Plan {
        slices: vec![Slice {
            fixed: BTreeMap::new(),
        }],
        materialized: total,
    };
    let want_parabolic = matches!(limits.slicing, Slicing::Auto | Slicing::Parabolic);
    let want_double = matches!(limits.slicing, Slicing::Auto | Slicing::Double);
    if limits.slicing == Slicing::Off || (limits.slicing == Slicing::Auto && total <= limits.cap) {
        return if total <= limits.cap {
            Ok((plain, false))
        } else {
            Err(OrbitError::CapExceeded {
                cap: limits.cap,
                projected: total,
            })
        };
    }
    let leaves = tree.leaves();
    let mut best: Option<Plan> = None;
    let mut consider = |plan: Plan| {
        if best
            .as_ref()
            .is_none_or(|b| plan.materialized < b.materialized)
        {
            best = Some(plan);
        }
    };
    for &l1 in &leaves {
        let base = parabolic_slice(tree, l1);
        if want_parabolic {
            consider(Plan {
                materialized: fiber_size(tree, &base.fixed, q),
                slices: vec![base.clone()],
            });
        }
        if want_double {
            for &l2 in leaves.iter().filter(|&&l| l != l1) {
                let slices = double_slices(tree, l1, l2, limits.cap);
                let Some(first) = slices.first() else {
                    continue;
                };
                let per = fiber_size(tree, &first.fixed, q);
                consider(Plan {
                    materialized: per.saturating_mul(slices.len() as u64),
                    slices,
                });
            }
        }
    }
    match best {
        Some(plan) if plan.materialized <= limits.cap => Ok((plan, true)),
        Some(plan) => Err(OrbitError::CapExceeded {
            cap: limits.cap,
            projected: plan.materialized,
        }),
        None => Err(OrbitError::CapExceeded {
            cap: limits.cap,
            projected: total,
        }),
    }
}

/// Counts orbits, slicing when the variety has more points than the cap.
pub fn enumerate_orbits(
    tree: &LabeledTree,
    q: u64,
    limits: &OrbitLimits,
) -> Result<OrbitReport, OrbitError> {
    let field = SmallField::new(q).ok_or(OrbitError::UnsupportedField(q))?;
    let (plan, sliced) = choose_plan(tree, q, limits)?;
    let orbit_count = plan
        .slices
        .iter()
        .map(|s| SliceEnumerator::new(tree, &field, s).orbit_count())
        .sum();
    Ok(OrbitReport {
        q,
        point_count: point_count(tree, q),
        orbit_count,
        limits_hit: sliced,
    })
}

/// All `k × m` matrices in reduced row echelon form of rank `k`.
fn rref_subspaces(m: usize, k: usize, q: u8) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut pivots = Vec::with_capacity(k);
    fn pick(
        start: usize,
        m: usize,
        k: usize,
        pivots: &mut Vec<usize>,
        q: u8,
        out: &mut Vec<Vec<u8>>,
    ) {
        if pivots.len() == k {
            let free: Vec<(usize, usize)> = (0..k)
                .flat_map(|r| {
                    let p = pivots[r];
                    let pivots = pivots.clone();
                    (p + 1..m)
                        .filter(move |c| !pivots.contains(c))
                        .map(move |c| (r, c))
                })
                .collect();
            let mut base = vec![0u8; k * m];
            for (r, &p) in pivots.iter().enumerate() {
                base[r * m + p] = 1;
            }
            let total = (q as usize).pow(free.len() as u32);
            for mut code in 0..total {
                let mut mat = base.clone();
                for &(r, c) in &free {
                    mat[r * m + c] = (code % q as usize) as u8;
                    code /= q as usize;
                }
                out.push(mat);
            }
            return;
        }
        for p in start..m {
            pivots.push(p);
            pick(p + 1, m, k, pivots, q, out);
            pivots.pop();
        }
    }
    pick(0, m, k, &mut pivots, q, &mut out);
    out
}

/// Column operations on row bases.
#[derive(Debug, Clone, Copy)]
enum Generator {
    /// Column `to` += column `from`, i.e. right multiplication by
    /// `I + E_(from, to)`.
    AddColumn { from: usize, to: usize },
    /// Column `i` scaled by a generator of `F_q^*`.
    Scale { i: usize },
}

struct SliceEnumerator<'a> {
    tree: &'a LabeledTree,
    field: &'a SmallField,
    n: usize,
    /// Enumerated vertices, parents before children.
    free: Vec<usize>,
    fixed: &'a BTreeMap<usize, Vec<usize>>,
    generators: Vec<Generator>,
}

impl<'a> SliceEnumerator<'a> {
    fn new(tree: &'a LabeledTree, field: &'a SmallField, slice: &'a Slice) -> Self {
        let n = tree.ambient() as usize;
        let free = tree
            .bfs_order()
            .into_iter()
            .filter(|&v| v != tree.root() && !slice.fixed.contains_key(&v))
            .collect();
        // entry (a, b) may be nonzero iff a ∈ S ⇒ b ∈ S for every fixed S
        let mut member = vec![vec![false; n]; slice.fixed.len()];
        for (row, set) in member.iter_mut().zip(slice.fixed.values()) {
            for &a in set {
                row[a] = true;
            }
        }
        let allowed = |a: usize, b: usize| member.iter().all(|m| !m[a] || m[b]);
        let mut generators = Vec::new();
        if field.order() > 2 {
            generators.extend((0..n).map(|i| Generator::Scale { i }));
        }
        for a in 0..n {
            for b in 0..n {
                if a != b && allowed(a, b) {
                    generators.push(Generator::AddColumn { from: a, to: b });
                }
            }
        }
        SliceEnumerator {
            tree,
            field,
            n,
            free,
            fixed: &slice.fixed,
            generators,
        }
    }

    fn key_len(&self) -> usize {
        self.free
            .iter()
            .map(|&v| self.tree.label(v) as usize * self.n)
            .sum()
    }

    /// In-place reduced row echelon form of a `k × n` block.
    fn rref(&self, m: &mut [u8], k: usize) {
        let n = self.n;
        let f = self.field;
        let mut r = 0;
        for c in 0..n {
            if r == k {
                break;
            }
            let Some(pr) = (r..k).find(|&i| m[i * n + c] != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..n {
                    m.swap(pr * n + j, r * n + j);
                }
            }
            let inv = f.inv(m[r * n + c]);
            for j in 0..n {
                m[r * n + j] = f.mul(m[r * n + j], inv);
            }
            for i in 0..k {
                let factor = m[i * n + c];
                if i == r || factor == 0 {
                    continue;
                }
                let nf = f.neg(factor);
                for j in 0..n {
                    m[i * n + j] = f.add(m[i * n + j], f.mul(nf, m[r * n + j]));
                }
            }
            r += 1;
        }
    }

    /// Basis rows of the space of `v`'s target given the enumerated bases
    /// so far.
    fn parent_basis(&self, v: usize, chosen: &HashMap<usize, Vec<u8>>) -> Vec<u8> {
        let t = self.tree.parent(v).expect("non-root");
        let n = self.n;
        if t == self.tree.root() {
            let mut id = vec![0u8; n * n];
            for i in 0..n {
                id[i * n + i] = 1;
            }
            return id;
        }
        if let Some(set) = self.fixed.get(&t) {
            let mut rows = vec![0u8; set.len() * n];
            for (r, &a) in set.iter().enumerate() {
                rows[r * n + a] = 1;
            }
            return rows;
        }
        chosen[&t].clone()
    }

    fn points(&self) -> Vec<u8> {
        let mut keys = Vec::new();
        let mut chosen: HashMap<usize, Vec<u8>> = HashMap::new();
        let mut cache: HashMap<(usize, usize), Vec<Vec<u8>>> = HashMap::new();
        for &v in &self.free {
            let t = self.tree.parent(v).expect("non-root");
            let key = (self.tree.label(t) as usize, self.tree.label(v) as usize);
            cache
                .entry(key)
                .or_insert_with(|| rref_subspaces(key.0, key.1, self.field.order()));
        }
        self.extend(0, &mut chosen, &cache, &mut keys);
        keys
    }

    fn extend(
        &self,
        depth: usize,
        chosen: &mut HashMap<usize, Vec<u8>>,
        cache: &HashMap<(usize, usize), Vec<Vec<u8>>>,
        keys: &mut Vec<u8>,
    ) {
        if depth == self.free.len() {
            for v in &self.free {
                keys.extend_from_slice(&chosen[v]);
            }
            return;
        }
        let v = self.free[depth];
        let parent = self.parent_basis(v, chosen);
        let m = parent.len() / self.n;
        let k = self.tree.label(v) as usize;
        let f = self.field;
        for sub in &cache[&(m, k)] {
            // rows of sub · parent
            let mut basis = vec![0u8; k * self.n];
            for r in 0..k {
                for i in 0..m {
                    let c = sub[r * m + i];
                    if c == 0 {
                        continue;
                    }
                    for j in 0..self.n {
                        let idx = r * self.n + j;
                        basis[idx] = f.add(basis[idx], f.mul(c, parent[i * self.n + j]));
                    }
                }
            }
            self.rref(&mut basis, k);
            chosen.insert(v, basis);
            self.extend(depth + 1, chosen, cache, keys);
        }
        chosen.remove(&v);
    }

    fn apply(&self, g: Generator, key: &[u8], out: &mut Vec<u8>) {
        out.clear();
        out.extend_from_slice(key);
        let n = self.n;
        let f = self.field;
        let w = f.generator();
        for row in out.chunks_mut(n) {
            match g {
                Generator::AddColumn { from, to } => row[to] = f.add(row[to], row[from]),
                Generator::Scale { i } => row[i] = f.mul(row[i], w),
            }
        }
        let mut offset = 0;
        for &v in &self.free {
            let k = self.tree.label(v) as usize;
            self.rref(&mut out[offset..offset + k * n], k);
            offset += k * n;
        }
    }

    fn orbit_count(&self) -> u64 {
        let keys = self.points();
        let len = self.key_len();
        if len == 0 {
            return 1;
        }
        let count = keys.len() / len;
        let index: HashMap<&[u8], u32> = keys
            .chunks(len)
            .enumerate()
            .map(|(i, k)| (k, i as u32))
            .collect();
        let mut parent: Vec<u32> = (0..count as u32).collect();
        fn find(parent: &mut [u32], mut x: u32) -> u32 {
            while parent[x as usize] != x {
                let up = parent[parent[x as usize] as usize];
                parent[x as usize] = up;
                x = up;
            }
            x
        }
        let mut components = count as u64;
        let mut image = Vec::with_capacity(len);
        for (i, key) in keys.chunks(len).enumerate() {
            for &g in &self.generators {
                self.apply(g, key, &mut image);
                let j = *index
                    .get(image.as_slice())
                    .expect("the group preserves the slice");
                let (a, b) = (find(&mut parent, i as u32), find(&mut parent, j));
                if a != b {
                    parent[a.max(b) as usize] = a.min(b);
                    components -= 1;
                }
            }
        }
        components
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_tree_spec;

    fn tree(s: &str) -> LabeledTree {
        parse_tree_spec(s).unwrap()
    }

    fn count(s: &str, q: u64, slicing: Slicing) -> OrbitReport {
        let limits = OrbitLimits {
            cap: DEFAULT_CAP,
            slicing,
        };
        enumerate_orbits(&tree(s), q, &limits).unwrap()
    }

    #[test]
    fn gaussian_binomials() {
        assert_eq!(gaussian_binomial(2, 1, 3), 4);
        assert_eq!(gaussian_binomial(4, 2, 2), 35);
        assert_eq!(gaussian_binomial(6, 2, 3), 11011);
        assert_eq!(gaussian_binomial(5, 0, 4), 1);
        assert_eq!(gaussian_binomial(3, 4, 2), 0);
        for (m, q) in [(4, 2), (5, 3), (3, 4), (4, 5)] {
            for k in 0..=m {
                assert_eq!(
                    rref_subspaces(m, k, q as u8).len() as u64,
                    gaussian_binomial(m as u64, k as u64, q)
                );
            }
        }
    }

    #[test]
    fn projective_line() {
        let r = count("1>2", 3, Slicing::Auto);
        assert_eq!((r.point_count, r.orbit_count, r.limits_hit), (4, 1, false));
    }

    #[test]
    fn homogeneous_varieties_have_one_orbit() {
        for q in [2, 3, 4, 5] {
            assert_eq!(count("1>2>4", q, Slicing::Auto).orbit_count, 1);
            assert_eq!(count("2>4", q, Slicing::Auto).orbit_count, 1);
        }
    }

    #[test]
    fn pairs_of_subspaces() {
        // relative position of two planes in 4-space: dim of intersection 0, 1, 2
        for q in [2, 3, 4] {
            assert_eq!(count("a:2>r:4 | b:2>r", q, Slicing::Auto).orbit_count, 3);
        }
    }

    #[test]
    fn four_points_on_a_line() {
        let s = "a:1>r:2 | b:1>r | c:1>r | d:1>r";
        let r2 = count(s, 2, Slicing::Auto);
        let r3 = count(s, 3, Slicing::Auto);
        assert_eq!((r2.point_count, r2.orbit_count), (81, 14));
        assert_eq!((r3.point_count, r3.orbit_count), (256, 15));
    }

    #[test]
    fn slices_agree_with_full_enumeration() {
        let cases = [
            "a:1>r:3 | b:1>r | c:1>d:2>r",
            "a:1>r:3 | b:2>r | c:1>d:2>r",
            "a:1>b:2>r:4 | c:2>r",
            "a:1>b:2>r:3 | c:1>d:2>r | e:1>r",
            "a:1>m:2>r:3 | b:1>m | c:2>r",
            "a:1>r:2 | b:1>r | c:1>r | d:1>r",
        ];
        for s in cases {
            for q in [2, 3, 4] {
                if point_count(&tree(s), q) > DEFAULT_CAP {
                    continue;
                }
                let full = count(s, q, Slicing::Off);
                let para = count(s, q, Slicing::Parabolic);
                let double = count(s, q, Slicing::Double);
                assert_eq!(full.orbit_count, para.orbit_count, "{s} q={q} parabolic");
                assert_eq!(full.orbit_count, double.orbit_count, "{s} q={q} double");
                assert!(para.limits_hit && double.limits_hit && !full.limits_hit);
            }
        }
    }

    #[test]
    fn coordinate_representatives() {
        // flags of type (1,2) in 3-space up to the Borel: the 6 permutations
        assert_eq!(coordinate_flags(&[1, 2], 3, &[1, 2], 1000).len(), 6);
        // lines up to a parabolic with blocks {0,1},{2}: two orbits
        assert_eq!(coordinate_flags(&[1], 3, &[2], 1000).len(), 2);
        // nothing fixed: one orbit
        assert_eq!(coordinate_flags(&[2], 4, &[], 1000).len(), 1);
    }

    #[test]
    fn caps_and_fields() {
        let limits = OrbitLimits {
            cap: 10,
            slicing: Slicing::Off,
        };
        assert_eq!(
            enumerate_orbits(&tree("a:1>r:2 | b:1>r | c:1>r"), 3, &limits),
            Err(OrbitError::CapExceeded {
                cap: 10,
                projected: 64
            })
        );
        assert_eq!(
            enumerate_orbits(&tree("1>2"), 7, &OrbitLimits::default()),
            Err(OrbitError::UnsupportedField(7))
        );
        let r = enumerate_orbits(&tree("r:3"), 2, &OrbitLimits::default()).unwrap();
        assert_eq!((r.point_count, r.orbit_count), (1, 1));
    }
}
