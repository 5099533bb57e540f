//! Terminal rules. Each returns the status it proves and a formula-style
//! citation of its hypothesis, or `None` when the hypothesis fails.

use super::{RuleId, Status};
use crate::classify::{orbit_class, trivially_sparse};
use crate::product::FlagProduct;
use crate::tree::LabeledTree;

pub(crate) struct Firing {
    pub rule: RuleId,
    pub status: Status,
    pub citation: String,
}

fn fire(rule: RuleId, status: Status, citation: String) -> Option<Firing> {
    Some(Firing {
        rule,
        status,
        citation,
    })
}

/// R0: finitely many orbits.
pub(crate) fn finite_type(tree: &LabeledTree) -> Option<Firing> {
    let class = orbit_class(tree);
    if !class.kind.is_finite() {
        return None;
    }
    let case = class
        .case_label
        .map(|c| format!(", case {}", c.label()))
        .unwrap_or_default();
    fire(
        RuleId::R0,
        Status::Dense,
        format!("finitely many orbits ⇒ dense orbit ({}{case})", class.kind),
    )
}

/// R1: some subtree is too large for its own projective linear group.
/// Reported as `TriviallySparse` only for the original instance (up to
/// isomorphism); after a reduction the conclusion is plain sparseness.
pub(crate) fn dimension_count(tree: &LabeledTree, original: bool) -> Option<Firing> {
    let check = trivially_sparse(tree);
    if !check.trivially_sparse {
        return None;
    }
    let v = check.violating_vertex.unwrap_or_default();
    fire(
        RuleId::R1,
        if original {
            Status::TriviallySparse
        } else {
            Status::Sparse
        },
        format!(
            "dim F(T^v) > φ(v)^2 − 1 at v = {v} ({} > {})",
            check.lhs, check.rhs
        ),
    )
}

/// R5: at every vertex the incoming labels fit into the vertex label.
pub(crate) fn easy_dense(tree: &LabeledTree) -> Option<Firing> {
    let ok = (0..tree.len())
        .all(|v| tree.children(v).iter().map(|&s| tree.label(s)).sum::<u64>() <= tree.label(v));
    if !ok {
        return None;
    }
    fire(
        RuleId::R5,
        Status::Dense,
        "Σ_{s→v} φ(s) ≤ φ(v) at every vertex v".into(),
    )
}

/// R2: a triple self-product with two entries summing to `n`.
pub(crate) fn complementary_pair(p: &FlagProduct) -> Option<Firing> {
    let k = p.self_power(3)?;
    let n = p.ambient();
    for i in 0..k.len() {
        for j in i + 1..k.len() {
            if k[i] + k[j] == n {
                return fire(
                    RuleId::R2,
                    Status::Sparse,
                    format!("F(k;n)^3 with k_i + k_j = n ({} + {} = {n})", k[i], k[j]),
                );
            }
        }
    }
    None
}

/// R3: triples of two-step flags.
pub(crate) fn two_step_triple(p: &FlagProduct) -> Option<Firing> {
    let k = p.self_power(3)?;
    let n = p.ambient();
    if k.len() != 2 {
        return None;
    }
    let sparse = k[0] + k[1] == n;
    fire(
        RuleId::R3,
        if sparse {
            Status::Sparse
        } else {
            Status::Dense
        },
        format!(
            "F(k1,k2;n)^3 sparse iff k1 + k2 = n ({} + {} {} {n})",
            k[0],
            k[1],
            if sparse { "=" } else { "≠" }
        ),
    )
}

/// R4: at most four Grassmannians.
pub(crate) fn few_grassmannians(p: &FlagProduct) -> Option<Firing> {
    let k = p.grassmannian_dims()?;
    let m = k.len();
    if m == 0 || m > 4 {
        return None;
    }
    let sum: u64 = k.iter().sum();
    let sparse = m == 4 && sum == 2 * p.ambient();
    fire(
        RuleId::R4,
        if sparse {
            Status::Sparse
        } else {
            Status::Dense
        },
        format!(
            "m ≤ 4 Grassmannians: sparse iff m = 4 and Σk = 2n (m = {m}, Σk = {sum}, n = {})",
            p.ambient()
        ),
    )
}

/// R6: triple self-product whose steps at least double.
pub(crate) fn doubling_triple(p: &FlagProduct) -> Option<Firing> {
    let k = p.self_power(3)?;
    let n = p.ambient();
    let r = k.len();
    let top_ok = 2 * k[r - 1] <= n;
    // 2 k_i <= k_{i+1} for 2 <= i <= r-1 (1-based)
    let steps_ok = (1..r.saturating_sub(1)).all(|i| 2 * k[i] <= k[i + 1]);
    if !(top_ok && steps_ok) {
        return None;
    }
    fire(
        RuleId::R6,
        Status::Dense,
        format!("F(k;n)^3 with 2k_r ≤ n and 2k_i ≤ k_(i+1) for 2 ≤ i ≤ r−1 (k = {k:?}, n = {n})"),
    )
}

/// R7: Grassmannians where one factor is small relative to the span of
/// the others.
pub(crate) fn grassmannian_span(p: &FlagProduct) -> Option<Firing> {
    let k = p.grassmannian_dims()?;
    let n = p.ambient();
    if k.len() < 2 {
        return None;
    }
    let total: u64 = k.iter().sum();
    for l in 0..k.len() {
        let s = total - k[l];
        let min = (0..k.len()).filter(|&i| i != l).map(|i| k[i]).min()?;
        if s <= n && k[l] + s <= n + min {
            return fire(
                RuleId::R7,
                Status::Dense,
                format!(
                    "Σ_(i≠l) k_i ≤ n and k_l ≤ n − Σ_(i≠l) k_i + min_(i≠l) k_i (k_l = {}, Σ = {s}, min = {min}, n = {n})",
                    k[l]
                ),
            );
        }
    }
    None
}

/// R8: five Grassmannians `(d1,d2,d3,d4,n−d5)` with `n ≥ Σd` and
/// `d1 ≤ .. ≤ d4 < d5`.
///
/// The boundary `d4 = d5` is excluded: there one of the four induced
/// subspaces of the `d5`-dimensional space is zero and the count of four
/// proper subspaces no longer applies (e.g. `G(1;6)^3 * G(3;6)^2` is dense
/// although `Σd = 2 d5`).
pub(crate) fn five_grassmannians(p: &FlagProduct) -> Option<Firing> {
    let k = p.grassmannian_dims()?;
    let n = p.ambient();
    if k.len() != 5 {
        return None;
    }
    for l in 0..5 {
        let d5 = n - k[l];
        let mut d: Vec<u64> = (0..5).filter(|&i| i != l).map(|i| k[i]).collect();
        d.sort_unstable();
        let sum: u64 = d.iter().sum();
        if n >= sum && d[3] < d5 {
            let sparse = sum == 2 * d5;
            return fire(
                RuleId::R8,
                if sparse { Status::Sparse } else { Status::Dense },
                format!(
                    "(d1,d2,d3,d4,n−d5) with n ≥ Σd, d4 < d5: dense iff Σd ≠ 2·d5 (d = {d:?}, d5 = {d5}, n = {n})"
                ),
            );
        }
    }
    None
}

/// Product rules in priority order. R5 sits between R4 and R6 and is
/// applied to the product's tree.
pub(crate) fn product_rules(p: &FlagProduct) -> Option<Firing> {
    complementary_pair(p)
        .or_else(|| two_step_triple(p))
        .or_else(|| few_grassmannians(p))
        .or_else(|| easy_dense(&p.to_tree()))
        .or_else(|| doubling_triple(p))
        .or_else(|| grassmannian_span(p))
        .or_else(|| five_grassmannians(p))
}
