//! Density decisions by rewriting and terminal rules, with a full trace.

mod rewrite;
mod rules;

use std::borrow::Cow;
use std::fmt;

use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

pub use rewrite::{derived_sequence, reduce_half, reduce_span, tree_to_product, BadRange};

use crate::product::FlagProduct;
use crate::tree::LabeledTree;
use rules::Firing;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    Tree(LabeledTree),
    Product(FlagProduct),
}

impl Instance {
    /// The tree variety underlying the instance.
    pub fn tree(&self) -> Cow<'_, LabeledTree> {
        match self {
            Instance::Tree(t) => Cow::Borrowed(t),
            Instance::Product(p) => Cow::Owned(p.to_tree()),
        }
    }

    pub fn dimension(&self) -> u64 {
        match self {
            Instance::Tree(t) => t.dimension(),
            Instance::Product(p) => p.dimension(),
        }
    }
}

impl From<LabeledTree> for Instance {
    fn from(t: LabeledTree) -> Self {
        Instance::Tree(t)
    }
}

impl From<FlagProduct> for Instance {
    fn from(p: FlagProduct) -> Self {
        Instance::Product(p)
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instance::Tree(t) => write!(f, "{t}"),
            Instance::Product(p) => write!(f, "{p}"),
        }
    }
}

impl Serialize for Instance {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Status {
    Dense,
    Sparse,
    TriviallySparse,
    Unknown,
}

impl Status {
    /// Sparse in either form.
    pub fn is_sparse(self) -> bool {
        matches!(self, Status::Sparse | Status::TriviallySparse)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RuleId {
    R0,
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
    R9,
    #[serde(rename = "normalize")]
    Normalize,
    #[serde(rename = "as-product")]
    AsProduct,
    #[serde(rename = "reduce-span")]
    ReduceSpan,
    #[serde(rename = "reduce-half")]
    ReduceHalf,
    #[serde(rename = "tree-to-product")]
    TreeToProduct,
}

impl RuleId {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleId::R0 => "R0",
            RuleId::R1 => "R1",
            RuleId::R2 => "R2",
            RuleId::R3 => "R3",
            RuleId::R4 => "R4",
            RuleId::R5 => "R5",
            RuleId::R6 => "R6",
            RuleId::R7 => "R7",
            RuleId::R8 => "R8",
            RuleId::R9 => "R9",
            RuleId::Normalize => "normalize",
            RuleId::AsProduct => "as-product",
            RuleId::ReduceSpan => "reduce-span",
            RuleId::ReduceHalf => "reduce-half",
            RuleId::TreeToProduct => "tree-to-product",
        }
    }

    pub fn is_terminal(self) -> bool {
        !matches!(
            self,
            RuleId::Normalize
                | RuleId::AsProduct
                | RuleId::ReduceSpan
                | RuleId::ReduceHalf
                | RuleId::TreeToProduct
        )
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One applied rewrite or rule. For terminal rules `after` is the status.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Step {
    pub rule_id: RuleId,
    pub citation: String,
    pub before: String,
    pub after: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub status: Status,
    pub trace: Vec<Step>,
    /// The instance no rule could decide; present only for `Unknown`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduced: Option<Instance>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineConfig {
    pub max_iterations: usize,
    /// Nesting depth of the search over surjective single-vertex deletions.
    pub r9_depth: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            max_iterations: 256,
            r9_depth: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("rewrite loop exceeded {limit} iterations")]
    IterationLimit { limit: usize },
}

pub fn decide(x: &Instance) -> Result<Verdict, EngineError> {
    decide_with(x, &EngineConfig::default())
}

fn step(rule_id: RuleId, citation: String, before: &Instance, after: impl ToString) -> Step {
    Step {
        rule_id,
        citation,
        before: before.to_string(),
        after: after.to_string(),
    }
}

/// Terminal rules on the current instance; product rules are also tried on
/// the dual, in which case a `normalize` step records the switch.
fn terminal(cur: &Instance, original: bool) -> Option<(Vec<Step>, Status)> {
    let tree = cur.tree();
    let done = |f: Firing, pre: Vec<Step>| {
        let status = f.status;
        let mut steps = pre;
        steps.push(step(f.rule, f.citation, cur, status));
        Some((steps, status))
    };
    if let Some(f) = rules::finite_type(&tree) {
        return done(f, vec![]);
    }
    if let Some(f) = rules::dimension_count(&tree, original) {
        return done(f, vec![]);
    }
    match cur {
        Instance::Tree(t) => rules::easy_dense(t).and_then(|f| done(f, vec![])),
        Instance::Product(p) => {
            if let Some(f) = rules::product_rules(p) {
                return done(f, vec![]);
            }
            let dual = p.dual();
            let f = rules::product_rules(&dual)?;
            let switch = step(
                RuleId::Normalize,
                "F(k;n) ≅ F(n−k;n) by duality".into(),
                cur,
                &dual,
            );
            let status = f.status;
            Some((
                vec![
                    switch,
                    step(f.rule, f.citation, &Instance::Product(dual), status),
                ],
                status,
            ))
        }
    }
}

struct Rewrite {
    rule: RuleId,
    citation: String,
    next: Instance,
    /// Only an isomorphism of varieties, not a reduction.
    iso: bool,
}

fn on_self_or_dual(
    p: &FlagProduct,
    f: impl Fn(&FlagProduct) -> Option<(FlagProduct, String)>,
) -> Option<(FlagProduct, String)> {
    f(p).or_else(|| f(&p.dual()).map(|(q, c)| (q, format!("{c}, applied to the dual"))))
}

fn rewrite(cur: &Instance) -> Option<Rewrite> {
    match cur {
        Instance::Tree(t) => {
            if let Some(p) = t.as_flag_product() {
                return Some(Rewrite {
                    rule: RuleId::AsProduct,
                    citation: "chains joined only at the root = product of flag varieties".into(),
                    next: Instance::Product(p),
                    iso: true,
                });
            }
            let p = tree_to_product(t)?;
            Some(Rewrite {
                rule: RuleId::TreeToProduct,
                citation: format!(
                    "three leaves: flags below the lower junction and the upper flag derived, in dimension m' = {}",
                    p.ambient()
                ),
                next: Instance::Product(p),
                iso: false,
            })
        }
        Instance::Product(p) => {
            let canon = p.canonical();
            if &canon != p {
                return Some(Rewrite {
                    rule: RuleId::Normalize,
                    citation: "factor order and duality F(k;n) ≅ F(n−k;n) preserve density".into(),
                    next: Instance::Product(canon),
                    iso: true,
                });
            }
            let span = on_self_or_dual(p, |q| {
                let next = reduce_span(q)?;
                let c = format!(
                    "n' = Σ_(i≠l) top_i = {} ≤ n < Σ top_i; factor l replaced by its derived sequence, d = {}",
                    next.ambient(),
                    q.ambient() - next.ambient()
                );
                Some((next, c))
            });
            if let Some((next, citation)) = span {
                return Some(Rewrite {
                    rule: RuleId::ReduceSpan,
                    citation,
                    next: Instance::Product(next),
                    iso: false,
                });
            }
            let half = on_self_or_dual(p, |q| {
                let next = reduce_half(q)?;
                Some((
                    next,
                    "F(k_1..k_r;2k_r)^3 → F(k_1..k_(r−1);k_r)^3".to_string(),
                ))
            });
            half.map(|(next, citation)| Rewrite {
                rule: RuleId::ReduceHalf,
                citation,
                next: Instance::Product(next),
                iso: false,
            })
        }
    }
}

/// Searches surjective single-vertex deletions for a sparse image.
fn propagate(cur: &Instance, config: &EngineConfig) -> Result<Option<Vec<Step>>, EngineError> {
    let tree = cur.tree();
    let sub_config = EngineConfig {
        r9_depth: config.r9_depth - 1,
        ..*config
    };
    let candidates: Vec<usize> = (0..tree.len()).filter(|&v| v != tree.root()).collect();
    let results: Vec<Option<(usize, Instance, Verdict)>> = candidates
        .par_iter()
        .map(|&v| {
            let (image, surjective) = tree.forget_index(v);
            if !surjective {
                return Ok(None);
            }
            let image = Instance::Tree(image);
            let verdict = decide_with(&image, &sub_config)?;
            Ok(verdict.status.is_sparse().then_some((v, image, verdict)))
        })
        .collect::<Result<_, EngineError>>()?;
    Ok(results
        .into_iter()
        .flatten()
        .next()
        .map(|(v, image, verdict)| {
            let mut steps = verdict.trace;
            steps.push(step(
                RuleId::R9,
                format!(
                    "surjective forgetful image is sparse: forget {} → {image}",
                    tree.name(v)
                ),
                cur,
                Status::Sparse,
            ));
            steps
        }))
}

pub fn decide_with(x: &Instance, config: &EngineConfig) -> Result<Verdict, EngineError> {
    let mut cur = x.clone();
    let mut trace = Vec::new();
    let mut original = true;
    for _ in 0..config.max_iterations {
        if let Some((steps, status)) = terminal(&cur, original) {
            trace.extend(steps);
            return Ok(Verdict {
                status,
                trace,
                reduced: None,
            });
        }
        if let Some(rw) = rewrite(&cur) {
            trace.push(step(rw.rule, rw.citation, &cur, &rw.next));
            original &= rw.iso;
            cur = rw.next;
            continue;
        }
        if config.r9_depth > 0 {
            if let Some(steps) = propagate(&cur, config)? {
                trace.extend(steps);
                return Ok(Verdict {
                    status: Status::Sparse,
                    trace,
                    reduced: None,
                });
            }
        }
        return Ok(Verdict {
            status: Status::Unknown,
            trace,
            reduced: Some(cur),
        });
    }
    Err(EngineError::IterationLimit {
        limit: config.max_iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_product_spec, parse_tree_spec};

    fn run(s: &str) -> Verdict {
        let x = if s.starts_with('F') || s.starts_with('G') {
            Instance::Product(parse_product_spec(s).unwrap())
        } else {
            Instance::Tree(parse_tree_spec(s).unwrap())
        };
        decide(&x).unwrap()
    }

    fn last_rule(v: &Verdict) -> RuleId {
        v.trace.last().unwrap().rule_id
    }

    #[test]
    fn examples() {
        let v = run("F(1,2;4)^3");
        assert_eq!((v.status, last_rule(&v)), (Status::Dense, RuleId::R3));
        let v = run("F(2,3;5)^3");
        assert_eq!((v.status, last_rule(&v)), (Status::Sparse, RuleId::R2));
        assert!(v.trace.last().unwrap().citation.contains("k_i + k_j = n"));
        let v = run("F(2,4;6)^3");
        assert_eq!(
            (v.status, last_rule(&v)),
            (Status::TriviallySparse, RuleId::R1)
        );
        let v = run("G(1;5)*G(2;5)^2");
        assert_eq!(v.status, Status::Dense);
        let v = run("F(1,2,4;8)^3");
        assert_eq!((v.status, last_rule(&v)), (Status::Dense, RuleId::R6));
        let v = run("G(1;7)^2*G(2;7)^2*G(4;7)");
        assert_eq!((v.status, last_rule(&v)), (Status::Sparse, RuleId::R8));
    }

    #[test]
    fn cross_ratio_example_is_unknown() {
        let v = run("a:1>m:3>n:5 | b:1>m | c:2>m | d:2>m");
        assert_eq!(v.status, Status::Unknown);
        assert!(v.reduced.is_some());
    }

    #[test]
    fn trees_become_products() {
        let v = run("a1:1>a2:2>m:4>r:7 | b1:1>b2:3>m | c1:2>c2:4>c3:5>r");
        assert_eq!(v.trace[0].rule_id, RuleId::TreeToProduct);
        assert_eq!(v.trace[0].after, "F(1,2;4)*F(1,3;4)*F(1,2;4)");
        // finite type is settled before any rewrite
        let v = run("a:2>b:4>c:6>r:8 | x:1>b | y:3>c");
        assert_eq!((v.trace.len(), v.trace[0].rule_id), (1, RuleId::R0));
    }

    #[test]
    fn trivially_sparse_triples() {
        for s in ["F(1,2;3)^3", "F(2,4;6)^3", "F(3,6;9)^3"] {
            assert_eq!(run(s).status, Status::TriviallySparse);
        }
    }

    #[test]
    fn half_reduction() {
        let v = run("F(2,5,6;12)^3");
        let rules: Vec<RuleId> = v.trace.iter().map(|s| s.rule_id).collect();
        assert_eq!(rules, vec![RuleId::ReduceHalf, RuleId::R3]);
        assert_eq!(v.trace[0].after, "F(2,5;6)^3");
        assert_eq!(v.status, Status::Dense);
    }

    #[test]
    fn unknown_when_nothing_fires() {
        let cfg = EngineConfig {
            r9_depth: 0,
            ..EngineConfig::default()
        };
        let x = Instance::Tree(parse_tree_spec("a:1>m:3>n:5 | b:1>m | c:2>m | d:2>m").unwrap());
        let v = decide_with(&x, &cfg).unwrap();
        assert_eq!(v.status, Status::Unknown);
        assert!(v.trace.is_empty());
    }

    #[test]
    fn iteration_limit() {
        let cfg = EngineConfig {
            max_iterations: 0,
            r9_depth: 0,
        };
        let x = Instance::Product(parse_product_spec("F(1,2;4)^3").unwrap());
        assert_eq!(
            decide_with(&x, &cfg),
            Err(EngineError::IterationLimit { limit: 0 })
        );
    }

    #[test]
    fn verdict_json() {
        let v = run("F(2,3;5)^3");
        let json = serde_json::to_value(&v).unwrap();
        assert_eq!(json["status"], "Sparse");
        assert_eq!(json["trace"][0]["rule_id"], "R2");
        assert!(json.get("reduced").is_none());
    }
}
