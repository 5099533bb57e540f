//! Orbit classification from branch combinatorics, and the dimension test
//! for trivial sparseness.

use std::fmt;

use serde::Serialize;

use crate::tree::{Branch, LabeledTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OrbitKind {
    Homogeneous,
    TwoOrbits,
    FiniteType,
    InfiniteType,
}

impl OrbitKind {
    /// Finitely many orbits (and hence a dense one).
    pub fn is_finite(self) -> bool {
        self != OrbitKind::InfiniteType
    }
}

impl fmt::Display for OrbitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FiniteCase {
    #[serde(rename = "1")]
    AtMostTwoLeaves,
    #[serde(rename = "2a")]
    TwoShort,
    #[serde(rename = "2b")]
    ShortMedium,
    #[serde(rename = "2c")]
    ShortMediumLong,
    #[serde(rename = "2d")]
    ThinShort,
}

impl FiniteCase {
    pub fn label(self) -> &'static str {
        match self {
            FiniteCase::AtMostTwoLeaves => "1",
            FiniteCase::TwoShort => "2a",
            FiniteCase::ShortMedium => "2b",
            FiniteCase::ShortMediumLong => "2c",
            FiniteCase::ThinShort => "2d",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitClass {
    pub kind: OrbitKind,
    pub case_label: Option<FiniteCase>,
    pub witness: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SparsenessCheck {
    pub trivially_sparse: bool,
    pub violating_vertex: Option<String>,
    pub lhs: u64,
    pub rhs: u64,
}

fn describe(b: &[&Branch]) -> String {
    let lengths: Vec<String> = b.iter().map(|b| b.length.to_string()).collect();
    let widths: Vec<String> = b.iter().map(|b| b.min_width.to_string()).collect();
    format!(
        "lengths ({}), widths ({})",
        lengths.join(","),
        widths.join(",")
    )
}

/// The three-leaf case table. Roles are assigned in every order and the
/// first case (in the order 2a, 2b, 2c, 2d) matched by any assignment wins.
fn three_leaf_case(branches: &[Branch]) -> (Option<FiniteCase>, String) {
    const ORDERS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let assignments: Vec<[&Branch; 3]> = ORDERS
        .iter()
        .map(|o| [&branches[o[0]], &branches[o[1]], &branches[o[2]]])
        .collect();
    let find = |pred: &dyn Fn(&[&Branch; 3]) -> bool| assignments.iter().find(|a| pred(a)).copied();

    if let Some(a) = find(&|[x, y, _]| x.length == 1 && y.length == 1) {
        return (
            Some(FiniteCase::TwoShort),
            format!("{}: two branches of length 1", describe(&a)),
        );
    }
    if let Some(a) =
        find(&|[x, y, z]| x.length == 1 && y.length == 2 && (2..=4).contains(&z.length))
    {
        return (
            Some(FiniteCase::ShortMedium),
            format!("{}: lengths 1, 2 and at most 4", describe(&a)),
        );
    }
    let long_ok = |[x, y, z]: &[&Branch; 3]| {
        x.length == 1 && y.length == 2 && z.length >= 5 && (x.min_width <= 2 || y.min_width == 1)
    };
    if let Some(a) = find(&long_ok) {
        let why = if a[0].min_width <= 2 {
            format!(
                "width {} of the length-1 branch is at most 2",
                a[0].min_width
            )
        } else {
            "width of the length-2 branch is 1".to_string()
        };
        return (
            Some(FiniteCase::ShortMediumLong),
            format!(
                "{}: lengths 1, 2, {}; {why} (width condition read as <= 2)",
                describe(&a),
                a[2].length
            ),
        );
    }
    if let Some(a) = find(&|[x, _, _]| x.length == 1 && x.min_width == 1) {
        return (
            Some(FiniteCase::ThinShort),
            format!("{}: a branch of length 1 has width 1", describe(&a)),
        );
    }
    let sorted = {
        let mut b: Vec<&Branch> = branches.iter().collect();
        b.sort_by_key(|b| (b.length, b.min_width));
        b
    };
    let reason = if sorted[0].length > 1 {
        "no branch of length 1".to_string()
    } else if sorted[1].length == 2 && sorted[2].length >= 5 {
        "lengths 1, 2, >=5 but the length-1 branch has width >= 3 and the length-2 branch width >= 2"
            .to_string()
    } else {
        "no branch of length 1 has width 1".to_string()
    };
    (None, format!("{}: {reason}", describe(&sorted)))
}

/// Classifies the tree by its branches.
pub fn orbit_class(tree: &LabeledTree) -> OrbitClass {
    let branches = tree.branches();
    if tree.is_chain() {
        return OrbitClass {
            kind: OrbitKind::Homogeneous,
            case_label: None,
            witness: Some("the tree is a chain".into()),
        };
    }
    let all: Vec<&Branch> = branches.iter().collect();
    if branches.len() == 2
        && branches.iter().all(|b| b.length == 1)
        && branches.iter().any(|b| b.min_width == 1)
    {
        return OrbitClass {
            kind: OrbitKind::TwoOrbits,
            case_label: None,
            witness: Some(format!(
                "{}: two branches of length 1, one of width 1",
                describe(&all)
            )),
        };
    }
    match branches.len() {
        0..=2 => OrbitClass {
            kind: OrbitKind::FiniteType,
            case_label: Some(FiniteCase::AtMostTwoLeaves),
            witness: Some(format!("{}: at most two leaves", describe(&all))),
        },
        3 => {
            let (case, witness) = three_leaf_case(&branches);
            OrbitClass {
                kind: if case.is_some() {
                    OrbitKind::FiniteType
                } else {
                    OrbitKind::InfiniteType
                },
                case_label: case,
                witness: Some(witness),
            }
        }
        k => OrbitClass {
            kind: OrbitKind::InfiniteType,
            case_label: None,
            witness: Some(format!("{k} leaves")),
        },
    }
}

/// Checks `dim F(T^v) <= φ(v)^2 - 1` at every vertex, in name order. With
/// no violation the root's values are reported.
pub fn trivially_sparse(tree: &LabeledTree) -> SparsenessCheck {
    let dims = tree.subtree_dimensions();
    let rhs = |v: usize| tree.label(v) * tree.label(v) - 1;
    if let Some((v, &lhs)) = dims.iter().enumerate().find(|&(v, &d)| d > rhs(v)) {
        return SparsenessCheck {
            trivially_sparse: true,
            violating_vertex: Some(tree.name(v).to_string()),
            lhs,
            rhs: rhs(v),
        };
    }
    let r = tree.root();
    SparsenessCheck {
        trivially_sparse: false,
        violating_vertex: None,
        lhs: dims[r],
        rhs: rhs(r),
    }
}
