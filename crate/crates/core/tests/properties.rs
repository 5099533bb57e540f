mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use treeorbit::engine::{decide, derived_sequence, Instance, Status};
use treeorbit::oracle::gaussian_binomial;
use treeorbit::parse::parse_tree_json;
use treeorbit::{
    orbit_class, parse_product_spec, parse_tree_spec, trivially_sparse, FlagProduct, LabeledTree,
};

fn tree_strategy(max_n: u64, max_vertices: usize) -> impl Strategy<Value = LabeledTree> {
    any::<u64>().prop_map(move |seed| {
        common::random_tree(&mut ChaCha8Rng::seed_from_u64(seed), max_n, max_vertices)
    })
}

fn product_strategy(max_n: u64, max_factors: usize) -> impl Strategy<Value = FlagProduct> {
    any::<u64>().prop_map(move |seed| {
        common::random_product(
            &mut ChaCha8Rng::seed_from_u64(seed),
            2,
            max_n,
            max_factors,
            4,
        )
    })
}

/// `log_q` of the point count, as a polynomial degree in `q`.
fn degree(m: u64, k: u64) -> u64 {
    k * (m - k)
}

proptest! {
    #[test]
    fn dimension_is_sum_of_grassmannians(t in tree_strategy(30, 12)) {
        let d: u64 = t.edges().map(|(s, p)| degree(t.label(p), t.label(s))).sum();
        prop_assert_eq!(t.dimension(), d);
    }

    #[test]
    fn point_count_grows_like_the_dimension(t in tree_strategy(6, 5)) {
        // the number of F_q points is q^dim + lower terms
        let q = 2u64;
        let points: u64 = t.edges().map(|(s, p)| gaussian_binomial(t.label(p), t.label(s), q)).product();
        let d = t.dimension() as u32;
        prop_assert!(points >= q.pow(d));
        prop_assert!(points < q.pow(d + t.len() as u32));
    }

    #[test]
    fn text_formats_round_trip(t in tree_strategy(30, 12)) {
        prop_assert_eq!(parse_tree_spec(&t.to_dsl()).unwrap(), t.clone());
        prop_assert_eq!(parse_tree_json(&t.canonical_json()).unwrap(), t);
    }

    #[test]
    fn trivially_sparse_matches_subtrees(t in tree_strategy(12, 10)) {
        let check = trivially_sparse(&t);
        let violated = t.names().iter().any(|v| {
            let sub = t.subtree_at(v).unwrap();
            let n = sub.ambient();
            sub.dimension() > n * n - 1
        });
        prop_assert_eq!(check.trivially_sparse, violated);
        if !violated {
            prop_assert_eq!((check.lhs, check.rhs), (t.dimension(), t.ambient() * t.ambient() - 1));
        }
    }

    #[test]
    fn forgetting_a_vertex(t in tree_strategy(12, 8), pick in any::<usize>()) {
        let non_root: Vec<&String> = t.names().iter().filter(|v| t.index_of(v) != Some(t.root())).collect();
        prop_assume!(!non_root.is_empty());
        let v = non_root[pick % non_root.len()];
        let i = t.index_of(v).unwrap();
        let (smaller, surjective) = t.forget_vertex(v).unwrap();
        prop_assert_eq!(smaller.len(), t.len() - 1);
        let incoming: u64 = t.children(i).iter().map(|&c| t.label(c)).sum();
        prop_assert_eq!(surjective, incoming <= t.label(i));
        if surjective {
            prop_assert!(smaller.dimension() <= t.dimension());
        }
        prop_assert!(t.forget_vertex(t.name(t.root())).is_err());
    }

    #[test]
    fn duality_and_canonical_form(p in product_strategy(9, 5)) {
        prop_assert_eq!(p.dual().dual(), p.clone());
        prop_assert_eq!(p.dual().dimension(), p.dimension());
        prop_assert_eq!(p.canonical(), p.dual().canonical());
        prop_assert_eq!(p.canonical().canonical(), p.canonical());
        prop_assert_eq!(p.to_tree().dimension(), p.dimension());
        prop_assert_eq!(parse_product_spec(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn finite_type_is_dense(t in tree_strategy(9, 8)) {
        let class = orbit_class(&t);
        if class.kind.is_finite() {
            prop_assert_eq!(decide(&Instance::Tree(t.clone())).unwrap().status, Status::Dense);
            prop_assert!(!trivially_sparse(&t).trivially_sparse);
        }
        if t.leaves().len() >= 4 {
            prop_assert!(!class.kind.is_finite());
        }
    }

    #[test]
    fn trivially_sparse_is_never_dense(t in tree_strategy(6, 9)) {
        let status = decide(&Instance::Tree(t.clone())).unwrap().status;
        if trivially_sparse(&t).trivially_sparse {
            prop_assert_eq!(status, Status::TriviallySparse);
        }
    }

    #[test]
    fn derived_sequences(k in proptest::collection::btree_set(1u64..20, 1..6), d in 0i64..20) {
        let k: Vec<u64> = k.into_iter().collect();
        let n = 20;
        let derived = derived_sequence(&k, d, n).unwrap();
        prop_assert!(derived.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(derived.len(), k.iter().filter(|&&x| x as i64 > d).count());
        prop_assert!(derived.iter().all(|&x| x + d as u64 <= 19));
    }

    #[test]
    fn parsing_is_total(s in "\\PC{0,40}") {
        let _ = parse_tree_spec(&s);
        let _ = parse_product_spec(&s);
    }

    #[test]
    fn dsl_like_inputs_parse_or_fail_cleanly(s in "[a-c0-9:>| ]{0,30}") {
        if let Ok(t) = parse_tree_spec(&s) {
            prop_assert!(t.edges().all(|(a, b)| t.label(a) < t.label(b)));
        }
    }
}
