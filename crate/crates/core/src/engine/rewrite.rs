//! Density-preserving rewrites between instances.

use thiserror::Error;

use crate::product::FlagProduct;
use crate::tree::LabeledTree;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("derived sequence needs 0 <= d < n, got d = {d}, n = {n}")]
pub struct BadRange {
    pub d: i64,
    pub n: u64,
}

/// Dimension vector of a generic flag of type `k` intersected with a
/// generic subspace of codimension `d`: every entry above `d`, shifted down
/// by `d`.
pub fn derived_sequence(k: &[u64], d: i64, n: u64) -> Result<Vec<u64>, BadRange> {
    if d < 0 || d as u64 >= n {
        return Err(BadRange { d, n });
    }
    let d = d as u64;
    Ok(k.iter().filter(|&&x| x > d).map(|&x| x - d).collect())
}

/// Span reduction: the top spaces of all factors but one span a subspace
/// of dimension `n' = Σ tops <= n` while all tops together exceed `n`.
/// Factors are scanned in order for the one left out; the first that
/// yields `n' < n` is replaced by its derived sequence and the ambient
/// drops to `n'`.
pub fn reduce_span(p: &FlagProduct) -> Option<FlagProduct> {
    let n = p.ambient();
    if p.len() < 2 {
        return None;
    }
    let tops: Vec<u64> = p
        .factors()
        .iter()
        .map(|f| *f.last().expect("factors are nonempty"))
        .collect();
    let total: u64 = tops.iter().sum();
    if total <= n {
        return None;
    }
    let ell = (0..p.len()).find(|&l| total - tops[l] < n)?;
    let n_prime = total - tops[ell];
    let mut factors: Vec<Vec<u64>> = p.factors().to_vec();
    factors[ell] = derived_sequence(&factors[ell], (n - n_prime) as i64, n).expect("0 < d < n");
    Some(FlagProduct::trimmed(factors, n_prime))
}

/// Half reduction for a triple self-product with `n = 2 k_r`: drop the top
/// entry and shrink the ambient to `k_r`. An empty prefix yields the point.
pub fn reduce_half(p: &FlagProduct) -> Option<FlagProduct> {
    let factor = p.self_power(3)?;
    let (&top, prefix) = factor.split_last()?;
    if p.ambient() != 2 * top {
        return None;
    }
    Some(FlagProduct::trimmed(vec![prefix.to_vec(); 3], top))
}

/// Walks from `v` toward the root, collecting labels of vertices with a
/// single incoming edge, and returns them (bottom first) together with the
/// first vertex that has several.
fn chain_up(tree: &LabeledTree, leaf: usize) -> (Vec<usize>, usize) {
    let mut chain = vec![leaf];
    let mut cur = leaf;
    loop {
        let p = tree.parent(cur).expect("chains stop below the root");
        if tree.children(p).len() >= 2 {
            return (chain, p);
        }
        chain.push(p);
        cur = p;
    }
}

/// Three-leaf trees whose leaves meet in two junctions (or one non-root
/// junction) reduce to a triple product with ambient `m' = φ(lower
/// junction)`: the two flags below the lower junction, and the flag joining
/// at the upper junction `m` derived with respect to `m - m'`.
pub fn tree_to_product(tree: &LabeledTree) -> Option<FlagProduct> {
    let leaves = tree.leaves();
    if leaves.len() != 3 || tree.as_flag_product().is_some() {
        return None;
    }
    let chains: Vec<(Vec<usize>, usize)> = leaves.iter().map(|&l| chain_up(tree, l)).collect();
    let label_flag = |c: &[usize]| c.iter().map(|&v| tree.label(v)).collect::<Vec<u64>>();

    // the lower junction is where two of the leaf chains stop
    let low = (0..3).find_map(|i| {
        let j = chains[i].1;
        let partner = (0..3).find(|&k| k != i && chains[k].1 == j)?;
        Some((i, partner, j))
    })?;
    let (a, b, j_low) = low;
    let c = 3 - a - b;
    let m_prime = tree.label(j_low);
    if chains[c].1 == j_low {
        // all three meet at one vertex below the root
        let factors = vec![
            label_flag(&chains[a].0),
            label_flag(&chains[b].0),
            label_flag(&chains[c].0),
        ];
        return Some(FlagProduct::trimmed(factors, m_prime));
    }
    let j_high = chains[c].1;
    if !tree.is_below(j_low, j_high) {
        return None;
    }
    let m = tree.label(j_high);
    let third = derived_sequence(&label_flag(&chains[c].0), (m - m_prime) as i64, m).ok()?;
    let factors = vec![label_flag(&chains[a].0), label_flag(&chains[b].0), third];
    Some(FlagProduct::trimmed(factors, m_prime))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_product_spec, parse_tree_spec};

    fn prod(s: &str) -> FlagProduct {
        parse_product_spec(s).unwrap()
    }

    #[test]
    fn derived_examples() {
        assert_eq!(derived_sequence(&[1, 3, 5], 2, 7).unwrap(), vec![1, 3]);
        assert_eq!(derived_sequence(&[1, 3, 5], 0, 7).unwrap(), vec![1, 3, 5]);
        assert_eq!(derived_sequence(&[2, 5], 2, 7).unwrap(), vec![3]);
        assert_eq!(derived_sequence(&[2, 5], 5, 7).unwrap(), Vec::<u64>::new());
        assert!(derived_sequence(&[2, 5], 7, 7).is_err());
        assert!(derived_sequence(&[2, 5], -1, 7).is_err());
    }

    #[test]
    fn span_examples() {
        assert_eq!(
            reduce_span(&prod("G(2;5)^2*G(3;5)")).unwrap(),
            prod("G(2;4)^3")
        );
        assert_eq!(reduce_span(&prod("G(1;5)^3")), None);
        // three successive reductions of F(1,2;5)^3
        let a = reduce_span(&prod("F(1,2;5)^3")).unwrap();
        assert_eq!(a, prod("G(1;4)*F(1,2;4)^2"));
        let b = reduce_span(&a).unwrap();
        assert_eq!(b.ambient(), 3);
        assert!(b.ambient() < a.ambient());
    }

    #[test]
    fn half_examples() {
        assert_eq!(reduce_half(&prod("F(1,3;6)^3")).unwrap(), prod("G(1;3)^3"));
        let point = reduce_half(&prod("G(2;4)^3")).unwrap();
        assert!(point.is_empty());
        assert_eq!(point.ambient(), 2);
        assert_eq!(reduce_half(&prod("F(1,3;7)^3")), None);
        assert_eq!(reduce_half(&prod("F(1,3;6)^2")), None);
    }

    #[test]
    fn tree_reduction() {
        let t = parse_tree_spec("a:2>b:4>c:6>r:8 | x:1>b | y:3>c").unwrap();
        let p = tree_to_product(&t).unwrap();
        assert_eq!(
            p.canonical(),
            FlagProduct::new(vec![vec![1], vec![1], vec![2]], 4)
                .unwrap()
                .canonical()
        );
        assert_eq!(p.sorted(), prod("G(1;4)^2*G(2;4)"));
        assert_eq!(
            tree_to_product(&parse_tree_spec("1>2>4 | 3>4").unwrap()),
            None
        );
        assert_eq!(
            tree_to_product(&parse_tree_spec("a:1>r:3 | b:1>r | c:2>r").unwrap()),
            None
        );
    }

    #[test]
    fn single_junction_below_root() {
        let t = parse_tree_spec("a:1>j:4>r:6 | b:2>j | c:3>j").unwrap();
        assert_eq!(
            tree_to_product(&t).unwrap().sorted(),
            prod("G(1;4)*G(2;4)*G(3;4)")
        );
    }
}
