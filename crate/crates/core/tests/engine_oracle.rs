//! Engine verdicts against numerical certificates, and orbit counts against
//! Burnside's lemma.

mod common;

use common::{random_product, rng, P};
use treeorbit::engine::{decide, Instance, RuleId, Status};
use treeorbit::oracle::{certify_density, enumerate_orbits, OrbitLimits, SmallField};
use treeorbit::{parse_product_spec, parse_tree_spec, FlagProduct};

fn certified(p: &FlagProduct) -> bool {
    certify_density(&p.to_tree(), P, 3, 11)
        .unwrap()
        .certified_dense
}

#[test]
fn decided_products_agree_with_the_oracle() {
    let mut r = rng(12);
    let mut decided = 0;
    for _ in 0..300 {
        let p = random_product(&mut r, 2, 8, 5, 3);
        let v = decide(&Instance::Product(p.clone())).unwrap();
        match v.status {
            Status::Dense => assert!(certified(&p), "{p} is Dense but not certified"),
            Status::Sparse | Status::TriviallySparse => {
                assert!(!certified(&p), "{p} is sparse but certified")
            }
            Status::Unknown => continue,
        }
        decided += 1;
    }
    assert!(decided > 150, "only {decided} decided");
}

#[test]
fn all_grassmannian_triples_and_quadruples() {
    for n in 2..=7u64 {
        for a in 1..n {
            for b in a..n {
                for c in b..n {
                    for d in std::iter::once(None).chain((c..n).map(Some)) {
                        let mut factors = vec![vec![a], vec![b], vec![c]];
                        factors.extend(d.map(|d| vec![d]));
                        let p = FlagProduct::new(factors, n).unwrap();
                        let status = decide(&Instance::Product(p.clone())).unwrap().status;
                        if status != Status::Unknown {
                            assert_eq!(status == Status::Dense, certified(&p), "{p}: {status}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn five_grassmannians_with_equal_top_pair_stay_open() {
    // sums to twice the largest, but the two largest coincide; the oracle
    // finds a dense orbit
    let p = parse_product_spec("G(1;6)^3*G(3;6)^2").unwrap();
    let v = decide(&Instance::Product(p.clone())).unwrap();
    assert_ne!(v.status, Status::Sparse);
    assert!(v.trace.iter().all(|s| s.rule_id != RuleId::R8));
    assert!(certified(&p));
}

#[test]
fn many_grassmannian_example() {
    let p = parse_product_spec("G(1;8)^2*G(2;8)^2*G(3;8)").unwrap();
    let v = decide(&Instance::Product(p.clone())).unwrap();
    assert_eq!(v.status, Status::Dense);
    assert_eq!(v.trace.last().unwrap().rule_id, RuleId::R7);
    assert!(certified(&p));
}

#[test]
fn tree_rewrites_agree_with_the_oracle() {
    let t = parse_tree_spec("a1:1>a2:2>m:4>r:7 | b1:1>b2:3>m | c1:2>c2:4>c3:5>r").unwrap();
    let v = decide(&Instance::Tree(t.clone())).unwrap();
    assert_eq!(v.trace[0].rule_id, RuleId::TreeToProduct);
    let after = parse_product_spec(&v.trace[0].after).unwrap();
    assert_eq!(
        certify_density(&t, P, 3, 0).unwrap().certified_dense,
        certified(&after)
    );
}

/// Orbits of `GL(2, q)` on ordered `k`-tuples of points of the projective
/// line, by averaging fixed points over the group.
fn burnside_points_on_a_line(q: u64, k: u32) -> u64 {
    let f = SmallField::new(q).unwrap();
    let elems: Vec<u8> = (0..q as u8).collect();
    // normalized representatives: (1, x) and (0, 1)
    let mut points: Vec<[u8; 2]> = elems.iter().map(|&x| [1, x]).collect();
    points.push([0, 1]);
    let same = |u: [u8; 2], v: [u8; 2]| f.add(f.mul(u[0], v[1]), f.neg(f.mul(u[1], v[0]))) == 0;
    let mut total = 0u64;
    let mut order = 0u64;
    for &a in &elems {
        for &b in &elems {
            for &c in &elems {
                for &d in &elems {
                    let det = f.add(f.mul(a, d), f.neg(f.mul(b, c)));
                    if det == 0 {
                        continue;
                    }
                    order += 1;
                    let fixed = points
                        .iter()
                        .filter(|&&[x, y]| {
                            let image = [
                                f.add(f.mul(x, a), f.mul(y, c)),
                                f.add(f.mul(x, b), f.mul(y, d)),
                            ];
                            same(image, [x, y])
                        })
                        .count() as u64;
                    total += fixed.pow(k);
                }
            }
        }
    }
    assert_eq!(total % order, 0);
    total / order
}

#[test]
fn four_points_burnside() {
    assert_eq!(burnside_points_on_a_line(2, 4), 14);
    assert_eq!(burnside_points_on_a_line(3, 4), 15);
    let spec = "a:1>r:2 | b:1>r | c:1>r | d:1>r";
    let t = parse_tree_spec(spec).unwrap();
    for q in [2, 3, 4, 5] {
        let r = enumerate_orbits(&t, q, &OrbitLimits::default()).unwrap();
        assert_eq!(r.orbit_count, burnside_points_on_a_line(q, 4), "q = {q}");
    }
}

#[test]
fn five_points_burnside() {
    let t = parse_tree_spec("a:1>r:2 | b:1>r | c:1>r | d:1>r | e:1>r").unwrap();
    for q in [2, 3, 4] {
        let r = enumerate_orbits(&t, q, &OrbitLimits::default()).unwrap();
        assert_eq!(r.orbit_count, burnside_points_on_a_line(q, 5), "q = {q}");
    }
}
