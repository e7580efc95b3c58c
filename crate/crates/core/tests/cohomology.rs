mod common;

use modcomp_core::nodalcoh::{cohomology, h0_tree, h1_tree};
use modcomp_core::DegreeTree;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn arb_tree(max_vertices: usize, lo: i64, hi: i64) -> impl Strategy<Value = DegreeTree> {
    (1..=max_vertices).prop_flat_map(move |n| {
        let parents: Vec<BoxedStrategy<usize>> = (1..n).map(|i| (0..i).boxed()).collect();
        (proptest::collection::vec(lo..=hi, n), parents).prop_map(|(degrees, parents)| {
            let edges = parents.into_iter().enumerate().map(|(i, p)| (p, i + 1)).collect();
            DegreeTree::new(degrees, edges).unwrap()
        })
    })
}

#[test]
fn oracle_agrees_with_reference_values() {
    let mut rng = StdRng::seed_from_u64(1);
    for (t, want) in [
        (DegreeTree::single(2), 3),
        (DegreeTree::path(vec![2, -2]), 2),
        (DegreeTree::path(vec![1, 1, -1, -1]), 2),
        (DegreeTree::new(vec![0, 1, 1, 1], vec![(0, 1), (0, 2), (0, 3)]).unwrap(), 4),
    ] {
        assert_eq!(h0_tree(&t), want);
        assert_eq!(common::h0_prime_field(&t, &mut rng), want);
    }
}

#[test]
fn deterministic_positions_match_random_positions() {
    for seed in [11, 12, 13] {
        let mut rng = StdRng::seed_from_u64(seed);
        for _ in 0..150 {
            let t = common::random_degree_tree(&mut rng, 8, -4, 4);
            assert_eq!(h0_tree(&t), common::h0_prime_field(&t, &mut rng), "seed {seed}: {t:?}");
        }
    }
}

#[test]
fn edge_order_does_not_matter() {
    let mut rng = StdRng::seed_from_u64(5);
    for _ in 0..200 {
        let t = common::random_degree_tree(&mut rng, 7, -3, 3);
        let mut edges = t.edges().to_vec();
        edges.reverse();
        let flipped: Vec<(usize, usize)> = edges.iter().map(|&(a, b)| (b, a)).collect();
        let u = DegreeTree::new(t.degrees().to_vec(), flipped).unwrap();
        assert_eq!(h0_tree(&t), h0_tree(&u));
    }
}

proptest! {
    #[test]
    fn euler_characteristic(t in arb_tree(8, -4, 4)) {
        let c = cohomology(&t);
        prop_assert_eq!(c.h0 as i64 - c.h1 as i64, t.total_degree() + 1);
    }

    #[test]
    fn h0_nondecreasing_in_one_degree(t in arb_tree(7, -4, 4), pick in any::<prop::sample::Index>()) {
        let v = pick.index(t.num_vertices());
        let mut deg = t.degrees().to_vec();
        deg[v] += 1;
        let bigger = DegreeTree::new(deg, t.edges().to_vec()).unwrap();
        prop_assert!(h0_tree(&bigger) >= h0_tree(&t));
    }

    #[test]
    fn nonnegative_degrees_with_room_at_every_node(t in arb_tree(7, 0, 4)) {
        let val = |v: usize| t.edges().iter().filter(|&&(a, b)| a == v || b == v).count() as i64;
        prop_assume!((0..t.num_vertices()).all(|v| val(v) <= t.degrees()[v] + 1));
        let expected: i64 = t.degrees().iter().map(|d| d + 1).sum::<i64>() - t.edges().len() as i64;
        prop_assert_eq!(h0_tree(&t) as i64, expected);
        prop_assert_eq!(h1_tree(&t), 0);
    }
}
