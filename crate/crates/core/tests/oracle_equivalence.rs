//! Inertia counts and radii against the exact characteristic-polynomial oracle.

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use lintree::diagonalize::inertia_at;
use lintree::spectral::{oracle_radius, radius, InertiaOracle};
use lintree::tree_model::{realize, LinearTree, MatrixKind, RootedTree, Starlike};

fn kind_of(i: u8) -> MatrixKind {
    [
        MatrixKind::Adjacency,
        MatrixKind::Laplacian,
        MatrixKind::SignlessLaplacian,
    ][i as usize % 3]
}

fn random_tree(n: usize, picks: &[u32], kind: MatrixKind) -> RootedTree {
    let parent = (0..n)
        .map(|i| {
            if i + 1 == n {
                None
            } else {
                Some(i + 1 + picks[i] as usize % (n - 1 - i))
            }
        })
        .collect();
    RootedTree::from_parents(parent, kind).unwrap()
}

fn tree_strategy() -> impl Strategy<Value = RootedTree> {
    (1usize..=12, any::<u8>())
        .prop_flat_map(|(n, k)| (Just(n), Just(k), proptest::collection::vec(any::<u32>(), n)))
        .prop_map(|(n, k, picks)| random_tree(n, &picks, kind_of(k)))
}

/// 50 probes: integers and half-integers (where tree eigenvalues often sit)
/// plus random rationals.
fn probes() -> impl Strategy<Value = Vec<BigRational>> {
    proptest::collection::vec((-8i64..=30, 1i64..=7), 50).prop_map(|v| {
        v.into_iter()
            .enumerate()
            .map(|(i, (p, q))| {
                let q = if i % 3 == 0 {
                    1
                } else if i % 3 == 1 {
                    2
                } else {
                    q
                };
                BigRational::new(BigInt::from(p), BigInt::from(q))
            })
            .collect()
    })
}

fn linear_tree_strategy() -> impl Strategy<Value = LinearTree> {
    proptest::collection::vec(proptest::collection::vec(1u32..=4, 0..=3), 1..=8)
        .prop_map(|stars| {
            LinearTree::new(
                stars
                    .into_iter()
                    .map(|p| Starlike::new(p).unwrap())
                    .collect(),
            )
            .unwrap()
        })
        .prop_filter("at most 40 vertices", |g| g.vertex_count() <= 40)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn inertia_matches_oracle(t in tree_strategy(), xs in probes()) {
        let oracle = InertiaOracle::new(&t).unwrap();
        for x in &xs {
            prop_assert_eq!(inertia_at(&t, x), oracle.at(x), "probe {}", x);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn radius_matches_oracle(g in linear_tree_strategy(), k in any::<u8>()) {
        let kind = kind_of(k);
        let ours = radius(&g, kind, &1e-12).unwrap().value;
        let exact = oracle_radius(&realize(&g, kind)).unwrap().value;
        prop_assert!((ours - exact).abs() < 1e-9, "{} {:?}: {} vs {}", g, kind, ours, exact);
    }
}
