use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use pa_seed::growth::enumerate_growth;
use pa_seed::moments::{exact_expectation, exact_expectations, precedes, reduction_children};
use pa_seed::observables::count_F;
use pa_seed::trees::{DecoratedTree, Tree};
use pa_seed::AlphaParam;
use proptest::prelude::*;

fn small_patterns() -> Vec<DecoratedTree> {
    let mut out = Vec::new();
    for tree in [Tree::single_vertex(), Tree::path(2), Tree::path(3)] {
        let r = tree.vertex_count();
        for code in 0..3usize.pow(r as u32) {
            let ell = (0..r).map(|i| (code / 3usize.pow(i as u32) % 3) as u32).collect();
            out.push(DecoratedTree::new(tree.clone(), ell).unwrap());
        }
    }
    out
}

fn brute_force(tau: &DecoratedTree, seed: &Tree, alpha: AlphaParam, n: usize) -> BigRational {
    enumerate_growth(seed, alpha, n, true)
        .unwrap()
        .into_iter()
        .map(|o| {
            o.probability * BigRational::from_integer(BigInt::from(count_F(tau, &o.tree)))
        })
        .fold(BigRational::zero(), |a, b| a + b)
}

#[test]
fn recurrence_matches_enumeration_on_a_slice() {
    let alpha = AlphaParam::new(1, 2).unwrap();
    let seed = Tree::star(4);
    for tau in small_patterns() {
        for n in 4..=6 {
            assert_eq!(
                exact_expectation(&tau, &seed, alpha, n).unwrap(),
                brute_force(&tau, &seed, alpha, n),
                "tau {:?} n {n}",
                tau.ell()
            );
        }
    }
}

#[test]
fn sweep_is_consistent_across_lists() {
    let alpha = AlphaParam::integer(2).unwrap();
    let tau = DecoratedTree::new(Tree::path(3), vec![1, 0, 2]).unwrap();
    let seed = Tree::path(4);
    let all = exact_expectations(&tau, &seed, alpha, &[9, 5, 30]).unwrap();
    for (v, n) in all.iter().zip([9, 5, 30]) {
        assert_eq!(v.to_rational(), exact_expectation(&tau, &seed, alpha, n).unwrap());
    }
}

#[test]
fn children_strictly_precede() {
    for alpha in ["1/2", "1", "3"] {
        let alpha: AlphaParam = alpha.parse().unwrap();
        for tau in small_patterns().into_iter().filter(|t| !t.is_base()) {
            for r in reduction_children(&tau, alpha).unwrap() {
                assert!(precedes(&r.child, &tau));
                assert!(r.coefficient > BigRational::zero());
            }
        }
    }
}

fn arb_decorated() -> impl Strategy<Value = DecoratedTree> {
    (1usize..6)
        .prop_flat_map(|n| {
            (
                proptest::collection::vec(any::<prop::sample::Index>(), n - 1),
                proptest::collection::vec(0u32..3, n),
            )
        })
        .prop_map(|(parents, ell)| {
            let edges: Vec<_> = parents
                .iter()
                .enumerate()
                .map(|(i, p)| (p.index(i + 1), i + 1))
                .collect();
            DecoratedTree::new(Tree::from_edges(ell.len(), &edges).unwrap(), ell).unwrap()
        })
}

proptest! {
    #[test]
    fn precedes_is_irreflexive_and_transitive(
        a in arb_decorated(), b in arb_decorated(), c in arb_decorated()
    ) {
        prop_assert!(!precedes(&a, &a));
        if precedes(&a, &b) && precedes(&b, &c) {
            prop_assert!(precedes(&a, &c));
        }
        prop_assert!(!(precedes(&a, &b) && precedes(&b, &a)));
    }
}
