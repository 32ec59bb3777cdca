//! Independent reference implementations checked against the library.

mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use common::{as_index_agrees, brute_force_graphs, nullvector_agrees, random_index_instance};
use isoweights::fixtures;
use isoweights::graphs::{enumerate_multigraphs, Dedup, EdgeFilter};
use isoweights::hattori::as_index;
use isoweights::laurent::LaurentPolynomial;
use isoweights::Profile;

fn library_graphs(profile: &Profile, filter: EdgeFilter, dedup: Dedup) -> BTreeSet<Vec<(usize, usize)>> {
    enumerate_multigraphs(profile, filter, dedup).unwrap().iter().map(|g| g.edges().to_vec()).collect()
}

#[test]
fn multigraphs_match_bijection_enumeration_on_minimal_profiles() {
    for n in [2usize, 3] {
        let profile = Profile::minimal(n);
        let lambdas: Vec<usize> = (0..=n).collect();
        for filter in [EdgeFilter::All, EdgeFilter::Nonnegative, EdgeFilter::Positive] {
            let raw = brute_force_graphs(&lambdas, n, filter, Dedup::None);
            assert_eq!(library_graphs(&profile, filter, Dedup::None), raw, "n={n} {filter:?}");
            let classes = brute_force_graphs(&lambdas, n, filter, Dedup::Reversal);
            assert_eq!(library_graphs(&profile, filter, Dedup::Reversal), classes, "n={n} {filter:?}");
        }
    }
}

#[test]
fn raw_nonnegative_counts() {
    let raw = |n: usize| brute_force_graphs(&(0..=n).collect::<Vec<_>>(), n, EdgeFilter::Nonnegative, Dedup::None).len();
    assert_eq!(raw(2), 2);
    assert_eq!(raw(3), 9);
}

#[test]
fn multigraphs_match_on_a_profile_with_repeated_indices() {
    let lambdas = vec![0, 1, 1, 2];
    let profile = Profile::new(2, lambdas.clone()).unwrap();
    for filter in [EdgeFilter::All, EdgeFilter::Nonnegative, EdgeFilter::Positive] {
        assert_eq!(library_graphs(&profile, filter, Dedup::None), brute_force_graphs(&lambdas, 2, filter, Dedup::None));
    }
}

#[test]
fn nullvector_on_graph_like_matrices() {
    let cases: Vec<Vec<Vec<i64>>> = vec![
        vec![vec![1, 1, -1]],
        vec![vec![1, -2, 0, 1], vec![0, 1, -1, 0]],
        vec![vec![1, 1, 1, 1]],
        vec![vec![2, -3]],
        vec![vec![1, -1, 0], vec![0, 1, -1], vec![1, 0, -1]],
        vec![vec![3, 0, -1, -1], vec![0, 2, -1, 0]],
        vec![vec![0, 0, 0, 0]],
        vec![vec![-1, 1, 1], vec![1, -1, 1], vec![1, 1, -1]],
    ];
    for rows in &cases {
        nullvector_agrees(rows).unwrap();
    }
}

fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=4, 1usize..=3).prop_flat_map(|(cols, rows)| prop::collection::vec(prop::collection::vec(-3i64..=3, cols), rows))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn nullvector_matches_exhaustive_search(rows in small_matrix()) {
        prop_assert!(nullvector_agrees(&rows).is_ok(), "{:?}", nullvector_agrees(&rows));
    }
}

#[test]
fn as_index_matches_rational_simplification_on_random_instances() {
    let mut rng = StdRng::seed_from_u64(0x1505);
    let mut laurent = 0;
    for case in 0..100 {
        let (ws, values) = random_index_instance(&mut rng, case);
        if as_index_agrees(&ws, &values).unwrap() {
            laurent += 1;
        }
    }
    assert!(laurent >= 50, "only {laurent} Laurent cases");
}

#[test]
fn constant_values_give_the_todd_genus() {
    for (name, ws) in fixtures::standard_fixtures() {
        let ones = vec![LaurentPolynomial::one(); ws.len()];
        assert_eq!(as_index(&ones, &ws).unwrap(), LaurentPolynomial::one(), "{name}");
    }
}
