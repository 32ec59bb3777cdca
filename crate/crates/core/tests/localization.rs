//! Localization identities on the standard fixtures and their failure under
//! perturbation.

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use isoweights::fixtures;
use isoweights::graphs::integral_multigraphs;
use isoweights::localization::{abbv_sum, chern_battery, complete_graph_c1n, elementary_symmetric, multidegrees_below};
use isoweights::WeightSystem;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `Σ_i 1/Π w_i`, written out without the library.
fn inverse_product_sum(ws: &WeightSystem) -> BigRational {
    ws.weights().iter().map(|w| q(1, w.iter().product())).sum()
}

#[test]
fn elementary_symmetric_values() {
    assert_eq!(elementary_symmetric(&[1, 2, 3], 0), BigInt::from(1));
    assert_eq!(elementary_symmetric(&[1, 2, 3], 1), BigInt::from(6));
    assert_eq!(elementary_symmetric(&[1, 2, 3], 2), BigInt::from(11));
    assert_eq!(elementary_symmetric(&[1, 2, 3], 3), BigInt::from(6));
    assert_eq!(elementary_symmetric(&[1, 2, 3], 4), BigInt::from(0));
}

#[test]
fn multidegrees_below_four() {
    assert_eq!(
        multidegrees_below(4),
        vec![vec![], vec![1], vec![1, 1], vec![1, 1, 1], vec![1, 2], vec![2], vec![3]]
    );
}

#[test]
fn battery_passes_on_every_fixture() {
    for (name, ws) in fixtures::standard_fixtures() {
        let r = chern_battery(&ws).unwrap();
        assert!(r.passed(), "{name}: {}", r.to_json());
        assert!(r.zero_integrals.iter().all(|z| z.value == "0"), "{name}");
        assert_eq!(r.c_n, ws.len().to_string(), "{name}");
        if ws.profile().is_minimal() {
            for b in r.basis_constants.as_ref().unwrap() {
                assert!(b.positive_integer && b.equal, "{name}: C{} = {} vs {}", b.i, b.c, b.c_reversed);
            }
        }
    }
}

#[test]
fn c1_cn1_matches_the_magnitude_target() {
    let expect = [("cp2", "9"), ("cp3", "24"), ("cp4", "50"), ("gr2(R5)", "24"), ("v5", "24"), ("v22", "24"), ("s2xs2(2,3)", "8")];
    let fx = fixtures::standard_fixtures();
    for (name, value) in expect {
        let ws = &fx.iter().find(|(n, _)| n == name).unwrap().1;
        assert_eq!(chern_battery(ws).unwrap().c1_cn1, value, "{name}");
    }
}

#[test]
fn first_chern_constants_and_top_powers() {
    // (fixture, C1, ∫ c1^n)
    let expect: [(WeightSystem, i64, i64); 6] = [
        (fixtures::cp(&[2, 1, 0]).unwrap(), 3, 9),
        (fixtures::cp(&[3, 2, 1, 0]).unwrap(), 4, 64),
        (fixtures::cp(&[4, 3, 2, 1, 0]).unwrap(), 5, 625),
        (fixtures::grassmannian(&[2, 1]).unwrap(), 3, 54),
        (fixtures::v5(), 2, 40),
        (fixtures::v22(), 1, 22),
    ];
    for (ws, c1, top) in expect {
        let r = chern_battery(&ws).unwrap();
        assert_eq!(r.c1, Some(c1), "{ws}");
        assert_eq!(r.c1_divisor_pass, Some(true));
        let n = ws.n();
        assert_eq!(abbv_sum(&ws, &vec![1; n]).unwrap(), q(top, 1), "{ws}");
        assert_eq!(r.basis_constants.unwrap().last().unwrap().c, top.to_string());
    }
}

#[test]
fn the_first_v5_perturbation_breaks_the_degree_zero_identity() {
    let ws = WeightSystem::new(3, vec![(0, vec![1, 2, 3]), (1, vec![-1, 1, 3]), (2, vec![-1, -4, 1]), (3, vec![-1, -2, -3])]).unwrap();
    assert_eq!(inverse_product_sum(&ws), q(-1, 12));
    assert_eq!(abbv_sum(&ws, &[]).unwrap(), q(-1, 12));
    assert!(!chern_battery(&ws).unwrap().passed());
}

#[test]
fn every_single_weight_perturbation_of_v5_is_caught() {
    let base = fixtures::v5();
    let mut tried = 0;
    for i in 0..base.len() {
        for k in 0..base.n() {
            for delta in [-1i64, 1] {
                let mut pts: Vec<(usize, Vec<i64>)> =
                    base.weights().iter().enumerate().map(|(j, w)| (base.profile().lambda(j), w.clone())).collect();
                pts[i].1[k] += delta;
                if pts[i].1[k] == 0 {
                    continue;
                }
                // A sign change moves the point to another index; keep the index.
                if (pts[i].1[k] < 0) != (base.point(i)[k] < 0) {
                    continue;
                }
                let ws = WeightSystem::new(3, pts).unwrap();
                tried += 1;
                let r = chern_battery(&ws).unwrap();
                assert!(!r.passed(), "perturbation at point {i}, weight {k}, {delta:+} went unnoticed: {ws}");
            }
        }
    }
    // 24 shifts, minus the six that would hit zero.
    assert_eq!(tried, 18);
}

#[test]
fn complete_graph_reads_off_c1_to_the_n() {
    // CP²: the vertex of index 0 meets both others; Π m(e) = 3·3 = 9.
    let ws = fixtures::cp(&[2, 1, 0]).unwrap();
    let wg = integral_multigraphs(&ws).unwrap().into_iter().next().unwrap();
    let r = complete_graph_c1n(&ws, &wg).unwrap();
    assert_eq!(r.product_of_magnitudes, "9");
    assert!(r.agrees);
}

proptest! {
    #[test]
    fn projective_spaces_pass_for_any_generic_xi(xi in prop::collection::btree_set(-9i64..=9, 2..=5)) {
        let xi: Vec<i64> = xi.into_iter().rev().collect();
        if let Ok(ws) = fixtures::cp(&xi) {
            let r = chern_battery(&ws).unwrap();
            prop_assert!(r.passed());
            prop_assert_eq!(r.c1, Some(xi.len() as i64));
            prop_assert_eq!(inverse_product_sum(&ws), q(0, 1));
        }
    }
}
