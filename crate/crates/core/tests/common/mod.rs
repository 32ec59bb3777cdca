//! Reference implementations shared by the oracle tests and the acceptance
//! harness. Each one is deliberately naive and independent of the library's
//! algorithms.
#![allow(dead_code)]

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::rngs::StdRng;
use rand::Rng;

use isoweights::fixtures;
use isoweights::graphs::{Dedup, EdgeFilter};
use isoweights::hattori::as_index;
use isoweights::laurent::{LaurentPolynomial, LaurentRational};
use isoweights::linalg::{positive_integer_nullvector, RationalMatrix};
use isoweights::{Error, WeightSystem};

pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

fn allowed(filter: EdgeFilter, la: usize, lb: usize) -> bool {
    match filter {
        EdgeFilter::All => true,
        EdgeFilter::Nonnegative => la <= lb,
        EdgeFilter::Positive => la < lb,
    }
}

/// Multigraphs as sorted edge lists, from every bijection between the
/// out-slots (`n − λ` per point) and the in-slots (`λ` per point). Reversal
/// classes are only formed for minimal profiles (vertex `i ↔ n − i`).
pub fn brute_force_graphs(lambdas: &[usize], n: usize, filter: EdgeFilter, dedup: Dedup) -> BTreeSet<Vec<(usize, usize)>> {
    let outs: Vec<usize> = lambdas.iter().enumerate().flat_map(|(v, &l)| std::iter::repeat_n(v, n - l)).collect();
    let ins: Vec<usize> = lambdas.iter().enumerate().flat_map(|(v, &l)| std::iter::repeat_n(v, l)).collect();
    assert_eq!(outs.len(), ins.len());
    let mut found = BTreeSet::new();
    for p in permutations(outs.len()) {
        let mut edges: Vec<(usize, usize)> = outs.iter().zip(&p).map(|(&a, &j)| (a, ins[j])).collect();
        if edges.iter().all(|&(a, b)| allowed(filter, lambdas[a], lambdas[b])) {
            edges.sort();
            found.insert(edges);
        }
    }
    if dedup == Dedup::None {
        return found;
    }
    let mut classes = BTreeSet::new();
    for g in found {
        let mut r: Vec<(usize, usize)> = g.iter().map(|&(a, b)| (n - b, n - a)).collect();
        r.sort();
        classes.insert(g.clone().min(r));
    }
    classes
}

pub const SEARCH_MAX: i64 = 20;

/// Every vector in `[1, SEARCH_MAX]^cols` annihilated by `rows`.
pub fn exhaustive_positive_kernel(rows: &[Vec<i64>], cols: usize) -> Vec<Vec<i64>> {
    let mut hits = Vec::new();
    let mut v = vec![1i64; cols];
    loop {
        if rows.iter().all(|r| r.iter().zip(&v).map(|(a, b)| a * b).sum::<i64>() == 0) {
            hits.push(v.clone());
        }
        let mut k = 0;
        loop {
            if k == cols {
                return hits;
            }
            if v[k] < SEARCH_MAX {
                v[k] += 1;
                break;
            }
            v[k] = 1;
            k += 1;
        }
    }
}

/// Compare `positive_integer_nullvector` with the exhaustive search.
pub fn nullvector_agrees(rows: &[Vec<i64>]) -> Result<(), String> {
    let cols = rows[0].len();
    let hits = exhaustive_positive_kernel(rows, cols);
    match positive_integer_nullvector(&RationalMatrix::from_i64(rows)) {
        None if hits.is_empty() => Ok(()),
        None => Err(format!("{rows:?}: missed kernel vector {:?}", hits[0])),
        Some(w) => {
            let w: Vec<i64> = w.iter().map(|x| x.to_i64().unwrap()).collect();
            if !w.iter().all(|&x| x > 0) {
                return Err(format!("{rows:?}: witness {w:?} is not positive"));
            }
            if rows.iter().any(|r| r.iter().zip(&w).map(|(a, b)| a * b).sum::<i64>() != 0) {
                return Err(format!("{rows:?}: witness {w:?} is not in the kernel"));
            }
            let g = w.iter().fold(0i64, |g, &x| num_integer::Integer::gcd(&g, &x));
            if g != 1 {
                return Err(format!("{rows:?}: witness {w:?} is not primitive"));
            }
            if w.iter().all(|&x| x <= SEARCH_MAX) && !hits.contains(&w) {
                return Err(format!("{rows:?}: witness {w:?} not found by the search"));
            }
            Ok(())
        }
    }
}

/// `Σ value_i / Π (1 − t^{−w})` by adding reduced rational functions.
pub fn direct_sum(values: &[LaurentPolynomial], ws: &WeightSystem) -> Option<LaurentPolynomial> {
    let mut total = LaurentRational::from_polynomial(LaurentPolynomial::zero());
    for (v, w) in values.iter().zip(ws.weights()) {
        let den = w.iter().fold(LaurentPolynomial::one(), |acc, &x| acc * LaurentPolynomial::one_minus_t(-x));
        total = total.add(&LaurentRational::new(v.clone(), den).expect("nonzero denominator"));
    }
    total.as_polynomial()
}

fn random_polynomial(rng: &mut StdRng) -> LaurentPolynomial {
    let terms = rng.gen_range(1..=3);
    LaurentPolynomial::from_terms((0..terms).map(|_| (rng.gen_range(-4..=4), BigInt::from(rng.gen_range(-2..=2)))))
}

fn random_cp(rng: &mut StdRng) -> Vec<i64> {
    let n = rng.gen_range(1..=3);
    loop {
        let mut xi: Vec<i64> = (0..=n).map(|_| rng.gen_range(0..=6)).collect();
        xi.sort_unstable_by(|a, b| b.cmp(a));
        xi.dedup();
        if xi.len() == n + 1 && fixtures::cp(&xi).is_ok() {
            return xi;
        }
    }
}

/// One randomized instance: even cases are line bundles on projective space
/// (always Laurent), odd cases random values on a fixture (usually not).
pub fn random_index_instance(rng: &mut StdRng, case: usize) -> (WeightSystem, Vec<LaurentPolynomial>) {
    if case.is_multiple_of(2) {
        let xi = random_cp(rng);
        let k = rng.gen_range(-3..=3);
        let ws = fixtures::cp(&xi).unwrap();
        let values = xi.iter().map(|&x| LaurentPolynomial::monomial(1, k * x)).collect();
        (ws, values)
    } else {
        let fx = fixtures::standard_fixtures();
        let (_, ws) = fx[rng.gen_range(0..fx.len())].clone();
        let values = (0..ws.len()).map(|_| random_polynomial(rng)).collect();
        (ws, values)
    }
}

/// `Ok(true)` when the sum is Laurent and both agree, `Ok(false)` when both
/// agree that it is not.
pub fn as_index_agrees(ws: &WeightSystem, values: &[LaurentPolynomial]) -> Result<bool, String> {
    let expected = direct_sum(values, ws);
    match as_index(values, ws) {
        Ok(p) if Some(&p) == expected.as_ref() => Ok(true),
        Ok(p) => Err(format!("{ws}: got {p}, expected {expected:?}")),
        Err(Error::NotLaurent) if expected.is_none() => Ok(false),
        Err(e) => Err(format!("{ws}: {e}, expected {expected:?}")),
    }
}
