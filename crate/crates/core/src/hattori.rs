//! Equivariant index sums over the fixed points, Hattori's `φ_i` and `r_s`,
//! and the dimension-8 Diophantine constraints on `(C1, l, m)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::laurent::{LaurentPolynomial, Poly};
use crate::model::WeightSystem;

type Q = BigRational;

fn qi(x: i64) -> Q {
    Q::from_integer(BigInt::from(x))
}

/// `Φ_d`, computed from `t^d − 1 = Π_{e | d} Φ_e`.
fn cyclotomic(d: u64, cache: &mut BTreeMap<u64, Poly>) -> Poly {
    if let Some(p) = cache.get(&d) {
        return p.clone();
    }
    let mut c = vec![BigInt::zero(); d as usize + 1];
    c[0] = -BigInt::one();
    c[d as usize] = BigInt::one();
    let mut p = Poly::new(c);
    for e in 1..d {
        if d.is_multiple_of(e) {
            let f = cyclotomic(e, cache);
            p = p.div_rem_exact_lead(&f).expect("cyclotomic factor divides").0;
        }
    }
    cache.insert(d, p.clone());
    p
}

/// `Σ_i value_i / Π_k (1 − t^{c_ik})`, computed over the least common
/// denominator (a product of cyclotomic polynomials) and divided exactly.
pub fn sum_over_fixed_points(values: &[LaurentPolynomial], exponents: &[Vec<i64>]) -> Result<LaurentPolynomial> {
    assert_eq!(values.len(), exponents.len());
    // 1 − t^c = −(t^c − 1) for c > 0 and t^c (t^{|c|} − 1) for c < 0.
    let mut mults: Vec<BTreeMap<u64, usize>> = Vec::with_capacity(values.len());
    let mut lcm: BTreeMap<u64, usize> = BTreeMap::new();
    for ex in exponents {
        let mut m: BTreeMap<u64, usize> = BTreeMap::new();
        for &c in ex {
            if c == 0 {
                return Err(Error::Precondition("zero exponent in a denominator".into()));
            }
            let a = c.unsigned_abs();
            for d in 1..=a {
                if a % d == 0 {
                    *m.entry(d).or_default() += 1;
                }
            }
        }
        for (&d, &k) in &m {
            let e = lcm.entry(d).or_default();
            *e = (*e).max(k);
        }
        mults.push(m);
    }
    let mut cache = BTreeMap::new();
    let mut total = LaurentPolynomial::zero();
    for ((value, ex), m) in values.iter().zip(exponents).zip(&mults) {
        // value / (sign · t^shift · Π (t^|c| − 1)) = value · sign · t^{−shift} · (L / D_i) / L
        let mut sign = 1i64;
        let mut shift = 0i64;
        for &c in ex {
            if c > 0 {
                sign = -sign;
            } else {
                shift += c;
            }
        }
        let mut factor = Poly::new(vec![BigInt::one()]);
        for (&d, &k) in &lcm {
            let have = m.get(&d).copied().unwrap_or(0);
            for _ in have..k {
                factor = factor.mul(&cyclotomic(d, &mut cache));
            }
        }
        let term = value * &LaurentPolynomial::from_poly(&factor, -shift);
        total = total + term.scale(&BigInt::from(sign));
    }
    let mut denominator = Poly::new(vec![BigInt::one()]);
    for (&d, &k) in &lcm {
        for _ in 0..k {
            denominator = denominator.mul(&cyclotomic(d, &mut cache));
        }
    }
    total.exact_div(&LaurentPolynomial::from_poly(&denominator, 0)).ok_or(Error::NotLaurent)
}

/// Atiyah–Segal sum `Σ_i value_i / Π_k (1 − t^{−w_ik})`.
pub fn as_index(values: &[LaurentPolynomial], ws: &WeightSystem) -> Result<LaurentPolynomial> {
    if values.len() != ws.len() {
        return Err(Error::Precondition("one value per fixed point is required".into()));
    }
    let exps: Vec<Vec<i64>> = ws.weights().iter().map(|w| w.iter().map(|x| -x).collect()).collect();
    sum_over_fixed_points(values, &exps)
}

/// Integer levels with `s(P_i) = k0·a_i + d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelData {
    pub a: Vec<i64>,
    pub k0: i64,
    pub d: i64,
}

/// Levels for a given `k0`, with `d ∈ [0, k0)`; `None` when the weight sums
/// are not all congruent modulo `k0` or two levels coincide.
pub fn derive_levels(ws: &WeightSystem, k0: i64) -> Option<LevelData> {
    if k0 < 1 || ws.is_empty() {
        return None;
    }
    let sums: Vec<i64> = (0..ws.len()).map(|i| ws.weight_sum(i)).collect();
    let d = sums[0].rem_euclid(k0);
    if sums.iter().any(|s| s.rem_euclid(k0) != d) {
        return None;
    }
    let a: Vec<i64> = sums.iter().map(|s| (s - d) / k0).collect();
    let mut sorted = a.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != a.len() {
        return None;
    }
    Some(LevelData { a, k0, d })
}

/// All feasible level data, `k0` from `n + 1` down to 1.
pub fn all_levels(ws: &WeightSystem) -> Vec<LevelData> {
    (1..=ws.n() as i64 + 1).rev().filter_map(|k| derive_levels(ws, k)).collect()
}

fn check_fine(ws: &WeightSystem, levels: &LevelData) -> Result<()> {
    if levels.a.len() != ws.len() {
        return Err(Error::Precondition("levels do not match the fixed points".into()));
    }
    let mut s = levels.a.clone();
    s.sort_unstable();
    s.dedup();
    if s.len() != levels.a.len() {
        return Err(Error::Precondition("levels must be pairwise distinct".into()));
    }
    Ok(())
}

/// `φ_i(t) = Π_{j≠i} (1 − t^{a_i − a_j}) / Π_k (1 − t^{w_ik})`.
pub fn phi(ws: &WeightSystem, levels: &LevelData, i: usize) -> Result<LaurentPolynomial> {
    check_fine(ws, levels)?;
    let num = (0..ws.len())
        .filter(|&j| j != i)
        .fold(LaurentPolynomial::one(), |acc, j| &acc * &LaurentPolynomial::one_minus_t(levels.a[i] - levels.a[j]));
    let den = ws.point(i).iter().fold(LaurentPolynomial::one(), |acc, &w| &acc * &LaurentPolynomial::one_minus_t(w));
    num.exact_div(&den).ok_or(Error::NotLaurent)
}

/// Elementary symmetric polynomials `e_0..e_k` of the monomials `t^{x_j}`.
fn elementary_monomials(xs: &[i64], k: usize) -> Vec<LaurentPolynomial> {
    let mut e = vec![LaurentPolynomial::zero(); k + 1];
    e[0] = LaurentPolynomial::one();
    for &x in xs {
        let mono = LaurentPolynomial::monomial(1, x);
        for s in (1..=k).rev() {
            let add = &e[s - 1] * &mono;
            e[s] = std::mem::take(&mut e[s]) + add;
        }
    }
    e
}

/// `r_0 … r_N` from the explicit formula
/// `r_s = (−1)^s Σ_i e_s(t^{−a_j} : j ≠ i) / Π_k (1 − t^{w_ik})`,
/// each verified to be a Laurent polynomial, and checked against
/// `φ_i = Σ_s r_s t^{s·a_i}`.
pub fn r_sequence(ws: &WeightSystem, levels: &LevelData) -> Result<Vec<LaurentPolynomial>> {
    check_fine(ws, levels)?;
    let count = ws.len();
    let exps: Vec<Vec<i64>> = ws.weights().to_vec();
    let per_point: Vec<Vec<LaurentPolynomial>> = (0..count)
        .map(|i| {
            let others: Vec<i64> = (0..count).filter(|&j| j != i).map(|j| -levels.a[j]).collect();
            elementary_monomials(&others, count - 1)
        })
        .collect();
    let mut rs = Vec::with_capacity(count);
    for s in 0..count {
        let values: Vec<LaurentPolynomial> = per_point.iter().map(|e| e[s].clone()).collect();
        let r = sum_over_fixed_points(&values, &exps)?;
        rs.push(if s % 2 == 1 { -r } else { r });
    }
    for i in 0..count {
        let expected = phi(ws, levels, i)?;
        let rebuilt = rs
            .iter()
            .enumerate()
            .fold(LaurentPolynomial::zero(), |acc, (s, r)| acc + r.shift(s as i64 * levels.a[i]));
        if rebuilt != expected {
            return Err(Error::ConsistencyFailure(format!("phi_{i} is not reproduced by the r_s")));
        }
    }
    Ok(rs)
}

/// `{w_ik} = {a_i − a_j}_{j≠i}` at every point; requires `k0 = n + 1`.
pub fn cp_check(ws: &WeightSystem, levels: &LevelData) -> Result<bool> {
    if levels.k0 != ws.n() as i64 + 1 {
        return Err(Error::Precondition(format!("k0 must be n + 1 = {}", ws.n() + 1)));
    }
    check_fine(ws, levels)?;
    Ok((0..ws.len()).all(|i| {
        let mut diffs: Vec<i64> = (0..ws.len()).filter(|&j| j != i).map(|j| levels.a[i] - levels.a[j]).collect();
        diffs.sort_unstable();
        diffs == ws.point(i)
    }))
}

/// Values at `t = 1` of `r_0 … r_4` in dimension 8, in terms of `C1`,
/// `l` (with `∫[ω]^4 = l²`) and `m` (with `c2 = m·x1²`).
pub fn dim8_r_values(c1: &Q, l: &Q, m: &Q) -> [Q; 5] {
    let (l2, c, m) = (l * l, c1.clone(), m.clone());
    let q24 = |x: Q| &l2 * x / qi(24);
    let quartic = -(&c * &c * &c * &c) + qi(4) * &c * &c * &m + qi(3) * &m * &m;
    let r0 = (&l2 * quartic + qi(45)) / qi(720);
    let r1 = qi(-4) + q24(&c * &m + &c * &c + &m + qi(2) * &c + qi(1));
    let r2 = qi(6) + q24(qi(-3) * &c * &m - &c * &c - &m + qi(6) * &c + qi(11));
    let r3 = qi(-4) + q24(qi(3) * &c * &m - &c * &c - &m - qi(6) * &c + qi(11));
    let r4 = qi(1) + q24(-(&c * &m) + &c * &c + &m - qi(2) * &c + qi(1));
    [r0, r1, r2, r3, r4]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Dim8Solution {
    pub l: i64,
    pub m: String,
    /// `l·m` is an integer (the coefficient of `x2` in `c2`).
    pub lm_integral: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Dim8Report {
    #[serde(rename = "C1")]
    pub c1: i64,
    pub feasible: bool,
    pub reason: String,
    pub solutions: Vec<Dim8Solution>,
}

/// The constraint `α + L(β + γ m) = 0` in `L = l²` and `m`.
#[derive(Debug, Clone)]
struct Affine {
    alpha: Q,
    beta: Q,
    gamma: Q,
}

impl Affine {
    fn is_identity(&self) -> bool {
        self.alpha.is_zero() && self.beta.is_zero() && self.gamma.is_zero()
    }

    fn holds(&self, l2: &Q, m: &Q) -> bool {
        (&self.alpha + l2 * (&self.beta + &self.gamma * m)).is_zero()
    }
}

/// Affine form of `r_s(1)` for `s = 1..=4` given `C1`, with `r_0(1) = 1`.
fn affine_r(c1: i64) -> Vec<Affine> {
    let c = qi(c1);
    let d = qi(24);
    let mk = |alpha: i64, beta: Q, gamma: Q| Affine { alpha: qi(alpha), beta: beta / &d, gamma: gamma / &d };
    vec![
        Affine { alpha: qi(1), beta: Q::zero(), gamma: Q::zero() },
        mk(-4, &c * &c + qi(2) * &c + qi(1), &c + qi(1)),
        mk(6, -(&c * &c) + qi(6) * &c + qi(11), qi(-3) * &c - qi(1)),
        mk(-4, -(&c * &c) - qi(6) * &c + qi(11), qi(3) * &c - qi(1)),
        mk(1, &c * &c - qi(2) * &c + qi(1), qi(1) - &c),
    ]
}

fn sub(a: &Affine, b: &Affine) -> Affine {
    Affine { alpha: &a.alpha - &b.alpha, beta: &a.beta - &b.beta, gamma: &a.gamma - &b.gamma }
}

/// Rational roots of `a m² + b m + c = 0` (or of the linear equation).
fn rational_roots(a: &Q, b: &Q, c: &Q) -> Vec<Q> {
    if a.is_zero() {
        if b.is_zero() {
            return vec![];
        }
        return vec![-c / b];
    }
    let disc = b * b - qi(4) * a * c;
    if disc.is_negative() {
        return vec![];
    }
    let (n, d) = (disc.numer().clone(), disc.denom().clone());
    let (sn, sd) = (n.sqrt(), d.sqrt());
    if &sn * &sn != n || &sd * &sd != d {
        return vec![];
    }
    let root = Q::new(sn, sd);
    let mut out = vec![(-b + &root) / (qi(2) * a), (-b - &root) / (qi(2) * a)];
    out.sort();
    out.dedup();
    out
}

/// Solve the dimension-8 system for a given `C1`: `r_0(1) = 1`,
/// `r_s(1) = 0` for `s > l0 = 5 − C1`, `r_s(1) = r_{l0−s}(1)`, and
/// `Σ r_s(1) = l²`. When every relation besides `r_0(1) = 1` is an identity,
/// `l` is scanned over `1..=l_max`.
pub fn dim8_solver(c1: i64, l_max: i64) -> Dim8Report {
    let infeasible = |reason: &str| Dim8Report { c1, feasible: false, reason: reason.into(), solutions: vec![] };
    if !(1..=5).contains(&c1) {
        return infeasible("C1 must lie in [1, n+1] = [1, 5]");
    }
    if 50 % c1 != 0 {
        return infeasible("C1 must divide n(n+1)^2/2 = 50");
    }
    let r = affine_r(c1);
    let l0 = (5 - c1) as usize;
    let mut constraints: Vec<_> = r[l0 + 1..=4].to_vec();
    for s in 0..=l0 {
        constraints.push(sub(&r[s], &r[l0 - s]));
    }
    let mut total = Affine { alpha: Q::zero(), beta: qi(-1), gamma: Q::zero() };
    for rs in r.iter().take(l0 + 1) {
        total = Affine { alpha: &total.alpha + &rs.alpha, beta: &total.beta + &rs.beta, gamma: &total.gamma + &rs.gamma };
    }
    constraints.push(total);
    constraints.retain(|a| !a.is_identity());

    // r_0(1) = 1:  L·(3m² + 4C1²m − C1⁴) = 675.
    let c = qi(c1);
    let (qa, qb, qc) = (qi(3), qi(4) * &c * &c, -(&c * &c * &c * &c));

    let mut candidates: Vec<(Q, Q)> = Vec::new();
    match constraints.first() {
        None => {
            for l in 1..=l_max {
                let l2 = qi(l * l);
                for m in rational_roots(&(&l2 * &qa), &(&l2 * &qb), &(&l2 * &qc - qi(675))) {
                    candidates.push((l2.clone(), m));
                }
            }
        }
        Some(k) => {
            if k.gamma.is_zero() {
                if k.beta.is_zero() {
                    return infeasible("inconsistent constant relation");
                }
                let l2 = -&k.alpha / &k.beta;
                if l2.is_positive() {
                    for m in rational_roots(&(&l2 * &qa), &(&l2 * &qb), &(&l2 * &qc - qi(675))) {
                        candidates.push((l2.clone(), m));
                    }
                }
            } else if k.alpha.is_zero() {
                let m = -&k.beta / &k.gamma;
                let quad = &qa * &m * &m + &qb * &m + &qc;
                if !quad.is_zero() {
                    candidates.push((qi(675) / quad, m));
                }
            } else {
                // L = −α/(β + γm); substitute:  −α·q(m) = 675(β + γm).
                let a = -&k.alpha * &qa;
                let b = -&k.alpha * &qb - qi(675) * &k.gamma;
                let cc = -&k.alpha * &qc - qi(675) * &k.beta;
                let roots = rational_roots(&a, &b, &cc);
                if roots.is_empty() {
                    return infeasible("no rational m: the discriminant is not a square");
                }
                for m in roots {
                    let den = &k.beta + &k.gamma * &m;
                    if !den.is_zero() {
                        candidates.push((-&k.alpha / den, m));
                    }
                }
            }
        }
    }
    let mut solutions = Vec::new();
    for (l2, m) in candidates {
        if !l2.is_positive() || !l2.is_integer() {
            continue;
        }
        let l2i = l2.to_integer();
        let l = l2i.sqrt();
        if &l * &l != l2i {
            continue;
        }
        if !constraints.iter().all(|k| k.holds(&l2, &m)) {
            continue;
        }
        let li = l.to_i64().unwrap_or(i64::MAX);
        let lm = Q::from_integer(l.clone()) * &m;
        solutions.push(Dim8Solution { l: li, m: m.to_string(), lm_integral: lm.is_integer() });
    }
    if solutions.is_empty() {
        return infeasible("no (l, m) with l a positive integer satisfies every relation");
    }
    Dim8Report { c1, feasible: true, reason: String::new(), solutions }
}

/// Report for the `hattori` subcommand.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HattoriReport {
    pub levels: Option<LevelData>,
    pub r_values_at_1: Vec<String>,
    pub laurent_ok: bool,
    pub error: Option<String>,
    pub dim8: Option<Dim8Report>,
}

/// Levels for `k0` (or the largest feasible one), the `r_s(1)` values and,
/// in dimension 8, the solver output for that `k0`.
pub fn hattori_report(ws: &WeightSystem, k0: Option<i64>, l_max: i64) -> HattoriReport {
    let levels = match k0 {
        Some(k) => derive_levels(ws, k),
        None => all_levels(ws).into_iter().next(),
    };
    let (r_values_at_1, laurent_ok, error) = match &levels {
        Some(lv) => match r_sequence(ws, lv) {
            Ok(rs) => (rs.iter().map(|r| r.at_one().to_string()).collect(), true, None),
            Err(e) => (vec![], false, Some(e.to_string())),
        },
        None => (vec![], false, Some("no fine levels for this k0".into())),
    };
    let dim8 = if ws.n() == 4 && ws.profile().is_minimal() {
        levels.as_ref().map(|lv| dim8_solver(lv.k0, l_max))
    } else {
        None
    };
    HattoriReport { levels, r_values_at_1, laurent_ok, error, dim8 }
}
