//! Weight systems of the standard examples with a minimal (or small) number
//! of fixed points.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::WeightSystem;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum FixtureSpec {
    /// Complex projective space `CP^n` for a strictly decreasing `ξ`.
    Cp { xi: Vec<i64> },
    /// Oriented two-plane Grassmannian of `R^{2k+1}` for `ξ_0 > … > ξ_{k−1} > 0`.
    Grassmannian { xi: Vec<i64> },
    V5,
    V22,
    /// `S² × S²` rotated with speeds `a` and `b`.
    S2xs2 { a: i64, b: i64 },
}

fn check_effective(ws: WeightSystem) -> Result<WeightSystem> {
    for (i, w) in ws.weights().iter().enumerate() {
        let g = w.iter().fold(0i64, |g, &x| g.gcd(&x));
        if g != 1 {
            return Err(Error::IneffectiveParameters(format!("weights at point {i} have gcd {g}")));
        }
    }
    Ok(ws)
}

fn strictly_decreasing(xi: &[i64]) -> bool {
    xi.windows(2).all(|p| p[0] > p[1])
}

/// `{ξ_i − ξ_j : j ≠ i}` at `P_i`, `λ(P_i) = i`.
pub fn cp(xi: &[i64]) -> Result<WeightSystem> {
    if xi.len() < 2 || !strictly_decreasing(xi) {
        return Err(Error::IneffectiveParameters("ξ must be strictly decreasing with at least two entries".into()));
    }
    let n = xi.len() - 1;
    let points = (0..=n)
        .map(|i| (i, (0..=n).filter(|&j| j != i).map(|j| xi[i] - xi[j]).collect()))
        .collect();
    check_effective(WeightSystem::new(n, points)?)
}

/// Fixed points `y = (−x_0, …, −x_{k−1}, x_{k−1}, …, x_0)`; the weights at
/// `y_i` are `(y_j − y_i)(ξ)` for `j ∉ {i, 2k−1−i}` together with `−y_i(ξ)`.
pub fn grassmannian(xi: &[i64]) -> Result<WeightSystem> {
    let k = xi.len();
    if k == 0 || !strictly_decreasing(xi) || xi[k - 1] <= 0 {
        return Err(Error::IneffectiveParameters("ξ must be strictly decreasing and positive".into()));
    }
    let y: Vec<i64> = (0..2 * k).map(|i| if i < k { -xi[i] } else { xi[2 * k - 1 - i] }).collect();
    let n = 2 * k - 1;
    let points = (0..2 * k)
        .map(|i| {
            let mut w: Vec<i64> = (0..2 * k).filter(|&j| j != i && j != n - i).map(|j| y[j] - y[i]).collect();
            w.push(-y[i]);
            (i, w)
        })
        .collect();
    check_effective(WeightSystem::new(n, points)?)
}

pub fn v5() -> WeightSystem {
    WeightSystem::new(3, vec![(0, vec![1, 2, 3]), (1, vec![-1, 1, 4]), (2, vec![-1, -4, 1]), (3, vec![-1, -2, -3])])
        .expect("valid fixture")
}

pub fn v22() -> WeightSystem {
    WeightSystem::new(3, vec![(0, vec![1, 2, 3]), (1, vec![-1, 1, 5]), (2, vec![-1, -5, 1]), (3, vec![-1, -2, -3])])
        .expect("valid fixture")
}

/// Points with `λ = (0, 1, 1, 2)`: `{a, b}, {−b, a}, {−a, b}, {−b, −a}`.
pub fn s2xs2(a: i64, b: i64) -> Result<WeightSystem> {
    if a <= 0 || b <= 0 {
        return Err(Error::IneffectiveParameters("a and b must be positive".into()));
    }
    let points = vec![(0, vec![a, b]), (1, vec![-b, a]), (1, vec![-a, b]), (2, vec![-b, -a])];
    check_effective(WeightSystem::new(2, points)?)
}

pub fn fixture(spec: &FixtureSpec) -> Result<WeightSystem> {
    match spec {
        FixtureSpec::Cp { xi } => cp(xi),
        FixtureSpec::Grassmannian { xi } => grassmannian(xi),
        FixtureSpec::V5 => Ok(v5()),
        FixtureSpec::V22 => Ok(v22()),
        FixtureSpec::S2xs2 { a, b } => s2xs2(*a, *b),
    }
}

/// The fixtures exercised by the verification suites.
pub fn standard_fixtures() -> Vec<(String, WeightSystem)> {
    let mut out = vec![
        ("cp2".to_string(), cp(&[2, 1, 0]).expect("valid")),
        ("cp3".to_string(), cp(&[3, 2, 1, 0]).expect("valid")),
        ("cp4".to_string(), cp(&[4, 3, 2, 1, 0]).expect("valid")),
        ("gr2(R5)".to_string(), grassmannian(&[2, 1]).expect("valid")),
        ("v5".to_string(), v5()),
        ("v22".to_string(), v22()),
    ];
    for a in 1..=5 {
        for b in 1..=5 {
            if a.gcd(&b) == 1 {
                out.push((format!("s2xs2({a},{b})"), s2xs2(a, b).expect("coprime")));
            }
        }
    }
    out
}
