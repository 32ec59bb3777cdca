//! Integer Laurent polynomials and exact ratios of them.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// `Σ c_k t^k` with integer coefficients; no zero coefficients are stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPolynomial {
    terms: BTreeMap<i64, BigInt>,
}

impl LaurentPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    pub fn monomial(c: impl Into<BigInt>, k: i64) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(k, c);
        }
        LaurentPolynomial { terms }
    }

    /// `1 − t^k`.
    pub fn one_minus_t(k: i64) -> Self {
        Self::one() - Self::monomial(1, k)
    }

    pub fn from_terms(pairs: impl IntoIterator<Item = (i64, BigInt)>) -> Self {
        let mut p = Self::zero();
        for (k, c) in pairs {
            p.add_term(k, c);
        }
        p
    }

    fn add_term(&mut self, k: i64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(k).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.terms.iter().map(|(&k, c)| (k, c))
    }

    pub fn coefficient(&self, k: i64) -> BigInt {
        self.terms.get(&k).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn min_exponent(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exponent(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Value at `t = 1`.
    pub fn at_one(&self) -> BigInt {
        self.terms.values().fold(BigInt::zero(), |a, c| a + c)
    }

    /// Multiply by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentPolynomial { terms: self.terms.iter().map(|(&e, c)| (e + k, c.clone())).collect() }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::from_terms(self.terms.iter().map(|(&k, x)| (k, x * c)))
    }

    pub fn pow(&self, e: usize) -> Self {
        (0..e).fold(Self::one(), |acc, _| &acc * self)
    }

    /// `(t-power, ordinary polynomial with nonzero constant term)`.
    pub(crate) fn split(&self) -> (i64, Poly) {
        let Some(lo) = self.min_exponent() else {
            return (0, Poly::zero());
        };
        let hi = self.max_exponent().unwrap_or(lo);
        let mut c = vec![BigInt::zero(); (hi - lo + 1) as usize];
        for (&k, x) in &self.terms {
            c[(k - lo) as usize] = x.clone();
        }
        (lo, Poly::new(c))
    }

    pub(crate) fn from_poly(p: &Poly, shift: i64) -> Self {
        Self::from_terms(p.c.iter().enumerate().map(|(k, x)| (k as i64 + shift, x.clone())))
    }

    /// Exact quotient `self / d`, if it is a Laurent polynomial.
    pub fn exact_div(&self, d: &LaurentPolynomial) -> Option<LaurentPolynomial> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        let (sa, a) = self.split();
        let (sb, b) = d.split();
        let (q, r) = a.div_rem_exact_lead(&b)?;
        if !r.is_zero() {
            return None;
        }
        Some(Self::from_poly(&q, sa - sb))
    }
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&k, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            match (k, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "t")?,
                (1, false) => write!(f, "{mag}*t")?,
                (_, true) => write!(f, "t^{k}")?,
                (_, false) => write!(f, "{mag}*t^{k}")?,
            }
        }
        Ok(())
    }
}

impl std::ops::Add for LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn add(mut self, rhs: LaurentPolynomial) -> LaurentPolynomial {
        for (k, c) in rhs.terms {
            self.add_term(k, c);
        }
        self
    }
}

impl std::ops::Sub for LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn sub(mut self, rhs: LaurentPolynomial) -> LaurentPolynomial {
        for (k, c) in rhs.terms {
            self.add_term(k, -c);
        }
        self
    }
}

impl std::ops::Neg for LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn neg(self) -> LaurentPolynomial {
        LaurentPolynomial { terms: self.terms.into_iter().map(|(k, c)| (k, -c)).collect() }
    }
}

impl std::ops::Mul for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn mul(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
        let mut out = LaurentPolynomial::zero();
        for (&a, x) in &self.terms {
            for (&b, y) in &rhs.terms {
                out.add_term(a + b, x * y);
            }
        }
        out
    }
}

impl std::ops::Mul for LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn mul(self, rhs: LaurentPolynomial) -> LaurentPolynomial {
        &self * &rhs
    }
}

/// Dense polynomial in `t` with integer coefficients, `c[k]` the coefficient of `t^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Poly {
    pub(crate) c: Vec<BigInt>,
}

impl Poly {
    pub(crate) fn new(mut c: Vec<BigInt>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub(crate) fn zero() -> Self {
        Poly { c: vec![] }
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    fn lead(&self) -> &BigInt {
        self.c.last().expect("nonzero polynomial")
    }

    pub(crate) fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![BigInt::zero(); self.c.len() + o.c.len() - 1];
        for (i, x) in self.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in o.c.iter().enumerate() {
                c[i + j] += x * y;
            }
        }
        Poly::new(c)
    }

    /// Division when every step divides exactly over the integers; `None`
    /// when a coefficient would leave the integers (so `b` cannot divide `a`
    /// with integer quotient — callers treat that as non-divisibility).
    pub(crate) fn div_rem_exact_lead(&self, b: &Poly) -> Option<(Poly, Poly)> {
        if b.is_zero() {
            return None;
        }
        let mut r = self.c.clone();
        let db = b.degree();
        if self.is_zero() || self.degree() < db {
            return Some((Poly::zero(), self.clone()));
        }
        let mut q = vec![BigInt::zero(); self.degree() - db + 1];
        let lb = b.lead().clone();
        for k in (0..q.len()).rev() {
            let top = r[k + db].clone();
            if top.is_zero() {
                continue;
            }
            let (quo, rem) = top.div_rem(&lb);
            if !rem.is_zero() {
                return Some((Poly::zero(), Poly::new(vec![BigInt::one()])));
            }
            for (j, y) in b.c.iter().enumerate() {
                r[k + j] -= &quo * y;
            }
            q[k] = quo;
        }
        Some((Poly::new(q), Poly::new(r)))
    }

    fn content(&self) -> BigInt {
        self.c.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
    }

    fn primitive_part(&self) -> Poly {
        let g = self.content();
        if g.is_zero() {
            return self.clone();
        }
        let g = if self.lead().is_negative() { -g } else { g };
        Poly::new(self.c.iter().map(|x| x / &g).collect())
    }

    /// Remainder of `a` modulo `b` up to a nonzero constant factor
    /// (content is removed as the reduction proceeds).
    fn pseudo_rem(&self, b: &Poly) -> Poly {
        let db = b.degree();
        let lb = b.lead().clone();
        let mut r = self.clone();
        while !r.is_zero() && r.degree() >= db {
            let top = r.lead().clone();
            let shift = r.degree() - db;
            let mut c: Vec<BigInt> = r.c.iter().map(|x| x * &lb).collect();
            for (j, y) in b.c.iter().enumerate() {
                c[shift + j] -= &top * y;
            }
            r = Poly::new(c).primitive_part();
        }
        r
    }

    /// Primitive gcd with positive leading coefficient.
    pub(crate) fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.primitive_part(), o.primitive_part());
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b);
            a = b;
            b = r.primitive_part();
        }
        a.primitive_part()
    }
}

/// `numerator / denominator`, kept reduced: no common polynomial factor, no
/// common content, all powers of `t` in the numerator, denominator with
/// nonzero constant term and positive leading coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentRational {
    numerator: LaurentPolynomial,
    denominator: LaurentPolynomial,
}

impl LaurentRational {
    pub fn new(numerator: LaurentPolynomial, denominator: LaurentPolynomial) -> Option<Self> {
        if denominator.is_zero() {
            return None;
        }
        if numerator.is_zero() {
            return Some(LaurentRational { numerator, denominator: LaurentPolynomial::one() });
        }
        let (sn, n) = numerator.split();
        let (sd, d) = denominator.split();
        let g = n.gcd(&d);
        let n = n.div_rem_exact_lead(&g).map(|x| x.0).unwrap_or(n);
        let d = d.div_rem_exact_lead(&g).map(|x| x.0).unwrap_or(d);
        let mut cg = n.content().gcd(&d.content());
        if d.lead().is_negative() {
            cg = -cg;
        }
        let n = Poly::new(n.c.iter().map(|x| x / &cg).collect());
        let d = Poly::new(d.c.iter().map(|x| x / &cg).collect());
        Some(LaurentRational {
            numerator: LaurentPolynomial::from_poly(&n, sn - sd),
            denominator: LaurentPolynomial::from_poly(&d, 0),
        })
    }

    pub fn from_polynomial(p: LaurentPolynomial) -> Self {
        LaurentRational::new(p, LaurentPolynomial::one()).expect("nonzero denominator")
    }

    pub fn numerator(&self) -> &LaurentPolynomial {
        &self.numerator
    }

    pub fn denominator(&self) -> &LaurentPolynomial {
        &self.denominator
    }

    /// The Laurent polynomial this equals, if the reduced denominator is ±1.
    pub fn as_polynomial(&self) -> Option<LaurentPolynomial> {
        let (s, d) = self.denominator.split();
        if s == 0 && d.c.len() == 1 && d.c[0].is_one() {
            Some(self.numerator.clone())
        } else {
            None
        }
    }

    pub fn add(&self, o: &LaurentRational) -> LaurentRational {
        let num = &self.numerator * &o.denominator + &o.numerator * &self.denominator;
        let den = &self.denominator * &o.denominator;
        LaurentRational::new(num, den).expect("product of nonzero denominators")
    }
}
