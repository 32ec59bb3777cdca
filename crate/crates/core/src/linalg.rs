//! Exact linear algebra over the rationals: the edge matrix of a multigraph,
//! determinants, kernels and the strictly-positive kernel-vector decision.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::model::Multigraph;

pub type Q = BigRational;

fn q(x: i64) -> Q {
    Q::from_integer(BigInt::from(x))
}

/// Dense matrix with exact rational entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Q>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix { rows, cols, entries: vec![Q::zero(); rows * cols] }
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = RationalMatrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix");
            for (j, &x) in row.iter().enumerate() {
                m.entries[i * c + j] = q(x);
            }
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RationalMatrix::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Q::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Q) {
        self.entries[i * self.cols + j] = v;
    }

    /// Subtract `d_i` from diagonal entry `i`.
    pub fn minus_diagonal(&self, d: &[i64]) -> Self {
        let mut m = self.clone();
        for (i, &x) in d.iter().enumerate() {
            let v = m.get(i, i) - q(x);
            m.set(i, i, v);
        }
        m
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// `M · v` for an integer vector.
    pub fn apply(&self, v: &[BigInt]) -> Vec<Q> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(Q::zero(), |acc, j| {
                    acc + self.get(i, j) * Q::from_integer(v[j].clone())
                })
            })
            .collect()
    }

    /// Integer entries, if every entry is an integer.
    pub fn to_i64(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| {
                        let x = self.get(i, j);
                        if x.is_integer() {
                            x.to_integer().to_i64()
                        } else {
                            None
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// JSON array of rows, entries printed as strings (`"p/q"` when needed).
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            (0..self.rows)
                .map(|i| {
                    serde_json::Value::Array(
                        (0..self.cols).map(|j| serde_json::Value::String(self.get(i, j).to_string())).collect(),
                    )
                })
                .collect(),
        )
    }

    /// Reduced row echelon form; returns the pivot columns.
    fn rref(&self) -> (RationalMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            if p != row {
                for j in 0..m.cols {
                    m.entries.swap(p * m.cols + j, row * m.cols + j);
                }
            }
            let inv = m.get(row, col).recip();
            for j in col..m.cols {
                let v = m.get(row, j) * &inv;
                m.set(row, j, v);
            }
            for r in 0..m.rows {
                if r == row || m.get(r, col).is_zero() {
                    continue;
                }
                let f = m.get(r, col).clone();
                for j in col..m.cols {
                    let v = m.get(r, j) - &f * m.get(row, j);
                    m.set(r, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Exact determinant (square matrices only).
    pub fn determinant(&self) -> Q {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Q::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m.get(r, col).is_zero()) else {
                return Q::zero();
            };
            if p != col {
                for j in 0..n {
                    m.entries.swap(p * n + j, col * n + j);
                }
                det = -det;
            }
            let piv = m.get(col, col).clone();
            det *= &piv;
            for r in col + 1..n {
                if m.get(r, col).is_zero() {
                    continue;
                }
                let f = m.get(r, col) / &piv;
                for j in col..n {
                    let v = m.get(r, j) - &f * m.get(col, j);
                    m.set(r, j, v);
                }
            }
        }
        det
    }
}

/// `δ(P, e)`: +1 if the non-cycle edge leaves `P`, −1 if it arrives at `P`.
pub fn delta(vertex: usize, edge: (usize, usize)) -> i64 {
    let (a, b) = edge;
    if a == b {
        0
    } else if a == vertex {
        1
    } else if b == vertex {
        -1
    } else {
        0
    }
}

/// Integer edge matrix `a_{h,m} = δ(i(e_h), e_m) − δ(t(e_h), e_m)`.
pub fn graph_matrix_i64(edges: &[(usize, usize)]) -> Vec<Vec<i64>> {
    edges
        .iter()
        .map(|&(src, tgt)| {
            if src == tgt {
                return vec![0; edges.len()];
            }
            edges.iter().map(|&e| delta(src, e) - delta(tgt, e)).collect()
        })
        .collect()
}

/// Edge matrix of `graph` with rows and columns in `edge_order` (indices
/// into `graph.edges()`).
pub fn graph_matrix(graph: &Multigraph, edge_order: &[usize]) -> RationalMatrix {
    let edges: Vec<(usize, usize)> = edge_order.iter().map(|&k| graph.edges()[k]).collect();
    RationalMatrix::from_i64(&graph_matrix_i64(&edges))
}

/// Rank, kernel basis and (optionally) a strictly positive kernel vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NullspaceDescription {
    pub rank: usize,
    pub basis: Vec<Vec<BigInt>>,
    pub positive_witness: Option<Vec<BigInt>>,
}

/// Divide by the gcd of the entries and make the first nonzero entry positive.
pub fn primitive(v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return v;
    }
    let sign = v.iter().find(|x| !x.is_zero()).map_or(1, |x| if x.is_negative() { -1 } else { 1 });
    let g = g * sign;
    v.into_iter().map(|x| x / &g).collect()
}

/// Clear denominators of a rational vector (no gcd reduction, sign kept).
fn clear_denominators(v: &[Q]) -> Vec<BigInt> {
    let l = v.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    v.iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect()
}

/// Kernel of `m` with the reduced-echelon convention: one vector per free
/// column, scaled to coprime integers with first nonzero entry positive.
pub fn nullspace(m: &RationalMatrix) -> NullspaceDescription {
    let (r, pivots) = m.rref();
    let mut basis = Vec::new();
    for f in (0..m.cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Q::zero(); m.cols];
        v[f] = Q::one();
        for (row, &p) in pivots.iter().enumerate() {
            v[p] = -r.get(row, f).clone();
        }
        basis.push(primitive(clear_denominators(&v)));
    }
    let positive_witness = positive_witness_from_basis(&basis);
    NullspaceDescription { rank: pivots.len(), basis, positive_witness }
}

/// A strictly positive integer kernel vector with coprime entries, if any.
pub fn positive_integer_nullvector(m: &RationalMatrix) -> Option<Vec<BigInt>> {
    nullspace(m).positive_witness
}

fn positive_witness_from_basis(basis: &[Vec<BigInt>]) -> Option<Vec<BigInt>> {
    let len = basis.first()?.len();
    // Coordinates c with Σ c_j v_j ≥ 1 in every entry; scaling makes this
    // equivalent to the strict system.
    let rows: Vec<Vec<Q>> = (0..len)
        .map(|e| basis.iter().map(|v| Q::from_integer(v[e].clone())).collect())
        .collect();
    let ones = vec![Q::one(); len];
    let coeffs = fourier_motzkin(&rows, &ones)?;
    let w: Vec<Q> = (0..len)
        .map(|e| {
            basis.iter().zip(&coeffs).fold(Q::zero(), |acc, (v, c)| acc + c * Q::from_integer(v[e].clone()))
        })
        .collect();
    let w = primitive(clear_denominators(&w));
    debug_assert!(w.iter().all(|x| x.is_positive()));
    Some(minimize_witness(basis, w))
}

/// Shrink a positive witness: search for kernel vectors bounded by 1, 2, 4, …
/// and return the lexicographically smallest one found at the first bound
/// that admits any.
fn minimize_witness(basis: &[Vec<BigInt>], w: Vec<BigInt>) -> Vec<BigInt> {
    let max = w.iter().max().and_then(|x| x.to_i64()).unwrap_or(i64::MAX);
    let Some(param) = KernelParametrization::from_basis(basis) else {
        return w;
    };
    let mut bound = 1i64;
    while bound < max {
        // Keep the search small: it is cosmetic.
        if (bound as f64).powi(param.free.len() as i32) > 2.0e5 {
            break;
        }
        if let Some(best) = param.lattice_points(bound).into_iter().min() {
            return best.into_iter().map(BigInt::from).collect();
        }
        bound *= 2;
    }
    w
}

/// Solve `A x ≥ b` exactly by Fourier–Motzkin elimination; returns one
/// rational solution if the system is feasible.
pub fn fourier_motzkin(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let vars = a.first().map_or(0, |r| r.len());
    // stages[k] holds the system in variables 0..k (exclusive of eliminated ones).
    let mut system: Vec<(Vec<Q>, Q)> = a.iter().cloned().zip(b.iter().cloned()).collect();
    let mut stages: Vec<Vec<(Vec<Q>, Q)>> = Vec::with_capacity(vars);
    for k in (0..vars).rev() {
        stages.push(system.clone());
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        let mut rest = Vec::new();
        for (row, rhs) in system {
            let c = row[k].clone();
            if c.is_positive() {
                lower.push((row, rhs, c));
            } else if c.is_negative() {
                upper.push((row, rhs, c));
            } else {
                rest.push((row, rhs));
            }
        }
        for (lr, lb, lc) in &lower {
            for (ur, ub, uc) in &upper {
                // (lr/lc) combined with (ur/|uc|) eliminates x_k.
                let ua = -uc.clone();
                let row: Vec<Q> = lr.iter().zip(ur).map(|(x, y)| x / lc + y / &ua).collect();
                let rhs = lb / lc + ub / &ua;
                rest.push((row, rhs));
            }
        }
        system = dedup_rows(rest);
    }
    if system.iter().any(|(_, rhs)| rhs.is_positive()) {
        return None;
    }
    let mut x = vec![Q::zero(); vars];
    for (k, stage) in (0..vars).zip(stages.iter().rev()) {
        let mut lo: Option<Q> = None;
        let mut hi: Option<Q> = None;
        for (row, rhs) in stage {
            let c = &row[k];
            if c.is_zero() {
                continue;
            }
            let partial = (0..k).fold(rhs.clone(), |acc, j| acc - &row[j] * &x[j]);
            let bound = partial / c;
            if c.is_positive() {
                lo = Some(match lo {
                    Some(l) if l >= bound => l,
                    _ => bound,
                });
            } else {
                hi = Some(match hi {
                    Some(h) if h <= bound => h,
                    _ => bound,
                });
            }
        }
        x[k] = match (lo, hi) {
            (Some(l), Some(h)) => {
                let c = l.ceil();
                if c <= h {
                    c
                } else {
                    (l + h) / q(2)
                }
            }
            (Some(l), None) => l.ceil(),
            (None, Some(h)) => h.floor(),
            (None, None) => Q::zero(),
        };
    }
    Some(x)
}

fn dedup_rows(rows: Vec<(Vec<Q>, Q)>) -> Vec<(Vec<Q>, Q)> {
    let mut out: Vec<(Vec<Q>, Q)> = Vec::with_capacity(rows.len());
    for (row, rhs) in rows {
        // Normalize by the largest absolute coefficient so duplicates collapse.
        let scale = row.iter().map(|x| x.abs()).max().unwrap_or_else(Q::zero);
        let (row, rhs) = if scale.is_zero() {
            (row, rhs)
        } else {
            (row.iter().map(|x| x / &scale).collect(), rhs / &scale)
        };
        if row.iter().all(|x| x.is_zero()) && !rhs.is_positive() {
            continue;
        }
        if let Some(existing) = out.iter_mut().find(|(r, _)| *r == row) {
            if rhs > existing.1 {
                existing.1 = rhs;
            }
        } else {
            out.push((row, rhs));
        }
    }
    out
}

/// Kernel written with some coordinates free and the others as integer
/// combinations: `den_p · x_p = Σ_f num_{p,f} · x_f`.
#[derive(Debug, Clone)]
pub struct KernelParametrization {
    pub len: usize,
    pub free: Vec<usize>,
    /// `(pivot coordinate, denominator, numerators over the free coordinates)`
    pub dependent: Vec<(usize, i128, Vec<i128>)>,
}

impl KernelParametrization {
    /// Parametrize `span(basis)` choosing the earliest possible free
    /// coordinates.
    pub fn from_basis(basis: &[Vec<BigInt>]) -> Option<Self> {
        let len = basis.first()?.len();
        let d = basis.len();
        // Rows are basis vectors; reduce so each of d coordinates becomes a pivot.
        let rows: Vec<Vec<i64>> = basis
            .iter()
            .map(|v| v.iter().map(|x| x.to_i64()).collect::<Option<Vec<_>>>())
            .collect::<Option<_>>()?;
        let (r, pivots) = RationalMatrix::from_i64(&rows).rref();
        debug_assert_eq!(pivots.len(), d);
        // x = Σ_k x_{pivots[k]} · r_k, so every other coordinate is a
        // combination of the pivot ones.
        let mut dependent = Vec::new();
        for c in (0..len).filter(|c| !pivots.contains(c)) {
            let coeffs: Vec<Q> = (0..d).map(|k| r.get(k, c).clone()).collect();
            let den = coeffs.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
            let nums = coeffs
                .iter()
                .map(|x| (x * Q::from_integer(den.clone())).to_integer().to_i128())
                .collect::<Option<Vec<_>>>()?;
            dependent.push((c, den.to_i128()?, nums));
        }
        Some(KernelParametrization { len, free: pivots, dependent })
    }

    /// Parametrize the kernel of an integer matrix.
    pub fn from_matrix(m: &RationalMatrix) -> Option<Self> {
        let ns = nullspace(m);
        if ns.basis.is_empty() {
            return None;
        }
        Self::from_basis(&ns.basis)
    }

    /// Every kernel vector with all entries in `[1, bound]`, in
    /// lexicographic order of the free coordinates.
    pub fn lattice_points(&self, bound: i64) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        let d = self.free.len();
        if d == 0 {
            return out;
        }
        let mut vals = vec![1i64; d];
        loop {
            if let Some(v) = self.complete(&vals, bound) {
                out.push(v);
            }
            // odometer, last free coordinate fastest
            let mut k = d;
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                if vals[k] < bound {
                    vals[k] += 1;
                    for x in vals.iter_mut().skip(k + 1) {
                        *x = 1;
                    }
                    break;
                }
            }
        }
    }

    /// Fill in the dependent coordinates; `None` if one is not an integer in
    /// `[1, bound]`.
    pub fn complete(&self, free_vals: &[i64], bound: i64) -> Option<Vec<i64>> {
        let mut v = vec![0i64; self.len];
        for (&c, &x) in self.free.iter().zip(free_vals) {
            v[c] = x;
        }
        for (c, den, nums) in &self.dependent {
            let s: i128 = nums.iter().zip(free_vals).map(|(a, &x)| a * x as i128).sum();
            if s % den != 0 {
                return None;
            }
            let x = s / den;
            if x < 1 || x > bound as i128 {
                return None;
            }
            v[*c] = x as i64;
        }
        Some(v)
    }
}

/// Fraction-free (Bareiss) determinant of a small integer matrix.
pub fn det_i128(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m.to_vec();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&r| a[r][k] != 0) else {
                return 0;
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}
