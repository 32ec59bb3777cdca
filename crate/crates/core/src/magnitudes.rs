//! Magnitude labelings: the invariant sum, the composition search, and
//! solving the edge system `(A(Γ) − diag(m))·w = 0` for positive weights.
//!
//! The search walks the edges component by component. For each component
//! the determinant of `A − diag(m)` is multilinear in the labels, so it is
//! expanded once over principal minors,
//! `det(A − diag(m)) = Σ_S Π_{h∈S}(−m_h) · det A[Sᶜ]`,
//! and partially evaluated as labels get fixed. A component whose last label
//! is fixed with a nonzero determinant cuts the whole suffix.

use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::components_and_cycles;
use crate::linalg::{det_i128, graph_matrix_i64, nullspace, NullspaceDescription, RationalMatrix};
use crate::model::{MagnitudeLabeling, Multigraph, Profile, WeightSystem, WeightedMultigraph};

/// `Σ_p N_p [6p(p−1) + (5n − 3n²)/2]`, the value every labeling must sum to.
pub fn magnitude_sum(profile: &Profile) -> Result<i64> {
    let n = profile.n() as i64;
    let twice: i64 = profile
        .counts()
        .iter()
        .enumerate()
        .map(|(p, &c)| {
            let p = p as i64;
            c as i64 * (12 * p * (p - 1) + 5 * n - 3 * n * n)
        })
        .sum();
    if twice % 2 != 0 {
        return Err(Error::NonIntegralSum);
    }
    Ok(twice / 2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Labels ≥ 0 (≥ 1 off cycles for minimal profiles).
    Nonnegative,
    /// `|m(e)| ≤ 2D`.
    Bounded(i64),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchOptions {
    pub mode: Mode,
    /// Every label is a multiple of this.
    pub divisor_c: Option<i64>,
    /// Minimal profiles: `m(e01) = m(e_{n−1,n}) = C`; otherwise the labels
    /// of the edges leaving the index-0 point towards index-1 points have
    /// gcd `C`. Only applied to edges the graph actually has.
    pub force_unit_edges: bool,
    /// In dimension 8, only `C1 ∈ {1, 5}` is admissible.
    pub dim8_strict: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { mode: Mode::Nonnegative, divisor_c: None, force_unit_edges: false, dim8_strict: false }
    }
}

/// Which edges the unit-edge rule designates, as indices into the graph's
/// edge list. For minimal profiles each designated edge is pinned to `C`
/// individually; otherwise the whole group must have gcd `C`.
pub fn designated_edges(graph: &Multigraph) -> (Vec<usize>, bool) {
    let profile = graph.profile();
    let edges = graph.edges();
    if profile.is_minimal() {
        let n = profile.n();
        let pinned = edges
            .iter()
            .enumerate()
            .filter(|(_, &e)| e == (0, 1) || (n >= 2 && e == (n - 1, n)) || (n == 1 && e == (0, 1)))
            .map(|(k, _)| k)
            .collect();
        (pinned, true)
    } else {
        let group = edges
            .iter()
            .enumerate()
            .filter(|(_, &(a, b))| a != b && profile.lambda(a) == 0 && profile.lambda(b) == 1)
            .map(|(k, _)| k)
            .collect();
        (group, false)
    }
}

/// Precomputed search data for one graph.
struct Plan {
    /// Non-cycle edges in search order (graph edge indices).
    order: Vec<usize>,
    /// For each component: start position in `order` and its minor table.
    components: Vec<(usize, usize, Vec<i128>)>,
    /// Per position: inclusive bounds on the label.
    lo: Vec<i64>,
    hi: Vec<i64>,
    step: i64,
    target: i64,
    edge_count: usize,
    /// Group-gcd requirement (non-minimal unit rule): positions in `order`.
    gcd_group: Vec<usize>,
    prune: bool,
    /// Full edge matrix in `order`, for the overflow fallback.
    matrix: Vec<Vec<i64>>,
}

fn plan(graph: &Multigraph, opts: &SearchOptions, prune: bool) -> Result<Option<Plan>> {
    let profile = graph.profile();
    let target = magnitude_sum(&profile)?;
    if opts.mode == Mode::Nonnegative && !profile.is_minimal() && target < 0 {
        return Err(Error::ModeRefused);
    }
    let comps = components_and_cycles(graph);
    let mut order = Vec::new();
    let mut components = Vec::new();
    for (_, es) in &comps.components {
        let start = order.len();
        order.extend(es.iter().copied());
        let edges: Vec<(usize, usize)> = es.iter().map(|&k| graph.edges()[k]).collect();
        let a = graph_matrix_i64(&edges);
        components.push((start, es.len(), minor_table(&a)));
    }
    let edges: Vec<(usize, usize)> = order.iter().map(|&k| graph.edges()[k]).collect();
    let matrix = graph_matrix_i64(&edges);

    let step = opts.divisor_c.unwrap_or(1).max(1);
    let (lo0, hi0) = match opts.mode {
        Mode::Nonnegative => (if profile.is_minimal() { 1 } else { 0 }, target.max(0)),
        Mode::Bounded(d) => (-2 * d, 2 * d),
    };
    let mut lo = vec![lo0; order.len()];
    let mut hi = vec![hi0; order.len()];
    if prune {
        // Sign structure of each row: a positive kernel vector forces the
        // diagonal entry 2 − m to balance the off-diagonal entries.
        for (p, row) in matrix.iter().enumerate() {
            let off: Vec<i64> = row.iter().enumerate().filter(|&(q, _)| q != p).map(|(_, &x)| x).collect();
            let any_pos = off.iter().any(|&x| x > 0);
            let any_neg = off.iter().any(|&x| x < 0);
            match (any_pos, any_neg) {
                (false, false) => {
                    lo[p] = lo[p].max(2);
                    hi[p] = hi[p].min(2);
                }
                (true, false) => lo[p] = lo[p].max(3),
                (false, true) => hi[p] = hi[p].min(1),
                (true, true) => {}
            }
        }
    }
    let mut gcd_group = Vec::new();
    if opts.force_unit_edges {
        let (designated, pinned) = designated_edges(graph);
        let positions: Vec<usize> =
            designated.iter().filter_map(|k| order.iter().position(|x| x == k)).collect();
        if pinned {
            for &p in &positions {
                lo[p] = lo[p].max(step);
                hi[p] = hi[p].min(step);
            }
        } else {
            gcd_group = positions;
        }
    }
    // Round bounds to multiples of the step.
    for p in 0..order.len() {
        lo[p] = div_ceil(lo[p], step) * step;
        hi[p] = hi[p].div_euclid(step) * step;
        if lo[p] > hi[p] {
            return Ok(None);
        }
    }
    if target % step != 0 {
        return Ok(None);
    }
    Ok(Some(Plan {
        order,
        components,
        lo,
        hi,
        step,
        target,
        edge_count: graph.edges().len(),
        gcd_group,
        prune,
        matrix,
    }))
}

fn div_ceil(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

/// `T[S] = (−1)^{|S|} det A[Sᶜ]` indexed by bitmask `S` (bit k = edge k).
fn minor_table(a: &[Vec<i64>]) -> Vec<i128> {
    let k = a.len();
    let mut table = vec![0i128; 1 << k];
    for (s, slot) in table.iter_mut().enumerate() {
        let keep: Vec<usize> = (0..k).filter(|&i| s & (1 << i) == 0).collect();
        let sub: Vec<Vec<i128>> =
            keep.iter().map(|&i| keep.iter().map(|&j| a[i][j] as i128).collect()).collect();
        let d = det_i128(&sub);
        *slot = if s.count_ones() % 2 == 1 { -d } else { d };
    }
    table
}

struct Walker<'a, F: FnMut(&[i64])> {
    plan: &'a Plan,
    labels: Vec<i64>,
    /// Per position inside the current component, the partially evaluated
    /// table after fixing that label (None once i128 overflowed).
    tables: Vec<Option<Vec<i128>>>,
    suffix_lo: Vec<i64>,
    suffix_hi: Vec<i64>,
    /// Component index for every position, and whether the position closes it.
    comp_of: Vec<usize>,
    closes: Vec<bool>,
    sink: F,
}

impl<'a, F: FnMut(&[i64])> Walker<'a, F> {
    fn new(plan: &'a Plan, sink: F) -> Self {
        let len = plan.order.len();
        let mut suffix_lo = vec![0; len + 1];
        let mut suffix_hi = vec![0; len + 1];
        for p in (0..len).rev() {
            suffix_lo[p] = suffix_lo[p + 1] + plan.lo[p];
            suffix_hi[p] = suffix_hi[p + 1] + plan.hi[p];
        }
        let mut comp_of = vec![0; len];
        let mut closes = vec![false; len];
        for (c, &(start, size, _)) in plan.components.iter().enumerate() {
            comp_of[start..start + size].fill(c);
            closes[start + size - 1] = true;
        }
        Walker { plan, labels: vec![0; len], tables: vec![None; len], suffix_lo, suffix_hi, comp_of, closes, sink }
    }

    /// Label position `p` with `m`; returns false when the component closes
    /// with a nonzero determinant.
    fn assign(&mut self, p: usize, m: i64) -> bool {
        self.labels[p] = m;
        if !self.plan.prune {
            return true;
        }
        let c = self.comp_of[p];
        let (start, _, ref full) = self.plan.components[c];
        let prev: Option<&[i128]> = if p == start { Some(full.as_slice()) } else { self.tables[p - 1].as_deref() };
        let next = prev.and_then(|t| {
            let mut out = Vec::with_capacity(t.len() / 2);
            for j in 0..t.len() / 2 {
                out.push(t[2 * j].checked_add(t[2 * j + 1].checked_mul(m as i128)?)?);
            }
            Some(out)
        });
        let ok = if self.closes[p] {
            match &next {
                Some(t) => t[0] == 0,
                None => self.exact_component_det_is_zero(c),
            }
        } else {
            true
        };
        self.tables[p] = next;
        ok
    }

    fn exact_component_det_is_zero(&self, c: usize) -> bool {
        let (start, size, _) = self.plan.components[c];
        let rows: Vec<Vec<i64>> = (start..start + size)
            .map(|i| {
                (start..start + size)
                    .map(|j| self.plan.matrix[i][j] - if i == j { self.labels[i] } else { 0 })
                    .collect()
            })
            .collect();
        RationalMatrix::from_i64(&rows).determinant().is_zero()
    }

    fn walk(&mut self, p: usize, partial: i64) {
        let len = self.plan.order.len();
        if p == len {
            if partial == self.plan.target && self.gcd_ok() {
                let mut full = vec![0i64; self.plan.edge_count];
                for (pos, &k) in self.plan.order.iter().enumerate() {
                    full[k] = self.labels[pos];
                }
                (self.sink)(&full);
            }
            return;
        }
        let rest = self.plan.target - partial;
        // This label must leave a reachable remainder for the suffix.
        let lo = self.plan.lo[p].max(rest - self.suffix_hi[p + 1]);
        let hi = self.plan.hi[p].min(rest - self.suffix_lo[p + 1]);
        if lo > hi {
            return;
        }
        let step = self.plan.step;
        let mut m = div_ceil(lo, step) * step;
        while m <= hi {
            if self.assign(p, m) {
                self.walk(p + 1, partial + m);
            }
            m += step;
        }
    }

    fn gcd_ok(&self) -> bool {
        if self.plan.gcd_group.is_empty() {
            return true;
        }
        let g = self.plan.gcd_group.iter().fold(0i64, |g, &p| num_integer::gcd(g, self.labels[p]));
        g == self.plan.step
    }

    /// Values the first position can take (the parallel split).
    fn first_values(&self) -> Vec<i64> {
        if self.plan.order.is_empty() {
            return vec![];
        }
        let rest = self.plan.target;
        let lo = self.plan.lo[0].max(rest - self.suffix_hi[1]);
        let hi = self.plan.hi[0].min(rest - self.suffix_lo[1]);
        let step = self.plan.step;
        let mut out = Vec::new();
        let mut m = div_ceil(lo, step) * step;
        while m <= hi {
            out.push(m);
            m += step;
        }
        out
    }
}

/// Every labeling meeting the sum, sign, divisor and unit-edge constraints
/// (no determinant test), in lexicographic order over the search order.
pub fn enumerate_magnitude_labelings(graph: &Multigraph, opts: &SearchOptions) -> Result<Vec<MagnitudeLabeling>> {
    run(graph, opts, false, None)
}

/// Labelings for which every component matrix `A(Γ_i) − diag(m)` is singular.
pub fn singular_labelings(graph: &Multigraph, opts: &SearchOptions) -> Result<Vec<MagnitudeLabeling>> {
    run(graph, opts, true, None)
}

/// Number of parallel blocks for `singular_labelings_block`.
pub fn block_values(graph: &Multigraph, opts: &SearchOptions) -> Result<Vec<i64>> {
    let Some(plan) = plan(graph, opts, true)? else {
        return Ok(vec![]);
    };
    let walker = Walker::new(&plan, |_: &[i64]| {});
    if plan.order.is_empty() {
        // Only cycles: a single trivial block.
        return Ok(vec![0]);
    }
    Ok(walker.first_values())
}

/// Singular labelings whose first searched label equals `first` (one block
/// of the parallel split). For graphs made only of cycles pass `0`.
pub fn singular_labelings_block(graph: &Multigraph, opts: &SearchOptions, first: i64) -> Result<Vec<MagnitudeLabeling>> {
    run(graph, opts, true, Some(first))
}

fn run(graph: &Multigraph, opts: &SearchOptions, prune: bool, only_first: Option<i64>) -> Result<Vec<MagnitudeLabeling>> {
    let Some(plan) = plan(graph, opts, prune)? else {
        return Ok(vec![]);
    };
    if plan.order.is_empty() {
        let mut out = Vec::new();
        if plan.target == 0 {
            out.push(MagnitudeLabeling { magnitudes: vec![0; plan.edge_count] });
        }
        return Ok(out);
    }
    let firsts = {
        let w = Walker::new(&plan, |_: &[i64]| {});
        w.first_values()
    };
    let firsts: Vec<i64> = match only_first {
        Some(f) => firsts.into_iter().filter(|&x| x == f).collect(),
        None => firsts,
    };
    let chunks: Vec<Vec<MagnitudeLabeling>> = firsts
        .par_iter()
        .map(|&m| {
            let mut out = Vec::new();
            let mut w = Walker::new(&plan, |l: &[i64]| out.push(MagnitudeLabeling { magnitudes: l.to_vec() }));
            if w.assign(0, m) {
                w.walk(1, m);
            }
            drop(w);
            out
        })
        .collect();
    Ok(chunks.into_iter().flatten().collect())
}

/// Labelings, kernel and representative weights of one admissible
/// `(graph, magnitudes)` pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightFamily {
    pub graph: Multigraph,
    pub magnitudes: MagnitudeLabeling,
    /// Kernel of `A(Γ) − diag(m)` in the graph's edge order.
    pub nullspace: NullspaceDescription,
    pub witness_instances: Vec<WeightSystem>,
}

impl WeightFamily {
    /// `A(Γ) − diag(m)` in the graph's edge order.
    pub fn matrix(&self) -> RationalMatrix {
        RationalMatrix::from_i64(&graph_matrix_i64(self.graph.edges())).minus_diagonal(&self.magnitudes.magnitudes)
    }

    pub fn weighted(&self, edge_weights: &[i64]) -> WeightedMultigraph {
        WeightedMultigraph { graph: self.graph.clone(), weights: edge_weights.to_vec() }
    }

    /// Number of free parameters.
    pub fn dimension(&self) -> usize {
        self.nullspace.basis.len()
    }
}

/// Solve for positive weights; `None` when some component matrix is
/// nonsingular or its kernel misses the open positive orthant.
pub fn solve_weights(graph: &Multigraph, m: &MagnitudeLabeling) -> Option<WeightFamily> {
    let edges = graph.edges();
    if m.magnitudes.len() != edges.len() {
        return None;
    }
    let comps = components_and_cycles(graph);
    for (_, es) in &comps.components {
        let sub: Vec<(usize, usize)> = es.iter().map(|&k| edges[k]).collect();
        let mags: Vec<i64> = es.iter().map(|&k| m.magnitudes[k]).collect();
        let mat = RationalMatrix::from_i64(&graph_matrix_i64(&sub)).minus_diagonal(&mags);
        nullspace(&mat).positive_witness?;
    }
    let whole = RationalMatrix::from_i64(&graph_matrix_i64(edges)).minus_diagonal(&m.magnitudes);
    let ns = nullspace(&whole);
    let witness = ns.positive_witness.clone()?;
    let w: Vec<i64> = witness.iter().map(|x| x.to_i64()).collect::<Option<_>>()?;
    let wg = WeightedMultigraph { graph: graph.clone(), weights: w };
    let instances = wg.weight_system().ok().into_iter().collect();
    debug_assert!(whole.apply(&witness).iter().all(|x| x.is_zero()));
    debug_assert!(witness.iter().all(|x| x.is_positive()));
    Some(WeightFamily { graph: graph.clone(), magnitudes: m.clone(), nullspace: ns, witness_instances: instances })
}
