//! Multigraphs compatible with a profile, the reversal involution,
//! connected components, and the passage between weights and graphs.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Multigraph, Profile, WeightSystem, WeightedMultigraph};

/// Which edges are allowed, comparing the indices of the endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeFilter {
    All,
    /// `λ(source) ≤ λ(target)`, cycles allowed.
    Nonnegative,
    /// `λ(source) < λ(target)`, no cycles.
    Positive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dedup {
    None,
    Reversal,
}

impl EdgeFilter {
    fn allows(self, profile: &Profile, a: usize, b: usize) -> bool {
        let (la, lb) = (profile.lambda(a), profile.lambda(b));
        match self {
            EdgeFilter::All => true,
            EdgeFilter::Nonnegative => la <= lb,
            EdgeFilter::Positive => la < lb,
        }
    }
}

/// All multigraphs with out-degree `n − λ_i` and in-degree `λ_i`, restricted
/// by `filter`, optionally one per reversal class. Output is sorted.
pub fn enumerate_multigraphs(profile: &Profile, filter: EdgeFilter, dedup: Dedup) -> Result<Vec<Multigraph>> {
    let v = profile.len();
    let n = profile.n();
    let out: Vec<usize> = profile.lambdas().iter().map(|&l| n - l).collect();
    let mut cap: Vec<usize> = profile.lambdas().to_vec();
    let targets: Vec<Vec<usize>> =
        (0..v).map(|a| (0..v).filter(|&b| filter.allows(profile, a, b)).collect()).collect();

    let mut found = Vec::new();
    let mut edges = Vec::new();
    distribute(0, 0, out[0], &out, &targets, &mut cap, &mut edges, &mut found);

    let rho = match dedup {
        Dedup::Reversal => Some(profile.reversal_map()?),
        Dedup::None => None,
    };
    let mut graphs: BTreeSet<Vec<(usize, usize)>> = BTreeSet::new();
    for mut es in found {
        es.sort_unstable();
        if let Some(rho) = &rho {
            let rev = reverse_edges(&es, rho);
            if rev < es {
                continue;
            }
        }
        graphs.insert(es);
    }
    if graphs.is_empty() {
        return Err(Error::ProfileUnrealizable);
    }
    Ok(graphs.into_iter().map(|es| Multigraph::from_sorted_unchecked(profile, es)).collect())
}

/// Recursive bounded distribution of the out-degree of vertex `a` over its
/// allowed targets, starting at target position `t`.
#[allow(clippy::too_many_arguments)]
fn distribute(
    a: usize,
    t: usize,
    remaining: usize,
    out: &[usize],
    targets: &[Vec<usize>],
    cap: &mut [usize],
    edges: &mut Vec<(usize, usize)>,
    found: &mut Vec<Vec<(usize, usize)>>,
) {
    if remaining == 0 {
        if a + 1 == out.len() {
            if cap.iter().all(|&c| c == 0) {
                found.push(edges.clone());
            }
            return;
        }
        // Cut: every vertex still short of in-edges must be reachable from
        // some vertex that has not distributed its out-edges yet.
        let starved = (0..cap.len())
            .any(|b| cap[b] > 0 && !(a + 1..out.len()).any(|s| targets[s].contains(&b)));
        if starved {
            return;
        }
        distribute(a + 1, 0, out[a + 1], out, targets, cap, edges, found);
        return;
    }
    if t == targets[a].len() {
        return;
    }
    let b = targets[a][t];
    let most = remaining.min(cap[b]);
    for k in (0..=most).rev() {
        cap[b] -= k;
        for _ in 0..k {
            edges.push((a, b));
        }
        distribute(a, t + 1, remaining - k, out, targets, cap, edges, found);
        for _ in 0..k {
            edges.pop();
        }
        cap[b] += k;
    }
}

fn reverse_edges(edges: &[(usize, usize)], rho: &[usize]) -> Vec<(usize, usize)> {
    let mut rev: Vec<(usize, usize)> = edges.iter().map(|&(a, b)| (rho[b], rho[a])).collect();
    rev.sort_unstable();
    rev
}

/// The multigraph of the reversed action.
pub fn reverse(graph: &Multigraph) -> Result<Multigraph> {
    let profile = graph.profile();
    let rho = profile.reversal_map()?;
    Ok(Multigraph::from_sorted_unchecked(&profile, reverse_edges(graph.edges(), &rho)))
}

/// A reversal class: its lexicographically smallest member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphClass {
    pub canonical: Multigraph,
    pub self_symmetric: bool,
}

pub fn graph_class(graph: &Multigraph) -> Result<GraphClass> {
    let rev = reverse(graph)?;
    let self_symmetric = rev == *graph;
    let canonical = if rev.edges() < graph.edges() { rev } else { graph.clone() };
    Ok(GraphClass { canonical, self_symmetric })
}

/// Connected components of the graph without its cycles, plus the cycles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    /// Each component: its vertices (sorted) and its edge indices (sorted).
    pub components: Vec<(Vec<usize>, Vec<usize>)>,
    pub cycles: Vec<usize>,
}

impl Components {
    /// Edge indices ordered component by component, cycles last.
    pub fn edge_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = self.components.iter().flat_map(|(_, es)| es.iter().copied()).collect();
        order.extend(&self.cycles);
        order
    }
}

pub fn components_and_cycles(graph: &Multigraph) -> Components {
    let v = graph.vertex_count();
    let mut parent: Vec<usize> = (0..v).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let nx = p[y];
            p[y] = r;
            y = nx;
        }
        r
    }
    let mut cycles = Vec::new();
    for (k, &(a, b)) in graph.edges().iter().enumerate() {
        if a == b {
            cycles.push(k);
            continue;
        }
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut groups: BTreeMap<usize, (BTreeSet<usize>, Vec<usize>)> = BTreeMap::new();
    for (k, &(a, b)) in graph.edges().iter().enumerate() {
        if a == b {
            continue;
        }
        let r = find(&mut parent, a);
        let entry = groups.entry(r).or_default();
        entry.0.insert(a);
        entry.0.insert(b);
        entry.1.push(k);
    }
    let components = groups.into_values().map(|(vs, es)| (vs.into_iter().collect(), es)).collect();
    Components { components, cycles }
}

/// A weight slot: (point, position in the sorted weight list).
pub type Slot = (usize, usize);

/// One edge per positive slot, from its point to the point of the paired
/// negative slot, labelled by the weight.
pub fn graph_from_pairing(ws: &WeightSystem, pairing: &[(Slot, Slot)]) -> Result<WeightedMultigraph> {
    let mut triples = Vec::with_capacity(pairing.len());
    for &((i, k), (j, l)) in pairing {
        let (wp, wn) = (ws.point(i)[k], ws.point(j)[l]);
        if wp <= 0 || wp != -wn {
            return Err(Error::PairingMismatch(i, k));
        }
        triples.push((i, j, wp));
    }
    weighted_from_triples(ws, triples)
}

fn weighted_from_triples(ws: &WeightSystem, mut triples: Vec<(usize, usize, i64)>) -> Result<WeightedMultigraph> {
    triples.sort_unstable();
    let edges = triples.iter().map(|&(a, b, _)| (a, b)).collect();
    let graph = Multigraph::new(ws.profile(), edges)?;
    let weights = triples.iter().map(|&(_, _, w)| w).collect();
    let wg = WeightedMultigraph { graph, weights };
    let back = wg.weight_system()?;
    if back.weights() != ws.weights() {
        return Err(Error::ConsistencyFailure("pairing does not reproduce the weights".into()));
    }
    Ok(wg)
}

/// `m(e) = (s(i(e)) − s(t(e))) / w(e)`, zero on cycles.
pub fn magnitudes_from_weights(wg: &WeightedMultigraph, ws: &WeightSystem) -> Vec<BigRational> {
    wg.graph
        .edges()
        .iter()
        .zip(&wg.weights)
        .map(|(&(a, b), &w)| {
            let diff = ws.weight_sum(a) - ws.weight_sum(b);
            BigRational::new(BigInt::from(diff), BigInt::from(w))
        })
        .collect()
}

/// Every distinct weighted multigraph obtainable by pairing each positive
/// weight with an equal negative one.
pub fn all_pairings(ws: &WeightSystem) -> Result<Vec<WeightedMultigraph>> {
    // For each absolute value w: source points (with multiplicity) and target points.
    let mut by_value: BTreeMap<i64, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for i in 0..ws.len() {
        for &x in ws.point(i) {
            let e = by_value.entry(x.abs()).or_default();
            if x > 0 {
                e.0.push(i);
            } else {
                e.1.push(i);
            }
        }
    }
    let mut per_value: Vec<Vec<Vec<(usize, usize, i64)>>> = Vec::new();
    for (&w, (src, tgt)) in &by_value {
        if src.len() != tgt.len() {
            return Err(Error::PairingMismatch(src.first().or(tgt.first()).copied().unwrap_or(0), 0));
        }
        per_value.push(transport_plans(src, tgt).into_iter().map(|p| p.into_iter().map(|(a, b)| (a, b, w)).collect()).collect());
    }
    let mut out = Vec::new();
    let mut chosen: Vec<(usize, usize, i64)> = Vec::new();
    product(&per_value, 0, &mut chosen, &mut |t| {
        if let Ok(wg) = weighted_from_triples(ws, t.to_vec()) {
            out.push(wg);
        }
    });
    Ok(out)
}

/// Alternative edge sets for one slot: `(source, target, weight)` triples.
type Options = Vec<Vec<(usize, usize, i64)>>;

fn product<F: FnMut(&[(usize, usize, i64)])>(
    lists: &[Options],
    k: usize,
    chosen: &mut Vec<(usize, usize, i64)>,
    f: &mut F,
) {
    if k == lists.len() {
        f(chosen);
        return;
    }
    for option in &lists[k] {
        let len = chosen.len();
        chosen.extend_from_slice(option);
        product(lists, k + 1, chosen, f);
        chosen.truncate(len);
    }
}

/// All ways to match a multiset of sources with a multiset of targets,
/// up to permuting equal elements.
fn transport_plans(src: &[usize], tgt: &[usize]) -> Vec<Vec<(usize, usize)>> {
    let mut s: BTreeMap<usize, usize> = BTreeMap::new();
    for &a in src {
        *s.entry(a).or_default() += 1;
    }
    let mut t: BTreeMap<usize, usize> = BTreeMap::new();
    for &b in tgt {
        *t.entry(b).or_default() += 1;
    }
    let sv: Vec<(usize, usize)> = s.into_iter().collect();
    let tv: Vec<usize> = t.keys().copied().collect();
    let mut cap: Vec<usize> = t.values().copied().collect();
    let mut out = Vec::new();
    let mut cur = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn go(
        sv: &[(usize, usize)],
        si: usize,
        left: usize,
        ti: usize,
        tv: &[usize],
        cap: &mut [usize],
        cur: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if si == sv.len() {
            out.push(cur.clone());
            return;
        }
        if left == 0 {
            let next_left = sv.get(si + 1).map_or(0, |x| x.1);
            go(sv, si + 1, next_left, 0, tv, cap, cur, out);
            return;
        }
        if ti == tv.len() {
            return;
        }
        for k in (0..=left.min(cap[ti])).rev() {
            cap[ti] -= k;
            for _ in 0..k {
                cur.push((sv[si].0, tv[ti]));
            }
            go(sv, si, left - k, ti + 1, tv, cap, cur, out);
            for _ in 0..k {
                cur.pop();
            }
            cap[ti] += k;
        }
    }
    let first = sv.first().map_or(0, |x| x.1);
    go(&sv, 0, first, 0, &tv, &mut cap, &mut cur, &mut out);
    out
}

/// Pairings whose magnitudes are integers: for every edge of weight > 1
/// the weight sums at its ends agree modulo that weight.
pub fn integral_multigraphs(ws: &WeightSystem) -> Result<Vec<WeightedMultigraph>> {
    Ok(all_pairings(ws)?
        .into_iter()
        .filter(|wg| {
            wg.graph.edges().iter().zip(&wg.weights).all(|(&(a, b), &w)| {
                w == 1 || (ws.weight_sum(a) - ws.weight_sum(b)).rem_euclid(w) == 0
            })
        })
        .collect())
}
