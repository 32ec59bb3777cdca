//! The classification pipeline: graphs → labelings → weight families →
//! representative instances → necessary-condition filters → folded families.
//!
//! Work is split into blocks `(graph, divisor branch, first label)`. Blocks
//! are independent, run in parallel, and can be checkpointed to disk and
//! resumed. The final report is sorted canonically so that repeated runs
//! produce identical output.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graphs::{enumerate_multigraphs, Dedup, EdgeFilter};
use crate::hattori::{derive_levels, r_sequence};
use crate::linalg::KernelParametrization;
use crate::localization::chern_battery;
use crate::magnitudes::{
    designated_edges, magnitude_sum, singular_labelings_block, block_values, solve_weights, Mode, SearchOptions,
};
use crate::model::{CanonicalKey, MagnitudeLabeling, Multigraph, Profile, WeightSystem, WeightedMultigraph};

/// Version of the code, baked in at build time; part of every cache key.
pub const CODE_HASH: &str = env!("ISOWEIGHTS_CODE_HASH");

/// Filter stages in the order they are applied to each instance.
pub const STAGES: [&str; 7] = ["gcd", "modulo", "equal", "dim8", "localization", "lemma", "hattori"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifyOptions {
    pub search: SearchOptions,
    pub filter: EdgeFilter,
    pub dedup: Dedup,
    /// Edge weights of representative instances lie in `[1, weight_bound]`.
    pub weight_bound: i64,
    /// Also require Laurent `r_s` for `k0 = C1`.
    pub hattori: bool,
    /// Restrict to these graph ids (1-based, in enumeration order).
    pub graphs: Option<Vec<usize>>,
    /// Restrict the divisor branches to these values.
    pub branches: Option<Vec<i64>>,
    /// Process at most this many blocks per branch (a sampled prefix).
    pub block_limit: Option<usize>,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            search: SearchOptions::default(),
            filter: EdgeFilter::Nonnegative,
            dedup: Dedup::Reversal,
            weight_bound: 12,
            hattori: false,
            graphs: None,
            branches: None,
            block_limit: None,
        }
    }
}

/// One divisor branch of the search on one graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Branch {
    /// Every label is a multiple of `c`.
    pub c: i64,
    /// Designated edges pinned to `c` (or their gcd forced to `c`).
    pub forced: bool,
}

/// Divisor branches for a graph, most restrictive first.
pub fn branches_for(graph: &Multigraph, opts: &ClassifyOptions) -> Result<Vec<Branch>> {
    let profile = graph.profile();
    let s = &opts.search;
    let mut out = Vec::new();
    if let Some(c) = s.divisor_c {
        out.push(Branch { c, forced: s.force_unit_edges && !designated_edges(graph).0.is_empty() });
    } else if s.mode == Mode::Nonnegative && profile.is_minimal() && !designated_edges(graph).0.is_empty() {
        let target = magnitude_sum(&profile)?;
        let n = profile.n() as i64;
        for c in (1..=n + 1).rev() {
            if target % c != 0 {
                continue;
            }
            if s.dim8_strict && n == 4 && c != 1 && c != 5 {
                continue;
            }
            out.push(Branch { c, forced: true });
        }
    } else {
        out.push(Branch { c: 1, forced: false });
    }
    if let Some(keep) = &opts.branches {
        out.retain(|b| keep.contains(&b.c));
    }
    Ok(out)
}

fn branch_search(opts: &ClassifyOptions, b: Branch) -> SearchOptions {
    SearchOptions { divisor_c: Some(b.c), force_unit_edges: b.forced, ..opts.search.clone() }
}

// ---------------------------------------------------------------------------
// Instance filters
// ---------------------------------------------------------------------------

/// Weights at every point are coprime.
pub fn gcd_filter(ws: &WeightSystem) -> bool {
    ws.weights().iter().all(|w| w.iter().fold(0i64, |g, x| g.gcd(x)) == 1)
}

/// Along every edge of weight `w > 1` the weights at both endpoints agree
/// modulo `w` as multisets.
pub fn modulo_filter(wg: &WeightedMultigraph, ws: &WeightSystem) -> bool {
    let residues = |i: usize, w: i64| {
        let mut r: Vec<i64> = ws.point(i).iter().map(|x| x.rem_euclid(w)).collect();
        r.sort_unstable();
        r
    };
    wg.graph.edges().iter().zip(&wg.weights).all(|(&(a, b), &w)| a == b || w <= 1 || residues(a, w) == residues(b, w))
}

/// The two expressions for `C1` in a minimal profile (points sorted by
/// index): `(s_1 − s_0)/w⁻(P_1)` and `(s_{n−1} − s_n)/w⁺(P_{n−1})`. Returns
/// the common value when both are equal positive integers dividing
/// `n(n+1)²/2` and at most `n + 1`.
pub fn equal_filter(ws: &WeightSystem) -> Option<i64> {
    let n = ws.n();
    if !ws.profile().is_minimal() || n < 1 {
        return None;
    }
    let neg: Vec<i64> = ws.point(1).iter().copied().filter(|&x| x < 0).collect();
    let pos: Vec<i64> = ws.point(n - 1).iter().copied().filter(|&x| x > 0).collect();
    if neg.len() != 1 || pos.len() != 1 {
        return None;
    }
    let (da, db) = (ws.weight_sum(1) - ws.weight_sum(0), ws.weight_sum(n - 1) - ws.weight_sum(n));
    if da % neg[0] != 0 || db % pos[0] != 0 {
        return None;
    }
    let (ca, cb) = (da / neg[0], db / pos[0]);
    let target = (n * (n + 1) * (n + 1) / 2) as i64;
    (ca == cb && ca > 0 && target % ca == 0 && ca <= n as i64 + 1).then_some(ca)
}

fn gcd_of(ws: &[i64]) -> i64 {
    ws.iter().fold(0i64, |g, x| g.gcd(x))
}

/// Rules on sets `S` of parallel edges between two points `P`, `Q`:
/// `|S| ≥ n − 1` forces coprime weights; so does `|S| = n − 2 > 1` when all
/// other edges at `P` or at `Q` are cycles; and for every `S̃ ⊂ S` with
/// `|S̃| ≥ 2` and `g = gcd(S̃) > 1`, both `P` and `Q` carry another edge whose
/// weight is a multiple of `g`.
pub fn lemma_filter(wg: &WeightedMultigraph) -> bool {
    let n = wg.graph.n();
    if n <= 2 {
        return true;
    }
    let edges = wg.graph.edges();
    let w = &wg.weights;
    let mut groups: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (k, &(a, b)) in edges.iter().enumerate() {
        if a != b {
            groups.entry((a.min(b), a.max(b))).or_default().push(k);
        }
    }
    let incident = |f: usize| -> Vec<usize> {
        edges.iter().enumerate().filter(|(_, &(a, b))| a == f || b == f).map(|(k, _)| k).collect()
    };
    for (&(p, q), s) in &groups {
        let l = s.len();
        if l < 2 {
            continue;
        }
        let ws: Vec<i64> = s.iter().map(|&k| w[k]).collect();
        if l >= n - 1 && gcd_of(&ws) != 1 {
            return false;
        }
        if n > 3 && l == n - 2 {
            let only_cycles = |f: usize| incident(f).iter().all(|k| s.contains(k) || edges[*k].0 == edges[*k].1);
            if (only_cycles(p) || only_cycles(q)) && gcd_of(&ws) != 1 {
                return false;
            }
        }
        for mask in 1u32..(1 << l) {
            if mask.count_ones() < 2 {
                continue;
            }
            let sub: Vec<usize> = (0..l).filter(|i| mask >> i & 1 == 1).map(|i| s[i]).collect();
            let g = gcd_of(&sub.iter().map(|&k| w[k]).collect::<Vec<_>>());
            if g <= 1 {
                continue;
            }
            let has = |f: usize| incident(f).iter().any(|k| !sub.contains(k) && w[*k] % g == 0);
            if !has(p) || !has(q) {
                return false;
            }
        }
    }
    true
}

/// Apply the filters in order; `Ok(None)` when the instance survives,
/// otherwise the name of the first failing stage.
pub fn first_failure(wg: &WeightedMultigraph, ws: &WeightSystem, opts: &ClassifyOptions) -> Result<Option<&'static str>> {
    if !gcd_filter(ws) {
        return Ok(Some("gcd"));
    }
    if !modulo_filter(wg, ws) {
        return Ok(Some("modulo"));
    }
    let minimal = ws.profile().is_minimal();
    let c1 = if minimal {
        match equal_filter(ws) {
            Some(c) => Some(c),
            None => return Ok(Some("equal")),
        }
    } else {
        None
    };
    if opts.search.dim8_strict && ws.n() == 4 && minimal && !matches!(c1, Some(1) | Some(5)) {
        return Ok(Some("dim8"));
    }
    if !chern_battery(ws)?.passed() {
        return Ok(Some("localization"));
    }
    if !lemma_filter(wg) {
        return Ok(Some("lemma"));
    }
    if opts.hattori {
        if let Some(c) = c1 {
            let ok = derive_levels(ws, c).is_some_and(|lv| r_sequence(ws, &lv).is_ok());
            if !ok {
                return Ok(Some("hattori"));
            }
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// Blocks
// ---------------------------------------------------------------------------

/// A labeling with at least one surviving instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub magnitudes: Vec<i64>,
    /// Edge weights of the surviving instances.
    pub survivors: Vec<Vec<i64>>,
}

/// Result of one search block; also the checkpoint record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockResult {
    pub graph_id: usize,
    #[serde(rename = "C")]
    pub c: i64,
    pub forced: bool,
    pub prefix_index: usize,
    pub prefix_value: i64,
    /// Labelings with singular component matrices.
    pub singular: usize,
    /// Of those, labelings with a positive kernel vector.
    pub solvable: usize,
    pub instances: usize,
    pub rejected: BTreeMap<String, usize>,
    pub survivors: Vec<Candidate>,
}

/// Enough kernel points to test, keeping the total around `1e5`.
fn effective_bound(bound: i64, dim: usize) -> i64 {
    if dim == 0 {
        return bound;
    }
    let cap = (1.0e5f64).powf(1.0 / dim as f64).floor() as i64;
    bound.min(cap.max(2))
}

/// Solve and filter one labeling.
fn process_labeling(
    graph: &Multigraph,
    m: &MagnitudeLabeling,
    opts: &ClassifyOptions,
    rec: &mut BlockResult,
) -> Result<()> {
    let Some(family) = solve_weights(graph, m) else {
        return Ok(());
    };
    rec.solvable += 1;
    let Some(param) = KernelParametrization::from_basis(&family.nullspace.basis) else {
        return Ok(());
    };
    let bound = effective_bound(opts.weight_bound, param.free.len());
    let mut survivors = Vec::new();
    for w in param.lattice_points(bound) {
        rec.instances += 1;
        let wg = WeightedMultigraph { graph: graph.clone(), weights: w };
        let ws = wg.weight_system()?;
        match first_failure(&wg, &ws, opts)? {
            Some(stage) => *rec.rejected.entry(stage.to_string()).or_default() += 1,
            None => survivors.push(wg.weights),
        }
    }
    if !survivors.is_empty() {
        rec.survivors.push(Candidate { magnitudes: m.magnitudes.clone(), survivors });
    }
    Ok(())
}

/// A unit of work.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct BlockId {
    pub graph_id: usize,
    pub branch: Branch,
    pub prefix_index: usize,
    pub prefix_value: i64,
}

/// Run one block.
pub fn run_block(graph: &Multigraph, id: BlockId, opts: &ClassifyOptions) -> Result<BlockResult> {
    let search = branch_search(opts, id.branch);
    let labelings = singular_labelings_block(graph, &search, id.prefix_value)?;
    let mut rec = BlockResult {
        graph_id: id.graph_id,
        c: id.branch.c,
        forced: id.branch.forced,
        prefix_index: id.prefix_index,
        prefix_value: id.prefix_value,
        singular: labelings.len(),
        solvable: 0,
        instances: 0,
        rejected: BTreeMap::new(),
        survivors: Vec::new(),
    };
    for m in &labelings {
        process_labeling(graph, m, opts, &mut rec)?;
    }
    Ok(rec)
}

/// Every block of the run, in canonical order.
pub fn plan_blocks(graphs: &[(usize, Multigraph)], opts: &ClassifyOptions) -> Result<Vec<BlockId>> {
    let mut out = Vec::new();
    for (id, g) in graphs {
        for branch in branches_for(g, opts)? {
            let firsts = block_values(g, &branch_search(opts, branch))?;
            let limit = opts.block_limit.unwrap_or(usize::MAX);
            for (k, v) in firsts.into_iter().enumerate().take(limit) {
                out.push(BlockId { graph_id: *id, branch, prefix_index: k, prefix_value: v });
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Checkpoints and cache
// ---------------------------------------------------------------------------

/// Key identifying a run: profile, options and code version.
pub fn cache_key(profile: &Profile, opts: &ClassifyOptions) -> String {
    let mut h = Sha256::new();
    h.update(serde_json::to_string(&(profile.n(), profile.lambdas())).expect("serializable"));
    h.update(serde_json::to_string(opts).expect("serializable"));
    h.update(CODE_HASH);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub key: String,
    pub blocks: Vec<BlockResult>,
}

/// Write `value` as JSON to `path` atomically (temporary file + rename).
pub fn write_json_atomic<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, serde_json::to_vec_pretty(value)?)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Load a checkpoint; a checkpoint written for another key is ignored.
pub fn load_checkpoint(path: &Path, key: &str) -> Result<Vec<BlockResult>> {
    if !path.exists() {
        return Ok(vec![]);
    }
    let cp: Checkpoint = serde_json::from_slice(&std::fs::read(path)?)?;
    Ok(if cp.key == key { cp.blocks } else { vec![] })
}

// ---------------------------------------------------------------------------
// Families and the report
// ---------------------------------------------------------------------------

/// Per graph and branch counts at every stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchAudit {
    #[serde(rename = "C")]
    pub c: i64,
    pub forced: bool,
    pub blocks: usize,
    pub singular: usize,
    pub solvable: usize,
    pub instances: usize,
    pub rejected: BTreeMap<String, usize>,
    pub surviving_instances: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphAudit {
    pub graph_id: usize,
    pub graph: String,
    pub cycles: usize,
    pub branches: Vec<BranchAudit>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub graph_id: usize,
    pub edges: Vec<(usize, usize)>,
    pub magnitudes: Vec<i64>,
    pub dimension: usize,
    /// Kernel relations, one per dependent edge.
    pub relations: Vec<String>,
    /// Weights at every point as linear forms in `b[1], b[2], …`.
    pub parametric_weights: Vec<Vec<String>>,
    /// Surviving instances (points in index order).
    pub instances: Vec<Vec<Vec<i64>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub n: usize,
    pub lambdas: Vec<usize>,
    pub options: ClassifyOptions,
    pub graph_classes: usize,
    pub families: Vec<FamilyReport>,
    pub audit: Vec<GraphAudit>,
    /// Instances of the emitted families, closed under reversal.
    pub instance_count: usize,
}

/// Names `e{a}{b}`, with primes on repeated parallel edges.
pub fn edge_names(edges: &[(usize, usize)]) -> Vec<String> {
    let mut seen: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    edges
        .iter()
        .map(|&e| {
            let k = seen.entry(e).or_default();
            let name = format!("e{}{}{}", e.0, e.1, "'".repeat(*k));
            *k += 1;
            name
        })
        .collect()
}

/// `Σ_f coeffs[f]·x_f / den`, rendered with positive terms first.
fn render_form(coeffs: &[i128], den: i128, var: &dyn Fn(usize) -> String) -> String {
    let (coeffs, den): (Vec<i128>, i128) = if den < 0 { (coeffs.iter().map(|c| -c).collect(), -den) } else { (coeffs.to_vec(), den) };
    let mut terms: Vec<(i128, usize)> = coeffs.iter().enumerate().filter(|(_, &c)| c != 0).map(|(f, &c)| (c, f)).collect();
    if terms.is_empty() {
        return "0".into();
    }
    terms.sort_by_key(|&(c, f)| (c < 0, f));
    let mut s = String::new();
    for (k, &(c, f)) in terms.iter().enumerate() {
        let mag = c.abs();
        if c < 0 {
            s.push('-');
        } else if k > 0 {
            s.push('+');
        }
        if mag != 1 {
            s.push_str(&mag.to_string());
        }
        s.push_str(&var(f));
    }
    if den != 1 {
        if terms.len() > 1 {
            s = format!("({s})");
        }
        s = format!("{s}/{den}");
    }
    s
}

/// Every edge weight as `(numerators over the free coordinates, denominator)`.
fn edge_forms(param: &KernelParametrization) -> Vec<(Vec<i128>, i128)> {
    let d = param.free.len();
    let mut forms = vec![(vec![0i128; d], 1i128); param.len];
    for (k, &c) in param.free.iter().enumerate() {
        forms[c].0[k] = 1;
    }
    for (c, den, nums) in &param.dependent {
        forms[*c] = (nums.clone(), *den);
    }
    forms
}

fn family_report(graph_id: usize, graph: &Multigraph, cand: &Candidate) -> Result<FamilyReport> {
    let m = MagnitudeLabeling { magnitudes: cand.magnitudes.clone() };
    let family = solve_weights(graph, &m).ok_or_else(|| Error::ConsistencyFailure("candidate lost its kernel".into()))?;
    let param = KernelParametrization::from_basis(&family.nullspace.basis)
        .ok_or_else(|| Error::ConsistencyFailure("kernel does not fit machine integers".into()))?;
    let names = edge_names(graph.edges());
    let b = |f: usize| format!("b[{}]", f + 1);
    let w_of = |f: usize| format!("w({})", names[param.free[f]]);
    let relations = param
        .dependent
        .iter()
        .map(|(c, den, nums)| format!("w({}) = {}", names[*c], render_form(nums, *den, &w_of)))
        .collect();
    let forms = edge_forms(&param);
    let parametric_weights = (0..graph.vertex_count())
        .map(|v| {
            let mut out = Vec::new();
            for (k, &(a, t)) in graph.edges().iter().enumerate() {
                let (nums, den) = &forms[k];
                let neg: Vec<i128> = nums.iter().map(|x| -x).collect();
                if a == v {
                    out.push(render_form(nums, *den, &b));
                }
                if t == v {
                    out.push(render_form(&neg, *den, &b));
                }
            }
            out
        })
        .collect();
    let instances = cand
        .survivors
        .iter()
        .map(|w| Ok(WeightedMultigraph { graph: graph.clone(), weights: w.clone() }.weight_system()?.weights().to_vec()))
        .collect::<Result<_>>()?;
    Ok(FamilyReport {
        graph_id,
        edges: graph.edges().to_vec(),
        magnitudes: cand.magnitudes.clone(),
        dimension: family.dimension(),
        relations,
        parametric_weights,
        instances,
    })
}

fn instance_keys(profile: &Profile, fam: &FamilyReport) -> Result<BTreeSet<CanonicalKey>> {
    let mut keys = BTreeSet::new();
    for w in &fam.instances {
        let points = w.iter().enumerate().map(|(i, p)| (profile.lambda(i), p.clone())).collect();
        let ws = WeightSystem::new(profile.n(), points)?;
        keys.insert(ws.canonical_key());
        keys.insert(ws.reversed().canonical_key());
    }
    Ok(keys)
}

/// Greedy fold: cycle-free graphs first, then larger kernels, then more
/// instances; a family is kept only if it contributes new instances.
fn fold(profile: &Profile, graphs: &BTreeMap<usize, Multigraph>, mut fams: Vec<FamilyReport>) -> Result<(Vec<FamilyReport>, usize)> {
    let cycles = |f: &FamilyReport| graphs[&f.graph_id].cycle_count();
    fams.sort_by(|x, y| {
        (cycles(x) > 0, std::cmp::Reverse(x.dimension), std::cmp::Reverse(x.instances.len()), x.graph_id, &x.magnitudes)
            .cmp(&(cycles(y) > 0, std::cmp::Reverse(y.dimension), std::cmp::Reverse(y.instances.len()), y.graph_id, &y.magnitudes))
    });
    let mut covered = BTreeSet::new();
    let mut kept = Vec::new();
    for f in fams {
        let keys = instance_keys(profile, &f)?;
        if !keys.is_subset(&covered) {
            covered.extend(keys);
            kept.push(f);
        }
    }
    Ok((kept, covered.len()))
}

/// Progress and persistence hooks for `classify_with`.
#[derive(Default)]
pub struct RunControl<'a> {
    /// Checkpoint file, rewritten after every finished block.
    pub checkpoint: Option<&'a Path>,
    /// Reuse finished blocks from the checkpoint file.
    pub resume: bool,
}

/// The whole pipeline for one profile.
pub fn classify(profile: &Profile, opts: &ClassifyOptions) -> Result<ClassifyReport> {
    classify_with(profile, opts, &RunControl::default())
}

pub fn classify_with(profile: &Profile, opts: &ClassifyOptions, ctl: &RunControl) -> Result<ClassifyReport> {
    if opts.search.mode == Mode::Nonnegative && !profile.is_minimal() && magnitude_sum(profile)? < 0 {
        return Err(Error::ModeRefused);
    }
    let all = enumerate_multigraphs(profile, opts.filter, opts.dedup)?;
    let graph_classes = all.len();
    let selected: Vec<(usize, Multigraph)> = all
        .into_iter()
        .enumerate()
        .map(|(k, g)| (k + 1, g))
        .filter(|(id, _)| opts.graphs.as_ref().is_none_or(|keep| keep.contains(id)))
        .collect();
    let graph_map: BTreeMap<usize, Multigraph> = selected.iter().cloned().collect();

    let key = cache_key(profile, opts);
    let done: Vec<BlockResult> = match (ctl.resume, ctl.checkpoint) {
        (true, Some(p)) => load_checkpoint(p, &key)?,
        _ => vec![],
    };
    let done_ids: BTreeSet<(usize, i64, bool, usize)> =
        done.iter().map(|b| (b.graph_id, b.c, b.forced, b.prefix_index)).collect();
    let blocks: Vec<BlockId> = plan_blocks(&selected, opts)?
        .into_iter()
        .filter(|b| !done_ids.contains(&(b.graph_id, b.branch.c, b.branch.forced, b.prefix_index)))
        .collect();

    let results = Mutex::new(done);
    blocks.par_iter().try_for_each(|id| -> Result<()> {
        let rec = run_block(&graph_map[&id.graph_id], *id, opts)?;
        let mut guard = results.lock().expect("no panics while holding the lock");
        guard.push(rec);
        if let Some(p) = ctl.checkpoint {
            write_json_atomic(p, &Checkpoint { key: key.clone(), blocks: guard.clone() })?;
        }
        Ok(())
    })?;
    let mut results = results.into_inner().expect("no panics while holding the lock");
    results.sort_by_key(|b| (b.graph_id, std::cmp::Reverse(b.c), b.forced, b.prefix_index));

    // Audit.
    let mut audit = Vec::new();
    for (id, g) in &selected {
        let mut branches = Vec::new();
        for br in branches_for(g, opts)? {
            let mine: Vec<&BlockResult> = results.iter().filter(|b| b.graph_id == *id && b.c == br.c && b.forced == br.forced).collect();
            let mut rejected = BTreeMap::new();
            for b in &mine {
                for (k, v) in &b.rejected {
                    *rejected.entry(k.clone()).or_default() += v;
                }
            }
            branches.push(BranchAudit {
                c: br.c,
                forced: br.forced,
                blocks: mine.len(),
                singular: mine.iter().map(|b| b.singular).sum(),
                solvable: mine.iter().map(|b| b.solvable).sum(),
                instances: mine.iter().map(|b| b.instances).sum(),
                rejected,
                surviving_instances: mine.iter().flat_map(|b| &b.survivors).map(|c| c.survivors.len()).sum(),
            });
        }
        audit.push(GraphAudit { graph_id: *id, graph: g.to_string(), cycles: g.cycle_count(), branches });
    }

    // Families, one per surviving labeling, then folded.
    let mut fams = Vec::new();
    let mut seen: BTreeSet<(usize, Vec<i64>)> = BTreeSet::new();
    for b in &results {
        for cand in &b.survivors {
            if seen.insert((b.graph_id, cand.magnitudes.clone())) {
                fams.push(family_report(b.graph_id, &graph_map[&b.graph_id], cand)?);
            } else if let Some(f) = fams.iter_mut().find(|f| f.graph_id == b.graph_id && f.magnitudes == cand.magnitudes) {
                // The same labeling reached from another branch: merge instances.
                let extra = family_report(b.graph_id, &graph_map[&b.graph_id], cand)?;
                for i in extra.instances {
                    if !f.instances.contains(&i) {
                        f.instances.push(i);
                    }
                }
                f.instances.sort();
            }
        }
    }
    let (families, instance_count) = fold(profile, &graph_map, fams)?;
    Ok(ClassifyReport {
        n: profile.n(),
        lambdas: profile.lambdas().to_vec(),
        options: opts.clone(),
        graph_classes,
        families,
        audit,
        instance_count,
    })
}

/// `classify`, reusing a cached report in `dir` when the key matches.
pub fn classify_cached(profile: &Profile, opts: &ClassifyOptions, dir: &Path, ctl: &RunControl) -> Result<ClassifyReport> {
    let path = dir.join(format!("classify-{}.json", cache_key(profile, opts)));
    if path.exists() {
        if let Ok(r) = serde_json::from_slice::<ClassifyReport>(&std::fs::read(&path)?) {
            return Ok(r);
        }
    }
    let report = classify_with(profile, opts, ctl)?;
    std::fs::create_dir_all(dir)?;
    write_json_atomic(&path, &report)?;
    Ok(report)
}

/// A plain-text table of the families, one block per family.
pub fn render_table(report: &ClassifyReport) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "n = {}, lambdas = {:?}: {} graph classes, {} families, {} instances\n",
        report.n,
        report.lambdas,
        report.graph_classes,
        report.families.len(),
        report.instance_count
    ));
    for (k, f) in report.families.iter().enumerate() {
        s.push_str(&format!("\nFamily {} (graph #{}, {} parameter(s))\n", k + 1, f.graph_id, f.dimension));
        let names = edge_names(&f.edges);
        let labels: Vec<String> = names.iter().zip(&f.magnitudes).map(|(e, m)| format!("m({e})={m}")).collect();
        s.push_str(&format!("  magnitudes: {}\n", labels.join(" ")));
        for r in &f.relations {
            s.push_str(&format!("  {r}\n"));
        }
        for (i, p) in f.parametric_weights.iter().enumerate() {
            s.push_str(&format!("  P{i}: {{{}}}\n", p.join(", ")));
        }
        let shown: Vec<String> = f
            .instances
            .iter()
            .take(3)
            .map(|w| w.iter().map(|p| format!("{p:?}")).collect::<Vec<_>>().join(" "))
            .collect();
        s.push_str(&format!("  instances: {} (e.g. {})\n", f.instances.len(), shown.join("; ")));
    }
    s
}
