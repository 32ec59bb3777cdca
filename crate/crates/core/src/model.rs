//! Fixed-point data: profiles, weight systems, multigraphs and labelings.
//!
//! Everything here is an immutable value once constructed. JSON forms are the
//! interchange format used by the command-line tool.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Combinatorial signature of an action: half-dimension `n` and the index
/// (number of negative weights) of every fixed point.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Profile {
    n: usize,
    lambdas: Vec<usize>,
    #[serde(skip)]
    counts: Vec<usize>,
    #[serde(skip)]
    minimal: bool,
}

impl Profile {
    /// Validate `(n, λ)` and derive the per-index counts `N_p`.
    pub fn new(n: usize, lambdas: Vec<usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Schema("n must be at least 1".into()));
        }
        if lambdas.is_empty() {
            return Err(Error::Schema("a profile needs at least one fixed point".into()));
        }
        for (index, &lambda) in lambdas.iter().enumerate() {
            if lambda > n {
                return Err(Error::RangeViolation { index, lambda, n });
            }
        }
        let sum: usize = lambdas.iter().sum();
        let expected_twice = lambdas.len() * n;
        if 2 * sum != expected_twice {
            return Err(Error::BalanceViolation { sum, expected_twice });
        }
        let mut counts = vec![0; n + 1];
        for &l in &lambdas {
            counts[l] += 1;
        }
        let minimal = lambdas.len() == n + 1 && lambdas.iter().enumerate().all(|(i, &l)| i == l);
        Ok(Profile { n, lambdas, counts, minimal })
    }

    /// The profile with `n + 1` points of indices `0, 1, …, n`.
    pub fn minimal(n: usize) -> Self {
        Profile::new(n, (0..=n).collect()).expect("minimal profile is balanced")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambdas(&self) -> &[usize] {
        &self.lambdas
    }

    pub fn lambda(&self, i: usize) -> usize {
        self.lambdas[i]
    }

    /// Number of fixed points, `N + 1`.
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// `N_p` for `p = 0..=n`.
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn is_minimal(&self) -> bool {
        self.minimal
    }

    /// `N_p = N_{n-p}` for every `p`.
    pub fn is_symmetric(&self) -> bool {
        (0..=self.n).all(|p| self.counts[p] == self.counts[self.n - p])
    }

    /// Vertex relabelling induced by reversing the action: the k-th point in
    /// increasing index order goes to the k-th point from the top.
    pub fn reversal_map(&self) -> Result<Vec<usize>> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&i| (self.lambdas[i], i));
        let last = self.len() - 1;
        let mut map = vec![0; self.len()];
        for k in 0..self.len() {
            let (a, b) = (order[k], order[last - k]);
            if self.lambdas[b] != self.n - self.lambdas[a] {
                return Err(Error::NotReversible);
            }
            map[a] = b;
        }
        Ok(map)
    }
}

/// Weight system up to reordering points of equal index: `(λ, sorted weights)` per point.
pub type CanonicalKey = Vec<(usize, Vec<i64>)>;

/// Isotropy weights at every fixed point.
///
/// Points keep the order they were given in; weights inside a point are kept
/// sorted ascending, which is also how they serialize.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightSystem {
    profile: Profile,
    weights: Vec<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
struct PointJson {
    lambda: usize,
    weights: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct WeightSystemJson {
    n: usize,
    points: Vec<PointJson>,
}

impl WeightSystem {
    /// Build from explicit per-point indices and weights.
    pub fn new(n: usize, points: Vec<(usize, Vec<i64>)>) -> Result<Self> {
        let lambdas = points.iter().map(|(l, _)| *l).collect();
        let profile = Profile::new(n, lambdas)?;
        let mut weights = Vec::with_capacity(points.len());
        for (i, (_, mut w)) in points.into_iter().enumerate() {
            if w.len() != n {
                return Err(Error::Schema(format!("point {i} has {} weights, expected {n}", w.len())));
            }
            if w.contains(&0) {
                return Err(Error::Schema(format!("point {i} has a zero weight")));
            }
            w.sort_unstable();
            weights.push(w);
        }
        Ok(WeightSystem { profile, weights })
    }

    /// Build from weights alone, reading each index off the negative count.
    pub fn from_weights(n: usize, weights: Vec<Vec<i64>>) -> Result<Self> {
        let points = weights
            .into_iter()
            .map(|w| (w.iter().filter(|&&x| x < 0).count(), w))
            .collect();
        WeightSystem::new(n, points)
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn n(&self) -> usize {
        self.profile.n
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[Vec<i64>] {
        &self.weights
    }

    pub fn point(&self, i: usize) -> &[i64] {
        &self.weights[i]
    }

    /// Sum of the weights at point `i` (the first Chern class restricted there).
    pub fn weight_sum(&self, i: usize) -> i64 {
        self.weights[i].iter().sum()
    }

    /// Points reordered by increasing index (stable).
    pub fn sorted_by_index(&self) -> WeightSystem {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&i| self.profile.lambdas[i]);
        let points = order
            .iter()
            .map(|&i| (self.profile.lambdas[i], self.weights[i].clone()))
            .collect();
        WeightSystem::new(self.n(), points).expect("reordering keeps validity")
    }

    /// The weights of the reversed action: negate every weight, reverse the
    /// point order.
    pub fn reversed(&self) -> WeightSystem {
        let n = self.n();
        let points = self
            .weights
            .iter()
            .rev()
            .map(|w| w.iter().map(|x| -x).collect::<Vec<_>>())
            .map(|w| (w.iter().filter(|&&x| x < 0).count(), w))
            .collect();
        WeightSystem::new(n, points).expect("reversal keeps validity")
    }

    /// Order-independent key: the sorted list of (index, weights) per point.
    pub fn canonical_key(&self) -> CanonicalKey {
        let mut key: Vec<(usize, Vec<i64>)> = self
            .weights
            .iter()
            .enumerate()
            .map(|(i, w)| (self.profile.lambdas[i], w.clone()))
            .collect();
        key.sort();
        key
    }

    pub fn to_json(&self) -> serde_json::Value {
        let doc = WeightSystemJson {
            n: self.n(),
            points: self
                .weights
                .iter()
                .enumerate()
                .map(|(i, w)| PointJson { lambda: self.profile.lambdas[i], weights: w.clone() })
                .collect(),
        };
        serde_json::to_value(doc).expect("plain data serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let doc: WeightSystemJson = serde_json::from_value(value.clone())?;
        WeightSystem::new(doc.n, doc.points.into_iter().map(|p| (p.lambda, p.weights)).collect())
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        Self::from_json(&value)
    }
}

impl std::fmt::Display for WeightSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .weights
            .iter()
            .map(|w| {
                let inner: Vec<String> = w.iter().map(|x| x.to_string()).collect();
                format!("{{{}}}", inner.join(","))
            })
            .collect();
        write!(f, "{}", parts.join(", "))
    }
}

/// Pass/fail for the structural conditions every weight system must meet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructuralReport {
    pub pairing: bool,
    /// Points whose weights share a common factor > 1.
    pub gcd_failures: Vec<usize>,
    /// Points whose number of negative weights differs from their index.
    pub index_failures: Vec<usize>,
}

impl StructuralReport {
    pub fn passed(&self) -> bool {
        self.pairing && self.gcd_failures.is_empty() && self.index_failures.is_empty()
    }
}

/// Pairing `W+ = -W-`, effectiveness (gcd 1 at each point) and index
/// consistency.
pub fn weight_system_checks(ws: &WeightSystem) -> StructuralReport {
    let mut pos: Vec<i64> = Vec::new();
    let mut neg: Vec<i64> = Vec::new();
    let mut gcd_failures = Vec::new();
    let mut index_failures = Vec::new();
    for (i, w) in ws.weights.iter().enumerate() {
        for &x in w {
            if x > 0 {
                pos.push(x);
            } else {
                neg.push(-x);
            }
        }
        let g = w.iter().fold(0i64, |g, &x| g.gcd(&x));
        if g != 1 {
            gcd_failures.push(i);
        }
        if w.iter().filter(|&&x| x < 0).count() != ws.profile.lambdas[i] {
            index_failures.push(i);
        }
    }
    pos.sort_unstable();
    neg.sort_unstable();
    StructuralReport { pairing: pos == neg, gcd_failures, index_failures }
}

/// Directed multigraph on the fixed points; an edge `(i, i)` is a cycle.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Multigraph {
    n: usize,
    lambdas: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct MultigraphJson {
    n: usize,
    lambdas: Vec<usize>,
    edges: Vec<[usize; 2]>,
}

impl Multigraph {
    /// Build and check the degree constraints: out-degree `n − λ_i`,
    /// in-degree `λ_i`, a cycle counting once each way.
    pub fn new(profile: &Profile, mut edges: Vec<(usize, usize)>) -> Result<Self> {
        let v = profile.len();
        let mut out = vec![0usize; v];
        let mut inn = vec![0usize; v];
        for &(a, b) in &edges {
            if a >= v || b >= v {
                return Err(Error::Schema(format!("edge ({a},{b}) refers to a missing vertex")));
            }
            out[a] += 1;
            inn[b] += 1;
        }
        for i in 0..v {
            if out[i] != profile.n - profile.lambdas[i] || inn[i] != profile.lambdas[i] {
                return Err(Error::Schema(format!("degree constraint fails at vertex {i}")));
            }
        }
        edges.sort_unstable();
        Ok(Multigraph { n: profile.n, lambdas: profile.lambdas.clone(), edges })
    }

    /// Build without re-checking degrees (used by the enumerator).
    pub(crate) fn from_sorted_unchecked(profile: &Profile, edges: Vec<(usize, usize)>) -> Self {
        Multigraph { n: profile.n, lambdas: profile.lambdas.clone(), edges }
    }

    pub fn profile(&self) -> Profile {
        Profile::new(self.n, self.lambdas.clone()).expect("stored profile is valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambdas(&self) -> &[usize] {
        &self.lambdas
    }

    pub fn vertex_count(&self) -> usize {
        self.lambdas.len()
    }

    /// Edges in canonical (sorted) order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn is_cycle(&self, e: usize) -> bool {
        self.edges[e].0 == self.edges[e].1
    }

    pub fn cycle_count(&self) -> usize {
        self.edges.iter().filter(|(a, b)| a == b).count()
    }

    pub fn multiplicity(&self, a: usize, b: usize) -> usize {
        self.edges.iter().filter(|&&e| e == (a, b)).count()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let doc = MultigraphJson {
            n: self.n,
            lambdas: self.lambdas.clone(),
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
        };
        serde_json::to_value(doc).expect("plain data serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let doc: MultigraphJson = serde_json::from_value(value.clone())?;
        let profile = Profile::new(doc.n, doc.lambdas)?;
        Multigraph::new(&profile, doc.edges.into_iter().map(|[a, b]| (a, b)).collect())
    }
}

impl std::fmt::Display for Multigraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.edges.iter().map(|(a, b)| format!("{a}->{b}")).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

/// A multigraph with a positive weight on every edge.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightedMultigraph {
    pub graph: Multigraph,
    pub weights: Vec<i64>,
}

impl WeightedMultigraph {
    /// Read the weights off every vertex: an edge contributes `+w` at its
    /// source and `−w` at its target; a cycle contributes both at its vertex.
    pub fn weight_system(&self) -> Result<WeightSystem> {
        let v = self.graph.vertex_count();
        let mut points: Vec<Vec<i64>> = vec![Vec::new(); v];
        for (k, &(a, b)) in self.graph.edges.iter().enumerate() {
            points[a].push(self.weights[k]);
            points[b].push(-self.weights[k]);
        }
        let pts = points.into_iter().enumerate().map(|(i, w)| (self.graph.lambdas[i], w)).collect();
        WeightSystem::new(self.graph.n, pts)
    }
}

/// Integer magnitude on every edge of a multigraph (zero on cycles).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MagnitudeLabeling {
    pub magnitudes: Vec<i64>,
}
