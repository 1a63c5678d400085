//! Edit distance between graphs on a shared vertex set, and the distance from a
//! graph to the nearest Turán graph or complete bipartite graph on a subset of
//! its vertices.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, VertexPartition};

pub const EXACT_TURAN_MAX_ORDER: usize = 12;
pub const EXACT_BIPARTITE_MAX_ORDER: usize = 14;
pub const DEFAULT_STARTS: usize = 32;

/// `|E(G) \ E(H)| + |E(H) \ E(G)|` after mapping vertex `v` of `H` to
/// `identification[v]` in `G`.
pub fn edit_distance(g: &Graph, h: &Graph, identification: &[usize]) -> Result<usize> {
    if identification.len() != h.n() {
        return Err(Error::BadIdentification(format!(
            "map has {} entries for {} vertices",
            identification.len(),
            h.n()
        )));
    }
    let mut hit = vec![false; g.n()];
    for (v, &w) in identification.iter().enumerate() {
        if w >= g.n() {
            return Err(Error::BadIdentification(format!(
                "vertex {v} maps to {w}, outside 0..{}",
                g.n()
            )));
        }
        if std::mem::replace(&mut hit[w], true) {
            return Err(Error::BadIdentification(format!("vertex {w} is hit twice")));
        }
    }
    let mut mapped: Vec<Edge> = h
        .edges()
        .iter()
        .map(|&(u, v)| crate::graph::edge(identification[u], identification[v]))
        .collect();
    mapped.sort_unstable();
    let shared = mapped.iter().filter(|&&(u, v)| g.has_edge(u, v)).count();
    Ok(g.m() - shared + mapped.len() - shared)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Target {
    /// Turán graph `T_{s,r}` on some vertex subset: part sizes differ by at most one.
    Turan { r: usize },
    /// `K_{U,V}` for disjoint `U, V`, sizes unconstrained.
    Bipartite,
}

impl Target {
    fn parts(&self) -> usize {
        match self {
            Target::Turan { r } => *r,
            Target::Bipartite => 2,
        }
    }

    fn balanced(&self) -> bool {
        matches!(self, Target::Turan { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceMethod {
    Exact,
    LocalSearchUpperBound,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistanceMode {
    Exact,
    Heuristic { seed: u64, starts: usize },
}

impl DistanceMode {
    pub fn heuristic(seed: u64) -> Self {
        DistanceMode::Heuristic {
            seed,
            starts: DEFAULT_STARTS,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceResult {
    pub distance: usize,
    /// Part index of every vertex; `None` for vertices left out of the target.
    pub witness: Vec<Option<usize>>,
    pub method: DistanceMethod,
    pub target: Target,
}

impl DistanceResult {
    pub fn partition(&self) -> VertexPartition {
        VertexPartition::from_assignment(&self.witness, self.target.parts())
            .expect("witness indices are in range")
    }

    /// The target graph realized by the witness, on the vertex set of `G`.
    pub fn target_graph(&self) -> Graph {
        target_graph(&self.witness)
    }
}

/// Complete multipartite graph joining vertices with different `Some` labels.
pub fn target_graph(witness: &[Option<usize>]) -> Graph {
    let n = witness.len();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if let (Some(a), Some(b)) = (witness[u], witness[v]) {
                if a != b {
                    edges.push((u, v));
                }
            }
        }
    }
    Graph::new(n, edges).expect("pairs are distinct and in range")
}

struct Dense {
    n: usize,
    adj: Vec<bool>,
}

impl Dense {
    fn new(g: &Graph) -> Self {
        let n = g.n();
        let mut adj = vec![false; n * n];
        for &(u, v) in g.edges() {
            adj[u * n + v] = true;
            adj[v * n + u] = true;
        }
        Dense { n, adj }
    }

    #[inline]
    fn has(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.n + v]
    }

    /// Cost of the pair `{u, v}` given their labels.
    #[inline]
    fn pair(&self, u: usize, a: Option<usize>, v: usize, b: Option<usize>) -> usize {
        let e = self.has(u, v);
        match (a, b) {
            (Some(x), Some(y)) if x != y => usize::from(!e),
            _ => usize::from(e),
        }
    }

    fn contribution(&self, v: usize, label: Option<usize>, labels: &[Option<usize>]) -> usize {
        (0..self.n)
            .filter(|&w| w != v)
            .map(|w| self.pair(v, label, w, labels[w]))
            .sum()
    }

    fn total(&self, labels: &[Option<usize>]) -> usize {
        let mut s = 0;
        for u in 0..self.n {
            for v in u + 1..self.n {
                s += self.pair(u, labels[u], v, labels[v]);
            }
        }
        s
    }
}

fn is_balanced(labels: &[Option<usize>], r: usize) -> bool {
    let mut sizes = vec![0usize; r];
    for l in labels.iter().flatten() {
        sizes[*l] += 1;
    }
    sizes.iter().max().unwrap_or(&0) - sizes.iter().min().unwrap_or(&0) <= 1
}

/// Relabels parts in order of first appearance so equivalent witnesses compare equal.
fn canonical_labels(labels: &[Option<usize>], r: usize) -> Vec<Option<usize>> {
    let mut map = vec![None; r];
    let mut next = 0;
    labels
        .iter()
        .map(|l| {
            l.map(|p| {
                *map[p].get_or_insert_with(|| {
                    next += 1;
                    next - 1
                })
            })
        })
        .collect()
}

struct Exact<'a> {
    d: &'a Dense,
    r: usize,
    balanced: bool,
    best: usize,
    best_labels: Vec<Option<usize>>,
}

impl Exact<'_> {
    fn go(
        &mut self,
        v: usize,
        labels: &mut Vec<Option<usize>>,
        sizes: &mut Vec<usize>,
        used: usize,
        cost: usize,
    ) {
        if cost >= self.best {
            return;
        }
        let n = self.d.n;
        if self.balanced {
            let hi = *sizes.iter().max().unwrap();
            let lo = *sizes.iter().min().unwrap();
            if hi - lo > 1 + (n - v) {
                return;
            }
        }
        if v == n {
            if !self.balanced || is_balanced(labels, self.r) {
                self.best = cost;
                self.best_labels = labels.clone();
            }
            return;
        }
        // labels beyond the first unused part are symmetric
        let mut options: Vec<Option<usize>> = (0..self.r.min(used + 1)).map(Some).collect();
        options.push(None);
        for label in options {
            let add: usize = (0..v).map(|u| self.d.pair(u, labels[u], v, label)).sum();
            labels.push(label);
            if let Some(p) = label {
                sizes[p] += 1;
            }
            let used_next = match label {
                Some(p) if p == used => used + 1,
                _ => used,
            };
            self.go(v + 1, labels, sizes, used_next, cost + add);
            if let Some(p) = label {
                sizes[p] -= 1;
            }
            labels.pop();
        }
    }
}

fn exact_search(g: &Graph, target: Target) -> DistanceResult {
    let d = Dense::new(g);
    let r = target.parts();
    // leaving every vertex out is always admissible and costs e(G)
    let mut search = Exact {
        d: &d,
        r,
        balanced: target.balanced(),
        best: g.m() + 1,
        best_labels: vec![None; g.n()],
    };
    search.go(0, &mut Vec::with_capacity(g.n()), &mut vec![0; r], 0, 0);
    DistanceResult {
        distance: search.best,
        witness: canonical_labels(&search.best_labels, r),
        method: DistanceMethod::Exact,
        target,
    }
}

fn local_search(d: &Dense, target: Target, seed: u64) -> (usize, Vec<Option<usize>>) {
    let n = d.n;
    let r = target.parts();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut labels = vec![None; n];
    for (i, &v) in order.iter().enumerate() {
        labels[v] = Some(if target.balanced() {
            i % r
        } else {
            rng.gen_range(0..r)
        });
    }
    let mut cost = d.total(&labels);
    let mut idle = 0;
    let limit = 200 * n.max(1);
    while idle < limit && n > 0 {
        let v = rng.gen_range(0..n);
        let old = labels[v];
        let improved = if rng.gen_bool(0.5) {
            // relocate v to another part or out of the target
            let pick = rng.gen_range(0..=r);
            let new = (pick < r).then_some(pick);
            if new == old {
                false
            } else {
                let before = d.contribution(v, old, &labels);
                let after = d.contribution(v, new, &labels);
                labels[v] = new;
                if after < before && (!target.balanced() || is_balanced(&labels, r)) {
                    cost = cost + after - before;
                    true
                } else {
                    labels[v] = old;
                    false
                }
            }
        } else {
            // swap the labels of v and w
            let w = rng.gen_range(0..n);
            if w == v || labels[w] == old {
                false
            } else {
                let lw = labels[w];
                let before = d.contribution(v, old, &labels) + d.contribution(w, lw, &labels)
                    - d.pair(v, old, w, lw);
                labels[v] = lw;
                labels[w] = old;
                let after = d.contribution(v, lw, &labels) + d.contribution(w, old, &labels)
                    - d.pair(v, lw, w, old);
                if after < before {
                    cost = cost + after - before;
                    true
                } else {
                    labels[v] = old;
                    labels[w] = lw;
                    false
                }
            }
        };
        if improved {
            idle = 0;
        } else {
            idle += 1;
        }
    }
    debug_assert_eq!(cost, d.total(&labels));
    (cost, canonical_labels(&labels, r))
}

fn heuristic_search(g: &Graph, target: Target, seed: u64, starts: usize) -> DistanceResult {
    let d = Dense::new(g);
    let all_out = (g.m(), vec![None; g.n()]);
    let best = (0..starts.max(1) as u64)
        .into_par_iter()
        .map(|i| local_search(&d, target, seed.wrapping_add(i)))
        .chain(rayon::iter::once(all_out))
        .min()
        .expect("at least one start");
    DistanceResult {
        distance: best.0,
        witness: best.1,
        method: DistanceMethod::LocalSearchUpperBound,
        target,
    }
}

fn run(g: &Graph, target: Target, mode: DistanceMode, limit: usize) -> Result<DistanceResult> {
    match mode {
        DistanceMode::Exact => {
            if g.n() > limit {
                return Err(Error::Guardrail(format!(
                    "exact distance limited to {limit} vertices, got {}",
                    g.n()
                )));
            }
            Ok(exact_search(g, target))
        }
        DistanceMode::Heuristic { seed, starts } => Ok(heuristic_search(g, target, seed, starts)),
    }
}

/// Smallest edit distance from `G` to a Turán graph with `r` parts on a subset of
/// `V(G)`. Exact mode handles up to 12 vertices.
pub fn distance_to_turan(g: &Graph, r: usize, mode: DistanceMode) -> Result<DistanceResult> {
    if r < 1 {
        return Err(Error::InvalidParameter("r must be at least 1".into()));
    }
    run(g, Target::Turan { r }, mode, EXACT_TURAN_MAX_ORDER)
}

/// Smallest edit distance from `G` to `K_{U,V}` over disjoint `U, V` in `V(G)`.
/// Exact mode handles up to 14 vertices.
pub fn distance_to_bipartite(g: &Graph, mode: DistanceMode) -> Result<DistanceResult> {
    run(g, Target::Bipartite, mode, EXACT_BIPARTITE_MAX_ORDER)
}
