//! Undirected simple graphs, vertex partitions and the constructions built on them.
//!
//! A [`Graph`] is immutable once built: vertices are `0..n`, edges are stored as
//! sorted pairs `(u, v)` with `u < v`, and per-vertex neighbor lists are kept
//! sorted so adjacency queries are a binary search.

mod canon;
mod construct;
mod io;

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use canon::{
    canonical_form, enumerate_graphs, enumerate_levels, labeled_graph_count, Guardrails,
};
pub use construct::{
    build_bipartite_plus_edge, build_complete_multipartite, build_turan, build_turan_plus_edge,
    build_turan_plus_edge_in_part, clique, cycle, kite, petersen, star, Construction, Family,
};
pub use io::{read_graph, read_graph6, write_graph, write_graph6};

pub type Edge = (usize, usize);

/// Orders an unordered pair as `(min, max)`.
pub fn edge(u: usize, v: usize) -> Edge {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "GraphRepr", into = "GraphRepr")]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    edges: Vec<Edge>,
}

impl TryFrom<GraphRepr> for Graph {
    type Error = Error;
    fn try_from(r: GraphRepr) -> Result<Self> {
        Graph::new(r.n, r.edges)
    }
}

impl From<Graph> for GraphRepr {
    fn from(g: Graph) -> Self {
        GraphRepr {
            n: g.n,
            edges: g.edges,
        }
    }
}

impl Graph {
    /// Builds a graph, rejecting loops, duplicate edges and out-of-range endpoints.
    pub fn new(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut list = Vec::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) out of range for n = {n}"
                )));
            }
            list.push(edge(u, v));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph(format!(
                "duplicate edge ({}, {})",
                w[0].0, w[0].1
            )));
        }
        Ok(Self::from_sorted_unique(n, list))
    }

    /// `edges` must already be sorted, deduplicated, in range and normalized.
    pub(crate) fn from_sorted_unique(n: usize, edges: Vec<Edge>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Graph { n, edges, adj }
    }

    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Minimum degree over non-isolated vertices; `None` for an edgeless graph.
    pub fn min_degree(&self) -> Option<usize> {
        self.adj.iter().map(Vec::len).filter(|&d| d > 0).min()
    }

    pub fn non_isolated(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| !self.adj[v].is_empty()).collect()
    }

    pub fn has_isolated(&self) -> bool {
        self.adj.iter().any(Vec::is_empty)
    }

    /// Drops isolated vertices and relabels the rest in increasing order.
    /// Returns the new graph and, for each new vertex, its old label.
    pub fn normalize(&self) -> (Graph, Vec<usize>) {
        let keep = self.non_isolated();
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in keep.iter().enumerate() {
            index[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .map(|&(u, v)| edge(index[u], index[v]))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        (Graph::from_sorted_unique(keep.len(), edges), keep)
    }

    /// Relabels vertex `v` as `perm[v]`; `perm` must be a permutation of `0..n`.
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        let mut edges: Vec<Edge> = self
            .edges
            .iter()
            .map(|&(u, v)| edge(perm[u], perm[v]))
            .collect();
        edges.sort_unstable();
        Graph::from_sorted_unique(self.n, edges)
    }

    pub fn without_edge(&self, u: usize, v: usize) -> Result<Graph> {
        let e = edge(u, v);
        let pos = self
            .edges
            .binary_search(&e)
            .map_err(|_| Error::EdgeNotInGraph(e.0, e.1))?;
        let mut edges = self.edges.clone();
        edges.remove(pos);
        Ok(Graph::from_sorted_unique(self.n, edges))
    }

    pub fn with_edge(&self, u: usize, v: usize) -> Result<Graph> {
        if u == v || u >= self.n || v >= self.n {
            return Err(Error::InvalidParameter(format!(
                "cannot add edge ({u}, {v}) to a graph on {} vertices",
                self.n
            )));
        }
        let e = edge(u, v);
        match self.edges.binary_search(&e) {
            Ok(_) => Err(Error::InvalidGraph(format!(
                "edge ({}, {}) already present",
                e.0, e.1
            ))),
            Err(pos) => {
                let mut edges = self.edges.clone();
                edges.insert(pos, e);
                Ok(Graph::from_sorted_unique(self.n, edges))
            }
        }
    }

    /// Graph on the same vertex set whose edges are the given subset.
    pub fn edge_subgraph(&self, keep: impl IntoIterator<Item = Edge>) -> Result<Graph> {
        let sub = Graph::new(self.n, keep)?;
        if !sub.is_edge_subgraph_of(self) {
            return Err(Error::NotSubgraph);
        }
        Ok(sub)
    }

    /// True when every edge of `self` is an edge of `other` (vertex labels shared).
    pub fn is_edge_subgraph_of(&self, other: &Graph) -> bool {
        self.edges.iter().all(|&(u, v)| other.has_edge(u, v))
    }

    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.n;
        let edges = self
            .edges
            .iter()
            .copied()
            .chain(other.edges.iter().map(|&(u, v)| (u + shift, v + shift)))
            .collect();
        Graph::from_sorted_unique(self.n + other.n, edges)
    }

    pub fn complement(&self) -> Graph {
        let mut edges = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                if !self.has_edge(u, v) {
                    edges.push((u, v));
                }
            }
        }
        Graph::from_sorted_unique(self.n, edges)
    }

    /// Connected components as sorted vertex lists, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &w in &self.adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Subgraph induced on `vertices`, relabeled `0..k` in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let mut edges: Vec<Edge> = self
            .edges
            .iter()
            .filter(|&&(u, v)| index[u] != usize::MAX && index[v] != usize::MAX)
            .map(|&(u, v)| edge(index[u], index[v]))
            .collect();
        edges.sort_unstable();
        Graph::from_sorted_unique(vertices.len(), edges)
    }

    /// Two-coloring of the whole vertex set if the graph is bipartite.
    pub fn bipartition(&self) -> Option<Vec<u8>> {
        let mut side = vec![u8::MAX; self.n];
        for s in 0..self.n {
            if side[s] != u8::MAX {
                continue;
            }
            side[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &w in &self.adj[u] {
                    if side[w] == u8::MAX {
                        side[w] = 1 - side[u];
                        queue.push_back(w);
                    } else if side[w] == side[u] {
                        return None;
                    }
                }
            }
        }
        Some(side)
    }

    pub fn contains_clique(&self, k: usize) -> bool {
        fn extend(g: &Graph, cand: &[usize], need: usize) -> bool {
            if need == 0 {
                return true;
            }
            for (i, &v) in cand.iter().enumerate() {
                if cand.len() - i < need {
                    return false;
                }
                let next: Vec<usize> = cand[i + 1..]
                    .iter()
                    .copied()
                    .filter(|&w| g.has_edge(v, w))
                    .collect();
                if extend(g, &next, need - 1) {
                    return true;
                }
            }
            false
        }
        if k == 0 {
            return true;
        }
        let all: Vec<usize> = (0..self.n).collect();
        extend(self, &all, k)
    }

    /// If the non-isolated part of the graph is complete multipartite, returns its
    /// parts (original labels). Non-adjacency must be an equivalence relation there,
    /// so the parts are the components of the complement restricted to non-isolated
    /// vertices, each of which must be an independent set of the graph.
    pub fn complete_multipartite_parts(&self) -> Option<Vec<Vec<usize>>> {
        let (core, labels) = self.normalize();
        if core.n == 0 {
            return None;
        }
        let parts = core.complement().components();
        for part in &parts {
            for (i, &u) in part.iter().enumerate() {
                if part[i + 1..].iter().any(|&v| core.has_edge(u, v)) {
                    return None;
                }
            }
        }
        let expected: usize = {
            let total = core.n;
            let inside: usize = parts.iter().map(|p| p.len() * (p.len() - 1) / 2).sum();
            total * (total - 1) / 2 - inside
        };
        if expected != core.m() {
            return None;
        }
        Some(
            parts
                .into_iter()
                .map(|p| p.into_iter().map(|v| labels[v]).collect())
                .collect(),
        )
    }

    /// Complete bipartite with at least one edge, ignoring isolated vertices.
    pub fn is_complete_bipartite(&self) -> bool {
        matches!(self.complete_multipartite_parts(), Some(p) if p.len() == 2)
    }

    /// Complete `r`-partite with all parts of equal size, ignoring isolated vertices.
    pub fn is_regular_complete_multipartite(&self, r: usize) -> bool {
        match self.complete_multipartite_parts() {
            Some(p) => p.len() == r && p.iter().all(|q| q.len() == p[0].len()),
            None => false,
        }
    }
}

/// Ordered list of disjoint parts covering a vertex universe.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexPartition {
    universe: Vec<usize>,
    parts: Vec<Vec<usize>>,
}

impl VertexPartition {
    /// Builds a partition whose universe is the union of the parts.
    pub fn new(parts: Vec<Vec<usize>>) -> Result<Self> {
        let mut universe: Vec<usize> = parts.iter().flatten().copied().collect();
        universe.sort_unstable();
        if universe.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter(
                "partition parts are not disjoint".into(),
            ));
        }
        Ok(VertexPartition { universe, parts })
    }

    /// Builds a partition and checks that it covers exactly `universe`.
    pub fn with_universe(parts: Vec<Vec<usize>>, universe: &[usize]) -> Result<Self> {
        let p = Self::new(parts)?;
        let mut expected = universe.to_vec();
        expected.sort_unstable();
        if p.universe != expected {
            return Err(Error::InvalidParameter(
                "partition does not cover the stated universe".into(),
            ));
        }
        Ok(p)
    }

    /// Partition from a per-vertex part index (`None` = not in the universe).
    pub fn from_assignment(assignment: &[Option<usize>], r: usize) -> Result<Self> {
        let mut parts = vec![Vec::new(); r];
        for (v, a) in assignment.iter().enumerate() {
            if let Some(p) = *a {
                if p >= r {
                    return Err(Error::InvalidParameter(format!(
                        "part index {p} out of range for r = {r}"
                    )));
                }
                parts[p].push(v);
            }
        }
        Self::new(parts)
    }

    pub fn r(&self) -> usize {
        self.parts.len()
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    pub fn universe(&self) -> &[usize] {
        &self.universe
    }

    pub fn part_of(&self, v: usize) -> Option<usize> {
        self.parts.iter().position(|p| p.contains(&v))
    }

    /// Per-vertex part index over `0..n`.
    pub fn assignment(&self, n: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; n];
        for (i, part) in self.parts.iter().enumerate() {
            for &v in part {
                if v < n {
                    out[v] = Some(i);
                }
            }
        }
        out
    }

    pub fn is_intra_part(&self, u: usize, v: usize) -> bool {
        matches!((self.part_of(u), self.part_of(v)), (Some(a), Some(b)) if a == b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_loops_and_duplicates() {
        assert!(matches!(
            Graph::new(3, [(1, 1)]),
            Err(Error::InvalidGraph(_))
        ));
        assert!(matches!(
            Graph::new(3, [(0, 1), (1, 0)]),
            Err(Error::InvalidGraph(_))
        ));
        assert!(Graph::new(2, [(0, 2)]).is_err());
    }

    #[test]
    fn adjacency_is_symmetric() {
        let g = Graph::new(4, [(2, 0), (0, 1), (3, 2)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (2, 3)]);
        for &(u, v) in g.edges() {
            assert!(g.has_edge(u, v) && g.has_edge(v, u));
        }
        assert_eq!(g.neighbors(2), &[0, 3]);
        let total: usize = (0..g.n()).map(|v| g.degree(v)).sum();
        assert_eq!(total, 2 * g.m());
    }

    #[test]
    fn normalize_drops_isolated() {
        let g = Graph::new(6, [(1, 4), (4, 5)]).unwrap();
        let (h, labels) = g.normalize();
        assert_eq!(h.n(), 3);
        assert_eq!(labels, vec![1, 4, 5]);
        assert_eq!(h.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn multipartite_recognition() {
        let k222 = build_complete_multipartite(&[2, 2, 2]).unwrap().graph;
        assert!(k222.is_regular_complete_multipartite(3));
        assert!(!k222.is_complete_bipartite());
        let k23 = build_complete_multipartite(&[2, 3]).unwrap().graph;
        assert!(k23.is_complete_bipartite());
        assert!(!k23.is_regular_complete_multipartite(2));
        let padded = Graph::new(7, k23.edges().iter().copied()).unwrap();
        assert!(padded.is_complete_bipartite());
        let p4 = Graph::new(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        assert!(p4.complete_multipartite_parts().is_none());
        assert!(!Graph::empty(3).is_complete_bipartite());
    }

    #[test]
    fn partition_validation() {
        assert!(VertexPartition::new(vec![vec![0, 1], vec![1, 2]]).is_err());
        let p = VertexPartition::with_universe(vec![vec![2], vec![0, 1]], &[0, 1, 2]).unwrap();
        assert_eq!(p.part_of(1), Some(1));
        assert!(p.is_intra_part(0, 1));
        assert!(!p.is_intra_part(0, 2));
        assert!(VertexPartition::with_universe(vec![vec![0]], &[0, 1]).is_err());
        assert_eq!(p.assignment(4), vec![Some(1), Some(1), Some(0), None]);
    }

    #[test]
    fn cliques() {
        assert!(clique(4).contains_clique(4));
        assert!(!cycle(5).contains_clique(3));
        assert!(kite().contains_clique(3));
        assert!(!kite().contains_clique(4));
    }
}
