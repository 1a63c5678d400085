//! Canonical labeling and exhaustive small-graph enumeration.
//!
//! The canonical form refines the degree partition to an equitable ordered
//! partition, then backtracks over individualizations, keeping the labeling with
//! the lexicographically smallest sorted edge list. Twin vertices (same
//! neighborhood apart from each other) are swapped by an automorphism that
//! respects every partition in the search, so only one twin per cell is tried.
//! Disconnected graphs are canonicalized component by component.

use rayon::prelude::*;

use super::{edge, Edge, Graph};
use crate::error::{Error, Result};

type Cells = Vec<Vec<usize>>;

fn refine(g: &Graph, mut cells: Cells) -> Cells {
    let n = g.n();
    let mut cell_of = vec![0usize; n];
    loop {
        for (i, c) in cells.iter().enumerate() {
            for &v in c {
                cell_of[v] = i;
            }
        }
        let k = cells.len();
        let mut next: Cells = Vec::with_capacity(k);
        for c in &cells {
            if c.len() == 1 {
                next.push(c.clone());
                continue;
            }
            let mut keyed: Vec<(Vec<usize>, usize)> = c
                .iter()
                .map(|&v| {
                    let mut counts = vec![0usize; k];
                    for &w in g.neighbors(v) {
                        counts[cell_of[w]] += 1;
                    }
                    (counts, v)
                })
                .collect();
            keyed.sort();
            let mut start = 0;
            for i in 1..=keyed.len() {
                if i == keyed.len() || keyed[i].0 != keyed[start].0 {
                    next.push(keyed[start..i].iter().map(|(_, v)| *v).collect());
                    start = i;
                }
            }
        }
        if next.len() == cells.len() {
            return next;
        }
        cells = next;
    }
}

fn are_twins(g: &Graph, u: usize, v: usize) -> bool {
    let a = g.neighbors(u).iter().filter(|&&w| w != v);
    let b = g.neighbors(v).iter().filter(|&&w| w != u);
    a.eq(b)
}

fn search(g: &Graph, cells: Cells, best: &mut Option<Vec<Edge>>) {
    let cells = refine(g, cells);
    let target = cells
        .iter()
        .enumerate()
        .filter(|(_, c)| c.len() > 1)
        .min_by_key(|(i, c)| (c.len(), *i))
        .map(|(i, _)| i);
    let Some(ti) = target else {
        let mut label = vec![0; g.n()];
        for (pos, c) in cells.iter().enumerate() {
            label[c[0]] = pos;
        }
        let mut code: Vec<Edge> = g
            .edges()
            .iter()
            .map(|&(u, v)| edge(label[u], label[v]))
            .collect();
        code.sort_unstable();
        if best.as_ref().is_none_or(|b| code < *b) {
            *best = Some(code);
        }
        return;
    };
    let cell = &cells[ti];
    let mut tried: Vec<usize> = Vec::new();
    for &v in cell {
        if tried.iter().any(|&u| are_twins(g, u, v)) {
            continue;
        }
        tried.push(v);
        let mut next = Vec::with_capacity(cells.len() + 1);
        next.extend_from_slice(&cells[..ti]);
        next.push(vec![v]);
        next.push(cell.iter().copied().filter(|&w| w != v).collect());
        next.extend_from_slice(&cells[ti + 1..]);
        search(g, next, best);
    }
}

fn canonical_connected(g: &Graph) -> Vec<Edge> {
    if g.n() <= 1 {
        return Vec::new();
    }
    let mut by_degree: Vec<usize> = (0..g.n()).collect();
    by_degree.sort_by_key(|&v| (g.degree(v), v));
    let mut cells: Cells = Vec::new();
    for v in by_degree {
        match cells.last_mut() {
            Some(c) if g.degree(c[0]) == g.degree(v) => c.push(v),
            _ => cells.push(vec![v]),
        }
    }
    let mut best = None;
    search(g, cells, &mut best);
    best.expect("search reaches at least one leaf")
}

/// Canonical representative of the isomorphism class of `g` (same vertex count).
pub fn canonical_form(g: &Graph) -> Graph {
    let mut comps: Vec<(usize, Vec<Edge>)> = g
        .components()
        .into_iter()
        .map(|c| {
            let sub = g.induced(&c);
            (c.len(), canonical_connected(&sub))
        })
        .collect();
    comps.sort();
    let mut edges = Vec::with_capacity(g.m());
    let mut offset = 0;
    for (k, code) in comps {
        edges.extend(code.into_iter().map(|(u, v)| (u + offset, v + offset)));
        offset += k;
    }
    edges.sort_unstable();
    Graph::from_sorted_unique(g.n(), edges)
}

/// Limits for exhaustive enumeration.
#[derive(Clone, Copy, Debug)]
pub struct Guardrails {
    pub max_n: usize,
    pub max_m: usize,
    pub allow_override: bool,
}

impl Default for Guardrails {
    fn default() -> Self {
        Guardrails {
            max_n: 10,
            max_m: 15,
            allow_override: false,
        }
    }
}

impl Guardrails {
    pub fn unrestricted() -> Self {
        Guardrails {
            allow_override: true,
            ..Self::default()
        }
    }

    fn check(&self, max_n: usize, m: usize) -> Result<()> {
        if !self.allow_override && (max_n > self.max_n || m > self.max_m) {
            return Err(Error::Guardrail(format!(
                "enumeration with max_n = {max_n}, m = {m} exceeds max_n <= {}, m <= {}",
                self.max_n, self.max_m
            )));
        }
        Ok(())
    }
}

/// Number of labeled graphs on `n` vertices with exactly `m` edges.
pub fn labeled_graph_count(n: usize, m: usize) -> u128 {
    let pairs = (n * n.saturating_sub(1) / 2) as u128;
    let m = m as u128;
    if m > pairs {
        return 0;
    }
    let mut c: u128 = 1;
    for i in 0..m {
        c = c * (pairs - i) / (i + 1);
    }
    c
}

/// Every graph with exactly `m` edges on at most `max_n` non-isolated vertices.
///
/// Without `dedupe`, yields all labeled edge sets on vertex set `0..max_n`. With
/// `dedupe`, yields one canonical representative per isomorphism class, with
/// isolated vertices dropped, in canonical order.
pub fn enumerate_graphs(
    max_n: usize,
    m: usize,
    dedupe: bool,
    guard: &Guardrails,
) -> Result<Box<dyn Iterator<Item = Graph> + Send>> {
    guard.check(max_n, m)?;
    if dedupe {
        Ok(Box::new(unlabeled_level(max_n, m).into_iter()))
    } else {
        Ok(Box::new(LabeledEdgeSets::new(max_n, m)))
    }
}

/// Isomorphism classes for every edge count `0..=max_m`, as
/// [`enumerate_graphs`] with `dedupe` would yield them one level at a time.
pub fn enumerate_levels(max_n: usize, max_m: usize, guard: &Guardrails) -> Result<Vec<Vec<Graph>>> {
    guard.check(max_n, max_m)?;
    let mut levels = vec![vec![Graph::empty(0)]];
    for _ in 0..max_m {
        let next = next_level(levels.last().expect("level 0 exists"), max_n);
        levels.push(next);
    }
    Ok(levels)
}

fn next_level(level: &[Graph], max_n: usize) -> Vec<Graph> {
    let mut next: Vec<Graph> = level
        .par_iter()
        .flat_map_iter(|g| children(g, max_n))
        .collect();
    next.par_sort_unstable();
    next.dedup();
    next
}

fn unlabeled_level(max_n: usize, m: usize) -> Vec<Graph> {
    let mut level = vec![Graph::empty(0)];
    for _ in 0..m {
        level = next_level(&level, max_n);
    }
    level
}

fn children(g: &Graph, max_n: usize) -> Vec<Graph> {
    let k = g.n();
    let mut out = Vec::new();
    let mut push = |n: usize, e: Edge| {
        let mut edges = g.edges().to_vec();
        edges.push(e);
        edges.sort_unstable();
        out.push(canonical_form(&Graph::from_sorted_unique(n, edges)));
    };
    for u in 0..k {
        for v in u + 1..k {
            if !g.has_edge(u, v) {
                push(k, (u, v));
            }
        }
    }
    if k < max_n {
        for u in 0..k {
            push(k + 1, (u, k));
        }
    }
    if k + 2 <= max_n {
        push(k + 2, (k, k + 1));
    }
    out
}

struct LabeledEdgeSets {
    n: usize,
    pairs: Vec<Edge>,
    idx: Vec<usize>,
    done: bool,
}

impl LabeledEdgeSets {
    fn new(n: usize, m: usize) -> Self {
        let mut pairs = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                pairs.push((u, v));
            }
        }
        let done = m > pairs.len();
        LabeledEdgeSets {
            n,
            pairs,
            idx: (0..m).collect(),
            done,
        }
    }
}

impl Iterator for LabeledEdgeSets {
    type Item = Graph;

    fn next(&mut self) -> Option<Graph> {
        if self.done {
            return None;
        }
        let edges = self.idx.iter().map(|&i| self.pairs[i]).collect();
        let g = Graph::from_sorted_unique(self.n, edges);
        let (k, p) = (self.idx.len(), self.pairs.len());
        match (0..k).rev().find(|&i| self.idx[i] != i + p - k) {
            Some(i) => {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
            }
            None => self.done = true,
        }
        Some(g)
    }
}
