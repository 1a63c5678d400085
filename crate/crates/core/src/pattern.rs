//! Pattern analysis: chromatic number, good edges, the proper colorings that
//! drive the closed formula for `c(n, F)`, automorphism counts and minimum
//! independent coverings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{build_bipartite_plus_edge, clique, cycle, kite, petersen, star, Edge, Graph};

pub const CHROMATIC_MAX_ORDER: usize = 16;
pub const AUTOMORPHISM_MAX_ORDER: usize = 12;
pub const COVERING_MAX_ORDER: usize = 16;

fn guard(what: &str, n: usize, limit: usize, allow_large: bool) -> Result<()> {
    if n > limit && !allow_large {
        return Err(Error::Guardrail(format!(
            "{what} limited to {limit} vertices, got {n}"
        )));
    }
    Ok(())
}

/// Proper coloring of `F - xy` with colors `1..=r` in which `x` and `y` get color 1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ColoringProfile {
    pub good_edge: Edge,
    /// Color of each vertex of `F`, in `1..=r`.
    pub assignment: Vec<usize>,
    /// `tau[i-1]` = number of vertices other than `x, y` with color `i`.
    pub tau: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternProfile {
    pub graph: Graph,
    pub f: usize,
    pub chi: usize,
    pub r: usize,
    pub good_edges: Vec<Edge>,
    pub aut: u64,
    pub colorings: BTreeMap<String, Vec<ColoringProfile>>,
    pub beta_prime: Option<usize>,
}

impl PatternProfile {
    /// Profiles `graph` after dropping isolated vertices.
    pub fn new(graph: &Graph) -> Result<Self> {
        Self::build(graph, false)
    }

    pub fn build(graph: &Graph, allow_large: bool) -> Result<Self> {
        let (g, _) = graph.normalize();
        if g.m() == 0 {
            return Err(Error::EmptyGraph);
        }
        let chi = chromatic_number_with(&g, allow_large)?;
        let good = good_edges_with(&g, chi, allow_large)?;
        let r = chi - 1;
        let mut colorings = BTreeMap::new();
        for &e in &good {
            colorings.insert(edge_key(e), colorings_of_good_edge(&g, e, r)?);
        }
        let aut = automorphism_count_with(&g, allow_large)?;
        let beta_prime = if chi <= 2 {
            Some(beta_prime_with(&g, allow_large)?)
        } else {
            None
        };
        Ok(PatternProfile {
            f: g.n(),
            graph: g,
            chi,
            r,
            good_edges: good,
            aut,
            colorings,
            beta_prime,
        })
    }

    pub fn is_color_critical(&self) -> bool {
        !self.good_edges.is_empty()
    }

    pub fn colorings_of(&self, e: Edge) -> &[ColoringProfile] {
        self.colorings
            .get(&edge_key(e))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn all_colorings(&self) -> impl Iterator<Item = &ColoringProfile> {
        self.colorings.values().flatten()
    }

    pub fn coloring_count(&self) -> usize {
        self.colorings.values().map(Vec::len).sum()
    }

    /// Errors unless the pattern is color-critical with `chi >= 3`.
    pub fn require_color_critical(&self) -> Result<()> {
        if self.chi < 3 {
            return Err(Error::ChromaticTooSmall(self.chi));
        }
        if !self.is_color_critical() {
            return Err(Error::NotColorCritical);
        }
        Ok(())
    }
}

/// Map key for a good edge, `"x-y"`.
pub fn edge_key((x, y): Edge) -> String {
    format!("{x}-{y}")
}

fn max_clique(g: &Graph) -> usize {
    fn grow(g: &Graph, size: usize, cand: &[usize], best: &mut usize) {
        if cand.is_empty() {
            *best = (*best).max(size);
            return;
        }
        for (i, &v) in cand.iter().enumerate() {
            if size + cand.len() - i <= *best {
                return;
            }
            let next: Vec<usize> = cand[i + 1..]
                .iter()
                .copied()
                .filter(|&w| g.has_edge(v, w))
                .collect();
            grow(g, size + 1, &next, best);
        }
    }
    let all: Vec<usize> = (0..g.n()).collect();
    let mut best = 0;
    grow(g, 0, &all, &mut best);
    best
}

/// DSatur greedy coloring; returns the number of colors used.
fn dsatur_upper_bound(g: &Graph) -> usize {
    let n = g.n();
    let mut color: Vec<Option<usize>> = vec![None; n];
    let mut used = 0;
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| color[v].is_none())
            .max_by_key(|&v| {
                let mut sat: Vec<usize> = g.neighbors(v).iter().filter_map(|&w| color[w]).collect();
                sat.sort_unstable();
                sat.dedup();
                (sat.len(), g.degree(v), std::cmp::Reverse(v))
            })
            .expect("an uncolored vertex remains");
        let c = (0..)
            .find(|c| g.neighbors(v).iter().all(|&w| color[w] != Some(*c)))
            .expect("some color is free");
        color[v] = Some(c);
        used = used.max(c + 1);
    }
    used
}

fn colorable(g: &Graph, k: usize) -> bool {
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(g.degree(v)));
    let mut color = vec![usize::MAX; g.n()];
    fn go(g: &Graph, order: &[usize], i: usize, k: usize, top: usize, color: &mut [usize]) -> bool {
        if i == order.len() {
            return true;
        }
        let v = order[i];
        // colors beyond the first unused one are symmetric
        for c in 0..k.min(top + 1) {
            if g.neighbors(v).iter().all(|&w| color[w] != c) {
                color[v] = c;
                if go(g, order, i + 1, k, top.max(c + 1), color) {
                    return true;
                }
                color[v] = usize::MAX;
            }
        }
        false
    }
    go(g, &order, 0, k, 0, &mut color)
}

fn chromatic_unchecked(g: &Graph) -> usize {
    if g.n() == 0 {
        return 0;
    }
    if g.m() == 0 {
        return 1;
    }
    let lower = max_clique(g);
    let upper = dsatur_upper_bound(g);
    (lower..upper).find(|&k| colorable(g, k)).unwrap_or(upper)
}

/// Exact chromatic number by branch and bound between the clique number and a
/// DSatur coloring. Limited to 16 vertices.
pub fn chromatic_number(g: &Graph) -> Result<usize> {
    chromatic_number_with(g, false)
}

pub fn chromatic_number_with(g: &Graph, allow_large: bool) -> Result<usize> {
    guard("chromatic number", g.n(), CHROMATIC_MAX_ORDER, allow_large)?;
    Ok(chromatic_unchecked(g))
}

fn good_edges_with(g: &Graph, chi: usize, allow_large: bool) -> Result<Vec<Edge>> {
    guard("good-edge search", g.n(), CHROMATIC_MAX_ORDER, allow_large)?;
    if chi < 2 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for &(x, y) in g.edges() {
        let h = g.without_edge(x, y)?;
        if chromatic_unchecked(&h) == chi - 1 {
            out.push((x, y));
        }
    }
    Ok(out)
}

/// Edges whose removal lowers the chromatic number by one.
pub fn good_edges(g: &Graph) -> Result<Vec<Edge>> {
    let chi = chromatic_number(g)?;
    good_edges_with(g, chi, false)
}

pub fn is_color_critical(g: &Graph) -> Result<bool> {
    Ok(!good_edges(g)?.is_empty())
}

/// All colorings of `F - xy` with colors `1..=r`, `x` and `y` colored 1.
fn colorings_of_good_edge(g: &Graph, (x, y): Edge, r: usize) -> Result<Vec<ColoringProfile>> {
    let h = g.without_edge(x, y)?;
    let n = h.n();
    // fixed colors first, then the rest in index order
    let mut order = vec![x, y];
    order.extend((0..n).filter(|&v| v != x && v != y));

    fn go(
        h: &Graph,
        order: &[usize],
        i: usize,
        r: usize,
        color: &mut [usize],
        out: &mut Vec<Vec<usize>>,
        first_only: bool,
    ) -> bool {
        if i == order.len() {
            out.push(color.to_vec());
            return first_only;
        }
        let v = order[i];
        let choices: Vec<usize> = if color[v] != 0 {
            vec![color[v]]
        } else {
            (1..=r).collect()
        };
        let preset = color[v] != 0;
        for c in choices {
            if h.neighbors(v).iter().all(|&w| color[w] != c) {
                color[v] = c;
                if go(h, order, i + 1, r, color, out, first_only) {
                    return true;
                }
                if !preset {
                    color[v] = 0;
                }
            }
        }
        if !preset {
            color[v] = 0;
        }
        false
    }

    if r >= 2 {
        // every proper r-coloring of F - xy must give x and y the same color
        let mut color = vec![0; n];
        color[x] = 1;
        color[y] = 2;
        let mut witness = Vec::new();
        if go(&h, &order, 0, r, &mut color, &mut witness, true) {
            return Err(Error::ColoringInvariant(format!(
                "F - {x}{y} has a proper {r}-coloring separating {x} and {y}: {:?}",
                witness[0]
            )));
        }
    }

    let mut color = vec![0; n];
    color[x] = 1;
    color[y] = 1;
    let mut found = Vec::new();
    go(&h, &order, 0, r, &mut color, &mut found, false);
    let mut profiles: Vec<ColoringProfile> = found
        .into_iter()
        .map(|assignment| {
            let mut tau = vec![0; r];
            for (v, &c) in assignment.iter().enumerate() {
                if v != x && v != y {
                    tau[c - 1] += 1;
                }
            }
            ColoringProfile {
                good_edge: (x, y),
                assignment,
                tau,
            }
        })
        .collect();
    profiles.sort();
    Ok(profiles)
}

/// The labeled colorings attached to good edge `xy`, with `r = chi(F) - 1`.
pub fn enumerate_colorings(g: &Graph, xy: Edge) -> Result<Vec<ColoringProfile>> {
    let (x, y) = crate::graph::edge(xy.0, xy.1);
    if !g.has_edge(x, y) {
        return Err(Error::EdgeNotInGraph(x, y));
    }
    let chi = chromatic_number(g)?;
    if !good_edges_with(g, chi, false)?.contains(&(x, y)) {
        return Err(Error::NotGoodEdge(x, y));
    }
    colorings_of_good_edge(g, (x, y), chi - 1)
}

/// Number of automorphisms, by backtracking over degree-compatible maps.
pub fn automorphism_count(g: &Graph) -> Result<u64> {
    automorphism_count_with(g, false)
}

pub fn automorphism_count_with(g: &Graph, allow_large: bool) -> Result<u64> {
    guard(
        "automorphism count",
        g.n(),
        AUTOMORPHISM_MAX_ORDER,
        allow_large,
    )?;
    let n = g.n();
    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn go(g: &Graph, v: usize, image: &mut [usize], used: &mut [bool]) -> u64 {
        if v == g.n() {
            return 1;
        }
        let mut total = 0;
        for w in 0..g.n() {
            if used[w] || g.degree(w) != g.degree(v) {
                continue;
            }
            let consistent = (0..v).all(|u| g.has_edge(u, v) == g.has_edge(image[u], w));
            if consistent {
                image[v] = w;
                used[w] = true;
                total += go(g, v + 1, image, used);
                used[w] = false;
            }
        }
        total
    }
    Ok(go(g, 0, &mut image, &mut used))
}

/// Minimum size of an independent vertex set meeting every edge, by exhaustive
/// search over vertex subsets (isolated vertices ignored).
pub fn beta_prime(g: &Graph) -> Result<usize> {
    beta_prime_with(g, false)
}

pub fn beta_prime_with(g: &Graph, allow_large: bool) -> Result<usize> {
    let (g, _) = g.normalize();
    if g.bipartition().is_none() {
        return Err(Error::NotBipartite);
    }
    guard(
        "independent covering",
        g.n(),
        COVERING_MAX_ORDER,
        allow_large,
    )?;
    let n = g.n();
    let masks: Vec<u64> = g
        .edges()
        .iter()
        .map(|&(u, v)| (1u64 << u) | (1u64 << v))
        .collect();
    let mut best = n;
    for s in 0u64..(1u64 << n) {
        let size = s.count_ones() as usize;
        if size >= best {
            continue;
        }
        // independent: no edge inside; covering: every edge touched
        if masks.iter().all(|&e| (e & s).count_ones() == 1) {
            best = size;
        }
    }
    Ok(best)
}

/// Resolves a registry name: `K<n>`, `C<n>`, `kite`, `petersen`, `star:<k>`,
/// `Kab+e:<a>,<b>`.
pub fn named_pattern(name: &str) -> Result<Graph> {
    let unknown = || Error::UnknownPattern(name.to_string());
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| unknown());
    match name {
        "kite" => return Ok(kite()),
        "petersen" => return Ok(petersen()),
        _ => {}
    }
    if let Some(k) = name.strip_prefix("star:") {
        let k = num(k)?;
        if k == 0 {
            return Err(unknown());
        }
        return Ok(star(k));
    }
    if let Some(ab) = name.strip_prefix("Kab+e:") {
        let (a, b) = ab.split_once(',').ok_or_else(unknown)?;
        return Ok(build_bipartite_plus_edge(num(a)?, num(b)?)?.graph);
    }
    if let Some(k) = name.strip_prefix('K') {
        let k = num(k)?;
        if k < 2 {
            return Err(unknown());
        }
        return Ok(clique(k));
    }
    if let Some(k) = name.strip_prefix('C') {
        let k = num(k)?;
        if k < 3 {
            return Err(unknown());
        }
        return Ok(cycle(k));
    }
    Err(unknown())
}
