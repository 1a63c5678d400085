//! Extremal constructions: Turán graphs, their one-edge extensions, complete
//! multipartite graphs and the small named patterns.

use serde::{Deserialize, Serialize};

use super::{edge, Edge, Graph, VertexPartition};
use crate::error::{Error, Result};

/// A constructed graph together with the structure it was built from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Construction {
    pub graph: Graph,
    pub partition: Option<VertexPartition>,
    /// The intra-part edge added on top of a complete multipartite graph.
    pub added_edge: Option<Edge>,
}

fn multipartite_from_sizes(sizes: &[usize]) -> (Graph, VertexPartition) {
    let mut parts = Vec::with_capacity(sizes.len());
    let mut next = 0;
    for &s in sizes {
        parts.push((next..next + s).collect::<Vec<_>>());
        next += s;
    }
    let mut part_of = vec![0; next];
    for (i, p) in parts.iter().enumerate() {
        for &v in p {
            part_of[v] = i;
        }
    }
    let mut edges = Vec::new();
    for u in 0..next {
        for v in u + 1..next {
            if part_of[u] != part_of[v] {
                edges.push((u, v));
            }
        }
    }
    let partition = VertexPartition::new(parts).expect("consecutive ranges are disjoint");
    (Graph::from_sorted_unique(next, edges), partition)
}

/// Part sizes of `T_{n,r}`, largest first.
pub(crate) fn turan_sizes(n: usize, r: usize) -> Vec<usize> {
    let (q, rem) = (n / r, n % r);
    (0..r).map(|i| if i < rem { q + 1 } else { q }).collect()
}

fn check_turan_args(n: usize, r: usize) -> Result<()> {
    if r == 0 || r > n {
        return Err(Error::InvalidParameter(format!(
            "Turán graph needs 1 <= r <= n (n = {n}, r = {r})"
        )));
    }
    Ok(())
}

/// `T_{n,r}`: parts of sizes `ceil(n/r)` (repeated `n mod r` times) then `floor(n/r)`.
pub fn build_turan(n: usize, r: usize) -> Result<Construction> {
    check_turan_args(n, r)?;
    let (graph, partition) = multipartite_from_sizes(&turan_sizes(n, r));
    Ok(Construction {
        graph,
        partition: Some(partition),
        added_edge: None,
    })
}

/// `T*_{n,r}` with the extra edge placed in part `part`, between its two
/// lowest-indexed vertices.
pub fn build_turan_plus_edge_in_part(n: usize, r: usize, part: usize) -> Result<Construction> {
    let base = build_turan(n, r)?;
    let partition = base.partition.expect("Turán graphs carry a partition");
    let members = partition
        .parts()
        .get(part)
        .ok_or_else(|| Error::InvalidParameter(format!("part {part} out of range for r = {r}")))?;
    if members.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "part {part} of T({n},{r}) has fewer than two vertices"
        )));
    }
    let added = edge(members[0], members[1]);
    let graph = base.graph.with_edge(added.0, added.1)?;
    Ok(Construction {
        graph,
        partition: Some(partition),
        added_edge: Some(added),
    })
}

/// `T*_{n,r}`: the extra edge goes into a smallest part that has at least two vertices.
pub fn build_turan_plus_edge(n: usize, r: usize) -> Result<Construction> {
    check_turan_args(n, r)?;
    let sizes = turan_sizes(n, r);
    let part = (0..r)
        .filter(|&i| sizes[i] >= 2)
        .min_by_key(|&i| (sizes[i], i))
        .ok_or_else(|| {
            Error::InvalidParameter(format!("T({n},{r}) has no part with two vertices"))
        })?;
    build_turan_plus_edge_in_part(n, r, part)
}

pub fn build_complete_multipartite(sizes: &[usize]) -> Result<Construction> {
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::InvalidParameter(
            "complete multipartite graph needs a nonempty list of positive sizes".into(),
        ));
    }
    let (graph, partition) = multipartite_from_sizes(sizes);
    Ok(Construction {
        graph,
        partition: Some(partition),
        added_edge: None,
    })
}

/// `K_{a,b}` plus one edge inside the class of size `a`.
pub fn build_bipartite_plus_edge(a: usize, b: usize) -> Result<Construction> {
    if a < 2 || b < 1 {
        return Err(Error::InvalidParameter(format!(
            "K(a,b)+e needs a >= 2 and b >= 1 (a = {a}, b = {b})"
        )));
    }
    let (graph, partition) = multipartite_from_sizes(&[a, b]);
    let graph = graph.with_edge(0, 1)?;
    Ok(Construction {
        graph,
        partition: Some(partition),
        added_edge: Some((0, 1)),
    })
}

pub fn clique(n: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v));
        }
    }
    Graph::from_sorted_unique(n, edges)
}

/// Cycle `0-1-...-(n-1)-0`; requires `n >= 3`.
pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3, "cycle needs at least three vertices");
    Graph::new(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle edges are valid")
}

/// `K_{1,k}` with center 0.
pub fn star(k: usize) -> Graph {
    Graph::from_sorted_unique(k + 1, (1..=k).map(|v| (0, v)).collect())
}

/// The 4-cycle `0-1-2-3` with chord `0-2`.
pub fn kite() -> Graph {
    Graph::new(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).expect("kite edges are valid")
}

pub fn petersen() -> Graph {
    let outer = (0..5).map(|i| (i, (i + 1) % 5));
    let spokes = (0..5).map(|i| (i, i + 5));
    let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
    Graph::new(10, outer.chain(spokes).chain(inner)).expect("Petersen edges are valid")
}

/// Named family with integer parameters, as accepted by the `construct` command.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Family {
    Turan { n: usize, r: usize },
    TuranPlusEdge { n: usize, r: usize },
    CompleteMultipartite { sizes: Vec<usize> },
    CompleteBipartitePlusEdge { a: usize, b: usize },
    Star { k: usize },
    Cycle { n: usize },
    Clique { n: usize },
    Kite,
}

impl Family {
    pub fn from_kind(kind: &str, params: &[usize]) -> Result<Family> {
        let want = |k: usize| -> Result<()> {
            if params.len() == k {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "family {kind} takes {k} parameter(s), got {}",
                    params.len()
                )))
            }
        };
        let fam = match kind {
            "turan" => {
                want(2)?;
                Family::Turan {
                    n: params[0],
                    r: params[1],
                }
            }
            "turan-plus-edge" => {
                want(2)?;
                Family::TuranPlusEdge {
                    n: params[0],
                    r: params[1],
                }
            }
            "complete-multipartite" => Family::CompleteMultipartite {
                sizes: params.to_vec(),
            },
            "complete-bipartite-plus-edge" => {
                want(2)?;
                Family::CompleteBipartitePlusEdge {
                    a: params[0],
                    b: params[1],
                }
            }
            "star" => {
                want(1)?;
                Family::Star { k: params[0] }
            }
            "cycle" => {
                want(1)?;
                Family::Cycle { n: params[0] }
            }
            "clique" => {
                want(1)?;
                Family::Clique { n: params[0] }
            }
            "kite" => {
                want(0)?;
                Family::Kite
            }
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown family kind: {other}"
                )))
            }
        };
        Ok(fam)
    }

    pub fn build(&self) -> Result<Construction> {
        let plain = |graph: Graph| Construction {
            graph,
            partition: None,
            added_edge: None,
        };
        match self {
            Family::Turan { n, r } => build_turan(*n, *r),
            Family::TuranPlusEdge { n, r } => build_turan_plus_edge(*n, *r),
            Family::CompleteMultipartite { sizes } => build_complete_multipartite(sizes),
            Family::CompleteBipartitePlusEdge { a, b } => build_bipartite_plus_edge(*a, *b),
            Family::Star { k } => {
                if *k == 0 {
                    return Err(Error::InvalidParameter("star needs k >= 1".into()));
                }
                Ok(plain(star(*k)))
            }
            Family::Cycle { n } => {
                if *n < 3 {
                    return Err(Error::InvalidParameter("cycle needs n >= 3".into()));
                }
                Ok(plain(cycle(*n)))
            }
            Family::Clique { n } => Ok(plain(clique(*n))),
            Family::Kite => Ok(plain(kite())),
        }
    }
}
