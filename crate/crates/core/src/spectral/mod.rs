//! Spectral radius, Perron vectors and the quantities derived from them.
//!
//! The eigensolver is shifted power iteration on `A + cI` (default `c = 1`),
//! run separately on every connected component with at least one edge. The
//! shift keeps `rho + c` strictly dominant on bipartite components, where `rho`
//! and `-rho` are both eigenvalues of `A`. The returned vector is the Perron
//! vector of one component of maximum spectral radius and zero elsewhere.

mod checks;
mod peel;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};

pub use checks::{
    check_eps_dense, check_perturbation_bound, EpsDenseReport, PerturbationMode, PerturbationReport,
};
pub use peel::{
    check_peel_bounds, check_terminal_bounds, peel, HypothesisStatus, NoLightEdgeBounds,
    PeelBoundViolation, PeelBoundsReport, PeelStep, PeelTrace, RemovedEdge, TerminalReason,
    ViolatedBound,
};

/// Additive slack used by every inequality check on floating-point spectra.
pub const CHECK_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralConfig {
    /// Stop once `||Ax - rho x||_2` drops to this value.
    pub tol: f64,
    pub max_iter: usize,
    pub shift: f64,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        SpectralConfig {
            tol: 1e-10,
            max_iter: 1_000_000,
            shift: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralResult {
    pub rho: f64,
    /// Unit nonnegative vector over all vertices, zero off `dominant_component`.
    pub x: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub dominant_component: Vec<usize>,
}

struct Component {
    vertices: Vec<usize>,
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl Component {
    fn new(g: &Graph, vertices: Vec<usize>) -> Self {
        let mut local = vec![usize::MAX; g.n()];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let mut offsets = Vec::with_capacity(vertices.len() + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for &v in &vertices {
            targets.extend(g.neighbors(v).iter().map(|&w| local[w]));
            offsets.push(targets.len());
        }
        Component {
            vertices,
            offsets,
            targets,
        }
    }

    fn mul(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.targets[self.offsets[i]..self.offsets[i + 1]]
                .iter()
                .map(|&j| x[j])
                .sum();
        }
    }
}

struct ComponentSolution {
    rho: f64,
    x: Vec<f64>,
    residual: f64,
    iterations: usize,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn power_iteration(
    comp: &Component,
    start: Vec<f64>,
    cfg: &SpectralConfig,
) -> Result<ComponentSolution> {
    let k = comp.vertices.len();
    let mut x = start;
    let s = norm(&x);
    x.iter_mut().for_each(|a| *a /= s);
    let mut y = vec![0.0; k];
    let mut best = (0.0, f64::INFINITY);
    for it in 1..=cfg.max_iter {
        comp.mul(&x, &mut y);
        let rho: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let residual = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (b - rho * a).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual < best.1 {
            best = (rho, residual);
        }
        if residual <= cfg.tol {
            return Ok(ComponentSolution {
                rho,
                x,
                residual,
                iterations: it,
            });
        }
        for (a, b) in x.iter_mut().zip(&y) {
            *a = b + cfg.shift * *a;
        }
        let s = norm(&x);
        x.iter_mut().for_each(|a| *a /= s);
    }
    Err(Error::NonConvergence {
        best_rho: best.0,
        residual: best.1,
        iterations: cfg.max_iter,
    })
}

/// Spectral radius and Perron vector of `g`, ignoring isolated vertices.
pub fn spectral_radius(g: &Graph, cfg: &SpectralConfig) -> Result<SpectralResult> {
    spectral_radius_from(g, cfg, None)
}

/// As [`spectral_radius`], starting power iteration from `warm` (indexed by
/// vertex) blended with the uniform vector so every entry stays positive.
pub fn spectral_radius_from(
    g: &Graph,
    cfg: &SpectralConfig,
    warm: Option<&[f64]>,
) -> Result<SpectralResult> {
    if g.m() == 0 {
        return Err(Error::EmptyGraph);
    }
    if cfg.tol.is_nan() || cfg.tol <= 0.0 || cfg.shift.is_nan() || cfg.shift <= 0.0 {
        return Err(Error::InvalidParameter(
            "tolerance and shift must be positive".into(),
        ));
    }
    let mut best: Option<(ComponentSolution, Vec<usize>)> = None;
    let mut iterations = 0;
    for verts in g.components() {
        if verts.len() < 2 {
            continue;
        }
        let comp = Component::new(g, verts);
        let k = comp.vertices.len() as f64;
        let start = comp
            .vertices
            .iter()
            .map(|&v| warm.map_or(0.0, |w| w.get(v).copied().unwrap_or(0.0)) + 1e-3 / k.sqrt())
            .collect();
        let sol = power_iteration(&comp, start, cfg)?;
        iterations += sol.iterations;
        let better = match &best {
            None => true,
            Some((b, _)) => sol.rho > b.rho + CHECK_SLACK * b.rho.max(1.0),
        };
        if better {
            best = Some((sol, comp.vertices));
        }
    }
    let (sol, vertices) = best.expect("a graph with an edge has a nontrivial component");
    let mut x = vec![0.0; g.n()];
    for (i, &v) in vertices.iter().enumerate() {
        x[v] = sol.x[i];
    }
    Ok(SpectralResult {
        rho: sol.rho,
        x,
        residual: sol.residual,
        iterations,
        dominant_component: vertices,
    })
}

/// Normalized spectral radius `rho(G) / sqrt(e(G))`.
pub fn phi(g: &Graph, cfg: &SpectralConfig) -> Result<f64> {
    let s = spectral_radius(g, cfg)?;
    Ok(s.rho / (g.m() as f64).sqrt())
}

/// Edges whose Perron-entry product is at most `1 / (8 sqrt(e(G)))`,
/// sorted lexicographically.
pub fn light_edges(g: &Graph, spectral: &SpectralResult) -> Vec<Edge> {
    light_edge_products(g, spectral)
        .into_iter()
        .map(|(e, _)| e)
        .collect()
}

pub(crate) fn light_threshold(m: usize) -> f64 {
    1.0 / (8.0 * (m as f64).sqrt())
}

pub(crate) fn light_edge_products(g: &Graph, spectral: &SpectralResult) -> Vec<(Edge, f64)> {
    let t = light_threshold(g.m());
    g.edges()
        .iter()
        .map(|&(u, v)| ((u, v), spectral.x[u] * spectral.x[v]))
        .filter(|&(_, p)| p <= t)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_complete_multipartite, build_turan, clique, star};

    fn rho(g: &Graph) -> f64 {
        spectral_radius(g, &SpectralConfig::default()).unwrap().rho
    }

    #[test]
    fn radius_examples() {
        let k23 = build_complete_multipartite(&[2, 3]).unwrap().graph;
        assert!((rho(&k23) - 6f64.sqrt()).abs() < 1e-9);
        let t63 = build_turan(6, 3).unwrap().graph;
        assert!((rho(&t63) - 4.0).abs() < 1e-9);
        let p3 = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        assert!((rho(&p3) - 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn vector_is_unit_and_nonnegative() {
        let g = clique(4).disjoint_union(&clique(2));
        let s = spectral_radius(&g, &SpectralConfig::default()).unwrap();
        assert!((norm(&s.x) - 1.0).abs() < 1e-12);
        assert!(s.x.iter().all(|&a| a >= 0.0));
        assert_eq!(s.dominant_component, vec![0, 1, 2, 3]);
        assert_eq!(&s.x[4..], &[0.0, 0.0]);
        assert!(s.residual <= 1e-10);
    }

    #[test]
    fn ties_go_to_the_lowest_component() {
        let g = clique(3).disjoint_union(&clique(3));
        let s = spectral_radius(&g, &SpectralConfig::default()).unwrap();
        assert_eq!(s.dominant_component, vec![0, 1, 2]);
    }

    #[test]
    fn isolated_vertices_are_ignored() {
        let g = Graph::new(5, [(1, 3)]).unwrap();
        let s = spectral_radius(&g, &SpectralConfig::default()).unwrap();
        assert!((s.rho - 1.0).abs() < 1e-12);
        assert_eq!(s.x[0], 0.0);
    }

    #[test]
    fn empty_graph_and_non_convergence() {
        assert!(matches!(
            spectral_radius(&Graph::empty(3), &SpectralConfig::default()),
            Err(Error::EmptyGraph)
        ));
        let cfg = SpectralConfig {
            tol: 1e-300,
            max_iter: 5,
            shift: 1.0,
        };
        let p = Graph::new(6, (0..5).map(|i| (i, i + 1))).unwrap();
        match spectral_radius(&p, &cfg) {
            Err(Error::NonConvergence { best_rho, .. }) => assert!(best_rho > 1.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn phi_examples() {
        let cfg = SpectralConfig::default();
        let k33 = build_complete_multipartite(&[3, 3]).unwrap().graph;
        assert!((phi(&k33, &cfg).unwrap() - 1.0).abs() < 1e-9);
        assert!((phi(&clique(4), &cfg).unwrap() - 3.0 / 6f64.sqrt()).abs() < 1e-9);
        let t63 = build_turan(6, 3).unwrap().graph;
        assert!((phi(&t63, &cfg).unwrap() - (4.0f64 / 3.0).sqrt()).abs() < 1e-9);
        assert!(phi(&Graph::empty(2), &cfg).is_err());
    }

    #[test]
    fn light_edge_examples() {
        let cfg = SpectralConfig::default();
        let k33 = build_complete_multipartite(&[3, 3]).unwrap().graph;
        let s = spectral_radius(&k33, &cfg).unwrap();
        assert!(light_edges(&k33, &s).is_empty());

        let g = clique(4).disjoint_union(&clique(2));
        let s = spectral_radius(&g, &cfg).unwrap();
        assert_eq!(light_edges(&g, &s), vec![(4, 5)]);

        // center 1/sqrt 2, leaves 1/(2 sqrt 2): product 1/4 > 1/16
        let k14 = star(4);
        let s = spectral_radius(&k14, &cfg).unwrap();
        assert!((s.x[0] - 0.5f64.sqrt()).abs() < 1e-9);
        assert!(light_edges(&k14, &s).is_empty());
    }
}
