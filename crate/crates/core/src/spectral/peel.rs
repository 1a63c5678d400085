//! Light-edge peeling and the invariants it is known to satisfy.
//!
//! Starting from `G_1 = G`, each round recomputes the Perron vector of `G_i`
//! and deletes one light edge, until no light edge remains or the trace holds
//! `max(floor(eps * m), 1)` graphs. Among several light edges the one with the
//! smallest entry product is removed, ties broken lexicographically.

use serde::{Deserialize, Serialize};

use super::{
    light_edge_products, spectral_radius_from, SpectralConfig, SpectralResult, CHECK_SLACK,
};
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RemovedEdge {
    pub edge: Edge,
    /// `x_u * x_v` under the Perron vector of the graph it was removed from.
    pub product: f64,
}

/// One graph `G_i` of the peeling sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeelStep {
    /// 1-based position `i`.
    pub index: usize,
    pub edges: usize,
    pub rho: f64,
    pub phi: f64,
    /// Light edge deleted to obtain `G_{i+1}`; `None` on the final graph.
    pub removed: Option<RemovedEdge>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TerminalReason {
    NoLightEdges,
    StepCap,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeelTrace {
    pub epsilon: f64,
    pub initial_edges: usize,
    /// Maximum number of graphs in the sequence, `max(floor(eps * m), 1)`.
    pub step_cap: usize,
    pub steps: Vec<PeelStep>,
    pub terminal_reason: TerminalReason,
    /// Number of light edges left in the final graph (nonzero only on a cap stop).
    pub terminal_light_edges: usize,
    pub terminal: Graph,
    pub terminal_spectral: SpectralResult,
}

impl PeelTrace {
    pub fn removed_edges(&self) -> Vec<Edge> {
        self.steps
            .iter()
            .filter_map(|s| s.removed.map(|r| r.edge))
            .collect()
    }
}

pub fn peel(g: &Graph, epsilon: f64, cfg: &SpectralConfig) -> Result<PeelTrace> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    let m = g.m();
    if m == 0 {
        return Err(Error::EmptyGraph);
    }
    let step_cap = ((epsilon * m as f64).floor() as usize).max(1);
    let mut steps = Vec::new();
    let mut current = g.clone();
    let mut warm: Option<Vec<f64>> = None;
    loop {
        let spectral = match spectral_radius_from(&current, cfg, warm.as_deref()) {
            Ok(s) => s,
            Err(source) => {
                // the partial trace ends at the last graph that was solved
                let partial = PeelTrace {
                    epsilon,
                    initial_edges: m,
                    step_cap,
                    steps,
                    terminal_reason: TerminalReason::StepCap,
                    terminal_light_edges: 0,
                    terminal: current,
                    terminal_spectral: SpectralResult {
                        rho: f64::NAN,
                        x: Vec::new(),
                        residual: f64::NAN,
                        iterations: 0,
                        dominant_component: Vec::new(),
                    },
                };
                return Err(Error::Peel {
                    partial: Box::new(partial),
                    source: Box::new(source),
                });
            }
        };
        let e = current.m();
        let index = steps.len() + 1;
        let light = light_edge_products(&current, &spectral);
        let mut step = PeelStep {
            index,
            edges: e,
            rho: spectral.rho,
            phi: spectral.rho / (e as f64).sqrt(),
            removed: None,
        };
        let reason = if index == step_cap {
            Some(TerminalReason::StepCap)
        } else if light.is_empty() {
            Some(TerminalReason::NoLightEdges)
        } else {
            None
        };
        if let Some(terminal_reason) = reason {
            steps.push(step);
            return Ok(PeelTrace {
                epsilon,
                initial_edges: m,
                step_cap,
                steps,
                terminal_reason,
                terminal_light_edges: light.len(),
                terminal: current,
                terminal_spectral: spectral,
            });
        }
        let &(chosen, product) = light
            .iter()
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .expect("light edge list is nonempty");
        step.removed = Some(RemovedEdge {
            edge: chosen,
            product,
        });
        steps.push(step);
        current = current.without_edge(chosen.0, chosen.1)?;
        warm = Some(spectral.x);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "reason", rename_all = "kebab-case")]
pub enum HypothesisStatus {
    Met,
    NotMet(String),
}

impl HypothesisStatus {
    pub fn is_met(&self) -> bool {
        matches!(self, HypothesisStatus::Met)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolatedBound {
    /// `rho(G_i) >= sqrt(a e(G_i)) + (i-1)/(5 sqrt m)`
    RadiusGrowth,
    /// `Phi(G_i) - Phi(G_1) >= (i-1)/(5m)`
    PhiGain,
    /// `rho(G_i) <= rho(G_{i+1}) + 1/(4 sqrt e(G_i))`
    StepDrop,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeelBoundViolation {
    pub step: usize,
    pub bound: ViolatedBound,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeelBoundsReport {
    pub hypothesis: HypothesisStatus,
    pub a: f64,
    pub m: usize,
    pub steps_checked: usize,
    pub min_margin_radius: Option<f64>,
    pub min_margin_phi: Option<f64>,
    pub min_margin_step: Option<f64>,
    pub slack: f64,
    pub first_violation: Option<PeelBoundViolation>,
}

impl PeelBoundsReport {
    /// No violation was found (vacuously true when the hypothesis fails).
    pub fn holds(&self) -> bool {
        self.first_violation.is_none()
    }
}

fn fold_min(slot: &mut Option<f64>, v: f64) {
    *slot = Some(slot.map_or(v, |s| s.min(v)));
}

/// Evaluates the radius-growth and Phi-gain bounds at every graph of the trace,
/// plus the one-step drop bound between consecutive graphs.
pub fn check_peel_bounds(trace: &PeelTrace, a: f64) -> PeelBoundsReport {
    let m = trace.initial_edges;
    let mut report = PeelBoundsReport {
        hypothesis: HypothesisStatus::Met,
        a,
        m,
        steps_checked: 0,
        min_margin_radius: None,
        min_margin_phi: None,
        min_margin_step: None,
        slack: CHECK_SLACK,
        first_violation: None,
    };
    if !(0.81..=2.0).contains(&a) {
        report.hypothesis = HypothesisStatus::NotMet(format!("a = {a} outside [0.81, 2]"));
        return report;
    }
    let Some(first) = trace.steps.first() else {
        report.hypothesis = HypothesisStatus::NotMet("empty trace".into());
        return report;
    };
    let need = (a * m as f64).sqrt();
    if first.rho + CHECK_SLACK < need {
        report.hypothesis =
            HypothesisStatus::NotMet(format!("rho(G_1) = {} < sqrt(a m) = {need}", first.rho));
        return report;
    }
    let mf = m as f64;
    let mut violation = |step: usize, bound, lhs: f64, rhs: f64| {
        if lhs + CHECK_SLACK < rhs && report.first_violation.is_none() {
            report.first_violation = Some(PeelBoundViolation {
                step,
                bound,
                lhs,
                rhs,
            });
        }
    };
    let mut margins = (None, None, None);
    for (k, s) in trace.steps.iter().enumerate() {
        let i = (k + 1) as f64;
        let rhs = (a * s.edges as f64).sqrt() + (i - 1.0) / (5.0 * mf.sqrt());
        violation(s.index, ViolatedBound::RadiusGrowth, s.rho, rhs);
        fold_min(&mut margins.0, s.rho - rhs);

        let gain = s.phi - first.phi;
        let rhs = (i - 1.0) / (5.0 * mf);
        violation(s.index, ViolatedBound::PhiGain, gain, rhs);
        fold_min(&mut margins.1, gain - rhs);

        if let Some(next) = trace.steps.get(k + 1) {
            let lhs = next.rho + 1.0 / (4.0 * (s.edges as f64).sqrt());
            violation(s.index, ViolatedBound::StepDrop, lhs, s.rho);
            fold_min(&mut margins.2, lhs - s.rho);
        }
    }
    report.steps_checked = trace.steps.len();
    report.min_margin_radius = margins.0;
    report.min_margin_phi = margins.1;
    report.min_margin_step = margins.2;
    report
}

/// Entry, order and minimum-degree bounds for a graph without light edges.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoLightEdgeBounds {
    pub hypothesis: HypothesisStatus,
    pub a: f64,
    pub m: usize,
    pub order: usize,
    pub min_degree: usize,
    pub min_entry: f64,
    pub max_entry: f64,
    /// `((a-1)/8)^5 m^(-1/4)`
    pub entry_lower: f64,
    /// `(8/(a-1))^4 m^(-1/4)`
    pub entry_upper: f64,
    /// `(8/(a-1))^10 sqrt m`
    pub order_upper: f64,
    /// `((a-1)/8)^9 sqrt m`
    pub degree_lower: f64,
    pub entry_lower_holds: bool,
    pub entry_upper_holds: bool,
    pub order_holds: bool,
    pub degree_holds: bool,
}

impl NoLightEdgeBounds {
    pub fn all_hold(&self) -> bool {
        self.entry_lower_holds && self.entry_upper_holds && self.order_holds && self.degree_holds
    }
}

/// Checks the four bounds on a light-edge-free graph with `rho >= sqrt(a m)`,
/// `1 < a <= 2`. Isolated vertices are disregarded.
pub fn check_terminal_bounds(g: &Graph, spectral: &SpectralResult, a: f64) -> NoLightEdgeBounds {
    let m = g.m();
    let verts = g.non_isolated();
    let mut report = NoLightEdgeBounds {
        hypothesis: HypothesisStatus::Met,
        a,
        m,
        order: verts.len(),
        min_degree: g.min_degree().unwrap_or(0),
        min_entry: f64::NAN,
        max_entry: f64::NAN,
        entry_lower: f64::NAN,
        entry_upper: f64::NAN,
        order_upper: f64::NAN,
        degree_lower: f64::NAN,
        entry_lower_holds: false,
        entry_upper_holds: false,
        order_holds: false,
        degree_holds: false,
    };
    if !(a > 1.0 && a <= 2.0) {
        report.hypothesis = HypothesisStatus::NotMet(format!("a = {a} outside (1, 2]"));
        return report;
    }
    if m == 0 {
        report.hypothesis = HypothesisStatus::NotMet("graph has no edges".into());
        return report;
    }
    if spectral.x.len() != g.n() {
        report.hypothesis =
            HypothesisStatus::NotMet("spectral result does not belong to this graph".into());
        return report;
    }
    let light = light_edge_products(g, spectral);
    if !light.is_empty() {
        report.hypothesis =
            HypothesisStatus::NotMet(format!("graph has {} light edge(s)", light.len()));
        return report;
    }
    let mf = m as f64;
    if spectral.rho + CHECK_SLACK < (a * mf).sqrt() {
        report.hypothesis = HypothesisStatus::NotMet(format!(
            "rho = {} < sqrt(a m) = {}",
            spectral.rho,
            (a * mf).sqrt()
        ));
        return report;
    }
    let eps = (a - 1.0) / 8.0;
    let quarter = mf.powf(-0.25);
    report.min_entry = verts
        .iter()
        .map(|&v| spectral.x[v])
        .fold(f64::INFINITY, f64::min);
    report.max_entry = verts.iter().map(|&v| spectral.x[v]).fold(0.0, f64::max);
    report.entry_lower = eps.powi(5) * quarter;
    report.entry_upper = eps.powi(-4) * quarter;
    report.order_upper = eps.powi(-10) * mf.sqrt();
    report.degree_lower = eps.powi(9) * mf.sqrt();
    report.entry_lower_holds = report.min_entry + CHECK_SLACK > report.entry_lower;
    report.entry_upper_holds = report.max_entry < report.entry_upper + CHECK_SLACK;
    report.order_holds = report.order as f64 <= report.order_upper;
    report.degree_holds = report.min_degree as f64 >= report.degree_lower;
    report
}
