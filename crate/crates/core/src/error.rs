use thiserror::Error;

use crate::spectral::PeelTrace;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("line {line}: vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange {
        line: usize,
        vertex: usize,
        n: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("guardrail exceeded: {0} (set the override flag to proceed)")]
    Guardrail(String),

    #[error("graph has no edges")]
    EmptyGraph,

    #[error(
        "power iteration did not converge after {iterations} iterations \
         (best rho = {best_rho}, residual = {residual:e})"
    )]
    NonConvergence {
        best_rho: f64,
        residual: f64,
        iterations: usize,
    },

    #[error("peeling stopped after {} graphs: {source}", partial.steps.len())]
    Peel {
        partial: Box<PeelTrace>,
        source: Box<Error>,
    },

    #[error("edge ({0}, {1}) is not a good edge of the pattern")]
    NotGoodEdge(usize, usize),

    #[error("pattern is not color-critical")]
    NotColorCritical,

    #[error("pattern chromatic number {0} is below 3")]
    ChromaticTooSmall(usize),

    #[error("no independent covering exists: graph is not bipartite")]
    NotBipartite,

    #[error("coloring invariant violated: {0}")]
    ColoringInvariant(String),

    #[error("edge ({0}, {1}) is not in the graph")]
    EdgeNotInGraph(usize, usize),

    #[error("edge ({0}, {1}) is not inside a single part")]
    EdgeNotIntraPart(usize, usize),

    #[error("second graph is not an edge subgraph of the first")]
    NotSubgraph,

    #[error("the closed formula needs r | n (n = {n}, r = {r}); use the brute-force path")]
    NotDivisible { n: usize, r: usize },

    #[error(
        "counting budget of {budget} extensions exceeded; at least {lower_bound} copies found"
    )]
    BudgetExceeded { budget: u64, lower_bound: u64 },

    #[error("vertex identification is not injective or out of range: {0}")]
    BadIdentification(String),

    #[error("unknown pattern name: {0}")]
    UnknownPattern(String),

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
