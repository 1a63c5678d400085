//! Tools for spectral supersaturation experiments on simple graphs.
//!
//! The crate covers graph storage and enumeration ([`graph`]), Perron vectors and
//! light-edge peeling ([`spectral`]), pattern profiles ([`pattern`]), exact and
//! brute-force copy counts ([`counting`]), edit distances to extremal structures
//! ([`stability`]) and batch campaigns with JSON/CSV reports ([`harness`]).

pub mod counting;
pub mod error;
pub mod graph;
pub mod harness;
pub mod pattern;
pub mod spectral;
pub mod stability;

pub use error::{Error, Result};
pub use graph::{edge, Edge, Graph, VertexPartition};
