//! Site percolation on pseudo-random `d`-regular graphs.
//!
//! The crate is organised around the life cycle of an experiment:
//!
//! * [`graph`] holds the immutable compressed adjacency representation,
//!   vertex sets and the text file format.
//! * [`generators`] builds random regular graphs, hypercubes, blow-ups and
//!   disjoint clique unions.
//! * [`spectral`] computes the extreme nontrivial adjacency eigenvalues and
//!   certifies the spectral ratio `λ/d`.
//! * [`percolation`] samples retained vertex sets and runs the coin-driven
//!   depth-first exploration whose epochs are the percolation clusters.
//! * [`census`] measures component sizes, edge counts, isolated trees and
//!   long cycles; it also carries small-scale tree enumeration oracles.
//! * [`theory`] evaluates the closed-form predictions these measurements
//!   are compared against.
//! * [`verify`] checks the structural properties (mixing, degree outliers,
//!   expansion windows, coin stream regularity, giant expansion).
//! * [`harness`] wires everything into seeded, parallel, reproducible sweeps
//!   with JSON-lines output.

pub mod census;
pub mod dsu;
pub mod error;
pub mod generators;
pub mod graph;
pub mod harness;
pub mod percolation;
pub mod rng;
pub mod spectral;
pub mod theory;
pub mod verify;

mod linalg;

pub use census::{ComponentCensus, CycleWitness};
pub use error::{Error, Result};
pub use generators::{generate, GenSpec};
pub use graph::{RegularGraph, Vertex, VertexSet};
pub use percolation::{CoinStream, DfsTrace, PercolationSample, Priority};
pub use spectral::{Certificate, Method, SpectrumReport};
pub use theory::TheoryPrediction;
pub use verify::ViolationReport;
