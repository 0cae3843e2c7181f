//! Random Schrödinger operators on metric Cayley graphs.
//!
//! This crate builds the directed metric Cayley graph Γ(G,S) of a finitely
//! generated amenable group (ℤ^d or the discrete Heisenberg group H₃),
//! equips its edges with random potentials and its vertices with random
//! boundary conditions, discretises the operator −f″ + Vf on finite
//! subgraphs, and studies the normalised eigenvalue counting functions:
//! their uniform convergence along Følner boxes to the integrated density
//! of states, the expected-localised-trace expression of that limit,
//! spectral shift bounds, and pattern-frequency reconstructions.
//!
//! Module map:
//! - [`group`]: groups, word metric, Følner boxes, boundaries, tilings
//! - [`cayley`]: the Cayley graph, finite subgraphs, the action on edges
//! - [`field`]: seeded equivariant disorder, colourings, patterns, frequencies
//! - [`qgraph`]: discretised Hamiltonians and the single-edge oracle
//! - [`spectral`]: inertia-based eigenvalue counting, counting functions,
//!   spectral shift, IDS approximation, localised traces, jump detection

pub mod cayley;
pub mod error;
pub mod field;
pub mod group;
mod mixing;
pub mod qgraph;
pub mod spectral;

pub use error::{Error, Result};
