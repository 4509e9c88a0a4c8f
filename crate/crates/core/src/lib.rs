//! Random walks on hypergraphs, natively.
//!
//! A hypergraph walker at node `i` assigns each neighbour `j` the weight
//! `K_ij = sum over hyperedges a of (|E_a| - 1) e_ia e_ja`, which senses both
//! hyperedge sizes and shared memberships, and moves with probability
//! `W_ij = K_ij / d_i` where `d_i` is the hyperdegree. On top of that walk
//! this crate provides:
//!
//! * exact spectral observables (occupation probability, stationary
//!   distribution, mean first passage time) from the biorthonormal
//!   eigen-system of `W`;
//! * the resetting walk `Pi(r, gamma) = (1 - gamma) W + gamma Theta(r)`,
//!   whose eigen-system is assembled in closed form from that of `W`
//!   without re-diagonalizing;
//! * optimal reset probabilities via the coefficient-of-variation
//!   criterion `z^2(g*) = 1 + 1/<T(g*)>`;
//! * seeded, bitwise-reproducible Monte Carlo simulation of hitting and
//!   cover times;
//! * stationary-distribution node ranking on the hypergraph versus its
//!   clique (two-section) expansion.
//!
//! Everything is dense and double precision, sized for graphs up to a few
//! thousand nodes. Brute-force reference routes (matrix powers, power
//! iteration, fundamental-matrix solves, first-passage deconvolution) live
//! in [`oracle`] and [`analytics`] so results can always be cross-checked.

pub mod analytics;
pub mod error;
pub mod hypergraph;
pub mod monte_carlo;
pub mod optimizer;
pub mod oracle;
pub mod ranking;
pub mod spectral;

pub use error::{Error, Result};
pub use hypergraph::{CliqueGraph, GeneralizedAdjacency, Hypergraph, TransitionMatrix};
pub use spectral::{ResetSpectralDecomposition, ResetWalkSpec, SpectralDecomposition};
