//! entlab: a numerical laboratory for the entanglement entropy of free
//! disordered lattice fermions.
//!
//! The pipeline: sample a disordered potential on a finite box Λ_M, assemble
//! the discrete Schrödinger operator H = -Δ + V with Dirichlet truncation,
//! diagonalize, form the Fermi projection P = χ_{(-∞,μ]}(H), and evaluate
//! block entanglement entropies S_Λ = Tr h(P_Λ) = Tr h₀(Π_Λ) by two
//! independent routes. Disorder-ensemble drivers then probe the asymptotic
//! structure at desk scale: the area law in the mean, the d=1 splitting of
//! S into two edge contributions, selfaveraging of L^{-(d-1)}·S for d ≥ 2
//! (and its failure for d=1), exponential kernel decay, restriction
//! proximity, and fractional moments of the resolvent.

pub mod cli;
pub mod ensemble;
pub mod entropy;
pub mod error;
pub mod fit;
pub mod hamiltonian;
pub mod lattice;
pub mod oracle;
pub mod spectral;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
