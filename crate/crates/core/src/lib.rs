//! Ground-state entanglement as a function of connectivity.
//!
//! Two physical models share one topology layer ([`graph`]):
//!
//! * coupled harmonic oscillators, whose ground state is Gaussian and whose
//!   bipartite entanglement is measured by the logarithmic negativity
//!   ([`gaussian`]);
//! * spin-1/2 particles under an XX interaction, solved by exact
//!   diagonalization inside fixed-magnetization sectors ([`spin`]).
//!
//! [`experiments`] sweeps connectivity parameters over seeded replicas and
//! writes aggregated CSV tables; [`cli`] is the command-line front end.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod gaussian;
pub mod graph;
pub mod numerics;
pub mod spin;

pub use error::{Error, Result};
pub use gaussian::{GaussianGround, MonogamyBudget, PotentialMatrix};
pub use graph::{BondConvention, Boundary, CouplingGraph, PartitionMask, PartitionScheme};
pub use numerics::SymmetricSpectrum;
pub use spin::{ReducedDensity, SectorBasis, SpinState};
