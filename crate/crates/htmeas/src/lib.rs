//! Hardware-tailored diagonalization circuits and Pauli grouping for
//! measuring observables `O = Σ c_i P_i`.
//!
//! A readout circuit is a layer of single-qubit Cliffords, a `CZ` on every
//! edge of a template graph, and a Hadamard layer. The [`synth`] module
//! decides whether such a circuit diagonalizes a commuting set and builds
//! it; [`grouping`] assembles collections; [`metrics`] scores them and
//! [`oracle`] checks every claim with dense simulation.

pub mod circuit;
pub mod error;
pub mod fixtures;
pub mod grouping;
pub mod hwgraph;
pub mod io;
pub mod metrics;
pub mod oracle;
pub mod pauli;
pub mod synth;

pub use error::{Error, Result};
pub use grouping::{Collection, Grouping, Member, Method, Predicate, Readout, ValueFn};
pub use hwgraph::Graph;
pub use pauli::{Clifford, CliffordLayer, PauliOp, PauliTerm, SignedZ};
pub use synth::{Search, SolverConfig, SynthesisResult};
