//! Discrete-time coined quantum walks on Cayley graphs.
//!
//! The crate builds walk unitaries `U = S (I ⊗ C)` on Cayley graphs of
//! `Z_2^d` and `S_n`, finds the subspace of initial states that never reach a
//! chosen set of final vertices under repeated absorbing measurement (the
//! infinite-hitting-time, or IHT, subspace), enumerates the walk's
//! permutation symmetries and cross-checks the spectral prediction against a
//! direct measured-walk simulation.
//!
//! Numeric types are generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64`, which is what the invariant
//! tolerances are calibrated for.

pub mod catalog;
pub mod cayley;
pub mod coins;
pub mod group;
pub mod linalg;
pub mod measured;
pub mod perm;
pub mod scalar;
pub mod spectral;
pub mod symmetry;
pub mod walk;

pub use catalog::CatalogGraph;
pub use cayley::{build_cayley, build_hypercube, CayleyError, CayleyGraph, GeneratingSet, ShiftMap};
pub use coins::{cps_enumerate, CoinError, CoinKind, CoinPermutationSet};
pub use group::{Canonical, FiniteGroup, GroupElement, GroupError, GroupKind};
pub use perm::Perm;
pub use scalar::{Cx, Real};
pub use spectral::{
    dark_subspace_oracle, decompose, iht_subspace, overlap, sweep_final_sets, ClusterIht, EigenCluster,
    SpectralError, SweepPoint, SweepStrategy, TableRow,
};
pub use measured::{classify_hitting_time, hitting_time, simulate, simulate_with, HittingTimeVerdict, MeasuredWalkError, MeasuredWalkResult, SimulationOptions};
pub use symmetry::{classify, generate_candidates, is_shift_automorphism, is_walk_symmetry, JointPermutation, SymmetryError, SymmetryLabel, SymmetryReport};
pub use walk::{build_unitary, final_projector, FinalProjector, WalkError};

pub type CoinOperator = coins::CoinOperator<f64>;
pub type WalkState = walk::WalkState<f64>;
pub type WalkUnitary = walk::WalkUnitary<f64>;
pub type EigenspaceDecomposition = spectral::EigenspaceDecomposition<f64>;
pub type IhtReport = spectral::IhtReport<f64>;
