//! Finite-dimensional multipartite state algebra.

mod io;
mod layout;
mod ops;
mod state;
mod uhlmann;

pub use io::{bits, state_from_json, state_to_json, MatrixJson, RealArray, StateJson, StateKind, READ_HERMITIAN_TOL};
pub use layout::{strides, subset_offsets, Role, Subsystem, SystemLayout};
pub use ops::{
    apply_operator, basis_state, canonical_state, closeness, factor_offsets, fidelity, generalized_fidelity, ghz,
    ginibre, haar_unitary, haar_unitary_from, max_entangled, max_mixed, mixture_vs_pure_trace_norm, overlap,
    partial_trace, purify, random_density, random_pure, schmidt_decomposition, tensor_all, tensor_product,
    CanonicalKind, Closeness, PartialIsometry, Schmidt,
};
pub use state::{factor_of, QuantumState, StateData};
pub use uhlmann::{uhlmann_isometry, UhlmannDecoder};
