//! Dense state-vector and density-matrix algebra for a handful of qubits.
//!
//! Basis ordering is fixed throughout the crate: qubit 1 is the most
//! significant bit of the basis index. Pauli indices are `0 ↦ 1`, `1 ↦ σ_x`,
//! `2 ↦ σ_y`, `3 ↦ σ_z`.

mod local;
mod pauli;
mod state;

pub use local::{
    apply_local, sample_local_group, sample_local_group_with, GroupKind, LocalInvertible, DEFAULT_S_MAX,
};
pub use pauli::{pauli_operator, sigma, PauliString};
pub use state::{make_state, white_noise_mix, DensityMatrix, Expectation, PureState, DEFAULT_MAX_QUBITS};

pub(crate) use state::{make_state_unchecked, white_noise_affine};
