//! Quantum state transfer along transverse-field Ising chains using a
//! domain-wall encoding, together with the XY-Heisenberg perfect-transfer
//! baseline it emulates.
//!
//! The crate is organised bottom-up:
//!
//! * [`quantum`]: states, Pauli sums, sparse operators and propagators.
//! * [`hamiltonians`]: coupling profiles and every chain Hamiltonian.
//! * [`encoding`]: the domain-wall codec, wall counting and phase bookkeeping.
//! * [`protocol`]: the two-stage transfer runs and the Heisenberg baseline.
//! * [`analysis`]: error-scaling sweeps, fits and closed-form checks.
//! * [`cli`]: manifest-driven experiment runners used by the `dwqst` binary.
//!
//! Runnable walkthroughs for each capability live in `examples/`.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod encoding;
pub mod error;
pub mod hamiltonians;
pub mod protocol;
pub mod quantum;

pub use error::{Error, Result};
pub use quantum::{
    evolve, fidelity, sigma_z_expectation, Method, Operator, Pauli, PauliSum, PauliTerm,
    Propagator, PropagatorConfig, StateVector,
};
