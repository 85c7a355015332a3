//! States, operators and unitary time evolution.

pub mod operator;
pub mod pauli;
pub mod propagator;
pub mod state;

pub use operator::Operator;
pub use pauli::{realize, Pauli, PauliSum, PauliTerm};
pub use propagator::{evolve, Method, Propagator, PropagatorConfig};
pub use state::{fidelity, sigma_z_expectation, sigma_z_profile, StateVector};
