//! The two propagation routes side by side: hand-written Lanczos against a
//! dense Hermitian eigendecomposition, on the transport-stage Hamiltonian.
//!
//! ```text
//! cargo run --release --example krylov_vs_exact -- 12
//! ```

use std::time::Instant;

use dwqst::hamiltonians::{transport_hamiltonian, ChainSpec};
use dwqst::{Propagator, PropagatorConfig, StateVector};

fn main() -> dwqst::Result<()> {
    let n: usize = std::env::args().nth(1).map_or(10, |s| s.parse().expect("chain length"));
    let spec = ChainSpec::single(n, 22.0, 1.0)?;
    let h = transport_hamiltonian(&spec)?.realize()?;
    let psi = StateVector::basis(n, 1 << (n - 1))?;
    let t = spec.transfer_time();
    println!("N = {n}, dim = {}, nnz = {}", h.dim(), h.nnz());

    let mut out = Vec::new();
    for (label, cfg) in [("krylov", PropagatorConfig::krylov()), ("exact", PropagatorConfig::exact())] {
        let start = Instant::now();
        let phi = Propagator::new(&h, &cfg)?.propagate(&psi, t)?;
        println!("{label:>6}: {:.3}s, P(|1…1⟩) = {:.9}", start.elapsed().as_secs_f64(), phi.amplitude(h.dim() - 1).norm_sqr());
        out.push(phi);
    }
    let diff = out[0]
        .amplitudes()
        .iter()
        .zip(out[1].amplitudes())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    println!("‖ψ_krylov − ψ_exact‖₂ = {diff:.2e}");
    Ok(())
}
