//! Transfers the entangled registers of the multi-qubit study through a
//! three-spin wire and prints corrected and uncorrected peak fidelities.
//!
//! ```text
//! cargo run --release --example multi_qubit
//! ```

use dwqst::encoding::LogicalState;
use dwqst::hamiltonians::ChainSpec;
use dwqst::protocol::{run_multi_qubit_transfer, ProtocolConfig, RegisterLayout};
use dwqst::PropagatorConfig;

fn main() -> dwqst::Result<()> {
    let ratio = std::env::args().nth(1).map_or(22.0, |s| s.parse().expect("J/λ ratio"));
    println!("J/λ = {ratio}");
    println!("{:<10} {:>9} {:>11} {:>11} {:>13} {:>9}", "state", "layout", "F(2τ)", "peak F", "uncorr@peak", "t/τ");
    for name in ["psi+", "c2", "ghz3", "w3", "cluster3", "11"] {
        let psi = LogicalState::named(name)?;
        let layout = RegisterLayout::symmetric(psi.n_logical(), 3)?;
        let mut cfg = ProtocolConfig::new(ChainSpec::with_layout(layout, ratio, 1.0)?);
        cfg.settings.propagator = PropagatorConfig::exact();
        let r = run_multi_qubit_transfer(&psi, layout, &cfg)?;
        println!(
            "{:<10} {:>9} {:>11.6} {:>11.6} {:>13.6} {:>9.4}",
            name,
            format!("({},{},{})", layout.n_alice, layout.n_wire, layout.n_bob),
            r.final_fidelity,
            r.peak.corrected,
            r.peak.uncorrected,
            r.peak.time / r.transfer_time
        );
    }
    Ok(())
}
