//! Perfect transfer on the mirror-symmetric XY chain: |1⟩ leaves spin 1 and
//! arrives at spin N at τ = π/λ for every chain length.
//!
//! ```text
//! cargo run --release --example baseline
//! ```

use dwqst::encoding::LogicalState;
use dwqst::protocol::{run_heisenberg_baseline, RunSettings};

fn main() -> dwqst::Result<()> {
    let one = LogicalState::named("1")?;
    let settings = RunSettings {
        n_time_samples: 9,
        ..RunSettings::default()
    };
    println!("{:>3} {:>14} {:>12}", "N", "F(τ)", "F(τ/2)");
    for n in 2..=13 {
        let r = run_heisenberg_baseline(n, 1.0, &one, &settings)?;
        println!("{n:>3} {:>14.12} {:>12.6}", r.final_fidelity, r.uncorrected[4]);
    }
    Ok(())
}
