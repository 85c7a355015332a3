//! Sweeps J/λ for the single-qubit transfer and fits the quadratic error law.
//!
//! ```text
//! cargo run --release --example error_scaling
//! ```

use dwqst::analysis::{error_scaling_sweep, Calibration, SweepItem, rescaling_tradeoff};
use dwqst::hamiltonians::ChainSpec;
use dwqst::protocol::ProtocolConfig;

fn main() -> dwqst::Result<()> {
    let item = SweepItem::named("1", 3)?;
    let base = ProtocolConfig::new(ChainSpec::single(5, 8.0, 1.0)?);
    let ratios = [4.0, 8.0, 12.0, 16.0, 24.0, 32.0, 40.0];
    let table = error_scaling_sweep(&[item], &ratios, &base, None)?;
    println!("{:>6} {:>12}", "J/λ", "ε");
    for row in &table.rows {
        let note = if row.in_fit { "" } else { "  (outside the quadratic regime, not fitted)" };
        println!("{:>6} {:>12.4e}{note}", row.ratio, row.infidelity);
    }
    let fit = table.fit_for("1").expect("enough rows to fit");
    println!("slope {:.3}, R² {:.5} over {} points", fit.slope, fit.r_squared, fit.n_points);

    let cal = Calibration::from_table(&table)?;
    for eps in [1e-2, 1e-3] {
        let lambda = rescaling_tradeoff(eps, 1.0, 1.0, Some(&cal))?;
        println!("ε = {eps:.0e}: λ ≤ {lambda:.4}·J, τ = {:.2}/J", std::f64::consts::PI / lambda);
    }
    Ok(())
}
