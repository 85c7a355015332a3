//! Compares the numerically propagated end-to-end amplitude of the XY chain
//! with its closed form [−i sin(λt/2)]^(N−1).
//!
//! ```text
//! cargo run --release --example closed_form
//! ```

use dwqst::analysis::closed_form_consistency;
use dwqst::hamiltonians::{heisenberg_xy, transfer_amplitude_closed_form};
use dwqst::{evolve, PropagatorConfig, StateVector};

fn main() -> dwqst::Result<()> {
    let n = 6;
    let h = heisenberg_xy(n, 1.0)?.realize()?;
    let start = StateVector::basis(n, 1 << (n - 1))?;
    println!("N = {n}");
    println!("{:>6} {:>21} {:>21}", "t", "numerical", "closed form");
    for k in 0..=8 {
        let t = k as f64 * std::f64::consts::PI / 8.0;
        let a = evolve(&start, &h, t, &PropagatorConfig::krylov())?.amplitude(1);
        let b = transfer_amplitude_closed_form(n, 1.0, t);
        // Both are purely imaginary for this profile.
        println!("{t:>6.3} {:>+20.12}i {:>+20.12}i", a.im, b.im);
    }
    let ns: Vec<usize> = (2..=10).collect();
    for (label, cfg) in [("krylov", PropagatorConfig::krylov()), ("exact", PropagatorConfig::exact())] {
        let dev = closed_form_consistency(&ns, 1.0, 20, &cfg)?;
        println!("{label:>6}: max deviation over N = 2..10, 20 times: {dev:.2e}");
    }
    Ok(())
}
