//! The domain-wall codec: logical bits live on interfaces between spins.
//!
//! ```text
//! cargo run --example codec
//! ```

use dwqst::encoding::{
    count_domain_walls, dw_decode_with, dw_encode_bits, dw_encode_state, padded, Anchor, BoundaryContext,
    LogicalState,
};

fn bits(s: &str) -> Vec<bool> {
    s.chars().map(|c| c == '1').collect()
}

fn show(b: &[bool]) -> String {
    b.iter().map(|&x| if x { '1' } else { '0' }).collect()
}

fn main() -> dwqst::Result<()> {
    println!("left anchor up:");
    for l in ["00100", "00110"] {
        let a = Anchor::Left(true);
        let p = padded(&dw_encode_bits(&bits(l), a), a);
        println!("  {l} -> {} ({} walls)", show(&p), count_domain_walls(&p, BoundaryContext::default()));
    }
    println!("against a down wire (register, then the first wire spin):");
    for l in ["1", "10", "01", "11", "00110"] {
        let p = dw_encode_bits(&bits(l), Anchor::WIRE);
        println!("  {l:>5} -> {}|0", show(&p));
    }
    let bell = LogicalState::named("psi+")?;
    let phys = dw_encode_state(&bell, Anchor::WIRE);
    println!("psi+ = {bell}");
    for (i, a) in phys.amplitudes().iter().enumerate() {
        println!("  physical |{i:02b}⟩: {:+.4}", a.re);
    }
    let back = dw_decode_with(&phys, Anchor::WIRE);
    println!("round trip fidelity: {:.15}", back.fidelity(&bell)?);
    Ok(())
}
