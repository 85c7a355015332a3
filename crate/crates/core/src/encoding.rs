//! Domain-wall codec, wall counting and diagonal phase bookkeeping.
//!
//! A logical bit is stored on the interface between two neighbouring physical
//! spins: `1` if they differ (a domain wall), `0` otherwise. A register of `k`
//! physical spins has `k` interfaces once one neighbour outside the register
//! (the *anchor*) is fixed, which makes the code a bijection on `k` bits.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::state::{bits_of_index, index_of_bits, site_bit, NORM_TOLERANCE};
use crate::quantum::StateVector;

/// A state of `n_logical` logical qubits; logical qubit 1 is the most
/// significant bit of the amplitude index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogicalState {
    n_logical: usize,
    amplitudes: Vec<Complex64>,
}

impl LogicalState {
    pub fn new(n_logical: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        let state = StateVector::new(n_logical, amplitudes)?;
        Ok(Self {
            n_logical,
            amplitudes: state.into_amplitudes(),
        })
    }

    /// Normalizes `Σ c |bits⟩`.
    pub fn from_terms(
        n_logical: usize,
        terms: impl IntoIterator<Item = (usize, Complex64)>,
    ) -> Result<Self> {
        let state = StateVector::superposition(n_logical, terms)?;
        Ok(Self {
            n_logical,
            amplitudes: state.into_amplitudes(),
        })
    }

    pub fn basis(bits: &[bool]) -> Result<Self> {
        Self::from_terms(bits.len(), [(index_of_bits(bits), Complex64::new(1.0, 0.0))])
    }

    /// `α|1⟩ + β|0⟩`.
    pub fn qubit(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm_sqr = alpha.norm_sqr() + beta.norm_sqr();
        if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Self::new(1, vec![beta, alpha])
    }

    /// `(|1…1⟩ + |0…0⟩)/√2`.
    pub fn ghz(k: usize) -> Result<Self> {
        let one = Complex64::new(1.0, 0.0);
        Self::from_terms(k, [(0, one), ((1 << k) - 1, one)])
    }

    /// Equal superposition of all single-excitation strings.
    pub fn w(k: usize) -> Result<Self> {
        Self::from_terms(k, (0..k).map(|s| (1 << s, Complex64::new(1.0, 0.0))))
    }

    /// `½(|00⟩ + |01⟩ + |10⟩ − |11⟩)`.
    pub fn c2() -> Result<Self> {
        let (p, m) = (Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0));
        Self::from_terms(2, [(0b00, p), (0b01, p), (0b10, p), (0b11, m)])
    }

    /// `½(|000⟩ + |011⟩ + |101⟩ − |110⟩)`.
    pub fn cluster3() -> Result<Self> {
        let (p, m) = (Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0));
        Self::from_terms(3, [(0b000, p), (0b011, p), (0b101, p), (0b110, m)])
    }

    /// Parses a state name: a bitstring (`"101"`), `psi+`, `c2`, `cluster3`,
    /// or `ghz<k>`, `w<k>`.
    pub fn named(name: &str) -> Result<Self> {
        let bad = || Error::invalid("state", format!("unknown state `{name}`"));
        let size = |prefix: &str| -> Result<usize> {
            name[prefix.len()..]
                .parse::<usize>()
                .ok()
                .filter(|&k| (1..=16).contains(&k))
                .ok_or_else(bad)
        };
        if !name.is_empty() && name.len() <= 16 && name.chars().all(|c| c == '0' || c == '1') {
            let bits: Vec<bool> = name.chars().map(|c| c == '1').collect();
            return Self::basis(&bits);
        }
        match name {
            "psi+" => {
                let one = Complex64::new(1.0, 0.0);
                Self::from_terms(2, [(0b11, one), (0b00, one)])
            }
            "c2" => Self::c2(),
            "cluster3" => Self::cluster3(),
            _ if name.starts_with("ghz") => Self::ghz(size("ghz")?),
            _ if name.starts_with('w') => Self::w(size("w")?),
            _ => Err(bad()),
        }
    }

    pub fn n_logical(&self) -> usize {
        self.n_logical
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Non-zero components as `(bits, amplitude)`, in index order.
    pub fn components(&self) -> impl Iterator<Item = (Vec<bool>, Complex64)> + '_ {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != Complex64::new(0.0, 0.0))
            .map(move |(i, a)| (bits_of_index(i, self.n_logical), *a))
    }

    pub fn to_state_vector(&self) -> StateVector {
        StateVector::unchecked(self.n_logical, self.amplitudes.clone())
            .expect("logical state has a valid size")
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &LogicalState) -> Result<f64> {
        crate::quantum::fidelity(&self.to_state_vector(), &other.to_state_vector())
    }
}

impl fmt::Display for LogicalState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (bits, a) in self.components() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let ket: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
            write!(f, "({:.4}{:+.4}i)|{ket}⟩", a.re, a.im)?;
        }
        Ok(())
    }
}

/// Which outside neighbour closes the register's interfaces, and its value.
///
/// `Left(v)`: logical `j` sits on `(p_{j−1}, p_j)` with `p_0 = v`.
/// `Right(v)`: logical `j` sits on `(p_j, p_{j+1})` with `p_{k+1} = v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Anchor {
    Left(bool),
    Right(bool),
}

impl Anchor {
    /// Alice's register: closed by the first wire spin, which starts down.
    /// Encoding against it never puts a wall on the register/wire boundary.
    pub const WIRE: Anchor = Anchor::Right(false);
}

/// Fixed spins (physical or virtual) around a bitstring, for wall counting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BoundaryContext {
    pub left: Option<bool>,
    pub right: Option<bool>,
}

impl BoundaryContext {
    pub fn new(left: Option<bool>, right: Option<bool>) -> Self {
        Self { left, right }
    }
}

/// Physical register bits whose interfaces (closed by `anchor`) read `logical`.
pub fn dw_encode_bits(logical: &[bool], anchor: Anchor) -> Vec<bool> {
    let k = logical.len();
    let mut p = vec![false; k];
    match anchor {
        Anchor::Left(v) => {
            let mut prev = v;
            for j in 0..k {
                p[j] = logical[j] ^ prev;
                prev = p[j];
            }
        }
        Anchor::Right(v) => {
            let mut next = v;
            for j in (0..k).rev() {
                p[j] = logical[j] ^ next;
                next = p[j];
            }
        }
    }
    p
}

/// Interface readout, the inverse of [`dw_encode_bits`].
pub fn dw_read_bits(physical: &[bool], anchor: Anchor) -> Vec<bool> {
    let k = physical.len();
    match anchor {
        Anchor::Left(v) => (0..k)
            .map(|j| physical[j] ^ if j == 0 { v } else { physical[j - 1] })
            .collect(),
        Anchor::Right(v) => (0..k)
            .map(|j| physical[j] ^ if j + 1 == k { v } else { physical[j + 1] })
            .collect(),
    }
}

/// Register bits with the anchor spin attached on its side.
pub fn padded(physical: &[bool], anchor: Anchor) -> Vec<bool> {
    match anchor {
        Anchor::Left(v) => std::iter::once(v).chain(physical.iter().copied()).collect(),
        Anchor::Right(v) => physical.iter().copied().chain(std::iter::once(v)).collect(),
    }
}

/// Index permutation realizing the codec on basis states.
fn encode_index(index: usize, k: usize, anchor: Anchor) -> usize {
    index_of_bits(&dw_encode_bits(&bits_of_index(index, k), anchor))
}

/// Linear extension of [`dw_encode_bits`] to a register-sized state.
pub fn dw_encode_state(logical: &LogicalState, anchor: Anchor) -> StateVector {
    let k = logical.n_logical;
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << k];
    for (i, a) in logical.amplitudes.iter().enumerate() {
        amps[encode_index(i, k, anchor)] = *a;
    }
    StateVector::unchecked(k, amps).expect("register size matches logical size")
}

/// Inverse of [`dw_encode_state`] for the same anchor.
pub fn dw_decode_with(physical: &StateVector, anchor: Anchor) -> LogicalState {
    let k = physical.n_spins();
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << k];
    for (i, a) in physical.amplitudes().iter().enumerate() {
        amps[index_of_bits(&dw_read_bits(&bits_of_index(i, k), anchor))] = *a;
    }
    LogicalState {
        n_logical: k,
        amplitudes: amps,
    }
}

/// Reverses the site order of a state.
pub fn mirror_sites(state: &StateVector) -> StateVector {
    let n = state.n_spins();
    let mut amps = vec![Complex64::new(0.0, 0.0); state.dim()];
    for (i, a) in state.amplitudes().iter().enumerate() {
        let j = (1..=n).fold(0, |acc, s| (acc << 1) | usize::from(site_bit(i, n, n + 1 - s)));
        amps[j] = *a;
    }
    StateVector::unchecked(n, amps).expect("same size")
}

/// Bob's readout. His register holds the mirror image of Alice's, so it is
/// read right to left, starting from `reference`: the state of the boundary
/// field that was switched off next to the register.
pub fn dw_decode(physical: &StateVector, reference: bool) -> LogicalState {
    dw_decode_with(&mirror_sites(physical), Anchor::Left(reference))
}

/// Number of unequal neighbours in `[left] + bits + [right]`.
pub fn count_domain_walls(bits: &[bool], ctx: BoundaryContext) -> usize {
    let chain: Vec<bool> = ctx
        .left
        .into_iter()
        .chain(bits.iter().copied())
        .chain(ctx.right)
        .collect();
    chain.windows(2).filter(|w| w[0] != w[1]).count()
}

/// `exp(+iτJ Σ_{n=1}^{N−1} σᶻ_n σᶻ_{n+1})`, applied as a diagonal phase.
pub fn offset_correction(state: &StateVector, j: f64, tau: f64) -> StateVector {
    let n = state.n_spins();
    state.apply_diagonal_phase(|i| {
        let zz: i64 = (1..n)
            .map(|s| if site_bit(i, n, s) == site_bit(i, n, s + 1) { 1 } else { -1 })
            .sum();
        tau * j * zz as f64
    })
}

/// Phases accumulated by the wall sectors over `stages` transfer periods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseLedger {
    pub n_spins: usize,
    pub stages: u32,
    /// `φ_glob = stages·J·N·τ`.
    pub global: f64,
    /// `φ_rel(M) = −2·J·M·τ·stages`, for `M = 0..=N`.
    pub relative: BTreeMap<usize, f64>,
}

impl PhaseLedger {
    /// Amplitude factor picked up by an `M`-wall branch:
    /// `exp(−i(φ_glob + φ_rel(M))) = exp(−i·stages·E_M·τ)`.
    pub fn branch_factor(&self, m: usize) -> Complex64 {
        let rel = self.relative.get(&m).copied().unwrap_or(0.0);
        Complex64::from_polar(1.0, -(self.global + rel))
    }
}

pub fn phase_ledger(n: usize, j: f64, tau: f64, stages: u32) -> Result<PhaseLedger> {
    if !(1..=2).contains(&stages) {
        return Err(Error::invalid("stages", format!("{stages} is not 1 or 2")));
    }
    let s = f64::from(stages);
    Ok(PhaseLedger {
        n_spins: n,
        stages,
        global: s * j * n as f64 * tau,
        relative: (0..=n).map(|m| (m, -2.0 * j * m as f64 * tau * s)).collect(),
    })
}
