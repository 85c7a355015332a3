//! Coupling profiles and chain Hamiltonians.
//!
//! Conventions: `ħ = 1`, every rate is an angular frequency, and the Pauli
//! convention is `σᶻ|0⟩ = +|0⟩`. A fixed virtual spin at a chain end is
//! realized as a local field `J·z_v·σᶻ` on the adjacent physical spin, where
//! `z_v = +1` for a virtual `|0⟩` (down) and `−1` for a virtual `|1⟩` (up);
//! this is the `J·σᶻ_v σᶻ` bond with the virtual spin frozen.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::RegisterLayout;
use crate::quantum::{PauliSum, PauliTerm};

/// Mirror-symmetric couplings `t_n = (λ/2)·√(n(N−n))`, `n = 1..N−1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingProfile {
    pub chain_length: usize,
    pub lambda: f64,
    pub couplings: Vec<f64>,
}

impl CouplingProfile {
    /// `t_n` for `1 ≤ n ≤ N−1`, and `0` for `n = N` (the profile formula
    /// evaluated at the end of the chain).
    pub fn coupling(&self, n: usize) -> f64 {
        if n == self.chain_length {
            0.0
        } else {
            self.couplings[n - 1]
        }
    }

    /// `v_n = t_n / λ`.
    pub fn normalized(&self) -> Vec<f64> {
        self.couplings.iter().map(|t| t / self.lambda).collect()
    }

    pub fn max_coupling(&self) -> f64 {
        self.couplings.iter().copied().fold(0.0, f64::max)
    }
}

pub fn coupling_profile(n: usize, lambda: f64) -> Result<CouplingProfile> {
    if n < 2 {
        return Err(Error::invalid("n_spins", format!("chain length {n} < 2")));
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::invalid("lambda", format!("{lambda} must be positive")));
    }
    // n(N−n) is symmetric in exact integer arithmetic, so the mirror pairs are bit-identical.
    let couplings = (1..n)
        .map(|k| {
            let m = k.min(n - k) as u64;
            let prod = m * (n as u64 - m);
            0.5 * lambda * (prod as f64).sqrt()
        })
        .collect();
    Ok(CouplingProfile {
        chain_length: n,
        lambda,
        couplings,
    })
}

/// `H_G = Σ (t_n/2)(σˣ_n σˣ_{n+1} + σʸ_n σʸ_{n+1})`, which acts as `λSₓ` on
/// the single-excitation sector.
///
/// The overall sign is the one for which the end-to-end amplitude is exactly
/// [`transfer_amplitude_closed_form`]; the opposite sign gives its complex
/// conjugate, i.e. the same populations with `i → −i`.
pub fn heisenberg_xy(n: usize, lambda: f64) -> Result<PauliSum> {
    let profile = coupling_profile(n, lambda)?;
    let mut h = PauliSum::new(n);
    for (k, t) in profile.couplings.iter().enumerate() {
        let site = k + 1;
        h.push(PauliTerm::xx(site, site + 1, t / 2.0))?;
        h.push(PauliTerm::yy(site, site + 1, t / 2.0))?;
    }
    Ok(h)
}

/// `⟨0…01|e^{−iH_G t}|10…0⟩ = [−i·sin(λt/2)]^{N−1}`.
pub fn transfer_amplitude_closed_form(n: usize, lambda: f64, t: f64) -> Complex64 {
    let base = Complex64::new(0.0, -(lambda * t / 2.0).sin());
    base.powu((n.max(1) - 1) as u32)
}

/// Perfect-transfer time `τ = π/λ`.
pub fn transfer_time(lambda: f64) -> f64 {
    std::f64::consts::PI / lambda
}

/// A chain end: either free, or clamped to a virtual spin in a fixed state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Free,
    VirtualDown,
    VirtualUp,
}

impl Boundary {
    /// State of the virtual spin as a bit, if any.
    pub fn virtual_bit(self) -> Option<bool> {
        match self {
            Boundary::Free => None,
            Boundary::VirtualDown => Some(false),
            Boundary::VirtualUp => Some(true),
        }
    }

    /// Coefficient of `σᶻ` on the adjacent physical spin for bond strength `j`.
    pub fn field(self, j: f64) -> f64 {
        match self {
            Boundary::Free => 0.0,
            Boundary::VirtualDown => j,
            Boundary::VirtualUp => -j,
        }
    }
}

/// How spin 1 is held fixed during the transport stage.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Pinning {
    /// No transverse field on spin 1.
    #[default]
    FieldOff,
    /// Spin 1 keeps a transverse field but sits in a strong longitudinal field.
    LocalField { strength: f64, transverse: f64 },
}

/// Physical parameters of one protocol instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub n_spins: usize,
    /// Domain-wall (ZZ) coupling `J`.
    pub coupling_j: f64,
    pub lambda: f64,
    pub layout: RegisterLayout,
    #[serde(default)]
    pub pinning: Pinning,
    /// Chain length used for the reset-stage profile; defaults to
    /// `n_alice + n_wire + 1`, which makes the profile over the active sites
    /// mirror-symmetric.
    #[serde(default)]
    pub reset_profile_length: Option<usize>,
}

/// Ratio below which the wall-number conservation is too leaky for the
/// quadratic error law to hold.
pub const QUADRATIC_REGIME_RATIO: f64 = 8.0;

impl ChainSpec {
    /// Single logical qubit: Alice and Bob own one spin each.
    pub fn single(n_spins: usize, coupling_j: f64, lambda: f64) -> Result<Self> {
        if n_spins < 2 {
            return Err(Error::invalid("n_spins", format!("chain length {n_spins} < 2")));
        }
        Self::with_layout(RegisterLayout::new(1, n_spins - 2, 1)?, coupling_j, lambda)
    }

    pub fn with_layout(layout: RegisterLayout, coupling_j: f64, lambda: f64) -> Result<Self> {
        let spec = Self {
            n_spins: layout.total(),
            coupling_j,
            lambda,
            layout,
            pinning: Pinning::FieldOff,
            reset_profile_length: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_spins < 2 {
            return Err(Error::invalid("n_spins", format!("chain length {} < 2", self.n_spins)));
        }
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(Error::invalid("lambda", format!("{} must be positive", self.lambda)));
        }
        if !self.coupling_j.is_finite() || self.coupling_j.abs() < self.lambda {
            return Err(Error::invalid(
                "coupling_j",
                format!("|J| = {} must be at least λ = {}", self.coupling_j.abs(), self.lambda),
            ));
        }
        self.layout.validate()?;
        if self.layout.total() != self.n_spins {
            return Err(Error::invalid(
                "layout",
                format!("{:?} does not add up to {} spins", self.layout, self.n_spins),
            ));
        }
        if let Some(len) = self.reset_profile_length {
            let active = self.layout.n_alice + self.layout.n_wire;
            if len < active + 1 {
                return Err(Error::invalid(
                    "reset_profile_length",
                    format!("{len} leaves no coupling for active site {active}"),
                ));
            }
        }
        Ok(())
    }

    /// `J/λ`.
    pub fn ratio(&self) -> f64 {
        self.coupling_j.abs() / self.lambda
    }

    /// Human-readable warnings for parameters outside the well-behaved regime.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.ratio() < QUADRATIC_REGIME_RATIO {
            w.push(format!(
                "J/λ = {:.3} is below {QUADRATIC_REGIME_RATIO}; higher-order leakage dominates",
                self.ratio()
            ));
        }
        w
    }

    pub fn transfer_time(&self) -> f64 {
        transfer_time(self.lambda)
    }
}

/// `Σ transverse σˣ + boundary fields + J·Σ σᶻ_n σᶻ_{n+1}`.
pub fn domain_wall_hamiltonian(
    n: usize,
    j: f64,
    transverse: impl IntoIterator<Item = (usize, f64)>,
    left: Boundary,
    right: Boundary,
) -> Result<PauliSum> {
    let mut h = PauliSum::new(n);
    for (site, t) in transverse {
        h.push(PauliTerm::x(site, t))?;
    }
    if left != Boundary::Free {
        h.push(PauliTerm::z(1, left.field(j)))?;
    }
    if right != Boundary::Free {
        h.push(PauliTerm::z(n, right.field(j)))?;
    }
    for site in 1..n {
        h.push(PauliTerm::zz(site, site + 1, j))?;
    }
    Ok(h)
}

/// `H_DW = Σ_{n=1}^{N} t_n σˣ_n − Jσᶻ_1 + Jσᶻ_N + Σ J σᶻσᶻ`, with the profile
/// evaluated at `n = N` giving `t_N = 0`. The left virtual spin is up and the
/// right one down.
pub fn ising_dw(spec: &ChainSpec) -> Result<PauliSum> {
    let n = spec.n_spins;
    let profile = coupling_profile(n, spec.lambda)?;
    domain_wall_hamiltonian(
        n,
        spec.coupling_j,
        (1..=n).map(|k| (k, profile.coupling(k))),
        Boundary::VirtualUp,
        Boundary::VirtualDown,
    )
}

/// Transport stage: transverse fields shifted onto sites `2..N` (`t_{n−1}` on
/// site `n`), spin 1 frozen, virtual down spin to the right of site `N`.
pub fn transport_hamiltonian(spec: &ChainSpec) -> Result<PauliSum> {
    let n = spec.n_spins;
    let profile = coupling_profile(n, spec.lambda)?;
    let mut h = domain_wall_hamiltonian(
        n,
        spec.coupling_j,
        (2..=n).map(|k| (k, profile.coupling(k - 1))),
        Boundary::Free,
        Boundary::VirtualDown,
    )?;
    if let Pinning::LocalField {
        strength,
        transverse,
    } = spec.pinning
    {
        h.push(PauliTerm::x(1, transverse))?;
        h.push(PauliTerm::z(1, strength))?;
    }
    Ok(h)
}

/// Single-qubit reset stage: fields on sites `1..N−1`, spin `N` frozen,
/// virtual down spin to the left of site 1.
pub fn reset_hamiltonian(spec: &ChainSpec) -> Result<PauliSum> {
    let n = spec.n_spins;
    let profile = coupling_profile(n, spec.lambda)?;
    domain_wall_hamiltonian(
        n,
        spec.coupling_j,
        (1..n).map(|k| (k, profile.coupling(k))),
        Boundary::VirtualDown,
        Boundary::Free,
    )
}

/// Register reset stage: fields only on Alice's register and the wire, with a
/// profile recomputed to be mirror-symmetric over those sites; Bob's register
/// is frozen.
pub fn multiqubit_reset_hamiltonian(spec: &ChainSpec) -> Result<PauliSum> {
    spec.validate()?;
    let n = spec.n_spins;
    let active = spec.layout.n_alice + spec.layout.n_wire;
    let length = spec.reset_profile_length.unwrap_or(active + 1);
    let profile = coupling_profile(length, spec.lambda)?;
    domain_wall_hamiltonian(
        n,
        spec.coupling_j,
        (1..=active).map(|k| (k, profile.coupling(k))),
        Boundary::VirtualDown,
        Boundary::Free,
    )
}

/// Diagonal energy `E_M = J(N − 2M)` of the `M`-wall sector.
pub fn energy_offset(n: usize, m: usize, j: f64) -> Result<f64> {
    if m > n {
        return Err(Error::invalid("m", format!("{m} walls exceed chain length {n}")));
    }
    Ok(j * (n as f64 - 2.0 * m as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{count_domain_walls, BoundaryContext};
    use crate::quantum::state::{bits_of_index, sigma_z_profile};
    use crate::quantum::{evolve, Pauli, PropagatorConfig, StateVector};
    use approx::assert_abs_diff_eq;
    use std::collections::BTreeMap;

    fn term_set(h: &PauliSum) -> Vec<(String, f64)> {
        let mut v: Vec<(String, f64)> = h
            .terms()
            .iter()
            .filter(|t| t.coeff != 0.0)
            .map(|t| {
                let label: String = t.factors.iter().map(|(s, p)| format!("{p}{s}")).collect();
                (label, t.coeff)
            })
            .collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    fn expected(terms: &[(&str, f64)]) -> Vec<(String, f64)> {
        let mut v: Vec<(String, f64)> = terms.iter().map(|(s, c)| (s.to_string(), *c)).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    #[test]
    fn profile_examples() {
        assert_eq!(coupling_profile(2, 2.0).unwrap().couplings, vec![1.0]);
        let p = coupling_profile(13, 1.0).unwrap();
        assert_eq!(p.coupling(6), p.coupling(7));
        assert_abs_diff_eq!(p.coupling(6), 0.5 * 42f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(p.coupling(6), 3.24037, epsilon = 1e-5);
        assert_eq!(p.coupling(13), 0.0);
        assert!(coupling_profile(1, 1.0).is_err());
        assert!(coupling_profile(3, 0.0).is_err());
    }

    #[test]
    fn profile_mirror_is_bit_exact() {
        for n in 2..=64 {
            let p = coupling_profile(n, 0.731).unwrap();
            for k in 1..n {
                assert_eq!(p.coupling(k).to_bits(), p.coupling(n - k).to_bits());
                assert!(p.coupling(k) > 0.0);
            }
        }
    }

    #[test]
    fn heisenberg_terms_n2() {
        let h = heisenberg_xy(2, 2.0).unwrap();
        assert_eq!(term_set(&h), expected(&[("X1X2", 0.5), ("Y1Y2", 0.5)]));
    }

    #[test]
    fn heisenberg_single_excitation_block_is_spin_sx() {
        // N = 4: spin-3/2 Sₓ scaled by λ has eigenvalues λ·{−3/2, −1/2, 1/2, 3/2}.
        let n = 4;
        let lambda = 1.3;
        let h = heisenberg_xy(n, lambda).unwrap().realize().unwrap();
        let idx: Vec<usize> = (1..=n).map(|s| 1 << (n - s)).collect();
        let block = crate::quantum::Operator::from_triplets(
            2,
            idx.iter().enumerate().flat_map(|(a, &i)| {
                let h = &h;
                idx.iter().enumerate().map(move |(b, &j)| (a, b, h.get(i, j)))
            }),
        )
        .unwrap();
        let prop = crate::quantum::Propagator::new(&block, &PropagatorConfig::exact()).unwrap();
        let ev = prop.eigenvalues().unwrap();
        for (got, want) in ev.iter().zip([-1.5, -0.5, 0.5, 1.5]) {
            assert_abs_diff_eq!(*got, lambda * want, epsilon = 1e-12);
        }
    }

    #[test]
    fn closed_form_examples() {
        for n in 2..8 {
            assert_abs_diff_eq!(
                transfer_amplitude_closed_form(n, 1.7, transfer_time(1.7)).norm(),
                1.0,
                epsilon = 1e-12
            );
            assert_eq!(transfer_amplitude_closed_form(n, 1.7, 0.0).norm(), 0.0);
        }
        let a = transfer_amplitude_closed_form(3, 1.0, std::f64::consts::FRAC_PI_2);
        assert_abs_diff_eq!(a.re, -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-15);
    }

    fn spec(n: usize, j: f64) -> ChainSpec {
        ChainSpec::single(n, j, 1.0).unwrap()
    }

    #[test]
    fn ising_dw_terms_n2() {
        let s = ChainSpec::single(2, 5.0, 2.0).unwrap();
        let h = ising_dw(&s).unwrap();
        // t_1 = 1, t_2 = 0 (profile at n = N).
        assert_eq!(
            term_set(&h),
            expected(&[("X1", 1.0), ("X2", 0.0), ("Z1", -5.0), ("Z2", 5.0), ("Z1Z2", 5.0)])
                .into_iter()
                .filter(|(_, c)| *c != 0.0)
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn ising_dw_diagonal_tracks_wall_count() {
        let n = 5;
        let j = 3.0;
        let h = ising_dw(&spec(n, j)).unwrap();
        let ctx = BoundaryContext::new(Some(true), Some(false));
        for idx in 0..1usize << n {
            let m = count_domain_walls(&bits_of_index(idx, n), ctx);
            // N+1 interfaces including both virtual spins; E_M differs by a constant J.
            let e = h.diagonal_energy(idx);
            assert_abs_diff_eq!(e, energy_offset(n, m, j).unwrap() + j, epsilon = 1e-12);
        }
    }

    #[test]
    fn ising_dw_without_fields_keeps_basis_state() {
        let zero_field = domain_wall_hamiltonian(5, 3.0, [], Boundary::VirtualUp, Boundary::VirtualDown)
            .unwrap()
            .realize()
            .unwrap();
        let psi = StateVector::from_bits(&[true, false, false, false, false]).unwrap();
        let out = evolve(&psi, &zero_field, 2.3, &PropagatorConfig::exact()).unwrap();
        assert_abs_diff_eq!(crate::fidelity(&psi, &out).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn transport_terms_n3() {
        let s = ChainSpec::single(3, 7.0, 1.0).unwrap();
        let t = coupling_profile(3, 1.0).unwrap();
        assert_eq!(
            term_set(&transport_hamiltonian(&s).unwrap()),
            expected(&[
                ("X2", t.coupling(1)),
                ("X3", t.coupling(2)),
                ("Z3", 7.0),
                ("Z1Z2", 7.0),
                ("Z2Z3", 7.0)
            ])
        );
    }

    #[test]
    fn reset_terms_n3() {
        let s = ChainSpec::single(3, 7.0, 1.0).unwrap();
        let t = coupling_profile(3, 1.0).unwrap();
        assert_eq!(
            term_set(&reset_hamiltonian(&s).unwrap()),
            expected(&[
                ("X1", t.coupling(1)),
                ("X2", t.coupling(2)),
                ("Z1", 7.0),
                ("Z1Z2", 7.0),
                ("Z2Z3", 7.0)
            ])
        );
    }

    #[test]
    fn reset_is_site_reflection_of_transport() {
        for n in 2..=6 {
            let s = spec(n, 4.0);
            let a = transport_hamiltonian(&s).unwrap().realize().unwrap();
            let b = reset_hamiltonian(&s).unwrap().realize().unwrap();
            let reflect = |i: usize| -> usize {
                (0..n).fold(0, |acc, k| acc | (((i >> k) & 1) << (n - 1 - k)))
            };
            for i in 0..1usize << n {
                for j in 0..1usize << n {
                    assert_eq!(a.get(i, j), b.get(reflect(i), reflect(j)));
                }
            }
        }
    }

    #[test]
    fn multiqubit_reset_profile() {
        let layout = RegisterLayout::new(2, 3, 2).unwrap();
        let s = ChainSpec::with_layout(layout, 22.0, 1.0).unwrap();
        let h = multiqubit_reset_hamiltonian(&s).unwrap();
        let p = coupling_profile(6, 1.0).unwrap();
        let xs: BTreeMap<usize, f64> = h
            .terms()
            .iter()
            .filter(|t| t.factors.values().all(|p| *p == Pauli::X))
            .map(|t| (*t.factors.keys().next().unwrap(), t.coeff))
            .collect();
        assert_eq!(xs.keys().copied().collect::<Vec<_>>(), vec![1, 2, 3, 4, 5]);
        for (site, c) in xs {
            assert_eq!(c, p.coupling(site));
        }
        // Degenerate layout: a one-spin Bob register reproduces the single-qubit reset.
        let s = spec(7, 9.0);
        assert_eq!(
            term_set(&multiqubit_reset_hamiltonian(&s).unwrap()),
            term_set(&reset_hamiltonian(&s).unwrap())
        );
    }

    #[test]
    fn hermitian_and_conserving() {
        for n in 2..=8 {
            let s = spec(n, 12.0);
            for h in [
                heisenberg_xy(n, 1.0).unwrap(),
                ising_dw(&s).unwrap(),
                transport_hamiltonian(&s).unwrap(),
                reset_hamiltonian(&s).unwrap(),
                multiqubit_reset_hamiltonian(&s).unwrap(),
            ] {
                assert!(h.realize().unwrap().hermiticity_defect() <= 1e-12);
            }
            let z = PauliSum::from_terms(n, (1..=n).map(|k| PauliTerm::z(k, 1.0)))
                .unwrap()
                .realize()
                .unwrap();
            let hg = heisenberg_xy(n, 1.0).unwrap().realize().unwrap();
            assert!(hg.commutator(&z).unwrap().max_norm() <= 1e-12);
        }
    }

    #[test]
    fn frozen_spins_stay_frozen() {
        let s = spec(5, 10.0);
        let psi = StateVector::superposition(
            5,
            [(0b10000, Complex64::new(0.6, 0.0)), (0b00000, Complex64::new(0.0, 0.8))],
        )
        .unwrap();
        let tr = transport_hamiltonian(&s).unwrap().realize().unwrap();
        let rs = reset_hamiltonian(&s).unwrap().realize().unwrap();
        let z1 = sigma_z_profile(&psi)[0];
        let z5 = sigma_z_profile(&psi)[4];
        for t in [0.3, 1.1, 2.9] {
            let a = evolve(&psi, &tr, t, &PropagatorConfig::exact()).unwrap();
            assert_abs_diff_eq!(sigma_z_profile(&a)[0], z1, epsilon = 1e-10);
            let b = evolve(&psi, &rs, t, &PropagatorConfig::exact()).unwrap();
            assert_abs_diff_eq!(sigma_z_profile(&b)[4], z5, epsilon = 1e-10);
        }
    }

    #[test]
    fn energy_offset_examples() {
        assert_abs_diff_eq!(energy_offset(13, 1, 0.5).unwrap(), 5.5, epsilon = 1e-15);
        assert_eq!(energy_offset(12, 6, 0.9).unwrap(), 0.0);
        assert_abs_diff_eq!(
            energy_offset(13, 0, 0.5).unwrap() - energy_offset(13, 1, 0.5).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert!(energy_offset(3, 4, 1.0).is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(ChainSpec::single(1, 10.0, 1.0).is_err());
        assert!(ChainSpec::single(5, 0.5, 1.0).is_err());
        assert!(ChainSpec::single(5, 10.0, -1.0).is_err());
        assert!(ChainSpec::single(5, 4.0, 1.0).unwrap().warnings().len() == 1);
        assert!(ChainSpec::single(5, 22.0, 1.0).unwrap().warnings().is_empty());
        let mut s = spec(5, 10.0);
        s.reset_profile_length = Some(4);
        assert!(s.validate().is_err());
    }
}
