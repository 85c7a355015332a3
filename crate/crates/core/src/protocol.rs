//! The two-stage domain-wall transfer and the Heisenberg baseline.
//!
//! A run evolves the physical chain stage by stage, sampling fidelities and
//! `⟨σᶻ⟩` on a uniform grid over `[0, 2τ]` (or `[0, τ]` for the baseline), then
//! rescans a window of ±5% around the readout time for the fidelity peak.
//!
//! Two fidelities are reported. The *uncorrected* one compares against the
//! phase-free target `Σ c_l |fin_l⟩`. The *corrected* one gives each logical
//! branch `l` the deterministic phase it would acquire under the ideal,
//! wall-number-conserving dynamics; that phase is state-independent, so Bob
//! can undo it with a diagonal unitary on his register. The ideal dynamics is
//! the sector-effective Hamiltonian (see [`effective_hamiltonian`]); its
//! leading order reproduces the `E_M` sector offsets together with the
//! hopping phase of the mirror transfer, and the second order adds the
//! `λ²/J` level shifts.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::encoding::{dw_decode, dw_encode_bits, phase_ledger, Anchor, LogicalState, PhaseLedger};
use crate::error::{Error, Result};
use crate::hamiltonians::{
    heisenberg_xy, multiqubit_reset_hamiltonian, reset_hamiltonian, transfer_time,
    transport_hamiltonian, ChainSpec,
};
use crate::quantum::state::{bits_of_index, index_of_bits};
use crate::quantum::{sigma_z_profile, Operator, PauliSum, Propagator, PropagatorConfig, StateVector};

/// Alice's register, the wire, and Bob's register, left to right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterLayout {
    pub n_alice: usize,
    pub n_wire: usize,
    pub n_bob: usize,
}

impl RegisterLayout {
    pub fn new(n_alice: usize, n_wire: usize, n_bob: usize) -> Result<Self> {
        let layout = Self {
            n_alice,
            n_wire,
            n_bob,
        };
        layout.validate()?;
        Ok(layout)
    }

    /// Mirror layout with registers of `k` spins.
    pub fn symmetric(k: usize, n_wire: usize) -> Result<Self> {
        Self::new(k, n_wire, k)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_alice == 0 {
            return Err(Error::invalid("n_alice", "registers need at least one spin"));
        }
        if self.n_bob != self.n_alice {
            return Err(Error::invalid(
                "n_bob",
                format!("{} must equal n_alice = {}", self.n_bob, self.n_alice),
            ));
        }
        Ok(())
    }

    pub fn total(&self) -> usize {
        self.n_alice + self.n_wire + self.n_bob
    }

    /// Sites (1-based) driven during the reset stage.
    pub fn active(&self) -> usize {
        self.n_alice + self.n_wire
    }
}

/// Order of the sector-effective Hamiltonian that defines the ideal phases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseReference {
    /// Sector offsets and mirror hopping phases only.
    Offset,
    /// Adds the second-order `λ²/J` shifts.
    SecondOrder,
}

/// Numerical settings shared by every protocol run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunSettings {
    pub propagator: PropagatorConfig,
    /// Samples per stage, endpoints included.
    pub n_time_samples: usize,
    pub apply_phase_correction: bool,
    pub phase_reference: PhaseReference,
    /// Samples in the peak-search window.
    pub peak_samples: usize,
    /// Half-width of the peak-search window, relative to the readout time.
    pub peak_window: f64,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            propagator: PropagatorConfig::default(),
            n_time_samples: 200,
            apply_phase_correction: true,
            phase_reference: PhaseReference::SecondOrder,
            peak_samples: 101,
            peak_window: 0.05,
        }
    }
}

impl RunSettings {
    pub fn validate(&self) -> Result<()> {
        self.propagator.validate()?;
        if self.n_time_samples < 2 {
            return Err(Error::invalid("n_time_samples", "need at least 2 samples per stage"));
        }
        if self.peak_samples < 2 {
            return Err(Error::invalid("peak_samples", "need at least 2 samples"));
        }
        if !(0.0..1.0).contains(&self.peak_window) {
            return Err(Error::invalid("peak_window", format!("{} not in [0, 1)", self.peak_window)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub spec: ChainSpec,
    #[serde(flatten)]
    pub settings: RunSettings,
}

impl ProtocolConfig {
    pub fn new(spec: ChainSpec) -> Self {
        Self {
            spec,
            settings: RunSettings::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        self.settings.validate()
    }
}

/// Best corrected fidelity found in the window around the readout time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub time: f64,
    pub corrected: f64,
    /// Uncorrected fidelity at the same time.
    pub uncorrected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolResult {
    pub n_spins: usize,
    pub transfer_time: f64,
    pub readout_time: f64,
    /// Uniform per-stage grids joined at the stage boundary; strictly increasing.
    pub times: Vec<f64>,
    pub corrected: Vec<f64>,
    pub uncorrected: Vec<f64>,
    /// `⟨σᶻ_site⟩`, indexed `[time][site − 1]`.
    pub sigma_z: Vec<Vec<f64>>,
    pub window_times: Vec<f64>,
    pub window_corrected: Vec<f64>,
    pub window_uncorrected: Vec<f64>,
    pub peak: Peak,
    /// Fidelity at the readout time, corrected unless correction is disabled.
    pub final_fidelity: f64,
    pub final_uncorrected: f64,
    /// Bob's register projected onto the ideal rest-of-chain state, phase
    /// corrected and decoded.
    pub final_logical: LogicalState,
    /// `|⟨logical_in|final_logical⟩|²`.
    pub logical_fidelity: f64,
    /// Weight of the projection used for `final_logical`.
    pub register_weight: f64,
    pub phases: PhaseLedger,
}

/// Fidelity traces and the indices of their corrected local maxima.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityTrace {
    pub times: Vec<f64>,
    pub corrected: Vec<f64>,
    pub uncorrected: Vec<f64>,
    pub peaks: Vec<usize>,
}

pub fn fidelity_trace(result: &ProtocolResult) -> FidelityTrace {
    FidelityTrace {
        times: result.times.clone(),
        corrected: result.corrected.clone(),
        uncorrected: result.uncorrected.clone(),
        peaks: local_maxima(&result.corrected),
    }
}

/// Interior indices whose value exceeds the left neighbour and is at least
/// the right one.
pub fn local_maxima(values: &[f64]) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] > values[i - 1] && values[i] >= values[i + 1])
        .collect()
}

/// Sector-effective Hamiltonian of `h`.
///
/// Basis states sharing a diagonal energy form a sector. The leading order
/// keeps the blocks of `h` inside each sector. The second order adds
/// `Σ_k H_ik H_kj / (D_i − D_k)` over states `k` outside the sector, which is
/// the standard degenerate-perturbation correction for a gapped diagonal.
pub fn effective_hamiltonian(h: &Operator, order: PhaseReference) -> Result<Operator> {
    let diag: Vec<f64> = h.diagonal().iter().map(|d| d.re).collect();
    let scale = diag.iter().fold(1.0f64, |m, d| m.max(d.abs()));
    let tol = 1e-9 * scale;
    let same = |a: usize, b: usize| (diag[a] - diag[b]).abs() <= tol;
    let mut triplets = Vec::new();
    for i in 0..h.dim() {
        for (j, v) in h.row(i) {
            if same(i, j) {
                triplets.push((i, j, v));
            } else if order == PhaseReference::SecondOrder {
                let gap = diag[i] - diag[j];
                for (m, w) in h.row(j) {
                    if same(i, m) {
                        triplets.push((i, m, v * w / gap));
                    }
                }
            }
        }
    }
    Operator::from_triplets(h.n_spins(), triplets)
}

/// Spins after the transport stage under ideal (wall-conserving) dynamics.
///
/// With spin 1 frozen the walls live on the `N` interfaces `(n, n+1)`,
/// `n = 1..N`, the last one against the down virtual spin, and the mirror
/// transfer reflects them, `n → N+1−n`.
pub fn ideal_after_transport(bits: &[bool]) -> Vec<bool> {
    let n = bits.len();
    let walls: Vec<bool> = (0..n)
        .map(|j| bits[j] ^ bits.get(j + 1).copied().unwrap_or(false))
        .collect();
    let mut out = vec![false; n];
    let mut right = false;
    for j in (0..n).rev() {
        out[j] = walls[n - 1 - j] ^ right;
        right = out[j];
    }
    out
}

/// Spins after the reset stage under ideal dynamics.
///
/// The walls on the `active + 1` interfaces from the down virtual spin
/// through `(active, active+1)` are reflected; spins past `active` are frozen.
pub fn ideal_after_reset(bits: &[bool], active: usize) -> Vec<bool> {
    let at = |i: usize| if i == 0 { false } else { bits[i - 1] };
    let walls: Vec<bool> = (0..=active).map(|i| at(i) ^ at(i + 1)).collect();
    let mut out = bits.to_vec();
    let mut left = false;
    for i in 1..=active {
        out[i - 1] = left ^ walls[active - (i - 1)];
        left = out[i - 1];
    }
    out
}

struct Branch {
    amplitude: Complex64,
    init: usize,
    target: usize,
}

struct Stage {
    h: Operator,
    reference: Operator,
    duration: f64,
}

struct EngineOutput {
    times: Vec<f64>,
    corrected: Vec<f64>,
    uncorrected: Vec<f64>,
    sigma_z: Vec<Vec<f64>>,
    window_times: Vec<f64>,
    window_corrected: Vec<f64>,
    window_uncorrected: Vec<f64>,
    final_state: StateVector,
    /// Unit-modulus ideal phase of each branch at the readout time.
    final_phases: Vec<Complex64>,
}

fn unit(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r > 0.0 {
        z / r
    } else {
        Complex64::new(1.0, 0.0)
    }
}

fn overlaps(branches: &[Branch], refs: Option<&[StateVector]>, psi: &StateVector) -> (f64, f64) {
    let mut unc = Complex64::new(0.0, 0.0);
    let mut cor = Complex64::new(0.0, 0.0);
    for (k, b) in branches.iter().enumerate() {
        let a = psi.amplitude(b.target);
        unc += b.amplitude.conj() * a;
        let theta = refs.map_or(Complex64::new(1.0, 0.0), |r| unit(r[k].amplitude(b.target)));
        cor += (b.amplitude * theta).conj() * a;
    }
    (
        cor.norm_sqr().clamp(0.0, 1.0),
        unc.norm_sqr().clamp(0.0, 1.0),
    )
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

fn run_engine(n: usize, stages: &[Stage], branches: &[Branch], s: &RunSettings) -> Result<EngineOutput> {
    s.validate()?;
    let correct = s.apply_phase_correction;
    let psi0 = StateVector::new(n, {
        let mut a = vec![Complex64::new(0.0, 0.0); 1 << n];
        for b in branches {
            a[b.init] += b.amplitude;
        }
        a
    })?;
    let mut psi = psi0;
    let mut refs: Vec<StateVector> = if correct {
        branches
            .iter()
            .map(|b| StateVector::basis(n, b.init))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    let readout: f64 = stages.iter().map(|st| st.duration).sum();
    let window_start = readout * (1.0 - s.peak_window);

    let mut out = EngineOutput {
        times: Vec::new(),
        corrected: Vec::new(),
        uncorrected: Vec::new(),
        sigma_z: Vec::new(),
        window_times: Vec::new(),
        window_corrected: Vec::new(),
        window_uncorrected: Vec::new(),
        final_state: psi.clone(),
        final_phases: Vec::new(),
    };
    let record = |out: &mut EngineOutput, t: f64, psi: &StateVector, refs: &[StateVector]| {
        let (c, u) = overlaps(branches, correct.then_some(refs), psi);
        out.times.push(t);
        out.corrected.push(if correct { c } else { u });
        out.uncorrected.push(u);
        out.sigma_z.push(sigma_z_profile(psi));
    };
    record(&mut out, 0.0, &psi, &refs);

    let mut t0 = 0.0;
    for (si, stage) in stages.iter().enumerate() {
        let prop = Propagator::new(&stage.h, &s.propagator)?;
        let rprop = if correct {
            Some(Propagator::new(&stage.reference, &s.propagator)?)
        } else {
            None
        };
        let last = si + 1 == stages.len();
        let grid = linspace(0.0, stage.duration, s.n_time_samples);
        let dt = grid[1] - grid[0];
        // The window opens inside the last stage; keep the state at its start.
        let mut window_seed = None;
        let local_window = window_start - t0;
        for k in 1..grid.len() {
            let prev = grid[k - 1];
            if last && window_seed.is_none() && local_window >= prev && local_window < grid[k] {
                let h = local_window - prev;
                let w = prop.propagate(&psi, h)?;
                let wr = match &rprop {
                    Some(rp) => refs.iter().map(|r| rp.propagate(r, h)).collect::<Result<Vec<_>>>()?,
                    None => Vec::new(),
                };
                window_seed = Some((w, wr));
            }
            psi = prop.propagate(&psi, dt)?;
            if let Some(rp) = &rprop {
                refs = refs.iter().map(|r| rp.propagate(r, dt)).collect::<Result<_>>()?;
            }
            let t = if k + 1 == grid.len() { t0 + stage.duration } else { t0 + grid[k] };
            record(&mut out, t, &psi, &refs);
        }
        if last {
            out.final_state = psi.clone();
            out.final_phases = branches
                .iter()
                .enumerate()
                .map(|(k, b)| if correct { unit(refs[k].amplitude(b.target)) } else { Complex64::new(1.0, 0.0) })
                .collect();
            let (mut w, mut wr) = match window_seed {
                Some(seed) => seed,
                None => (psi.clone(), refs.clone()),
            };
            let wgrid = linspace(window_start, readout * (1.0 + s.peak_window), s.peak_samples);
            let wdt = wgrid[1] - wgrid[0];
            for (k, &t) in wgrid.iter().enumerate() {
                if k > 0 {
                    w = prop.propagate(&w, wdt)?;
                    if let Some(rp) = &rprop {
                        wr = wr.iter().map(|r| rp.propagate(r, wdt)).collect::<Result<_>>()?;
                    }
                }
                let (c, u) = overlaps(branches, correct.then_some(wr.as_slice()), &w);
                out.window_times.push(t);
                out.window_corrected.push(if correct { c } else { u });
                out.window_uncorrected.push(u);
            }
        }
        t0 += stage.duration;
    }
    Ok(out)
}

fn best_peak(out: &EngineOutput) -> Peak {
    let mut k = 0;
    for i in 1..out.window_corrected.len() {
        if out.window_corrected[i] > out.window_corrected[k] {
            k = i;
        }
    }
    Peak {
        time: out.window_times[k],
        corrected: out.window_corrected[k],
        uncorrected: out.window_uncorrected[k],
    }
}

/// Bob's register conditioned on the rest of the chain being all down,
/// phase corrected per logical branch and decoded.
fn read_register(
    out: &EngineOutput,
    k: usize,
    logical_in: &LogicalState,
    branches: &[Branch],
) -> Result<(LogicalState, f64, f64)> {
    let reg: Vec<Complex64> = (0..1usize << k).map(|r| out.final_state.amplitude(r)).collect();
    let weight: f64 = reg.iter().map(|a| a.norm_sqr()).sum();
    let mut reg = reg;
    for (b, theta) in branches.iter().zip(&out.final_phases) {
        // Targets have only Bob's bits set, so the low bits index his register.
        debug_assert!(b.target < 1 << k);
        reg[b.target] *= theta.conj();
    }
    let phys = StateVector::normalized(k, reg)?;
    let logical = dw_decode(&phys, false);
    let f = logical.fidelity(logical_in)?;
    Ok((logical, f, weight))
}

/// Baseline: standard encoding `α|10…0⟩ + β|0…0⟩` on the XY chain with the
/// perfect-transfer profile, read out at `τ = π/λ` on spin `N`.
pub fn run_heisenberg_baseline(
    n: usize,
    lambda: f64,
    logical_in: &LogicalState,
    settings: &RunSettings,
) -> Result<ProtocolResult> {
    if logical_in.n_logical() != 1 {
        return Err(Error::invalid("state", "the baseline transfers a single qubit"));
    }
    let h = heisenberg_xy(n, lambda)?.realize()?;
    let tau = transfer_time(lambda);
    let branches: Vec<Branch> = logical_in
        .components()
        .map(|(bits, a)| Branch {
            amplitude: a,
            init: if bits[0] { 1 << (n - 1) } else { 0 },
            target: usize::from(bits[0]),
        })
        .collect();
    let stages = [Stage {
        reference: effective_hamiltonian(&h, settings.phase_reference)?,
        h,
        duration: tau,
    }];
    let out = run_engine(n, &stages, &branches, settings)?;
    let peak = best_peak(&out);
    let (final_logical, logical_fidelity, register_weight) = {
        let reg = vec![out.final_state.amplitude(0), out.final_state.amplitude(1)];
        let weight = reg.iter().map(|a| a.norm_sqr()).sum::<f64>();
        let mut reg = reg;
        for (b, theta) in branches.iter().zip(&out.final_phases) {
            reg[b.target] *= theta.conj();
        }
        let l = LogicalState::from_terms(1, reg.into_iter().enumerate())?;
        let f = l.fidelity(logical_in)?;
        (l, f, weight)
    };
    Ok(ProtocolResult {
        n_spins: n,
        transfer_time: tau,
        readout_time: tau,
        final_fidelity: *out.corrected.last().expect("non-empty trace"),
        final_uncorrected: *out.uncorrected.last().expect("non-empty trace"),
        peak,
        final_logical,
        logical_fidelity,
        register_weight,
        phases: phase_ledger(n, 0.0, tau, 1)?,
        times: out.times,
        corrected: out.corrected,
        uncorrected: out.uncorrected,
        sigma_z: out.sigma_z,
        window_times: out.window_times,
        window_corrected: out.window_corrected,
        window_uncorrected: out.window_uncorrected,
    })
}

/// Single logical qubit `α|1⟩ + β|0⟩` stored on spin 1 and delivered to spin `N`.
pub fn run_single_qubit_transfer(alpha: Complex64, beta: Complex64, cfg: &ProtocolConfig) -> Result<ProtocolResult> {
    let logical = LogicalState::qubit(alpha, beta)?;
    let mut cfg = cfg.clone();
    cfg.spec.layout = RegisterLayout::new(1, cfg.spec.n_spins.saturating_sub(2), 1)?;
    run_transfer(&logical, &cfg, false)
}

/// Multi-qubit register transfer over `layout`.
pub fn run_multi_qubit_transfer(
    logical_in: &LogicalState,
    layout: RegisterLayout,
    cfg: &ProtocolConfig,
) -> Result<ProtocolResult> {
    layout.validate()?;
    if logical_in.n_logical() != layout.n_alice {
        return Err(Error::invalid(
            "layout",
            format!(
                "state has {} logical qubits but Alice's register has {} spins",
                logical_in.n_logical(),
                layout.n_alice
            ),
        ));
    }
    let mut cfg = cfg.clone();
    cfg.spec.layout = layout;
    cfg.spec.n_spins = layout.total();
    run_transfer(logical_in, &cfg, true)
}

fn run_transfer(logical_in: &LogicalState, cfg: &ProtocolConfig, multi: bool) -> Result<ProtocolResult> {
    cfg.validate()?;
    let spec = &cfg.spec;
    let layout = spec.layout;
    let n = spec.n_spins;
    let k = layout.n_alice;
    let tau = spec.transfer_time();

    let branches: Vec<Branch> = logical_in
        .components()
        .map(|(bits, a)| {
            let mut chain = dw_encode_bits(&bits, Anchor::WIRE);
            chain.resize(n, false);
            let mid = ideal_after_transport(&chain);
            let fin = ideal_after_reset(&mid, layout.active());
            Branch {
                amplitude: a,
                init: index_of_bits(&chain),
                target: index_of_bits(&fin),
            }
        })
        .collect();

    let stage1 = transport_hamiltonian(spec)?.realize()?;
    let stage2 = if multi {
        multiqubit_reset_hamiltonian(spec)?
    } else {
        reset_hamiltonian(spec)?
    }
    .realize()?;
    let order = cfg.settings.phase_reference;
    let stages = [
        Stage {
            reference: effective_hamiltonian(&stage1, order)?,
            h: stage1,
            duration: tau,
        },
        Stage {
            reference: effective_hamiltonian(&stage2, order)?,
            h: stage2,
            duration: tau,
        },
    ];
    let out = run_engine(n, &stages, &branches, &cfg.settings)?;
    let peak = best_peak(&out);
    let (final_logical, logical_fidelity, register_weight) = read_register(&out, k, logical_in, &branches)?;
    Ok(ProtocolResult {
        n_spins: n,
        transfer_time: tau,
        readout_time: 2.0 * tau,
        final_fidelity: *out.corrected.last().expect("non-empty trace"),
        final_uncorrected: *out.uncorrected.last().expect("non-empty trace"),
        peak,
        final_logical,
        logical_fidelity,
        register_weight,
        phases: phase_ledger(n, spec.coupling_j, tau, 2)?,
        times: out.times,
        corrected: out.corrected,
        uncorrected: out.uncorrected,
        sigma_z: out.sigma_z,
        window_times: out.window_times,
        window_corrected: out.window_corrected,
        window_uncorrected: out.window_uncorrected,
    })
}

/// Hamiltonian of each stage as Pauli sums, for inspection.
pub fn stage_hamiltonians(spec: &ChainSpec, multi: bool) -> Result<[PauliSum; 2]> {
    Ok([
        transport_hamiltonian(spec)?,
        if multi {
            multiqubit_reset_hamiltonian(spec)?
        } else {
            reset_hamiltonian(spec)?
        },
    ])
}

/// Target chain configuration for a logical basis string.
pub fn ideal_final_bits(logical: &[bool], layout: RegisterLayout) -> Vec<bool> {
    let mut chain = dw_encode_bits(logical, Anchor::WIRE);
    chain.resize(layout.total(), false);
    ideal_after_reset(&ideal_after_transport(&chain), layout.active())
}

/// Logical string carried by a chain configuration, read from Bob's register.
pub fn read_bob_bits(chain: &[bool], layout: RegisterLayout) -> Vec<bool> {
    let k = layout.n_bob;
    let reg = &chain[chain.len() - k..];
    let index = index_of_bits(reg);
    let decoded = dw_decode(&StateVector::basis(k, index).expect("register index"), false);
    let at = decoded
        .amplitudes()
        .iter()
        .position(|a| a.norm() > 0.5)
        .expect("basis state decodes to a basis state");
    bits_of_index(at, k)
}
