//! Error-scaling sweeps, log-log fits and closed-form checks.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::encoding::LogicalState;
use crate::error::{Error, Result};
use crate::hamiltonians::{heisenberg_xy, transfer_amplitude_closed_form, transfer_time, ChainSpec, QUADRATIC_REGIME_RATIO};
use crate::protocol::{run_multi_qubit_transfer, run_single_qubit_transfer, ProtocolConfig, RegisterLayout};
use crate::quantum::{Propagator, PropagatorConfig, StateVector};

/// Infidelities at or below this are treated as numerical floor.
pub const EPSILON_FLOOR: f64 = 1e-12;

/// Upper end of the ratio range the quadratic law is fitted over.
pub const FIT_MAX_RATIO: f64 = 40.0;

/// One state to sweep, with the register layout it is transferred over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepItem {
    pub label: String,
    pub state: LogicalState,
    pub layout: RegisterLayout,
}

impl SweepItem {
    pub fn named(name: &str, n_wire: usize) -> Result<Self> {
        let state = LogicalState::named(name)?;
        let layout = RegisterLayout::symmetric(state.n_logical(), n_wire)?;
        Ok(Self {
            label: name.to_string(),
            state,
            layout,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub state: String,
    pub ratio: f64,
    /// `1 − F` at the corrected-fidelity peak near `2τ`.
    pub infidelity: f64,
    pub transfer_time: f64,
    /// Whether the row entered the fit; rows below the quadratic regime or at
    /// the numerical floor are kept but flagged.
    pub in_fit: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Root-mean-square residual in `ln ε`.
    pub residual: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFit {
    pub state: String,
    pub fit: Option<LogLogFit>,
    /// Why the fit is missing, when it is.
    pub unavailable: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub fits: Vec<StateFit>,
}

impl SweepTable {
    pub fn fit_for(&self, state: &str) -> Option<&LogLogFit> {
        self.fits.iter().find(|f| f.state == state)?.fit.as_ref()
    }

    pub fn rows_for<'a>(&'a self, state: &'a str) -> impl Iterator<Item = &'a SweepRow> + 'a {
        self.rows.iter().filter(move |r| r.state == state)
    }
}

/// Least-squares line through `(ln x, ln y)`.
pub fn fit_log_log(xs: &[f64], ys: &[f64]) -> Result<LogLogFit> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            found: ys.len(),
        });
    }
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = pts.len();
    if n < 3 {
        return Err(Error::DegenerateFit { needed: 3, found: n });
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit { needed: 3, found: 1 });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Ok(LogLogFit {
        slope,
        intercept,
        r_squared,
        residual: (ss_res / nf).sqrt(),
        n_points: n,
    })
}

fn run_item(item: &SweepItem, ratio: f64, base: &ProtocolConfig) -> Result<SweepRow> {
    let lambda = base.spec.lambda;
    let mut spec = ChainSpec::with_layout(item.layout, ratio * lambda, lambda)?;
    spec.pinning = base.spec.pinning;
    spec.reset_profile_length = base.spec.reset_profile_length;
    let cfg = ProtocolConfig {
        spec,
        settings: base.settings.clone(),
    };
    let result = if item.layout.n_alice == 1 {
        let a = item.state.amplitudes();
        run_single_qubit_transfer(a[1], a[0], &cfg)?
    } else {
        run_multi_qubit_transfer(&item.state, item.layout, &cfg)?
    };
    let infidelity = (1.0 - result.peak.corrected).clamp(0.0, 1.0);
    Ok(SweepRow {
        state: item.label.clone(),
        ratio,
        infidelity,
        transfer_time: result.transfer_time,
        in_fit: (QUADRATIC_REGIME_RATIO..=FIT_MAX_RATIO).contains(&ratio) && infidelity > EPSILON_FLOOR,
    })
}

/// Runs every `(item, ratio)` pair and fits `ln ε` against `ln(J/λ)` per item.
///
/// Work is spread over `workers` threads (all cores when `None`); rows come
/// back in `(item, ratio)` input order regardless of scheduling.
pub fn error_scaling_sweep(
    items: &[SweepItem],
    ratios: &[f64],
    base: &ProtocolConfig,
    workers: Option<usize>,
) -> Result<SweepTable> {
    if ratios.is_empty() || items.is_empty() {
        return Err(Error::invalid("ratios", "sweep needs at least one state and one ratio"));
    }
    if let Some(r) = ratios.iter().find(|r| !(**r > 0.0) || !r.is_finite()) {
        return Err(Error::invalid("ratios", format!("{r} is not a positive ratio")));
    }
    // Dense eigensolvers run single-threaded so results cannot depend on the pool.
    faer::set_global_parallelism(faer::Par::Seq);
    let jobs: Vec<(usize, f64)> = (0..items.len())
        .flat_map(|i| ratios.iter().map(move |&r| (i, r)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::invalid("workers", e.to_string()))?;
    let rows: Vec<SweepRow> = pool.install(|| {
        jobs.par_iter()
            .map(|&(i, r)| run_item(&items[i], r, base))
            .collect::<Result<Vec<_>>>()
    })?;
    let fits = items
        .iter()
        .map(|item| {
            let (xs, ys): (Vec<f64>, Vec<f64>) = rows
                .iter()
                .filter(|r| r.state == item.label && r.in_fit)
                .map(|r| (r.ratio, r.infidelity))
                .unzip();
            match fit_log_log(&xs, &ys) {
                Ok(fit) => StateFit {
                    state: item.label.clone(),
                    fit: Some(fit),
                    unavailable: None,
                },
                Err(e) => StateFit {
                    state: item.label.clone(),
                    fit: None,
                    unavailable: Some(e.to_string()),
                },
            }
        })
        .collect();
    Ok(SweepTable { rows, fits })
}

/// Constant `c` in `λ = c·|J|·√ε / t`, with `t` the dimensionless time scale
/// of the rescaled evolution (1 for the unscaled protocol).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub c: f64,
    pub n_points: usize,
}

impl Calibration {
    /// Geometric mean of `1/((J/λ)·√ε)` over the fitted rows.
    pub fn from_table(table: &SweepTable) -> Result<Self> {
        let logs: Vec<f64> = table
            .rows
            .iter()
            .filter(|r| r.in_fit)
            .map(|r| -(r.ratio.ln() + 0.5 * r.infidelity.ln()))
            .collect();
        if logs.is_empty() {
            return Err(Error::NoCalibration);
        }
        Ok(Self {
            c: (logs.iter().sum::<f64>() / logs.len() as f64).exp(),
            n_points: logs.len(),
        })
    }
}

/// Largest `λ` keeping the transfer error near `epsilon_target` for coupling
/// `J`. A smaller `λ` lengthens `τ = π/λ`: the error is bought down with time.
pub fn rescaling_tradeoff(epsilon_target: f64, j: f64, t: f64, calibration: Option<&Calibration>) -> Result<f64> {
    let cal = calibration.ok_or(Error::NoCalibration)?;
    if !(epsilon_target > 0.0 && epsilon_target < 1.0) {
        return Err(Error::invalid("epsilon_target", format!("{epsilon_target} not in (0, 1)")));
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::invalid("t", format!("{t} must be positive")));
    }
    Ok(cal.c * j.abs() * epsilon_target.sqrt() / t)
}

/// Largest `|numerical − closed form|` for the end-to-end XY amplitude over
/// `ns` and `samples` times spread over `[0, 2τ]`.
pub fn closed_form_consistency(ns: &[usize], lambda: f64, samples: usize, cfg: &PropagatorConfig) -> Result<f64> {
    if samples < 1 {
        return Err(Error::invalid("samples", "need at least one sample"));
    }
    let tau = transfer_time(lambda);
    let mut worst = 0.0f64;
    for &n in ns {
        if n < 2 {
            return Err(Error::invalid("n_spins", format!("chain length {n} < 2")));
        }
        if cfg.method == crate::Method::Exact && n > 12 {
            return Err(Error::invalid("n_spins", format!("{n} exceeds the dense-route limit of 12")));
        }
        let h = heisenberg_xy(n, lambda)?.realize()?;
        let prop = Propagator::new(&h, cfg)?;
        let psi = StateVector::basis(n, 1 << (n - 1))?;
        for k in 0..samples {
            let t = if samples == 1 { tau } else { 2.0 * tau * k as f64 / (samples - 1) as f64 };
            let amp: Complex64 = prop.propagate(&psi, t)?.amplitude(1);
            worst = worst.max((amp - transfer_amplitude_closed_form(n, lambda, t)).norm());
        }
    }
    Ok(worst)
}
