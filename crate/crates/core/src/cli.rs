//! Manifest-driven experiment runner behind the `dwqst` binary.
//!
//! Every run is described by a flat JSON [`RunManifest`]. The manifest is
//! resolved (defaults made explicit), written next to the outputs as
//! `manifest.json`, and embedded as a `# manifest {...}` first line in every
//! CSV, so any data file is reproducible on its own.
//!
//! Output files, by experiment:
//!
//! | experiment | files |
//! |---|---|
//! | `baseline`, `single`, `multi` | `fidelity_trace.csv` (`t,fidelity,uncorrected`), `peak_window.csv` (same columns), `sigma_z.csv` (`t,site,value`), `phases.json`, `summary.json` |
//! | `sweep` | `sweep.csv` (`state,ratio,infidelity,transfer_time,in_fit`), `fit.json` |
//! | `consistency` | `consistency.json` |
//!
//! Floats in CSVs are printed with 17 significant digits. Exit codes: 0 on
//! success, 1 for invalid input or I/O failure, 2 when `--assert-slope` fails.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::{closed_form_consistency, error_scaling_sweep, Calibration, SweepItem, SweepTable};
use crate::encoding::LogicalState;
use crate::error::{Error, Result};
use crate::hamiltonians::{ChainSpec, Pinning};
use crate::protocol::{
    run_heisenberg_baseline, run_multi_qubit_transfer, run_single_qubit_transfer, ProtocolConfig,
    ProtocolResult, RegisterLayout, RunSettings,
};
use crate::quantum::PropagatorConfig;

/// Slope band accepted by `--assert-slope`.
pub const SLOPE_BAND: (f64, f64) = (-2.3, -1.7);
/// Minimum `R²` accepted by `--assert-slope`.
pub const MIN_R_SQUARED: f64 = 0.95;
/// Deviation bound reported by the consistency experiment.
pub const CONSISTENCY_TOLERANCE: f64 = 1e-8;

pub const DEFAULT_SWEEP_RATIOS: [f64; 6] = [8.0, 12.0, 16.0, 24.0, 32.0, 40.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Baseline,
    Single,
    Multi,
    Sweep,
    Consistency,
}

/// Flat experiment description. Fields not used by an experiment stay
/// `null`; [`RunManifest::resolve`] fills every default the run depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub experiment: Experiment,
    /// Label for the frequency unit shared by `coupling_j` and `lambda`,
    /// recorded verbatim; times are in the matching inverse unit.
    #[serde(default = "default_unit")]
    pub unit: String,
    #[serde(default)]
    pub n_spins: Option<usize>,
    #[serde(default)]
    pub coupling_j: Option<f64>,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub layout: Option<RegisterLayout>,
    /// Named logical state (see [`LogicalState::named`]).
    #[serde(default)]
    pub state: Option<String>,
    /// Explicit logical amplitudes as `[re, im]` pairs; overrides `state`.
    #[serde(default)]
    pub amplitudes: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub states: Option<Vec<String>>,
    #[serde(default)]
    pub n_wire: Option<usize>,
    #[serde(default)]
    pub ratios: Option<Vec<f64>>,
    #[serde(default)]
    pub n_range: Option<Vec<usize>>,
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub pinning: Option<Pinning>,
    #[serde(default)]
    pub reset_profile_length: Option<usize>,
    #[serde(default)]
    pub settings: Option<RunSettings>,
    /// Default output directory when `--out` is not given.
    #[serde(default)]
    pub output_dir: Option<String>,
}

fn default_unit() -> String {
    "rad/unit time".to_string()
}

fn need<T: Clone>(v: &Option<T>, field: &'static str) -> Result<T> {
    v.clone()
        .ok_or_else(|| Error::invalid(field, "required for this experiment"))
}

impl RunManifest {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            unit: default_unit(),
            n_spins: None,
            coupling_j: None,
            lambda: None,
            layout: None,
            state: None,
            amplitudes: None,
            states: None,
            n_wire: None,
            ratios: None,
            n_range: None,
            samples: None,
            pinning: None,
            reset_profile_length: None,
            settings: None,
            output_dir: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Manifest(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    /// Makes every default the experiment depends on explicit and validates
    /// the result.
    pub fn resolve(&self) -> Result<RunManifest> {
        let mut m = self.clone();
        m.lambda.get_or_insert(1.0);
        m.settings.get_or_insert_with(RunSettings::default);
        match m.experiment {
            Experiment::Baseline => {
                need(&m.n_spins, "n_spins")?;
                if m.amplitudes.is_none() {
                    m.state.get_or_insert_with(|| "1".into());
                }
            }
            Experiment::Single => {
                need(&m.n_spins, "n_spins")?;
                need(&m.coupling_j, "coupling_j")?;
                if m.amplitudes.is_none() {
                    m.state.get_or_insert_with(|| "1".into());
                }
                m.pinning.get_or_insert(Pinning::FieldOff);
            }
            Experiment::Multi => {
                let layout = need(&m.layout, "layout")?;
                need(&m.coupling_j, "coupling_j")?;
                if m.amplitudes.is_none() {
                    need(&m.state, "state")?;
                }
                m.n_spins = Some(layout.total());
                m.pinning.get_or_insert(Pinning::FieldOff);
            }
            Experiment::Sweep => {
                m.states.get_or_insert_with(|| vec!["1".into()]);
                m.n_wire.get_or_insert(3);
                m.ratios.get_or_insert_with(|| DEFAULT_SWEEP_RATIOS.to_vec());
                m.pinning.get_or_insert(Pinning::FieldOff);
            }
            Experiment::Consistency => {
                m.n_range.get_or_insert_with(|| (2..=10).collect());
                m.samples.get_or_insert(20);
            }
        }
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        let lambda = need(&self.lambda, "lambda")?;
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::invalid("lambda", format!("{lambda} must be positive")));
        }
        self.settings.as_ref().map_or(Ok(()), RunSettings::validate)?;
        match self.experiment {
            Experiment::Baseline => {
                let s = self.logical_state()?;
                if s.n_logical() != 1 {
                    return Err(Error::invalid("state", "the baseline transfers one qubit"));
                }
                if need(&self.n_spins, "n_spins")? < 2 {
                    return Err(Error::invalid("n_spins", "chain length must be at least 2"));
                }
            }
            Experiment::Single => {
                if self.logical_state()?.n_logical() != 1 {
                    return Err(Error::invalid("state", "single mode transfers one qubit"));
                }
                self.chain_spec()?;
            }
            Experiment::Multi => {
                let layout = need(&self.layout, "layout")?;
                if self.logical_state()?.n_logical() != layout.n_alice {
                    return Err(Error::invalid("state", "size does not match layout.n_alice"));
                }
                self.chain_spec()?;
            }
            Experiment::Sweep => {
                self.sweep_items()?;
                let ratios = need(&self.ratios, "ratios")?;
                if ratios.is_empty() {
                    return Err(Error::invalid("ratios", "empty ratio list"));
                }
                if let Some(r) = ratios.iter().find(|r| !(**r >= 1.0) || !r.is_finite()) {
                    return Err(Error::invalid("ratios", format!("{r} must be a finite ratio ≥ 1")));
                }
            }
            Experiment::Consistency => {
                let ns = need(&self.n_range, "n_range")?;
                if ns.is_empty() || ns.iter().any(|&n| !(2..=12).contains(&n)) {
                    return Err(Error::invalid("n_range", "chain lengths must lie in 2..=12"));
                }
                if need(&self.samples, "samples")? == 0 {
                    return Err(Error::invalid("samples", "need at least one sample"));
                }
            }
        }
        Ok(())
    }

    pub fn logical_state(&self) -> Result<LogicalState> {
        if let Some(amps) = &self.amplitudes {
            let k = amps.len().trailing_zeros() as usize;
            if amps.len() < 2 || !amps.len().is_power_of_two() {
                return Err(Error::invalid("amplitudes", "length must be a power of two ≥ 2"));
            }
            let v = amps.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
            return LogicalState::new(k, v).map_err(|e| Error::invalid("amplitudes", e.to_string()));
        }
        LogicalState::named(&need(&self.state, "state")?)
    }

    fn settings(&self) -> RunSettings {
        self.settings.clone().unwrap_or_default()
    }

    fn chain_spec(&self) -> Result<ChainSpec> {
        let lambda = need(&self.lambda, "lambda")?;
        let j = need(&self.coupling_j, "coupling_j")?;
        let mut spec = match self.experiment {
            Experiment::Multi => ChainSpec::with_layout(need(&self.layout, "layout")?, j, lambda)?,
            _ => ChainSpec::single(need(&self.n_spins, "n_spins")?, j, lambda)?,
        };
        spec.pinning = self.pinning.unwrap_or_default();
        spec.reset_profile_length = self.reset_profile_length;
        spec.validate()?;
        Ok(spec)
    }

    fn sweep_items(&self) -> Result<Vec<SweepItem>> {
        let wire = need(&self.n_wire, "n_wire")?;
        need(&self.states, "states")?
            .iter()
            .map(|s| SweepItem::named(s, wire))
            .collect()
    }
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
    /// Set when `--assert-slope` was requested and the check failed.
    pub assertion_failure: Option<String>,
}

/// Formats a float with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

struct Writer<'a> {
    dir: &'a Path,
    header: String,
    files: Vec<PathBuf>,
}

impl<'a> Writer<'a> {
    fn new(dir: &'a Path, manifest: &RunManifest) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.display().to_string(),
            source,
        })?;
        let compact = serde_json::to_string(manifest).expect("manifest serializes");
        Ok(Self {
            dir,
            header: format!("# manifest {compact}\n"),
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, body: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, body).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        self.files.push(path);
        Ok(())
    }

    fn csv(&mut self, name: &str, columns: &str, rows: &str) -> Result<()> {
        let body = format!("{}{columns}\n{rows}", self.header);
        self.write(name, &body)
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut body = serde_json::to_string_pretty(value).expect("output serializes");
        body.push('\n');
        self.write(name, &body)
    }
}

#[derive(Serialize)]
struct Summary<'a> {
    experiment: Experiment,
    unit: &'a str,
    n_spins: usize,
    transfer_time: f64,
    readout_time: f64,
    final_fidelity: f64,
    final_uncorrected: f64,
    peak_time: f64,
    peak_fidelity: f64,
    peak_uncorrected: f64,
    logical_fidelity: f64,
    register_weight: f64,
    final_logical: Vec<[f64; 2]>,
    warnings: &'a [String],
}

fn write_protocol(w: &mut Writer<'_>, m: &RunManifest, r: &ProtocolResult, warnings: &[String]) -> Result<()> {
    let mut rows = String::new();
    for ((t, c), u) in r.times.iter().zip(&r.corrected).zip(&r.uncorrected) {
        let _ = writeln!(rows, "{},{},{}", fmt_float(*t), fmt_float(*c), fmt_float(*u));
    }
    w.csv("fidelity_trace.csv", "t,fidelity,uncorrected", &rows)?;

    let mut rows = String::new();
    for ((t, c), u) in r.window_times.iter().zip(&r.window_corrected).zip(&r.window_uncorrected) {
        let _ = writeln!(rows, "{},{},{}", fmt_float(*t), fmt_float(*c), fmt_float(*u));
    }
    w.csv("peak_window.csv", "t,fidelity,uncorrected", &rows)?;

    let mut rows = String::new();
    for (t, profile) in r.times.iter().zip(&r.sigma_z) {
        for (site, v) in profile.iter().enumerate() {
            let _ = writeln!(rows, "{},{},{}", fmt_float(*t), site + 1, fmt_float(*v));
        }
    }
    w.csv("sigma_z.csv", "t,site,value", &rows)?;

    w.json("phases.json", &r.phases)?;
    w.json(
        "summary.json",
        &Summary {
            experiment: m.experiment,
            unit: &m.unit,
            n_spins: r.n_spins,
            transfer_time: r.transfer_time,
            readout_time: r.readout_time,
            final_fidelity: r.final_fidelity,
            final_uncorrected: r.final_uncorrected,
            peak_time: r.peak.time,
            peak_fidelity: r.peak.corrected,
            peak_uncorrected: r.peak.uncorrected,
            logical_fidelity: r.logical_fidelity,
            register_weight: r.register_weight,
            final_logical: r.final_logical.amplitudes().iter().map(|a| [a.re, a.im]).collect(),
            warnings,
        },
    )
}

#[derive(Serialize)]
struct FitSummary<'a> {
    table: &'a [crate::analysis::StateFit],
    slope_band: [f64; 2],
    min_r_squared: f64,
    calibration: Option<Calibration>,
}

fn slope_check(table: &SweepTable) -> Option<String> {
    for f in &table.fits {
        match &f.fit {
            None => {
                return Some(format!(
                    "state {}: fit unavailable ({})",
                    f.state,
                    f.unavailable.as_deref().unwrap_or("no rows")
                ))
            }
            Some(fit) => {
                if !(SLOPE_BAND.0..=SLOPE_BAND.1).contains(&fit.slope) || fit.r_squared < MIN_R_SQUARED {
                    return Some(format!(
                        "state {}: slope {:.4} (R² {:.4}) outside [{}, {}] / R² ≥ {}",
                        f.state, fit.slope, fit.r_squared, SLOPE_BAND.0, SLOPE_BAND.1, MIN_R_SQUARED
                    ));
                }
            }
        }
    }
    None
}

/// Runs a manifest and writes its outputs into `out`.
pub fn run_manifest(manifest: &RunManifest, out: &Path, workers: Option<usize>, assert_slope: bool) -> Result<Outcome> {
    let m = manifest.resolve()?;
    // Dense eigensolvers run single-threaded so outputs are bit-reproducible.
    faer::set_global_parallelism(faer::Par::Seq);
    let mut w = Writer::new(out, &m)?;
    let mut warnings = Vec::new();
    let mut assertion_failure = None;
    let settings = m.settings();
    match m.experiment {
        Experiment::Baseline => {
            let r = run_heisenberg_baseline(
                need(&m.n_spins, "n_spins")?,
                need(&m.lambda, "lambda")?,
                &m.logical_state()?,
                &settings,
            )?;
            write_protocol(&mut w, &m, &r, &warnings)?;
        }
        Experiment::Single | Experiment::Multi => {
            let spec = m.chain_spec()?;
            warnings.extend(spec.warnings());
            let state = m.logical_state()?;
            let cfg = ProtocolConfig { spec, settings };
            let r = if m.experiment == Experiment::Single {
                let a = state.amplitudes();
                run_single_qubit_transfer(a[1], a[0], &cfg)?
            } else {
                run_multi_qubit_transfer(&state, cfg.spec.layout, &cfg)?
            };
            write_protocol(&mut w, &m, &r, &warnings)?;
        }
        Experiment::Sweep => {
            let items = m.sweep_items()?;
            let ratios = need(&m.ratios, "ratios")?;
            let lambda = need(&m.lambda, "lambda")?;
            let probe = ChainSpec::with_layout(items[0].layout, lambda.max(ratios[0] * lambda), lambda)?;
            let mut base = ProtocolConfig { spec: probe, settings };
            base.spec.pinning = m.pinning.unwrap_or_default();
            base.spec.reset_profile_length = m.reset_profile_length;
            for r in &ratios {
                if *r < crate::hamiltonians::QUADRATIC_REGIME_RATIO {
                    warnings.push(format!("ratio {r} is below the quadratic regime; kept but not fitted"));
                }
            }
            let table = error_scaling_sweep(&items, &ratios, &base, workers)?;
            let mut rows = String::new();
            for r in &table.rows {
                let _ = writeln!(
                    rows,
                    "{},{},{},{},{}",
                    r.state,
                    fmt_float(r.ratio),
                    fmt_float(r.infidelity),
                    fmt_float(r.transfer_time),
                    r.in_fit
                );
            }
            w.csv("sweep.csv", "state,ratio,infidelity,transfer_time,in_fit", &rows)?;
            w.json(
                "fit.json",
                &FitSummary {
                    table: &table.fits,
                    slope_band: [SLOPE_BAND.0, SLOPE_BAND.1],
                    min_r_squared: MIN_R_SQUARED,
                    calibration: Calibration::from_table(&table).ok(),
                },
            )?;
            if assert_slope {
                assertion_failure = slope_check(&table);
            }
        }
        Experiment::Consistency => {
            let ns = need(&m.n_range, "n_range")?;
            let samples = need(&m.samples, "samples")?;
            let dev = closed_form_consistency(&ns, need(&m.lambda, "lambda")?, samples, &PropagatorConfig::exact())?;
            w.json(
                "consistency.json",
                &serde_json::json!({
                    "n_range": ns,
                    "samples": samples,
                    "max_abs_deviation": dev,
                    "tolerance": CONSISTENCY_TOLERANCE,
                    "pass": dev <= CONSISTENCY_TOLERANCE,
                }),
            )?;
        }
    }
    w.json("manifest.json", &m)?;
    Ok(Outcome {
        files: w.files,
        warnings,
        assertion_failure,
    })
}

#[derive(Debug, Parser)]
#[command(name = "dwqst", version, about = "Domain-wall quantum state transfer experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON run manifest.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory; defaults to the manifest's `output_dir`, then `out`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for sweeps (all cores by default).
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// XY-chain perfect transfer.
    Baseline {
        #[command(flatten)]
        common: Common,
        /// Chain length.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        lambda: Option<f64>,
        /// Single-qubit state name, e.g. `1` or `0`.
        #[arg(long)]
        state: Option<String>,
    },
    /// Domain-wall transfer (single or multi mode, from the manifest).
    Transfer {
        #[command(flatten)]
        common: Common,
    },
    /// Error-scaling sweep over J/λ.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Exit with status 2 unless every fitted slope lies in [−2.3, −1.7] with R² ≥ 0.95.
        #[arg(long)]
        assert_slope: bool,
    },
    /// Closed-form amplitude check for the XY chain.
    Consistency {
        #[command(flatten)]
        common: Common,
    },
}

fn out_dir(common: &Common, m: &RunManifest) -> PathBuf {
    common
        .out
        .clone()
        .or_else(|| m.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn load_or(common: &Common, fallback: Experiment) -> Result<RunManifest> {
    match &common.config {
        Some(p) => RunManifest::load(p),
        None => Ok(RunManifest::new(fallback)),
    }
}

fn dispatch(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Baseline { common, n, lambda, state } => {
            let mut m = load_or(&common, Experiment::Baseline)?;
            if m.experiment != Experiment::Baseline {
                return Err(Error::invalid("experiment", "the baseline command needs a baseline manifest"));
            }
            if n.is_some() {
                m.n_spins = n;
            }
            if lambda.is_some() {
                m.lambda = lambda;
            }
            if state.is_some() {
                m.state = state;
                m.amplitudes = None;
            }
            run_manifest(&m, &out_dir(&common, &m), common.workers, false)
        }
        Command::Transfer { common } => {
            let path = common
                .config
                .as_ref()
                .ok_or_else(|| Error::invalid("config", "transfer needs --config"))?;
            let m = RunManifest::load(path)?;
            if !matches!(m.experiment, Experiment::Single | Experiment::Multi) {
                return Err(Error::invalid("experiment", "transfer runs `single` or `multi` manifests"));
            }
            run_manifest(&m, &out_dir(&common, &m), common.workers, false)
        }
        Command::Sweep { common, assert_slope } => {
            let m = load_or(&common, Experiment::Sweep)?;
            if m.experiment != Experiment::Sweep {
                return Err(Error::invalid("experiment", "the sweep command needs a sweep manifest"));
            }
            run_manifest(&m, &out_dir(&common, &m), common.workers, assert_slope)
        }
        Command::Consistency { common } => {
            let m = load_or(&common, Experiment::Consistency)?;
            if m.experiment != Experiment::Consistency {
                return Err(Error::invalid("experiment", "the consistency command needs a consistency manifest"));
            }
            run_manifest(&m, &out_dir(&common, &m), common.workers, false)
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(outcome) => {
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            for f in &outcome.files {
                println!("{}", f.display());
            }
            match outcome.assertion_failure {
                Some(msg) => {
                    eprintln!("assertion failed: {msg}");
                    2
                }
                None => 0,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
