//! Experiment orchestration: flat config files in, CSV plus manifest out.
//!
//! An experiment is one of:
//!
//! * `roc` — ROC curves for a rule list on one scenario;
//! * `pd-vs-n`, `pd-vs-m`, `pd-vs-snr` — detection probability at a fixed
//!   false-alarm rate swept over samples, sensors, or average SNR;
//! * `pd-vs-n-power` — `P_d` versus `N`, one curve per uniform transmit
//!   power (or forced bit depth);
//! * `power-alloc` — the branch-and-bound power/bit allocation report.
//!
//! Configs are flat TOML key-value files; unknown keys are rejected by
//! name and omitted keys take the documented defaults. Every run writes a
//! `manifest.toml` next to its CSVs first (marked incomplete, so aborted
//! runs are never mistaken for finished ones) and rewrites it on success.
//! The manifest body is the fully resolved config, so feeding a manifest
//! back in reproduces the run bit for bit; run facts (version, wall time,
//! outputs, allocation summary) ride along as comments.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::analytics::{pd_closed_form, roc_curve, fusion_moments, DetectionCurve};
use crate::error::{Error, Result};
use crate::export::{write_allocation_csv, write_curves_csv, write_sweep_csv, SweepRow};
use crate::fusion::{
    equal_linear_weights, equal_weights, linear_weights, optimal_weights, quantized_weights,
    FusionRule, RuleFamily,
};
use crate::mc::{empirical_roc, Sampler};
use crate::model::{
    generate_scenario, GainModel, Scenario, ScenarioParams, TxPower,
};
use crate::power::branch_and_bound;
use crate::quant::QuantizerMode;
use crate::rng::derive_seed;

/// CSV column layout version recorded in manifests.
pub const CSV_SCHEMA_VERSION: u32 = 1;

// ---------------------------------------------------------------------------
// Rule selection
// ---------------------------------------------------------------------------

/// A rule family plus its quantized flag, as named in configs
/// (`"optimal"`, `"equal-linear-quantized"`, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuleSpec {
    pub family: RuleFamily,
    pub quantized: bool,
}

impl RuleSpec {
    pub fn parse(name: &str) -> Result<Self> {
        let (stem, quantized) = match name.strip_suffix("-quantized") {
            Some(stem) => (stem, true),
            None => (name, false),
        };
        let family = match stem {
            "optimal" => RuleFamily::Optimal,
            "weighted" => RuleFamily::Weighted,
            "equal" => RuleFamily::Equal,
            "linear" => RuleFamily::Linear,
            "equal-linear" => RuleFamily::EqualLinear,
            other => {
                return Err(Error::Config(format!(
                    "unknown rule '{other}' (expected optimal, weighted, equal, linear, or equal-linear, optionally with -quantized)"
                )))
            }
        };
        Ok(Self { family, quantized })
    }

    pub fn name(&self) -> String {
        if self.quantized {
            format!("{}-quantized", self.family.name())
        } else {
            self.family.name().to_string()
        }
    }

    pub fn build(&self, scenario: &Scenario) -> FusionRule {
        if self.quantized {
            quantized_weights(self.family, scenario)
        } else {
            match self.family {
                RuleFamily::Optimal => optimal_weights(scenario),
                RuleFamily::Weighted => weighted(scenario),
                RuleFamily::Equal => equal_weights(scenario),
                RuleFamily::Linear => linear_weights(scenario),
                RuleFamily::EqualLinear => equal_linear_weights(scenario),
            }
        }
    }
}

fn weighted(scenario: &Scenario) -> FusionRule {
    crate::fusion::weighted_weights(scenario)
}

// ---------------------------------------------------------------------------
// Experiment identity
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentId {
    Roc,
    PdVsN,
    PdVsM,
    PdVsSnr,
    PdVsNPower,
    PowerAlloc,
}

impl ExperimentId {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "roc" => Ok(Self::Roc),
            "pd-vs-n" => Ok(Self::PdVsN),
            "pd-vs-m" => Ok(Self::PdVsM),
            "pd-vs-snr" => Ok(Self::PdVsSnr),
            "pd-vs-n-power" => Ok(Self::PdVsNPower),
            "power-alloc" => Ok(Self::PowerAlloc),
            other => Err(Error::Config(format!(
                "unknown experiment '{other}' (expected roc, pd-vs-n, pd-vs-m, pd-vs-snr, pd-vs-n-power, or power-alloc)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Roc => "roc",
            Self::PdVsN => "pd-vs-n",
            Self::PdVsM => "pd-vs-m",
            Self::PdVsSnr => "pd-vs-snr",
            Self::PdVsNPower => "pd-vs-n-power",
            Self::PowerAlloc => "power-alloc",
        }
    }

    fn sweep_axis(self) -> Option<&'static str> {
        match self {
            Self::PdVsN | Self::PdVsNPower => Some("n"),
            Self::PdVsM => Some("m"),
            Self::PdVsSnr => Some("snr_db"),
            _ => None,
        }
    }
}

// ---------------------------------------------------------------------------
// Raw config (serde face of the flat file)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum TxPowerValue {
    Uniform(f64),
    PerSite(Vec<f64>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default = "d_experiment")]
    experiment: String,
    #[serde(default = "d_m")]
    m: usize,
    #[serde(default = "d_n")]
    n: usize,
    #[serde(default = "d_amplitude")]
    amplitude: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    target_avg_snr_db: Option<f64>,
    #[serde(default = "d_noise_var_range")]
    noise_var_range: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    noise_var: Option<Vec<f64>>,
    #[serde(default = "d_gain_model")]
    gain_model: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    channel_gain: Option<Vec<f64>>,
    #[serde(default = "d_comm_noise_var")]
    comm_noise_var: f64,
    #[serde(default = "d_tx_power")]
    tx_power: TxPowerValue,
    #[serde(default = "d_quant_half_range")]
    quant_half_range: f64,
    #[serde(default = "d_quant_mode")]
    quant_mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    quant_center: Option<f64>,
    #[serde(default)]
    seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    rules: Vec<String>,
    #[serde(default = "d_p_fa")]
    p_fa: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    p_fa_grid: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    sweep_grid: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    power_levels: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    bit_levels: Vec<u32>,
    #[serde(default = "d_n_trials")]
    n_trials: usize,
    #[serde(default = "d_budget")]
    budget: f64,
    #[serde(default = "d_bnb_epsilon")]
    bnb_epsilon: f64,
}

fn d_experiment() -> String {
    "roc".into()
}
fn d_m() -> usize {
    10
}
fn d_n() -> usize {
    10
}
fn d_amplitude() -> f64 {
    0.1
}
fn d_noise_var_range() -> [f64; 2] {
    [0.5, 1.5]
}
fn d_gain_model() -> String {
    "rayleigh".into()
}
fn d_comm_noise_var() -> f64 {
    0.1
}
fn d_tx_power() -> TxPowerValue {
    TxPowerValue::Uniform(20.0)
}
fn d_quant_half_range() -> f64 {
    0.5
}
fn d_quant_mode() -> String {
    "additive".into()
}
fn d_p_fa() -> f64 {
    0.1
}
fn d_n_trials() -> usize {
    10_000
}
fn d_budget() -> f64 {
    20.0
}
fn d_bnb_epsilon() -> f64 {
    1e-4
}

// ---------------------------------------------------------------------------
// Resolved spec
// ---------------------------------------------------------------------------

/// A fully resolved experiment description: every default filled in,
/// every name parsed. Serializes back to the flat config format.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub id: ExperimentId,
    pub scenario: ScenarioParams,
    pub rules: Vec<RuleSpec>,
    pub p_fa: f64,
    pub p_fa_grid: Vec<f64>,
    pub sweep_grid: Vec<f64>,
    pub power_levels: Vec<f64>,
    pub bit_levels: Vec<u32>,
    pub n_trials: usize,
    pub budget: f64,
    pub bnb_epsilon: f64,
}

impl ExperimentSpec {
    /// Parse and resolve a flat TOML config string.
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        Self::resolve(raw)
    }

    /// The resolved spec as a flat TOML string (the manifest body).
    pub fn to_config_string(&self) -> String {
        let raw = self.to_raw();
        toml::to_string(&raw).expect("resolved config serializes")
    }

    fn resolve(raw: RawConfig) -> Result<Self> {
        let id = ExperimentId::parse(&raw.experiment)?;

        if !(raw.p_fa > 0.0 && raw.p_fa < 1.0) {
            return Err(Error::Config(format!(
                "p_fa must lie in (0, 1), got {}",
                raw.p_fa
            )));
        }
        if raw.m == 0 {
            return Err(Error::Config("m must be >= 1".into()));
        }
        if raw.n == 0 {
            return Err(Error::Config("n must be >= 1".into()));
        }
        if !(raw.budget > 0.0) {
            return Err(Error::Config("budget must be positive".into()));
        }
        if !(raw.bnb_epsilon > 0.0) {
            return Err(Error::Config("bnb_epsilon must be positive".into()));
        }

        let gain_model = match raw.channel_gain.clone() {
            Some(list) => GainModel::Explicit(list),
            None => match raw.gain_model.as_str() {
                "rayleigh" => GainModel::Rayleigh { mean_square: 1.0 },
                "unit" => GainModel::Constant(1.0),
                other => {
                    return Err(Error::Config(format!(
                        "unknown gain_model '{other}' (expected rayleigh or unit, or give channel_gain explicitly)"
                    )))
                }
            },
        };
        let quant_mode = match raw.quant_mode.as_str() {
            "additive" => QuantizerMode::AdditiveNoise,
            "explicit" => QuantizerMode::Explicit,
            other => {
                return Err(Error::Config(format!(
                    "unknown quant_mode '{other}' (expected additive or explicit)"
                )))
            }
        };
        let tx_power = match raw.tx_power.clone() {
            TxPowerValue::Uniform(p) => TxPower::Uniform(p),
            TxPowerValue::PerSite(v) => TxPower::PerSite(v),
        };

        // Default target SNR is the reference scenario's -8.5 dB, unless
        // the signature level is zero (where no target is achievable).
        let target_avg_snr_db = match raw.target_avg_snr_db {
            Some(db) => Some(db),
            None if raw.amplitude != 0.0 => Some(-8.5),
            None => None,
        };

        let scenario = ScenarioParams {
            num_sensors: raw.m,
            n_samples: raw.n,
            amplitude: raw.amplitude,
            target_avg_snr_db,
            noise_var_range: (raw.noise_var_range[0], raw.noise_var_range[1]),
            noise_vars: raw.noise_var.clone(),
            gain_model,
            comm_noise_var: raw.comm_noise_var,
            tx_power,
            quant_half_range: raw.quant_half_range,
            quant_mode,
            quant_center: raw.quant_center,
            seed: raw.seed,
        };

        let rules: Vec<RuleSpec> = if raw.rules.is_empty() {
            default_rules(id)
        } else {
            raw.rules
                .iter()
                .map(|s| RuleSpec::parse(s))
                .collect::<Result<Vec<_>>>()?
        };

        let p_fa_grid = if raw.p_fa_grid.is_empty() {
            (1..=50).map(|k| k as f64 / 50.0).collect()
        } else {
            crate::analytics::validate_grid(&raw.p_fa_grid)
                .map_err(|e| Error::Config(format!("p_fa_grid: {e}")))?;
            raw.p_fa_grid.clone()
        };

        let sweep_grid = if raw.sweep_grid.is_empty() {
            match id {
                ExperimentId::PdVsN | ExperimentId::PdVsNPower => {
                    vec![10.0, 25.0, 50.0, 100.0, 200.0]
                }
                ExperimentId::PdVsM => vec![5.0, 10.0, 20.0],
                ExperimentId::PdVsSnr => vec![-12.0, -10.0, -8.5, -6.5, -5.0],
                _ => Vec::new(),
            }
        } else {
            let mut g = raw.sweep_grid.clone();
            let sorted = g.windows(2).all(|w| w[0] < w[1]);
            if !sorted {
                return Err(Error::Config(
                    "sweep_grid must be strictly increasing".into(),
                ));
            }
            g.dedup();
            g
        };
        if matches!(id, ExperimentId::PdVsN | ExperimentId::PdVsM | ExperimentId::PdVsNPower) {
            for &x in &sweep_grid {
                if x < 1.0 || x.fract() != 0.0 {
                    return Err(Error::Config(format!(
                        "sweep_grid for {} needs positive integers, got {x}",
                        id.name()
                    )));
                }
            }
        }

        let power_levels = if raw.power_levels.is_empty() && raw.bit_levels.is_empty() {
            match id {
                ExperimentId::PdVsNPower => vec![0.5, 2.0, 5.0, 20.0],
                _ => Vec::new(),
            }
        } else {
            raw.power_levels.clone()
        };
        if power_levels.iter().any(|&p| p < 0.0) {
            return Err(Error::Config("power_levels must be nonnegative".into()));
        }

        Ok(Self {
            id,
            scenario,
            rules,
            p_fa: raw.p_fa,
            p_fa_grid,
            sweep_grid,
            power_levels,
            bit_levels: raw.bit_levels,
            n_trials: raw.n_trials,
            budget: raw.budget,
            bnb_epsilon: raw.bnb_epsilon,
        })
    }

    fn to_raw(&self) -> RawConfig {
        let (gain_model, channel_gain) = match &self.scenario.gain_model {
            GainModel::Rayleigh { .. } => ("rayleigh".to_string(), None),
            GainModel::Constant(_) => ("unit".to_string(), None),
            GainModel::Explicit(list) => ("rayleigh".to_string(), Some(list.clone())),
        };
        RawConfig {
            experiment: self.id.name().to_string(),
            m: self.scenario.num_sensors,
            n: self.scenario.n_samples,
            amplitude: self.scenario.amplitude,
            target_avg_snr_db: self.scenario.target_avg_snr_db,
            noise_var_range: [
                self.scenario.noise_var_range.0,
                self.scenario.noise_var_range.1,
            ],
            noise_var: self.scenario.noise_vars.clone(),
            gain_model,
            channel_gain,
            comm_noise_var: self.scenario.comm_noise_var,
            tx_power: match &self.scenario.tx_power {
                TxPower::Uniform(p) => TxPowerValue::Uniform(*p),
                TxPower::PerSite(v) => TxPowerValue::PerSite(v.clone()),
            },
            quant_half_range: self.scenario.quant_half_range,
            quant_mode: match self.scenario.quant_mode {
                QuantizerMode::AdditiveNoise => "additive".to_string(),
                QuantizerMode::Explicit => "explicit".to_string(),
            },
            quant_center: self.scenario.quant_center,
            seed: self.scenario.seed,
            rules: self.rules.iter().map(|r| r.name()).collect(),
            p_fa: self.p_fa,
            p_fa_grid: self.p_fa_grid.clone(),
            sweep_grid: self.sweep_grid.clone(),
            power_levels: self.power_levels.clone(),
            bit_levels: self.bit_levels.clone(),
            n_trials: self.n_trials,
            budget: self.budget,
            bnb_epsilon: self.bnb_epsilon,
        }
    }
}

fn default_rules(id: ExperimentId) -> Vec<RuleSpec> {
    let names: &[&str] = match id {
        // the six reference-figure curves
        ExperimentId::Roc => &[
            "optimal",
            "weighted",
            "equal",
            "linear",
            "equal-linear",
            "optimal-quantized",
        ],
        ExperimentId::PdVsNPower => &["optimal-quantized", "linear-quantized"],
        ExperimentId::PowerAlloc => &["optimal-quantized"],
        _ => &[
            "optimal-quantized",
            "weighted-quantized",
            "equal-quantized",
            "linear-quantized",
        ],
    };
    names.iter().map(|s| RuleSpec::parse(s).unwrap()).collect()
}

/// Read, parse, and resolve a config file; errors name the offending key.
pub fn validate_config(path: &Path) -> Result<ExperimentSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    ExperimentSpec::parse(&text)
}

/// Re-create the spec recorded in a run manifest (a manifest is a valid
/// config file; its run facts live in comments).
pub fn from_manifest(path: &Path) -> Result<ExperimentSpec> {
    validate_config(path)
}

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

/// Paths produced by a run.
#[derive(Debug, Clone)]
pub struct RunOutputs {
    pub manifest: PathBuf,
    pub files: Vec<PathBuf>,
    /// Allocation summary for `power-alloc` runs.
    pub summary: Vec<(String, String)>,
}

/// Execute an experiment, writing CSVs and the manifest into `out_dir`.
pub fn run_experiment(spec: &ExperimentSpec, out_dir: &Path) -> Result<RunOutputs> {
    std::fs::create_dir_all(out_dir)?;
    let manifest = out_dir.join("manifest.toml");
    write_manifest(&manifest, spec, "incomplete", &[], &[])?;
    let started = Instant::now();

    let (files, summary) = match spec.id {
        ExperimentId::Roc => (vec![run_roc(spec, out_dir)?], Vec::new()),
        ExperimentId::PdVsN | ExperimentId::PdVsM | ExperimentId::PdVsSnr => {
            (vec![run_sweep(spec, out_dir)?], Vec::new())
        }
        ExperimentId::PdVsNPower => (vec![run_level_sweep(spec, out_dir)?], Vec::new()),
        ExperimentId::PowerAlloc => run_alloc(spec, out_dir)?,
    };

    let mut facts: Vec<(String, String)> = vec![
        ("toolkit_version".into(), crate::VERSION.into()),
        (
            "csv_schema_version".into(),
            CSV_SCHEMA_VERSION.to_string(),
        ),
        (
            "wall_time_s".into(),
            format!("{:.3}", started.elapsed().as_secs_f64()),
        ),
    ];
    facts.extend(summary.iter().cloned());
    write_manifest(&manifest, spec, "complete", &files, &facts)?;
    Ok(RunOutputs {
        manifest,
        files,
        summary,
    })
}

fn scenario_for(spec: &ExperimentSpec) -> Result<Scenario> {
    generate_scenario(&spec.scenario)
}

fn rule_trial_seed(scenario_seed: u64, rule_index: usize) -> u64 {
    derive_seed(scenario_seed, 0x5eed_0000 + rule_index as u64)
}

fn run_roc(spec: &ExperimentSpec, out_dir: &Path) -> Result<PathBuf> {
    let scenario = scenario_for(spec)?;
    let mut curves: Vec<DetectionCurve> = Vec::new();
    for (idx, rule_spec) in spec.rules.iter().enumerate() {
        let rule = rule_spec.build(&scenario);
        curves.push(roc_curve(&rule, &scenario, &spec.p_fa_grid)?);
        if spec.n_trials > 0 {
            curves.push(empirical_roc(
                &scenario,
                &rule,
                spec.n_trials,
                &spec.p_fa_grid,
                rule_trial_seed(spec.scenario.seed, idx),
                Sampler::Measurement,
            )?);
        }
    }
    let path = out_dir.join("roc.csv");
    write_curves_csv(&path, &curves)?;
    Ok(path)
}

fn sweep_scenario(spec: &ExperimentSpec, x: f64) -> Result<Scenario> {
    let mut params = spec.scenario.clone();
    match spec.id {
        ExperimentId::PdVsN | ExperimentId::PdVsNPower => params.n_samples = x as usize,
        ExperimentId::PdVsM => params.num_sensors = x as usize,
        ExperimentId::PdVsSnr => params.target_avg_snr_db = Some(x),
        _ => unreachable!("not a sweep experiment"),
    }
    generate_scenario(&params)
}

fn push_point_rows(
    rows: &mut Vec<SweepRow>,
    spec: &ExperimentSpec,
    scenario: &Scenario,
    axis: &str,
    x: f64,
    level: &str,
) -> Result<()> {
    for (idx, rule_spec) in spec.rules.iter().enumerate() {
        let rule = rule_spec.build(scenario);
        let analytic = pd_closed_form(&fusion_moments(&rule, scenario)?, spec.p_fa)?;
        rows.push(SweepRow {
            axis: axis.to_string(),
            x,
            level: level.to_string(),
            rule: rule.name(),
            provenance: "analytic".into(),
            p_fa: spec.p_fa,
            p_d: analytic,
        });
        if spec.n_trials > 0 {
            let curve = empirical_roc(
                scenario,
                &rule,
                spec.n_trials,
                &[spec.p_fa],
                rule_trial_seed(spec.scenario.seed, idx),
                Sampler::Measurement,
            )?;
            rows.push(SweepRow {
                axis: axis.to_string(),
                x,
                level: level.to_string(),
                rule: rule.name(),
                provenance: "empirical".into(),
                p_fa: spec.p_fa,
                p_d: curve.points[0].p_d,
            });
        }
    }
    Ok(())
}

fn run_sweep(spec: &ExperimentSpec, out_dir: &Path) -> Result<PathBuf> {
    let axis = spec.id.sweep_axis().expect("sweep experiment");
    let mut rows = Vec::new();
    for &x in &spec.sweep_grid {
        let scenario = sweep_scenario(spec, x)?;
        push_point_rows(&mut rows, spec, &scenario, axis, x, "")?;
    }
    let path = out_dir.join("sweep.csv");
    write_sweep_csv(&path, &rows)?;
    Ok(path)
}

fn run_level_sweep(spec: &ExperimentSpec, out_dir: &Path) -> Result<PathBuf> {
    let axis = spec.id.sweep_axis().expect("sweep experiment");
    let mut rows = Vec::new();
    for &x in &spec.sweep_grid {
        let base = sweep_scenario(spec, x)?;
        for &p in &spec.power_levels {
            let scenario = base.with_tx_powers(&vec![p; base.num_sites()])?;
            push_point_rows(&mut rows, spec, &scenario, axis, x, &format!("p={p}"))?;
        }
        for &bits in &spec.bit_levels {
            let scenario = base.with_uniform_bits(bits);
            push_point_rows(&mut rows, spec, &scenario, axis, x, &format!("bits={bits}"))?;
        }
    }
    let path = out_dir.join("sweep.csv");
    write_sweep_csv(&path, &rows)?;
    Ok(path)
}

type RunSummary = Vec<(String, String)>;

fn run_alloc(spec: &ExperimentSpec, out_dir: &Path) -> Result<(Vec<PathBuf>, RunSummary)> {
    let scenario = scenario_for(spec)?;
    let alloc = branch_and_bound(&scenario, spec.budget, spec.p_fa, spec.bnb_epsilon)?;
    let path = out_dir.join("allocation.csv");
    write_allocation_csv(&path, &scenario, &alloc)?;
    let summary = vec![
        ("run_objective_beta".to_string(), format!("{}", alloc.beta)),
        ("run_p_d".to_string(), format!("{}", alloc.p_d)),
        ("run_gap".to_string(), format!("{}", alloc.gap)),
        (
            "run_nodes_explored".to_string(),
            alloc.nodes_explored.to_string(),
        ),
        ("run_converged".to_string(), alloc.converged.to_string()),
        (
            "run_total_power".to_string(),
            format!("{}", alloc.powers.iter().sum::<f64>()),
        ),
    ];
    Ok((vec![path], summary))
}

fn write_manifest(
    path: &Path,
    spec: &ExperimentSpec,
    status: &str,
    files: &[PathBuf],
    facts: &[(String, String)],
) -> Result<()> {
    let mut text = String::new();
    writeln!(text, "# run manifest (re-runnable config; run facts in comments)").unwrap();
    writeln!(text, "# status: {status}").unwrap();
    for (k, v) in facts {
        writeln!(text, "# {k}: {v}").unwrap();
    }
    for f in files {
        let name = f.file_name().unwrap_or_default().to_string_lossy();
        writeln!(text, "# output: {name}").unwrap();
    }
    text.push('\n');
    text.push_str(&spec.to_config_string());
    std::fs::write(path, text)?;
    Ok(())
}
