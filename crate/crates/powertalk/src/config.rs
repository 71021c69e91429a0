//! Experiment configuration: a plain `key = value` file with dotted keys.
//!
//! Lines starting with `#` and blank lines are ignored. Every key has a
//! default that depends on the experiment; unknown keys are rejected.

use std::fmt::Write as _;
use std::path::Path;

use powertalk_core::{BrdMode, Estimator, ExchangeMode};

use crate::error::AppError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    /// Nine cells on a 3×3 grid, path loss from the layout.
    Grid,
    /// Two pairs with direct means 1 and cross means set by the SIR.
    Sir,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantizerKind {
    Meq,
    Lma,
    Alma,
}

impl QuantizerKind {
    pub fn name(&self) -> &'static str {
        match self {
            QuantizerKind::Meq => "meq",
            QuantizerKind::Lma => "lma",
            QuantizerKind::Alma => "alma",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PiSource {
    Identity,
    Empirical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UtilityName {
    SumRate,
    SumEe,
}

impl UtilityName {
    pub fn name(&self) -> &'static str {
        match self {
            UtilityName::SumRate => "sum_rate",
            UtilityName::SumEe => "sum_ee",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatedSolver {
    /// Team best-response dynamics on every transmitter's view.
    Brd,
    /// Joint grid search on every transmitter's view.
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub scenario_kind: ScenarioKind,
    pub k: usize,
    pub bands: usize,
    pub snr_db: f64,
    pub isd: f64,
    pub sir_db: f64,

    pub feedback_bits: u32,
    pub epsilon: f64,
    pub range_db_lo: Option<f64>,
    pub range_db_hi: Option<f64>,

    pub estimators: Vec<Estimator>,
    pub phase1_perfect: bool,

    pub quantizers: Vec<QuantizerKind>,
    pub phase2_bits: u32,
    pub levels: usize,
    pub mode: ExchangeMode,
    pub phase2_perfect: bool,
    pub alma_max_iter: usize,
    pub alma_delta: Option<f64>,
    pub pi: PiSource,
    pub pi_trials: usize,
    pub prior_mean: f64,

    pub utilities: Vec<UtilityName>,
    pub ee_c: f64,
    pub n_grid: Option<usize>,
    pub max_rounds: usize,
    pub brd_mode: BrdMode,
    pub estimated_solver: EstimatedSolver,
    pub iwfa_rounds: usize,

    pub trials: usize,
    pub seed: u64,
    pub sweep: Vec<f64>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            scenario_kind: ScenarioKind::Sir,
            k: 2,
            bands: 1,
            snr_db: 30.0,
            isd: 20.0,
            sir_db: 0.0,
            feedback_bits: 8,
            epsilon: 0.01,
            range_db_lo: None,
            range_db_hi: None,
            estimators: vec![Estimator::Lspd],
            phase1_perfect: false,
            quantizers: vec![QuantizerKind::Meq],
            phase2_bits: 2,
            levels: 2,
            mode: ExchangeMode::Simultaneous,
            phase2_perfect: false,
            alma_max_iter: 500,
            alma_delta: None,
            pi: PiSource::Identity,
            pi_trials: 2000,
            prior_mean: 1.0,
            utilities: vec![UtilityName::SumRate],
            ee_c: 1.0,
            n_grid: None,
            max_rounds: 50,
            brd_mode: BrdMode::PerTransmitter,
            estimated_solver: EstimatedSolver::Brd,
            iwfa_rounds: 200,
            trials: 2000,
            seed: 1,
            sweep: Vec::new(),
        }
    }
}

/// Every recognized key, in documentation order.
pub const KEYS: &[&str] = &[
    "scenario.kind",
    "scenario.k",
    "scenario.bands",
    "scenario.snr_db",
    "scenario.isd",
    "scenario.sir_db",
    "feedback.n_bits",
    "feedback.epsilon",
    "feedback.range_db_lo",
    "feedback.range_db_hi",
    "phase1.estimator",
    "phase1.training",
    "phase1.perfect",
    "phase2.quantizer",
    "phase2.n_bits",
    "phase2.levels",
    "phase2.mode",
    "phase2.perfect",
    "phase2.alma.max_iter",
    "phase2.alma.delta",
    "phase2.pi",
    "phase2.pi_trials",
    "phase2.prior_mean",
    "phase3.utility",
    "phase3.ee_c",
    "phase3.n_grid",
    "phase3.max_rounds",
    "phase3.brd_mode",
    "phase3.estimated_solver",
    "phase3.iwfa_rounds",
    "experiment.trials",
    "experiment.seed",
    "experiment.sweep",
];

fn bad(key: &str, value: &str, expected: &str) -> AppError {
    AppError::Config(format!("{key}: cannot use '{value}', expected {expected}"))
}

fn parse<T: std::str::FromStr>(key: &str, value: &str, expected: &str) -> Result<T, AppError> {
    value.parse().map_err(|_| bad(key, value, expected))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, AppError> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(bad(key, value, "true or false")),
    }
}

fn parse_list<T>(key: &str, value: &str, mut item: impl FnMut(&str) -> Option<T>, expected: &str) -> Result<Vec<T>, AppError> {
    let out: Option<Vec<T>> = value.split(',').map(|s| item(s.trim())).collect();
    match out {
        Some(v) if !v.is_empty() => Ok(v),
        _ => Err(bad(key, value, expected)),
    }
}

impl Config {
    /// Set one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), AppError> {
        let v = value.trim();
        match key {
            "scenario.kind" => {
                self.scenario_kind = match v {
                    "grid" => ScenarioKind::Grid,
                    "sir" => ScenarioKind::Sir,
                    _ => return Err(bad(key, v, "grid or sir")),
                }
            }
            "scenario.k" => self.k = parse(key, v, "a positive integer")?,
            "scenario.bands" => self.bands = parse(key, v, "a positive integer")?,
            "scenario.snr_db" => self.snr_db = parse(key, v, "a number")?,
            "scenario.isd" => self.isd = parse(key, v, "a number")?,
            "scenario.sir_db" => self.sir_db = parse(key, v, "a number")?,
            "feedback.n_bits" => self.feedback_bits = parse(key, v, "a positive integer")?,
            "feedback.epsilon" => self.epsilon = parse(key, v, "a probability")?,
            "feedback.range_db_lo" => self.range_db_lo = Some(parse(key, v, "a number")?),
            "feedback.range_db_hi" => self.range_db_hi = Some(parse(key, v, "a number")?),
            "phase1.estimator" => {
                self.estimators = parse_list(
                    key,
                    v,
                    |s| match s {
                        "lspd" => Some(Estimator::Lspd),
                        "mmsepd" => Some(Estimator::Mmsepd),
                        _ => None,
                    },
                    "a list of lspd, mmsepd",
                )?
            }
            "phase1.training" => {
                if v != "diagonal" {
                    return Err(bad(key, v, "diagonal"));
                }
            }
            "phase1.perfect" => self.phase1_perfect = parse_bool(key, v)?,
            "phase2.quantizer" => {
                self.quantizers = parse_list(
                    key,
                    v,
                    |s| match s {
                        "meq" => Some(QuantizerKind::Meq),
                        "lma" => Some(QuantizerKind::Lma),
                        "alma" => Some(QuantizerKind::Alma),
                        _ => None,
                    },
                    "a list of meq, lma, alma",
                )?
            }
            "phase2.n_bits" => self.phase2_bits = parse(key, v, "an integer")?,
            "phase2.levels" => self.levels = parse(key, v, "a power of two")?,
            "phase2.mode" => {
                self.mode = match v {
                    "simultaneous" => ExchangeMode::Simultaneous,
                    "solo" => ExchangeMode::Solo,
                    _ => return Err(bad(key, v, "simultaneous or solo")),
                }
            }
            "phase2.perfect" => self.phase2_perfect = parse_bool(key, v)?,
            "phase2.alma.max_iter" => self.alma_max_iter = parse(key, v, "a positive integer")?,
            "phase2.alma.delta" => self.alma_delta = Some(parse(key, v, "a positive number")?),
            "phase2.pi" => {
                self.pi = match v {
                    "identity" => PiSource::Identity,
                    "empirical" => PiSource::Empirical,
                    _ => return Err(bad(key, v, "identity or empirical")),
                }
            }
            "phase2.pi_trials" => self.pi_trials = parse(key, v, "a positive integer")?,
            "phase2.prior_mean" => self.prior_mean = parse(key, v, "a positive number")?,
            "phase3.utility" => {
                self.utilities = parse_list(
                    key,
                    v,
                    |s| match s {
                        "sum_rate" => Some(UtilityName::SumRate),
                        "sum_ee" => Some(UtilityName::SumEe),
                        _ => None,
                    },
                    "a list of sum_rate, sum_ee",
                )?
            }
            "phase3.ee_c" => self.ee_c = parse(key, v, "a positive number")?,
            "phase3.n_grid" => self.n_grid = Some(parse(key, v, "an integer of at least 2")?),
            "phase3.max_rounds" => self.max_rounds = parse(key, v, "a positive integer")?,
            "phase3.brd_mode" => {
                self.brd_mode = match v {
                    "per_transmitter" => BrdMode::PerTransmitter,
                    "centralized" => BrdMode::Centralized,
                    _ => return Err(bad(key, v, "per_transmitter or centralized")),
                }
            }
            "phase3.estimated_solver" => {
                self.estimated_solver = match v {
                    "brd" => EstimatedSolver::Brd,
                    "exhaustive" => EstimatedSolver::Exhaustive,
                    _ => return Err(bad(key, v, "brd or exhaustive")),
                }
            }
            "phase3.iwfa_rounds" => self.iwfa_rounds = parse(key, v, "a positive integer")?,
            "experiment.trials" => self.trials = parse(key, v, "a positive integer")?,
            "experiment.seed" => self.seed = parse(key, v, "an unsigned integer")?,
            "experiment.sweep" => self.sweep = parse_list(key, v, |s| s.parse().ok(), "a list of numbers")?,
            _ => return Err(AppError::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Apply every `key = value` line of `text` on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<(), AppError> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| AppError::Config(format!("line {}: expected 'key = value'", n + 1)))?;
            self.set(key.trim(), value).map_err(|e| match e {
                AppError::Config(msg) => AppError::Config(format!("line {}: {msg}", n + 1)),
                other => other,
            })?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), AppError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| AppError::Config(format!("cannot read config file {}: {e}", path.display())))?;
        self.apply_text(&text)
    }

    /// Consistency checks that do not depend on the experiment.
    pub fn validate(&self) -> Result<(), AppError> {
        let fail = |msg: &str| Err(AppError::Config(msg.to_string()));
        if self.trials < 1 {
            return fail("experiment.trials must be at least 1");
        }
        if self.k < 1 || self.bands < 1 {
            return fail("scenario.k and scenario.bands must be at least 1");
        }
        if self.scenario_kind == ScenarioKind::Sir && self.k != 2 {
            return fail("the sir scenario has exactly two pairs");
        }
        if self.scenario_kind == ScenarioKind::Grid && self.k != 9 {
            return fail("the grid scenario has exactly nine pairs");
        }
        if !(0.0..=0.5).contains(&self.epsilon) {
            return fail("feedback.epsilon must lie in [0, 0.5]");
        }
        if self.feedback_bits < 1 || self.feedback_bits > 20 {
            return fail("feedback.n_bits must lie in 1..=20");
        }
        if self.levels < 2 || !self.levels.is_power_of_two() {
            return fail("phase2.levels must be a power of two");
        }
        if self.pi_trials < 1 || self.alma_max_iter < 1 || self.max_rounds < 1 {
            return fail("iteration and trial counts must be positive");
        }
        if let Some(n) = self.n_grid {
            if n < 2 {
                return fail("phase3.n_grid must be at least 2");
            }
        }
        Ok(())
    }

    /// Grid points per band: 100 on one band, 21 per band otherwise.
    pub fn grid_points(&self) -> usize {
        self.n_grid.unwrap_or(if self.bands == 1 { 100 } else { 21 })
    }

    pub fn range_db(&self) -> (f64, f64) {
        (self.range_db_lo.unwrap_or(self.snr_db - 20.0), self.range_db_hi.unwrap_or(self.snr_db + 10.0))
    }

    /// Resolved configuration as `key = value` lines (for logs).
    pub fn describe(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "scenario: {:?} K={} S={} snr={} dB", self.scenario_kind, self.k, self.bands, self.snr_db);
        let _ = writeln!(s, "feedback: {} bits, epsilon {}", self.feedback_bits, self.epsilon);
        let _ = writeln!(s, "phase2: {} bits, L={}, {:?}", self.phase2_bits, self.levels, self.mode);
        let _ = writeln!(s, "trials {} seed {} sweep {:?}", self.trials, self.seed, self.sweep);
        s
    }
}
