//! Monte-Carlo sweeps. Every experiment draws the same channels and
//! feedback noise for every method and every sweep point (trial `n` always
//! uses the streams of `trial_seed(seed, n)`), so differences between
//! methods are not blurred by independent sampling.

use std::collections::HashMap;

use log::{debug, info, warn};
use rayon::prelude::*;

use powertalk_core::exchange::{estimate_pi_empirical, Exchange, FeedbackLink};
use powertalk_core::feedback::build_nearest_neighbor_dmc;
use powertalk_core::metrics::{relative_utility_loss, EsnrAccumulator};
use powertalk_core::model::{build_grid_scenario, sample_channel};
use powertalk_core::optimize::{brd_initial_profile, PowerGrid, UtilitySpec};
use powertalk_core::pipeline::{stack_columns, AcquiredCsi, Acquisition, Control, LocalEstimation, Method};
use powertalk_core::quantizer::{design_alma, design_lma, design_meq, LloydOptions};
use powertalk_core::rng::{splitmix64, Stream, TrialStreams};
use powertalk_core::{
    ChannelState, DistributedCsi, Error as CoreError, Estimator, ExchangeMode, ExchangeSchedule, GainStatistics,
    LinkCodebooks, PowerAlphabet, Prior, RepTransitionMatrix, RsQuantizer, Scenario, ScalarGainQuantizer,
};

use crate::config::{Config, EstimatedSolver, PiSource, QuantizerKind, ScenarioKind, UtilityName};
use crate::error::AppError;
use crate::report::Row;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Phase1Esnr,
    Phase1Loss,
    Phase2Esnr,
    Phase2Loss,
    Phase2SweepBits,
    Phase2SweepSlots,
    GlobalSumrate,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::Phase1Esnr,
        Experiment::Phase1Loss,
        Experiment::Phase2Esnr,
        Experiment::Phase2Loss,
        Experiment::Phase2SweepBits,
        Experiment::Phase2SweepSlots,
        Experiment::GlobalSumrate,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Phase1Esnr => "phase1-esnr",
            Experiment::Phase1Loss => "phase1-loss",
            Experiment::Phase2Esnr => "phase2-esnr",
            Experiment::Phase2Loss => "phase2-loss",
            Experiment::Phase2SweepBits => "phase2-sweep-bits",
            Experiment::Phase2SweepSlots => "phase2-sweep-slots",
            Experiment::GlobalSumrate => "global-sumrate",
        }
    }

    pub fn sweep_var(&self) -> &'static str {
        match self {
            Experiment::Phase1Esnr | Experiment::Phase1Loss | Experiment::Phase2Esnr | Experiment::Phase2Loss => {
                "sir_db"
            }
            Experiment::Phase2SweepBits => "n_bits",
            Experiment::Phase2SweepSlots => "t_ii",
            Experiment::GlobalSumrate => "isd",
        }
    }

    /// Configuration before any file or flag is applied.
    pub fn defaults(&self) -> Config {
        let mut c = Config::default();
        match self {
            Experiment::Phase1Esnr => {
                c.estimators = vec![Estimator::Lspd, Estimator::Mmsepd];
                c.phase2_perfect = true;
                c.sweep = vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0];
            }
            Experiment::Phase1Loss => {
                c.estimators = vec![Estimator::Lspd, Estimator::Mmsepd];
                c.feedback_bits = 2;
                c.epsilon = 0.1;
                c.phase2_perfect = true;
                c.utilities = vec![UtilityName::SumRate, UtilityName::SumEe];
                c.estimated_solver = EstimatedSolver::Exhaustive;
                c.sweep = vec![0.0, 5.0, 10.0];
            }
            Experiment::Phase2Esnr | Experiment::Phase2Loss => {
                c.phase1_perfect = true;
                c.quantizers = vec![QuantizerKind::Meq, QuantizerKind::Lma, QuantizerKind::Alma];
                c.phase2_bits = 1;
                c.pi = PiSource::Empirical;
                c.sweep = vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0];
                if *self == Experiment::Phase2Loss {
                    c.utilities = vec![UtilityName::SumRate, UtilityName::SumEe];
                    c.estimated_solver = EstimatedSolver::Exhaustive;
                }
            }
            Experiment::Phase2SweepBits | Experiment::Phase2SweepSlots => {
                c.phase1_perfect = true;
                c.quantizers = vec![QuantizerKind::Meq, QuantizerKind::Lma, QuantizerKind::Alma];
                c.pi = PiSource::Empirical;
                c.sweep = if *self == Experiment::Phase2SweepBits {
                    vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]
                } else {
                    vec![2.0, 4.0, 6.0, 8.0, 10.0, 12.0]
                };
            }
            Experiment::GlobalSumrate => {
                c.scenario_kind = ScenarioKind::Grid;
                c.k = 9;
                c.bands = 2;
                c.trials = 500;
                c.sweep = vec![10.0, 20.0, 30.0, 40.0, 50.0];
            }
        }
        c
    }

    pub fn run(&self, cfg: &Config) -> Result<Vec<Row>, AppError> {
        cfg.validate()?;
        if cfg.sweep.is_empty() {
            return Err(AppError::Config("experiment.sweep must not be empty".into()));
        }
        info!("{}: {} sweep points, {} trials each", self.name(), cfg.sweep.len(), cfg.trials);
        debug!("{}", cfg.describe());
        let mut rows = Vec::new();
        for &x in &cfg.sweep {
            let point = match self {
                Experiment::Phase1Esnr => phase1_esnr(cfg, x)?,
                Experiment::Phase1Loss => phase1_loss(cfg, x)?,
                Experiment::Phase2Esnr => phase2_esnr(cfg, x, Phase2Point::at_sir(cfg, x))?,
                Experiment::Phase2Loss => phase2_loss(cfg, x)?,
                Experiment::Phase2SweepBits => phase2_esnr(cfg, cfg.sir_db, Phase2Point::bits(cfg, x)?)?,
                Experiment::Phase2SweepSlots => phase2_esnr(cfg, cfg.sir_db, Phase2Point::slots(cfg, x)?)?,
                Experiment::GlobalSumrate => global_sumrate(cfg, x)?,
            };
            for (method, metric, value, n) in point {
                rows.push(Row {
                    sweep_var: self.sweep_var(),
                    sweep_value: x,
                    method,
                    metric,
                    value,
                    n_trials: n,
                    seed: cfg.seed,
                });
            }
        }
        Ok(rows)
    }
}

impl std::str::FromStr for Experiment {
    type Err = AppError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Experiment::ALL
            .iter()
            .copied()
            .find(|e| e.name() == s)
            .ok_or_else(|| AppError::Config(format!("unknown experiment '{s}'")))
    }
}

/// `(method, metric, value, trials used)` of one sweep point.
type PointRows = Vec<(String, String, f64, usize)>;

/// Scenario and gain statistics; `x` replaces the swept scenario parameter.
pub fn scenario(cfg: &Config, sir_db: f64, isd: f64) -> Result<(Scenario, GainStatistics), AppError> {
    Ok(match cfg.scenario_kind {
        ScenarioKind::Sir => (
            Scenario::abstract_network(2, cfg.bands, cfg.snr_db)?,
            GainStatistics::sir_controlled(sir_db, 2, cfg.bands)?,
        ),
        ScenarioKind::Grid => build_grid_scenario(isd, cfg.k, cfg.bands, cfg.snr_db)?,
    })
}

pub fn feedback(cfg: &Config) -> Result<(RsQuantizer, powertalk_core::Dmc), AppError> {
    let (lo, hi) = cfg.range_db();
    let q = RsQuantizer::uniform_db(cfg.feedback_bits, lo, hi)?;
    let dmc = build_nearest_neighbor_dmc(q.size(), cfg.epsilon)?;
    Ok((q, dmc))
}

/// Independent stream for work done once per sweep point (label channel estimation).
fn design_streams(cfg: &Config) -> TrialStreams {
    TrialStreams::new(splitmix64(cfg.seed ^ 0x5eed_0fde_519a))
}

/// Run `f` on every trial in parallel; results come back in trial order.
/// Failed trials are logged and skipped; budget guards abort the sweep.
fn run_trials<T, F>(cfg: &Config, f: F) -> Result<Vec<T>, AppError>
where
    T: Send,
    F: Fn(&TrialStreams) -> Result<T, CoreError> + Sync,
{
    let results: Vec<Result<T, CoreError>> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|n| f(&TrialStreams::for_trial(cfg.seed, n)))
        .collect();
    let mut out = Vec::with_capacity(results.len());
    for (n, r) in results.into_iter().enumerate() {
        match r {
            Ok(v) => out.push(v),
            Err(e @ CoreError::BudgetExceeded { .. }) => return Err(e.into()),
            Err(e) => warn!("trial {n} skipped: {e}"),
        }
    }
    if out.is_empty() {
        return Err(AppError::Runtime("every trial failed".into()));
    }
    Ok(out)
}

fn estimator_name(e: Estimator) -> &'static str {
    match e {
        Estimator::Lspd => "lspd",
        Estimator::Mmsepd => "mmsepd",
    }
}

fn local_estimation(cfg: &Config, scenario: &Scenario, stats: &GainStatistics, estimator: Estimator) -> Result<LocalEstimation, AppError> {
    let (q, dmc) = feedback(cfg)?;
    Ok(LocalEstimation {
        scenario: scenario.clone(),
        stats: stats.clone(),
        q,
        dmc,
        estimator,
        perfect: cfg.phase1_perfect,
    })
}

fn utility_spec(cfg: &Config, name: UtilityName) -> Result<UtilitySpec, AppError> {
    Ok(match name {
        UtilityName::SumRate => UtilitySpec::sum_rate(),
        UtilityName::SumEe => UtilitySpec::sum_ee(cfg.ee_c)?,
    })
}

fn control(cfg: &Config, scenario: &Scenario, utility: UtilitySpec) -> Result<Control, AppError> {
    Ok(Control {
        utility,
        grid: PowerGrid::new(cfg.grid_points(), scenario.p_max, cfg.bands)?,
        sigma2: scenario.sigma2,
        brd_mode: cfg.brd_mode,
        max_rounds: cfg.max_rounds,
        iwfa_rounds: cfg.iwfa_rounds,
    })
}

fn estimated_method(cfg: &Config) -> Method {
    match cfg.estimated_solver {
        EstimatedSolver::Brd => Method::BrdEstimated,
        EstimatedSolver::Exhaustive => Method::OracleEstimated,
    }
}

/// Every transmitter holds the stacked local estimates (exchange without loss).
fn lossless_exchange(state: &ChannelState, local: Vec<Vec<Vec<f64>>>) -> AcquiredCsi {
    let view = stack_columns(&local);
    AcquiredCsi { csi: DistributedCsi::new(vec![view; state.k()]).expect("square views"), local, symbol_errors: 0, symbols_sent: 0 }
}

fn phase1_esnr(cfg: &Config, sir_db: f64) -> Result<PointRows, AppError> {
    let (scenario, stats) = scenario(cfg, sir_db, cfg.isd)?;
    let mut rows = Vec::new();
    for &e in &cfg.estimators {
        let est = local_estimation(cfg, &scenario, &stats, e)?;
        let energies = run_trials(cfg, |streams| {
            let state = sample_channel(&stats, &mut streams.stream(Stream::Channel));
            let local = est.run(&state, streams)?;
            let g_hat = stack_columns(&local);
            Ok((state.frobenius_sq(), state.distance_sq(&g_hat)))
        })?;
        let mut acc = EsnrAccumulator::new(scenario.k);
        for (signal, error) in &energies {
            acc.add_energies(*signal, &vec![*error; scenario.k]);
        }
        rows.push((estimator_name(e).to_string(), "esnr_db".to_string(), acc.all(), acc.trials()));
    }
    Ok(rows)
}

fn phase1_loss(cfg: &Config, sir_db: f64) -> Result<PointRows, AppError> {
    let (scenario, stats) = scenario(cfg, sir_db, cfg.isd)?;
    let controls: Vec<(UtilityName, Control)> = cfg
        .utilities
        .iter()
        .map(|&u| Ok((u, control(cfg, &scenario, utility_spec(cfg, u)?)?)))
        .collect::<Result<_, AppError>>()?;
    let estimations: Vec<(Estimator, LocalEstimation)> = cfg
        .estimators
        .iter()
        .map(|&e| Ok((e, local_estimation(cfg, &scenario, &stats, e)?)))
        .collect::<Result<_, AppError>>()?;
    let method = estimated_method(cfg);
    // per trial: [utility][estimator] -> (u*, ũ)
    let pairs = run_trials(cfg, |streams| {
        let state = sample_channel(&stats, &mut streams.stream(Stream::Channel));
        let acquired: Vec<AcquiredCsi> = estimations
            .iter()
            .map(|(_, est)| Ok(lossless_exchange(&state, est.run(&state, streams)?)))
            .collect::<Result<_, CoreError>>()?;
        controls
            .iter()
            .map(|(_, ctl)| {
                let best = ctl.utility_on(&ctl.solve(Method::Oracle, &state, None)?, &state);
                acquired
                    .iter()
                    .map(|a| Ok((best, ctl.utility_on(&ctl.solve(method, &state, Some(a))?, &state))))
                    .collect::<Result<Vec<_>, CoreError>>()
            })
            .collect::<Result<Vec<_>, CoreError>>()
    })?;
    let mut rows = Vec::new();
    for (ui, (u, _)) in controls.iter().enumerate() {
        for (ei, (e, _)) in estimations.iter().enumerate() {
            let list: Vec<(f64, f64)> = pairs.iter().map(|p| p[ui][ei]).collect();
            let loss = relative_utility_loss(&list);
            rows.push((estimator_name(*e).to_string(), format!("delta_u_{}", u.name()), loss.percent, loss.used));
        }
    }
    Ok(rows)
}

/// Exchange format of one Phase II sweep point.
#[derive(Debug, Clone, Copy)]
pub struct Phase2Point {
    pub n_bits: u32,
    pub levels: usize,
}

impl Phase2Point {
    fn at_sir(cfg: &Config, _sir: f64) -> Self {
        Phase2Point { n_bits: cfg.phase2_bits, levels: cfg.levels }
    }

    /// `n` bits per label sent on `2^n` levels, so each transmitter needs `K` symbols.
    fn bits(_cfg: &Config, x: f64) -> Result<Self, AppError> {
        let n = x as u32;
        if x != n as f64 || !(1..=12).contains(&n) {
            return Err(AppError::Config(format!("bit sweep value {x} is not an integer in 1..=12")));
        }
        Ok(Phase2Point { n_bits: n, levels: 1 << n })
    }

    /// `t` binary slots shared by the `K` labels of a transmitter.
    fn slots(cfg: &Config, x: f64) -> Result<Self, AppError> {
        let t = x as usize;
        if x != t as f64 || t == 0 || t % cfg.k != 0 {
            return Err(AppError::Config(format!("slot sweep value {x} is not a positive multiple of K = {}", cfg.k)));
        }
        Ok(Phase2Point { n_bits: (t / cfg.k) as u32, levels: 2 })
    }
}

/// Codebook of one link designed on an exponential prior of mean `mean`.
pub fn design_codebook(
    cfg: &Config,
    kind: QuantizerKind,
    n_bits: u32,
    mean: f64,
    pi: &RepTransitionMatrix,
) -> Result<ScalarGainQuantizer, CoreError> {
    let prior = Prior::exponential(mean)?;
    let opts = LloydOptions { max_iter: cfg.alma_max_iter, delta: cfg.alma_delta.map(|d| d * mean), init_bounds: None };
    match kind {
        QuantizerKind::Meq => design_meq(&prior, n_bits),
        QuantizerKind::Lma => Ok(design_lma(&prior, n_bits, &opts)?.quantizer),
        QuantizerKind::Alma => {
            let report = design_alma(&prior, n_bits, pi, &opts)?;
            if report.guard_hits > 0 {
                debug!("alma (mean {mean}): {} guarded bound updates", report.guard_hits);
            }
            Ok(report.quantizer)
        }
    }
}

/// Per-link codebooks; links with equal means share one design.
pub fn link_codebooks(
    cfg: &Config,
    stats: &GainStatistics,
    kind: QuantizerKind,
    n_bits: u32,
    pi: &RepTransitionMatrix,
) -> Result<LinkCodebooks, AppError> {
    let mut cache: HashMap<u64, ScalarGainQuantizer> = HashMap::new();
    Ok(LinkCodebooks::from_statistics(stats, |mean| {
        if let Some(q) = cache.get(&mean.to_bits()) {
            return Ok(q.clone());
        }
        let q = design_codebook(cfg, kind, n_bits, mean, pi)?;
        cache.insert(mean.to_bits(), q.clone());
        Ok(q)
    })?)
}

/// Exchange of one quantizer kind, with the label channel estimated when the
/// design needs it.
pub fn build_exchange(
    cfg: &Config,
    scenario: &Scenario,
    stats: &GainStatistics,
    kind: QuantizerKind,
    point: Phase2Point,
) -> Result<Exchange, AppError> {
    let k = scenario.k;
    let schedule = ExchangeSchedule::new(cfg.mode, k, point.n_bits, point.levels)?;
    let alphabet = PowerAlphabet::uniform(point.levels, scenario.p_max)?.for_bands(scenario.s, scenario.p_max)?;
    let r = 1usize << point.n_bits;
    let pi = if kind == QuantizerKind::Alma && cfg.pi == PiSource::Empirical && !cfg.phase2_perfect {
        // the label channel does not depend on the codebook, any one will do
        let meq = link_codebooks(cfg, stats, QuantizerKind::Meq, point.n_bits, &RepTransitionMatrix::identity(r))?;
        let probe = Exchange::new(alphabet.clone(), schedule.clone(), meq)?;
        let (q, dmc) = feedback(cfg)?;
        let fb = FeedbackLink { q: &q, dmc: &dmc, sigma2: scenario.sigma2 };
        let mut rng = design_streams(cfg).stream(Stream::Estimator);
        let single_band = GainStatistics::new(k, 1, (0..k * k).map(|l| stats.mean(l / k, l % k, 0)).collect())?;
        estimate_pi_empirical(&probe, &single_band, &fb, cfg.pi_trials, &mut rng)?
    } else {
        RepTransitionMatrix::identity(r)
    };
    let codebooks = link_codebooks(cfg, stats, kind, point.n_bits, &pi)?;
    Ok(Exchange::new(alphabet, schedule, codebooks)?)
}

fn acquisitions(
    cfg: &Config,
    scenario: &Scenario,
    stats: &GainStatistics,
    point: Phase2Point,
) -> Result<Vec<(QuantizerKind, Acquisition)>, AppError> {
    let estimator = cfg.estimators[0];
    cfg.quantizers
        .iter()
        .map(|&kind| {
            Ok((
                kind,
                Acquisition {
                    local: local_estimation(cfg, scenario, stats, estimator)?,
                    exchange: build_exchange(cfg, scenario, stats, kind, point)?,
                    phase2_perfect: cfg.phase2_perfect,
                },
            ))
        })
        .collect()
}

fn phase2_esnr(cfg: &Config, sir_db: f64, point: Phase2Point) -> Result<PointRows, AppError> {
    let (scenario, stats) = scenario(cfg, sir_db, cfg.isd)?;
    let mut rows = Vec::new();
    for (kind, acq) in acquisitions(cfg, &scenario, &stats, point)? {
        let energies = run_trials(cfg, |streams| {
            let state = sample_channel(&stats, &mut streams.stream(Stream::Channel));
            let out = acq.run(&state, streams)?;
            let errors: Vec<f64> = out.csi.views().iter().map(|v| state.distance_sq(v)).collect();
            Ok((state.frobenius_sq(), errors, out.symbol_errors, out.symbols_sent))
        })?;
        let mut acc = EsnrAccumulator::new(scenario.k);
        let (mut wrong, mut sent) = (0usize, 0usize);
        for (signal, errors, w, s) in &energies {
            acc.add_energies(*signal, errors);
            wrong += w;
            sent += s;
        }
        let n = acc.trials();
        rows.push((kind.name().to_string(), "esnr_db".to_string(), acc.all(), n));
        if sent > 0 {
            rows.push((kind.name().to_string(), "symbol_error_rate".to_string(), wrong as f64 / sent as f64, n));
        }
    }
    Ok(rows)
}

fn phase2_loss(cfg: &Config, sir_db: f64) -> Result<PointRows, AppError> {
    let (scenario, stats) = scenario(cfg, sir_db, cfg.isd)?;
    let controls: Vec<(UtilityName, Control)> = cfg
        .utilities
        .iter()
        .map(|&u| Ok((u, control(cfg, &scenario, utility_spec(cfg, u)?)?)))
        .collect::<Result<_, AppError>>()?;
    let acqs = acquisitions(cfg, &scenario, &stats, Phase2Point::at_sir(cfg, sir_db))?;
    let method = estimated_method(cfg);
    let pairs = run_trials(cfg, |streams| {
        let state = sample_channel(&stats, &mut streams.stream(Stream::Channel));
        let acquired: Vec<AcquiredCsi> =
            acqs.iter().map(|(_, a)| a.run(&state, streams)).collect::<Result<_, CoreError>>()?;
        controls
            .iter()
            .map(|(_, ctl)| {
                let best = ctl.utility_on(&ctl.solve(Method::Oracle, &state, None)?, &state);
                acquired
                    .iter()
                    .map(|a| Ok((best, ctl.utility_on(&ctl.solve(method, &state, Some(a))?, &state))))
                    .collect::<Result<Vec<_>, CoreError>>()
            })
            .collect::<Result<Vec<_>, CoreError>>()
    })?;
    let mut rows = Vec::new();
    for (ui, (u, _)) in controls.iter().enumerate() {
        for (qi, (kind, _)) in acqs.iter().enumerate() {
            let list: Vec<(f64, f64)> = pairs.iter().map(|p| p[ui][qi]).collect();
            let loss = relative_utility_loss(&list);
            rows.push((kind.name().to_string(), format!("delta_u_{}", u.name()), loss.percent, loss.used));
        }
    }
    Ok(rows)
}

fn global_sumrate(cfg: &Config, isd: f64) -> Result<PointRows, AppError> {
    let (scenario, stats) = scenario(cfg, cfg.sir_db, isd)?;
    let ctl = control(cfg, &scenario, UtilitySpec::sum_rate())?;
    let acq = Acquisition {
        local: local_estimation(cfg, &scenario, &stats, cfg.estimators[0])?,
        exchange: build_exchange(cfg, &scenario, &stats, cfg.quantizers[0], Phase2Point::at_sir(cfg, cfg.sir_db))?,
        phase2_perfect: cfg.phase2_perfect,
    };
    let methods = [Method::Iwfa, Method::BrdEstimated, Method::BrdPerfect];
    let utilities = run_trials(cfg, |streams| {
        let state = sample_channel(&stats, &mut streams.stream(Stream::Channel));
        let acquired = acq.run(&state, streams)?;
        methods
            .iter()
            .map(|&m| Ok(ctl.utility_on(&ctl.solve(m, &state, Some(&acquired))?, &state)))
            .collect::<Result<Vec<f64>, CoreError>>()
    })?;
    let n = utilities.len();
    Ok(methods
        .iter()
        .enumerate()
        .map(|(mi, m)| {
            let mean = utilities.iter().map(|u| u[mi]).sum::<f64>() / n as f64;
            (m.name().to_string(), "sum_rate".to_string(), mean, n)
        })
        .collect())
}

/// Codebook requested by `design-quantizer`.
pub fn design_quantizer(cfg: &Config) -> Result<ScalarGainQuantizer, AppError> {
    cfg.validate()?;
    let kind = cfg.quantizers[0];
    let r = 1usize << cfg.phase2_bits;
    let pi = if kind == QuantizerKind::Alma && cfg.pi == PiSource::Empirical {
        let (scenario, stats) = scenario(cfg, cfg.sir_db, cfg.isd)?;
        let point = Phase2Point { n_bits: cfg.phase2_bits, levels: cfg.levels };
        let meq = link_codebooks(cfg, &stats, QuantizerKind::Meq, point.n_bits, &RepTransitionMatrix::identity(r))?;
        let schedule = ExchangeSchedule::new(ExchangeMode::Simultaneous, scenario.k, point.n_bits, point.levels)?;
        let alphabet = PowerAlphabet::uniform(point.levels, scenario.p_max)?;
        let probe = Exchange::new(alphabet, schedule, meq)?;
        let (q, dmc) = feedback(cfg)?;
        let fb = FeedbackLink { q: &q, dmc: &dmc, sigma2: scenario.sigma2 };
        estimate_pi_empirical(&probe, &stats, &fb, cfg.pi_trials, &mut design_streams(cfg).stream(Stream::Estimator))?
    } else {
        RepTransitionMatrix::identity(r)
    };
    Ok(design_codebook(cfg, kind, cfg.phase2_bits, cfg.prior_mean, &pi)?)
}

/// Starting profile used by the dynamics, exposed for diagnostics.
pub fn initial_profile(cfg: &Config, scenario: &Scenario) -> Result<powertalk_core::PowerProfile, AppError> {
    let grid = PowerGrid::new(cfg.grid_points(), scenario.p_max, cfg.bands)?;
    Ok(brd_initial_profile(scenario.k, &grid))
}
