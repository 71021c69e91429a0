//! One Monte-Carlo trial of the full acquisition chain and the power
//! control methods compared on it.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Result;
use crate::exchange::{simulate_exchange, DistributedCsi, Exchange, FeedbackLink};
use crate::feedback::{Dmc, RsQuantizer};
use crate::model::{ChannelState, GainStatistics, PowerProfile, Scenario};
use crate::optimize::{exhaustive_oracle, iwfa, team_brd, BrdMode, PowerGrid, UtilitySpec};
use crate::phase1::{diagonal_training, lspd_estimate, mmsepd_estimate_separable, Estimator};
use crate::prior::Prior;
use crate::rng::{Stream, TrialStreams};

/// Local estimation of every column of `G` from training feedback.
#[derive(Debug, Clone)]
pub struct LocalEstimation {
    pub scenario: Scenario,
    pub stats: GainStatistics,
    pub q: RsQuantizer,
    pub dmc: Dmc,
    pub estimator: Estimator,
    /// Skip estimation: every transmitter knows its column exactly.
    pub perfect: bool,
}

impl LocalEstimation {
    /// Power of each diagonal training slot: bands train in parallel and
    /// share the budget.
    pub fn training_level(&self) -> f64 {
        self.scenario.p_max / self.scenario.s as f64
    }

    /// `local[j][band][tx]`: transmitter `j`'s clamped estimate of `g_{tx,j}`.
    pub fn run(&self, state: &ChannelState, streams: &TrialStreams) -> Result<Vec<Vec<Vec<f64>>>> {
        let k = state.k();
        let s_count = state.bands();
        if self.perfect {
            return Ok((0..k).map(|j| (0..s_count).map(|b| state.column(j, b)).collect()).collect());
        }
        let sigma2 = self.scenario.sigma2;
        let level = self.training_level();
        let train = diagonal_training(k, level, self.scenario.p_max)?;
        let mut rng = streams.stream(Stream::Phase1Feedback);
        let mut local = vec![vec![Vec::new(); s_count]; k];
        for b in 0..s_count {
            for (j, lj) in local.iter_mut().enumerate() {
                let indices: Vec<usize> = (0..k)
                    .map(|t| {
                        let omega = state.g(t, j, b) * level + sigma2;
                        self.dmc.sample(self.q.quantize_saturating(omega), &mut rng)
                    })
                    .collect();
                let est = match self.estimator {
                    Estimator::Lspd => {
                        let rssi: Vec<f64> = indices.iter().map(|&m| self.q.level_linear(m)).collect();
                        lspd_estimate(&train, &rssi, sigma2)?
                    }
                    Estimator::Mmsepd => {
                        let priors = (0..k)
                            .map(|t| Prior::exponential(self.stats.mean(t, j, b)))
                            .collect::<Result<Vec<_>>>()?;
                        mmsepd_estimate_separable(&train, &indices, &self.q, &self.dmc, &priors, sigma2)?
                    }
                };
                lj[b] = est.clamped();
            }
        }
        Ok(local)
    }
}

/// Stack local columns into the gain matrix they describe.
pub fn stack_columns(local: &[Vec<Vec<f64>>]) -> ChannelState {
    let k = local.len();
    let s_count = local.first().map_or(0, |l| l.len());
    let mut g = ChannelState::zeros(k, s_count);
    for (rx, bands) in local.iter().enumerate() {
        for (b, column) in bands.iter().enumerate() {
            for (tx, &x) in column.iter().enumerate() {
                g.set(tx, rx, b, x);
            }
        }
    }
    g
}

/// Local estimation followed by the exchange.
#[derive(Debug, Clone)]
pub struct Acquisition {
    pub local: LocalEstimation,
    pub exchange: Exchange,
    /// Labels reach every transmitter without decoding errors.
    pub phase2_perfect: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcquiredCsi {
    pub local: Vec<Vec<Vec<f64>>>,
    pub csi: DistributedCsi,
    pub symbol_errors: usize,
    pub symbols_sent: usize,
}

impl Acquisition {
    pub fn run(&self, state: &ChannelState, streams: &TrialStreams) -> Result<AcquiredCsi> {
        let local = self.local.run(state, streams)?;
        self.exchange_from(state, local, streams)
    }

    /// Exchange already estimated local columns.
    pub fn exchange_from(
        &self,
        state: &ChannelState,
        local: Vec<Vec<Vec<f64>>>,
        streams: &TrialStreams,
    ) -> Result<AcquiredCsi> {
        let fb = FeedbackLink { q: &self.local.q, dmc: &self.local.dmc, sigma2: self.local.scenario.sigma2 };
        let mut rng = streams.stream(Stream::Phase2Feedback);
        let out = simulate_exchange(state, &local, &self.exchange, &fb, self.phase2_perfect, &mut rng)?;
        Ok(AcquiredCsi { local, csi: out.csi, symbol_errors: out.symbol_errors, symbols_sent: out.symbols_sent })
    }
}

/// Power control methods compared on a trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Team BRD with every transmitter knowing `G`.
    BrdPerfect,
    /// Team BRD on the acquired distributed CSI.
    BrdEstimated,
    /// Joint exhaustive search on the acquired CSI of each transmitter, own component played.
    OracleEstimated,
    /// Iterative water-filling with Phase I direct gains.
    Iwfa,
    /// Joint exhaustive search on `G`.
    Oracle,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::BrdPerfect => "brd_perfect",
            Method::BrdEstimated => "brd_estimated",
            Method::OracleEstimated => "oracle_estimated",
            Method::Iwfa => "iwfa",
            Method::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Control {
    pub utility: UtilitySpec,
    pub grid: PowerGrid,
    pub sigma2: f64,
    pub brd_mode: BrdMode,
    pub max_rounds: usize,
    pub iwfa_rounds: usize,
}

impl Control {
    /// Power profile chosen by `method`. `acquired` is needed by every
    /// method except the perfect-CSI ones.
    pub fn solve(&self, method: Method, state: &ChannelState, acquired: Option<&AcquiredCsi>) -> Result<PowerProfile> {
        let need = || acquired.ok_or_else(|| crate::error::Error::invalid("method needs acquired CSI"));
        match method {
            Method::BrdPerfect => team_brd(
                &DistributedCsi::perfect(state),
                &self.utility,
                &self.grid,
                self.sigma2,
                BrdMode::Centralized,
                self.max_rounds,
            ),
            Method::BrdEstimated => {
                team_brd(&need()?.csi, &self.utility, &self.grid, self.sigma2, self.brd_mode, self.max_rounds)
            }
            Method::Oracle => Ok(exhaustive_oracle(state, &self.utility, &self.grid, self.sigma2)?.0),
            Method::OracleEstimated => {
                let csi = &need()?.csi;
                let k = csi.k();
                let mut out = PowerProfile::zeros(k, self.grid.bands());
                let mut cache: Vec<(usize, PowerProfile)> = Vec::new();
                for j in 0..k {
                    let view = csi.view(j);
                    let p = match cache.iter().find(|(v, _)| csi.view(*v) == view) {
                        Some((_, p)) => p.clone(),
                        None => {
                            let (p, _) = exhaustive_oracle(view, &self.utility, &self.grid, self.sigma2)?;
                            cache.push((j, p.clone()));
                            p
                        }
                    };
                    out.set_user(j, p.user(j));
                }
                Ok(out)
            }
            Method::Iwfa => {
                let local = &need()?.local;
                let direct: Vec<Vec<f64>> =
                    (0..state.k()).map(|i| local[i].iter().map(|band| band[i]).collect()).collect();
                Ok(iwfa(state, &direct, self.sigma2, self.grid.p_max(), self.iwfa_rounds, 1e-9)?.profile)
            }
        }
    }

    /// Utility of `profile` on the true channel.
    pub fn utility_on(&self, profile: &PowerProfile, state: &ChannelState) -> f64 {
        self.utility.evaluate(profile, state, self.sigma2)
    }
}
