//! Network scenario, channel statistics and the received-power equation.
//!
//! Gains are indexed `[transmitter][receiver][band]`; `g(j, i, s)` is the gain
//! of the link from transmitter `j` to receiver `i` on band `s`. Powers are
//! linear milliwatts throughout.

use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;

use crate::error::{Error, Result};
use crate::math;

/// Normalization distance of the path-loss law, in meters.
pub const GRID_D0: f64 = 5.0;

/// Base-station coordinates of the 3×3 small-cell grid, in units of `d0`.
const GRID_SBS: [(f64, f64); 9] = [
    (2.5, 2.5),
    (7.5, 2.5),
    (12.5, 2.5),
    (2.5, 7.5),
    (7.5, 7.5),
    (12.5, 7.5),
    (2.5, 12.5),
    (7.5, 12.5),
    (12.5, 12.5),
];

/// Mobile-station coordinates of the 3×3 small-cell grid, in units of `d0`.
const GRID_MS: [(f64, f64); 9] = [
    (3.8, 3.2),
    (7.9, 1.4),
    (10.2, 0.7),
    (2.3, 5.9),
    (6.6, 5.9),
    (14.1, 9.3),
    (1.8, 10.6),
    (7.1, 14.6),
    (12.5, 10.7),
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        math::hypot(self.x - other.x, self.y - other.y)
    }
}

/// Geometry of a deployment: one transmitter and one receiver per user.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub tx_positions: Vec<Point>,
    pub rx_positions: Vec<Point>,
    pub d0: f64,
    pub isd: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub k: usize,
    pub s: usize,
    pub p_max: f64,
    pub sigma2: f64,
    /// `None` for scenarios defined directly by their gain statistics.
    pub layout: Option<Layout>,
}

impl Scenario {
    /// Scenario without geometry, with `sigma2 = 1 mW` and `p_max` set from `snr_db`.
    pub fn abstract_network(k: usize, s: usize, snr_db: f64) -> Result<Self> {
        let scenario = Scenario {
            k,
            s,
            p_max: math::db_to_linear(snr_db),
            sigma2: 1.0,
            layout: None,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    /// Scenario with caller-supplied positions.
    pub fn with_layout(
        s: usize,
        snr_db: f64,
        tx_positions: Vec<Point>,
        rx_positions: Vec<Point>,
        d0: f64,
        isd: f64,
    ) -> Result<Self> {
        let scenario = Scenario {
            k: tx_positions.len(),
            s,
            p_max: math::db_to_linear(snr_db),
            sigma2: 1.0,
            layout: Some(Layout { tx_positions, rx_positions, d0, isd }),
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn snr_db(&self) -> f64 {
        math::linear_to_db(self.p_max / self.sigma2)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::invalid("K must be at least 1"));
        }
        if self.s < 1 {
            return Err(Error::invalid("S must be at least 1"));
        }
        if !(self.p_max > 0.0 && self.p_max.is_finite()) {
            return Err(Error::invalid("p_max must be positive and finite"));
        }
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return Err(Error::invalid("sigma2 must be positive and finite"));
        }
        if let Some(layout) = &self.layout {
            for (what, list) in [("tx positions", &layout.tx_positions), ("rx positions", &layout.rx_positions)] {
                if list.len() != self.k {
                    return Err(Error::DimensionMismatch { what, expected: self.k, found: list.len() });
                }
            }
            if !(layout.d0 > 0.0) {
                return Err(Error::invalid("d0 must be positive"));
            }
            if !(layout.isd > 0.0) {
                return Err(Error::invalid("inter-site distance must be positive"));
            }
        }
        Ok(())
    }
}

/// Mean gains `E[g_ji^s]` of the exponential (Rayleigh-power) fading model.
#[derive(Debug, Clone, PartialEq)]
pub struct GainStatistics {
    k: usize,
    s: usize,
    mean: Vec<f64>,
}

impl GainStatistics {
    pub fn new(k: usize, s: usize, mean: Vec<f64>) -> Result<Self> {
        if mean.len() != k * k * s {
            return Err(Error::DimensionMismatch { what: "mean gains", expected: k * k * s, found: mean.len() });
        }
        if mean.iter().any(|&m| !(m > 0.0 && m.is_finite())) {
            return Err(Error::invalid("mean gains must be positive and finite"));
        }
        Ok(GainStatistics { k, s, mean })
    }

    /// Path-loss means `(d0 / d_ji)^2`, identical on every band.
    pub fn from_layout(scenario: &Scenario) -> Result<Self> {
        let layout = scenario
            .layout
            .as_ref()
            .ok_or_else(|| Error::invalid("scenario has no layout"))?;
        let (k, s) = (scenario.k, scenario.s);
        let mut mean = vec![0.0; k * k * s];
        for j in 0..k {
            for i in 0..k {
                let d = layout.tx_positions[j].distance(&layout.rx_positions[i]);
                if !(d > 0.0) {
                    return Err(Error::invalid("transmitter and receiver positions coincide"));
                }
                let ratio = layout.d0 / d;
                for b in 0..s {
                    mean[(j * k + i) * s + b] = ratio * ratio;
                }
            }
        }
        GainStatistics::new(k, s, mean)
    }

    /// Two-user statistics with unit direct means and cross means `10^(-sir_db/10)`.
    pub fn sir_controlled(sir_db: f64, k: usize, s: usize) -> Result<Self> {
        if k != 2 {
            return Err(Error::invalid("SIR-controlled statistics are defined for K = 2"));
        }
        let cross = math::db_to_linear(-sir_db);
        let mut mean = vec![0.0; 4 * s];
        for j in 0..2 {
            for i in 0..2 {
                for b in 0..s {
                    mean[(j * 2 + i) * s + b] = if i == j { 1.0 } else { cross };
                }
            }
        }
        GainStatistics::new(2, s, mean)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn bands(&self) -> usize {
        self.s
    }

    #[inline]
    pub fn mean(&self, tx: usize, rx: usize, band: usize) -> f64 {
        self.mean[(tx * self.k + rx) * self.s + band]
    }
}

/// 3×3 small-cell grid with base-station spacing `isd` and noise power 1 mW.
pub fn build_grid_scenario(isd: f64, k: usize, s: usize, snr_db: f64) -> Result<(Scenario, GainStatistics)> {
    if !(isd > 0.0) {
        return Err(Error::invalid("inter-site distance must be positive"));
    }
    if k != 9 {
        return Err(Error::invalid("the built-in grid layout has K = 9; supply positions for other K"));
    }
    let scale = isd / GRID_D0;
    let place = |&(x, y): &(f64, f64)| Point::new(x * scale, y * scale);
    let scenario = Scenario::with_layout(
        s,
        snr_db,
        GRID_SBS.iter().map(place).collect(),
        GRID_MS.iter().map(place).collect(),
        GRID_D0,
        isd,
    )?;
    let stats = GainStatistics::from_layout(&scenario)?;
    Ok((scenario, stats))
}

/// One realization of the gain matrix on every band.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelState {
    k: usize,
    s: usize,
    g: Vec<f64>,
}

impl ChannelState {
    pub fn new(k: usize, s: usize, g: Vec<f64>) -> Result<Self> {
        if g.len() != k * k * s {
            return Err(Error::DimensionMismatch { what: "gains", expected: k * k * s, found: g.len() });
        }
        if g.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
            return Err(Error::invalid("gains must be finite and non-negative"));
        }
        Ok(ChannelState { k, s, g })
    }

    pub fn zeros(k: usize, s: usize) -> Self {
        ChannelState { k, s, g: vec![0.0; k * k * s] }
    }

    /// Single-band state from rows `g[tx][rx]`.
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let k = rows.len();
        let mut g = Vec::with_capacity(k * k);
        for row in rows {
            if row.len() != k {
                return Err(Error::DimensionMismatch { what: "gain row", expected: k, found: row.len() });
            }
            g.extend_from_slice(row);
        }
        ChannelState::new(k, 1, g)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn bands(&self) -> usize {
        self.s
    }

    #[inline]
    pub fn g(&self, tx: usize, rx: usize, band: usize) -> f64 {
        self.g[(tx * self.k + rx) * self.s + band]
    }

    #[inline]
    pub fn set(&mut self, tx: usize, rx: usize, band: usize, value: f64) {
        self.g[(tx * self.k + rx) * self.s + band] = value;
    }

    /// Gains into receiver `rx` on `band` (column `rx` of G).
    pub fn column(&self, rx: usize, band: usize) -> Vec<f64> {
        (0..self.k).map(|tx| self.g(tx, rx, band)).collect()
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.g.iter().map(|x| x * x).sum()
    }

    /// `‖self − other‖²_F` over all bands.
    pub fn distance_sq(&self, other: &ChannelState) -> f64 {
        self.g.iter().zip(&other.g).map(|(a, b)| (a - b) * (a - b)).sum()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.g
    }
}

/// Draw every gain independently from an exponential law with the configured mean.
pub fn sample_channel<R: Rng + ?Sized>(stats: &GainStatistics, rng: &mut R) -> ChannelState {
    let g = stats
        .mean
        .iter()
        .map(|&m| {
            let u: f64 = rng.gen();
            -m * math::ln(1.0 - u)
        })
        .collect();
    ChannelState { k: stats.k, s: stats.s, g }
}

/// Per-user, per-band transmit powers.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerProfile {
    k: usize,
    s: usize,
    p: Vec<f64>,
}

impl PowerProfile {
    pub fn new(k: usize, s: usize, p: Vec<f64>) -> Result<Self> {
        if p.len() != k * s {
            return Err(Error::DimensionMismatch { what: "powers", expected: k * s, found: p.len() });
        }
        if p.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
            return Err(Error::invalid("powers must be finite and non-negative"));
        }
        Ok(PowerProfile { k, s, p })
    }

    /// Single-band profile.
    pub fn single_band(p: &[f64]) -> Result<Self> {
        PowerProfile::new(p.len(), 1, p.to_vec())
    }

    pub fn zeros(k: usize, s: usize) -> Self {
        PowerProfile { k, s, p: vec![0.0; k * s] }
    }

    /// Every user splits `total` equally over the bands.
    pub fn uniform(k: usize, s: usize, total: f64) -> Self {
        PowerProfile { k, s, p: vec![total / s as f64; k * s] }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn bands(&self) -> usize {
        self.s
    }

    #[inline]
    pub fn p(&self, user: usize, band: usize) -> f64 {
        self.p[user * self.s + band]
    }

    #[inline]
    pub fn set(&mut self, user: usize, band: usize, value: f64) {
        self.p[user * self.s + band] = value;
    }

    pub fn user(&self, user: usize) -> &[f64] {
        &self.p[user * self.s..(user + 1) * self.s]
    }

    pub fn set_user(&mut self, user: usize, values: &[f64]) {
        self.p[user * self.s..(user + 1) * self.s].copy_from_slice(values);
    }

    pub fn user_total(&self, user: usize) -> f64 {
        self.user(user).iter().sum()
    }

    /// True when every user respects the total budget (relative slack 1e-9).
    pub fn is_feasible(&self, p_max: f64) -> bool {
        (0..self.k).all(|i| self.user_total(i) <= p_max * (1.0 + 1e-9))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }
}

fn check_indices(state: &ChannelState, profile: &PowerProfile, receiver: usize, band: usize) -> Result<()> {
    if profile.k != state.k || profile.s != state.s {
        return Err(Error::DimensionMismatch { what: "profile users", expected: state.k, found: profile.k });
    }
    if receiver >= state.k {
        return Err(Error::IndexOutOfRange { what: "receiver", index: receiver, len: state.k });
    }
    if band >= state.s {
        return Err(Error::IndexOutOfRange { what: "band", index: band, len: state.s });
    }
    Ok(())
}

/// Noise plus interference at `receiver` on `band`.
#[inline]
pub(crate) fn interference_plus_noise(
    state: &ChannelState,
    profile: &PowerProfile,
    receiver: usize,
    band: usize,
    sigma2: f64,
) -> f64 {
    let mut total = sigma2;
    for j in 0..state.k {
        if j != receiver {
            total += state.g(j, receiver, band) * profile.p(j, band);
        }
    }
    total
}

/// Power at `receiver` on `band`: own signal, noise and interference.
pub fn received_power(
    state: &ChannelState,
    profile: &PowerProfile,
    receiver: usize,
    band: usize,
    sigma2: f64,
) -> Result<f64> {
    check_indices(state, profile, receiver, band)?;
    Ok(state.g(receiver, receiver, band) * profile.p(receiver, band)
        + interference_plus_noise(state, profile, receiver, band, sigma2))
}

/// SINR at `receiver` on `band`; zero when the user is silent.
pub fn sinr(state: &ChannelState, profile: &PowerProfile, receiver: usize, band: usize, sigma2: f64) -> Result<f64> {
    check_indices(state, profile, receiver, band)?;
    Ok(sinr_unchecked(state, profile, receiver, band, sigma2))
}

#[inline]
pub(crate) fn sinr_unchecked(
    state: &ChannelState,
    profile: &PowerProfile,
    receiver: usize,
    band: usize,
    sigma2: f64,
) -> f64 {
    let p = profile.p(receiver, band);
    if p == 0.0 {
        return 0.0;
    }
    state.g(receiver, receiver, band) * p / interference_plus_noise(state, profile, receiver, band, sigma2)
}
