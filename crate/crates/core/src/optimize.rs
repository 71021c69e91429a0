//! Power control on (estimated) channels: network utilities, sequential
//! best-response dynamics on the sum utility, iterative water-filling and a
//! joint exhaustive search.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::exchange::DistributedCsi;
use crate::math;
use crate::model::{interference_plus_noise, sinr_unchecked, ChannelState, PowerProfile};

/// Largest number of joint profiles [`exhaustive_oracle`] evaluates.
pub const ORACLE_BUDGET: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UtilityKind {
    SumRate,
    SumEe,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtilitySpec {
    pub kind: UtilityKind,
    /// Constant of the efficiency function `exp(-c / SINR)`.
    pub c: f64,
}

impl UtilitySpec {
    pub fn sum_rate() -> Self {
        UtilitySpec { kind: UtilityKind::SumRate, c: 1.0 }
    }

    pub fn sum_ee(c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::invalid("efficiency constant must be positive"));
        }
        Ok(UtilitySpec { kind: UtilityKind::SumEe, c })
    }

    pub fn evaluate(&self, profile: &PowerProfile, state: &ChannelState, sigma2: f64) -> f64 {
        match self.kind {
            UtilityKind::SumRate => sum_rate(profile, state, sigma2),
            UtilityKind::SumEe => sum_ee(profile, state, sigma2, self.c),
        }
    }
}

/// `Σ_i Σ_s log2(1 + SINR_i^s)`.
pub fn sum_rate(profile: &PowerProfile, state: &ChannelState, sigma2: f64) -> f64 {
    let mut u = 0.0;
    for i in 0..state.k() {
        u += user_rate(profile, state, i, sigma2);
    }
    u
}

/// Rate of a single user summed over bands.
pub fn user_rate(profile: &PowerProfile, state: &ChannelState, user: usize, sigma2: f64) -> f64 {
    (0..state.bands()).map(|s| math::log2(1.0 + sinr_unchecked(state, profile, user, s, sigma2))).sum()
}

#[inline]
fn efficiency(sinr: f64, c: f64) -> f64 {
    if sinr > 0.0 {
        math::exp(-c / sinr)
    } else {
        0.0
    }
}

/// `Σ_i Σ_s exp(-c / SINR_i^s) / Σ_s p_i^s`; silent users contribute 0.
pub fn sum_ee(profile: &PowerProfile, state: &ChannelState, sigma2: f64, c: f64) -> f64 {
    let mut u = 0.0;
    for i in 0..state.k() {
        let total = profile.user_total(i);
        if total > 0.0 {
            let num: f64 = (0..state.bands()).map(|s| efficiency(sinr_unchecked(state, profile, i, s, sigma2), c)).sum();
            u += num / total;
        }
    }
    u
}

/// Candidate per-user power vectors: every band takes one of `n_grid`
/// equally spaced levels in `[0, p_max]` and the total stays within `p_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerGrid {
    p_max: f64,
    bands: usize,
    levels: Vec<f64>,
    /// Level indices, `bands` per candidate, in lexicographic order.
    tuples: Vec<usize>,
}

impl PowerGrid {
    pub fn new(n_grid: usize, p_max: f64, bands: usize) -> Result<Self> {
        if n_grid < 2 {
            return Err(Error::EmptyGrid);
        }
        if bands < 1 || !(p_max > 0.0) {
            return Err(Error::invalid("power grid needs at least one band and a positive budget"));
        }
        let steps = n_grid - 1;
        let levels: Vec<f64> = (0..n_grid).map(|n| p_max * n as f64 / steps as f64).collect();
        let mut tuples = Vec::new();
        let mut digits = vec![0usize; bands];
        loop {
            if digits.iter().sum::<usize>() <= steps {
                tuples.extend_from_slice(&digits);
            }
            let mut pos = bands;
            loop {
                if pos == 0 {
                    return Ok(PowerGrid { p_max, bands, levels, tuples });
                }
                pos -= 1;
                digits[pos] += 1;
                if digits[pos] < n_grid {
                    break;
                }
                digits[pos] = 0;
            }
        }
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    pub fn bands(&self) -> usize {
        self.bands
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// Number of feasible per-user candidates.
    pub fn len(&self) -> usize {
        self.tuples.len() / self.bands
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn tuple(&self, index: usize) -> &[usize] {
        &self.tuples[index * self.bands..(index + 1) * self.bands]
    }

    /// Powers of candidate `index`.
    pub fn powers(&self, index: usize) -> Vec<f64> {
        self.tuple(index).iter().map(|&l| self.levels[l]).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BrdMode {
    /// Run once on transmitter 0's view (meant for a common, perfect view).
    Centralized,
    /// Every transmitter runs the dynamics on its own view and keeps its own component.
    PerTransmitter,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BrdOutcome {
    pub profile: PowerProfile,
    pub rounds: usize,
    pub converged: bool,
    /// Utility on the optimized view after each best-response step.
    pub history: Vec<f64>,
}

/// Utility contributions on one band when user `i` plays `x` there and
/// everybody else keeps its current power. Returns (others, own) where the
/// own term is the rate, or the efficiency numerator for sum-EE.
fn band_terms(
    view: &ChannelState,
    profile: &PowerProfile,
    spec: &UtilitySpec,
    i: usize,
    band: usize,
    base: &[f64],
    x: f64,
) -> (f64, f64) {
    let k = view.k();
    let mut others = 0.0;
    for m in 0..k {
        if m == i {
            continue;
        }
        let pm = profile.p(m, band);
        if pm == 0.0 {
            continue;
        }
        let s = view.g(m, m, band) * pm / (base[m] + view.g(i, m, band) * x);
        others += match spec.kind {
            UtilityKind::SumRate => math::log2(1.0 + s),
            UtilityKind::SumEe => efficiency(s, spec.c) / profile.user_total(m),
        };
    }
    let own_sinr = if x > 0.0 { view.g(i, i, band) * x / base[i] } else { 0.0 };
    let own = match spec.kind {
        UtilityKind::SumRate => math::log2(1.0 + own_sinr),
        UtilityKind::SumEe => efficiency(own_sinr, spec.c),
    };
    (others, own)
}

fn combine(spec: &UtilitySpec, others: f64, own: f64, own_total: f64) -> f64 {
    match spec.kind {
        UtilityKind::SumRate => others + own,
        UtilityKind::SumEe => others + if own_total > 0.0 { own / own_total } else { 0.0 },
    }
}

/// Sequential best responses of all users on the common utility of `view`.
///
/// Users update round-robin; a user only moves when a grid candidate
/// strictly improves the utility. Stops after a round without moves or after
/// `max_rounds` rounds.
pub fn best_response_dynamics(
    view: &ChannelState,
    spec: &UtilitySpec,
    grid: &PowerGrid,
    sigma2: f64,
    init: &PowerProfile,
    max_rounds: usize,
) -> Result<BrdOutcome> {
    let k = view.k();
    let s_count = view.bands();
    if grid.bands() != s_count || init.k() != k || init.bands() != s_count {
        return Err(Error::DimensionMismatch { what: "bands", expected: s_count, found: grid.bands() });
    }
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let n_levels = grid.levels().len();
    let mut profile = init.clone();
    let mut history = Vec::new();
    let mut rounds = 0;
    let mut converged = false;
    // table[band][level] = (others, own)
    let mut table = vec![vec![(0.0, 0.0); n_levels]; s_count];
    let mut base = vec![vec![0.0; k]; s_count];
    while rounds < max_rounds {
        rounds += 1;
        let mut moved = false;
        for i in 0..k {
            for band in 0..s_count {
                // interference plus noise at every receiver without user i
                for m in 0..k {
                    base[band][m] = interference_plus_noise(view, &profile, m, band, sigma2)
                        - if m != i { view.g(i, m, band) * profile.p(i, band) } else { 0.0 };
                }
                for (l, &x) in grid.levels().iter().enumerate() {
                    table[band][l] = band_terms(view, &profile, spec, i, band, &base[band], x);
                }
            }
            let current = {
                let (mut o, mut w) = (0.0, 0.0);
                for band in 0..s_count {
                    let (a, b) = band_terms(view, &profile, spec, i, band, &base[band], profile.p(i, band));
                    o += a;
                    w += b;
                }
                combine(spec, o, w, profile.user_total(i))
            };
            let mut best_value = current;
            let mut best: Option<usize> = None;
            for c in 0..grid.len() {
                let t = grid.tuple(c);
                let (mut o, mut w, mut total) = (0.0, 0.0, 0.0);
                for (band, &l) in t.iter().enumerate() {
                    o += table[band][l].0;
                    w += table[band][l].1;
                    total += grid.levels()[l];
                }
                let v = combine(spec, o, w, total);
                if v > best_value + 1e-12 * best_value.abs() {
                    best_value = v;
                    best = Some(c);
                }
            }
            if let Some(c) = best {
                profile.set_user(i, &grid.powers(c));
                moved = true;
            }
            history.push(spec.evaluate(&profile, view, sigma2));
        }
        if !moved {
            converged = true;
            break;
        }
    }
    Ok(BrdOutcome { profile, rounds, converged, history })
}

/// Default starting point: every user spreads `p_max` evenly over the bands.
pub fn brd_initial_profile(k: usize, grid: &PowerGrid) -> PowerProfile {
    PowerProfile::uniform(k, grid.bands(), grid.p_max())
}

/// Team best-response dynamics on distributed CSI.
///
/// In per-transmitter mode transmitter `j` simulates the whole dynamics on
/// `G̃^j` and plays component `j` of the result; views that are identical
/// share one run.
pub fn team_brd(
    csi: &DistributedCsi,
    spec: &UtilitySpec,
    grid: &PowerGrid,
    sigma2: f64,
    mode: BrdMode,
    max_rounds: usize,
) -> Result<PowerProfile> {
    let k = csi.k();
    let init = brd_initial_profile(k, grid);
    match mode {
        BrdMode::Centralized => Ok(best_response_dynamics(csi.view(0), spec, grid, sigma2, &init, max_rounds)?.profile),
        BrdMode::PerTransmitter => {
            let mut out = PowerProfile::zeros(k, grid.bands());
            let mut cache: Vec<(usize, PowerProfile)> = Vec::new();
            for j in 0..k {
                let view = csi.view(j);
                let hit = cache.iter().find(|(v, _)| csi.view(*v) == view).map(|(_, p)| p.clone());
                let run = match hit {
                    Some(p) => p,
                    None => {
                        let p = best_response_dynamics(view, spec, grid, sigma2, &init, max_rounds)?.profile;
                        cache.push((j, p.clone()));
                        p
                    }
                };
                out.set_user(j, run.user(j));
            }
            Ok(out)
        }
    }
}

/// Water-filling of `budget` over bands with noise-to-gain levels `floor`:
/// `p_s = max(0, μ − floor_s)` with `Σ p_s = budget`, μ found by bisection.
/// Bands with an infinite floor get nothing.
pub fn water_fill(floor: &[f64], budget: f64) -> (Vec<f64>, f64) {
    let finite: Vec<f64> = floor.iter().copied().filter(|f| f.is_finite()).collect();
    if finite.is_empty() || !(budget > 0.0) {
        return (vec![0.0; floor.len()], f64::NAN);
    }
    let lowest = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let (mut lo, mut hi) = (lowest, lowest + budget);
    let fill = |mu: f64| -> f64 { floor.iter().map(|&f| (mu - f).max(0.0)).sum() };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if fill(mid) < budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mu = 0.5 * (lo + hi);
    let mut p: Vec<f64> = floor.iter().map(|&f| (mu - f).max(0.0)).collect();
    // remove the residual bisection error so the budget is met exactly
    let total: f64 = p.iter().sum();
    if total > 0.0 {
        let scale = budget / total;
        p.iter_mut().for_each(|x| *x *= scale);
    }
    (p, mu)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IwfaOutcome {
    pub profile: PowerProfile,
    pub rounds: usize,
    pub converged: bool,
}

/// Iterative water-filling.
///
/// User `i` water-fills `p_max` against the interference it actually
/// measures on `state`, using `direct[i][s]` as its own direct gain (its
/// local estimate, or the true gain). Sweeps users sequentially until no
/// entry moves by more than `tol` or `max_rounds` is reached.
pub fn iwfa(
    state: &ChannelState,
    direct: &[Vec<f64>],
    sigma2: f64,
    p_max: f64,
    max_rounds: usize,
    tol: f64,
) -> Result<IwfaOutcome> {
    let k = state.k();
    let s_count = state.bands();
    if direct.len() != k || direct.iter().any(|d| d.len() != s_count) {
        return Err(Error::DimensionMismatch { what: "direct gains", expected: k, found: direct.len() });
    }
    let mut profile = PowerProfile::uniform(k, s_count, p_max);
    let mut rounds = 0;
    let mut converged = false;
    while rounds < max_rounds {
        rounds += 1;
        let mut change = 0.0f64;
        for i in 0..k {
            let floor: Vec<f64> = (0..s_count)
                .map(|s| {
                    let g = direct[i][s];
                    if g > 0.0 {
                        interference_plus_noise(state, &profile, i, s, sigma2) / g
                    } else {
                        f64::INFINITY
                    }
                })
                .collect();
            let (p, _) = water_fill(&floor, p_max);
            for (s, &x) in p.iter().enumerate() {
                change = change.max((x - profile.p(i, s)).abs());
            }
            profile.set_user(i, &p);
        }
        if change <= tol {
            converged = true;
            break;
        }
    }
    Ok(IwfaOutcome { profile, rounds, converged })
}

/// Worst violation of the water-filling optimality conditions of every user,
/// relative to `p_max`: active bands share one water level, inactive bands
/// lie above it and the budget is spent.
pub fn iwfa_kkt_residual(
    state: &ChannelState,
    direct: &[Vec<f64>],
    profile: &PowerProfile,
    sigma2: f64,
    p_max: f64,
) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..state.k() {
        let floor: Vec<f64> = (0..state.bands())
            .map(|s| {
                let g = direct[i][s];
                if g > 0.0 {
                    interference_plus_noise(state, profile, i, s, sigma2) / g
                } else {
                    f64::INFINITY
                }
            })
            .collect();
        let active: Vec<usize> = (0..state.bands()).filter(|&s| profile.p(i, s) > 0.0).collect();
        if active.is_empty() {
            if floor.iter().any(|f| f.is_finite()) {
                worst = worst.max(1.0);
            }
            continue;
        }
        let mu = active.iter().map(|&s| profile.p(i, s) + floor[s]).sum::<f64>() / active.len() as f64;
        for s in 0..state.bands() {
            let r = if profile.p(i, s) > 0.0 { (profile.p(i, s) + floor[s] - mu).abs() } else { (mu - floor[s]).max(0.0) };
            worst = worst.max(r / p_max);
        }
        worst = worst.max((profile.user_total(i) - p_max).abs() / p_max);
    }
    worst
}

/// Joint argmax of the utility over the product grid; the first maximizer
/// in lexicographic order wins ties.
pub fn exhaustive_oracle(
    state: &ChannelState,
    spec: &UtilitySpec,
    grid: &PowerGrid,
    sigma2: f64,
) -> Result<(PowerProfile, f64)> {
    let k = state.k();
    if grid.bands() != state.bands() {
        return Err(Error::DimensionMismatch { what: "bands", expected: state.bands(), found: grid.bands() });
    }
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let n = grid.len();
    let evaluations = math::pow(n as f64, k as f64);
    if evaluations > ORACLE_BUDGET {
        return Err(Error::BudgetExceeded { what: "exhaustive search", required: evaluations, limit: ORACLE_BUDGET });
    }
    let mut digits = vec![0usize; k];
    let mut profile = PowerProfile::zeros(k, grid.bands());
    for (i, &d) in digits.iter().enumerate() {
        profile.set_user(i, &grid.powers(d));
    }
    let mut best = (profile.clone(), f64::NEG_INFINITY);
    loop {
        let u = spec.evaluate(&profile, state, sigma2);
        if u > best.1 {
            best = (profile.clone(), u);
        }
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(best);
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < n {
                profile.set_user(pos, &grid.powers(digits[pos]));
                break;
            }
            digits[pos] = 0;
            profile.set_user(pos, &grid.powers(0));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn utility_examples() {
        let one = ChannelState::from_rows(&[&[1.0]]).unwrap();
        let p = PowerProfile::single_band(&[1.0]).unwrap();
        assert!((sum_rate(&p, &one, 1.0) - 1.0).abs() < 1e-15);
        assert!((sum_ee(&p, &one, 1.0, 1.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(sum_rate(&PowerProfile::zeros(1, 1), &one, 1.0), 0.0);
        assert_eq!(sum_ee(&PowerProfile::zeros(1, 1), &one, 1.0, 1.0), 0.0);
        let sym = ChannelState::from_rows(&[&[1.0, 1.0], &[1.0, 1.0]]).unwrap();
        let p = PowerProfile::single_band(&[1.0, 1.0]).unwrap();
        assert!((sum_rate(&p, &sym, 1.0) - 2.0 * 1.5f64.log2()).abs() < 1e-14);
    }

    #[test]
    fn grid_counts() {
        assert_eq!(PowerGrid::new(100, 1000.0, 1).unwrap().len(), 100);
        assert_eq!(PowerGrid::new(21, 1000.0, 2).unwrap().len(), 231);
        let g = PowerGrid::new(3, 2.0, 2).unwrap();
        assert_eq!(g.powers(0), vec![0.0, 0.0]);
        assert!(PowerGrid::new(1, 1.0, 1).is_err());
    }

    #[test]
    fn single_user_uses_full_power() {
        let one = ChannelState::from_rows(&[&[0.3]]).unwrap();
        let grid = PowerGrid::new(100, 1000.0, 1).unwrap();
        let csi = DistributedCsi::perfect(&one);
        let p = team_brd(&csi, &UtilitySpec::sum_rate(), &grid, 1.0, BrdMode::Centralized, 50).unwrap();
        assert_eq!(p.p(0, 0), 1000.0);
        let (p, _) = exhaustive_oracle(&one, &UtilitySpec::sum_rate(), &grid, 1.0).unwrap();
        assert_eq!(p.p(0, 0), 1000.0);
    }

    #[test]
    fn water_fill_examples() {
        let (p, _) = water_fill(&[1.0, 1.0], 10.0);
        assert!((p[0] - 5.0).abs() < 1e-12 && (p[1] - 5.0).abs() < 1e-12);
        let (p, mu) = water_fill(&[1.0, 20.0], 10.0);
        assert_eq!(p[1], 0.0);
        assert!((p[0] - 10.0).abs() < 1e-12);
        assert!((mu - 11.0).abs() < 1e-9);
        let (p, _) = water_fill(&[f64::INFINITY], 10.0);
        assert_eq!(p, vec![0.0]);
    }

    #[test]
    fn iwfa_single_band_is_full_power() {
        let st = ChannelState::from_rows(&[&[1.0, 0.5], &[0.2, 2.0]]).unwrap();
        let direct = vec![vec![1.0], vec![2.0]];
        let out = iwfa(&st, &direct, 1.0, 10.0, 50, 1e-9).unwrap();
        assert!(out.converged);
        assert_eq!(out.profile.as_slice(), &[10.0, 10.0]);
    }

    #[test]
    fn oracle_budget_guard() {
        let st = ChannelState::zeros(9, 1);
        let grid = PowerGrid::new(100, 1.0, 1).unwrap();
        assert!(matches!(
            exhaustive_oracle(&st, &UtilitySpec::sum_rate(), &grid, 1.0),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
