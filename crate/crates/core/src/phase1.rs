//! Local channel estimation from RSSI observations of a power training
//! sequence.
//!
//! During `T` training slots every transmitter follows a known power
//! schedule (the rows of a [`TrainingMatrix`]). Receiver `i` feeds back one
//! RSSI level per slot, from which transmitter `i` estimates the gains
//! `g_1i, …, g_Ki` of the links arriving at its receiver.

use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;

use crate::error::{Error, Result};
use crate::feedback::{Dmc, RsQuantizer};
use crate::linalg;
use crate::math;
use crate::prior::Prior;

/// Largest number of quantizer cells `M^T` the exact MMSE estimator enumerates.
pub const ENUMERATION_BUDGET: f64 = 1e6;

/// Training powers, one row per slot and one column per transmitter.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingMatrix {
    slots: usize,
    users: usize,
    p: Vec<f64>,
}

impl TrainingMatrix {
    pub fn new(rows: &[Vec<f64>], p_max: f64) -> Result<Self> {
        let slots = rows.len();
        if slots == 0 {
            return Err(Error::invalid("training needs at least one slot"));
        }
        let users = rows[0].len();
        let mut p = Vec::with_capacity(slots * users);
        for row in rows {
            if row.len() != users {
                return Err(Error::DimensionMismatch { what: "training row", expected: users, found: row.len() });
            }
            if row.iter().any(|&x| !(0.0..=p_max).contains(&x)) {
                return Err(Error::invalid("training powers must lie in [0, p_max]"));
            }
            p.extend_from_slice(row);
        }
        Ok(TrainingMatrix { slots, users, p })
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn users(&self) -> usize {
        self.users
    }

    #[inline]
    pub fn power(&self, slot: usize, tx: usize) -> f64 {
        self.p[slot * self.users + tx]
    }

    pub fn row(&self, slot: usize) -> &[f64] {
        &self.p[slot * self.users..(slot + 1) * self.users]
    }

    /// Diagonal entries when the matrix is square and diagonal with a positive diagonal.
    pub fn diagonal_levels(&self) -> Option<Vec<f64>> {
        if self.slots != self.users {
            return None;
        }
        for t in 0..self.slots {
            for j in 0..self.users {
                let x = self.power(t, j);
                if (t == j && !(x > 0.0)) || (t != j && x != 0.0) {
                    return None;
                }
            }
        }
        Some((0..self.slots).map(|t| self.power(t, t)).collect())
    }
}

/// `T = K` slots, transmitter `t` alone at `level` in slot `t`.
pub fn diagonal_training(k: usize, level: f64, p_max: f64) -> Result<TrainingMatrix> {
    if k < 1 {
        return Err(Error::invalid("K must be at least 1"));
    }
    if !(level > 0.0 && level <= p_max) {
        return Err(Error::invalid("diagonal training level must lie in (0, p_max]"));
    }
    let mut p = vec![0.0; k * k];
    for t in 0..k {
        p[t * k + t] = level;
    }
    Ok(TrainingMatrix { slots: k, users: k, p })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    Lspd,
    Mmsepd,
}

/// Estimate of the gains arriving at one receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalCsiEstimate {
    pub g: Vec<f64>,
    pub estimator: Estimator,
}

impl LocalCsiEstimate {
    /// Negative least-squares outputs clamped to zero.
    pub fn clamped(&self) -> Vec<f64> {
        self.g.iter().map(|&x| x.max(0.0)).collect()
    }
}

fn check_observations(train: &TrainingMatrix, len: usize) -> Result<()> {
    if len != train.slots {
        return Err(Error::DimensionMismatch { what: "observations", expected: train.slots, found: len });
    }
    Ok(())
}

/// Least squares in the power domain: `(PᵀP)⁻¹ Pᵀ (ω̃ − σ² 1)`.
///
/// The output is not clamped; it may contain negative gains.
pub fn lspd_estimate(train: &TrainingMatrix, rssi_linear: &[f64], sigma2: f64) -> Result<LocalCsiEstimate> {
    check_observations(train, rssi_linear.len())?;
    let centered: Vec<f64> = rssi_linear.iter().map(|w| w - sigma2).collect();
    let g = match train.diagonal_levels() {
        Some(levels) => centered.iter().zip(&levels).map(|(w, p)| w / p).collect(),
        None => {
            if train.slots < train.users {
                return Err(Error::SingularTraining);
            }
            linalg::least_squares(&train.p, train.slots, train.users, &centered)?
        }
    };
    Ok(LocalCsiEstimate { g, estimator: Estimator::Lspd })
}

/// Likelihood `Π_t Γ(ω̃(t) | Q(e_tᵀ P g + σ²))` of a candidate gain vector.
pub fn likelihood(
    train: &TrainingMatrix,
    rssi_indices: &[usize],
    g: &[f64],
    q: &RsQuantizer,
    dmc: &Dmc,
    sigma2: f64,
) -> f64 {
    let mut l = 1.0;
    for (t, &obs) in rssi_indices.iter().enumerate() {
        let omega: f64 = train.row(t).iter().zip(g).map(|(p, x)| p * x).sum::<f64>() + sigma2;
        l *= dmc.prob(q.quantize_saturating(omega), obs);
        if l == 0.0 {
            break;
        }
    }
    l
}

/// True when `candidate` attains the maximum likelihood over `grid` (within 1e-12).
///
/// `grid` holds one axis of candidate values per transmitter; the candidate
/// set is their Cartesian product.
pub fn ml_set_contains(
    train: &TrainingMatrix,
    rssi_indices: &[usize],
    candidate: &LocalCsiEstimate,
    q: &RsQuantizer,
    dmc: &Dmc,
    sigma2: f64,
    grid: &[Vec<f64>],
) -> Result<bool> {
    check_observations(train, rssi_indices.len())?;
    if grid.len() != train.users {
        return Err(Error::DimensionMismatch { what: "grid axes", expected: train.users, found: grid.len() });
    }
    if grid.iter().any(|axis| axis.is_empty()) {
        return Err(Error::EmptyGrid);
    }
    let own = likelihood(train, rssi_indices, &candidate.g, q, dmc, sigma2);
    let mut best = 0.0f64;
    let mut idx = vec![0usize; grid.len()];
    let mut point: Vec<f64> = grid.iter().map(|axis| axis[0]).collect();
    loop {
        best = best.max(likelihood(train, rssi_indices, &point, q, dmc, sigma2));
        // odometer
        let mut d = 0;
        loop {
            if d == grid.len() {
                return Ok(own >= best - 1e-12);
            }
            idx[d] += 1;
            if idx[d] < grid[d].len() {
                point[d] = grid[d][idx[d]];
                break;
            }
            idx[d] = 0;
            point[d] = grid[d][0];
            d += 1;
        }
    }
}

/// Numerical integration settings for non-diagonal training.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integration {
    /// Halton points used to integrate the prior over quantizer cells.
    pub qmc_points: usize,
}

impl Default for Integration {
    fn default() -> Self {
        Integration { qmc_points: 1 << 16 }
    }
}

/// Per-bin `(mass, first moment)` of the gain seen in a slot where only one
/// transmitter is active at power `level`.
fn slot_cell_moments(q: &RsQuantizer, prior: &Prior, level: f64, sigma2: f64) -> Vec<(f64, f64)> {
    (0..q.size())
        .map(|k| {
            let (lo, hi) = q.bin_linear(k);
            let a = (lo - sigma2) / level;
            let b = if hi.is_infinite() { f64::INFINITY } else { (hi - sigma2) / level };
            // negative lower ends are clamped to the support by the prior
            (prior.mass(a, b), prior.first_moment(a, b))
        })
        .collect()
}

fn check_priors(train: &TrainingMatrix, priors: &[Prior], q: &RsQuantizer, dmc: &Dmc) -> Result<()> {
    if priors.len() != train.users {
        return Err(Error::DimensionMismatch { what: "priors", expected: train.users, found: priors.len() });
    }
    if dmc.size() != q.size() {
        return Err(Error::DimensionMismatch { what: "DMC alphabet", expected: q.size(), found: dmc.size() });
    }
    Ok(())
}

/// MMSE estimate in the power domain by explicit enumeration of all `M^T`
/// quantizer cells.
///
/// With diagonal training every cell is a box and its prior integrals are
/// products of closed-form (or tabulated) interval moments. Otherwise the
/// cell integrals are evaluated with a Halton sequence drawn through the
/// prior quantile functions.
#[allow(clippy::too_many_arguments)]
pub fn mmsepd_estimate_enumerate(
    train: &TrainingMatrix,
    rssi_indices: &[usize],
    q: &RsQuantizer,
    dmc: &Dmc,
    priors: &[Prior],
    sigma2: f64,
    integration: &Integration,
) -> Result<LocalCsiEstimate> {
    check_observations(train, rssi_indices.len())?;
    check_priors(train, priors, q, dmc)?;
    let m = q.size();
    let cells = math::pow(m as f64, train.slots as f64);
    if cells > ENUMERATION_BUDGET {
        return Err(Error::BudgetExceeded { what: "MMSE cell enumeration", required: cells, limit: ENUMERATION_BUDGET });
    }
    let k = train.users;
    let (num, den) = match train.diagonal_levels() {
        Some(levels) => {
            let moments: Vec<Vec<(f64, f64)>> = levels
                .iter()
                .zip(priors)
                .map(|(&level, prior)| slot_cell_moments(q, prior, level, sigma2))
                .collect();
            let mut num = vec![0.0; k];
            let mut den = 0.0;
            let mut partial = vec![0.0; k];
            enumerate_boxes(&moments, rssi_indices, dmc, 0, 1.0, 1.0, &mut partial, &mut num, &mut den);
            (num, den)
        }
        None => qmc_cell_sums(train, rssi_indices, q, dmc, priors, sigma2, integration.qmc_points),
    };
    finish(num, den, Estimator::Mmsepd)
}

/// Depth-first walk over cell tuples; zero-likelihood branches are pruned.
#[allow(clippy::too_many_arguments)]
fn enumerate_boxes(
    moments: &[Vec<(f64, f64)>],
    obs: &[usize],
    dmc: &Dmc,
    depth: usize,
    weight: f64,
    mass_prefix: f64,
    partial: &mut [f64],
    num: &mut [f64],
    den: &mut f64,
) {
    if depth == moments.len() {
        *den += weight * mass_prefix;
        for (n, p) in num.iter_mut().zip(partial.iter()) {
            *n += weight * p;
        }
        return;
    }
    let saved: Vec<f64> = partial[..depth].to_vec();
    for (cell, &(mass, first)) in moments[depth].iter().enumerate() {
        let gamma = dmc.prob(cell, obs[depth]);
        if gamma == 0.0 {
            continue;
        }
        for c in 0..depth {
            partial[c] = saved[c] * mass;
        }
        partial[depth] = mass_prefix * first;
        enumerate_boxes(moments, obs, dmc, depth + 1, weight * gamma, mass_prefix * mass, partial, num, den);
    }
    partial[..depth].copy_from_slice(&saved);
}

fn radical_inverse(mut n: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while n > 0 {
        r += f * (n % base) as f64;
        n /= base;
        f *= inv;
    }
    r
}

fn nth_prime(n: usize) -> u64 {
    let mut count = 0;
    let mut c = 1u64;
    loop {
        c += 1;
        if (2..c).take_while(|d| d * d <= c).all(|d| c % d != 0) {
            if count == n {
                return c;
            }
            count += 1;
        }
    }
}

fn qmc_cell_sums(
    train: &TrainingMatrix,
    obs: &[usize],
    q: &RsQuantizer,
    dmc: &Dmc,
    priors: &[Prior],
    sigma2: f64,
    points: usize,
) -> (Vec<f64>, f64) {
    let k = train.users;
    let bases: Vec<u64> = (0..k).map(nth_prime).collect();
    let mut num = vec![0.0; k];
    let mut den = 0.0;
    let mut x = vec![0.0; k];
    for n in 1..=points as u64 {
        for c in 0..k {
            x[c] = priors[c].quantile(radical_inverse(n, bases[c]));
        }
        let w = likelihood(train, obs, &x, q, dmc, sigma2);
        if w > 0.0 {
            den += w;
            for c in 0..k {
                num[c] += w * x[c];
            }
        }
    }
    (num, den)
}

fn finish(num: Vec<f64>, den: f64, estimator: Estimator) -> Result<LocalCsiEstimate> {
    if !(den > 0.0) {
        return Err(Error::DegenerateObservation);
    }
    Ok(LocalCsiEstimate { g: num.into_iter().map(|n| n / den).collect(), estimator })
}

/// Exact MMSE estimate for diagonal training using the per-slot
/// factorization of the posterior: coordinate `t` depends only on the
/// observation of slot `t`. Cost `O(T·M)` instead of `O(M^T)`.
pub fn mmsepd_estimate_separable(
    train: &TrainingMatrix,
    rssi_indices: &[usize],
    q: &RsQuantizer,
    dmc: &Dmc,
    priors: &[Prior],
    sigma2: f64,
) -> Result<LocalCsiEstimate> {
    check_observations(train, rssi_indices.len())?;
    check_priors(train, priors, q, dmc)?;
    let levels = train
        .diagonal_levels()
        .ok_or_else(|| Error::invalid("separable MMSE estimation needs diagonal training"))?;
    let mut g = Vec::with_capacity(levels.len());
    for ((&level, prior), &obs) in levels.iter().zip(priors).zip(rssi_indices) {
        let (mut num, mut den) = (0.0, 0.0);
        for (cell, (mass, first)) in slot_cell_moments(q, prior, level, sigma2).into_iter().enumerate() {
            let gamma = dmc.prob(cell, obs);
            num += gamma * first;
            den += gamma * mass;
        }
        if !(den > 0.0) {
            return Err(Error::DegenerateObservation);
        }
        g.push(num / den);
    }
    Ok(LocalCsiEstimate { g, estimator: Estimator::Mmsepd })
}

/// Monte-Carlo evaluation of the same posterior mean: prior draws weighted by
/// their likelihood, `Σ w_n x_n / Σ w_n`.
#[allow(clippy::too_many_arguments)]
pub fn mmsepd_estimate_mc<R: Rng + ?Sized>(
    train: &TrainingMatrix,
    rssi_indices: &[usize],
    q: &RsQuantizer,
    dmc: &Dmc,
    priors: &[Prior],
    sigma2: f64,
    n_samples: usize,
    rng: &mut R,
) -> Result<LocalCsiEstimate> {
    check_observations(train, rssi_indices.len())?;
    check_priors(train, priors, q, dmc)?;
    if n_samples < 1 {
        return Err(Error::invalid("at least one Monte-Carlo sample is required"));
    }
    let k = train.users;
    let mut num = vec![0.0; k];
    let mut den = 0.0;
    let mut x = vec![0.0; k];
    for _ in 0..n_samples {
        for (xc, prior) in x.iter_mut().zip(priors) {
            *xc = prior.sample(rng);
        }
        let w = likelihood(train, rssi_indices, &x, q, dmc, sigma2);
        if w > 0.0 {
            den += w;
            for c in 0..k {
                num[c] += w * x[c];
            }
        }
    }
    finish(num, den, Estimator::Mmsepd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feedback::{build_nearest_neighbor_dmc, build_uniform_db_quantizer};
    use rand::rngs::SmallRng;
    use rand::SeedableRng;

    #[test]
    fn diagonal_training_examples() {
        let t = diagonal_training(2, 1000.0, 1000.0).unwrap();
        assert_eq!(t.row(0), &[1000.0, 0.0]);
        assert_eq!(t.row(1), &[0.0, 1000.0]);
        assert_eq!(diagonal_training(1, 3.0, 10.0).unwrap().row(0), &[3.0]);
        assert!(diagonal_training(2, 0.0, 10.0).is_err());
        assert!(diagonal_training(2, 11.0, 10.0).is_err());
        assert_eq!(t.diagonal_levels(), Some(vec![1000.0, 1000.0]));
    }

    #[test]
    fn lspd_examples() {
        let t = diagonal_training(2, 2.0, 10.0).unwrap();
        assert_eq!(lspd_estimate(&t, &[3.0, 5.0], 1.0).unwrap().g, vec![1.0, 2.0]);
        assert_eq!(lspd_estimate(&t, &[1.0, 1.0], 1.0).unwrap().g, vec![0.0, 0.0]);
        assert!(lspd_estimate(&t, &[1.0], 1.0).is_err());
    }

    #[test]
    fn lspd_general_training_recovers_noiseless_gains() {
        let rows = vec![vec![1.0, 2.0], vec![3.0, 1.0], vec![2.0, 2.0]];
        let t = TrainingMatrix::new(&rows, 10.0).unwrap();
        let g = [0.7, 1.9];
        let omega: Vec<f64> = rows.iter().map(|r| r[0] * g[0] + r[1] * g[1] + 1.0).collect();
        let est = lspd_estimate(&t, &omega, 1.0).unwrap();
        assert!(est.g.iter().zip(g).all(|(a, b)| (a - b).abs() < 1e-12));

        let singular = TrainingMatrix::new(&[vec![1.0, 1.0], vec![2.0, 2.0]], 10.0).unwrap();
        assert_eq!(lspd_estimate(&singular, &[1.0, 2.0], 1.0), Err(Error::SingularTraining));
        let short = TrainingMatrix::new(&[vec![1.0, 1.0]], 10.0).unwrap();
        assert_eq!(lspd_estimate(&short, &[1.0], 1.0), Err(Error::SingularTraining));
    }

    #[test]
    fn mmsepd_uninformative_channel_returns_prior_mean() {
        let q = build_uniform_db_quantizer(2, 30.0).unwrap();
        let t = diagonal_training(2, 1000.0, 1000.0).unwrap();
        let priors = [Prior::exponential(1.0).unwrap(), Prior::exponential(0.3).unwrap()];
        let est = mmsepd_estimate_enumerate(&t, &[1, 3], &q, &Dmc::uniform(4), &priors, 1.0, &Integration::default())
            .unwrap();
        assert!((est.g[0] - 1.0).abs() < 1e-12);
        assert!((est.g[1] - 0.3).abs() < 1e-12);
    }

    #[test]
    fn mmsepd_identity_channel_returns_cell_centroid() {
        let q = build_uniform_db_quantizer(1, 30.0).unwrap();
        let t = diagonal_training(1, 1000.0, 1000.0).unwrap();
        let prior = Prior::exponential(1.0).unwrap();
        // observing the upper level means omega > 10^2.5, i.e. g > (10^2.5 - 1) / 1000
        let cut = (libm::pow(10.0, 2.5) - 1.0) / 1000.0;
        let est = mmsepd_estimate_enumerate(&t, &[1], &q, &Dmc::identity(2), std::slice::from_ref(&prior), 1.0, &Integration::default())
            .unwrap();
        assert!((est.g[0] - (cut + 1.0)).abs() < 1e-12);
        let est = mmsepd_estimate_enumerate(&t, &[0], &q, &Dmc::identity(2), std::slice::from_ref(&prior), 1.0, &Integration::default())
            .unwrap();
        let centroid = prior.first_moment(-1.0, cut) / prior.mass(-1.0, cut);
        assert!((est.g[0] - centroid).abs() < 1e-12);
    }

    #[test]
    fn enumeration_budget_guard() {
        let q = build_uniform_db_quantizer(8, 30.0).unwrap();
        let t = diagonal_training(3, 1000.0, 1000.0).unwrap();
        let priors = vec![Prior::exponential(1.0).unwrap(); 3];
        let dmc = Dmc::identity(256);
        assert!(matches!(
            mmsepd_estimate_enumerate(&t, &[1, 2, 3], &q, &dmc, &priors, 1.0, &Integration::default()),
            Err(Error::BudgetExceeded { .. })
        ));
        // the separable path has no such limit
        assert!(mmsepd_estimate_separable(&t, &[100, 120, 140], &q, &dmc, &priors, 1.0).is_ok());
    }

    #[test]
    fn degenerate_observation_is_reported() {
        let q = build_uniform_db_quantizer(2, 30.0).unwrap();
        let t = diagonal_training(1, 1000.0, 1000.0).unwrap();
        // a prior concentrated far below the range can never produce the top level without feedback errors
        let prior = Prior::discrete(vec![0.001], vec![1.0]).unwrap();
        let r = mmsepd_estimate_enumerate(&t, &[3], &q, &Dmc::identity(4), &[prior], 1.0, &Integration::default());
        assert_eq!(r, Err(Error::DegenerateObservation));
    }

    #[test]
    fn separable_matches_enumeration() {
        let q = build_uniform_db_quantizer(3, 30.0).unwrap();
        let dmc = build_nearest_neighbor_dmc(8, 0.1).unwrap();
        let t = diagonal_training(2, 1000.0, 1000.0).unwrap();
        let priors = [Prior::exponential(1.0).unwrap(), Prior::exponential(0.1).unwrap()];
        for obs in [[0, 0], [3, 5], [7, 2], [4, 4]] {
            let a = mmsepd_estimate_enumerate(&t, &obs, &q, &dmc, &priors, 1.0, &Integration::default()).unwrap();
            let b = mmsepd_estimate_separable(&t, &obs, &q, &dmc, &priors, 1.0).unwrap();
            for (x, y) in a.g.iter().zip(&b.g) {
                assert!((x - y).abs() <= 1e-12 * y.abs().max(1.0));
            }
        }
    }

    #[test]
    fn qmc_path_agrees_with_box_path_on_diagonal_training() {
        // a diagonal matrix with one zero-power extra slot is no longer "diagonal",
        // forcing the quasi-random cell integration
        let q = build_uniform_db_quantizer(2, 30.0).unwrap();
        let dmc = build_nearest_neighbor_dmc(4, 0.1).unwrap();
        let priors = [Prior::exponential(1.0).unwrap(), Prior::exponential(0.5).unwrap()];
        let diag = diagonal_training(2, 1000.0, 1000.0).unwrap();
        let padded = TrainingMatrix::new(&[vec![1000.0, 0.0], vec![0.0, 1000.0], vec![0.0, 0.0]], 1000.0).unwrap();
        // the extra slot observes the noise floor, which always falls in the lowest bin
        let exact = mmsepd_estimate_enumerate(&diag, &[2, 1], &q, &dmc, &priors, 1.0, &Integration::default()).unwrap();
        let integ = Integration { qmc_points: 200_000 };
        let approx = mmsepd_estimate_enumerate(&padded, &[2, 1, 0], &q, &dmc, &priors, 1.0, &integ).unwrap();
        for (a, b) in exact.g.iter().zip(&approx.g) {
            assert!((a - b).abs() < 5e-3 * a.max(0.1), "{a} vs {b}");
        }
    }

    #[test]
    fn mc_is_reproducible() {
        let q = build_uniform_db_quantizer(2, 30.0).unwrap();
        let dmc = build_nearest_neighbor_dmc(4, 0.1).unwrap();
        let t = diagonal_training(1, 1000.0, 1000.0).unwrap();
        let priors = [Prior::exponential(1.0).unwrap()];
        let a = mmsepd_estimate_mc(&t, &[2], &q, &dmc, &priors, 1.0, 1000, &mut SmallRng::seed_from_u64(4)).unwrap();
        let b = mmsepd_estimate_mc(&t, &[2], &q, &dmc, &priors, 1.0, 1000, &mut SmallRng::seed_from_u64(4)).unwrap();
        assert_eq!(a, b);
        assert!(mmsepd_estimate_mc(&t, &[2], &q, &dmc, &priors, 1.0, 0, &mut SmallRng::seed_from_u64(4)).is_err());
    }

    #[test]
    fn uniform_channel_accepts_every_candidate() {
        let q = build_uniform_db_quantizer(2, 30.0).unwrap();
        let t = diagonal_training(1, 1000.0, 1000.0).unwrap();
        let cand = LocalCsiEstimate { g: vec![5.0], estimator: Estimator::Lspd };
        let grid = [vec![0.0, 0.5, 1.0, 2.0]];
        assert!(ml_set_contains(&t, &[1], &cand, &q, &Dmc::uniform(4), 1.0, &grid).unwrap());
    }

    #[test]
    fn candidate_outside_maximizing_cells_is_rejected() {
        let q = build_uniform_db_quantizer(2, 30.0).unwrap();
        let dmc = build_nearest_neighbor_dmc(4, 0.1).unwrap();
        let t = diagonal_training(1, 1000.0, 1000.0).unwrap();
        // observed level 2 (28.75 dB); a gain of 10 lands at 40 dB, level 3
        let far = LocalCsiEstimate { g: vec![10.0], estimator: Estimator::Lspd };
        let grid = [vec![0.0, 0.25, 0.5, 0.75, 1.0, 10.0]];
        assert!(!ml_set_contains(&t, &[2], &far, &q, &dmc, 1.0, &grid).unwrap());
        assert_eq!(ml_set_contains(&t, &[2], &far, &q, &dmc, 1.0, &[vec![]]), Err(Error::EmptyGrid));
    }
}
