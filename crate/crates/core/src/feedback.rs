//! Receiver feedback: the RS-power quantizer, the discrete memoryless
//! feedback channel and the end-to-end RSSI sampler.

use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;

use crate::error::{Error, Result};
use crate::math;
use crate::model::{received_power, ChannelState, PowerProfile};

/// Uniform-in-dB quantizer of the received signal power.
///
/// Bin `k` covers `(edge[k], edge[k+1]]` in dB; the first and last bins
/// extend to `-∞` and `+∞` so out-of-range powers saturate.
#[derive(Debug, Clone, PartialEq)]
pub struct RsQuantizer {
    n_bits: u32,
    levels_db: Vec<f64>,
    edges_db: Vec<f64>,
    levels_linear: Vec<f64>,
    edges_linear: Vec<f64>,
}

impl RsQuantizer {
    /// `2^n_bits` bins uniform in dB over `[lo_db, hi_db]`, representatives at bin centers.
    pub fn uniform_db(n_bits: u32, lo_db: f64, hi_db: f64) -> Result<Self> {
        if !(1..=20).contains(&n_bits) {
            return Err(Error::invalid("RS quantizer needs 1..=20 bits"));
        }
        if !(lo_db < hi_db) || !lo_db.is_finite() || !hi_db.is_finite() {
            return Err(Error::invalid("RS quantizer range must satisfy lo < hi"));
        }
        let m = 1usize << n_bits;
        let width = (hi_db - lo_db) / m as f64;
        let edges_db: Vec<f64> = (0..=m).map(|k| lo_db + k as f64 * width).collect();
        let levels_db: Vec<f64> = (0..m).map(|k| lo_db + (k as f64 + 0.5) * width).collect();
        Ok(RsQuantizer {
            n_bits,
            levels_linear: levels_db.iter().map(|&d| math::db_to_linear(d)).collect(),
            edges_linear: edges_db.iter().map(|&d| math::db_to_linear(d)).collect(),
            levels_db,
            edges_db,
        })
    }

    pub fn n_bits(&self) -> u32 {
        self.n_bits
    }

    /// Number of levels `M`.
    pub fn size(&self) -> usize {
        self.levels_db.len()
    }

    pub fn levels_db(&self) -> &[f64] {
        &self.levels_db
    }

    pub fn edges_db(&self) -> &[f64] {
        &self.edges_db
    }

    pub fn range_db(&self) -> (f64, f64) {
        (self.edges_db[0], self.edges_db[self.size()])
    }

    /// Linear value of level `index`.
    pub fn level_linear(&self, index: usize) -> f64 {
        self.levels_linear[index]
    }

    /// Linear-domain bounds `(lo, hi]` of bin `index`, with saturation bins
    /// extended to `0` and `∞`.
    pub fn bin_linear(&self, index: usize) -> (f64, f64) {
        let lo = if index == 0 { 0.0 } else { self.edges_linear[index] };
        let hi = if index + 1 == self.size() { f64::INFINITY } else { self.edges_linear[index + 1] };
        (lo, hi)
    }

    /// Bin index of a positive linear power; values on an edge join the lower bin.
    pub fn quantize(&self, omega_linear: f64) -> Result<usize> {
        if !(omega_linear > 0.0) {
            return Err(Error::invalid("received power must be positive"));
        }
        Ok(self.quantize_saturating(omega_linear))
    }

    /// Like [`quantize`](Self::quantize) but maps non-positive powers to bin 0.
    pub fn quantize_saturating(&self, omega_linear: f64) -> usize {
        if !(omega_linear > 0.0) {
            return 0;
        }
        self.index_of_db(math::linear_to_db(omega_linear))
    }

    /// Bin index of a level given in dB.
    pub fn index_of_db(&self, x_db: f64) -> usize {
        let interior = &self.edges_db[1..self.size()];
        interior.partition_point(|&e| e < x_db)
    }
}

/// Uniform-in-dB quantizer over `[snr_db - 20, snr_db + 10]`.
pub fn build_uniform_db_quantizer(n_bits: u32, snr_db: f64) -> Result<RsQuantizer> {
    RsQuantizer::uniform_db(n_bits, snr_db - 20.0, snr_db + 10.0)
}

/// Discrete memoryless feedback channel; `gamma[k][l]` is the probability of
/// receiving level `l` when level `k` was sent.
#[derive(Debug, Clone, PartialEq)]
pub struct Dmc {
    m: usize,
    gamma: Vec<f64>,
    cumulative: Vec<f64>,
}

impl Dmc {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::invalid("DMC needs at least one symbol"));
        }
        let mut gamma = Vec::with_capacity(m * m);
        for row in &rows {
            if row.len() != m {
                return Err(Error::DimensionMismatch { what: "DMC row", expected: m, found: row.len() });
            }
            if row.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                return Err(Error::invalid("DMC probabilities must lie in [0, 1]"));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::invalid("DMC rows must sum to one"));
            }
            gamma.extend_from_slice(row);
        }
        Ok(Self::from_flat(m, gamma))
    }

    fn from_flat(m: usize, gamma: Vec<f64>) -> Self {
        let mut cumulative = vec![0.0; m * m];
        for k in 0..m {
            let mut acc = 0.0;
            for l in 0..m {
                acc += gamma[k * m + l];
                cumulative[k * m + l] = acc;
            }
        }
        Dmc { m, gamma, cumulative }
    }

    pub fn identity(m: usize) -> Self {
        let mut gamma = vec![0.0; m * m];
        for k in 0..m {
            gamma[k * m + k] = 1.0;
        }
        Self::from_flat(m, gamma)
    }

    /// Every row uniform: the output carries no information.
    pub fn uniform(m: usize) -> Self {
        Self::from_flat(m, vec![1.0 / m as f64; m * m])
    }

    pub fn size(&self) -> usize {
        self.m
    }

    /// `Γ(w_received | w_sent)`.
    #[inline]
    pub fn prob(&self, sent: usize, received: usize) -> f64 {
        self.gamma[sent * self.m + received]
    }

    pub fn row(&self, sent: usize) -> &[f64] {
        &self.gamma[sent * self.m..(sent + 1) * self.m]
    }

    /// Draw the received symbol for `sent`.
    pub fn sample<R: Rng + ?Sized>(&self, sent: usize, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        let cum = &self.cumulative[sent * self.m..(sent + 1) * self.m];
        let idx = cum.partition_point(|&c| c <= u);
        // guard against rounding in the last cumulative entry, and never land on a zero-probability symbol
        let mut idx = idx.min(self.m - 1);
        while self.prob(sent, idx) == 0.0 && idx > 0 {
            idx -= 1;
        }
        idx
    }

    /// True when, for every received symbol `l`, `argmax_k Γ(l | k) = l`
    /// (strictly: the diagonal entry beats every other entry of its column).
    pub fn diagonal_dominates_columns(&self) -> bool {
        (0..self.m).all(|l| {
            let diag = self.prob(l, l);
            (0..self.m).all(|k| k == l || self.prob(k, l) < diag)
        })
    }
}

/// Symbol error `epsilon` towards each of the two neighbouring levels; edge
/// levels keep `1 - epsilon`, interior ones `1 - 2 epsilon`.
pub fn build_nearest_neighbor_dmc(m: usize, epsilon: f64) -> Result<Dmc> {
    if m < 1 {
        return Err(Error::invalid("DMC needs at least one symbol"));
    }
    if !(0.0..=0.5).contains(&epsilon) {
        return Err(Error::invalid("nearest-neighbour error probability must lie in [0, 1/2]"));
    }
    let mut gamma = vec![0.0; m * m];
    for k in 0..m {
        let mut stay = 1.0;
        if k > 0 {
            gamma[k * m + k - 1] = epsilon;
            stay -= epsilon;
        }
        if k + 1 < m {
            gamma[k * m + k + 1] = epsilon;
            stay -= epsilon;
        }
        gamma[k * m + k] = stay;
    }
    Ok(Dmc::from_flat(m, gamma))
}

/// Received power → RS quantizer → one DMC draw. Returns the RSSI level index.
#[allow(clippy::too_many_arguments)]
pub fn sample_rssi<R: Rng + ?Sized>(
    state: &ChannelState,
    profile: &PowerProfile,
    receiver: usize,
    band: usize,
    sigma2: f64,
    q: &RsQuantizer,
    dmc: &Dmc,
    rng: &mut R,
) -> Result<usize> {
    let omega = received_power(state, profile, receiver, band, sigma2)?;
    Ok(feed_back(omega, q, dmc, rng))
}

/// Quantize a received power and pass it through the feedback channel.
#[inline]
pub fn feed_back<R: Rng + ?Sized>(omega: f64, q: &RsQuantizer, dmc: &Dmc, rng: &mut R) -> usize {
    dmc.sample(q.quantize_saturating(omega), rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::SmallRng;
    use rand::SeedableRng;

    #[test]
    fn paper_default_quantizer() {
        let q = build_uniform_db_quantizer(8, 30.0).unwrap();
        assert_eq!(q.size(), 256);
        assert_eq!(q.range_db(), (10.0, 40.0));
        assert!((q.edges_db()[1] - q.edges_db()[0] - 30.0 / 256.0).abs() < 1e-12);
    }

    #[test]
    fn one_bit_levels() {
        let q = build_uniform_db_quantizer(1, 30.0).unwrap();
        assert_eq!(q.levels_db(), &[17.5, 32.5]);
        assert!(build_uniform_db_quantizer(0, 30.0).is_err());
    }

    #[test]
    fn saturation_and_ties() {
        let q = build_uniform_db_quantizer(2, 30.0).unwrap();
        assert_eq!(q.quantize(math::db_to_linear(-100.0)).unwrap(), 0);
        assert_eq!(q.quantize(math::db_to_linear(100.0)).unwrap(), 3);
        // edge between bins 1 and 2 sits at 25 dB; the tie goes to the lower bin
        assert_eq!(q.edges_db()[2], 25.0);
        assert_eq!(q.index_of_db(25.0), 1);
        assert_eq!(q.index_of_db(25.0 + 1e-9), 2);
        for k in 0..q.size() {
            assert_eq!(q.quantize(q.level_linear(k)).unwrap(), k);
        }
        assert!(q.quantize(0.0).is_err());
        assert!(q.quantize(-1.0).is_err());
    }

    #[test]
    fn nearest_neighbor_rows() {
        assert_eq!(build_nearest_neighbor_dmc(4, 0.0).unwrap(), Dmc::identity(4));
        let d = build_nearest_neighbor_dmc(4, 0.1).unwrap();
        let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-15);
        assert!(close(d.row(0), &[0.9, 0.1, 0.0, 0.0]));
        assert!(close(d.row(1), &[0.1, 0.8, 0.1, 0.0]));
        assert!(build_nearest_neighbor_dmc(4, 0.6).is_err());
        assert!(build_nearest_neighbor_dmc(4, -0.1).is_err());
    }

    #[test]
    fn column_argmax_condition() {
        for &eps in &[0.0, 0.01, 0.1, 0.3, 0.33] {
            assert!(build_nearest_neighbor_dmc(256, eps).unwrap().diagonal_dominates_columns());
        }
        assert!(!build_nearest_neighbor_dmc(16, 0.34).unwrap().diagonal_dominates_columns());
        assert!(!Dmc::uniform(4).diagonal_dominates_columns());
    }

    #[test]
    fn sampling_follows_rows() {
        let d = build_nearest_neighbor_dmc(8, 0.1).unwrap();
        let mut rng = SmallRng::seed_from_u64(3);
        let n = 100_000;
        let mut counts = [0usize; 8];
        for _ in 0..n {
            counts[d.sample(4, &mut rng)] += 1;
        }
        for (l, &c) in counts.iter().enumerate() {
            let p = d.prob(4, l);
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            assert!((c as f64 / n as f64 - p).abs() <= 3.0 * sigma + 1e-12, "symbol {l}");
        }
        for sent in [0, 7] {
            for _ in 0..1000 {
                let r = d.sample(sent, &mut rng);
                assert!(d.prob(sent, r) > 0.0);
            }
        }
    }

    #[test]
    fn rssi_pipeline() {
        let state = ChannelState::from_rows(&[&[1.0, 0.2], &[0.3, 1.0]]).unwrap();
        let profile = PowerProfile::single_band(&[1000.0, 500.0]).unwrap();
        let q = build_uniform_db_quantizer(8, 30.0).unwrap();
        let exact = q.quantize(received_power(&state, &profile, 0, 0, 1.0).unwrap()).unwrap();
        let mut rng = SmallRng::seed_from_u64(1);
        let ident = Dmc::identity(256);
        assert_eq!(sample_rssi(&state, &profile, 0, 0, 1.0, &q, &ident, &mut rng).unwrap(), exact);
        let noisy = build_nearest_neighbor_dmc(256, 0.2).unwrap();
        let a: Vec<usize> = {
            let mut r = SmallRng::seed_from_u64(8);
            (0..50).map(|_| sample_rssi(&state, &profile, 0, 0, 1.0, &q, &noisy, &mut r).unwrap()).collect()
        };
        let b: Vec<usize> = {
            let mut r = SmallRng::seed_from_u64(8);
            (0..50).map(|_| sample_rssi(&state, &profile, 0, 0, 1.0, &q, &noisy, &mut r).unwrap()).collect()
        };
        assert_eq!(a, b);
        assert!(a.iter().all(|&i| i + 1 >= exact && i <= exact + 1));
    }
}
