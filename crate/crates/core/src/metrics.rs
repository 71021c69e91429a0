//! Figures of merit aggregated over Monte-Carlo trials.

use alloc::vec;
use alloc::vec::Vec;

use crate::exchange::DistributedCsi;
use crate::math;
use crate::model::ChannelState;

/// Value written in place of an infinite ESNR.
pub const ESNR_CAP_DB: f64 = 200.0;

/// `10·log10(signal / error)`; `+∞` when the error energy is zero.
pub fn esnr_db(signal: f64, error: f64) -> f64 {
    if error == 0.0 {
        return f64::INFINITY;
    }
    10.0 * math::log10(signal / error)
}

/// Running sums of `‖G‖²` and of every transmitter's `‖G − G̃^j‖²`.
///
/// The ratio is taken between trial means, not averaged per trial.
#[derive(Debug, Clone, PartialEq)]
pub struct EsnrAccumulator {
    signal: f64,
    error: Vec<f64>,
    trials: usize,
}

impl EsnrAccumulator {
    pub fn new(k: usize) -> Self {
        EsnrAccumulator { signal: 0.0, error: vec![0.0; k], trials: 0 }
    }

    pub fn add(&mut self, truth: &ChannelState, csi: &DistributedCsi) {
        self.signal += truth.frobenius_sq();
        for (e, view) in self.error.iter_mut().zip(csi.views()) {
            *e += truth.distance_sq(view);
        }
        self.trials += 1;
    }

    /// Add pre-computed energies of one trial.
    pub fn add_energies(&mut self, signal: f64, error: &[f64]) {
        self.signal += signal;
        for (e, x) in self.error.iter_mut().zip(error) {
            *e += x;
        }
        self.trials += 1;
    }

    pub fn trials(&self) -> usize {
        self.trials
    }

    pub fn transmitter(&self, j: usize) -> f64 {
        esnr_db(self.signal, self.error[j])
    }

    /// Mean of the per-transmitter values in dB.
    pub fn all(&self) -> f64 {
        let k = self.error.len();
        (0..k).map(|j| self.transmitter(j)).sum::<f64>() / k as f64
    }
}

/// Result of [`relative_utility_loss`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtilityLoss {
    /// Mean relative loss in percent.
    pub percent: f64,
    pub used: usize,
    /// Trials skipped because the optimal utility was zero.
    pub excluded: usize,
}

/// `100 · mean[(u* − ũ) / u*]` over `(u*, ũ)` pairs, both on the true channel.
pub fn relative_utility_loss(pairs: &[(f64, f64)]) -> UtilityLoss {
    let mut sum = 0.0;
    let mut used = 0;
    for &(best, achieved) in pairs {
        if best == 0.0 {
            continue;
        }
        sum += (best - achieved) / best;
        used += 1;
    }
    let percent = if used == 0 { f64::NAN } else { 100.0 * sum / used as f64 };
    UtilityLoss { percent, used, excluded: pairs.len() - used }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn esnr_examples() {
        assert_eq!(esnr_db(10.0, 1.0), 10.0);
        assert_eq!(esnr_db(10.0, 0.0), f64::INFINITY);
        let g = ChannelState::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let mut acc = EsnrAccumulator::new(2);
        acc.add(&g, &DistributedCsi::new(vec![ChannelState::zeros(2, 1); 2]).unwrap());
        assert!(acc.all().abs() < 1e-12);
    }

    #[test]
    fn loss_examples() {
        assert_eq!(relative_utility_loss(&[(10.0, 9.0)]).percent, 10.0);
        let l = relative_utility_loss(&[(10.0, 10.0), (0.0, 0.0)]);
        assert_eq!((l.percent, l.used, l.excluded), (0.0, 1, 1));
    }
}
