//! Deterministic random-stream derivation for Monte-Carlo trials.
//!
//! Trial `t` of a run with base seed `b` gets the 64-bit seed
//! `splitmix64(b ^ splitmix64(t))`. Every consumer inside a trial draws from
//! its own ChaCha8 stream (same key, distinct stream id), so adding a method
//! or changing how many draws one phase consumes never shifts the channel
//! realizations seen by the others.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One random stream per consumer inside a trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Channel = 0,
    Phase1Feedback = 1,
    Phase2Feedback = 2,
    Estimator = 3,
    Nuisance = 4,
}

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `trial` under base seed `base`.
pub fn trial_seed(base: u64, trial: u64) -> u64 {
    splitmix64(base ^ splitmix64(trial))
}

/// Independent streams of one trial.
#[derive(Debug, Clone, Copy)]
pub struct TrialStreams {
    seed: u64,
}

impl TrialStreams {
    pub fn new(seed: u64) -> Self {
        TrialStreams { seed }
    }

    pub fn for_trial(base: u64, trial: u64) -> Self {
        Self::new(trial_seed(base, trial))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self, which: Stream) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(which as u64);
        rng
    }
}
