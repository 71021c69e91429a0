//! Power-domain channel state acquisition for interference networks.
//!
//! Transmitters only see a quantized, noisy image of the power received at
//! their own receiver (the RSSI). This crate turns that single scalar feedback
//! into global channel knowledge in three steps:
//!
//! 1. [`phase1`]: local channel estimation from a power training sequence
//!    (least squares or MMSE in the power domain).
//! 2. [`exchange`]: every transmitter quantizes its local gains with a scalar
//!    codebook from [`quantizer`] and modulates the labels onto its transmit
//!    power; the others decode them from the interference they observe.
//! 3. [`optimize`]: sum-utility best-response dynamics on the resulting
//!    distributed estimates, with iterative water-filling and an exhaustive
//!    search oracle as baselines.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. All floating point transcendental functions go through `libm` so
//! Monte-Carlo runs are bit-reproducible across platforms.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod exchange;
pub mod feedback;
mod linalg;
pub mod math;
pub mod metrics;
pub mod model;
pub mod optimize;
pub mod phase1;
pub mod pipeline;
pub mod prior;
pub mod quantizer;
pub mod rng;

pub use error::{Error, Result};
pub use exchange::{DistributedCsi, ExchangeMode, ExchangeSchedule, LinkCodebooks, PowerAlphabet};
pub use feedback::{Dmc, RsQuantizer};
pub use model::{ChannelState, GainStatistics, Point, PowerProfile, Scenario};
pub use optimize::{BrdMode, PowerGrid, UtilityKind, UtilitySpec};
pub use phase1::{Estimator, LocalCsiEstimate, TrainingMatrix};
pub use prior::Prior;
pub use quantizer::{RepTransitionMatrix, ScalarGainQuantizer};
