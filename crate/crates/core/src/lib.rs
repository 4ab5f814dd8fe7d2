//! Random-coding partition of active users over a noisy Boolean OR
//! multi-access channel.
//!
//! Users transmit i.i.d. Bernoulli(`p`) codewords for `T` rounds, everyone
//! observes a noisy OR of the two active users' rows, and each user must
//! place the two active users in different groups. The crate contains the
//! channel model, the typical-set graph decoder and its analysis, the
//! large-deviation rate functions of the scheme, and a seeded Monte Carlo
//! harness tying them together.

pub mod bits;
pub mod channel;
pub mod codebook;
pub mod decoder;
pub mod error;
pub mod experiments;
pub mod rates;
pub mod rng;

pub use bits::BitRow;
pub use channel::{ChannelParams, FeedbackVector, JointKernel, StatusVector};
pub use codebook::{DecoderMode, ExperimentConfig, TransmissionMatrix};
pub use decoder::{CandidateGraph, Partition, Strictness};
pub use error::{Error, Result};
