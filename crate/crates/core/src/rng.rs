//! Keyed random streams.
//!
//! Every random draw in a trial comes from a ChaCha8 stream whose 256-bit key
//! is `(master seed, cell, trial, role)`. Streams for distinct keys are
//! independent, so results do not depend on execution order or worker count.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a stream is used for inside one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Role {
    Codebook = 1,
    Noise = 2,
    ThirdUser = 3,
    Auxiliary = 4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub seed: u64,
    pub cell: u64,
    pub trial: u64,
    pub role: Role,
}

impl StreamKey {
    pub fn new(seed: u64, cell: u64, trial: u64, role: Role) -> Self {
        StreamKey {
            seed,
            cell,
            trial,
            role,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[0..8].copy_from_slice(&self.seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.cell.to_le_bytes());
        key[16..24].copy_from_slice(&self.trial.to_le_bytes());
        key[24..32].copy_from_slice(&(self.role as u64).to_le_bytes());
        ChaCha8Rng::from_seed(key)
    }
}

/// Stream for a one-off draw keyed only by seed and role.
pub fn stream(seed: u64, role: Role) -> ChaCha8Rng {
    StreamKey::new(seed, 0, 0, role).rng()
}
