//! Seed derivation for reproducible trials.
//!
//! Every trial owns a ChaCha8 generator seeded from `(master, trial)`. The
//! algorithm is deliberately not part of the key, so trial `r` of every
//! algorithm sees the same channel and the same first random configuration.
//! Independent substreams separate the channel draw, the optimizer and
//! measurement noise.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

/// Substream selector for a trial's generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Channel = 0,
    Optimizer = 1,
    Noise = 2,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Child seed for trial `trial` under `master`.
pub fn child_seed(master: u64, trial: u64) -> u64 {
    splitmix64(master ^ splitmix64(trial.wrapping_add(0x5851_f42d_4c95_7f2d)))
}

pub fn trial_rng(master: u64, trial: u64, stream: Stream) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(child_seed(master, trial));
    rng.set_stream(stream as u64);
    rng
}
