//! Deterministic, independently seedable random streams.
//!
//! Reproducibility contract: every stochastic routine in the toolkit draws
//! from a stream identified by `(master_seed, stream_id)`. Equal identifiers
//! always yield identical sequences regardless of thread count, platform, or
//! how many other streams were consumed, because each stream owns its own
//! generator. Optimizers derive one stream per `(iteration, agent, phase)`
//! triple and perform *all* draws in their sequential control section, so
//! parallel fitness evaluation can never consume randomness.
//!
//! Stream seeds are produced by a SplitMix64-style mix of the master seed and
//! the stream id, then fed to ChaCha8 — a small, fast, high-quality stream
//! cipher generator with a stable cross-platform implementation.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Reserved iteration index for population / weight initialization draws.
pub const ITER_INIT: u64 = 0;

/// SplitMix64 finalizer. Bijective on `u64`, decorrelates consecutive inputs.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mix a master seed with a stream id into a single generator seed.
fn mix(master_seed: u64, stream_id: u64) -> u64 {
    splitmix64(master_seed ^ splitmix64(stream_id))
}

/// Identifier of one deterministic draw sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        RngStream {
            master_seed,
            stream_id,
        }
    }

    /// Stream for an `(iteration, agent, phase)` triple.
    ///
    /// Iteration `0` is reserved for initialization; optimizer iterations are
    /// 1-based. Field widths (36/20/8 bits) are far beyond desk scale; ids
    /// only need to be distinct, not dense.
    pub fn for_phase(master_seed: u64, iteration: u64, agent: u64, phase: u64) -> Self {
        let id = (iteration << 28) ^ ((agent & 0xF_FFFF) << 8) ^ (phase & 0xFF);
        RngStream::new(master_seed, id)
    }

    /// Instantiate the generator for this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(mix(self.master_seed, self.stream_id))
    }
}

/// Derive a fresh `u64` seed from a master seed and two indices.
///
/// Used where a component needs to hand a whole child computation its own
/// seed (for example one training run per tuner slot) rather than a stream.
pub fn derive_seed(master_seed: u64, a: u64, b: u64) -> u64 {
    splitmix64(mix(master_seed, a).wrapping_add(splitmix64(b ^ 0xA5A5_A5A5_A5A5_A5A5)))
}
