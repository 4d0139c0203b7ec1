//! Seeded random substreams.
//!
//! Every random draw in a run derives from one root seed. Each consumer gets its own
//! ChaCha stream so that, e.g., changing the number of sampled evaluations never shifts
//! the initial parameters.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Named substreams of the root seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Substream {
    /// Initial variational parameters.
    Init,
    /// Multinomial shot sampling.
    Sampling,
    /// Anything test- or benchmark-specific (random states, random matrices).
    Auxiliary,
}

impl Substream {
    fn id(self) -> u64 {
        match self {
            Substream::Init => 1,
            Substream::Sampling => 2,
            Substream::Auxiliary => 3,
        }
    }
}

pub type Rng = ChaCha8Rng;

pub fn substream(root_seed: u64, stream: Substream) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(root_seed);
    rng.set_stream(stream.id());
    rng
}

/// Independent sampling stream for one measurement circuit of one cost evaluation.
///
/// Keyed on `(root_seed, draw)` with the circuit index as the ChaCha stream, so groups
/// can be sampled in parallel without their draws depending on scheduling.
pub fn sampling_stream(root_seed: u64, draw: u64, circuit: u64) -> Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&root_seed.to_le_bytes());
    key[8..16].copy_from_slice(&draw.to_le_bytes());
    key[16..24].copy_from_slice(&Substream::Sampling.id().to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(circuit);
    rng
}
