//! Deterministic random streams.
//!
//! Every Monte Carlo run draws from its own ChaCha20 stream: the 64-bit master
//! seed keys the generator (via `SeedableRng::seed_from_u64`) and the run index
//! selects the ChaCha stream number. Streams are independent of scheduling, so
//! serial and parallel sweeps consume identical random numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub type Stream = ChaCha20Rng;

pub fn run_stream(master_seed: u64, run: u64) -> Stream {
    let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
    rng.set_stream(run);
    rng
}
