//! Counter-based randomness for reproducible protocol sessions.
//!
//! Every draw is a pure function of (seed, round, stream): there is no
//! sequential generator state. Rounds can therefore be generated in any
//! order or partitioning — across however many workers — and still produce
//! the identical session. Not cryptographically secure; simulation only.

/// Purpose of a draw within one round. Each purpose gets its own
/// statistically independent stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    AliceSetting = 0,
    BobSetting = 1,
    Outcome = 2,
    Sacrifice = 3,
}

/// Handle on one round's slice of the session's random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundRng {
    seed: u64,
    round: u64,
}

impl RoundRng {
    pub fn new(seed: u64, round: u64) -> Self {
        RoundRng { seed, round }
    }

    /// Uniform draw in [0, 1) for the given stream.
    pub fn uniform(self, stream: Stream) -> f64 {
        let word = mix(mix(mix(self.seed) ^ self.round) ^ stream as u64);
        // top 53 bits -> [0, 1)
        (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// splitmix64 step: add the golden-ratio increment, then finalize.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
