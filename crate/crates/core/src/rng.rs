//! Counter-based random number streams.
//!
//! Every walk (or test sampler) owns a stream keyed by `(seed, stream id)`;
//! draws are a pure function of the key and a local counter, so results do
//! not depend on scheduling or thread count.

/// A splittable counter-based generator (SplitMix64 finalizer over a keyed
/// counter).
#[derive(Debug, Clone)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl CounterRng {
    /// Stream `stream` of the generator family seeded by `seed`.
    pub fn new(seed: u64, stream: u64) -> Self {
        // Decorrelate the stream id from the seed before keying.
        let key = mix(seed ^ mix(stream.wrapping_mul(GOLDEN_GAMMA).wrapping_add(GOLDEN_GAMMA)));
        CounterRng { key, counter: 0 }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let z = self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN_GAMMA));
        self.counter = self.counter.wrapping_add(1);
        mix(z)
    }

    /// Uniform draw in `[0, 1)` with 53-bit resolution.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }

    /// Uniform draw in the open interval `(0, 1]`; never returns 0.
    #[inline]
    pub fn uniform_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / 9007199254740992.0)
    }

    /// A pair of independent standard normals (Box–Muller).
    #[inline]
    pub fn normal_pair(&mut self) -> (f64, f64) {
        let u1 = self.uniform_open();
        let u2 = self.uniform();
        let mag = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        (mag * angle.cos(), mag * angle.sin())
    }

    /// Fill `out` with independent standard normals.
    pub fn fill_normals(&mut self, out: &mut [f64]) {
        let mut i = 0;
        while i + 1 < out.len() {
            let (a, b) = self.normal_pair();
            out[i] = a;
            out[i + 1] = b;
            i += 2;
        }
        if i < out.len() {
            out[i] = self.normal_pair().0;
        }
    }
}
