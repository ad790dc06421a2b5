//! Counter-based random streams keyed by position in the experiment.
//!
//! Every resample draws from its own stream. The stream is a pure function of
//! the master seed and a [`SeedPath`] naming the trial, the bootstrap level and
//! the replicate indices, so no stream depends on how many draws were made
//! before it or on which worker makes them.
//!
//! # Key derivation
//!
//! The words `[trial, level, b, c]` are absorbed into two independent lanes,
//! each started from the master seed xor a lane constant:
//!
//! ```text
//! h = mix(seed ^ LANE_k)
//! for w in [trial, level, b, c]:  h = mix(h ^ w)
//! ```
//!
//! where `mix` is the SplitMix64 finalizer. The two lane outputs `h0`, `h1`
//! seed a xoshiro256++ generator with state
//! `[mix(h0), mix(h1), mix(h0 ^ GOLDEN), mix(h1 ^ GOLDEN)]`. Two paths share a
//! stream only if both 64-bit lanes collide.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const LANES: [u64; 2] = [0x243F_6A88_85A3_08D3, 0x1319_8A2E_0370_7344];

/// SplitMix64 output function (a bijection on `u64`).
#[inline]
pub fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from a master seed and a list of tags. Used to give
/// each row of an experiment grid its own master seed.
pub fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    let mut h = mix(master ^ GOLDEN);
    for &t in tags {
        h = mix(h ^ t);
    }
    h
}

/// Which random draw a stream serves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    /// Generating the observed sample of a trial.
    Data,
    /// The `b`-th first-level resample.
    Outer { b: u64 },
    /// The `c`-th second-level resample drawn from outer resample `b`.
    Inner { b: u64, c: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedPath {
    pub trial: u64,
    pub level: Level,
}

impl SeedPath {
    pub fn data(trial: u64) -> Self {
        SeedPath {
            trial,
            level: Level::Data,
        }
    }

    pub fn outer(trial: u64, b: usize) -> Self {
        SeedPath {
            trial,
            level: Level::Outer { b: b as u64 },
        }
    }

    pub fn inner(trial: u64, b: usize, c: usize) -> Self {
        SeedPath {
            trial,
            level: Level::Inner {
                b: b as u64,
                c: c as u64,
            },
        }
    }

    fn words(&self) -> [u64; 4] {
        match self.level {
            Level::Data => [self.trial, 0, 0, 0],
            Level::Outer { b } => [self.trial, 1, b, 0],
            Level::Inner { b, c } => [self.trial, 2, b, c],
        }
    }

    pub fn stream(&self, master: u64) -> Stream {
        let words = self.words();
        let mut lanes = [0u64; 2];
        for (lane, &iv) in lanes.iter_mut().zip(LANES.iter()) {
            let mut h = mix(master ^ iv);
            for &w in &words {
                h = mix(h ^ w);
            }
            *lane = h;
        }
        Stream::from_state([
            mix(lanes[0]),
            mix(lanes[1]),
            mix(lanes[0] ^ GOLDEN),
            mix(lanes[1] ^ GOLDEN),
        ])
    }
}

/// xoshiro256++ generator.
#[derive(Debug, Clone)]
pub struct Stream {
    s: [u64; 4],
    /// Unused upper half of the last word drawn by `next_u32`.
    spare: Option<u32>,
}

impl Stream {
    fn from_state(mut s: [u64; 4]) -> Self {
        if s.iter().all(|&w| w == 0) {
            s[0] = GOLDEN;
        }
        Stream { s, spare: None }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.s;
        let out = s[0].wrapping_add(s[3]).rotate_left(23).wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        out
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on the open interval `(0, 1)`; safe to feed to inverse CDFs.
    #[inline]
    pub fn open_uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// 32 random bits; each 64-bit word serves two calls, low half first.
    #[inline]
    pub fn next_u32(&mut self) -> u32 {
        match self.spare.take() {
            Some(h) => h,
            None => {
                let w = self.next_u64();
                self.spare = Some((w >> 32) as u32);
                w as u32
            }
        }
    }

    /// Exactly uniform integer in `[0, n)` (Lemire's multiply-shift with
    /// rejection on 32-bit draws). `n` must be positive.
    #[inline]
    pub fn below(&mut self, n: u32) -> u32 {
        debug_assert!(n > 0);
        let n = n as u64;
        let mut m = self.next_u32() as u64 * n;
        if (m as u32 as u64) < n {
            let threshold = (n as u32).wrapping_neg() as u64 % n;
            while (m as u32 as u64) < threshold {
                m = self.next_u32() as u64 * n;
            }
        }
        (m >> 32) as u32
    }
}
