//! XORshift and the chaotic-iteration generator built on top of it.
//!
//! Each output of [`ChaoticGenerator`] runs `k = b + U(1, b + 1)` asynchronous
//! updates of `f`, the component to update being drawn uniformly in
//! `[1, n]` each time. The configuration reached is both the output and the
//! starting point of the next call.

use crate::bits::BitSequence;
use crate::error::{invalid, Error, Result};
use crate::network::{BooleanMap, Configuration};

/// Marsaglia's 32-bit xorshift with shifts (13, 17, 5).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct XorShift32 {
    z: u32,
}

impl XorShift32 {
    /// Zero is a fixed point of the recurrence and is rejected.
    pub fn new(seed: u32) -> Result<Self> {
        if seed == 0 {
            return Err(Error::InvalidState("xorshift state must be nonzero".into()));
        }
        Ok(Self { z: seed })
    }

    pub fn state(&self) -> u32 {
        self.z
    }

    #[inline]
    pub fn next_word(&mut self) -> u32 {
        let mut z = self.z;
        z ^= z << 13;
        z ^= z >> 17;
        z ^= z << 5;
        self.z = z;
        z
    }

    /// Uniform integer in `[1, k]` by rejection: words above the largest
    /// multiple of `k` not exceeding `2^32 - 1` are redrawn.
    pub fn uniform(&mut self, k: u32) -> Result<u32> {
        if k == 0 {
            return Err(invalid("uniform range [1, 0] is empty"));
        }
        Ok(self.uniform_nonzero(k))
    }

    #[inline]
    fn uniform_nonzero(&mut self, k: u32) -> u32 {
        let limit = k * (u32::MAX / k);
        loop {
            let y = self.next_word();
            if y <= limit {
                return 1 + (y - 1) % k;
            }
        }
    }
}

/// One round as a pure function: `(output word, next state)`.
pub fn xorshift_round(state: XorShift32) -> (u32, XorShift32) {
    let mut next = state;
    let y = next.next_word();
    (y, next)
}

/// `(value in [1, k], next state)`.
pub fn xorshift_uniform(state: XorShift32, k: u32) -> Result<(u32, XorShift32)> {
    let mut next = state;
    let v = next.uniform(k)?;
    Ok((v, next))
}

/// Derives a second nonzero seed from the first (murmur3 finalizer).
pub fn derive_seed(seed: u32) -> u32 {
    let mut z = seed.wrapping_add(0x9E37_79B9);
    z = (z ^ (z >> 16)).wrapping_mul(0x85EB_CA6B);
    z = (z ^ (z >> 13)).wrapping_mul(0xC2B2_AE35);
    z ^= z >> 16;
    if z == 0 {
        0x6C07_8965
    } else {
        z
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Sources {
    Shared(XorShift32),
    Split {
        count: XorShift32,
        strategy: XorShift32,
    },
}

impl Sources {
    fn count(&mut self) -> &mut XorShift32 {
        match self {
            Sources::Shared(r) => r,
            Sources::Split { count, .. } => count,
        }
    }

    fn strategy(&mut self) -> &mut XorShift32 {
        match self {
            Sources::Shared(r) => r,
            Sources::Split { strategy, .. } => strategy,
        }
    }
}

/// Generator state: map, mixing parameter `b`, current configuration and
/// the xorshift source(s). Cloning snapshots the whole state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChaoticGenerator {
    f: BooleanMap,
    b: u32,
    x: u32,
    sources: Sources,
}

impl ChaoticGenerator {
    /// Two xorshift instances: one seeded with `seed` draws the iteration
    /// count, one seeded with [`derive_seed`]`(seed)` draws the strategy.
    pub fn new(f: BooleanMap, b: u32, x0: Configuration, seed: u32) -> Result<Self> {
        Self::with_seeds(f, b, x0, seed, derive_seed(seed))
    }

    pub fn with_seeds(
        f: BooleanMap,
        b: u32,
        x0: Configuration,
        count_seed: u32,
        strategy_seed: u32,
    ) -> Result<Self> {
        let sources = Sources::Split {
            count: XorShift32::new(count_seed)?,
            strategy: XorShift32::new(strategy_seed)?,
        };
        Self::assemble(f, b, x0, sources)
    }

    /// A single xorshift instance drives both draws.
    pub fn shared(f: BooleanMap, b: u32, x0: Configuration, seed: u32) -> Result<Self> {
        Self::assemble(f, b, x0, Sources::Shared(XorShift32::new(seed)?))
    }

    fn assemble(f: BooleanMap, b: u32, x0: Configuration, sources: Sources) -> Result<Self> {
        if b == 0 || b == u32::MAX {
            return Err(invalid(format!(
                "mixing parameter b = {b} outside [1, 2^32 - 2]"
            )));
        }
        if x0.n() != f.n() {
            return Err(invalid(
                "initial configuration and map disagree on component count",
            ));
        }
        Ok(Self {
            f,
            b,
            x: x0.bits(),
            sources,
        })
    }

    pub fn map(&self) -> &BooleanMap {
        &self.f
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    pub fn current(&self) -> Configuration {
        Configuration::new(self.f.n(), self.x).expect("state stays in range")
    }

    /// Next output together with the number of updates performed.
    pub fn next_with_count(&mut self) -> (Configuration, u32) {
        let k = self.b + self.sources.count().uniform_nonzero(self.b + 1);
        let n = self.f.n() as u32;
        let mut x = self.x;
        for _ in 0..k {
            let s = self.sources.strategy().uniform_nonzero(n);
            x = self.f.update_raw(s as usize, x);
        }
        self.x = x;
        (self.current(), k)
    }

    pub fn next_config(&mut self) -> Configuration {
        self.next_with_count().0
    }

    /// `nbits` bits from successive outputs, `n` bits per output with
    /// `x_1` first, the last output truncated.
    pub fn bitstream(&mut self, nbits: usize) -> BitSequence {
        let n = self.f.n();
        let mut bits = BitSequence::default();
        while bits.len() < nbits {
            let x = self.next_config().bits();
            for i in 1..=n {
                bits.push(x & crate::network::component_mask(n, i) != 0);
            }
        }
        bits.truncate(nbits);
        bits
    }
}

/// Pure form of one generator call: `(output, advanced state)`.
pub fn prng_next(state: &ChaoticGenerator) -> (Configuration, ChaoticGenerator) {
    let mut next = state.clone();
    let x = next.next_config();
    (x, next)
}
