//! Deterministic, splittable pseudo-randomness and uniform permutations.
//!
//! Every random quantity in the crate is drawn from an [`RngStream`]. A stream
//! is identified by `(master_seed, substream_index)` and is a SplitMix64-style
//! counter generator: the state advances by a per-stream odd increment
//! (`gamma`) and each output is the avalanche mix of the state.
//!
//! Derivation of a stream, with `mix64` the SplitMix64 finalizer
//! (Stafford variant 13) and `G = 0x9E3779B97F4A7C15`:
//!
//! ```text
//! start = mix64(master_seed + G * (substream_index + 1))
//! gamma = mix_gamma(mix64(start ^ 0xD1B54A32D192ED03))
//! out_k = mix64(start + (k + 1) * gamma)
//! ```
//!
//! Only integer wrapping arithmetic is involved, so streams are bit-identical
//! on every platform.

use crate::error::{Error, Result};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const GAMMA_SALT: u64 = 0xD1B5_4A32_D192_ED03;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

// Odd increment with enough bit transitions to avoid weak Weyl sequences.
fn mix_gamma(z: u64) -> u64 {
    let z = mix64(z) | 1;
    let transitions = (z ^ (z >> 1)).count_ones();
    if transitions < 24 {
        z ^ 0xAAAA_AAAA_AAAA_AAAA
    } else {
        z
    }
}

/// A single-owner deterministic random stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RngStream {
    state: u64,
    gamma: u64,
    master_seed: u64,
    stream_id: u64,
}

/// Derives the stream `substream_index` of `master_seed`.
pub fn rng_stream(master_seed: u64, substream_index: u64) -> RngStream {
    let start = mix64(
        master_seed.wrapping_add(GOLDEN_GAMMA.wrapping_mul(substream_index.wrapping_add(1))),
    );
    let gamma = mix_gamma(start ^ GAMMA_SALT);
    RngStream {
        state: start,
        gamma,
        master_seed,
        stream_id: substream_index,
    }
}

impl RngStream {
    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(self.gamma);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, bound)`, exactly unbiased.
    ///
    /// Multiply-shift with rejection of the short zone (Lemire 2019).
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "below(0)");
        let mut m = (self.next_u64() as u128) * (bound as u128);
        let mut low = m as u64;
        if low < bound {
            let threshold = bound.wrapping_neg() % bound;
            while low < threshold {
                m = (self.next_u64() as u128) * (bound as u128);
                low = m as u64;
            }
        }
        (m >> 64) as u64
    }

    #[inline]
    pub fn index(&mut self, bound: usize) -> usize {
        self.below(bound as u64) as usize
    }

    /// Standard normal draw (Marsaglia polar method).
    pub fn standard_normal(&mut self) -> f64 {
        loop {
            let u = 2.0 * self.next_f64() - 1.0;
            let v = 2.0 * self.next_f64() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                return u * (-2.0 * s.ln() / s).sqrt();
            }
        }
    }

    /// Exponential(1) draw.
    pub fn standard_exponential(&mut self) -> f64 {
        // 1 - U lies in (0, 1]
        -(1.0 - self.next_f64()).ln()
    }
}

/// A bijection of `[0, m)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn identity(m: usize) -> Self {
        Permutation {
            map: (0..m).collect(),
        }
    }

    /// Validates that `map` is a bijection of `[0, map.len())`.
    pub fn from_map(map: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; map.len()];
        for &v in &map {
            if v >= map.len() || seen[v] {
                return Err(Error::param("map", "not a bijection"));
            }
            seen[v] = true;
        }
        Ok(Permutation { map })
    }

    pub fn n_cells(&self) -> usize {
        self.map.len()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.map.len()];
        for (i, &p) in self.map.iter().enumerate() {
            inv[p] = i;
        }
        Permutation { map: inv }
    }

    /// `self ∘ other`, i.e. `i ↦ self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.map.len(), other.map.len());
        Permutation {
            map: other.map.iter().map(|&j| self.map[j]).collect(),
        }
    }

    /// Calls `f` once for each of the `m!` permutations of `[0, m)` (Heap's algorithm).
    pub fn for_each_of(m: usize, mut f: impl FnMut(&[usize])) {
        let mut a: Vec<usize> = (0..m).collect();
        let mut c = vec![0usize; m];
        f(&a);
        let mut i = 1;
        while i < m {
            if c[i] < i {
                if i % 2 == 0 {
                    a.swap(0, i);
                } else {
                    a.swap(c[i], i);
                }
                f(&a);
                c[i] += 1;
                i = 1;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
    }
}

/// Uniform random permutation of `[0, m)` by Fisher–Yates.
pub fn sample_permutation(rng: &mut RngStream, m: usize) -> Result<Permutation> {
    if m == 0 {
        return Err(Error::EmptyDomain);
    }
    let mut map: Vec<usize> = (0..m).collect();
    for i in (1..m).rev() {
        let j = rng.index(i + 1);
        map.swap(i, j);
    }
    Ok(Permutation { map })
}
