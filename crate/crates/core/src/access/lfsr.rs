//! LFSR-driven permutations used for the interleaver banks.

/// 32-bit Fibonacci LFSR with taps at positions 32, 22, 2 and 1
/// (`x^32 + x^22 + x^2 + x + 1`, maximal length).
///
/// The output bit of each step is the bit shifted out at position 32
/// (the least significant bit of the state).
#[derive(Debug, Clone)]
pub struct Lfsr32 {
    state: u32,
}

impl Lfsr32 {
    /// Seeds the register with the low 32 bits of `seed`; a zero state,
    /// which would lock the register, is replaced by 1.
    pub fn new(seed: u64) -> Self {
        let state = seed as u32;
        Lfsr32 {
            state: if state == 0 { 1 } else { state },
        }
    }

    pub fn state(&self) -> u32 {
        self.state
    }

    #[inline]
    pub fn next_bit(&mut self) -> u32 {
        let s = self.state;
        let out = s & 1;
        let feedback = (s ^ (s >> 10) ^ (s >> 30) ^ (s >> 31)) & 1;
        self.state = (s >> 1) | (feedback << 31);
        out
    }

    /// 32 successive output bits, first bit in the most significant position.
    pub fn next_u32(&mut self) -> u32 {
        (0..32).fold(0u32, |acc, _| (acc << 1) | self.next_bit())
    }

    /// Uniform integer in `[0, range)` by rejection of draws at or above the
    /// largest multiple of `range` that fits in 32 bits.
    pub fn below(&mut self, range: u32) -> u32 {
        assert!(range > 0);
        let limit = (1u64 << 32) / u64::from(range) * u64::from(range);
        loop {
            let x = u64::from(self.next_u32());
            if x < limit {
                return (x % u64::from(range)) as u32;
            }
        }
    }
}

/// Pseudo-random permutation of `0..n` from a Fisher-Yates shuffle driven by
/// [`Lfsr32`]. Position `r - 1` is swapped with a uniform draw from `[0, r)`
/// for `r = n, n - 1, ..., 2`.
pub fn lfsr_permutation(seed: u64, n: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut lfsr = Lfsr32::new(seed);
    for r in (2..=n).rev() {
        let j = lfsr.below(r as u32) as usize;
        perm.swap(r - 1, j);
    }
    perm
}

/// Interleaver seed for user set `n_set` and subgraph `n_sub` (both 1-based;
/// the interleaved uniform scheme uses `n_sub = 0`).
pub fn seed_for(n_set: u64, n_sub: u64, master_seed: u64) -> u64 {
    master_seed
        ^ 0x9E37_79B9_7F4A_7C15u64.wrapping_mul(n_set)
        ^ 0xC2B2_AE3D_27D4_EB4Fu64.wrapping_mul(n_sub)
}
