//! Rank over the rationals by multi-modular Monte Carlo.
//!
//! A prime `p` can only under-report the rational rank `r` (never exceed it),
//! and it does so only when `p` divides every nonzero `r x r` minor, in
//! particular one fixed nonzero minor `D`. By Hadamard's bound
//! `log2 |D| <= (r/2) log2 w` for a matrix with entries in `{-1, 0, 1}` and at
//! most `w` nonzeros per column, so at most `(r/2) log2(w) / 29` primes of the
//! sampling range `[2^29, 2^31)` are bad. That range holds about `7.3e7`
//! primes, so a single sample is bad with probability below
//! `r log2(w) / 4.2e9`; the result is wrong only if every sampled prime is
//! bad. For the largest matrices built here (`r` near `4e4`, `w <= 8`) the
//! failure probability is below `1e-9`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::{is_prime, PrimeField};
use super::rank::gfp_rank;
use super::sparse::SparseIntMatrix;

const LOW: u64 = 1 << 29;
const HIGH: u64 = 1 << 31;

/// Deterministic stream of distinct random primes in `[2^29, 2^31)`.
pub struct PrimeSampler {
    rng: ChaCha8Rng,
    seen: Vec<u32>,
}

impl PrimeSampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            seen: Vec::new(),
        }
    }

    pub fn next_prime(&mut self) -> PrimeField {
        loop {
            let candidate = self.rng.gen_range(LOW..HIGH) | 1;
            if candidate < HIGH && is_prime(candidate) && !self.seen.contains(&(candidate as u32)) {
                self.seen.push(candidate as u32);
                return PrimeField::new(candidate).expect("sampled value is prime");
            }
        }
    }
}

/// Rational rank: maximum of `gfp_rank` over random large primes, stopping
/// once two distinct primes attain the running maximum.
pub fn rational_rank(m: &SparseIntMatrix, seed: u64) -> usize {
    if m.is_zero() {
        return 0;
    }
    let mut primes = PrimeSampler::new(seed);
    let mut best = 0;
    let mut hits = 0;
    while hits < 2 {
        let p = primes.next_prime();
        let r = gfp_rank(m, p);
        if r > best {
            best = r;
            hits = 1;
        } else if r == best {
            hits += 1;
        }
    }
    best
}
