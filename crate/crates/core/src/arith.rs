//! Möbius function and Mertens partial sums from a linear sieve.
//!
//! Memory per table entry is 9 bytes: one `i8` for μ, one `i32` for the
//! Mertens prefix and one `u32` smallest prime factor. The default cap of
//! 10^8 entries therefore bounds a table at roughly 900 MB.

use crate::error::{Error, Result};

/// Default upper bound on [`MoebiusTable::sieve`] limits.
pub const DEFAULT_MAX_LIMIT: usize = 100_000_000;

/// Sieved μ(n), M(n) = Σ_{a≤n} μ(a) and the smallest prime factor for
/// `1 ≤ n ≤ limit`. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoebiusTable {
    limit: usize,
    // index 0 is unused padding so that `mu[n]` is μ(n)
    mu: Vec<i8>,
    mertens: Vec<i32>,
    spf: Vec<u32>,
}

impl MoebiusTable {
    /// Sieves up to `limit` under the default cap.
    pub fn sieve(limit: usize) -> Result<Self> {
        Self::sieve_with_cap(limit, DEFAULT_MAX_LIMIT)
    }

    pub fn sieve_with_cap(limit: usize, max_limit: usize) -> Result<Self> {
        if limit == 0 {
            return Err(Error::rejected("sieve limit must be at least 1"));
        }
        if limit > max_limit {
            return Err(Error::rejected(format!(
                "sieve limit {limit} exceeds the configured maximum {max_limit}"
            )));
        }
        if limit > u32::MAX as usize {
            return Err(Error::rejected("sieve limit must fit in 32 bits"));
        }

        let mut mu = vec![0i8; limit + 1];
        let mut spf = vec![0u32; limit + 1];
        let mut primes: Vec<u32> = Vec::new();
        mu[1] = 1;
        spf[1] = 1;
        for i in 2..=limit {
            if spf[i] == 0 {
                spf[i] = i as u32;
                mu[i] = -1;
                primes.push(i as u32);
            }
            let pi = spf[i];
            for &p in &primes {
                let ip = i * p as usize;
                if p > pi || ip > limit {
                    break;
                }
                spf[ip] = p;
                mu[ip] = if p == pi { 0 } else { -mu[i] };
            }
        }

        let mut mertens = vec![0i32; limit + 1];
        let mut acc = 0i32;
        for n in 1..=limit {
            acc += mu[n] as i32;
            mertens[n] = acc;
        }

        Ok(Self {
            limit,
            mu,
            mertens,
            spf,
        })
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    /// μ(n). Panics if `n` is 0 or beyond the limit.
    #[inline]
    pub fn mu(&self, n: usize) -> i8 {
        assert!(n >= 1 && n <= self.limit, "mu({n}) outside table");
        self.mu[n]
    }

    /// μ(1..=limit) as a slice (`mu_values()[0]` is μ(1)).
    pub fn mu_values(&self) -> &[i8] {
        &self.mu[1..]
    }

    /// Smallest prime factor of `n` (1 for `n = 1`).
    #[inline]
    pub fn smallest_prime_factor(&self, n: usize) -> u32 {
        assert!(n >= 1 && n <= self.limit, "spf({n}) outside table");
        self.spf[n]
    }

    /// Prime factorization of `n` as (prime, exponent) pairs.
    pub fn factorize(&self, mut n: usize) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = Vec::new();
        while n > 1 {
            let p = self.smallest_prime_factor(n);
            match out.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => out.push((p, 1)),
            }
            n /= p as usize;
        }
        out
    }

    /// M(n) = Σ_{a≤n} μ(a).
    pub fn mertens(&self, n: usize) -> Result<i64> {
        if n == 0 || n > self.limit {
            return Err(Error::rejected(format!(
                "mertens({n}) outside table range 1..={}",
                self.limit
            )));
        }
        Ok(self.mertens[n] as i64)
    }

    /// All `n ≤ limit` with M(n) = 0, ascending.
    pub fn mertens_zeros(&self) -> Vec<usize> {
        (1..=self.limit).filter(|&n| self.mertens[n] == 0).collect()
    }

    pub(crate) fn require(&self, n: usize, what: &str) -> Result<()> {
        if n > self.limit {
            return Err(Error::rejected(format!(
                "{what} needs a Moebius table up to {n}, but the table stops at {}",
                self.limit
            )));
        }
        Ok(())
    }
}
