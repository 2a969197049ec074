//! Sieved tables of arithmetic functions over contiguous segments.
//!
//! Scans to 3 * 10^8 arguments are covered by fixed-size segments so memory
//! stays flat regardless of range. The baseline sigma sieve enumerates
//! divisor pairs (d, n/d) with d <= sqrt(n), which is correct by
//! construction for any segment; a linear multiplicative sieve is the fast
//! path for whole-range tables starting at 1.

use crate::arith::primes_up_to;
use crate::error::{Error, Result};

/// Default segment length (values per segment) for streaming scans.
pub const DEFAULT_SEGMENT_LEN: u64 = 1 << 20;

/// Hard cap on values per single table allocation.
pub const MAX_SEGMENT_LEN: u64 = 1 << 26;

/// Hard cap on sieved arguments. Keeps every divisor-pair addition and
/// sigma value comfortably inside u64: sigma(n) < n * (ln n + 1), which is
/// below 2^48 for n < 2^42.
pub const MAX_SIEVE_VALUE: u64 = 1 << 42;

fn check_segment(lo: u64, hi: u64) -> Result<()> {
    if lo < 1 {
        return Err(Error::Domain("segment must start at 1 or above".into()));
    }
    if hi <= lo {
        return Err(Error::Domain(format!("empty segment [{lo}, {hi})")));
    }
    if hi - lo > MAX_SEGMENT_LEN {
        return Err(Error::Capacity {
            requested: hi - lo,
            limit: MAX_SEGMENT_LEN,
        });
    }
    if hi > MAX_SIEVE_VALUE {
        return Err(Error::Capacity {
            requested: hi,
            limit: MAX_SIEVE_VALUE,
        });
    }
    Ok(())
}

/// Smallest-prime-factor table for 2 <= n <= limit.
#[derive(Debug, Clone)]
pub struct SpfTable {
    limit: u64,
    spf: Vec<u32>,
}

impl SpfTable {
    pub fn new(limit: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::Domain("spf table needs limit >= 2".into()));
        }
        if limit > u32::MAX as u64 {
            return Err(Error::Capacity {
                requested: limit,
                limit: u32::MAX as u64,
            });
        }
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                let mut j = i * i;
                while j <= n {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        Ok(SpfTable { limit, spf })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Smallest prime factor of n, for 2 <= n <= limit.
    pub fn spf(&self, n: u64) -> Option<u64> {
        if n < 2 || n > self.limit {
            None
        } else {
            Some(self.spf[n as usize] as u64)
        }
    }

    /// Prime-power factorization of 1 <= n <= limit by repeated division.
    pub(crate) fn factorize(&self, n: u64) -> Vec<(u64, u32)> {
        debug_assert!(n >= 1 && n <= self.limit);
        let mut factors = Vec::new();
        let mut m = n;
        while m > 1 {
            let p = self.spf[m as usize] as u64;
            let mut e = 0u32;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        factors
    }
}

/// Sum-of-divisors values over a segment: `values[i] = sigma(lo + i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorSumTable {
    lo: u64,
    values: Vec<u64>,
}

impl DivisorSumTable {
    /// Sieves sigma over `[lo, hi)` by enumerating divisor pairs: for each
    /// d <= sqrt(hi), every multiple m = d * c in the segment with d <= c
    /// receives d + c (just d when m = d^2). Each divisor of each m is
    /// added exactly once.
    pub fn sieve(lo: u64, hi: u64) -> Result<Self> {
        check_segment(lo, hi)?;
        let mut values = vec![0u64; (hi - lo) as usize];
        sieve_sigma_into(lo, hi, &mut values);
        Ok(DivisorSumTable { lo, values })
    }

    /// Fast path for whole-range tables: a linear multiplicative sieve over
    /// `[1, limit]` driven by smallest prime factors. O(limit) additions.
    pub fn sieve_multiplicative(limit: u64) -> Result<Self> {
        let hi = limit.checked_add(1).ok_or(Error::Capacity {
            requested: limit,
            limit: MAX_SEGMENT_LEN,
        })?;
        check_segment(1, hi)?;
        let n = limit as usize;
        let mut sigma = vec![0u64; n + 1];
        // sigma of the smallest-prime-power part p^e || i.
        let mut sp_sigma = vec![0u64; n + 1];
        let mut primes: Vec<usize> = Vec::new();
        sigma[1] = 1;
        sp_sigma[1] = 1;
        for i in 2..=n {
            if sigma[i] == 0 {
                sigma[i] = i as u64 + 1;
                sp_sigma[i] = i as u64 + 1;
                primes.push(i);
            }
            for &p in &primes {
                let f = match i.checked_mul(p) {
                    Some(f) if f <= n => f,
                    _ => break,
                };
                if i % p == 0 {
                    // p stays the smallest prime; its power grows by one.
                    sp_sigma[f] = sp_sigma[i] * p as u64 + 1;
                    sigma[f] = sigma[i] / sp_sigma[i] * sp_sigma[f];
                    break;
                }
                sp_sigma[f] = p as u64 + 1;
                sigma[f] = sigma[i] * (p as u64 + 1);
            }
        }
        sigma.remove(0);
        Ok(DivisorSumTable { lo: 1, values: sigma })
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.lo + self.values.len() as u64
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn get(&self, n: u64) -> Option<u64> {
        if n < self.lo || n >= self.hi() {
            None
        } else {
            Some(self.values[(n - self.lo) as usize])
        }
    }
}

/// Core of the divisor-pair sieve, reused by the streaming driver.
pub(crate) fn sieve_sigma_into(lo: u64, hi: u64, values: &mut [u64]) {
    debug_assert_eq!(values.len() as u64, hi - lo);
    values.fill(0);
    let max_d = (hi - 1).isqrt();
    for d in 1..=max_d {
        // First multiple of d in the segment that is >= d^2; smaller
        // multiples get d as the large half of some earlier pair.
        let first = lo.div_ceil(d).max(d) * d;
        let mut c = first / d;
        let mut idx = match first.checked_sub(lo) {
            Some(off) if first < hi => off as usize,
            _ => continue,
        };
        let step = d as usize;
        if c == d {
            values[idx] += d;
            idx += step;
            c += 1;
        }
        while idx < values.len() {
            values[idx] += d + c;
            idx += step;
            c += 1;
        }
    }
}

/// Euler totient values over a segment: `values[i] = phi(lo + i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TotientTable {
    lo: u64,
    values: Vec<u64>,
}

impl TotientTable {
    /// Sieves phi over `[lo, hi)`: every n starts at n, each prime
    /// p <= sqrt(hi) dividing n contributes the factor (1 - 1/p), and a
    /// leftover cofactor > 1 is a single large prime handled at the end.
    pub fn sieve(lo: u64, hi: u64) -> Result<Self> {
        check_segment(lo, hi)?;
        let primes = primes_up_to((hi - 1).isqrt());
        let mut values = vec![0u64; (hi - lo) as usize];
        let mut rem = vec![0u64; (hi - lo) as usize];
        sieve_phi_into(lo, hi, &primes, &mut values, &mut rem);
        Ok(TotientTable { lo, values })
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.lo + self.values.len() as u64
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn get(&self, n: u64) -> Option<u64> {
        if n < self.lo || n >= self.hi() {
            None
        } else {
            Some(self.values[(n - self.lo) as usize])
        }
    }
}

/// Core of the totient sieve. `primes` must cover sqrt(hi - 1); `rem` is
/// scratch of the same length as `values`.
pub(crate) fn sieve_phi_into(lo: u64, hi: u64, primes: &[u64], values: &mut [u64], rem: &mut [u64]) {
    debug_assert_eq!(values.len() as u64, hi - lo);
    for (i, slot) in values.iter_mut().enumerate() {
        *slot = lo + i as u64;
    }
    rem.copy_from_slice(values);
    for &p in primes {
        if p * p >= hi {
            break;
        }
        let mut m = lo.div_ceil(p) * p;
        while m < hi {
            let i = (m - lo) as usize;
            values[i] -= values[i] / p;
            while rem[i] % p == 0 {
                rem[i] /= p;
            }
            m += p;
        }
    }
    for (i, &r) in rem.iter().enumerate() {
        // Leftover cofactor is prime (all factors <= sqrt were stripped).
        if r > 1 {
            values[i] -= values[i] / r;
        }
    }
}
