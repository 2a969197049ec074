//! Streaming driver for progression scans.
//!
//! Race and scan operations consume values f(q*m + k) for m = 1..=m_hi and
//! offsets k in [0, q). Blocks of m map to argument segments [q*a, q*b),
//! which are sieved independently (optionally on worker threads) and always
//! handed to the consumer in index order, so exact prefix accumulations and
//! compensated float sums stay deterministic regardless of thread count.

use std::thread;

use crate::arith::primes_up_to;
use crate::error::{Error, Result};
use crate::sieve::{sieve_phi_into, sieve_sigma_into, MAX_SEGMENT_LEN, MAX_SIEVE_VALUE};

/// Which arithmetic function a stream sieves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    Sigma,
    Phi,
}

/// One in-order block of progression indices with its sieved values.
pub struct MBlock<'a> {
    q: u64,
    m_start: u64,
    m_end: u64,
    arg_lo: u64,
    values: &'a [u64],
}

impl MBlock<'_> {
    /// First progression index covered (inclusive).
    pub fn m_start(&self) -> u64 {
        self.m_start
    }

    /// One past the last progression index covered.
    pub fn m_end(&self) -> u64 {
        self.m_end
    }

    /// f(q*m + k) for m in [m_start, m_end) and 0 <= k < q.
    #[inline]
    pub fn value(&self, m: u64, k: u64) -> u64 {
        debug_assert!(m >= self.m_start && m < self.m_end && k < self.q);
        self.values[(self.q * m + k - self.arg_lo) as usize]
    }
}

/// Number of sieve workers: SIGMA_RACE_THREADS when set, otherwise the
/// machine's available parallelism.
pub fn worker_threads() -> Result<usize> {
    let available = thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    match std::env::var("SIGMA_RACE_THREADS") {
        Ok(raw) => parse_thread_cap(&raw),
        Err(std::env::VarError::NotPresent) => Ok(available),
        Err(std::env::VarError::NotUnicode(_)) => {
            Err(Error::Config("SIGMA_RACE_THREADS is not valid UTF-8".into()))
        }
    }
}

fn parse_thread_cap(raw: &str) -> Result<usize> {
    match raw.trim().parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(Error::Config(format!(
            "SIGMA_RACE_THREADS must be a positive integer, got {raw:?}"
        ))),
    }
}

fn sieve_block(q: u64, a: u64, b: u64, kind: TableKind, phi_primes: &[u64]) -> Vec<u64> {
    let (lo, hi) = (q * a, q * b);
    let mut values = vec![0u64; (hi - lo) as usize];
    match kind {
        TableKind::Sigma => sieve_sigma_into(lo, hi, &mut values),
        TableKind::Phi => {
            let mut rem = vec![0u64; values.len()];
            sieve_phi_into(lo, hi, phi_primes, &mut values, &mut rem);
        }
    }
    values
}

/// Streams blocks covering m in [1, m_hi], sieving `segment_len` arguments
/// at a time on up to `threads` workers, and calls `consume` for each block
/// in ascending order.
pub fn stream_m_blocks<F>(
    q: u64,
    m_hi: u64,
    segment_len: u64,
    threads: usize,
    kind: TableKind,
    mut consume: F,
) -> Result<()>
where
    F: FnMut(&MBlock<'_>) -> Result<()>,
{
    if q == 0 {
        return Err(Error::Domain("progression modulus q = 0".into()));
    }
    if m_hi == 0 {
        return Err(Error::Precondition("stream needs m_hi >= 1".into()));
    }
    if segment_len == 0 || threads == 0 {
        return Err(Error::Config("segment length and threads must be positive".into()));
    }
    let arg_hi = q
        .checked_mul(m_hi + 1)
        .filter(|&v| v <= MAX_SIEVE_VALUE)
        .ok_or(Error::Capacity {
            requested: u64::MAX,
            limit: MAX_SIEVE_VALUE,
        })?;
    let block_m = (segment_len / q).max(1);
    if q * block_m > MAX_SEGMENT_LEN {
        return Err(Error::Capacity {
            requested: q * block_m,
            limit: MAX_SEGMENT_LEN,
        });
    }
    let phi_primes = match kind {
        TableKind::Phi => primes_up_to((arg_hi - 1).isqrt()),
        TableKind::Sigma => Vec::new(),
    };

    let mut blocks = Vec::new();
    let mut a = 1u64;
    while a <= m_hi {
        let b = (a + block_m).min(m_hi + 1);
        blocks.push((a, b));
        a = b;
    }

    for batch in blocks.chunks(threads) {
        let sieved: Vec<Vec<u64>> = if batch.len() == 1 {
            vec![sieve_block(q, batch[0].0, batch[0].1, kind, &phi_primes)]
        } else {
            thread::scope(|s| {
                let handles: Vec<_> = batch
                    .iter()
                    .map(|&(a, b)| {
                        let primes = &phi_primes;
                        s.spawn(move || sieve_block(q, a, b, kind, primes))
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("sieve worker panicked"))
                    .collect()
            })
        };
        for (&(a, b), values) in batch.iter().zip(&sieved) {
            consume(&MBlock {
                q,
                m_start: a,
                m_end: b,
                arg_lo: q * a,
                values,
            })?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::factorize;

    fn collect_sigma(q: u64, m_hi: u64, k: u64, segment_len: u64, threads: usize) -> Vec<u64> {
        let mut out = Vec::new();
        stream_m_blocks(q, m_hi, segment_len, threads, TableKind::Sigma, |block| {
            for m in block.m_start()..block.m_end() {
                out.push(block.value(m, k));
            }
            Ok(())
        })
        .unwrap();
        out
    }

    #[test]
    fn blocks_cover_range_in_order() {
        // Tiny segments force many blocks; values must match direct sigma.
        let got = collect_sigma(30, 100, 7, 64, 1);
        for (i, &v) in got.iter().enumerate() {
            let m = i as u64 + 1;
            let expect = factorize(30 * m + 7, None).unwrap().sigma().unwrap();
            assert_eq!(v, expect, "m={m}");
        }
        assert_eq!(got.len(), 100);
    }

    #[test]
    fn segment_length_and_threads_do_not_change_results() {
        let a = collect_sigma(30, 500, 11, 64, 1);
        let b = collect_sigma(30, 500, 11, 1 << 20, 1);
        let c = collect_sigma(30, 500, 11, 64, 4);
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn phi_stream_matches_factorization() {
        let mut out = Vec::new();
        stream_m_blocks(30, 200, 128, 2, TableKind::Phi, |block| {
            for m in block.m_start()..block.m_end() {
                out.push((block.value(m, 0), block.value(m, 1)));
            }
            Ok(())
        })
        .unwrap();
        for (i, &(base, off)) in out.iter().enumerate() {
            let m = i as u64 + 1;
            assert_eq!(base, factorize(30 * m, None).unwrap().phi(), "m={m}");
            assert_eq!(off, factorize(30 * m + 1, None).unwrap().phi(), "m={m}");
        }
    }

    #[test]
    fn rejects_zero_parameters() {
        assert!(stream_m_blocks(0, 10, 64, 1, TableKind::Sigma, |_| Ok(())).is_err());
        assert!(stream_m_blocks(30, 0, 64, 1, TableKind::Sigma, |_| Ok(())).is_err());
        assert!(stream_m_blocks(30, 10, 0, 1, TableKind::Sigma, |_| Ok(())).is_err());
        assert!(stream_m_blocks(30, 10, 64, 0, TableKind::Sigma, |_| Ok(())).is_err());
    }

    #[test]
    fn thread_cap_parsing() {
        assert_eq!(parse_thread_cap("4").unwrap(), 4);
        assert_eq!(parse_thread_cap(" 2 ").unwrap(), 2);
        assert!(parse_thread_cap("0").is_err());
        assert!(parse_thread_cap("-1").is_err());
        assert!(parse_thread_cap("many").is_err());
    }
}
