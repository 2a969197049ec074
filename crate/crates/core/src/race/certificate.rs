//! Exhaustive divisor-sum races with exact integer margins.

use std::time::Instant;

use crate::congruence::RaceModulus;
use crate::error::{Error, Result};
use crate::stream::{stream_m_blocks, worker_threads, TableKind};

/// Outcome of racing sum sigma(qn) against sum sigma(qn+k) for every
/// prefix K <= K_max. Margins are exact 128-bit integers; `verified`
/// means every prefix margin was strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TheoremCertificate {
    pub modulus: RaceModulus,
    pub k_max: u64,
    pub verified: bool,
    /// min over K <= K_max of sum_{n<=K} [sigma(qn) - sigma(qn+k)].
    pub min_margin: i128,
    /// Smallest K attaining min_margin.
    pub argmin_k: u64,
    /// Wall time of the run that produced this certificate.
    pub elapsed_ms: u64,
}

/// Races one offset. Equivalent to `run_races` with a single modulus.
pub fn run_race(m: &RaceModulus, k_max: u64, segment_len: u64) -> Result<TheoremCertificate> {
    Ok(run_races(std::slice::from_ref(m), k_max, segment_len)?.remove(0))
}

/// Races several offsets of one progression modulus in a single streaming
/// pass. Segments are sieved in parallel but consumed in index order, so
/// every prefix margin is inspected exactly.
pub fn run_races(
    moduli: &[RaceModulus],
    k_max: u64,
    segment_len: u64,
) -> Result<Vec<TheoremCertificate>> {
    if moduli.is_empty() {
        return Err(Error::Precondition("no moduli to race".into()));
    }
    let q = moduli[0].q();
    for m in moduli {
        if m.q() != q {
            return Err(Error::Precondition("raced moduli must share one q".into()));
        }
        if m.k() == 0 {
            return Err(Error::Precondition(
                "a race needs a nonzero offset k (qn versus qn+k)".into(),
            ));
        }
    }
    if k_max == 0 {
        return Err(Error::Precondition("race needs K_max >= 1".into()));
    }
    let threads = worker_threads()?;
    let start = Instant::now();

    struct State {
        running: i128,
        min_margin: i128,
        argmin: u64,
    }
    let mut states: Vec<State> = moduli
        .iter()
        .map(|_| State {
            running: 0,
            min_margin: i128::MAX,
            argmin: 0,
        })
        .collect();

    stream_m_blocks(q, k_max, segment_len, threads, TableKind::Sigma, |block| {
        for n in block.m_start()..block.m_end() {
            let base = block.value(n, 0) as i128;
            for (state, modulus) in states.iter_mut().zip(moduli) {
                let diff = base - block.value(n, modulus.k()) as i128;
                state.running = state
                    .running
                    .checked_add(diff)
                    .ok_or(Error::Overflow("race margin accumulator"))?;
                if state.running < state.min_margin {
                    state.min_margin = state.running;
                    state.argmin = n;
                }
            }
        }
        Ok(())
    })?;

    let elapsed_ms = start.elapsed().as_millis() as u64;
    Ok(states
        .into_iter()
        .zip(moduli)
        .map(|(state, modulus)| TheoremCertificate {
            modulus: *modulus,
            k_max,
            verified: state.min_margin > 0,
            min_margin: state.min_margin,
            argmin_k: state.argmin,
            elapsed_ms,
        })
        .collect())
}
