//! Abel (partial) summation identity check.
//!
//! With T(x) = sum_{m<=x} sigma(qm+k)/(qm+k), partial summation gives the
//! exact identity
//!   sum_{m<=x} sigma(qm+k) = (qx + k) T(x) - q sum_{m<=x-1} T(m)
//! for integer x. The left side is an exact integer; the right side is
//! evaluated in compensated doubles and compared at 1e-9 relative.

use crate::congruence::RaceModulus;
use crate::error::{Error, Result};
use crate::kahan::KahanSum;
use crate::stream::{stream_m_blocks, worker_threads, TableKind};

/// Test-scale cap on x.
pub const ABEL_MAX_X: u64 = 10_000;

const REL_TOL: f64 = 1e-9;

/// Verifies the Abel-summation identity at x by computing both sides.
pub fn abel_identity_check(m: &RaceModulus, x: u64) -> Result<bool> {
    if x == 0 || x > ABEL_MAX_X {
        return Err(Error::Precondition(format!(
            "abel identity check accepts 1 <= x <= {ABEL_MAX_X}, got {x}"
        )));
    }
    let (q, k) = (m.q(), m.k());
    let threads = worker_threads()?;

    let mut raw_sum: u128 = 0;
    let mut t = KahanSum::new(); // T(m) running
    let mut t_prefix = KahanSum::new(); // sum of T(1..=x-1)
    stream_m_blocks(q, x, 1 << 16, threads, TableKind::Sigma, |block| {
        for mm in block.m_start()..block.m_end() {
            let arg = q * mm + k;
            let sigma = block.value(mm, k);
            raw_sum += sigma as u128;
            t.add(sigma as f64 / arg as f64);
            if mm < x {
                t_prefix.add(t.value());
            }
        }
        Ok(())
    })?;

    let lhs = raw_sum as f64;
    let rhs = (q * x + k) as f64 * t.value() - q as f64 * t_prefix.value();
    Ok((rhs - lhs).abs() <= REL_TOL * lhs)
}
