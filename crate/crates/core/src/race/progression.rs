//! Exact counts of progression indices hitting a congruence class.

use crate::arith::gcd;
use crate::congruence::RaceModulus;
use crate::error::{Error, Result};

/// Modular inverse of `a` mod `m` by extended Euclid; requires gcd(a, m) = 1.
fn mod_inverse(a: u64, m: u64) -> u64 {
    debug_assert!(m >= 2 && gcd(a % m, m) == 1);
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    old_s.rem_euclid(m as i128) as u64
}

/// Exact number of integers 1 <= n <= x with q*n + k = 0 (mod d).
///
/// The count never strays from B(d) * x / d by more than B(d): each of the
/// B(d) solution classes mod d contributes x/d plus a term in [-1, 1].
pub fn progression_count(m: &RaceModulus, d: u64, x: u64) -> Result<u64> {
    if d == 0 {
        return Err(Error::Domain("congruence modulus d = 0".into()));
    }
    let (q, k) = (m.q(), m.k());
    let g = gcd(q, d);
    if k % g != 0 {
        return Ok(0);
    }
    // Divide the congruence through by g; the reduced modulus is coprime to q/g.
    let dd = d / g;
    if dd == 1 {
        return Ok(x);
    }
    let qq = (q / g) % dd;
    let rhs = (((d - k % d) % d) / g) % dd;
    let n0 = ((rhs as u128 * mod_inverse(qq, dd) as u128) % dd as u128) as u64;
    // Smallest positive representative of the solution class.
    let first = if n0 == 0 { dd } else { n0 };
    if first > x {
        Ok(0)
    } else {
        Ok((x - first) / dd + 1)
    }
}
