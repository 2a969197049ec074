//! Exact arithmetic functions: factorization, sum of divisors, totient,
//! and deterministic primality for 64-bit integers.

use crate::error::{Error, Result};
use crate::sieve::SpfTable;

/// Greatest common divisor. `gcd(a, 0) = gcd(0, a) = a`.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp != 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all `u64`.
///
/// The twelve-prime base set is a proven witness set below 3.3 * 10^24,
/// which covers the full 64-bit range.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A positive integer together with its canonical prime-power factorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredInteger {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl FactoredInteger {
    pub fn value(&self) -> u64 {
        self.value
    }

    /// Prime-power factors `(p, e)` with strictly increasing primes.
    /// Empty exactly when the value is 1.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// Re-derives every structural invariant: primes strictly increasing,
    /// each factor prime, exponents positive, product equal to the value.
    pub fn validate(&self) -> Result<()> {
        let mut product: u64 = 1;
        let mut last_p = 0u64;
        for &(p, e) in &self.factors {
            if p <= last_p {
                return Err(Error::Domain(format!("primes not increasing at {p}")));
            }
            if !is_prime(p) {
                return Err(Error::Domain(format!("{p} is not prime")));
            }
            if e == 0 {
                return Err(Error::Domain(format!("zero exponent on {p}")));
            }
            for _ in 0..e {
                product = product
                    .checked_mul(p)
                    .ok_or(Error::Overflow("factorization product"))?;
            }
            last_p = p;
        }
        if product != self.value {
            return Err(Error::Domain(format!(
                "factor product {product} != value {}",
                self.value
            )));
        }
        Ok(())
    }

    /// Sum of all positive divisors: the product of (p^(e+1) - 1)/(p - 1)
    /// over the prime powers, evaluated with checked arithmetic.
    pub fn sigma(&self) -> Result<u64> {
        let mut acc: u64 = 1;
        for &(p, e) in &self.factors {
            // 1 + p + p^2 + ... + p^e
            let mut term: u64 = 1;
            let mut pw: u64 = 1;
            for _ in 0..e {
                pw = pw.checked_mul(p).ok_or(Error::Overflow("sigma"))?;
                term = term.checked_add(pw).ok_or(Error::Overflow("sigma"))?;
            }
            acc = acc.checked_mul(term).ok_or(Error::Overflow("sigma"))?;
        }
        Ok(acc)
    }

    /// Euler totient: the product of p^(e-1) * (p - 1). Never exceeds the
    /// value itself, so it cannot overflow for a valid factorization.
    pub fn phi(&self) -> u64 {
        let mut acc: u64 = 1;
        for &(p, e) in &self.factors {
            acc *= p - 1;
            for _ in 1..e {
                acc *= p;
            }
        }
        acc
    }
}

/// Factorizes `n >= 1`, using the smallest-prime-factor table when one is
/// supplied and covers `n`, otherwise trial division interleaved with
/// primality checks so that large prime cofactors exit early.
pub fn factorize(n: u64, spf: Option<&SpfTable>) -> Result<FactoredInteger> {
    if n == 0 {
        return Err(Error::Domain("factorize(0)".into()));
    }
    if let Some(table) = spf {
        if n > table.limit() {
            return Err(Error::Precondition(format!(
                "n = {n} exceeds spf table limit {}",
                table.limit()
            )));
        }
        return Ok(FactoredInteger {
            value: n,
            factors: table.factorize(n),
        });
    }

    let mut factors = Vec::new();
    let mut m = n;
    let mut push = |p: u64, m: &mut u64| {
        let mut e = 0u32;
        while *m % p == 0 {
            *m /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((p, e));
        }
    };
    push(2, &mut m);
    push(3, &mut m);
    let mut d: u64 = 5;
    let mut step: u64 = 2; // alternates 5,7,11,13,... (6k +/- 1)
    while d.saturating_mul(d) <= m {
        if m % d == 0 {
            push(d, &mut m);
            if m > 1 && is_prime(m) {
                break;
            }
        }
        d += step;
        step = 6 - step;
    }
    if m > 1 {
        factors.push((m, 1));
    }
    Ok(FactoredInteger { value: n, factors })
}

/// All primes `<= limit` by a plain sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorize_examples() {
        assert!(factorize(0, None).is_err());
        assert_eq!(factorize(1, None).unwrap().factors(), &[]);
        assert_eq!(factorize(30, None).unwrap().factors(), &[(2, 1), (3, 1), (5, 1)]);
        assert_eq!(factorize(60, None).unwrap().factors(), &[(2, 2), (3, 1), (5, 1)]);
        assert_eq!(factorize(1 << 32, None).unwrap().factors(), &[(2, 32)]);
        let big_prime = 18_446_744_073_709_551_557; // largest u64 prime
        assert_eq!(factorize(big_prime, None).unwrap().factors(), &[(big_prime, 1)]);
    }

    #[test]
    fn factorizations_validate() {
        for n in 1..2000u64 {
            factorize(n, None).unwrap().validate().unwrap();
        }
    }

    #[test]
    fn sigma_examples() {
        let sigma = |n| factorize(n, None).unwrap().sigma().unwrap();
        assert_eq!(sigma(1), 1);
        assert_eq!(sigma(30), 72); // 1+2+3+5+6+10+15+30
        assert_eq!(sigma(60), 168);
        assert_eq!(sigma(31), 32);
    }

    #[test]
    fn phi_examples() {
        let phi = |n| factorize(n, None).unwrap().phi();
        assert_eq!(phi(1), 1);
        assert_eq!(phi(30), 8);
        assert_eq!(phi(31), 30);
    }

    #[test]
    fn sigma_overflow_reported() {
        // sigma(2^63) = 2^64 - 1 is the largest power-of-two case that fits.
        let g = factorize(1 << 63, None).unwrap();
        assert_eq!(g.sigma().unwrap(), u64::MAX);
        // sigma(2^64 - 1) ~ 3.1e19 does not fit.
        let f = factorize(u64::MAX, None).unwrap(); // 3 * 5 * 17 * 257 * 641 * 65537 * 6700417
        assert!(matches!(f.sigma(), Err(Error::Overflow(_))));
    }

    #[test]
    fn sigma_by_trial_division_oracle() {
        // Independent of the multiplicative formula: literal divisor sum.
        let naive = |n: u64| (1..=n).filter(|d| n % d == 0).sum::<u64>();
        for n in 1..=500 {
            assert_eq!(factorize(n, None).unwrap().sigma().unwrap(), naive(n), "n={n}");
        }
    }

    #[test]
    fn phi_by_counting_units_oracle() {
        let naive = |n: u64| (1..=n).filter(|&a| gcd(a, n) == 1).count() as u64;
        for n in 1..=500 {
            assert_eq!(factorize(n, None).unwrap().phi(), naive(n), "n={n}");
        }
    }

    #[test]
    fn miller_rabin_matches_sieve() {
        let primes = primes_up_to(10_000);
        let mut idx = 0;
        for n in 0..=10_000u64 {
            let in_list = idx < primes.len() && primes[idx] == n;
            assert_eq!(is_prime(n), in_list, "n={n}");
            if in_list {
                idx += 1;
            }
        }
    }

    #[test]
    fn miller_rabin_known_large() {
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(18_446_744_073_709_551_555));
        // Carmichael numbers.
        assert!(!is_prime(561));
        assert!(!is_prime(41041));
        assert!(!is_prime(825_265));
    }
}
