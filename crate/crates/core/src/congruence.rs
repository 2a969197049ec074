//! Congruence solution counts and their Euler-product constants.
//!
//! For a progression q*m + k, B(d) counts the residues x mod d solving
//! q*x + k = 0 (mod d). B is multiplicative by the Chinese remainder
//! theorem, and the density constant beta = sum B(d)/d^2 has an exact
//! closed form as a rational multiple of pi^2: primes away from q
//! contribute the zeta(2) Euler product, primes dividing q a small
//! rational local factor.

use crate::arith::{factorize, gcd};
use crate::error::{Error, Result};
use crate::kahan::KahanSum;
use crate::rational::Rational;

/// pi^2 to 30 significant digits, the only transcendental constant used.
pub const PI_SQUARED: f64 = 9.86960440108935861883449099988;

/// Largest d accepted by the brute-force oracle.
pub const BRUTEFORCE_LIMIT: u64 = 1_000_000;

/// A progression q*m + k with 0 <= k < q. The classic race fixes q = 30 and
/// k = 0 or one of the eight residues coprime to 30; the machinery here
/// works for any pair, including non-coprime offsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RaceModulus {
    q: u64,
    k: u64,
}

/// The eight residues mod 30 coprime to 30.
pub const COPRIME_RESIDUES_MOD_30: [u64; 8] = [1, 7, 11, 13, 17, 19, 23, 29];

impl RaceModulus {
    /// Builds a modulus, reducing k mod q.
    pub fn new(q: u64, k: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::Domain("progression modulus q = 0".into()));
        }
        Ok(RaceModulus { q, k: k % q })
    }

    /// The nine mod-30 moduli raced here: 30m plus 30m+k for each coprime k.
    pub fn mod_30_moduli() -> Vec<RaceModulus> {
        let mut all = vec![RaceModulus { q: 30, k: 0 }];
        all.extend(COPRIME_RESIDUES_MOD_30.iter().map(|&k| RaceModulus { q: 30, k }));
        all
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// Least upper bound for B(d) over all d: gcd(q, k), reading gcd(q, 0)
    /// as q. For q = 30 this gives B_0(d) <= 30 and B_k(d) <= 1.
    pub fn solution_bound(&self) -> u64 {
        gcd(self.q, self.k)
    }

    /// Number of residues x mod d with q*x + k = 0 (mod d).
    ///
    /// Closed form: the linear congruence has gcd(q, d) solutions when
    /// gcd(q, d) divides k and none otherwise. Reproduces the prime-power
    /// special cases B_0(p^a) = p and B_k(p^a) = 0 for p in {2, 3, 5}, and
    /// B(p^a) = 1 for p not dividing 30.
    pub fn count_solutions(&self, d: u64) -> Result<u64> {
        if d == 0 {
            return Err(Error::Domain("congruence modulus d = 0".into()));
        }
        let g = gcd(self.q, d);
        Ok(if self.k % g == 0 { g } else { 0 })
    }

    /// Independent oracle for `count_solutions`: a literal loop over all
    /// residues x in [0, d). Test-scale only (d <= 10^6).
    pub fn count_solutions_bruteforce(&self, d: u64) -> Result<u64> {
        if d == 0 {
            return Err(Error::Domain("congruence modulus d = 0".into()));
        }
        if d > BRUTEFORCE_LIMIT {
            return Err(Error::Precondition(format!(
                "brute-force oracle capped at d <= {BRUTEFORCE_LIMIT}, got {d}"
            )));
        }
        let mut count = 0u64;
        for x in 0..d {
            // u128 keeps q*x exact even for extreme progression moduli.
            if (self.q as u128 * x as u128 + self.k as u128) % d as u128 == 0 {
                count += 1;
            }
        }
        Ok(count)
    }

    /// Exact Euler-product evaluation of beta = sum_d B(d)/d^2 as a
    /// rational multiple of pi^2.
    ///
    /// Primes p not dividing q contribute (1 - p^-2)^-1, which assembled
    /// over all p is zeta(2) = pi^2/6; each prime p | q replaces that
    /// factor with the local series 1 + sum_a B(p^a)/p^(2a) summed in
    /// closed rational form. For q = 30 the local factors are 5/3, 11/8,
    /// 29/24 (k = 0), giving 319/1080 pi^2, and collapse to 1 for coprime
    /// k, giving 8/75 pi^2.
    pub fn beta_closed(&self) -> Result<EulerConstant> {
        const Q_LIMIT: u64 = 1_000_000;
        if self.q > Q_LIMIT {
            return Err(Error::Precondition(format!(
                "beta_closed factors q; capped at q <= {Q_LIMIT}"
            )));
        }
        // Start from zeta(2) = pi^2/6 over all primes.
        let mut coefficient = Rational::new(1, 6)?;
        for &(p, e) in factorize(self.q, None)?.factors() {
            let p = p as i128;
            // Exponent cap on the local series: min(e, v_p(k)), infinite for k = 0.
            let (cap, full_tail) = if self.k == 0 {
                (e, true)
            } else {
                let mut v = 0u32;
                let mut rem = self.k;
                while v < e && rem % (p as u64) == 0 {
                    rem /= p as u64;
                    v += 1;
                }
                // v == e means p^e | k, so the series keeps its infinite tail.
                (v, v == e)
            };
            // local = 1 + sum_{a<=cap} p^-a + [p^e | k] / (p^e (p^2 - 1))
            let mut local = Rational::ONE;
            let mut pw: i128 = 1;
            for _ in 0..cap {
                pw = pw.checked_mul(p).ok_or(Error::Overflow("beta local factor"))?;
                local = local.add(&Rational::new(1, pw)?)?;
            }
            if full_tail {
                let mut pe: i128 = 1;
                for _ in 0..e {
                    pe = pe.checked_mul(p).ok_or(Error::Overflow("beta local factor"))?;
                }
                let den = pe
                    .checked_mul(p * p - 1)
                    .ok_or(Error::Overflow("beta local factor"))?;
                local = local.add(&Rational::new(1, den)?)?;
            }
            // Swap this prime's zeta(2) factor (1 - p^-2)^-1 for the local one.
            let zeta_factor_inv = Rational::new(p * p - 1, p * p)?;
            coefficient = coefficient.mul(&local)?.mul(&zeta_factor_inv)?;
        }
        Ok(EulerConstant::new(coefficient))
    }

    /// Direct truncation of the defining series sum_{d<=depth} B(d)/d^2
    /// with compensated summation. The tail bound uses B(d) <= gcd(q, k)
    /// and sum_{d>D} d^-2 <= 1/D + 1/D^2.
    pub fn beta_series(&self, depth: u64) -> Result<SeriesTruncation> {
        if depth == 0 {
            return Err(Error::Precondition("series depth must be >= 1".into()));
        }
        let mut acc = KahanSum::new();
        for d in 1..=depth {
            let g = gcd(self.q, d);
            if self.k % g == 0 {
                acc.add(g as f64 / (d as f64 * d as f64));
            }
        }
        let d = depth as f64;
        let tail_bound = self.solution_bound() as f64 * (1.0 / d + 1.0 / (d * d));
        Ok(SeriesTruncation {
            modulus: *self,
            depth,
            partial: acc.value(),
            tail_bound,
        })
    }
}

impl std::fmt::Display for RaceModulus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.k == 0 {
            write!(f, "{}m", self.q)
        } else {
            write!(f, "{}m+{}", self.q, self.k)
        }
    }
}

/// An exact Euler-product constant beta = coefficient * pi^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerConstant {
    coefficient: Rational,
    numeric: f64,
}

impl EulerConstant {
    pub fn new(coefficient: Rational) -> Self {
        EulerConstant {
            numeric: coefficient.to_f64() * PI_SQUARED,
            coefficient,
        }
    }

    /// Exact rational multiplier of pi^2.
    pub fn coefficient(&self) -> Rational {
        self.coefficient
    }

    /// coefficient * pi^2 in double precision.
    pub fn numeric(&self) -> f64 {
        self.numeric
    }
}

/// A truncated evaluation of the beta series with a proven tail bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesTruncation {
    pub modulus: RaceModulus,
    pub depth: u64,
    pub partial: f64,
    pub tail_bound: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(q: u64, k: u64) -> RaceModulus {
        RaceModulus::new(q, k).unwrap()
    }

    #[test]
    fn count_solutions_prime_power_cases() {
        assert_eq!(m(30, 0).count_solutions(4).unwrap(), 2);
        assert_eq!(m(30, 1).count_solutions(2).unwrap(), 0);
        assert_eq!(m(30, 0).count_solutions(8).unwrap(), 2);
        assert_eq!(m(30, 7).count_solutions(1).unwrap(), 1);
        // B_0(p^a) = p and B_k(p^a) = 0 for p in {2, 3, 5}.
        for p in [2u64, 3, 5] {
            for a in 1..=5u32 {
                let d = p.pow(a);
                assert_eq!(m(30, 0).count_solutions(d).unwrap(), p);
                for &k in &COPRIME_RESIDUES_MOD_30 {
                    assert_eq!(m(30, k).count_solutions(d).unwrap(), 0);
                }
            }
        }
        // B(p^a) = 1 for p not dividing 30.
        for p in [7u64, 11, 13, 101] {
            for a in 1..=3u32 {
                let d = p.pow(a);
                assert_eq!(m(30, 0).count_solutions(d).unwrap(), 1);
                assert_eq!(m(30, 7).count_solutions(d).unwrap(), 1);
            }
        }
        assert!(m(30, 0).count_solutions(0).is_err());
    }

    #[test]
    fn bruteforce_examples() {
        assert_eq!(m(30, 1).count_solutions_bruteforce(7).unwrap(), 1);
        assert_eq!(m(30, 0).count_solutions_bruteforce(30).unwrap(), 30);
        assert_eq!(m(30, 11).count_solutions_bruteforce(1).unwrap(), 1);
        assert!(m(30, 1).count_solutions_bruteforce(BRUTEFORCE_LIMIT + 1).is_err());
    }

    #[test]
    fn closed_form_matches_bruteforce_oracle() {
        for modulus in RaceModulus::mod_30_moduli() {
            for d in 1..=2000u64 {
                assert_eq!(
                    modulus.count_solutions(d).unwrap(),
                    modulus.count_solutions_bruteforce(d).unwrap(),
                    "modulus={modulus} d={d}"
                );
            }
        }
        // Non-coprime offsets work too.
        for k in [0u64, 2, 6, 15, 25] {
            for d in 1..=500u64 {
                assert_eq!(
                    m(30, k).count_solutions(d).unwrap(),
                    m(30, k).count_solutions_bruteforce(d).unwrap(),
                    "k={k} d={d}"
                );
            }
        }
    }

    #[test]
    fn beta_closed_mod30_constants() {
        let b0 = m(30, 0).beta_closed().unwrap();
        assert_eq!(b0.coefficient(), Rational::new(319, 1080).unwrap());
        for &k in &COPRIME_RESIDUES_MOD_30 {
            let bk = m(30, k).beta_closed().unwrap();
            assert_eq!(bk.coefficient(), Rational::new(8, 75).unwrap(), "k={k}");
        }
        let trivial = m(1, 0).beta_closed().unwrap();
        assert_eq!(trivial.coefficient(), Rational::new(1, 6).unwrap());
    }

    #[test]
    fn beta_closed_non_coprime_cross_check() {
        // q = 4, k = 2: B(d) = 1 for odd d, 2 for d = 2 mod 4, 0 for 4 | d.
        // Series: sum_odd d^-2 + 2 * sum_{d=2 mod 4} d^-2 = pi^2/8 + pi^2/16.
        let b = m(4, 2).beta_closed().unwrap();
        assert_eq!(b.coefficient(), Rational::new(3, 16).unwrap());
        // q = 12, k = 0: independent check against the truncated series.
        let b = m(12, 0).beta_closed().unwrap();
        let s = m(12, 0).beta_series(200_000).unwrap();
        assert!(s.partial <= b.numeric());
        assert!(s.partial + s.tail_bound >= b.numeric());
    }

    #[test]
    fn beta_series_examples() {
        let s = m(30, 0).beta_series(1).unwrap();
        assert_eq!(s.partial, 1.0); // B(1)/1 = 1
        assert!(m(30, 0).beta_series(0).is_err());

        let b0 = m(30, 0).beta_closed().unwrap().numeric();
        let s0 = m(30, 0).beta_series(100_000).unwrap();
        assert!(s0.partial <= b0);
        assert!(s0.partial + s0.tail_bound >= b0);

        let b7 = m(30, 7).beta_closed().unwrap().numeric();
        let s7 = m(30, 7).beta_series(100_000).unwrap();
        assert!((b7 - s7.partial).abs() <= s7.tail_bound);
    }

    #[test]
    fn solution_bounds() {
        assert_eq!(m(30, 0).solution_bound(), 30);
        for &k in &COPRIME_RESIDUES_MOD_30 {
            assert_eq!(m(30, k).solution_bound(), 1);
        }
        assert_eq!(m(30, 6).solution_bound(), 6);
    }

    #[test]
    fn modulus_construction() {
        assert!(RaceModulus::new(0, 0).is_err());
        assert_eq!(m(30, 31).k(), 1); // reduced mod q
        assert_eq!(m(30, 31).q(), 30);
    }

    #[test]
    fn pi_squared_literal() {
        let from_std = std::f64::consts::PI * std::f64::consts::PI;
        assert!((PI_SQUARED - from_std).abs() < 1e-14);
    }
}
