//! Normalized partial sums and their residual envelopes.
//!
//! S(x) = sum_{m<=x} sigma(30m)/(30m) grows like beta_0 * x; the residual
//! g(x) = S(x) - beta_0 * x is proven to stay strictly inside
//! (-30 ln(30x) - 30, 30 ln(30x) + 32) for x >= 1000. The offset sums
//! T_k(x) satisfy the analogous bound with h_k(x) strictly inside
//! (-ln(30x+k) - 1, ln(30x+k) + 2). Both envelopes are specific to
//! modulus 30 (they rest on B_0 <= 30 and B_k <= 1), so these checks
//! reject any other q.

use crate::arith::gcd;
use crate::congruence::RaceModulus;
use crate::error::{Error, Result};
use crate::kahan::KahanSum;
use crate::race::validate_grid;
use crate::stream::{stream_m_blocks, worker_threads, TableKind};

/// The lemmas assume x >= 1000; envelope checks enforce it.
pub const ENVELOPE_MIN_X: u64 = 1_000;

/// One evaluation of a normalized sum against its envelope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualSample {
    pub x: u64,
    /// S(x) or T_k(x).
    pub normalized_sum: f64,
    /// beta * x.
    pub beta_term: f64,
    /// normalized_sum - beta_term, i.e. g(x) or h_k(x).
    pub residual: f64,
    pub envelope_lo: f64,
    pub envelope_hi: f64,
}

impl ResidualSample {
    /// Strict envelope compliance.
    pub fn passes(&self) -> bool {
        self.envelope_lo < self.residual && self.residual < self.envelope_hi
    }

    /// Distance from the residual to the nearer envelope edge.
    pub fn slack(&self) -> f64 {
        (self.residual - self.envelope_lo).min(self.envelope_hi - self.residual)
    }
}

/// Envelope compliance over a grid for one modulus.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeReport {
    pub modulus: RaceModulus,
    pub samples: Vec<ResidualSample>,
    pub all_pass: bool,
    pub worst_slack: f64,
}

fn envelope_modulus_supported(m: &RaceModulus) -> Result<()> {
    if m.q() != 30 || (m.k() != 0 && gcd(m.k(), 30) != 1) {
        return Err(Error::Precondition(format!(
            "residual envelopes are proved for 30m and 30m+k with (k,30)=1, not {m}"
        )));
    }
    Ok(())
}

fn envelope(m: &RaceModulus, x: u64) -> (f64, f64) {
    let xf = x as f64;
    if m.k() == 0 {
        let l = (30.0 * xf).ln();
        (-30.0 * l - 30.0, 30.0 * l + 32.0)
    } else {
        let l = (30.0 * xf + m.k() as f64).ln();
        (-l - 1.0, l + 2.0)
    }
}

fn build_sample(m: &RaceModulus, beta_numeric: f64, x: u64, sum: f64) -> ResidualSample {
    let beta_term = beta_numeric * x as f64;
    let (envelope_lo, envelope_hi) = envelope(m, x);
    ResidualSample {
        x,
        normalized_sum: sum,
        beta_term,
        residual: sum - beta_term,
        envelope_lo,
        envelope_hi,
    }
}

fn assemble(modulus: RaceModulus, samples: Vec<ResidualSample>) -> EnvelopeReport {
    let all_pass = samples.iter().all(ResidualSample::passes);
    let worst_slack = samples
        .iter()
        .map(ResidualSample::slack)
        .fold(f64::INFINITY, f64::min);
    EnvelopeReport {
        modulus,
        samples,
        all_pass,
        worst_slack,
    }
}

/// Evaluates several moduli (sharing one q) over one grid in a single
/// streaming pass. Grid entries must be strictly ascending and >= 1000.
pub fn check_envelopes_many(
    moduli: &[RaceModulus],
    grid: &[u64],
    segment_len: u64,
) -> Result<Vec<EnvelopeReport>> {
    if moduli.is_empty() {
        return Err(Error::Precondition("no moduli to check".into()));
    }
    for m in moduli {
        envelope_modulus_supported(m)?;
    }
    validate_grid(grid, ENVELOPE_MIN_X)?;
    let samples = accumulate_samples(moduli, grid, segment_len)?;
    Ok(moduli
        .iter()
        .zip(samples)
        .map(|(m, s)| assemble(*m, s))
        .collect())
}

/// Envelope compliance for one modulus over a grid (Lemma checks for
/// g or h_k). One pass, partial sums reused across grid points.
pub fn check_envelopes(m: &RaceModulus, grid: &[u64], segment_len: u64) -> Result<EnvelopeReport> {
    Ok(check_envelopes_many(std::slice::from_ref(m), grid, segment_len)?.remove(0))
}

/// S(x) or T_k(x) at a single point, with residual and envelope values.
/// Unlike the grid checks this accepts any x >= 1; below 1000 the envelope
/// fields are still filled but carry no pass/fail contract.
pub fn normalized_sum(m: &RaceModulus, x: u64, segment_len: u64) -> Result<ResidualSample> {
    envelope_modulus_supported(m)?;
    if x == 0 {
        return Err(Error::Precondition("normalized sum needs x >= 1".into()));
    }
    let samples = accumulate_samples(std::slice::from_ref(m), &[x], segment_len)?;
    Ok(samples[0][0])
}

/// Shared engine: streams sigma blocks once and snapshots every modulus's
/// compensated sum at each grid point. Returns samples[modulus][grid].
fn accumulate_samples(
    moduli: &[RaceModulus],
    grid: &[u64],
    segment_len: u64,
) -> Result<Vec<Vec<ResidualSample>>> {
    let q = moduli[0].q();
    if moduli.iter().any(|m| m.q() != q) {
        return Err(Error::Precondition("moduli must share one q".into()));
    }
    let betas: Vec<f64> = moduli
        .iter()
        .map(|m| m.beta_closed().map(|b| b.numeric()))
        .collect::<Result<_>>()?;
    let threads = worker_threads()?;
    let x_max = *grid.last().unwrap();

    let mut sums = vec![KahanSum::new(); moduli.len()];
    let mut out: Vec<Vec<ResidualSample>> = vec![Vec::with_capacity(grid.len()); moduli.len()];
    let mut next_grid = 0usize;
    stream_m_blocks(q, x_max, segment_len, threads, TableKind::Sigma, |block| {
        for mm in block.m_start()..block.m_end() {
            for (i, modulus) in moduli.iter().enumerate() {
                let arg = q * mm + modulus.k();
                sums[i].add(block.value(mm, modulus.k()) as f64 / arg as f64);
            }
            if next_grid < grid.len() && grid[next_grid] == mm {
                for (i, modulus) in moduli.iter().enumerate() {
                    out[i].push(build_sample(modulus, betas[i], mm, sums[i].value()));
                }
                next_grid += 1;
            }
        }
        Ok(())
    })?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::DEFAULT_SEGMENT_LEN;

    fn m(q: u64, k: u64) -> RaceModulus {
        RaceModulus::new(q, k).unwrap()
    }

    #[test]
    fn single_point_sums() {
        // S(1) = sigma(30)/30 = 72/30.
        let s = normalized_sum(&m(30, 0), 1, DEFAULT_SEGMENT_LEN).unwrap();
        assert!((s.normalized_sum - 2.4).abs() < 1e-12);
        // T_1(1) = sigma(31)/31 = 32/31.
        let t = normalized_sum(&m(30, 1), 1, DEFAULT_SEGMENT_LEN).unwrap();
        assert!((t.normalized_sum - 32.0 / 31.0).abs() < 1e-12);
        assert!((t.residual - (t.normalized_sum - t.beta_term)).abs() < 1e-12);
    }

    #[test]
    fn residual_inside_envelope_at_1000() {
        let s = normalized_sum(&m(30, 0), 1000, DEFAULT_SEGMENT_LEN).unwrap();
        let log_term = 30.0 * (30_000f64).ln();
        assert!((s.envelope_lo - (-log_term - 30.0)).abs() < 1e-9);
        assert!((s.envelope_hi - (log_term + 32.0)).abs() < 1e-9);
        assert!(s.passes(), "residual {} outside envelope", s.residual);
    }

    #[test]
    fn envelope_grid_small() {
        let grid = [1000u64, 2000, 4000];
        let report = check_envelopes(&m(30, 0), &grid, DEFAULT_SEGMENT_LEN).unwrap();
        assert_eq!(report.samples.len(), 3);
        assert!(report.all_pass);
        assert!(report.worst_slack > 0.0);

        let single = check_envelopes(&m(30, 0), &[1000], DEFAULT_SEGMENT_LEN).unwrap();
        assert_eq!(single.samples.len(), 1);
        assert!(single.all_pass);
    }

    #[test]
    fn many_matches_single() {
        let grid = [1000u64, 3000];
        let both = check_envelopes_many(&[m(30, 0), m(30, 7)], &grid, DEFAULT_SEGMENT_LEN).unwrap();
        let lone = check_envelopes(&m(30, 7), &grid, DEFAULT_SEGMENT_LEN).unwrap();
        assert_eq!(both[1], lone);
    }

    #[test]
    fn preconditions() {
        assert!(check_envelopes(&m(30, 0), &[999], DEFAULT_SEGMENT_LEN).is_err());
        assert!(check_envelopes(&m(30, 0), &[], DEFAULT_SEGMENT_LEN).is_err());
        assert!(check_envelopes(&m(30, 0), &[2000, 1000], DEFAULT_SEGMENT_LEN).is_err());
        // Envelopes are modulus-30 lemmas.
        assert!(check_envelopes(&m(31, 1), &[1000], DEFAULT_SEGMENT_LEN).is_err());
        assert!(check_envelopes(&m(30, 6), &[1000], DEFAULT_SEGMENT_LEN).is_err());
        assert!(normalized_sum(&m(30, 0), 0, DEFAULT_SEGMENT_LEN).is_err());
    }
}
