//! Quadratic weighted bounds on raw divisor sums and the crossover
//! inequality between them.
//!
//! For x >= 1000 the partial sums satisfy
//!   sum_{m<=x} sigma(30m)   > 15 beta_0 x^2 - 2000 x ln(30x)
//!   sum_{m<=x} sigma(30m+k) < 15 beta_k x^2 + 100 x ln(30x+k)
//! and the lower bound strictly exceeds every upper bound, which is what
//! reduces the race theorem to a finite check. Sums are exact integers;
//! only the bound side is floating point.

use crate::congruence::{RaceModulus, COPRIME_RESIDUES_MOD_30};
use crate::error::Result;
use crate::race::validate_grid;
use crate::race::residual::ENVELOPE_MIN_X;
use crate::stream::{stream_m_blocks, worker_threads, TableKind};

/// Upper-bound and crossover outcome for one offset k at one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsOffset {
    pub k: u64,
    /// Exact sum_{m<=x} sigma(30m+k).
    pub sigma_sum: u128,
    /// 15 beta_k x^2 + 100 x ln(30x+k).
    pub upper_bound: f64,
    pub upper_ok: bool,
    /// Lower bound for k=0 minus this offset's upper bound.
    pub crossover_gap: f64,
    pub crossover_ok: bool,
}

/// All bound checks at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsSample {
    pub x: u64,
    /// Exact sum_{m<=x} sigma(30m).
    pub sigma_sum_multiple: u128,
    /// 15 beta_0 x^2 - 2000 x ln(30x).
    pub lower_bound: f64,
    pub lower_ok: bool,
    pub offsets: Vec<BoundsOffset>,
}

impl BoundsSample {
    pub fn pass(&self) -> bool {
        self.lower_ok && self.offsets.iter().all(|o| o.upper_ok && o.crossover_ok)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedBoundsReport {
    pub q: u64,
    pub samples: Vec<BoundsSample>,
    pub all_pass: bool,
}

/// Verifies the lower bound, the eight upper bounds, and the eight
/// crossover inequalities at every grid point in one streaming pass.
pub fn check_weighted_bounds(grid: &[u64], segment_len: u64) -> Result<WeightedBoundsReport> {
    validate_grid(grid, ENVELOPE_MIN_X)?;
    let base = RaceModulus::new(30, 0)?;
    let beta0 = base.beta_closed()?.numeric();
    let betas: Vec<(u64, f64)> = COPRIME_RESIDUES_MOD_30
        .iter()
        .map(|&k| Ok((k, RaceModulus::new(30, k)?.beta_closed()?.numeric())))
        .collect::<Result<_>>()?;
    let threads = worker_threads()?;
    let x_max = *grid.last().unwrap();

    let mut sum0: u128 = 0;
    let mut sums = [0u128; 8];
    let mut samples = Vec::with_capacity(grid.len());
    let mut next_grid = 0usize;
    stream_m_blocks(30, x_max, segment_len, threads, TableKind::Sigma, |block| {
        for m in block.m_start()..block.m_end() {
            sum0 += block.value(m, 0) as u128;
            for (i, &(k, _)) in betas.iter().enumerate() {
                sums[i] += block.value(m, k) as u128;
            }
            if next_grid < grid.len() && grid[next_grid] == m {
                samples.push(sample_at(m, sum0, &sums, beta0, &betas));
                next_grid += 1;
            }
        }
        Ok(())
    })?;

    let all_pass = samples.iter().all(BoundsSample::pass);
    Ok(WeightedBoundsReport {
        q: 30,
        samples,
        all_pass,
    })
}

fn sample_at(x: u64, sum0: u128, sums: &[u128; 8], beta0: f64, betas: &[(u64, f64)]) -> BoundsSample {
    let xf = x as f64;
    let lower_bound = 15.0 * beta0 * xf * xf - 2000.0 * xf * (30.0 * xf).ln();
    let lower_ok = sum0 as f64 > lower_bound;
    let offsets = betas
        .iter()
        .enumerate()
        .map(|(i, &(k, beta_k))| {
            let upper_bound = 15.0 * beta_k * xf * xf + 100.0 * xf * (30.0 * xf + k as f64).ln();
            let crossover_gap = lower_bound - upper_bound;
            BoundsOffset {
                k,
                sigma_sum: sums[i],
                upper_bound,
                upper_ok: (sums[i] as f64) < upper_bound,
                crossover_gap,
                crossover_ok: crossover_gap > 0.0,
            }
        })
        .collect();
    BoundsSample {
        x,
        sigma_sum_multiple: sum0,
        lower_bound,
        lower_ok,
        offsets,
    }
}
