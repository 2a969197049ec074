//! Race analysis: normalized partial sums and their residual envelopes,
//! quadratic weighted bounds, the crossover inequality, exact divisor-sum
//! races, and pointwise sign scans.

mod abel;
mod bounds;
mod certificate;
mod progression;
mod residual;
mod scan;

pub use abel::{abel_identity_check, ABEL_MAX_X};
pub use bounds::{check_weighted_bounds, BoundsOffset, BoundsSample, WeightedBoundsReport};
pub use certificate::{run_race, run_races, TheoremCertificate};
pub use progression::progression_count;
pub use residual::{
    check_envelopes, check_envelopes_many, normalized_sum, EnvelopeReport, ResidualSample,
    ENVELOPE_MIN_X,
};
pub use scan::{pointwise_scan, ExpectedSide, PointwiseScanReport, ScanFunction};

use crate::error::{Error, Result};

/// Default evaluation grid: 64 log-spaced points in [10^3, 10^6].
pub const DEFAULT_GRID_MIN: u64 = 1_000;
pub const DEFAULT_GRID_MAX: u64 = 1_000_000;
pub const DEFAULT_GRID_POINTS: usize = 64;

/// Strictly ascending integer grid of `points` log-spaced values in
/// [min, max], deduplicated after rounding.
pub fn log_spaced_grid(min: u64, max: u64, points: usize) -> Result<Vec<u64>> {
    if min < 1 || max < min || points == 0 {
        return Err(Error::Precondition(format!(
            "grid needs 1 <= min <= max and points >= 1, got [{min}, {max}] x {points}"
        )));
    }
    if points == 1 || min == max {
        return Ok(vec![min]);
    }
    let (lmin, lmax) = ((min as f64).ln(), (max as f64).ln());
    let mut grid: Vec<u64> = (0..points)
        .map(|i| {
            let t = i as f64 / (points - 1) as f64;
            (lmin + t * (lmax - lmin)).exp().round() as u64
        })
        .map(|x| x.clamp(min, max))
        .collect();
    grid.dedup();
    Ok(grid)
}

/// Grids for envelope and bound checks must be nonempty, strictly
/// ascending, and start at or above the lemmas' x >= 1000 threshold.
pub(crate) fn validate_grid(grid: &[u64], min_required: u64) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Precondition("empty evaluation grid".into()));
    }
    if grid[0] < min_required {
        return Err(Error::Precondition(format!(
            "grid starts at {}, below the required minimum {min_required}",
            grid[0]
        )));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("grid must be strictly ascending".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_log_spaced_and_strict() {
        let g = log_spaced_grid(DEFAULT_GRID_MIN, DEFAULT_GRID_MAX, DEFAULT_GRID_POINTS).unwrap();
        assert_eq!(g.len(), 64);
        assert_eq!(g[0], 1_000);
        assert_eq!(*g.last().unwrap(), 1_000_000);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        validate_grid(&g, 1000).unwrap();
    }

    #[test]
    fn grid_validation_errors() {
        assert!(validate_grid(&[], 1000).is_err());
        assert!(validate_grid(&[999], 1000).is_err());
        assert!(validate_grid(&[1000, 1000], 1000).is_err());
        assert!(validate_grid(&[2000, 1500], 1000).is_err());
        validate_grid(&[1000], 1000).unwrap();
    }

    #[test]
    fn tiny_grids() {
        assert_eq!(log_spaced_grid(5, 5, 10).unwrap(), vec![5]);
        assert_eq!(log_spaced_grid(3, 9, 1).unwrap(), vec![3]);
        let g = log_spaced_grid(1, 10, 30).unwrap();
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(log_spaced_grid(0, 5, 3).is_err());
        assert!(log_spaced_grid(10, 5, 3).is_err());
    }
}
