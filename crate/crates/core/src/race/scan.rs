//! Pointwise sign scans: does f(qn) beat f(qn+k) (or the reverse) at
//! every single n up to a limit?

use crate::congruence::RaceModulus;
use crate::error::{Error, Result};
use crate::stream::{stream_m_blocks, worker_threads, TableKind};

/// Which arithmetic function to scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanFunction {
    Sigma,
    Phi,
}

impl ScanFunction {
    pub fn name(&self) -> &'static str {
        match self {
            ScanFunction::Sigma => "sigma",
            ScanFunction::Phi => "phi",
        }
    }
}

/// Which side of the comparison is claimed to be strictly larger.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpectedSide {
    /// f(qn) > f(qn+k), the sigma-side observation.
    Multiple,
    /// f(qn+k) > f(qn), the totient-side observation.
    Offset,
}

/// Every n <= limit where the claimed strict inequality fails. Ties count
/// as violations: the claims are strict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointwiseScanReport {
    pub function: ScanFunction,
    pub modulus: RaceModulus,
    pub expect: ExpectedSide,
    pub limit: u64,
    /// Ascending list of violating n.
    pub violations: Vec<u64>,
    pub first_violation: Option<u64>,
}

impl PointwiseScanReport {
    /// Human-readable form of the claim being scanned, e.g.
    /// "sigma(30n) > sigma(30n+1)".
    pub fn describe(&self) -> String {
        let f = self.function.name();
        let (q, k) = (self.modulus.q(), self.modulus.k());
        match self.expect {
            ExpectedSide::Multiple => format!("{f}({q}n) > {f}({q}n+{k})"),
            ExpectedSide::Offset => format!("{f}({q}n+{k}) > {f}({q}n)"),
        }
    }
}

/// Scans n = 1..=limit and records every violation of the strict
/// inequality selected by `expect`.
pub fn pointwise_scan(
    function: ScanFunction,
    m: &RaceModulus,
    expect: ExpectedSide,
    limit: u64,
    segment_len: u64,
) -> Result<PointwiseScanReport> {
    if m.k() == 0 {
        return Err(Error::Precondition(
            "pointwise scan needs a nonzero offset k".into(),
        ));
    }
    if limit == 0 {
        return Err(Error::Precondition("scan needs limit >= 1".into()));
    }
    let kind = match function {
        ScanFunction::Sigma => TableKind::Sigma,
        ScanFunction::Phi => TableKind::Phi,
    };
    let threads = worker_threads()?;
    let k = m.k();
    let mut violations = Vec::new();
    stream_m_blocks(m.q(), limit, segment_len, threads, kind, |block| {
        for n in block.m_start()..block.m_end() {
            let base = block.value(n, 0);
            let off = block.value(n, k);
            let holds = match expect {
                ExpectedSide::Multiple => base > off,
                ExpectedSide::Offset => off > base,
            };
            if !holds {
                violations.push(n);
            }
        }
        Ok(())
    })?;
    Ok(PointwiseScanReport {
        function,
        modulus: *m,
        expect,
        limit,
        first_violation: violations.first().copied(),
        violations,
    })
}
