//! Command-line surface for the divisor-sum race library: argument
//! parsing, report serialization, and the dispatch loop. The binary in
//! `main.rs` is a thin wrapper so all of this stays testable.
//!
//! Exit codes: 0 when every requested check verified, 2 when a
//! counterexample or violation was found (reported, not a crash), 1 for
//! usage or internal errors.

pub mod args;
pub mod report;

use std::io::Write;

use args::{Action, CliError, Format, RunConfig};
use report::BetaReport;
use sigma_race::congruence::RaceModulus;
use sigma_race::race::{check_envelopes_many, check_weighted_bounds, pointwise_scan, run_races};
use sigma_race::selftest;

/// Full CLI behavior; returns the process exit code.
pub fn run<I>(argv: I) -> i32
where
    I: IntoIterator,
    I::Item: Into<std::ffi::OsString> + Clone,
{
    let config = match args::parse_args(argv) {
        Ok(config) => config,
        Err(CliError::Usage(e)) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    0
                }
                _ => {
                    eprint!("{e}");
                    1
                }
            };
        }
        Err(CliError::Invalid(msg)) => {
            eprintln!("error: {msg}");
            return 1;
        }
    };
    match execute(&config) {
        Ok(true) => 0,
        Ok(false) => 2,
        Err(msg) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

/// Runs the configured action; Ok(true) means every check verified.
pub fn execute(config: &RunConfig) -> Result<bool, String> {
    let q = config.modulus;
    let moduli = |ks: &[u64]| -> Result<Vec<RaceModulus>, String> {
        ks.iter()
            .map(|&k| RaceModulus::new(q, k).map_err(|e| e.to_string()))
            .collect()
    };
    match &config.action {
        Action::Race { k_max, residues } => {
            let certs = run_races(&moduli(residues)?, *k_max, config.segment_len)
                .map_err(|e| e.to_string())?;
            let body = match config.format {
                Format::Json => report::certificates_json(&certs),
                Format::Csv => report::certificates_csv(&certs),
            };
            emit(config, &body)?;
            Ok(certs.iter().all(|c| c.verified))
        }
        Action::Beta { depth, residues } => {
            let mut rows = Vec::new();
            for m in moduli(residues)? {
                rows.push(BetaReport {
                    modulus: m,
                    constant: m.beta_closed().map_err(|e| e.to_string())?,
                    series: m.beta_series(*depth).map_err(|e| e.to_string())?,
                });
            }
            let body = match config.format {
                Format::Json => report::beta_json(&rows),
                Format::Csv => report::beta_csv(&rows),
            };
            emit(config, &body)?;
            Ok(true)
        }
        Action::Envelope { grid, residues } => {
            let reports = check_envelopes_many(&moduli(residues)?, grid, config.segment_len)
                .map_err(|e| e.to_string())?;
            let body = match config.format {
                Format::Json => report::envelopes_json(&reports),
                Format::Csv => report::envelopes_csv(&reports),
            };
            emit(config, &body)?;
            Ok(reports.iter().all(|r| r.all_pass))
        }
        Action::Bounds { grid } => {
            let bounds = check_weighted_bounds(grid, config.segment_len).map_err(|e| e.to_string())?;
            let body = match config.format {
                Format::Json => report::bounds_json(&bounds),
                Format::Csv => report::bounds_csv(&bounds),
            };
            emit(config, &body)?;
            Ok(bounds.all_pass)
        }
        Action::Scan { function, residue, expect, limit } => {
            let m = RaceModulus::new(q, *residue).map_err(|e| e.to_string())?;
            let scan = pointwise_scan(*function, &m, *expect, *limit, config.segment_len)
                .map_err(|e| e.to_string())?;
            let body = match config.format {
                Format::Json => report::scan_json(&scan),
                Format::Csv => report::scan_csv(&scan),
            };
            emit(config, &body)?;
            Ok(scan.violations.is_empty())
        }
        Action::Selftest { only } => {
            let ids: Vec<u8> = only.clone().unwrap_or_else(|| (1..=10).collect());
            let mut outcomes = Vec::with_capacity(ids.len());
            for id in ids {
                let outcome = selftest::run_criterion(id).map_err(|e| e.to_string())?;
                // Stream progress: the heavy criteria take a while.
                eprintln!(
                    "[{}] {} ... {} ({} ms)",
                    outcome.id,
                    outcome.name,
                    if outcome.passed { "ok" } else { "FAILED" },
                    outcome.elapsed_ms
                );
                outcomes.push(outcome);
            }
            print!("{}", report::selftest_table(&outcomes));
            if config.out.is_some() {
                let body = match config.format {
                    Format::Json => report::selftest_json(&outcomes),
                    Format::Csv => report::selftest_csv(&outcomes),
                };
                emit(config, &body)?;
            }
            Ok(outcomes.iter().all(|o| o.passed))
        }
    }
}

fn emit(config: &RunConfig, body: &str) -> Result<(), String> {
    match &config.out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| format!("cannot write to stdout: {e}"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_for_parse_failures() {
        assert_eq!(run(["sigma-race", "race", "--kmax", "0"]), 1);
        assert_eq!(run(["sigma-race", "no-such-command"]), 1);
        assert_eq!(run(["sigma-race", "--help"]), 0);
        assert_eq!(run(["sigma-race", "--version"]), 0);
    }
}
