//! Argument parsing and per-subcommand validation.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use sigma_race::arith::gcd;
use sigma_race::race::{
    log_spaced_grid, ExpectedSide, ScanFunction, DEFAULT_GRID_MAX, DEFAULT_GRID_MIN,
    DEFAULT_GRID_POINTS, ENVELOPE_MIN_X,
};
use sigma_race::sieve::DEFAULT_SEGMENT_LEN;

#[derive(Parser, Debug)]
#[command(
    name = "sigma-race",
    version,
    about = "Verify divisor-sum races over arithmetic progressions: exact race \
             certificates, Euler-product constants, residual envelopes, and \
             pointwise scans."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Progression modulus q.
    #[arg(long, global = true, default_value_t = 30, value_parser = clap::value_parser!(u64).range(1..))]
    pub modulus: u64,

    /// Arguments sieved per segment.
    #[arg(long, global = true, default_value_t = DEFAULT_SEGMENT_LEN, value_parser = clap::value_parser!(u64).range(1..))]
    pub segment_len: u64,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Race sum sigma(qn) against sum sigma(qn+k) over every prefix K <= kmax.
    Race {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        kmax: u64,
        /// "all" (residues coprime to q) or a comma list like 1,7,29.
        #[arg(long, default_value = "all")]
        residues: ResidueArg,
        /// Single-residue shorthand.
        #[arg(long, conflicts_with = "residues")]
        residue: Option<u64>,
    },
    /// Euler-product constants beta(q,k): exact closed form plus truncated series.
    Beta {
        /// Series truncation depth D.
        #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
        truncate: u64,
        /// "all" (0 plus the residues coprime to q) or a comma list.
        #[arg(long, default_value = "all")]
        residues: ResidueArg,
        #[arg(long, conflicts_with = "residues")]
        residue: Option<u64>,
    },
    /// Check residuals g(x) and h_k(x) against their proven envelopes.
    Envelope {
        #[arg(long, default_value = "all")]
        residues: ResidueArg,
        #[arg(long, conflicts_with = "residues")]
        residue: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_GRID_MIN)]
        grid_min: u64,
        #[arg(long, default_value_t = DEFAULT_GRID_MAX)]
        grid_max: u64,
        #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
        grid_points: usize,
    },
    /// Check the quadratic sum bounds and the crossover inequality.
    Bounds {
        #[arg(long, default_value_t = DEFAULT_GRID_MIN)]
        grid_min: u64,
        #[arg(long, default_value_t = DEFAULT_GRID_MAX)]
        grid_max: u64,
        #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
        grid_points: usize,
    },
    /// Scan f(qn) versus f(qn+k) pointwise for every n <= limit.
    Scan {
        #[arg(long, value_enum)]
        function: Function,
        #[arg(long, default_value_t = 1)]
        residue: u64,
        /// Side expected to win strictly (default: the observed claim per function).
        #[arg(long, value_enum)]
        expect: Option<Expect>,
        /// Scan limit N (defaults: sigma 10^7, phi 10^5).
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        limit: Option<u64>,
    },
    /// Run the verification suite and print a pass/fail table.
    Selftest {
        /// Comma list of criterion ids to run (default: all ten).
        #[arg(long)]
        only: Option<String>,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Function {
    Sigma,
    Phi,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expect {
    /// f(qn) > f(qn+k).
    Multiple,
    /// f(qn+k) > f(qn).
    Offset,
}

/// Residue selection: "all" or an explicit list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResidueArg {
    All,
    List(Vec<u64>),
}

impl std::str::FromStr for ResidueArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("all") {
            return Ok(ResidueArg::All);
        }
        let list: Vec<u64> = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|_| format!("invalid residue {t:?} (expected \"all\" or a comma list of integers)"))
            })
            .collect::<Result<_, _>>()?;
        if list.is_empty() {
            return Err("empty residue list".into());
        }
        Ok(ResidueArg::List(list))
    }
}

/// A fully validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub modulus: u64,
    pub segment_len: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub action: Action,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    Race { k_max: u64, residues: Vec<u64> },
    Beta { depth: u64, residues: Vec<u64> },
    Envelope { grid: Vec<u64>, residues: Vec<u64> },
    Bounds { grid: Vec<u64> },
    Scan { function: ScanFunction, residue: u64, expect: ExpectedSide, limit: u64 },
    Selftest { only: Option<Vec<u8>> },
}

#[derive(Debug)]
pub enum CliError {
    /// clap-level parse failure (includes --help / --version output).
    Usage(clap::Error),
    /// Semantic validation failure.
    Invalid(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(e) => write!(f, "{e}"),
            CliError::Invalid(msg) => write!(f, "{msg}"),
        }
    }
}

fn coprime_residues(q: u64) -> Vec<u64> {
    (1..q).filter(|&k| gcd(k, q) == 1).collect()
}

fn resolve_residues(
    q: u64,
    residues: &ResidueArg,
    residue: Option<u64>,
    include_zero_default: bool,
    allow_zero: bool,
) -> Result<Vec<u64>, CliError> {
    let mut list = match (residue, residues) {
        (Some(k), _) => vec![k],
        (None, ResidueArg::List(list)) => list.clone(),
        (None, ResidueArg::All) => {
            let mut all = if include_zero_default { vec![0] } else { Vec::new() };
            all.extend(coprime_residues(q));
            if all.is_empty() {
                // q = 1 leaves only the zero residue.
                all.push(0);
                if !allow_zero {
                    return Err(CliError::Invalid(format!(
                        "modulus {q} has no usable residues for this subcommand"
                    )));
                }
            }
            return Ok(all);
        }
    };
    list.sort_unstable();
    list.dedup();
    for &k in &list {
        if k >= q {
            return Err(CliError::Invalid(format!(
                "--residue/--residues value {k} must be below the modulus {q}"
            )));
        }
        if k == 0 && !allow_zero {
            return Err(CliError::Invalid(
                "--residue/--residues value 0 is not a race offset (compare qn with qn+k, k >= 1)"
                    .into(),
            ));
        }
    }
    Ok(list)
}

fn resolve_grid(q: u64, grid_min: u64, grid_max: u64, grid_points: usize) -> Result<Vec<u64>, CliError> {
    if q != 30 {
        return Err(CliError::Invalid(format!(
            "envelope and bound checks are proved for modulus 30, got --modulus {q}"
        )));
    }
    if grid_min < ENVELOPE_MIN_X {
        return Err(CliError::Invalid(format!(
            "--grid-min {grid_min} is below {ENVELOPE_MIN_X}; the envelope and bound lemmas assume x >= {ENVELOPE_MIN_X}"
        )));
    }
    if grid_max < grid_min {
        return Err(CliError::Invalid(format!(
            "--grid-max {grid_max} is below --grid-min {grid_min}"
        )));
    }
    if grid_points == 0 {
        return Err(CliError::Invalid("--grid-points must be at least 1".into()));
    }
    log_spaced_grid(grid_min, grid_max, grid_points).map_err(|e| CliError::Invalid(e.to_string()))
}

/// Parses and validates a full command line (the first element is the
/// program name).
pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(CliError::Usage)?;
    let q = cli.modulus;
    let action = match &cli.command {
        Command::Race { kmax, residues, residue } => Action::Race {
            k_max: *kmax,
            residues: resolve_residues(q, residues, *residue, false, false)?,
        },
        Command::Beta { truncate, residues, residue } => Action::Beta {
            depth: *truncate,
            residues: resolve_residues(q, residues, *residue, true, true)?,
        },
        Command::Envelope { residues, residue, grid_min, grid_max, grid_points } => {
            let list = resolve_residues(q, residues, *residue, true, true)?;
            for &k in &list {
                if k != 0 && gcd(k, 30) != 1 {
                    return Err(CliError::Invalid(format!(
                        "envelopes are proved for k = 0 or gcd(k, 30) = 1, got residue {k}"
                    )));
                }
            }
            Action::Envelope {
                grid: resolve_grid(q, *grid_min, *grid_max, *grid_points)?,
                residues: list,
            }
        }
        Command::Bounds { grid_min, grid_max, grid_points } => Action::Bounds {
            grid: resolve_grid(q, *grid_min, *grid_max, *grid_points)?,
        },
        Command::Scan { function, residue, expect, limit } => {
            if *residue == 0 || *residue >= q {
                return Err(CliError::Invalid(format!(
                    "--residue {residue} must satisfy 1 <= k < modulus {q}"
                )));
            }
            let function = match function {
                Function::Sigma => ScanFunction::Sigma,
                Function::Phi => ScanFunction::Phi,
            };
            let expect = match (expect, function) {
                (Some(Expect::Multiple), _) => ExpectedSide::Multiple,
                (Some(Expect::Offset), _) => ExpectedSide::Offset,
                (None, ScanFunction::Sigma) => ExpectedSide::Multiple,
                (None, ScanFunction::Phi) => ExpectedSide::Offset,
            };
            let limit = limit.unwrap_or(match function {
                ScanFunction::Sigma => 10_000_000,
                ScanFunction::Phi => 100_000,
            });
            Action::Scan { function, residue: *residue, expect, limit }
        }
        Command::Selftest { only } => {
            let only = match only {
                None => None,
                Some(raw) => {
                    let ids: Vec<u8> = raw
                        .split(',')
                        .map(|t| {
                            t.trim().parse::<u8>().ok().filter(|id| (1..=10).contains(id)).ok_or_else(
                                || CliError::Invalid(format!("--only entries must be ids 1..=10, got {t:?}")),
                            )
                        })
                        .collect::<Result<_, _>>()?;
                    if ids.is_empty() {
                        return Err(CliError::Invalid("--only needs at least one id".into()));
                    }
                    Some(ids)
                }
            };
            Action::Selftest { only }
        }
    };
    Ok(RunConfig {
        modulus: q,
        segment_len: cli.segment_len,
        format: cli.format,
        out: cli.out,
        action,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<RunConfig, CliError> {
        parse_args(std::iter::once("sigma-race").chain(args.iter().copied()))
    }

    #[test]
    fn race_all_residues() {
        let cfg = parse(&["race", "--kmax", "1000000", "--residues", "all"]).unwrap();
        assert_eq!(cfg.modulus, 30);
        match cfg.action {
            Action::Race { k_max, residues } => {
                assert_eq!(k_max, 1_000_000);
                assert_eq!(residues, vec![1, 7, 11, 13, 17, 19, 23, 29]);
            }
            other => panic!("wrong action: {other:?}"),
        }
    }

    #[test]
    fn beta_single_residue() {
        let cfg = parse(&["beta", "--residue", "1", "--truncate", "1000000"]).unwrap();
        match cfg.action {
            Action::Beta { depth, residues } => {
                assert_eq!(depth, 1_000_000);
                assert_eq!(residues, vec![1]);
            }
            other => panic!("wrong action: {other:?}"),
        }
    }

    #[test]
    fn beta_defaults_include_zero() {
        let cfg = parse(&["beta"]).unwrap();
        match cfg.action {
            Action::Beta { depth, residues } => {
                assert_eq!(depth, 1_000_000);
                assert_eq!(residues, vec![0, 1, 7, 11, 13, 17, 19, 23, 29]);
            }
            other => panic!("wrong action: {other:?}"),
        }
    }

    #[test]
    fn race_kmax_zero_is_usage_error() {
        assert!(matches!(parse(&["race", "--kmax", "0"]), Err(CliError::Usage(_))));
        assert!(matches!(parse(&["race"]), Err(CliError::Usage(_))));
        assert!(matches!(parse(&["race", "--kmax", "5", "--bogus"]), Err(CliError::Usage(_))));
    }

    #[test]
    fn race_rejects_zero_and_oversized_residues() {
        assert!(matches!(
            parse(&["race", "--kmax", "5", "--residue", "0"]),
            Err(CliError::Invalid(_))
        ));
        assert!(matches!(
            parse(&["race", "--kmax", "5", "--residues", "1,30"]),
            Err(CliError::Invalid(_))
        ));
    }

    #[test]
    fn residue_list_parses_sorted_dedup() {
        let cfg = parse(&["race", "--kmax", "5", "--residues", "29,1,29,7"]).unwrap();
        match cfg.action {
            Action::Race { residues, .. } => assert_eq!(residues, vec![1, 7, 29]),
            other => panic!("wrong action: {other:?}"),
        }
    }

    #[test]
    fn scan_defaults_per_function() {
        let cfg = parse(&["scan", "--function", "sigma"]).unwrap();
        match cfg.action {
            Action::Scan { function, residue, expect, limit } => {
                assert_eq!(function, ScanFunction::Sigma);
                assert_eq!(residue, 1);
                assert_eq!(expect, ExpectedSide::Multiple);
                assert_eq!(limit, 10_000_000);
            }
            other => panic!("wrong action: {other:?}"),
        }
        let cfg = parse(&["scan", "--function", "phi"]).unwrap();
        match cfg.action {
            Action::Scan { expect, limit, .. } => {
                assert_eq!(expect, ExpectedSide::Offset);
                assert_eq!(limit, 100_000);
            }
            other => panic!("wrong action: {other:?}"),
        }
    }

    #[test]
    fn envelope_grid_validation() {
        assert!(matches!(
            parse(&["envelope", "--grid-min", "999"]),
            Err(CliError::Invalid(_))
        ));
        assert!(matches!(
            parse(&["envelope", "--grid-max", "500"]),
            Err(CliError::Invalid(_))
        ));
        assert!(matches!(
            parse(&["envelope", "--residue", "6"]),
            Err(CliError::Invalid(_))
        ));
        assert!(matches!(
            parse(&["bounds", "--modulus", "12"]),
            Err(CliError::Invalid(_))
        ));
        let cfg = parse(&["envelope", "--grid-points", "5", "--grid-max", "2000"]).unwrap();
        match cfg.action {
            Action::Envelope { grid, residues } => {
                assert_eq!(grid.len(), 5);
                assert_eq!(residues.len(), 9);
            }
            other => panic!("wrong action: {other:?}"),
        }
    }

    #[test]
    fn selftest_only_ids() {
        let cfg = parse(&["selftest", "--only", "1,4"]).unwrap();
        assert!(matches!(cfg.action, Action::Selftest { only: Some(ref ids) } if ids == &vec![1, 4]));
        assert!(matches!(parse(&["selftest", "--only", "11"]), Err(CliError::Invalid(_))));
        assert!(matches!(parse(&["selftest", "--only", "zero"]), Err(CliError::Invalid(_))));
    }

    #[test]
    fn global_flags_after_subcommand() {
        let cfg = parse(&["race", "--kmax", "9", "--modulus", "12", "--segment-len", "4096", "--format", "csv"]).unwrap();
        assert_eq!(cfg.modulus, 12);
        assert_eq!(cfg.segment_len, 4096);
        assert_eq!(cfg.format, Format::Csv);
        match cfg.action {
            Action::Race { residues, .. } => assert_eq!(residues, vec![1, 5, 7, 11]),
            other => panic!("wrong action: {other:?}"),
        }
    }
}
