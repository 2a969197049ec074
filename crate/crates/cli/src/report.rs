//! Report serialization: CSV and JSON writers plus the JSON parsers that
//! make reports round-trip.
//!
//! Conventions: floats carry 12 significant digits in e-notation,
//! integers are rendered in full, and 128-bit values travel as decimal
//! strings because they exceed common JSON number precision. CSV always
//! starts with a header row and uses LF line endings.

use serde_json::Value;

use sigma_race::congruence::{EulerConstant, RaceModulus, SeriesTruncation};
use sigma_race::race::{
    BoundsOffset, BoundsSample, EnvelopeReport, ExpectedSide, PointwiseScanReport, ResidualSample,
    ScanFunction, TheoremCertificate, WeightedBoundsReport,
};
use sigma_race::rational::Rational;
use sigma_race::selftest::CriterionOutcome;

/// A beta constant report row: exact closed form plus a series truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaReport {
    pub modulus: RaceModulus,
    pub constant: EulerConstant,
    pub series: SeriesTruncation,
}

/// 12 significant digits, e-notation. The fixed width keeps reports
/// byte-deterministic across runs.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.11e}")
}

fn json_str(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn expect_name(e: ExpectedSide) -> &'static str {
    match e {
        ExpectedSide::Multiple => "multiple",
        ExpectedSide::Offset => "offset",
    }
}

/// Wraps one-or-many JSON objects: a single report stays a bare object.
fn json_seq(objs: Vec<String>) -> String {
    match objs.as_slice() {
        [single] => format!("{single}\n"),
        _ => format!("[{}]\n", objs.join(",")),
    }
}

// ---------------------------------------------------------------- race

fn certificate_obj(c: &TheoremCertificate) -> String {
    format!(
        "{{\"q\":{},\"k\":{},\"k_max\":{},\"verified\":{},\"min_margin\":\"{}\",\"argmin_k\":{},\"elapsed_ms\":{}}}",
        c.modulus.q(),
        c.modulus.k(),
        c.k_max,
        c.verified,
        c.min_margin,
        c.argmin_k,
        c.elapsed_ms
    )
}

pub fn certificates_json(certs: &[TheoremCertificate]) -> String {
    json_seq(certs.iter().map(certificate_obj).collect())
}

pub fn certificates_csv(certs: &[TheoremCertificate]) -> String {
    let mut out = String::from("q,k,k_max,verified,min_margin,argmin_k,elapsed_ms\n");
    for c in certs {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            c.modulus.q(),
            c.modulus.k(),
            c.k_max,
            c.verified,
            c.min_margin,
            c.argmin_k,
            c.elapsed_ms
        ));
    }
    out
}

pub fn parse_certificates_json(s: &str) -> Result<Vec<TheoremCertificate>, String> {
    objects(s)?.iter().map(certificate_from).collect()
}

fn certificate_from(v: &Value) -> Result<TheoremCertificate, String> {
    Ok(TheoremCertificate {
        modulus: modulus_from(v)?,
        k_max: field_u64(v, "k_max")?,
        verified: field_bool(v, "verified")?,
        min_margin: field_str(v, "min_margin")?
            .parse::<i128>()
            .map_err(|e| format!("min_margin: {e}"))?,
        argmin_k: field_u64(v, "argmin_k")?,
        elapsed_ms: field_u64(v, "elapsed_ms")?,
    })
}

// ---------------------------------------------------------------- beta

fn beta_obj(r: &BetaReport) -> String {
    format!(
        "{{\"q\":{},\"k\":{},\"coefficient_num\":{},\"coefficient_den\":{},\"numeric\":{},\"series_depth\":{},\"series_partial\":{},\"tail_bound\":{}}}",
        r.modulus.q(),
        r.modulus.k(),
        r.constant.coefficient().numer(),
        r.constant.coefficient().denom(),
        fmt_f64(r.constant.numeric()),
        r.series.depth,
        fmt_f64(r.series.partial),
        fmt_f64(r.series.tail_bound)
    )
}

pub fn beta_json(reports: &[BetaReport]) -> String {
    json_seq(reports.iter().map(beta_obj).collect())
}

pub fn beta_csv(reports: &[BetaReport]) -> String {
    let mut out =
        String::from("q,k,coefficient_num,coefficient_den,numeric,series_depth,series_partial,tail_bound\n");
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.modulus.q(),
            r.modulus.k(),
            r.constant.coefficient().numer(),
            r.constant.coefficient().denom(),
            fmt_f64(r.constant.numeric()),
            r.series.depth,
            fmt_f64(r.series.partial),
            fmt_f64(r.series.tail_bound)
        ));
    }
    out
}

pub fn parse_beta_json(s: &str) -> Result<Vec<BetaReport>, String> {
    objects(s)?
        .iter()
        .map(|v| {
            let modulus = modulus_from(v)?;
            let coefficient = Rational::new(
                field_i128(v, "coefficient_num")?,
                field_i128(v, "coefficient_den")?,
            )
            .map_err(|e| e.to_string())?;
            Ok(BetaReport {
                modulus,
                constant: EulerConstant::new(coefficient),
                series: SeriesTruncation {
                    modulus,
                    depth: field_u64(v, "series_depth")?,
                    partial: field_f64(v, "series_partial")?,
                    tail_bound: field_f64(v, "tail_bound")?,
                },
            })
        })
        .collect()
}

// ------------------------------------------------------------ envelope

fn sample_obj(s: &ResidualSample) -> String {
    format!(
        "{{\"x\":{},\"normalized_sum\":{},\"beta_term\":{},\"residual\":{},\"envelope_lo\":{},\"envelope_hi\":{},\"pass\":{}}}",
        s.x,
        fmt_f64(s.normalized_sum),
        fmt_f64(s.beta_term),
        fmt_f64(s.residual),
        fmt_f64(s.envelope_lo),
        fmt_f64(s.envelope_hi),
        s.passes()
    )
}

fn envelope_obj(r: &EnvelopeReport) -> String {
    format!(
        "{{\"q\":{},\"k\":{},\"all_pass\":{},\"worst_slack\":{},\"samples\":[{}]}}",
        r.modulus.q(),
        r.modulus.k(),
        r.all_pass,
        fmt_f64(r.worst_slack),
        r.samples.iter().map(sample_obj).collect::<Vec<_>>().join(",")
    )
}

pub fn envelopes_json(reports: &[EnvelopeReport]) -> String {
    json_seq(reports.iter().map(envelope_obj).collect())
}

/// One report keeps the exact column contract; several get a leading k.
pub fn envelopes_csv(reports: &[EnvelopeReport]) -> String {
    const COLS: &str = "x,normalized_sum,beta_term,residual,envelope_lo,envelope_hi,pass";
    let mut out = String::new();
    let multi = reports.len() > 1;
    if multi {
        out.push_str(&format!("k,{COLS}\n"));
    } else {
        out.push_str(&format!("{COLS}\n"));
    }
    for r in reports {
        for s in &r.samples {
            if multi {
                out.push_str(&format!("{},", r.modulus.k()));
            }
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                s.x,
                fmt_f64(s.normalized_sum),
                fmt_f64(s.beta_term),
                fmt_f64(s.residual),
                fmt_f64(s.envelope_lo),
                fmt_f64(s.envelope_hi),
                s.passes()
            ));
        }
    }
    out
}

pub fn parse_envelopes_json(s: &str) -> Result<Vec<EnvelopeReport>, String> {
    objects(s)?
        .iter()
        .map(|v| {
            let samples = field_array(v, "samples")?
                .iter()
                .map(|sv| {
                    Ok(ResidualSample {
                        x: field_u64(sv, "x")?,
                        normalized_sum: field_f64(sv, "normalized_sum")?,
                        beta_term: field_f64(sv, "beta_term")?,
                        residual: field_f64(sv, "residual")?,
                        envelope_lo: field_f64(sv, "envelope_lo")?,
                        envelope_hi: field_f64(sv, "envelope_hi")?,
                    })
                })
                .collect::<Result<Vec<_>, String>>()?;
            Ok(EnvelopeReport {
                modulus: modulus_from(v)?,
                samples,
                all_pass: field_bool(v, "all_pass")?,
                worst_slack: field_f64(v, "worst_slack")?,
            })
        })
        .collect()
}

// -------------------------------------------------------------- bounds

fn bounds_offset_obj(o: &BoundsOffset) -> String {
    format!(
        "{{\"k\":{},\"sum_offset\":\"{}\",\"upper_bound\":{},\"upper_pass\":{},\"crossover_gap\":{},\"crossover_pass\":{}}}",
        o.k,
        o.sigma_sum,
        fmt_f64(o.upper_bound),
        o.upper_ok,
        fmt_f64(o.crossover_gap),
        o.crossover_ok
    )
}

fn bounds_sample_obj(s: &BoundsSample) -> String {
    format!(
        "{{\"x\":{},\"sum_multiple\":\"{}\",\"lower_bound\":{},\"lower_pass\":{},\"offsets\":[{}]}}",
        s.x,
        s.sigma_sum_multiple,
        fmt_f64(s.lower_bound),
        s.lower_ok,
        s.offsets.iter().map(bounds_offset_obj).collect::<Vec<_>>().join(",")
    )
}

pub fn bounds_json(r: &WeightedBoundsReport) -> String {
    format!(
        "{{\"q\":{},\"all_pass\":{},\"samples\":[{}]}}\n",
        r.q,
        r.all_pass,
        r.samples.iter().map(bounds_sample_obj).collect::<Vec<_>>().join(",")
    )
}

pub fn bounds_csv(r: &WeightedBoundsReport) -> String {
    let mut out = String::from(
        "x,k,sum_multiple,lower_bound,lower_pass,sum_offset,upper_bound,upper_pass,crossover_gap,crossover_pass\n",
    );
    for s in &r.samples {
        for o in &s.offsets {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                s.x,
                o.k,
                s.sigma_sum_multiple,
                fmt_f64(s.lower_bound),
                s.lower_ok,
                o.sigma_sum,
                fmt_f64(o.upper_bound),
                o.upper_ok,
                fmt_f64(o.crossover_gap),
                o.crossover_ok
            ));
        }
    }
    out
}

pub fn parse_bounds_json(s: &str) -> Result<WeightedBoundsReport, String> {
    let v: Value = serde_json::from_str(s).map_err(|e| e.to_string())?;
    let samples = field_array(&v, "samples")?
        .iter()
        .map(|sv| {
            let offsets = field_array(sv, "offsets")?
                .iter()
                .map(|ov| {
                    Ok(BoundsOffset {
                        k: field_u64(ov, "k")?,
                        sigma_sum: field_str(ov, "sum_offset")?
                            .parse::<u128>()
                            .map_err(|e| format!("sum_offset: {e}"))?,
                        upper_bound: field_f64(ov, "upper_bound")?,
                        upper_ok: field_bool(ov, "upper_pass")?,
                        crossover_gap: field_f64(ov, "crossover_gap")?,
                        crossover_ok: field_bool(ov, "crossover_pass")?,
                    })
                })
                .collect::<Result<Vec<_>, String>>()?;
            Ok(BoundsSample {
                x: field_u64(sv, "x")?,
                sigma_sum_multiple: field_str(sv, "sum_multiple")?
                    .parse::<u128>()
                    .map_err(|e| format!("sum_multiple: {e}"))?,
                lower_bound: field_f64(sv, "lower_bound")?,
                lower_ok: field_bool(sv, "lower_pass")?,
                offsets,
            })
        })
        .collect::<Result<Vec<_>, String>>()?;
    Ok(WeightedBoundsReport {
        q: field_u64(&v, "q")?,
        all_pass: field_bool(&v, "all_pass")?,
        samples,
    })
}

// ---------------------------------------------------------------- scan

pub fn scan_json(r: &PointwiseScanReport) -> String {
    let first = match r.first_violation {
        Some(n) => n.to_string(),
        None => "null".into(),
    };
    let violations: Vec<String> = r.violations.iter().map(|n| n.to_string()).collect();
    format!(
        "{{\"function\":{},\"q\":{},\"k\":{},\"expect\":{},\"comparison\":{},\"limit\":{},\"violation_count\":{},\"first_violation\":{},\"violations\":[{}]}}\n",
        json_str(r.function.name()),
        r.modulus.q(),
        r.modulus.k(),
        json_str(expect_name(r.expect)),
        json_str(&r.describe()),
        r.limit,
        r.violations.len(),
        first,
        violations.join(",")
    )
}

pub fn scan_csv(r: &PointwiseScanReport) -> String {
    let mut out = String::from("n\n");
    for n in &r.violations {
        out.push_str(&format!("{n}\n"));
    }
    out
}

pub fn parse_scan_json(s: &str) -> Result<PointwiseScanReport, String> {
    let v: Value = serde_json::from_str(s).map_err(|e| e.to_string())?;
    let function = match field_str(&v, "function")?.as_str() {
        "sigma" => ScanFunction::Sigma,
        "phi" => ScanFunction::Phi,
        other => return Err(format!("unknown function {other:?}")),
    };
    let expect = match field_str(&v, "expect")?.as_str() {
        "multiple" => ExpectedSide::Multiple,
        "offset" => ExpectedSide::Offset,
        other => return Err(format!("unknown expect {other:?}")),
    };
    let violations = field_array(&v, "violations")?
        .iter()
        .map(|n| n.as_u64().ok_or_else(|| "violation entries must be integers".to_string()))
        .collect::<Result<Vec<_>, String>>()?;
    let first_violation = match v.get("first_violation") {
        Some(Value::Null) | None => None,
        Some(n) => Some(n.as_u64().ok_or("first_violation must be an integer or null")?),
    };
    Ok(PointwiseScanReport {
        function,
        modulus: modulus_from(&v)?,
        expect,
        limit: field_u64(&v, "limit")?,
        violations,
        first_violation,
    })
}

// ------------------------------------------------------------ selftest

pub fn selftest_json(outcomes: &[CriterionOutcome]) -> String {
    let rows: Vec<String> = outcomes
        .iter()
        .map(|o| {
            let target = o.target_ms.map_or("null".into(), |t| t.to_string());
            format!(
                "{{\"id\":{},\"name\":{},\"passed\":{},\"elapsed_ms\":{},\"target_ms\":{},\"detail\":{}}}",
                o.id,
                json_str(o.name),
                o.passed,
                o.elapsed_ms,
                target,
                json_str(&o.detail)
            )
        })
        .collect();
    format!("[{}]\n", rows.join(","))
}

pub fn selftest_csv(outcomes: &[CriterionOutcome]) -> String {
    let mut out = String::from("id,name,passed,elapsed_ms,target_ms,detail\n");
    for o in outcomes {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            o.id,
            o.name,
            o.passed,
            o.elapsed_ms,
            o.target_ms.map_or(String::new(), |t| t.to_string()),
            csv_field(&o.detail)
        ));
    }
    out
}

pub fn selftest_table(outcomes: &[CriterionOutcome]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:>3}  {:<22} {:<6} {:>10}  {:>10}  detail\n",
        "id", "criterion", "result", "elapsed", "target"
    ));
    for o in outcomes {
        let target = o
            .target_ms
            .map(|t| format!("{t} ms"))
            .unwrap_or_else(|| "-".into());
        out.push_str(&format!(
            "{:>3}  {:<22} {:<6} {:>7} ms  {:>10}  {}\n",
            o.id,
            o.name,
            if o.passed { "PASS" } else { "FAIL" },
            o.elapsed_ms,
            target,
            o.detail
        ));
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    out.push_str(&format!("{passed}/{} criteria passed\n", outcomes.len()));
    out
}

// ------------------------------------------------------- parse helpers

fn objects(s: &str) -> Result<Vec<Value>, String> {
    let v: Value = serde_json::from_str(s).map_err(|e| e.to_string())?;
    match v {
        Value::Array(items) => Ok(items),
        obj @ Value::Object(_) => Ok(vec![obj]),
        _ => Err("expected a JSON object or array of objects".into()),
    }
}

fn modulus_from(v: &Value) -> Result<RaceModulus, String> {
    RaceModulus::new(field_u64(v, "q")?, field_u64(v, "k")?).map_err(|e| e.to_string())
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, String> {
    v.get(key).ok_or_else(|| format!("missing field {key:?}"))
}

fn field_u64(v: &Value, key: &str) -> Result<u64, String> {
    field(v, key)?
        .as_u64()
        .ok_or_else(|| format!("field {key:?} must be an unsigned integer"))
}

fn field_i128(v: &Value, key: &str) -> Result<i128, String> {
    field(v, key)?
        .as_i64()
        .map(i128::from)
        .ok_or_else(|| format!("field {key:?} must be an integer"))
}

fn field_f64(v: &Value, key: &str) -> Result<f64, String> {
    field(v, key)?
        .as_f64()
        .ok_or_else(|| format!("field {key:?} must be a number"))
}

fn field_bool(v: &Value, key: &str) -> Result<bool, String> {
    field(v, key)?
        .as_bool()
        .ok_or_else(|| format!("field {key:?} must be a boolean"))
}

fn field_str(v: &Value, key: &str) -> Result<String, String> {
    field(v, key)?
        .as_str()
        .map(str::to_string)
        .ok_or_else(|| format!("field {key:?} must be a string"))
}

fn field_array<'a>(v: &'a Value, key: &str) -> Result<&'a Vec<Value>, String> {
    field(v, key)?
        .as_array()
        .ok_or_else(|| format!("field {key:?} must be an array"))
}
