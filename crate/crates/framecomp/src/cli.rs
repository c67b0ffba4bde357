//! Problem files, certificate files, and the command implementations behind
//! the binary.
//!
//! Everything is UTF-8 JSON. Floats are emitted with 17 significant digits so
//! reports are byte-stable across runs and values round-trip exactly.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{Map, Value};

use crate::completion::{
    ck_table, feasible_finite, min_count, tight_constant, CompletionCount, NormSpec,
};
use crate::construct::{
    complete_cholesky, complete_optimal, verify, CompletionCertificate, Method, VerifyReport,
};
use crate::error::{Error, Result};
use crate::frame::{analyze, VectorFamily};
use crate::linalg::opnorm_upper_bound;
use crate::{DEFAULT_BETA, DEFAULT_TOL};

/// Options block of a problem file, merged with command-line flags
/// (flags win).
#[derive(Debug, Clone)]
pub struct Options {
    pub tol: f64,
    pub beta: f64,
    pub method: Method,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            tol: DEFAULT_TOL,
            beta: DEFAULT_BETA,
            method: Method::Optimal,
        }
    }
}

/// A parsed problem: the vector family, the norm spec, and options.
#[derive(Debug, Clone)]
pub struct Problem {
    pub family: VectorFamily,
    pub norms: NormSpec,
    pub options: Options,
}

/// Serialize a finite float with 17 significant digits; parsing the result
/// recovers the exact same bits.
pub(crate) fn num(x: f64) -> Value {
    assert!(x.is_finite(), "refusing to serialize a non-finite number");
    let s = format!("{:.16e}", x);
    Value::Number(s.parse().expect("formatted float is a valid JSON number"))
}

fn num_list(xs: impl IntoIterator<Item = f64>) -> Value {
    Value::Array(xs.into_iter().map(num).collect())
}

fn as_object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| Error::Parse(format!("{what} must be a JSON object")))
}

fn get_f64(map: &Map<String, Value>, key: &str, what: &str) -> Result<f64> {
    let v = map
        .get(key)
        .ok_or_else(|| Error::Parse(format!("{what} is missing the \"{key}\" field")))?;
    value_f64(v, &format!("{what}.{key}"))
}

fn value_f64(v: &Value, what: &str) -> Result<f64> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::Parse(format!("{what} must be a finite number")))
}

fn get_usize(map: &Map<String, Value>, key: &str, what: &str) -> Result<usize> {
    map.get(key)
        .and_then(Value::as_u64)
        .map(|x| x as usize)
        .ok_or_else(|| Error::Parse(format!("{what}.{key} must be a nonnegative integer")))
}

fn get_str<'a>(map: &'a Map<String, Value>, key: &str, what: &str) -> Result<&'a str> {
    map.get(key)
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Parse(format!("{what}.{key} must be a string")))
}

fn parse_vector_rows(v: &Value) -> Result<Vec<Vec<f64>>> {
    match v {
        // Rows as JSON arrays.
        Value::Array(rows) => rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let entries = row.as_array().ok_or_else(|| {
                    Error::Parse(format!("vectors[{i}] must be an array of numbers"))
                })?;
                entries
                    .iter()
                    .enumerate()
                    .map(|(j, x)| value_f64(x, &format!("vectors[{i}][{j}]")))
                    .collect()
            })
            .collect(),
        // Rows as inline CSV: one vector per line, comma-separated.
        Value::String(csv) => csv
            .lines()
            .map(str::trim)
            .filter(|line| !line.is_empty())
            .enumerate()
            .map(|(i, line)| {
                line.split(',')
                    .map(|cell| {
                        cell.trim().parse::<f64>().map_err(|_| {
                            Error::Parse(format!(
                                "vectors line {}: {cell:?} is not a number",
                                i + 1
                            ))
                        })
                    })
                    .collect()
            })
            .collect(),
        _ => Err(Error::Parse(
            "\"vectors\" must be an array of rows or a CSV string".into(),
        )),
    }
}

fn parse_norms(v: &Value) -> Result<NormSpec> {
    let map = as_object(v, "norms")?;
    match get_str(map, "kind", "norms")? {
        "list" => {
            let values = map
                .get("values")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse("norms.values must be an array".into()))?;
            let parsed: Result<Vec<f64>> = values
                .iter()
                .enumerate()
                .map(|(i, x)| value_f64(x, &format!("norms.values[{i}]")))
                .collect();
            NormSpec::list(parsed?)
        }
        "constant" => NormSpec::constant(get_f64(map, "value", "norms")?),
        "geometric" => NormSpec::geometric(
            get_f64(map, "first", "norms")?,
            get_f64(map, "ratio", "norms")?,
        ),
        other => Err(Error::Parse(format!(
            "norms.kind must be \"list\", \"constant\" or \"geometric\", got {other:?}"
        ))),
    }
}

/// Parse a problem file. `dim_flag` supplies the ambient dimension when the
/// vector list is empty (and must agree with the vectors when both are
/// present).
pub fn parse_problem(text: &str, dim_flag: Option<usize>) -> Result<Problem> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("invalid JSON at line {}: {e}", e.line())))?;
    let map = as_object(&root, "problem file")?;

    let rows = match map.get("vectors") {
        Some(v) => parse_vector_rows(v)?,
        None => Vec::new(),
    };
    let dim = match (rows.first().map(Vec::len), dim_flag) {
        (Some(d), None) => d,
        (Some(d), Some(flag)) => {
            if d != flag {
                return Err(Error::Parse(format!(
                    "--dim {flag} contradicts vectors of length {d}"
                )));
            }
            d
        }
        (None, Some(flag)) => flag,
        (None, None) => {
            return Err(Error::Parse(
                "the vector list is empty; the dimension must be given explicitly with --dim"
                    .into(),
            ))
        }
    };
    let family = VectorFamily::new(dim, rows)?;

    let norms = parse_norms(
        map.get("norms")
            .ok_or_else(|| Error::Parse("problem file is missing \"norms\"".into()))?,
    )?;

    let mut options = Options::default();
    if let Some(v) = map.get("options") {
        let opts = as_object(v, "options")?;
        if opts.contains_key("tol") {
            options.tol = get_f64(opts, "tol", "options")?;
            if !(options.tol > 0.0) {
                return Err(Error::Parse("options.tol must be positive".into()));
            }
        }
        if opts.contains_key("beta") {
            options.beta = get_f64(opts, "beta", "options")?;
            if !(options.beta > 0.0) {
                return Err(Error::Parse("options.beta must be positive".into()));
            }
        }
        if opts.contains_key("method") {
            options.method = Method::from_str(get_str(opts, "method", "options")?)?;
        }
    }

    Ok(Problem {
        family,
        norms,
        options,
    })
}

pub fn load_problem(path: &Path, dim_flag: Option<usize>) -> Result<Problem> {
    let text = std::fs::read_to_string(path)?;
    parse_problem(&text, dim_flag).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Certificate as a JSON value (17-significant-digit floats throughout).
pub fn certificate_to_value(cert: &CompletionCertificate) -> Value {
    let mut map = Map::new();
    map.insert(
        "vectors".into(),
        Value::Array(
            cert.vectors
                .iter()
                .map(|g| num_list(g.iter().copied()))
                .collect(),
        ),
    );
    map.insert("c".into(), num(cert.c));
    map.insert("r".into(), Value::from(cert.r as u64));
    map.insert("norm_residual".into(), num(cert.norm_residual));
    map.insert("tightness_residual".into(), num(cert.tightness_residual));
    map.insert("method".into(), Value::from(cert.method.as_str()));
    map.insert(
        "rotation_count".into(),
        Value::from(cert.rotation_count as u64),
    );
    Value::Object(map)
}

pub fn certificate_from_value(root: &Value) -> Result<CompletionCertificate> {
    let map = as_object(root, "certificate")?;
    let rows = map
        .get("vectors")
        .ok_or_else(|| Error::Parse("certificate is missing \"vectors\"".into()))?;
    let vectors = parse_vector_rows(rows)?;
    Ok(CompletionCertificate {
        vectors,
        c: get_f64(map, "c", "certificate")?,
        r: get_usize(map, "r", "certificate")?,
        norm_residual: get_f64(map, "norm_residual", "certificate")?,
        tightness_residual: get_f64(map, "tightness_residual", "certificate")?,
        method: Method::from_str(get_str(map, "method", "certificate")?)?,
        rotation_count: get_usize(map, "rotation_count", "certificate")?,
    })
}

pub fn load_certificate(path: &Path) -> Result<CompletionCertificate> {
    let text = std::fs::read_to_string(path)?;
    let root: Value = serde_json::from_str(&text).map_err(|e| {
        Error::Parse(format!(
            "{}: invalid JSON at line {}: {e}",
            path.display(),
            e.line()
        ))
    })?;
    certificate_from_value(&root)
}

/// Spectrum, trace, tightness deficit, threshold table, and the row-sum
/// operator-norm bound. Unit-norm specs also get the pipeline count
/// `⌈n(λ₁+1) - α⌉`.
pub fn cmd_analyze(problem: &Problem) -> Result<Value> {
    let an = analyze(&problem.family)?;
    let table = ck_table(&an, &problem.norms);
    let n = an.dim();

    let mut map = Map::new();
    map.insert("dim".into(), Value::from(n as u64));
    map.insert("count".into(), Value::from(problem.family.len() as u64));
    map.insert("alpha".into(), num(an.alpha));
    map.insert(
        "spectrum".into(),
        num_list(an.spectrum.values.iter().copied()),
    );
    map.insert("h".into(), num(an.h));
    map.insert("c".into(), num_list((0..=table.limit()).map(|k| table.c(k))));
    map.insert(
        "rhs".into(),
        num_list((1..=table.limit()).map(|k| table.rhs(k))),
    );
    map.insert("opnorm_bound".into(), num(opnorm_upper_bound(&an.op)));
    if matches!(problem.norms, NormSpec::Constant(v) if v == 1.0) {
        let raw = n as f64 * (an.lambda_max() + 1.0) - an.alpha;
        map.insert("unit_pipeline_count".into(), Value::from(ceil_snap(raw)));
    }
    Ok(Value::Object(map))
}

/// Smallest integer at or above `x`, snapping values within 1e-9 of an
/// integer to that integer first.
fn ceil_snap(x: f64) -> u64 {
    let rounded = x.round();
    let y = if (x - rounded).abs() <= 1e-9 * (1.0 + x.abs()) {
        rounded
    } else {
        x.ceil()
    };
    y.max(0.0) as u64
}

fn count_value(c: CompletionCount) -> Value {
    match c {
        CompletionCount::Finite(r) => Value::from(r as u64),
        CompletionCount::Infinite => Value::from("infinite"),
        CompletionCount::Never => Value::from("never"),
    }
}

fn feasibility_array(samples: &BTreeMap<usize, bool>) -> Value {
    Value::Array(
        samples
            .iter()
            .map(|(&r, &f)| {
                let mut entry = Map::new();
                entry.insert("r".into(), Value::from(r as u64));
                entry.insert("feasible".into(), Value::from(f));
                Value::Object(entry)
            })
            .collect(),
    )
}

pub fn cmd_min_count(problem: &Problem) -> Result<Value> {
    let an = analyze(&problem.family)?;
    let report = min_count(&an, &problem.norms, problem.options.tol);
    let mut map = Map::new();
    map.insert("r0".into(), count_value(report.r0));
    map.insert("case".into(), Value::from(report.case.as_str()));
    map.insert(
        "c".into(),
        report.tight_constant.map(num).unwrap_or(Value::Null),
    );
    map.insert(
        "feasible_for_r".into(),
        feasibility_array(&report.feasible_for_r),
    );
    map.insert(
        "limit".into(),
        match report.limit {
            Some(d) => {
                let mut entry = Map::new();
                entry.insert("rhs_total".into(), num(d.rhs_total));
                entry.insert("c_n".into(), num(d.c_n));
                Value::Object(entry)
            }
            None => Value::Null,
        },
    );
    Ok(Value::Object(map))
}

pub fn cmd_feasible(problem: &Problem, r: usize) -> Result<Value> {
    let an = analyze(&problem.family)?;
    let feasible = feasible_finite(&an, &problem.norms, r, problem.options.tol)?;
    let mut map = Map::new();
    map.insert("r".into(), Value::from(r as u64));
    map.insert("feasible".into(), Value::from(feasible));
    map.insert("c".into(), num(tight_constant(&an, &problem.norms, r)?));
    Ok(Value::Object(map))
}

/// Build a completion certificate. Without an explicit `r` the minimal count
/// is used (only meaningful for the optimal method; the Cholesky pipeline
/// chooses its own count).
pub fn cmd_complete(
    problem: &Problem,
    r: Option<usize>,
    exact_norm: bool,
) -> Result<CompletionCertificate> {
    let tol = problem.options.tol;
    match problem.options.method {
        Method::Optimal => {
            let r = match r {
                Some(r) => r,
                None => {
                    let an = analyze(&problem.family)?;
                    match min_count(&an, &problem.norms, tol).r0 {
                        CompletionCount::Finite(r) => r,
                        CompletionCount::Infinite => {
                            return Err(Error::Infeasible {
                                r: 0,
                                reason: "only an infinite completion exists; no finite count works"
                                    .into(),
                            })
                        }
                        CompletionCount::Never => {
                            return Err(Error::Infeasible {
                                r: 0,
                                reason: "no completion exists for this norm spec".into(),
                            })
                        }
                    }
                }
            };
            complete_optimal(&problem.family, &problem.norms, r, tol)
        }
        Method::Cholesky => {
            if let Some(r) = r {
                return Err(Error::Domain(format!(
                    "--r {r} cannot be combined with the theorem-c method; its count is bracketed internally"
                )));
            }
            complete_cholesky(
                &problem.family,
                &problem.norms,
                problem.options.beta,
                exact_norm,
                tol,
            )
        }
    }
}

pub fn verify_report_to_value(report: &VerifyReport) -> Value {
    let mut checks = Map::new();
    checks.insert("shape".into(), Value::from(report.shape_ok));
    checks.insert("c".into(), Value::from(report.c_ok));
    checks.insert("norms".into(), Value::from(report.norms_ok));
    checks.insert("tightness".into(), Value::from(report.tightness_ok));
    checks.insert("rotations".into(), Value::from(report.rotations_ok));

    let mut map = Map::new();
    map.insert("r".into(), Value::from(report.r as u64));
    map.insert("c_claimed".into(), num(report.c_claimed));
    map.insert(
        "c_expected".into(),
        report.c_expected.map(num).unwrap_or(Value::Null),
    );
    map.insert(
        "norm_residual".into(),
        report.norm_residual.map(num).unwrap_or(Value::Null),
    );
    map.insert(
        "tightness_residual".into(),
        report.tightness_residual.map(num).unwrap_or(Value::Null),
    );
    map.insert(
        "rotation_count".into(),
        Value::from(report.rotation_count as u64),
    );
    map.insert("checks".into(), Value::Object(checks));
    map.insert("pass".into(), Value::from(report.pass));
    Value::Object(map)
}

pub fn cmd_verify(problem: &Problem, cert: &CompletionCertificate) -> VerifyReport {
    verify(&problem.family, cert, &problem.norms)
}

/// Shell exit code for an error: 2 infeasible, 3 malformed input, 4 numerical
/// failure.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Infeasible { .. } | Error::Budget { .. } => 2,
        Error::Parse(_) | Error::Domain(_) | Error::Io(_) => 3,
        Error::NonConvergence { .. }
        | Error::Positivity { .. }
        | Error::Bracket { .. }
        | Error::Majorization { .. } => 4,
    }
}

/// Machine-readable error rendering for stderr.
pub fn error_to_value(err: &Error) -> Value {
    let kind = match err {
        Error::Infeasible { .. } => "infeasible",
        Error::Budget { .. } => "budget",
        Error::Parse(_) => "parse",
        Error::Domain(_) => "domain",
        Error::Io(_) => "io",
        Error::NonConvergence { .. } => "non-convergence",
        Error::Positivity { .. } => "positivity",
        Error::Bracket { .. } => "bracket",
        Error::Majorization { .. } => "majorization",
    };
    let mut inner = Map::new();
    inner.insert("kind".into(), Value::from(kind));
    inner.insert("message".into(), Value::from(err.to_string()));
    let mut map = Map::new();
    map.insert("error".into(), Value::Object(inner));
    Value::Object(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    const AXIS_PROBLEM: &str = r#"{
        "vectors": [
            [1.4142135623730951, 0, 0],
            [0, 1.4142135623730951, 0],
            [0, 0, 1]
        ],
        "norms": {"kind": "geometric", "first": 1.0, "ratio": 0.25}
    }"#;

    #[test]
    fn parse_and_analyze_axis_problem() {
        let p = parse_problem(AXIS_PROBLEM, None).unwrap();
        assert_eq!(p.family.dim(), 3);
        assert_eq!(p.family.len(), 3);
        let report = cmd_analyze(&p).unwrap();
        assert_eq!(report["dim"], Value::from(3u64));
        assert!((report["alpha"].as_f64().unwrap() - 5.0).abs() < 1e-9);
        assert!((report["c"][3].as_f64().unwrap() - 2.125).abs() < 1e-9);
    }

    #[test]
    fn csv_vectors_block() {
        let text = r#"{
            "vectors": "1, 0\n0, 1\n",
            "norms": {"kind": "constant", "value": 1.0}
        }"#;
        let p = parse_problem(text, None).unwrap();
        assert_eq!(p.family.dim(), 2);
        assert_eq!(p.family.len(), 2);
    }

    #[test]
    fn empty_vectors_need_explicit_dimension() {
        let text = r#"{"norms": {"kind": "constant", "value": 1.0}}"#;
        assert!(matches!(parse_problem(text, None), Err(Error::Parse(_))));
        let p = parse_problem(text, Some(2)).unwrap();
        assert_eq!(p.family.dim(), 2);
        assert!(p.family.is_empty());
    }

    #[test]
    fn min_count_report_shape() {
        let p = parse_problem(AXIS_PROBLEM, None).unwrap();
        let report = cmd_min_count(&p).unwrap();
        assert_eq!(report["r0"], Value::from(1u64));
        assert_eq!(report["case"], Value::from("Case1"));
        assert!((report["c"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn certificate_round_trip_preserves_bits() {
        let p = parse_problem(AXIS_PROBLEM, None).unwrap();
        let cert = cmd_complete(&p, Some(1), false).unwrap();
        let value = certificate_to_value(&cert);
        let text = serde_json::to_string_pretty(&value).unwrap();
        let back = certificate_from_value(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back.vectors, cert.vectors);
        assert_eq!(back.c.to_bits(), cert.c.to_bits());
        assert!(cmd_verify(&p, &back).pass);
    }

    #[test]
    fn seventeen_digit_floats_round_trip() {
        for &x in &[
            std::f64::consts::PI,
            1.0 / 3.0,
            2.0f64.sqrt(),
            1e-300,
            -17.125,
            6.02e23,
        ] {
            let v = num(x);
            let s = serde_json::to_string(&v).unwrap();
            let parsed: f64 = s.parse().unwrap();
            assert_eq!(parsed.to_bits(), x.to_bits(), "{s}");
        }
    }
}
