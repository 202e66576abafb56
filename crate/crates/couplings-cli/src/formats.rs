//! Text codecs for the CLI: exact rationals, distributions, and joint
//! matrices in JSON and CSV form.
//!
//! Rationals round-trip as `numerator/denominator` strings; plain integers
//! and finite decimals are accepted on input and converted exactly (a
//! decimal with `k` fractional digits becomes `digits / 10^k`).

use couplings::{BigInt, BigRational, Dist, Joint};
use std::fmt::Write as _;
use std::str::FromStr;

/// Parse one exact rational from text.
///
/// Accepted forms: `a/b` (integer numerator and denominator), a plain
/// integer, or a finite decimal such as `0.25`. Whitespace around the
/// token is ignored. Decimals convert exactly, never through binary
/// floating point.
pub fn parse_rational(text: &str) -> Result<BigRational, String> {
    let s = text.trim();
    if s.is_empty() {
        return Err("empty value where a rational number was expected".into());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = BigInt::from_str(num.trim())
            .map_err(|_| format!("invalid numerator in rational `{s}`"))?;
        let d = BigInt::from_str(den.trim())
            .map_err(|_| format!("invalid denominator in rational `{s}`"))?;
        if d == BigInt::from(0) {
            return Err(format!("zero denominator in rational `{s}`"));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let (sign, int_digits) = match int_part.trim() {
            t if t.starts_with('-') => (-1, &t[1..]),
            t if t.starts_with('+') => (1, &t[1..]),
            t => (1, t),
        };
        let frac_digits = frac_part.trim();
        if !frac_digits.chars().all(|c| c.is_ascii_digit()) || frac_digits.is_empty() {
            return Err(format!("invalid decimal `{s}`"));
        }
        if !int_digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(format!("invalid decimal `{s}`"));
        }
        let int_digits = if int_digits.is_empty() { "0" } else { int_digits };
        let combined = format!("{int_digits}{frac_digits}");
        let numer = BigInt::from_str(&combined)
            .map_err(|_| format!("invalid decimal `{s}`"))?;
        let denom = BigInt::from(10u32).pow(frac_digits.len() as u32);
        return Ok(BigRational::new(BigInt::from(sign) * numer, denom));
    }
    BigInt::from_str(s)
        .map(BigRational::from_integer)
        .map_err(|_| format!("`{s}` is not a rational number (expected `a/b`, an integer, or a decimal)"))
}

/// Render an exact rational: `num/den`, or just the numerator when the
/// (reduced) denominator is one.
pub fn format_rational(value: &BigRational) -> String {
    if value.denom() == &BigInt::from(1) {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Parse a comma-separated list of rationals, e.g. `1/6,1/3,1/2`.
pub fn parse_rational_list(text: &str) -> Result<Vec<BigRational>, String> {
    text.split(',').map(parse_rational).collect()
}

/// Load a distribution from a command-line argument.
///
/// If the argument names an existing file, the file is read as a JSON
/// document of the form `{"masses": ["1/6", "1/3", "1/2"]}` (entries may
/// also be non-negative JSON integers; JSON floats are rejected so that
/// every input stays exact — write decimals as strings instead).
/// Otherwise the argument is parsed inline as comma-separated rationals.
/// Validation failures (negative mass, masses not summing to one) surface
/// from distribution construction in both paths.
pub fn load_dist(source: &str) -> Result<Dist, String> {
    let path = std::path::Path::new(source);
    if path.exists() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read `{source}`: {e}"))?;
        let doc: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| format!("`{source}` is not valid JSON: {e}"))?;
        let masses = dist_masses_from_json(&doc)
            .map_err(|e| format!("in `{source}`: {e}"))?;
        return Dist::new(masses).map_err(|e| format!("in `{source}`: {e}"));
    }
    let masses = parse_rational_list(source)?;
    Dist::new(masses).map_err(|e| e.to_string())
}

/// Extract the mass vector from a distribution JSON document.
pub fn dist_masses_from_json(doc: &serde_json::Value) -> Result<Vec<BigRational>, String> {
    let masses = doc
        .get("masses")
        .ok_or("expected a JSON object with a `masses` array")?;
    let entries = masses
        .as_array()
        .ok_or("`masses` must be a JSON array")?;
    entries.iter().map(rational_from_json).collect()
}

/// Extract a joint matrix from a JSON document of the form
/// `{"rows": [["1/4","1/4"],["1/2","0"]]}` — the inverse of
/// [`joint_to_json`], kept to pin the emitted schema in tests.
#[cfg(test)]
pub fn joint_from_json(doc: &serde_json::Value) -> Result<Joint, String> {
    let rows = doc
        .get("rows")
        .ok_or("expected a JSON object with a `rows` array")?;
    let rows = rows.as_array().ok_or("`rows` must be a JSON array")?;
    let mut matrix = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let cells = row
            .as_array()
            .ok_or_else(|| format!("row {i} must be a JSON array"))?;
        let parsed: Result<Vec<BigRational>, String> =
            cells.iter().map(rational_from_json).collect();
        matrix.push(parsed.map_err(|e| format!("row {i}: {e}"))?);
    }
    Joint::new(matrix).map_err(|e| e.to_string())
}

fn rational_from_json(value: &serde_json::Value) -> Result<BigRational, String> {
    match value {
        serde_json::Value::String(s) => parse_rational(s),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigRational::from_integer(BigInt::from(i)))
            } else if let Some(u) = n.as_u64() {
                Ok(BigRational::from_integer(BigInt::from(u)))
            } else {
                Err(format!(
                    "non-integer JSON number `{n}` is not exact; quote it as a string (e.g. \"1/4\" or \"0.25\")"
                ))
            }
        }
        other => Err(format!("expected a rational string or integer, found `{other}`")),
    }
}

/// Distribution as a JSON document: `{"masses": [...]}`.
pub fn dist_to_json(dist: &Dist) -> serde_json::Value {
    let masses: Vec<serde_json::Value> = dist
        .masses()
        .iter()
        .map(|m| serde_json::Value::String(format_rational(m)))
        .collect();
    serde_json::json!({ "masses": masses })
}

/// Joint matrix as a JSON document: `{"rows": [[...], ...]}`.
pub fn joint_to_json(joint: &Joint) -> serde_json::Value {
    let rows: Vec<serde_json::Value> = (0..joint.rows())
        .map(|i| {
            let cells: Vec<serde_json::Value> = (0..joint.cols())
                .map(|j| serde_json::Value::String(format_rational(joint.get(i, j))))
                .collect();
            serde_json::Value::Array(cells)
        })
        .collect();
    serde_json::json!({ "rows": rows })
}

/// Joint matrix as CSV: one matrix row per line, cells as exact rationals.
pub fn joint_to_csv(joint: &Joint) -> String {
    let mut out = String::new();
    for i in 0..joint.rows() {
        for j in 0..joint.cols() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", format_rational(joint.get(i, j)));
        }
        out.push('\n');
    }
    out
}
