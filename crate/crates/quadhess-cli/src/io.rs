//! Instance files and command-line point parsing.
//!
//! A quadric file is JSON: `{"n": 1, "kind": "rational", "entries": [[..]]}`
//! with `(n+2) x (n+2)` entries. Rational entries are strings `"p/q"` or
//! `"p"` (integer JSON numbers are accepted too); float entries are JSON
//! numbers; complex entries are two-element `[re, im]` arrays. Exact mode
//! only accepts rational syntax, so binary rounding can never slip in
//! silently.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num::complex::Complex64;
use num::{BigInt, BigRational, ToPrimitive};
use serde::Deserialize;

use quadhess::linalg::{ColVector, Matrix};
use quadhess::quadric::QuadricSurface;
use quadhess::scalar::Scalar;

use crate::CliError;

/// Computation mode selected on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Exact,
    Float,
    Complex,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => write!(f, "exact"),
            Mode::Float => write!(f, "float"),
            Mode::Complex => write!(f, "complex"),
        }
    }
}

#[derive(Deserialize)]
struct QuadricFile {
    n: usize,
    #[serde(default)]
    kind: Option<String>,
    entries: Vec<Vec<serde_json::Value>>,
}

/// A quadric instance parsed under one of the three scalar kinds.
pub enum TypedQuadric {
    Rational(QuadricSurface<BigRational>),
    Float(QuadricSurface<f64>),
    Complex(QuadricSurface<Complex64>),
}

impl TypedQuadric {
    pub fn n(&self) -> usize {
        match self {
            TypedQuadric::Rational(q) => q.n(),
            TypedQuadric::Float(q) => q.n(),
            TypedQuadric::Complex(q) => q.n(),
        }
    }
}

pub fn parse_rational(token: &str) -> Result<BigRational, CliError> {
    let token = token.trim();
    let bad = || CliError::Parse(format!("`{token}` is not a rational (`p` or `p/q`)"));
    if token.contains(['.', 'e', 'E']) {
        return Err(CliError::Parse(format!(
            "`{token}`: decimal syntax is not allowed in exact mode; use `p/q`"
        )));
    }
    match token.split_once('/') {
        Some((num, den)) => {
            let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
            let den = BigInt::from_str(den.trim()).map_err(|_| bad())?;
            if den == BigInt::from(0) {
                return Err(CliError::Parse(format!("`{token}` has a zero denominator")));
            }
            Ok(BigRational::new(num, den))
        }
        None => Ok(BigRational::from_integer(
            BigInt::from_str(token).map_err(|_| bad())?,
        )),
    }
}

fn entry_rational(v: &serde_json::Value) -> Result<BigRational, CliError> {
    match v {
        serde_json::Value::String(s) => parse_rational(s),
        serde_json::Value::Number(n) => n
            .as_i64()
            .map(|i| BigRational::from_integer(BigInt::from(i)))
            .ok_or_else(|| {
                CliError::Parse(format!(
                    "entry {n} is not an integer; exact mode needs `p/q` strings"
                ))
            }),
        other => Err(CliError::Parse(format!("entry {other} is not rational"))),
    }
}

fn entry_float(v: &serde_json::Value) -> Result<f64, CliError> {
    match v {
        serde_json::Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| CliError::Parse(format!("entry {n} is not a float"))),
        serde_json::Value::String(s) => Ok(parse_rational(s)?.to_f64().ok_or_else(|| {
            CliError::Parse(format!("entry `{s}` does not fit in a double"))
        })?),
        other => Err(CliError::Parse(format!("entry {other} is not a float"))),
    }
}

fn entry_complex(v: &serde_json::Value) -> Result<Complex64, CliError> {
    match v {
        serde_json::Value::Array(pair) if pair.len() == 2 => {
            let re = entry_float(&pair[0])?;
            let im = entry_float(&pair[1])?;
            Ok(Complex64::new(re, im))
        }
        other => Ok(Complex64::new(entry_float(other)?, 0.0)),
    }
}

fn kind_allows(kind: &str, mode: Mode) -> bool {
    match kind {
        "rational" => true,
        "float" => mode != Mode::Exact,
        "complex" => mode == Mode::Complex,
        _ => false,
    }
}

/// Load a quadric file and parse its entries under the requested mode.
pub fn load_quadric(path: &Path, mode: Mode) -> Result<TypedQuadric, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    let file: QuadricFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let size = file.n + 2;
    if file.entries.len() != size || file.entries.iter().any(|row| row.len() != size) {
        return Err(CliError::Parse(format!(
            "{}: entries must form a {size}x{size} matrix",
            path.display()
        )));
    }
    if let Some(kind) = &file.kind {
        if !matches!(kind.as_str(), "rational" | "float" | "complex") {
            return Err(CliError::Parse(format!("unknown kind `{kind}`")));
        }
        if !kind_allows(kind, mode) {
            return Err(CliError::Parse(format!(
                "a `{kind}` file cannot be used in {mode} mode"
            )));
        }
    }

    match mode {
        Mode::Exact => {
            let rows = build_rows(&file.entries, entry_rational)?;
            Ok(TypedQuadric::Rational(new_surface(file.n, rows)?))
        }
        Mode::Float => {
            let rows = build_rows(&file.entries, entry_float)?;
            Ok(TypedQuadric::Float(new_surface(file.n, rows)?))
        }
        Mode::Complex => {
            let rows = build_rows(&file.entries, entry_complex)?;
            Ok(TypedQuadric::Complex(new_surface(file.n, rows)?))
        }
    }
}

fn build_rows<T>(
    entries: &[Vec<serde_json::Value>],
    parse: impl Fn(&serde_json::Value) -> Result<T, CliError>,
) -> Result<Vec<Vec<T>>, CliError> {
    entries
        .iter()
        .map(|row| row.iter().map(&parse).collect())
        .collect()
}

fn new_surface<S: Scalar>(n: usize, rows: Vec<Vec<S>>) -> Result<QuadricSurface<S>, CliError> {
    let m = Matrix::from_rows(rows).map_err(|e| CliError::Parse(e.to_string()))?;
    QuadricSurface::new(n, m).map_err(|e| CliError::Parse(e.to_string()))
}

/// Split on commas that sit outside brackets, so complex coordinates
/// `[re,im]` survive.
fn split_coords(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '[' => {
                depth += 1;
                cur.push(ch);
            }
            ']' => {
                depth = depth.saturating_sub(1);
                cur.push(ch);
            }
            ',' if depth == 0 => {
                out.push(std::mem::take(&mut cur));
            }
            _ => cur.push(ch),
        }
    }
    out.push(cur);
    out
}

/// A point parsed under one of the three scalar kinds.
pub enum TypedPoint {
    Rational(ColVector<BigRational>),
    Float(ColVector<f64>),
    Complex(ColVector<Complex64>),
}

pub fn parse_point(s: &str, mode: Mode, n: usize) -> Result<TypedPoint, CliError> {
    let tokens = split_coords(s);
    if tokens.len() != n {
        return Err(CliError::Parse(format!(
            "point has {} coordinates, surface expects {n}",
            tokens.len()
        )));
    }
    match mode {
        Mode::Exact => {
            let coords = tokens
                .iter()
                .map(|t| parse_rational(t))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(TypedPoint::Rational(ColVector::from_vec(coords)))
        }
        Mode::Float => {
            let coords = tokens
                .iter()
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| CliError::Parse(format!("`{t}` is not a float coordinate")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(TypedPoint::Float(ColVector::from_vec(coords)))
        }
        Mode::Complex => {
            let coords = tokens
                .iter()
                .map(|t| parse_complex_coord(t))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(TypedPoint::Complex(ColVector::from_vec(coords)))
        }
    }
}

fn parse_complex_coord(token: &str) -> Result<Complex64, CliError> {
    let t = token.trim();
    if let Some(inner) = t.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
        let parts: Vec<&str> = inner.split(',').collect();
        if parts.len() != 2 {
            return Err(CliError::Parse(format!(
                "`{token}` must be `[re,im]` in complex mode"
            )));
        }
        let re = parts[0].trim().parse::<f64>();
        let im = parts[1].trim().parse::<f64>();
        match (re, im) {
            (Ok(re), Ok(im)) => Ok(Complex64::new(re, im)),
            _ => Err(CliError::Parse(format!("`{token}` is not a complex pair"))),
        }
    } else {
        t.parse::<f64>()
            .map(|re| Complex64::new(re, 0.0))
            .map_err(|_| CliError::Parse(format!("`{token}` is not a complex coordinate")))
    }
}

/// Human-readable and JSON renderings for the three scalar kinds;
/// serialization stays bit-faithful for rationals by using strings.
pub trait RenderScalar: Scalar {
    fn render(&self) -> String;
    fn to_json(&self) -> serde_json::Value;
}

impl RenderScalar for BigRational {
    fn render(&self) -> String {
        self.to_string()
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.to_string())
    }
}

impl RenderScalar for f64 {
    fn render(&self) -> String {
        format!("{self}")
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Number::from_f64(*self)
            .map(serde_json::Value::Number)
            .unwrap_or_else(|| serde_json::Value::String(format!("{self}")))
    }
}

impl RenderScalar for Complex64 {
    fn render(&self) -> String {
        format!("[{},{}]", self.re, self.im)
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::json!([self.re, self.im])
    }
}

pub fn render_point<S: RenderScalar>(x: &ColVector<S>) -> String {
    x.iter().map(RenderScalar::render).collect::<Vec<_>>().join(",")
}
