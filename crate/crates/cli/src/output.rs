//! CSV and JSON writers with a fixed schema.

use std::fmt::Write as _;
use std::io::Write;

use hypospec::inequalities::BoundReport;
use serde::Serialize;

use crate::CliError;

pub const BOUND_HEADER: &str = "inequality,k,n,alpha,beta,lhs,rhs,slack,satisfied,proxy";
pub const SPECTRUM_HEADER: &str = "index,lambda,residual";

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub eigensolver: f64,
    pub dirichlet: f64,
    pub clamped: f64,
    pub commutator: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub command: &'static str,
    pub seed: u64,
    pub h: [f64; 3],
    pub domain: String,
    pub n: usize,
    pub sigma: u32,
    pub mode: String,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    pub inequality: String,
    pub k: usize,
    pub n: usize,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub satisfied: bool,
    pub proxy: bool,
}

impl From<&BoundReport> for BoundRow {
    fn from(r: &BoundReport) -> Self {
        Self {
            inequality: r.inequality.as_str().to_string(),
            k: r.k,
            n: r.n,
            alpha: r.exponents.map(|e| e.alpha),
            beta: r.exponents.map(|e| e.beta),
            lhs: r.lhs,
            rhs: r.rhs,
            slack: r.slack,
            satisfied: r.satisfied,
            proxy: r.proxy,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumRow {
    pub index: usize,
    pub lambda: f64,
    pub residual: f64,
}

/// Shortest round-trip form; scientific notation outside `[1e-4, 1e15)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn bound_csv(rows: &[BoundRow]) -> String {
    let mut out = String::new();
    out.push_str(BOUND_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.inequality,
            r.k,
            r.n,
            opt(r.alpha),
            opt(r.beta),
            num(r.lhs),
            num(r.rhs),
            num(r.slack),
            r.satisfied,
            r.proxy
        );
    }
    out
}

pub fn spectrum_csv(rows: &[SpectrumRow]) -> String {
    let mut out = String::new();
    out.push_str(SPECTRUM_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{},{},{}", r.index, num(r.lambda), num(r.residual));
    }
    out
}

/// Eigenvalues from a spectrum CSV: the `lambda` column when a header names
/// it, otherwise a single bare column.
pub fn parse_spectrum(text: &str) -> Result<Vec<f64>, CliError> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .peekable();
    let mut column = 0;
    if let Some(first) = lines.peek() {
        let fields: Vec<&str> = first.split(',').map(str::trim).collect();
        if fields[0].parse::<f64>().is_err() {
            column = fields.iter().position(|f| *f == "lambda").ok_or_else(|| {
                CliError::Validation("spectrum header has no 'lambda' column".into())
            })?;
            lines.next();
        }
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let field = line.split(',').nth(column).map(str::trim).ok_or_else(|| {
                CliError::Validation(format!("spectrum row {}: missing column {column}", i + 1))
            })?;
            field
                .parse()
                .map_err(|e| CliError::Validation(format!("spectrum row {}: {e}", i + 1)))
        })
        .collect()
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    meta: &'a Meta,
    #[serde(flatten)]
    body: T,
}

pub fn json<T: Serialize>(meta: &Meta, body: T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(&Document { meta, body })
        .map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Writes `text` to `path`, or to stdout when the path is absent or `-`.
pub fn emit(path: Option<&str>, text: &str) -> Result<(), CliError> {
    match path {
        None | Some("-") => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .map_err(|e| CliError::Io(e.to_string()))
        }
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{p}: {e}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hypospec::inequalities::{check_yang_first, EigenSequence};

    #[test]
    fn csv_layout() {
        let seq = EigenSequence::new(vec![1.0, 2.0]).unwrap();
        let r = check_yang_first(&seq, 1, 2).unwrap();
        let csv = bound_csv(&[BoundRow::from(&r)]);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(BOUND_HEADER));
        let row = lines.next().unwrap();
        assert!(row.starts_with("yang_first,1,2,,,"), "{row}");
        assert!(row.ends_with(",true,false"));
    }

    #[test]
    fn number_format() {
        assert_eq!(num(31.25), "31.25");
        assert_eq!(num(0.0), "0");
        assert_eq!(num(1e-11), "1e-11");
        assert_eq!(num(-3.7e-16), "-3.7e-16");
        assert_eq!(num(2.5e20), "2.5e20");
    }

    #[test]
    fn spectrum_round_trip() {
        let rows = vec![
            SpectrumRow {
                index: 1,
                lambda: 31.25,
                residual: 1e-11,
            },
            SpectrumRow {
                index: 2,
                lambda: 0.1 + 0.2,
                residual: 0.0,
            },
        ];
        let parsed = parse_spectrum(&spectrum_csv(&rows)).unwrap();
        assert_eq!(parsed, vec![31.25, 0.1 + 0.2]);
        assert_eq!(parse_spectrum("1.5\n2.5\n").unwrap(), vec![1.5, 2.5]);
        assert!(parse_spectrum("index,value\n1,2\n").is_err());
    }
}
