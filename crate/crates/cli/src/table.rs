//! CSV output with the fixed row schema
//! `seed,n,bc,quantity,estimate,stderr,n_samples`.

use std::fmt::Write as _;
use std::path::Path;

use ao_gibbs::model::Estimate;

use crate::error::CliError;

pub const CSV_VERSION: &str = "ao-gibbs-csv v1";
pub const CSV_HEADER: &str = "seed,n,bc,quantity,estimate,stderr,n_samples";

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub seed: u64,
    pub n: f64,
    pub bc: String,
    pub quantity: String,
    pub estimate: f64,
    pub stderr: f64,
    pub n_samples: usize,
}

impl Row {
    pub fn new(seed: u64, n: f64, bc: &str, quantity: &str, e: Estimate<f64>) -> Self {
        Self {
            seed,
            n,
            bc: bc.to_string(),
            quantity: quantity.to_string(),
            estimate: e.value,
            stderr: e.stderr,
            n_samples: e.n_samples,
        }
    }

    pub fn exact(seed: u64, n: f64, bc: &str, quantity: &str, value: f64) -> Self {
        Self::new(seed, n, bc, quantity, Estimate::new(value, 0.0, 1))
    }
}

/// CSV text: a version comment carrying the spec hash, the header, rows.
pub fn render(rows: &[Row], spec_hash: &str) -> String {
    let mut out = format!("# {CSV_VERSION} spec_sha256={spec_hash}\n{CSV_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:?},{},{},{:?},{:?},{}",
            r.seed, r.n, r.bc, r.quantity, r.estimate, r.stderr, r.n_samples
        );
    }
    out
}

pub fn write(path: &Path, rows: &[Row], spec_hash: &str) -> Result<(), CliError> {
    std::fs::write(path, render(rows, spec_hash)).map_err(|e| CliError::io(path, e))
}

/// Parses rendered CSV back into rows, skipping comment lines.
pub fn parse(text: &str) -> Result<Vec<Row>, String> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    if lines.next() != Some(CSV_HEADER) {
        return Err("missing header".into());
    }
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 7 {
                return Err(format!("bad row: {l}"));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|e| e.to_string());
            Ok(Row {
                seed: f[0].parse().map_err(|e: std::num::ParseIntError| e.to_string())?,
                n: num(f[1])?,
                bc: f[2].to_string(),
                quantity: f[3].to_string(),
                estimate: num(f[4])?,
                stderr: num(f[5])?,
                n_samples: f[6].parse().map_err(|e: std::num::ParseIntError| e.to_string())?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_and_parse_round_trip() {
        let rows = vec![
            Row::new(7, 4.0, "free", "pressure_direct", Estimate::new(-0.0123456789012345, 1e-5, 1000)),
            Row::exact(7, 8.0, "periodic", "good_density", f64::INFINITY),
        ];
        let text = render(&rows, "abc");
        assert!(text.starts_with("# ao-gibbs-csv v1 spec_sha256=abc\nseed,n,bc,quantity,estimate,stderr,n_samples\n"));
        assert_eq!(parse(&text).unwrap(), rows);
    }
}
