//! Plain-text configuration files: a header `d n count`, then one line
//! `x1 … xd R` per point. Floats use the shortest representation that
//! parses back to the same value.

use std::fmt::Write as _;
use std::path::Path;

use ao_gibbs::model::{Configuration, MarkedPoint};

use crate::error::CliError;

/// Snapshot of a configuration together with its window side.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub n: f64,
    pub config: Configuration<f64>,
}

pub fn format_snapshot(snap: &Snapshot) -> String {
    let d = snap.config.dim();
    let mut out = format!("{} {:?} {}\n", d, snap.n, snap.config.len());
    for p in snap.config.iter() {
        for x in &p.x[..d] {
            let _ = write!(out, "{x:?} ");
        }
        let _ = writeln!(out, "{:?}", p.radius);
    }
    out
}

pub fn parse_snapshot(text: &str) -> Result<Snapshot, CliError> {
    let err = |line: usize, reason: String| CliError::Snapshot { line, reason };
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let (hl, header) = lines.next().ok_or_else(|| err(1, "missing header `d n count`".into()))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 3 {
        return Err(err(hl + 1, format!("header needs 3 fields, found {}", h.len())));
    }
    let d: usize = h[0].parse().map_err(|e| err(hl + 1, format!("dimension: {e}")))?;
    let n: f64 = h[1].parse().map_err(|e| err(hl + 1, format!("side: {e}")))?;
    let count: usize = h[2].parse().map_err(|e| err(hl + 1, format!("count: {e}")))?;
    if !(1..=3).contains(&d) {
        return Err(err(hl + 1, format!("dimension {d} not in 1..=3")));
    }
    let mut config = Configuration::new(d);
    for (i, line) in lines {
        let fields: Vec<f64> = line
            .split_whitespace()
            .map(|f| f.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| err(i + 1, format!("number: {e}")))?;
        if fields.len() != d + 1 {
            return Err(err(i + 1, format!("expected {} fields, found {}", d + 1, fields.len())));
        }
        let p = MarkedPoint::new(d, &fields[..d], fields[d]).map_err(|e| err(i + 1, e.to_string()))?;
        config.insert(p).map_err(|e| err(i + 1, e.to_string()))?;
    }
    if config.len() != count {
        return Err(err(hl + 1, format!("header announces {count} points, file has {}", config.len())));
    }
    Ok(Snapshot { n, config })
}

pub fn save_snapshot(path: &Path, snap: &Snapshot) -> Result<(), CliError> {
    std::fs::write(path, format_snapshot(snap)).map_err(|e| CliError::io(path, e))
}

pub fn load_snapshot(path: &Path) -> Result<Snapshot, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_snapshot(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ao_gibbs::sampling::{rng_for, sample_marked_poisson};
    use ao_gibbs::model::{MarkLaw, Window};

    #[test]
    fn round_trip_is_exact() {
        for d in 1..=3 {
            let mut rng = rng_for(5, "snapshot", d as u64);
            let w = Window::lambda(d, 3.7).unwrap();
            let law = MarkLaw::truncated_weibull(0.3, 1.3, 2.0).unwrap();
            let config = sample_marked_poisson(2.0, &law, &w, &mut rng);
            let snap = Snapshot { n: 3.7, config };
            let back = parse_snapshot(&format_snapshot(&snap)).unwrap();
            assert_eq!(back, snap);
        }
    }

    #[test]
    fn reports_line_of_bad_input() {
        let e = parse_snapshot("2 4.0 2\n0.1 0.2 0.3\n0.5 x 0.1\n").unwrap_err();
        assert!(matches!(e, CliError::Snapshot { line: 3, .. }), "{e}");
        let e = parse_snapshot("2 4.0 3\n0.1 0.2 0.3\n").unwrap_err();
        assert!(matches!(e, CliError::Snapshot { line: 1, .. }));
    }
}
