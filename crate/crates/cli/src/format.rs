//! Text formats for point sets, discrete measures and marginal CDFs.

use std::fmt::Write as _;

use stardisc::applications::DiscreteMeasure;
use stardisc::exact::MarginalCdf;
use stardisc::PointSet;

use crate::error::CliError;

fn parse_err(line: usize, msg: impl Into<String>) -> CliError {
    CliError::Parse {
        line,
        msg: msg.into(),
    }
}

/// Data lines with their 1-based line numbers; blank lines and lines
/// starting with `#` are skipped.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn numbers(line: usize, s: &str) -> Result<Vec<f64>, CliError> {
    s.split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_err(line, format!("`{tok}` is not a finite number")))
        })
        .collect()
}

/// One point per line, `d` whitespace-separated coordinates in `[0,1)`.
pub fn parse_pointset(text: &str) -> Result<PointSet, CliError> {
    let mut dim = None;
    let mut coords = Vec::new();
    for (line, s) in data_lines(text) {
        let row = numbers(line, s)?;
        let d = *dim.get_or_insert(row.len());
        if row.len() != d {
            return Err(parse_err(line, format!("expected {d} coordinates, found {}", row.len())));
        }
        if let Some(v) = row.iter().find(|v| !(0.0..1.0).contains(*v)) {
            return Err(parse_err(line, format!("coordinate {v} is outside [0,1)")));
        }
        coords.extend(row);
    }
    let d = dim.ok_or_else(|| parse_err(0, "no points"))?;
    Ok(PointSet::new(d, coords)?)
}

/// Each line: probability followed by `d` coordinates in `[0,1]`.
/// Probabilities must sum to 1 within `1e-9`.
pub fn parse_measure(text: &str) -> Result<DiscreteMeasure, CliError> {
    let mut dim = None;
    let mut atoms = Vec::new();
    let mut probs = Vec::new();
    for (line, s) in data_lines(text) {
        let row = numbers(line, s)?;
        if row.len() < 2 {
            return Err(parse_err(line, "expected a probability and at least one coordinate"));
        }
        let d = *dim.get_or_insert(row.len() - 1);
        if row.len() - 1 != d {
            return Err(parse_err(line, format!("expected {d} coordinates, found {}", row.len() - 1)));
        }
        if row[0] < 0.0 {
            return Err(parse_err(line, format!("probability {} is negative", row[0])));
        }
        if let Some(v) = row[1..].iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(parse_err(line, format!("coordinate {v} is outside [0,1]")));
        }
        probs.push(row[0]);
        atoms.extend_from_slice(&row[1..]);
    }
    let d = dim.ok_or_else(|| parse_err(0, "no atoms"))?;
    Ok(DiscreteMeasure::with_tolerance(d, atoms, probs, 1e-9)?)
}

/// One line per axis of `t:F(t)` knots, e.g. `0:0 0.5:0.8 1:1`.
pub fn parse_marginals(text: &str) -> Result<MarginalCdf, CliError> {
    let mut axes = Vec::new();
    for (line, s) in data_lines(text) {
        let mut knots = Vec::new();
        let mut values = Vec::new();
        for tok in s.split_whitespace() {
            let (t, f) = tok
                .split_once(':')
                .ok_or_else(|| parse_err(line, format!("`{tok}` is not of the form t:F")))?;
            let parsed = numbers(line, &format!("{t} {f}"))?;
            knots.push(parsed[0]);
            values.push(parsed[1]);
        }
        axes.push((knots, values));
    }
    Ok(MarginalCdf::new(axes)?)
}

fn join(row: &[f64]) -> String {
    let mut s = String::new();
    for (k, v) in row.iter().enumerate() {
        if k > 0 {
            s.push(' ');
        }
        write!(s, "{v}").expect("writing to a string");
    }
    s
}

/// Header comment, then one point per line in shortest round-trip decimal.
pub fn write_pointset(x: &PointSet) -> String {
    let mut s = format!("# d={} n={}\n", x.dim(), x.len());
    for p in x.points() {
        s.push_str(&join(p));
        s.push('\n');
    }
    s
}

pub fn write_measure(m: &DiscreteMeasure) -> String {
    let mut s = format!("# d={} atoms={}\n", m.dim(), m.len());
    for i in 0..m.len() {
        s.push_str(&join(&[&[m.probs()[i]], m.atom(i)].concat()));
        s.push('\n');
    }
    s
}
