//! Plain-text file formats.
//!
//! * Matrix: first line `N`, then `N` lines of `N` reals separated by single
//!   spaces, written with 17 significant digits.
//! * Partition: first line `N n`, then `N` lines holding the 1-based domain
//!   of each spin.
//! * Configuration: one line of `N` entries from `+1` / `-1`.
//! * Pattern: first line `M N`, then `M` lines of `N` entries from `+1` / `-1`.
//!
//! Readers report problems with 1-based line and column numbers and never
//! repair their input.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::hebbian::PatternMatrix;
use crate::model::{ConnectionMatrix, DomainPartition, SpinConfiguration};

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Non-empty lines with their 1-based line numbers; trailing blank lines
/// are allowed, interior ones are not.
fn content_lines(text: &str) -> Result<Vec<(usize, &str)>> {
    let lines: Vec<&str> = text.lines().collect();
    let last = lines.iter().rposition(|l| !l.trim().is_empty()).map_or(0, |p| p + 1);
    lines[..last]
        .iter()
        .enumerate()
        .map(|(i, l)| {
            if l.trim().is_empty() {
                Err(parse_err(i + 1, 1, "unexpected blank line"))
            } else {
                Ok((i + 1, *l))
            }
        })
        .collect()
}

fn parse_token<T: std::str::FromStr>(tok: &str, line: usize, column: usize, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| parse_err(line, column, format!("expected {what}, found {tok:?}")))
}

fn parse_header(lines: &[(usize, &str)], arity: usize, what: &str) -> Result<Vec<usize>> {
    let &(no, text) = lines.first().ok_or_else(|| parse_err(1, 1, format!("missing {what} header")))?;
    let toks: Vec<&str> = text.split_whitespace().collect();
    if toks.len() != arity {
        return Err(parse_err(no, 1, format!("{what} header must have {arity} field(s)")));
    }
    toks.iter()
        .enumerate()
        .map(|(c, t)| parse_token(t, no, c + 1, "a non-negative integer"))
        .collect()
}

fn parse_spin(tok: &str, line: usize, column: usize) -> Result<i8> {
    match tok {
        "+1" | "1" => Ok(1),
        "-1" => Ok(-1),
        _ => Err(parse_err(line, column, format!("expected +1 or -1, found {tok:?}"))),
    }
}

fn spin_token(v: i8) -> &'static str {
    if v > 0 {
        "+1"
    } else {
        "-1"
    }
}

pub fn write_matrix(j: &ConnectionMatrix) -> String {
    let mut out = format!("{}\n", j.size());
    for row in j.rows() {
        let line: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn read_matrix(text: &str) -> Result<ConnectionMatrix> {
    let lines = content_lines(text)?;
    let n = parse_header(&lines, 1, "matrix")?[0];
    if n == 0 {
        return Err(parse_err(lines[0].0, 1, "matrix size must be positive"));
    }
    if lines.len() != n + 1 {
        let line = lines.last().map_or(1, |l| l.0);
        return Err(parse_err(line, 1, format!("expected {n} matrix rows, found {}", lines.len() - 1)));
    }
    let mut rows = Vec::with_capacity(n);
    for &(no, text) in &lines[1..] {
        let row = text
            .split_whitespace()
            .enumerate()
            .map(|(c, t)| parse_token::<f64>(t, no, c + 1, "a real number"))
            .collect::<Result<Vec<_>>>()?;
        if row.len() != n {
            return Err(parse_err(no, row.len().min(n) + 1, format!("row has {} entries, expected {n}", row.len())));
        }
        rows.push(row);
    }
    // Map validation failures back to file coordinates (row i is line i + 2).
    ConnectionMatrix::from_rows(&rows).map_err(|e| match e {
        Error::AsymmetricEntry { i, j, .. } | Error::NonFiniteEntry { i, j } => parse_err(i + 2, j + 1, e.to_string()),
        Error::NonzeroDiagonal(i) => parse_err(i + 2, i + 1, e.to_string()),
        other => other,
    })
}

pub fn write_partition(p: &DomainPartition) -> String {
    let mut out = format!("{} {}\n", p.len(), p.num_domains());
    for &l in p.assignment() {
        let _ = writeln!(out, "{}", l + 1);
    }
    out
}

pub fn read_partition(text: &str) -> Result<DomainPartition> {
    let lines = content_lines(text)?;
    let header = parse_header(&lines, 2, "partition")?;
    let (n, domains) = (header[0], header[1]);
    if lines.len() != n + 1 {
        let line = lines.last().map_or(1, |l| l.0);
        return Err(parse_err(line, 1, format!("expected {n} domain labels, found {}", lines.len() - 1)));
    }
    let mut assignment = Vec::with_capacity(n);
    for &(no, text) in &lines[1..] {
        let toks: Vec<&str> = text.split_whitespace().collect();
        if toks.len() != 1 {
            return Err(parse_err(no, 2, "expected one domain index per line"));
        }
        let l: usize = parse_token(toks[0], no, 1, "a domain index")?;
        if l == 0 || l > domains {
            return Err(parse_err(no, 1, format!("domain index {l} outside 1..={domains}")));
        }
        assignment.push(l - 1);
    }
    DomainPartition::with_domain_count(assignment, domains)
}

pub fn write_configuration(s: &SpinConfiguration) -> String {
    let toks: Vec<&str> = s.as_slice().iter().map(|&v| spin_token(v)).collect();
    format!("{}\n", toks.join(" "))
}

pub fn read_configuration(text: &str) -> Result<SpinConfiguration> {
    let lines = content_lines(text)?;
    if lines.len() != 1 {
        let line = lines.get(1).map_or(1, |l| l.0);
        return Err(parse_err(line, 1, "configuration must be a single line"));
    }
    let (no, text) = lines[0];
    let spins = text
        .split_whitespace()
        .enumerate()
        .map(|(c, t)| parse_spin(t, no, c + 1))
        .collect::<Result<Vec<_>>>()?;
    SpinConfiguration::new(spins)
}

pub fn write_pattern(x: &PatternMatrix) -> String {
    let mut out = format!("{} {}\n", x.dim(), x.num_columns());
    for r in 0..x.dim() {
        let toks: Vec<&str> = (0..x.num_columns()).map(|c| spin_token(x.get(r, c))).collect();
        out.push_str(&toks.join(" "));
        out.push('\n');
    }
    out
}

pub fn read_pattern(text: &str) -> Result<PatternMatrix> {
    let lines = content_lines(text)?;
    let header = parse_header(&lines, 2, "pattern")?;
    let (m, n) = (header[0], header[1]);
    if lines.len() != m + 1 {
        let line = lines.last().map_or(1, |l| l.0);
        return Err(parse_err(line, 1, format!("expected {m} pattern rows, found {}", lines.len() - 1)));
    }
    let mut cols = vec![Vec::with_capacity(m); n];
    for &(no, text) in &lines[1..] {
        let row = text
            .split_whitespace()
            .enumerate()
            .map(|(c, t)| parse_spin(t, no, c + 1))
            .collect::<Result<Vec<_>>>()?;
        if row.len() != n {
            return Err(parse_err(no, row.len().min(n) + 1, format!("row has {} entries, expected {n}", row.len())));
        }
        for (col, v) in cols.iter_mut().zip(row) {
            col.push(v);
        }
    }
    PatternMatrix::from_columns(m, &cols)
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn with_path<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { line, column, message } => Error::Parse {
            line,
            column,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    })
}

pub fn load_matrix(path: &Path) -> Result<ConnectionMatrix> {
    with_path(path, read_matrix(&read_file(path)?))
}

pub fn load_partition(path: &Path) -> Result<DomainPartition> {
    with_path(path, read_partition(&read_file(path)?))
}

pub fn load_configuration(path: &Path) -> Result<SpinConfiguration> {
    with_path(path, read_configuration(&read_file(path)?))
}

pub fn load_pattern(path: &Path) -> Result<PatternMatrix> {
    with_path(path, read_pattern(&read_file(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn matrix_text_layout() {
        let j = ConnectionMatrix::from_rows(&[vec![0.0, 0.1], vec![0.1, 0.0]]).unwrap();
        assert_eq!(
            write_matrix(&j),
            "2\n0.0000000000000000e0 1.0000000000000001e-1\n1.0000000000000001e-1 0.0000000000000000e0\n"
        );
    }

    #[test]
    fn asymmetric_file_reports_position() {
        let err = read_matrix("2\n0 1\n0.5 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, column: 2, .. }), "{err:?}");
        let err = read_matrix("2\n0 1\n1 3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, column: 2, .. }), "{err:?}");
    }

    #[test]
    fn ragged_and_garbage_rows_rejected() {
        let err = read_matrix("3\n0 1 2\n1 0\n2 0 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, column: 3, .. }), "{err:?}");
        let err = read_matrix("2\n0 x\n1 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, column: 2, .. }), "{err:?}");
        assert!(read_matrix("2\n0 1\n").is_err());
        assert!(read_matrix("2\n0 1\n\n1 0\n").is_err());
        assert!(read_matrix("").is_err());
        assert!(read_matrix("2\n0 inf\ninf 0\n").is_err());
    }

    #[test]
    fn partition_files() {
        let p = read_partition("5 2\n1\n1\n2\n2\n2\n").unwrap();
        assert_eq!(p.assignment(), &[0, 0, 1, 1, 1]);
        assert_eq!(write_partition(&p), "5 2\n1\n1\n2\n2\n2\n");
        assert!(matches!(read_partition("2 2\n1\n3\n"), Err(Error::Parse { line: 3, .. })));
        assert!(read_partition("2 3\n1\n2\n").is_err());
        assert!(read_partition("2 1\n1\n").is_err());
    }

    #[test]
    fn configuration_files() {
        let s = read_configuration("+1 -1 1\n").unwrap();
        assert_eq!(s.as_slice(), &[1, -1, 1]);
        assert_eq!(write_configuration(&s), "+1 -1 +1\n");
        assert!(matches!(read_configuration("+1 0\n"), Err(Error::Parse { line: 1, column: 2, .. })));
        assert!(read_configuration("+1\n-1\n").is_err());
    }

    #[test]
    fn pattern_files() {
        let x = PatternMatrix::from_columns(2, &[vec![1, -1], vec![-1, -1], vec![1, 1]]).unwrap();
        let text = write_pattern(&x);
        assert_eq!(text, "2 3\n+1 -1 +1\n-1 -1 +1\n");
        assert_eq!(read_pattern(&text).unwrap(), x);
    }

    #[test]
    fn load_reports_missing_file_as_io() {
        let err = load_matrix(Path::new("/nonexistent/matrix.txt")).unwrap_err();
        assert!(matches!(err, Error::Io(_)));
    }

    proptest! {
        #[test]
        fn matrix_round_trip(n in 1usize..8, raw in proptest::collection::vec(-1e6f64..1e6, 64)) {
            let j = ConnectionMatrix::from_upper_fn(n, |a, b| raw[a * 8 + b]).unwrap();
            prop_assert_eq!(read_matrix(&write_matrix(&j)).unwrap(), j);
        }

        #[test]
        fn partition_and_configuration_round_trip(labels in proptest::collection::vec(0usize..5, 1..30)) {
            let mut seen = labels.clone();
            seen.sort_unstable();
            seen.dedup();
            let p = DomainPartition::from_assignment(labels.iter().map(|l| seen.binary_search(l).unwrap()).collect()).unwrap();
            prop_assert_eq!(read_partition(&write_partition(&p)).unwrap(), p);
            let s = SpinConfiguration::new(labels.iter().map(|&l| if l % 2 == 0 { 1 } else { -1 }).collect()).unwrap();
            prop_assert_eq!(read_configuration(&write_configuration(&s)).unwrap(), s);
        }
    }
}
