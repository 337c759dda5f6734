//! MacKay alist reader and writer.
//!
//! Layout (whitespace-separated integers, 1-based indices):
//!
//! ```text
//! N M
//! max_col_degree max_row_degree
//! <N column degrees>
//! <M row degrees>
//! <N lines: row indices of each column, zero-padded to max_col_degree>
//! <M lines: column indices of each row, zero-padded to max_row_degree>
//! ```
//!
//! Blank lines are skipped. Padding zeros are ignored whether present or not.
//! When a maximum degree is 0 the corresponding lists are empty and may be
//! omitted.

use std::fmt::Write as _;

use super::{BinaryMatrix, Gf2Error};

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last_line: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
            last_line: 0,
        }
    }

    /// Next non-blank line parsed into integers, with its 1-based number.
    fn next_ints(&mut self, what: &str) -> Result<(usize, Vec<usize>), Gf2Error> {
        for (idx, line) in self.inner.by_ref() {
            self.last_line = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let ints = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>().map_err(|_| Gf2Error::Alist {
                        line: idx + 1,
                        msg: format!("invalid integer {tok:?} in {what}"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            return Ok((idx + 1, ints));
        }
        Err(Gf2Error::Alist {
            line: self.last_line + 1,
            msg: format!("truncated input: expected {what}"),
        })
    }
}

fn alist_err(line: usize, msg: impl Into<String>) -> Gf2Error {
    Gf2Error::Alist { line, msg: msg.into() }
}

fn expect_len(line: usize, ints: &[usize], n: usize, what: &str) -> Result<(), Gf2Error> {
    if ints.len() != n {
        return Err(alist_err(
            line,
            format!("{what}: expected {n} values, found {}", ints.len()),
        ));
    }
    Ok(())
}

/// Reads one adjacency line: drops padding zeros, converts to 0-based, and
/// checks the entry count and range.
fn read_list(
    lines: &mut Lines<'_>,
    what: &str,
    degree: usize,
    max_degree: usize,
    bound: usize,
) -> Result<(usize, Vec<usize>), Gf2Error> {
    // with a maximum degree of zero every list is an empty (blank) line
    if max_degree == 0 && degree == 0 {
        return Ok((lines.last_line, Vec::new()));
    }
    let (line, ints) = lines.next_ints(what)?;
    if ints.len() > max_degree.max(degree) {
        return Err(alist_err(
            line,
            format!("{what}: {} entries exceed maximum degree {max_degree}", ints.len()),
        ));
    }
    let mut list = Vec::with_capacity(degree);
    for &v in &ints {
        if v == 0 {
            continue;
        }
        if v > bound {
            return Err(alist_err(line, format!("{what}: index {v} out of range 1..={bound}")));
        }
        list.push(v - 1);
    }
    if list.len() != degree {
        return Err(alist_err(
            line,
            format!("{what}: declared degree {degree} but {} indices listed", list.len()),
        ));
    }
    list.sort_unstable();
    if list.windows(2).any(|w| w[0] == w[1]) {
        return Err(alist_err(line, format!("{what}: repeated index")));
    }
    Ok((line, list))
}

/// Parses alist text into a [`BinaryMatrix`], cross-validating the column and
/// row views.
pub fn parse_alist(text: &str) -> Result<BinaryMatrix, Gf2Error> {
    let mut lines = Lines::new(text);

    let (line, dims) = lines.next_ints("dimensions N M")?;
    expect_len(line, &dims, 2, "dimensions")?;
    let (n, m) = (dims[0], dims[1]);

    let (line, maxes) = lines.next_ints("maximum degrees")?;
    expect_len(line, &maxes, 2, "maximum degrees")?;
    let (max_col, max_row) = (maxes[0], maxes[1]);

    let (line, col_deg) = lines.next_ints("column degrees")?;
    expect_len(line, &col_deg, n, "column degrees")?;
    if let Some(&d) = col_deg.iter().find(|&&d| d > max_col) {
        return Err(alist_err(line, format!("column degree {d} exceeds maximum {max_col}")));
    }
    let (line, row_deg) = lines.next_ints("row degrees")?;
    expect_len(line, &row_deg, m, "row degrees")?;
    if let Some(&d) = row_deg.iter().find(|&&d| d > max_row) {
        return Err(alist_err(line, format!("row degree {d} exceeds maximum {max_row}")));
    }
    if col_deg.iter().sum::<usize>() != row_deg.iter().sum::<usize>() {
        return Err(alist_err(line, "column and row degree totals differ"));
    }

    let mut col_lists = Vec::with_capacity(n);
    for (c, &d) in col_deg.iter().enumerate() {
        let (_, list) = read_list(&mut lines, &format!("column {}", c + 1), d, max_col, m)?;
        col_lists.push(list);
    }

    let mut row_adj = Vec::with_capacity(m);
    for (r, &d) in row_deg.iter().enumerate() {
        let (line, list) = read_list(&mut lines, &format!("row {}", r + 1), d, max_row, n)?;
        for &c in &list {
            if col_lists[c].binary_search(&r).is_err() {
                return Err(alist_err(
                    line,
                    format!(
                        "row {} lists column {} but that column does not list the row",
                        r + 1,
                        c + 1
                    ),
                ));
            }
        }
        row_adj.push(list);
    }

    // Degree totals match and every row entry appears in its column list, so
    // the two views hold the same set of entries.
    Ok(BinaryMatrix::from_row_adjacency(m, n, row_adj))
}

/// Serializes `h` as alist text, zero-padding every list to the maximum
/// degree.
pub fn write_alist(h: &BinaryMatrix) -> String {
    let col_deg = h.col_degrees();
    let row_deg = h.row_degrees();
    let max_col = col_deg.iter().copied().max().unwrap_or(0);
    let max_row = row_deg.iter().copied().max().unwrap_or(0);

    let join = |v: &mut dyn Iterator<Item = usize>| v.map(|x| x.to_string()).collect::<Vec<_>>().join(" ");

    let mut out = String::new();
    let _ = writeln!(out, "{} {}", h.cols(), h.rows());
    let _ = writeln!(out, "{max_col} {max_row}");
    let _ = writeln!(out, "{}", join(&mut col_deg.iter().copied()));
    let _ = writeln!(out, "{}", join(&mut row_deg.iter().copied()));
    for c in 0..h.cols() {
        let list = h.col(c);
        let mut it = list
            .iter()
            .map(|&r| r + 1)
            .chain(std::iter::repeat_n(0, max_col - list.len()));
        let _ = writeln!(out, "{}", join(&mut it));
    }
    for r in 0..h.rows() {
        let list = h.row(r);
        let mut it = list
            .iter()
            .map(|&c| c + 1)
            .chain(std::iter::repeat_n(0, max_row - list.len()));
        let _ = writeln!(out, "{}", join(&mut it));
    }
    out
}
