//! Reader and writer for the alist sparse-matrix format.
//!
//! Layout (whitespace separated, 1-based indices, rows may be zero padded):
//!
//! ```text
//! n m
//! max_col_degree max_row_degree
//! col_degree[0] .. col_degree[n-1]
//! row_degree[0] .. row_degree[m-1]
//! one line per column listing its row indices
//! one line per row listing its column indices
//! ```

use std::fmt::Write as _;

use super::LdpcError;

/// Raw contents of an alist file: the dimensions plus both adjacency views,
/// converted to 0-based indices and checked for mutual consistency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlistMatrix {
    pub n_cols: usize,
    pub rows: Vec<Vec<usize>>,
    pub cols: Vec<Vec<usize>>,
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
        }
    }

    /// Next non-blank line as (1-based line number, tokens).
    fn next_numbers(&mut self, what: &str) -> Result<(usize, Vec<usize>), LdpcError> {
        for (idx, line) in self.inner.by_ref() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let numbers = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>().map_err(|_| LdpcError::Alist {
                        line: idx + 1,
                        msg: format!("invalid integer {tok:?} in {what}"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            return Ok((idx + 1, numbers));
        }
        Err(LdpcError::Alist {
            line: 0,
            msg: format!("unexpected end of input while reading {what}"),
        })
    }
}

fn expect_len(line: usize, got: &[usize], want: usize, what: &str) -> Result<(), LdpcError> {
    if got.len() == want {
        Ok(())
    } else {
        Err(LdpcError::Alist {
            line,
            msg: format!("{what}: expected {want} entries, found {}", got.len()),
        })
    }
}

/// Reads one adjacency line: nonzero entries are 1-based indices below
/// `bound`, zeros are padding. The entry count must match `degree`.
fn read_list(
    lines: &mut Lines<'_>,
    what: &str,
    degree: usize,
    bound: usize,
) -> Result<(usize, Vec<usize>), LdpcError> {
    let (line, raw) = lines.next_numbers(what)?;
    let mut list = Vec::with_capacity(degree);
    for &v in &raw {
        if v == 0 {
            continue;
        }
        if v > bound {
            return Err(LdpcError::Alist {
                line,
                msg: format!("{what}: index {v} out of range 1..={bound}"),
            });
        }
        if list.contains(&(v - 1)) {
            return Err(LdpcError::Alist {
                line,
                msg: format!("{what}: duplicate index {v}"),
            });
        }
        list.push(v - 1);
    }
    if list.len() != degree {
        return Err(LdpcError::Alist {
            line,
            msg: format!(
                "{what}: declared degree {degree} but {} indices listed",
                list.len()
            ),
        });
    }
    list.sort_unstable();
    Ok((line, list))
}

pub fn parse(text: &str) -> Result<AlistMatrix, LdpcError> {
    let mut lines = Lines::new(text);

    let (line, dims) = lines.next_numbers("header")?;
    expect_len(line, &dims, 2, "header `n m`")?;
    let (n, m) = (dims[0], dims[1]);

    let (line, max_deg) = lines.next_numbers("maximum degrees")?;
    expect_len(line, &max_deg, 2, "maximum degrees")?;

    let (line, col_deg) = lines.next_numbers("column degrees")?;
    expect_len(line, &col_deg, n, "column degrees")?;
    let (line, row_deg) = lines.next_numbers("row degrees")?;
    expect_len(line, &row_deg, m, "row degrees")?;

    if let Some(&d) = col_deg.iter().find(|&&d| d > max_deg[0]) {
        return Err(LdpcError::Alist {
            line,
            msg: format!("column degree {d} exceeds declared maximum {}", max_deg[0]),
        });
    }
    if let Some(&d) = row_deg.iter().find(|&&d| d > max_deg[1]) {
        return Err(LdpcError::Alist {
            line,
            msg: format!("row degree {d} exceeds declared maximum {}", max_deg[1]),
        });
    }

    let mut cols = Vec::with_capacity(n);
    let mut col_lines = Vec::with_capacity(n);
    for (j, &d) in col_deg.iter().enumerate() {
        let (line, list) = read_list(&mut lines, &format!("column {}", j + 1), d, m)?;
        cols.push(list);
        col_lines.push(line);
    }
    let mut rows = Vec::with_capacity(m);
    let mut row_lines = Vec::with_capacity(m);
    for (i, &d) in row_deg.iter().enumerate() {
        let (line, list) = read_list(&mut lines, &format!("row {}", i + 1), d, n)?;
        rows.push(list);
        row_lines.push(line);
    }

    for (j, col) in cols.iter().enumerate() {
        for &i in col {
            if rows[i].binary_search(&j).is_err() {
                return Err(LdpcError::Inconsistent {
                    line: col_lines[j],
                    row: i + 1,
                    col: j + 1,
                });
            }
        }
    }
    for (i, row) in rows.iter().enumerate() {
        for &j in row {
            if cols[j].binary_search(&i).is_err() {
                return Err(LdpcError::Inconsistent {
                    line: row_lines[i],
                    row: i + 1,
                    col: j + 1,
                });
            }
        }
    }

    Ok(AlistMatrix {
        n_cols: n,
        rows,
        cols,
    })
}

fn write_lists(out: &mut String, lists: &[Vec<usize>], pad: usize) {
    // an empty list still gets a single padding zero so the line is not blank
    let pad = pad.max(1);
    for list in lists {
        let mut first = true;
        for idx in list
            .iter()
            .map(|&v| v + 1)
            .chain(std::iter::repeat_n(0, pad - list.len()))
        {
            if !first {
                out.push(' ');
            }
            first = false;
            let _ = write!(out, "{idx}");
        }
        out.push('\n');
    }
}

/// Serializes a binary matrix given by its row adjacency lists (0-based).
/// Rows with no entries are allowed and written as all-padding lines.
pub fn write(n_cols: usize, rows: &[Vec<usize>]) -> String {
    let mut cols = vec![Vec::new(); n_cols];
    for (i, row) in rows.iter().enumerate() {
        for &j in row {
            cols[j].push(i);
        }
    }
    let mut rows_sorted: Vec<Vec<usize>> = rows.to_vec();
    for r in &mut rows_sorted {
        r.sort_unstable();
    }
    let max_col = cols.iter().map(Vec::len).max().unwrap_or(0);
    let max_row = rows_sorted.iter().map(Vec::len).max().unwrap_or(0);

    let mut out = String::new();
    let _ = writeln!(out, "{} {}", n_cols, rows.len());
    let _ = writeln!(out, "{max_col} {max_row}");
    let degrees = |lists: &[Vec<usize>]| {
        lists
            .iter()
            .map(|l| l.len().to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    let _ = writeln!(out, "{}", degrees(&cols));
    let _ = writeln!(out, "{}", degrees(&rows_sorted));
    write_lists(&mut out, &cols, max_col);
    write_lists(&mut out, &rows_sorted, max_row);
    out
}
