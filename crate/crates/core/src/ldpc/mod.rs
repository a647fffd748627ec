//! Sparse binary LDPC codes: alist I/O, systematic encoding and a reference
//! sum-product decoder.
//!
//! Bits and BPSK symbols are related by `bit 1 -> +1`, `bit 0 -> -1`. All LLRs
//! in this crate are symbol-domain, `ln P(+1) / P(-1)`, so a positive LLR
//! favors bit 1.

pub mod alist;
mod bp;
mod construct;
mod encoder;
pub mod gf2;

pub use bp::{classical_bp_decode, classical_bp_decode_observed, BpOutcome, IterationSnapshot};
pub use construct::random_regular;
pub use encoder::{build_encoder, Encoder};

use thiserror::Error;

/// Magnitude at which all decoder messages are saturated.
pub const LLR_CLIP: f64 = 50.0;
/// Bound applied to the argument of `atanh` in check-node updates.
pub const ATANH_CLAMP: f64 = 1.0 - 1e-12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LdpcError {
    #[error("alist line {line}: {msg}")]
    Alist { line: usize, msg: String },
    #[error("alist line {line}: edge (row {row}, column {col}) is missing from the opposite adjacency list")]
    Inconsistent { line: usize, row: usize, col: usize },
    #[error("row {0} of the parity-check matrix is empty")]
    EmptyRow(usize),
    #[error("column {0} of the parity-check matrix is empty")]
    EmptyColumn(usize),
    #[error("row {row} references column {col} but the matrix has {n} columns")]
    IndexOutOfRange { row: usize, col: usize, n: usize },
    #[error("row {0} lists a column twice")]
    DuplicateEntry(usize),
    #[error("parity-check matrix has full column rank {0}; the code contains only the zero word")]
    NoCodeSpace(usize),
    #[error("expected a vector of length {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error(
        "could not construct a ({col_weight},{row_weight})-regular code of length {n}: {reason}"
    )]
    Construction {
        n: usize,
        col_weight: usize,
        row_weight: usize,
        reason: String,
    },
}

/// A binary LDPC code described by its sparse parity-check matrix `H`.
///
/// `H` has `m` rows and `n` columns. Redundant rows are kept, so `m` can
/// exceed `n - k`; `k` is always `n - rank(H)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LdpcCode {
    n: usize,
    k: usize,
    rows: Vec<Vec<usize>>,
    cols: Vec<Vec<usize>>,
}

impl LdpcCode {
    /// Builds a code from 0-based row adjacency lists.
    pub fn from_rows(n: usize, rows: Vec<Vec<usize>>) -> Result<Self, LdpcError> {
        let mut rows = rows;
        let mut cols = vec![Vec::new(); n];
        for (i, row) in rows.iter_mut().enumerate() {
            if row.is_empty() {
                return Err(LdpcError::EmptyRow(i + 1));
            }
            row.sort_unstable();
            if row.windows(2).any(|w| w[0] == w[1]) {
                return Err(LdpcError::DuplicateEntry(i + 1));
            }
            for &j in row.iter() {
                if j >= n {
                    return Err(LdpcError::IndexOutOfRange {
                        row: i + 1,
                        col: j + 1,
                        n,
                    });
                }
                cols[j].push(i);
            }
        }
        if let Some(j) = cols.iter().position(Vec::is_empty) {
            return Err(LdpcError::EmptyColumn(j + 1));
        }
        let dense = rows
            .iter()
            .map(|r| gf2::BitRow::from_indices(n, r))
            .collect();
        let rank = gf2::rank(dense);
        Ok(LdpcCode {
            n,
            k: n - rank,
            rows,
            cols,
        })
    }

    /// Parses an alist description.
    pub fn from_alist(text: &str) -> Result<Self, LdpcError> {
        let parsed = alist::parse(text)?;
        Self::from_rows(parsed.n_cols, parsed.rows)
    }

    pub fn to_alist(&self) -> String {
        alist::write(self.n, &self.rows)
    }

    /// Codeword length.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Information length, `n - rank(H)`.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of parity-check rows, including redundant ones.
    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn rank(&self) -> usize {
        self.n - self.k
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    /// Column indices of each row, ascending.
    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    /// Row indices of each column, ascending.
    pub fn cols(&self) -> &[Vec<usize>] {
        &self.cols
    }

    pub fn num_edges(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// True when every parity check is satisfied by the 0/1 vector `bits`.
    pub fn is_codeword(&self, bits: &[u8]) -> bool {
        bits.len() == self.n
            && self
                .rows
                .iter()
                .all(|row| row.iter().fold(0u8, |acc, &j| acc ^ (bits[j] & 1)) == 0)
    }
}


#[cfg(test)]
mod tests {
    use super::test_codes::hamming74;
    use super::*;

    #[test]
    fn hamming_dimensions() {
        let code = hamming74();
        assert_eq!((code.n(), code.m(), code.k()), (7, 3, 4));
        assert_eq!(code.cols()[6], vec![0, 1, 2]);
    }

    #[test]
    fn hamming_from_alist_has_k_from_rank() {
        let code = LdpcCode::from_alist(&hamming74().to_alist()).unwrap();
        assert_eq!(code, hamming74());
    }

    #[test]
    fn redundant_rows_are_kept() {
        let mut rows = hamming74().rows().to_vec();
        let mut extra: Vec<usize> = rows[0].clone();
        extra.extend(&rows[1]);
        extra.sort_unstable();
        let mut sum = Vec::new();
        for j in 0..7 {
            if extra.iter().filter(|&&x| x == j).count() == 1 {
                sum.push(j);
            }
        }
        rows.push(sum);
        let code = LdpcCode::from_rows(7, rows).unwrap();
        assert_eq!(code.m(), 4);
        assert_eq!(code.k(), 4);
        assert!(code.m() >= code.n() - code.k());
    }

    #[test]
    fn rejects_empty_rows_and_columns() {
        assert_eq!(
            LdpcCode::from_rows(3, vec![vec![0, 1], vec![]]),
            Err(LdpcError::EmptyRow(2))
        );
        assert_eq!(
            LdpcCode::from_rows(3, vec![vec![0, 1]]),
            Err(LdpcError::EmptyColumn(3))
        );
        assert!(matches!(
            LdpcCode::from_rows(2, vec![vec![0, 2]]),
            Err(LdpcError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn codeword_membership() {
        let code = hamming74();
        assert!(code.is_codeword(&[0; 7]));
        assert!(code.is_codeword(&[1; 7]));
        assert!(!code.is_codeword(&[1, 0, 0, 0, 0, 0, 0]));
    }
}
