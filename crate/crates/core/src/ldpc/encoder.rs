use super::gf2::BitRow;
use super::{LdpcCode, LdpcError};

/// Systematic encoder derived from `H` by Gauss-Jordan elimination with
/// column pivoting.
///
/// The non-pivot ("free") columns carry the information bits unchanged and
/// each pivot column is a parity bit given by one dense generator row over the
/// information bits. Output codewords use the original column order of `H`.
#[derive(Debug, Clone)]
pub struct Encoder {
    n: usize,
    k: usize,
    /// Free columns followed by pivot columns.
    column_order: Vec<usize>,
    parity_rows: Vec<BitRow>,
}

/// Builds the encoder for `code`. Redundant rows of `H` drop out of the
/// elimination and do not constrain the encoder.
pub fn build_encoder(code: &LdpcCode) -> Result<Encoder, LdpcError> {
    let n = code.n();
    let mut rows: Vec<BitRow> = code
        .rows()
        .iter()
        .map(|r| BitRow::from_indices(n, r))
        .collect();

    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        if rank == rows.len() {
            break;
        }
        let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row.get(col) {
                row.xor_assign(&pivot);
            }
        }
        pivots.push(col);
        rank += 1;
    }
    if rank == n {
        return Err(LdpcError::NoCodeSpace(rank));
    }

    let mut is_pivot = vec![false; n];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&j| !is_pivot[j]).collect();
    let k = free.len();
    let parity_rows = rows[..rank]
        .iter()
        .map(|row| {
            let mut g = BitRow::zeros(k);
            for (t, &f) in free.iter().enumerate() {
                if row.get(f) {
                    g.set(t, true);
                }
            }
            g
        })
        .collect();

    let mut column_order = free;
    column_order.extend(pivots);
    Ok(Encoder {
        n,
        k,
        column_order,
        parity_rows,
    })
}

impl Encoder {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Codeword positions holding the information bits, in information order.
    pub fn info_positions(&self) -> &[usize] {
        &self.column_order[..self.k]
    }

    /// Free columns followed by pivot columns of the elimination.
    pub fn column_order(&self) -> &[usize] {
        &self.column_order
    }

    /// Encodes `k` information bits (0/1 bytes) into an `n`-bit codeword.
    pub fn encode(&self, info: &[u8]) -> Result<Vec<u8>, LdpcError> {
        if info.len() != self.k {
            return Err(LdpcError::LengthMismatch {
                expected: self.k,
                got: info.len(),
            });
        }
        let mut packed = BitRow::zeros(self.k);
        for (t, &b) in info.iter().enumerate() {
            if b & 1 == 1 {
                packed.set(t, true);
            }
        }
        let mut codeword = vec![0u8; self.n];
        for (t, &pos) in self.info_positions().iter().enumerate() {
            codeword[pos] = info[t] & 1;
        }
        for (g, &pos) in self.parity_rows.iter().zip(&self.column_order[self.k..]) {
            codeword[pos] = g.dot(&packed) as u8;
        }
        Ok(codeword)
    }

    /// Reads the information bits back out of a codeword.
    pub fn extract_info(&self, codeword: &[u8]) -> Result<Vec<u8>, LdpcError> {
        if codeword.len() != self.n {
            return Err(LdpcError::LengthMismatch {
                expected: self.n,
                got: codeword.len(),
            });
        }
        Ok(self.info_positions().iter().map(|&p| codeword[p]).collect())
    }
}
