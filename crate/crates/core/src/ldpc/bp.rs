//! Flooding sum-product decoder on the two-layer Tanner graph of one code.
//!
//! Variable-to-check messages start at zero, so the first check half-iteration
//! emits zero messages and the first hard decision is the channel decision.
//! This matches the schedule of the joint decoder, which makes the two
//! decoders comparable message by message.

use super::{LdpcCode, LdpcError, ATANH_CLAMP, LLR_CLIP};

#[derive(Debug, Clone, PartialEq)]
pub struct BpOutcome {
    /// Hard-decided codeword bits (bit 1 where the posterior LLR is >= 0).
    pub bits: Vec<u8>,
    pub converged: bool,
    pub iterations: usize,
}

/// Message state after one full iteration. Edges are ordered row by row,
/// with ascending column index inside each row.
#[derive(Debug, Clone, Copy)]
pub struct IterationSnapshot<'a> {
    pub iteration: usize,
    pub check_to_var: &'a [f64],
    pub var_to_check: &'a [f64],
    pub posterior: &'a [f64],
}

pub fn classical_bp_decode(
    code: &LdpcCode,
    channel_llrs: &[f64],
    max_iters: usize,
) -> Result<BpOutcome, LdpcError> {
    classical_bp_decode_observed(code, channel_llrs, max_iters, |_| {})
}

/// Same as [`classical_bp_decode`] but calls `observer` after every iteration.
#[allow(clippy::needless_range_loop)] // edge indices address two arrays
pub fn classical_bp_decode_observed<F>(
    code: &LdpcCode,
    channel_llrs: &[f64],
    max_iters: usize,
    mut observer: F,
) -> Result<BpOutcome, LdpcError>
where
    F: FnMut(&IterationSnapshot<'_>),
{
    let n = code.n();
    if channel_llrs.len() != n {
        return Err(LdpcError::LengthMismatch {
            expected: n,
            got: channel_llrs.len(),
        });
    }
    let channel: Vec<f64> = channel_llrs
        .iter()
        .map(|&l| l.clamp(-LLR_CLIP, LLR_CLIP))
        .collect();

    let mut row_start = Vec::with_capacity(code.m() + 1);
    let mut edge_var = Vec::with_capacity(code.num_edges());
    let mut var_edges = vec![Vec::new(); n];
    row_start.push(0);
    for row in code.rows() {
        for &j in row {
            var_edges[j].push(edge_var.len());
            edge_var.push(j);
        }
        row_start.push(edge_var.len());
    }

    let num_edges = edge_var.len();
    let mut c2v = vec![0.0f64; num_edges];
    let mut v2c = vec![0.0f64; num_edges];
    let mut posterior = channel.clone();
    let mut bits = hard_decision(&posterior);
    let mut converged = code.is_codeword(&bits);
    let mut iterations = 0;

    for it in 1..=max_iters {
        iterations = it;
        for w in row_start.windows(2) {
            let (start, end) = (w[0], w[1]);
            for e in start..end {
                let mut prod = 1.0f64;
                for other in start..end {
                    if other != e {
                        prod *= (-v2c[other].clamp(-LLR_CLIP, LLR_CLIP) / 2.0).tanh();
                    }
                }
                c2v[e] = -2.0 * prod.clamp(-ATANH_CLAMP, ATANH_CLAMP).atanh();
            }
        }

        for (v, edges) in var_edges.iter().enumerate() {
            for &e in edges {
                let mut sum = channel[v];
                for &other in edges {
                    if other != e {
                        sum += c2v[other];
                    }
                }
                v2c[e] = sum.clamp(-LLR_CLIP, LLR_CLIP);
            }
            let mut total = channel[v];
            for &e in edges {
                total += c2v[e];
            }
            posterior[v] = total;
        }

        bits = hard_decision(&posterior);
        observer(&IterationSnapshot {
            iteration: it,
            check_to_var: &c2v,
            var_to_check: &v2c,
            posterior: &posterior,
        });
        converged = code.is_codeword(&bits);
        if converged {
            break;
        }
    }

    Ok(BpOutcome {
        bits,
        converged,
        iterations,
    })
}

fn hard_decision(llrs: &[f64]) -> Vec<u8> {
    llrs.iter().map(|&l| u8::from(l >= 0.0)).collect()
}
