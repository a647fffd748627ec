//! Joint belief propagation over the three-layer graph.
//!
//! Messages are symbol-domain LLRs `ln P(+1)/P(-1)` with bit 1 sent as +1.
//! One iteration updates every slot check and every parity check from the
//! previous variable messages, then every variable, then takes a hard
//! decision. Variable messages start at zero, so the first slot update runs
//! under uniform priors and the first parity update emits zeros.

use thiserror::Error;

use crate::channel::FrameRealization;
use crate::graph::ThreeLayerGraph;
use crate::ldpc::{Encoder, LdpcError, ATANH_CLAMP, LLR_CLIP};

pub const DEFAULT_MAX_ITERS: usize = 50;
pub const DEFAULT_D_MAX: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecodeError {
    #[error("max_iters must be at least 1")]
    ZeroIterations,
    #[error("slot {slot} has degree {degree}, above d_max = {d_max}")]
    DegreeTooLarge {
        slot: usize,
        degree: usize,
        d_max: usize,
    },
    #[error("realization does not match the graph: {0}")]
    Shape(String),
    #[error("non-finite slot message at slot {0}")]
    NonFinite(usize),
    #[error(transparent)]
    Ldpc(#[from] LdpcError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecoderOptions {
    pub max_iters: usize,
    /// Stop as soon as every user's syndrome is satisfied.
    pub early_stop: bool,
    pub d_max: usize,
}

impl Default for DecoderOptions {
    fn default() -> Self {
        DecoderOptions {
            max_iters: DEFAULT_MAX_ITERS,
            early_stop: true,
            d_max: DEFAULT_D_MAX,
        }
    }
}

/// LLR of a lone symbol on a slot: `4 Re(y h) / sigma2` for real `h`.
pub fn channel_llr(y_re: f64, h: f64, sigma2: f64) -> f64 {
    4.0 * y_re * h / sigma2
}

#[inline]
fn clip(x: f64) -> f64 {
    x.clamp(-LLR_CLIP, LLR_CLIP)
}

/// `ln(1 + e^x)` without overflow.
#[inline]
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// All messages of one decode. Slot messages are indexed by variable (each
/// variable has exactly one slot edge); parity messages by edge, with edges
/// ordered check by check.
#[derive(Debug, Clone)]
pub struct DecoderState {
    edge_start: Vec<usize>,
    edge_var: Vec<usize>,
    var_edges: Vec<Vec<usize>>,
    s: Vec<f64>,
    l: Vec<f64>,
    vs: Vec<f64>,
    vl: Vec<f64>,
    posterior: Vec<f64>,
    iteration: usize,
    plus: Vec<f64>,
    minus: Vec<f64>,
}

impl DecoderState {
    pub fn new(graph: &ThreeLayerGraph) -> Self {
        let mut edge_start = Vec::with_capacity(graph.n_ldpc() + 1);
        let mut edge_var = Vec::new();
        let mut var_edges = vec![Vec::new(); graph.n_vars()];
        edge_start.push(0);
        for row in graph.ldpc_checks() {
            for &v in row {
                var_edges[v].push(edge_var.len());
                edge_var.push(v);
            }
            edge_start.push(edge_var.len());
        }
        let n_vars = graph.n_vars();
        let n_edges = edge_var.len();
        DecoderState {
            edge_start,
            edge_var,
            var_edges,
            s: vec![0.0; n_vars],
            l: vec![0.0; n_edges],
            vs: vec![0.0; n_vars],
            vl: vec![0.0; n_edges],
            posterior: vec![0.0; n_vars],
            iteration: 0,
            plus: Vec::new(),
            minus: Vec::new(),
        }
    }

    /// Slot-to-variable messages.
    pub fn s(&self) -> &[f64] {
        &self.s
    }

    /// Parity-to-variable messages.
    pub fn l(&self) -> &[f64] {
        &self.l
    }

    /// Variable-to-slot messages.
    pub fn vs(&self) -> &[f64] {
        &self.vs
    }

    pub fn vs_mut(&mut self) -> &mut [f64] {
        &mut self.vs
    }

    /// Variable-to-parity messages.
    pub fn vl(&self) -> &[f64] {
        &self.vl
    }

    pub fn vl_mut(&mut self) -> &mut [f64] {
        &mut self.vl
    }

    pub fn posterior(&self) -> &[f64] {
        &self.posterior
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    /// Variable of each parity edge.
    pub fn edge_vars(&self) -> &[usize] {
        &self.edge_var
    }

    /// Parity edges of variable `v`, ascending.
    pub fn var_edges(&self, v: usize) -> &[usize] {
        &self.var_edges[v]
    }

    /// Slot check update from the current variable-to-slot messages.
    pub fn sa_check_update(
        &mut self,
        graph: &ThreeLayerGraph,
        frame: &FrameRealization,
        d_max: usize,
    ) -> Result<(), DecodeError> {
        let sigma2 = frame.sigma2;
        for (slot, vars) in graph.sa_checks().iter().enumerate() {
            let d = vars.len();
            if d == 0 {
                continue;
            }
            if d > d_max {
                return Err(DecodeError::DegreeTooLarge {
                    slot,
                    degree: d,
                    d_max,
                });
            }
            let y = frame.y[slot].re;
            let gain = |v: usize| {
                let (u, i) = graph.owner(v);
                frame.h[u][i]
            };
            if d == 1 {
                let v = vars[0];
                self.s[v] = clip(channel_llr(y, gain(v), sigma2));
                continue;
            }
            // The imaginary part of y adds the same term to every hypothesis
            // and cancels in the ratio, so only the real part enters.
            let h: Vec<f64> = vars.iter().map(|&v| gain(v)).collect();
            let log_plus: Vec<f64> = vars.iter().map(|&v| -softplus(-self.vs[v])).collect();
            let log_minus: Vec<f64> = vars.iter().map(|&v| -softplus(self.vs[v])).collect();
            let combos = 1usize << (d - 1);
            for t in 0..d {
                self.plus.clear();
                self.minus.clear();
                for c in 0..combos {
                    let mut partial = 0.0;
                    let mut prior = 0.0;
                    let mut bit = 0;
                    for k in 0..d {
                        if k == t {
                            continue;
                        }
                        if c >> bit & 1 == 1 {
                            partial += h[k];
                            prior += log_plus[k];
                        } else {
                            partial -= h[k];
                            prior += log_minus[k];
                        }
                        bit += 1;
                    }
                    let rp = y - partial - h[t];
                    let rm = y - partial + h[t];
                    self.plus.push(prior - rp * rp / sigma2);
                    self.minus.push(prior - rm * rm / sigma2);
                }
                let msg = log_sum_exp(&self.plus) - log_sum_exp(&self.minus);
                if !msg.is_finite() {
                    return Err(DecodeError::NonFinite(slot));
                }
                self.s[vars[t]] = clip(msg);
            }
        }
        Ok(())
    }

    /// Parity check update `L = -2 atanh(prod tanh(-V/2))` over the other edges.
    pub fn ldpc_check_update(&mut self) {
        for w in self.edge_start.windows(2) {
            let (start, end) = (w[0], w[1]);
            for e in start..end {
                let mut prod = 1.0f64;
                for other in start..end {
                    if other != e {
                        prod *= (-clip(self.vl[other]) / 2.0).tanh();
                    }
                }
                self.l[e] = -2.0 * prod.clamp(-ATANH_CLAMP, ATANH_CLAMP).atanh();
            }
        }
    }

    /// Variable update: the slot message gets the sum of all parity
    /// messages, each parity edge gets the slot message plus the others.
    pub fn variable_update(&mut self) {
        for (v, edges) in self.var_edges.iter().enumerate() {
            for &e in edges {
                let mut sum = self.s[v];
                for &other in edges {
                    if other != e {
                        sum += self.l[other];
                    }
                }
                self.vl[e] = clip(sum);
            }
            let mut parity = 0.0;
            for &e in edges {
                parity += self.l[e];
            }
            self.vs[v] = clip(parity);
            let mut total = self.s[v];
            for &e in edges {
                total += self.l[e];
            }
            self.posterior[v] = total;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeResult {
    /// Hard-decided codeword of each user.
    pub codewords: Vec<Vec<u8>>,
    pub info_bits: Vec<Vec<u8>>,
    pub syndrome_ok: Vec<bool>,
    pub iterations: usize,
    /// Any information-bit mismatch, when the transmitted bits are known.
    pub packet_errors: Option<Vec<bool>>,
    /// Information-bit errors per user, when the transmitted bits are known.
    pub bit_errors: Option<Vec<usize>>,
}

pub fn decode(
    graph: &ThreeLayerGraph,
    encoders: &[&Encoder],
    frame: &FrameRealization,
    options: &DecoderOptions,
    truth: Option<&[Vec<u8>]>,
) -> Result<DecodeResult, DecodeError> {
    decode_observed(graph, encoders, frame, options, truth, |_| {})
}

/// Same as [`decode`], calling `observer` with the state after every iteration.
pub fn decode_observed<F>(
    graph: &ThreeLayerGraph,
    encoders: &[&Encoder],
    frame: &FrameRealization,
    options: &DecoderOptions,
    truth: Option<&[Vec<u8>]>,
    mut observer: F,
) -> Result<DecodeResult, DecodeError>
where
    F: FnMut(&DecoderState),
{
    if options.max_iters == 0 {
        return Err(DecodeError::ZeroIterations);
    }
    validate(graph, encoders, frame, truth)?;
    if let Some((slot, degree)) = graph
        .sa_degrees()
        .into_iter()
        .enumerate()
        .find(|&(_, d)| d > options.d_max)
    {
        return Err(DecodeError::DegreeTooLarge {
            slot,
            degree,
            d_max: options.d_max,
        });
    }

    let n_users = graph.n_users();
    let mut state = DecoderState::new(graph);
    let mut bits = vec![0u8; graph.n_vars()];
    let mut syndrome_ok = vec![false; n_users];
    for it in 1..=options.max_iters {
        state.iteration = it;
        state.sa_check_update(graph, frame, options.d_max)?;
        state.ldpc_check_update();
        state.variable_update();
        for (b, &p) in bits.iter_mut().zip(&state.posterior) {
            *b = u8::from(p >= 0.0);
        }
        syndrome_ok.iter_mut().for_each(|ok| *ok = true);
        for (c, row) in graph.ldpc_checks().iter().enumerate() {
            if row.iter().fold(0u8, |acc, &v| acc ^ bits[v]) != 0 {
                syndrome_ok[graph.ldpc_owner(c)] = false;
            }
        }
        observer(&state);
        if options.early_stop && syndrome_ok.iter().all(|&ok| ok) {
            break;
        }
    }

    let codewords: Vec<Vec<u8>> = (0..n_users)
        .map(|u| {
            let start = graph.user_offset(u);
            bits[start..start + encoders[u].n()].to_vec()
        })
        .collect();
    let info_bits = codewords
        .iter()
        .zip(encoders)
        .map(|(c, enc)| enc.extract_info(c))
        .collect::<Result<Vec<_>, _>>()?;
    let bit_errors = truth.map(|t| {
        info_bits
            .iter()
            .zip(t)
            .map(|(got, want)| got.iter().zip(want).filter(|(a, b)| a != b).count())
            .collect::<Vec<_>>()
    });
    Ok(DecodeResult {
        packet_errors: bit_errors
            .as_ref()
            .map(|e| e.iter().map(|&n| n > 0).collect()),
        bit_errors,
        codewords,
        info_bits,
        syndrome_ok,
        iterations: state.iteration,
    })
}

fn validate(
    graph: &ThreeLayerGraph,
    encoders: &[&Encoder],
    frame: &FrameRealization,
    truth: Option<&[Vec<u8>]>,
) -> Result<(), DecodeError> {
    let n_users = graph.n_users();
    let shape = |msg: String| Err(DecodeError::Shape(msg));
    if encoders.len() != n_users || frame.h.len() != n_users {
        return shape(format!(
            "{} users, {} encoders, {} gain vectors",
            n_users,
            encoders.len(),
            frame.h.len()
        ));
    }
    if frame.y.len() != graph.n_slots() {
        return shape(format!(
            "{} slots, {} received values",
            graph.n_slots(),
            frame.y.len()
        ));
    }
    if frame.sigma2.is_nan() || frame.sigma2 <= 0.0 {
        return shape(format!("noise variance {}", frame.sigma2));
    }
    for u in 0..n_users {
        let n = if u + 1 < n_users {
            graph.user_offset(u + 1)
        } else {
            graph.n_vars()
        } - graph.user_offset(u);
        if encoders[u].n() != n || frame.h[u].len() != n {
            return shape(format!("user {} has {n} symbols", u + 1));
        }
        if let Some(t) = truth {
            if t.len() != n_users || t[u].len() != encoders[u].k() {
                return shape(format!("reference bits of user {}", u + 1));
            }
        }
    }
    Ok(())
}
