//! Block Rayleigh fading, slot superposition and complex AWGN.
//!
//! Symbols have unit energy. Transmitters pre-compensate the fading phase,
//! so each symbol reaches its slot scaled by a real positive magnitude `h`
//! that the receiver knows.

use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::access::SlotAssignment;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("code rate must lie in (0, 1], got {0}")]
    Rate(f64),
    #[error("noise variance must be positive, got {0}")]
    Sigma2(f64),
    #[error("{what}: expected {expected} entries, got {got}")]
    Shape {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("unknown fading mode {0:?} (expected rayleigh or inverted)")]
    UnknownFading(String),
}

/// `Rayleigh` keeps the magnitude; `Inverted` equalizes it away (`h = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FadingMode {
    #[default]
    Rayleigh,
    Inverted,
}

impl FromStr for FadingMode {
    type Err = ChannelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rayleigh" => Ok(FadingMode::Rayleigh),
            "inverted" | "none" | "awgn" => Ok(FadingMode::Inverted),
            _ => Err(ChannelError::UnknownFading(s.to_string())),
        }
    }
}

/// Complex noise variance `N0` for unit-energy BPSK at the given `Eb/N0`.
pub fn ebn0_to_sigma2(ebn0_db: f64, rate: f64) -> Result<f64, ChannelError> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(ChannelError::Rate(rate));
    }
    Ok(1.0 / (rate * 10f64.powf(ebn0_db / 10.0)))
}

/// Rayleigh magnitudes with `E[h^2] = 1`.
pub fn draw_fading<R: Rng + ?Sized>(rng: &mut R, count: usize) -> Vec<f64> {
    (0..count)
        .map(|_| loop {
            let x: f64 = rng.sample(StandardNormal);
            let y: f64 = rng.sample(StandardNormal);
            let h = ((x * x + y * y) / 2.0).sqrt();
            if h > 0.0 {
                break h;
            }
        })
        .collect()
}

/// Per-user gains for `mode`; `Inverted` consumes no randomness.
pub fn draw_gains<R: Rng + ?Sized>(
    rng: &mut R,
    lengths: &[usize],
    mode: FadingMode,
) -> Vec<Vec<f64>> {
    lengths
        .iter()
        .map(|&n| match mode {
            FadingMode::Rayleigh => draw_fading(rng, n),
            FadingMode::Inverted => vec![1.0; n],
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameRealization {
    /// Gain of symbol `i` of user `u` at `h[u][i]`.
    pub h: Vec<Vec<f64>>,
    /// Received value of every slot.
    pub y: Vec<Complex64>,
    pub sigma2: f64,
}

/// Noiseless superposition `sum h * x` on every slot.
pub fn superpose(
    assignment: &SlotAssignment,
    symbols: &[Vec<f64>],
    h: &[Vec<f64>],
) -> Result<Vec<Complex64>, ChannelError> {
    let users = assignment.n_users();
    check_len("symbol vectors", users, symbols.len())?;
    check_len("gain vectors", users, h.len())?;
    let mut y = vec![Complex64::new(0.0, 0.0); assignment.n_slots()];
    for u in 0..users {
        let slots = assignment.slots(u);
        check_len("symbols of a user", slots.len(), symbols[u].len())?;
        check_len("gains of a user", slots.len(), h[u].len())?;
        for ((&s, &x), &g) in slots.iter().zip(&symbols[u]).zip(&h[u]) {
            y[s].re += g * x;
        }
    }
    Ok(y)
}

/// Received frame: superposition plus circular Gaussian noise of total
/// variance `sigma2` (half per quadrature).
pub fn transmit<R: Rng + ?Sized>(
    assignment: &SlotAssignment,
    symbols: &[Vec<f64>],
    h: &[Vec<f64>],
    sigma2: f64,
    rng: &mut R,
) -> Result<FrameRealization, ChannelError> {
    if sigma2.is_nan() || sigma2 <= 0.0 {
        return Err(ChannelError::Sigma2(sigma2));
    }
    let mut y = superpose(assignment, symbols, h)?;
    let scale = (sigma2 / 2.0).sqrt();
    for v in &mut y {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *v += Complex64::new(scale * re, scale * im);
    }
    Ok(FrameRealization {
        h: h.to_vec(),
        y,
        sigma2,
    })
}

fn check_len(what: &'static str, expected: usize, got: usize) -> Result<(), ChannelError> {
    if expected == got {
        Ok(())
    } else {
        Err(ChannelError::Shape {
            what,
            expected,
            got,
        })
    }
}
