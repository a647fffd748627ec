//! Capacity bounds for random and uniform slot access.
//!
//! With `p = n / N_s`, random access gives binomial slot degrees and a
//! self-consistent spectral efficiency
//! `eta = sum_d P(d) log2(1 + (Eb/N0) (N_s d / (N_u n)) eta)`.
//! Uniform access needs `Eb/N0 = (2^eta - 1) / eta`.

use serde::Serialize;
use thiserror::Error;

pub const FIXED_POINT_TOL: f64 = 1e-10;
pub const FIXED_POINT_MAX_STEPS: usize = 10_000;
pub const DAMPING: f64 = 0.5;
pub const BISECTION_LO_DB: f64 = -10.0;
pub const BISECTION_HI_DB: f64 = 40.0;
pub const BISECTION_TOL_DB: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CapacityError {
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("Eb/N0 must be positive, got {0}")]
    EbN0(f64),
    #[error("target spectral efficiency must be positive, got {0}")]
    Eta(f64),
    #[error("fixed point did not converge in {steps} steps (last iterate {last})")]
    NoConvergence { steps: usize, last: f64 },
    #[error("target eta = {target} not reached below {hi_db} dB")]
    Unreachable { target: f64, hi_db: f64 },
    #[error("reference file: {0}")]
    Reference(String),
}

/// Binomial slot-degree probability `C(N_u, d) p^d (1 - p)^(N_u - d)`.
pub fn degree_pmf(n_users: usize, p: f64, d: usize) -> f64 {
    if d > n_users {
        return 0.0;
    }
    let mut binom = 1.0f64;
    for j in 0..d {
        binom = binom * (n_users - j) as f64 / (j + 1) as f64;
    }
    binom * p.powi(d as i32) * (1.0 - p).powi((n_users - d) as i32)
}

fn check_geometry(n_users: usize, n: usize, n_slots: usize) -> Result<f64, CapacityError> {
    if n_users == 0 || n == 0 || n > n_slots {
        return Err(CapacityError::Geometry(format!(
            "need N_u >= 1 and 1 <= n <= N_s (N_u = {n_users}, n = {n}, N_s = {n_slots})"
        )));
    }
    Ok(n as f64 / n_slots as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub eta: f64,
    pub steps: usize,
}

/// Positive fixed point of the random-access efficiency map, by damped
/// iteration from `N_u n / N_s`. The map is concave with value 0 at 0,
/// so every positive start converges to the largest root.
pub fn ra_spectral_efficiency(
    ebn0: f64,
    n_users: usize,
    n: usize,
    n_slots: usize,
) -> Result<FixedPoint, CapacityError> {
    if ebn0.is_nan() || ebn0 <= 0.0 {
        return Err(CapacityError::EbN0(ebn0));
    }
    let p = check_geometry(n_users, n, n_slots)?;
    let weights: Vec<(f64, f64)> = (1..=n_users)
        .map(|d| {
            let gain = ebn0 * (n_slots as f64 * d as f64) / (n_users as f64 * n as f64);
            (degree_pmf(n_users, p, d), gain)
        })
        .collect();
    let map = |eta: f64| -> f64 {
        weights
            .iter()
            .map(|&(w, g)| w * (g * eta).ln_1p())
            .sum::<f64>()
            / std::f64::consts::LN_2
    };
    let mut eta = n_users as f64 * n as f64 / n_slots as f64;
    for step in 1..=FIXED_POINT_MAX_STEPS {
        let next = DAMPING * eta + (1.0 - DAMPING) * map(eta);
        let delta = (next - eta).abs();
        eta = next;
        if delta < FIXED_POINT_TOL {
            return Ok(FixedPoint { eta, steps: step });
        }
    }
    Err(CapacityError::NoConvergence {
        steps: FIXED_POINT_MAX_STEPS,
        last: eta,
    })
}

/// Smallest `Eb/N0` in dB at which random access reaches `target`.
pub fn ra_min_ebn0(
    target: f64,
    n_users: usize,
    n: usize,
    n_slots: usize,
) -> Result<f64, CapacityError> {
    if target.is_nan() || target <= 0.0 {
        return Err(CapacityError::Eta(target));
    }
    check_geometry(n_users, n, n_slots)?;
    let eta_at = |db: f64| -> Result<f64, CapacityError> {
        match ra_spectral_efficiency(10f64.powf(db / 10.0), n_users, n, n_slots) {
            Ok(fp) => Ok(fp.eta),
            // slow convergence only happens next to the zero root
            Err(CapacityError::NoConvergence { last, .. }) => Ok(last),
            Err(e) => Err(e),
        }
    };
    let (mut lo, mut hi) = (BISECTION_LO_DB, BISECTION_HI_DB);
    if eta_at(hi)? < target {
        return Err(CapacityError::Unreachable { target, hi_db: hi });
    }
    if eta_at(lo)? >= target {
        return Ok(lo);
    }
    while hi - lo >= BISECTION_TOL_DB {
        let mid = 0.5 * (lo + hi);
        if eta_at(mid)? >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Uniform-access requirement `10 log10((2^eta - 1) / eta)`.
pub fn ua_min_ebn0(eta: f64) -> Result<f64, CapacityError> {
    if eta.is_nan() || eta <= 0.0 {
        return Err(CapacityError::Eta(eta));
    }
    Ok(10.0 * ((eta * std::f64::consts::LN_2).exp_m1() / eta).log10())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityRow {
    pub n_users: usize,
    /// Transmitted symbols per slot, `N_u n / N_s`.
    pub eta: f64,
    pub ra_ebn0_db: f64,
    pub ua_ebn0_db: f64,
    pub delta_ra_ua_db: f64,
    pub p_empty: f64,
    /// Fixed-point steps at the reported random-access threshold.
    pub solver_steps: usize,
    pub spb_ebn0_db: Option<f64>,
    pub delta_spb_ua_db: Option<f64>,
}

/// One row per user count. Reference sphere-packing values, given as
/// `(eta, Eb/N0 dB)` pairs, are attached to rows with a matching `eta`.
pub fn capacity_table(
    n: usize,
    n_slots: usize,
    user_counts: &[usize],
    spb: Option<&[(f64, f64)]>,
) -> Result<Vec<CapacityRow>, CapacityError> {
    user_counts
        .iter()
        .map(|&n_users| {
            let p = check_geometry(n_users, n, n_slots)?;
            let eta = n_users as f64 * n as f64 / n_slots as f64;
            let ra = ra_min_ebn0(eta, n_users, n, n_slots)?;
            let ua = ua_min_ebn0(eta)?;
            let solver_steps = ra_spectral_efficiency(10f64.powf(ra / 10.0), n_users, n, n_slots)
                .map(|fp| fp.steps)
                .unwrap_or(FIXED_POINT_MAX_STEPS);
            let spb_db = spb.and_then(|rows| {
                rows.iter()
                    .find(|(e, _)| (e - eta).abs() < 1e-9)
                    .map(|&(_, db)| db)
            });
            Ok(CapacityRow {
                n_users,
                eta,
                ra_ebn0_db: ra,
                ua_ebn0_db: ua,
                delta_ra_ua_db: ra - ua,
                p_empty: degree_pmf(n_users, p, 0),
                solver_steps,
                spb_ebn0_db: spb_db,
                delta_spb_ua_db: spb_db.map(|s| s - ua),
            })
        })
        .collect()
}

/// Reads a reference CSV with columns `eta` and `ebn0_db`.
pub fn parse_spb_csv(text: &str) -> Result<Vec<(f64, f64)>, CapacityError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| CapacityError::Reference(e.to_string()))?
        .clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| CapacityError::Reference(format!("missing column {name:?}")))
    };
    let (eta_col, db_col) = (col("eta")?, col("ebn0_db")?);
    reader
        .records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec.map_err(|e| CapacityError::Reference(e.to_string()))?;
            let num = |c: usize| -> Result<f64, CapacityError> {
                rec.get(c)
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| CapacityError::Reference(format!("row {}: bad number", i + 1)))
            };
            Ok((num(eta_col)?, num(db_col)?))
        })
        .collect()
}
