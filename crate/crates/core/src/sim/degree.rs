use serde::Serialize;

use super::{frame_rng, RunHeader, SimConfig, SimError};
use crate::access::{assign, AccessParams, Scheme};
use crate::capacity::degree_pmf;

/// One histogram bin of one scheme, pooled over every slot of every frame.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeRow {
    pub scheme: Scheme,
    pub degree: usize,
    pub count: u64,
    pub empirical_pmf: f64,
    pub binomial_pmf: f64,
    /// `(count - expected) / sd` under the binomial law; `None` when the
    /// binomial variance of the bin is zero.
    pub z_score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeReport {
    pub header: RunHeader,
    pub n_users: usize,
    pub n_symbols: usize,
    pub n_slots: usize,
    pub frames: usize,
    /// Per-user slot occupancy probability `n / N_s`.
    pub p: f64,
    pub rows: Vec<DegreeRow>,
}

impl DegreeReport {
    pub fn rows_for(&self, scheme: Scheme) -> impl Iterator<Item = &DegreeRow> {
        self.rows.iter().filter(move |r| r.scheme == scheme)
    }
}

/// Slot-degree histogram of each configured scheme over `config.frames`
/// frames. The symbol count comes from `n_symbols`, or from the codes when
/// that is absent.
pub fn run_degree_dist(config: &SimConfig) -> Result<DegreeReport, SimError> {
    config.validate()?;
    let n = match config.n_symbols {
        Some(n) => n,
        None => {
            let codes = config.load_codes()?;
            codes
                .first()
                .map(|c| c.n())
                .ok_or_else(|| SimError::Config("n_symbols: not given and no codes".into()))?
        }
    };
    if n == 0 || n > config.n_slots {
        return Err(SimError::Config(format!(
            "n_symbols: need 1 <= n <= n_slots, got n = {n}, n_slots = {}",
            config.n_slots
        )));
    }
    let p = n as f64 / config.n_slots as f64;
    let mut rows = Vec::new();
    for &scheme in &config.schemes {
        let params = AccessParams::new(
            config.n_users,
            n,
            config.n_slots,
            scheme,
            config.master_seed,
        );
        let mut hist = vec![0u64; config.n_users + 1];
        for f in 0..config.frames {
            let mut rng = frame_rng(config.master_seed, scheme, 0, f);
            let a = assign(&params, &mut rng)?;
            for (d, c) in a.slot_degrees().into_iter().enumerate() {
                hist[d] += c as u64;
            }
        }
        let total = (config.frames * config.n_slots) as f64;
        for (degree, &count) in hist.iter().enumerate() {
            let q = degree_pmf(config.n_users, p, degree);
            let var = total * q * (1.0 - q);
            let diff = count as f64 - total * q;
            rows.push(DegreeRow {
                scheme,
                degree,
                count,
                empirical_pmf: count as f64 / total,
                binomial_pmf: q,
                z_score: (var > 0.0).then(|| diff / var.sqrt()),
            });
        }
    }
    Ok(DegreeReport {
        header: RunHeader::new("degree-dist", config.master_seed, config.digest(), None),
        n_users: config.n_users,
        n_symbols: n,
        n_slots: config.n_slots,
        frames: config.frames,
        p,
        rows,
    })
}
