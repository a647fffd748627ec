use serde::Serialize;

use super::{frame_rng, SimError};
use crate::access::{assign, assign_cod, variable_index, AccessParams, InterleaverBank, Scheme};
use crate::cycles::scram_cycle_report;
use crate::ldpc::LdpcCode;

/// Cycle statistics of one scheme. Local counts are summed over users.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleRow {
    pub scheme: Scheme,
    pub local_girth: Option<usize>,
    pub local_c4: u64,
    pub local_c6: u64,
    pub local_c8: u64,
    pub joint_girth: Option<usize>,
    pub joint_c4: u64,
    pub joint_c6: u64,
    pub joint_c8: u64,
    pub global8: u64,
    pub c6_additive: bool,
    pub c8_additive: bool,
}

/// One row per scheme. Random access uses the stream of frame 0.
pub fn cycle_rows(
    codes: &[LdpcCode],
    n_slots: usize,
    schemes: &[Scheme],
    master_seed: u64,
) -> Result<Vec<CycleRow>, SimError> {
    let n = codes
        .first()
        .map(|c| c.n())
        .ok_or_else(|| SimError::Config("code: no codes given".into()))?;
    if codes.iter().any(|c| c.n() != n) {
        return Err(SimError::Config(
            "codes: every user needs the same code length".into(),
        ));
    }
    let refs: Vec<&LdpcCode> = codes.iter().collect();
    schemes
        .iter()
        .map(|&scheme| {
            let params = AccessParams::new(codes.len(), n, n_slots, scheme, master_seed);
            let a = assign(&params, &mut frame_rng(master_seed, scheme, 0, 0))?;
            let r = scram_cycle_report(&refs, &a)?;
            let local_sum = |len| r.local.iter().map(|p| p.count(len)).sum();
            Ok(CycleRow {
                scheme,
                local_girth: r.local.iter().filter_map(|p| p.girth).min(),
                local_c4: local_sum(4),
                local_c6: local_sum(6),
                local_c8: local_sum(8),
                joint_girth: r.joint.girth,
                joint_c4: r.joint.count(4),
                joint_c6: r.joint.count(6),
                joint_c8: r.joint.count(8),
                global8: r.global8,
                c6_additive: r.c6_additive,
                c8_additive: r.c8_additive,
            })
        })
        .collect()
}

/// Slot of every symbol, 1-based throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CodMapRow {
    pub user: usize,
    pub symbol: usize,
    pub slot: usize,
    pub variable: usize,
}

/// Symbol-to-slot map of `params.scheme`. A supplied bank replaces the
/// generated collision-diversity interleavers.
pub fn cod_map(
    params: &AccessParams,
    bank: Option<&InterleaverBank>,
) -> Result<Vec<CodMapRow>, SimError> {
    let a = match (params.scheme, bank) {
        (Scheme::Cod, b) => assign_cod(params, b)?,
        (_, Some(_)) => {
            return Err(SimError::Config(
                "bank: interleavers only apply to the cod scheme".into(),
            ))
        }
        (s, None) => assign(params, &mut frame_rng(params.master_seed, s, 0, 0))?,
    };
    Ok((0..a.n_users())
        .flat_map(|u| {
            a.slots(u).iter().enumerate().map(move |(i, &s)| CodMapRow {
                user: u + 1,
                symbol: i + 1,
                slot: s + 1,
                variable: variable_index(u, i, params.n_symbols) + 1,
            })
        })
        .collect())
}
