//! Channel access schemes: which slot carries each user's symbols.
//!
//! All indices are 0-based. User `u`, symbol `i` and slot `s` here correspond
//! to `u + 1`, `i + 1` and `s + 1` in the usual 1-based notation; interleaver
//! seeds are computed from the 1-based set and subgraph numbers.

mod lfsr;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use lfsr::{lfsr_permutation, seed_for, Lfsr32};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AccessError {
    #[error("{0}")]
    Divisibility(String),
    #[error("each user needs {n} distinct slots but only {n_slots} exist")]
    TooManySymbols { n: usize, n_slots: usize },
    #[error("interleaver bank: {0}")]
    BankShape(String),
    #[error("user {user} out of range (N_u = {n_users})")]
    UserOutOfRange { user: usize, n_users: usize },
    #[error("invalid assignment: {0}")]
    Invalid(String),
    #[error("unknown access scheme {0:?} (expected random, sequential, interleaved or cod)")]
    UnknownScheme(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Random,
    Sequential,
    Interleaved,
    Cod,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::Random,
        Scheme::Sequential,
        Scheme::Interleaved,
        Scheme::Cod,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Random => "random",
            Scheme::Sequential => "sequential",
            Scheme::Interleaved => "interleaved",
            Scheme::Cod => "cod",
        }
    }

    /// Stable numeric id used when deriving per-frame random streams.
    pub fn id(self) -> u64 {
        match self {
            Scheme::Random => 0,
            Scheme::Sequential => 1,
            Scheme::Interleaved => 2,
            Scheme::Cod => 3,
        }
    }

    /// Whether the assignment depends on per-frame randomness.
    pub fn is_random(self) -> bool {
        self == Scheme::Random
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = AccessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "random" | "ra" => Ok(Scheme::Random),
            "sequential" | "seq" => Ok(Scheme::Sequential),
            "interleaved" | "int" => Ok(Scheme::Interleaved),
            "cod" | "collision-diversity" => Ok(Scheme::Cod),
            _ => Err(AccessError::UnknownScheme(s.to_string())),
        }
    }
}

/// Geometry of one access frame. Every user sends the same number of symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AccessParams {
    pub n_users: usize,
    pub n_symbols: usize,
    pub n_slots: usize,
    pub scheme: Scheme,
    pub master_seed: u64,
}

impl AccessParams {
    pub fn new(
        n_users: usize,
        n_symbols: usize,
        n_slots: usize,
        scheme: Scheme,
        master_seed: u64,
    ) -> Self {
        AccessParams {
            n_users,
            n_symbols,
            n_slots,
            scheme,
            master_seed,
        }
    }

    /// Number of `n_symbols`-slot blocks the channel divides into.
    pub fn n_subgraphs(&self) -> Result<usize, AccessError> {
        if self.n_symbols == 0 || !self.n_slots.is_multiple_of(self.n_symbols) || self.n_slots == 0
        {
            return Err(AccessError::Divisibility(format!(
                "N_s = {} is not a positive multiple of n = {}",
                self.n_slots, self.n_symbols
            )));
        }
        Ok(self.n_slots / self.n_symbols)
    }

    /// Number of user sets for collision diversity, `N_u / N_subgraphs`.
    pub fn n_sets(&self) -> Result<usize, AccessError> {
        let subgraphs = self.n_subgraphs()?;
        if !self.n_users.is_multiple_of(subgraphs) {
            return Err(AccessError::Divisibility(format!(
                "N_u = {} is not a multiple of N_subgraphs = {subgraphs}",
                self.n_users
            )));
        }
        if !self.n_symbols.is_multiple_of(subgraphs) {
            return Err(AccessError::Divisibility(format!(
                "n = {} is not a multiple of N_subgraphs = {subgraphs}",
                self.n_symbols
            )));
        }
        Ok(self.n_users / subgraphs)
    }
}

/// Slot index of every symbol of every user.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotAssignment {
    n_slots: usize,
    slot_of: Vec<Vec<usize>>,
}

impl SlotAssignment {
    /// Validates per-user distinctness and the slot range.
    pub fn new(n_slots: usize, slot_of: Vec<Vec<usize>>) -> Result<Self, AccessError> {
        for (u, slots) in slot_of.iter().enumerate() {
            let mut seen = vec![false; n_slots];
            for (i, &s) in slots.iter().enumerate() {
                if s >= n_slots {
                    return Err(AccessError::Invalid(format!(
                        "user {} symbol {} mapped to slot {} of {n_slots}",
                        u + 1,
                        i + 1,
                        s + 1
                    )));
                }
                if std::mem::replace(&mut seen[s], true) {
                    return Err(AccessError::Invalid(format!(
                        "user {} uses slot {} twice",
                        u + 1,
                        s + 1
                    )));
                }
            }
        }
        Ok(SlotAssignment { n_slots, slot_of })
    }

    pub fn n_slots(&self) -> usize {
        self.n_slots
    }

    pub fn n_users(&self) -> usize {
        self.slot_of.len()
    }

    /// Slots of user `u`, indexed by symbol.
    pub fn slots(&self, u: usize) -> &[usize] {
        &self.slot_of[u]
    }

    pub fn slot_of(&self) -> &[Vec<usize>] {
        &self.slot_of
    }

    /// `(user, symbol)` pairs occupying each slot, ordered by user.
    pub fn occupants(&self) -> Vec<Vec<(usize, usize)>> {
        let mut occ = vec![Vec::new(); self.n_slots];
        for (u, slots) in self.slot_of.iter().enumerate() {
            for (i, &s) in slots.iter().enumerate() {
                occ[s].push((u, i));
            }
        }
        occ
    }

    /// Number of symbols in each slot.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n_slots];
        for &s in self.slot_of.iter().flatten() {
            deg[s] += 1;
        }
        deg
    }

    /// Histogram of slot degrees over `0..=N_u`.
    pub fn slot_degrees(&self) -> Vec<usize> {
        let mut hist = vec![0; self.n_users() + 1];
        for d in self.degrees() {
            hist[d] += 1;
        }
        hist
    }

    /// Users other than `u` that share at least one slot with it.
    pub fn collision_partners(&self, u: usize) -> Result<BTreeSet<usize>, AccessError> {
        if u >= self.n_users() {
            return Err(AccessError::UserOutOfRange {
                user: u,
                n_users: self.n_users(),
            });
        }
        let mut mine = vec![false; self.n_slots];
        for &s in &self.slot_of[u] {
            mine[s] = true;
        }
        Ok(self
            .slot_of
            .iter()
            .enumerate()
            .filter(|&(v, slots)| v != u && slots.iter().any(|&s| mine[s]))
            .map(|(v, _)| v)
            .collect())
    }
}

/// Collision-diversity interleavers: `perm(set, sub)[i]` is the absolute slot
/// picked by the `i`-th position of subgraph `sub` for user set `set`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterleaverBank {
    n_symbols: usize,
    perms: Vec<Vec<Vec<usize>>>,
}

impl InterleaverBank {
    /// Validates that every vector is a bijection onto its subgraph's slots.
    pub fn new(n_symbols: usize, perms: Vec<Vec<Vec<usize>>>) -> Result<Self, AccessError> {
        let n_sub = perms.first().map_or(0, Vec::len);
        for (set, row) in perms.iter().enumerate() {
            if row.len() != n_sub {
                return Err(AccessError::BankShape(format!(
                    "user set {} has {} subgraphs, expected {n_sub}",
                    set + 1,
                    row.len()
                )));
            }
            for (sub, perm) in row.iter().enumerate() {
                if perm.len() != n_symbols {
                    return Err(AccessError::BankShape(format!(
                        "interleaver ({}, {}) has length {}, expected {n_symbols}",
                        set + 1,
                        sub + 1,
                        perm.len()
                    )));
                }
                let base = sub * n_symbols;
                let mut seen = vec![false; n_symbols];
                for &slot in perm {
                    let ok = slot >= base
                        && slot < base + n_symbols
                        && !std::mem::replace(&mut seen[slot - base], true);
                    if !ok {
                        return Err(AccessError::BankShape(format!(
                            "interleaver ({}, {}) is not a permutation of slots {}..={}",
                            set + 1,
                            sub + 1,
                            base + 1,
                            base + n_symbols
                        )));
                    }
                }
            }
        }
        Ok(InterleaverBank { n_symbols, perms })
    }

    /// Same as [`InterleaverBank::new`] for 1-based slot numbers.
    pub fn from_one_based(
        n_symbols: usize,
        perms: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self, AccessError> {
        if perms.iter().flatten().flatten().any(|&s| s == 0) {
            return Err(AccessError::BankShape("slot 0 in a 1-based bank".into()));
        }
        let shifted = perms
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|p| p.into_iter().map(|s| s - 1).collect())
                    .collect()
            })
            .collect();
        Self::new(n_symbols, shifted)
    }

    /// LFSR-generated bank: `perm(set, sub) = lfsr_permutation(seed_for(set, sub)) + sub * n`.
    pub fn generate(n_sets: usize, n_subgraphs: usize, n_symbols: usize, master_seed: u64) -> Self {
        let perms = (0..n_sets)
            .map(|set| {
                (0..n_subgraphs)
                    .map(|sub| {
                        let seed = seed_for(set as u64 + 1, sub as u64 + 1, master_seed);
                        lfsr_permutation(seed, n_symbols)
                            .into_iter()
                            .map(|p| p + sub * n_symbols)
                            .collect()
                    })
                    .collect()
            })
            .collect();
        InterleaverBank { n_symbols, perms }
    }

    pub fn n_sets(&self) -> usize {
        self.perms.len()
    }

    pub fn n_subgraphs(&self) -> usize {
        self.perms.first().map_or(0, Vec::len)
    }

    pub fn n_symbols(&self) -> usize {
        self.n_symbols
    }

    pub fn perm(&self, set: usize, sub: usize) -> &[usize] {
        &self.perms[set][sub]
    }
}

/// Each user draws `n` distinct slots uniformly at random; symbol `i` goes to
/// the `i`-th drawn slot.
pub fn assign_random<R: Rng + ?Sized>(
    params: &AccessParams,
    rng: &mut R,
) -> Result<SlotAssignment, AccessError> {
    let (n, n_slots) = (params.n_symbols, params.n_slots);
    if n > n_slots {
        return Err(AccessError::TooManySymbols { n, n_slots });
    }
    let mut pool: Vec<usize> = (0..n_slots).collect();
    let slot_of = (0..params.n_users)
        .map(|_| {
            let (picked, _) = pool.partial_shuffle(rng, n);
            picked.to_vec()
        })
        .collect();
    Ok(SlotAssignment { n_slots, slot_of })
}

/// User `u` fills block `u mod N_subgraphs` in symbol order.
pub fn assign_sequential(params: &AccessParams) -> Result<SlotAssignment, AccessError> {
    let subgraphs = params.n_subgraphs()?;
    let n = params.n_symbols;
    let slot_of = (0..params.n_users)
        .map(|u| {
            let base = (u % subgraphs) * n;
            (base..base + n).collect()
        })
        .collect();
    Ok(SlotAssignment {
        n_slots: params.n_slots,
        slot_of,
    })
}

/// Sequential blocks with each user's symbol order permuted by its own
/// LFSR permutation, seeded with `seed_for(u + 1, 0, master_seed)`.
pub fn assign_interleaved(params: &AccessParams) -> Result<SlotAssignment, AccessError> {
    let subgraphs = params.n_subgraphs()?;
    let n = params.n_symbols;
    let slot_of = (0..params.n_users)
        .map(|u| {
            let base = (u % subgraphs) * n;
            lfsr_permutation(seed_for(u as u64 + 1, 0, params.master_seed), n)
                .into_iter()
                .map(|offset| base + offset)
                .collect()
        })
        .collect();
    Ok(SlotAssignment {
        n_slots: params.n_slots,
        slot_of,
    })
}

/// Collision-diversity access: symbol `i` of user `u` uses position `i` of
/// interleaver `(u / N_subgraphs, (u + i) mod N_subgraphs)`, so each user hops
/// cyclically over the subgraphs starting at subgraph `u mod N_subgraphs`.
pub fn assign_cod(
    params: &AccessParams,
    bank: Option<&InterleaverBank>,
) -> Result<SlotAssignment, AccessError> {
    let n_sets = params.n_sets()?;
    let subgraphs = params.n_subgraphs()?;
    let n = params.n_symbols;
    let generated;
    let bank = match bank {
        Some(b) => {
            if b.n_sets() != n_sets || b.n_subgraphs() != subgraphs || b.n_symbols() != n {
                return Err(AccessError::BankShape(format!(
                    "bank is {}x{}x{}, geometry needs {n_sets}x{subgraphs}x{n}",
                    b.n_sets(),
                    b.n_subgraphs(),
                    b.n_symbols()
                )));
            }
            b
        }
        None => {
            generated = InterleaverBank::generate(n_sets, subgraphs, n, params.master_seed);
            &generated
        }
    };
    let slot_of = (0..params.n_users)
        .map(|u| {
            let set = u / subgraphs;
            (0..n)
                .map(|i| bank.perm(set, (u + i) % subgraphs)[i])
                .collect()
        })
        .collect();
    Ok(SlotAssignment {
        n_slots: params.n_slots,
        slot_of,
    })
}

/// Dispatches on `params.scheme`. `rng` is only consumed by random access.
pub fn assign<R: Rng + ?Sized>(
    params: &AccessParams,
    rng: &mut R,
) -> Result<SlotAssignment, AccessError> {
    match params.scheme {
        Scheme::Random => assign_random(params, rng),
        Scheme::Sequential => assign_sequential(params),
        Scheme::Interleaved => assign_interleaved(params),
        Scheme::Cod => assign_cod(params, None),
    }
}

/// Joint-graph variable index of symbol `i` of user `u`.
pub fn variable_index(u: usize, i: usize, n_symbols: usize) -> usize {
    i + u * n_symbols
}
