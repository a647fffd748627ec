//! Monte Carlo experiments and their reproducible outputs.
//!
//! Every frame draws from its own ChaCha8 stream keyed by
//! `(master_seed, scheme id, grid index, frame)`, so tallies do not depend on
//! how frames are spread over worker threads.

mod config;
mod degree;
mod per;
pub mod report;
pub mod stats;
mod tables;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::access::{AccessError, Scheme};
use crate::capacity::CapacityError;
use crate::channel::ChannelError;
use crate::cycles::CycleError;
use crate::decoder::DecodeError;
use crate::graph::GraphError;
use crate::ldpc::LdpcError;

pub use config::{code_fingerprint, SimConfig};
pub use degree::{run_degree_dist, DegreeReport, DegreeRow};
pub use per::{run_per_sweep, run_per_sweep_with_codes, PerPoint, PerSweepResult};
pub use tables::{cod_map, cycle_rows, CodMapRow, CycleRow};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Access(#[from] AccessError),
    #[error(transparent)]
    Capacity(#[from] CapacityError),
    #[error(transparent)]
    Ldpc(#[from] LdpcError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Cycle(#[from] CycleError),
    #[error("worker pool: {0}")]
    Pool(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl SimError {
    /// 2 for configuration problems, 3 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Config(_) | SimError::Access(_) | SimError::Capacity(_) => 2,
            _ => 3,
        }
    }
}

/// Independent stream of frame `frame` at grid point `grid`.
pub fn frame_rng(master_seed: u64, scheme: Scheme, grid: usize, frame: usize) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&master_seed.to_le_bytes());
    seed[8..16].copy_from_slice(&scheme.id().to_le_bytes());
    seed[16..24].copy_from_slice(&(grid as u64).to_le_bytes());
    seed[24..].copy_from_slice(&(frame as u64).to_le_bytes());
    ChaCha8Rng::from_seed(seed)
}

/// Provenance attached to every output file. Carries no timestamp so that
/// identical runs give identical bytes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunHeader {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub config_sha256: String,
    pub code_sha256: Option<String>,
    /// Source revision, when supplied at build time via `SCRAM_COMMIT`.
    pub commit: Option<String>,
}

impl RunHeader {
    pub fn new(
        command: &str,
        seed: u64,
        config_sha256: String,
        code_sha256: Option<String>,
    ) -> Self {
        RunHeader {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            seed,
            config_sha256,
            code_sha256,
            commit: option_env!("SCRAM_COMMIT").map(str::to_string),
        }
    }

    /// Header for commands driven by plain parameters instead of a config.
    pub fn for_params<P: Serialize>(command: &str, seed: u64, params: &P) -> Self {
        let json = serde_json::to_string(params).expect("parameters serialize");
        let digest = config::hex(&Sha256::digest(json.as_bytes()));
        Self::new(command, seed, digest, None)
    }
}

pub(crate) fn worker_pool(workers: Option<usize>) -> Result<rayon::ThreadPool, SimError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| SimError::Pool(e.to_string()))
}
