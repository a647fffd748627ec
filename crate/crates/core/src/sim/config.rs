use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::SimError;
use crate::access::Scheme;
use crate::channel::FadingMode;
use crate::decoder::{DecoderOptions, DEFAULT_D_MAX, DEFAULT_MAX_ITERS};
use crate::ldpc::LdpcCode;

fn default_max_iters() -> usize {
    DEFAULT_MAX_ITERS
}

fn default_d_max() -> usize {
    DEFAULT_D_MAX
}

fn default_true() -> bool {
    true
}

fn default_frames() -> usize {
    100
}

/// Simulation configuration as read from JSON. Either `code` (shared by
/// every user) or `codes` (one per user) names the alist files; `n_symbols`
/// stands in for the code length in experiments that never decode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    #[serde(default)]
    pub code: Option<PathBuf>,
    #[serde(default)]
    pub codes: Option<Vec<PathBuf>>,
    #[serde(default)]
    pub n_symbols: Option<usize>,
    pub n_users: usize,
    pub n_slots: usize,
    #[serde(default)]
    pub schemes: Vec<Scheme>,
    #[serde(default)]
    pub ebn0_db: Vec<f64>,
    #[serde(default = "default_frames")]
    pub frames: usize,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_true")]
    pub early_stop: bool,
    #[serde(default)]
    pub fading: FadingMode,
    #[serde(default = "default_d_max")]
    pub d_max: usize,
    /// Worker threads; `None` uses every core. Never affects results, so
    /// it is read but not echoed.
    #[serde(default, skip_serializing)]
    pub workers: Option<usize>,
    #[serde(default, skip_serializing)]
    pub output: Option<PathBuf>,
}

impl SimConfig {
    /// Minimal configuration; every optional field at its default.
    pub fn new(n_users: usize, n_slots: usize) -> Self {
        SimConfig {
            code: None,
            codes: None,
            n_symbols: None,
            n_users,
            n_slots,
            schemes: Vec::new(),
            ebn0_db: Vec::new(),
            frames: default_frames(),
            max_iters: DEFAULT_MAX_ITERS,
            master_seed: 0,
            early_stop: true,
            fading: FadingMode::Rayleigh,
            d_max: DEFAULT_D_MAX,
            workers: None,
            output: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, SimError> {
        serde_json::from_str(text).map_err(|e| SimError::Config(format!("config: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self, SimError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SimError::Config(format!("config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn decoder_options(&self) -> DecoderOptions {
        DecoderOptions {
            max_iters: self.max_iters,
            early_stop: self.early_stop,
            d_max: self.d_max,
        }
    }

    /// Checks shared by every experiment.
    pub fn validate(&self) -> Result<(), SimError> {
        if self.frames == 0 {
            return Err(SimError::Config("frames: must be at least 1".into()));
        }
        if self.n_slots == 0 {
            return Err(SimError::Config("n_slots: must be at least 1".into()));
        }
        if self.code.is_some() && self.codes.is_some() {
            return Err(SimError::Config(
                "code and codes are mutually exclusive".into(),
            ));
        }
        if let Some(codes) = &self.codes {
            if codes.len() != self.n_users {
                return Err(SimError::Config(format!(
                    "codes: {} paths for n_users = {}",
                    codes.len(),
                    self.n_users
                )));
            }
        }
        if self.schemes.is_empty() {
            return Err(SimError::Config("schemes: list is empty".into()));
        }
        Ok(())
    }

    /// Additional checks for a PER sweep.
    pub fn validate_sweep(&self) -> Result<(), SimError> {
        self.validate()?;
        if self.ebn0_db.is_empty() {
            return Err(SimError::Config("ebn0_db: grid is empty".into()));
        }
        if self.ebn0_db.iter().any(|x| !x.is_finite()) {
            return Err(SimError::Config("ebn0_db: non-finite entry".into()));
        }
        if self.max_iters == 0 {
            return Err(SimError::Config("max_iters: must be at least 1".into()));
        }
        if self.code.is_none() && self.codes.is_none() {
            return Err(SimError::Config("code: no alist path given".into()));
        }
        if self.n_users == 0 {
            return Err(SimError::Config("n_users: must be at least 1".into()));
        }
        Ok(())
    }

    /// Loads the code of every user from the configured alist files.
    pub fn load_codes(&self) -> Result<Vec<LdpcCode>, SimError> {
        let paths: Vec<PathBuf> = match (&self.code, &self.codes) {
            (Some(p), None) => vec![p.clone(); self.n_users],
            (None, Some(ps)) => ps.clone(),
            (None, None) => return Err(SimError::Config("code: no alist path given".into())),
            (Some(_), Some(_)) => {
                return Err(SimError::Config(
                    "code and codes are mutually exclusive".into(),
                ))
            }
        };
        let mut cache: Vec<(PathBuf, LdpcCode)> = Vec::new();
        paths
            .iter()
            .map(|p| {
                if let Some((_, c)) = cache.iter().find(|(q, _)| q == p) {
                    return Ok(c.clone());
                }
                let text = std::fs::read_to_string(p)
                    .map_err(|e| SimError::Config(format!("code {}: {e}", p.display())))?;
                let code = LdpcCode::from_alist(&text)
                    .map_err(|e| SimError::Config(format!("code {}: {e}", p.display())))?;
                cache.push((p.clone(), code.clone()));
                Ok(code)
            })
            .collect()
    }

    /// SHA-256 of the canonical JSON form, which leaves out the worker count
    /// and output path.
    pub fn digest(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex(&Sha256::digest(json.as_bytes()))
    }
}

/// SHA-256 over the alist text of every user's code, in user order.
pub fn code_fingerprint(codes: &[LdpcCode]) -> String {
    let mut h = Sha256::new();
    for c in codes {
        h.update(c.to_alist().as_bytes());
    }
    hex(&h.finalize())
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
