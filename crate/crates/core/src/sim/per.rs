use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::stats::wilson;
use super::{code_fingerprint, frame_rng, worker_pool, RunHeader, SimConfig, SimError};
use crate::access::{assign_random, AccessParams, Scheme, SlotAssignment};
use crate::channel::{draw_gains, ebn0_to_sigma2, transmit, FadingMode};
use crate::decoder::{decode, DecoderOptions};
use crate::graph::{build_graph, ThreeLayerGraph};
use crate::ldpc::{build_encoder, Encoder, LdpcCode};

/// Tally of one `(scheme, Eb/N0)` point. Packets count every user's packet,
/// so `packets = frames * n_users`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerPoint {
    pub scheme: Scheme,
    pub grid_index: usize,
    pub ebn0_db: f64,
    pub sigma2: f64,
    pub frames: u64,
    pub packets: u64,
    pub packet_errors: u64,
    pub user_packet_errors: Vec<u64>,
    pub per: f64,
    pub per_lower: f64,
    pub per_upper: f64,
    pub user_per: Vec<f64>,
    pub bits: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub mean_iterations: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerSweepResult {
    pub header: RunHeader,
    pub config: SimConfig,
    pub n_users: usize,
    pub n_symbols: usize,
    pub n_slots: usize,
    pub info_bits: Vec<usize>,
    /// Information bits per slot, `sum k / N_s`.
    pub channel_load: f64,
    pub points: Vec<PerPoint>,
}

#[derive(Debug, Clone, Default)]
struct Tally {
    user_errors: Vec<u64>,
    bit_errors: u64,
    iterations: u64,
}

impl Tally {
    fn add(mut self, other: Tally) -> Tally {
        if self.user_errors.is_empty() {
            return other;
        }
        for (a, b) in self.user_errors.iter_mut().zip(&other.user_errors) {
            *a += b;
        }
        self.bit_errors += other.bit_errors;
        self.iterations += other.iterations;
        self
    }
}

struct SchemeContext<'a> {
    scheme: Scheme,
    params: AccessParams,
    codes: Vec<&'a LdpcCode>,
    encoders: Vec<&'a Encoder>,
    /// Deterministic schemes reuse one assignment and graph for every frame.
    fixed: Option<(SlotAssignment, ThreeLayerGraph)>,
    options: DecoderOptions,
    fading: FadingMode,
    rate: f64,
}

impl SchemeContext<'_> {
    fn frame(
        &self,
        master_seed: u64,
        grid: usize,
        frame: usize,
        ebn0_db: f64,
    ) -> Result<Tally, SimError> {
        let mut rng = frame_rng(master_seed, self.scheme, grid, frame);
        let info: Vec<Vec<u8>> = self
            .encoders
            .iter()
            .map(|e| (0..e.k()).map(|_| rng.random::<bool>() as u8).collect())
            .collect();
        let symbols = info
            .iter()
            .zip(&self.encoders)
            .map(|(bits, e)| {
                Ok(e.encode(bits)?
                    .into_iter()
                    .map(|b| if b == 1 { 1.0 } else { -1.0 })
                    .collect())
            })
            .collect::<Result<Vec<Vec<f64>>, SimError>>()?;
        let drawn;
        let (assignment, graph) = match &self.fixed {
            Some((a, g)) => (a, g),
            None => {
                let a = assign_random(&self.params, &mut rng)?;
                let g = build_graph(&self.codes, &a, self.params.n_slots)?;
                drawn = (a, g);
                (&drawn.0, &drawn.1)
            }
        };
        let lengths = vec![self.params.n_symbols; self.params.n_users];
        let h = draw_gains(&mut rng, &lengths, self.fading);
        let sigma2 = ebn0_to_sigma2(ebn0_db, self.rate)?;
        let frame = transmit(assignment, &symbols, &h, sigma2, &mut rng)?;
        let result = decode(graph, &self.encoders, &frame, &self.options, Some(&info))?;
        let errors = result.packet_errors.unwrap_or_default();
        Ok(Tally {
            user_errors: errors.iter().map(|&e| e as u64).collect(),
            bit_errors: result.bit_errors.unwrap_or_default().iter().sum::<usize>() as u64,
            iterations: result.iterations as u64,
        })
    }
}

/// Loads the configured codes and runs the sweep.
pub fn run_per_sweep(config: &SimConfig) -> Result<PerSweepResult, SimError> {
    config.validate_sweep()?;
    let codes = config.load_codes()?;
    run_per_sweep_with_codes(config, &codes)
}

/// Sweep with codes supplied in memory, one per user. `config.code` and
/// `config.codes` are not consulted.
pub fn run_per_sweep_with_codes(
    config: &SimConfig,
    codes: &[LdpcCode],
) -> Result<PerSweepResult, SimError> {
    let mut check = config.clone();
    if check.code.is_none() && check.codes.is_none() {
        check.code = Some("<in memory>".into());
    }
    check.validate_sweep()?;
    if codes.len() != config.n_users {
        return Err(SimError::Config(format!(
            "codes: {} codes for n_users = {}",
            codes.len(),
            config.n_users
        )));
    }
    let n = codes[0].n();
    if codes.iter().any(|c| c.n() != n) {
        return Err(SimError::Config(
            "codes: every user needs the same code length".into(),
        ));
    }
    let encoders = codes
        .iter()
        .map(build_encoder)
        .collect::<Result<Vec<_>, _>>()?;
    let info_bits: Vec<usize> = encoders.iter().map(|e| e.k()).collect();
    // Mean code rate; every user shares n so this is sum k / (N_u n).
    let rate = info_bits.iter().sum::<usize>() as f64 / (n * config.n_users) as f64;
    let pool = worker_pool(config.workers)?;
    let options = config.decoder_options();
    let mut points = Vec::new();
    for &scheme in &config.schemes {
        let params = AccessParams::new(
            config.n_users,
            n,
            config.n_slots,
            scheme,
            config.master_seed,
        );
        let code_refs: Vec<&LdpcCode> = codes.iter().collect();
        let fixed = if scheme.is_random() {
            if n > config.n_slots {
                return Err(SimError::Config(format!(
                    "n_slots: {} slots cannot hold {n} symbols",
                    config.n_slots
                )));
            }
            None
        } else {
            let mut unused = frame_rng(config.master_seed, scheme, 0, 0);
            let a = crate::access::assign(&params, &mut unused)?;
            let g = build_graph(&code_refs, &a, config.n_slots)?;
            Some((a, g))
        };
        let ctx = SchemeContext {
            scheme,
            params,
            codes: code_refs,
            encoders: encoders.iter().collect(),
            fixed,
            options,
            fading: config.fading,
            rate,
        };
        for (grid, &ebn0_db) in config.ebn0_db.iter().enumerate() {
            let tallies: Vec<Tally> = pool.install(|| {
                (0..config.frames)
                    .into_par_iter()
                    .map(|f| ctx.frame(config.master_seed, grid, f, ebn0_db))
                    .collect::<Result<_, SimError>>()
            })?;
            let total = tallies.into_iter().fold(Tally::default(), Tally::add);
            points.push(point(
                scheme, grid, ebn0_db, ctx.rate, config, &info_bits, total,
            )?);
        }
    }
    let total_k: usize = info_bits.iter().sum();
    let header = RunHeader::new(
        "per",
        config.master_seed,
        config.digest(),
        Some(code_fingerprint(codes)),
    );
    Ok(PerSweepResult {
        header,
        config: config.clone(),
        n_users: config.n_users,
        n_symbols: n,
        n_slots: config.n_slots,
        channel_load: total_k as f64 / config.n_slots as f64,
        info_bits,
        points,
    })
}

fn point(
    scheme: Scheme,
    grid_index: usize,
    ebn0_db: f64,
    rate: f64,
    config: &SimConfig,
    info_bits: &[usize],
    total: Tally,
) -> Result<PerPoint, SimError> {
    let frames = config.frames as u64;
    let packets = frames * config.n_users as u64;
    let packet_errors: u64 = total.user_errors.iter().sum();
    let interval = wilson(packet_errors, packets);
    let bits = frames * info_bits.iter().sum::<usize>() as u64;
    Ok(PerPoint {
        scheme,
        grid_index,
        ebn0_db,
        sigma2: ebn0_to_sigma2(ebn0_db, rate)?,
        frames,
        packets,
        packet_errors,
        user_per: total
            .user_errors
            .iter()
            .map(|&e| e as f64 / frames as f64)
            .collect(),
        user_packet_errors: total.user_errors,
        per: interval.estimate,
        per_lower: interval.lower,
        per_upper: interval.upper,
        bits,
        bit_errors: total.bit_errors,
        ber: total.bit_errors as f64 / bits as f64,
        mean_iterations: total.iterations as f64 / frames as f64,
    })
}
