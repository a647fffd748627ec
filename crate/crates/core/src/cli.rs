//! Command-line front end. Exit status: 0 on success, 2 for usage or
//! configuration errors, 3 for failures while running.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::access::{AccessParams, InterleaverBank, Scheme};
use crate::capacity::{capacity_table, parse_spb_csv};
use crate::channel::FadingMode;
use crate::sim::report::{self, Format};
use crate::sim::{
    cod_map, code_fingerprint, cycle_rows, run_degree_dist, run_per_sweep, RunHeader, SimConfig,
    SimError,
};

#[derive(Debug, Parser)]
#[command(
    name = "scram",
    version,
    about = "Joint LDPC / random access decoding laboratory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Packet and bit error rates over an Eb/N0 grid.
    Per(SimArgs),
    /// Random and uniform access capacity limits.
    CapacityTable(CapacityArgs),
    /// Slot-degree histograms against the binomial law.
    DegreeDist(SimArgs),
    /// Local, joint and global cycle counts per access scheme.
    Cycles(SimArgs),
    /// Symbol-to-slot map of an access scheme.
    CodMap(CodMapArgs),
}

#[derive(Debug, Args)]
struct Output {
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

/// Config file plus overrides. Flags win over file values.
#[derive(Debug, Args)]
struct SimArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Alist file shared by every user.
    #[arg(long)]
    code: Option<PathBuf>,
    #[arg(long)]
    users: Option<usize>,
    #[arg(long)]
    slots: Option<usize>,
    /// Symbols per user, for experiments that need no code.
    #[arg(long)]
    symbols: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    schemes: Option<Vec<Scheme>>,
    #[arg(long = "ebn0", value_delimiter = ',', allow_negative_numbers = true)]
    ebn0_db: Option<Vec<f64>>,
    #[arg(long)]
    frames: Option<usize>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    d_max: Option<usize>,
    #[arg(long)]
    fading: Option<FadingMode>,
    #[arg(long)]
    no_early_stop: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args, Serialize)]
struct CapacityArgs {
    #[arg(long, default_value_t = 4320)]
    symbols: usize,
    #[arg(long, default_value_t = 8640)]
    slots: usize,
    #[arg(long, value_delimiter = ',', default_value = "2,4,8,10,12,16")]
    users: Vec<usize>,
    /// Reference CSV with columns `eta` and `ebn0_db`.
    #[arg(long)]
    spb: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    output: Output,
}

#[derive(Debug, Args, Serialize)]
struct CodMapArgs {
    #[arg(long)]
    users: usize,
    #[arg(long)]
    symbols: usize,
    #[arg(long)]
    slots: usize,
    #[arg(long, default_value = "cod")]
    scheme: Scheme,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON array `[set][subgraph][position]` of 1-based slot indices.
    #[arg(long)]
    bank: Option<PathBuf>,
    #[command(flatten)]
    #[serde(skip)]
    output: Output,
}

impl SimArgs {
    fn config(&self) -> Result<SimConfig, SimError> {
        let mut c = match &self.config {
            Some(p) => SimConfig::from_file(p)?,
            None => SimConfig::new(
                self.users
                    .ok_or_else(|| SimError::Config("n_users: give --users or --config".into()))?,
                self.slots
                    .ok_or_else(|| SimError::Config("n_slots: give --slots or --config".into()))?,
            ),
        };
        if let Some(v) = &self.code {
            c.code = Some(v.clone());
            c.codes = None;
        }
        if let Some(v) = self.users {
            c.n_users = v;
        }
        if let Some(v) = self.slots {
            c.n_slots = v;
        }
        if let Some(v) = self.symbols {
            c.n_symbols = Some(v);
        }
        if let Some(v) = &self.schemes {
            c.schemes = v.clone();
        }
        if let Some(v) = &self.ebn0_db {
            c.ebn0_db = v.clone();
        }
        if let Some(v) = self.frames {
            c.frames = v;
        }
        if let Some(v) = self.max_iters {
            c.max_iters = v;
        }
        if let Some(v) = self.d_max {
            c.d_max = v;
        }
        if let Some(v) = self.fading {
            c.fading = v;
        }
        if self.no_early_stop {
            c.early_stop = false;
        }
        if let Some(v) = self.seed {
            c.master_seed = v;
        }
        if let Some(v) = self.workers {
            c.workers = Some(v);
        }
        if let Some(v) = &self.output.out {
            c.output = Some(v.clone());
        }
        if c.schemes.is_empty() {
            c.schemes = Scheme::ALL.to_vec();
        }
        Ok(c)
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), SimError> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn execute(command: Command) -> Result<(), SimError> {
    match command {
        Command::Per(args) => {
            let c = args.config()?;
            let r = run_per_sweep(&c)?;
            emit(c.output.as_deref(), &report::per(&r, args.output.format)?)
        }
        Command::DegreeDist(args) => {
            let c = args.config()?;
            let r = run_degree_dist(&c)?;
            emit(
                c.output.as_deref(),
                &report::degree(&r, args.output.format)?,
            )
        }
        Command::Cycles(args) => {
            let c = args.config()?;
            c.validate()?;
            let codes = c.load_codes()?;
            let rows = cycle_rows(&codes, c.n_slots, &c.schemes, c.master_seed)?;
            let header = RunHeader::new(
                "cycles",
                c.master_seed,
                c.digest(),
                Some(code_fingerprint(&codes)),
            );
            emit(
                c.output.as_deref(),
                &report::cycles(&header, &rows, args.output.format)?,
            )
        }
        Command::CapacityTable(args) => {
            let spb = match &args.spb {
                Some(p) => {
                    let text = std::fs::read_to_string(p)
                        .map_err(|e| SimError::Config(format!("spb {}: {e}", p.display())))?;
                    Some(parse_spb_csv(&text)?)
                }
                None => None,
            };
            let rows = capacity_table(args.symbols, args.slots, &args.users, spb.as_deref())?;
            let header = RunHeader::for_params("capacity-table", args.seed, &args);
            emit(
                args.output.out.as_deref(),
                &report::capacity(&header, args.symbols, args.slots, &rows, args.output.format)?,
            )
        }
        Command::CodMap(args) => {
            let bank = match &args.bank {
                Some(p) => Some(load_bank(p, args.symbols)?),
                None => None,
            };
            let params =
                AccessParams::new(args.users, args.symbols, args.slots, args.scheme, args.seed);
            let rows = cod_map(&params, bank.as_ref())?;
            let header = RunHeader::for_params("cod-map", args.seed, &args);
            emit(
                args.output.out.as_deref(),
                &report::cod_map(&header, &rows, args.output.format)?,
            )
        }
    }
}

fn load_bank(path: &Path, n_symbols: usize) -> Result<InterleaverBank, SimError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SimError::Config(format!("bank {}: {e}", path.display())))?;
    let perms: Vec<Vec<Vec<usize>>> = serde_json::from_str(&text)
        .map_err(|e| SimError::Config(format!("bank {}: {e}", path.display())))?;
    Ok(InterleaverBank::from_one_based(n_symbols, perms)?)
}

/// Parses `args` (program name first) and runs the chosen command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
