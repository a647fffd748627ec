//! CSV and JSON renderings of experiment results.
//!
//! CSV files open with `# key: value` provenance lines followed by one
//! header row. JSON documents carry the same provenance under `header`.
//! Column names are part of the output contract; see the README.

use std::fmt::Display;
use std::str::FromStr;

use serde::Serialize;

use super::{CodMapRow, CycleRow, DegreeReport, PerSweepResult, RunHeader, SimError};
use crate::capacity::CapacityRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(SimError::Config(format!("format: unknown format {s:?}"))),
        }
    }
}

pub const PER_COLUMNS: [&str; 14] = [
    "scheme",
    "ebn0_db",
    "sigma2",
    "frames",
    "packets",
    "packet_errors",
    "per",
    "per_lower",
    "per_upper",
    "bits",
    "bit_errors",
    "ber",
    "mean_iterations",
    "user_packet_errors",
];

pub const CAPACITY_COLUMNS: [&str; 9] = [
    "n_users",
    "eta",
    "ra_ebn0_db",
    "ua_ebn0_db",
    "delta_ra_ua_db",
    "p_empty",
    "solver_steps",
    "spb_ebn0_db",
    "delta_spb_ua_db",
];

pub const DEGREE_COLUMNS: [&str; 6] = [
    "scheme",
    "degree",
    "count",
    "empirical_pmf",
    "binomial_pmf",
    "z_score",
];

pub const CYCLE_COLUMNS: [&str; 12] = [
    "scheme",
    "local_girth",
    "local_c4",
    "local_c6",
    "local_c8",
    "joint_girth",
    "joint_c4",
    "joint_c6",
    "joint_c8",
    "global8",
    "c6_additive",
    "c8_additive",
];

pub const COD_MAP_COLUMNS: [&str; 4] = ["user", "symbol", "slot", "variable"];

fn opt<T: Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn header_lines(header: &RunHeader, extra: &[(&str, String)]) -> String {
    let mut out = format!(
        "# tool: {} {}\n# command: {}\n# seed: {}\n# config_sha256: {}\n",
        header.tool, header.version, header.command, header.seed, header.config_sha256
    );
    if let Some(c) = &header.code_sha256 {
        out.push_str(&format!("# code_sha256: {c}\n"));
    }
    if let Some(c) = &header.commit {
        out.push_str(&format!("# commit: {c}\n"));
    }
    for (k, v) in extra {
        out.push_str(&format!("# {k}: {v}\n"));
    }
    out
}

fn csv_table(
    header: &RunHeader,
    extra: &[(&str, String)],
    columns: &[&str],
    rows: Vec<Vec<String>>,
) -> Result<String, SimError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| SimError::Io(std::io::Error::other(e));
    w.write_record(columns).map_err(csv_err)?;
    for r in rows {
        w.write_record(&r).map_err(csv_err)?;
    }
    let body = w.into_inner().map_err(|e| SimError::Io(e.into_error()))?;
    let mut out = header_lines(header, extra);
    out.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
    Ok(out)
}

fn json<T: Serialize>(value: &T) -> Result<String, SimError> {
    let mut s =
        serde_json::to_string_pretty(value).map_err(|e| SimError::Io(std::io::Error::other(e)))?;
    s.push('\n');
    Ok(s)
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    header: &'a RunHeader,
    #[serde(flatten)]
    body: T,
}

pub fn per(result: &PerSweepResult, format: Format) -> Result<String, SimError> {
    match format {
        Format::Json => json(result),
        Format::Csv => {
            let rows = result
                .points
                .iter()
                .map(|p| {
                    vec![
                        p.scheme.to_string(),
                        p.ebn0_db.to_string(),
                        p.sigma2.to_string(),
                        p.frames.to_string(),
                        p.packets.to_string(),
                        p.packet_errors.to_string(),
                        p.per.to_string(),
                        p.per_lower.to_string(),
                        p.per_upper.to_string(),
                        p.bits.to_string(),
                        p.bit_errors.to_string(),
                        p.ber.to_string(),
                        p.mean_iterations.to_string(),
                        p.user_packet_errors
                            .iter()
                            .map(u64::to_string)
                            .collect::<Vec<_>>()
                            .join(";"),
                    ]
                })
                .collect();
            let extra = [
                ("n_users", result.n_users.to_string()),
                ("n_symbols", result.n_symbols.to_string()),
                ("n_slots", result.n_slots.to_string()),
                ("channel_load", result.channel_load.to_string()),
                (
                    "fading",
                    format!("{:?}", result.config.fading).to_lowercase(),
                ),
                ("max_iters", result.config.max_iters.to_string()),
            ];
            csv_table(&result.header, &extra, &PER_COLUMNS, rows)
        }
    }
}

pub fn capacity(
    header: &RunHeader,
    n_symbols: usize,
    n_slots: usize,
    rows: &[CapacityRow],
    format: Format,
) -> Result<String, SimError> {
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Body<'a> {
                n_symbols: usize,
                n_slots: usize,
                rows: &'a [CapacityRow],
            }
            json(&Document {
                header,
                body: Body {
                    n_symbols,
                    n_slots,
                    rows,
                },
            })
        }
        Format::Csv => {
            let table = rows
                .iter()
                .map(|r| {
                    vec![
                        r.n_users.to_string(),
                        r.eta.to_string(),
                        r.ra_ebn0_db.to_string(),
                        r.ua_ebn0_db.to_string(),
                        r.delta_ra_ua_db.to_string(),
                        r.p_empty.to_string(),
                        r.solver_steps.to_string(),
                        opt(r.spb_ebn0_db),
                        opt(r.delta_spb_ua_db),
                    ]
                })
                .collect();
            let extra = [
                ("n_symbols", n_symbols.to_string()),
                ("n_slots", n_slots.to_string()),
            ];
            csv_table(header, &extra, &CAPACITY_COLUMNS, table)
        }
    }
}

pub fn degree(report: &DegreeReport, format: Format) -> Result<String, SimError> {
    match format {
        Format::Json => json(report),
        Format::Csv => {
            let rows = report
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.scheme.to_string(),
                        r.degree.to_string(),
                        r.count.to_string(),
                        r.empirical_pmf.to_string(),
                        r.binomial_pmf.to_string(),
                        opt(r.z_score),
                    ]
                })
                .collect();
            let extra = [
                ("n_users", report.n_users.to_string()),
                ("n_symbols", report.n_symbols.to_string()),
                ("n_slots", report.n_slots.to_string()),
                ("frames", report.frames.to_string()),
            ];
            csv_table(&report.header, &extra, &DEGREE_COLUMNS, rows)
        }
    }
}

pub fn cycles(header: &RunHeader, rows: &[CycleRow], format: Format) -> Result<String, SimError> {
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Body<'a> {
                rows: &'a [CycleRow],
            }
            json(&Document {
                header,
                body: Body { rows },
            })
        }
        Format::Csv => {
            let table = rows
                .iter()
                .map(|r| {
                    vec![
                        r.scheme.to_string(),
                        opt(r.local_girth),
                        r.local_c4.to_string(),
                        r.local_c6.to_string(),
                        r.local_c8.to_string(),
                        opt(r.joint_girth),
                        r.joint_c4.to_string(),
                        r.joint_c6.to_string(),
                        r.joint_c8.to_string(),
                        r.global8.to_string(),
                        r.c6_additive.to_string(),
                        r.c8_additive.to_string(),
                    ]
                })
                .collect();
            csv_table(header, &[], &CYCLE_COLUMNS, table)
        }
    }
}

pub fn cod_map(header: &RunHeader, rows: &[CodMapRow], format: Format) -> Result<String, SimError> {
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Body<'a> {
                rows: &'a [CodMapRow],
            }
            json(&Document {
                header,
                body: Body { rows },
            })
        }
        Format::Csv => {
            let table = rows
                .iter()
                .map(|r| {
                    vec![
                        r.user.to_string(),
                        r.symbol.to_string(),
                        r.slot.to_string(),
                        r.variable.to_string(),
                    ]
                })
                .collect();
            csv_table(header, &[], &COD_MAP_COLUMNS, table)
        }
    }
}
