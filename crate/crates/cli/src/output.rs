//! CSV, heatmap and manifest writers. All text is UTF-8 with LF line endings.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use beliefshare_core::sim::{BeliefTrace, SweepReport};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// `%g`-style formatting with 9 significant digits.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>, CliError> {
    let file = File::create(path).map_err(io_err(path))?;
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file))
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> CliError + '_ {
    move |e| CliError::Io {
        path: path.display().to_string(),
        source: e.into(),
    }
}

fn write_rows<I, R>(path: &Path, header: &[&str], rows: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(csv_err(path))?;
    for row in rows {
        w.write_record(row).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Object-factor beliefs: one row per (t, agent, node).
pub fn write_beliefs_csv(path: &Path, trace: &BeliefTrace) -> Result<(), CliError> {
    let rows = trace.entries.iter().flat_map(|e| {
        e.object_belief.iter().enumerate().map(move |(node, p)| {
            vec![
                e.t.to_string(),
                e.agent.to_string(),
                "object".to_string(),
                node.to_string(),
                fmt_float(*p),
            ]
        })
    });
    write_rows(
        path,
        &["t", "agent_id", "factor", "node", "probability"],
        rows,
    )
}

/// Every received payload entry: one row per (t, sender, receiver, node).
pub fn write_messages_csv(path: &Path, trace: &BeliefTrace) -> Result<(), CliError> {
    let rows = trace.entries.iter().flat_map(|e| {
        e.received.iter().flat_map(move |m| {
            m.payload.logits().iter().enumerate().map(move |(node, l)| {
                vec![
                    e.t.to_string(),
                    m.sender.to_string(),
                    e.agent.to_string(),
                    m.mode.to_string(),
                    node.to_string(),
                    fmt_float(*l),
                ]
            })
        })
    });
    write_rows(
        path,
        &["t", "sender", "receiver", "mode", "node", "logit"],
        rows,
    )
}

/// One tab-separated matrix per agent, rows = nodes and columns = timesteps.
pub fn write_heatmaps(dir: &Path, trace: &BeliefTrace) -> Result<Vec<PathBuf>, CliError> {
    let mut paths = Vec::with_capacity(trace.num_agents);
    for agent in 0..trace.num_agents {
        let path = dir.join(format!("heatmap_agent{agent}.tsv"));
        let series = trace.object_series(agent);
        let file = File::create(&path).map_err(io_err(&path))?;
        let mut w = BufWriter::new(file);
        for node in 0..trace.num_locations {
            let line: Vec<String> = series.iter().map(|b| fmt_float(b[node])).collect();
            writeln!(w, "{}", line.join("\t")).map_err(io_err(&path))?;
        }
        w.flush().map_err(io_err(&path))?;
        paths.push(path);
    }
    Ok(paths)
}

pub fn write_trials_csv(path: &Path, report: &SweepReport) -> Result<(), CliError> {
    let rows = report.trials.iter().map(|r| {
        let starts: Vec<String> = r.agent_starts.iter().map(|s| s.to_string()).collect();
        vec![
            r.trial_id.to_string(),
            r.arm.to_string(),
            starts.join(";"),
            r.object.to_string(),
            r.seed.to_string(),
            r.found.to_string(),
            r.steps_to_find.map(|s| s.to_string()).unwrap_or_default(),
        ]
    });
    write_rows(
        path,
        &[
            "trial_id",
            "mode",
            "agent_starts",
            "object_loc",
            "seed",
            "found",
            "steps_to_find",
        ],
        rows,
    )
}

pub fn write_aggregate_csv(path: &Path, report: &SweepReport) -> Result<(), CliError> {
    let rows = report.aggregate.iter().map(|a| {
        vec![
            a.arm.to_string(),
            fmt_float(a.find_rate),
            fmt_float(a.stderr),
            a.trials.to_string(),
        ]
    });
    write_rows(
        path,
        &["mode", "mean_find_rate", "stderr", "trial_count"],
        rows,
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Reproducibility record written next to the outputs.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_hash: String,
    pub master_seed: u64,
    pub config: serde_json::Value,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub files: Vec<FileEntry>,
}

pub fn file_entry(dir: &Path, path: &Path) -> Result<FileEntry, CliError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    let rel = path.strip_prefix(dir).unwrap_or(path);
    Ok(FileEntry {
        path: rel.display().to_string(),
        sha256: hex::encode(Sha256::digest(&bytes)),
        bytes: bytes.len() as u64,
    })
}

pub fn write_manifest(path: &Path, manifest: &RunManifest) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

pub fn unix_now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

#[cfg(test)]
mod tests {
    use super::fmt_float;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_float(0.0), "0");
        assert_eq!(fmt_float(1.0), "1");
        assert_eq!(fmt_float(0.5), "0.5");
        assert_eq!(fmt_float(1.0 / 3.0), "0.333333333");
        assert_eq!(fmt_float(2.0 / 3.0), "0.666666667");
        assert_eq!(fmt_float(123456789.0), "123456789");
        assert_eq!(fmt_float(1234567890.0), "1.23456789e+09");
        assert_eq!(fmt_float(0.0001), "0.0001");
        assert_eq!(fmt_float(0.00001234), "1.234e-05");
        assert_eq!(fmt_float(-36.841361487904734), "-36.8413615");
        assert_eq!(fmt_float(2.8e-309), "2.8e-309");
        assert_eq!(fmt_float(f64::NEG_INFINITY), "-inf");
    }
}
