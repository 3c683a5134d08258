use std::fs;
use std::path::{Path, PathBuf};

use beliefshare_core::sim::{
    echo_chamber_config, run_sweep, run_trial, self_doubt_config, self_doubt_scripted_config,
    ScenarioConfig, SweepOptions, SweepReport, DEFAULT_SWEEP_CAP,
};
use beliefshare_core::CommMode;

use crate::config::parse_config;
use crate::error::CliError;
use crate::output::{
    file_entry, unix_now, write_aggregate_csv, write_beliefs_csv, write_heatmaps, write_manifest,
    write_messages_csv, write_trials_csv, RunManifest,
};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ScenarioName {
    /// Two frozen, blind agents with a small prior bump on nodes 11 and 13.
    EchoChamber,
    /// Four free agents strongly (and wrongly) believing in node 1.
    SelfDoubt,
    /// Self-doubt with every agent parked on node 1 and seeing nothing.
    SelfDoubtScripted,
}

impl ScenarioName {
    pub fn config(self, mode: CommMode) -> ScenarioConfig {
        match self {
            ScenarioName::EchoChamber => echo_chamber_config(mode),
            ScenarioName::SelfDoubt => self_doubt_config(mode),
            ScenarioName::SelfDoubtScripted => self_doubt_scripted_config(mode),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioName::EchoChamber => "echo-chamber",
            ScenarioName::SelfDoubt => "self-doubt",
            ScenarioName::SelfDoubtScripted => "self-doubt-scripted",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepRequest {
    pub config: PathBuf,
    pub repeats: usize,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub max_trials: usize,
    pub out: PathBuf,
}

impl SweepRequest {
    pub fn new(config: PathBuf, repeats: usize, out: PathBuf) -> Self {
        Self {
            config,
            repeats,
            seed: None,
            jobs: None,
            max_trials: DEFAULT_SWEEP_CAP,
            out,
        }
    }
}

fn prepare_dir(out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out).map_err(|source| CliError::Io {
        path: out.display().to_string(),
        source,
    })
}

fn finish(
    out: &Path,
    command: String,
    config: &ScenarioConfig,
    master_seed: u64,
    started: u64,
    files: &[PathBuf],
) -> Result<RunManifest, CliError> {
    let manifest = RunManifest {
        tool: "beliefshare".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command,
        config_hash: config.hash(),
        master_seed,
        config: serde_json::to_value(config).expect("config serializes"),
        started_unix: started,
        finished_unix: unix_now(),
        files: files
            .iter()
            .map(|p| file_entry(out, p))
            .collect::<Result<_, _>>()?,
    };
    write_manifest(&out.join(MANIFEST_FILE), &manifest)?;
    Ok(manifest)
}

/// Runs a named scenario and writes its belief trace, messages and heatmaps.
pub fn cmd_scenario(
    name: ScenarioName,
    mode: CommMode,
    seed: Option<u64>,
    out: &Path,
) -> Result<RunManifest, CliError> {
    let started = unix_now();
    let mut config = name.config(mode);
    if let Some(s) = seed {
        config.seed = s;
    }
    prepare_dir(out)?;
    let result = run_trial(&config)?;
    log::info!(
        "{} / {}: {} steps recorded",
        name.as_str(),
        mode,
        result.trace.num_steps()
    );

    let beliefs = out.join("beliefs.csv");
    let messages = out.join("messages.csv");
    write_beliefs_csv(&beliefs, &result.trace)?;
    write_messages_csv(&messages, &result.trace)?;
    let mut files = vec![beliefs, messages];
    files.extend(write_heatmaps(out, &result.trace)?);
    finish(
        out,
        format!("scenario {} --mode {mode}", name.as_str()),
        &config,
        config.seed,
        started,
        &files,
    )
}

/// Runs the find-rate sweep described by a config file.
pub fn cmd_sweep(req: &SweepRequest) -> Result<(RunManifest, SweepReport), CliError> {
    if req.repeats == 0 {
        return Err(CliError::Usage("--repeats must be at least 1".into()));
    }
    let started = unix_now();
    let config = parse_config(&req.config)?;
    let master_seed = req.seed.unwrap_or(config.seed);
    prepare_dir(&req.out)?;
    let opts = SweepOptions {
        repeats: req.repeats,
        master_seed,
        cap: req.max_trials,
        jobs: req.jobs,
        ..SweepOptions::default()
    };
    let report = run_sweep(&config, &opts)?;
    for row in &report.aggregate {
        log::info!(
            "{}: {:.4} +/- {:.4} over {} trials",
            row.arm,
            row.find_rate,
            row.stderr,
            row.trials
        );
    }

    let trials = req.out.join("trials.csv");
    let aggregate = req.out.join("aggregate.csv");
    write_trials_csv(&trials, &report)?;
    write_aggregate_csv(&aggregate, &report)?;
    let manifest = finish(
        &req.out,
        format!(
            "sweep --config {} --repeats {}",
            req.config.display(),
            req.repeats
        ),
        &config,
        master_seed,
        started,
        &[trials, aggregate],
    )?;
    Ok((manifest, report))
}
