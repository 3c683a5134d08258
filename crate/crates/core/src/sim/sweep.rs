use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::comms::CommMode;
use crate::rng::derive_seed;
use crate::world::ObjectPlacement;

use super::config::{Planner, ScenarioConfig};
use super::trial::{simulate, SimError, TraceLevel};

/// Largest sweep [`run_sweep`] accepts unless told otherwise.
pub const DEFAULT_SWEEP_CAP: usize = 1_000_000;

/// One column of the find-rate table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepArm {
    Comm(CommMode),
    /// Uniform random actions without communication.
    Random,
}

impl SweepArm {
    pub const ALL: [SweepArm; 4] = [
        SweepArm::Comm(CommMode::LikelihoodSharing),
        SweepArm::Comm(CommMode::PosteriorSharing),
        SweepArm::Comm(CommMode::None),
        SweepArm::Random,
    ];

    pub fn label(self) -> &'static str {
        match self {
            SweepArm::Comm(mode) => mode.as_str(),
            SweepArm::Random => "random",
        }
    }

    fn apply(self, config: &mut ScenarioConfig) {
        match self {
            SweepArm::Comm(mode) => {
                config.comm_mode = mode;
                config.planner = Planner::ExpectedFreeEnergy;
            }
            SweepArm::Random => {
                config.comm_mode = CommMode::None;
                config.planner = Planner::Random;
            }
        }
    }
}

impl fmt::Display for SweepArm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for SweepArm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "random" {
            Ok(SweepArm::Random)
        } else {
            s.parse().map(SweepArm::Comm)
        }
    }
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("sweep of {trials} trials exceeds the cap of {cap}")]
    SweepTooLarge { trials: usize, cap: usize },
    #[error("repeats must be at least 1")]
    NoRepeats,
    #[error("no sweep arms given")]
    NoArms,
    #[error("cannot start worker pool: {0}")]
    Pool(String),
    #[error("trial {trial_id} failed: {source}")]
    Trial {
        trial_id: usize,
        #[source]
        source: SimError,
    },
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub arms: Vec<SweepArm>,
    pub repeats: usize,
    pub master_seed: u64,
    pub cap: usize,
    /// Worker threads; `None` uses the global rayon pool.
    pub jobs: Option<usize>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            arms: SweepArm::ALL.to_vec(),
            repeats: 5,
            master_seed: 42,
            cap: DEFAULT_SWEEP_CAP,
            jobs: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub trial_id: usize,
    pub arm: SweepArm,
    pub agent_starts: Vec<usize>,
    pub object: usize,
    pub seed: u64,
    pub found: bool,
    pub steps_to_find: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub arm: SweepArm,
    pub find_rate: f64,
    /// Standard error of the mean find rate.
    pub stderr: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub trials: Vec<TrialRow>,
    pub aggregate: Vec<AggregateRow>,
}

impl SweepReport {
    pub fn arm(&self, arm: SweepArm) -> Option<&AggregateRow> {
        self.aggregate.iter().find(|r| r.arm == arm)
    }
}

/// Trials needed for every start combination and object node, per arm.
pub fn sweep_trial_count(
    num_locations: usize,
    num_agents: usize,
    repeats: usize,
    arms: usize,
) -> Option<usize> {
    let starts = num_locations.checked_pow(u32::try_from(num_agents).ok()?)?;
    starts
        .checked_mul(num_locations)?
        .checked_mul(repeats)?
        .checked_mul(arms)
}

fn start_combination(mut index: usize, n: usize, k: usize) -> Vec<usize> {
    let mut starts = vec![0; k];
    for slot in starts.iter_mut().rev() {
        *slot = index % n;
        index /= n;
    }
    starts
}

/// Runs `base` from every start combination against every object node.
///
/// The seed of a trial depends on its start/object/repeat index only, so all
/// arms see the same random streams.
pub fn run_sweep(base: &ScenarioConfig, opts: &SweepOptions) -> Result<SweepReport, SweepError> {
    if opts.repeats == 0 {
        return Err(SweepError::NoRepeats);
    }
    if opts.arms.is_empty() {
        return Err(SweepError::NoArms);
    }
    let n = base.num_locations();
    let k = base.agents.len();
    let total = sweep_trial_count(n, k, opts.repeats, opts.arms.len()).unwrap_or(usize::MAX);
    if total > opts.cap {
        return Err(SweepError::SweepTooLarge {
            trials: total,
            cap: opts.cap,
        });
    }
    base.validate().map_err(|e| SweepError::Trial {
        trial_id: 0,
        source: e.into(),
    })?;
    let per_arm = total / opts.arms.len();

    let run = |trial_id: usize| -> Result<TrialRow, SweepError> {
        let arm = opts.arms[trial_id / per_arm];
        let index = trial_id % per_arm;
        let repeat_block = index / opts.repeats;
        let object = repeat_block % n;
        let starts = start_combination(repeat_block / n, n, k);
        let seed = derive_seed(opts.master_seed, index as u64);

        let mut config = base.clone();
        arm.apply(&mut config);
        for (spec, start) in config.agents.iter_mut().zip(&starts) {
            spec.start = *start;
        }
        config.object = ObjectPlacement::At(object);
        config.seed = seed;
        let result = simulate(&config, TraceLevel::Off)
            .map_err(|source| SweepError::Trial { trial_id, source })?;
        Ok(TrialRow {
            trial_id,
            arm,
            agent_starts: starts,
            object,
            seed,
            found: result.found,
            steps_to_find: result.steps_to_find,
        })
    };

    let trials = match opts.jobs {
        None => (0..total)
            .into_par_iter()
            .map(run)
            .collect::<Result<Vec<_>, _>>()?,
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| SweepError::Pool(e.to_string()))?
            .install(|| {
                (0..total)
                    .into_par_iter()
                    .map(run)
                    .collect::<Result<Vec<_>, _>>()
            })?,
    };

    let aggregate = opts
        .arms
        .iter()
        .enumerate()
        .map(|(a, &arm)| aggregate(arm, &trials[a * per_arm..(a + 1) * per_arm]))
        .collect();
    Ok(SweepReport { trials, aggregate })
}

fn aggregate(arm: SweepArm, rows: &[TrialRow]) -> AggregateRow {
    let count = rows.len();
    let hits = rows.iter().filter(|r| r.found).count();
    let rate = hits as f64 / count as f64;
    let stderr = if count > 1 {
        let var = rate * (1.0 - rate) * count as f64 / (count - 1) as f64;
        (var / count as f64).sqrt()
    } else {
        0.0
    };
    AggregateRow {
        arm,
        find_rate: rate,
        stderr,
        trials: count,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::AgentSpec;
    use crate::world::WorldGraph;

    fn small_base() -> ScenarioConfig {
        let mut c = ScenarioConfig::new(
            WorldGraph::path(3),
            vec![
                AgentSpec {
                    start: 0,
                    prior: None,
                },
                AgentSpec {
                    start: 0,
                    prior: None,
                },
            ],
            CommMode::None,
        );
        c.steps = 4;
        c
    }

    #[test]
    fn counting() {
        assert_eq!(sweep_trial_count(15, 2, 5, 1), Some(16_875));
        assert_eq!(sweep_trial_count(15, 2, 5, 4), Some(67_500));
        assert_eq!(sweep_trial_count(usize::MAX, 2, 1, 1), None);
    }

    #[test]
    fn start_combinations_cover_every_tuple() {
        let all: Vec<_> = (0..9).map(|i| start_combination(i, 3, 2)).collect();
        assert_eq!(all[0], vec![0, 0]);
        assert_eq!(all[5], vec![1, 2]);
        assert_eq!(all[8], vec![2, 2]);
    }

    #[test]
    fn rows_and_aggregates() {
        let opts = SweepOptions {
            repeats: 2,
            ..SweepOptions::default()
        };
        let report = run_sweep(&small_base(), &opts).unwrap();
        assert_eq!(report.trials.len(), 4 * 9 * 3 * 2);
        for row in &report.aggregate {
            assert_eq!(row.trials, 54);
            assert!((0.0..=1.0).contains(&row.find_rate));
        }
        // Paired seeds across arms.
        assert_eq!(report.trials[0].seed, report.trials[54].seed);
        for r in &report.trials {
            if let Some(s) = r.steps_to_find {
                assert!(s <= 4);
            }
        }
    }

    #[test]
    fn serial_and_parallel_agree() {
        let opts = SweepOptions {
            repeats: 1,
            ..SweepOptions::default()
        };
        let serial = run_sweep(
            &small_base(),
            &SweepOptions {
                jobs: Some(1),
                ..opts.clone()
            },
        )
        .unwrap();
        let parallel = run_sweep(
            &small_base(),
            &SweepOptions {
                jobs: Some(3),
                ..opts
            },
        )
        .unwrap();
        assert_eq!(serial, parallel);
    }

    #[test]
    fn cap_and_repeats_are_enforced() {
        let opts = SweepOptions {
            cap: 10,
            ..SweepOptions::default()
        };
        assert!(matches!(
            run_sweep(&small_base(), &opts),
            Err(SweepError::SweepTooLarge {
                trials: 540,
                cap: 10
            })
        ));
        let opts = SweepOptions {
            repeats: 0,
            ..SweepOptions::default()
        };
        assert!(matches!(
            run_sweep(&small_base(), &opts),
            Err(SweepError::NoRepeats)
        ));
    }
}
