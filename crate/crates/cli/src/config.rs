//! TOML scenario files.
//!
//! Every key mirrors a [`ScenarioConfig`] field. Only `graph`, `agents` and
//! `comm_mode` are required; the rest fall back to the library defaults.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use beliefshare_core::sim::{AgentSpec, ConfigError, Movement, Planner, ScenarioConfig};
use beliefshare_core::world::ObjectPlacement;
use beliefshare_core::{CommMode, ModalityMask, Visibility, WorldGraph};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum GraphSpec {
    /// `"default"` or a path to an adjacency fixture, relative to the config file.
    Named(String),
    Lists(Vec<Vec<usize>>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct AgentEntry {
    start: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    prior: Option<Vec<f64>>,
    #[serde(flatten, skip_serializing)]
    unknown: BTreeMap<String, toml::Value>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ModalityEntry {
    #[serde(default = "yes")]
    location: bool,
    #[serde(default = "yes")]
    visibility: bool,
    #[serde(flatten, skip_serializing)]
    unknown: BTreeMap<String, toml::Value>,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ConfigFile {
    comm_mode: CommMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    object: Option<ObjectPlacement>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    planner: Option<Planner>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    movement: Option<Movement>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    horizon: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    temperature: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    visible_preference: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    policy_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    routes: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    forced_visibility: Option<Vec<Vec<Visibility>>>,
    graph: GraphSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    modalities: Option<ModalityEntry>,
    agents: Vec<AgentEntry>,
    #[serde(flatten, skip_serializing)]
    unknown: BTreeMap<String, toml::Value>,
}

/// A parsed config plus the unknown keys that were ignored.
#[derive(Debug, Clone)]
pub struct ParsedConfig {
    pub config: ScenarioConfig,
    pub warnings: Vec<String>,
}

/// Reads, defaults and validates a config file. Unknown keys are logged and skipped.
pub fn parse_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let parsed = parse_config_str(&text, &base)?;
    for w in &parsed.warnings {
        log::warn!("{}: {w}", path.display());
    }
    Ok(parsed.config)
}

pub fn parse_config_str(text: &str, base_dir: &Path) -> Result<ParsedConfig, ConfigError> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    let mut warnings = Vec::new();
    let mut note = |scope: &str, keys: &BTreeMap<String, toml::Value>| {
        for key in keys.keys() {
            warnings.push(format!("unknown key `{scope}{key}` ignored"));
        }
    };
    note("", &file.unknown);
    for (i, agent) in file.agents.iter().enumerate() {
        note(&format!("agents[{i}]."), &agent.unknown);
    }
    if let Some(m) = &file.modalities {
        note("modalities.", &m.unknown);
    }

    let graph = load_graph(&file.graph, base_dir)?;
    let agents = file
        .agents
        .into_iter()
        .map(|a| AgentSpec {
            start: a.start,
            prior: a.prior,
        })
        .collect();
    let mut config = ScenarioConfig::new(graph, agents, file.comm_mode);
    if let Some(v) = file.object {
        config.object = v;
    }
    if let Some(v) = file.planner {
        config.planner = v;
    }
    if let Some(v) = file.movement {
        config.movement = v;
    }
    if let Some(v) = file.horizon {
        config.horizon = v;
    }
    if let Some(v) = file.steps {
        config.steps = v;
    }
    if let Some(v) = file.temperature {
        config.temperature = v;
    }
    if let Some(v) = file.seed {
        config.seed = v;
    }
    if let Some(v) = file.visible_preference {
        config.visible_preference = v;
    }
    if let Some(v) = file.policy_cap {
        config.policy_cap = v;
    }
    if let Some(m) = file.modalities {
        config.modalities = ModalityMask {
            location: m.location,
            visibility: m.visibility,
        };
    }
    config.routes = file.routes;
    config.forced_visibility = file.forced_visibility;
    config.validate()?;
    Ok(ParsedConfig { config, warnings })
}

fn load_graph(spec: &GraphSpec, base_dir: &Path) -> Result<WorldGraph, ConfigError> {
    match spec {
        GraphSpec::Named(name) if name == "default" => Ok(WorldGraph::default_world()),
        GraphSpec::Named(path) => {
            let full: PathBuf = base_dir.join(path);
            let text = fs::read_to_string(&full).map_err(|source| ConfigError::Io {
                path: full.display().to_string(),
                source,
            })?;
            WorldGraph::parse_fixture(&text)
                .map_err(|e| ConfigError::invalid("graph", format!("{}: {e}", full.display())))
        }
        GraphSpec::Lists(lists) => WorldGraph::from_neighbors(lists.clone())
            .map_err(|e| ConfigError::invalid("graph", e.to_string())),
    }
}

/// Writes every field explicitly, with the graph inlined as neighbor lists.
pub fn to_toml(config: &ScenarioConfig) -> String {
    let n = config.graph.len();
    let file = ConfigFile {
        comm_mode: config.comm_mode,
        object: Some(config.object),
        planner: Some(config.planner),
        movement: Some(config.movement),
        horizon: Some(config.horizon),
        steps: Some(config.steps),
        temperature: Some(config.temperature),
        seed: Some(config.seed),
        visible_preference: Some(config.visible_preference),
        policy_cap: Some(config.policy_cap),
        routes: config.routes.clone(),
        forced_visibility: config.forced_visibility.clone(),
        graph: GraphSpec::Lists((0..n).map(|i| config.graph.neighbors(i).to_vec()).collect()),
        modalities: Some(ModalityEntry {
            location: config.modalities.location,
            visibility: config.modalities.visibility,
            unknown: BTreeMap::new(),
        }),
        agents: config
            .agents
            .iter()
            .map(|a| AgentEntry {
                start: a.start,
                prior: a.prior.clone(),
                unknown: BTreeMap::new(),
            })
            .collect(),
        unknown: BTreeMap::new(),
    };
    toml::to_string(&file).expect("config serializes to TOML")
}
