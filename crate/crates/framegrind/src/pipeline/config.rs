use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("queue capacity must be at least 2, got {0}")]
    CapacityTooSmall(usize),
    #[error("stage {0:?} declared more than once")]
    DuplicateStage(String),
    #[error("stage {stage:?} requires undeclared stage {prerequisite:?}")]
    UnknownPrerequisite { stage: String, prerequisite: String },
    #[error("prerequisite cycle involving stage {0:?}")]
    PrerequisiteCycle(String),
    #[error("stage {0:?} has worker_count 0; need at least 1")]
    NoWorkers(String),
    #[error("pipeline declares no stages")]
    NoStages,
    #[error("config file error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub const DEFAULT_QUEUE_CAPACITY: usize = 8;
pub const DEFAULT_POLL_TIMEOUT_MS: u64 = 10;

fn default_capacity() -> usize {
    DEFAULT_QUEUE_CAPACITY
}

fn default_workers() -> usize {
    1
}

/// Declarative wiring of one stage.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageDescriptor {
    pub name: String,
    #[serde(default)]
    pub prerequisites: Vec<String>,
    #[serde(default = "default_workers")]
    pub worker_count: usize,
    /// Advisory host-scheduler hint; correctness never depends on it.
    #[serde(default)]
    pub priority: i32,
    #[serde(default)]
    pub kind: String,
    #[serde(default)]
    pub params: BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClockMode {
    Real,
    Sim,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClockConfig {
    pub mode: ClockMode,
    #[serde(default)]
    pub source_fps: f64,
    #[serde(default)]
    pub duration_s: f64,
    /// Per-stage service times in milliseconds (simulated mode).
    #[serde(default)]
    pub service_times: BTreeMap<String, f64>,
}

impl Default for ClockConfig {
    fn default() -> Self {
        Self {
            mode: ClockMode::Real,
            source_fps: 0.0,
            duration_s: 0.0,
            service_times: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub stages: Vec<StageDescriptor>,
    #[serde(default = "default_capacity")]
    pub queue_capacity: usize,
    #[serde(default)]
    pub clock: ClockConfig,
}

impl PipelineConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config: Self =
            serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.stages.is_empty() {
            return Err(ConfigError::NoStages);
        }
        if self.queue_capacity < 2 {
            return Err(ConfigError::CapacityTooSmall(self.queue_capacity));
        }
        let mut seen = std::collections::HashSet::new();
        for s in &self.stages {
            if !seen.insert(s.name.as_str()) {
                return Err(ConfigError::DuplicateStage(s.name.clone()));
            }
            if s.worker_count == 0 {
                return Err(ConfigError::NoWorkers(s.name.clone()));
            }
        }
        for s in &self.stages {
            for p in &s.prerequisites {
                if !seen.contains(p.as_str()) {
                    return Err(ConfigError::UnknownPrerequisite {
                        stage: s.name.clone(),
                        prerequisite: p.clone(),
                    });
                }
            }
        }
        self.check_acyclic()
    }

    fn check_acyclic(&self) -> Result<(), ConfigError> {
        let index: BTreeMap<&str, usize> = self
            .stages
            .iter()
            .enumerate()
            .map(|(i, s)| (s.name.as_str(), i))
            .collect();
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut mark = vec![0u8; self.stages.len()];
        fn visit(
            i: usize,
            stages: &[StageDescriptor],
            index: &BTreeMap<&str, usize>,
            mark: &mut [u8],
        ) -> Result<(), ConfigError> {
            match mark[i] {
                1 => return Err(ConfigError::PrerequisiteCycle(stages[i].name.clone())),
                2 => return Ok(()),
                _ => {}
            }
            mark[i] = 1;
            for p in &stages[i].prerequisites {
                visit(index[p.as_str()], stages, index, mark)?;
            }
            mark[i] = 2;
            Ok(())
        }
        for i in 0..self.stages.len() {
            visit(i, &self.stages, &index, &mut mark)?;
        }
        Ok(())
    }

    /// The stage frames originate from: kind "source", else name "source".
    pub fn source_stage(&self) -> Option<&StageDescriptor> {
        self.stages
            .iter()
            .find(|s| s.kind == "source")
            .or_else(|| self.stages.iter().find(|s| s.name == "source"))
    }
}

/// Resolved stage wiring: names interned to indices.
#[derive(Debug, Clone)]
pub struct StageTable {
    pub names: Vec<String>,
    pub prerequisites: Vec<Vec<usize>>,
    pub worker_counts: Vec<usize>,
    pub priorities: Vec<i32>,
    /// For each stage, the stages that list it as a prerequisite.
    pub dependents: Vec<Vec<usize>>,
}

impl StageTable {
    pub fn from_config(config: &PipelineConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let names: Vec<String> = config.stages.iter().map(|s| s.name.clone()).collect();
        let index: BTreeMap<&str, usize> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let prerequisites: Vec<Vec<usize>> = config
            .stages
            .iter()
            .map(|s| s.prerequisites.iter().map(|p| index[p.as_str()]).collect())
            .collect();
        let mut dependents = vec![Vec::new(); names.len()];
        for (i, prereqs) in prerequisites.iter().enumerate() {
            for &p in prereqs {
                dependents[p].push(i);
            }
        }
        Ok(Self {
            names,
            prerequisites,
            worker_counts: config.stages.iter().map(|s| s.worker_count).collect(),
            priorities: config.stages.iter().map(|s| s.priority).collect(),
            dependents,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}
