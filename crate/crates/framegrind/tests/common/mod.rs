//! Shared helpers for the integration suites: pipeline config builders and
//! trace invariant checks.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap, HashSet};

use framegrind::pipeline::{
    ClockConfig, ClockMode, Outcome, PipelineConfig, RunReport, StageDescriptor,
};

pub fn stage(name: &str, prereqs: &[&str]) -> StageDescriptor {
    StageDescriptor {
        name: name.into(),
        prerequisites: prereqs.iter().map(|s| s.to_string()).collect(),
        worker_count: 1,
        priority: 0,
        kind: String::new(),
        params: BTreeMap::new(),
    }
}

/// A simulated-clock pipeline config over the given stages.
pub fn sim_config(
    stages: Vec<StageDescriptor>,
    fps: f64,
    duration_s: f64,
    service_ms: &[(&str, f64)],
) -> PipelineConfig {
    PipelineConfig {
        stages,
        queue_capacity: 8,
        clock: ClockConfig {
            mode: ClockMode::Sim,
            source_fps: fps,
            duration_s,
            service_times: service_ms
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect(),
        },
    }
}

/// Checks the scheduler invariants on a finished run:
/// - per stage, completion order is monotone in frame id (most-recent-first
///   polling never goes back to an older frame after finishing a newer one)
/// - each (stage, frame) pair reaches at most one terminal outcome
/// - prerequisite gating: a stage finishes a frame only after every
///   prerequisite finished (Done) that frame
///
/// Returns a list of violations; empty means all invariants hold.
pub fn trace_violations(report: &RunReport, prereqs: &[(&str, &[&str])]) -> Vec<String> {
    let mut violations = Vec::new();

    let mut last_id: HashMap<&str, u64> = HashMap::new();
    let mut seen: HashSet<(&str, u64)> = HashSet::new();
    // (stage, frame) -> completion time of Done events
    let mut done_at: HashMap<(&str, u64), u64> = HashMap::new();

    for e in &report.trace {
        let key = (e.stage.as_str(), e.frame_id);
        if !seen.insert(key) {
            violations.push(format!(
                "stage {:?} reached frame {} twice",
                e.stage, e.frame_id
            ));
        }
        if let Some(&prev) = last_id.get(e.stage.as_str()) {
            if e.frame_id <= prev {
                violations.push(format!(
                    "stage {:?} finished frame {} after frame {prev}",
                    e.stage, e.frame_id
                ));
            }
        }
        last_id.insert(e.stage.as_str(), e.frame_id);
        if e.outcome == Outcome::Done {
            done_at.insert(key, e.t_end_ns);
        }
        if e.t_end_ns < e.t_start_ns {
            violations.push(format!(
                "stage {:?} frame {} ends before it starts",
                e.stage, e.frame_id
            ));
        }
    }

    for e in &report.trace {
        if e.outcome != Outcome::Done {
            continue;
        }
        let Some(&(_, wanted)) = prereqs.iter().find(|(s, _)| *s == e.stage) else {
            continue;
        };
        for p in wanted {
            match done_at.get(&(*p, e.frame_id)) {
                Some(&t) if t <= e.t_start_ns => {}
                Some(&t) => violations.push(format!(
                    "stage {:?} started frame {} at {} before prerequisite {:?} finished at {t}",
                    e.stage, e.frame_id, e.t_start_ns, p
                )),
                None => violations.push(format!(
                    "stage {:?} finished frame {} whose prerequisite {:?} never finished",
                    e.stage, e.frame_id, p
                )),
            }
        }
    }
    violations
}
