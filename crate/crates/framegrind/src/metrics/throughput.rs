use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::pipeline::{Outcome, StageTraceEvent};

use super::MetricsError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageThroughput {
    pub stage: String,
    pub done: u64,
    pub skipped: u64,
    pub errors: u64,
    pub fps: f64,
    /// Skipped / (Skipped + Done); drop rate of this stage.
    pub skip_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThroughputReport {
    pub stages: Vec<StageThroughput>,
    pub displayed_frames: u64,
    pub latency_p50_ns: u64,
    pub latency_p95_ns: u64,
    pub latency_p99_ns: u64,
}

impl ThroughputReport {
    pub fn stage(&self, name: &str) -> Option<&StageThroughput> {
        self.stages.iter().find(|s| s.stage == name)
    }
}

/// Per-stage FPS, drop rates and end-to-end display latency percentiles
/// from one run trace.
///
/// FPS is Done count over the span from the stage's first claim to its last
/// completion. End-to-end latency of a displayed frame is the display
/// stage's completion time minus the frame's grab time (the source stage's
/// claim time). Percentiles use the nearest-rank method.
pub fn throughput_report(
    trace: &[StageTraceEvent],
    source_stage: &str,
    display_stage: &str,
) -> Result<ThroughputReport, MetricsError> {
    if trace.is_empty() {
        return Err(MetricsError::EmptyTrace);
    }
    for e in trace {
        if e.t_end_ns < e.t_start_ns {
            return Err(MetricsError::ClockSkew {
                stage: e.stage.clone(),
                frame_id: e.frame_id,
            });
        }
    }

    let mut order: Vec<&str> = Vec::new();
    let mut acc: HashMap<&str, (u64, u64, u64, u64, u64)> = HashMap::new(); // done, skip, err, first, last
    for e in trace {
        let entry = acc.entry(e.stage.as_str()).or_insert_with(|| {
            order.push(e.stage.as_str());
            (0, 0, 0, u64::MAX, 0)
        });
        match e.outcome {
            Outcome::Done => {
                entry.0 += 1;
                entry.3 = entry.3.min(e.t_start_ns);
                entry.4 = entry.4.max(e.t_end_ns);
            }
            Outcome::Skipped => entry.1 += 1,
            Outcome::Error => entry.2 += 1,
        }
    }
    let stages = order
        .iter()
        .map(|name| {
            let (done, skipped, errors, first, last) = acc[name];
            let span_s = if last > first {
                (last - first) as f64 / 1e9
            } else {
                0.0
            };
            StageThroughput {
                stage: name.to_string(),
                done,
                skipped,
                errors,
                fps: if span_s > 0.0 { done as f64 / span_s } else { 0.0 },
                skip_fraction: if done + skipped > 0 {
                    skipped as f64 / (done + skipped) as f64
                } else {
                    0.0
                },
            }
        })
        .collect();

    let grab_times: HashMap<u64, u64> = trace
        .iter()
        .filter(|e| e.stage == source_stage && e.outcome == Outcome::Done)
        .map(|e| (e.frame_id, e.t_start_ns))
        .collect();
    let mut latencies: Vec<u64> = trace
        .iter()
        .filter(|e| e.stage == display_stage && e.outcome == Outcome::Done)
        .filter_map(|e| grab_times.get(&e.frame_id).map(|grab| e.t_end_ns - grab))
        .collect();
    latencies.sort_unstable();

    Ok(ThroughputReport {
        stages,
        displayed_frames: latencies.len() as u64,
        latency_p50_ns: nearest_rank(&latencies, 50.0),
        latency_p95_ns: nearest_rank(&latencies, 95.0),
        latency_p99_ns: nearest_rank(&latencies, 99.0),
    })
}

/// Nearest-rank percentile: the value at rank ceil(p/100 * n), 1-indexed.
fn nearest_rank(sorted: &[u64], p: f64) -> u64 {
    if sorted.is_empty() {
        return 0;
    }
    let rank = ((p / 100.0) * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}
