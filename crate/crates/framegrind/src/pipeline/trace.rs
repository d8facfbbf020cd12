use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Done,
    Skipped,
    Error,
}

/// One per-stage processing record. Skips are instantaneous
/// (`t_start == t_end`); Done and Error events span claim to completion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageTraceEvent {
    pub stage: String,
    pub frame_id: u64,
    pub t_start_ns: u64,
    pub t_end_ns: u64,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageSummary {
    pub stage: String,
    pub done: u64,
    pub skipped: u64,
    pub errors: u64,
    pub fps: f64,
}

/// Full run record. In simulated-clock mode this file is bit-exact across
/// identical runs; wall-clock metadata only appears in real-time mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub summary: Vec<StageSummary>,
    pub frames_pushed: u64,
    pub frames_evicted_unprocessed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_clock_unix_ms: Option<u64>,
    pub trace: Vec<StageTraceEvent>,
}

impl RunReport {
    pub fn from_trace(
        trace: Vec<StageTraceEvent>,
        stage_names: &[String],
        frames_pushed: u64,
        frames_evicted_unprocessed: u64,
    ) -> Self {
        let summary = stage_names
            .iter()
            .map(|name| {
                let mut done = 0u64;
                let mut skipped = 0u64;
                let mut errors = 0u64;
                let mut first_start = u64::MAX;
                let mut last_end = 0u64;
                for e in trace.iter().filter(|e| &e.stage == name) {
                    match e.outcome {
                        Outcome::Done => {
                            done += 1;
                            first_start = first_start.min(e.t_start_ns);
                            last_end = last_end.max(e.t_end_ns);
                        }
                        Outcome::Skipped => skipped += 1,
                        Outcome::Error => errors += 1,
                    }
                }
                let span_s = if last_end > first_start {
                    (last_end - first_start) as f64 / 1e9
                } else {
                    0.0
                };
                let fps = if span_s > 0.0 { done as f64 / span_s } else { 0.0 };
                StageSummary {
                    stage: name.clone(),
                    done,
                    skipped,
                    errors,
                    fps,
                }
            })
            .collect();
        Self {
            summary,
            frames_pushed,
            frames_evicted_unprocessed,
            wall_clock_unix_ms: None,
            trace,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
