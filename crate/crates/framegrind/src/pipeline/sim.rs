use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::Arc;

use crate::geometry::ImageBuffer;

use super::board::ResultsBoard;
use super::config::{ClockMode, PipelineConfig, StageTable};
use super::frame::{FrameClaim, ResultPayload};
use super::queue::FrameQueue;
use super::trace::RunReport;
use super::PipelineError;

/// Deterministic single-threaded discrete-event run.
///
/// Workers are stepped cooperatively: a grab or completion event advances
/// simulated time, then every idle worker polls until no stage makes
/// progress. Two runs of the same config produce identical traces.
pub fn run_simulated(config: &PipelineConfig) -> Result<RunReport, PipelineError> {
    if config.clock.mode != ClockMode::Sim {
        return Err(PipelineError::NotSimulated);
    }
    let source = config
        .source_stage()
        .ok_or(PipelineError::NoSourceStage)?
        .name
        .clone();
    if !(config.clock.source_fps > 0.0) || !(config.clock.duration_s > 0.0) {
        return Err(PipelineError::BadSchedule);
    }

    let table = Arc::new(StageTable::from_config(config)?);
    let board = Arc::new(ResultsBoard::new(Arc::clone(&table)));
    let queue = FrameQueue::new(Arc::clone(&table), board, config.queue_capacity);
    let source_idx = table.index_of(&source).expect("source is declared");

    let service_ns: Vec<u64> = table
        .names
        .iter()
        .map(|name| {
            config
                .clock
                .service_times
                .get(name)
                .map(|ms| (ms * 1e6).round() as u64)
                .unwrap_or(0)
        })
        .collect();

    let period_ns = (1e9 / config.clock.source_fps).round() as u64;
    let frame_count = (config.clock.duration_s * config.clock.source_fps).round() as u64;
    // frames share one immutable dummy image; stage costs come from the
    // service-time model, not pixel work
    let image = Arc::new(ImageBuffer::filled(1, 1, 1, 0));

    let mut events = BinaryHeap::new();
    let mut seq = 0u64;
    let mut push = |events: &mut BinaryHeap<Event>, t: u64, kind: EventKind| {
        events.push(Event { t, seq, kind });
        seq += 1;
    };
    for k in 0..frame_count {
        push(&mut events, k * period_ns, EventKind::Grab);
    }

    let mut idle: Vec<usize> = table.worker_counts.clone();
    idle[source_idx] = 0; // grabs drive the source directly

    while let Some(Event { t, kind, .. }) = events.pop() {
        match kind {
            EventKind::Grab => {
                queue.push_frame(Arc::clone(&image), t)?;
                let claim = queue
                    .poll_next(&source, t)?
                    .expect("freshly pushed frame is pollable by the source");
                let done_at = t + service_ns[source_idx];
                if done_at == t {
                    queue.complete(&claim, sim_payload(&source), t)?;
                } else {
                    push(&mut events, done_at, EventKind::Finish(claim));
                }
            }
            EventKind::Finish(claim) => {
                let stage = claim.stage_index;
                queue.complete(&claim, sim_payload(&table.names[stage]), t)?;
                idle[stage] += 1;
            }
        }

        // cooperative dispatch: let idle workers claim whatever became
        // eligible, repeating until a full pass makes no progress
        loop {
            let mut progress = false;
            for s in 0..table.len() {
                if s == source_idx {
                    continue;
                }
                while idle[s] > 0 {
                    match queue.poll_next(&table.names[s], t)? {
                        Some(claim) => {
                            idle[s] -= 1;
                            push(&mut events, t + service_ns[s], EventKind::Finish(claim));
                            progress = true;
                        }
                        None => break,
                    }
                }
            }
            if !progress {
                break;
            }
        }
    }

    queue.close();
    let (pushed, evicted) = queue.counters();
    Ok(RunReport::from_trace(
        queue.take_trace(),
        &table.names,
        pushed,
        evicted,
    ))
}

fn sim_payload(stage: &str) -> ResultPayload {
    ResultPayload::text("sim", stage)
}

enum EventKind {
    Grab,
    Finish(FrameClaim),
}

struct Event {
    t: u64,
    seq: u64,
    kind: EventKind,
}

// earliest (t, seq) first out of the max-heap
impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        (other.t, other.seq).cmp(&(self.t, self.seq))
    }
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.t == other.t && self.seq == other.seq
    }
}

impl Eq for Event {}
