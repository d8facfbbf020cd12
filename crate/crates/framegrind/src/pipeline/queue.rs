use std::collections::VecDeque;
use std::sync::{Arc, Condvar, Mutex};
use std::time::Duration;

use thiserror::Error;

use crate::geometry::ImageBuffer;

use super::board::ResultsBoard;
use super::config::StageTable;
use super::frame::{Frame, FrameClaim, ResultPayload, StageStatus};
use super::trace::{Outcome, StageTraceEvent};

#[derive(Debug, Error)]
pub enum QueueError {
    #[error("queue closed")]
    Closed,
    #[error("unknown stage {0:?}")]
    UnknownStage(String),
    #[error("invalid claim: {0}")]
    InvalidClaim(String),
    #[error("empty image")]
    EmptyImage,
}

/// Coordinator-owned bounded frame queue with per-stage status flags.
///
/// Internally synchronized; any number of workers may poll and complete
/// concurrently. Every operation is a single critical section, so the
/// externally observable behavior is linearizable per operation.
#[derive(Debug)]
pub struct FrameQueue {
    table: Arc<StageTable>,
    board: Arc<ResultsBoard>,
    capacity: usize,
    inner: Mutex<Inner>,
    wakeup: Condvar,
}

#[derive(Debug)]
struct Inner {
    frames: VecDeque<Frame>,
    /// Per stage, the id of the frame most recently returned to a poller.
    last_returned: Vec<u64>,
    next_id: u64,
    closed: bool,
    trace: Vec<StageTraceEvent>,
    frames_pushed: u64,
    evicted_unprocessed: u64,
}

impl FrameQueue {
    pub fn new(table: Arc<StageTable>, board: Arc<ResultsBoard>, capacity: usize) -> Self {
        let stages = table.len();
        Self {
            table,
            board,
            capacity,
            inner: Mutex::new(Inner {
                frames: VecDeque::new(),
                last_returned: vec![0; stages],
                next_id: 1,
                closed: false,
                trace: Vec::new(),
                frames_pushed: 0,
                evicted_unprocessed: 0,
            }),
            wakeup: Condvar::new(),
        }
    }

    pub fn board(&self) -> &Arc<ResultsBoard> {
        &self.board
    }

    pub fn table(&self) -> &Arc<StageTable> {
        &self.table
    }

    /// Appends a freshly grabbed frame, evicting the oldest evictable frame
    /// when at capacity. Frames with any stage Claimed are never evicted;
    /// eviction skips to the next-oldest candidate.
    pub fn push_frame(&self, image: Arc<ImageBuffer>, now_ns: u64) -> Result<u64, QueueError> {
        if image.is_empty() {
            return Err(QueueError::EmptyImage);
        }
        let mut inner = self.inner.lock().unwrap();
        if inner.closed {
            return Err(QueueError::Closed);
        }
        while inner.frames.len() >= self.capacity {
            match inner.frames.iter().position(|f| !f.any_claimed()) {
                Some(pos) => {
                    let evicted = inner.frames.remove(pos).expect("position exists");
                    if evicted
                        .status
                        .iter()
                        .any(|s| *s == StageStatus::Unprocessed)
                    {
                        inner.evicted_unprocessed += 1;
                    }
                }
                // every frame has a claim in flight: tolerate a transient
                // overflow instead of dropping claimed work
                None => break,
            }
        }
        let id = inner.next_id;
        inner.next_id += 1;
        inner.frames_pushed += 1;
        let frame = Frame::new(id, now_ns, image, self.table.len());
        inner.frames.push_back(frame);
        drop(inner);
        self.wakeup.notify_all();
        Ok(id)
    }

    /// Most-recent-first poll with prerequisite chaining.
    ///
    /// Returns the newest frame that is Unprocessed for `stage`, has every
    /// prerequisite Done, and is newer than anything already returned to
    /// this stage. Older frames bypassed by the claim are marked Skipped
    /// for this stage (and transitively for stages that can now never run).
    pub fn poll_next(&self, stage: &str, now_ns: u64) -> Result<Option<FrameClaim>, QueueError> {
        let s = self
            .table
            .index_of(stage)
            .ok_or_else(|| QueueError::UnknownStage(stage.to_string()))?;
        let mut inner = self.inner.lock().unwrap();
        let prereqs = &self.table.prerequisites[s];
        let chosen = inner
            .frames
            .iter()
            .rev()
            .find(|f| {
                f.status[s] == StageStatus::Unprocessed
                    && f.id > inner.last_returned[s]
                    && prereqs.iter().all(|&p| f.status[p] == StageStatus::Done)
            })
            .map(|f| f.id);
        let Some(chosen_id) = chosen else {
            return Ok(None);
        };

        // bypass everything older that this stage never saw
        let bypassed: Vec<u64> = inner
            .frames
            .iter()
            .filter(|f| f.id < chosen_id && f.status[s] == StageStatus::Unprocessed)
            .map(|f| f.id)
            .collect();
        for id in bypassed {
            self.mark_skipped(&mut inner, id, s, now_ns, Outcome::Skipped);
        }

        inner.last_returned[s] = chosen_id;
        let frame = inner
            .frames
            .iter_mut()
            .find(|f| f.id == chosen_id)
            .expect("chosen frame present");
        frame.status[s] = StageStatus::Claimed;
        let claim = FrameClaim {
            stage_index: s,
            stage: stage.to_string(),
            frame_id: frame.id,
            grab_time_ns: frame.grab_time_ns,
            claim_time_ns: now_ns,
            image: Arc::clone(&frame.image),
            prereq_results: prereqs
                .iter()
                .map(|&p| {
                    (
                        self.table.names[p].clone(),
                        frame.results[p].clone().expect("prerequisite is Done"),
                    )
                })
                .collect(),
        };
        Ok(Some(claim))
    }

    /// Blocking poll for real-time workers: waits on the wake signal with a
    /// timeout instead of spinning.
    pub fn poll_blocking(
        &self,
        stage: &str,
        timeout: Duration,
        now_ns: impl Fn() -> u64,
    ) -> Result<Option<FrameClaim>, QueueError> {
        if let Some(claim) = self.poll_next(stage, now_ns())? {
            return Ok(Some(claim));
        }
        // wait for a push or completion, then retry once; callers loop
        let inner = self.inner.lock().unwrap();
        let _unused = self.wakeup.wait_timeout(inner, timeout).unwrap();
        drop(_unused);
        self.poll_next(stage, now_ns())
    }

    /// Marks the claim Done, attaches the write-once result and publishes it
    /// to the latest-results board. Wakes waiting pollers of dependent
    /// stages.
    pub fn complete(
        &self,
        claim: &FrameClaim,
        result: ResultPayload,
        now_ns: u64,
    ) -> Result<(), QueueError> {
        let mut inner = self.inner.lock().unwrap();
        let frame = inner
            .frames
            .iter_mut()
            .find(|f| f.id == claim.frame_id)
            .ok_or_else(|| {
                QueueError::InvalidClaim(format!(
                    "frame {} missing; eviction never removes claimed frames, internal corruption",
                    claim.frame_id
                ))
            })?;
        if frame.status[claim.stage_index] != StageStatus::Claimed {
            return Err(QueueError::InvalidClaim(format!(
                "frame {} stage {:?} is {:?}, expected Claimed",
                claim.frame_id, claim.stage, frame.status[claim.stage_index]
            )));
        }
        if frame.results[claim.stage_index].is_some() {
            return Err(QueueError::InvalidClaim(format!(
                "frame {} stage {:?} already has a result",
                claim.frame_id, claim.stage
            )));
        }
        frame.status[claim.stage_index] = StageStatus::Done;
        frame.results[claim.stage_index] = Some(result.clone());
        inner.trace.push(StageTraceEvent {
            stage: claim.stage.clone(),
            frame_id: claim.frame_id,
            t_start_ns: claim.claim_time_ns,
            t_end_ns: now_ns,
            outcome: Outcome::Done,
        });
        drop(inner);
        self.board.update(claim.stage_index, claim.frame_id, result);
        self.wakeup.notify_all();
        Ok(())
    }

    /// Error path: gives up a claim (stage failure or plugin timeout). The
    /// frame's stage becomes Skipped and dependents are released.
    pub fn abandon(&self, claim: &FrameClaim, now_ns: u64) -> Result<(), QueueError> {
        let mut inner = self.inner.lock().unwrap();
        let present = inner.frames.iter().any(|f| f.id == claim.frame_id);
        if !present {
            return Err(QueueError::InvalidClaim(format!(
                "frame {} missing on abandon",
                claim.frame_id
            )));
        }
        inner.trace.push(StageTraceEvent {
            stage: claim.stage.clone(),
            frame_id: claim.frame_id,
            t_start_ns: claim.claim_time_ns,
            t_end_ns: now_ns,
            outcome: Outcome::Error,
        });
        self.mark_skipped(
            &mut inner,
            claim.frame_id,
            claim.stage_index,
            now_ns,
            // the Error event above already accounts for this stage
            Outcome::Error,
        );
        drop(inner);
        self.wakeup.notify_all();
        Ok(())
    }

    /// Skip transition plus cascade: dependents that can now never see a
    /// Done prerequisite are skipped as well.
    fn mark_skipped(
        &self,
        inner: &mut Inner,
        frame_id: u64,
        stage: usize,
        now_ns: u64,
        root_outcome: Outcome,
    ) {
        let mut stack = vec![(stage, root_outcome)];
        while let Some((s, outcome)) = stack.pop() {
            let frame = inner
                .frames
                .iter_mut()
                .find(|f| f.id == frame_id)
                .expect("frame present during skip cascade");
            frame.status[s] = StageStatus::Skipped;
            if outcome == Outcome::Skipped {
                inner.trace.push(StageTraceEvent {
                    stage: self.table.names[s].clone(),
                    frame_id,
                    t_start_ns: now_ns,
                    t_end_ns: now_ns,
                    outcome: Outcome::Skipped,
                });
            }
            for &d in &self.table.dependents[s] {
                let frame = inner
                    .frames
                    .iter()
                    .find(|f| f.id == frame_id)
                    .expect("frame present");
                if frame.status[d] == StageStatus::Unprocessed {
                    stack.push((d, Outcome::Skipped));
                }
            }
        }
    }

    /// Begins shutdown: no further pushes are accepted. Outstanding claims
    /// stay valid so workers can drain them.
    pub fn close(&self) {
        self.inner.lock().unwrap().closed = true;
        self.wakeup.notify_all();
    }

    pub fn is_closed(&self) -> bool {
        self.inner.lock().unwrap().closed
    }

    /// True once the queue is closed and this stage can never receive
    /// another frame (no frame is Unprocessed for it).
    pub fn no_more_work(&self, stage: &str) -> bool {
        let Some(s) = self.table.index_of(stage) else {
            return true;
        };
        let inner = self.inner.lock().unwrap();
        inner.closed
            && inner
                .frames
                .iter()
                .all(|f| f.status[s] != StageStatus::Unprocessed)
    }

    pub fn len(&self) -> usize {
        self.inner.lock().unwrap().frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// True if the frame is terminal (Done or Skipped) for every stage, or
    /// already evicted.
    pub fn frame_settled(&self, frame_id: u64) -> bool {
        let inner = self.inner.lock().unwrap();
        match inner.frames.iter().find(|f| f.id == frame_id) {
            Some(f) => f.status.iter().all(|s| s.is_terminal()),
            None => true,
        }
    }

    pub fn status_of(&self, frame_id: u64, stage: &str) -> Option<StageStatus> {
        let s = self.table.index_of(stage)?;
        let inner = self.inner.lock().unwrap();
        inner
            .frames
            .iter()
            .find(|f| f.id == frame_id)
            .map(|f| f.status[s])
    }

    pub fn result_of(&self, frame_id: u64, stage: &str) -> Option<ResultPayload> {
        let s = self.table.index_of(stage)?;
        let inner = self.inner.lock().unwrap();
        inner
            .frames
            .iter()
            .find(|f| f.id == frame_id)
            .and_then(|f| f.results[s].clone())
    }

    pub fn frame_ids(&self) -> Vec<u64> {
        self.inner.lock().unwrap().frames.iter().map(|f| f.id).collect()
    }

    pub fn take_trace(&self) -> Vec<StageTraceEvent> {
        std::mem::take(&mut self.inner.lock().unwrap().trace)
    }

    pub fn counters(&self) -> (u64, u64) {
        let inner = self.inner.lock().unwrap();
        (inner.frames_pushed, inner.evicted_unprocessed)
    }
}
