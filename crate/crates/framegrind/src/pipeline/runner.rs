use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::mpsc::Sender;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use super::board::ResultsBoard;
use super::clock::PipelineClock;
use super::config::{ClockMode, PipelineConfig, StageDescriptor, StageTable, DEFAULT_POLL_TIMEOUT_MS};
use super::frame::{FrameClaim, ResultPayload};
use super::queue::FrameQueue;
use super::sim;
use super::trace::RunReport;
use super::PipelineError;

pub type StageFailure = Box<dyn std::error::Error + Send + Sync>;

/// One worker instance of a stage. A stage may run several workers; each
/// gets its own instance (external plugin processes are never shared).
pub trait StageWorker: Send {
    fn process(
        &mut self,
        claim: &FrameClaim,
        board: &ResultsBoard,
    ) -> Result<ResultPayload, StageFailure>;
}

/// Builds one worker instance for a (stage, worker index) slot.
pub type WorkerFactory<'a> =
    dyn Fn(&StageDescriptor, usize) -> Result<Box<dyn StageWorker>, PipelineError> + Sync + 'a;

/// One source item: the grabbed image plus the payload the source stage
/// publishes for it (per-frame metadata such as ground-truth landmarks).
pub struct SourceFrame {
    pub image: Arc<crate::geometry::ImageBuffer>,
    pub meta: ResultPayload,
}

/// Copy of a completed result, for callers that persist per-frame outputs.
#[derive(Debug, Clone)]
pub struct CompletionRecord {
    pub stage: String,
    pub frame_id: u64,
    pub payload: ResultPayload,
}

pub struct Pipeline {
    pub config: PipelineConfig,
    pub table: Arc<StageTable>,
    pub queue: Arc<FrameQueue>,
    pub clock: PipelineClock,
}

/// Validates the config and assembles queue, board and clock. Workers stay
/// idle until one of the run entry points is called.
pub fn create_pipeline(config: PipelineConfig) -> Result<Pipeline, PipelineError> {
    let table = Arc::new(StageTable::from_config(&config)?);
    let board = Arc::new(ResultsBoard::new(Arc::clone(&table)));
    let queue = Arc::new(FrameQueue::new(
        Arc::clone(&table),
        board,
        config.queue_capacity,
    ));
    let clock = match config.clock.mode {
        ClockMode::Real => PipelineClock::real(),
        ClockMode::Sim => PipelineClock::simulated(),
    };
    Ok(Pipeline {
        config,
        table,
        queue,
        clock,
    })
}

impl Pipeline {
    /// Deterministic run on the simulated clock with the config's schedule.
    pub fn run_simulated(&self) -> Result<RunReport, PipelineError> {
        sim::run_simulated(&self.config)
    }

    /// Threaded run on the real clock: spawns `worker_count` workers per
    /// non-source stage, feeds frames from `source` on the main thread and
    /// shuts down cleanly when the source is exhausted.
    ///
    /// With `source_fps > 0` grabs are paced to that rate and slow stages
    /// drop (skip) frames; with `source_fps == 0` the source runs in
    /// lockstep, waiting for each frame to settle so every frame is
    /// processed by every stage.
    pub fn run_real(
        &self,
        factory: &WorkerFactory,
        source: impl Iterator<Item = SourceFrame>,
        tap: Option<Sender<CompletionRecord>>,
    ) -> Result<RunReport, PipelineError> {
        let source_name = self
            .config
            .source_stage()
            .ok_or(PipelineError::NoSourceStage)?
            .name
            .clone();
        let panic_flag: Arc<Mutex<Option<String>>> = Arc::new(Mutex::new(None));
        let timeout = Duration::from_millis(DEFAULT_POLL_TIMEOUT_MS);

        std::thread::scope(|scope| -> Result<(), PipelineError> {
            for descriptor in &self.config.stages {
                if descriptor.name == source_name {
                    continue;
                }
                for worker_index in 0..descriptor.worker_count {
                    let mut worker = factory(descriptor, worker_index)?;
                    let stage = descriptor.name.clone();
                    let queue = Arc::clone(&self.queue);
                    let clock = self.clock.clone();
                    let panic_flag = Arc::clone(&panic_flag);
                    let tap = tap.clone();
                    scope.spawn(move || {
                        worker_loop(&stage, &mut *worker, &queue, &clock, timeout, &panic_flag, tap)
                    });
                }
            }

            // the main thread is the source stage's worker
            let period_ns = if self.config.clock.source_fps > 0.0 {
                Some((1e9 / self.config.clock.source_fps).round() as u64)
            } else {
                None
            };
            let mut grab_index = 0u64;
            for item in source {
                if panic_flag.lock().unwrap().is_some() {
                    break;
                }
                if let Some(period) = period_ns {
                    let due = grab_index * period;
                    let now = self.clock.now_ns();
                    if due > now {
                        std::thread::sleep(Duration::from_nanos(due - now));
                    }
                }
                let now = self.clock.now_ns();
                let id = self.queue.push_frame(item.image, now)?;
                let claim = self
                    .queue
                    .poll_next(&source_name, now)?
                    .expect("freshly pushed frame is pollable by the source");
                self.queue.complete(&claim, item.meta, self.clock.now_ns())?;
                if period_ns.is_none() {
                    // lockstep: wait until every stage settled this frame
                    while !self.queue.frame_settled(id) {
                        if panic_flag.lock().unwrap().is_some() {
                            break;
                        }
                        std::thread::sleep(Duration::from_micros(200));
                    }
                }
                grab_index += 1;
            }
            self.queue.close();
            Ok(())
        })?;

        if let Some(stage) = panic_flag.lock().unwrap().take() {
            return Err(PipelineError::StagePanic(stage));
        }
        let (pushed, evicted) = self.queue.counters();
        let mut report =
            RunReport::from_trace(self.queue.take_trace(), &self.table.names, pushed, evicted);
        report.wall_clock_unix_ms = Some(
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_millis() as u64)
                .unwrap_or(0),
        );
        Ok(report)
    }
}

fn worker_loop(
    stage: &str,
    worker: &mut dyn StageWorker,
    queue: &FrameQueue,
    clock: &PipelineClock,
    timeout: Duration,
    panic_flag: &Mutex<Option<String>>,
    tap: Option<Sender<CompletionRecord>>,
) {
    loop {
        if panic_flag.lock().unwrap().is_some() {
            return;
        }
        let claim = match queue.poll_blocking(stage, timeout, || clock.now_ns()) {
            Ok(Some(claim)) => claim,
            Ok(None) => {
                if queue.no_more_work(stage) {
                    return;
                }
                continue;
            }
            Err(_) => return,
        };
        let outcome = catch_unwind(AssertUnwindSafe(|| worker.process(&claim, queue.board())));
        match outcome {
            Ok(Ok(payload)) => {
                let record = CompletionRecord {
                    stage: stage.to_string(),
                    frame_id: claim.frame_id,
                    payload: payload.clone(),
                };
                if queue.complete(&claim, payload, clock.now_ns()).is_ok() {
                    if let Some(tap) = &tap {
                        let _ = tap.send(record);
                    }
                }
            }
            Ok(Err(e)) => {
                log::warn!("stage {stage} frame {}: {e}", claim.frame_id);
                let _ = queue.abandon(&claim, clock.now_ns());
            }
            Err(_) => {
                let _ = queue.abandon(&claim, clock.now_ns());
                *panic_flag.lock().unwrap() = Some(stage.to_string());
                return;
            }
        }
    }
}
