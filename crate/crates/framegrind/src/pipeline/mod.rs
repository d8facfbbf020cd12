//! Pipeline core: bounded frame queue with per-stage status flags,
//! most-recent-first polling with prerequisite chaining, a latest-results
//! board, and real/simulated clocks.

mod board;
mod clock;
mod config;
mod frame;
mod queue;
mod runner;
mod sim;
mod trace;

pub use board::ResultsBoard;
pub use clock::PipelineClock;
pub use config::{
    ClockConfig, ClockMode, ConfigError, PipelineConfig, StageDescriptor, StageTable,
    DEFAULT_POLL_TIMEOUT_MS, DEFAULT_QUEUE_CAPACITY,
};
pub use frame::{FrameClaim, ResultPayload, StageStatus};
pub use queue::{FrameQueue, QueueError};
pub use runner::{
    create_pipeline, CompletionRecord, Pipeline, SourceFrame, StageFailure, StageWorker,
    WorkerFactory,
};
pub use sim::run_simulated;
pub use trace::{Outcome, RunReport, StageSummary, StageTraceEvent};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Queue(#[from] QueueError),
    #[error("config clock mode is not simulated")]
    NotSimulated,
    #[error("no source stage declared (kind \"source\" or name \"source\")")]
    NoSourceStage,
    #[error("simulated run needs source_fps > 0 and duration_s > 0")]
    BadSchedule,
    #[error("stage {0:?} panicked; pipeline halted")]
    StagePanic(String),
    #[error("stage error: {0}")]
    Stage(String),
}
