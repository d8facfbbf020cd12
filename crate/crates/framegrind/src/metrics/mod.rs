//! Classification metrics (ACC, ROC, AUC) and pipeline throughput/latency
//! reporting. All pure functions over immutable inputs.

mod classification;
mod throughput;

pub use classification::{accuracy, auc, confusion, roc_curve, ConfusionCounts, LabeledScore};
pub use throughput::{throughput_report, StageThroughput, ThroughputReport};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("input lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("empty input")]
    EmptyInput,
    #[error("need at least one positive and one negative sample")]
    SingleClassInput,
    #[error("empty trace")]
    EmptyTrace,
    #[error("clock skew: event for stage {stage} frame {frame_id} ends before it starts")]
    ClockSkew { stage: String, frame_id: u64 },
}
