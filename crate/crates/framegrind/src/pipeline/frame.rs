use std::sync::Arc;

use crate::geometry::ImageBuffer;

/// Per-stage processing state of one frame.
///
/// Legal transitions: Unprocessed→Claimed (poll), Claimed→Done (complete),
/// Unprocessed→Skipped (most-recent-first bypass) and Claimed→Skipped
/// (stage error / timeout abandon). Done and Skipped are terminal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StageStatus {
    Unprocessed,
    Claimed,
    Done,
    Skipped,
}

impl StageStatus {
    pub fn is_terminal(self) -> bool {
        matches!(self, StageStatus::Done | StageStatus::Skipped)
    }
}

/// Opaque stage result: raw bytes plus a type tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultPayload {
    pub tag: String,
    pub bytes: Vec<u8>,
}

impl ResultPayload {
    pub fn new(tag: impl Into<String>, bytes: Vec<u8>) -> Self {
        Self {
            tag: tag.into(),
            bytes,
        }
    }

    pub fn text(tag: impl Into<String>, text: &str) -> Self {
        Self::new(tag, text.as_bytes().to_vec())
    }

    pub fn as_text(&self) -> Option<&str> {
        std::str::from_utf8(&self.bytes).ok()
    }
}

/// One grabbed image flowing through the pipeline. Internal to the queue;
/// workers only ever see [`FrameClaim`]s.
#[derive(Debug)]
pub(crate) struct Frame {
    pub id: u64,
    pub grab_time_ns: u64,
    pub image: Arc<ImageBuffer>,
    pub status: Vec<StageStatus>,
    pub results: Vec<Option<ResultPayload>>,
}

impl Frame {
    pub fn new(id: u64, grab_time_ns: u64, image: Arc<ImageBuffer>, stages: usize) -> Self {
        Self {
            id,
            grab_time_ns,
            image,
            status: vec![StageStatus::Unprocessed; stages],
            results: (0..stages).map(|_| None).collect(),
        }
    }

    pub fn any_claimed(&self) -> bool {
        self.status.contains(&StageStatus::Claimed)
    }
}

/// Exclusive right to process one frame at one stage.
///
/// Obtained from `poll_next` and consumed by `complete` or `abandon`.
#[derive(Debug)]
pub struct FrameClaim {
    pub(crate) stage_index: usize,
    pub stage: String,
    pub frame_id: u64,
    pub grab_time_ns: u64,
    pub claim_time_ns: u64,
    pub image: Arc<ImageBuffer>,
    /// Results of the stage's prerequisites, in declaration order.
    pub prereq_results: Vec<(String, ResultPayload)>,
}
