use std::sync::{Arc, Mutex};

use super::config::StageTable;
use super::frame::ResultPayload;

/// Latest-results board: per stage, the newest completed payload.
///
/// Frame ids per stage are monotone non-decreasing; a completion for an
/// older frame never overwrites a newer result. This is what lets the
/// overlay compose the newest grabbed frame with slightly stale detections.
#[derive(Debug)]
pub struct ResultsBoard {
    table: Arc<StageTable>,
    latest: Mutex<Vec<Option<(u64, ResultPayload)>>>,
}

impl ResultsBoard {
    pub fn new(table: Arc<StageTable>) -> Self {
        let slots = table.len();
        Self {
            table,
            latest: Mutex::new(vec![None; slots]),
        }
    }

    pub(crate) fn update(&self, stage_index: usize, frame_id: u64, payload: ResultPayload) {
        let mut latest = self.latest.lock().unwrap();
        match &latest[stage_index] {
            Some((held, _)) if *held >= frame_id => {}
            _ => latest[stage_index] = Some((frame_id, payload)),
        }
    }

    /// Most recent completed payload for a stage; `None` before the first
    /// completion or for unknown stages.
    pub fn latest(&self, stage: &str) -> Option<(u64, ResultPayload)> {
        let idx = self.table.index_of(stage)?;
        self.latest.lock().unwrap()[idx].clone()
    }
}
