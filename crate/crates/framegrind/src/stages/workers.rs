//! Maps declarative stage kinds from the pipeline config to worker
//! implementations. The source stage is driven by the runner itself and is
//! never built here.
//!
//! Built-in kinds:
//! - `detect`: [`heuristic_face_detector`] over the raw frame
//! - `align`: similarity alignment using ground-truth landmarks from the
//!   source metadata when present, else the first detected box
//!   (params: `out_size`, `template` path, `template_size`)
//! - `classify`: [`stub_smile_classifier`] over the aligned crop
//! - `overlay`: annotates the raw frame with the newest board results
//!   (params: `detect_stage`, `classify_stage`)
//! - `plugin`: external process speaking the plugin protocol
//!   (params: `command`, `args`, `timeout_ms`)

use std::path::Path;

use thiserror::Error;

use crate::geometry::{LandmarkSet, DEFAULT_CONVENTION};
use crate::pipeline::{
    FrameClaim, PipelineError, ResultPayload, ResultsBoard, StageDescriptor, StageFailure,
    StageWorker,
};

use super::align::{align_face, landmarks_from_box};
use super::canonical::{builtin_template, BUILTIN_TEMPLATE_SIZE};
use super::classify::stub_smile_classifier;
use super::detect::heuristic_face_detector;
use super::overlay::render_overlay;
use super::plugin::{PluginClient, PluginResponse, PluginSpec};
use super::{
    encode_faces, encode_image, encode_smile, parse_faces, parse_image, parse_meta, parse_smile,
    StageError, FACES_TAG, IMAGE_TAG, LANDMARKS_TAG, META_TAG,
};

#[derive(Debug, Error)]
pub enum StageKindError {
    #[error("stage {stage:?}: unknown kind {kind:?}")]
    UnknownKind { stage: String, kind: String },
    #[error("stage {stage:?}: bad param {param:?}: {message}")]
    BadParam {
        stage: String,
        param: String,
        message: String,
    },
}

impl From<StageKindError> for PipelineError {
    fn from(e: StageKindError) -> Self {
        PipelineError::Stage(e.to_string())
    }
}

/// Builds workers for the built-in stage kinds. Suitable as the
/// `WorkerFactory` of [`crate::pipeline::Pipeline::run_real`].
pub fn default_worker_factory(
    descriptor: &StageDescriptor,
    _worker_index: usize,
) -> Result<Box<dyn StageWorker>, PipelineError> {
    let kind = if descriptor.kind.is_empty() {
        descriptor.name.as_str()
    } else {
        descriptor.kind.as_str()
    };
    match kind {
        "detect" => Ok(Box::new(DetectWorker)),
        "align" => Ok(Box::new(AlignWorker::from_descriptor(descriptor)?)),
        "classify" => Ok(Box::new(ClassifyWorker)),
        "overlay" => Ok(Box::new(OverlayWorker::from_descriptor(descriptor))),
        "plugin" => Ok(Box::new(PluginWorker::from_descriptor(descriptor)?)),
        _ => Err(StageKindError::UnknownKind {
            stage: descriptor.name.clone(),
            kind: kind.to_string(),
        }
        .into()),
    }
}

fn str_param(descriptor: &StageDescriptor, key: &str) -> Option<String> {
    descriptor
        .params
        .get(key)
        .and_then(|v| v.as_str())
        .map(str::to_string)
}

fn u64_param(descriptor: &StageDescriptor, key: &str, default: u64) -> u64 {
    descriptor
        .params
        .get(key)
        .and_then(|v| v.as_u64())
        .unwrap_or(default)
}

/// Prerequisite payload with the given tag, if any.
fn prereq_with_tag<'a>(claim: &'a FrameClaim, tag: &str) -> Option<&'a ResultPayload> {
    claim
        .prereq_results
        .iter()
        .map(|(_, p)| p)
        .find(|p| p.tag == tag)
}

struct DetectWorker;

impl StageWorker for DetectWorker {
    fn process(
        &mut self,
        claim: &FrameClaim,
        _board: &ResultsBoard,
    ) -> Result<ResultPayload, StageFailure> {
        Ok(encode_faces(&heuristic_face_detector(&claim.image)))
    }
}

struct AlignWorker {
    template: LandmarkSet,
    template_size: u32,
    out_size: u32,
}

impl AlignWorker {
    fn from_descriptor(descriptor: &StageDescriptor) -> Result<Self, StageKindError> {
        let out_size = u64_param(descriptor, "out_size", 224) as u32;
        let (template, template_size) = match str_param(descriptor, "template") {
            Some(path) => {
                let template = LandmarkSet::load(Path::new(&path), DEFAULT_CONVENTION).map_err(
                    |e| StageKindError::BadParam {
                        stage: descriptor.name.clone(),
                        param: "template".into(),
                        message: e.to_string(),
                    },
                )?;
                let size = u64_param(descriptor, "template_size", out_size as u64) as u32;
                (template, size)
            }
            None => (builtin_template(), BUILTIN_TEMPLATE_SIZE),
        };
        Ok(Self {
            template,
            template_size,
            out_size,
        })
    }
}

impl StageWorker for AlignWorker {
    fn process(
        &mut self,
        claim: &FrameClaim,
        _board: &ResultsBoard,
    ) -> Result<ResultPayload, StageFailure> {
        // prefer landmarks riding on the source metadata, then a plugin
        // landmarker result, then synthesize from the first detected box
        let landmarks = if let Some(meta) = prereq_with_tag(claim, META_TAG) {
            parse_meta(meta)?.landmark_set()?
        } else {
            None
        };
        let landmarks = match landmarks {
            Some(lm) => lm,
            None => {
                if let Some(lm) = prereq_with_tag(claim, LANDMARKS_TAG) {
                    let text = lm
                        .as_text()
                        .ok_or_else(|| StageError::Payload("landmarks not UTF-8".into()))?;
                    LandmarkSet::parse(text, DEFAULT_CONVENTION).map_err(StageError::Geometry)?
                } else {
                    let faces = prereq_with_tag(claim, FACES_TAG)
                        .map(parse_faces)
                        .transpose()?
                        .unwrap_or_default();
                    let face = faces.first().ok_or(StageError::NoFace)?;
                    landmarks_from_box(face)
                }
            }
        };
        let aligned = align_face(
            &claim.image,
            &landmarks,
            &self.template,
            self.template_size,
            self.out_size,
        )?;
        Ok(encode_image(&aligned.image))
    }
}

struct ClassifyWorker;

impl StageWorker for ClassifyWorker {
    fn process(
        &mut self,
        claim: &FrameClaim,
        _board: &ResultsBoard,
    ) -> Result<ResultPayload, StageFailure> {
        let crop = prereq_with_tag(claim, IMAGE_TAG)
            .ok_or_else(|| StageError::MissingPrerequisite("aligned image".into()))?;
        let aligned = parse_image(crop)?;
        let score = stub_smile_classifier(&aligned)?;
        Ok(encode_smile(score.probability))
    }
}

struct OverlayWorker {
    detect_stage: String,
    classify_stage: String,
}

impl OverlayWorker {
    fn from_descriptor(descriptor: &StageDescriptor) -> Self {
        Self {
            detect_stage: str_param(descriptor, "detect_stage").unwrap_or_else(|| "detect".into()),
            classify_stage: str_param(descriptor, "classify_stage")
                .unwrap_or_else(|| "classify".into()),
        }
    }
}

impl StageWorker for OverlayWorker {
    fn process(
        &mut self,
        claim: &FrameClaim,
        board: &ResultsBoard,
    ) -> Result<ResultPayload, StageFailure> {
        // latest-available results, possibly from an earlier frame
        let face = match board.latest(&self.detect_stage) {
            Some((_, payload)) => parse_faces(&payload)?.first().copied(),
            None => None,
        };
        let smile = match board.latest(&self.classify_stage) {
            Some((_, payload)) => Some(parse_smile(&payload)?),
            None => None,
        };
        let annotated = render_overlay(&claim.image, face.as_ref(), smile);
        Ok(encode_image(&annotated))
    }
}

struct PluginWorker {
    client: PluginClient,
}

impl PluginWorker {
    fn from_descriptor(descriptor: &StageDescriptor) -> Result<Self, StageKindError> {
        let command = str_param(descriptor, "command").ok_or_else(|| StageKindError::BadParam {
            stage: descriptor.name.clone(),
            param: "command".into(),
            message: "plugin stages need a command".into(),
        })?;
        let args: Vec<String> = descriptor
            .params
            .get("args")
            .and_then(|v| v.as_array())
            .map(|a| {
                a.iter()
                    .filter_map(|v| v.as_str().map(str::to_string))
                    .collect()
            })
            .unwrap_or_default();
        let mut spec = PluginSpec::new(command, args);
        spec.timeout_ms = u64_param(descriptor, "timeout_ms", spec.timeout_ms);
        let client = PluginClient::spawn(&spec).map_err(|e| StageKindError::BadParam {
            stage: descriptor.name.clone(),
            param: "command".into(),
            message: e.to_string(),
        })?;
        Ok(Self { client })
    }
}

impl StageWorker for PluginWorker {
    fn process(
        &mut self,
        claim: &FrameClaim,
        _board: &ResultsBoard,
    ) -> Result<ResultPayload, StageFailure> {
        // classifier/landmarker plugins get the aligned crop when a
        // prerequisite provides one; detectors get the raw frame
        let image = match prereq_with_tag(claim, IMAGE_TAG) {
            Some(crop) => parse_image(crop)?,
            None => (*claim.image).clone(),
        };
        match self.client.request(claim.frame_id, &image)? {
            PluginResponse::Faces(faces) => Ok(encode_faces(&faces)),
            PluginResponse::Smile(p) => Ok(encode_smile(p)),
            PluginResponse::Landmarks(pts) => {
                let lm = LandmarkSet::new(pts, DEFAULT_CONVENTION).map_err(StageError::Geometry)?;
                Ok(ResultPayload::text(LANDMARKS_TAG, &lm.to_text()))
            }
        }
    }
}
