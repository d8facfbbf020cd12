//! Concrete pipeline stages: synthetic face source, heuristic face
//! detector, landmark alignment, stub smile classifier, overlay sink and
//! the external-plugin adapter.
//!
//! Stage results travel through the queue as tagged byte payloads; the
//! encode/parse helpers in this module define the payload formats:
//! - `faces`: `FACES n` header plus one `x y w h` line per box
//! - `landmarks`: one `x y` line per point
//! - `image/pnm`: binary PGM/PPM bytes
//! - `smile`: decimal probability in `[0, 1]`
//! - `meta`: JSON with the source path, ground-truth label and optional
//!   ground-truth landmarks

pub mod align;
pub mod canonical;
pub mod classify;
pub mod detect;
mod font;
pub mod overlay;
pub mod plugin;
pub mod synthetic;
mod workers;

pub use align::{align_face, landmarks_from_box};
pub use classify::{stub_smile_classifier, SmileScore, CLASSIFIER_BIAS, CLASSIFIER_STEEPNESS};
pub use detect::heuristic_face_detector;
pub use overlay::render_overlay;
pub use plugin::{PluginClient, PluginResponse, PluginSpec, PLUGIN_PROTOCOL};
pub use synthetic::{render_synthetic_face, SyntheticFaceParams};
pub use workers::{default_worker_factory, StageKindError};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{GeometryError, LandmarkSet, Point2, DEFAULT_CONVENTION};

#[derive(Debug, Error)]
pub enum StageError {
    #[error("face does not fit in the canvas: {0}")]
    OutOfBounds(String),
    #[error("payload format error: {0}")]
    Payload(String),
    #[error("missing prerequisite result: {0}")]
    MissingPrerequisite(String),
    #[error("no face available for frame")]
    NoFace,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Axis-aligned face bounding box in pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceBox {
    pub x: i32,
    pub y: i32,
    pub w: i32,
    pub h: i32,
}

impl FaceBox {
    pub fn new(x: i32, y: i32, w: i32, h: i32) -> Self {
        debug_assert!(w > 0 && h > 0, "face box must have positive extent");
        Self { x, y, w, h }
    }

    pub fn area(&self) -> i64 {
        self.w as i64 * self.h as i64
    }

    pub fn center(&self) -> Point2 {
        Point2::new(
            self.x as f64 + self.w as f64 / 2.0,
            self.y as f64 + self.h as f64 / 2.0,
        )
    }

    /// Intersection-over-union overlap with another box.
    pub fn iou(&self, other: &FaceBox) -> f64 {
        let x0 = self.x.max(other.x);
        let y0 = self.y.max(other.y);
        let x1 = (self.x + self.w).min(other.x + other.w);
        let y1 = (self.y + self.h).min(other.y + other.h);
        if x1 <= x0 || y1 <= y0 {
            return 0.0;
        }
        let inter = (x1 - x0) as i64 * (y1 - y0) as i64;
        let union = self.area() + other.area() - inter;
        inter as f64 / union as f64
    }
}

/// Per-frame metadata the source stage publishes as its result payload.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SourceMeta {
    #[serde(default)]
    pub path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<bool>,
    /// Ground-truth landmarks in the "x y per line" text format.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub landmarks: Option<String>,
}

impl SourceMeta {
    pub fn landmark_set(&self) -> Result<Option<LandmarkSet>, StageError> {
        match &self.landmarks {
            None => Ok(None),
            Some(text) => Ok(Some(LandmarkSet::parse(text, DEFAULT_CONVENTION)?)),
        }
    }
}

pub const META_TAG: &str = "meta";
pub const FACES_TAG: &str = "faces";
pub const LANDMARKS_TAG: &str = "landmarks";
pub const IMAGE_TAG: &str = "image/pnm";
pub const SMILE_TAG: &str = "smile";

pub fn encode_meta(meta: &SourceMeta) -> crate::pipeline::ResultPayload {
    let json = serde_json::to_string(meta).expect("meta serializes");
    crate::pipeline::ResultPayload::text(META_TAG, &json)
}

pub fn parse_meta(payload: &crate::pipeline::ResultPayload) -> Result<SourceMeta, StageError> {
    let text = payload
        .as_text()
        .ok_or_else(|| StageError::Payload("meta payload is not UTF-8".into()))?;
    serde_json::from_str(text).map_err(|e| StageError::Payload(format!("meta JSON: {e}")))
}

/// `FACES n` header plus one `x y w h` line per box (also the wire format
/// of the detector plugin protocol).
pub fn encode_faces(faces: &[FaceBox]) -> crate::pipeline::ResultPayload {
    let mut text = format!("FACES {}\n", faces.len());
    for f in faces {
        text.push_str(&format!("{} {} {} {}\n", f.x, f.y, f.w, f.h));
    }
    crate::pipeline::ResultPayload::text(FACES_TAG, &text)
}

pub fn parse_faces(payload: &crate::pipeline::ResultPayload) -> Result<Vec<FaceBox>, StageError> {
    let text = payload
        .as_text()
        .ok_or_else(|| StageError::Payload("faces payload is not UTF-8".into()))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| StageError::Payload("empty faces payload".into()))?;
    let n: usize = header
        .strip_prefix("FACES ")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| StageError::Payload(format!("bad faces header {header:?}")))?;
    let mut faces = Vec::with_capacity(n);
    for _ in 0..n {
        let line = lines
            .next()
            .ok_or_else(|| StageError::Payload("truncated faces payload".into()))?;
        faces.push(parse_face_line(line)?);
    }
    Ok(faces)
}

pub fn parse_face_line(line: &str) -> Result<FaceBox, StageError> {
    let nums: Vec<i32> = line
        .split_whitespace()
        .map(|t| t.parse::<i32>())
        .collect::<Result<_, _>>()
        .map_err(|_| StageError::Payload(format!("bad face box line {line:?}")))?;
    match nums.as_slice() {
        [x, y, w, h] if *w > 0 && *h > 0 => Ok(FaceBox::new(*x, *y, *w, *h)),
        _ => Err(StageError::Payload(format!("bad face box line {line:?}"))),
    }
}

pub fn encode_smile(p: f64) -> crate::pipeline::ResultPayload {
    crate::pipeline::ResultPayload::text(SMILE_TAG, &format!("{p}"))
}

pub fn parse_smile(payload: &crate::pipeline::ResultPayload) -> Result<f64, StageError> {
    let text = payload
        .as_text()
        .ok_or_else(|| StageError::Payload("smile payload is not UTF-8".into()))?;
    let p: f64 = text
        .trim()
        .parse()
        .map_err(|_| StageError::Payload(format!("bad smile probability {text:?}")))?;
    if !(0.0..=1.0).contains(&p) {
        return Err(StageError::Payload(format!(
            "smile probability {p} outside [0, 1]"
        )));
    }
    Ok(p)
}

pub fn encode_image(img: &crate::geometry::ImageBuffer) -> crate::pipeline::ResultPayload {
    let mut bytes = Vec::new();
    img.write_pnm(&mut bytes).expect("in-memory write succeeds");
    crate::pipeline::ResultPayload::new(IMAGE_TAG, bytes)
}

pub fn parse_image(
    payload: &crate::pipeline::ResultPayload,
) -> Result<crate::geometry::ImageBuffer, StageError> {
    Ok(crate::geometry::ImageBuffer::read_pnm(
        &mut payload.bytes.as_slice(),
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iou_of_identical_boxes_is_one() {
        let b = FaceBox::new(10, 20, 30, 40);
        assert_eq!(b.iou(&b), 1.0);
    }

    #[test]
    fn iou_of_disjoint_boxes_is_zero() {
        let a = FaceBox::new(0, 0, 10, 10);
        let b = FaceBox::new(20, 0, 10, 10);
        assert_eq!(a.iou(&b), 0.0);
    }

    #[test]
    fn iou_half_overlap() {
        // two 10x10 boxes sharing a 5x10 strip: 50 / (100 + 100 - 50)
        let a = FaceBox::new(0, 0, 10, 10);
        let b = FaceBox::new(5, 0, 10, 10);
        assert!((a.iou(&b) - 50.0 / 150.0).abs() < 1e-12);
    }

    #[test]
    fn faces_payload_round_trip() {
        let faces = vec![FaceBox::new(1, 2, 3, 4), FaceBox::new(-5, 0, 7, 9)];
        let payload = encode_faces(&faces);
        assert_eq!(parse_faces(&payload).unwrap(), faces);
        assert_eq!(parse_faces(&encode_faces(&[])).unwrap(), vec![]);
    }

    #[test]
    fn smile_payload_round_trip_and_range_check() {
        let p = 0.8375;
        assert_eq!(parse_smile(&encode_smile(p)).unwrap(), p);
        let bad = crate::pipeline::ResultPayload::text(SMILE_TAG, "1.5");
        assert!(parse_smile(&bad).is_err());
    }

    #[test]
    fn meta_payload_round_trip() {
        let meta = SourceMeta {
            path: "a/b.pgm".into(),
            label: Some(true),
            landmarks: Some("1 2\n3 4\n".into()),
        };
        let back = parse_meta(&encode_meta(&meta)).unwrap();
        assert_eq!(back.path, meta.path);
        assert_eq!(back.label, meta.label);
        assert_eq!(back.landmark_set().unwrap().unwrap().len(), 2);
    }
}
