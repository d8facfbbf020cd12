//! Synthetic face renderer: deterministic schematic faces with a known
//! pose, known landmarks and a known smile label.
//!
//! A face is the canonical unit-coordinate face (see [`super::canonical`])
//! placed into the canvas by a similarity transform. Rendering walks every
//! output pixel, maps it back to canonical coordinates and classifies it
//! against the analytic feature shapes, so the same parameters always
//! produce bit-identical images.

use crate::geometry::{
    ImageBuffer, LandmarkSet, Point2, SimilarityTransform, DEFAULT_CONVENTION,
};

use super::canonical::{
    canonical_landmarks, mouth_arc, BROW_Y, EYE_R, EYE_X, EYE_Y, HEAD_AX, HEAD_AY,
    MOUTH_HALF_W, MOUTH_THICKNESS,
};
use super::{FaceBox, StageError};

pub const BACKGROUND: u8 = 235;
pub const HEAD: u8 = 110;
pub const BROW: u8 = 80;
pub const EYE: u8 = 40;
pub const MOUTH: u8 = 30;

/// Pose and expression of one synthetic face. Rendering is a pure function
/// of these fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticFaceParams {
    /// Face center in pixel coordinates.
    pub center: Point2,
    /// Pixels per canonical unit (half the head width).
    pub scale: f64,
    /// In-plane rotation in radians.
    pub rotation: f64,
    /// Signed mouth curvature; positive is a smile, zero a straight mouth.
    pub kappa: f64,
}

impl SyntheticFaceParams {
    /// Ground-truth smile label: the mouth corners curve upward.
    pub fn label(&self) -> bool {
        self.kappa > 0.0
    }

    /// Map from canonical unit coordinates to pixel coordinates.
    pub fn face_transform(&self) -> SimilarityTransform {
        SimilarityTransform::new(self.scale, self.rotation, self.center)
    }

    /// Tight axis-aligned bounding box of the (rotated) head ellipse.
    pub fn head_box(&self) -> FaceBox {
        let (c, s) = (self.rotation.cos(), self.rotation.sin());
        let ex = self.scale * (HEAD_AX * c).hypot(HEAD_AY * s);
        let ey = self.scale * (HEAD_AX * s).hypot(HEAD_AY * c);
        let x0 = (self.center.x - ex).floor() as i32;
        let y0 = (self.center.y - ey).floor() as i32;
        let x1 = (self.center.x + ex).ceil() as i32;
        let y1 = (self.center.y + ey).ceil() as i32;
        FaceBox::new(x0, y0, x1 - x0, y1 - y0)
    }

    /// The 68 ground-truth landmarks in pixel coordinates.
    pub fn landmarks(&self) -> LandmarkSet {
        let t = self.face_transform();
        let pts = canonical_landmarks(self.kappa)
            .into_iter()
            .map(|p| t.apply(p))
            .collect();
        LandmarkSet::new(pts, DEFAULT_CONVENTION).expect("68 finite points")
    }
}

/// Rendered face: image plus the ground truth that goes with it.
#[derive(Debug, Clone)]
pub struct SyntheticFace {
    pub image: ImageBuffer,
    pub landmarks: LandmarkSet,
    pub face_box: FaceBox,
}

/// Renders one face into a fresh gray canvas. Fails if the head box does
/// not fit fully inside the canvas.
pub fn render_synthetic_face(
    params: &SyntheticFaceParams,
    width: u32,
    height: u32,
) -> Result<SyntheticFace, StageError> {
    let face_box = params.head_box();
    if face_box.x < 0
        || face_box.y < 0
        || face_box.x + face_box.w > width as i32
        || face_box.y + face_box.h > height as i32
    {
        return Err(StageError::OutOfBounds(format!(
            "head box {face_box:?} exceeds {width}x{height} canvas"
        )));
    }

    // mouth centerline, sampled once as a polyline in canonical coordinates
    let mouth: Vec<Point2> = (0..=48)
        .map(|i| mouth_arc(params.kappa, MOUTH_HALF_W, i as f64 / 48.0))
        .collect();
    let mouth_y_min = mouth.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
    let mouth_y_max = mouth.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);

    let inv = params.face_transform().inverse();
    let mut image = ImageBuffer::filled(width, height, 1, BACKGROUND);
    for py in 0..height {
        for px in 0..width {
            let c = inv.apply(Point2::new(px as f64, py as f64));
            let v = shade(c, &mouth, mouth_y_min, mouth_y_max);
            if v != BACKGROUND {
                image.set(px, py, 0, v);
            }
        }
    }

    Ok(SyntheticFace {
        image,
        landmarks: params.landmarks(),
        face_box,
    })
}

/// Intensity of one canonical-coordinate point.
fn shade(c: Point2, mouth: &[Point2], mouth_y_min: f64, mouth_y_max: f64) -> u8 {
    let e = (c.x / HEAD_AX).powi(2) + (c.y / HEAD_AY).powi(2);
    if e > 1.0 {
        return BACKGROUND;
    }
    // eyes
    let dl = (c.x + EYE_X).hypot(c.y - EYE_Y);
    let dr = (c.x - EYE_X).hypot(c.y - EYE_Y);
    if dl <= EYE_R || dr <= EYE_R {
        return EYE;
    }
    // brows
    if (c.y - BROW_Y).abs() <= 0.025 && (0.15..=0.65).contains(&c.x.abs()) {
        return BROW;
    }
    // mouth: within MOUTH_THICKNESS of the centerline polyline
    if c.x.abs() <= MOUTH_HALF_W + MOUTH_THICKNESS
        && c.y >= mouth_y_min - MOUTH_THICKNESS
        && c.y <= mouth_y_max + MOUTH_THICKNESS
        && dist_to_polyline(c, mouth) <= MOUTH_THICKNESS
    {
        return MOUTH;
    }
    HEAD
}

fn dist_to_polyline(p: Point2, poly: &[Point2]) -> f64 {
    let mut best = f64::INFINITY;
    for seg in poly.windows(2) {
        best = best.min(dist_to_segment(p, seg[0], seg[1]));
    }
    best
}

fn dist_to_segment(p: Point2, a: Point2, b: Point2) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0)
    };
    (p.x - (a.x + t * dx)).hypot(p.y - (a.y + t * dy))
}
