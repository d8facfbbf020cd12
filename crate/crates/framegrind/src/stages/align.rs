//! Face alignment: similarity-fit the frame landmarks to the template and
//! warp the face into a fixed-size canonical crop.

use crate::geometry::{
    fit_similarity, warp_image, ImageBuffer, Interp, LandmarkSet, Point2, SimilarityTransform,
    DEFAULT_CONVENTION,
};

use super::canonical::{canonical_landmarks, HEAD_AX, HEAD_AY};
use super::{FaceBox, StageError};

/// Result of aligning one face.
#[derive(Debug, Clone)]
pub struct AlignedFace {
    pub image: ImageBuffer,
    /// The fitted map from source-image coordinates to crop coordinates.
    pub transform: SimilarityTransform,
}

/// Warps the face described by `landmarks` into an `out_size`-square crop.
///
/// `template` holds the target landmark positions for a crop of side
/// `template_size`; when `out_size` differs the template is rescaled
/// proportionally. Interpolation is bilinear, out-of-frame pixels are black.
pub fn align_face(
    img: &ImageBuffer,
    landmarks: &LandmarkSet,
    template: &LandmarkSet,
    template_size: u32,
    out_size: u32,
) -> Result<AlignedFace, StageError> {
    let target = scale_template(template, template_size, out_size)?;
    let transform = fit_similarity(landmarks, &target)?;
    let image = warp_image(img, &transform, out_size, out_size, Interp::Bilinear);
    Ok(AlignedFace { image, transform })
}

/// Rescales a template defined for one crop size to another.
pub fn scale_template(
    template: &LandmarkSet,
    template_size: u32,
    out_size: u32,
) -> Result<LandmarkSet, StageError> {
    if template_size == out_size {
        return Ok(template.clone());
    }
    let r = out_size as f64 / template_size as f64;
    let pts = template
        .points
        .iter()
        .map(|p| Point2::new(p.x * r, p.y * r))
        .collect();
    Ok(LandmarkSet::new(pts, template.convention.clone())?)
}

/// Synthesizes neutral landmarks for a face known only by its bounding box,
/// assuming an upright head whose ellipse fills the box. Used when no
/// landmark source (ground truth or plugin) is available.
pub fn landmarks_from_box(face: &FaceBox) -> LandmarkSet {
    let sx = face.w as f64 / (2.0 * HEAD_AX);
    let sy = face.h as f64 / (2.0 * HEAD_AY);
    let t = SimilarityTransform::new((sx + sy) / 2.0, 0.0, face.center());
    let pts = canonical_landmarks(0.0)
        .into_iter()
        .map(|p| t.apply(p))
        .collect();
    LandmarkSet::new(pts, DEFAULT_CONVENTION).expect("68 finite points")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stages::canonical::{default_template, face68_mirror_pairs};
    use crate::stages::synthetic::{render_synthetic_face, SyntheticFaceParams, MOUTH};

    #[test]
    fn aligned_face_is_pose_invariant_up_to_interpolation() {
        // the same face rendered at two poses must align to nearly the same
        // crop
        let template = default_template(224);
        let poses = [
            SyntheticFaceParams {
                center: Point2::new(64.0, 64.0),
                scale: 30.0,
                rotation: 0.0,
                kappa: 0.6,
            },
            SyntheticFaceParams {
                center: Point2::new(70.0, 58.0),
                scale: 24.0,
                rotation: 0.35,
                kappa: 0.6,
            },
        ];
        let crops: Vec<ImageBuffer> = poses
            .iter()
            .map(|p| {
                let face = render_synthetic_face(p, 128, 128).unwrap();
                align_face(&face.image, &face.landmarks, &template, 224, 224)
                    .unwrap()
                    .image
            })
            .collect();
        let mut diff_sum = 0u64;
        let mut count = 0u64;
        for y in 20..204u32 {
            for x in 20..204u32 {
                diff_sum +=
                    (crops[0].get(x, y, 0) as i64 - crops[1].get(x, y, 0) as i64).unsigned_abs();
                count += 1;
            }
        }
        let mean_diff = diff_sum as f64 / count as f64;
        assert!(mean_diff < 12.0, "mean abs diff {mean_diff}");
    }

    #[test]
    fn mouth_lands_where_the_template_says() {
        let template = default_template(224);
        let params = SyntheticFaceParams {
            center: Point2::new(64.0, 64.0),
            scale: 28.0,
            rotation: -0.25,
            kappa: 0.0,
        };
        let face = render_synthetic_face(&params, 128, 128).unwrap();
        let aligned = align_face(&face.image, &face.landmarks, &template, 224, 224).unwrap();
        // neutral mouth: template landmark 51 (upper-lip midpoint) must be
        // on or next to a mouth pixel
        let p = template.points[51];
        let mut found = false;
        for dy in -3i64..=3 {
            for dx in -3i64..=3 {
                let (x, y) = ((p.x.round() as i64 + dx) as u32, (p.y.round() as i64 + dy) as u32);
                if aligned.image.get(x, y, 0) <= MOUTH + 30 {
                    found = true;
                }
            }
        }
        assert!(found, "no mouth pixel near template landmark 51");
    }

    #[test]
    fn box_landmarks_line_up_with_ground_truth_for_upright_faces() {
        let params = SyntheticFaceParams {
            center: Point2::new(64.0, 64.0),
            scale: 26.0,
            rotation: 0.0,
            kappa: 0.0,
        };
        let face = render_synthetic_face(&params, 128, 128).unwrap();
        let synth = landmarks_from_box(&face.face_box);
        for (a, b) in synth.points.iter().zip(&face.landmarks.points) {
            assert!((a.x - b.x).abs() < 2.0 && (a.y - b.y).abs() < 2.0, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn rescaled_template_keeps_proportions() {
        let t224 = default_template(224);
        let t160 = scale_template(&t224, 224, 160).unwrap();
        let r = 160.0 / 224.0;
        for (a, b) in t224.points.iter().zip(&t160.points) {
            assert!((a.x * r - b.x).abs() < 1e-12);
            assert!((a.y * r - b.y).abs() < 1e-12);
        }
        // sanity: the mirror pairs stay valid for the rescaled set
        assert_eq!(face68_mirror_pairs().len(), t160.len());
    }
}
