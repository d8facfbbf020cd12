//! Stub smile classifier: a fixed-coefficient logistic over one geometric
//! feature of the aligned crop.
//!
//! The aligned crop has known geometry (see [`super::canonical`]): the
//! mouth corners sit at fixed positions and only the mouth midpoint moves
//! with expression. The classifier scans the mouth region column by column
//! for the darkest row and scores how far the mouth center sags below the
//! corner line, normalized by mouth width. No training, no randomness: a
//! deterministic stand-in with real-classifier output shape.

use crate::geometry::ImageBuffer;

use super::canonical::{unit_scale, MOUTH_HALF_W, MOUTH_Y};
use super::StageError;

/// Logistic steepness on the normalized sag feature.
pub const CLASSIFIER_STEEPNESS: f64 = 16.0;
/// Logistic bias; zero puts the decision boundary at a straight mouth.
pub const CLASSIFIER_BIAS: f64 = 0.0;
/// Pixels at least this bright can not be mouth ink.
const MOUTH_MAX_INTENSITY: u8 = 70;

/// Smile probability plus the raw feature it was computed from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmileScore {
    /// Probability of "smiling", in `[0, 1]`.
    pub probability: f64,
    /// Normalized mouth-center sag; positive means smiling.
    pub feature: f64,
}

/// Scores an aligned square crop. Fails with [`StageError::NoFace`] when no
/// mouth ink is found where the template puts the mouth.
pub fn stub_smile_classifier(aligned: &ImageBuffer) -> Result<SmileScore, StageError> {
    let size = aligned.width().min(aligned.height());
    let unit = unit_scale(size);
    let c = size as f64 / 2.0;
    let corner_y = c + MOUTH_Y * unit;
    let mouth_w = 2.0 * MOUTH_HALF_W * unit;

    let x0 = (c - MOUTH_HALF_W * unit).round() as i64;
    let x1 = (c + MOUTH_HALF_W * unit).round() as i64;
    let y0 = ((corner_y - 0.35 * unit).floor() as i64).max(0);
    let y1 = ((corner_y + 0.35 * unit).ceil() as i64).min(aligned.height() as i64 - 1);

    // darkest row per column across the mouth window
    let ink_row = |x: i64| -> Option<f64> {
        if x < 0 || x >= aligned.width() as i64 {
            return None;
        }
        let mut best: Option<(u8, i64)> = None;
        for y in y0..=y1 {
            let v = aligned.get(x as u32, y as u32, 0);
            if v < MOUTH_MAX_INTENSITY && best.map_or(true, |(bv, _)| v < bv) {
                best = Some((v, y));
            }
        }
        best.map(|(_, y)| y as f64)
    };

    let band_mean = |lo: f64, hi: f64| -> Option<f64> {
        let (mut sum, mut n) = (0.0, 0usize);
        for x in lo.round() as i64..=hi.round() as i64 {
            if let Some(y) = ink_row(x) {
                sum += y;
                n += 1;
            }
        }
        (n > 0).then(|| sum / n as f64)
    };

    let center = band_mean(c - 0.10 * unit, c + 0.10 * unit).ok_or(StageError::NoFace)?;
    let left = band_mean(x0 as f64, x0 as f64 + 0.08 * unit).ok_or(StageError::NoFace)?;
    let right = band_mean(x1 as f64 - 0.08 * unit, x1 as f64).ok_or(StageError::NoFace)?;

    let feature = (center - (left + right) / 2.0) / mouth_w;
    let z = CLASSIFIER_STEEPNESS * feature + CLASSIFIER_BIAS;
    Ok(SmileScore {
        probability: 1.0 / (1.0 + (-z).exp()),
        feature,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;
    use crate::stages::align::align_face;
    use crate::stages::canonical::default_template;
    use crate::stages::synthetic::{render_synthetic_face, SyntheticFaceParams};

    fn score_for(kappa: f64, rotation: f64) -> f64 {
        let template = default_template(224);
        let params = SyntheticFaceParams {
            center: Point2::new(64.0, 64.0),
            scale: 28.0,
            rotation,
            kappa,
        };
        let face = render_synthetic_face(&params, 128, 128).unwrap();
        let aligned = align_face(&face.image, &face.landmarks, &template, 224, 224).unwrap();
        stub_smile_classifier(&aligned.image).unwrap().probability
    }

    #[test]
    fn neutral_mouth_scores_near_half() {
        let p = score_for(0.0, 0.0);
        assert!((p - 0.5).abs() < 0.08, "p = {p}");
    }

    #[test]
    fn clear_smile_and_frown_are_separated() {
        let smile = score_for(0.8, 0.1);
        let frown = score_for(-0.8, 0.1);
        assert!(smile > 0.85, "smile p = {smile}");
        assert!(frown < 0.15, "frown p = {frown}");
    }

    #[test]
    fn probability_is_monotone_in_curvature() {
        let ps: Vec<f64> = [-0.9, -0.5, 0.0, 0.5, 0.9]
            .iter()
            .map(|&k| score_for(k, -0.2))
            .collect();
        for w in ps.windows(2) {
            assert!(w[0] < w[1], "not monotone: {ps:?}");
        }
    }

    #[test]
    fn blank_crop_reports_no_face() {
        let blank = ImageBuffer::filled(224, 224, 1, 255);
        assert!(matches!(
            stub_smile_classifier(&blank),
            Err(StageError::NoFace)
        ));
    }
}
