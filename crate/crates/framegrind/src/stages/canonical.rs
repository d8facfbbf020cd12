//! Canonical synthetic face: the 68-landmark layout in unit coordinates and
//! the default alignment template derived from it.
//!
//! Unit coordinates are centered on the face, x rightwards, y downwards;
//! the head is an ellipse with semi-axes (1.0, 1.3). The mouth is a
//! quadratic arc through the corners whose midpoint drops (smile) or rises
//! (frown) with the signed curvature `kappa`.

use crate::geometry::{LandmarkSet, MirrorPairs, Point2, DEFAULT_CONVENTION};

pub const LANDMARK_COUNT: usize = 68;

pub const HEAD_AX: f64 = 1.0;
pub const HEAD_AY: f64 = 1.3;
pub const EYE_Y: f64 = -0.35;
pub const EYE_X: f64 = 0.42;
pub const EYE_R: f64 = 0.10;
pub const BROW_Y: f64 = -0.55;
pub const MOUTH_Y: f64 = 0.45;
pub const MOUTH_HALF_W: f64 = 0.5;
/// Midpoint vertical drop per unit of curvature.
pub const MOUTH_DROP: f64 = 0.25;
pub const MOUTH_THICKNESS: f64 = 0.05;

/// Quadratic arc through the mouth corners; `B(0.5).y = MOUTH_Y + MOUTH_DROP·kappa`.
pub fn mouth_arc(kappa: f64, half_w: f64, u: f64) -> Point2 {
    let p0 = Point2::new(-half_w, MOUTH_Y);
    let p2 = Point2::new(half_w, MOUTH_Y);
    let p1 = Point2::new(0.0, MOUTH_Y + 2.0 * MOUTH_DROP * kappa);
    let a = (1.0 - u) * (1.0 - u);
    let b = 2.0 * u * (1.0 - u);
    let c = u * u;
    Point2::new(
        a * p0.x + b * p1.x + c * p2.x,
        a * p0.y + b * p1.y + c * p2.y,
    )
}

/// All 68 landmarks of the canonical face with the given mouth curvature,
/// in unit coordinates.
pub fn canonical_landmarks(kappa: f64) -> Vec<Point2> {
    let mut pts = Vec::with_capacity(LANDMARK_COUNT);
    // 0-16 jawline along the lower head ellipse, left to right
    for i in 0..17 {
        let t = std::f64::consts::PI * (1.0 - i as f64 / 16.0);
        pts.push(Point2::new(HEAD_AX * t.cos(), HEAD_AY * t.sin()));
    }
    // 17-26 brows
    for i in 0..5 {
        pts.push(Point2::new(-0.65 + 0.125 * i as f64, BROW_Y));
    }
    for i in 0..5 {
        pts.push(Point2::new(0.15 + 0.125 * i as f64, BROW_Y));
    }
    // 27-30 nose bridge (midline)
    for i in 0..4 {
        pts.push(Point2::new(0.0, -0.35 + 0.15 * i as f64));
    }
    // 31-35 nose base
    for i in 0..5 {
        pts.push(Point2::new(-0.16 + 0.08 * i as f64, 0.22));
    }
    // 36-41 left eye hexagon (outer corner first, clockwise over the top)
    let eye = |cx: f64, order: &[(f64, f64)]| -> Vec<Point2> {
        order
            .iter()
            .map(|&(dx, dy)| Point2::new(cx + dx, EYE_Y + dy))
            .collect()
    };
    pts.extend(eye(
        -EYE_X,
        &[
            (-EYE_R, 0.0),
            (-0.04, -0.06),
            (0.04, -0.06),
            (EYE_R, 0.0),
            (0.04, 0.06),
            (-0.04, 0.06),
        ],
    ));
    // 42-47 right eye (inner corner first)
    pts.extend(eye(
        EYE_X,
        &[
            (-EYE_R, 0.0),
            (-0.04, -0.06),
            (0.04, -0.06),
            (EYE_R, 0.0),
            (0.04, 0.06),
            (-0.04, 0.06),
        ],
    ));
    // 48-59 outer lip: left corner, upper arc, right corner, lower arc back
    pts.push(mouth_arc(kappa, MOUTH_HALF_W, 0.0));
    for i in 1..=5 {
        let p = mouth_arc(kappa, MOUTH_HALF_W, i as f64 / 6.0);
        pts.push(Point2::new(p.x, p.y - 0.045));
    }
    pts.push(mouth_arc(kappa, MOUTH_HALF_W, 1.0));
    for i in (1..=5).rev() {
        let p = mouth_arc(kappa, MOUTH_HALF_W, i as f64 / 6.0);
        pts.push(Point2::new(p.x, p.y + 0.045));
    }
    // 60-67 inner lip on a slightly narrower arc
    let inner_w = 0.4;
    let inner = |u: f64| mouth_arc(kappa * 0.8, inner_w, u);
    pts.push(inner(0.0));
    for i in 1..=3 {
        let p = inner(i as f64 / 4.0);
        pts.push(Point2::new(p.x, p.y - 0.02));
    }
    pts.push(inner(1.0));
    for i in (1..=3).rev() {
        let p = inner(i as f64 / 4.0);
        pts.push(Point2::new(p.x, p.y + 0.02));
    }
    debug_assert_eq!(pts.len(), LANDMARK_COUNT);
    pts
}

/// Mirror-pair table for the 68-point convention (shipped as
/// `data/face68_mirror.txt`; this is the built-in copy).
pub const FACE68_MIRROR_TABLE: &str = include_str!("../../data/face68_mirror.txt");

pub fn face68_mirror_pairs() -> MirrorPairs {
    MirrorPairs::parse(FACE68_MIRROR_TABLE, LANDMARK_COUNT).expect("built-in table is valid")
}

/// Side length of the crop the built-in template file is expressed in.
pub const BUILTIN_TEMPLATE_SIZE: u32 = 224;

/// The default template as shipped in `data/face68_template.txt`.
pub fn builtin_template() -> LandmarkSet {
    LandmarkSet::parse(
        include_str!("../../data/face68_template.txt"),
        DEFAULT_CONVENTION,
    )
    .expect("built-in template is valid")
}

/// Default alignment template: the neutral (kappa = 0) canonical landmarks
/// placed in a `size`-by-`size` image. One unit spans `0.3125 * size`
/// pixels, so the whole head fits with margin.
pub fn default_template(size: u32) -> LandmarkSet {
    let unit = unit_scale(size);
    let c = (size as f64) / 2.0;
    let pts = canonical_landmarks(0.0)
        .into_iter()
        .map(|p| Point2::new(c + p.x * unit, c + p.y * unit))
        .collect();
    LandmarkSet::new(pts, DEFAULT_CONVENTION).expect("template is valid")
}

/// Pixels per unit coordinate in an aligned image of the given size.
pub fn unit_scale(size: u32) -> f64 {
    0.3125 * size as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::symmetrize_template;

    #[test]
    fn neutral_canonical_face_is_exactly_symmetric() {
        let template = default_template(224);
        let pairs = face68_mirror_pairs();
        let sym = symmetrize_template(&template, &pairs, 112.0).unwrap();
        for (a, b) in template.points.iter().zip(&sym.points) {
            assert!((a.x - b.x).abs() < 1e-9, "{a:?} vs {b:?}");
            assert!((a.y - b.y).abs() < 1e-9);
        }
    }

    #[test]
    fn mirror_table_fixed_points_sit_on_the_midline() {
        let pairs = face68_mirror_pairs();
        let pts = canonical_landmarks(0.3);
        for i in pairs.midline_indices() {
            assert!(pts[i].x.abs() < 1e-12, "landmark {i} off midline");
        }
    }

    #[test]
    fn shipped_template_file_matches_the_canonical_layout() {
        let shipped = builtin_template();
        let generated = default_template(BUILTIN_TEMPLATE_SIZE);
        assert_eq!(shipped.len(), generated.len());
        for (i, (a, b)) in shipped.points.iter().zip(&generated.points).enumerate() {
            assert!((a.x - b.x).abs() < 1e-9, "point {i}: {a:?} vs {b:?}");
            assert!((a.y - b.y).abs() < 1e-9, "point {i}: {a:?} vs {b:?}");
        }
    }

    #[test]
    fn smile_drops_the_mouth_midpoint() {
        let smile = canonical_landmarks(0.8);
        let frown = canonical_landmarks(-0.8);
        // landmark 51 is the upper-lip midpoint
        assert!(smile[51].y > frown[51].y);
    }
}
