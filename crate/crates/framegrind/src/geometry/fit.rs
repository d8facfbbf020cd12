use super::{GeometryError, LandmarkSet, Point2, SimilarityTransform};

/// Least-squares similarity fit between two point patterns.
///
/// Returns the global minimizer of `Σᵢ ‖s·R(θ)·pᵢ + t − qᵢ‖²` over `s > 0`,
/// `θ` and `t`, computed in closed form from the centered cross-covariance.
/// Reflections are not representable by the result type, so the linear part
/// always has positive determinant.
pub fn fit_similarity(
    src: &LandmarkSet,
    dst: &LandmarkSet,
) -> Result<SimilarityTransform, GeometryError> {
    if src.len() != dst.len() {
        return Err(GeometryError::LengthMismatch(src.len(), dst.len()));
    }
    let n = src.len() as f64;

    let centroid = |pts: &[Point2]| {
        let (sx, sy) = pts
            .iter()
            .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
        Point2::new(sx / n, sy / n)
    };
    let pc = centroid(&src.points);
    let qc = centroid(&dst.points);

    // centered cross-covariance terms and source spread
    let mut dot = 0.0; // Σ p·q
    let mut cross = 0.0; // Σ (p × q)
    let mut norm_p = 0.0; // Σ ‖p‖²
    for (p, q) in src.points.iter().zip(&dst.points) {
        let (px, py) = (p.x - pc.x, p.y - pc.y);
        let (qx, qy) = (q.x - qc.x, q.y - qc.y);
        dot += px * qx + py * qy;
        cross += px * qy - py * qx;
        norm_p += px * px + py * py;
    }

    if norm_p == 0.0 {
        return Err(GeometryError::DegenerateInput(
            "all source points coincide; scale is undefined".into(),
        ));
    }
    let magnitude = dot.hypot(cross);
    if magnitude == 0.0 {
        // dst collapses to a point: the infimum over s > 0 is not attained.
        return Err(GeometryError::DegenerateInput(
            "zero cross-covariance; optimal scale would be zero".into(),
        ));
    }

    let theta = cross.atan2(dot);
    let scale = magnitude / norm_p;
    // t = q̄ − s·R(θ)·p̄
    let rot = SimilarityTransform::new(scale, theta, Point2::new(0.0, 0.0));
    let rp = rot.apply(pc);
    Ok(SimilarityTransform::new(
        scale,
        theta,
        Point2::new(qc.x - rp.x, qc.y - rp.y),
    ))
}

/// Value of the similarity-fit objective `Σᵢ ‖T(pᵢ) − qᵢ‖²`.
pub fn fit_objective(t: &SimilarityTransform, src: &LandmarkSet, dst: &LandmarkSet) -> f64 {
    src.points
        .iter()
        .zip(&dst.points)
        .map(|(p, q)| {
            let m = t.apply(*p);
            let (dx, dy) = (m.x - q.x, m.y - q.y);
            dx * dx + dy * dy
        })
        .sum()
}
