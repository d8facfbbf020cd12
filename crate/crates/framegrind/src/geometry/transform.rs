use serde::{Deserialize, Serialize};

/// 2-D point in pixel coordinates. Origin is the top-left corner, x grows
/// rightwards and y grows downwards.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Scale + rotation + translation map (no shear, no reflection).
///
/// Matrix form `[[a, -b, tx], [b, a, ty]]` with `a = s·cosθ`, `b = s·sinθ`.
/// The determinant of the linear part is `s² > 0`, so a reflection can never
/// be represented.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityTransform {
    pub scale: f64,
    pub rotation: f64,
    pub translation: Point2,
}

impl SimilarityTransform {
    pub fn new(scale: f64, rotation: f64, translation: Point2) -> Self {
        debug_assert!(scale > 0.0, "similarity scale must be positive");
        Self {
            scale,
            rotation,
            translation,
        }
    }

    pub fn identity() -> Self {
        Self::new(1.0, 0.0, Point2::new(0.0, 0.0))
    }

    /// Linear part coefficients `(a, b)` with `a = s·cosθ`, `b = s·sinθ`.
    pub fn coefficients(&self) -> (f64, f64) {
        (
            self.scale * self.rotation.cos(),
            self.scale * self.rotation.sin(),
        )
    }

    pub fn apply(&self, p: Point2) -> Point2 {
        let (a, b) = self.coefficients();
        Point2::new(
            a * p.x - b * p.y + self.translation.x,
            b * p.x + a * p.y + self.translation.y,
        )
    }

    /// Inverse map; always exists since `scale > 0`.
    pub fn inverse(&self) -> Self {
        let inv = Self::new(1.0 / self.scale, -self.rotation, Point2::new(0.0, 0.0));
        let t = inv.apply(self.translation);
        Self::new(inv.scale, inv.rotation, Point2::new(-t.x, -t.y))
    }

    /// Composition `self ∘ other`: applies `other` first, then `self`.
    pub fn compose(&self, other: &Self) -> Self {
        Self::new(
            self.scale * other.scale,
            self.rotation + other.rotation,
            self.apply(other.translation),
        )
    }

    pub fn det_linear(&self) -> f64 {
        let (a, b) = self.coefficients();
        a * a + b * b
    }
}
