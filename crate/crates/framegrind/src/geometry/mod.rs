//! Landmark geometry: similarity transforms, template symmetrization and
//! image warping.
//!
//! Everything in this module is a pure function over immutable inputs and is
//! safe to call from any number of worker threads.

mod fit;
mod image;
mod landmarks;
mod transform;
mod warp;

pub use fit::{fit_objective, fit_similarity};
pub use image::ImageBuffer;
pub use landmarks::{
    flip_landmarks, symmetrize_template, LandmarkSet, MirrorPairs, DEFAULT_CONVENTION,
};
pub use transform::{Point2, SimilarityTransform};
pub use warp::{Interp, warp_image};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("landmark sets have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("landmark set too small: need at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("invalid mirror pairs: {0}")]
    InvalidPairs(String),
    #[error("image format error: {0}")]
    ImageFormat(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
