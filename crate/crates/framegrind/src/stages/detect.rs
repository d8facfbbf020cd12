//! Heuristic face detector: intensity threshold, connected components and
//! shape filters. Tuned for the schematic synthetic faces (dark head on a
//! light background) — it is the stand-in for a real detector and keeps the
//! pipeline self-contained.

use crate::geometry::ImageBuffer;

use super::FaceBox;

/// Pixels darker than this count as foreground.
pub const FOREGROUND_THRESHOLD: u8 = 180;
/// Components smaller than this many pixels are noise.
pub const MIN_COMPONENT_AREA: usize = 60;
/// Accepted height/width range of a face component's bounding box.
pub const ASPECT_RANGE: (f64, f64) = (0.7, 2.6);
/// Minimum fraction of the bounding box a component must fill (an ellipse
/// fills ~0.785 of its box).
pub const MIN_FILL: f64 = 0.45;

/// Finds face-like dark blobs. Returns boxes sorted by x then y, so the
/// output order is deterministic.
pub fn heuristic_face_detector(img: &ImageBuffer) -> Vec<FaceBox> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let mut visited = vec![false; w * h];
    let mut faces = Vec::new();
    let mut stack: Vec<(usize, usize)> = Vec::new();

    for sy in 0..h {
        for sx in 0..w {
            if visited[sy * w + sx] || img.gray(sx as u32, sy as u32) >= FOREGROUND_THRESHOLD {
                continue;
            }
            // flood-fill one 4-connected component
            let (mut x0, mut y0, mut x1, mut y1) = (sx, sy, sx, sy);
            let mut area = 0usize;
            visited[sy * w + sx] = true;
            stack.push((sx, sy));
            while let Some((x, y)) = stack.pop() {
                area += 1;
                x0 = x0.min(x);
                y0 = y0.min(y);
                x1 = x1.max(x);
                y1 = y1.max(y);
                let mut try_push = |nx: usize, ny: usize| {
                    let idx = ny * w + nx;
                    if !visited[idx] && img.gray(nx as u32, ny as u32) < FOREGROUND_THRESHOLD {
                        visited[idx] = true;
                        stack.push((nx, ny));
                    }
                };
                if x > 0 {
                    try_push(x - 1, y);
                }
                if x + 1 < w {
                    try_push(x + 1, y);
                }
                if y > 0 {
                    try_push(x, y - 1);
                }
                if y + 1 < h {
                    try_push(x, y + 1);
                }
            }

            let (bw, bh) = (x1 - x0 + 1, y1 - y0 + 1);
            let aspect = bh as f64 / bw as f64;
            let fill = area as f64 / (bw * bh) as f64;
            if area >= MIN_COMPONENT_AREA
                && (ASPECT_RANGE.0..=ASPECT_RANGE.1).contains(&aspect)
                && fill >= MIN_FILL
            {
                faces.push(FaceBox::new(x0 as i32, y0 as i32, bw as i32, bh as i32));
            }
        }
    }

    faces.sort_by_key(|f| (f.x, f.y));
    faces
}
