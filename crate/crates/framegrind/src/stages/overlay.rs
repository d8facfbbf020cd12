//! Overlay sink: annotates a frame with the newest available detection box
//! and smile verdict. Results may be one or two frames stale by design —
//! the display stage never waits for slow stages.

use crate::geometry::ImageBuffer;

use super::font::{glyph, ADVANCE, GLYPH_H, GLYPH_W};
use super::FaceBox;

pub const BOX_COLOR: [u8; 3] = [230, 40, 40];
pub const TEXT_COLOR: [u8; 3] = [20, 120, 230];
const BORDER: i64 = 2;

/// Human-readable verdict for a smile probability: the winning class plus
/// its confidence, e.g. "SMILE 92%" or "NO-SMILE 63%".
pub fn verdict_label(p: f64) -> String {
    let class = if p >= 0.5 { "SMILE" } else { "NO-SMILE" };
    let confidence = (100.0 * p.max(1.0 - p)).round() as u32;
    format!("{class} {confidence}%")
}

/// Draws box and verdict onto a copy of the frame. Passing `None` for a
/// result that has not been produced yet draws the "…" placeholder instead.
pub fn render_overlay(
    frame: &ImageBuffer,
    face: Option<&FaceBox>,
    smile: Option<f64>,
) -> ImageBuffer {
    let mut out = frame.to_rgb();
    if let Some(face) = face {
        draw_rect(&mut out, face, BOX_COLOR);
    }
    let label = match smile {
        Some(p) => verdict_label(p),
        None => "…".to_string(),
    };
    // label above the box when there is one (and room), else in the corner
    let (tx, ty) = match face {
        Some(f) if f.y as i64 - (GLYPH_H as i64 + 2) >= 0 => {
            (f.x as i64, f.y as i64 - GLYPH_H as i64 - 2)
        }
        Some(f) => (f.x as i64, f.y as i64 + BORDER + 1),
        None => (2, 2),
    };
    draw_text(&mut out, tx, ty, &label, TEXT_COLOR);
    out
}

fn put_rgb(img: &mut ImageBuffer, x: i64, y: i64, color: [u8; 3]) {
    if x < 0 || y < 0 || x >= img.width() as i64 || y >= img.height() as i64 {
        return;
    }
    for (c, &v) in color.iter().enumerate() {
        img.set(x as u32, y as u32, c as u8, v);
    }
}

fn draw_rect(img: &mut ImageBuffer, b: &FaceBox, color: [u8; 3]) {
    let (x0, y0) = (b.x as i64, b.y as i64);
    let (x1, y1) = (x0 + b.w as i64 - 1, y0 + b.h as i64 - 1);
    for t in 0..BORDER {
        for x in x0..=x1 {
            put_rgb(img, x, y0 + t, color);
            put_rgb(img, x, y1 - t, color);
        }
        for y in y0..=y1 {
            put_rgb(img, x0 + t, y, color);
            put_rgb(img, x1 - t, y, color);
        }
    }
}

pub fn draw_text(img: &mut ImageBuffer, x: i64, y: i64, text: &str, color: [u8; 3]) {
    let mut cx = x;
    for ch in text.chars() {
        if ch != ' ' {
            let g = glyph(ch);
            for (row, bits) in g.iter().enumerate() {
                for col in 0..GLYPH_W {
                    if bits >> (GLYPH_W - 1 - col) & 1 == 1 {
                        put_rgb(img, cx + col as i64, y + row as i64, color);
                    }
                }
            }
        }
        cx += ADVANCE as i64;
    }
}
