use super::{ImageBuffer, Point2, SimilarityTransform};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interp {
    Nearest,
    Bilinear,
}

/// Inverse-mapping warp: every output pixel samples the input at
/// `t⁻¹(output coordinate)`. Out-of-bounds samples are black (0).
///
/// `t` maps input coordinates to output coordinates.
pub fn warp_image(
    img: &ImageBuffer,
    t: &SimilarityTransform,
    out_w: u32,
    out_h: u32,
    interp: Interp,
) -> ImageBuffer {
    let inv = t.inverse();
    let channels = img.channels();
    let mut out = ImageBuffer::new(out_w, out_h, channels);
    for oy in 0..out_h {
        for ox in 0..out_w {
            let src = inv.apply(Point2::new(ox as f64, oy as f64));
            for c in 0..channels {
                let v = match interp {
                    Interp::Nearest => sample_nearest(img, src.x, src.y, c),
                    Interp::Bilinear => sample_bilinear(img, src.x, src.y, c),
                };
                out.set(ox, oy, c, v);
            }
        }
    }
    out
}

fn sample_nearest(img: &ImageBuffer, x: f64, y: f64, c: u8) -> u8 {
    let xi = x.round() as i64;
    let yi = y.round() as i64;
    pixel_or_zero(img, xi, yi, c)
}

fn sample_bilinear(img: &ImageBuffer, x: f64, y: f64, c: u8) -> u8 {
    let x0 = x.floor();
    let y0 = y.floor();
    let fx = x - x0;
    let fy = y - y0;
    let (x0, y0) = (x0 as i64, y0 as i64);
    let v00 = pixel_or_zero(img, x0, y0, c) as f64;
    let v10 = pixel_or_zero(img, x0 + 1, y0, c) as f64;
    let v01 = pixel_or_zero(img, x0, y0 + 1, c) as f64;
    let v11 = pixel_or_zero(img, x0 + 1, y0 + 1, c) as f64;
    // lerp form keeps constant images exactly constant
    let top = v00 + fx * (v10 - v00);
    let bot = v01 + fx * (v11 - v01);
    let v = top + fy * (bot - top);
    v.round().clamp(0.0, 255.0) as u8
}

#[inline]
fn pixel_or_zero(img: &ImageBuffer, x: i64, y: i64, c: u8) -> u8 {
    if x < 0 || y < 0 || x >= img.width() as i64 || y >= img.height() as i64 {
        0
    } else {
        img.get(x as u32, y as u32, c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(w: u32, h: u32) -> ImageBuffer {
        let mut img = ImageBuffer::new(w, h, 1);
        for y in 0..h {
            for x in 0..w {
                img.set(x, y, 0, (7 * x + 13 * y + 1) as u8);
            }
        }
        img
    }

    #[test]
    fn identity_warp_is_bitwise_equal() {
        let img = ramp(9, 7);
        for interp in [Interp::Nearest, Interp::Bilinear] {
            let out = warp_image(&img, &SimilarityTransform::identity(), 9, 7, interp);
            assert_eq!(out, img);
        }
    }

    #[test]
    fn integer_translation_nearest_shifts_with_zero_fill() {
        let img = ramp(5, 4);
        let t = SimilarityTransform::new(1.0, 0.0, Point2::new(2.0, 1.0));
        let out = warp_image(&img, &t, 5, 4, Interp::Nearest);
        for y in 0..4u32 {
            for x in 0..5u32 {
                let expected = if x >= 2 && y >= 1 {
                    img.get(x - 2, y - 1, 0)
                } else {
                    0
                };
                assert_eq!(out.get(x, y, 0), expected, "pixel ({x}, {y})");
            }
        }
    }

    #[test]
    fn quarter_turn_matches_brute_force_permutation() {
        // 90° rotation about the center of a 3x3 asymmetric pattern.
        let mut img = ImageBuffer::new(3, 3, 1);
        let vals = [[10, 20, 30], [40, 50, 60], [70, 80, 90]];
        for (y, row) in vals.iter().enumerate() {
            for (x, &v) in row.iter().enumerate() {
                img.set(x as u32, y as u32, 0, v);
            }
        }
        // rotate about (1, 1): conjugate a pure rotation with center shifts
        let to_origin = SimilarityTransform::new(1.0, 0.0, Point2::new(-1.0, -1.0));
        let rot = SimilarityTransform::new(1.0, std::f64::consts::FRAC_PI_2, Point2::new(0.0, 0.0));
        let back = SimilarityTransform::new(1.0, 0.0, Point2::new(1.0, 1.0));
        let t = back.compose(&rot.compose(&to_origin));
        let out = warp_image(&img, &t, 3, 3, Interp::Nearest);

        // independent oracle: per-pixel inverse mapping on integer coordinates
        for oy in 0..3i64 {
            for ox in 0..3i64 {
                // inverse of a +90° rotation about (1,1): (x,y) -> (y, 2-x)
                let sx = oy;
                let sy = 2 - ox;
                let expected = img.get(sx as u32, sy as u32, 0);
                assert_eq!(out.get(ox as u32, oy as u32, 0), expected);
            }
        }
    }

    #[test]
    fn bilinear_constant_image_stays_constant() {
        let img = ImageBuffer::filled(16, 16, 3, 137);
        let t = SimilarityTransform::new(1.3, 0.41, Point2::new(2.2, -0.7));
        let out = warp_image(&img, &t, 16, 16, Interp::Bilinear);
        // interior samples must stay exactly 137; only zero-filled borders differ
        let inv = t.inverse();
        for y in 0..16u32 {
            for x in 0..16u32 {
                let p = inv.apply(Point2::new(x as f64, y as f64));
                if p.x >= 0.0 && p.y >= 0.0 && p.x <= 14.0 && p.y <= 14.0 {
                    assert_eq!(out.get(x, y, 0), 137);
                }
            }
        }
    }
}
