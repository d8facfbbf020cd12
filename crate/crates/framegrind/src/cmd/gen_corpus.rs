//! Synthetic corpus generation: labeled, landmarked face images with a
//! manifest, fully determined by (n, seed).

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::Point2;
use crate::stages::synthetic::{render_synthetic_face, SyntheticFace, SyntheticFaceParams};

use super::{write_file, CliError};

pub const CORPUS_IMAGE_SIZE: u32 = 128;

/// One generated corpus member.
pub struct CorpusFace {
    /// Base name without extension, e.g. `face_00042`.
    pub name: String,
    pub params: SyntheticFaceParams,
    pub face: SyntheticFace,
}

impl CorpusFace {
    pub fn image_file(&self) -> String {
        format!("{}.ppm", self.name)
    }

    pub fn landmark_file(&self) -> String {
        format!("{}.txt", self.name)
    }
}

/// Draws `n` faces with poses and expressions from a seeded generator.
/// The same (n, seed) always yields the same faces.
pub fn synthesize_corpus(n: usize, seed: u64) -> Vec<CorpusFace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = CORPUS_IMAGE_SIZE as f64 / 2.0;
    (0..n)
        .map(|i| {
            let params = SyntheticFaceParams {
                center: Point2::new(
                    half + rng.gen_range(-5.0..5.0),
                    half + rng.gen_range(-5.0..5.0),
                ),
                scale: rng.gen_range(22.0..30.0),
                rotation: rng.gen_range(-0.3..0.3),
                kappa: rng.gen_range(-1.0..1.0),
            };
            let face = render_synthetic_face(&params, CORPUS_IMAGE_SIZE, CORPUS_IMAGE_SIZE)
                .expect("generator poses always fit the canvas");
            CorpusFace {
                name: format!("face_{i:05}"),
                params,
                face,
            }
        })
        .collect()
}

/// Writes images (PPM), landmark files, `manifest.csv` and `params.csv`
/// into `out_dir`.
pub fn cmd_gen_corpus(n: usize, seed: u64, out_dir: &Path) -> Result<(), CliError> {
    if n == 0 {
        return Err(CliError::Usage("corpus size must be positive".into()));
    }
    std::fs::create_dir_all(out_dir)?;

    let mut manifest = String::from("path,label,landmarks\n");
    let mut params_csv = String::from("path,label,kappa,center_x,center_y,scale,rotation\n");
    for item in synthesize_corpus(n, seed) {
        let label = if item.params.label() { 1 } else { 0 };
        item.face
            .image
            .to_rgb()
            .save_pnm(&out_dir.join(item.image_file()))?;
        item.face
            .landmarks
            .save(&out_dir.join(item.landmark_file()))
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        manifest.push_str(&format!(
            "{},{},{}\n",
            item.image_file(),
            label,
            item.landmark_file()
        ));
        let p = &item.params;
        params_csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            item.image_file(),
            label,
            p.kappa,
            p.center.x,
            p.center.y,
            p.scale,
            p.rotation
        ));
    }
    write_file(&out_dir.join("manifest.csv"), &manifest)?;
    write_file(&out_dir.join("params.csv"), &params_csv)?;
    log::info!("wrote {n} faces to {}", out_dir.display());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_gives_identical_faces() {
        let a = synthesize_corpus(4, 9);
        let b = synthesize_corpus(4, 9);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.params, y.params);
            assert_eq!(x.face.image, y.face.image);
        }
    }

    #[test]
    fn labels_are_roughly_balanced() {
        let faces = synthesize_corpus(500, 1);
        let positives = faces.iter().filter(|f| f.params.label()).count();
        assert!(
            (225..=275).contains(&positives),
            "positives = {positives} of 500"
        );
    }
}
