//! `run`: execute the pipeline over a dataset manifest or a synthetic
//! stream, writing annotated frames, per-frame scores and the run report.

use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::sync::Arc;

use crate::geometry::ImageBuffer;
use crate::manifest::{DatasetManifest, ScoreRow};
use crate::pipeline::{
    create_pipeline, ClockMode, CompletionRecord, PipelineConfig, SourceFrame,
};
use crate::stages::{
    default_worker_factory, encode_meta, parse_image, parse_smile, SourceMeta, IMAGE_TAG,
    SMILE_TAG,
};

use super::gen_corpus::synthesize_corpus;
use super::{write_file, CliError};

/// Built-in reference pipeline: source → detect → align → classify, with an
/// overlay sink reading the latest results off the board. Used when no
/// config file is given.
pub const REFERENCE_CONFIG: &str = include_str!("../../data/reference_pipeline.json");

pub struct RunOptions {
    pub config: Option<PathBuf>,
    /// Dataset directory or manifest file (real-clock mode).
    pub input: Option<PathBuf>,
    /// Generate this many synthetic faces instead of reading a dataset.
    pub synthetic: Option<usize>,
    pub seed: u64,
    pub out: PathBuf,
    pub clock: Option<ClockMode>,
}

pub fn cmd_run(opts: &RunOptions) -> Result<(), CliError> {
    let mut config = match &opts.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::from_json(REFERENCE_CONFIG)?,
    };
    if let Some(mode) = opts.clock {
        config.clock.mode = mode;
    }
    std::fs::create_dir_all(&opts.out)?;

    match config.clock.mode {
        ClockMode::Sim => run_sim(&config, &opts.out),
        ClockMode::Real => run_real(&config, opts),
    }
}

/// Simulated clock: deterministic service-time run, no image data.
fn run_sim(config: &PipelineConfig, out: &Path) -> Result<(), CliError> {
    let pipeline = create_pipeline(config.clone())?;
    let report = pipeline.run_simulated()?;
    write_file(&out.join("report.json"), report.to_json())?;
    Ok(())
}

/// One source item plus the bookkeeping needed for output files.
struct InputFrame {
    image: Arc<ImageBuffer>,
    meta: SourceMeta,
}

fn load_inputs(opts: &RunOptions) -> Result<(Vec<InputFrame>, Vec<String>), CliError> {
    let mut frames = Vec::new();
    let mut unresolved = Vec::new();
    match (&opts.input, opts.synthetic) {
        (None, Some(n)) => {
            if n == 0 {
                return Err(CliError::Usage("synthetic frame count must be positive".into()));
            }
            for item in synthesize_corpus(n, opts.seed) {
                frames.push(InputFrame {
                    image: Arc::new(item.face.image.clone()),
                    meta: SourceMeta {
                        path: item.image_file(),
                        label: Some(item.params.label()),
                        landmarks: Some(item.face.landmarks.to_text()),
                    },
                });
            }
        }
        (Some(input), None) => {
            let manifest = DatasetManifest::load(input)?;
            for entry in &manifest.entries {
                let path_str = entry.path.display().to_string();
                let image = match ImageBuffer::load_pnm(&entry.path) {
                    Ok(img) => img,
                    Err(e) => {
                        // reported, never silently dropped
                        log::warn!("skipping {path_str}: {e}");
                        unresolved.push(format!("{path_str}: {e}"));
                        continue;
                    }
                };
                let landmarks = match &entry.landmarks {
                    Some(lm_path) => Some(std::fs::read_to_string(lm_path).map_err(|e| {
                        CliError::Usage(format!("landmark file {}: {e}", lm_path.display()))
                    })?),
                    None => None,
                };
                frames.push(InputFrame {
                    image: Arc::new(image),
                    meta: SourceMeta {
                        path: path_str,
                        label: entry.label,
                        landmarks,
                    },
                });
            }
        }
        _ => {
            return Err(CliError::Usage(
                "real-clock runs need exactly one of an input dataset or --synthetic N".into(),
            ))
        }
    }
    Ok((frames, unresolved))
}

/// Real clock: threaded run over actual images.
fn run_real(config: &PipelineConfig, opts: &RunOptions) -> Result<(), CliError> {
    let (inputs, unresolved) = load_inputs(opts)?;
    if inputs.is_empty() {
        return Err(CliError::Usage("no readable input frames".into()));
    }
    let frames_dir = opts.out.join("frames");
    std::fs::create_dir_all(&frames_dir)?;

    let pipeline = create_pipeline(config.clone())?;
    let (tap_tx, tap_rx) = mpsc::channel::<CompletionRecord>();

    // collector: persists annotated frames and gathers smile scores while
    // the pipeline runs
    let collector = std::thread::spawn(move || {
        let mut scores: Vec<(u64, f64)> = Vec::new();
        let mut io_errors: Vec<String> = Vec::new();
        for record in tap_rx {
            match record.payload.tag.as_str() {
                SMILE_TAG => {
                    if let Ok(p) = parse_smile(&record.payload) {
                        scores.push((record.frame_id, p));
                    }
                }
                IMAGE_TAG => {
                    let path = frames_dir.join(format!("frame_{:06}.ppm", record.frame_id));
                    let result = parse_image(&record.payload)
                        .map_err(|e| e.to_string())
                        .and_then(|img| img.save_pnm(&path).map_err(|e| e.to_string()));
                    if let Err(e) = result {
                        io_errors.push(format!("{}: {e}", path.display()));
                    }
                }
                _ => {}
            }
        }
        (scores, io_errors)
    });

    // frame ids are assigned sequentially from 1 in push order, so input
    // index i becomes frame id i + 1
    let source = inputs.iter().map(|f| SourceFrame {
        image: Arc::clone(&f.image),
        meta: encode_meta(&f.meta),
    });
    let report = pipeline.run_real(&default_worker_factory, source, Some(tap_tx))?;

    let (mut scores, io_errors) = collector.join().expect("collector thread never panics");
    if let Some(e) = io_errors.first() {
        return Err(CliError::Runtime(format!("failed to write frames: {e}")));
    }
    scores.sort_by_key(|&(id, _)| id);
    let rows: Vec<ScoreRow> = scores
        .iter()
        .filter_map(|&(id, score)| {
            inputs.get(id as usize - 1).map(|f| ScoreRow {
                path: f.meta.path.clone(),
                label: f.meta.label,
                score,
            })
        })
        .collect();

    write_file(
        &opts.out.join("scores.csv"),
        crate::manifest::write_scores_csv(&rows),
    )?;
    write_file(&opts.out.join("report.json"), report.to_json())?;
    if !unresolved.is_empty() {
        write_file(&opts.out.join("unresolved.txt"), unresolved.join("\n") + "\n")?;
    }
    log::info!(
        "run complete: {} frames pushed, {} scored, {} unresolved",
        report.frames_pushed,
        rows.len(),
        unresolved.len()
    );
    Ok(())
}
