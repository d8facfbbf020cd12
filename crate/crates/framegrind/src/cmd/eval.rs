//! `eval`: classification metrics (ACC at a threshold, AUC) over a scores
//! file, or over scores produced live by a classifier plugin.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::geometry::{ImageBuffer, LandmarkSet, DEFAULT_CONVENTION};
use crate::manifest::{parse_scores_csv, write_scores_csv, DatasetManifest, ScoreRow};
use crate::metrics::{accuracy, auc, confusion, LabeledScore, MetricsError};
use crate::stages::canonical::{builtin_template, BUILTIN_TEMPLATE_SIZE};
use crate::stages::{
    align_face, heuristic_face_detector, landmarks_from_box, PluginClient, PluginResponse,
    PluginSpec, StageError,
};

use super::{write_file, CliError};

pub struct EvalOptions {
    /// Manifest for labels (and for images in plugin mode).
    pub manifest: Option<PathBuf>,
    /// Pre-computed `path,label,score` file.
    pub scores: Option<PathBuf>,
    /// Classifier plugin command line to score the manifest images with.
    pub plugin: Option<Vec<String>>,
    pub threshold: f64,
    pub out: PathBuf,
    pub format: String,
}

/// The persisted metrics report. Key order is fixed by field order.
#[derive(Debug, Serialize)]
pub struct EvalReport {
    pub samples: usize,
    pub positives: usize,
    pub negatives: usize,
    pub threshold: f64,
    pub accuracy: f64,
    pub auc: f64,
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

pub fn cmd_eval(opts: &EvalOptions) -> Result<(), CliError> {
    let rows = match (&opts.scores, &opts.plugin) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            let mut rows = parse_scores_csv(&text)?;
            fill_labels_from_manifest(&mut rows, opts.manifest.as_deref())?;
            rows
        }
        (None, Some(plugin)) => {
            let manifest_path = opts.manifest.as_deref().ok_or_else(|| {
                CliError::Usage("plugin evaluation needs a dataset manifest".into())
            })?;
            score_with_plugin(manifest_path, plugin)?
        }
        _ => {
            return Err(CliError::Usage(
                "eval needs exactly one of --scores FILE or --plugin CMD".into(),
            ))
        }
    };

    let samples: Vec<LabeledScore> = rows
        .iter()
        .filter_map(|r| {
            r.label.map(|label| LabeledScore {
                label,
                score: r.score,
            })
        })
        .collect();
    if samples.len() < rows.len() {
        return Err(CliError::Usage(format!(
            "{} of {} rows have no ground-truth label",
            rows.len() - samples.len(),
            rows.len()
        )));
    }
    if samples.is_empty() {
        return Err(CliError::from(MetricsError::EmptyInput));
    }

    let labels: Vec<bool> = samples.iter().map(|s| s.label).collect();
    let decisions: Vec<bool> = samples.iter().map(|s| s.score >= opts.threshold).collect();
    let counts = confusion(&labels, &decisions)?;
    let report = EvalReport {
        samples: samples.len(),
        positives: labels.iter().filter(|&&l| l).count(),
        negatives: labels.iter().filter(|&&l| !l).count(),
        threshold: opts.threshold,
        accuracy: accuracy(&labels, &decisions)?,
        auc: auc(&samples)?,
        tp: counts.tp,
        tn: counts.tn,
        fp: counts.fp,
        fn_: counts.fn_,
    };

    let json = {
        let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
        s.push('\n');
        s
    };
    std::fs::create_dir_all(&opts.out)?;
    write_file(&opts.out.join("metrics.json"), &json)?;
    if opts.plugin.is_some() {
        write_file(&opts.out.join("scores.csv"), write_scores_csv(&rows))?;
    }
    if opts.format == "csv" {
        println!("accuracy,auc,samples\n{},{},{}", report.accuracy, report.auc, report.samples);
    } else {
        print!("{json}");
    }
    Ok(())
}

/// Joins missing labels onto score rows by exact path match.
fn fill_labels_from_manifest(
    rows: &mut [ScoreRow],
    manifest: Option<&Path>,
) -> Result<(), CliError> {
    let Some(path) = manifest else {
        return Ok(());
    };
    let manifest = DatasetManifest::load(path)?;
    for row in rows.iter_mut().filter(|r| r.label.is_none()) {
        if let Some(entry) = manifest
            .entries
            .iter()
            .find(|e| e.path.display().to_string() == row.path || e.path.ends_with(&row.path))
        {
            row.label = entry.label;
        }
    }
    Ok(())
}

/// Detect + align each manifest image, then ask a classifier plugin for
/// the smile score.
fn score_with_plugin(manifest_path: &Path, plugin: &[String]) -> Result<Vec<ScoreRow>, CliError> {
    let manifest = DatasetManifest::load(manifest_path)?;
    let (command, args) = plugin
        .split_first()
        .ok_or_else(|| CliError::Usage("empty plugin command".into()))?;
    let mut client = PluginClient::spawn(&PluginSpec::new(command.clone(), args.to_vec()))
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let template = builtin_template();

    let mut rows = Vec::new();
    for (i, entry) in manifest.entries.iter().enumerate() {
        let image = ImageBuffer::load_pnm(&entry.path)
            .map_err(|e| CliError::Usage(format!("{}: {e}", entry.path.display())))?;
        let landmarks = match &entry.landmarks {
            Some(lm) => LandmarkSet::load(lm, DEFAULT_CONVENTION)
                .map_err(|e| CliError::Usage(format!("{}: {e}", lm.display())))?,
            None => {
                let faces = heuristic_face_detector(&image);
                let face = faces.first().ok_or_else(|| {
                    CliError::Runtime(StageError::NoFace.to_string())
                })?;
                landmarks_from_box(face)
            }
        };
        let aligned = align_face(
            &image,
            &landmarks,
            &template,
            BUILTIN_TEMPLATE_SIZE,
            BUILTIN_TEMPLATE_SIZE,
        )
        .map_err(|e| CliError::Runtime(e.to_string()))?;
        let score = match client
            .request(i as u64 + 1, &aligned.image)
            .map_err(|e| CliError::Runtime(e.to_string()))?
        {
            PluginResponse::Smile(p) => p,
            other => {
                return Err(CliError::Runtime(format!(
                    "plugin is not a classifier (got {other:?})"
                )))
            }
        };
        rows.push(ScoreRow {
            path: entry.path.display().to_string(),
            label: entry.label,
            score,
        });
    }
    Ok(rows)
}
