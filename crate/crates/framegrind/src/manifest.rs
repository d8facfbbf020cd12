//! Dataset manifests and score files.
//!
//! A manifest is a small CSV with one image per row:
//! `path,label[,landmarks]` — `path` is the image (PGM/PPM), `label` is
//! `1`/`0`/empty, `landmarks` an optional landmark text file. Paths are
//! relative to the manifest's directory. Fields never contain commas, so no
//! quoting is needed. A `path,label,...` header row is accepted and
//! skipped.
//!
//! Score files are `path,label,score` rows produced by a run and consumed
//! by the evaluator.

use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("manifest line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("manifest is empty")]
    Empty,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    /// Image path, resolved against the manifest directory.
    pub path: PathBuf,
    pub label: Option<bool>,
    /// Optional ground-truth landmark file, resolved like `path`.
    pub landmarks: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct DatasetManifest {
    pub entries: Vec<ManifestEntry>,
}

impl DatasetManifest {
    /// Parses manifest text; relative paths are resolved against `root`.
    pub fn parse(text: &str, root: &Path) -> Result<Self, ManifestError> {
        let mut entries = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if lineno == 0 && line.starts_with("path,") {
                continue; // header row
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() < 2 || fields.len() > 3 {
                return Err(ManifestError::Parse {
                    line: lineno + 1,
                    message: format!("expected path,label[,landmarks], got {line:?}"),
                });
            }
            let label = match fields[1] {
                "" => None,
                "0" => Some(false),
                "1" => Some(true),
                other => {
                    return Err(ManifestError::Parse {
                        line: lineno + 1,
                        message: format!("label must be 0, 1 or empty, got {other:?}"),
                    })
                }
            };
            let landmarks = fields
                .get(2)
                .filter(|s| !s.is_empty())
                .map(|s| root.join(s));
            entries.push(ManifestEntry {
                path: root.join(fields[0]),
                label,
                landmarks,
            });
        }
        if entries.is_empty() {
            return Err(ManifestError::Empty);
        }
        Ok(Self { entries })
    }

    /// Loads a manifest file. A directory argument means
    /// `<dir>/manifest.csv`.
    pub fn load(path: &Path) -> Result<Self, ManifestError> {
        let file = if path.is_dir() {
            path.join("manifest.csv")
        } else {
            path.to_path_buf()
        };
        let root = file.parent().unwrap_or(Path::new(".")).to_path_buf();
        Self::parse(&std::fs::read_to_string(&file)?, &root)
    }

    /// Entries whose image file does not exist. They stay in `entries` —
    /// the caller decides whether a missing file is fatal.
    pub fn missing_files(&self) -> Vec<&ManifestEntry> {
        self.entries.iter().filter(|e| !e.path.exists()).collect()
    }
}

/// One scored frame of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub path: String,
    pub label: Option<bool>,
    pub score: f64,
}

pub fn write_scores_csv(rows: &[ScoreRow]) -> String {
    let mut out = String::from("path,label,score\n");
    for r in rows {
        let label = match r.label {
            Some(true) => "1",
            Some(false) => "0",
            None => "",
        };
        out.push_str(&format!("{},{},{}\n", r.path, label, r.score));
    }
    out
}

pub fn parse_scores_csv(text: &str) -> Result<Vec<ScoreRow>, ManifestError> {
    let mut rows = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || (lineno == 0 && line.starts_with("path,")) {
            continue;
        }
        let parse_err = |message: String| ManifestError::Parse {
            line: lineno + 1,
            message,
        };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(parse_err(format!("expected path,label,score, got {line:?}")));
        }
        let label = match fields[1] {
            "" => None,
            "0" => Some(false),
            "1" => Some(true),
            other => return Err(parse_err(format!("bad label {other:?}"))),
        };
        let score: f64 = fields[2]
            .parse()
            .map_err(|_| parse_err(format!("bad score {:?}", fields[2])))?;
        rows.push(ScoreRow {
            path: fields[0].to_string(),
            label,
            score,
        });
    }
    if rows.is_empty() {
        return Err(ManifestError::Empty);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_parses_all_row_shapes() {
        let text = "path,label,landmarks\na.pgm,1,a.txt\nb.pgm,0\nc.pgm,,\n";
        let m = DatasetManifest::parse(text, Path::new("/data")).unwrap();
        assert_eq!(m.entries.len(), 3);
        assert_eq!(m.entries[0].path, Path::new("/data/a.pgm"));
        assert_eq!(m.entries[0].label, Some(true));
        assert_eq!(m.entries[0].landmarks, Some(PathBuf::from("/data/a.txt")));
        assert_eq!(m.entries[1].label, Some(false));
        assert_eq!(m.entries[1].landmarks, None);
        assert_eq!(m.entries[2].label, None);
    }

    #[test]
    fn bad_label_is_reported_with_line_number() {
        let err = DatasetManifest::parse("a.pgm,yes\n", Path::new(".")).unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    #[test]
    fn missing_files_are_reported_not_dropped() {
        let m = DatasetManifest::parse("nope.pgm,1\n", Path::new("/definitely/absent")).unwrap();
        assert_eq!(m.entries.len(), 1);
        assert_eq!(m.missing_files().len(), 1);
    }

    #[test]
    fn scores_round_trip() {
        let rows = vec![
            ScoreRow {
                path: "x.pgm".into(),
                label: Some(true),
                score: 0.91,
            },
            ScoreRow {
                path: "y.pgm".into(),
                label: None,
                score: 0.125,
            },
        ];
        let text = write_scores_csv(&rows);
        assert_eq!(parse_scores_csv(&text).unwrap(), rows);
    }
}
