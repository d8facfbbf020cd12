//! `costmodel`: parameter/FLO table over the shipped or user-provided
//! architecture descriptions.

use std::path::Path;

use crate::costmodel::{
    table_report, write_report_csv, write_report_json, ArchitectureSpec, CostReport,
};

use super::{write_file, CliError};

/// The architecture descriptions shipped with the binary.
pub fn builtin_architectures() -> Vec<ArchitectureSpec> {
    [
        include_str!("../../data/archs/mobilenet_v1.json"),
        include_str!("../../data/archs/resnet50.json"),
        include_str!("../../data/archs/vgg16.json"),
    ]
    .iter()
    .map(|text| ArchitectureSpec::from_json(text).expect("shipped architectures are valid"))
    .collect()
}

/// The (alpha, rho) grid of the width/resolution study: every combination
/// of alpha in {0.25, 0.5, 0.75, 1} and rho in {160/224, 1}.
pub fn default_variants() -> Vec<(f64, f64)> {
    let mut v = Vec::new();
    for alpha in [0.25, 0.5, 0.75, 1.0] {
        for rho in [0.714, 1.0] {
            v.push((alpha, rho));
        }
    }
    v
}

pub fn load_architectures(dir: &Path) -> Result<Vec<ArchitectureSpec>, CliError> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| CliError::Usage(format!("{}: {e}", dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::Usage(format!(
            "no architecture files (*.json) in {}",
            dir.display()
        )));
    }
    paths
        .iter()
        .map(|p| ArchitectureSpec::load(p).map_err(CliError::from))
        .collect()
}

pub fn build_report(archs_dir: Option<&Path>) -> Result<CostReport, CliError> {
    let archs = match archs_dir {
        Some(dir) => load_architectures(dir)?,
        None => builtin_architectures(),
    };
    Ok(table_report(&archs, &default_variants())?)
}

pub fn cmd_costmodel(
    archs_dir: Option<&Path>,
    out_dir: Option<&Path>,
    format: &str,
) -> Result<(), CliError> {
    let report = build_report(archs_dir)?;
    let rendered = match format {
        "json" => write_report_json(&report),
        _ => write_report_csv(&report),
    };
    if let Some(out) = out_dir {
        std::fs::create_dir_all(out)?;
        write_file(&out.join("costmodel.csv"), write_report_csv(&report))?;
        write_file(&out.join("costmodel.json"), write_report_json(&report))?;
    }
    print!("{rendered}");
    Ok(())
}
