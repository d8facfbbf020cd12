//! `bench`: run service-time scenarios on the simulated clock and emit a
//! throughput table (one row per scenario, "*" for unavailable entries).

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::metrics::throughput_report;
use crate::pipeline::{create_pipeline, ClockMode, PipelineConfig};

use super::{write_file, CliError};

/// One benchmarked configuration: service-time overrides on top of the
/// shared pipeline, like one network row of a speed table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchScenario {
    pub name: String,
    /// Per-stage service times in milliseconds, merged over the pipeline's.
    #[serde(default)]
    pub service_times: BTreeMap<String, f64>,
    /// Stage whose throughput the row reports; defaults to `display`.
    #[serde(default)]
    pub measure: Option<String>,
    /// Rendered as "*" without running (not measurable in this build).
    #[serde(default)]
    pub unavailable: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchConfig {
    pub pipeline: PipelineConfig,
    pub scenarios: Vec<BenchScenario>,
    /// Stage frames originate from, for latency accounting.
    #[serde(default = "default_source")]
    pub source: String,
    /// Stage whose completions count as displayed frames.
    #[serde(default = "default_display")]
    pub display: String,
}

fn default_source() -> String {
    "source".into()
}

fn default_display() -> String {
    "overlay".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub name: String,
    pub fps: Option<f64>,
    pub skip_fraction: Option<f64>,
    pub latency_p50_ms: Option<f64>,
    pub latency_p95_ms: Option<f64>,
    pub latency_p99_ms: Option<f64>,
}

/// Runs every scenario and returns the table rows in scenario order.
pub fn bench_rows(config: &BenchConfig) -> Result<Vec<BenchRow>, CliError> {
    if config.scenarios.is_empty() {
        return Err(CliError::Usage("bench config declares no scenarios".into()));
    }
    if config.pipeline.stages.is_empty() {
        return Err(CliError::Usage("bench pipeline declares no stages".into()));
    }
    if config.pipeline.clock.mode != ClockMode::Sim {
        return Err(CliError::Usage("bench requires a simulated clock".into()));
    }

    let mut rows = Vec::new();
    for scenario in &config.scenarios {
        if scenario.unavailable {
            rows.push(BenchRow {
                name: scenario.name.clone(),
                fps: None,
                skip_fraction: None,
                latency_p50_ms: None,
                latency_p95_ms: None,
                latency_p99_ms: None,
            });
            continue;
        }
        let mut pipeline_config = config.pipeline.clone();
        for (stage, ms) in &scenario.service_times {
            pipeline_config
                .clock
                .service_times
                .insert(stage.clone(), *ms);
        }
        let pipeline = create_pipeline(pipeline_config)?;
        let run = pipeline.run_simulated()?;
        let report = throughput_report(&run.trace, &config.source, &config.display)?;
        let measured = scenario.measure.as_deref().unwrap_or(&config.display);
        let stage = report.stage(measured).ok_or_else(|| {
            CliError::Usage(format!(
                "scenario {:?} measures unknown stage {measured:?}",
                scenario.name
            ))
        })?;
        rows.push(BenchRow {
            name: scenario.name.clone(),
            fps: Some(stage.fps),
            skip_fraction: Some(stage.skip_fraction),
            latency_p50_ms: Some(report.latency_p50_ns as f64 / 1e6),
            latency_p95_ms: Some(report.latency_p95_ns as f64 / 1e6),
            latency_p99_ms: Some(report.latency_p99_ns as f64 / 1e6),
        });
    }
    Ok(rows)
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "*".to_string(), |x| format!("{x:.3}"))
}

pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut out =
        String::from("name,fps,skip_fraction,latency_p50_ms,latency_p95_ms,latency_p99_ms\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.name,
            cell(r.fps),
            cell(r.skip_fraction),
            cell(r.latency_p50_ms),
            cell(r.latency_p95_ms),
            cell(r.latency_p99_ms)
        ));
    }
    out
}

pub fn cmd_bench(config_path: &Path, out_dir: &Path, format: &str) -> Result<(), CliError> {
    let text = std::fs::read_to_string(config_path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", config_path.display())))?;
    let config: BenchConfig =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bench config: {e}")))?;
    config.pipeline.validate()?;
    let rows = bench_rows(&config)?;

    let csv = rows_to_csv(&rows);
    let json = {
        let mut s = serde_json::to_string_pretty(&rows).expect("rows serialize");
        s.push('\n');
        s
    };
    std::fs::create_dir_all(out_dir)?;
    write_file(&out_dir.join("bench.csv"), &csv)?;
    write_file(&out_dir.join("bench.json"), &json)?;
    print!("{}", if format == "json" { &json } else { &csv });
    Ok(())
}
