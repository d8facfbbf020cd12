//! Analytic CNN cost model: parameter and FLO counting under a width
//! multiplier `alpha` and a resolution multiplier `rho`.
//!
//! Counting conventions:
//! - One FLO is one multiply-accumulate. This calibration matches the
//!   MobileNet (alpha=1, rho=1) body at roughly 0.57e9 mult-adds; other
//!   "FLOPs" conventions differ by up to 2x.
//! - Channel counts under `alpha` round to the nearest multiple of 8 with a
//!   minimum of 8; image input channels (1 or 3) are never scaled.
//! - Spatial sizes assume "same" padding: `d_out = ceil(d_in / stride)`.
//! - Every architecture's original classifier is replaced by a single
//!   bias-carrying dense unit (the sigmoid head).

mod report;

pub use report::{table_report, write_report_csv, write_report_json, CostReport, CostReportRow};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CostModelError {
    #[error("invalid alpha {0}: must be in (0, 1]")]
    InvalidAlpha(f64),
    #[error("invalid rho {0}: must be in (0, 1]")]
    InvalidRho(f64),
    #[error("architecture file error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LayerKind {
    Conv,
    DepthwiseConv,
    Dense,
    Pool,
    GlobalPool,
    Add,
}

/// One layer of an architecture description.
///
/// `input_spatial` is the base feature-map side length before `rho` is
/// applied; declaring it per layer keeps branched networks (residual
/// shortcuts) expressible as a flat list.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LayerSpec {
    pub kind: LayerKind,
    #[serde(default = "one")]
    pub k: u32,
    #[serde(default = "one")]
    pub stride: u32,
    #[serde(rename = "in", default)]
    pub in_channels: u64,
    #[serde(rename = "out", default)]
    pub out_channels: u64,
    #[serde(rename = "input", default)]
    pub input_spatial: u32,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HeadSpec {
    /// Base feature dimension entering the replacement 1-unit head.
    #[serde(rename = "in")]
    pub in_features: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArchitectureSpec {
    pub name: String,
    pub base_input: u32,
    pub layers: Vec<LayerSpec>,
    pub head: HeadSpec,
    /// Whether (alpha, rho) variants other than (1, 1) are meaningful.
    #[serde(default)]
    pub scalable: bool,
    /// Marks architectures reported with "*" instead of numbers.
    #[serde(default)]
    pub unavailable: bool,
}

impl ArchitectureSpec {
    pub fn from_json(text: &str) -> Result<Self, CostModelError> {
        serde_json::from_str(text).map_err(|e| CostModelError::Parse(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CostModelError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
            .map_err(|e| CostModelError::Parse(format!("{}: {e}", path.display())))
    }
}

fn check_alpha(alpha: f64) -> Result<(), CostModelError> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(CostModelError::InvalidAlpha(alpha));
    }
    Ok(())
}

fn check_rho(rho: f64) -> Result<(), CostModelError> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(CostModelError::InvalidRho(rho));
    }
    Ok(())
}

/// Channel count under the width multiplier: nearest multiple of 8,
/// minimum 8. Image inputs (1 or 3 channels) stay unscaled.
pub fn scale_channels(base: u64, alpha: f64) -> u64 {
    if base <= 3 || alpha == 1.0 {
        return base;
    }
    let scaled = (base as f64 * alpha / 8.0).round() as u64 * 8;
    scaled.max(8)
}

/// Feature-map side length under the resolution multiplier.
fn scale_spatial(base: u32, rho: f64) -> u64 {
    ((base as f64 * rho).round() as u64).max(1)
}

fn output_spatial(layer: &LayerSpec, rho: f64) -> u64 {
    let d_in = scale_spatial(layer.input_spatial, rho);
    d_in.div_ceil(layer.stride as u64)
}

fn layer_params(layer: &LayerSpec, alpha: f64) -> u64 {
    let m = scale_channels(layer.in_channels, alpha);
    let n = scale_channels(layer.out_channels, alpha);
    let k2 = (layer.k as u64) * (layer.k as u64);
    match layer.kind {
        LayerKind::Conv => k2 * m * n + n,
        LayerKind::DepthwiseConv => k2 * m + m,
        LayerKind::Dense => m * n + n,
        LayerKind::Pool | LayerKind::GlobalPool | LayerKind::Add => 0,
    }
}

fn layer_flops(layer: &LayerSpec, alpha: f64, rho: f64) -> u64 {
    let m = scale_channels(layer.in_channels, alpha);
    let n = scale_channels(layer.out_channels, alpha);
    let k2 = (layer.k as u64) * (layer.k as u64);
    match layer.kind {
        LayerKind::Conv => {
            let d = output_spatial(layer, rho);
            k2 * m * n * d * d
        }
        LayerKind::DepthwiseConv => {
            let d = output_spatial(layer, rho);
            k2 * m * d * d
        }
        LayerKind::Dense => m * n,
        LayerKind::Pool | LayerKind::GlobalPool | LayerKind::Add => 0,
    }
}

/// Total parameter count under `alpha`. Independent of `rho`.
pub fn count_params(arch: &ArchitectureSpec, alpha: f64) -> Result<u64, CostModelError> {
    check_alpha(alpha)?;
    let body: u64 = arch.layers.iter().map(|l| layer_params(l, alpha)).sum();
    let head_in = scale_channels(arch.head.in_features, alpha);
    Ok(body + head_in + 1)
}

/// Total multiply-accumulate count under `alpha` and `rho`.
pub fn count_flops(arch: &ArchitectureSpec, alpha: f64, rho: f64) -> Result<u64, CostModelError> {
    check_alpha(alpha)?;
    check_rho(rho)?;
    let body: u64 = arch.layers.iter().map(|l| layer_flops(l, alpha, rho)).sum();
    let head_in = scale_channels(arch.head.in_features, alpha);
    Ok(body + head_in)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_only(in_features: u64) -> ArchitectureSpec {
        ArchitectureSpec {
            name: "dense".into(),
            base_input: 1,
            layers: vec![],
            head: HeadSpec {
                in_features,
            },
            scalable: false,
            unavailable: false,
        }
    }

    #[test]
    fn single_dense_head_params() {
        let arch = dense_only(1024);
        assert_eq!(count_params(&arch, 1.0).unwrap(), 1025);
    }

    #[test]
    fn single_conv_flops() {
        let arch = ArchitectureSpec {
            name: "conv".into(),
            base_input: 10,
            layers: vec![LayerSpec {
                kind: LayerKind::Conv,
                k: 3,
                stride: 1,
                in_channels: 1,
                out_channels: 1,
                input_spatial: 10,
            }],
            head: HeadSpec { in_features: 1 },
            scalable: false,
            unavailable: false,
        };
        // 3*3 * 1 * 1 * 10*10 plus the 1-wide head
        assert_eq!(count_flops(&arch, 1.0, 1.0).unwrap(), 900 + 1);
    }

    #[test]
    fn invalid_multipliers_are_rejected() {
        let arch = dense_only(8);
        assert!(matches!(
            count_params(&arch, 0.0),
            Err(CostModelError::InvalidAlpha(_))
        ));
        assert!(matches!(
            count_flops(&arch, 1.0, 1.5),
            Err(CostModelError::InvalidRho(_))
        ));
    }

    #[test]
    fn channel_rounding_rule() {
        assert_eq!(scale_channels(3, 0.25), 3);
        assert_eq!(scale_channels(32, 0.25), 8);
        assert_eq!(scale_channels(32, 0.75), 24);
        assert_eq!(scale_channels(24, 0.25), 8); // min 8
        assert_eq!(scale_channels(100, 0.5), 48); // 50 -> nearest multiple of 8
    }

    #[test]
    fn params_and_flops_match_naive_per_position_enumeration() {
        // independent oracle: count one multiply-accumulate per (output
        // position, kernel tap, channel pair) with explicit loops
        let layer = LayerSpec {
            kind: LayerKind::Conv,
            k: 3,
            stride: 2,
            in_channels: 4,
            out_channels: 6,
            input_spatial: 9,
        };
        let d_in = 9u64;
        let d_out = d_in.div_ceil(2);
        let mut macs = 0u64;
        let mut params = 0u64;
        for _n in 0..6u64 {
            for _m in 0..4u64 {
                for _tap in 0..9u64 {
                    params += 1;
                    for _oy in 0..d_out {
                        for _ox in 0..d_out {
                            macs += 1;
                        }
                    }
                }
            }
            params += 1; // bias
        }
        assert_eq!(layer_params(&layer, 1.0), params);
        assert_eq!(layer_flops(&layer, 1.0, 1.0), macs);

        let dw = LayerSpec {
            kind: LayerKind::DepthwiseConv,
            k: 3,
            stride: 1,
            in_channels: 4,
            out_channels: 4,
            input_spatial: 5,
        };
        let mut macs = 0u64;
        let mut params = 0u64;
        for _m in 0..4u64 {
            for _tap in 0..9u64 {
                params += 1;
                for _pos in 0..25u64 {
                    macs += 1;
                }
            }
            params += 1;
        }
        assert_eq!(layer_params(&dw, 1.0), params);
        assert_eq!(layer_flops(&dw, 1.0, 1.0), macs);
    }

    #[test]
    fn unknown_layer_kind_is_a_parse_error() {
        let text = r#"{"name":"x","base_input":8,"layers":[{"kind":"Wavelet","k":3,"stride":1,"in":3,"out":8,"input":8}],"head":{"in":8}}"#;
        let err = ArchitectureSpec::from_json(text).unwrap_err();
        assert!(err.to_string().contains("line"), "got: {err}");
    }
}
