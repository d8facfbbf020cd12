use serde::{Deserialize, Serialize};

use super::{count_flops, count_params, ArchitectureSpec, CostModelError};

/// One architecture variant in the size/FLO table. `None` renders as "*"
/// (unavailable).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostReportRow {
    pub name: String,
    pub alpha: f64,
    pub rho: f64,
    pub params: Option<u64>,
    pub flo: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub rows: Vec<CostReportRow>,
}

/// Builds the cost table, ascending by FLO with ties broken by params.
/// Non-scalable architectures contribute a single (1, 1) row regardless of
/// the requested variants; unavailable rows sort last.
pub fn table_report(
    archs: &[ArchitectureSpec],
    variants: &[(f64, f64)],
) -> Result<CostReport, CostModelError> {
    let mut rows = Vec::new();
    for arch in archs {
        let arch_variants: &[(f64, f64)] = if arch.scalable {
            variants
        } else {
            &[(1.0, 1.0)]
        };
        for &(alpha, rho) in arch_variants {
            let (params, flo) = if arch.unavailable {
                (None, None)
            } else {
                (
                    Some(count_params(arch, alpha)?),
                    Some(count_flops(arch, alpha, rho)?),
                )
            };
            rows.push(CostReportRow {
                name: arch.name.clone(),
                alpha,
                rho,
                params,
                flo,
            });
        }
    }
    rows.sort_by(|a, b| {
        let key = |r: &CostReportRow| (r.flo.is_none(), r.flo, r.params);
        key(a).cmp(&key(b)).then_with(|| a.name.cmp(&b.name))
    });
    Ok(CostReport { rows })
}

fn cell(v: Option<u64>) -> String {
    v.map_or_else(|| "*".to_string(), |x| x.to_string())
}

/// CSV rendering with the fixed header `name,alpha,rho,params,flo`.
pub fn write_report_csv(report: &CostReport) -> String {
    let mut out = String::from("name,alpha,rho,params,flo\n");
    for r in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.name,
            r.alpha,
            r.rho,
            cell(r.params),
            cell(r.flo)
        ));
    }
    out
}

pub fn write_report_json(report: &CostReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}
