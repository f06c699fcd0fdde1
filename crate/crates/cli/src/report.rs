//! Serializable views of the core results; the JSON layout is documented in
//! `docs/report-schema.md`.

use std::collections::BTreeMap;
use std::path::Path;

use advrobust_core::bounds::BoundReport;
use advrobust_core::robustness::{PointFlag, RobustnessReport};
use serde::Serialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RobustnessSummary {
    pub method: &'static str,
    pub rho: f64,
    pub rho_normalized: Option<f64>,
    pub points: usize,
    /// Count of points per non-default flag.
    pub flags: BTreeMap<&'static str, usize>,
}

pub fn flag_name(f: PointFlag) -> Option<&'static str> {
    match f {
        PointFlag::None => None,
        PointFlag::HardCase => Some("hard_case"),
        PointFlag::BelowBracket => Some("below_bracket"),
        PointFlag::AtUpperEnd => Some("at_upper_end"),
    }
}

impl From<&RobustnessReport> for RobustnessSummary {
    fn from(r: &RobustnessReport) -> Self {
        let mut flags = BTreeMap::new();
        for p in &r.per_point {
            if let Some(name) = flag_name(p.flag) {
                *flags.entry(name).or_insert(0) += 1;
            }
        }
        RobustnessSummary {
            method: r.per_point[0].method.as_str(),
            rho: r.rho,
            rho_normalized: r.rho_normalized,
            points: r.per_point.len(),
            flags,
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct BoundSummary {
    pub kind: &'static str,
    pub value: f64,
    pub distinguishability: f64,
    pub risk: f64,
    pub p1: f64,
    pub p_m1: f64,
    pub radius: Option<f64>,
    pub k: Option<f64>,
    pub vacuous: bool,
    pub estimator: &'static str,
}

impl From<&BoundReport> for BoundSummary {
    fn from(b: &BoundReport) -> Self {
        BoundSummary {
            kind: b.kind.as_str(),
            value: b.value,
            distinguishability: b.distinguishability,
            risk: b.risk,
            p1: b.p1,
            p_m1: b.p_m1,
            radius: b.radius,
            k: b.k,
            vacuous: b.vacuous,
            estimator: "empirical-plug-in",
        }
    }
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|e| CliError::Data(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}
