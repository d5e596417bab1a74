//! Run summaries: headline metrics with explicit tolerances, free-form
//! diagnostics, and artifact paths.

use std::collections::BTreeMap;

use serde::Serialize;

/// How a metric's measured value relates to its target.
#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    /// |measured - target| <= tolerance.
    Absolute,
    /// |measured - target| <= tolerance * max(|target|, floor).
    Relative,
    /// measured >= tolerance (negative controls).
    Exceeds,
}

#[derive(Clone, Debug, Serialize)]
pub struct Metric {
    pub name: String,
    pub measured: f64,
    pub target: f64,
    pub tolerance: f64,
    pub kind: MetricKind,
    pub pass: bool,
}

const REL_FLOOR: f64 = 1e-12;

impl Metric {
    pub fn absolute(name: &str, measured: f64, target: f64, tolerance: f64) -> Self {
        Metric {
            name: name.to_string(),
            measured,
            target,
            tolerance,
            kind: MetricKind::Absolute,
            pass: measured.is_finite() && (measured - target).abs() <= tolerance,
        }
    }

    pub fn relative(name: &str, measured: f64, target: f64, tolerance: f64) -> Self {
        let scale = target.abs().max(REL_FLOOR);
        Metric {
            name: name.to_string(),
            measured,
            target,
            tolerance,
            kind: MetricKind::Relative,
            pass: measured.is_finite() && (measured - target).abs() <= tolerance * scale,
        }
    }

    pub fn exceeds(name: &str, measured: f64, floor: f64) -> Self {
        Metric {
            name: name.to_string(),
            measured,
            target: floor,
            tolerance: floor,
            kind: MetricKind::Exceeds,
            pass: measured.is_finite() && measured >= floor,
        }
    }

    pub fn describe(&self) -> String {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        match self.kind {
            MetricKind::Absolute => format!(
                "{}: {} vs {} (+/- {}) {}",
                self.name, self.measured, self.target, self.tolerance, verdict
            ),
            MetricKind::Relative => format!(
                "{}: {} vs {} (rel {}) {}",
                self.name, self.measured, self.target, self.tolerance, verdict
            ),
            MetricKind::Exceeds => format!(
                "{}: {} must exceed {} {}",
                self.name, self.measured, self.tolerance, verdict
            ),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Artifacts {
    pub csv: String,
    pub summary: String,
    pub plot: Option<String>,
}

/// Everything a run reports. Serialized as the summary JSON; `parameters`
/// holds the fully resolved settings (defaults expanded).
#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub scenario: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub metrics: Vec<Metric>,
    pub diagnostics: BTreeMap<String, f64>,
    pub pass: bool,
    pub artifacts: Artifacts,
}

impl RunSummary {
    pub fn to_json(&self) -> String {
        let mut text =
            serde_json::to_string_pretty(self).expect("summary fields are always serializable");
        text.push('\n');
        text
    }
}
