//! Report emission: JSON result documents, CSV exports, SVG histograms and
//! the run manifest that makes every invocation reproducible.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::outcome::TestOutcome;
use crate::simstudy::SweepResult;

/// Number of bars in the reference-sample histogram.
const HISTOGRAM_BINS: usize = 30;

/// Everything needed to reproduce a run bit-identically: re-executing
/// `command` must produce the same result bytes again.
///
/// The copy embedded in a result document omits the wall-clock time (and its
/// command echo is normalized to exclude the thread count), so result files
/// from repeated runs compare byte for byte; the `.manifest.json` side file
/// carries the timing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    /// The argv that produced this run, starting at the subcommand.
    pub command: Vec<String>,
    pub master_seed: u64,
    /// FNV-1a digests of every input file, keyed by path.
    pub input_digests: Vec<(String, String)>,
    pub tool_version: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_clock_seconds: Option<f64>,
}

impl RunManifest {
    pub fn new(command: Vec<String>, master_seed: u64) -> Self {
        Self {
            command,
            master_seed,
            input_digests: Vec::new(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_clock_seconds: None,
        }
    }

    pub fn record_input(&mut self, path: &Path) -> Result<()> {
        let bytes = std::fs::read(path)?;
        self.input_digests
            .push((path.display().to_string(), fnv1a_hex(&bytes)));
        Ok(())
    }
}

fn fnv1a_hex(bytes: &[u8]) -> String {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    format!("{hash:016x}")
}

/// A complete test report: the outcome plus its manifest. This is the JSON
/// document the `test` subcommand writes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    #[serde(flatten)]
    pub outcome: TestOutcome,
    pub manifest: RunManifest,
}

/// JSON document written by the `sweep` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub results: Vec<SweepResult>,
    pub manifest: RunManifest,
}

pub fn outcome_json(report: &TestReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)?)
}

pub fn parse_outcome_json(text: &str) -> Result<TestReport> {
    Ok(serde_json::from_str(text)?)
}

/// Reference sample as CSV, one value per row, full round-trip precision.
pub fn outcome_csv(outcome: &TestOutcome) -> String {
    let mut out = String::from("reference\n");
    for v in &outcome.reference {
        let _ = writeln!(out, "{v}");
    }
    out
}

/// Sweep curve as CSV: `grid_value,rejection_rate,replications`.
pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = String::from("grid_value,rejection_rate,replications\n");
    for (g, rate) in result.grid.iter().zip(&result.rates) {
        let _ = writeln!(out, "{g},{rate},{}", result.replications);
    }
    out
}

pub fn sweep_json(results: &[SweepResult]) -> Result<String> {
    Ok(serde_json::to_string_pretty(results)?)
}

fn fmt2(v: f64) -> String {
    format!("{v:.2}")
}

/// Histogram of the reference sample with two labeled vertical markers: the
/// observed statistic in red and the decision quantile in green.
pub fn outcome_svg(outcome: &TestOutcome) -> String {
    let width = 840.0;
    let height = 480.0;
    let margin_left = 60.0;
    let margin_right = 30.0;
    let margin_top = 40.0;
    let margin_bottom = 60.0;
    let plot_w = width - margin_left - margin_right;
    let plot_h = height - margin_top - margin_bottom;

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in outcome.reference.iter().chain([&outcome.r0, &outcome.q]) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let span = (hi - lo).max(1e-12);
    let lo = lo - 0.05 * span;
    let hi = hi + 0.05 * span;
    let span = hi - lo;

    let mut bins = vec![0usize; HISTOGRAM_BINS];
    for &v in &outcome.reference {
        let mut idx = ((v - lo) / span * HISTOGRAM_BINS as f64).floor() as usize;
        if idx >= HISTOGRAM_BINS {
            idx = HISTOGRAM_BINS - 1;
        }
        bins[idx] += 1;
    }
    let max_count = bins.iter().copied().max().unwrap_or(1).max(1) as f64;
    let x_of = |v: f64| margin_left + (v - lo) / span * plot_w;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">"
    );
    let _ = writeln!(
        svg,
        "  <rect x=\"0\" y=\"0\" width=\"{width}\" height=\"{height}\" fill=\"white\"/>"
    );
    let _ = writeln!(
        svg,
        "  <text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">Permutation reference distribution of {} ({} permutations)</text>",
        width / 2.0,
        xml_escape(&outcome.statistic_name),
        outcome.reference.len()
    );

    let bar_w = plot_w / HISTOGRAM_BINS as f64;
    for (i, &count) in bins.iter().enumerate() {
        let h = count as f64 / max_count * plot_h;
        let x = margin_left + i as f64 * bar_w;
        let y = margin_top + plot_h - h;
        let _ = writeln!(
            svg,
            "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#9ecae1\" stroke=\"#6baed6\"/>",
            fmt2(x),
            fmt2(y),
            fmt2(bar_w.max(1.0)),
            fmt2(h)
        );
    }

    // Axis line and end labels.
    let axis_y = margin_top + plot_h;
    let _ = writeln!(
        svg,
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
        fmt2(margin_left),
        fmt2(axis_y),
        fmt2(margin_left + plot_w),
        fmt2(axis_y)
    );
    let _ = writeln!(
        svg,
        "  <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{:.4}</text>",
        fmt2(margin_left),
        fmt2(axis_y + 20.0),
        lo
    );
    let _ = writeln!(
        svg,
        "  <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{:.4}</text>",
        fmt2(margin_left + plot_w),
        fmt2(axis_y + 20.0),
        hi
    );

    // The two decision markers.
    let level = 100.0 * (1.0 - outcome.config.alpha);
    for (value, color, label) in [
        (outcome.r0, "red", format!("observed = {:.4}", outcome.r0)),
        (
            outcome.q,
            "green",
            format!("{level}%-quantile = {:.4}", outcome.q),
        ),
    ] {
        let x = x_of(value);
        let _ = writeln!(
            svg,
            "  <line class=\"marker\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{color}\" stroke-width=\"2\"/>",
            fmt2(x),
            fmt2(margin_top),
            fmt2(x),
            fmt2(axis_y)
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{color}\">{}</text>",
            fmt2(x + 4.0),
            fmt2(margin_top + 14.0),
            xml_escape(&label)
        );
    }

    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}
