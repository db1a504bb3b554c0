//! Summaries of sweep results: per-setting box statistics and AK-minus-KA
//! median deltas.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::align::Algorithm;
use crate::error::{Error, Result};
use crate::metrics::MetricsReport;
use crate::pipeline::Variant;
use crate::stats::{boxplot_stats, BoxStats};
use crate::sweep::{SweepResult, SweepRow};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    OverallPrecision,
    OverallRecall,
    TargetPrecision,
    FinalAvgReward,
}

impl Metric {
    pub const ALL: [Metric; 4] = [
        Metric::OverallPrecision,
        Metric::OverallRecall,
        Metric::TargetPrecision,
        Metric::FinalAvgReward,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::OverallPrecision => "overall_precision",
            Metric::OverallRecall => "overall_recall",
            Metric::TargetPrecision => "target_precision",
            Metric::FinalAvgReward => "final_avg_reward",
        }
    }

    pub fn of(self, m: &MetricsReport) -> f64 {
        match self {
            Metric::OverallPrecision => m.overall_precision,
            Metric::OverallRecall => m.overall_recall,
            Metric::TargetPrecision => m.target_precision,
            Metric::FinalAvgReward => m.final_avg_reward,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown metric `{s}`")))
    }
}

/// One alignment setting (everything except seed and variant).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Setting {
    pub algorithm: Algorithm,
    pub beta: f64,
    pub iterations: usize,
    pub n_final: usize,
}

impl Setting {
    pub fn of(row: &SweepRow) -> Self {
        Setting {
            algorithm: row.algorithm,
            beta: row.beta,
            iterations: row.iterations,
            n_final: row.n_final,
        }
    }

    pub fn label(&self) -> String {
        format!(
            "{} b={} it={} k={}",
            self.algorithm, self.beta, self.iterations, self.n_final
        )
    }
}

/// Rows grouped by setting, in order of first appearance.
pub fn group_by_setting(result: &SweepResult) -> Vec<(Setting, Vec<&SweepRow>)> {
    let mut groups: Vec<(Setting, Vec<&SweepRow>)> = Vec::new();
    for row in &result.rows {
        let key = Setting::of(row);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, rows)) => rows.push(row),
            None => groups.push((key, vec![row])),
        }
    }
    groups
}

/// Successful values of `metric` for one variant.
pub fn metric_values(rows: &[&SweepRow], variant: Variant, metric: Metric) -> Vec<f64> {
    rows.iter()
        .filter(|r| r.variant == variant)
        .filter_map(|r| r.metrics.as_ref())
        .map(|m| metric.of(m))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryEntry {
    #[serde(flatten)]
    pub setting: Setting,
    pub variant: Variant,
    pub n_trials: usize,
    pub n_failed: usize,
    pub failure_rate: f64,
    /// Box statistics over successful trials, keyed by metric name.
    pub metrics: BTreeMap<String, BoxStats>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonEntry {
    #[serde(flatten)]
    pub setting: Setting,
    /// median(AK) - median(KA) per metric; null when either side has no
    /// successful trial.
    pub median_delta: BTreeMap<String, Option<f64>>,
}

pub fn summarize(result: &SweepResult) -> Result<Vec<SummaryEntry>> {
    let mut out = Vec::new();
    for (setting, rows) in group_by_setting(result) {
        for variant in Variant::BOTH {
            let n_trials = rows.iter().filter(|r| r.variant == variant).count();
            if n_trials == 0 {
                continue;
            }
            let n_failed = rows
                .iter()
                .filter(|r| r.variant == variant && r.failed)
                .count();
            let mut metrics = BTreeMap::new();
            for metric in Metric::ALL {
                let values = metric_values(&rows, variant, metric);
                if !values.is_empty() {
                    metrics.insert(metric.name().to_string(), boxplot_stats(&values)?);
                }
            }
            out.push(SummaryEntry {
                setting,
                variant,
                n_trials,
                n_failed,
                failure_rate: n_failed as f64 / n_trials as f64,
                metrics,
            });
        }
    }
    Ok(out)
}

pub fn compare(result: &SweepResult) -> Result<Vec<ComparisonEntry>> {
    let mut out = Vec::new();
    for (setting, rows) in group_by_setting(result) {
        let mut median_delta = BTreeMap::new();
        for metric in Metric::ALL {
            let ak = metric_values(&rows, Variant::AK, metric);
            let ka = metric_values(&rows, Variant::KA, metric);
            let delta = if ak.is_empty() || ka.is_empty() {
                None
            } else {
                Some(boxplot_stats(&ak)?.median - boxplot_stats(&ka)?.median)
            };
            median_delta.insert(metric.name().to_string(), delta);
        }
        out.push(ComparisonEntry {
            setting,
            median_delta,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportFiles {
    pub results_csv: PathBuf,
    pub summary_json: PathBuf,
    pub comparison_json: PathBuf,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::json(path, e))?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

/// Writes results.csv, summary.json and comparison.json into `out_dir`.
pub fn emit_report(result: &SweepResult, out_dir: &Path) -> Result<ReportFiles> {
    if result.rows.is_empty() {
        return Err(Error::InvalidArgument("empty sweep result".into()));
    }
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let files = ReportFiles {
        results_csv: out_dir.join("results.csv"),
        summary_json: out_dir.join("summary.json"),
        comparison_json: out_dir.join("comparison.json"),
    };
    result.save_csv(&files.results_csv)?;
    write_json(&files.summary_json, &summarize(result)?)?;
    write_json(&files.comparison_json, &compare(result)?)?;
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(variant: Variant, seed: u64, reward: f64) -> SweepRow {
        SweepRow {
            variant,
            algorithm: Algorithm::Ppo,
            beta: 1.0,
            iterations: 100,
            n_final: 4,
            seed,
            metrics: Some(MetricsReport {
                overall_precision: -2.0,
                overall_recall: -3.0,
                target_precision: -10.0,
                final_avg_reward: reward,
                n_samples: 1000,
            }),
            failed: false,
            failed_stage: None,
        }
    }

    fn sample_result() -> SweepResult {
        let mut rows = vec![
            row(Variant::KA, 0, 1.0),
            row(Variant::AK, 0, 8.0),
            row(Variant::KA, 1, 3.0),
            row(Variant::AK, 1, 9.0),
        ];
        rows.push(SweepRow {
            metrics: None,
            failed: true,
            failed_stage: Some("align".into()),
            ..row(Variant::KA, 2, 0.0)
        });
        SweepResult { rows }
    }

    #[test]
    fn summary_counts_failures() {
        let s = summarize(&sample_result()).unwrap();
        assert_eq!(s.len(), 2);
        let ka = s.iter().find(|e| e.variant == Variant::KA).unwrap();
        assert_eq!((ka.n_trials, ka.n_failed), (3, 1));
        assert!((ka.failure_rate - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(ka.metrics["final_avg_reward"].median, 2.0);
    }

    #[test]
    fn comparison_deltas() {
        let c = compare(&sample_result()).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].median_delta["final_avg_reward"], Some(8.5 - 2.0));
        assert_eq!(c[0].median_delta["overall_recall"], Some(0.0));
    }

    #[test]
    fn files_written_and_summary_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let files = emit_report(&sample_result(), dir.path()).unwrap();
        let text = std::fs::read_to_string(&files.summary_json).unwrap();
        let back: Vec<SummaryEntry> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, summarize(&sample_result()).unwrap());
        let header = std::fs::read_to_string(&files.results_csv).unwrap();
        assert!(header.starts_with(
            "variant,algorithm,beta,iterations,n_final,seed,overall_precision,overall_recall,\
             target_precision,final_avg_reward,n_samples,failed,failed_stage\n"
        ));
        assert!(emit_report(&SweepResult::default(), dir.path()).is_err());
    }

    #[test]
    fn metric_names_parse() {
        for m in Metric::ALL {
            assert_eq!(m.name().parse::<Metric>().unwrap(), m);
        }
    }
}
