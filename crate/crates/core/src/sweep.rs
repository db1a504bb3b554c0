//! Multi-seed sweeps over alignment settings for both pipeline variants.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::align::{Algorithm, AlignConfig};
use crate::distill::{FitConfig, StudentInit, KD_TEMPER};
use crate::error::{Error, Result};
use crate::metrics::{MetricsReport, DEFAULT_METRIC_SAMPLES};
use crate::pipeline::{run_pipeline, PipelineConfig, Variant};
use crate::reward::RewardSpec;

pub const RL_ITERATION_GRID: [usize; 6] = [200, 600, 1000, 1400, 1800, 2200];
pub const DPO_ITERATION_GRID: [usize; 5] = [100, 300, 500, 700, 900];
pub const BETA_GRID: [f64; 5] = [0.1, 0.3, 0.5, 1.0, 2.0];

/// Cross-product of settings, each run for `n_trials` seeds and both variants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub algorithm: Algorithm,
    pub beta_values: Vec<f64>,
    pub iteration_values: Vec<usize>,
    pub n_final_values: Vec<usize>,
    pub n_trials: usize,
    pub metric_samples: usize,
    pub out_dir: PathBuf,
    /// Trial `i` runs with pipeline seed `seed + i`.
    pub seed: u64,
    pub kd_temper: f64,
    pub kd_init: StudentInit,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub offline_dataset_size: usize,
    pub baseline_learning_rate: f64,
    pub reward: RewardSpec,
    pub fit: FitConfig,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec::beta_sweep(Algorithm::Ppo)
    }
}

impl SweepSpec {
    /// KL/DPO coefficient grid at the algorithm's default iteration count.
    pub fn beta_sweep(algorithm: Algorithm) -> Self {
        let template = AlignConfig::for_algorithm(algorithm);
        SweepSpec {
            algorithm,
            beta_values: BETA_GRID.to_vec(),
            iteration_values: vec![algorithm.default_iterations()],
            n_final_values: vec![4, 3],
            n_trials: 20,
            metric_samples: DEFAULT_METRIC_SAMPLES,
            out_dir: PathBuf::from("sweep_out"),
            seed: 0,
            kd_temper: KD_TEMPER,
            kd_init: StudentInit::TopComponents,
            batch_size: template.batch_size,
            learning_rate: template.learning_rate,
            offline_dataset_size: template.offline_dataset_size,
            baseline_learning_rate: template.baseline_learning_rate,
            reward: RewardSpec::default(),
            fit: FitConfig::default(),
        }
    }

    /// Iteration grid at beta = 1.
    pub fn iteration_sweep(algorithm: Algorithm) -> Self {
        let iteration_values = if algorithm.is_dpo() {
            DPO_ITERATION_GRID.to_vec()
        } else {
            RL_ITERATION_GRID.to_vec()
        };
        SweepSpec {
            beta_values: vec![1.0],
            iteration_values,
            ..SweepSpec::beta_sweep(algorithm)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.beta_values.is_empty()
            || self.iteration_values.is_empty()
            || self.n_final_values.is_empty()
        {
            return Err(Error::InvalidArgument(
                "sweep grids must be non-empty".into(),
            ));
        }
        if self.n_trials == 0 {
            return Err(Error::InvalidArgument("n_trials must be >= 1".into()));
        }
        for cfg in self.pipeline_configs() {
            cfg.validate()?;
        }
        Ok(())
    }

    pub fn n_cells(&self) -> usize {
        Variant::BOTH.len()
            * self.beta_values.len()
            * self.iteration_values.len()
            * self.n_final_values.len()
            * self.n_trials
    }

    /// Every pipeline run in canonical order: n_final, beta, iterations,
    /// trial, variant (KA before AK).
    pub fn pipeline_configs(&self) -> Vec<PipelineConfig> {
        let mut out = Vec::with_capacity(self.n_cells());
        for &n_final in &self.n_final_values {
            for &beta in &self.beta_values {
                for &iterations in &self.iteration_values {
                    for trial in 0..self.n_trials as u64 {
                        for variant in Variant::BOTH {
                            out.push(PipelineConfig {
                                variant,
                                align: AlignConfig {
                                    algorithm: self.algorithm,
                                    beta,
                                    iterations,
                                    batch_size: self.batch_size,
                                    learning_rate: self.learning_rate,
                                    offline_dataset_size: self.offline_dataset_size,
                                    baseline_learning_rate: self.baseline_learning_rate,
                                },
                                n_final,
                                kd_temper: self.kd_temper,
                                kd_init: self.kd_init,
                                seed: self.seed.wrapping_add(trial),
                                reward: self.reward.clone(),
                                metric_samples: self.metric_samples,
                                fit: self.fit.clone(),
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub variant: Variant,
    pub algorithm: Algorithm,
    pub beta: f64,
    pub iterations: usize,
    pub n_final: usize,
    pub seed: u64,
    /// Final-model metrics; `None` when the trial failed.
    pub metrics: Option<MetricsReport>,
    pub failed: bool,
    pub failed_stage: Option<String>,
}

impl SweepRow {
    pub fn from_run(cfg: &PipelineConfig) -> Self {
        let (metrics, failed_stage) = match run_pipeline(cfg) {
            Ok(run) => (Some(run.metrics.final_model), None),
            Err(f) => (None, Some(f.stage.to_string())),
        };
        SweepRow {
            variant: cfg.variant,
            algorithm: cfg.align.algorithm,
            beta: cfg.align.beta,
            iterations: cfg.align.iterations,
            n_final: cfg.n_final,
            seed: cfg.seed,
            failed: metrics.is_none(),
            metrics,
            failed_stage,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

pub const RESULTS_HEADER: [&str; 13] = [
    "variant",
    "algorithm",
    "beta",
    "iterations",
    "n_final",
    "seed",
    "overall_precision",
    "overall_recall",
    "target_precision",
    "final_avg_reward",
    "n_samples",
    "failed",
    "failed_stage",
];

fn row_record(row: &SweepRow) -> Vec<String> {
    let metric = |f: fn(&MetricsReport) -> String| row.metrics.as_ref().map(f).unwrap_or_default();
    vec![
        row.variant.to_string(),
        row.algorithm.to_string(),
        row.beta.to_string(),
        row.iterations.to_string(),
        row.n_final.to_string(),
        row.seed.to_string(),
        metric(|m| m.overall_precision.to_string()),
        metric(|m| m.overall_recall.to_string()),
        metric(|m| m.target_precision.to_string()),
        metric(|m| m.final_avg_reward.to_string()),
        metric(|m| m.n_samples.to_string()),
        row.failed.to_string(),
        row.failed_stage.clone().unwrap_or_default(),
    ]
}

fn parse_field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, path: &Path) -> Result<T> {
    let raw = rec.get(i).unwrap_or("");
    raw.parse().map_err(|_| {
        Error::InvalidParameter(format!(
            "{}: cannot parse column `{}` value `{raw}`",
            path.display(),
            RESULTS_HEADER[i]
        ))
    })
}

fn parse_row(rec: &csv::StringRecord, path: &Path) -> Result<SweepRow> {
    if rec.len() != RESULTS_HEADER.len() {
        return Err(Error::InvalidParameter(format!(
            "{}: expected {} columns, found {}",
            path.display(),
            RESULTS_HEADER.len(),
            rec.len()
        )));
    }
    let variant = rec[0].parse::<Variant>()?;
    let algorithm = rec[1].parse::<Algorithm>()?;
    let failed: bool = parse_field(rec, 11, path)?;
    let metrics = if failed {
        None
    } else {
        Some(MetricsReport {
            overall_precision: parse_field(rec, 6, path)?,
            overall_recall: parse_field(rec, 7, path)?,
            target_precision: parse_field(rec, 8, path)?,
            final_avg_reward: parse_field(rec, 9, path)?,
            n_samples: parse_field(rec, 10, path)?,
        })
    };
    Ok(SweepRow {
        variant,
        algorithm,
        beta: parse_field(rec, 2, path)?,
        iterations: parse_field(rec, 3, path)?,
        n_final: parse_field(rec, 4, path)?,
        seed: parse_field(rec, 5, path)?,
        metrics,
        failed,
        failed_stage: Some(rec[12].to_string()).filter(|s| !s.is_empty()),
    })
}

impl SweepResult {
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(RESULTS_HEADER)?;
        for row in &self.rows {
            w.write_record(row_record(row))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(BufWriter::new(file))
            .map_err(|e| Error::csv(path, e))
    }

    pub fn load_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
        let header = reader.headers().map_err(|e| Error::csv(path, e))?.clone();
        if header.iter().ne(RESULTS_HEADER.iter().copied()) {
            return Err(Error::InvalidParameter(format!(
                "{}: unexpected results header",
                path.display()
            )));
        }
        let mut rows = Vec::new();
        for rec in reader.records() {
            let rec = rec.map_err(|e| Error::csv(path, e))?;
            rows.push(parse_row(&rec, path)?);
        }
        Ok(SweepResult { rows })
    }
}

/// Runs every cell of `spec`, appending rows to `<out_dir>/results.csv` as
/// each parallel chunk finishes. Failed trials become rows with
/// `failed = true`; they never abort the sweep.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    run_sweep_with_progress(spec, |_, _| {})
}

pub fn run_sweep_with_progress<F>(spec: &SweepSpec, mut progress: F) -> Result<SweepResult>
where
    F: FnMut(usize, usize),
{
    spec.validate()?;
    let dir = &spec.out_dir;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join("results.csv");
    let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
    let mut writer = csv::Writer::from_writer(BufWriter::new(file));
    writer
        .write_record(RESULTS_HEADER)
        .map_err(|e| Error::csv(&path, e))?;

    let configs = spec.pipeline_configs();
    let chunk = (rayon::current_num_threads() * 2).max(8);
    let mut rows = Vec::with_capacity(configs.len());
    for cells in configs.chunks(chunk) {
        let done: Vec<SweepRow> = cells.par_iter().map(SweepRow::from_run).collect();
        for row in &done {
            writer
                .write_record(row_record(row))
                .map_err(|e| Error::csv(&path, e))?;
        }
        writer.flush().map_err(|e| Error::io(&path, e))?;
        rows.extend(done);
        progress(rows.len(), configs.len());
    }
    Ok(SweepResult { rows })
}
