//! End-to-end distill-then-align (KA) and align-then-distill (AK) workflows.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::align::{align, AlignConfig, TrainLog};
use crate::distill::{fit_mle, kd_config, FitConfig, StudentInit, KD_TEMPER};
use crate::error::{Error, Result};
use crate::metrics::{evaluate_metrics, MetricsReport, DEFAULT_METRIC_SAMPLES, MIN_METRIC_SAMPLES};
use crate::mog::{GroundTruthSpec, MoGParams};
use crate::reward::RewardSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    /// Distill, then align against the distilled reference.
    KA,
    /// Align the high-recall model, then distill the aligned model.
    AK,
}

impl Variant {
    pub const BOTH: [Variant; 2] = [Variant::KA, Variant::AK];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::KA => "KA",
            Variant::AK => "AK",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().replace('-', "").as_str() {
            "KA" => Ok(Variant::KA),
            "AK" => Ok(Variant::AK),
            _ => Err(Error::InvalidArgument(format!(
                "unknown pipeline variant `{s}`"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub variant: Variant,
    pub align: AlignConfig,
    pub n_final: usize,
    pub kd_temper: f64,
    pub kd_init: StudentInit,
    pub seed: u64,
    pub reward: RewardSpec,
    pub metric_samples: usize,
    /// Recipe shared by SFT and both distillation steps (component count and
    /// temper are overridden per stage).
    pub fit: FitConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            variant: Variant::AK,
            align: AlignConfig::default(),
            n_final: 4,
            kd_temper: KD_TEMPER,
            kd_init: StudentInit::TopComponents,
            seed: 0,
            reward: RewardSpec::default(),
            metric_samples: DEFAULT_METRIC_SAMPLES,
            fit: FitConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if !matches!(self.n_final, 3 | 4) {
            return Err(Error::InvalidArgument(format!(
                "final model must have 3 or 4 components, got {}",
                self.n_final
            )));
        }
        if !self.kd_temper.is_finite() || self.kd_temper < 1.0 {
            return Err(Error::InvalidArgument(format!(
                "KD temper must be >= 1, got {}",
                self.kd_temper
            )));
        }
        if self.metric_samples < MIN_METRIC_SAMPLES {
            return Err(Error::InvalidArgument(format!(
                "metric evaluation needs at least {MIN_METRIC_SAMPLES} samples, got {}",
                self.metric_samples
            )));
        }
        self.align.validate()?;
        self.reward.validate()?;
        self.fit.validate()
    }

    fn sft_config(&self) -> FitConfig {
        FitConfig {
            temper: 1.0,
            ..self.fit.clone()
        }
    }

    fn kd_config(&self) -> FitConfig {
        FitConfig {
            init: self.kd_init,
            ..kd_config(self.n_final, self.kd_temper, &self.fit)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Sft,
    Kd,
    Align,
    Eval,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Sft => "sft",
            Stage::Kd => "kd",
            Stage::Align => "align",
            Stage::Eval => "eval",
        })
    }
}

#[derive(Debug, Error)]
#[error("pipeline failed during {stage}: {source}")]
pub struct PipelineFailure {
    pub stage: Stage,
    #[source]
    pub source: Error,
}

/// Independent generator seeds for each stage, derived from one run seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StageSeeds {
    pub sft: u64,
    pub kd: u64,
    pub align: u64,
    pub eval: u64,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

impl StageSeeds {
    pub fn derive(seed: u64) -> Self {
        let base = splitmix64(seed);
        let sub = |tag: u64| splitmix64(base ^ splitmix64(tag));
        StageSeeds {
            sft: sub(1),
            kd: sub(2),
            align: sub(3),
            eval: sub(4),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageMetrics {
    pub sft: MetricsReport,
    pub kd: MetricsReport,
    pub aligned: MetricsReport,
    #[serde(rename = "final")]
    pub final_model: MetricsReport,
}

#[derive(Clone, Debug)]
pub struct PipelineRun {
    pub variant: Variant,
    /// High-recall SFT model.
    pub sft: MoGParams,
    /// Output of the distillation step.
    pub kd: MoGParams,
    /// Output of the alignment step.
    pub aligned: MoGParams,
    pub metrics: StageMetrics,
    pub train_log: TrainLog,
}

impl PipelineRun {
    /// Model produced by the second stage of the workflow.
    pub fn final_model(&self) -> &MoGParams {
        match self.variant {
            Variant::KA => &self.aligned,
            Variant::AK => &self.kd,
        }
    }

    /// Model produced by the first stage after SFT.
    pub fn intermediate(&self) -> &MoGParams {
        match self.variant {
            Variant::KA => &self.kd,
            Variant::AK => &self.aligned,
        }
    }

    /// Writes sft.json, kd.json, aligned.json, final.json, metrics.json and
    /// train_log.csv into `dir`, creating it if needed.
    pub fn write_artifacts(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        self.sft.save_json(&dir.join("sft.json"))?;
        self.kd.save_json(&dir.join("kd.json"))?;
        self.aligned.save_json(&dir.join("aligned.json"))?;
        self.final_model().save_json(&dir.join("final.json"))?;
        let path = dir.join("metrics.json");
        let text =
            serde_json::to_string_pretty(&self.metrics).map_err(|e| Error::json(&path, e))?;
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        self.train_log.save_csv(&dir.join("train_log.csv"))
    }
}

fn at(stage: Stage) -> impl Fn(Error) -> PipelineFailure {
    move |source| PipelineFailure { stage, source }
}

pub fn run_pipeline(cfg: &PipelineConfig) -> std::result::Result<PipelineRun, PipelineFailure> {
    cfg.validate().map_err(at(Stage::Sft))?;
    let seeds = StageSeeds::derive(cfg.seed);
    let gt_spec = GroundTruthSpec::default();
    let gt = gt_spec.ground_truth();

    let sft = fit_mle(
        &gt,
        &cfg.sft_config(),
        &mut ChaCha8Rng::seed_from_u64(seeds.sft),
    )
    .map_err(at(Stage::Sft))?;
    let distill = |teacher: &MoGParams| {
        fit_mle(
            teacher,
            &cfg.kd_config(),
            &mut ChaCha8Rng::seed_from_u64(seeds.kd),
        )
        .map_err(at(Stage::Kd))
    };
    // the policy starts as a copy of its reference
    let align_from = |reference: &MoGParams| {
        align(
            reference,
            reference,
            &cfg.reward,
            &cfg.align,
            &mut ChaCha8Rng::seed_from_u64(seeds.align),
        )
        .map_err(at(Stage::Align))
    };

    let (kd, aligned, train_log) = match cfg.variant {
        Variant::KA => {
            let kd = distill(&sft)?;
            let (aligned, log) = align_from(&kd)?;
            (kd, aligned, log)
        }
        Variant::AK => {
            let (aligned, log) = align_from(&sft)?;
            let kd = distill(&aligned)?;
            (kd, aligned, log)
        }
    };

    let target = gt_spec.target();
    let evaluate = |m: &MoGParams| {
        evaluate_metrics(
            m,
            &gt,
            &target,
            &cfg.reward,
            cfg.metric_samples,
            &mut ChaCha8Rng::seed_from_u64(seeds.eval),
        )
        .map_err(at(Stage::Eval))
    };
    let final_model = match cfg.variant {
        Variant::KA => &aligned,
        Variant::AK => &kd,
    };
    let metrics = StageMetrics {
        sft: evaluate(&sft)?,
        kd: evaluate(&kd)?,
        aligned: evaluate(&aligned)?,
        final_model: evaluate(final_model)?,
    };

    Ok(PipelineRun {
        variant: cfg.variant,
        sft,
        kd,
        aligned,
        metrics,
        train_log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::align::Algorithm;

    fn quick(variant: Variant, algorithm: Algorithm) -> PipelineConfig {
        PipelineConfig {
            variant,
            align: AlignConfig {
                iterations: 30,
                offline_dataset_size: 512,
                ..AlignConfig::for_algorithm(algorithm)
            },
            fit: FitConfig {
                iterations: 100,
                ..FitConfig::default()
            },
            metric_samples: 2000,
            seed: 17,
            ..PipelineConfig::default()
        }
    }

    #[test]
    fn variant_parsing() {
        assert_eq!("ka".parse::<Variant>().unwrap(), Variant::KA);
        assert_eq!("A-K".parse::<Variant>().unwrap(), Variant::AK);
        assert!("xx".parse::<Variant>().is_err());
    }

    #[test]
    fn stage_seeds_are_distinct_and_stable() {
        let s = StageSeeds::derive(5);
        assert_eq!(s, StageSeeds::derive(5));
        let all = [s.sft, s.kd, s.align, s.eval];
        for i in 0..4 {
            for j in (i + 1)..4 {
                assert_ne!(all[i], all[j]);
            }
        }
        assert_ne!(StageSeeds::derive(6).sft, s.sft);
    }

    #[test]
    fn both_variants_share_sft_and_produce_final_shape() {
        for n_final in [3, 4] {
            let mut ka = quick(Variant::KA, Algorithm::Ppo);
            ka.n_final = n_final;
            let mut ak = ka.clone();
            ak.variant = Variant::AK;
            let a = run_pipeline(&ka).unwrap();
            let b = run_pipeline(&ak).unwrap();
            assert_eq!(a.sft, b.sft);
            assert_eq!(a.final_model().n_components(), n_final);
            assert_eq!(b.final_model().n_components(), n_final);
            assert_eq!(b.intermediate().n_components(), 6);
            assert_eq!(a.train_log.records.len(), 30);
        }
    }

    #[test]
    fn every_algorithm_runs() {
        for alg in Algorithm::ALL {
            let run = run_pipeline(&quick(Variant::AK, alg)).unwrap();
            assert!(run.metrics.final_model.final_avg_reward > 0.0);
        }
    }

    #[test]
    fn rejects_bad_n_final() {
        let mut cfg = quick(Variant::KA, Algorithm::Ppo);
        cfg.n_final = 5;
        assert!(run_pipeline(&cfg).is_err());
    }

    #[test]
    fn artifacts_written() {
        let dir = tempfile::tempdir().unwrap();
        let run = run_pipeline(&quick(Variant::KA, Algorithm::DpoOn)).unwrap();
        run.write_artifacts(dir.path()).unwrap();
        for f in [
            "sft.json",
            "kd.json",
            "aligned.json",
            "final.json",
            "metrics.json",
            "train_log.csv",
        ] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
        let fin = MoGParams::load_json(&dir.path().join("final.json")).unwrap();
        assert_eq!(&fin, run.final_model());
        let m: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(dir.path().join("metrics.json")).unwrap(),
        )
        .unwrap();
        assert!(m["final"]["overall_recall"].is_number());
    }
}
