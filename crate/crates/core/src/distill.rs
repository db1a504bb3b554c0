//! Maximum-likelihood fitting by stochastic gradient ascent.
//!
//! The same routine serves supervised fine-tuning (student fit to fresh
//! ground-truth samples) and distillation (student fit to fresh samples of a
//! teacher whose mixture weights are sharpened by a sampling temper).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mog::{make_ground_truth, MixtureEval, MoGParams, ParamGrad, Point2, Sampler};
use crate::numerics::{sgd_step, Direction, OptimizerState};

pub const SFT_COMPONENTS: usize = 6;
pub const KD_TEMPER: f64 = 1.25;

/// Student means are initialised uniformly in `[-INIT_HALF_WIDTH, INIT_HALF_WIDTH]^2`.
pub const INIT_HALF_WIDTH: f64 = 2.0;
pub const INIT_VARIANCE: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitConfig {
    pub n_components: usize,
    pub iterations: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub temper: f64,
    pub init: StudentInit,
}

/// How a fresh student is placed before fitting.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudentInit {
    /// Means uniform on the init square.
    Uniform,
    /// Means at draws from the (tempered) source.
    #[default]
    SourceSamples,
    /// Copy of the source's highest-weight components after tempering.
    TopComponents,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            n_components: SFT_COMPONENTS,
            iterations: 2000,
            batch_size: 256,
            learning_rate: 1e-2,
            temper: 1.0,
            init: StudentInit::default(),
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_components == 0 || self.iterations == 0 || self.batch_size == 0 {
            return Err(Error::InvalidArgument(
                "fit counts (components, iterations, batch size) must be positive".into(),
            ));
        }
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "fit learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if !self.temper.is_finite() || self.temper < 1.0 {
            return Err(Error::InvalidArgument(format!(
                "fit temper must be >= 1, got {}",
                self.temper
            )));
        }
        Ok(())
    }
}

/// Fresh student: uniform logits, means uniform on the init square, fixed variance.
pub fn init_student<R: Rng + ?Sized>(n_components: usize, rng: &mut R) -> Result<MoGParams> {
    let means = (0..n_components)
        .map(|_| {
            Point2::new(
                rng.random_range(-INIT_HALF_WIDTH..INIT_HALF_WIDTH),
                rng.random_range(-INIT_HALF_WIDTH..INIT_HALF_WIDTH),
            )
        })
        .collect();
    MoGParams::uniform(means, INIT_VARIANCE)
}

/// The `n` heaviest components of `source` under `temper`, with their
/// tempered weights renormalised. Falls back to all components when `n`
/// exceeds the source size.
pub fn top_components(source: &MoGParams, n: usize, temper: f64) -> Result<MoGParams> {
    let w = crate::mog::tempered_weights(&source.weights(), temper)?;
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by(|&a, &b| w[b].total_cmp(&w[a]).then(a.cmp(&b)));
    order.truncate(n);
    let logits = order
        .iter()
        .map(|&k| w[k].max(f64::MIN_POSITIVE).ln())
        .collect();
    let means = order.iter().map(|&k| source.means()[k]).collect();
    let log_stds = order.iter().map(|&k| source.log_stds()[k]).collect();
    MoGParams::new(logits, means, log_stds)
}

/// Fitted model plus the batch-average log-likelihood recorded before each step.
#[derive(Clone, Debug)]
pub struct FitOutcome {
    pub model: MoGParams,
    pub log_likelihood: Vec<f64>,
}

/// Fits a freshly initialised student to samples of `source`.
pub fn fit_mle<R: Rng + ?Sized>(
    source: &MoGParams,
    cfg: &FitConfig,
    rng: &mut R,
) -> Result<MoGParams> {
    Ok(fit_mle_traced(source, cfg, rng)?.model)
}

pub fn fit_mle_traced<R: Rng + ?Sized>(
    source: &MoGParams,
    cfg: &FitConfig,
    rng: &mut R,
) -> Result<FitOutcome> {
    cfg.validate()?;
    let init = match cfg.init {
        StudentInit::Uniform => init_student(cfg.n_components, rng)?,
        StudentInit::SourceSamples => {
            let means = crate::mog::sample(source, cfg.temper, cfg.n_components, rng)?;
            MoGParams::uniform(means, INIT_VARIANCE)?
        }
        StudentInit::TopComponents => top_components(source, cfg.n_components, cfg.temper)?,
    };
    fit_mle_from(init, source, cfg, rng)
}

/// Stochastic gradient ascent on the batch-average log-likelihood, starting
/// from `init`. `cfg.n_components` is ignored in favour of `init`'s shape.
pub fn fit_mle_from<R: Rng + ?Sized>(
    init: MoGParams,
    source: &MoGParams,
    cfg: &FitConfig,
    rng: &mut R,
) -> Result<FitOutcome> {
    cfg.validate()?;
    let sampler = Sampler::new(source, cfg.temper)?;
    let mut opt = OptimizerState::new(cfg.learning_rate)?;
    let mut model = init;
    let mut batch = Vec::with_capacity(cfg.batch_size);
    let mut trace = Vec::with_capacity(cfg.iterations);
    let inv_n = 1.0 / cfg.batch_size as f64;

    for _ in 0..cfg.iterations {
        sampler.fill(cfg.batch_size, rng, &mut batch);
        let eval = MixtureEval::new(&model);
        let mut grad = ParamGrad::zeros(model.n_components());
        let mut ll = 0.0;
        for p in &batch {
            ll += eval.accumulate_grad(p, inv_n, &mut grad);
        }
        trace.push(ll * inv_n);
        model = sgd_step(&model, &grad, &mut opt, Direction::Ascend)?;
    }
    Ok(FitOutcome {
        model,
        log_likelihood: trace,
    })
}

/// High-recall model: six components fit to ground-truth samples.
pub fn run_sft<R: Rng + ?Sized>(rng: &mut R) -> Result<MoGParams> {
    fit_mle(&make_ground_truth(), &FitConfig::default(), rng)
}

/// Distils `teacher` into `n_final` components from samples at temper 1.25.
pub fn run_kd<R: Rng + ?Sized>(
    teacher: &MoGParams,
    n_final: usize,
    rng: &mut R,
) -> Result<MoGParams> {
    let cfg = kd_config(n_final, KD_TEMPER, &FitConfig::default());
    fit_mle(teacher, &cfg, rng)
}

/// `base` with the component count, sampling temper and teacher-seeded init
/// of a distillation run.
pub fn kd_config(n_final: usize, temper: f64, base: &FitConfig) -> FitConfig {
    FitConfig {
        n_components: n_final,
        temper,
        init: StudentInit::TopComponents,
        ..base.clone()
    }
}
