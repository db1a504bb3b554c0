//! Preference-alignment trainers anchored to a frozen reference mixture.
//!
//! All trainers use score-function gradients: for a batch of samples
//! `x_i ~ pi_theta`, the update direction is a weighted average of
//! `grad log pi_theta(x_i)`. One optimizer step is taken per sampled batch.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mog::{MixtureEval, MoGParams, ParamGrad, Point2, Sampler};
use crate::numerics::{baseline_update, sgd_step, Direction, OptimizerState, ScalarBaseline};
use crate::reward::{prefer, shaped_reward, PreferencePair, RewardSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Ppo,
    Grpo,
    DpoOn,
    DpoOff,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Ppo,
        Algorithm::Grpo,
        Algorithm::DpoOn,
        Algorithm::DpoOff,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Ppo => "ppo",
            Algorithm::Grpo => "grpo",
            Algorithm::DpoOn => "dpo_on",
            Algorithm::DpoOff => "dpo_off",
        }
    }

    pub fn is_dpo(self) -> bool {
        matches!(self, Algorithm::DpoOn | Algorithm::DpoOff)
    }

    /// 2200 iterations for the RL trainers, 900 for DPO.
    pub fn default_iterations(self) -> usize {
        if self.is_dpo() {
            900
        } else {
            2200
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlignConfig {
    pub algorithm: Algorithm,
    /// KL coefficient for PPO/GRPO, logit scale for DPO.
    pub beta: f64,
    pub iterations: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    /// Number of preference pairs in the fixed off-policy DPO dataset.
    pub offline_dataset_size: usize,
    /// Step size of the PPO scalar critic.
    pub baseline_learning_rate: f64,
}

impl Default for AlignConfig {
    fn default() -> Self {
        AlignConfig::for_algorithm(Algorithm::Ppo)
    }
}

impl AlignConfig {
    pub fn for_algorithm(algorithm: Algorithm) -> Self {
        AlignConfig {
            algorithm,
            beta: 1.0,
            iterations: algorithm.default_iterations(),
            batch_size: 256,
            learning_rate: 1e-2,
            offline_dataset_size: 25_600,
            baseline_learning_rate: 0.1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 || self.batch_size == 0 || self.offline_dataset_size == 0 {
            return Err(Error::InvalidArgument(
                "alignment counts must be positive".into(),
            ));
        }
        if !self.beta.is_finite() || self.beta < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "beta must be finite and >= 0, got {}",
                self.beta
            )));
        }
        for (name, v) in [
            ("learning rate", self.learning_rate),
            ("baseline learning rate", self.baseline_learning_rate),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    fn expect(&self, allowed: &[Algorithm]) -> Result<()> {
        self.validate()?;
        if !allowed.contains(&self.algorithm) {
            return Err(Error::InvalidArgument(format!(
                "trainer called with algorithm `{}`",
                self.algorithm
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainRecord {
    pub iteration: usize,
    pub mean_reward: f64,
    pub std_reward: f64,
    pub kl_estimate: f64,
    pub loss: Option<f64>,
}

/// One record per training iteration.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainLog {
    pub records: Vec<TrainRecord>,
}

impl TrainLog {
    pub const CSV_HEADER: [&'static str; 5] = [
        "iteration",
        "mean_reward",
        "std_reward",
        "kl_estimate",
        "loss",
    ];

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(Self::CSV_HEADER)?;
        for r in &self.records {
            w.write_record([
                r.iteration.to_string(),
                r.mean_reward.to_string(),
                r.std_reward.to_string(),
                r.kl_estimate.to_string(),
                r.loss.map(|l| l.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
            .map_err(|e| Error::csv(path, e))
    }

    fn push(&mut self, rewards: &[f64], kl_estimate: f64, loss: Option<f64>) {
        let (mean, std) = mean_std(rewards);
        self.records.push(TrainRecord {
            iteration: self.records.len(),
            mean_reward: mean,
            std_reward: std,
            kl_estimate,
            loss,
        });
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Runs the trainer selected by `cfg.algorithm`.
pub fn align<R: Rng + ?Sized>(
    init: &MoGParams,
    reference: &MoGParams,
    spec: &RewardSpec,
    cfg: &AlignConfig,
    rng: &mut R,
) -> Result<(MoGParams, TrainLog)> {
    match cfg.algorithm {
        Algorithm::Ppo => ppo_align(init, reference, spec, cfg, rng),
        Algorithm::Grpo => grpo_align(init, reference, spec, cfg, rng),
        Algorithm::DpoOn | Algorithm::DpoOff => dpo_align(init, reference, spec, cfg, rng),
    }
}

/// Per-sample quantities shared by the RL trainers.
struct RlBatch {
    points: Vec<Point2>,
    rewards: Vec<f64>,
    log_ratio: Vec<f64>,
}

fn rl_batch<R: Rng + ?Sized>(
    policy: &MixtureEval,
    sampler: &Sampler,
    reference: &MixtureEval,
    spec: &RewardSpec,
    n: usize,
    rng: &mut R,
) -> RlBatch {
    let mut points = Vec::with_capacity(n);
    sampler.fill(n, rng, &mut points);
    let rewards = points.iter().map(|p| spec.reward(p)).collect();
    let log_ratio = points
        .iter()
        .map(|p| policy.log_density(p) - reference.log_density(p))
        .collect();
    RlBatch {
        points,
        rewards,
        log_ratio,
    }
}

fn weighted_score(eval: &MixtureEval, points: &[Point2], weights: &[f64]) -> ParamGrad {
    let mut grad = ParamGrad::zeros(eval.n_components());
    for (p, w) in points.iter().zip(weights) {
        eval.accumulate_grad(p, *w, &mut grad);
    }
    grad
}

/// Actor-critic policy gradient on the KL-shaped reward
/// `R(x) - beta (log pi_theta(x) - log pi_ref(x))`, with a learned scalar
/// baseline as critic. A single step per batch means the importance ratio
/// is always one, so clipping never activates and is left out.
pub fn ppo_align<R: Rng + ?Sized>(
    init: &MoGParams,
    reference: &MoGParams,
    spec: &RewardSpec,
    cfg: &AlignConfig,
    rng: &mut R,
) -> Result<(MoGParams, TrainLog)> {
    cfg.expect(&[Algorithm::Ppo])?;
    spec.validate()?;
    let ref_eval = MixtureEval::new(reference);
    let mut policy = init.clone();
    let mut opt = OptimizerState::new(cfg.learning_rate)?;
    let mut critic = ScalarBaseline::new(cfg.baseline_learning_rate)?;
    let mut log = TrainLog::default();
    let inv_n = 1.0 / cfg.batch_size as f64;

    for _ in 0..cfg.iterations {
        let eval = MixtureEval::new(&policy);
        let sampler = Sampler::new(&policy, 1.0)?;
        let batch = rl_batch(&eval, &sampler, &ref_eval, spec, cfg.batch_size, rng);
        let shaped: Vec<f64> = batch
            .rewards
            .iter()
            .zip(&batch.log_ratio)
            .map(|(r, lr)| shaped_reward(*r, *lr, 0.0, cfg.beta))
            .collect();
        let weights: Vec<f64> = shaped.iter().map(|s| (s - critic.value) * inv_n).collect();
        let grad = weighted_score(&eval, &batch.points, &weights);
        let step = opt.step_count;
        policy = sgd_step(&policy, &grad, &mut opt, Direction::Ascend)?;
        critic = baseline_update(&critic, &shaped).map_err(|_| Error::Diverged { step })?;
        log.push(&batch.rewards, mean_std(&batch.log_ratio).0, None);
    }
    Ok((policy, log))
}

/// Critic-free policy gradient: advantage is reward minus the batch mean
/// reward, and the KL penalty enters through its score-function gradient
/// `E[(log pi_theta - log pi_ref) grad log pi_theta]`.
pub fn grpo_align<R: Rng + ?Sized>(
    init: &MoGParams,
    reference: &MoGParams,
    spec: &RewardSpec,
    cfg: &AlignConfig,
    rng: &mut R,
) -> Result<(MoGParams, TrainLog)> {
    cfg.expect(&[Algorithm::Grpo])?;
    spec.validate()?;
    let ref_eval = MixtureEval::new(reference);
    let mut policy = init.clone();
    let mut opt = OptimizerState::new(cfg.learning_rate)?;
    let mut log = TrainLog::default();
    let inv_n = 1.0 / cfg.batch_size as f64;

    for _ in 0..cfg.iterations {
        let eval = MixtureEval::new(&policy);
        let sampler = Sampler::new(&policy, 1.0)?;
        let batch = rl_batch(&eval, &sampler, &ref_eval, spec, cfg.batch_size, rng);
        let mean_r = mean_std(&batch.rewards).0;
        let weights: Vec<f64> = batch
            .rewards
            .iter()
            .zip(&batch.log_ratio)
            .map(|(r, lr)| ((r - mean_r) - cfg.beta * lr) * inv_n)
            .collect();
        let grad = weighted_score(&eval, &batch.points, &weights);
        policy = sgd_step(&policy, &grad, &mut opt, Direction::Ascend)?;
        log.push(&batch.rewards, mean_std(&batch.log_ratio).0, None);
    }
    Ok((policy, log))
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `-log sigmoid(z)` without overflow.
pub fn neg_log_sigmoid(z: f64) -> f64 {
    (-z).max(0.0) + (-z.abs()).exp().ln_1p()
}

/// DPO logit
/// `z = beta [(log pi(y_w) - log pi(y_l)) + (log ref(y_l) - log ref(y_w))]`.
pub fn dpo_logit(
    policy: &MixtureEval,
    reference: &MixtureEval,
    pair: &PreferencePair,
    beta: f64,
) -> f64 {
    let policy_margin = policy.log_density(&pair.winner) - policy.log_density(&pair.loser);
    let ref_offset = reference.log_density(&pair.loser) - reference.log_density(&pair.winner);
    beta * (policy_margin + ref_offset)
}

/// Mean DPO loss over `pairs` and its gradient with respect to the policy.
///
/// Each pair contributes `-beta * sigmoid(-z)` times the winner's score and
/// `+beta * sigmoid(-z)` times the loser's score.
pub fn dpo_loss(
    policy: &MoGParams,
    reference: &MoGParams,
    pairs: &[PreferencePair],
    beta: f64,
) -> Result<(f64, ParamGrad)> {
    dpo_loss_eval(
        &MixtureEval::new(policy),
        &MixtureEval::new(reference),
        pairs,
        beta,
    )
}

fn dpo_loss_eval(
    policy: &MixtureEval,
    reference: &MixtureEval,
    pairs: &[PreferencePair],
    beta: f64,
) -> Result<(f64, ParamGrad)> {
    if pairs.is_empty() {
        return Err(Error::InvalidArgument("no preference pairs".into()));
    }
    let inv_n = 1.0 / pairs.len() as f64;
    let mut grad = ParamGrad::zeros(policy.n_components());
    let mut loss = 0.0;
    for pair in pairs {
        let z = dpo_logit(policy, reference, pair, beta);
        loss += neg_log_sigmoid(z);
        let coef = beta * sigmoid(-z) * inv_n;
        policy.accumulate_grad(&pair.winner, -coef, &mut grad);
        policy.accumulate_grad(&pair.loser, coef, &mut grad);
    }
    Ok((loss * inv_n, grad))
}

fn pair_up(points: &[Point2], spec: &RewardSpec) -> Vec<PreferencePair> {
    points
        .chunks_exact(2)
        .map(|c| prefer(c[0], c[1], spec))
        .collect()
}

/// DPO by gradient descent on [`dpo_loss`].
///
/// On-policy: each iteration draws `2 * batch_size` points from the current
/// policy and pairs them consecutively. Off-policy: a fixed set of
/// `offline_dataset_size` pairs is drawn once from the reference and
/// consumed in shuffled minibatches, reshuffling at every epoch.
pub fn dpo_align<R: Rng + ?Sized>(
    init: &MoGParams,
    reference: &MoGParams,
    spec: &RewardSpec,
    cfg: &AlignConfig,
    rng: &mut R,
) -> Result<(MoGParams, TrainLog)> {
    cfg.expect(&[Algorithm::DpoOn, Algorithm::DpoOff])?;
    spec.validate()?;
    let ref_eval = MixtureEval::new(reference);
    let mut policy = init.clone();
    let mut opt = OptimizerState::new(cfg.learning_rate)?;
    let mut log = TrainLog::default();
    let mut points = Vec::with_capacity(2 * cfg.batch_size);

    let offline = if cfg.algorithm == Algorithm::DpoOff {
        let sampler = Sampler::new(reference, 1.0)?;
        sampler.fill(2 * cfg.offline_dataset_size, rng, &mut points);
        Some(pair_up(&points, spec))
    } else {
        None
    };
    let mut order: Vec<usize> = (0..offline.as_ref().map_or(0, Vec::len)).collect();
    let mut cursor = order.len();

    for _ in 0..cfg.iterations {
        let eval = MixtureEval::new(&policy);
        let sampler = Sampler::new(&policy, 1.0)?;
        let pairs = match &offline {
            None => {
                sampler.fill(2 * cfg.batch_size, rng, &mut points);
                pair_up(&points, spec)
            }
            Some(data) => {
                let take = cfg.batch_size.min(data.len());
                if cursor + take > order.len() {
                    order.shuffle(rng);
                    cursor = 0;
                }
                let mb = order[cursor..cursor + take]
                    .iter()
                    .map(|&i| data[i])
                    .collect();
                cursor += take;
                // monitoring draws from the current policy
                sampler.fill(cfg.batch_size, rng, &mut points);
                mb
            }
        };
        let (loss, grad) = dpo_loss_eval(&eval, &ref_eval, &pairs, cfg.beta)?;
        policy = sgd_step(&policy, &grad, &mut opt, Direction::Descend)?;

        let rewards: Vec<f64> = points.iter().map(|p| spec.reward(p)).collect();
        let kl = points
            .iter()
            .map(|p| eval.log_density(p) - ref_eval.log_density(p))
            .sum::<f64>()
            / points.len() as f64;
        log.push(&rewards, kl, Some(loss));
    }
    Ok((policy, log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mog::{make_ground_truth, make_target};
    use crate::numerics::{five_point_differences, max_relative_error};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small_cfg(algorithm: Algorithm, beta: f64, iterations: usize) -> AlignConfig {
        AlignConfig {
            beta,
            iterations,
            ..AlignConfig::for_algorithm(algorithm)
        }
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.as_str().parse::<Algorithm>().unwrap(), a);
            assert_eq!(serde_json::to_string(&a).unwrap(), format!("\"{a}\""));
        }
        assert!("kto".parse::<Algorithm>().is_err());
    }

    #[test]
    fn dpo_loss_at_reference_is_ln2() {
        let gt = make_ground_truth();
        let spec = RewardSpec::default();
        let pts = crate::mog::sample(&gt, 1.0, 64, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let pairs = pair_up(&pts, &spec);
        let (loss, _) = dpo_loss(&gt, &gt, &pairs, 0.7).unwrap();
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn dpo_coefficient_at_zero_logit() {
        // one pair, policy == ref: gradient = -beta/2 (score(w) - score(l))
        let gt = make_ground_truth();
        let pair = PreferencePair {
            winner: Point2::new(1.4, -1.6),
            loser: Point2::new(-1.5, 0.1),
        };
        let beta = 1.3;
        let (_, grad) = dpo_loss(&gt, &gt, &[pair], beta).unwrap();
        let mut expect = crate::mog::grad_log_density(&gt, &pair.winner);
        expect.scale(-beta * 0.5);
        expect.add_scaled(&crate::mog::grad_log_density(&gt, &pair.loser), beta * 0.5);
        assert!(max_relative_error(&grad.to_flat(), &expect.to_flat()) < 1e-12);
    }

    fn random_model(k: usize, rng: &mut ChaCha8Rng) -> MoGParams {
        MoGParams::new(
            (0..k).map(|_| rng.random_range(-0.5..0.5)).collect(),
            (0..k)
                .map(|_| Point2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect(),
            (0..k).map(|_| rng.random_range(-0.4..0.3)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn dpo_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let spec = RewardSpec::default();
        for _ in 0..10 {
            let reference = random_model(3, &mut rng);
            let flat: Vec<f64> = reference
                .to_flat()
                .iter()
                .map(|v| v + rng.random_range(-0.2..0.2))
                .collect();
            let policy = MoGParams::from_flat(3, &flat).unwrap();
            let pts = crate::mog::sample(&policy, 1.0, 8, &mut rng).unwrap();
            let pairs = pair_up(&pts, &spec);
            let (_, grad) = dpo_loss(&policy, &reference, &pairs, 0.8).unwrap();
            let numeric = five_point_differences(&flat, 1e-3, |x| {
                let m = MoGParams::from_flat(3, x)?;
                Ok(dpo_loss(&m, &reference, &pairs, 0.8)?.0)
            })
            .unwrap();
            let err = max_relative_error(&grad.to_flat(), &numeric);
            assert!(err < 1e-5, "{err}");
        }
    }

    #[test]
    fn dpo_rejects_empty_pairs() {
        let gt = make_ground_truth();
        assert!(dpo_loss(&gt, &gt, &[], 1.0).is_err());
    }

    #[test]
    fn sigmoid_helpers_are_stable() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!(sigmoid(-800.0) >= 0.0 && sigmoid(800.0) == 1.0);
        assert!((neg_log_sigmoid(0.0) - std::f64::consts::LN_2).abs() < 1e-15);
        assert!((neg_log_sigmoid(-800.0) - 800.0).abs() < 1e-9);
        assert!(neg_log_sigmoid(800.0) >= 0.0);
    }

    #[test]
    fn dpo_beta_zero_leaves_policy_unchanged() {
        let gt = make_ground_truth();
        for alg in [Algorithm::DpoOn, Algorithm::DpoOff] {
            let mut cfg = small_cfg(alg, 0.0, 20);
            cfg.offline_dataset_size = 300;
            let (out, log) = dpo_align(
                &gt,
                &gt,
                &RewardSpec::default(),
                &cfg,
                &mut ChaCha8Rng::seed_from_u64(2),
            )
            .unwrap();
            assert_eq!(out, gt);
            assert!(log
                .records
                .iter()
                .all(|r| (r.loss.unwrap() - std::f64::consts::LN_2).abs() < 1e-12));
        }
    }

    #[test]
    fn ppo_at_optimum_keeps_reward() {
        let target = make_target();
        let (_, log) = ppo_align(
            &target,
            &target,
            &RewardSpec::default(),
            &small_cfg(Algorithm::Ppo, 0.0, 100),
            &mut ChaCha8Rng::seed_from_u64(3),
        )
        .unwrap();
        let tail: f64 = log.records[80..].iter().map(|r| r.mean_reward).sum::<f64>() / 20.0;
        assert!(tail > 8.0, "{tail}");
    }

    #[test]
    fn grpo_beta_zero_has_zero_kl_term() {
        // with constant reward and beta=0 every weight is exactly zero
        let gt = make_ground_truth();
        let spec = RewardSpec {
            sharpness: 1e-300,
            ..RewardSpec::default()
        };
        let (out, _) = grpo_align(
            &gt,
            &gt,
            &spec,
            &small_cfg(Algorithm::Grpo, 0.0, 50),
            &mut ChaCha8Rng::seed_from_u64(4),
        )
        .unwrap();
        assert_eq!(out, gt);
    }

    #[test]
    fn trainers_reject_mismatched_algorithm() {
        let gt = make_ground_truth();
        let spec = RewardSpec::default();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(ppo_align(
            &gt,
            &gt,
            &spec,
            &small_cfg(Algorithm::Grpo, 1.0, 1),
            &mut rng
        )
        .is_err());
        assert!(grpo_align(
            &gt,
            &gt,
            &spec,
            &small_cfg(Algorithm::Ppo, 1.0, 1),
            &mut rng
        )
        .is_err());
        assert!(dpo_align(
            &gt,
            &gt,
            &spec,
            &small_cfg(Algorithm::Ppo, 1.0, 1),
            &mut rng
        )
        .is_err());
    }

    #[test]
    fn trainers_are_reproducible_and_log_every_iteration() {
        let gt = make_ground_truth();
        let spec = RewardSpec::default();
        for alg in Algorithm::ALL {
            let mut cfg = small_cfg(alg, 0.5, 15);
            cfg.offline_dataset_size = 500;
            let a = align(&gt, &gt, &spec, &cfg, &mut ChaCha8Rng::seed_from_u64(8)).unwrap();
            let b = align(&gt, &gt, &spec, &cfg, &mut ChaCha8Rng::seed_from_u64(8)).unwrap();
            assert_eq!(a.0.to_flat(), b.0.to_flat(), "{alg}");
            assert_eq!(a.1, b.1);
            assert_eq!(a.1.records.len(), 15);
            assert_eq!(a.1.records[14].iteration, 14);
        }
    }

    #[test]
    fn train_log_csv_layout() {
        let mut log = TrainLog::default();
        log.push(&[1.0, 3.0], 0.25, None);
        log.push(&[2.0, 2.0], 0.5, Some(0.7));
        let mut buf = Vec::new();
        log.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "iteration,mean_reward,std_reward,kl_estimate,loss\n0,2,1,0.25,\n1,2,0,0.5,0.7\n"
        );
    }
}
