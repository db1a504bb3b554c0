//! Precision/recall style metrics for a trained mixture, plus trap diagnostics.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::align::{dpo_logit, sigmoid};
use crate::error::{Error, Result};
use crate::mog::{MixtureEval, MoGParams, Point2, Sampler};
use crate::reward::{oracle_reward, PreferencePair, RewardSpec};

pub const DEFAULT_METRIC_SAMPLES: usize = 20_000;
pub const MIN_METRIC_SAMPLES: usize = 1000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// E_{x~q} log p*(x)
    pub overall_precision: f64,
    /// E_{x~p*} log q(x)
    pub overall_recall: f64,
    /// E_{x~q} log p_target(x)
    pub target_precision: f64,
    /// E_{x~q} R(x)
    pub final_avg_reward: f64,
    pub n_samples: usize,
}

/// Monte-Carlo standard errors matching the fields of [`MetricsReport`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricErrors {
    pub overall_precision: f64,
    pub overall_recall: f64,
    pub target_precision: f64,
    pub final_avg_reward: f64,
}

#[derive(Default)]
struct Moments {
    n: f64,
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        self.sum += x;
        self.sum_sq += x * x;
    }

    fn mean(&self) -> f64 {
        self.sum / self.n
    }

    fn std_error(&self) -> f64 {
        let m = self.mean();
        let var = (self.sum_sq / self.n - m * m).max(0.0) * self.n / (self.n - 1.0);
        (var / self.n).sqrt()
    }
}

pub fn evaluate_metrics<R: Rng + ?Sized>(
    q: &MoGParams,
    gt: &MoGParams,
    target: &MoGParams,
    spec: &RewardSpec,
    n: usize,
    rng: &mut R,
) -> Result<MetricsReport> {
    Ok(evaluate_metrics_with_errors(q, gt, target, spec, n, rng)?.0)
}

/// Draws `n` points from `q` (precision, target precision, reward) and `n`
/// points from `gt` (recall).
pub fn evaluate_metrics_with_errors<R: Rng + ?Sized>(
    q: &MoGParams,
    gt: &MoGParams,
    target: &MoGParams,
    spec: &RewardSpec,
    n: usize,
    rng: &mut R,
) -> Result<(MetricsReport, MetricErrors)> {
    if n < MIN_METRIC_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "metric evaluation needs at least {MIN_METRIC_SAMPLES} samples, got {n}"
        )));
    }
    spec.validate()?;
    let q_eval = MixtureEval::new(q);
    let gt_eval = MixtureEval::new(gt);
    let target_eval = MixtureEval::new(target);

    let q_sampler = Sampler::new(q, 1.0)?;
    let (mut prec, mut tprec, mut reward) =
        (Moments::default(), Moments::default(), Moments::default());
    for _ in 0..n {
        let x = q_sampler.draw(rng);
        prec.push(gt_eval.log_density(&x));
        tprec.push(target_eval.log_density(&x));
        reward.push(oracle_reward(&x, spec));
    }
    let gt_sampler = Sampler::new(gt, 1.0)?;
    let mut recall = Moments::default();
    for _ in 0..n {
        recall.push(q_eval.log_density(&gt_sampler.draw(rng)));
    }

    Ok((
        MetricsReport {
            overall_precision: prec.mean(),
            overall_recall: recall.mean(),
            target_precision: tprec.mean(),
            final_avg_reward: reward.mean(),
            n_samples: n,
        },
        MetricErrors {
            overall_precision: prec.std_error(),
            overall_recall: recall.std_error(),
            target_precision: tprec.std_error(),
            final_avg_reward: reward.std_error(),
        },
    ))
}

/// Fraction of `n` draws from `q` whose normalized reward is at least
/// `threshold_norm`.
pub fn high_reward_fraction<R: Rng + ?Sized>(
    q: &MoGParams,
    spec: &RewardSpec,
    threshold_norm: f64,
    n: usize,
    rng: &mut R,
) -> Result<f64> {
    if !(threshold_norm > 0.0 && threshold_norm < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "normalized reward threshold must lie in (0, 1), got {threshold_norm}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("sample count must be >= 1".into()));
    }
    let sampler = Sampler::new(q, 1.0)?;
    let hits = (0..n)
        .filter(|_| spec.normalized(&sampler.draw(rng)) >= threshold_norm)
        .count();
    Ok(hits as f64 / n as f64)
}

/// Smallest half-width of the quadrature square.
pub const QUADRATURE_HALF_WIDTH: f64 = 4.0;
pub const QUADRATURE_NODES: usize = 400;
/// The square also reaches this many standard deviations past every mean.
pub const QUADRATURE_SIGMAS: f64 = 8.0;

/// Half-width of the centred square holding `q`'s mass: at least
/// [`QUADRATURE_HALF_WIDTH`], widened so each component is covered to
/// [`QUADRATURE_SIGMAS`] standard deviations.
pub fn quadrature_half_width(q: &MoGParams) -> f64 {
    q.means()
        .iter()
        .zip(q.log_stds())
        .map(|(m, ls)| m.x.abs().max(m.y.abs()) + QUADRATURE_SIGMAS * ls.exp())
        .fold(QUADRATURE_HALF_WIDTH, f64::max)
}

/// Midpoint-rule integral of `q` on a 400x400 grid over the square from
/// [`quadrature_half_width`]. For the ground truth that is `[-4, 4]^2`.
pub fn normalization_check(q: &MoGParams) -> f64 {
    let eval = MixtureEval::new(q);
    let half = quadrature_half_width(q);
    let h = 2.0 * half / QUADRATURE_NODES as f64;
    let coord = |i: usize| -half + (i as f64 + 0.5) * h;
    let mut total = 0.0;
    for i in 0..QUADRATURE_NODES {
        let x = coord(i);
        for j in 0..QUADRATURE_NODES {
            total += eval.log_density(&Point2::new(x, coord(j))).exp();
        }
    }
    total * h * h
}

/// Per-pair DPO gradient scale `sigmoid(-z)` together with the logit `z`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Starvation {
    pub factor: f64,
    pub logit: f64,
}

pub fn starvation_factor(
    reference: &MoGParams,
    policy: &MoGParams,
    pair: &PreferencePair,
    beta: f64,
) -> Result<Starvation> {
    if !beta.is_finite() || beta <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "beta must be positive, got {beta}"
        )));
    }
    let z = dpo_logit(
        &MixtureEval::new(policy),
        &MixtureEval::new(reference),
        pair,
        beta,
    );
    Ok(Starvation {
        factor: sigmoid(-z),
        logit: z,
    })
}
