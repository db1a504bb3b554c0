//! Gradient steps, the finite-difference oracle and the scalar critic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mog::{grad_log_density, log_density, MoGParams, ParamGrad, Point2};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Ascend,
    Descend,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Ascend => 1.0,
            Direction::Descend => -1.0,
        }
    }
}

/// Plain SGD state.
#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerState {
    learning_rate: f64,
    pub step_count: u64,
}

impl OptimizerState {
    pub fn new(learning_rate: f64) -> Result<Self> {
        if !learning_rate.is_finite() || learning_rate <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "learning rate must be finite and positive, got {learning_rate}"
            )));
        }
        Ok(OptimizerState {
            learning_rate,
            step_count: 0,
        })
    }

    pub fn learning_rate(&self) -> f64 {
        self.learning_rate
    }
}

/// Moves every parameter by `±lr * gradient` and returns the new model.
///
/// A non-finite gradient, or a step that lands on non-finite parameters,
/// is reported as divergence at the current step index.
pub fn sgd_step(
    params: &MoGParams,
    gradient: &ParamGrad,
    state: &mut OptimizerState,
    direction: Direction,
) -> Result<MoGParams> {
    if gradient.n_components() != params.n_components() {
        return Err(Error::InvalidArgument(format!(
            "gradient has {} components, model has {}",
            gradient.n_components(),
            params.n_components()
        )));
    }
    let step = state.step_count;
    if !gradient.is_finite() {
        return Err(Error::Diverged { step });
    }
    let s = direction.sign() * state.learning_rate;
    let flat: Vec<f64> = params
        .to_flat()
        .iter()
        .zip(gradient.to_flat())
        .map(|(p, g)| p + s * g)
        .collect();
    let next =
        MoGParams::from_flat(params.n_components(), &flat).map_err(|_| Error::Diverged { step })?;
    state.step_count += 1;
    Ok(next)
}

/// Worst relative error between the analytic gradient of `log q(p)` and
/// central differences with step `h`, over every parameter coordinate.
///
/// Relative error uses `max(|analytic|, |numeric|, 1e-8)` as denominator.
pub fn finite_diff_check(model: &MoGParams, p: &Point2, h: f64) -> Result<f64> {
    if !(h > 0.0 && h <= 1e-2) {
        return Err(Error::InvalidArgument(format!(
            "finite-difference step must lie in (0, 1e-2], got {h}"
        )));
    }
    let analytic = grad_log_density(model, p).to_flat();
    let numeric = central_differences(&model.to_flat(), h, |flat| {
        let m = MoGParams::from_flat(model.n_components(), flat)?;
        Ok(log_density(&m, p))
    })?;
    Ok(max_relative_error(&analytic, &numeric))
}

/// Central-difference gradient of `f` at `x`.
pub fn central_differences<F>(x: &[f64], h: f64, mut f: F) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let mut work = x.to_vec();
    let mut out = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        work[i] = x[i] + h;
        let plus = f(&work)?;
        work[i] = x[i] - h;
        let minus = f(&work)?;
        work[i] = x[i];
        out.push((plus - minus) / (2.0 * h));
    }
    Ok(out)
}

/// Fourth-order central stencil `(-f(x+2h) + 8f(x+h) - 8f(x-h) + f(x-2h)) / 12h`.
/// Lets the step grow (and round-off shrink) without losing accuracy.
pub fn five_point_differences<F>(x: &[f64], h: f64, mut f: F) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let mut work = x.to_vec();
    let mut out = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let mut at = |offset: f64| {
            work[i] = x[i] + offset;
            f(&work)
        };
        let (p2, p1, m1, m2) = (at(2.0 * h)?, at(h)?, at(-h)?, at(-2.0 * h)?);
        work[i] = x[i];
        out.push((-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h));
    }
    Ok(out)
}

pub fn max_relative_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    analytic
        .iter()
        .zip(numeric)
        .map(|(a, n)| (a - n).abs() / a.abs().max(n.abs()).max(1e-8))
        .fold(0.0, f64::max)
}

/// Learned constant baseline standing in for a value network when every
/// episode shares the same (implicit) prompt.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarBaseline {
    pub value: f64,
    pub learning_rate: f64,
}

impl ScalarBaseline {
    pub fn new(learning_rate: f64) -> Result<Self> {
        if !learning_rate.is_finite() || learning_rate <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "baseline learning rate must be finite and positive, got {learning_rate}"
            )));
        }
        Ok(ScalarBaseline {
            value: 0.0,
            learning_rate,
        })
    }
}

/// One gradient step on `(mean(rewards) - value)^2`.
pub fn baseline_update(b: &ScalarBaseline, rewards: &[f64]) -> Result<ScalarBaseline> {
    if rewards.is_empty() {
        return Err(Error::InvalidArgument("empty reward batch".into()));
    }
    if rewards.iter().any(|r| !r.is_finite()) {
        return Err(Error::InvalidArgument("non-finite reward".into()));
    }
    let mean = rewards.iter().sum::<f64>() / rewards.len() as f64;
    Ok(ScalarBaseline {
        value: b.value + b.learning_rate * 2.0 * (mean - b.value),
        learning_rate: b.learning_rate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mog::make_ground_truth;

    fn one_component() -> MoGParams {
        MoGParams::uniform(vec![Point2::new(0.0, 0.0)], 0.05).unwrap()
    }

    #[test]
    fn zero_gradient_is_identity() {
        let gt = make_ground_truth();
        let mut st = OptimizerState::new(1e-2).unwrap();
        let next = sgd_step(&gt, &ParamGrad::zeros(8), &mut st, Direction::Ascend).unwrap();
        assert_eq!(next, gt);
        assert_eq!(st.step_count, 1);
    }

    #[test]
    fn single_mean_step() {
        let m = one_component();
        let mut g = ParamGrad::zeros(1);
        g.means[0] = [1.0, 0.0];
        let mut st = OptimizerState::new(1e-2).unwrap();
        let a = sgd_step(&m, &g, &mut st, Direction::Ascend).unwrap();
        assert!((a.means()[0].x - 0.01).abs() < 1e-15);
        let b = sgd_step(&a, &g, &mut st, Direction::Ascend).unwrap();
        assert!((b.means()[0].x - 0.02).abs() < 1e-15);
        let mut st = OptimizerState::new(1e-2).unwrap();
        let d = sgd_step(&m, &g, &mut st, Direction::Descend).unwrap();
        assert!((d.means()[0].x + 0.01).abs() < 1e-15);
    }

    #[test]
    fn non_finite_gradient_reports_step() {
        let m = one_component();
        let mut g = ParamGrad::zeros(1);
        let mut st = OptimizerState::new(1e-2).unwrap();
        sgd_step(&m, &g, &mut st, Direction::Ascend).unwrap();
        g.log_stds[0] = f64::NAN;
        match sgd_step(&m, &g, &mut st, Direction::Ascend) {
            Err(Error::Diverged { step }) => assert_eq!(step, 1),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn overflowing_step_is_divergence() {
        let m = one_component();
        let mut g = ParamGrad::zeros(1);
        g.means[0] = [f64::MAX, 0.0];
        let mut st = OptimizerState::new(1e3).unwrap();
        assert!(matches!(
            sgd_step(&m, &g, &mut st, Direction::Ascend),
            Err(Error::Diverged { .. })
        ));
    }

    #[test]
    fn finite_diff_on_ground_truth() {
        let gt = make_ground_truth();
        let err = finite_diff_check(&gt, &Point2::new(1.2, -0.9), 1e-5).unwrap();
        assert!(err < 1e-5, "{err}");
    }

    #[test]
    fn finite_diff_at_stationary_point() {
        let err = finite_diff_check(&one_component(), &Point2::new(0.0, 0.0), 1e-5).unwrap();
        assert!(err < 1e-5, "{err}");
    }

    #[test]
    fn finite_diff_error_shrinks_with_h() {
        let gt = make_ground_truth();
        let p = Point2::new(0.7, 0.4);
        let coarse = finite_diff_check(&gt, &p, 1e-2).unwrap();
        let fine = finite_diff_check(&gt, &p, 1e-5).unwrap();
        assert!(fine < coarse, "{fine} !< {coarse}");
        assert!(finite_diff_check(&gt, &p, 0.1).is_err());
        assert!(finite_diff_check(&gt, &p, 0.0).is_err());
    }

    #[test]
    fn five_point_stencil_is_exact_on_quartics() {
        let f = |x: &[f64]| Ok(x[0].powi(4) - 3.0 * x[0] * x[1] + x[1].powi(3));
        let x = [0.7, -1.3];
        let d = five_point_differences(&x, 0.1, f).unwrap();
        let exact = [
            4.0 * 0.7f64.powi(3) + 3.0 * 1.3,
            -3.0 * 0.7 + 3.0 * 1.3f64.powi(2),
        ];
        assert!(max_relative_error(&d, &exact) < 1e-12, "{d:?}");
        let two = central_differences(&x, 0.1, f).unwrap();
        assert!(max_relative_error(&two, &exact) > 1e-4);
    }

    #[test]
    fn baseline_examples() {
        let b = ScalarBaseline {
            value: 3.0,
            learning_rate: 0.1,
        };
        assert_eq!(baseline_update(&b, &[2.0, 4.0]).unwrap().value, 3.0);

        let b = ScalarBaseline {
            value: 0.0,
            learning_rate: 0.25,
        };
        assert_eq!(baseline_update(&b, &[10.0]).unwrap().value, 5.0);

        let half = ScalarBaseline {
            value: -7.0,
            learning_rate: 0.5,
        };
        assert_eq!(baseline_update(&half, &[1.0, 2.0, 3.0]).unwrap().value, 2.0);

        assert!(baseline_update(&b, &[]).is_err());
    }

    #[test]
    fn baseline_converges_monotonically() {
        let mut b = ScalarBaseline::new(0.1).unwrap();
        let mut prev_gap = f64::INFINITY;
        for _ in 0..200 {
            b = baseline_update(&b, &[4.0, 6.0]).unwrap();
            let gap = (5.0 - b.value).abs();
            assert!(gap <= prev_gap);
            prev_gap = gap;
        }
        assert!(prev_gap < 1e-12);
    }
}
