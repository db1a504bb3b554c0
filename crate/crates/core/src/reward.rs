//! Oracle reward, reward folding, preference labelling and KL shaping.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mog::Point2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardSpec {
    pub target_center: Point2,
    pub sharpness: f64,
    pub scale: f64,
    /// When set, rewards above the threshold are reflected back below it.
    pub fold_threshold: Option<f64>,
}

impl Default for RewardSpec {
    fn default() -> Self {
        RewardSpec {
            target_center: Point2::new(1.5, -1.5),
            sharpness: 2.0,
            scale: 10.0,
            fold_threshold: None,
        }
    }
}

impl RewardSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.sharpness.is_finite() || self.sharpness <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "reward sharpness must be positive, got {}",
                self.sharpness
            )));
        }
        if !self.scale.is_finite() || self.scale <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "reward scale must be positive, got {}",
                self.scale
            )));
        }
        if !self.target_center.is_finite() {
            return Err(Error::InvalidParameter("non-finite target center".into()));
        }
        if let Some(t) = self.fold_threshold {
            if !t.is_finite() || t <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "fold threshold must be positive, got {t}"
                )));
            }
        }
        Ok(())
    }

    /// The reward the trainers see: oracle reward, folded if configured.
    pub fn reward(&self, p: &Point2) -> f64 {
        let r = oracle_reward(p, self);
        match self.fold_threshold {
            Some(t) => fold_reward(r, t),
            None => r,
        }
    }

    /// Oracle reward divided by its maximum, in (0, 1].
    pub fn normalized(&self, p: &Point2) -> f64 {
        oracle_reward(p, self) / self.scale
    }
}

/// `scale * exp(-sharpness * |p - c|^2)`.
pub fn oracle_reward(p: &Point2, spec: &RewardSpec) -> f64 {
    spec.scale * (-spec.sharpness * p.dist_sq(&spec.target_center)).exp()
}

/// Reflects rewards above `threshold` to `2 * threshold - r`.
pub fn fold_reward(r_base: f64, threshold: f64) -> f64 {
    if r_base <= threshold {
        r_base
    } else {
        2.0 * threshold - r_base
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreferencePair {
    pub winner: Point2,
    pub loser: Point2,
}

/// Labels the pair with the oracle; ties go to `p1`.
pub fn prefer(p1: Point2, p2: Point2, spec: &RewardSpec) -> PreferencePair {
    if oracle_reward(&p2, spec) > oracle_reward(&p1, spec) {
        PreferencePair {
            winner: p2,
            loser: p1,
        }
    } else {
        PreferencePair {
            winner: p1,
            loser: p2,
        }
    }
}

/// `r - beta * (log pi_theta - log pi_ref)`.
pub fn shaped_reward(r: f64, log_pi_theta: f64, log_pi_ref: f64, beta: f64) -> f64 {
    r - beta * (log_pi_theta - log_pi_ref)
}
