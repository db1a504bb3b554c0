//! Descriptive statistics for box plots.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxStats {
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    /// Smallest observation not below `q1 - 1.5 IQR`.
    pub whisker_low: f64,
    /// Largest observation not above `q3 + 1.5 IQR`.
    pub whisker_high: f64,
    pub outliers: Vec<f64>,
}

impl BoxStats {
    pub fn iqr(&self) -> f64 {
        self.q3 - self.q1
    }
}

/// Quantile of sorted data by linear interpolation between order
/// statistics at position `p (n - 1)` (the inclusive method).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

pub fn median(values: &[f64]) -> Result<f64> {
    Ok(boxplot_stats(values)?.median)
}

pub fn boxplot_stats(values: &[f64]) -> Result<BoxStats> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("box plot of an empty sample".into()));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidArgument("box plot input contains NaN".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q1 = quantile_sorted(&sorted, 0.25);
    let median = quantile_sorted(&sorted, 0.5);
    let q3 = quantile_sorted(&sorted, 0.75);
    let iqr = q3 - q1;
    let lo_fence = q1 - 1.5 * iqr;
    let hi_fence = q3 + 1.5 * iqr;
    let inside = || {
        sorted
            .iter()
            .copied()
            .filter(|v| *v >= lo_fence && *v <= hi_fence)
    };
    let whisker_low = inside().next().unwrap_or(q1);
    let whisker_high = inside().next_back().unwrap_or(q3);
    let outliers = sorted
        .iter()
        .copied()
        .filter(|v| *v < lo_fence || *v > hi_fence)
        .collect();
    Ok(BoxStats {
        median,
        q1,
        q3,
        whisker_low,
        whisker_high,
        outliers,
    })
}
