//! Isotropic mixtures of Gaussians over the plane.
//!
//! A mixture is stored in unconstrained form: weight logits (softmax gives the
//! mixture weights), component means, and per-component log standard
//! deviations. Every density evaluation is done in log space with a
//! max-shifted log-sum-exp, so points far from all components still produce
//! finite (very negative) log densities.

use std::f64::consts::PI;
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// A point in the plane. Serialized as a two-element array `[x, y]`.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dist_sq(&self, other: &Point2) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

impl From<[f64; 2]> for Point2 {
    fn from(a: [f64; 2]) -> Self {
        Point2::new(a[0], a[1])
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

/// Trainable mixture parameters.
///
/// Invariants: at least one component, all three vectors have the same
/// length, every entry is finite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct MoGParams {
    weight_logits: Vec<f64>,
    means: Vec<Point2>,
    log_stds: Vec<f64>,
}

#[derive(Deserialize)]
struct RawParams {
    weight_logits: Vec<f64>,
    means: Vec<Point2>,
    log_stds: Vec<f64>,
}

impl TryFrom<RawParams> for MoGParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        MoGParams::new(raw.weight_logits, raw.means, raw.log_stds)
    }
}

impl MoGParams {
    pub fn new(weight_logits: Vec<f64>, means: Vec<Point2>, log_stds: Vec<f64>) -> Result<Self> {
        let k = weight_logits.len();
        if k == 0 {
            return Err(Error::InvalidParameter(
                "mixture needs at least one component".into(),
            ));
        }
        if means.len() != k || log_stds.len() != k {
            return Err(Error::InvalidParameter(format!(
                "component count mismatch: {} logits, {} means, {} log_stds",
                k,
                means.len(),
                log_stds.len()
            )));
        }
        let finite = weight_logits.iter().all(|v| v.is_finite())
            && means.iter().all(Point2::is_finite)
            && log_stds.iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParameter(
                "mixture parameters must be finite".into(),
            ));
        }
        Ok(MoGParams {
            weight_logits,
            means,
            log_stds,
        })
    }

    /// Equal-weight mixture whose components all share one variance.
    pub fn uniform(means: Vec<Point2>, variance: f64) -> Result<Self> {
        if !variance.is_finite() || variance <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "variance must be positive, got {variance}"
            )));
        }
        let k = means.len();
        MoGParams::new(vec![0.0; k], means, vec![0.5 * variance.ln(); k])
    }

    pub fn n_components(&self) -> usize {
        self.weight_logits.len()
    }

    pub fn weight_logits(&self) -> &[f64] {
        &self.weight_logits
    }

    pub fn means(&self) -> &[Point2] {
        &self.means
    }

    pub fn log_stds(&self) -> &[f64] {
        &self.log_stds
    }

    pub fn weights(&self) -> Vec<f64> {
        softmax(&self.weight_logits)
    }

    pub fn variances(&self) -> Vec<f64> {
        self.log_stds.iter().map(|s| (2.0 * s).exp()).collect()
    }

    /// Number of scalar parameters: logits, two mean coordinates, log-std.
    pub fn n_params(&self) -> usize {
        4 * self.n_components()
    }

    /// Flattened parameter vector: `[logits.., mean_x0, mean_y0, .., log_stds..]`.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_params());
        out.extend_from_slice(&self.weight_logits);
        for m in &self.means {
            out.push(m.x);
            out.push(m.y);
        }
        out.extend_from_slice(&self.log_stds);
        out
    }

    pub fn from_flat(k: usize, flat: &[f64]) -> Result<Self> {
        if flat.len() != 4 * k {
            return Err(Error::InvalidParameter(format!(
                "flat vector of length {} does not describe {} components",
                flat.len(),
                k
            )));
        }
        let logits = flat[..k].to_vec();
        let means = flat[k..3 * k]
            .chunks_exact(2)
            .map(|c| Point2::new(c[0], c[1]))
            .collect();
        let log_stds = flat[3 * k..].to_vec();
        MoGParams::new(logits, means, log_stds)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("finite parameters always serialize")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::json("<string>", e))
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json_string()).map_err(|e| Error::io(path, e))
    }

    pub fn load_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::json(path, e))
    }
}

/// Gradient of a scalar with respect to every entry of [`MoGParams`].
#[derive(Clone, Debug, PartialEq)]
pub struct ParamGrad {
    pub weight_logits: Vec<f64>,
    pub means: Vec<[f64; 2]>,
    pub log_stds: Vec<f64>,
}

impl ParamGrad {
    pub fn zeros(k: usize) -> Self {
        ParamGrad {
            weight_logits: vec![0.0; k],
            means: vec![[0.0; 2]; k],
            log_stds: vec![0.0; k],
        }
    }

    pub fn n_components(&self) -> usize {
        self.weight_logits.len()
    }

    pub fn is_finite(&self) -> bool {
        self.weight_logits.iter().all(|v| v.is_finite())
            && self
                .means
                .iter()
                .all(|m| m[0].is_finite() && m[1].is_finite())
            && self.log_stds.iter().all(|v| v.is_finite())
    }

    /// `self += scale * other`.
    pub fn add_scaled(&mut self, other: &ParamGrad, scale: f64) {
        debug_assert_eq!(self.n_components(), other.n_components());
        for (a, b) in self.weight_logits.iter_mut().zip(&other.weight_logits) {
            *a += scale * b;
        }
        for (a, b) in self.means.iter_mut().zip(&other.means) {
            a[0] += scale * b[0];
            a[1] += scale * b[1];
        }
        for (a, b) in self.log_stds.iter_mut().zip(&other.log_stds) {
            *a += scale * b;
        }
    }

    pub fn scale(&mut self, s: f64) {
        self.weight_logits.iter_mut().for_each(|v| *v *= s);
        self.means.iter_mut().for_each(|m| {
            m[0] *= s;
            m[1] *= s;
        });
        self.log_stds.iter_mut().for_each(|v| *v *= s);
    }

    /// Same layout as [`MoGParams::to_flat`].
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(4 * self.n_components());
        out.extend_from_slice(&self.weight_logits);
        for m in &self.means {
            out.extend_from_slice(m);
        }
        out.extend_from_slice(&self.log_stds);
        out
    }
}

/// Softmax with the max subtracted first. Callers guarantee finite input.
fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = out.iter().sum();
    out.iter_mut().for_each(|v| *v /= total);
    out
}

/// Mixture weights from unconstrained logits.
pub fn weights_of(logits: &[f64]) -> Result<Vec<f64>> {
    if logits.is_empty() {
        return Err(Error::InvalidParameter("empty logit vector".into()));
    }
    if logits.iter().any(|l| !l.is_finite()) {
        return Err(Error::InvalidParameter("non-finite logit".into()));
    }
    Ok(softmax(logits))
}

/// Sharpens a weight vector: `w_k^t / sum_j w_j^t`.
///
/// Zero weights stay zero for any `temper >= 1`.
pub fn tempered_weights(weights: &[f64], temper: f64) -> Result<Vec<f64>> {
    check_temper(temper)?;
    if weights.is_empty() {
        return Err(Error::InvalidArgument("empty weight vector".into()));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidArgument(
            "weights must be finite and nonnegative".into(),
        ));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "weights must sum to 1, got {total}"
        )));
    }
    let scaled: Vec<f64> = weights.iter().map(|w| temper * w.ln()).collect();
    let max = scaled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = scaled.iter().map(|s| (s - max).exp()).collect();
    let z: f64 = out.iter().sum();
    out.iter_mut().for_each(|v| *v /= z);
    Ok(out)
}

fn check_temper(temper: f64) -> Result<()> {
    if !temper.is_finite() || temper < 1.0 {
        return Err(Error::InvalidArgument(format!(
            "sampling temper must be finite and >= 1, got {temper}"
        )));
    }
    Ok(())
}

/// Precomputed per-component constants for fast repeated evaluation.
#[derive(Clone, Debug)]
pub struct MixtureEval {
    log_weights: Vec<f64>,
    weights: Vec<f64>,
    means: Vec<Point2>,
    inv_var: Vec<f64>,
    // log(alpha_k) - log(2 pi sigma_k^2)
    log_coef: Vec<f64>,
}

impl MixtureEval {
    pub fn new(model: &MoGParams) -> Self {
        let weights = model.weights();
        let log_weights: Vec<f64> = weights.iter().map(|w| w.ln()).collect();
        let inv_var: Vec<f64> = model.log_stds.iter().map(|s| (-2.0 * s).exp()).collect();
        let log_coef = log_weights
            .iter()
            .zip(&model.log_stds)
            .map(|(lw, ls)| lw - LN_2PI - 2.0 * ls)
            .collect();
        MixtureEval {
            log_weights,
            weights,
            means: model.means.clone(),
            inv_var,
            log_coef,
        }
    }

    pub fn n_components(&self) -> usize {
        self.weights.len()
    }

    #[inline]
    fn term(&self, k: usize, p: &Point2) -> f64 {
        self.log_coef[k] - 0.5 * p.dist_sq(&self.means[k]) * self.inv_var[k]
    }

    /// log q(p) by log-sum-exp over components.
    pub fn log_density(&self, p: &Point2) -> f64 {
        let k = self.n_components();
        let mut max = f64::NEG_INFINITY;
        for i in 0..k {
            max = max.max(self.term(i, p));
        }
        let sum: f64 = (0..k).map(|i| (self.term(i, p) - max).exp()).sum();
        max + sum.ln()
    }

    /// Adds `scale * d log q(p) / d theta` to `grad` and returns `log q(p)`.
    pub fn accumulate_grad(&self, p: &Point2, scale: f64, grad: &mut ParamGrad) -> f64 {
        let lse = self.log_density(p);
        for k in 0..self.n_components() {
            let r = (self.term(k, p) - lse).exp();
            let dx = p.x - self.means[k].x;
            let dy = p.y - self.means[k].y;
            let iv = self.inv_var[k];
            grad.weight_logits[k] += scale * (r - self.weights[k]);
            grad.means[k][0] += scale * r * dx * iv;
            grad.means[k][1] += scale * r * dy * iv;
            grad.log_stds[k] += scale * r * ((dx * dx + dy * dy) * iv - 2.0);
        }
        lse
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }
}

pub fn log_density(model: &MoGParams, p: &Point2) -> f64 {
    MixtureEval::new(model).log_density(p)
}

/// Gradient of `log q(p)` with respect to logits, means and log-stds.
///
/// With responsibilities `r_k = alpha_k N_k / q(p)`:
/// logits get `r_k - alpha_k`, means get `r_k (p - mu_k) / sigma_k^2`,
/// log-stds get `r_k (|p - mu_k|^2 / sigma_k^2 - 2)`.
pub fn grad_log_density(model: &MoGParams, p: &Point2) -> ParamGrad {
    let mut grad = ParamGrad::zeros(model.n_components());
    MixtureEval::new(model).accumulate_grad(p, 1.0, &mut grad);
    grad
}

/// Draws points from a mixture whose weights have been tempered.
#[derive(Clone, Debug)]
pub struct Sampler {
    cumulative: Vec<f64>,
    means: Vec<Point2>,
    stds: Vec<f64>,
}

impl Sampler {
    pub fn new(model: &MoGParams, temper: f64) -> Result<Self> {
        let weights = tempered_weights(&model.weights(), temper)?;
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        Ok(Sampler {
            cumulative,
            means: model.means.clone(),
            stds: model.log_stds.iter().map(|s| s.exp()).collect(),
        })
    }

    /// Returns the drawn point together with the component it came from.
    pub fn draw_indexed<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, Point2) {
        let u: f64 = rng.random::<f64>() * self.cumulative[self.cumulative.len() - 1];
        let k = self
            .cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.cumulative.len() - 1);
        let zx: f64 = rng.sample(StandardNormal);
        let zy: f64 = rng.sample(StandardNormal);
        let m = self.means[k];
        let s = self.stds[k];
        (k, Point2::new(m.x + s * zx, m.y + s * zy))
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Point2 {
        self.draw_indexed(rng).1
    }

    /// Clears `out` and fills it with `n` fresh draws.
    pub fn fill<R: Rng + ?Sized>(&self, n: usize, rng: &mut R, out: &mut Vec<Point2>) {
        out.clear();
        out.extend((0..n).map(|_| self.draw(rng)));
    }
}

/// `n` draws from `model` with mixture weights sharpened by `temper`.
pub fn sample<R: Rng + ?Sized>(
    model: &MoGParams,
    temper: f64,
    n: usize,
    rng: &mut R,
) -> Result<Vec<Point2>> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample count must be >= 1".into()));
    }
    let sampler = Sampler::new(model, temper)?;
    let mut out = Vec::with_capacity(n);
    sampler.fill(n, rng, &mut out);
    Ok(out)
}

/// Layout of the eight-mode ground truth.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthSpec {
    pub modes: Vec<Point2>,
    pub variance: f64,
    pub target_index: usize,
}

impl Default for GroundTruthSpec {
    /// 3x3 grid over {-1.5, 0, 1.5}^2 without the center, numbered row-major
    /// from the top-left corner so that index 7 is (1.5, -1.5).
    fn default() -> Self {
        let coords = [-1.5, 0.0, 1.5];
        let mut modes = Vec::with_capacity(8);
        for &y in coords.iter().rev() {
            for &x in &coords {
                if x == 0.0 && y == 0.0 {
                    continue;
                }
                modes.push(Point2::new(x, y));
            }
        }
        GroundTruthSpec {
            modes,
            variance: 0.05,
            target_index: 7,
        }
    }
}

impl GroundTruthSpec {
    pub fn target_center(&self) -> Point2 {
        self.modes[self.target_index]
    }

    pub fn ground_truth(&self) -> MoGParams {
        MoGParams::uniform(self.modes.clone(), self.variance).expect("valid ground-truth layout")
    }

    pub fn target(&self) -> MoGParams {
        MoGParams::uniform(vec![self.target_center()], self.variance)
            .expect("valid ground-truth layout")
    }
}

pub fn make_ground_truth() -> MoGParams {
    GroundTruthSpec::default().ground_truth()
}

/// Single Gaussian on the target mode.
pub fn make_target() -> MoGParams {
    GroundTruthSpec::default().target()
}

/// log N(0; 0, sigma^2 I) in two dimensions.
pub fn gaussian_log_normalizer(variance: f64) -> f64 {
    -(2.0 * PI * variance).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn single(mean: Point2, var: f64) -> MoGParams {
        MoGParams::uniform(vec![mean], var).unwrap()
    }

    #[test]
    fn weights_of_examples() {
        assert_eq!(weights_of(&[0.0; 4]).unwrap(), vec![0.25; 4]);
        let w = weights_of(&[4f64.ln(), 0.0]).unwrap();
        assert!((w[0] - 0.8).abs() < 1e-15 && (w[1] - 0.2).abs() < 1e-15);
        let w = weights_of(&[1000.0, 0.0]).unwrap();
        assert!(w.iter().all(|v| v.is_finite()));
        assert!((w[0] - 1.0).abs() < 1e-15 && w[1] < 1e-300);
        assert!(weights_of(&[f64::NAN]).is_err());
        assert!(weights_of(&[]).is_err());
    }

    #[test]
    fn log_density_examples() {
        let m = single(Point2::new(0.0, 0.0), 0.05);
        assert!((log_density(&m, &Point2::new(0.0, 0.0)) - 1.157855).abs() < 1e-6);
        assert!((log_density(&m, &Point2::new(1.0, 0.0)) + 8.842145).abs() < 1e-6);

        let dup = MoGParams::uniform(vec![Point2::default(); 2], 0.05).unwrap();
        let p = Point2::new(0.3, -0.2);
        assert!((log_density(&dup, &p) - log_density(&m, &p)).abs() < 1e-14);
    }

    #[test]
    fn log_density_far_away_stays_finite() {
        let gt = make_ground_truth();
        let v = log_density(&gt, &Point2::new(500.0, -500.0));
        assert!(v.is_finite() && v < -1e6);
    }

    #[test]
    fn tempered_weights_examples() {
        assert_eq!(tempered_weights(&[0.5, 0.5], 10.0).unwrap(), vec![0.5, 0.5]);
        let w = tempered_weights(&[0.8, 0.2], 1.0).unwrap();
        assert!((w[0] - 0.8).abs() < 1e-15);
        let w = tempered_weights(&[0.8, 0.2], 2.0).unwrap();
        assert!((w[0] - 0.64 / 0.68).abs() < 1e-12);
        assert!((w[0] - 0.941176).abs() < 1e-6 && (w[1] - 0.058824).abs() < 1e-6);
        let w = tempered_weights(&[0.0, 1.0], 3.0).unwrap();
        assert_eq!(w, vec![0.0, 1.0]);
        assert!(tempered_weights(&[0.5, 0.5], 0.5).is_err());
        assert!(tempered_weights(&[0.7, 0.7], 1.0).is_err());
    }

    #[test]
    fn sample_rejects_bad_temper() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(sample(&make_ground_truth(), 0.9, 10, &mut rng).is_err());
        assert!(sample(&make_ground_truth(), 1.0, 0, &mut rng).is_err());
    }

    fn component_frequencies(model: &MoGParams, temper: f64, n: usize, seed: u64) -> Vec<f64> {
        let sampler = Sampler::new(model, temper).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts = vec![0usize; model.n_components()];
        for _ in 0..n {
            counts[sampler.draw_indexed(&mut rng).0] += 1;
        }
        counts.into_iter().map(|c| c as f64 / n as f64).collect()
    }

    fn chi_square(freqs: &[f64], probs: &[f64], n: usize) -> f64 {
        freqs
            .iter()
            .zip(probs)
            .map(|(f, p)| {
                let e = p * n as f64;
                (f * n as f64 - e).powi(2) / e
            })
            .sum()
    }

    #[test]
    fn sample_frequencies_follow_tempered_weights() {
        let n = 100_000;
        let model = MoGParams::new(
            vec![4f64.ln(), 0.0],
            vec![Point2::new(0.0, 0.0), Point2::new(1.0, 1.0)],
            vec![0.0, 0.0],
        )
        .unwrap();
        // df = 1, 99.9% quantile is 10.83
        let f1 = component_frequencies(&model, 1.0, n, 1);
        assert!(chi_square(&f1, &[0.8, 0.2], n) < 10.83, "{f1:?}");
        let f2 = component_frequencies(&model, 2.0, n, 2);
        assert!(chi_square(&f2, &[0.941176, 0.058824], n) < 10.83, "{f2:?}");

        // df = 7, 99.9% quantile is 24.32
        let gt = make_ground_truth();
        let fu = component_frequencies(&gt, 5.0, n, 3);
        assert!(chi_square(&fu, &[0.125; 8], n) < 24.32, "{fu:?}");
    }

    #[test]
    fn sampling_is_reproducible() {
        let gt = make_ground_truth();
        let a = sample(&gt, 1.25, 500, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = sample(&gt, 1.25, 500, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn grad_at_mean_of_single_component() {
        let m = single(Point2::new(0.4, -0.7), 0.05);
        let g = grad_log_density(&m, &Point2::new(0.4, -0.7));
        assert_eq!(g.means[0], [0.0, 0.0]);
        assert_eq!(g.log_stds[0], -2.0);
        assert_eq!(g.weight_logits[0], 0.0);
    }

    #[test]
    fn grad_symmetric_for_identical_components() {
        let m = MoGParams::uniform(vec![Point2::new(0.1, 0.2); 2], 0.3).unwrap();
        let g = grad_log_density(&m, &Point2::new(-0.5, 0.9));
        assert_eq!(g.means[0], g.means[1]);
        assert_eq!(g.log_stds[0], g.log_stds[1]);
        assert_eq!(g.weight_logits[0], g.weight_logits[1]);
    }

    #[test]
    fn ground_truth_layout() {
        let spec = GroundTruthSpec::default();
        let gt = make_ground_truth();
        assert_eq!(gt.n_components(), 8);
        assert!(gt.weights().iter().all(|w| (w - 0.125).abs() < 1e-15));
        assert_eq!(gt.means()[7], Point2::new(1.5, -1.5));
        assert_eq!(spec.target_center(), Point2::new(1.5, -1.5));
        assert!(gt.variances().iter().all(|v| (v - 0.05).abs() < 1e-15));
        for i in 0..8 {
            for j in (i + 1)..8 {
                assert_ne!(gt.means()[i], gt.means()[j]);
            }
        }
        assert!(!gt.means().contains(&Point2::new(0.0, 0.0)));
    }

    #[test]
    fn target_model_values() {
        let t = make_target();
        assert!((log_density(&t, &Point2::new(1.5, -1.5)) - 1.157855).abs() < 1e-6);
        assert!((log_density(&t, &Point2::new(0.0, 0.0)) + 43.842145).abs() < 1e-6);
    }

    #[test]
    fn json_shape_and_validation() {
        let m = single(Point2::new(1.0, 2.0), 0.05);
        let v: serde_json::Value = serde_json::from_str(&m.to_json_string()).unwrap();
        assert_eq!(v["means"][0][0], 1.0);
        assert_eq!(v["means"][0][1], 2.0);
        assert!(MoGParams::from_json_str(
            r#"{"weight_logits":[0,0],"means":[[0,0]],"log_stds":[0]}"#
        )
        .is_err());
        assert!(
            MoGParams::from_json_str(r#"{"weight_logits":[],"means":[],"log_stds":[]}"#).is_err()
        );
    }

    #[test]
    fn flat_round_trip() {
        let gt = make_ground_truth();
        let back = MoGParams::from_flat(8, &gt.to_flat()).unwrap();
        assert_eq!(gt, back);
        assert!(MoGParams::from_flat(8, &[0.0; 31]).is_err());
    }
}
