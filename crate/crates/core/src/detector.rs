//! Timing-based honeypot classification mapped onto the game's evidence
//! kernel: Gaussian run-time models for normal and virtual machines, a
//! classification threshold, and the induced `(epsilon, delta)` rates.
//!
//! Only the two upper-tail probabilities enter the kernel: flagging a
//! disguised machine (`epsilon`, the tail of the slow VM distribution) and
//! falsely flagging an honest one (`delta`, the tail of the normal
//! distribution).

use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};
use crate::game::DetectorModel;

/// Gaussian run-time model: `f_0 ~ N(mu0, sigma0^2)` for normal systems,
/// `f_1 ~ N(mu1, sigma1^2)` for virtual machines. VM instructions run slower,
/// so `mu1 > mu0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimingModel {
    pub mu0: f64,
    pub sigma0: f64,
    pub mu1: f64,
    pub sigma1: f64,
}

impl TimingModel {
    pub fn new(mu0: f64, sigma0: f64, mu1: f64, sigma1: f64) -> Result<Self> {
        if !(mu0.is_finite() && mu1.is_finite() && sigma0.is_finite() && sigma1.is_finite()) {
            return Err(GameError::Validation(
                "timing model parameters must be finite".to_string(),
            ));
        }
        if sigma0 <= 0.0 || sigma1 <= 0.0 {
            return Err(GameError::Validation(format!(
                "timing stddevs must be positive, got sigma0={sigma0}, sigma1={sigma1}"
            )));
        }
        if mu1 <= mu0 {
            return Err(GameError::Validation(format!(
                "virtual machines must run slower than normal systems (mu1 > mu0), got mu0={mu0}, mu1={mu1}"
            )));
        }
        Ok(Self {
            mu0,
            sigma0,
            mu1,
            sigma1,
        })
    }
}

/// Classification threshold: run times beyond `t_d` are flagged as deceptive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub t_d: f64,
}

impl Threshold {
    pub fn new(t_d: f64) -> Result<Self> {
        if !t_d.is_finite() {
            return Err(GameError::Validation(format!(
                "threshold must be finite, got {t_d}"
            )));
        }
        Ok(Self { t_d })
    }
}

/// Complementary error function, absolute error below 1e-13: alternating
/// Maclaurin series for moderate arguments, bottom-up continued fraction
/// (Abramowitz & Stegun 7.1.14) for the far tail where the series cancels.
fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x <= 3.0 {
        let mut term = x;
        let mut sum = x;
        for k in 1..200 {
            let kf = k as f64;
            term *= -x * x / kf;
            sum += term / (2.0 * kf + 1.0);
            if term.abs() < 1e-20 {
                break;
            }
        }
        1.0 - sum * 2.0 / std::f64::consts::PI.sqrt()
    } else {
        let mut tail = 0.0;
        for k in (1..=80).rev() {
            tail = 0.5 * k as f64 / (x + tail);
        }
        (-x * x).exp() / (std::f64::consts::PI.sqrt() * (x + tail))
    }
}

/// Gaussian upper-tail probability `P(X > x)` for `X ~ N(mu, sigma^2)`.
fn survival(mu: f64, sigma: f64, x: f64) -> f64 {
    0.5 * erfc((x - mu) / (sigma * std::f64::consts::SQRT_2))
}

/// False-positive and true-positive rates induced by a threshold:
/// `delta` is the upper tail of `f_0` beyond `t_d`, `epsilon` the upper tail
/// of `f_1`.
pub fn rates_from_threshold(model: &TimingModel, threshold: Threshold) -> (f64, f64) {
    let delta = survival(model.mu0, model.sigma0, threshold.t_d);
    let epsilon = survival(model.mu1, model.sigma1, threshold.t_d);
    (delta, epsilon)
}

/// Build the full evidence kernel from a timing model and threshold, under
/// the symmetry assumption that disguising in either direction is equally
/// detectable.
pub fn detector_from_timing(model: &TimingModel, threshold: Threshold) -> DetectorModel {
    let (delta, epsilon) = rates_from_threshold(model, threshold);
    DetectorModel::symmetric(epsilon, delta).expect("tail probabilities are in [0, 1]")
}

/// ROC-style sweep: `(t_d, delta, epsilon)` for every grid point. The grid
/// must be sorted ascending; both rates are non-increasing in `t_d`.
pub fn threshold_sweep(model: &TimingModel, t_grid: &[f64]) -> Result<Vec<(f64, f64, f64)>> {
    if t_grid.is_empty() {
        return Err(GameError::Validation(
            "threshold grid must be nonempty".to_string(),
        ));
    }
    if t_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(GameError::Validation(
            "threshold grid must be sorted ascending".to_string(),
        ));
    }
    t_grid
        .iter()
        .map(|&t| {
            let (delta, epsilon) = rates_from_threshold(model, Threshold::new(t)?);
            Ok((t, delta, epsilon))
        })
        .collect()
}
