//! One-dimensional Kalman measurement updates.

use std::any::Any;

use crate::belief::{BeliefKind, BeliefPoint, GaussianBelief};
use crate::domain::{gain_weighted, ConfidenceDomain, ConfidenceValue};
use crate::error::{Error, Result};

use super::{check_confidence, Learner, Observation};

static KALMAN: ConfidenceDomain = ConfidenceDomain::Kalman;

/// `K_opt = σ² / (σ² + r²)`, with `r² = ∞ ↦ 0`, `σ² = ∞ ↦ 1` and `r² = 0 ↦ 1`.
pub fn optimal_gain(sigma2: f64, r2: f64) -> f64 {
    if r2 == f64::INFINITY {
        0.0
    } else if sigma2 == f64::INFINITY || r2 == 0.0 {
        1.0
    } else {
        sigma2 / (sigma2 + r2)
    }
}

/// `x̂' = x̂ + K(z - x̂)`, `σ²' = (1-K)²σ² + K²r²`.
pub fn kalman_observe(z: f64, c: &ConfidenceValue, b: &GaussianBelief) -> Result<GaussianBelief> {
    if !z.is_finite() {
        return Err(Error::param("z", "measurement must be finite"));
    }
    let (k, r2) = c.as_gain_pair().ok_or_else(|| Error::DomainMismatch {
        expected: "kalman".into(),
        found: c.domain().id(),
    })?;
    if k == 0.0 {
        return Ok(*b);
    }
    let mean = b.mean + k * (z - b.mean);
    let variance = gain_weighted(1.0 - k, b.variance) + gain_weighted(k, r2);
    GaussianBelief::new(mean, variance)
}

/// The Kalman learner; confidence is the pair `(K, r²)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct KalmanLearner;

impl KalmanLearner {
    /// `(K_opt(σ², r²), r²)` for the current belief.
    pub fn optimal_confidence(b: &GaussianBelief, r2: f64) -> Result<ConfidenceValue> {
        KALMAN.pair(optimal_gain(b.variance, r2), r2)
    }

    /// The optimal-gain confidence that adds precision `lambda` (sensor
    /// variance `1/λ`); `λ = ∞` is `⊤`.
    pub fn precision_confidence(b: &GaussianBelief, lambda: f64) -> Result<ConfidenceValue> {
        if lambda.is_nan() || lambda < 0.0 {
            return Err(Error::param("lambda", format!("{lambda} < 0")));
        }
        if lambda == 0.0 {
            return Ok(KALMAN.bot());
        }
        if lambda == f64::INFINITY {
            return Ok(KALMAN.top());
        }
        let gain = if b.variance == f64::INFINITY {
            1.0
        } else {
            b.variance * lambda / (b.variance * lambda + 1.0)
        };
        KALMAN.pair(gain, 1.0 / lambda)
    }
}

fn measurement(phi: &Observation) -> Result<f64> {
    match phi {
        Observation::Measurement(z) => Ok(*z),
        other => Err(other.mismatch("measurement")),
    }
}

impl Learner for KalmanLearner {
    fn id(&self) -> &str {
        "kalman"
    }

    fn as_any(&self) -> &dyn Any {
        self
    }

    fn domain(&self) -> &ConfidenceDomain {
        &KALMAN
    }

    fn belief_kind(&self) -> BeliefKind {
        BeliefKind::Gaussian
    }

    fn observe(&self, phi: &Observation, chi: &ConfidenceValue, theta: &BeliefPoint) -> Result<BeliefPoint> {
        check_confidence(self, chi)?;
        Ok(kalman_observe(measurement(phi)?, chi, theta.as_gaussian()?)?.into())
    }

    fn has_bel(&self) -> bool {
        true
    }

    /// `-(½(x̂ - z)² + σ⁴)`.
    fn bel(&self, phi: &Observation, theta: &BeliefPoint) -> Result<f64> {
        let z = measurement(phi)?;
        let b = theta.as_gaussian()?;
        Ok(-(0.5 * (b.mean - z).powi(2) + b.variance * b.variance))
    }

    fn bel_top(&self, _phi: &Observation) -> Option<f64> {
        Some(0.0)
    }

    fn in_domain(&self, phi: &Observation, theta: &BeliefPoint) -> bool {
        matches!((phi, theta), (Observation::Measurement(z), BeliefPoint::Gaussian(_)) if z.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::kalman_combine;

    fn g(m: f64, v: f64) -> GaussianBelief {
        GaussianBelief::new(m, v).unwrap()
    }

    #[test]
    fn examples() {
        let b = g(0.0, 4.0);
        assert_eq!(kalman_observe(10.0, &KALMAN.pair(0.0, 1.0).unwrap(), &b).unwrap(), b);
        let exact = kalman_observe(10.0, &KALMAN.pair(1.0, 0.0).unwrap(), &b).unwrap();
        assert_eq!(exact, g(10.0, 0.0));
        let k = optimal_gain(4.0, 1.0);
        assert!((k - 0.8).abs() < 1e-15);
        let post = kalman_observe(10.0, &KALMAN.pair(k, 1.0).unwrap(), &b).unwrap();
        assert!((post.mean - 8.0).abs() < 1e-14);
        assert!((post.variance - 4.0 * 1.0 / 5.0).abs() < 1e-14);
    }

    #[test]
    fn top_and_bot() {
        let b = g(1.0, f64::INFINITY);
        assert_eq!(kalman_observe(3.0, &KALMAN.bot(), &b).unwrap(), b);
        assert_eq!(kalman_observe(3.0, &KALMAN.top(), &b).unwrap(), g(3.0, 0.0));
    }

    #[test]
    fn optimal_gain_conventions() {
        assert_eq!(optimal_gain(1.0, f64::INFINITY), 0.0);
        assert_eq!(optimal_gain(f64::INFINITY, 1.0), 1.0);
        assert_eq!(optimal_gain(0.0, 0.0), 1.0);
        assert_eq!(optimal_gain(0.0, 2.0), 0.0);
    }

    #[test]
    fn sequential_equals_combined() {
        let b = g(0.5, 2.0);
        let c1 = KALMAN.pair(0.3, 1.5).unwrap();
        let c2 = KALMAN.pair(0.6, 0.7).unwrap();
        let z = 2.0;
        let seq = kalman_observe(z, &c2, &kalman_observe(z, &c1, &b).unwrap()).unwrap();
        let one = kalman_observe(z, &kalman_combine(&c1, &c2).unwrap(), &b).unwrap();
        assert!((seq.mean - one.mean).abs() < 1e-14);
        assert!((seq.variance - one.variance).abs() < 1e-14);
    }

    #[test]
    fn precision_axis_adds_precision() {
        let b = g(0.0, 2.0);
        let c = KalmanLearner::precision_confidence(&b, 3.0).unwrap();
        let post = kalman_observe(1.0, &c, &b).unwrap();
        assert!((1.0 / post.variance - (0.5 + 3.0)).abs() < 1e-12);
    }
}
