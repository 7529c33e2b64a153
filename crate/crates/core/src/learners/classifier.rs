//! A desk-scale softmax-regression classifier trained by gradient steps.
//!
//! Parameters are laid out row-major as `W[class][feature]` with the bias in
//! the last column. The loss is cross-entropy plus `ridge/2 · ‖θ‖²`; the ridge
//! term makes the loss strictly convex so that training to `⊤` has a limit.

use std::any::Any;

use serde_json::Value;

use crate::belief::{BeliefKind, BeliefPoint, ParamVector};
use crate::domain::{ConfidenceDomain, ConfidenceValue, Payload};
use crate::error::{Error, Result};

use super::{additive, check_confidence, Learner, Observation};

static COUNT: ConfidenceDomain = ConfidenceDomain::Count;

#[derive(Clone, Debug, PartialEq)]
pub struct ClassifierConfig {
    pub features: usize,
    pub classes: usize,
    /// Learning rate `η`.
    pub eta: f64,
    pub ridge: f64,
    /// Step displacement below which `⊤` training stops.
    pub tol: f64,
    pub max_steps: u64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            features: 2,
            classes: 3,
            eta: 0.5,
            ridge: 0.05,
            tol: 1e-9,
            max_steps: 1_000_000,
        }
    }
}

impl ClassifierConfig {
    /// Reads optional overrides from a JSON object; `null` gives the defaults.
    pub fn from_json(v: &Value) -> Result<Self> {
        let mut cfg = ClassifierConfig::default();
        let uint = |key: &str| v.get(key).and_then(Value::as_u64);
        let real = |key: &str| v.get(key).and_then(Value::as_f64);
        if let Some(x) = uint("features") {
            cfg.features = x as usize;
        }
        if let Some(x) = uint("classes") {
            cfg.classes = x as usize;
        }
        if let Some(x) = real("eta") {
            cfg.eta = x;
        }
        if let Some(x) = real("ridge") {
            cfg.ridge = x;
        }
        if let Some(x) = real("tol") {
            cfg.tol = x;
        }
        if let Some(x) = uint("max_steps") {
            cfg.max_steps = x;
        }
        Ok(cfg)
    }

    pub fn param_len(&self) -> usize {
        self.classes * (self.features + 1)
    }
}

#[derive(Clone, Debug)]
pub struct Classifier {
    cfg: ClassifierConfig,
}

fn example(phi: &Observation) -> Result<(&[f64], usize)> {
    match phi {
        Observation::Example { x, y } => Ok((x, *y)),
        other => Err(other.mismatch("example")),
    }
}

impl Classifier {
    pub fn new(cfg: ClassifierConfig) -> Result<Self> {
        if cfg.classes < 2 || cfg.features == 0 {
            return Err(Error::param("classes", "need at least two classes and one feature"));
        }
        if !(cfg.eta.is_finite() && cfg.eta >= 0.0) {
            return Err(Error::param("eta", format!("{} must be finite and >= 0", cfg.eta)));
        }
        if !(cfg.ridge.is_finite() && cfg.ridge >= 0.0) {
            return Err(Error::param("ridge", format!("{} must be finite and >= 0", cfg.ridge)));
        }
        if cfg.tol.is_nan() || cfg.tol <= 0.0 || cfg.max_steps == 0 {
            return Err(Error::param("tol", "tolerance and step cap must be positive"));
        }
        Ok(Classifier { cfg })
    }

    pub fn config(&self) -> &ClassifierConfig {
        &self.cfg
    }

    fn check(&self, x: &[f64], y: usize, theta: &[f64]) -> Result<()> {
        if x.len() != self.cfg.features || y >= self.cfg.classes {
            return Err(Error::InvalidBelief(format!(
                "example needs {} features and a class below {}",
                self.cfg.features, self.cfg.classes
            )));
        }
        if theta.len() != self.cfg.param_len() {
            return Err(Error::InvalidBelief(format!(
                "expected {} parameters, got {}",
                self.cfg.param_len(),
                theta.len()
            )));
        }
        Ok(())
    }

    /// Class probabilities `f_θ(·|x)`.
    pub fn predict(&self, theta: &[f64], x: &[f64]) -> Vec<f64> {
        let w = self.cfg.features + 1;
        let logits: Vec<f64> = (0..self.cfg.classes)
            .map(|c| {
                let row = &theta[c * w..(c + 1) * w];
                row[..self.cfg.features].iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
                    + row[self.cfg.features]
            })
            .collect();
        let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let e: Vec<f64> = logits.iter().map(|l| (l - m).exp()).collect();
        let z: f64 = e.iter().sum();
        e.into_iter().map(|v| v / z).collect()
    }

    /// `-log f_θ(y|x) + ridge/2 · ‖θ‖²`.
    pub fn loss(&self, theta: &[f64], x: &[f64], y: usize) -> f64 {
        let p = self.predict(theta, x);
        let ridge: f64 = theta.iter().map(|t| t * t).sum::<f64>() * 0.5 * self.cfg.ridge;
        -p[y].ln() + ridge
    }

    pub fn gradient(&self, theta: &[f64], x: &[f64], y: usize) -> Vec<f64> {
        let p = self.predict(theta, x);
        let w = self.cfg.features + 1;
        let mut g = vec![0.0; theta.len()];
        for c in 0..self.cfg.classes {
            let r = p[c] - if c == y { 1.0 } else { 0.0 };
            for j in 0..w {
                let xj = if j < self.cfg.features { x[j] } else { 1.0 };
                g[c * w + j] = r * xj + self.cfg.ridge * theta[c * w + j];
            }
        }
        g
    }

    /// One step; returns the displacement norm.
    fn step(&self, theta: &mut [f64], x: &[f64], y: usize) -> Result<f64> {
        let g = self.gradient(theta, x, y);
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite gradient".into()));
        }
        let mut norm = 0.0;
        for (t, gi) in theta.iter_mut().zip(&g) {
            let d = self.cfg.eta * gi;
            *t -= d;
            norm += d * d;
        }
        Ok(norm.sqrt())
    }

    /// `n` gradient steps; `None` trains until the displacement drops below
    /// the tolerance and fails with [`Error::NoLimit`] at the step cap.
    pub fn train(&self, theta: &[f64], x: &[f64], y: usize, n: Option<u64>) -> Result<Vec<f64>> {
        self.check(x, y, theta)?;
        let mut t = theta.to_vec();
        match n {
            Some(n) => {
                for _ in 0..n {
                    self.step(&mut t, x, y)?;
                }
            }
            None => {
                let mut last = f64::INFINITY;
                for _ in 0..self.cfg.max_steps {
                    let mut probe = t.clone();
                    last = self.step(&mut probe, x, y)?;
                    if last < self.cfg.tol {
                        return Ok(t);
                    }
                    t = probe;
                }
                return Err(Error::NoLimit {
                    steps: self.cfg.max_steps,
                    norm: last,
                });
            }
        }
        Ok(t)
    }
}

fn steps(chi: &ConfidenceValue) -> Option<u64> {
    match chi.payload() {
        Payload::Bot => Some(0),
        Payload::Real(n) => Some(*n as u64),
        _ => None,
    }
}

impl Learner for Classifier {
    fn id(&self) -> &str {
        "classifier"
    }

    fn as_any(&self) -> &dyn Any {
        self
    }

    fn domain(&self) -> &ConfidenceDomain {
        &COUNT
    }

    fn belief_kind(&self) -> BeliefKind {
        BeliefKind::Params
    }

    fn observe(&self, phi: &Observation, chi: &ConfidenceValue, theta: &BeliefPoint) -> Result<BeliefPoint> {
        check_confidence(self, chi)?;
        let (x, y) = example(phi)?;
        let t = &theta.as_params()?.values;
        Ok(ParamVector::new(self.train(t, x, y, steps(chi))?)?.into())
    }

    fn has_bel(&self) -> bool {
        true
    }

    /// `-ℓ`.
    fn bel(&self, phi: &Observation, theta: &BeliefPoint) -> Result<f64> {
        let (x, y) = example(phi)?;
        let t = &theta.as_params()?.values;
        self.check(x, y, t)?;
        Ok(-self.loss(t, x, y))
    }

    fn in_domain(&self, phi: &Observation, theta: &BeliefPoint) -> bool {
        match (example(phi), theta.as_params()) {
            (Ok((x, y)), Ok(t)) => {
                self.check(x, y, &t.values).is_ok() && x.iter().all(|v| v.is_finite())
            }
            _ => false,
        }
    }

    fn has_additive_form(&self) -> bool {
        true
    }

    fn translate(&self, _phi: &Observation, chi: &ConfidenceValue, _theta: &BeliefPoint) -> Result<ConfidenceValue> {
        check_confidence(self, chi)?;
        match steps(chi) {
            Some(n) => additive(n as f64),
            None => additive(f64::INFINITY),
        }
    }

    /// Defined at whole-number times only.
    fn flow(&self, phi: &Observation, t: &ConfidenceValue, theta: &BeliefPoint) -> Result<BeliefPoint> {
        let n = match t.payload() {
            Payload::Top => COUNT.top(),
            _ => {
                let r = t.as_extended_real().unwrap_or(f64::NAN);
                if r.fract() != 0.0 {
                    return Err(Error::Unsupported("classifier flows at whole-number times only".into()));
                }
                COUNT.value(r)?
            }
        };
        self.observe(phi, &n, theta)
    }
}
