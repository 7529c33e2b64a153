//! Additive forms and Trotter interleaving.

use std::sync::Arc;

use crate::belief::BeliefPoint;
use crate::domain::{ConfidenceDomain, ConfidenceValue};
use crate::error::{Error, Result};
use crate::learners::{Learner, Observation};

/// A learner's observation `phi` reparameterized by additive confidence:
/// `observe(χ, θ) = flow(g(χ, θ), θ)`.
#[derive(Clone)]
pub struct AdditiveForm {
    learner: Arc<dyn Learner>,
    phi: Observation,
}

impl AdditiveForm {
    pub fn flow(&self, t: &ConfidenceValue, theta: &BeliefPoint) -> Result<BeliefPoint> {
        self.learner.flow(&self.phi, t, theta)
    }

    /// The translation `g(χ, θ)`.
    pub fn g(&self, chi: &ConfidenceValue, theta: &BeliefPoint) -> Result<ConfidenceValue> {
        self.learner.translate(&self.phi, chi, theta)
    }

    pub fn observation(&self) -> &Observation {
        &self.phi
    }
}

/// The registered additive form of `learner` for `phi`.
pub fn additive_form(learner: Arc<dyn Learner>, phi: Observation) -> Result<AdditiveForm> {
    if !learner.has_additive_form() {
        return Err(Error::Unsupported(format!(
            "`{}` has no registered additive form",
            learner.id()
        )));
    }
    Ok(AdditiveForm { learner, phi })
}

/// `n` rounds of (flow `phi1` for `χ/n`, then flow `phi2` for `χ/n`).
pub fn trotter_interleave(
    learner: &dyn Learner,
    phi1: &Observation,
    phi2: &Observation,
    chi: f64,
    n: u64,
    theta0: &BeliefPoint,
) -> Result<BeliefPoint> {
    if n == 0 {
        return Err(Error::param("n", "need at least one round"));
    }
    if !(chi.is_finite() && chi >= 0.0) {
        return Err(Error::param("chi", format!("{chi} must be finite and >= 0")));
    }
    let dt = ConfidenceDomain::Add.value(chi / n as f64)?;
    let mut theta = theta0.clone();
    for _ in 0..n {
        for phi in [phi1, phi2] {
            if !learner.in_domain(phi, &theta) {
                return Err(Error::Domain(format!("{phi} left the domain during interleaving")));
            }
            theta = learner.flow(phi, &dt, &theta)?;
        }
    }
    Ok(theta)
}
