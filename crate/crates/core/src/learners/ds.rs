//! Dempster–Shafer updating with simple support functions.

use std::any::Any;

use crate::belief::{ds_plaus_update, BeliefKind, BeliefPoint, EPS};
use crate::domain::{frac_to_add, ConfidenceDomain, ConfidenceValue};
use crate::error::{Error, Result};

use super::interp::{additive_to_fraction, fraction, FRAC};
use super::{check_confidence, Learner, Observation};

/// Combines the belief with the simple support function `(α, A)`.
///
/// `beta` scales the weight of evidence `w = -(1/β) log(1-α)` used by the
/// additive form; it does not affect [`Learner::observe`].
#[derive(Clone, Copy, Debug)]
pub struct DsLearner {
    beta: f64,
}

impl Default for DsLearner {
    fn default() -> Self {
        DsLearner { beta: 1.0 }
    }
}

impl DsLearner {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::param("beta", format!("{beta} must lie in (0, inf)")));
        }
        Ok(DsLearner { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

impl Learner for DsLearner {
    fn id(&self) -> &str {
        "ds"
    }

    fn as_any(&self) -> &dyn Any {
        self
    }

    fn domain(&self) -> &ConfidenceDomain {
        &FRAC
    }

    fn belief_kind(&self) -> BeliefKind {
        BeliefKind::Mass
    }

    fn observe(&self, phi: &Observation, chi: &ConfidenceValue, theta: &BeliefPoint) -> Result<BeliefPoint> {
        check_confidence(self, chi)?;
        Ok(ds_plaus_update(theta.as_mass()?, phi.as_event()?, fraction(chi))?.into())
    }

    fn has_bel(&self) -> bool {
        true
    }

    /// `Bel_m(A)`.
    fn bel(&self, phi: &Observation, theta: &BeliefPoint) -> Result<f64> {
        Ok(theta.as_mass()?.bel(phi.as_event()?))
    }

    fn bel_top(&self, _phi: &Observation) -> Option<f64> {
        Some(1.0)
    }

    fn in_domain(&self, phi: &Observation, theta: &BeliefPoint) -> bool {
        match (phi, theta) {
            (Observation::Event(a), BeliefPoint::Mass(m)) => {
                !a.is_empty() && a.is_subset(m.full_event()) && m.plaus(*a) > EPS
            }
            _ => false,
        }
    }

    /// `g(α) = -(1/β) log(1-α)`.
    fn has_additive_form(&self) -> bool {
        true
    }

    fn translate(&self, _phi: &Observation, chi: &ConfidenceValue, _theta: &BeliefPoint) -> Result<ConfidenceValue> {
        check_confidence(self, chi)?;
        frac_to_add(self.beta, chi)
    }

    fn flow(&self, phi: &Observation, t: &ConfidenceValue, theta: &BeliefPoint) -> Result<BeliefPoint> {
        let alpha = additive_to_fraction(t, self.beta)?;
        Ok(ds_plaus_update(theta.as_mass()?, phi.as_event()?, alpha)?.into())
    }
}
