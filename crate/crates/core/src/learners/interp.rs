//! Mixing toward the conditional: `(1-α)P + α(P|A)`.

use std::any::Any;

use crate::belief::{condition, BeliefKind, BeliefPoint, EventSet, FiniteSimplex, EPS};
use crate::domain::{frac_to_add, ConfidenceDomain, ConfidenceValue, Payload};
use crate::error::{Error, Result};

use super::{check_confidence, Learner, Observation};

/// `(1-α)P + α(P|A)`; `α = 0` is the identity even when `P(A) = 0`.
pub fn interp_observe(a: EventSet, alpha: f64, p: &FiniteSimplex) -> Result<FiniteSimplex> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::param("alpha", format!("{alpha} outside [0,1]")));
    }
    p.check_event(a)?;
    if alpha == 0.0 {
        return Ok(p.clone());
    }
    let c = condition(p, a)?;
    mix(p, &c, alpha)
}

pub(crate) fn mix(p: &FiniteSimplex, q: &FiniteSimplex, alpha: f64) -> Result<FiniteSimplex> {
    if alpha == 1.0 {
        return Ok(q.clone());
    }
    let probs = p
        .probs()
        .iter()
        .zip(q.probs())
        .map(|(x, y)| (1.0 - alpha) * x + alpha * y)
        .collect();
    p.with_probs(probs)
}

pub(crate) static FRAC: ConfidenceDomain = ConfidenceDomain::Frac;

/// Fraction of a fractional confidence, `⊤ ↦ 1`.
pub(crate) fn fraction(chi: &ConfidenceValue) -> f64 {
    match chi.payload() {
        Payload::Bot => 0.0,
        Payload::Top => 1.0,
        Payload::Real(r) => *r,
        _ => unreachable!("fractional confidence"),
    }
}

/// The interpolating learner.
#[derive(Clone, Copy, Debug, Default)]
pub struct InterpLearner;

impl Learner for InterpLearner {
    fn id(&self) -> &str {
        "interp"
    }

    fn as_any(&self) -> &dyn Any {
        self
    }

    fn domain(&self) -> &ConfidenceDomain {
        &FRAC
    }

    fn belief_kind(&self) -> BeliefKind {
        BeliefKind::Simplex
    }

    fn observe(&self, phi: &Observation, chi: &ConfidenceValue, theta: &BeliefPoint) -> Result<BeliefPoint> {
        check_confidence(self, chi)?;
        let a = phi.as_event()?;
        Ok(interp_observe(a, fraction(chi), theta.as_simplex()?)?.into())
    }

    fn has_bel(&self) -> bool {
        true
    }

    /// `log P(A)`.
    fn bel(&self, phi: &Observation, theta: &BeliefPoint) -> Result<f64> {
        Ok(theta.as_simplex()?.prob(phi.as_event()?).ln())
    }

    fn bel_top(&self, _phi: &Observation) -> Option<f64> {
        Some(0.0)
    }

    fn in_domain(&self, phi: &Observation, theta: &BeliefPoint) -> bool {
        match (phi, theta) {
            (Observation::Event(a), BeliefPoint::Simplex(p)) => {
                p.check_event(*a).is_ok() && p.prob(*a) > EPS
            }
            _ => false,
        }
    }

    /// `g(α) = -log(1-α)`.
    fn has_additive_form(&self) -> bool {
        true
    }

    fn translate(&self, _phi: &Observation, chi: &ConfidenceValue, _theta: &BeliefPoint) -> Result<ConfidenceValue> {
        check_confidence(self, chi)?;
        frac_to_add(1.0, chi)
    }

    /// `e^{-t}P + (1-e^{-t})(P|A)`.
    fn flow(&self, phi: &Observation, t: &ConfidenceValue, theta: &BeliefPoint) -> Result<BeliefPoint> {
        let alpha = additive_to_fraction(t, 1.0)?;
        Ok(interp_observe(phi.as_event()?, alpha, theta.as_simplex()?)?.into())
    }

    /// `(P|A) - P`.
    fn closed_form_field(&self, phi: &Observation, theta: &BeliefPoint) -> Option<Result<Vec<f64>>> {
        Some((|| {
            let p = theta.as_simplex()?;
            let c = condition(p, phi.as_event()?)?;
            Ok(c.probs().iter().zip(p.probs()).map(|(x, y)| x - y).collect())
        })())
    }
}

/// `1 - e^{-βt}` for an additive confidence, `⊤ ↦ 1`.
pub(crate) fn additive_to_fraction(t: &ConfidenceValue, beta: f64) -> Result<f64> {
    if t.domain() != &ConfidenceDomain::Add {
        return Err(Error::DomainMismatch {
            expected: "add".into(),
            found: t.domain().id(),
        });
    }
    Ok(match t.payload() {
        Payload::Bot => 0.0,
        Payload::Top => 1.0,
        Payload::Real(t) => -(-beta * t).exp_m1(),
        _ => unreachable!("additive confidence"),
    })
}
