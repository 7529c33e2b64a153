//! Graded belief tables updated by `θ(φ) ← max{χ, θ(φ)}`.

use std::any::Any;

use crate::belief::{BeliefKind, BeliefPoint, GradedBeliefTable};
use crate::domain::{ConfidenceDomain, ConfidenceValue, Payload};
use crate::error::{Error, Result};

use super::interp::additive_to_fraction;
use super::{additive, check_confidence, Learner, Observation};

static MAX: ConfidenceDomain = ConfidenceDomain::Max;

fn degree(chi: &ConfidenceValue) -> f64 {
    match chi.payload() {
        Payload::Bot => 0.0,
        Payload::Top => 1.0,
        Payload::Real(r) => *r,
        _ => unreachable!("max-domain confidence"),
    }
}

/// Raises the entry for `phi` to `max{χ, θ(φ)}`.
pub fn max_graded_observe(
    phi: &str,
    chi: &ConfidenceValue,
    theta: &GradedBeliefTable,
) -> Result<GradedBeliefTable> {
    if chi.domain() != &MAX {
        return Err(Error::DomainMismatch {
            expected: "max".into(),
            found: chi.domain().id(),
        });
    }
    let chi = degree(chi);
    if chi <= theta.get(phi) {
        return Ok(theta.clone());
    }
    theta.with(phi, chi)
}

/// Additive confidence reaching `χ` from `θ(φ)`: `0` if `χ ≤ θ(φ)`, else
/// `log((1-θ(φ))/(1-χ))`, with `χ = 1 ↦ ⊤`.
pub fn max_graded_translation(chi: &ConfidenceValue, theta_phi: f64) -> Result<ConfidenceValue> {
    let chi = degree(chi);
    if chi <= theta_phi {
        return additive(0.0);
    }
    if chi == 1.0 {
        return additive(f64::INFINITY);
    }
    additive(((1.0 - theta_phi) / (1.0 - chi)).ln())
}

fn prop(phi: &Observation) -> Result<&str> {
    match phi {
        Observation::Prop(p) => Ok(p),
        other => Err(other.mismatch("proposition")),
    }
}

/// Max-domain learner over graded tables.
#[derive(Clone, Copy, Debug, Default)]
pub struct MaxGradedLearner;

impl Learner for MaxGradedLearner {
    fn id(&self) -> &str {
        "max-graded"
    }

    fn as_any(&self) -> &dyn Any {
        self
    }

    fn domain(&self) -> &ConfidenceDomain {
        &MAX
    }

    fn belief_kind(&self) -> BeliefKind {
        BeliefKind::Graded
    }

    fn observe(&self, phi: &Observation, chi: &ConfidenceValue, theta: &BeliefPoint) -> Result<BeliefPoint> {
        check_confidence(self, chi)?;
        Ok(max_graded_observe(prop(phi)?, chi, theta.as_graded()?)?.into())
    }

    fn has_bel(&self) -> bool {
        true
    }

    /// `θ(φ)`.
    fn bel(&self, phi: &Observation, theta: &BeliefPoint) -> Result<f64> {
        Ok(theta.as_graded()?.get(prop(phi)?))
    }

    fn bel_top(&self, _phi: &Observation) -> Option<f64> {
        Some(1.0)
    }

    fn in_domain(&self, phi: &Observation, theta: &BeliefPoint) -> bool {
        matches!((phi, theta), (Observation::Prop(_), BeliefPoint::Graded(_)))
    }

    fn has_additive_form(&self) -> bool {
        true
    }

    fn translate(&self, phi: &Observation, chi: &ConfidenceValue, theta: &BeliefPoint) -> Result<ConfidenceValue> {
        check_confidence(self, chi)?;
        max_graded_translation(chi, theta.as_graded()?.get(prop(phi)?))
    }

    /// `θ(φ) + (1-θ(φ))(1-e^{-t})`.
    fn flow(&self, phi: &Observation, t: &ConfidenceValue, theta: &BeliefPoint) -> Result<BeliefPoint> {
        let table = theta.as_graded()?;
        let p = prop(phi)?;
        let th = table.get(p);
        let s = additive_to_fraction(t, 1.0)?;
        let next = if s == 1.0 { 1.0 } else { th + (1.0 - th) * s };
        Ok(table.with(p, next.min(1.0))?.into())
    }

    /// `1 - θ(φ)` on the entry for `φ`, in table-key order.
    fn closed_form_field(&self, phi: &Observation, theta: &BeliefPoint) -> Option<Result<Vec<f64>>> {
        Some((|| {
            let table = theta.as_graded()?;
            let p = prop(phi)?;
            if !table.entries().contains_key(p) {
                return Err(Error::Unsupported(format!("table has no coordinate for `{p}`")));
            }
            Ok(table
                .entries()
                .iter()
                .map(|(k, v)| if k == p { 1.0 - v } else { 0.0 })
                .collect())
        })())
    }
}
