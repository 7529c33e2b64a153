//! Deliberately broken variants of the interpolating learner. Each one
//! violates at least one axiom; the axiom checks must catch all of them.

use std::any::Any;

use crate::belief::{condition, BeliefKind, BeliefPoint, FiniteSimplex, EPS};
use crate::domain::{ConfidenceDomain, ConfidenceValue};
use crate::error::Result;

use super::interp::{fraction, mix, FRAC};
use super::{check_confidence, InterpLearner, Learner, Observation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MutantKind {
    /// Leaks 1% of the mass toward uniform on every update, even at `⊥`.
    Leaky,
    /// Ignores confidences below one half.
    Threshold,
    /// Mixing weight `4α(1-α)`: moves out and comes back.
    Boomerang,
    /// Mixing weight `α²`.
    Squared,
    /// Mixes toward a cyclic rotation of `P|A` within `A`.
    Rotator,
    /// Mixes toward `P|¬A`.
    Contrarian,
    /// Mixing weight `1-(1-α)²`: lawful, but twice as fast as the gradient.
    DoubleSpeed,
}

impl MutantKind {
    pub const ALL: [MutantKind; 7] = [
        MutantKind::Leaky,
        MutantKind::Threshold,
        MutantKind::Boomerang,
        MutantKind::Squared,
        MutantKind::Rotator,
        MutantKind::Contrarian,
        MutantKind::DoubleSpeed,
    ];

    pub fn id(self) -> &'static str {
        match self {
            MutantKind::Leaky => "mutant-leaky",
            MutantKind::Threshold => "mutant-threshold",
            MutantKind::Boomerang => "mutant-boomerang",
            MutantKind::Squared => "mutant-squared",
            MutantKind::Rotator => "mutant-rotator",
            MutantKind::Contrarian => "mutant-contrarian",
            MutantKind::DoubleSpeed => "mutant-double-speed",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.id() == id)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Mutant {
    kind: MutantKind,
}

impl Mutant {
    pub fn new(kind: MutantKind) -> Self {
        Mutant { kind }
    }

    pub fn kind(&self) -> MutantKind {
        self.kind
    }

    fn weight(&self, alpha: f64) -> f64 {
        match self.kind {
            MutantKind::Threshold if alpha < 0.5 => 0.0,
            MutantKind::Boomerang => 4.0 * alpha * (1.0 - alpha),
            MutantKind::Squared => alpha * alpha,
            MutantKind::DoubleSpeed => 1.0 - (1.0 - alpha) * (1.0 - alpha),
            _ => alpha,
        }
    }

    fn target(&self, p: &FiniteSimplex, phi: &Observation) -> Result<FiniteSimplex> {
        let a = phi.as_event()?;
        p.check_event(a)?;
        match self.kind {
            MutantKind::Contrarian => condition(p, a.complement(p.len())),
            MutantKind::Rotator => {
                let c = condition(p, a)?;
                let members: Vec<usize> = a.indices().collect();
                let mut probs = vec![0.0; p.len()];
                for (k, &i) in members.iter().enumerate() {
                    probs[members[(k + 1) % members.len()]] = c.probs()[i];
                }
                c.with_probs(probs)
            }
            _ => condition(p, a),
        }
    }
}

impl Learner for Mutant {
    fn id(&self) -> &str {
        self.kind.id()
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
        let p = theta.as_simplex()?;
        let w = self.weight(fraction(chi));
        let moved = if w == 0.0 {
            p.clone()
        } else {
            mix(p, &self.target(p, phi)?, w)?
        };
        if self.kind == MutantKind::Leaky {
            let u = 1.0 / p.len() as f64;
            let probs = moved.probs().iter().map(|x| 0.99 * x + 0.01 * u).collect();
            return Ok(moved.with_probs(probs)?.into());
        }
        Ok(moved.into())
    }

    fn has_bel(&self) -> bool {
        true
    }

    fn bel(&self, phi: &Observation, theta: &BeliefPoint) -> Result<f64> {
        InterpLearner.bel(phi, theta)
    }

    fn bel_top(&self, phi: &Observation) -> Option<f64> {
        InterpLearner.bel_top(phi)
    }

    fn in_domain(&self, phi: &Observation, theta: &BeliefPoint) -> bool {
        if !InterpLearner.in_domain(phi, theta) {
            return false;
        }
        match (self.kind, phi, theta) {
            (MutantKind::Contrarian, Observation::Event(a), BeliefPoint::Simplex(p)) => {
                p.prob(a.complement(p.len())) > EPS
            }
            _ => true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::belief::EventSet;

    #[test]
    fn rotator_rotates_within_event() {
        let m = Mutant::new(MutantKind::Rotator);
        let p: BeliefPoint = FiniteSimplex::from_probs(vec![0.5, 0.2, 0.3]).unwrap().into();
        let phi = Observation::Event(EventSet::from_indices([0, 2]));
        let q = m.observe(&phi, &FRAC.top(), &p).unwrap();
        let q = q.as_simplex().unwrap().probs().to_vec();
        assert!((q[0] - 0.375).abs() < 1e-15 && (q[2] - 0.625).abs() < 1e-15 && q[1] == 0.0);
    }

    #[test]
    fn ids_round_trip() {
        for k in MutantKind::ALL {
            assert_eq!(MutantKind::from_id(k.id()), Some(k));
        }
    }
}
