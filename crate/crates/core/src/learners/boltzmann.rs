//! Boltzmann reweighting `P(w)·exp(-βV(w))` and tempered Bayes.

use std::any::Any;

use serde_json::Value;

use crate::belief::{default_labels, BeliefKind, BeliefPoint, FiniteSimplex, RandomVariable, EPS};
use crate::domain::{ConfidenceDomain, ConfidenceValue, Payload};
use crate::error::{Error, Result};

use super::{check_confidence, Learner, Observation};

static ADD: ConfidenceDomain = ConfidenceDomain::Add;

/// Largest observation set for [`potential_to_likelihood`], whose outcome
/// space has `2^|Φ|` elements.
pub const MAX_EXTENDED_OBSERVATIONS: usize = 16;

/// Worlds in `supp P` whose score is within `1e-12` of the best.
fn optimal_support(p: &FiniteSimplex, score: impl Fn(usize) -> f64) -> Result<FiniteSimplex> {
    let best = (0..p.len())
        .filter(|&i| p.probs()[i] > 0.0)
        .map(&score)
        .fold(f64::NEG_INFINITY, f64::max);
    if best == f64::NEG_INFINITY {
        return Err(Error::ZeroMassEvent { mass: 0.0 });
    }
    let slack = 1e-12 * best.abs().max(1.0);
    let probs = (0..p.len())
        .map(|i| {
            if p.probs()[i] > 0.0 && score(i) >= best - slack {
                p.probs()[i]
            } else {
                0.0
            }
        })
        .collect();
    p.with_probs(probs)
}

/// `P(w) exp(-βV(w)) / Z`, in log space; `β = ⊤` conditions `P` on the
/// minimizers of `V` over its support.
pub fn boltzmann_observe(v: &RandomVariable, beta: &ConfidenceValue, p: &FiniteSimplex) -> Result<FiniteSimplex> {
    p.check_variable(v)?;
    if beta.domain() != &ADD {
        return Err(Error::DomainMismatch {
            expected: "add".into(),
            found: beta.domain().id(),
        });
    }
    let b = match beta.payload() {
        Payload::Bot => return Ok(p.clone()),
        Payload::Top => return optimal_support(p, |i| -v.values()[i]),
        Payload::Real(b) => *b,
        _ => unreachable!("additive confidence"),
    };
    let logs: Vec<f64> = p
        .probs()
        .iter()
        .zip(v.values())
        .map(|(&q, &x)| if q > 0.0 { q.ln() - b * x } else { f64::NEG_INFINITY })
        .collect();
    let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights = logs.iter().map(|l| (l - m).exp()).collect();
    p.with_probs(weights)
}

/// Field `P ⊙ (E_P[V] - V)`.
pub(crate) fn boltzmann_field(v: &RandomVariable, p: &FiniteSimplex) -> Result<Vec<f64>> {
    let e = p.expectation(v)?;
    Ok(p.probs()
        .iter()
        .zip(v.values())
        .map(|(q, x)| if *q > 0.0 { q * (e - x) } else { 0.0 })
        .collect())
}

fn potential(phi: &Observation) -> Result<&RandomVariable> {
    match phi {
        Observation::Potential(v) => Ok(v),
        other => Err(other.mismatch("potential")),
    }
}

/// The Boltzmann learner on the additive domain.
#[derive(Clone, Copy, Debug, Default)]
pub struct BoltzmannLearner;

impl Learner for BoltzmannLearner {
    fn id(&self) -> &str {
        "boltzmann"
    }

    fn as_any(&self) -> &dyn Any {
        self
    }

    fn domain(&self) -> &ConfidenceDomain {
        &ADD
    }

    fn belief_kind(&self) -> BeliefKind {
        BeliefKind::Simplex
    }

    fn observe(&self, phi: &Observation, chi: &ConfidenceValue, theta: &BeliefPoint) -> Result<BeliefPoint> {
        check_confidence(self, chi)?;
        Ok(boltzmann_observe(potential(phi)?, chi, theta.as_simplex()?)?.into())
    }

    fn has_bel(&self) -> bool {
        true
    }

    /// `-E_P[V]`.
    fn bel(&self, phi: &Observation, theta: &BeliefPoint) -> Result<f64> {
        Ok(-theta.as_simplex()?.expectation(potential(phi)?)?)
    }

    fn bel_top(&self, phi: &Observation) -> Option<f64> {
        let v = potential(phi).ok()?;
        Some(-v.values().iter().copied().fold(f64::INFINITY, f64::min))
    }

    fn in_domain(&self, phi: &Observation, theta: &BeliefPoint) -> bool {
        match (phi, theta) {
            (Observation::Potential(v), BeliefPoint::Simplex(p)) => v.len() == p.len(),
            _ => false,
        }
    }

    fn has_additive_form(&self) -> bool {
        true
    }

    fn translate(&self, _phi: &Observation, chi: &ConfidenceValue, _theta: &BeliefPoint) -> Result<ConfidenceValue> {
        check_confidence(self, chi)?;
        Ok(chi.clone())
    }

    fn flow(&self, phi: &Observation, t: &ConfidenceValue, theta: &BeliefPoint) -> Result<BeliefPoint> {
        self.observe(phi, t, theta)
    }

    fn closed_form_field(&self, phi: &Observation, theta: &BeliefPoint) -> Option<Result<Vec<f64>>> {
        Some(potential(phi).and_then(|v| boltzmann_field(v, theta.as_simplex()?)))
    }
}

/// A finite Bayesian model: hypotheses, named evidence events and the
/// likelihood table `P(e | h)`. Rows need not sum to one over `e`.
#[derive(Clone, Debug, PartialEq)]
pub struct BayesModel {
    hypotheses: Vec<String>,
    evidence: Vec<String>,
    likelihood: Vec<Vec<f64>>,
    star: ConfidenceValue,
}

impl BayesModel {
    /// `likelihood[e][h] = P(evidence[e] | hypotheses[h])`.
    pub fn new(hypotheses: Vec<String>, evidence: Vec<String>, likelihood: Vec<Vec<f64>>) -> Result<Self> {
        if hypotheses.is_empty() {
            return Err(Error::Config("Bayes model needs hypotheses".into()));
        }
        if likelihood.len() != evidence.len() {
            return Err(Error::Config("one likelihood row per evidence event".into()));
        }
        for row in &likelihood {
            if row.len() != hypotheses.len() {
                return Err(Error::Config("likelihood row length differs from hypotheses".into()));
            }
            if row.iter().any(|x| !(0.0..=1.0).contains(x)) {
                return Err(Error::Config("likelihoods must lie in [0,1]".into()));
            }
        }
        Ok(BayesModel {
            hypotheses,
            evidence,
            likelihood,
            star: ADD.value(1.0)?,
        })
    }

    /// `{"hypotheses": [...], "likelihood": {"e": [...], ...}}`.
    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Config(format!("Bayes model: {m}"));
        let obj = v.as_object().ok_or_else(|| bad("expected an object"))?;
        let rows = obj
            .get("likelihood")
            .and_then(Value::as_object)
            .ok_or_else(|| bad("`likelihood` must map evidence names to rows"))?;
        let mut evidence = Vec::new();
        let mut likelihood = Vec::new();
        for (name, row) in rows {
            evidence.push(name.clone());
            likelihood.push(
                row.as_array()
                    .ok_or_else(|| bad("rows must be arrays"))?
                    .iter()
                    .map(|x| x.as_f64().ok_or_else(|| bad("rows must hold numbers")))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        let hypotheses = match obj.get("hypotheses") {
            Some(hs) => hs
                .as_array()
                .ok_or_else(|| bad("`hypotheses` must be an array"))?
                .iter()
                .map(|h| h.as_str().map(str::to_string).ok_or_else(|| bad("hypotheses are strings")))
                .collect::<Result<Vec<_>>>()?,
            None => default_labels(likelihood.first().map_or(0, Vec::len)),
        };
        Self::new(hypotheses, evidence, likelihood)
    }

    pub fn hypotheses(&self) -> &[String] {
        &self.hypotheses
    }

    pub fn evidence(&self) -> &[String] {
        &self.evidence
    }

    /// The confidence at which the learner is Bayes' rule.
    pub fn star(&self) -> &ConfidenceValue {
        &self.star
    }

    /// All likelihoods in `(0, 1]`.
    pub fn is_strict(&self) -> bool {
        self.likelihood.iter().flatten().all(|x| *x > 0.0)
    }

    pub fn likelihood(&self, evidence: &str) -> Result<&[f64]> {
        self.evidence
            .iter()
            .position(|e| e == evidence)
            .map(|i| self.likelihood[i].as_slice())
            .ok_or_else(|| Error::Config(format!("unknown evidence `{evidence}`")))
    }

    /// Bayes' rule `P(h) P(e|h) / Σ`.
    pub fn observe(&self, evidence: &str, p: &FiniteSimplex) -> Result<FiniteSimplex> {
        tempered_bayes(self.likelihood(evidence)?, &self.star, p)
    }
}

/// `P(h)·lik(h)^β / Σ`, by direct multiplication; `β = ⊤` conditions on the
/// maximum-likelihood hypotheses within `supp P`.
fn tempered_bayes(lik: &[f64], beta: &ConfidenceValue, p: &FiniteSimplex) -> Result<FiniteSimplex> {
    if lik.len() != p.len() {
        return Err(Error::InvalidBelief(format!(
            "{} likelihoods for {} hypotheses",
            lik.len(),
            p.len()
        )));
    }
    let b = match beta.payload() {
        Payload::Bot => return Ok(p.clone()),
        Payload::Top => {
            return optimal_support(p, |i| if lik[i] > 0.0 { lik[i].ln() } else { f64::NEG_INFINITY })
                .and_then(|q| {
                    if (0..q.len()).any(|i| q.probs()[i] > 0.0 && lik[i] > 0.0) {
                        Ok(q)
                    } else {
                        Err(Error::ZeroMassEvent { mass: 0.0 })
                    }
                })
        }
        Payload::Real(b) => *b,
        _ => unreachable!("additive confidence"),
    };
    let weights: Vec<f64> = p
        .probs()
        .iter()
        .zip(lik)
        .map(|(q, l)| if b == 1.0 { q * l } else { q * l.powf(b) })
        .collect();
    let mass: f64 = weights.iter().sum();
    if mass <= EPS {
        return Err(Error::ZeroMassEvent { mass });
    }
    p.with_probs(weights)
}

/// The appendix construction turning potentials `u(φ, h) ≥ 0` into a strict
/// Bayes model.
///
/// Outcomes are subsets `X ⊆ Φ`; under hypothesis `h` each `φ` enters `X`
/// independently with probability `e^{-u(φ,h)}`. The evidence event for `φ` is
/// `{X : φ ∈ X}`, and its likelihood is obtained by summing the outcome
/// probabilities, which gives `e^{-u(φ,h)}`.
pub fn potential_to_likelihood(u: &[Vec<f64>]) -> Result<BayesModel> {
    let n_obs = u.len();
    if n_obs == 0 || n_obs > MAX_EXTENDED_OBSERVATIONS {
        return Err(Error::param(
            "u",
            format!("need 1..={MAX_EXTENDED_OBSERVATIONS} observations, got {n_obs}"),
        ));
    }
    let n_h = u[0].len();
    if u.iter().any(|row| row.len() != n_h) || n_h == 0 {
        return Err(Error::param("u", "rows must share a nonzero hypothesis count"));
    }
    if u.iter().flatten().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::param("u", "potentials must be finite and >= 0"));
    }
    let include: Vec<Vec<f64>> = u.iter().map(|row| row.iter().map(|x| (-x).exp()).collect()).collect();
    let mut likelihood = vec![vec![0.0; n_h]; n_obs];
    for h in 0..n_h {
        for outcome in 0u32..(1 << n_obs) {
            let prob: f64 = (0..n_obs)
                .map(|f| {
                    if outcome >> f & 1 == 1 {
                        include[f][h]
                    } else {
                        1.0 - include[f][h]
                    }
                })
                .product();
            for (f, row) in likelihood.iter_mut().enumerate() {
                if outcome >> f & 1 == 1 {
                    row[h] += prob;
                }
            }
        }
    }
    for row in likelihood.iter_mut() {
        for x in row.iter_mut() {
            *x = x.min(1.0);
        }
    }
    let evidence = (0..n_obs).map(|i| format!("e{i}")).collect();
    BayesModel::new(default_labels(n_h), evidence, likelihood)
}

/// Tempered Bayesian learner: confidence `β` raises the likelihood to `β`;
/// `β = 1` is Bayes' rule.
#[derive(Clone, Debug, Default)]
pub struct BayesLearner {
    model: Option<BayesModel>,
}

impl BayesLearner {
    pub fn new(model: BayesModel) -> Self {
        BayesLearner { model: Some(model) }
    }

    /// Accepts only [`Observation::Likelihood`] observations.
    pub fn without_model() -> Self {
        BayesLearner { model: None }
    }

    pub fn model(&self) -> Option<&BayesModel> {
        self.model.as_ref()
    }

    fn row<'a>(&'a self, phi: &'a Observation) -> Result<&'a [f64]> {
        match (phi, &self.model) {
            (Observation::Likelihood(l), _) => {
                if l.iter().any(|x| !(0.0..=1.0).contains(x)) {
                    return Err(Error::param("likelihood", "entries must lie in [0,1]"));
                }
                Ok(l)
            }
            (Observation::Evidence(e), Some(m)) => m.likelihood(e),
            (Observation::Evidence(e), None) => {
                Err(Error::Config(format!("evidence `{e}` needs a Bayes model")))
            }
            (other, _) => Err(other.mismatch("evidence")),
        }
    }

    /// The potential `V = -log P(e|·)` of an observation.
    pub fn potential(&self, phi: &Observation) -> Result<RandomVariable> {
        let row = self.row(phi)?;
        if row.iter().any(|x| *x <= 0.0) {
            return Err(Error::Domain("zero likelihood has infinite potential".into()));
        }
        RandomVariable::new(row.iter().map(|x| -x.ln()).collect())
    }
}

impl Learner for BayesLearner {
    fn id(&self) -> &str {
        "bayes"
    }

    fn as_any(&self) -> &dyn Any {
        self
    }

    fn domain(&self) -> &ConfidenceDomain {
        &ADD
    }

    fn belief_kind(&self) -> BeliefKind {
        BeliefKind::Simplex
    }

    fn observe(&self, phi: &Observation, chi: &ConfidenceValue, theta: &BeliefPoint) -> Result<BeliefPoint> {
        check_confidence(self, chi)?;
        Ok(tempered_bayes(self.row(phi)?, chi, theta.as_simplex()?)?.into())
    }

    fn has_bel(&self) -> bool {
        true
    }

    /// `E_P[log P(e|h)]`.
    fn bel(&self, phi: &Observation, theta: &BeliefPoint) -> Result<f64> {
        let p = theta.as_simplex()?;
        let row = self.row(phi)?;
        if row.len() != p.len() {
            return Err(Error::InvalidBelief("likelihood length differs from hypotheses".into()));
        }
        Ok(p.probs()
            .iter()
            .zip(row)
            .filter(|(q, _)| **q > 0.0)
            .map(|(q, l)| q * l.ln())
            .sum())
    }

    fn bel_top(&self, phi: &Observation) -> Option<f64> {
        let row = self.row(phi).ok()?;
        Some(row.iter().copied().fold(0.0, f64::max).ln())
    }

    fn in_domain(&self, phi: &Observation, theta: &BeliefPoint) -> bool {
        match (self.row(phi), theta) {
            (Ok(row), BeliefPoint::Simplex(p)) if row.len() == p.len() => {
                p.probs().iter().zip(row).map(|(q, l)| q * l).sum::<f64>() > EPS
            }
            _ => false,
        }
    }

    fn has_additive_form(&self) -> bool {
        true
    }

    fn translate(&self, _phi: &Observation, chi: &ConfidenceValue, _theta: &BeliefPoint) -> Result<ConfidenceValue> {
        check_confidence(self, chi)?;
        Ok(chi.clone())
    }

    fn flow(&self, phi: &Observation, t: &ConfidenceValue, theta: &BeliefPoint) -> Result<BeliefPoint> {
        self.observe(phi, t, theta)
    }

    fn closed_form_field(&self, phi: &Observation, theta: &BeliefPoint) -> Option<Result<Vec<f64>>> {
        Some(self.potential(phi).and_then(|v| boltzmann_field(&v, theta.as_simplex()?)))
    }
}
