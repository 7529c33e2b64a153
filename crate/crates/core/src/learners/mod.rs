//! Commitment functions behind one interface.
//!
//! | id           | domain  | belief  | observation        | `Bel`                    |
//! |--------------|---------|---------|--------------------|--------------------------|
//! | `interp`     | `frac`  | simplex | event              | `log P(A)`               |
//! | `ds`         | `frac`  | mass    | event              | `Bel_m(A)`               |
//! | `kalman`     | `kalman`| gaussian| measurement `z`    | `-(½(x̂-z)² + σ⁴)`        |
//! | `boltzmann`  | `add`   | simplex | potential `V`      | `-E_P[V]`                |
//! | `bayes`      | `add`   | simplex | evidence           | `E_P[log P(e\|h)]`       |
//! | `max-graded` | `max`   | graded  | proposition        | `θ(φ)`                   |
//! | `classifier` | `count` | params  | labelled example   | `-ℓ` (ridge-regularized) |
//!
//! Any learner can be lifted to `list:<domain>` with [`ListLifted`].

mod boltzmann;
mod classifier;
mod ds;
mod graded;
mod interp;
mod kalman;
mod mutants;

use std::any::Any;
use std::fmt;

use serde_json::{json, Value};

use crate::belief::{BeliefKind, BeliefPoint, EventSet, RandomVariable};
use crate::domain::{list_extend, ConfidenceDomain, ConfidenceValue};
use crate::error::{Error, Result};

pub use boltzmann::{
    boltzmann_observe, potential_to_likelihood, BayesLearner, BayesModel, BoltzmannLearner,
    MAX_EXTENDED_OBSERVATIONS,
};
pub use classifier::{Classifier, ClassifierConfig};
pub use ds::DsLearner;
pub use graded::{max_graded_observe, max_graded_translation, MaxGradedLearner};
pub use interp::{interp_observe, InterpLearner};
pub use kalman::{kalman_observe, optimal_gain, KalmanLearner};
pub use mutants::{Mutant, MutantKind};

/// What a learner observes.
#[derive(Clone, Debug, PartialEq)]
pub enum Observation {
    /// An event of a finite world set.
    Event(EventSet),
    /// A potential `V` on worlds.
    Potential(RandomVariable),
    /// A scalar measurement `z`.
    Measurement(f64),
    /// A named evidence event of a Bayes model.
    Evidence(String),
    /// The likelihood row `P(e | h)` of an evidence event, one entry per hypothesis.
    Likelihood(Vec<f64>),
    /// A proposition id of a graded table.
    Prop(String),
    /// A labelled feature vector.
    Example { x: Vec<f64>, y: usize },
}

impl Observation {
    pub fn kind(&self) -> &'static str {
        match self {
            Observation::Event(_) => "event",
            Observation::Potential(_) => "potential",
            Observation::Measurement(_) => "measurement",
            Observation::Evidence(_) => "evidence",
            Observation::Likelihood(_) => "likelihood",
            Observation::Prop(_) => "proposition",
            Observation::Example { .. } => "example",
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Observation::Event(a) => json!({"event_mask": a.mask()}),
            Observation::Potential(v) => json!({"potential": v.values()}),
            Observation::Measurement(z) => json!({"z": z}),
            Observation::Evidence(e) => json!({"evidence": e}),
            Observation::Likelihood(l) => json!({"likelihood": l}),
            Observation::Prop(p) => json!({"prop": p}),
            Observation::Example { x, y } => json!({"x": x, "y": y}),
        }
    }

    pub(crate) fn mismatch(&self, expected: &'static str) -> Error {
        Error::KindMismatch {
            what: "observation",
            expected,
            found: self.kind().to_string(),
        }
    }

    pub(crate) fn as_event(&self) -> Result<EventSet> {
        match self {
            Observation::Event(a) => Ok(*a),
            other => Err(other.mismatch("event")),
        }
    }
}

impl fmt::Display for Observation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

/// A commitment function `(φ, χ, θ) ↦ θ'` with optional degree of belief.
pub trait Learner: Send + Sync {
    fn id(&self) -> &str;

    /// Downcasting hook, used to recover learner-specific parameters.
    fn as_any(&self) -> &dyn Any;

    fn domain(&self) -> &ConfidenceDomain;

    fn belief_kind(&self) -> BeliefKind;

    fn observe(
        &self,
        phi: &Observation,
        chi: &ConfidenceValue,
        theta: &BeliefPoint,
    ) -> Result<BeliefPoint>;

    /// Whether [`bel`](Self::bel) is defined.
    fn has_bel(&self) -> bool {
        false
    }

    /// Degree of belief in `phi` at `theta`.
    fn bel(&self, phi: &Observation, theta: &BeliefPoint) -> Result<f64> {
        let _ = (phi, theta);
        Err(Error::Unsupported(format!("`{}` has no degree of belief", self.id())))
    }

    /// The `⊤` level of `Bel(phi, ·)`, when attainable and known in closed form.
    fn bel_top(&self, phi: &Observation) -> Option<f64> {
        let _ = phi;
        None
    }

    /// True iff the update is defined and finite for all `χ < ⊤` at `theta`.
    fn in_domain(&self, phi: &Observation, theta: &BeliefPoint) -> bool;

    /// Whether [`translate`](Self::translate) and [`flow`](Self::flow) are registered.
    fn has_additive_form(&self) -> bool {
        false
    }

    /// Additive confidence `g(χ, θ)` with `observe(χ, θ) = flow(g(χ, θ), θ)`.
    fn translate(
        &self,
        phi: &Observation,
        chi: &ConfidenceValue,
        theta: &BeliefPoint,
    ) -> Result<ConfidenceValue> {
        let _ = (phi, chi, theta);
        Err(Error::Unsupported(format!("`{}` has no registered additive form", self.id())))
    }

    /// The additive-form flow at additive confidence `t`.
    fn flow(&self, phi: &Observation, t: &ConfidenceValue, theta: &BeliefPoint) -> Result<BeliefPoint> {
        let _ = (phi, t, theta);
        Err(Error::Unsupported(format!("`{}` has no registered additive form", self.id())))
    }

    /// Closed-form derivative field `∂/∂t flow(t, θ)` at `t = 0`, in belief
    /// coordinates, when one is known.
    fn closed_form_field(&self, phi: &Observation, theta: &BeliefPoint) -> Option<Result<Vec<f64>>> {
        let _ = (phi, theta);
        None
    }
}

pub(crate) fn wrong_domain(learner: &dyn Learner, chi: &ConfidenceValue) -> Error {
    Error::DomainMismatch {
        expected: learner.domain().id(),
        found: chi.domain().id(),
    }
}

pub(crate) fn check_confidence(learner: &dyn Learner, chi: &ConfidenceValue) -> Result<()> {
    if chi.domain() != learner.domain() || !learner.domain().contains(chi) {
        return Err(wrong_domain(learner, chi));
    }
    Ok(())
}

/// `additive(t)` with `t ≥ 0`, `+∞ ↦ ⊤`.
pub(crate) fn additive(t: f64) -> Result<ConfidenceValue> {
    ConfidenceDomain::Add.value(t)
}

/// A learner lifted to the free list domain: a list confidence applies its
/// elements in order.
pub struct ListLifted {
    id: String,
    domain: ConfidenceDomain,
    inner: Box<dyn Learner>,
}

impl ListLifted {
    pub fn new(inner: Box<dyn Learner>) -> Self {
        ListLifted {
            id: format!("list:{}", inner.id()),
            domain: list_extend(inner.domain()),
            inner,
        }
    }

    pub fn inner(&self) -> &dyn Learner {
        self.inner.as_ref()
    }
}

impl Learner for ListLifted {
    fn id(&self) -> &str {
        &self.id
    }

    fn as_any(&self) -> &dyn Any {
        self
    }

    fn domain(&self) -> &ConfidenceDomain {
        &self.domain
    }

    fn belief_kind(&self) -> BeliefKind {
        self.inner.belief_kind()
    }

    fn observe(&self, phi: &Observation, chi: &ConfidenceValue, theta: &BeliefPoint) -> Result<BeliefPoint> {
        check_confidence(self, chi)?;
        let items = chi.as_list().expect("list-domain value");
        items
            .iter()
            .try_fold(theta.clone(), |acc, c| self.inner.observe(phi, c, &acc))
    }

    fn has_bel(&self) -> bool {
        self.inner.has_bel()
    }

    fn bel(&self, phi: &Observation, theta: &BeliefPoint) -> Result<f64> {
        self.inner.bel(phi, theta)
    }

    fn bel_top(&self, phi: &Observation) -> Option<f64> {
        self.inner.bel_top(phi)
    }

    fn in_domain(&self, phi: &Observation, theta: &BeliefPoint) -> bool {
        self.inner.in_domain(phi, theta)
    }
}

/// Ids of the built-in learners.
pub const BUILTIN_LEARNERS: [&str; 7] = [
    "interp",
    "ds",
    "kalman",
    "boltzmann",
    "bayes",
    "max-graded",
    "classifier",
];

/// Ids of the deliberately broken learners used to test the axiom checks.
pub const MUTANT_LEARNERS: [&str; 7] = [
    "mutant-leaky",
    "mutant-threshold",
    "mutant-boomerang",
    "mutant-squared",
    "mutant-rotator",
    "mutant-contrarian",
    "mutant-double-speed",
];

/// A learner by id with default parameters.
pub fn learner(id: &str) -> Result<Box<dyn Learner>> {
    build_learner(id, &Value::Null)
}

/// A learner by id, configured from a JSON parameter object.
///
/// Recognized keys: `ds`: `beta`; `bayes`: `model`; `classifier`: `features`,
/// `classes`, `eta`, `ridge`, `tol`, `max_steps`. `kalman` reads `r2` only in
/// the CLI. `list:<id>` lifts the inner learner.
pub fn build_learner(id: &str, params: &Value) -> Result<Box<dyn Learner>> {
    if let Some(inner) = id.strip_prefix("list:") {
        return Ok(Box::new(ListLifted::new(build_learner(inner, params)?)));
    }
    let get_f64 = |key: &str| params.get(key).and_then(Value::as_f64);
    Ok(match id {
        "interp" => Box::new(InterpLearner),
        "ds" => Box::new(DsLearner::new(get_f64("beta").unwrap_or(1.0))?),
        "kalman" => Box::new(KalmanLearner),
        "boltzmann" => Box::new(BoltzmannLearner),
        "bayes" => match params.get("model") {
            Some(m) => Box::new(BayesLearner::new(BayesModel::from_json(m)?)),
            None => Box::new(BayesLearner::without_model()),
        },
        "max-graded" => Box::new(MaxGradedLearner),
        "classifier" => Box::new(Classifier::new(ClassifierConfig::from_json(params)?)?),
        other => match MutantKind::from_id(other) {
            Some(kind) => Box::new(Mutant::new(kind)),
            None => return Err(Error::UnknownLearner(other.to_string())),
        },
    })
}

/// Domain predicate `Θ_φ` for a registered learner with default parameters.
pub fn in_domain(learner_id: &str, phi: &Observation, theta: &BeliefPoint) -> bool {
    learner(learner_id).is_ok_and(|l| l.in_domain(phi, theta))
}
