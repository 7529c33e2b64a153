//! Learners as vector fields on belief space.
//!
//! A learner with an additive form `flow(t, θ)` has a derivative field
//! `θ ↦ ∂/∂t flow(t, θ)|_{t=0}`. Fields add pointwise, which defines the
//! parallel observation `φ₁ ⊕ φ₂`; [`integrate`] recovers a belief from a
//! field.

mod additive;
mod integrate;

use std::fmt;
use std::sync::Arc;

use crate::belief::{BeliefKind, BeliefPoint, FiniteSimplex, EPS};
use crate::error::{Error, Result};
use crate::learners::{Learner, Observation};

pub use additive::{additive_form, trotter_interleave, AdditiveForm};
pub use integrate::{integrate, trajectory, IntegratorConfig, Scheme, TrajectoryRecord};

/// Step of the finite-difference fallback, in additive confidence.
pub const FD_STEP: f64 = 1e-6;

/// A direction at a belief point, in belief coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector {
    pub base: BeliefPoint,
    pub components: Vec<f64>,
}

impl TangentVector {
    pub fn norm_inf(&self) -> f64 {
        self.components.iter().map(|c| c.abs()).fold(0.0, f64::max)
    }
}

type FieldFn = dyn Fn(&BeliefPoint) -> Result<Vec<f64>> + Send + Sync;

/// A vector field on one belief space.
#[derive(Clone)]
pub struct VectorField {
    label: String,
    kind: BeliefKind,
    eval: Arc<FieldFn>,
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VectorField")
            .field("label", &self.label)
            .field("kind", &self.kind)
            .finish()
    }
}

impl VectorField {
    pub fn new(
        label: impl Into<String>,
        kind: BeliefKind,
        eval: impl Fn(&BeliefPoint) -> Result<Vec<f64>> + Send + Sync + 'static,
    ) -> Self {
        VectorField {
            label: label.into(),
            kind,
            eval: Arc::new(eval),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn belief_kind(&self) -> BeliefKind {
        self.kind
    }

    /// Components at `theta`.
    pub fn components(&self, theta: &BeliefPoint) -> Result<Vec<f64>> {
        if theta.kind() != self.kind {
            return Err(Error::KindMismatch {
                what: "vector field",
                expected: kind_name(self.kind),
                found: theta.kind().to_string(),
            });
        }
        (self.eval)(theta)
    }

    pub fn eval(&self, theta: &BeliefPoint) -> Result<TangentVector> {
        Ok(TangentVector {
            base: theta.clone(),
            components: self.components(theta)?,
        })
    }

    /// `k · self`.
    pub fn scaled(&self, k: f64) -> VectorField {
        let inner = self.eval.clone();
        VectorField {
            label: format!("{k}*{}", self.label),
            kind: self.kind,
            eval: Arc::new(move |theta| Ok(inner(theta)?.into_iter().map(|c| k * c).collect())),
        }
    }

    pub fn negated(&self) -> VectorField {
        self.scaled(-1.0)
    }
}

fn kind_name(kind: BeliefKind) -> &'static str {
    match kind {
        BeliefKind::Simplex => "simplex",
        BeliefKind::Gaussian => "gaussian",
        BeliefKind::Mass => "mass",
        BeliefKind::Graded => "graded",
        BeliefKind::Params => "params",
    }
}

/// Second-order one-sided difference `(-3F(0) + 4F(h) - F(2h)) / 2h` of the
/// learner's additive flow.
fn fd_field(learner: &dyn Learner, phi: &Observation, theta: &BeliefPoint) -> Result<Vec<f64>> {
    let at = |t: f64| -> Result<Vec<f64>> {
        let t = crate::domain::ConfidenceDomain::Add.value(t)?;
        Ok(learner.flow(phi, &t, theta)?.coords())
    };
    let f0 = theta.coords();
    let f1 = at(FD_STEP)?;
    let f2 = at(2.0 * FD_STEP)?;
    if f1.len() != f0.len() || f2.len() != f0.len() {
        return Err(Error::Unsupported("flow changes the coordinate layout".into()));
    }
    Ok((0..f0.len())
        .map(|i| (-3.0 * f0[i] + 4.0 * f1[i] - f2[i]) / (2.0 * FD_STEP))
        .collect())
}

fn field_label(learner: &dyn Learner, phi: &Observation) -> String {
    format!("{}:{}", learner.id(), phi)
}

fn derivative_with(learner: Arc<dyn Learner>, phi: Observation, closed_forms: bool) -> VectorField {
    let label = field_label(learner.as_ref(), &phi);
    let kind = learner.belief_kind();
    VectorField::new(label, kind, move |theta| {
        if !learner.in_domain(&phi, theta) {
            return Err(Error::Domain(format!(
                "{} is undefined at this belief",
                field_label(learner.as_ref(), &phi)
            )));
        }
        if closed_forms {
            if let Some(v) = learner.closed_form_field(&phi, theta) {
                return v;
            }
        }
        fd_field(learner.as_ref(), &phi, theta)
    })
}

/// The derivative field of a learner's additive form for observation `phi`,
/// using closed forms where registered and a finite difference otherwise.
pub fn derivative_field(learner: Arc<dyn Learner>, phi: Observation) -> VectorField {
    derivative_with(learner, phi, true)
}

/// Like [`derivative_field`] but always by finite differences.
pub fn derivative_field_fd(learner: Arc<dyn Learner>, phi: Observation) -> VectorField {
    derivative_with(learner, phi, false)
}

/// Relative step for [`natural_gradient`].
pub const NATURAL_GRADIENT_STEP: f64 = 1e-5;

/// Fisher natural gradient of `f` at `p`: `pᵢ∂ᵢf − pᵢλ` with
/// `λ = Σ pⱼ∂ⱼf`. Partials are central differences with relative steps
/// `hᵢ = h·pᵢ`; coordinates with `pᵢ ≤ ε` get a zero component.
pub fn natural_gradient(
    p: &FiniteSimplex,
    f: impl Fn(&FiniteSimplex) -> Result<f64>,
) -> Result<TangentVector> {
    natural_gradient_with_step(p, f, NATURAL_GRADIENT_STEP)
}

pub fn natural_gradient_with_step(
    p: &FiniteSimplex,
    f: impl Fn(&FiniteSimplex) -> Result<f64>,
    h: f64,
) -> Result<TangentVector> {
    let n = p.len();
    let mut scaled = vec![0.0; n];
    for i in 0..n {
        let pi = p.probs()[i];
        if pi <= EPS {
            continue;
        }
        let mut up = p.probs().to_vec();
        let mut dn = p.probs().to_vec();
        up[i] += h * pi;
        dn[i] -= h * pi;
        let fu = f(&p.with_probs(up)?)?;
        let fd = f(&p.with_probs(dn)?)?;
        // p_i ∂_i f
        scaled[i] = (fu - fd) / (2.0 * h);
        if !scaled[i].is_finite() {
            return Err(Error::Numerical(format!("non-finite partial in coordinate {i}")));
        }
    }
    let lambda: f64 = scaled.iter().sum();
    let components = (0..n)
        .map(|i| {
            let pi = p.probs()[i];
            if pi <= EPS {
                0.0
            } else {
                scaled[i] - pi * lambda
            }
        })
        .collect();
    Ok(TangentVector {
        base: p.clone().into(),
        components,
    })
}

/// Pointwise weighted sum `Σ kᵢ Xᵢ`. Terms are summed in (label, weight)
/// order, so the result does not depend on the input order.
pub fn combine_fields(fields: &[VectorField], weights: &[f64]) -> Result<VectorField> {
    if fields.is_empty() {
        return Err(Error::param("fields", "need at least one field"));
    }
    if fields.len() != weights.len() {
        return Err(Error::param("weights", "one weight per field"));
    }
    if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(Error::param("weights", "weights must be finite and positive"));
    }
    let kind = fields[0].kind;
    if fields.iter().any(|f| f.kind != kind) {
        return Err(Error::KindMismatch {
            what: "combine_fields",
            expected: kind_name(kind),
            found: "fields on different belief spaces".into(),
        });
    }
    let mut terms: Vec<(VectorField, f64)> = fields.iter().cloned().zip(weights.iter().copied()).collect();
    terms.sort_by(|a, b| a.0.label.cmp(&b.0.label).then(a.1.total_cmp(&b.1)));
    let label = terms
        .iter()
        .map(|(f, w)| if *w == 1.0 { f.label.clone() } else { format!("{w}*{}", f.label) })
        .collect::<Vec<_>>()
        .join(" (+) ");
    Ok(VectorField::new(label, kind, move |theta| {
        let mut total: Option<Vec<f64>> = None;
        for (f, w) in &terms {
            let v = f.components(theta)?;
            match total.as_mut() {
                None => total = Some(v.into_iter().map(|c| w * c).collect()),
                Some(t) => {
                    if t.len() != v.len() {
                        return Err(Error::Numerical("fields disagree on dimension".into()));
                    }
                    t.iter_mut().zip(v).for_each(|(a, c)| *a += w * c);
                }
            }
        }
        Ok(total.expect("nonempty"))
    }))
}

/// Observations of one learner held in parallel, each with a weight.
#[derive(Clone, Debug, PartialEq)]
pub struct ParallelObservation {
    terms: Vec<(Observation, f64)>,
}

impl ParallelObservation {
    pub fn new(terms: Vec<(Observation, f64)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::param("terms", "parallel observation needs a term"));
        }
        if terms.iter().any(|(_, w)| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::param("weights", "weights must be finite and positive"));
        }
        Ok(ParallelObservation { terms })
    }

    pub fn terms(&self) -> &[(Observation, f64)] {
        &self.terms
    }

    /// `Σ kᵢ F'_{φᵢ}`.
    pub fn field(&self, learner: Arc<dyn Learner>) -> Result<VectorField> {
        let fields: Vec<_> = self
            .terms
            .iter()
            .map(|(phi, _)| derivative_field(learner.clone(), phi.clone()))
            .collect();
        let weights: Vec<_> = self.terms.iter().map(|(_, w)| *w).collect();
        combine_fields(&fields, &weights)
    }
}
