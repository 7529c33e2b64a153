//! Per-learner instance generators and confidence axes.
//!
//! An axis maps `s ∈ [0, 1]` monotonically onto a learner's confidence
//! domain with `0 ↦ ⊥` and `1 ↦ ⊤`. Additive axes use `t = -ln(1-s)`, so a
//! uniform step in `s` near zero is a uniform step in `t`.

use std::collections::BTreeMap;

use rand::Rng;
use serde_json::{json, Value};

use crate::belief::{default_labels, BeliefPoint, EventSet, GaussianBelief, GradedBeliefTable, MassFunction, ParamVector};
use crate::domain::{ConfidenceDomain, ConfidenceValue};
use crate::error::Result;
use crate::flow::natural_gradient_with_step;
use crate::learners::{Classifier, ClassifierConfig, KalmanLearner, Learner, ListLifted, Observation};
use crate::sampling::{dirichlet_simplex, log_uniform, random_proper_event, random_variable, SeededRng};

/// Step used by the gradient-alignment check, both along paths and for `∇Bel`.
pub(crate) const LB_STEP: f64 = 1e-4;

pub(crate) struct Instance {
    pub phi: Observation,
    pub theta: BeliefPoint,
}

impl Instance {
    pub fn witness(&self) -> Value {
        json!({"observation": self.phi.to_json(), "belief": self.theta.to_json()})
    }
}

/// One sample of the gradient-alignment check: the path velocity, the
/// metric gradient of `Bel` at the same point, and where it was taken.
pub(crate) struct Alignment {
    pub velocity: Vec<f64>,
    pub gradient: Vec<f64>,
    pub at: Value,
}

pub(crate) trait Probe: Send + Sync {
    fn sample(&self, rng: &mut SeededRng) -> Instance;

    fn axis(&self, phi: &Observation, theta: &BeliefPoint, s: f64) -> Result<ConfidenceValue>;

    /// A random confidence for the composition check.
    fn sample_confidence(&self, rng: &mut SeededRng, inst: &Instance) -> Result<ConfidenceValue> {
        let u: f64 = rng.random();
        let s = if u < 0.1 {
            0.0
        } else if u < 0.2 && self.top_composes() {
            1.0
        } else {
            rng.random_range(0.0..0.999)
        };
        self.axis(&inst.phi, &inst.theta, s)
    }

    /// Whether the confidence axis is a continuum.
    fn continuous(&self) -> bool {
        true
    }

    /// Reason the minimality and no-cycle checks do not apply.
    fn unordered(&self) -> Option<&'static str> {
        None
    }

    /// Whether `⊤` may appear in the composition check.
    fn top_composes(&self) -> bool {
        true
    }

    /// Reason the belief-level checks do not apply.
    fn no_levels(&self) -> Option<&'static str> {
        None
    }

    fn fixed_point_tolerance(&self) -> Option<f64> {
        None
    }

    /// Finite candidate set for the residual search, for discrete axes.
    fn residual_points(&self) -> Option<Vec<f64>> {
        None
    }

    /// Reason the gradient-alignment check does not apply.
    fn no_metric(&self) -> Option<&'static str> {
        None
    }

    fn alignment(&self, _learner: &dyn Learner, _inst: &Instance, _rng: &mut SeededRng) -> Result<Alignment> {
        unreachable!("probe has no metric")
    }
}

static FRAC: ConfidenceDomain = ConfidenceDomain::Frac;
static ADD: ConfidenceDomain = ConfidenceDomain::Add;

fn additive_axis(s: f64) -> Result<ConfidenceValue> {
    if s >= 1.0 {
        return Ok(ADD.top());
    }
    ADD.value(-(-s).ln_1p())
}

/// Velocity of `t ↦ c(t)` at `t0`: central where possible, else second-order forward.
fn path_velocity(c: impl Fn(f64) -> Result<Vec<f64>>, t0: f64, h: f64) -> Result<Vec<f64>> {
    if t0 >= h {
        let (a, b) = (c(t0 + h)?, c(t0 - h)?);
        Ok(a.iter().zip(&b).map(|(x, y)| (x - y) / (2.0 * h)).collect())
    } else {
        let (f0, f1, f2) = (c(t0)?, c(t0 + h)?, c(t0 + 2.0 * h)?);
        Ok((0..f0.len())
            .map(|i| (-3.0 * f0[i] + 4.0 * f1[i] - f2[i]) / (2.0 * h))
            .collect())
    }
}

/// Euclidean gradient of `f` in coordinates, by central differences.
fn coordinate_gradient(theta: &BeliefPoint, f: impl Fn(&BeliefPoint) -> Result<f64>, h: f64) -> Result<Vec<f64>> {
    let x = theta.coords();
    (0..x.len())
        .map(|i| {
            let mut up = x.clone();
            let mut dn = x.clone();
            up[i] += h;
            dn[i] -= h;
            Ok((f(&theta.with_coords(&up)?)? - f(&theta.with_coords(&dn)?)?) / (2.0 * h))
        })
        .collect()
}

/// Fisher alignment along the additive axis `t ↦ observe(axis(1-e^{-t}))`.
fn fisher_alignment(
    probe: &dyn Probe,
    learner: &dyn Learner,
    inst: &Instance,
    rng: &mut SeededRng,
) -> Result<Alignment> {
    let t0 = if rng.random_bool(0.2) { 0.0 } else { rng.random_range(0.0..3.0) };
    let c = |t: f64| -> Result<BeliefPoint> {
        let chi = probe.axis(&inst.phi, &inst.theta, -(-t).exp_m1())?;
        learner.observe(&inst.phi, &chi, &inst.theta)
    };
    let velocity = path_velocity(|t| Ok(c(t)?.coords()), t0, LB_STEP)?;
    let here = c(t0)?;
    let gradient = natural_gradient_with_step(
        here.as_simplex()?,
        |q| learner.bel(&inst.phi, &q.clone().into()),
        LB_STEP,
    )?
    .components;
    Ok(Alignment {
        velocity,
        gradient,
        at: json!({"t": t0}),
    })
}

/// Interpolation and its mutants: frac axis `s ↦ s`.
pub(crate) struct EventProbe;

impl Probe for EventProbe {
    fn sample(&self, rng: &mut SeededRng) -> Instance {
        loop {
            let n = rng.random_range(3..=6);
            let p = dirichlet_simplex(rng, n);
            // Draws concentrated on one world have no event with both sides above the floor.
            if p.probs().iter().any(|x| *x > 0.9) {
                continue;
            }
            let Some(a) = random_proper_event(rng, &p, 0.05) else {
                continue;
            };
            return Instance {
                phi: Observation::Event(a),
                theta: p.into(),
            };
        }
    }

    fn axis(&self, _phi: &Observation, _theta: &BeliefPoint, s: f64) -> Result<ConfidenceValue> {
        FRAC.value(s)
    }

    fn alignment(&self, learner: &dyn Learner, inst: &Instance, rng: &mut SeededRng) -> Result<Alignment> {
        fisher_alignment(self, learner, inst, rng)
    }
}

pub(crate) struct MassProbe;

impl Probe for MassProbe {
    fn sample(&self, rng: &mut SeededRng) -> Instance {
        let n = rng.random_range(3..=5);
        let full = EventSet::full(n).mask();
        let k = rng.random_range(2..=5);
        loop {
            let mut masses = BTreeMap::new();
            for _ in 0..k {
                let set = EventSet::from_mask(rng.random_range(1..=full));
                *masses.entry(set).or_insert(0.0) += rng.random_range(0.05..1.0);
            }
            let total: f64 = masses.values().sum();
            masses.values_mut().for_each(|m| *m /= total);
            let m = MassFunction::new(default_labels(n), masses).expect("normalized masses");
            for _ in 0..20 {
                let a = EventSet::from_mask(rng.random_range(1..full));
                if m.plaus(a) > 0.05 && m.bel(a) < 0.95 {
                    return Instance {
                        phi: Observation::Event(a),
                        theta: m.into(),
                    };
                }
            }
        }
    }

    fn axis(&self, _phi: &Observation, _theta: &BeliefPoint, s: f64) -> Result<ConfidenceValue> {
        FRAC.value(s)
    }

    fn no_metric(&self) -> Option<&'static str> {
        Some("no metric registered for mass functions")
    }
}

/// Kalman: the optimal-gain precision axis `λ = -ln(1-s)`.
pub(crate) struct GaussianProbe;

impl Probe for GaussianProbe {
    fn sample(&self, rng: &mut SeededRng) -> Instance {
        let mean = rng.random_range(-5.0..5.0);
        let variance = log_uniform(rng, 1e-2, 10.0);
        Instance {
            phi: Observation::Measurement(rng.random_range(-5.0..5.0)),
            theta: GaussianBelief::new(mean, variance).expect("finite").into(),
        }
    }

    fn axis(&self, _phi: &Observation, theta: &BeliefPoint, s: f64) -> Result<ConfidenceValue> {
        let lambda = if s >= 1.0 { f64::INFINITY } else { -(-s).ln_1p() };
        KalmanLearner::precision_confidence(theta.as_gaussian()?, lambda)
    }

    fn sample_confidence(&self, rng: &mut SeededRng, _inst: &Instance) -> Result<ConfidenceValue> {
        if rng.random_bool(0.1) {
            return Ok(ConfidenceDomain::Kalman.bot());
        }
        ConfidenceDomain::Kalman.pair(rng.random_range(0.0..=1.0), log_uniform(rng, 1e-2, 1e2))
    }

    fn unordered(&self) -> Option<&'static str> {
        Some("the pair order is for reporting only")
    }

    fn top_composes(&self) -> bool {
        false
    }

    /// Along `K ↦ (K, r²)` at `K = 0`, against the Euclidean gradient of `Bel`.
    fn alignment(&self, learner: &dyn Learner, inst: &Instance, rng: &mut SeededRng) -> Result<Alignment> {
        let r2 = log_uniform(rng, 0.1, 10.0);
        let c = |k: f64| -> Result<Vec<f64>> {
            let chi = ConfidenceDomain::Kalman.pair(k, r2)?;
            Ok(learner.observe(&inst.phi, &chi, &inst.theta)?.coords())
        };
        let velocity = path_velocity(c, 0.0, LB_STEP)?;
        let gradient = coordinate_gradient(&inst.theta, |b| learner.bel(&inst.phi, b), LB_STEP)?;
        Ok(Alignment {
            velocity,
            gradient,
            at: json!({"gain": 0.0, "r2": r2}),
        })
    }
}

/// Boltzmann and tempered Bayes: additive axis.
pub(crate) struct TemperedProbe {
    pub likelihood: bool,
}

impl Probe for TemperedProbe {
    fn sample(&self, rng: &mut SeededRng) -> Instance {
        let n = rng.random_range(3..=6);
        let p = dirichlet_simplex(rng, n);
        let phi = if self.likelihood {
            Observation::Likelihood((0..n).map(|_| rng.random_range(0.05..=1.0)).collect())
        } else {
            Observation::Potential(random_variable(rng, n, -2.0, 2.0))
        };
        Instance { phi, theta: p.into() }
    }

    fn axis(&self, _phi: &Observation, _theta: &BeliefPoint, s: f64) -> Result<ConfidenceValue> {
        additive_axis(s)
    }

    /// `⊥`, `⊤`, or log-uniform `β ∈ [1e-2, 10]`.
    fn sample_confidence(&self, rng: &mut SeededRng, _inst: &Instance) -> Result<ConfidenceValue> {
        match rng.random_range(0..10) {
            0 => Ok(ADD.bot()),
            1 => Ok(ADD.top()),
            _ => ADD.value(log_uniform(rng, 1e-2, 10.0)),
        }
    }

    fn alignment(&self, learner: &dyn Learner, inst: &Instance, rng: &mut SeededRng) -> Result<Alignment> {
        fisher_alignment(self, learner, inst, rng)
    }
}

pub(crate) struct GradedProbe;

impl Probe for GradedProbe {
    fn sample(&self, rng: &mut SeededRng) -> Instance {
        let k = rng.random_range(1..=3);
        let entries: BTreeMap<String, f64> = (0..k)
            .map(|i| (format!("p{i}"), rng.random_range(0.0..0.95)))
            .collect();
        let prop = format!("p{}", rng.random_range(0..k));
        Instance {
            phi: Observation::Prop(prop),
            theta: GradedBeliefTable::new(entries).expect("degrees in [0, 1]").into(),
        }
    }

    fn axis(&self, _phi: &Observation, _theta: &BeliefPoint, s: f64) -> Result<ConfidenceValue> {
        ConfidenceDomain::Max.value(s)
    }

    fn no_metric(&self) -> Option<&'static str> {
        Some("no metric registered for graded tables")
    }
}

/// Gradient-descent classifier: `n = round(20s)` steps, `s = 1 ↦ ⊤`.
pub(crate) struct ExampleProbe {
    pub cfg: ClassifierConfig,
}

pub(crate) const MAX_AXIS_STEPS: f64 = 20.0;

impl Probe for ExampleProbe {
    fn sample(&self, rng: &mut SeededRng) -> Instance {
        let theta = (0..self.cfg.param_len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let x = (0..self.cfg.features).map(|_| rng.random_range(-1.0..1.0)).collect();
        Instance {
            phi: Observation::Example {
                x,
                y: rng.random_range(0..self.cfg.classes),
            },
            theta: ParamVector::new(theta).expect("finite").into(),
        }
    }

    fn axis(&self, _phi: &Observation, _theta: &BeliefPoint, s: f64) -> Result<ConfidenceValue> {
        if s >= 1.0 {
            return Ok(ConfidenceDomain::Count.top());
        }
        ConfidenceDomain::Count.value((MAX_AXIS_STEPS * s).round())
    }

    fn sample_confidence(&self, rng: &mut SeededRng, _inst: &Instance) -> Result<ConfidenceValue> {
        ConfidenceDomain::Count.value(rng.random_range(0..=MAX_AXIS_STEPS as u32) as f64)
    }

    fn continuous(&self) -> bool {
        false
    }

    fn top_composes(&self) -> bool {
        false
    }

    fn no_levels(&self) -> Option<&'static str> {
        Some("no attained top belief level")
    }

    fn fixed_point_tolerance(&self) -> Option<f64> {
        Some(1e-7)
    }

    fn residual_points(&self) -> Option<Vec<f64>> {
        Some((0..=MAX_AXIS_STEPS as u32).map(|k| k as f64 / MAX_AXIS_STEPS).collect())
    }

    /// One step against `η∇Bel`: the metric is Euclidean scaled by `1/η`.
    fn alignment(&self, learner: &dyn Learner, inst: &Instance, _rng: &mut SeededRng) -> Result<Alignment> {
        let one = ConfidenceDomain::Count.value(1.0)?;
        let next = learner.observe(&inst.phi, &one, &inst.theta)?.coords();
        let velocity = next.iter().zip(inst.theta.coords()).map(|(a, b)| a - b).collect();
        let gradient = coordinate_gradient(&inst.theta, |b| learner.bel(&inst.phi, b), LB_STEP)?
            .into_iter()
            .map(|g| self.cfg.eta * g)
            .collect();
        Ok(Alignment {
            velocity,
            gradient,
            at: json!({"steps": 1}),
        })
    }
}

/// A lifted learner: singleton lists along the inner axis.
pub(crate) struct ListProbe {
    pub inner: Box<dyn Probe>,
    pub domain: ConfidenceDomain,
}

impl Probe for ListProbe {
    fn sample(&self, rng: &mut SeededRng) -> Instance {
        self.inner.sample(rng)
    }

    fn axis(&self, phi: &Observation, theta: &BeliefPoint, s: f64) -> Result<ConfidenceValue> {
        if s <= 0.0 {
            return Ok(self.domain.bot());
        }
        self.domain.list(vec![self.inner.axis(phi, theta, s)?])
    }

    fn sample_confidence(&self, rng: &mut SeededRng, inst: &Instance) -> Result<ConfidenceValue> {
        let k = rng.random_range(0..=3);
        let items = (0..k)
            .map(|_| self.inner.sample_confidence(rng, inst))
            .collect::<Result<Vec<_>>>()?;
        self.domain.list(items)
    }

    fn continuous(&self) -> bool {
        self.inner.continuous()
    }

    fn unordered(&self) -> Option<&'static str> {
        self.inner.unordered()
    }

    fn top_composes(&self) -> bool {
        self.inner.top_composes()
    }

    fn no_levels(&self) -> Option<&'static str> {
        self.inner.no_levels()
    }

    fn fixed_point_tolerance(&self) -> Option<f64> {
        self.inner.fixed_point_tolerance()
    }

    fn residual_points(&self) -> Option<Vec<f64>> {
        self.inner.residual_points()
    }

    fn no_metric(&self) -> Option<&'static str> {
        Some("lifted learners have no registered path metric")
    }
}

/// The probe for a registered learner, or `None` for unknown ids.
pub(crate) fn probe_for(learner: &dyn Learner) -> Option<Box<dyn Probe>> {
    if let Some(lifted) = learner.as_any().downcast_ref::<ListLifted>() {
        return Some(Box::new(ListProbe {
            inner: probe_for(lifted.inner())?,
            domain: learner.domain().clone(),
        }));
    }
    let id = learner.id();
    Some(match id {
        "interp" => Box::new(EventProbe),
        "ds" => Box::new(MassProbe),
        "kalman" => Box::new(GaussianProbe),
        "boltzmann" => Box::new(TemperedProbe { likelihood: false }),
        "bayes" => Box::new(TemperedProbe { likelihood: true }),
        "max-graded" => Box::new(GradedProbe),
        "classifier" => Box::new(ExampleProbe {
            cfg: learner.as_any().downcast_ref::<Classifier>()?.config().clone(),
        }),
        _ if id.starts_with("mutant-") => Box::new(EventProbe),
        _ => return None,
    })
}
