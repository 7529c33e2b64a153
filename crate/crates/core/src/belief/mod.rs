//! Belief states and the full-confidence update rules.

mod mass;
mod rules;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};

pub use mass::{ds_plaus_update, MassFunction, MAX_MASS_WORLDS};
pub use rules::{condition, image, jeffrey};

/// Mass threshold below which an event counts as impossible.
pub const EPS: f64 = 1e-12;

/// Largest supported world set for simplices.
pub const MAX_WORLDS: usize = 64;

/// Tolerance on `Σ p = 1` when accepting user-supplied distributions.
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// A subset of a world set, as a bitmask over world indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct EventSet(u64);

impl EventSet {
    pub const fn from_mask(mask: u64) -> Self {
        EventSet(mask)
    }

    pub const fn empty() -> Self {
        EventSet(0)
    }

    /// All of `{0, …, n-1}`.
    pub fn full(n: usize) -> Self {
        if n >= 64 {
            EventSet(u64::MAX)
        } else {
            EventSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        EventSet(1u64 << i)
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        EventSet(indices.into_iter().fold(0, |m, i| m | (1u64 << i)))
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 >> i & 1 == 1
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Complement within a world set of size `n`.
    pub fn complement(self, n: usize) -> Self {
        EventSet(!self.0 & EventSet::full(n).0)
    }

    pub fn union(self, other: Self) -> Self {
        EventSet(self.0 | other.0)
    }

    pub fn intersect(self, other: Self) -> Self {
        EventSet(self.0 & other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&i| self.contains(i))
    }
}

fn shared_labels(labels: Vec<String>, max: usize) -> Result<Arc<[String]>> {
    if labels.is_empty() {
        return Err(Error::InvalidBelief("world set is empty".into()));
    }
    if labels.len() > max {
        return Err(Error::InvalidBelief(format!(
            "{} worlds exceed the limit of {max}",
            labels.len()
        )));
    }
    let mut sorted = labels.clone();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != labels.len() {
        return Err(Error::InvalidBelief("duplicate world labels".into()));
    }
    Ok(labels.into())
}

/// Default labels `w0, w1, …`.
pub fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("w{i}")).collect()
}

/// A probability distribution over a finite, labelled world set.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteSimplex {
    labels: Arc<[String]>,
    probs: Vec<f64>,
}

impl FiniteSimplex {
    /// Accepts `probs` that already sum to one within `1e-10`.
    pub fn new(labels: Vec<String>, probs: Vec<f64>) -> Result<Self> {
        let labels = shared_labels(labels, MAX_WORLDS)?;
        Self::checked(labels, probs)
    }

    fn checked(labels: Arc<[String]>, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != labels.len() {
            return Err(Error::InvalidBelief(format!(
                "{} probabilities for {} worlds",
                probs.len(),
                labels.len()
            )));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < -EPS) {
            return Err(Error::InvalidBelief("probabilities must be finite and >= 0".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidBelief(format!("probabilities sum to {total}")));
        }
        Ok(Self::project(labels, probs))
    }

    /// Normalizes arbitrary nonnegative weights.
    pub fn from_weights(labels: Vec<String>, weights: Vec<f64>) -> Result<Self> {
        let labels = shared_labels(labels, MAX_WORLDS)?;
        if weights.len() != labels.len() {
            return Err(Error::InvalidBelief("weight count does not match worlds".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidBelief("weights must be finite and >= 0".into()));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidBelief("weights sum to zero".into()));
        }
        Ok(Self::project(labels, weights))
    }

    /// Probabilities with default labels.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        Self::new(default_labels(probs.len()), probs)
    }

    pub fn uniform(labels: Vec<String>) -> Result<Self> {
        let n = labels.len();
        Self::new(labels, vec![1.0 / n as f64; n])
    }

    /// Clamps negatives to zero and renormalizes.
    pub(crate) fn project(labels: Arc<[String]>, mut probs: Vec<f64>) -> Self {
        for p in probs.iter_mut() {
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let total: f64 = probs.iter().sum();
        if total > 0.0 && total != 1.0 {
            for p in probs.iter_mut() {
                *p /= total;
            }
        }
        FiniteSimplex { labels, probs }
    }

    /// Same worlds, new (projected) probabilities.
    pub fn with_probs(&self, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != self.len() {
            return Err(Error::InvalidBelief("dimension changed".into()));
        }
        if probs.iter().any(|p| !p.is_finite()) {
            return Err(Error::Numerical("non-finite probability".into()));
        }
        if probs.iter().map(|p| p.max(0.0)).sum::<f64>() <= 0.0 {
            return Err(Error::Numerical("all probability mass vanished".into()));
        }
        Ok(Self::project(self.labels.clone(), probs))
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub(crate) fn shared_labels(&self) -> Arc<[String]> {
        self.labels.clone()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn full_event(&self) -> EventSet {
        EventSet::full(self.len())
    }

    /// `P(A)`.
    pub fn prob(&self, a: EventSet) -> f64 {
        a.indices()
            .take_while(|&i| i < self.len())
            .map(|i| self.probs[i])
            .sum()
    }

    /// Worlds with positive mass.
    pub fn support(&self) -> EventSet {
        EventSet::from_indices((0..self.len()).filter(|&i| self.probs[i] > 0.0))
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Event made of the named worlds.
    pub fn event<S: AsRef<str>>(&self, names: &[S]) -> Result<EventSet> {
        let mut mask = EventSet::empty();
        for name in names {
            let i = self
                .index_of(name.as_ref())
                .ok_or_else(|| Error::InvalidBelief(format!("unknown world `{}`", name.as_ref())))?;
            mask = mask.union(EventSet::singleton(i));
        }
        Ok(mask)
    }

    /// Checks that `a` only names worlds of this simplex.
    pub fn check_event(&self, a: EventSet) -> Result<()> {
        if a.is_subset(self.full_event()) {
            Ok(())
        } else {
            Err(Error::InvalidBelief(format!(
                "event {:#x} names worlds outside the {}-world simplex",
                a.mask(),
                self.len()
            )))
        }
    }

    /// `E_P[V]`.
    pub fn expectation(&self, v: &RandomVariable) -> Result<f64> {
        self.check_variable(v)?;
        Ok(self
            .probs
            .iter()
            .zip(v.values())
            .filter(|(p, _)| **p > 0.0)
            .map(|(p, x)| p * x)
            .sum())
    }

    pub(crate) fn check_variable(&self, v: &RandomVariable) -> Result<()> {
        if v.len() == self.len() {
            Ok(())
        } else {
            Err(Error::InvalidBelief(format!(
                "random variable has {} entries for {} worlds",
                v.len(),
                self.len()
            )))
        }
    }

    /// Total-variation distance.
    pub fn tv_distance(&self, other: &FiniteSimplex) -> f64 {
        0.5 * self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }
}

/// Mean and variance of a one-dimensional Gaussian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianBelief {
    pub mean: f64,
    pub variance: f64,
}

impl GaussianBelief {
    pub fn new(mean: f64, variance: f64) -> Result<Self> {
        if !mean.is_finite() {
            return Err(Error::InvalidBelief("Gaussian mean must be finite".into()));
        }
        if variance.is_nan() || variance < 0.0 {
            return Err(Error::InvalidBelief(format!("Gaussian variance {variance} < 0")));
        }
        Ok(GaussianBelief { mean, variance })
    }
}

/// Graded degrees of belief `θ(φ) ∈ [0,1]` per observation id. Missing
/// entries read as 0.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct GradedBeliefTable {
    entries: BTreeMap<String, f64>,
}

impl GradedBeliefTable {
    pub fn new(entries: BTreeMap<String, f64>) -> Result<Self> {
        if let Some((k, v)) = entries.iter().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidBelief(format!("degree {v} for `{k}` is outside [0,1]")));
        }
        Ok(GradedBeliefTable { entries })
    }

    pub fn get(&self, prop: &str) -> f64 {
        self.entries.get(prop).copied().unwrap_or(0.0)
    }

    pub fn entries(&self) -> &BTreeMap<String, f64> {
        &self.entries
    }

    /// Copy with one entry replaced.
    pub fn with(&self, prop: &str, degree: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&degree) {
            return Err(Error::InvalidBelief(format!("degree {degree} is outside [0,1]")));
        }
        let mut entries = self.entries.clone();
        entries.insert(prop.to_string(), degree);
        Ok(GradedBeliefTable { entries })
    }
}

/// A real-valued function on worlds.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomVariable {
    values: Vec<f64>,
}

impl RandomVariable {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidBelief("random variable entries must be finite".into()));
        }
        Ok(RandomVariable { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, k: f64) -> RandomVariable {
        RandomVariable {
            values: self.values.iter().map(|v| v * k).collect(),
        }
    }

    pub fn plus(&self, other: &RandomVariable) -> Result<RandomVariable> {
        if other.len() != self.len() {
            return Err(Error::InvalidBelief("random variables differ in length".into()));
        }
        Ok(RandomVariable {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }
}

/// Model parameters for parametric learners.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamVector {
    pub values: Vec<f64>,
}

impl ParamVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite parameter".into()));
        }
        Ok(ParamVector { values })
    }
}

/// Which belief space a point lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BeliefKind {
    Simplex,
    Gaussian,
    Mass,
    Graded,
    Params,
}

impl fmt::Display for BeliefKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BeliefKind::Simplex => "simplex",
            BeliefKind::Gaussian => "gaussian",
            BeliefKind::Mass => "mass",
            BeliefKind::Graded => "graded",
            BeliefKind::Params => "params",
        })
    }
}

/// A belief state.
#[derive(Clone, Debug, PartialEq)]
pub enum BeliefPoint {
    Simplex(FiniteSimplex),
    Gaussian(GaussianBelief),
    Mass(MassFunction),
    Graded(GradedBeliefTable),
    Params(ParamVector),
}

impl From<FiniteSimplex> for BeliefPoint {
    fn from(p: FiniteSimplex) -> Self {
        BeliefPoint::Simplex(p)
    }
}

impl From<GaussianBelief> for BeliefPoint {
    fn from(g: GaussianBelief) -> Self {
        BeliefPoint::Gaussian(g)
    }
}

impl From<MassFunction> for BeliefPoint {
    fn from(m: MassFunction) -> Self {
        BeliefPoint::Mass(m)
    }
}

impl From<GradedBeliefTable> for BeliefPoint {
    fn from(t: GradedBeliefTable) -> Self {
        BeliefPoint::Graded(t)
    }
}

impl From<ParamVector> for BeliefPoint {
    fn from(p: ParamVector) -> Self {
        BeliefPoint::Params(p)
    }
}

macro_rules! accessor {
    ($name:ident, $variant:ident, $ty:ty, $what:literal) => {
        pub fn $name(&self) -> Result<&$ty> {
            match self {
                BeliefPoint::$variant(x) => Ok(x),
                other => Err(Error::KindMismatch {
                    what: "belief",
                    expected: $what,
                    found: other.kind().to_string(),
                }),
            }
        }
    };
}

impl BeliefPoint {
    pub fn kind(&self) -> BeliefKind {
        match self {
            BeliefPoint::Simplex(_) => BeliefKind::Simplex,
            BeliefPoint::Gaussian(_) => BeliefKind::Gaussian,
            BeliefPoint::Mass(_) => BeliefKind::Mass,
            BeliefPoint::Graded(_) => BeliefKind::Graded,
            BeliefPoint::Params(_) => BeliefKind::Params,
        }
    }

    accessor!(as_simplex, Simplex, FiniteSimplex, "simplex");
    accessor!(as_gaussian, Gaussian, GaussianBelief, "gaussian");
    accessor!(as_mass, Mass, MassFunction, "mass");
    accessor!(as_graded, Graded, GradedBeliefTable, "graded");
    accessor!(as_params, Params, ParamVector, "params");

    /// Coordinates used by vector fields and distances.
    pub fn coords(&self) -> Vec<f64> {
        match self {
            BeliefPoint::Simplex(p) => p.probs().to_vec(),
            BeliefPoint::Gaussian(g) => vec![g.mean, g.variance],
            BeliefPoint::Mass(m) => m.focal_masses().map(|(_, v)| v).collect(),
            BeliefPoint::Graded(t) => t.entries().values().copied().collect(),
            BeliefPoint::Params(p) => p.values.clone(),
        }
    }

    /// Names of [`coords`](Self::coords), for CSV headers.
    pub fn coord_labels(&self) -> Vec<String> {
        match self {
            BeliefPoint::Simplex(p) => p.labels().to_vec(),
            BeliefPoint::Gaussian(_) => vec!["mean".into(), "var".into()],
            BeliefPoint::Mass(m) => m.focal_masses().map(|(a, _)| m.event_key(a)).collect(),
            BeliefPoint::Graded(t) => t.entries().keys().cloned().collect(),
            BeliefPoint::Params(p) => (0..p.values.len()).map(|i| format!("theta{i}")).collect(),
        }
    }

    /// Same shape, new coordinates, projected back into the space.
    pub fn with_coords(&self, coords: &[f64]) -> Result<BeliefPoint> {
        if coords.len() != self.coords().len() {
            return Err(Error::InvalidBelief("coordinate dimension changed".into()));
        }
        if coords.iter().any(|c| c.is_nan()) {
            return Err(Error::Numerical("NaN coordinate".into()));
        }
        Ok(match self {
            BeliefPoint::Simplex(p) => BeliefPoint::Simplex(p.with_probs(coords.to_vec())?),
            BeliefPoint::Gaussian(_) => BeliefPoint::Gaussian(GaussianBelief::new(
                coords[0],
                coords[1].max(0.0),
            )?),
            BeliefPoint::Mass(m) => BeliefPoint::Mass(m.with_focal_masses(coords)?),
            BeliefPoint::Graded(t) => {
                let entries = t
                    .entries()
                    .keys()
                    .cloned()
                    .zip(coords.iter().map(|c| c.clamp(0.0, 1.0)))
                    .collect();
                BeliefPoint::Graded(GradedBeliefTable { entries })
            }
            BeliefPoint::Params(_) => BeliefPoint::Params(ParamVector::new(coords.to_vec())?),
        })
    }

    /// Total variation for simplices, max-abs coordinate distance otherwise.
    /// `None` when the points live in different spaces.
    pub fn distance(&self, other: &BeliefPoint) -> Option<f64> {
        match (self, other) {
            (BeliefPoint::Simplex(a), BeliefPoint::Simplex(b)) if a.len() == b.len() => {
                Some(a.tv_distance(b))
            }
            (BeliefPoint::Gaussian(a), BeliefPoint::Gaussian(b)) => {
                let dv = if a.variance == b.variance {
                    0.0
                } else {
                    (a.variance - b.variance).abs()
                };
                Some((a.mean - b.mean).abs().max(dv))
            }
            (BeliefPoint::Mass(a), BeliefPoint::Mass(b)) => a.distance(b),
            (BeliefPoint::Graded(a), BeliefPoint::Graded(b)) => Some(
                a.entries()
                    .keys()
                    .chain(b.entries().keys())
                    .map(|k| (a.get(k) - b.get(k)).abs())
                    .fold(0.0, f64::max),
            ),
            (BeliefPoint::Params(a), BeliefPoint::Params(b))
                if a.values.len() == b.values.len() =>
            {
                Some(
                    a.values
                        .iter()
                        .zip(&b.values)
                        .map(|(x, y)| (x - y).abs())
                        .fold(0.0, f64::max),
                )
            }
            _ => None,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            BeliefPoint::Simplex(p) => {
                json!({"kind": "simplex", "labels": p.labels(), "probs": p.probs()})
            }
            BeliefPoint::Gaussian(g) => {
                let var = if g.variance.is_finite() {
                    json!(g.variance)
                } else {
                    json!("inf")
                };
                json!({"kind": "gaussian", "mean": g.mean, "var": var})
            }
            BeliefPoint::Mass(m) => {
                let masses: serde_json::Map<String, Value> = m
                    .focal_masses()
                    .map(|(a, v)| (m.event_key(a), json!(v)))
                    .collect();
                json!({"kind": "mass", "labels": m.labels(), "masses": masses})
            }
            BeliefPoint::Graded(t) => json!({"kind": "graded", "entries": t.entries()}),
            BeliefPoint::Params(p) => json!({"kind": "params", "values": p.values}),
        }
    }

    pub fn from_json(v: &Value) -> Result<BeliefPoint> {
        let bad = |m: &str| Error::InvalidBelief(m.to_string());
        let kind = v
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| bad("belief needs a string `kind`"))?;
        let floats = |key: &str| -> Result<Vec<f64>> {
            v.get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| bad(&format!("`{key}` must be an array")))?
                .iter()
                .map(|x| x.as_f64().ok_or_else(|| bad(&format!("`{key}` must hold numbers"))))
                .collect()
        };
        let labels = |n: Option<usize>| -> Result<Vec<String>> {
            match v.get("labels") {
                None => n.map(default_labels).ok_or_else(|| bad("`labels` is required")),
                Some(ls) => ls
                    .as_array()
                    .ok_or_else(|| bad("`labels` must be an array"))?
                    .iter()
                    .map(|x| {
                        x.as_str()
                            .map(str::to_string)
                            .ok_or_else(|| bad("labels must be strings"))
                    })
                    .collect(),
            }
        };
        match kind {
            "simplex" => {
                let probs = floats("probs")?;
                Ok(FiniteSimplex::new(labels(Some(probs.len()))?, probs)?.into())
            }
            "gaussian" => {
                let mean = v
                    .get("mean")
                    .and_then(Value::as_f64)
                    .ok_or_else(|| bad("gaussian needs a numeric `mean`"))?;
                let var = match v.get("var") {
                    Some(Value::String(s)) if s == "inf" => f64::INFINITY,
                    Some(x) => x.as_f64().ok_or_else(|| bad("`var` must be a number or \"inf\""))?,
                    None => return Err(bad("gaussian needs `var`")),
                };
                Ok(GaussianBelief::new(mean, var)?.into())
            }
            "mass" => {
                let labels = labels(None)?;
                let masses = v
                    .get("masses")
                    .and_then(Value::as_object)
                    .ok_or_else(|| bad("mass needs a `masses` object"))?;
                let mut table = Vec::new();
                for (key, x) in masses {
                    let names: Vec<&str> = key.split('|').collect();
                    table.push((names, x.as_f64().ok_or_else(|| bad("masses must be numbers"))?));
                }
                Ok(MassFunction::from_named(labels, &table)?.into())
            }
            "graded" => {
                let entries = v
                    .get("entries")
                    .and_then(Value::as_object)
                    .ok_or_else(|| bad("graded needs an `entries` object"))?
                    .iter()
                    .map(|(k, x)| {
                        x.as_f64()
                            .map(|d| (k.clone(), d))
                            .ok_or_else(|| bad("degrees must be numbers"))
                    })
                    .collect::<Result<BTreeMap<_, _>>>()?;
                Ok(GradedBeliefTable::new(entries)?.into())
            }
            "params" => Ok(ParamVector::new(floats("values")?)
                .map_err(|_| bad("parameters must be finite"))?
                .into()),
            other => Err(bad(&format!("unknown belief kind `{other}`"))),
        }
    }
}
